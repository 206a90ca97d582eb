//! Numeral expansion: digit strings are factored into sums of products of
//! powers of ten, optionally reordered by filters, and spelled out by the
//! transitive closure of a number lexicon.
//!
//! Factorization tokens: `{0}`..`{9}` for digit values, `{10^k}` for
//! powers, `{+++}` between terms. Terms are written highest power first
//! and zero terms are omitted, so `234` becomes
//! `{2}{10^2}{+++}{3}{10^1}{+++}{4}`.
//!
//! A `.num` file configures a number grammar:
//!
//! ```text
//! max_digits = 4
//! lexicon = numbers.wl
//! filter = decade-flop
//! cleanup = cleanup.rules
//! ```

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, StateId};
use crate::lextools::{compile_wordlist, parse_wordlist, WordListEntry};
use crate::ops::{closure, compose, ClosureKind};
use crate::rules::{compile_cascade, parse_rules, RewriteRule};
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::weight::Weight;

pub const SUM: &str = "{+++}";
pub const DEFAULT_MAX_DIGITS: usize = 6;

pub fn digit_token(d: u32) -> String {
    format!("{{{d}}}")
}

pub fn power_token(k: usize) -> String {
    format!("{{10^{k}}}")
}

/// Digit characters, digit values, powers up to `max_digits - 1` and the
/// sum separator.
pub fn register_tokens(table: &mut SymbolTable, max_digits: usize) {
    for d in 0..10 {
        table.insert(&d.to_string());
        table.insert(&digit_token(d));
    }
    for k in 1..max_digits {
        table.insert(&power_token(k));
    }
    table.insert(SUM);
}

/// Adds a path from `from` to `to` reading `input` (or epsilon) on the first
/// arc and writing `outputs` one per arc.
fn add_chain(f: &mut Fst, from: StateId, to: StateId, input: Label, outputs: &[Label]) {
    let mut cur = from;
    let mut ilabel = input;
    for (i, &o) in outputs.iter().enumerate() {
        let next = if i + 1 == outputs.len() { to } else { f.add_state() };
        f.add_arc(cur, Arc::new(ilabel, o, Weight::one(), next));
        ilabel = EPSILON;
        cur = next;
    }
    if outputs.is_empty() {
        f.add_arc(from, Arc::new(input, EPSILON, Weight::one(), to));
    }
}

/// Maps digit strings of length `1..=max_digits` without leading zeros
/// (and `0` itself) to their factorization.
pub fn build_factorizer(max_digits: usize, table: &mut SymbolTable) -> Fst {
    assert!(max_digits >= 1, "max_digits must be positive");
    register_tokens(table, max_digits);
    let digit = |d: u32, t: &SymbolTable| t.get(&d.to_string()).unwrap();
    let value = |d: u32, t: &SymbolTable| t.get(&digit_token(d)).unwrap();
    let power = |k: usize, t: &SymbolTable| t.get(&power_token(k)).unwrap();
    let sum = table.get(SUM).unwrap();

    let mut f = Fst::for_table(table);
    let start = f.add_state();
    f.set_start(start);
    let zero = f.add_state();
    f.set_final(zero, Weight::one());
    add_chain(&mut f, start, zero, digit(0, table), &[value(0, table)]);

    for len in 1..=max_digits {
        let mut cur = f.add_state();
        f.add_arc(start, Arc::eps(cur));
        for pos in 0..len {
            let p = len - 1 - pos;
            let next = f.add_state();
            for d in 0..10u32 {
                let mut out = Vec::new();
                if d == 0 {
                    if pos == 0 {
                        continue;
                    }
                } else {
                    if pos > 0 {
                        out.push(sum);
                    }
                    out.push(value(d, table));
                    if p > 0 {
                        out.push(power(p, table));
                    }
                }
                add_chain(&mut f, cur, next, digit(d, table), &out);
            }
            cur = next;
        }
        f.set_final(cur, Weight::one());
    }
    f
}

/// Deterministic acceptor for the factorizer's domain.
fn digit_domain(max_digits: usize, table: &SymbolTable) -> Fst {
    let digit = |d: u32| table.get(&d.to_string()).unwrap();
    let mut f = Fst::for_table(table);
    let start = f.add_state();
    f.set_start(start);
    let zero = f.add_state();
    f.set_final(zero, Weight::one());
    f.add_arc(start, Arc::new(digit(0), digit(0), Weight::one(), zero));
    let mut prev = start;
    for len in 1..=max_digits {
        let s = f.add_state();
        f.set_final(s, Weight::one());
        let first = if len == 1 { 1 } else { 0 };
        for d in first..10 {
            f.add_arc(prev, Arc::new(digit(d), digit(d), Weight::one(), s));
        }
        prev = s;
    }
    f
}

/// Rewrites every `{d}{10^1}{+++}{u}` as `{u}{+++}{d}{10^1}` (d, u in 1..9)
/// and copies everything else.
pub fn build_decade_flop(table: &mut SymbolTable) -> Fst {
    register_tokens(table, 2);
    let value = |d: u32, t: &SymbolTable| t.get(&digit_token(d)).unwrap();
    let ten = table.get(&power_token(1)).unwrap();
    let sum = table.get(SUM).unwrap();
    let values: HashMap<Label, u32> = (1..10).map(|d| (value(d, table), d)).collect();
    let alphabet: Vec<Label> = table.alphabet().collect();

    let mut f = Fst::for_table(table);
    let s0 = f.add_state();
    f.set_start(s0);
    f.set_final(s0, Weight::one());
    let sink = f.add_state();
    f.set_final(sink, Weight::one());
    // Buffered prefixes: {d}, {d}{10^1}, {d}{10^1}{+++}.
    let a: Vec<StateId> = (0..10).map(|_| f.add_state()).collect();
    let b: Vec<StateId> = (0..10).map(|_| f.add_state()).collect();
    let c: Vec<StateId> = (0..10).map(|_| f.add_state()).collect();

    // Flushes `buffer`, then handles `x` as the idle state would.
    let flush_then = |f: &mut Fst, from: StateId, buffer: &[Label], x: Label| {
        let mut out = buffer.to_vec();
        let to = match values.get(&x) {
            Some(&d) => a[d as usize],
            None => {
                out.push(x);
                s0
            }
        };
        add_chain(f, from, to, x, &out);
    };

    for &x in &alphabet {
        match values.get(&x) {
            Some(&d) => f.add_arc(s0, Arc::new(x, EPSILON, Weight::one(), a[d as usize])),
            None => f.add_arc(s0, Arc::new(x, x, Weight::one(), s0)),
        }
    }
    for d in 1..10u32 {
        let (ad, bd, cd) = (a[d as usize], b[d as usize], c[d as usize]);
        let vd = value(d, table);
        for &x in &alphabet {
            if x == ten {
                f.add_arc(ad, Arc::new(x, EPSILON, Weight::one(), bd));
            } else {
                flush_then(&mut f, ad, &[vd], x);
            }
            if x == sum {
                f.add_arc(bd, Arc::new(x, EPSILON, Weight::one(), cd));
            } else {
                flush_then(&mut f, bd, &[vd, ten], x);
            }
            match values.get(&x) {
                Some(_) => add_chain(&mut f, cd, s0, x, &[x, sum, vd, ten]),
                None => flush_then(&mut f, cd, &[vd, ten, sum], x),
            }
        }
        add_chain(&mut f, ad, sink, EPSILON, &[vd]);
        add_chain(&mut f, bd, sink, EPSILON, &[vd, ten]);
        add_chain(&mut f, cd, sink, EPSILON, &[vd, ten, sum]);
    }
    f
}

/// Finds the shortest string accepted by the deterministic acceptor
/// `domain` that is outside the input language of `f`.
fn uncovered_input(domain: &Fst, f: &Fst) -> Option<Vec<Label>> {
    let closure = |set: BTreeSet<StateId>| -> BTreeSet<StateId> {
        let mut out = set.clone();
        let mut stack: Vec<StateId> = set.into_iter().collect();
        while let Some(s) = stack.pop() {
            for a in f.arcs(s) {
                if a.ilabel == EPSILON && out.insert(a.nextstate) {
                    stack.push(a.nextstate);
                }
            }
        }
        out
    };
    let d0 = domain.start()?;
    let f0 = closure(f.start().into_iter().collect());
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(d0, f0, Vec::new())]);
    while let Some((d, set, path)) = queue.pop_front() {
        if !seen.insert((d, set.clone())) {
            continue;
        }
        if domain.is_final(d) && !set.iter().any(|&s| f.is_final(s)) {
            return Some(path);
        }
        for arc in domain.arcs(d) {
            let next: BTreeSet<StateId> = set
                .iter()
                .flat_map(|&s| f.arcs(s))
                .filter(|a| a.ilabel == arc.ilabel)
                .map(|a| a.nextstate)
                .collect();
            let mut p = path.clone();
            p.push(arc.ilabel);
            queue.push_back((arc.nextstate, closure(next), p));
        }
    }
    None
}

/// `factorizer ∘ filters ∘ lexicon⁺ ∘ cleanup`, checked to cover every
/// input of the factorizer.
pub fn build_expander(
    factorizer: &Fst,
    filters: &[Fst],
    lexicon: &Fst,
    cleanup: Option<&Fst>,
    max_digits: usize,
    table: &SymbolTable,
) -> Result<Fst> {
    let mut acc = factorizer.clone();
    for f in filters {
        acc = compose(&acc, f)?;
    }
    acc = compose(&acc, &closure(lexicon, ClosureKind::Plus))?;
    if let Some(c) = cleanup {
        acc = compose(&acc, c)?;
    }
    if let Some(w) = uncovered_input(&digit_domain(max_digits, table), &acc) {
        return Err(Error::Uncovered {
            witness: table.render(&w),
        });
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberFilter {
    DecadeFlop,
}

impl std::str::FromStr for NumberFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "decade-flop" => Ok(NumberFilter::DecadeFlop),
            other => Err(format!("unknown filter `{other}`")),
        }
    }
}

/// A parsed number grammar with its lexicon and cleanup rules loaded.
#[derive(Clone, Debug)]
pub struct NumberGrammar {
    pub max_digits: usize,
    pub lexicon: Vec<WordListEntry>,
    pub filters: Vec<NumberFilter>,
    pub cleanup: Vec<RewriteRule>,
}

impl NumberGrammar {
    pub fn new(lexicon: Vec<WordListEntry>) -> Self {
        NumberGrammar {
            max_digits: DEFAULT_MAX_DIGITS,
            lexicon,
            filters: Vec::new(),
            cleanup: Vec::new(),
        }
    }

    /// Reads a `.num` file; referenced paths are relative to it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| e.in_file(path))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut g = NumberGrammar::new(Vec::new());
        let mut lexicon: Option<PathBuf> = None;
        for (n, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Format { line: n + 1, msg };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let value = value.trim();
            match key.trim() {
                "max_digits" => {
                    g.max_digits = value
                        .parse()
                        .ok()
                        .filter(|&d: &usize| d >= 1)
                        .ok_or_else(|| err(format!("bad digit count `{value}`")))?;
                }
                "base" if value == "10" => {}
                "lexicon" => lexicon = Some(base.join(value)),
                "filter" => g.filters.push(value.parse().map_err(err)?),
                "cleanup" => {
                    let p = base.join(value);
                    let text =
                        std::fs::read_to_string(&p).map_err(|e| Error::from(e).in_file(&p))?;
                    g.cleanup
                        .extend(parse_rules(&text).map_err(|e| e.in_file(&p))?);
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let p = lexicon.ok_or_else(|| Error::Format {
            line: 0,
            msg: "no `lexicon` given".into(),
        })?;
        let text = std::fs::read_to_string(&p).map_err(|e| Error::from(e).in_file(&p))?;
        g.lexicon = parse_wordlist(&text).map_err(|e| e.in_file(&p))?;
        Ok(g)
    }

    pub fn register(&self, table: &mut SymbolTable) {
        register_tokens(table, self.max_digits);
        for e in &self.lexicon {
            e.register(table);
        }
        for r in &self.cleanup {
            r.register(table);
        }
    }

    /// Compiles against a table that already holds every token.
    pub fn compile(&self, table: &SymbolTable) -> Result<Fst> {
        let mut scratch = table.clone();
        let factorizer = build_factorizer(self.max_digits, &mut scratch);
        let filters: Vec<Fst> = self
            .filters
            .iter()
            .map(|f| match f {
                NumberFilter::DecadeFlop => build_decade_flop(&mut scratch),
            })
            .collect();
        if scratch.len() != table.len() {
            return Err(Error::Format {
                line: 0,
                msg: "number tokens were not registered before compiling".into(),
            });
        }
        let lexicon = compile_wordlist(&self.lexicon, table)?;
        let cleanup = if self.cleanup.is_empty() {
            None
        } else {
            Some(compile_cascade(&self.cleanup, table)?)
        };
        build_expander(
            &factorizer,
            &filters,
            &lexicon,
            cleanup.as_ref(),
            self.max_digits,
            table,
        )
    }
}
