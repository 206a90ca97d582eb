//! Context-dependent rewrite rules `phi -> psi / lambda _ rho`.
//!
//! Rules apply obligatorily, left to right, taking the leftmost and then
//! longest match of `phi`, without overlap. Contexts are matched against
//! the input string. Each application adds the rule cost once.
//!
//! The transducer is built directly as a product of three automata:
//!
//! * a left-context automaton for `Σ* lambda`, run forwards;
//! * a lookahead automaton run right to left over the input, whose state
//!   at position `j` records whether `rho` matches there and which states of
//!   the `phi` automaton can still reach the end of a match that is
//!   followed by `rho`;
//! * a scan/match mode carrying the `phi` state set of an open match.
//!
//! The lookahead automaton is deterministic right to left, so read forwards
//! its state is guessed at every step and the guess is verified when the
//! input ends. Exactly one guess sequence survives for each input, which
//! keeps the machine functional and total over Σ*.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, StateId};
use crate::ops::{compose, sigma_star};
use crate::regex::{compile_regex, TokenRegex};
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::syntax::{lex_line, split_at, Lexeme};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRule {
    pub phi: TokenRegex,
    pub psi: Vec<String>,
    pub lambda: TokenRegex,
    pub rho: TokenRegex,
    pub cost: Weight,
}

impl RewriteRule {
    pub fn new(phi: TokenRegex, psi: Vec<String>) -> Self {
        RewriteRule {
            phi,
            psi,
            lambda: TokenRegex::Empty,
            rho: TokenRegex::Empty,
            cost: Weight::one(),
        }
    }

    pub fn with_context(mut self, lambda: TokenRegex, rho: TokenRegex) -> Self {
        self.lambda = lambda;
        self.rho = rho;
        self
    }

    pub fn with_cost(mut self, cost: Weight) -> Self {
        self.cost = cost;
        self
    }

    pub fn register(&self, table: &mut SymbolTable) {
        self.phi.register(table);
        self.lambda.register(table);
        self.rho.register(table);
        for t in &self.psi {
            table.insert(t);
        }
    }

    /// Parses `phi -> psi [/ lambda _ rho] [<cost>]`.
    pub fn parse(line: &str, line_no: usize) -> Result<RewriteRule> {
        let mut lexemes = lex_line(line, line_no)?;
        let err = |col, msg: &str| Error::Parse {
            line: line_no,
            col,
            msg: msg.to_string(),
        };
        let mut cost = Weight::one();
        while let Some(Lexeme::Cost(w)) = lexemes.last().map(|s| &s.lexeme) {
            cost = cost.times(*w);
            lexemes.pop();
        }
        let sides = split_at(&lexemes, &Lexeme::Arrow);
        if sides.len() != 2 {
            return Err(err(1, "expected exactly one `->`"));
        }
        let phi = TokenRegex::from_lexemes(sides[0], line_no)?;
        let rest = split_at(sides[1], &Lexeme::Slash);
        if rest.len() > 2 {
            return Err(err(rest[2].first().map_or(1, |s| s.col), "more than one `/`"));
        }
        let mut psi = Vec::new();
        for s in rest[0] {
            match &s.lexeme {
                Lexeme::Token(t) => psi.push(t.clone()),
                Lexeme::Eps => {}
                _ => return Err(err(s.col, "replacement must be a token sequence")),
            }
        }
        let (lambda, rho) = match rest.get(1) {
            None => (TokenRegex::Empty, TokenRegex::Empty),
            Some(ctx) => {
                let parts = split_at(ctx, &Lexeme::Under);
                if parts.len() != 2 {
                    return Err(err(
                        ctx.first().map_or(1, |s| s.col),
                        "context needs exactly one `_`",
                    ));
                }
                (
                    TokenRegex::from_lexemes(parts[0], line_no)?,
                    TokenRegex::from_lexemes(parts[1], line_no)?,
                )
            }
        };
        Ok(RewriteRule {
            phi,
            psi,
            lambda,
            rho,
            cost,
        })
    }
}

/// Parses a rule file: one rule per line, `#` comments, blank lines ignored.
pub fn parse_rules(text: &str) -> Result<Vec<RewriteRule>> {
    let mut rules = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if lex_line(line, n + 1)?.is_empty() {
            continue;
        }
        rules.push(RewriteRule::parse(line, n + 1)?);
    }
    Ok(rules)
}

type Set = Vec<usize>;

/// Epsilon-free automaton with possibly several start states.
struct Nfa {
    starts: Set,
    finals: Vec<bool>,
    trans: Vec<HashMap<Label, Set>>,
}

impl Nfa {
    fn from_acceptor(f: &Fst) -> Nfa {
        let n = f.num_states();
        let mut finals = vec![false; n];
        let mut trans: Vec<HashMap<Label, Set>> = vec![HashMap::new(); n];
        for q in f.states() {
            let mut seen = vec![false; n];
            let mut stack = vec![q];
            seen[q] = true;
            while let Some(p) = stack.pop() {
                if f.is_final(p) {
                    finals[q] = true;
                }
                for a in f.arcs(p) {
                    if a.ilabel == EPSILON {
                        if !seen[a.nextstate] {
                            seen[a.nextstate] = true;
                            stack.push(a.nextstate);
                        }
                    } else {
                        trans[q].entry(a.ilabel).or_default().push(a.nextstate);
                    }
                }
            }
        }
        for m in &mut trans {
            for v in m.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
        }
        Nfa {
            starts: f.start().into_iter().collect(),
            finals,
            trans,
        }
    }

    fn reversed(&self) -> Nfa {
        let n = self.finals.len();
        let mut trans: Vec<HashMap<Label, Set>> = vec![HashMap::new(); n];
        for (q, m) in self.trans.iter().enumerate() {
            for (&l, targets) in m {
                for &t in targets {
                    trans[t].entry(l).or_default().push(q);
                }
            }
        }
        let mut finals = vec![false; n];
        for &s in &self.starts {
            finals[s] = true;
        }
        Nfa {
            starts: (0..n).filter(|&q| self.finals[q]).collect(),
            finals,
            trans,
        }
    }

    fn step(&self, set: &[usize], l: Label) -> Set {
        let mut out = BTreeSet::new();
        for &q in set {
            if let Some(ts) = self.trans[q].get(&l) {
                out.extend(ts.iter().copied());
            }
        }
        out.into_iter().collect()
    }

    /// One step of the `Σ* A` automaton: start states are always re-added.
    fn step_anywhere(&self, set: &[usize], l: Label) -> Set {
        let mut out: BTreeSet<usize> = self.step(set, l).into_iter().collect();
        out.extend(self.starts.iter().copied());
        out.into_iter().collect()
    }

    fn any_final(&self, set: &[usize]) -> bool {
        set.iter().any(|&q| self.finals[q])
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

struct Interner<K> {
    ids: HashMap<K, usize>,
    items: Vec<K>,
}

impl<K: Clone + Eq + std::hash::Hash> Interner<K> {
    fn new() -> Self {
        Interner {
            ids: HashMap::new(),
            items: Vec::new(),
        }
    }

    fn intern(&mut self, k: K) -> (usize, bool) {
        if let Some(&id) = self.ids.get(&k) {
            return (id, false);
        }
        let id = self.items.len();
        self.items.push(k.clone());
        self.ids.insert(k, id);
        (id, true)
    }
}

/// Right-to-left lookahead automaton.
struct Lookahead {
    /// Per state: does `rho` match at this position?
    rho_here: Vec<bool>,
    /// Per state: `phi` states with a nonempty continuation ending where
    /// `rho` matches.
    live: Vec<Set>,
    /// `preds[(r, c)]`: states `r'` with `step(r', c) == r`.
    preds: HashMap<(usize, Label), Vec<usize>>,
    initial: usize,
}

impl Lookahead {
    fn build(phi: &Nfa, rho_rev: &Nfa, sigma: &[Label]) -> Lookahead {
        let mut states: Interner<(Set, Set)> = Interner::new();
        let (initial, _) = states.intern((rho_rev.starts.clone(), Vec::new()));
        let mut queue = VecDeque::from([initial]);
        let mut preds: HashMap<(usize, Label), Vec<usize>> = HashMap::new();
        let nphi = phi.finals.len();
        while let Some(r) = queue.pop_front() {
            let (p, e) = states.items[r].clone();
            let rho_next = rho_rev.any_final(&p);
            for &c in sigma {
                let p2 = rho_rev.step_anywhere(&p, c);
                let e2: Set = (0..nphi)
                    .filter(|&q| {
                        phi.trans[q].get(&c).is_some_and(|ts| {
                            ts.iter()
                                .any(|&t| (phi.finals[t] && rho_next) || e.binary_search(&t).is_ok())
                        })
                    })
                    .collect();
                let (id, fresh) = states.intern((p2, e2));
                if fresh {
                    queue.push_back(id);
                }
                preds.entry((id, c)).or_default().push(r);
            }
        }
        Lookahead {
            rho_here: states.items.iter().map(|(p, _)| rho_rev.any_final(p)).collect(),
            live: states.items.into_iter().map(|(_, e)| e).collect(),
            preds,
            initial,
        }
    }

    fn len(&self) -> usize {
        self.live.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Mode {
    Scan,
    Match(usize),
}

/// Compiles one rule against the current alphabet of `table`.
pub fn compile_rule(rule: &RewriteRule, table: &SymbolTable) -> Result<Fst> {
    let sigma: Vec<Label> = table.alphabet().collect();
    let phi = Nfa::from_acceptor(&compile_regex(&rule.phi, table)?);
    let lambda = Nfa::from_acceptor(&compile_regex(&rule.lambda, table)?);
    let rho_rev = Nfa::from_acceptor(&compile_regex(&rule.rho, table)?).reversed();
    let psi: Vec<Label> = rule
        .psi
        .iter()
        .map(|t| table.label(t))
        .collect::<Result<_>>()?;
    let phi_start = phi.starts[0];
    let phi_nullable = phi.finals[phi_start];
    let phi_finals: Set = (0..phi.finals.len()).filter(|&q| phi.finals[q]).collect();

    let look = Lookahead::build(&phi, &rho_rev, &sigma);

    let mut left: Interner<Set> = Interner::new();
    let mut left_steps: HashMap<(usize, Label), usize> = HashMap::new();
    let (left0, _) = left.intern(lambda.starts.clone());
    let mut matches: Interner<Set> = Interner::new();

    let mut out = Fst::for_table(table);
    let mut ids: HashMap<(usize, usize, Mode), StateId> = HashMap::new();
    let mut queue: VecDeque<(usize, usize, Mode)> = VecDeque::new();

    let super_start = out.add_state();
    out.set_start(super_start);

    macro_rules! state {
        ($key:expr) => {{
            let key = $key;
            match ids.get(&key) {
                Some(&s) => s,
                None => {
                    let s = out.add_state();
                    ids.insert(key, s);
                    queue.push_back(key);
                    s
                }
            }
        }};
    }

    // Emits psi on an epsilon-input chain from `src`; returns the chain end.
    let emit = |out: &mut Fst, src: StateId, cost: Weight| -> StateId {
        let mut cur = src;
        let mut w = cost;
        for &l in &psi {
            let next = out.add_state();
            out.add_arc(cur, Arc::new(EPSILON, l, w, next));
            w = Weight::one();
            cur = next;
        }
        if cur == src {
            let next = out.add_state();
            out.add_arc(cur, Arc::new(EPSILON, EPSILON, w, next));
            cur = next;
        }
        cur
    };

    for r in 0..look.len() {
        let s = state!((r, left0, Mode::Scan));
        out.add_arc(super_start, Arc::eps(s));
    }

    while let Some(key @ (r, l, mode)) = queue.pop_front() {
        let src = ids[&key];
        let at_end = r == look.initial;
        let left_ok = lambda.any_final(&left.items[l]);

        // Successor (lookahead guess, left state) pairs for each symbol.
        let mut moves: Vec<(Label, usize, usize)> = Vec::new();
        for &c in &sigma {
            let Some(prev) = look.preds.get(&(r, c)) else {
                continue;
            };
            let l2 = *left_steps.entry((l, c)).or_insert_with(|| {
                let next = lambda.step_anywhere(&left.items[l], c);
                left.intern(next).0
            });
            for &r2 in prev {
                moves.push((c, r2, l2));
            }
        }

        // Resolves a match state at lookahead `r2`: keep matching, close the
        // match (back to scanning), or drop an inconsistent guess.
        let normalize = |r2: usize, set: &Set| -> Option<bool> {
            if intersects(set, &look.live[r2]) {
                Some(true)
            } else if look.rho_here[r2] && intersects(set, &phi_finals) {
                Some(false)
            } else {
                None
            }
        };

        match mode {
            Mode::Scan => {
                let starts_match = left_ok && look.live[r].binary_search(&phi_start).is_ok();
                let inserts = !starts_match && left_ok && phi_nullable && look.rho_here[r];
                if starts_match {
                    let hub = emit(&mut out, src, rule.cost);
                    for (c, r2, l2) in moves {
                        let set = phi.step(&[phi_start], c);
                        let target = match normalize(r2, &set) {
                            Some(true) => Mode::Match(matches.intern(set).0),
                            Some(false) => Mode::Scan,
                            None => continue,
                        };
                        let t = state!((r2, l2, target));
                        out.add_arc(hub, Arc::new(c, EPSILON, Weight::one(), t));
                    }
                } else {
                    let hub = if inserts {
                        emit(&mut out, src, rule.cost)
                    } else {
                        src
                    };
                    if at_end {
                        out.set_final(hub, Weight::one());
                    }
                    for (c, r2, l2) in moves {
                        let t = state!((r2, l2, Mode::Scan));
                        out.add_arc(hub, Arc::new(c, c, Weight::one(), t));
                    }
                }
            }
            Mode::Match(m) => {
                let set = matches.items[m].clone();
                for (c, r2, l2) in moves {
                    let next = phi.step(&set, c);
                    if next.is_empty() {
                        continue;
                    }
                    let target = match normalize(r2, &next) {
                        Some(true) => Mode::Match(matches.intern(next).0),
                        Some(false) => Mode::Scan,
                        None => continue,
                    };
                    let t = state!((r2, l2, target));
                    out.add_arc(src, Arc::new(c, EPSILON, Weight::one(), t));
                }
            }
        }
    }
    Ok(connect(&out))
}

/// Composes the rule transducers in order; the empty cascade is the
/// identity on Σ*.
pub fn compile_cascade(rules: &[RewriteRule], table: &SymbolTable) -> Result<Fst> {
    let mut acc: Option<Fst> = None;
    for rule in rules {
        let f = compile_rule(rule, table)?;
        acc = Some(match acc {
            None => f,
            Some(a) => compose(&a, &f)?,
        });
    }
    Ok(acc.unwrap_or_else(|| sigma_star(table)))
}
