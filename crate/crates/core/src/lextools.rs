//! Compilers for word lists, inflectional paradigms and arc-list word
//! grammars.
//!
//! Word list line: `lhs [: rhs] [<cost>]`, each side a token regex; the
//! whole entry may be wrapped in `/.../`. Without `rhs` the entry is an
//! identity acceptor.
//!
//! Paradigm file:
//!
//! ```text
//! @paradigm masc-end
//! 'а : {sg}{gen}
//!    : {sg}{nom}          # empty suffix
//! @stem костр masc-end {noun}{masc}{inan}
//! ```
//!
//! Arc-list file:
//!
//! ```text
//! @lexicon stems stems.wl
//! @state start
//! @state mid
//! @state end
//! @final end
//! start mid $stems
//! mid end а | у <1.0>
//! ```

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, StateId};
use crate::ops::{cross, times_final, union_all};
use crate::regex::{compile_regex, TokenRegex};
use crate::symbols::{SymbolTable, EPSILON};
use crate::syntax::{lex_line, split_at, token_sequence, Lexeme, Spanned};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub struct WordListEntry {
    pub lhs: TokenRegex,
    pub rhs: Option<TokenRegex>,
    pub cost: Weight,
}

impl WordListEntry {
    pub fn register(&self, table: &mut SymbolTable) {
        self.lhs.register(table);
        if let Some(r) = &self.rhs {
            r.register(table);
        }
    }
}

/// Strips trailing cost lexemes, returning their product.
fn trailing_cost(lexemes: &mut Vec<Spanned>) -> Weight {
    let mut cost = Weight::one();
    while let Some(Lexeme::Cost(w)) = lexemes.last().map(|s| &s.lexeme) {
        cost = cost.times(*w);
        lexemes.pop();
    }
    cost
}

pub fn parse_wordlist(text: &str) -> Result<Vec<WordListEntry>> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let mut lexemes = lex_line(line, line_no)?;
        if lexemes.is_empty() {
            continue;
        }
        if lexemes.first().map(|s| &s.lexeme) == Some(&Lexeme::Slash) {
            lexemes.remove(0);
            let mut cost = trailing_cost(&mut lexemes);
            if lexemes.last().map(|s| &s.lexeme) != Some(&Lexeme::Slash) {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: "unterminated `/`".into(),
                });
            }
            lexemes.pop();
            cost = cost.times(trailing_cost(&mut lexemes));
            entries.push(entry_from(&lexemes, cost, line_no)?);
        } else {
            let cost = trailing_cost(&mut lexemes);
            entries.push(entry_from(&lexemes, cost, line_no)?);
        }
    }
    Ok(entries)
}

fn entry_from(lexemes: &[Spanned], cost: Weight, line_no: usize) -> Result<WordListEntry> {
    let sides = split_at(lexemes, &Lexeme::Colon);
    if sides.len() > 2 {
        return Err(Error::Parse {
            line: line_no,
            col: sides[2].first().map_or(1, |s| s.col),
            msg: "more than one `:`".into(),
        });
    }
    let lhs = TokenRegex::from_lexemes(sides[0], line_no)?;
    let rhs = match sides.get(1) {
        Some(s) => Some(TokenRegex::from_lexemes(s, line_no)?),
        None => None,
    };
    if lhs == TokenRegex::Empty && rhs.as_ref().is_none_or(|r| *r == TokenRegex::Empty) {
        return Err(Error::Parse {
            line: line_no,
            col: 1,
            msg: "entry has no tokens".into(),
        });
    }
    Ok(WordListEntry { lhs, rhs, cost })
}

pub fn compile_wordlist(entries: &[WordListEntry], table: &SymbolTable) -> Result<Fst> {
    let mut machines = Vec::with_capacity(entries.len());
    for e in entries {
        let lhs = compile_regex(&e.lhs, table)?;
        let m = match &e.rhs {
            Some(r) => cross(&lhs, &compile_regex(r, table)?)?,
            None => lhs,
        };
        machines.push(times_final(&m, e.cost));
    }
    let mut out = union_all(&machines)?;
    out.set_table_id(Some(table.id()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParadigmSlot {
    pub suffix: Vec<String>,
    pub features: Vec<String>,
    pub cost: Weight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParadigmSpec {
    pub name: String,
    pub slots: Vec<ParadigmSlot>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StemEntry {
    pub stem: Vec<String>,
    pub paradigm: String,
    pub features: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParadigmFile {
    pub paradigms: Vec<ParadigmSpec>,
    pub stems: Vec<StemEntry>,
}

impl ParadigmFile {
    pub fn register(&self, table: &mut SymbolTable) {
        for p in &self.paradigms {
            for s in &p.slots {
                for t in s.suffix.iter().chain(&s.features) {
                    table.insert(t);
                }
            }
        }
        for s in &self.stems {
            for t in s.stem.iter().chain(&s.features) {
                table.insert(t);
            }
        }
    }
}

fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

pub fn parse_paradigms(text: &str) -> Result<ParadigmFile> {
    let mut file = ParadigmFile::default();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("@paradigm") {
            let name = rest.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(format_err(line_no, "expected `@paradigm NAME`"));
            }
            if file.paradigms.iter().any(|p| p.name == name) {
                return Err(format_err(line_no, format!("duplicate paradigm `{name}`")));
            }
            file.paradigms.push(ParadigmSpec {
                name: name.to_string(),
                slots: Vec::new(),
            });
        } else if let Some(rest) = body.strip_prefix("@stem") {
            let mut parts = rest.split_whitespace();
            let (Some(stem), Some(name)) = (parts.next(), parts.next()) else {
                return Err(format_err(line_no, "expected `@stem STEM PARADIGM FEATURES`"));
            };
            let features: String = parts.collect::<Vec<_>>().join(" ");
            file.stems.push(StemEntry {
                stem: token_sequence(stem, line_no)?,
                paradigm: name.to_string(),
                features: token_sequence(&features, line_no)?,
            });
        } else if body.starts_with('@') {
            return Err(format_err(line_no, format!("unknown directive `{body}`")));
        } else {
            let Some(current) = file.paradigms.last_mut() else {
                return Err(format_err(line_no, "slot line before any `@paradigm`"));
            };
            let mut lexemes = lex_line(line, line_no)?;
            let cost = trailing_cost(&mut lexemes);
            let sides = split_at(&lexemes, &Lexeme::Colon);
            if sides.len() != 2 {
                return Err(format_err(line_no, "expected `SUFFIX : FEATURES`"));
            }
            let tokens = |side: &[Spanned]| -> Result<Vec<String>> {
                side.iter()
                    .filter(|s| s.lexeme != Lexeme::Eps)
                    .map(|s| match &s.lexeme {
                        Lexeme::Token(t) => Ok(t.clone()),
                        other => Err(Error::Parse {
                            line: line_no,
                            col: s.col,
                            msg: format!("expected a token, found {other:?}"),
                        }),
                    })
                    .collect()
            };
            let slot = ParadigmSlot {
                suffix: tokens(sides[0])?,
                features: tokens(sides[1])?,
                cost,
            };
            if slot.features.is_empty() {
                return Err(format_err(line_no, "slot has no features"));
            }
            current.slots.push(slot);
        }
    }
    Ok(file)
}

/// One path per stem and slot of its paradigm: the stem copied, then the
/// inherent and slot features deleted, then the suffix inserted.
pub fn compile_paradigm(
    specs: &[ParadigmSpec],
    stems: &[StemEntry],
    table: &SymbolTable,
) -> Result<Fst> {
    let by_name: HashMap<&str, &ParadigmSpec> =
        specs.iter().map(|p| (p.name.as_str(), p)).collect();
    let mut out = Fst::for_table(table);
    let start = out.add_state();
    out.set_start(start);
    for stem in stems {
        let spec = by_name
            .get(stem.paradigm.as_str())
            .ok_or_else(|| Error::UnknownParadigm(stem.paradigm.clone()))?;
        let stem_labels = labels(&stem.stem, table)?;
        let inherent = labels(&stem.features, table)?;
        for slot in &spec.slots {
            let mut cur = start;
            let pairs = stem_labels
                .iter()
                .map(|&l| (l, l))
                .chain(inherent.iter().map(|&l| (l, EPSILON)))
                .chain(labels(&slot.features, table)?.into_iter().map(|l| (l, EPSILON)))
                .chain(labels(&slot.suffix, table)?.into_iter().map(|l| (EPSILON, l)));
            for (i, o) in pairs {
                let next = out.add_state();
                out.add_arc(cur, Arc::new(i, o, Weight::one(), next));
                cur = next;
            }
            out.set_final(cur, slot.cost);
        }
    }
    Ok(out)
}

fn labels(tokens: &[String], table: &SymbolTable) -> Result<Vec<u32>> {
    tokens.iter().map(|t| table.label(t)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArcLabel {
    Lexicon(String),
    Regex(TokenRegex),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrammarArc {
    pub from: String,
    pub to: String,
    pub label: ArcLabel,
    pub cost: Weight,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArcListGrammar {
    /// `(name, path)` pairs from `@lexicon` lines; paths are left to the
    /// caller to resolve.
    pub lexicons: Vec<(String, String)>,
    /// Declared states; the first is the start state.
    pub states: Vec<String>,
    pub finals: Vec<(String, Weight)>,
    pub arcs: Vec<GrammarArc>,
}

impl ArcListGrammar {
    pub fn register(&self, table: &mut SymbolTable) {
        for a in &self.arcs {
            if let ArcLabel::Regex(r) = &a.label {
                r.register(table);
            }
        }
    }
}

/// Splits off the first whitespace-delimited word.
fn next_word(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    if s.is_empty() {
        return None;
    }
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    Some((&s[..end], &s[end..]))
}

pub fn parse_arclist(text: &str) -> Result<ArcListGrammar> {
    let mut g = ArcListGrammar::default();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = next_word(body).expect("nonempty line");
        match head {
            "@lexicon" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, path] = parts[..] else {
                    return Err(format_err(line_no, "expected `@lexicon NAME PATH`"));
                };
                g.lexicons.push((name.to_string(), path.to_string()));
            }
            "@state" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name] = parts[..] else {
                    return Err(format_err(line_no, "expected `@state NAME`"));
                };
                g.states.push(name.to_string());
            }
            "@final" => {
                let (name, rest) =
                    next_word(rest).ok_or_else(|| format_err(line_no, "expected `@final NAME`"))?;
                let mut lexemes = lex_line(rest, line_no)?;
                let cost = trailing_cost(&mut lexemes);
                if !lexemes.is_empty() {
                    return Err(format_err(line_no, "unexpected text after final state"));
                }
                g.finals.push((name.to_string(), cost));
            }
            h if h.starts_with('@') => {
                return Err(format_err(line_no, format!("unknown directive `{h}`")));
            }
            from => {
                let (to, rest) = next_word(rest)
                    .ok_or_else(|| format_err(line_no, "expected `FROM TO LABEL`"))?;
                let mut lexemes = lex_line(rest, line_no)?;
                let cost = trailing_cost(&mut lexemes);
                let rest = rest.trim();
                let label = match rest.strip_prefix('$') {
                    Some(r) => {
                        let (name, _) = next_word(r)
                            .ok_or_else(|| format_err(line_no, "empty lexicon reference"))?;
                        ArcLabel::Lexicon(name.to_string())
                    }
                    None => ArcLabel::Regex(TokenRegex::from_lexemes(&lexemes, line_no)?),
                };
                g.arcs.push(GrammarArc {
                    from: from.to_string(),
                    to: to.to_string(),
                    label,
                    cost,
                });
            }
        }
    }
    Ok(g)
}

/// Builds the grammar graph, splicing a copy of the referenced machine
/// into every arc.
pub fn compile_arclist(
    grammar: &ArcListGrammar,
    sublexicons: &HashMap<String, Fst>,
    table: &SymbolTable,
) -> Result<Fst> {
    let mut out = Fst::for_table(table);
    let mut ids: HashMap<&str, StateId> = HashMap::new();
    for name in &grammar.states {
        ids.entry(name.as_str()).or_insert_with(|| out.add_state());
    }
    let state = |name: &str| -> Result<StateId> {
        ids.get(name)
            .copied()
            .ok_or_else(|| Error::UndeclaredState(name.to_string()))
    };
    if let Some(first) = grammar.states.first() {
        out.set_start(state(first)?);
    }
    for (name, w) in &grammar.finals {
        out.set_final(state(name)?, *w);
    }
    for arc in &grammar.arcs {
        let (from, to) = (state(&arc.from)?, state(&arc.to)?);
        let compiled;
        let m = match &arc.label {
            ArcLabel::Lexicon(name) => sublexicons
                .get(name)
                .ok_or_else(|| Error::UnresolvedLexicon(name.clone()))?,
            ArcLabel::Regex(r) => {
                compiled = compile_regex(r, table)?;
                &compiled
            }
        };
        let Some(ms) = m.start() else {
            continue;
        };
        let off = out.append(m);
        out.add_arc(from, Arc::new(EPSILON, EPSILON, arc.cost, ms + off));
        for s in m.states() {
            let w = m.final_weight(s);
            if !w.is_zero() {
                out.set_final(s + off, Weight::zero());
                out.add_arc(s + off, Arc::new(EPSILON, EPSILON, w, to));
            }
        }
    }
    Ok(out)
}
