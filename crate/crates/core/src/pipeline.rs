//! Text analysis: text is mapped by the lexical analyzer to a lattice of
//! lexical analyses, filtered by language-model transducers, reduced to
//! the cheapest analysis, and mapped to phonemes.

use std::collections::BTreeSet;
use std::path::Path as FsPath;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fst::{compile_labels, Arc, Fst, Path, StateId};
use crate::manifest::{Components, Manifest, BOUNDARY};
use crate::ops::{
    avoid_symbols, closure, compose, concat, concat_all, epsilon_machine, invert, union,
    union_all, ClosureKind,
};
use crate::search::best_path;
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::weight::Weight;

/// Cost of one character passed through unanalyzed in permissive mode.
pub const FALLBACK_COST: f64 = 100.0;

/// The compiled components of one language.
pub struct GrammarSet {
    pub table: SymbolTable,
    /// Lexical to morphologically annotated forms.
    pub word: Option<Fst>,
    /// Annotated forms to spelling.
    pub surface: Option<Fst>,
    pub abbr: Option<Fst>,
    pub numbers: Option<Fst>,
    pub special: Option<Fst>,
    pub space: Fst,
    pub punct: Option<Fst>,
    /// Language models, applied in order.
    pub lm: Vec<Fst>,
    /// Lexical to annotated forms for every kind of text word.
    pub mma: Fst,
    /// Annotated forms to phonemes, as a cascade applied in order.
    pub phon: Vec<Fst>,
    pub filter_tags: Vec<Label>,
    analyzer: Fst,
    filter: Fst,
    permissive: OnceLock<Fst>,
}

/// Result of the whole pipeline for one text.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub path: Path,
    pub lexical: Vec<String>,
    /// Morphologically annotated spelling of the lexical analysis.
    pub mma: Vec<String>,
    pub phonemes: Vec<String>,
}

/// The result of mapping one lexical analysis to sound.
#[derive(Clone, Debug, PartialEq)]
pub struct Pronunciation {
    pub mma: Vec<String>,
    pub phonemes: Vec<String>,
}

impl Analysis {
    pub fn weight(&self) -> Weight {
        self.path.weight
    }

    pub fn lexical_string(&self) -> String {
        self.lexical.concat()
    }

    pub fn mma_string(&self) -> String {
        self.mma.concat()
    }

    pub fn phoneme_string(&self) -> String {
        self.phonemes.join(" ")
    }
}

fn symbols(table: &SymbolTable, labels: &[Label]) -> Vec<String> {
    labels
        .iter()
        .filter(|&&l| l != EPSILON)
        .map(|&l| table.symbol(l).unwrap_or("?").to_string())
        .collect()
}

fn optional(f: &Fst) -> Result<Fst> {
    union(f, &epsilon_machine(None))
}

impl GrammarSet {
    pub fn load(manifest: &FsPath) -> Result<GrammarSet> {
        let m = Manifest::load(manifest)?;
        GrammarSet::from_components(m.build()?).map_err(|e| e.in_file(manifest))
    }

    pub fn from_components(c: Components) -> Result<GrammarSet> {
        let nonempty = |key: &str| -> Result<Option<Fst>> {
            match c.get(key)? {
                Some(f) if f.is_empty() => Err(Error::EmptyComponent(key.to_string())),
                other => Ok(other),
            }
        };
        let required = |key: &str| -> Result<Fst> {
            nonempty(key)?.ok_or_else(|| Error::EmptyComponent(key.to_string()))
        };
        let mut table = c.table.clone();
        let space = match nonempty("space")? {
            Some(f) => f,
            None => {
                let b = table.insert(BOUNDARY);
                let s = table.insert(" ");
                let mut f = Fst::for_table(&table);
                let (q0, q1) = (f.add_state(), f.add_state());
                f.set_start(q0);
                f.set_final(q1, Weight::one());
                f.add_arc(q0, Arc::new(b, s, Weight::one(), q1));
                f.add_arc(q1, Arc::new(EPSILON, s, Weight::one(), q1));
                f
            }
        };
        let filter_tags: Vec<Label> = c
            .filter_tags
            .iter()
            .map(|t| table.label(t))
            .collect::<Result<_>>()?;
        let lm = c
            .machines
            .iter()
            .filter(|(k, _)| k.starts_with("lm."))
            .flat_map(|(_, f)| f.iter().cloned())
            .collect();
        let phon = c
            .cascade("phon")
            .ok_or_else(|| Error::EmptyComponent("phon".into()))?
            .to_vec();
        let mut g = GrammarSet {
            word: nonempty("word")?,
            surface: nonempty("surface")?,
            abbr: nonempty("abbr")?,
            numbers: nonempty("numbers")?,
            special: nonempty("special")?,
            space,
            punct: nonempty("punct")?,
            lm,
            mma: closure(&required("mma")?, ClosureKind::Star),
            phon,
            filter: avoid_symbols(&table, &filter_tags),
            filter_tags,
            analyzer: Fst::new(),
            permissive: OnceLock::new(),
            table,
        };
        g.analyzer = g.build_analyzer(false)?;
        g.analyzer.sort_by_input();
        g.mma.sort_by_input();
        g.filter.sort_by_input();
        for f in g.lm.iter_mut().chain(g.phon.iter_mut()) {
            f.sort_by_input();
        }
        Ok(g)
    }

    /// Text-word alternatives, each mapping surface text to lexical forms.
    fn token(&self) -> Result<Fst> {
        let mut parts = Vec::new();
        if let Some(w) = &self.word {
            let chain = match &self.surface {
                Some(s) => compose(w, s)?,
                None => w.clone(),
            };
            parts.push(invert(&chain));
        }
        if let Some(a) = &self.abbr {
            parts.push(invert(a));
        }
        if let Some(n) = &self.numbers {
            let n = invert(n);
            match &self.special {
                Some(s) => parts.push(concat(&n, &optional(&invert(s))?)?),
                None => parts.push(n),
            }
        }
        if let Some(s) = &self.special {
            parts.push(invert(s));
        }
        if parts.is_empty() {
            return Err(Error::EmptyComponent("word".into()));
        }
        union_all(&parts)
    }

    /// One or more characters copied at a high cost each.
    fn fallback(&self) -> Fst {
        let mut f = Fst::for_table(&self.table);
        let (q0, q1) = (f.add_state(), f.add_state());
        f.set_start(q0);
        f.set_final(q1, Weight::one());
        for (l, s) in self.table.iter() {
            let mut chars = s.chars();
            let single = matches!((chars.next(), chars.next()), (Some(c), None) if !c.is_whitespace());
            if l != EPSILON && single {
                for q in [q0, q1] {
                    f.add_arc(q, Arc::new(l, l, Weight::new(FALLBACK_COST), q1));
                }
            }
        }
        f
    }

    /// `(token · separator)* · token?` from surface text to lexical forms.
    pub fn build_analyzer(&self, permissive: bool) -> Result<Fst> {
        let mut token = self.token()?;
        if permissive {
            token = union(&token, &self.fallback())?;
        }
        let mut seps = vec![invert(&self.space)];
        if let Some(p) = &self.punct {
            seps.push(invert(p));
        }
        let sep = union_all(&seps)?;
        let body = closure(&concat(&token, &sep)?, ClosureKind::Star);
        concat_all([&body, &optional(&token)?])
    }

    /// A single-machine component by manifest key.
    pub fn component(&self, key: &str) -> Option<&Fst> {
        match key {
            "word" => self.word.as_ref(),
            "surface" => self.surface.as_ref(),
            "abbr" => self.abbr.as_ref(),
            "numbers" => self.numbers.as_ref(),
            "special" => self.special.as_ref(),
            "punct" => self.punct.as_ref(),
            "space" => Some(&self.space),
            "mma" => Some(&self.mma),
            "filter" => Some(&self.filter),
            _ => None,
        }
    }

    pub fn analyzer(&self) -> &Fst {
        &self.analyzer
    }

    pub fn permissive_analyzer(&self) -> &Fst {
        self.permissive
            .get_or_init(|| {
                let mut f = self.build_analyzer(true).expect("analyzer built once already");
                f.sort_by_input();
                f
            })
    }

    /// Labels of the characters of `text`, or the first unknown one.
    fn text_labels(&self, text: &str, skip_unknown: bool) -> Result<Vec<Label>> {
        let mut out = Vec::new();
        for (i, c) in text.chars().enumerate() {
            match self.table.get(c.encode_utf8(&mut [0; 4])) {
                Some(l) => out.push(l),
                None if skip_unknown => {}
                None => return Err(no_analysis(text, i)),
            }
        }
        Ok(out)
    }

    /// The lattice of all lexical analyses of `text`.
    pub fn analyze(&self, text: &str) -> Result<Fst> {
        let labels = self.text_labels(text, false)?;
        let lattice = compose(&compile_labels(&labels, &self.table), &self.analyzer)?;
        if lattice.start().is_none() {
            let consumed = viable_prefix(&self.analyzer, &labels);
            return Err(no_analysis(text, consumed));
        }
        Ok(lattice)
    }

    /// Like [`analyze`](Self::analyze), but never fails: unknown characters
    /// are dropped and unanalyzable ones are copied at a high cost.
    pub fn analyze_permissive(&self, text: &str) -> Result<Fst> {
        let labels = self.text_labels(text, true)?;
        compose(
            &compile_labels(&labels, &self.table),
            self.permissive_analyzer(),
        )
    }

    /// Applies the language models, then removes analyses carrying a
    /// filter tag.
    pub fn disambiguate(&self, lattice: &Fst) -> Result<Fst> {
        let mut acc = lattice.clone();
        for lm in &self.lm {
            acc = compose(&acc, lm)?;
        }
        let out = compose(&acc, &self.filter)?;
        if out.start().is_none() {
            return Err(Error::EmptyAfterFiltering);
        }
        Ok(out)
    }

    pub fn select(&self, lattice: &Fst) -> Result<Path> {
        best_path(lattice)
    }

    pub fn lexical_tokens(&self, path: &Path) -> Vec<String> {
        symbols(&self.table, &path.output())
    }

    /// Phonemes for the lexical side of `path`.
    pub fn pronounce(&self, path: &Path) -> Result<Pronunciation> {
        let lexical = path.output();
        let lex = compile_labels(&lexical, &self.table);
        let annotated = compose(&lex, &self.mma)?;
        let Ok(best) = best_path(&annotated) else {
            return Err(Error::NoPronunciation(self.table.render(&lexical)));
        };
        let mut phones = annotated;
        for p in &self.phon {
            phones = compose(&phones, p)?;
        }
        match best_path(&phones) {
            Ok(p) => Ok(Pronunciation {
                mma: symbols(&self.table, &best.output()),
                phonemes: symbols(&self.table, &p.output()),
            }),
            Err(_) => Err(Error::NoPronunciation(self.table.render(&best.output()))),
        }
    }

    pub fn analyze_text(&self, text: &str) -> Result<Analysis> {
        let lattice = self.analyze(text).map_err(|e| e.at_stage("analyze"))?;
        self.finish(&lattice)
    }

    pub fn analyze_text_permissive(&self, text: &str) -> Result<Analysis> {
        let lattice = self
            .analyze_permissive(text)
            .map_err(|e| e.at_stage("analyze"))?;
        self.finish(&lattice)
    }

    fn finish(&self, lattice: &Fst) -> Result<Analysis> {
        let filtered = self
            .disambiguate(lattice)
            .map_err(|e| e.at_stage("disambiguate"))?;
        let path = self.select(&filtered).map_err(|e| e.at_stage("select"))?;
        let Pronunciation { mma, phonemes } =
            self.pronounce(&path).map_err(|e| e.at_stage("pronounce"))?;
        Ok(Analysis {
            lexical: self.lexical_tokens(&path),
            path,
            mma,
            phonemes,
        })
    }
}

/// Number of leading labels of `input` that some path of `f` can read.
fn viable_prefix(f: &Fst, input: &[Label]) -> usize {
    let close = |set: BTreeSet<StateId>| {
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
    let mut cur = close(f.start().into_iter().collect());
    for (i, &l) in input.iter().enumerate() {
        let next: BTreeSet<StateId> = cur
            .iter()
            .flat_map(|&s| f.arcs(s))
            .filter(|a| a.ilabel == l)
            .map(|a| a.nextstate)
            .collect();
        if next.is_empty() {
            return i;
        }
        cur = close(next);
    }
    input.len()
}

/// Error for the whitespace-delimited word of `text` around character
/// `at`.
fn no_analysis(text: &str, at: usize) -> Error {
    let chars: Vec<char> = text.chars().collect();
    let at = at.min(chars.len());
    let mut start = at;
    if start == chars.len() && start > 0 {
        start -= 1;
    }
    while start > 0 && !chars[start - 1].is_whitespace() {
        start -= 1;
    }
    let mut end = at;
    while end < chars.len() && !chars[end].is_whitespace() {
        end += 1;
    }
    Error::NoAnalysis {
        offset: start,
        substring: chars[start..end.max(start)].iter().collect(),
    }
}

/// `(states, arcs)` of a machine.
pub fn stats(f: &Fst) -> (usize, usize) {
    f.stats()
}
