//! Loading grammar source files by extension.
//!
//! | extension | contents                         |
//! |-----------|----------------------------------|
//! | `.fst`    | a machine in the text format     |
//! | `.wl`     | word list                        |
//! | `.para`   | paradigms and stems              |
//! | `.arcs`   | arc-list word grammar            |
//! | `.rules`  | rewrite-rule cascade             |
//! | `.num`    | number grammar configuration     |
//!
//! Loading is split in two: every file is parsed and its tokens registered
//! first, then everything is compiled, so rules see the full alphabet.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fst::Fst;
use crate::io::read_text;
use crate::lextools::{
    compile_arclist, compile_paradigm, compile_wordlist, parse_arclist, parse_paradigms,
    parse_wordlist, ArcListGrammar, ParadigmFile, WordListEntry,
};
use crate::numbers::NumberGrammar;
use crate::rules::{compile_cascade, compile_rule, parse_rules, RewriteRule};
use crate::symbols::SymbolTable;

#[derive(Clone, Debug)]
pub enum Source {
    Fst(Fst),
    Wordlist(Vec<WordListEntry>),
    Paradigm(ParadigmFile),
    Arclist {
        grammar: ArcListGrammar,
        /// Sub-lexicon name to resolved path.
        lexicons: Vec<(String, PathBuf)>,
    },
    Rules(Vec<RewriteRule>),
    Numbers(NumberGrammar),
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))
}

/// The kind of a grammar source file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Fst,
    Wordlist,
    Paradigm,
    Arclist,
    Rules,
    Numbers,
}

impl SourceKind {
    pub fn from_path(path: &Path) -> Result<SourceKind> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        Ok(match ext {
            "fst" => SourceKind::Fst,
            "wl" => SourceKind::Wordlist,
            "para" => SourceKind::Paradigm,
            "arcs" => SourceKind::Arclist,
            "rules" => SourceKind::Rules,
            "num" => SourceKind::Numbers,
            other => {
                return Err(Error::Format {
                    line: 0,
                    msg: format!("unknown source type `.{other}`"),
                }
                .in_file(path))
            }
        })
    }
}

/// Parses one file, choosing the format by extension. Machines in the text
/// format are read straight into `table`; other sources only register
/// their tokens.
pub fn parse_source(path: &Path, table: &mut SymbolTable) -> Result<Source> {
    parse_source_as(path, SourceKind::from_path(path)?, table)
}

pub fn parse_source_as(path: &Path, kind: SourceKind, table: &mut SymbolTable) -> Result<Source> {
    let wrap = |e: Error| e.in_file(path);
    let source = match kind {
        SourceKind::Fst => Source::Fst(read_text(&read(path)?, table).map_err(wrap)?),
        SourceKind::Wordlist => Source::Wordlist(parse_wordlist(&read(path)?).map_err(wrap)?),
        SourceKind::Paradigm => Source::Paradigm(parse_paradigms(&read(path)?).map_err(wrap)?),
        SourceKind::Arclist => {
            let grammar = parse_arclist(&read(path)?).map_err(wrap)?;
            let base = path.parent().unwrap_or(Path::new("."));
            let lexicons = grammar
                .lexicons
                .iter()
                .map(|(n, p)| (n.clone(), base.join(p)))
                .collect();
            Source::Arclist { grammar, lexicons }
        }
        SourceKind::Rules => Source::Rules(parse_rules(&read(path)?).map_err(wrap)?),
        SourceKind::Numbers => Source::Numbers(NumberGrammar::load(path)?),
    };
    source.register(table);
    Ok(source)
}

impl Source {
    pub fn register(&self, table: &mut SymbolTable) {
        match self {
            Source::Fst(_) => {}
            Source::Wordlist(entries) => entries.iter().for_each(|e| e.register(table)),
            Source::Paradigm(p) => p.register(table),
            Source::Arclist { grammar, .. } => grammar.register(table),
            Source::Rules(rules) => rules.iter().for_each(|r| r.register(table)),
            Source::Numbers(g) => g.register(table),
        }
    }
}

/// Parsed sources keyed by path, compiled on demand with caching.
#[derive(Default)]
pub struct SourceSet {
    sources: BTreeMap<PathBuf, Source>,
    compiled: HashMap<PathBuf, Fst>,
}

impl SourceSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `path` and, for arc lists, every referenced sub-lexicon.
    pub fn load(&mut self, path: &Path, table: &mut SymbolTable) -> Result<()> {
        if self.sources.contains_key(path) {
            return Ok(());
        }
        self.load_as(path, SourceKind::from_path(path)?, table)
    }

    /// Like [`load`](Self::load) with the format of `path` given explicitly.
    pub fn load_as(&mut self, path: &Path, kind: SourceKind, table: &mut SymbolTable) -> Result<()> {
        let source = parse_source_as(path, kind, table)?;
        let nested: Vec<PathBuf> = match &source {
            Source::Arclist { lexicons, .. } => lexicons.iter().map(|(_, p)| p.clone()).collect(),
            _ => Vec::new(),
        };
        self.sources.insert(path.to_path_buf(), source);
        for p in nested {
            self.load(&p, table)?;
        }
        Ok(())
    }

    pub fn compile(&mut self, path: &Path, table: &SymbolTable) -> Result<Fst> {
        if let Some(f) = self.compiled.get(path) {
            return Ok(f.clone());
        }
        let source = self
            .sources
            .get(path)
            .cloned()
            .ok_or_else(|| Error::UnresolvedLexicon(path.display().to_string()))?;
        let wrap = |e: Error| e.in_file(path);
        let f = match source {
            Source::Fst(f) => f,
            Source::Wordlist(entries) => compile_wordlist(&entries, table).map_err(wrap)?,
            Source::Paradigm(p) => compile_paradigm(&p.paradigms, &p.stems, table).map_err(wrap)?,
            Source::Arclist { grammar, lexicons } => {
                let mut subs = HashMap::new();
                for (name, p) in &lexicons {
                    subs.insert(name.clone(), self.compile(p, table)?);
                }
                compile_arclist(&grammar, &subs, table).map_err(wrap)?
            }
            Source::Rules(rules) => compile_cascade(&rules, table).map_err(wrap)?,
            Source::Numbers(g) => g.compile(table).map_err(wrap)?,
        };
        self.compiled.insert(path.to_path_buf(), f.clone());
        Ok(f)
    }
}

impl SourceSet {
    /// Like [`compile`](Self::compile), but a rule file yields one machine
    /// per rule instead of their composition.
    pub fn compile_cascade(&mut self, path: &Path, table: &SymbolTable) -> Result<Vec<Fst>> {
        match self.sources.get(path) {
            Some(Source::Rules(rules)) if !rules.is_empty() => rules
                .iter()
                .map(|r| compile_rule(r, table).map_err(|e| e.in_file(path)))
                .collect(),
            _ => Ok(vec![self.compile(path, table)?]),
        }
    }
}

/// Loads and compiles a single source file against `table`.
pub fn compile_file(path: &Path, table: &mut SymbolTable) -> Result<Fst> {
    let mut set = SourceSet::new();
    set.load(path, table)?;
    set.compile(path, table)
}
