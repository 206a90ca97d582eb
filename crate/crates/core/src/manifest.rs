//! Grammar manifests: `key = expression` lines naming the components of an
//! analyzer.
//!
//! An expression combines source files: `a | b` is union, `a @ b` is
//! composition (binding tighter than `|`), `~a` inverts, `in(a)` and
//! `out(a)` project, and parentheses group. `whitespace` and `epsilon` are
//! built-in word separators. Paths are relative to the manifest.
//!
//! ```text
//! word = nouns.para | function_words.wl
//! surface = surface.rules
//! numbers = ~numbers.num
//! space = whitespace
//! lm.1 = agreement.rules
//! mma = nouns.para | boundaries.wl
//! phon = phonology.rules
//! filter_tags = \*
//! ```

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fst::{compile_string, Fst};
use crate::ops::{
    closure, compose, compose_all, cross, invert, project, union_all, ClosureKind, Side,
};
use crate::sources::SourceSet;
use crate::symbols::SymbolTable;
use crate::syntax::token_sequence;

/// Lexical word-boundary token.
pub const BOUNDARY: &str = "{##}";
/// Default tag marking ill-formed analyses.
pub const STAR: &str = "*";

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Source(PathBuf),
    /// `{##}` realized as one or more spaces.
    Whitespace,
    /// `{##}` realized as nothing.
    Epsilon,
    Invert(Box<Expr>),
    Project(Side, Box<Expr>),
    Union(Vec<Expr>),
    Compose(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub dir: PathBuf,
    /// Component keys with their expressions, in file order.
    pub components: Vec<(String, Expr)>,
    pub filter_tags: Vec<String>,
}

const KEYS: [&str; 10] = [
    "word", "surface", "abbr", "numbers", "special", "space", "punct", "mma", "phon",
    "filter_tags",
];

fn valid_key(key: &str) -> bool {
    KEYS.contains(&key)
        || key
            .strip_prefix("lm.")
            .is_some_and(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()))
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Manifest::parse(&text, &dir).map_err(|e| e.in_file(path))
    }

    pub fn parse(text: &str, dir: &Path) -> Result<Manifest> {
        let mut m = Manifest {
            dir: dir.to_path_buf(),
            components: Vec::new(),
            filter_tags: vec![STAR.to_string()],
        };
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |msg: String| Error::Manifest { line: line_no, msg };
            let body = strip_comment(line).trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected `key = expression`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_key(key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if m.components.iter().any(|(k, _)| k == key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            if key == "filter_tags" {
                m.filter_tags = token_sequence(value, line_no)?;
                continue;
            }
            let expr = ExprParser::new(value, dir)
                .parse()
                .map_err(|msg| err(format!("{key}: {msg}")))?;
            m.components.push((key.to_string(), expr));
        }
        // Language models apply in numeric order.
        m.components.sort_by_key(|(k, _)| lm_index(k));
        Ok(m)
    }

    pub fn get(&self, key: &str) -> Option<&Expr> {
        self.components
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, e)| e)
    }

    pub fn lm(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.components
            .iter()
            .filter(|(k, _)| k.starts_with("lm."))
            .map(|(k, e)| (k.as_str(), e))
    }
}

fn lm_index(key: &str) -> u64 {
    key.strip_prefix("lm.")
        .and_then(|n| n.parse().ok())
        .unwrap_or(0)
}

/// Drops a `#` comment that starts a line or follows whitespace.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
    dir: &'a Path,
}

impl<'a> ExprParser<'a> {
    fn new(src: &'a str, dir: &'a Path) -> Self {
        ExprParser { src, pos: 0, dir }
    }

    fn parse(mut self) -> std::result::Result<Expr, String> {
        let e = self.union()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(format!("unexpected `{}`", &self.src[self.pos..]));
        }
        Ok(e)
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn union(&mut self) -> std::result::Result<Expr, String> {
        let mut parts = vec![self.compose()?];
        while self.eat('|') {
            parts.push(self.compose()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Union(parts)
        })
    }

    fn compose(&mut self) -> std::result::Result<Expr, String> {
        let mut parts = vec![self.unary()?];
        while self.eat('@') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Compose(parts)
        })
    }

    fn unary(&mut self) -> std::result::Result<Expr, String> {
        if self.eat('~') {
            return Ok(Expr::Invert(Box::new(self.unary()?)));
        }
        if self.eat('(') {
            let e = self.union()?;
            if !self.eat(')') {
                return Err("missing `)`".into());
            }
            return Ok(e);
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || "|@~()".contains(c))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(if rest.is_empty() {
                "expression ends early".into()
            } else {
                format!("unexpected `{rest}`")
            });
        }
        let word = &rest[..len];
        self.pos += len;
        match word {
            "whitespace" => return Ok(Expr::Whitespace),
            "epsilon" => return Ok(Expr::Epsilon),
            "in" | "out" => {
                if !self.eat('(') {
                    return Err(format!("`{word}` needs `(`"));
                }
                let e = self.union()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                let side = if word == "in" { Side::Input } else { Side::Output };
                return Ok(Expr::Project(side, Box::new(e)));
            }
            _ => {}
        }
        Ok(Expr::Source(self.dir.join(word)))
    }
}

impl Expr {
    fn sources(&self, out: &mut Vec<PathBuf>) {
        match self {
            Expr::Source(p) => out.push(p.clone()),
            Expr::Whitespace | Expr::Epsilon => {}
            Expr::Invert(e) | Expr::Project(_, e) => e.sources(out),
            Expr::Union(v) | Expr::Compose(v) => v.iter().for_each(|e| e.sources(out)),
        }
    }

    fn registers(&self, table: &mut SymbolTable) {
        match self {
            Expr::Whitespace | Expr::Epsilon => {
                table.insert(BOUNDARY);
                table.insert(" ");
            }
            Expr::Invert(e) | Expr::Project(_, e) => e.registers(table),
            Expr::Union(v) | Expr::Compose(v) => v.iter().for_each(|e| e.registers(table)),
            Expr::Source(_) => {}
        }
    }

    /// Evaluates to a sequence of machines whose composition is the value;
    /// rule files stay split into their rules.
    fn eval_cascade(&self, sources: &mut SourceSet, table: &SymbolTable) -> Result<Vec<Fst>> {
        match self {
            Expr::Source(p) => sources.compile_cascade(p, table),
            Expr::Compose(v) => {
                let mut out = Vec::new();
                for e in v {
                    out.extend(e.eval_cascade(sources, table)?);
                }
                Ok(out)
            }
            e => Ok(vec![e.eval(sources, table)?]),
        }
    }

    fn eval(&self, sources: &mut SourceSet, table: &SymbolTable) -> Result<Fst> {
        Ok(match self {
            Expr::Source(p) => sources.compile(p, table)?,
            Expr::Whitespace => {
                let mut t = table.clone();
                let b = compile_string(&[BOUNDARY], &mut t);
                let s = compile_string(&[" "], &mut t);
                cross(&b, &closure(&s, ClosureKind::Plus))?
            }
            Expr::Epsilon => {
                let mut t = table.clone();
                let b = compile_string(&[BOUNDARY], &mut t);
                crate::ops::erase(&b, Side::Output)
            }
            Expr::Invert(e) => invert(&e.eval(sources, table)?),
            Expr::Project(side, e) => project(&e.eval(sources, table)?, *side),
            Expr::Union(v) => {
                let parts = v
                    .iter()
                    .map(|e| e.eval(sources, table))
                    .collect::<Result<Vec<_>>>()?;
                union_all(&parts)?
            }
            Expr::Compose(v) => {
                let mut acc = v[0].eval(sources, table)?;
                for e in &v[1..] {
                    acc = compose(&acc, &e.eval(sources, table)?)?;
                }
                acc
            }
        })
    }
}

/// Machines built from a manifest. Each component is a cascade: a list of
/// machines to be composed in order.
pub struct Components {
    pub table: SymbolTable,
    pub machines: Vec<(String, Vec<Fst>)>,
    pub filter_tags: Vec<String>,
}

impl Components {
    pub fn cascade(&self, key: &str) -> Option<&[Fst]> {
        self.machines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, f)| f.as_slice())
    }

    /// The component as a single machine.
    pub fn get(&self, key: &str) -> Result<Option<Fst>> {
        match self.cascade(key) {
            None => Ok(None),
            Some([single]) => Ok(Some(single.clone())),
            Some(parts) => compose_all(&parts[0], &parts[1..]).map(Some),
        }
    }
}

impl Manifest {
    /// Parses every referenced source, registers all tokens, then compiles.
    pub fn build(&self) -> Result<Components> {
        let mut table = SymbolTable::new();
        let mut sources = SourceSet::new();
        let mut paths = Vec::new();
        for (_, e) in &self.components {
            e.sources(&mut paths);
            e.registers(&mut table);
        }
        for p in &paths {
            sources.load(p, &mut table)?;
        }
        for t in &self.filter_tags {
            table.insert(t);
        }
        let mut machines = Vec::new();
        for (k, e) in &self.components {
            let f = e
                .eval_cascade(&mut sources, &table)
                .map_err(|err| Error::Component {
                    name: k.clone(),
                    inner: Box::new(err),
                })?;
            machines.push((k.clone(), f));
        }
        Ok(Components {
            table,
            machines,
            filter_tags: self.filter_tags.clone(),
        })
    }
}
