//! Symbol tables: bijection between token strings and integer labels.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Integer arc label. `EPSILON` (0) is reserved.
pub type Label = u32;

pub const EPSILON: Label = 0;
pub const EPSILON_SYMBOL: &str = "<eps>";

static NEXT_TABLE_ID: AtomicU64 = AtomicU64::new(1);

/// Ordered bijection between UTF-8 token strings and labels.
///
/// Every table carries an identity that machines built against it remember,
/// so that combining machines from unrelated tables is caught. Clones share
/// the identity: a clone is the same alphabet at a later point in time.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    id: u64,
    symbols: Vec<String>,
    index: HashMap<String, Label>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(EPSILON_SYMBOL.to_string(), EPSILON);
        SymbolTable {
            id: NEXT_TABLE_ID.fetch_add(1, Ordering::Relaxed),
            symbols: vec![EPSILON_SYMBOL.to_string()],
            index,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Returns the label of `symbol`, inserting it if absent.
    pub fn insert(&mut self, symbol: &str) -> Label {
        if let Some(&l) = self.index.get(symbol) {
            return l;
        }
        let label = self.symbols.len() as Label;
        self.symbols.push(symbol.to_string());
        self.index.insert(symbol.to_string(), label);
        label
    }

    pub fn get(&self, symbol: &str) -> Option<Label> {
        self.index.get(symbol).copied()
    }

    pub fn label(&self, symbol: &str) -> Result<Label> {
        self.get(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn symbol(&self, label: Label) -> Option<&str> {
        self.symbols.get(label as usize).map(String::as_str)
    }

    /// Number of entries including epsilon.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.len() <= 1
    }

    /// All non-epsilon labels in id order (the alphabet Σ).
    pub fn alphabet(&self) -> impl Iterator<Item = Label> + '_ {
        1..self.symbols.len() as Label
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (i as Label, s.as_str()))
    }

    /// Renders a label sequence by concatenating the symbols.
    pub fn render(&self, labels: &[Label]) -> String {
        labels
            .iter()
            .filter(|&&l| l != EPSILON)
            .map(|&l| self.symbol(l).unwrap_or("?"))
            .collect()
    }

    /// Renders a label sequence with a separator between symbols.
    pub fn render_sep(&self, labels: &[Label], sep: &str) -> String {
        labels
            .iter()
            .filter(|&&l| l != EPSILON)
            .map(|&l| self.symbol(l).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// `token<TAB>id` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, s) in self.iter() {
            let _ = writeln!(out, "{s}\t{l}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut table = SymbolTable::new();
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (sym, id) = line.rsplit_once('\t').ok_or_else(|| Error::Format {
                line: n + 1,
                msg: "expected `token<TAB>id`".into(),
            })?;
            let id: Label = id.trim().parse().map_err(|_| Error::Format {
                line: n + 1,
                msg: format!("bad label `{id}`"),
            })?;
            entries.push((id, sym.to_string(), n + 1));
        }
        entries.sort_by_key(|e| e.0);
        for (id, sym, line) in entries {
            if id == EPSILON {
                if sym != EPSILON_SYMBOL {
                    return Err(Error::Format {
                        line,
                        msg: "label 0 must be <eps>".into(),
                    });
                }
                continue;
            }
            if id as usize != table.symbols.len() || table.index.contains_key(&sym) {
                return Err(Error::Format {
                    line,
                    msg: format!("labels must be dense and unique (`{sym}` {id})"),
                });
            }
            table.insert(&sym);
        }
        Ok(table)
    }
}

/// Splits raw input text into one token per Unicode scalar value.
pub fn text_tokens(text: &str) -> Vec<String> {
    text.chars().map(|c| c.to_string()).collect()
}
