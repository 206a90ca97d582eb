//! Weighted finite-state toolkit for text analysis in speech synthesis.
//!
//! Text is tokenized into symbols, mapped to a lattice of morphological
//! analyses by a composed analyzer, filtered by language models, and the
//! selected analysis is mapped to phonemes.

pub mod error;
pub mod fst;
pub mod io;
pub mod lextools;
pub mod manifest;
pub mod numbers;
pub mod pipeline;
pub mod ops;
pub mod regex;
pub mod rules;
pub mod search;
pub mod sources;
pub mod symbols;
pub mod syntax;
pub mod weight;

pub use error::{Error, Result};
pub use fst::{compile_string, connect, Arc, Fst, Path, StateId};
pub use ops::{
    avoid_symbols, closure, compose, concat, cross, invert, project, union, ClosureKind, Side,
};
pub use regex::{compile_regex, TokenRegex};
pub use rules::{compile_cascade, compile_rule, parse_rules, RewriteRule};
pub use search::{best_path, enumerate_paths, nbest};
pub use symbols::{Label, SymbolTable, EPSILON};
pub use weight::Weight;
