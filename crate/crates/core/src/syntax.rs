//! Shared lexer for the grammar source formats.
//!
//! A token is a single UTF-8 character, a `{...}` brace group, or any
//! character escaped with `\`. Costs are written `<1.0>`, epsilon `<eps>`.
//! `#` starts a comment. Whitespace only separates.

use crate::error::{Error, Result};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub enum Lexeme {
    Token(String),
    /// One of `( ) | * + ? . [ ]`, or `^` directly after `[`.
    Op(char),
    Arrow,
    Slash,
    Colon,
    /// `_` or `__`, the rule focus position.
    Under,
    Cost(Weight),
    Eps,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spanned {
    pub lexeme: Lexeme,
    pub col: usize,
}

pub fn lex_line(line: &str, line_no: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out: Vec<Spanned> = Vec::new();
    let err = |col: usize, msg: String| Error::Parse {
        line: line_no,
        col,
        msg,
    };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let push = |out: &mut Vec<Spanned>, lexeme| out.push(Spanned { lexeme, col });
        match c {
            c if c.is_whitespace() => i += 1,
            '#' => break,
            '\\' => {
                let Some(&n) = chars.get(i + 1) else {
                    return Err(err(col, "dangling escape".into()));
                };
                push(&mut out, Lexeme::Token(n.to_string()));
                i += 2;
            }
            '{' => {
                let close = chars[i..]
                    .iter()
                    .position(|&x| x == '}')
                    .ok_or_else(|| err(col, "unterminated `{`".into()))?;
                let tok: String = chars[i..=i + close].iter().collect();
                push(&mut out, Lexeme::Token(tok));
                i += close + 1;
            }
            '<' => {
                let close = chars[i..]
                    .iter()
                    .position(|&x| x == '>')
                    .ok_or_else(|| err(col, "unterminated `<`".into()))?;
                let body: String = chars[i + 1..i + close].iter().collect();
                let body = body.trim();
                if body == "eps" {
                    push(&mut out, Lexeme::Eps);
                } else {
                    let w: Weight = body
                        .parse()
                        .map_err(|_| err(col, format!("bad cost `<{body}>`")))?;
                    if w.value() < 0.0 {
                        return Err(err(col, "costs must be nonnegative".into()));
                    }
                    push(&mut out, Lexeme::Cost(w));
                }
                i += close + 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Lexeme::Arrow);
                i += 2;
            }
            '/' => {
                push(&mut out, Lexeme::Slash);
                i += 1;
            }
            ':' => {
                push(&mut out, Lexeme::Colon);
                i += 1;
            }
            '_' => {
                push(&mut out, Lexeme::Under);
                i += if chars.get(i + 1) == Some(&'_') { 2 } else { 1 };
            }
            '^' if matches!(out.last(), Some(Spanned { lexeme: Lexeme::Op('['), .. })) => {
                push(&mut out, Lexeme::Op('^'));
                i += 1;
            }
            '(' | ')' | '|' | '*' | '+' | '?' | '.' | '[' | ']' => {
                push(&mut out, Lexeme::Op(c));
                i += 1;
            }
            _ => {
                push(&mut out, Lexeme::Token(c.to_string()));
                i += 1;
            }
        }
    }
    Ok(out)
}

/// Splits `lexemes` at every top-level occurrence of `sep`.
pub fn split_at<'a>(lexemes: &'a [Spanned], sep: &Lexeme) -> Vec<&'a [Spanned]> {
    lexemes
        .split(|s| &s.lexeme == sep)
        .collect()
}

/// Splits a line into whitespace-separated fields, honoring escapes and
/// brace groups; used by the directive lines of paradigm and arclist files.
pub fn fields(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut depth = 0;
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                cur.push(c);
                if let Some(n) = chars.next() {
                    cur.push(n);
                }
            }
            '{' => {
                depth += 1;
                cur.push(c);
            }
            '}' => {
                depth -= 1;
                cur.push(c);
            }
            '#' if depth == 0 => break,
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Parses a plain token sequence (no operators).
pub fn token_sequence(src: &str, line_no: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for s in lex_line(src, line_no)? {
        match s.lexeme {
            Lexeme::Token(t) => out.push(t),
            Lexeme::Eps => {}
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    col: s.col,
                    msg: format!("expected a token, found {other:?}"),
                })
            }
        }
    }
    Ok(out)
}
