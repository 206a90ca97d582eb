//! Regular expressions over tokens.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, StateId};
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::syntax::{lex_line, Lexeme, Spanned};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenRegex {
    /// The empty string.
    Empty,
    Literal(String),
    /// `.`: any single symbol of the alphabet.
    Any,
    /// `[a b c]` or `[^ a b c]`.
    Class { negated: bool, tokens: Vec<String> },
    Concat(Vec<TokenRegex>),
    Alt(Vec<TokenRegex>),
    Star(Box<TokenRegex>),
    Plus(Box<TokenRegex>),
    Opt(Box<TokenRegex>),
    /// `<w>`: the empty string at cost `w`.
    Cost(Weight),
}

impl TokenRegex {
    pub fn parse(src: &str) -> Result<TokenRegex> {
        let lexemes = lex_line(src, 1)?;
        TokenRegex::from_lexemes(&lexemes, 1)
    }

    pub fn literal_string<S: AsRef<str>>(tokens: &[S]) -> TokenRegex {
        TokenRegex::Concat(
            tokens
                .iter()
                .map(|t| TokenRegex::Literal(t.as_ref().to_string()))
                .collect(),
        )
    }

    /// Parses a complete lexeme slice; trailing material is an error.
    pub fn from_lexemes(lexemes: &[Spanned], line: usize) -> Result<TokenRegex> {
        let mut p = Parser {
            lexemes,
            pos: 0,
            line,
        };
        let r = p.alternation()?;
        if p.pos < lexemes.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(r)
    }

    /// Every literal token mentioned by the expression.
    pub fn tokens(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens(&self, out: &mut BTreeSet<String>) {
        match self {
            TokenRegex::Literal(t) => {
                out.insert(t.clone());
            }
            TokenRegex::Class { tokens, .. } => out.extend(tokens.iter().cloned()),
            TokenRegex::Concat(v) | TokenRegex::Alt(v) => {
                v.iter().for_each(|r| r.collect_tokens(out))
            }
            TokenRegex::Star(r) | TokenRegex::Plus(r) | TokenRegex::Opt(r) => {
                r.collect_tokens(out)
            }
            TokenRegex::Empty | TokenRegex::Any | TokenRegex::Cost(_) => {}
        }
    }

    /// Inserts every literal into the table.
    pub fn register(&self, table: &mut SymbolTable) {
        for t in self.tokens() {
            table.insert(&t);
        }
    }

    /// Returns the token sequence if the expression is a plain string
    /// (literals, epsilon and costs only), with its total cost.
    pub fn as_string(&self) -> Option<(Vec<String>, Weight)> {
        let mut toks = Vec::new();
        let mut w = Weight::one();
        fn go(r: &TokenRegex, toks: &mut Vec<String>, w: &mut Weight) -> bool {
            match r {
                TokenRegex::Empty => true,
                TokenRegex::Literal(t) => {
                    toks.push(t.clone());
                    true
                }
                TokenRegex::Cost(c) => {
                    *w = w.times(*c);
                    true
                }
                TokenRegex::Concat(v) => v.iter().all(|r| go(r, toks, w)),
                _ => false,
            }
        }
        go(self, &mut toks, &mut w).then_some((toks, w))
    }
}

struct Parser<'a> {
    lexemes: &'a [Spanned],
    pos: usize,
    line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Lexeme> {
        self.lexemes.get(self.pos).map(|s| &s.lexeme)
    }

    fn error(&self, msg: &str) -> Error {
        let col = self
            .lexemes
            .get(self.pos)
            .or(self.lexemes.last())
            .map_or(1, |s| s.col);
        Error::Parse {
            line: self.line,
            col,
            msg: msg.to_string(),
        }
    }

    fn alternation(&mut self) -> Result<TokenRegex> {
        let mut alts = vec![self.concatenation()?];
        while self.peek() == Some(&Lexeme::Op('|')) {
            self.pos += 1;
            alts.push(self.concatenation()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            TokenRegex::Alt(alts)
        })
    }

    fn concatenation(&mut self) -> Result<TokenRegex> {
        let mut items = Vec::new();
        while let Some(l) = self.peek() {
            if matches!(l, Lexeme::Op('|') | Lexeme::Op(')')) {
                break;
            }
            items.push(self.postfix()?);
        }
        Ok(match items.len() {
            0 => TokenRegex::Empty,
            1 => items.pop().unwrap(),
            _ => TokenRegex::Concat(items),
        })
    }

    fn postfix(&mut self) -> Result<TokenRegex> {
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some(Lexeme::Op('*')) => TokenRegex::Star(Box::new(r)),
                Some(Lexeme::Op('+')) => TokenRegex::Plus(Box::new(r)),
                Some(Lexeme::Op('?')) => TokenRegex::Opt(Box::new(r)),
                _ => return Ok(r),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<TokenRegex> {
        let Some(l) = self.peek().cloned() else {
            return Err(self.error("unexpected end of expression"));
        };
        self.pos += 1;
        match l {
            Lexeme::Token(t) => Ok(TokenRegex::Literal(t)),
            Lexeme::Eps => Ok(TokenRegex::Empty),
            Lexeme::Cost(w) => Ok(TokenRegex::Cost(w)),
            Lexeme::Op('.') => Ok(TokenRegex::Any),
            Lexeme::Op('(') => {
                let r = self.alternation()?;
                if self.peek() != Some(&Lexeme::Op(')')) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Lexeme::Op('[') => {
                let negated = self.peek() == Some(&Lexeme::Op('^'));
                if negated {
                    self.pos += 1;
                }
                let mut tokens = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Lexeme::Token(t)) => tokens.push(t),
                        Some(Lexeme::Op(']')) => break,
                        _ => return Err(self.error("expected a token or `]` in class")),
                    }
                    self.pos += 1;
                }
                self.pos += 1;
                Ok(TokenRegex::Class { negated, tokens })
            }
            _ => {
                self.pos -= 1;
                Err(self.error("unexpected symbol in expression"))
            }
        }
    }
}

/// Thompson-style construction of an epsilon acceptor.
pub fn compile_regex(r: &TokenRegex, table: &SymbolTable) -> Result<Fst> {
    let mut f = Fst::for_table(table);
    let s = f.add_state();
    let t = f.add_state();
    f.set_start(s);
    f.set_final(t, Weight::one());
    build(r, table, &mut f, s, t)?;
    Ok(f)
}

fn build(r: &TokenRegex, table: &SymbolTable, f: &mut Fst, s: StateId, t: StateId) -> Result<()> {
    let sym = |l: Label| Arc::new(l, l, Weight::one(), t);
    match r {
        TokenRegex::Empty => f.add_arc(s, Arc::eps(t)),
        TokenRegex::Cost(w) => f.add_arc(s, Arc::new(EPSILON, EPSILON, *w, t)),
        TokenRegex::Literal(tok) => f.add_arc(s, sym(table.label(tok)?)),
        TokenRegex::Any => {
            for l in table.alphabet() {
                f.add_arc(s, sym(l));
            }
        }
        TokenRegex::Class { negated, tokens } => {
            let set: BTreeSet<Label> = tokens
                .iter()
                .map(|tok| table.label(tok))
                .collect::<Result<_>>()?;
            if *negated {
                for l in table.alphabet().filter(|l| !set.contains(l)) {
                    f.add_arc(s, sym(l));
                }
            } else {
                for l in set {
                    f.add_arc(s, sym(l));
                }
            }
        }
        TokenRegex::Concat(items) => {
            let mut cur = s;
            for (i, item) in items.iter().enumerate() {
                let next = if i + 1 == items.len() { t } else { f.add_state() };
                build(item, table, f, cur, next)?;
                cur = next;
            }
            if items.is_empty() {
                f.add_arc(s, Arc::eps(t));
            }
        }
        TokenRegex::Alt(items) => {
            for item in items {
                let (a, b) = (f.add_state(), f.add_state());
                f.add_arc(s, Arc::eps(a));
                build(item, table, f, a, b)?;
                f.add_arc(b, Arc::eps(t));
            }
        }
        TokenRegex::Star(inner) | TokenRegex::Plus(inner) => {
            let (a, b) = (f.add_state(), f.add_state());
            f.add_arc(s, Arc::eps(a));
            build(inner, table, f, a, b)?;
            f.add_arc(b, Arc::eps(a));
            f.add_arc(b, Arc::eps(t));
            if matches!(r, TokenRegex::Star(_)) {
                f.add_arc(s, Arc::eps(t));
            }
        }
        TokenRegex::Opt(inner) => {
            build(inner, table, f, s, t)?;
            f.add_arc(s, Arc::eps(t));
        }
    }
    Ok(())
}
