//! Reference implementations used as test oracles. They work directly on
//! strings and sets, without building any machines.
#![allow(dead_code)]

pub mod german;
pub mod machines;
pub mod suites;

use std::collections::BTreeSet;

use lexfst::{RewriteRule, TokenRegex};

/// All `j` such that `s[i..j]` matches `r`.
pub fn regex_ends(r: &TokenRegex, s: &[String], i: usize, sigma: &[String]) -> BTreeSet<usize> {
    let one = |ok: bool| -> BTreeSet<usize> {
        if ok {
            BTreeSet::from([i + 1])
        } else {
            BTreeSet::new()
        }
    };
    match r {
        TokenRegex::Empty | TokenRegex::Cost(_) => BTreeSet::from([i]),
        TokenRegex::Literal(t) => one(i < s.len() && &s[i] == t),
        TokenRegex::Any => one(i < s.len() && sigma.contains(&s[i])),
        TokenRegex::Class { negated, tokens } => one(
            i < s.len() && sigma.contains(&s[i]) && (tokens.contains(&s[i]) != *negated),
        ),
        TokenRegex::Concat(parts) => {
            let mut cur = BTreeSet::from([i]);
            for p in parts {
                cur = cur
                    .iter()
                    .flat_map(|&k| regex_ends(p, s, k, sigma))
                    .collect();
            }
            cur
        }
        TokenRegex::Alt(parts) => parts
            .iter()
            .flat_map(|p| regex_ends(p, s, i, sigma))
            .collect(),
        TokenRegex::Star(inner) => star_ends(inner, s, BTreeSet::from([i]), sigma),
        TokenRegex::Plus(inner) => {
            let first = regex_ends(inner, s, i, sigma);
            star_ends(inner, s, first, sigma)
        }
        TokenRegex::Opt(inner) => {
            let mut v = regex_ends(inner, s, i, sigma);
            v.insert(i);
            v
        }
    }
}

fn star_ends(
    inner: &TokenRegex,
    s: &[String],
    mut reached: BTreeSet<usize>,
    sigma: &[String],
) -> BTreeSet<usize> {
    let mut frontier: Vec<usize> = reached.iter().copied().collect();
    while let Some(k) = frontier.pop() {
        for j in regex_ends(inner, s, k, sigma) {
            if reached.insert(j) {
                frontier.push(j);
            }
        }
    }
    reached
}

/// Whether the whole of `s` matches `r`.
pub fn matches(r: &TokenRegex, s: &[String], sigma: &[String]) -> bool {
    regex_ends(r, s, 0, sigma).contains(&s.len())
}

/// Obligatory left-to-right, leftmost-longest application of `rule`.
/// Contexts are checked against the input. Returns the output and the
/// number of applications.
pub fn rewrite(rule: &RewriteRule, s: &[String], sigma: &[String]) -> (Vec<String>, usize) {
    let n = s.len();
    let left_ok = |i: usize| (0..=i).any(|k| regex_ends(&rule.lambda, s, k, sigma).contains(&i));
    let right_ok = |j: usize| !regex_ends(&rule.rho, s, j, sigma).is_empty();
    let mut out = Vec::new();
    let mut count = 0;
    let mut i = 0;
    loop {
        let lo = left_ok(i);
        if lo {
            let longest = regex_ends(&rule.phi, s, i, sigma)
                .into_iter()
                .filter(|&j| j > i && right_ok(j))
                .max();
            if let Some(j) = longest {
                out.extend(rule.psi.iter().cloned());
                count += 1;
                i = j;
                continue;
            }
            if regex_ends(&rule.phi, s, i, sigma).contains(&i) && right_ok(i) {
                out.extend(rule.psi.iter().cloned());
                count += 1;
            }
        }
        if i == n {
            break;
        }
        out.push(s[i].clone());
        i += 1;
    }
    (out, count)
}

/// All strings over `sigma` of length at most `max_len`.
pub fn all_strings(sigma: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for c in sigma {
                let mut t: Vec<String> = s.clone();
                t.push(c.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A frozen `analyze` result: input, analysis line, phoneme line.
#[derive(Debug)]
pub struct Golden {
    pub text: String,
    pub analysis: String,
    pub phonemes: String,
}

/// Reads `> text` blocks from a golden file under `tests/golden`.
pub fn goldens(name: &str) -> Vec<Golden> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some(head) = lines.next() {
        let text = head.strip_prefix("> ").expect("block starts with `> `");
        out.push(Golden {
            text: text.to_string(),
            analysis: lines.next().unwrap().to_string(),
            phonemes: lines.next().unwrap().to_string(),
        });
    }
    out
}

pub fn fixture(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}
