//! Randomized oracle suites. Each returns a one-line summary on success
//! and the first counterexample on failure.

use lexfst::numbers::build_factorizer;
use lexfst::{
    best_path, closure, compile_rule, compile_string, compose, concat, enumerate_paths, union,
    ClosureKind, Fst, RewriteRule, SymbolTable, TokenRegex, Weight, EPSILON,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::machines::{self, bounded, diff, random_fst, relation};

pub type Outcome = Result<String, String>;

/// Strings up to this long on either side are compared.
const MAX_LEN: usize = 6;

/// compose, union, concat and closure against the same operations done on
/// enumerated relations. The left operand may be cyclic; the right one is
/// acyclic so that every intermediate string of a composition is short.
pub fn rational_ops(pairs: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = SymbolTable::new();
    let symbols = machines::alphabet(&mut table);
    let mut checked = 0;
    for case in 0..pairs {
        let a = random_fst(&mut rng, &table, &symbols, 6, false);
        let b = random_fst(&mut rng, &table, &symbols, 6, true);
        let ra = relation(&a, MAX_LEN);
        let rb = relation(&b, MAX_LEN);
        let check = |what: &str, expected: machines::Relation, f: Fst| -> Result<(), String> {
            match diff(&expected, &relation(&f, MAX_LEN)) {
                None => Ok(()),
                Some(d) => Err(format!("pair {case}, {what}: {d}\nleft {a:?}\nright {b:?}")),
            }
        };
        let err = |e: lexfst::Error| e.to_string();
        check(
            "compose",
            bounded(&machines::compose_of(&ra, &rb), MAX_LEN),
            compose(&a, &b).map_err(err)?,
        )?;
        check(
            "union",
            machines::union_of(&ra, &rb),
            union(&a, &b).map_err(err)?,
        )?;
        check(
            "concat",
            machines::concat_of(&ra, &rb, MAX_LEN),
            concat(&a, &b).map_err(err)?,
        )?;
        check(
            "star",
            machines::closure_of(&ra, MAX_LEN, false),
            closure(&a, ClosureKind::Star),
        )?;
        check(
            "plus",
            machines::closure_of(&rb, MAX_LEN, true),
            closure(&b, ClosureKind::Plus),
        )?;
        checked += 5;
    }
    Ok(format!("{pairs} machine pairs, {checked} relations compared"))
}

/// best_path weight against the minimum over all enumerated paths.
pub fn best_paths(machines: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = SymbolTable::new();
    let symbols = machines::alphabet(&mut table);
    let mut nonempty = 0;
    for case in 0..machines {
        let f = random_fst(&mut rng, &table, &symbols, 6, true);
        let min = enumerate_paths(&f, 16)
            .iter()
            .map(|p| p.weight)
            .fold(Weight::zero(), Weight::plus);
        match best_path(&f) {
            Ok(p) if !min.is_zero() && p.weight.approx_eq(min, 1e-9) => nonempty += 1,
            Err(_) if min.is_zero() => {}
            other => {
                return Err(format!(
                    "machine {case}: best path {:?}, minimum {min}\n{f:?}",
                    other.map(|p| p.weight)
                ))
            }
        }
    }
    Ok(format!("{machines} acyclic machines, {nonempty} with paths"))
}

const SIGMA: [&str; 3] = ["a", "b", "c"];

fn random_regex(rng: &mut ChaCha8Rng, depth: u32) -> TokenRegex {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..6) {
            0 => TokenRegex::Any,
            1 => {
                let negated = rng.gen_bool(0.5);
                let tokens = SIGMA
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|s| s.to_string())
                    .collect();
                TokenRegex::Class { negated, tokens }
            }
            _ => TokenRegex::Literal(SIGMA[rng.gen_range(0..3)].to_string()),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_regex(rng, depth - 1));
    match rng.gen_range(0..6) {
        0 | 1 => TokenRegex::Concat(vec![*sub(rng), *sub(rng)]),
        2 => TokenRegex::Alt(vec![*sub(rng), *sub(rng)]),
        3 => TokenRegex::Star(sub(rng)),
        4 => TokenRegex::Plus(sub(rng)),
        _ => TokenRegex::Opt(sub(rng)),
    }
}

fn random_context(rng: &mut ChaCha8Rng) -> TokenRegex {
    if rng.gen_bool(0.4) {
        TokenRegex::Empty
    } else {
        random_regex(rng, 2)
    }
}

pub fn random_rule(rng: &mut ChaCha8Rng) -> RewriteRule {
    let phi = if rng.gen_bool(0.05) {
        TokenRegex::Empty
    } else {
        random_regex(rng, 3)
    };
    let psi = (0..rng.gen_range(0..3))
        .map(|_| SIGMA[rng.gen_range(0..3)].to_string())
        .collect();
    let cost = Weight::new(rng.gen_range(0..4) as f64 * 0.5);
    RewriteRule::new(phi, psi)
        .with_context(random_context(rng), random_context(rng))
        .with_cost(cost)
}

pub fn sigma() -> Vec<String> {
    SIGMA.iter().map(|s| s.to_string()).collect()
}

pub fn sigma_table() -> SymbolTable {
    let mut table = SymbolTable::new();
    for s in SIGMA {
        table.insert(s);
    }
    table
}

/// Compiles `rule` and checks it on every string against the rewriter.
pub fn check_rule(
    rule: &RewriteRule,
    table: &mut SymbolTable,
    strings: &[Vec<String>],
) -> Result<(), String> {
    let f = compile_rule(rule, table).map_err(|e| format!("{rule:?}: {e}"))?;
    for s in strings {
        let (expected, count) = super::rewrite(rule, s, &sigma());
        let input = compile_string(s, table);
        let c = compose(&input, &f).map_err(|e| e.to_string())?;
        let outputs: Vec<_> = enumerate_paths(&c, 64)
            .into_iter()
            .map(|p| (table.render_sep(&p.output(), " "), p.weight))
            .collect();
        let w = Weight::new(rule.cost.value() * count as f64);
        match outputs.as_slice() {
            [(out, weight)] if *out == expected.join(" ") && weight.approx_eq(w, 1e-9) => {}
            _ => {
                return Err(format!(
                    "rule {rule:?} on {s:?}: got {outputs:?}, expected {:?} at {w}",
                    expected.join(" ")
                ))
            }
        }
    }
    Ok(())
}

/// Random rules against the leftmost-longest rewriting oracle on every
/// string up to length 6.
pub fn rules(count: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = sigma_table();
    let strings = super::all_strings(&sigma(), 6);
    for _ in 0..count {
        check_rule(&random_rule(&mut rng), &mut table, &strings)?;
    }
    Ok(format!(
        "{count} rules x {} strings agree",
        strings.len()
    ))
}

/// Value of a factorization such as `{2}{10^2}{+++}{3}{10^1}{+++}{4}`.
fn evaluate(tokens: &[&str]) -> Result<u64, String> {
    let mut total = 0;
    for term in tokens.split(|t| *t == "{+++}") {
        let digit = term
            .first()
            .and_then(|t| t.strip_prefix('{')?.strip_suffix('}')?.parse::<u64>().ok())
            .ok_or_else(|| format!("bad term {term:?}"))?;
        let power = match term.get(1) {
            None => 0,
            Some(p) => p
                .strip_prefix("{10^")
                .and_then(|p| p.strip_suffix('}'))
                .and_then(|p| p.parse::<u32>().ok())
                .ok_or_else(|| format!("bad power {p}"))?,
        };
        if term.len() > 2 {
            return Err(format!("bad term {term:?}"));
        }
        total += digit * 10u64.pow(power);
    }
    Ok(total)
}

/// Every path of the factorizer for `max_digits` evaluates back to the
/// number its digits spell, and each number has exactly one path.
pub fn factorizer(max_digits: usize) -> Outcome {
    let mut table = SymbolTable::new();
    let f = build_factorizer(max_digits, &mut table);
    let limit = 10u64.pow(max_digits as u32);
    let mut seen = vec![false; limit as usize];
    let mut paths = 0u64;
    // Depth-first walk keeping the digits read and tokens written so far.
    let mut stack = vec![(f.start().ok_or("empty factorizer")?, 0usize, Vec::new(), Vec::new())];
    while let Some((s, next_arc, digits, out)) = stack.pop() {
        if next_arc == 0 && f.is_final(s) {
            let text: String = digits.iter().map(|&l| table.symbol(l).unwrap()).collect();
            let tokens: Vec<&str> = out.iter().map(|&l| table.symbol(l).unwrap()).collect();
            let n: u64 = text.parse().map_err(|_| format!("bad input {text:?}"))?;
            let value = evaluate(&tokens)?;
            if value != n {
                return Err(format!("{text} factorizes as {} = {value}", tokens.concat()));
            }
            if std::mem::replace(&mut seen[n as usize], true) {
                return Err(format!("{text} has more than one factorization"));
            }
            paths += 1;
        }
        if let Some(a) = f.arcs(s).get(next_arc) {
            stack.push((s, next_arc + 1, digits.clone(), out.clone()));
            let mut d = digits;
            let mut o = out;
            if a.ilabel != EPSILON {
                d.push(a.ilabel);
            }
            if a.olabel != EPSILON {
                o.push(a.olabel);
            }
            stack.push((a.nextstate, 0, d, o));
        }
    }
    if let Some(n) = seen.iter().position(|&s| !s) {
        return Err(format!("{n} has no factorization"));
    }
    Ok(format!("0..={} round-trip through {paths} paths", limit - 1))
}
