//! Random small machines and a bounded relation oracle that explores
//! configurations directly instead of calling the library's search.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use lexfst::{Arc, Fst, Label, StateId, SymbolTable, Weight, EPSILON};
use rand::Rng;

/// A relation restricted to bounded strings: (input, output) -> weight.
pub type Relation = BTreeMap<(Vec<Label>, Vec<Label>), f64>;

pub const SYMBOLS: [&str; 4] = ["a", "b", "c", "d"];

pub fn alphabet(table: &mut SymbolTable) -> Vec<Label> {
    SYMBOLS.iter().map(|s| table.insert(s)).collect()
}

/// A machine with up to `max_states` states, up to two arcs per state and
/// weights in steps of 0.5. With `acyclic`, arcs only go forward.
pub fn random_fst(
    rng: &mut impl Rng,
    table: &SymbolTable,
    symbols: &[Label],
    max_states: usize,
    acyclic: bool,
) -> Fst {
    let mut f = Fst::for_table(table);
    let n = rng.gen_range(1..=max_states);
    f.add_states(n);
    f.set_start(0);
    let label = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.2) {
            EPSILON
        } else {
            symbols[rng.gen_range(0..symbols.len())]
        }
    };
    for s in 0..n {
        if rng.gen_bool(0.4) || s == n - 1 {
            f.set_final(s, Weight::new(rng.gen_range(0..3) as f64 * 0.5));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let t = if acyclic {
                if s + 1 >= n {
                    continue;
                }
                rng.gen_range(s + 1..n)
            } else {
                rng.gen_range(0..n)
            };
            let (i, o) = (label(rng), label(rng));
            let w = Weight::new(rng.gen_range(0..4) as f64 * 0.5);
            f.add_arc(s, Arc::new(i, o, w, t));
        }
    }
    f
}

#[derive(PartialEq)]
struct Item(f64, StateId, Vec<Label>, Vec<Label>);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on weight, ties broken on the rest for determinism.
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| (other.1, &other.2, &other.3).cmp(&(self.1, &self.2, &self.3)))
    }
}

/// Least weight of every (input, output) pair with both sides at most
/// `max_len` long. Dijkstra over (state, input so far, output so far);
/// exact for non-negative weights, cycles included.
pub fn relation(f: &Fst, max_len: usize) -> Relation {
    let mut out = Relation::new();
    let Some(start) = f.start() else {
        return out;
    };
    let mut best: BTreeMap<(StateId, Vec<Label>, Vec<Label>), f64> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    best.insert((start, vec![], vec![]), 0.0);
    heap.push(Item(0.0, start, vec![], vec![]));
    while let Some(Item(w, s, x, y)) = heap.pop() {
        if best.get(&(s, x.clone(), y.clone())).is_some_and(|&b| b < w) {
            continue;
        }
        let fw = f.final_weight(s);
        if !fw.is_zero() {
            let total = w + fw.value();
            let e = out.entry((x.clone(), y.clone())).or_insert(f64::INFINITY);
            *e = e.min(total);
        }
        for a in f.arcs(s) {
            let mut x2 = x.clone();
            let mut y2 = y.clone();
            if a.ilabel != EPSILON {
                x2.push(a.ilabel);
            }
            if a.olabel != EPSILON {
                y2.push(a.olabel);
            }
            if x2.len() > max_len || y2.len() > max_len {
                continue;
            }
            let w2 = w + a.weight.value();
            let key = (a.nextstate, x2, y2);
            if best.get(&key).is_none_or(|&b| w2 < b) {
                best.insert(key.clone(), w2);
                heap.push(Item(w2, key.0, key.1, key.2));
            }
        }
    }
    out
}

fn keep_min(r: &mut Relation, k: (Vec<Label>, Vec<Label>), w: f64) {
    let e = r.entry(k).or_insert(f64::INFINITY);
    *e = e.min(w);
}

pub fn union_of(a: &Relation, b: &Relation) -> Relation {
    let mut r = a.clone();
    for (k, &w) in b {
        keep_min(&mut r, k.clone(), w);
    }
    r
}

/// Pairwise concatenations that stay within `max_len`.
pub fn concat_of(a: &Relation, b: &Relation, max_len: usize) -> Relation {
    let mut r = Relation::new();
    for ((x1, y1), w1) in a {
        for ((x2, y2), w2) in b {
            if x1.len() + x2.len() > max_len || y1.len() + y2.len() > max_len {
                continue;
            }
            let x = [x1.as_slice(), x2].concat();
            let y = [y1.as_slice(), y2].concat();
            keep_min(&mut r, (x, y), w1 + w2);
        }
    }
    r
}

/// `a` composed with `b`, joining on `a`'s output.
pub fn compose_of(a: &Relation, b: &Relation) -> Relation {
    let mut r = Relation::new();
    for ((x, y), w1) in a {
        for ((y2, z), w2) in b {
            if y == y2 {
                keep_min(&mut r, (x.clone(), z.clone()), w1 + w2);
            }
        }
    }
    r
}

/// Kleene closure within `max_len`; `plus` requires one iteration.
pub fn closure_of(a: &Relation, max_len: usize, plus: bool) -> Relation {
    let mut acc = if plus {
        a.clone()
    } else {
        union_of(&Relation::from([((vec![], vec![]), 0.0)]), a)
    };
    loop {
        let next = union_of(&acc, &concat_of(&acc, a, max_len));
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// Entries restricted to both sides at most `max_len` long.
pub fn bounded(r: &Relation, max_len: usize) -> Relation {
    r.iter()
        .filter(|((x, y), _)| x.len() <= max_len && y.len() <= max_len)
        .map(|(k, &w)| (k.clone(), w))
        .collect()
}

/// First difference between two relations, if any.
pub fn diff(expected: &Relation, actual: &Relation) -> Option<String> {
    for (k, w) in expected {
        match actual.get(k) {
            None => return Some(format!("missing {k:?} ({w})")),
            Some(v) if (v - w).abs() > 1e-9 => {
                return Some(format!("{k:?}: weight {v}, expected {w}"))
            }
            _ => {}
        }
    }
    actual
        .keys()
        .find(|k| !expected.contains_key(*k))
        .map(|k| format!("unexpected {k:?}"))
}
