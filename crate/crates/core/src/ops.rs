//! Rational operations on transducers.

use std::collections::VecDeque;

use rustc_hash::FxHashMap as HashMap;

use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, StateId};
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::weight::Weight;

fn shared_table(a: &Fst, b: &Fst) -> Result<Option<u64>> {
    match (a.table_id(), b.table_id()) {
        (Some(x), Some(y)) if x != y => Err(Error::TableMismatch),
        (x, y) => Ok(x.or(y)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    Star,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

/// Composition with an epsilon-sequencing filter.
///
/// Filter state 0 allows every move; 1 means the left machine has just
/// advanced alone on an output epsilon; 2 means the right machine has just
/// advanced alone on an input epsilon. Forbidding 1 -> right-alone and
/// 2 -> left-alone leaves exactly one path per epsilon alignment.
pub fn compose(a: &Fst, b: &Fst) -> Result<Fst> {
    let table = shared_table(a, b)?;
    let mut out = Fst::new();
    out.set_table_id(table);
    let (Some(sa), Some(sb)) = (a.start(), b.start()) else {
        return Ok(out);
    };
    // Right-side arcs are looked up by binary search on the input label.
    let sorted;
    let b = if b.is_input_sorted() {
        b
    } else {
        sorted = {
            let mut c = b.clone();
            c.sort_by_input();
            c
        };
        &sorted
    };

    let mut ids: HashMap<(StateId, StateId, u8), StateId> = HashMap::default();
    let mut queue = VecDeque::new();
    let mut state_of = |key: (StateId, StateId, u8),
                        out: &mut Fst,
                        queue: &mut VecDeque<(StateId, StateId, u8)>|
     -> StateId {
        *ids.entry(key).or_insert_with(|| {
            let s = out.add_state();
            queue.push_back(key);
            s
        })
    };

    let s0 = state_of((sa, sb, 0), &mut out, &mut queue);
    out.set_start(s0);

    let mut new_arcs = Vec::new();
    while let Some(key @ (qa, qb, filt)) = queue.pop_front() {
        let src = state_of(key, &mut out, &mut queue);
        let fw = a.final_weight(qa).times(b.final_weight(qb));
        if !fw.is_zero() {
            out.set_final(src, fw);
        }
        let b_eps = b.arcs_with_input(qb, EPSILON);
        for ea in a.arcs(qa) {
            if ea.olabel == EPSILON {
                if filt != 2 {
                    new_arcs.push((ea.ilabel, EPSILON, ea.weight, (ea.nextstate, qb, 1)));
                }
                if filt == 0 {
                    for eb in b_eps {
                        new_arcs.push((
                            ea.ilabel,
                            eb.olabel,
                            ea.weight.times(eb.weight),
                            (ea.nextstate, eb.nextstate, 0),
                        ));
                    }
                }
            } else {
                for eb in b.arcs_with_input(qb, ea.olabel) {
                    new_arcs.push((
                        ea.ilabel,
                        eb.olabel,
                        ea.weight.times(eb.weight),
                        (ea.nextstate, eb.nextstate, 0),
                    ));
                }
            }
        }
        if filt != 1 {
            for eb in b_eps {
                new_arcs.push((EPSILON, eb.olabel, eb.weight, (qa, eb.nextstate, 2)));
            }
        }
        for (il, ol, w, dst) in new_arcs.drain(..) {
            let t = state_of(dst, &mut out, &mut queue);
            out.add_arc(src, Arc::new(il, ol, w, t));
        }
    }
    Ok(connect(&out))
}

/// Composes a sequence left to right. An empty sequence is an error-free
/// no-op only when `first` is given.
pub fn compose_all<'a>(first: &Fst, rest: impl IntoIterator<Item = &'a Fst>) -> Result<Fst> {
    let mut acc = first.clone();
    for f in rest {
        acc = compose(&acc, f)?;
    }
    Ok(acc)
}

pub fn union(a: &Fst, b: &Fst) -> Result<Fst> {
    let table = shared_table(a, b)?;
    let mut out = Fst::new();
    out.set_table_id(table);
    let start = out.add_state();
    out.set_start(start);
    for m in [a, b] {
        if let Some(s) = m.start() {
            let off = out.append(m);
            out.add_arc(start, Arc::eps(s + off));
        }
    }
    Ok(out)
}

/// Union of many machines under one new start state.
pub fn union_all<'a>(machines: impl IntoIterator<Item = &'a Fst>) -> Result<Fst> {
    let mut out = Fst::new();
    let start = out.add_state();
    out.set_start(start);
    for m in machines {
        let table = shared_table(&out, m)?;
        out.set_table_id(table);
        if let Some(s) = m.start() {
            let off = out.append(m);
            out.add_arc(start, Arc::eps(s + off));
        }
    }
    Ok(out)
}

pub fn concat(a: &Fst, b: &Fst) -> Result<Fst> {
    let table = shared_table(a, b)?;
    let mut out = Fst::new();
    out.set_table_id(table);
    let (Some(sa), Some(sb)) = (a.start(), b.start()) else {
        return Ok(out);
    };
    let off_a = out.append(a);
    let off_b = out.append(b);
    for s in a.states() {
        let w = a.final_weight(s);
        if !w.is_zero() {
            out.set_final(s + off_a, Weight::zero());
            out.add_arc(s + off_a, Arc::new(EPSILON, EPSILON, w, sb + off_b));
        }
    }
    out.set_start(sa + off_a);
    Ok(out)
}

pub fn concat_all<'a>(machines: impl IntoIterator<Item = &'a Fst>) -> Result<Fst> {
    let mut acc = epsilon_machine(None);
    for m in machines {
        acc = concat(&acc, m)?;
    }
    Ok(acc)
}

pub fn closure(a: &Fst, kind: ClosureKind) -> Fst {
    let mut out = Fst::new();
    out.set_table_id(a.table_id());
    let new_start = out.add_state();
    out.set_start(new_start);
    if kind == ClosureKind::Star {
        out.set_final(new_start, Weight::one());
    }
    let Some(sa) = a.start() else {
        return out;
    };
    let off = out.append(a);
    out.add_arc(new_start, Arc::eps(sa + off));
    for s in a.states() {
        let w = a.final_weight(s);
        if !w.is_zero() {
            out.add_arc(s + off, Arc::new(EPSILON, EPSILON, w, sa + off));
        }
    }
    out
}

pub fn invert(a: &Fst) -> Fst {
    let mut out = a.clone();
    for s in out.states() {
        for arc in out.arcs_mut(s) {
            std::mem::swap(&mut arc.ilabel, &mut arc.olabel);
        }
    }
    out
}

pub fn project(a: &Fst, side: Side) -> Fst {
    let mut out = a.clone();
    for s in out.states() {
        for arc in out.arcs_mut(s) {
            match side {
                Side::Input => arc.olabel = arc.ilabel,
                Side::Output => arc.ilabel = arc.olabel,
            }
        }
    }
    out
}

/// Replaces every arc's label on `side` with epsilon.
pub fn erase(a: &Fst, side: Side) -> Fst {
    let mut out = a.clone();
    for s in out.states() {
        for arc in out.arcs_mut(s) {
            match side {
                Side::Input => arc.ilabel = EPSILON,
                Side::Output => arc.olabel = EPSILON,
            }
        }
    }
    out
}

/// Single-state identity machine over every symbol of the table except
/// `banned`: the acceptor (Σ∖banned)*.
pub fn avoid_symbols(table: &SymbolTable, banned: &[Label]) -> Fst {
    let mut f = Fst::for_table(table);
    let s = f.add_state();
    f.set_start(s);
    f.set_final(s, Weight::one());
    for l in table.alphabet() {
        if !banned.contains(&l) {
            f.add_arc(s, Arc::new(l, l, Weight::one(), s));
        }
    }
    f
}

/// Identity over Σ*.
pub fn sigma_star(table: &SymbolTable) -> Fst {
    avoid_symbols(table, &[])
}

/// Accepts only the empty string.
pub fn epsilon_machine(table: Option<&SymbolTable>) -> Fst {
    let mut f = Fst::new();
    f.set_table_id(table.map(SymbolTable::id));
    let s = f.add_state();
    f.set_start(s);
    f.set_final(s, Weight::one());
    f
}

/// Cross product: maps every string of `upper`'s input language to every
/// string of `lower`'s input language, weights added.
pub fn cross(upper: &Fst, lower: &Fst) -> Result<Fst> {
    concat(&erase(upper, Side::Output), &erase(lower, Side::Input))
}

/// Multiplies `w` into every final weight.
pub fn times_final(a: &Fst, w: Weight) -> Fst {
    let mut out = a.clone();
    for s in a.states() {
        let fw = a.final_weight(s);
        if !fw.is_zero() {
            out.set_final(s, fw.times(w));
        }
    }
    out
}
