//! Best-path search and path enumeration.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, Path, StateId};
use crate::symbols::Label;
use crate::weight::Weight;

#[derive(Clone, Copy, PartialEq)]
struct Key(Weight, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Single-source shortest distances from the start state (Dijkstra; all
/// tropical weights are nonnegative). Predecessors change only on strict
/// improvement, and equal keys pop in state-id order, so ties resolve
/// towards lower state ids.
fn dijkstra(f: &Fst) -> (Vec<Weight>, Vec<Option<(StateId, usize)>>) {
    let n = f.num_states();
    let mut dist = vec![Weight::zero(); n];
    let mut pred = vec![None; n];
    let Some(start) = f.start() else {
        return (dist, pred);
    };
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[start] = Weight::one();
    heap.push(Reverse(Key(Weight::one(), start)));
    while let Some(Reverse(Key(d, s))) = heap.pop() {
        if done[s] {
            continue;
        }
        done[s] = true;
        for (i, a) in f.arcs(s).iter().enumerate() {
            let nd = d.times(a.weight);
            if nd.total_cmp(&dist[a.nextstate]) == Ordering::Less {
                dist[a.nextstate] = nd;
                pred[a.nextstate] = Some((s, i));
                heap.push(Reverse(Key(nd, a.nextstate)));
            }
        }
    }
    (dist, pred)
}

/// The minimum-weight accepting path.
pub fn best_path(f: &Fst) -> Result<Path> {
    let (dist, pred) = dijkstra(f);
    let mut best: Option<(Weight, StateId)> = None;
    for s in f.states() {
        let total = dist[s].times(f.final_weight(s));
        if total.is_zero() {
            continue;
        }
        if best.is_none_or(|(w, _)| total.total_cmp(&w) == Ordering::Less) {
            best = Some((total, s));
        }
    }
    let (weight, last) = best.ok_or(Error::NoPath)?;
    let mut states = vec![last];
    let mut arcs = Vec::new();
    let mut s = last;
    while let Some((p, i)) = pred[s] {
        arcs.push(f.arcs(p)[i]);
        states.push(p);
        s = p;
    }
    states.reverse();
    arcs.reverse();
    Ok(Path {
        states,
        arcs,
        weight,
    })
}

/// Shortest distance from every state to a final state.
pub fn distance_to_final(f: &Fst) -> Vec<Weight> {
    let n = f.num_states();
    let mut rev: Vec<Vec<(StateId, Weight)>> = vec![Vec::new(); n];
    for s in f.states() {
        for a in f.arcs(s) {
            rev[a.nextstate].push((s, a.weight));
        }
    }
    let mut dist: Vec<Weight> = f.states().map(|s| f.final_weight(s)).collect();
    let mut heap: BinaryHeap<_> = f
        .states()
        .filter(|&s| !dist[s].is_zero())
        .map(|s| Reverse(Key(dist[s], s)))
        .collect();
    let mut done = vec![false; n];
    while let Some(Reverse(Key(d, s))) = heap.pop() {
        if done[s] {
            continue;
        }
        done[s] = true;
        for &(p, w) in &rev[s] {
            let nd = w.times(d);
            if nd.total_cmp(&dist[p]) == Ordering::Less {
                dist[p] = nd;
                heap.push(Reverse(Key(nd, p)));
            }
        }
    }
    dist
}

struct Partial {
    arc: Option<Arc>,
    state: StateId,
    prev: Option<Rc<Partial>>,
}

/// The `k` cheapest paths with pairwise distinct (input, output) strings,
/// in order of increasing weight.
pub fn nbest(f: &Fst, k: usize) -> Vec<Path> {
    let mut found = Vec::new();
    let Some(start) = f.start() else {
        return found;
    };
    if k == 0 {
        return found;
    }
    let h = distance_to_final(f);
    if h[start].is_zero() {
        return found;
    }
    let mut seen: HashSet<(Vec<Label>, Vec<Label>)> = HashSet::new();
    // (estimate, tie counter) -> (cost so far, node, complete?)
    let mut heap = BinaryHeap::new();
    let mut counter = 0usize;
    let mut nodes: Vec<(Weight, Rc<Partial>, bool)> = Vec::new();
    let root = Rc::new(Partial {
        arc: None,
        state: start,
        prev: None,
    });
    nodes.push((Weight::one(), root, false));
    heap.push(Reverse(Key(h[start], counter)));
    let budget = 200_000 + 10_000 * k;
    let mut pops = 0;
    while let Some(Reverse(Key(_, id))) = heap.pop() {
        pops += 1;
        if pops > budget {
            break;
        }
        let (g, node, complete) = nodes[id].clone();
        if complete {
            let mut arcs = Vec::new();
            let mut states = Vec::new();
            let mut cur = Some(node);
            while let Some(p) = cur {
                states.push(p.state);
                if let Some(a) = p.arc {
                    arcs.push(a);
                }
                cur = p.prev.clone();
            }
            arcs.reverse();
            states.reverse();
            let path = Path {
                states,
                arcs,
                weight: g,
            };
            if seen.insert((path.input(), path.output())) {
                found.push(path);
                if found.len() == k {
                    break;
                }
            }
            continue;
        }
        let s = node.state;
        let fw = f.final_weight(s);
        if !fw.is_zero() {
            counter += 1;
            nodes.push((g.times(fw), node.clone(), true));
            heap.push(Reverse(Key(g.times(fw), counter)));
        }
        for a in f.arcs(s) {
            if h[a.nextstate].is_zero() {
                continue;
            }
            let ng = g.times(a.weight);
            counter += 1;
            nodes.push((
                ng,
                Rc::new(Partial {
                    arc: Some(*a),
                    state: a.nextstate,
                    prev: Some(node.clone()),
                }),
                false,
            ));
            heap.push(Reverse(Key(ng.times(h[a.nextstate]), counter)));
        }
    }
    found
}

/// Every accepting path with at most `max_len` arcs.
pub fn enumerate_paths(f: &Fst, max_len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let Some(start) = f.start() else {
        return out;
    };
    let mut states = vec![start];
    let mut arcs: Vec<Arc> = Vec::new();
    walk(f, max_len, &mut states, &mut arcs, Weight::one(), &mut out);
    out
}

fn walk(
    f: &Fst,
    max_len: usize,
    states: &mut Vec<StateId>,
    arcs: &mut Vec<Arc>,
    w: Weight,
    out: &mut Vec<Path>,
) {
    let s = *states.last().unwrap();
    let fw = f.final_weight(s);
    if !fw.is_zero() {
        out.push(Path {
            states: states.clone(),
            arcs: arcs.clone(),
            weight: w.times(fw),
        });
    }
    if arcs.len() == max_len {
        return;
    }
    for a in f.arcs(s) {
        states.push(a.nextstate);
        arcs.push(*a);
        walk(f, max_len, states, arcs, w.times(a.weight), out);
        arcs.pop();
        states.pop();
    }
}
