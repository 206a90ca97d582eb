//! The weighted transducer data model.

use crate::error::{Error, Result};
use crate::symbols::{Label, SymbolTable, EPSILON};
use crate::weight::Weight;

pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub nextstate: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: Weight, nextstate: StateId) -> Self {
        Arc {
            ilabel,
            olabel,
            weight,
            nextstate,
        }
    }

    pub fn eps(nextstate: StateId) -> Self {
        Arc::new(EPSILON, EPSILON, Weight::one(), nextstate)
    }
}

/// A weighted finite-state transducer over the tropical semiring.
///
/// Arcs are kept per state in insertion order. A machine without a start
/// state accepts nothing.
#[derive(Clone, Debug, Default)]
pub struct Fst {
    arcs: Vec<Vec<Arc>>,
    finals: Vec<Weight>,
    start: Option<StateId>,
    table: Option<u64>,
    /// Set once some state's arcs are out of input-label order.
    unsorted: bool,
}

impl Fst {
    /// A machine not yet tied to any symbol table.
    pub fn new() -> Self {
        Fst::default()
    }

    pub fn for_table(table: &SymbolTable) -> Self {
        Fst {
            table: Some(table.id()),
            ..Fst::default()
        }
    }

    pub fn table_id(&self) -> Option<u64> {
        self.table
    }

    pub fn set_table_id(&mut self, id: Option<u64>) {
        self.table = id;
    }

    pub fn add_state(&mut self) -> StateId {
        self.arcs.push(Vec::new());
        self.finals.push(Weight::zero());
        self.arcs.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> StateId {
        let first = self.arcs.len();
        for _ in 0..n {
            self.add_state();
        }
        first
    }

    pub fn set_start(&mut self, s: StateId) {
        assert!(s < self.arcs.len(), "start state out of range");
        self.start = Some(s);
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn set_final(&mut self, s: StateId, w: Weight) {
        self.finals[s] = w;
    }

    pub fn final_weight(&self, s: StateId) -> Weight {
        self.finals[s]
    }

    pub fn is_final(&self, s: StateId) -> bool {
        !self.finals[s].is_zero()
    }

    pub fn add_arc(&mut self, s: StateId, arc: Arc) {
        assert!(arc.nextstate < self.arcs.len(), "arc target out of range");
        if self.arcs[s].last().is_some_and(|a| a.ilabel > arc.ilabel) {
            self.unsorted = true;
        }
        self.arcs[s].push(arc);
    }

    /// True when every state's arcs are ordered by input label.
    pub fn is_input_sorted(&self) -> bool {
        !self.unsorted
    }

    /// Orders every state's arcs by input label, keeping the relative
    /// order of equal labels.
    pub fn sort_by_input(&mut self) {
        for arcs in &mut self.arcs {
            arcs.sort_by_key(|a| a.ilabel);
        }
        self.unsorted = false;
    }

    /// Arcs of `s` with input label `l`; needs an input-sorted machine.
    pub fn arcs_with_input(&self, s: StateId, l: Label) -> &[Arc] {
        debug_assert!(self.is_input_sorted());
        let arcs = &self.arcs[s];
        let lo = arcs.partition_point(|a| a.ilabel < l);
        let hi = lo + arcs[lo..].partition_point(|a| a.ilabel == l);
        &arcs[lo..hi]
    }

    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.arcs[s]
    }

    pub(crate) fn arcs_mut(&mut self, s: StateId) -> &mut Vec<Arc> {
        self.unsorted = true;
        &mut self.arcs[s]
    }

    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.arcs.len()
    }

    /// True when the machine has no start state or no reachable final state.
    pub fn is_empty(&self) -> bool {
        self.start.is_none() || connect(self).start.is_none()
    }

    /// Copies all states of `other` into `self`, returning the offset of
    /// the copied state ids. Start and finals of `other` are not touched.
    pub(crate) fn append(&mut self, other: &Fst) -> StateId {
        let offset = self.arcs.len();
        self.unsorted |= other.unsorted;
        for s in other.states() {
            self.arcs.push(
                other.arcs[s]
                    .iter()
                    .map(|a| Arc {
                        nextstate: a.nextstate + offset,
                        ..*a
                    })
                    .collect(),
            );
            self.finals.push(other.finals[s]);
        }
        offset
    }

    /// (state count, arc count).
    pub fn stats(&self) -> (usize, usize) {
        (self.num_states(), self.num_arcs())
    }

    /// True when every arc has `ilabel == olabel`.
    pub fn is_acceptor(&self) -> bool {
        self.arcs.iter().flatten().all(|a| a.ilabel == a.olabel)
    }

    /// True when the machine has no cycle reachable from the start.
    pub fn is_acyclic(&self) -> bool {
        let Some(start) = self.start else {
            return true;
        };
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.num_states()];
        let mut stack = vec![(start, 0usize)];
        mark[start] = 1;
        while let Some(&mut (s, ref mut i)) = stack.last_mut() {
            if *i < self.arcs[s].len() {
                let t = self.arcs[s][*i].nextstate;
                *i += 1;
                match mark[t] {
                    0 => {
                        mark[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                mark[s] = 2;
                stack.pop();
            }
        }
        true
    }
}

/// A start-to-final path with its accumulated weight (final weight included).
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub states: Vec<StateId>,
    pub arcs: Vec<Arc>,
    pub weight: Weight,
}

impl Path {
    pub fn input(&self) -> Vec<Label> {
        self.arcs
            .iter()
            .map(|a| a.ilabel)
            .filter(|&l| l != EPSILON)
            .collect()
    }

    pub fn output(&self) -> Vec<Label> {
        self.arcs
            .iter()
            .map(|a| a.olabel)
            .filter(|&l| l != EPSILON)
            .collect()
    }
}

/// Linear acceptor for a token sequence; unknown tokens are inserted.
pub fn compile_string<S: AsRef<str>>(tokens: &[S], table: &mut SymbolTable) -> Fst {
    let labels: Vec<Label> = tokens.iter().map(|t| table.insert(t.as_ref())).collect();
    compile_labels(&labels, table)
}

pub fn compile_labels(labels: &[Label], table: &SymbolTable) -> Fst {
    let mut f = Fst::for_table(table);
    let mut s = f.add_state();
    f.set_start(s);
    for &l in labels {
        let t = f.add_state();
        f.add_arc(s, Arc::new(l, l, Weight::one(), t));
        s = t;
    }
    f.set_final(s, Weight::one());
    f
}

/// Resolves tokens against the table without inserting.
pub fn labels_of<S: AsRef<str>>(tokens: &[S], table: &SymbolTable) -> Result<Vec<Label>> {
    tokens
        .iter()
        .map(|t| {
            table
                .get(t.as_ref())
                .ok_or_else(|| Error::UnknownSymbol(t.as_ref().to_string()))
        })
        .collect()
}

/// Removes states that are not on some start-to-final path.
pub fn connect(f: &Fst) -> Fst {
    let n = f.num_states();
    let mut out = Fst {
        table: f.table,
        unsorted: f.unsorted,
        ..Fst::default()
    };
    let Some(start) = f.start else {
        return out;
    };
    let mut access = vec![false; n];
    let mut stack = vec![start];
    access[start] = true;
    while let Some(s) = stack.pop() {
        for a in f.arcs(s) {
            if !access[a.nextstate] {
                access[a.nextstate] = true;
                stack.push(a.nextstate);
            }
        }
    }
    // Reverse adjacency in compressed form: preds of s are
    // rev[offsets[s]..offsets[s + 1]].
    let mut offsets = vec![0usize; n + 1];
    for s in f.states() {
        for a in f.arcs(s) {
            offsets[a.nextstate + 1] += 1;
        }
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut rev = vec![0; offsets[n]];
    for s in f.states() {
        for a in f.arcs(s) {
            rev[fill[a.nextstate]] = s;
            fill[a.nextstate] += 1;
        }
    }
    let mut coaccess = vec![false; n];
    let mut stack: Vec<StateId> = f.states().filter(|&s| f.is_final(s)).collect();
    for &s in &stack {
        coaccess[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &rev[offsets[s]..offsets[s + 1]] {
            if !coaccess[p] {
                coaccess[p] = true;
                stack.push(p);
            }
        }
    }
    if !coaccess[start] {
        return out;
    }
    let mut map = vec![usize::MAX; n];
    let mut kept = 0;
    for s in f.states() {
        if access[s] && coaccess[s] {
            map[s] = kept;
            kept += 1;
        }
    }
    out.arcs.reserve_exact(kept);
    out.finals.reserve_exact(kept);
    for s in f.states() {
        if map[s] == usize::MAX {
            continue;
        }
        out.finals.push(f.finals[s]);
        out.arcs.push(
            f.arcs(s)
                .iter()
                .filter(|a| map[a.nextstate] != usize::MAX)
                .map(|a| Arc {
                    nextstate: map[a.nextstate],
                    ..*a
                })
                .collect(),
        );
    }
    out.start = Some(map[start]);
    out
}
