//! Composition, observer construction and reachability analyses.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::automaton::{Automaton, EventId, Labels, StateId, StateSet};
use crate::error::Result;
use crate::event::EventLabel;

fn observed_mask(a: &Automaton, observed: &BTreeSet<EventLabel>) -> Result<Vec<bool>> {
    for e in observed {
        a.require_event(e)?;
    }
    Ok(a.alphabet().iter().map(|e| observed.contains(e)).collect())
}

/// Closure of a seed set under unobserved transitions. `stamp`/`epoch`
/// implement an allocation-free visited set.
struct Closure<'a> {
    a: &'a Automaton,
    observed: &'a [bool],
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<StateId>,
}

impl<'a> Closure<'a> {
    fn new(a: &'a Automaton, observed: &'a [bool]) -> Self {
        Closure { a, observed, stamp: vec![0; a.state_count()], epoch: 0, stack: Vec::new() }
    }

    fn close(&mut self, seed: impl IntoIterator<Item = StateId>) -> Box<[u32]> {
        self.epoch += 1;
        let mut out = Vec::new();
        for q in seed {
            if self.stamp[q] != self.epoch {
                self.stamp[q] = self.epoch;
                self.stack.push(q);
            }
        }
        while let Some(q) = self.stack.pop() {
            out.push(q as u32);
            for &(e, t) in self.a.transitions(q) {
                if !self.observed[e] && self.stamp[t] != self.epoch {
                    self.stamp[t] = self.epoch;
                    self.stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out.into_boxed_slice()
    }
}

/// States reachable from `q` along strings of unobserved events.
pub fn unobservable_reach(a: &Automaton, q: StateId, observed: &BTreeSet<EventLabel>) -> Result<StateSet> {
    a.require_state(q)?;
    let mask = observed_mask(a, observed)?;
    let mut c = Closure::new(a, &mask);
    Ok(c.close([q]).iter().map(|&m| m as usize).collect())
}

/// Subset construction (observer) over the full alphabet of `a`.
///
/// Unobserved events self-loop at every state; observed events move to the
/// unobservable reach of the successor set. Transitions into the empty set
/// are omitted.
pub fn subset_construction(a: &Automaton, observed: &BTreeSet<EventLabel>) -> Result<Automaton> {
    observer(a, observed, None)
}

/// Subset construction with optional materialisation of the empty state.
///
/// With `empty = Some(loops)`, every observed event with no successor leads to
/// a distinguished `∅` state whose only transitions are self-loops on `loops`.
pub(crate) fn observer(
    a: &Automaton,
    observed: &BTreeSet<EventLabel>,
    empty: Option<&[EventLabel]>,
) -> Result<Automaton> {
    let mask = observed_mask(a, observed)?;
    let empty_loops: Option<Vec<EventId>> = match empty {
        Some(loops) => Some(loops.iter().map(|e| a.require_event(e)).collect::<Result<_>>()?),
        None => None,
    };
    let nev = a.alphabet().len();
    let mut closure = Closure::new(a, &mask);
    let mut index: HashMap<Box<[u32]>, StateId> = HashMap::new();
    let mut members: Vec<Box<[u32]>> = Vec::new();
    let mut trans: Vec<Vec<(EventId, StateId)>> = Vec::new();

    let init = closure.close([a.initial()]);
    index.insert(init.clone(), 0);
    members.push(init);
    trans.push(Vec::new());
    let mut empty_id: Option<StateId> = None;

    let mut buckets: Vec<Vec<StateId>> = vec![Vec::new(); nev];
    let mut head = 0;
    while head < members.len() {
        let x = head;
        head += 1;
        if members[x].is_empty() {
            continue;
        }
        for b in buckets.iter_mut() {
            b.clear();
        }
        for &m in members[x].iter() {
            for &(e, t) in a.transitions(m as usize) {
                if mask[e] {
                    buckets[e].push(t);
                }
            }
        }
        let mut row = Vec::new();
        for e in 0..nev {
            if !mask[e] {
                row.push((e, x));
                continue;
            }
            if buckets[e].is_empty() {
                if empty_loops.is_some() {
                    let id = *empty_id.get_or_insert_with(|| {
                        members.push(Box::new([]));
                        trans.push(Vec::new());
                        members.len() - 1
                    });
                    row.push((e, id));
                }
                continue;
            }
            let set = closure.close(buckets[e].iter().copied());
            let id = match index.get(&set) {
                Some(&id) => id,
                None => {
                    let id = members.len();
                    index.insert(set.clone(), id);
                    members.push(set);
                    trans.push(Vec::new());
                    id
                }
            };
            row.push((e, id));
        }
        trans[x] = row;
    }
    if let (Some(id), Some(loops)) = (empty_id, &empty_loops) {
        trans[id] = loops.iter().map(|&e| (e, id)).collect();
    }
    let n = members.len();
    Ok(Automaton::from_parts(
        format!("P({})", a.name()),
        Labels::Subset { base: a.labels_arc(), members },
        a.alphabet_arc(),
        trans,
        0,
        vec![false; n],
    ))
}

/// Synchronous product of two automata.
pub fn synchronous_product(a: &Automaton, b: &Automaton) -> Automaton {
    product(&[a, b])
}

/// Synchronous product of any number of automata, reachable part only.
///
/// Shared events synchronise across every component whose alphabet contains
/// them; private events interleave. Nondeterministic components contribute
/// every combination of successors. Product states are marked iff every
/// component is marked.
pub fn product(components: &[&Automaton]) -> Automaton {
    assert!(!components.is_empty(), "product of zero automata");
    let k = components.len();
    let union: BTreeSet<EventLabel> = components.iter().flat_map(|c| c.alphabet().iter().cloned()).collect();
    let alphabet: Arc<[EventLabel]> = union.into_iter().collect();
    // local[i][e] = event id of union event e in component i
    let local: Vec<Vec<Option<EventId>>> =
        components.iter().map(|c| alphabet.iter().map(|e| c.event_id(e)).collect()).collect();

    let mut index: HashMap<Box<[u32]>, StateId> = HashMap::new();
    let mut tuples: Vec<u32> = Vec::new();
    let mut trans: Vec<Vec<(EventId, StateId)>> = Vec::new();

    let init: Box<[u32]> = components.iter().map(|c| c.initial() as u32).collect();
    tuples.extend_from_slice(&init);
    index.insert(init, 0);
    trans.push(Vec::new());

    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut head = 0;
    let n_events = alphabet.len();
    while head < trans.len() {
        let p = head;
        head += 1;
        let cur: Vec<u32> = tuples[p * k..(p + 1) * k].to_vec();
        let mut row = Vec::new();
        'events: for e in 0..n_events {
            for i in 0..k {
                succ[i].clear();
                match local[i][e] {
                    Some(le) => {
                        succ[i].extend(components[i].successors(cur[i] as usize, le).map(|t| t as u32));
                        if succ[i].is_empty() {
                            continue 'events;
                        }
                    }
                    None => succ[i].push(cur[i]),
                }
            }
            // odometer over the successor combinations
            let mut pick = vec![0usize; k];
            loop {
                let next: Box<[u32]> = (0..k).map(|i| succ[i][pick[i]]).collect();
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = trans.len();
                        tuples.extend_from_slice(&next);
                        index.insert(next, id);
                        trans.push(Vec::new());
                        id
                    }
                };
                row.push((e, id));
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    pick[i] += 1;
                    if pick[i] < succ[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
        trans[p] = row;
    }
    let n = trans.len();
    let marked = (0..n)
        .map(|p| (0..k).all(|i| components[i].is_marked(tuples[p * k + i] as usize)))
        .collect();
    let name = components.iter().map(|c| c.name()).collect::<Vec<_>>().join("||");
    Automaton::from_parts(
        name,
        Labels::Tuple { parts: components.iter().map(|c| c.labels_arc()).collect(), tuples },
        alphabet,
        trans,
        0,
        marked,
    )
}

/// States reachable from the initial state.
pub fn reachable(a: &Automaton) -> StateSet {
    StateSet::from_flags(&forward_flags(a))
}

pub(crate) fn forward_flags(a: &Automaton) -> Vec<bool> {
    let mut seen = vec![false; a.state_count()];
    let mut queue = VecDeque::from([a.initial()]);
    seen[a.initial()] = true;
    while let Some(q) = queue.pop_front() {
        for &(_, t) in a.transitions(q) {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// States from which some state flagged in `targets` is reachable.
pub(crate) fn backward_flags(a: &Automaton, targets: &[bool]) -> Vec<bool> {
    let n = a.state_count();
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (q, _, t) in a.iter_transitions() {
        pred[t].push(q);
    }
    let mut seen = targets.to_vec();
    let mut stack: Vec<StateId> = (0..n).filter(|&q| targets[q]).collect();
    while let Some(q) = stack.pop() {
        for &p in &pred[q] {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    seen
}

/// States that can reach a marked state.
pub fn coreachable(a: &Automaton) -> StateSet {
    StateSet::from_flags(&backward_flags(a, a.marked_flags()))
}

/// Restriction to states that are both reachable and coreachable. Returns
/// `None` when the initial state is not coreachable.
pub fn trim(a: &Automaton) -> Option<Automaton> {
    let co = backward_flags(a, a.marked_flags());
    a.filter(|q| co[q], |_, _, _| true)
}

/// Every reachable state can reach a marked state.
pub fn is_nonblocking(a: &Automaton) -> bool {
    let fwd = forward_flags(a);
    let co = backward_flags(a, a.marked_flags());
    fwd.iter().zip(&co).all(|(f, c)| !*f || *c)
}

/// Structural isomorphism (alphabets must be equal; state labels ignored).
///
/// Backtracking search intended for small automata such as test fixtures.
pub fn isomorphic(a: &Automaton, b: &Automaton) -> bool {
    if a.alphabet() != b.alphabet()
        || a.state_count() != b.state_count()
        || a.transition_count() != b.transition_count()
    {
        return false;
    }
    let n = a.state_count();
    let sig = |x: &Automaton, q: StateId| -> (bool, Vec<EventId>, usize) {
        let row = x.transitions(q);
        (x.is_marked(q), row.iter().map(|&(e, _)| e).collect(), row.len())
    };
    let sig_a: Vec<_> = (0..n).map(|q| sig(a, q)).collect();
    let sig_b: Vec<_> = (0..n).map(|q| sig(b, q)).collect();
    let mut fwd = vec![usize::MAX; n];
    let mut bwd = vec![usize::MAX; n];

    // Candidate order: states of `a` in BFS order so neighbours get fixed early.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in std::iter::once(a.initial()).chain(0..n) {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &(_, t) in a.transitions(q) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }

    fn consistent(a: &Automaton, b: &Automaton, fwd: &[usize], q: StateId) -> bool {
        let p = fwd[q];
        // every fully mapped edge out of q must exist in b, and into q likewise
        for &(e, t) in a.transitions(q) {
            if fwd[t] != usize::MAX && !b.successors(p, e).any(|u| u == fwd[t]) {
                return false;
            }
        }
        for (s, e, t) in a.iter_transitions() {
            if t == q && fwd[s] != usize::MAX && !b.successors(fwd[s], e).any(|u| u == p) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        i: usize,
        order: &[StateId],
        a: &Automaton,
        b: &Automaton,
        sig_a: &[(bool, Vec<EventId>, usize)],
        sig_b: &[(bool, Vec<EventId>, usize)],
        fwd: &mut Vec<usize>,
        bwd: &mut Vec<usize>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let q = order[i];
        let candidates: Vec<StateId> = if i == 0 {
            vec![b.initial()]
        } else {
            (0..b.state_count()).filter(|&p| bwd[p] == usize::MAX && sig_b[p] == sig_a[q]).collect()
        };
        for p in candidates {
            if sig_b[p] != sig_a[q] || bwd[p] != usize::MAX {
                continue;
            }
            fwd[q] = p;
            bwd[p] = q;
            if consistent(a, b, fwd, q) && search(i + 1, order, a, b, sig_a, sig_b, fwd, bwd) {
                return true;
            }
            fwd[q] = usize::MAX;
            bwd[p] = usize::MAX;
        }
        false
    }

    search(0, &order, a, b, &sig_a, &sig_b, &mut fwd, &mut bwd)
}
