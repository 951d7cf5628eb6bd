//! Finite-state automata with explicit, index-addressed states.
//!
//! States are dense `usize` indices. Each state carries a [`StateLabel`]
//! that is derived on demand: products remember the component tuple and
//! observers remember the member set, so composite labels never have to be
//! materialised for the (possibly large) intermediate automata.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::event::EventLabel;

pub type StateId = usize;
pub type EventId = usize;

/// Rendered identity of a state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Name(Arc<str>),
    /// A state of a synchronous product.
    Tuple(Vec<StateLabel>),
    /// A state of a subset construction. The empty set renders as `∅`.
    Set(Vec<StateLabel>),
}

impl StateLabel {
    pub fn name(s: &str) -> Self {
        StateLabel::Name(Arc::from(s))
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, StateLabel::Set(m) if m.is_empty())
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, items: &[StateLabel], open: char, close: char) -> fmt::Result {
            write!(f, "{open}")?;
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{it}")?;
            }
            write!(f, "{close}")
        }
        match self {
            StateLabel::Name(n) => f.write_str(n),
            StateLabel::Tuple(parts) => list(f, parts, '(', ')'),
            StateLabel::Set(m) if m.is_empty() => f.write_str("∅"),
            StateLabel::Set(m) => list(f, m, '{', '}'),
        }
    }
}

impl fmt::Debug for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Label storage shared between an automaton and the automata derived from it.
#[derive(Debug)]
pub(crate) enum Labels {
    Named(Vec<Arc<str>>),
    Tuple { parts: Vec<Arc<Labels>>, tuples: Vec<u32> },
    Subset { base: Arc<Labels>, members: Vec<Box<[u32]>> },
}

impl Labels {
    fn len(&self) -> usize {
        match self {
            Labels::Named(v) => v.len(),
            Labels::Tuple { parts, tuples } => tuples.len() / parts.len().max(1),
            Labels::Subset { members, .. } => members.len(),
        }
    }

    fn label(&self, q: usize) -> StateLabel {
        match self {
            Labels::Named(v) => StateLabel::Name(v[q].clone()),
            Labels::Tuple { parts, tuples } => {
                let k = parts.len();
                StateLabel::Tuple(
                    parts.iter().zip(&tuples[q * k..(q + 1) * k]).map(|(p, &c)| p.label(c as usize)).collect(),
                )
            }
            Labels::Subset { base, members } => {
                StateLabel::Set(members[q].iter().map(|&m| base.label(m as usize)).collect())
            }
        }
    }

    /// Labels for the states `order[0], order[1], ...` in that order.
    fn select(&self, order: &[usize]) -> Labels {
        match self {
            Labels::Named(v) => Labels::Named(order.iter().map(|&q| v[q].clone()).collect()),
            Labels::Tuple { parts, tuples } => {
                let k = parts.len();
                let mut out = Vec::with_capacity(order.len() * k);
                for &q in order {
                    out.extend_from_slice(&tuples[q * k..(q + 1) * k]);
                }
                Labels::Tuple { parts: parts.clone(), tuples: out }
            }
            Labels::Subset { base, members } => Labels::Subset {
                base: base.clone(),
                members: order.iter().map(|&q| members[q].clone()).collect(),
            },
        }
    }
}

/// A sorted set of states of some host automaton.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        StateSet(flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect())
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn to_flags(&self, n: usize) -> Vec<bool> {
        let mut f = vec![false; n];
        for &q in &self.0 {
            f[q] = true;
        }
        f
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.iter().all(|q| other.contains(*q))
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.0.iter().any(|q| other.contains(*q))
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

/// A possibly nondeterministic finite-state automaton.
#[derive(Clone)]
pub struct Automaton {
    name: String,
    labels: Arc<Labels>,
    alphabet: Arc<[EventLabel]>,
    /// Per state, `(event, target)` sorted and deduplicated.
    trans: Vec<Vec<(EventId, StateId)>>,
    initial: StateId,
    marked: Vec<bool>,
}

impl Automaton {
    /// Assembles an automaton from raw parts. `alphabet` must be sorted and
    /// free of duplicates; transition lists are normalised here.
    pub(crate) fn from_parts(
        name: impl Into<String>,
        labels: Labels,
        alphabet: Arc<[EventLabel]>,
        mut trans: Vec<Vec<(EventId, StateId)>>,
        initial: StateId,
        marked: Vec<bool>,
    ) -> Automaton {
        let n = labels.len();
        debug_assert_eq!(trans.len(), n);
        debug_assert_eq!(marked.len(), n);
        debug_assert!(initial < n);
        debug_assert!(alphabet.windows(2).all(|w| w[0] < w[1]));
        for row in &mut trans {
            row.sort_unstable();
            row.dedup();
            debug_assert!(row.iter().all(|&(e, t)| e < alphabet.len() && t < n));
        }
        Automaton { name: name.into(), labels: Arc::new(labels), alphabet, trans, initial, marked }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.trans.len()
    }

    pub fn label(&self, q: StateId) -> StateLabel {
        self.labels.label(q)
    }

    pub fn state_name(&self, q: StateId) -> String {
        self.labels.label(q).to_string()
    }

    /// Looks a state up by its rendered label (linear scan).
    pub fn find_state(&self, name: &str) -> Option<StateId> {
        self.states().find(|&q| self.state_name(q) == name)
    }

    pub fn alphabet(&self) -> &[EventLabel] {
        &self.alphabet
    }

    pub(crate) fn alphabet_arc(&self) -> Arc<[EventLabel]> {
        self.alphabet.clone()
    }

    pub fn alphabet_set(&self) -> BTreeSet<EventLabel> {
        self.alphabet.iter().cloned().collect()
    }

    pub fn event(&self, e: EventId) -> &EventLabel {
        &self.alphabet[e]
    }

    pub fn event_id(&self, e: &EventLabel) -> Option<EventId> {
        self.alphabet.binary_search(e).ok()
    }

    pub(crate) fn require_event(&self, e: &EventLabel) -> Result<EventId> {
        self.event_id(e)
            .ok_or_else(|| Error::invalid(format!("event `{e}` is not in the alphabet of `{}`", self.name)))
    }

    pub(crate) fn require_state(&self, q: StateId) -> Result<()> {
        if q < self.state_count() {
            Ok(())
        } else {
            Err(Error::invalid(format!("state index {q} is out of range for `{}`", self.name)))
        }
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked[q]
    }

    pub fn marked_states(&self) -> StateSet {
        StateSet::from_flags(&self.marked)
    }

    pub(crate) fn marked_flags(&self) -> &[bool] {
        &self.marked
    }

    /// Replaces the marking.
    pub fn with_marked(mut self, marked: &StateSet) -> Self {
        self.marked = marked.to_flags(self.state_count());
        self
    }

    pub fn transitions(&self, q: StateId) -> &[(EventId, StateId)] {
        &self.trans[q]
    }

    pub fn successors(&self, q: StateId, e: EventId) -> impl Iterator<Item = StateId> + '_ {
        let row = &self.trans[q];
        let lo = row.partition_point(|&(ev, _)| ev < e);
        row[lo..].iter().take_while(move |&&(ev, _)| ev == e).map(|&(_, t)| t)
    }

    pub fn is_enabled(&self, q: StateId, e: EventId) -> bool {
        self.successors(q, e).next().is_some()
    }

    /// Events with at least one transition out of `q`, ascending.
    pub fn enabled(&self, q: StateId) -> Vec<EventId> {
        let mut v: Vec<EventId> = self.trans[q].iter().map(|&(e, _)| e).collect();
        v.dedup();
        v
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn iter_transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.trans.iter().enumerate().flat_map(|(q, row)| row.iter().map(move |&(e, t)| (q, e, t)))
    }

    pub fn is_deterministic(&self) -> bool {
        self.trans.iter().all(|row| row.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// Component indices of a product state.
    pub fn tuple(&self, q: StateId) -> Option<&[u32]> {
        match &*self.labels {
            Labels::Tuple { parts, tuples } => {
                let k = parts.len();
                Some(&tuples[q * k..(q + 1) * k])
            }
            _ => None,
        }
    }

    /// Member indices of a subset-construction state.
    pub fn members(&self, q: StateId) -> Option<&[u32]> {
        match &*self.labels {
            Labels::Subset { members, .. } => Some(&members[q]),
            _ => None,
        }
    }

    pub(crate) fn labels_arc(&self) -> Arc<Labels> {
        self.labels.clone()
    }

    /// Keeps the states and transitions accepted by the filters, then restricts
    /// to the part reachable from the initial state. Returns `None` when the
    /// initial state itself is filtered out.
    pub fn filter(
        &self,
        keep_state: impl Fn(StateId) -> bool,
        keep_edge: impl Fn(StateId, EventId, StateId) -> bool,
    ) -> Option<Automaton> {
        if !keep_state(self.initial) {
            return None;
        }
        let n = self.state_count();
        let mut new_id = vec![usize::MAX; n];
        let mut order = vec![self.initial];
        new_id[self.initial] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for &(e, t) in &self.trans[q] {
                if new_id[t] == usize::MAX && keep_state(t) && keep_edge(q, e, t) {
                    new_id[t] = order.len();
                    order.push(t);
                }
            }
        }
        let trans = order
            .iter()
            .map(|&q| {
                self.trans[q]
                    .iter()
                    .filter(|&&(e, t)| new_id[t] != usize::MAX && keep_state(t) && keep_edge(q, e, t))
                    .map(|&(e, t)| (e, new_id[t]))
                    .collect()
            })
            .collect();
        let marked = order.iter().map(|&q| self.marked[q]).collect();
        Some(Automaton::from_parts(
            self.name.clone(),
            self.labels.select(&order),
            self.alphabet.clone(),
            trans,
            0,
            marked,
        ))
    }

    /// Renames events through `f`; events mapped to the same label merge.
    pub fn relabel_events(&self, f: impl Fn(&EventLabel) -> EventLabel) -> Automaton {
        let mapped: Vec<EventLabel> = self.alphabet.iter().map(&f).collect();
        let alphabet: Arc<[EventLabel]> = mapped.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let idx: Vec<EventId> = mapped.iter().map(|e| alphabet.binary_search(e).unwrap()).collect();
        let trans = self.trans.iter().map(|row| row.iter().map(|&(e, t)| (idx[e], t)).collect()).collect();
        Automaton {
            name: self.name.clone(),
            labels: self.labels.clone(),
            alphabet,
            trans: normalise(trans),
            initial: self.initial,
            marked: self.marked.clone(),
        }
    }

    /// Adds events to the alphabet (no transitions are added).
    pub fn extend_alphabet(&self, extra: impl IntoIterator<Item = EventLabel>) -> Automaton {
        let mut set = self.alphabet_set();
        set.extend(extra);
        let alphabet: Arc<[EventLabel]> = set.into_iter().collect();
        let idx: Vec<EventId> = self.alphabet.iter().map(|e| alphabet.binary_search(e).unwrap()).collect();
        let trans = self.trans.iter().map(|row| row.iter().map(|&(e, t)| (idx[e], t)).collect()).collect();
        Automaton {
            name: self.name.clone(),
            labels: self.labels.clone(),
            alphabet,
            trans: normalise(trans),
            initial: self.initial,
            marked: self.marked.clone(),
        }
    }

    /// Returns a copy with extra transitions added.
    pub(crate) fn with_extra_transitions(&self, extra: impl IntoIterator<Item = (StateId, EventId, StateId)>) -> Automaton {
        let mut a = self.clone();
        for (q, e, t) in extra {
            a.trans[q].push((e, t));
        }
        a.trans = normalise(std::mem::take(&mut a.trans));
        a
    }

    /// Language membership: `true` iff some run from the initial state reads
    /// `word` (and, with `require_marked`, ends in a marked state).
    pub fn accepts(&self, word: &[EventLabel], require_marked: bool) -> Result<bool> {
        let ids = word.iter().map(|e| self.require_event(e)).collect::<Result<Vec<_>>>()?;
        let mut current: BTreeSet<StateId> = BTreeSet::from([self.initial]);
        for e in ids {
            current = current.iter().flat_map(|&q| self.successors(q, e)).collect();
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(!require_marked || current.iter().any(|&q| self.marked[q]))
    }
}

fn normalise(mut trans: Vec<Vec<(EventId, StateId)>>) -> Vec<Vec<(EventId, StateId)>> {
    for row in &mut trans {
        row.sort_unstable();
        row.dedup();
    }
    trans
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automaton")
            .field("name", &self.name)
            .field("states", &self.state_count())
            .field("events", &self.alphabet.len())
            .field("transitions", &self.transition_count())
            .finish()
    }
}

/// Incremental construction of an automaton with named states.
///
/// States are numbered in order of first mention.
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    name: String,
    alphabet: BTreeSet<EventLabel>,
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, StateId>,
    edges: Vec<(StateId, EventLabel, StateId)>,
    initial: Option<StateId>,
    marked: Vec<StateId>,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonBuilder { name: name.into(), ..Default::default() }
    }

    pub fn event(&mut self, e: EventLabel) -> &mut Self {
        self.alphabet.insert(e);
        self
    }

    pub fn events(&mut self, es: impl IntoIterator<Item = EventLabel>) -> &mut Self {
        self.alphabet.extend(es);
        self
    }

    /// Returns the index of `name`, creating the state if needed.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let key: Arc<str> = Arc::from(name);
        let q = self.names.len();
        self.names.push(key.clone());
        self.index.insert(key, q);
        q
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let q = self.state(name);
        self.initial = Some(q);
        self
    }

    pub fn mark(&mut self, name: &str) -> &mut Self {
        let q = self.state(name);
        self.marked.push(q);
        self
    }

    pub fn transition(&mut self, from: &str, e: EventLabel, to: &str) -> &mut Self {
        let s = self.state(from);
        let t = self.state(to);
        self.edges.push((s, e, t));
        self
    }

    pub fn build(&self) -> Result<Automaton> {
        let initial = self
            .initial
            .ok_or_else(|| Error::invalid(format!("automaton `{}` has no initial state", self.name)))?;
        let alphabet: Arc<[EventLabel]> = self.alphabet.iter().cloned().collect();
        let mut trans = vec![Vec::new(); self.names.len()];
        for (s, e, t) in &self.edges {
            let ei = alphabet.binary_search(e).map_err(|_| {
                Error::invalid(format!("event `{e}` used in `{}` but not declared in its alphabet", self.name))
            })?;
            trans[*s].push((ei, *t));
        }
        let mut marked = vec![false; self.names.len()];
        for &q in &self.marked {
            marked[q] = true;
        }
        Ok(Automaton::from_parts(
            self.name.clone(),
            Labels::Named(self.names.clone()),
            alphabet,
            trans,
            initial,
            marked,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> EventLabel {
        EventLabel::plain(s)
    }

    fn fork() -> Automaton {
        let mut b = AutomatonBuilder::new("fork");
        b.events([ev("a"), ev("b")]);
        b.initial("0").transition("0", ev("a"), "1").transition("0", ev("a"), "2").transition("2", ev("b"), "3");
        b.mark("3");
        b.build().unwrap()
    }

    #[test]
    fn accepts_empty_word() {
        assert!(fork().accepts(&[], false).unwrap());
    }

    #[test]
    fn accepts_nondeterministic_branch() {
        let a = fork();
        assert!(!a.is_deterministic());
        assert!(a.accepts(&[ev("a"), ev("b")], false).unwrap());
        assert!(a.accepts(&[ev("a"), ev("b")], true).unwrap());
        assert!(!a.accepts(&[ev("a")], true).unwrap());
        assert!(!a.accepts(&[ev("b")], false).unwrap());
    }

    #[test]
    fn accepts_unknown_event_is_error() {
        assert!(fork().accepts(&[ev("z")], false).is_err());
    }

    #[test]
    fn undeclared_event_rejected() {
        let mut b = AutomatonBuilder::new("x");
        b.initial("0").transition("0", ev("a"), "0");
        assert!(b.build().is_err());
    }

    #[test]
    fn filter_keeps_reachable_part() {
        let a = fork();
        let f = a.filter(|q| a.state_name(q) != "2", |_, _, _| true).unwrap();
        assert_eq!(f.state_count(), 2);
        assert_eq!(f.transition_count(), 1);
        assert!(a.filter(|q| q != a.initial(), |_, _, _| true).is_none());
    }

    #[test]
    fn label_rendering() {
        let l = StateLabel::Tuple(vec![StateLabel::name("a"), StateLabel::Set(vec![])]);
        assert_eq!(l.to_string(), "(a,∅)");
        let s = StateLabel::Set(vec![StateLabel::name("x"), StateLabel::name("y")]);
        assert_eq!(s.to_string(), "{x,y}");
    }
}
