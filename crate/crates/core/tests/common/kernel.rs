//! Random small automata and the kernel properties checked on them.

use std::collections::{BTreeSet, HashSet};

use netdes::automaton::AutomatonBuilder;
use netdes::{ops, text, Automaton, EventLabel};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

const EVENTS: [&str; 3] = ["e0", "e1", "e2"];

#[derive(Clone, Debug)]
pub struct Spec {
    states: usize,
    events: usize,
    trans: Vec<(usize, usize, usize)>,
    marked: Vec<bool>,
}

/// At most six states, three events and fourteen transitions.
pub fn spec() -> impl Strategy<Value = Spec> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(n, k)| {
        (prop::collection::vec((0..n, 0..k, 0..n), 0..=14), prop::collection::vec(any::<bool>(), n))
            .prop_map(move |(trans, marked)| Spec { states: n, events: k, trans, marked })
    })
}

/// `offset` rotates event names so that different automata share only
/// some of their events.
pub fn build(s: &Spec, name: &str, offset: usize) -> Automaton {
    let mut b = AutomatonBuilder::new(name);
    b.events(EVENTS[..s.events].iter().map(|e| EventLabel::plain(e)));
    b.initial("s0");
    for q in 0..s.states {
        b.state(&format!("s{q}"));
        if s.marked[q] {
            b.mark(&format!("s{q}"));
        }
    }
    for &(p, e, t) in &s.trans {
        b.transition(&format!("s{p}"), EventLabel::plain(EVENTS[(e + offset) % s.events]), &format!("s{t}"));
    }
    b.build().unwrap()
}

fn observed(a: &Automaton, mask: u8) -> BTreeSet<EventLabel> {
    a.alphabet().iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| e.clone()).collect()
}

fn words(alpha: &[EventLabel], len: usize) -> Vec<Vec<EventLabel>> {
    let mut all = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for e in alpha {
                let mut v: Vec<EventLabel> = w.clone();
                v.push(e.clone());
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Whether some string of `a` projects onto `t`, by explicit search over
/// (state, position) with unobserved moves in between.
fn has_preimage(a: &Automaton, observed: &BTreeSet<EventLabel>, t: &[EventLabel]) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(a.initial(), 0usize)];
    while let Some((q, i)) = stack.pop() {
        if !seen.insert((q, i)) {
            continue;
        }
        if i == t.len() {
            return true;
        }
        for &(e, r) in a.transitions(q) {
            let ev = a.event(e);
            if !observed.contains(ev) {
                stack.push((r, i));
            } else if *ev == t[i] {
                stack.push((r, i + 1));
            }
        }
    }
    false
}

pub fn observer_is_deterministic(s: &Spec, mask: u8) -> Result<(), TestCaseError> {
    let a = build(s, "A", 0);
    let obs = ops::subset_construction(&a, &observed(&a, mask)).unwrap();
    prop_assert!(obs.is_deterministic());
    Ok(())
}

pub fn observer_language_is_the_projection(s: &Spec, mask: u8) -> Result<(), TestCaseError> {
    let a = build(s, "A", 0);
    let observed = observed(&a, mask);
    let obs = ops::subset_construction(&a, &observed).unwrap();
    for w in words(a.alphabet(), 6) {
        if a.accepts(&w, false).unwrap() {
            let p: Vec<EventLabel> = w.iter().filter(|e| observed.contains(*e)).cloned().collect();
            prop_assert!(obs.accepts(&p, false).unwrap(), "projection of {:?} missing", w);
        }
    }
    let alpha: Vec<EventLabel> = observed.iter().cloned().collect();
    for t in words(&alpha, 6) {
        prop_assert_eq!(obs.accepts(&t, false).unwrap(), has_preimage(&a, &observed, &t), "string {:?}", t);
    }
    Ok(())
}

pub fn product_commutes(x: &Spec, y: &Spec) -> Result<(), TestCaseError> {
    let a = build(x, "A", 0);
    let b = build(y, "B", 1);
    prop_assert!(ops::isomorphic(&ops::product(&[&a, &b]), &ops::product(&[&b, &a])));
    Ok(())
}

pub fn product_associates(x: &Spec, y: &Spec, z: &Spec) -> Result<(), TestCaseError> {
    let a = build(x, "A", 0);
    let b = build(y, "B", 1);
    let c = build(z, "C", 2);
    let left = ops::product(&[&ops::product(&[&a, &b]), &c]);
    let right = ops::product(&[&a, &ops::product(&[&b, &c])]);
    let flat = ops::product(&[&a, &b, &c]);
    prop_assert!(ops::isomorphic(&left, &right));
    prop_assert!(ops::isomorphic(&left, &flat));
    Ok(())
}

pub fn text_round_trip(s: &Spec) -> Result<(), TestCaseError> {
    let a = build(s, "A", 0);
    let back = text::parse(&text::to_text(&a)).unwrap();
    prop_assert!(ops::isomorphic(&a, &back));
    prop_assert_eq!(text::to_text(&back), text::to_text(&a));
    Ok(())
}
