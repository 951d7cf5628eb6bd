#![allow(dead_code)]

pub mod kernel;

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;

use netdes::pipeline::{build_components, Built, Workspace};
use netdes::{Automaton, EventLabel, StateId, SystemConfig};

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixtures() -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

pub fn workspace_with(name: &str, edit: impl FnOnce(&mut SystemConfig)) -> Workspace {
    let d = fixture_dir(name);
    let mut cfg = SystemConfig::read_file(d.join("config.txt")).unwrap();
    edit(&mut cfg);
    Workspace::from_config(cfg, d.join("plant.fsa"), d.join("ns.fsa")).unwrap()
}

pub fn workspace(name: &str) -> Workspace {
    workspace_with(name, |_| {})
}

pub fn built(name: &str) -> Built {
    build_components(&workspace(name)).unwrap()
}

/// Deterministic step by event spelling; panics when undefined.
pub fn step(a: &Automaton, q: StateId, e: &EventLabel) -> Option<StateId> {
    let id = a.event_id(e)?;
    a.successors(q, id).next()
}

/// Explicit lockstep exploration of `x || y` over a shared alphabet,
/// independent of the library's product. Returns reachable pairs and, for
/// each, its successors.
pub struct Walk {
    pub pairs: Vec<(StateId, StateId)>,
    pub succ: Vec<Vec<usize>>,
    pub parent: Vec<Option<(usize, String)>>,
}

pub fn lockstep(x: &Automaton, y: &Automaton) -> Walk {
    assert_eq!(x.alphabet(), y.alphabet(), "lockstep needs equal alphabets");
    let mut index = HashMap::new();
    let mut pairs = vec![(x.initial(), y.initial())];
    let mut succ = vec![Vec::new()];
    let mut parent = vec![None];
    index.insert(pairs[0], 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (p, a) = pairs[i];
        let mut row = Vec::new();
        for &(e, p2) in x.transitions(p) {
            for a2 in y.successors(a, e) {
                let key = (p2, a2);
                let j = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    succ.push(Vec::new());
                    parent.push(Some((i, x.event(e).spelling())));
                    queue.push_back(pairs.len() - 1);
                    pairs.len() - 1
                });
                row.push(j);
            }
        }
        succ[i] = row;
    }
    Walk { pairs, succ, parent }
}

impl Walk {
    pub fn trace(&self, mut i: usize) -> Vec<String> {
        let mut t = Vec::new();
        while let Some((p, e)) = &self.parent[i] {
            t.push(e.clone());
            i = *p;
        }
        t.reverse();
        t
    }

    /// Pairs from which some pair satisfying `goal` is reachable.
    pub fn can_reach(&self, goal: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.pairs.len();
        let mut ok: Vec<bool> = (0..n).map(&goal).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                if !ok[i] && self.succ[i].iter().any(|&j| ok[j]) {
                    ok[i] = true;
                    changed = true;
                }
            }
        }
        ok
    }
}

/// Strings of `x || small` up to `depth` events that `x || big` cannot
/// follow, searched over triples.
pub fn inclusion_counterexample(x: &Automaton, small: &Automaton, big: &Automaton, depth: usize) -> Option<Vec<String>> {
    let mut seen = HashMap::new();
    let start = (x.initial(), small.initial(), big.initial());
    seen.insert(start, 0usize);
    let mut frontier = vec![(start, Vec::<String>::new())];
    for d in 0..depth {
        let mut next = Vec::new();
        for ((p, s, b), trace) in frontier {
            for &(e, p2) in x.transitions(p) {
                for s2 in small.successors(s, e) {
                    let mut t = trace.clone();
                    t.push(x.event(e).spelling());
                    let Some(b2) = big.successors(b, e).next() else { return Some(t) };
                    let key = (p2, s2, b2);
                    if !seen.contains_key(&key) {
                        seen.insert(key, d + 1);
                        next.push((key, t));
                    }
                }
            }
        }
        frontier = next;
    }
    None
}
