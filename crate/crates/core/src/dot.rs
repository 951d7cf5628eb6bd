//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::automaton::Automaton;
use crate::error::{Error, Result};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// DOT rendering: the initial state is double-bordered, marked states are
/// shaded and the empty observer state is drawn in red. Parallel edges are
/// merged into one edge with a comma-separated label.
pub fn to_dot(a: &Automaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(a.name()));
    s.push_str("  rankdir=LR;\n  node [shape=ellipse, fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n");
    for q in a.states() {
        let label = a.label(q);
        let mut attrs = vec![format!("label={}", quote(&label.to_string()))];
        if q == a.initial() {
            attrs.push("peripheries=2".into());
        }
        if label.is_empty_set() {
            attrs.push("style=filled, fillcolor=\"#f4a6a6\", color=red".into());
        } else if a.is_marked(q) {
            attrs.push("style=filled, fillcolor=\"#d0d0d0\"".into());
        }
        let _ = writeln!(s, "  n{q} [{}];", attrs.join(", "));
    }
    for q in a.states() {
        let mut merged: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for &(e, t) in a.transitions(q) {
            merged.entry(t).or_default().push(a.event(e).spelling());
        }
        for (t, evs) in merged {
            let _ = writeln!(s, "  n{q} -> n{t} [label={}];", quote(&evs.join(", ")));
        }
    }
    s.push_str("}\n");
    s
}

pub fn write_dot(a: &Automaton, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_dot(a)).map_err(|e| Error::io(path, e))
}
