//! Line-oriented text format for automata.
//!
//! ```text
//! .automaton NAME
//! .alphabet  a1:plain b1#:compromised v1:command tick stop
//! .states    S0 S1 S5
//! .initial   S0
//! .marked    S5
//! .trans     S0 a1 S1
//! ```
//!
//! A token starting with `#` begins a comment (so `b1#` is an event, while
//! `# note` is a comment). Directives other than `.automaton` and `.initial`
//! may repeat. `.states` is optional; when present, every state mentioned
//! elsewhere must be declared by it.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::error::{Error, Result};
use crate::event::EventLabel;

pub fn to_text(a: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ".automaton {}", token_name(a.name()));
    let decls: Vec<String> = a.alphabet().iter().map(EventLabel::declaration).collect();
    for chunk in decls.chunks(16) {
        let _ = writeln!(out, ".alphabet {}", chunk.join(" "));
    }
    let names: Vec<String> = a.states().map(|q| a.state_name(q)).collect();
    for chunk in names.chunks(16) {
        let _ = writeln!(out, ".states {}", chunk.join(" "));
    }
    let _ = writeln!(out, ".initial {}", names[a.initial()]);
    let marked: Vec<&str> = a.marked_states().iter().map(|q| names[q].as_str()).collect();
    for chunk in marked.chunks(16) {
        let _ = writeln!(out, ".marked {}", chunk.join(" "));
    }
    for (q, e, t) in a.iter_transitions() {
        let _ = writeln!(out, ".trans {} {} {}", names[q], a.event(e).spelling(), names[t]);
    }
    out
}

fn token_name(name: &str) -> String {
    if name.is_empty() {
        "unnamed".to_string()
    } else {
        name.split_whitespace().collect::<Vec<_>>().join("_")
    }
}

fn tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().take_while(|t| !t.starts_with('#')).collect()
}

pub fn parse(text: &str) -> Result<Automaton> {
    let mut name: Option<String> = None;
    let mut alphabet: BTreeSet<EventLabel> = BTreeSet::new();
    let mut spelled: HashMap<String, EventLabel> = HashMap::new();
    let mut declared: Option<Vec<String>> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut marked: Vec<(usize, String)> = Vec::new();
    let mut trans: Vec<(usize, String, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some((&directive, args)) = toks.split_first() else { continue };
        match directive {
            ".automaton" => {
                if name.is_some() {
                    return Err(Error::parse(line, "duplicate .automaton directive"));
                }
                if args.len() != 1 {
                    return Err(Error::parse(line, ".automaton takes exactly one name"));
                }
                name = Some(args[0].to_string());
            }
            ".alphabet" => {
                for t in args {
                    let e = EventLabel::parse_declaration(t).map_err(|e| Error::parse(line, e.to_string()))?;
                    if let Some(prev) = spelled.get(&e.spelling()) {
                        if *prev != e {
                            return Err(Error::parse(line, format!("spelling `{}` declared twice", e.spelling())));
                        }
                    }
                    spelled.insert(e.spelling(), e.clone());
                    alphabet.insert(e);
                }
            }
            ".states" => declared.get_or_insert_with(Vec::new).extend(args.iter().map(|s| s.to_string())),
            ".initial" => {
                if initial.is_some() {
                    return Err(Error::parse(line, "duplicate .initial directive"));
                }
                if args.len() != 1 {
                    return Err(Error::parse(line, ".initial takes exactly one state"));
                }
                initial = Some((line, args[0].to_string()));
            }
            ".marked" => marked.extend(args.iter().map(|s| (line, s.to_string()))),
            ".trans" => {
                if args.len() != 3 {
                    return Err(Error::parse(line, ".trans takes SOURCE EVENT TARGET"));
                }
                trans.push((line, args[0].to_string(), args[1].to_string(), args[2].to_string()));
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or_else(|| Error::parse(1, "missing .automaton directive"))?;
    let (init_line, init) = initial.ok_or_else(|| Error::parse(1, "missing .initial directive"))?;
    let mut b = AutomatonBuilder::new(name);
    b.events(alphabet);
    let check = |line: usize, s: &str, b: &AutomatonBuilder| -> Result<()> {
        if declared.is_some() && !b.has_state(s) {
            Err(Error::parse(line, format!("state `{s}` is not declared in .states")))
        } else {
            Ok(())
        }
    };
    if let Some(states) = &declared {
        for s in states {
            b.state(s);
        }
    }
    check(init_line, &init, &b)?;
    b.initial(&init);
    for (line, s) in &marked {
        check(*line, s, &b)?;
        b.mark(s);
    }
    for (line, s, e, t) in &trans {
        check(*line, s, &b)?;
        check(*line, t, &b)?;
        let ev = spelled
            .get(e)
            .ok_or_else(|| Error::parse(*line, format!("event `{e}` is not declared in .alphabet")))?;
        b.transition(s, ev.clone(), t);
    }
    b.build()
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Automaton> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text)
}

pub fn write_file(a: &Automaton, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_text(a)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::isomorphic;

    const SAMPLE: &str = "\
# a comment line
.automaton sample
.alphabet  a1:plain b1#:compromised v1:command v1_in:command-in tick stop   # trailing comment
.initial   S0
.marked    S1
.trans     S0 a1 S1
.trans     S1 b1# S0
.trans     S1 v1_in S1
.trans     S0 tick S0
";

    #[test]
    fn parses_sample() {
        let a = parse(SAMPLE).unwrap();
        assert_eq!(a.name(), "sample");
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.alphabet().len(), 6);
        assert_eq!(a.transition_count(), 4);
        assert!(a.is_marked(a.find_state("S1").unwrap()));
    }

    #[test]
    fn round_trip() {
        let a = parse(SAMPLE).unwrap();
        let b = parse(&to_text(&a)).unwrap();
        assert!(isomorphic(&a, &b));
        assert_eq!(to_text(&a), to_text(&b));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse(".automaton x\n.initial S0\n.trans S0 zz S0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse(".automaton x\n.states S0\n.initial S0\n.alphabet a:plain\n.trans S0 a S9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        assert!(parse(".automaton x\n.bogus\n").is_err());
        assert!(parse(".alphabet a:plain\n").is_err());
    }

    #[test]
    fn empty_transition_list_gives_single_state() {
        let a = parse(".automaton g\n.alphabet a:plain\n.initial 0\n").unwrap();
        assert_eq!(a.state_count(), 1);
        assert_eq!(a.transition_count(), 0);
    }
}
