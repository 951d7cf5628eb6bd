//! Sensor-attack constraints `AC` and validation of attack automata.

use std::collections::BTreeSet;
use std::fmt;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::event::{EventLabel, Role};

/// A partial-observation control constraint `(controllable, observable)`
/// over a fixed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlConstraint {
    pub alphabet: BTreeSet<EventLabel>,
    pub controllable: BTreeSet<EventLabel>,
    pub observable: BTreeSet<EventLabel>,
}

impl ControlConstraint {
    pub fn uncontrollable(&self) -> BTreeSet<EventLabel> {
        self.alphabet.difference(&self.controllable).cloned().collect()
    }

    pub fn unobservable(&self) -> BTreeSet<EventLabel> {
        self.alphabet.difference(&self.observable).cloned().collect()
    }
}

/// The attack-control constraint: the attacker disables only
/// `Σ_s,a^# ∪ {stop}` and observes `Σ_o,a ∪ (Σ_o,a−Σ_s,a)^in ∪ Σ_s,a^# ∪ {tick, stop}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackControlConstraint(pub ControlConstraint);

impl AttackControlConstraint {
    pub fn new(cfg: &SystemConfig) -> Self {
        let mut controllable = BTreeSet::from([EventLabel::stop()]);
        let mut observable = BTreeSet::from([EventLabel::tick(), EventLabel::stop()]);
        for e in cfg.events.iter().filter(|e| e.attacker_observable) {
            observable.insert(EventLabel::plain(&e.name));
            if e.compromised {
                controllable.insert(EventLabel::compromised(&e.name));
                observable.insert(EventLabel::compromised(&e.name));
            } else {
                observable.insert(EventLabel::entry(&e.name));
            }
        }
        AttackControlConstraint(ControlConstraint { alphabet: cfg.full_alphabet(), controllable, observable })
    }

    pub fn constraint(&self) -> &ControlConstraint {
        &self.0
    }
}

/// One failed structural condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub state: String,
    pub event: EventLabel,
    pub detail: String,
}

/// Outcome of a constraint check. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintReport {
    pub subject: String,
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Tab-separated `rule state event` lines.
    pub fn machine_lines(&self) -> Vec<String> {
        self.violations.iter().map(|v| format!("{}\t{}\t{}", v.rule, v.state, v.event)).collect()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self.to_string()))
        }
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "{}: valid", self.subject);
        }
        writeln!(f, "{}: {} violation(s)", self.subject, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} at state {} on {}: {}", v.rule, v.state, v.event, v.detail)?;
        }
        Ok(())
    }
}

/// Checks that every state defines every uncontrollable event and that
/// unobservable events only self-loop.
pub(crate) fn check_control_constraint(
    a: &Automaton,
    c: &ControlConstraint,
    controllability_rule: &'static str,
    observability_rule: &'static str,
) -> Result<ConstraintReport> {
    if a.alphabet_set() != c.alphabet {
        let missing: Vec<String> = c.alphabet.iter().filter(|e| a.event_id(e).is_none()).map(|e| e.spelling()).collect();
        let extra: Vec<String> =
            a.alphabet().iter().filter(|e| !c.alphabet.contains(*e)).map(|e| e.spelling()).collect();
        return Err(Error::Validation(format!(
            "alphabet of `{}` does not match the constraint alphabet (missing: [{}], extra: [{}])",
            a.name(),
            missing.join(" "),
            extra.join(" ")
        )));
    }
    let unc: Vec<usize> = c.uncontrollable().iter().map(|e| a.event_id(e).unwrap()).collect();
    let unobs: Vec<bool> = a.alphabet().iter().map(|e| !c.observable.contains(e)).collect();
    let mut report = ConstraintReport { subject: a.name().to_string(), violations: Vec::new() };
    for q in a.states() {
        for &e in &unc {
            if !a.is_enabled(q, e) {
                report.violations.push(Violation {
                    rule: controllability_rule,
                    state: a.state_name(q),
                    event: a.event(e).clone(),
                    detail: "uncontrollable event is not defined".into(),
                });
            }
        }
        for &(e, t) in a.transitions(q) {
            if unobs[e] && t != q {
                report.violations.push(Violation {
                    rule: observability_rule,
                    state: a.state_name(q),
                    event: a.event(e).clone(),
                    detail: format!("unobservable event moves to {}", a.state_name(t)),
                });
            }
        }
    }
    Ok(report)
}

/// SA-controllability and SA-observability of an attack automaton.
pub fn validate_attack(a: &Automaton, c: &AttackControlConstraint) -> Result<ConstraintReport> {
    check_control_constraint(a, &c.0, "SA-controllability", "SA-observability")
}

fn q(n: u64) -> String {
    format!("q{n}")
}

/// The sensor-attack constraints automaton `AC`.
///
/// States: `init`, `q0 … qU`, `qo_σ` for observed uncompromised events and
/// `quo_σ` for events the attacker cannot observe. No state is marked.
pub fn build_attack_constraints(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let u = cfg.rates.u;
    let mut b = AutomatonBuilder::new("AC");
    b.events(cfg.full_alphabet());
    b.initial("init");
    for n in 0..=u {
        b.state(&q(n));
    }
    for e in &cfg.events {
        if e.observable && !e.attacker_observable {
            b.state(&format!("quo_{}", e.name));
        }
        if e.attacker_observable && !e.compromised {
            b.state(&format!("qo_{}", e.name));
        }
    }
    for e in cfg.full_alphabet() {
        let idle = match e.role() {
            Role::Plain => !cfg.event(e.base().unwrap()).is_some_and(|s| s.observable),
            Role::Out | Role::CommandIn | Role::CommandOut | Role::Command | Role::Tick => true,
            _ => false,
        };
        if idle {
            b.transition("init", e, "init");
        }
    }
    for e in cfg.events.iter().filter(|e| e.observable) {
        let s = &e.name;
        if !e.attacker_observable {
            let st = format!("quo_{s}");
            b.transition("init", EventLabel::plain(s), &st);
            b.transition(&st, EventLabel::entry(s), "init");
        } else if e.compromised {
            b.transition("init", EventLabel::plain(s), &q(0));
        } else {
            let st = format!("qo_{s}");
            let after = if cfg.count_forwarded { q(1.min(u)) } else { q(0) };
            b.transition("init", EventLabel::plain(s), &st);
            b.transition(&st, EventLabel::entry(s), &after);
        }
    }
    for n in 0..=u {
        b.transition(&q(n), EventLabel::stop(), "init");
        if n < u {
            for e in cfg.events.iter().filter(|e| e.compromised) {
                b.transition(&q(n), EventLabel::compromised(&e.name), &q(n + 1));
            }
        }
    }
    b.build()
}

/// The trivial attacker: one state, every attacker-uncontrollable event
/// self-loops, nothing is ever inserted and no round is ever ended.
pub fn silent_attacker(cfg: &SystemConfig) -> Result<Automaton> {
    let c = AttackControlConstraint::new(cfg);
    let mut b = AutomatonBuilder::new("A_silent");
    b.events(c.0.alphabet.iter().cloned());
    b.initial("0").mark("0");
    for e in c.0.uncontrollable() {
        b.transition("0", e, "0");
    }
    b.build()
}

/// The "never attack" attacker: every observed compromised event `σ` is
/// passed on unchanged as `σ#`, then the round ends with `stop`.
pub fn forwarding_attacker(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let c = AttackControlConstraint::new(cfg);
    let unc = c.0.uncontrollable();
    let mut b = AutomatonBuilder::new("A_forward");
    b.events(c.0.alphabet.iter().cloned());
    b.initial("idle");
    let observed: Vec<&crate::config::EventSpec> = cfg.events.iter().filter(|e| e.attacker_observable).collect();
    let mut states = vec!["idle".to_string(), "sent".to_string()];
    states.extend(observed.iter().map(|e| format!("pending_{}", e.name)));
    for st in &states {
        b.mark(st);
        for e in &unc {
            let special = match e.role() {
                Role::Plain => st == "idle" && observed.iter().any(|o| Some(o.name.as_str()) == e.base()),
                Role::In => st.strip_prefix("pending_") == e.base(),
                _ => false,
            };
            if !special {
                b.transition(st, e.clone(), st);
            }
        }
    }
    for e in &observed {
        let pending = format!("pending_{}", e.name);
        b.transition("idle", EventLabel::plain(&e.name), &pending);
        if e.compromised {
            b.transition(&pending, EventLabel::compromised(&e.name), "sent");
        } else {
            b.transition(&pending, EventLabel::entry(&e.name), "sent");
        }
    }
    b.transition("sent", EventLabel::stop(), "idle");
    b.build()
}
