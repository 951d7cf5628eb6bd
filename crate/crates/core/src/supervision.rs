//! Networked supervisor checks, the attack monitor `M`, and a reference
//! networked-supervisor synthesis.

use std::collections::BTreeSet;

use crate::attacker::{check_control_constraint, ConstraintReport, ControlConstraint};
use crate::automaton::{Automaton, AutomatonBuilder, StateId};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::event::{EventLabel, Role};
use crate::ops;
use crate::synthesis::{self, SynthesisMode};

/// The supervisor sends `Γ^in` and observes `Γ^in ∪ Σ_o^out ∪ {tick}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupervisorControlConstraint(pub ControlConstraint);

impl SupervisorControlConstraint {
    pub fn new(cfg: &SystemConfig) -> Self {
        let controllable: BTreeSet<EventLabel> = cfg.commands.keys().map(|g| EventLabel::command_in(g)).collect();
        let mut observable = controllable.clone();
        observable.insert(EventLabel::tick());
        observable.extend(cfg.observable().iter().map(|s| EventLabel::exit(s)));
        SupervisorControlConstraint(ControlConstraint { alphabet: cfg.full_alphabet(), controllable, observable })
    }
}

/// Network controllability and network observability.
pub fn validate_networked_supervisor(ns: &Automaton, cfg: &SystemConfig) -> Result<ConstraintReport> {
    let c = SupervisorControlConstraint::new(cfg);
    check_control_constraint(ns, &c.0, "network controllability", "network observability")
}

/// Events the monitor observes.
pub fn monitor_observed(alphabet: &[EventLabel]) -> BTreeSet<EventLabel> {
    alphabet.iter().filter(|e| matches!(e.role(), Role::Out | Role::CommandIn | Role::Tick)).cloned().collect()
}

/// The monitor `M`: the observer of `NS || G_new || OC^T || CC` over
/// `Σ_o^out ∪ Γ^in ∪ {tick}`. Observations with no attack-free explanation
/// lead to the detection state `∅`, which only lets time pass.
pub fn build_monitor(ns: &Automaton, g_new: &Automaton, oc_t: &Automaton, cc: &Automaton) -> Result<Automaton> {
    if let Some(e) = oc_t.alphabet().iter().find(|e| matches!(e.role(), Role::In | Role::Compromised)) {
        return Err(Error::Validation(format!(
            "`{}` still carries channel entry `{e}`; relabel it to attack-free form first",
            oc_t.name()
        )));
    }
    let closed = ops::product(&[ns, g_new, oc_t, cc]);
    let observed = monitor_observed(closed.alphabet());
    let m = ops::observer(&closed, &observed, Some(&[EventLabel::tick()]))?;
    Ok(m.with_name("M"))
}

/// Index of the detection state `∅` of a monitor, if reachable.
pub fn detection_state(m: &Automaton) -> Option<StateId> {
    m.states().find(|&q| m.members(q).is_some_and(|s| s.is_empty()))
}

/// `log2` of the monitor state bound `2^(|NS||G_new||OC^T||CC|)`; the bound
/// itself overflows any integer type for realistic inputs.
pub fn monitor_bound_log2(ns: &Automaton, g_new: &Automaton, oc_t: &Automaton, cc: &Automaton) -> u128 {
    [ns, g_new, oc_t, cc].iter().map(|a| a.state_count() as u128).product()
}

/// Supervisor constraints `NSC`: at most `V` commands per observation.
///
/// States `c0 … cV` count commands sent since the last observation; an exit
/// from the observation channel or a tick resets the count.
pub fn build_supervisor_constraints(cfg: &SystemConfig) -> Result<Automaton> {
    let v = cfg.rates.v;
    let mut b = AutomatonBuilder::new("NSC");
    b.event(EventLabel::tick());
    b.events(cfg.observable().iter().map(|s| EventLabel::exit(s)));
    b.events(cfg.commands.keys().map(|g| EventLabel::command_in(g)));
    b.initial("c0");
    for n in 0..=v {
        let here = format!("c{n}");
        b.transition(&here, EventLabel::tick(), "c0");
        for s in cfg.observable() {
            b.transition(&here, EventLabel::exit(&s), "c0");
        }
        if n < v {
            for g in cfg.commands.keys() {
                b.transition(&here, EventLabel::command_in(g), &format!("c{}", n + 1));
            }
        }
    }
    b.build()
}

/// Completes `spec` over its alphabet with a dump state `⊥` receiving every
/// undefined event.
fn complete_with_dump(spec: &Automaton, alphabet: &BTreeSet<EventLabel>) -> Result<(Automaton, StateId)> {
    let spec = spec.extend_alphabet(alphabet.iter().cloned());
    let mut b = AutomatonBuilder::new(spec.name());
    b.events(spec.alphabet().iter().cloned());
    let name = |q: StateId| format!("s{q}");
    b.initial(&name(spec.initial()));
    for q in spec.states() {
        if spec.is_marked(q) {
            b.mark(&name(q));
        }
        for (e, ev) in spec.alphabet().iter().enumerate() {
            let mut any = false;
            for t in spec.successors(q, e) {
                any = true;
                b.transition(&name(q), ev.clone(), &name(t));
            }
            if !any {
                b.transition(&name(q), ev.clone(), "⊥");
            }
        }
    }
    for ev in spec.alphabet() {
        b.transition("⊥", ev.clone(), "⊥");
    }
    let a = b.build()?;
    let dump = a.find_state("⊥").expect("dump state exists");
    Ok((a, dump))
}

/// Synthesises a networked supervisor enforcing `spec` (a language over `Σ`
/// whose marked states are the goals).
///
/// The plant seen by the supervisor is `G_new || OC^T || NSC || CC`; the
/// specification is completed with a dump state (forbidden) and its marked
/// states are the targets of a nonblocking synthesis under the supervisor
/// control constraint. The result is extended to the full alphabet.
pub fn synthesize_networked_supervisor(
    g_new: &Automaton,
    oc_t: &Automaton,
    cc: &Automaton,
    spec: &Automaton,
    cfg: &SystemConfig,
) -> Result<Automaton> {
    let sigma = cfg.plant_events();
    if let Some(e) = spec.alphabet().iter().find(|e| !sigma.contains(*e)) {
        return Err(Error::Validation(format!("specification uses `{e}`, which is not a plant event")));
    }
    let nsc = build_supervisor_constraints(cfg)?;
    let (spec_c, dump) = complete_with_dump(spec, &sigma)?;
    let plant = ops::product(&[g_new, oc_t, &nsc, cc, &spec_c]);
    let n = plant.state_count();
    let mut bad = vec![false; n];
    let mut target = vec![false; n];
    for p in plant.states() {
        let s = plant.tuple(p).expect("product")[4] as usize;
        bad[p] = s == dump;
        target[p] = !bad[p] && spec_c.is_marked(s);
    }
    let mut constraint = SupervisorControlConstraint::new(cfg).0;
    let alphabet = plant.alphabet_set();
    constraint.controllable.retain(|e| alphabet.contains(e));
    constraint.observable.retain(|e| alphabet.contains(e));
    constraint.alphabet = alphabet;
    let sup = synthesis::supremal_supervisor(&plant, &bad, &target, &constraint, SynthesisMode::DamageNonblocking)?
        .ok_or_else(|| Error::Validation("no networked supervisor exists for this spec".into()))?;
    let full = cfg.full_alphabet();
    let a = sup.automaton.extend_alphabet(full.iter().cloned());
    let extra: Vec<EventLabel> = full.difference(&constraint.alphabet).cloned().collect();
    let loops: Vec<(StateId, usize, StateId)> = a
        .states()
        .flat_map(|q| extra.iter().map(move |e| (q, e)))
        .map(|(q, e)| (q, a.event_id(e).unwrap(), q))
        .collect();
    let ns = a.with_extra_transitions(loops).with_name("NS");
    validate_networked_supervisor(&ns, cfg)?.into_result()?;
    Ok(ns)
}
