//! The attacked closed loop as a control problem, supremal covert attack
//! synthesis, and verification of attacks.
//!
//! The attacker is treated as a partial-observation supervisor of
//! `P = G_new || AC || OC || NS || CC || M`. Since every event the attacker
//! controls is also observed by it, the supremal controllable and normal
//! solution is computed on the observer of `P`: observer states that contain
//! a bad state, or that reach one through attacker-uncontrollable events, are
//! removed; in nonblocking mode observer states admitting a run that can no
//! longer reach a damage state are removed as well, until a fixpoint.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::attacker::{AttackControlConstraint, ControlConstraint};
use crate::automaton::{Automaton, EventId, Labels, StateId, StateSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::event::EventLabel;
use crate::ops;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SynthesisMode {
    /// Every reachable state of the attacked loop can still reach damage.
    DamageNonblocking,
    /// Some damage state is reachable.
    DamageReachable,
}

impl SynthesisMode {
    pub fn keyword(self) -> &'static str {
        match self {
            SynthesisMode::DamageNonblocking => "nonblocking",
            SynthesisMode::DamageReachable => "reachable",
        }
    }
}

impl FromStr for SynthesisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonblocking" | "damage-nonblocking" => Ok(SynthesisMode::DamageNonblocking),
            "reachable" | "damage-reachable" => Ok(SynthesisMode::DamageReachable),
            _ => Err(Error::invalid(format!("unknown synthesis mode `{s}` (expected nonblocking or reachable)"))),
        }
    }
}

impl fmt::Display for SynthesisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The composed plant with its covertness-violating and damage states.
#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    pub plant: Automaton,
    /// Monitor in `∅` while the plant is not damaged.
    pub bad: StateSet,
    /// Plant component in a damage state.
    pub target: StateSet,
    pub constraint: AttackControlConstraint,
}

impl SynthesisProblem {
    fn flags(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.plant.state_count();
        (self.bad.to_flags(n), self.target.to_flags(n))
    }
}

/// Damage flags for the states of `G_new`, read from the plant component of
/// each composed state.
pub fn g_new_damage(g_new: &Automaton, cfg: &SystemConfig) -> Result<Vec<bool>> {
    g_new
        .states()
        .map(|q| match g_new.label(q) {
            crate::StateLabel::Tuple(parts) if parts.len() == 3 => Ok(cfg.damage.contains(&parts[2].to_string())),
            _ => Err(Error::invalid(format!(
                "`{}` does not carry (storage, execution, plant) state labels",
                g_new.name()
            ))),
        })
        .collect()
}

fn is_detection(m: &Automaton, q: StateId) -> bool {
    match m.members(q) {
        Some(s) => s.is_empty(),
        None => m.state_name(q) == "∅",
    }
}

/// Composes `P = G_new || AC || OC || NS || CC || M` and classifies states.
pub fn build_problem(
    g_new: &Automaton,
    ac: &Automaton,
    oc: &Automaton,
    ns: &Automaton,
    cc: &Automaton,
    m: &Automaton,
    cfg: &SystemConfig,
) -> Result<SynthesisProblem> {
    let full = cfg.full_alphabet();
    for a in [g_new, ac, oc, ns, cc, m] {
        if let Some(e) = a.alphabet().iter().find(|e| !full.contains(*e)) {
            return Err(Error::Validation(format!("`{}` uses `{e}`, which is outside the system alphabet", a.name())));
        }
    }
    for a in [ac, ns] {
        if a.alphabet_set() != full {
            return Err(Error::Validation(format!("`{}` must be defined over the full system alphabet", a.name())));
        }
    }
    let damage = g_new_damage(g_new, cfg)?;
    let plant = ops::product(&[g_new, ac, oc, ns, cc, m]).with_name("P");
    let mut bad = Vec::new();
    let mut target = Vec::new();
    for p in plant.states() {
        let t = plant.tuple(p).expect("product");
        let damaged = damage[t[0] as usize];
        if damaged {
            target.push(p);
        } else if is_detection(m, t[5] as usize) {
            bad.push(p);
        }
    }
    Ok(SynthesisProblem {
        plant,
        bad: bad.into_iter().collect(),
        target: target.into_iter().collect(),
        constraint: AttackControlConstraint::new(cfg),
    })
}

/// A synthesised partial-observation supervisor together with the observer
/// it was cut from.
#[derive(Clone, Debug)]
pub struct Supervisor {
    /// States `x0, x1, …`, all marked.
    pub automaton: Automaton,
    observer: Arc<Automaton>,
    alive: Vec<bool>,
    /// Observer state behind each supervisor state.
    origin: Vec<StateId>,
    constraint: ControlConstraint,
}

impl Supervisor {
    /// Observer state of `plant` behind supervisor state `q`.
    pub fn observer_state(&self, q: StateId) -> StateId {
        self.origin[q]
    }

    pub fn observer(&self) -> &Automaton {
        &self.observer
    }

    /// Disabled controllable moves: `(supervisor state, event)` pairs the
    /// full observer defines but the supervisor does not.
    pub fn disabled_moves(&self) -> Vec<(StateId, EventId)> {
        let ctrl = event_mask(&self.observer, &self.constraint.controllable);
        let mut out = Vec::new();
        for q in self.automaton.states() {
            let x = self.origin[q];
            for e in self.observer.enabled(x) {
                if ctrl[e] && !self.automaton.is_enabled(q, e) {
                    out.push((q, e));
                }
            }
        }
        out
    }

    /// The supervisor with one disabled move re-enabled. When the observer
    /// successor was removed during synthesis, the run continues in an
    /// unpruned copy of the observer from that successor on.
    pub fn relaxed(&self, q: StateId, e: EventId) -> Automaton {
        let obs = &*self.observer;
        let y = obs.successors(self.origin[q], e).next().expect("move is defined in the observer");
        let n = self.automaton.state_count();
        let mut trans: Vec<Vec<(EventId, StateId)>> =
            self.automaton.states().map(|s| self.automaton.transitions(s).to_vec()).collect();
        let mut origin = self.origin.clone();
        let in_a = self.origin.iter().position(|&x| x == y);
        let target = match in_a {
            Some(t) => t,
            None => {
                let mut copy: HashMap<StateId, StateId> = HashMap::new();
                let mut queue = VecDeque::from([y]);
                copy.insert(y, n);
                origin.push(y);
                trans.push(Vec::new());
                while let Some(x) = queue.pop_front() {
                    let row: Vec<(EventId, StateId)> = obs
                        .transitions(x)
                        .iter()
                        .map(|&(ev, t)| {
                            let id = *copy.entry(t).or_insert_with(|| {
                                origin.push(t);
                                trans.push(Vec::new());
                                queue.push_back(t);
                                origin.len() - 1
                            });
                            (ev, id)
                        })
                        .collect();
                    trans[copy[&x]] = row;
                }
                n
            }
        };
        trans[q].push((e, target));
        complete_uncontrollable(obs, &self.constraint, &mut trans);
        let names = (0..trans.len()).map(|i| Arc::<str>::from(format!("x{i}"))).collect();
        let marked = vec![true; trans.len()];
        Automaton::from_parts("A_relaxed", Labels::Named(names), obs.alphabet_arc(), trans, 0, marked)
    }

    /// Whether the observer state was kept by the fixpoint.
    pub fn is_alive(&self, x: StateId) -> bool {
        self.alive[x]
    }
}

fn event_mask(a: &Automaton, set: &BTreeSet<EventLabel>) -> Vec<bool> {
    a.alphabet().iter().map(|e| set.contains(e)).collect()
}

/// Adds self-loops for uncontrollable observed events left undefined.
fn complete_uncontrollable(obs: &Automaton, c: &ControlConstraint, trans: &mut [Vec<(EventId, StateId)>]) {
    let fill: Vec<EventId> = obs
        .alphabet()
        .iter()
        .enumerate()
        .filter(|(_, e)| !c.controllable.contains(*e) && c.observable.contains(*e))
        .map(|(i, _)| i)
        .collect();
    for (q, row) in trans.iter_mut().enumerate() {
        for &e in &fill {
            if !row.iter().any(|&(ev, _)| ev == e) {
                row.push((e, q));
            }
        }
    }
}

/// Marks dead every observer state that reaches a dead state through an
/// uncontrollable event.
fn propagate(pred: &[Vec<StateId>], dead: &mut [bool], mut work: Vec<StateId>) {
    while let Some(y) = work.pop() {
        for &x in &pred[y] {
            if !dead[x] {
                dead[x] = true;
                work.push(x);
            }
        }
    }
}

/// Pairs `(plant state, observer state)` reachable under the current
/// observer, with their edges.
struct PairGraph {
    pairs: Vec<(u32, u32)>,
    succ: Vec<Vec<u32>>,
}

fn pair_graph(plant: &Automaton, obs: &Automaton, dead: &[bool]) -> PairGraph {
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let start = (plant.initial() as u32, obs.initial() as u32);
    let mut pairs = vec![start];
    let mut succ: Vec<Vec<u32>> = vec![Vec::new()];
    index.insert(start, 0);
    let mut head = 0;
    while head < pairs.len() {
        let (p, x) = pairs[head];
        let mut row = Vec::new();
        for &(e, p2) in plant.transitions(p as usize) {
            let Some(x2) = obs.successors(x as usize, e).next() else { continue };
            if dead[x2] {
                continue;
            }
            let key = (p2 as u32, x2 as u32);
            let id = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                succ.push(Vec::new());
                (pairs.len() - 1) as u32
            });
            row.push(id);
        }
        succ[head] = row;
        head += 1;
    }
    PairGraph { pairs, succ }
}

fn coreachable_pairs(g: &PairGraph, target: &[bool]) -> Vec<bool> {
    let n = g.pairs.len();
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, row) in g.succ.iter().enumerate() {
        for &j in row {
            pred[j as usize].push(i as u32);
        }
    }
    let mut co: Vec<bool> = g.pairs.iter().map(|&(p, _)| target[p as usize]).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| co[i]).collect();
    while let Some(i) = stack.pop() {
        for &j in &pred[i] {
            if !co[j as usize] {
                co[j as usize] = true;
                stack.push(j as usize);
            }
        }
    }
    co
}

/// Generic supremal synthesis under a control constraint whose controllable
/// events are all observable. Returns `None` when no supervisor exists.
pub(crate) fn supremal_supervisor(
    plant: &Automaton,
    bad: &[bool],
    target: &[bool],
    c: &ControlConstraint,
    mode: SynthesisMode,
) -> Result<Option<Supervisor>> {
    if !c.controllable.is_subset(&c.observable) {
        return Err(Error::invalid("controllable events must be observable"));
    }
    let obs = ops::observer(plant, &c.observable, None)?;
    let unc: Vec<bool> = event_mask(&obs, &c.controllable).into_iter().map(|x| !x).collect();
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); obs.state_count()];
    for (x, e, y) in obs.iter_transitions() {
        if unc[e] && x != y {
            pred[y].push(x);
        }
    }
    let mut dead: Vec<bool> =
        obs.states().map(|x| obs.members(x).unwrap().iter().any(|&p| bad[p as usize])).collect();
    let seeds: Vec<StateId> = obs.states().filter(|&x| dead[x]).collect();
    propagate(&pred, &mut dead, seeds);

    loop {
        if dead[obs.initial()] {
            return Ok(None);
        }
        let g = pair_graph(plant, &obs, &dead);
        let co = coreachable_pairs(&g, target);
        match mode {
            SynthesisMode::DamageReachable => {
                if !co[0] {
                    return Ok(None);
                }
                break;
            }
            SynthesisMode::DamageNonblocking => {
                let blocking: BTreeSet<StateId> =
                    g.pairs.iter().zip(&co).filter(|(_, c)| !**c).map(|(&(_, x), _)| x as usize).collect();
                if blocking.is_empty() {
                    break;
                }
                let seeds: Vec<StateId> = blocking.into_iter().filter(|&x| !dead[x]).collect();
                for &x in &seeds {
                    dead[x] = true;
                }
                propagate(&pred, &mut dead, seeds);
            }
        }
    }

    let alive: Vec<bool> = dead.iter().map(|d| !d).collect();
    let mut new_id = vec![usize::MAX; obs.state_count()];
    let mut origin = vec![obs.initial()];
    new_id[obs.initial()] = 0;
    let mut head = 0;
    while head < origin.len() {
        let x = origin[head];
        head += 1;
        for &(_, y) in obs.transitions(x) {
            if alive[y] && new_id[y] == usize::MAX {
                new_id[y] = origin.len();
                origin.push(y);
            }
        }
    }
    let mut trans: Vec<Vec<(EventId, StateId)>> = origin
        .iter()
        .map(|&x| obs.transitions(x).iter().filter(|&&(_, y)| alive[y]).map(|&(e, y)| (e, new_id[y])).collect())
        .collect();
    complete_uncontrollable(&obs, c, &mut trans);
    let names = (0..origin.len()).map(|i| Arc::<str>::from(format!("x{i}"))).collect();
    let marked = vec![true; origin.len()];
    let automaton = Automaton::from_parts("A", Labels::Named(names), obs.alphabet_arc(), trans, 0, marked);
    Ok(Some(Supervisor { automaton, observer: Arc::new(obs), alive, origin, constraint: c.clone() }))
}

/// Result of attack synthesis.
#[derive(Clone, Debug)]
pub enum AttackOutcome {
    Attack(Automaton),
    /// No covert attack satisfying the mode exists.
    NoAttack,
}

impl AttackOutcome {
    pub fn attack(&self) -> Option<&Automaton> {
        match self {
            AttackOutcome::Attack(a) => Some(a),
            AttackOutcome::NoAttack => None,
        }
    }
}

/// The supremal covert attack for `mode`, keeping the observer it was cut
/// from (used by the maximality checks).
pub fn synthesize_attack_supervisor(p: &SynthesisProblem, mode: SynthesisMode) -> Result<Option<Supervisor>> {
    let (bad, target) = p.flags();
    let sup = supremal_supervisor(&p.plant, &bad, &target, &p.constraint.0, mode)?;
    Ok(sup.map(|mut s| {
        s.automaton = s.automaton.with_name(format!("A_{}", mode.keyword()));
        s
    }))
}

/// The supremal covert damage-nonblocking or damage-reachable attack.
pub fn synthesize_supremal_attack(p: &SynthesisProblem, mode: SynthesisMode) -> Result<AttackOutcome> {
    Ok(match synthesize_attack_supervisor(p, mode)? {
        Some(s) => AttackOutcome::Attack(s.automaton),
        None => AttackOutcome::NoAttack,
    })
}

/// `P || A` with the damage states of `P` as its marking.
pub fn closed_loop(p: &SynthesisProblem, a: &Automaton) -> Result<Automaton> {
    if a.alphabet_set() != p.constraint.0.alphabet {
        return Err(Error::Validation(format!("attack `{}` is not defined over the attack alphabet", a.name())));
    }
    let lp = ops::product(&[&p.plant, a]);
    let marked: StateSet = lp.states().filter(|&q| p.target.contains(lp.tuple(q).unwrap()[0] as usize)).collect();
    Ok(lp.with_marked(&marked).with_name("P||A"))
}

/// Outcome of one property check, with a shortest trace when relevant: the
/// violating run when the property fails, or a run reaching damage when
/// damage reachability holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Vec<EventLabel>>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.holds)?;
        if let Some(w) = &self.witness {
            let w: Vec<String> = w.iter().map(|e| e.spelling()).collect();
            write!(f, " (trace: {})", if w.is_empty() { "ε".to_string() } else { w.join(" ") })?;
        }
        Ok(())
    }
}

/// Shortest trace from the initial state to the first state (in BFS order)
/// satisfying `goal`.
pub fn shortest_trace(a: &Automaton, goal: impl Fn(StateId) -> bool) -> Option<Vec<EventLabel>> {
    let mut parent: Vec<Option<(StateId, EventId)>> = vec![None; a.state_count()];
    let mut seen = vec![false; a.state_count()];
    let mut queue = VecDeque::from([a.initial()]);
    seen[a.initial()] = true;
    while let Some(q) = queue.pop_front() {
        if goal(q) {
            let mut trace = Vec::new();
            let mut cur = q;
            while let Some((p, e)) = parent[cur] {
                trace.push(a.event(e).clone());
                cur = p;
            }
            trace.reverse();
            return Some(trace);
        }
        for &(e, t) in a.transitions(q) {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((q, e));
                queue.push_back(t);
            }
        }
    }
    None
}

fn covert_on(p: &SynthesisProblem, lp: &Automaton) -> Verdict {
    let w = shortest_trace(lp, |q| p.bad.contains(lp.tuple(q).unwrap()[0] as usize));
    Verdict { holds: w.is_none(), witness: w }
}

fn nonblocking_on(lp: &Automaton) -> Verdict {
    let co = ops::coreachable(lp);
    let w = shortest_trace(lp, |q| !co.contains(q));
    Verdict { holds: w.is_none(), witness: w }
}

fn reachable_on(lp: &Automaton) -> Verdict {
    let w = shortest_trace(lp, |q| lp.is_marked(q));
    Verdict { holds: w.is_some(), witness: w }
}

/// No bad state is reachable in `P || A`.
pub fn verify_covert(p: &SynthesisProblem, a: &Automaton) -> Result<Verdict> {
    Ok(covert_on(p, &closed_loop(p, a)?))
}

/// Every reachable state of `P || A` can reach a damage state.
pub fn verify_damage_nonblocking(p: &SynthesisProblem, a: &Automaton) -> Result<Verdict> {
    Ok(nonblocking_on(&closed_loop(p, a)?))
}

/// Some damage state is reachable in `P || A`.
pub fn verify_damage_reachable(p: &SynthesisProblem, a: &Automaton) -> Result<Verdict> {
    Ok(reachable_on(&closed_loop(p, a)?))
}

/// All three checks on one closed loop.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub attack: String,
    pub closed_loop_states: usize,
    pub covert: Verdict,
    pub damage_nonblocking: Verdict,
    pub damage_reachable: Verdict,
}

impl Certificate {
    pub fn satisfies(&self, mode: SynthesisMode) -> bool {
        self.covert.holds
            && match mode {
                SynthesisMode::DamageNonblocking => self.damage_nonblocking.holds,
                SynthesisMode::DamageReachable => self.damage_reachable.holds,
            }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attack: {}", self.attack)?;
        writeln!(f, "closed-loop states: {}", self.closed_loop_states)?;
        writeln!(f, "covert: {}", self.covert)?;
        writeln!(f, "damage-nonblocking: {}", self.damage_nonblocking)?;
        writeln!(f, "damage-reachable: {}", self.damage_reachable)
    }
}

pub fn certify(p: &SynthesisProblem, a: &Automaton) -> Result<Certificate> {
    let lp = closed_loop(p, a)?;
    Ok(Certificate {
        attack: a.name().to_string(),
        closed_loop_states: lp.state_count(),
        covert: covert_on(p, &lp),
        damage_nonblocking: nonblocking_on(&lp),
        damage_reachable: reachable_on(&lp),
    })
}

/// One re-enabled move and what it broke.
#[derive(Clone, Debug)]
pub struct RelaxationResult {
    pub state: String,
    pub event: EventLabel,
    pub covert: bool,
    pub mode_contract: bool,
}

impl RelaxationResult {
    pub fn breaks_something(&self) -> bool {
        !(self.covert && self.mode_contract)
    }
}

/// Re-enables every disabled controllable move of `sup`, one at a time, and
/// checks covertness and the mode contract on each relaxed closed loop.
pub fn check_local_maximality(
    p: &SynthesisProblem,
    sup: &Supervisor,
    mode: SynthesisMode,
) -> Result<Vec<RelaxationResult>> {
    let moves = sup.disabled_moves();
    moves
        .par_iter()
        .map(|&(q, e)| {
            let relaxed = sup.relaxed(q, e);
            let lp = closed_loop(p, &relaxed)?;
            let covert = covert_on(p, &lp).holds;
            let mode_contract = match mode {
                SynthesisMode::DamageNonblocking => nonblocking_on(&lp).holds,
                SynthesisMode::DamageReachable => reachable_on(&lp).holds,
            };
            Ok(RelaxationResult {
                state: sup.automaton.state_name(q),
                event: sup.automaton.event(e).clone(),
                covert,
                mode_contract,
            })
        })
        .collect()
}

/// Whether `L(P || small) ⊆ L(P || big)`, optionally only for strings up to
/// `max_depth` events. `big` must be deterministic. The witness is a
/// shortest string of `P || small` that `big` rejects.
pub fn language_included(
    p: &SynthesisProblem,
    small: &Automaton,
    big: &Automaton,
    max_depth: Option<usize>,
) -> Result<Verdict> {
    if !big.is_deterministic() {
        return Err(Error::invalid(format!("`{}` must be deterministic", big.name())));
    }
    let lp = closed_loop(p, small)?;
    let map: Vec<Option<EventId>> = lp.alphabet().iter().map(|e| big.event_id(e)).collect();
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut nodes = vec![(lp.initial(), big.initial())];
    let mut parent: Vec<Option<(usize, EventId)>> = vec![None];
    let mut depth = vec![0usize];
    index.insert(nodes[0], 0);
    let mut head = 0;
    while head < nodes.len() {
        let (r, b) = nodes[head];
        let i = head;
        head += 1;
        if max_depth.is_some_and(|d| depth[i] >= d) {
            continue;
        }
        for &(e, r2) in lp.transitions(r) {
            let b2 = map[e].and_then(|be| big.successors(b, be).next());
            let Some(b2) = b2 else {
                let mut trace = vec![lp.event(e).clone()];
                let mut cur = i;
                while let Some((pi, pe)) = parent[cur] {
                    trace.push(lp.event(pe).clone());
                    cur = pi;
                }
                trace.reverse();
                return Ok(Verdict { holds: false, witness: Some(trace) });
            };
            if let std::collections::hash_map::Entry::Vacant(v) = index.entry((r2, b2)) {
                v.insert(nodes.len());
                nodes.push((r2, b2));
                parent.push(Some((i, e)));
                depth.push(depth[i] + 1);
            }
        }
    }
    Ok(Verdict { holds: true, witness: None })
}

/// `C(n + c, c)`: multisets of size at most `c` over `n` kinds.
pub fn multiset_count(kinds: u64, capacity: u64) -> u128 {
    let mut r: u128 = 1;
    for i in 1..=capacity as u128 {
        r = r * (kinds as u128 + i) / i;
    }
    r
}

/// One line of the state-size report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeRow {
    pub component: String,
    pub states: u128,
    /// The closed-form figure next to which the count is reported.
    pub formula: u128,
    pub relation: &'static str,
    pub ok: bool,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeReport {
    pub rows: Vec<SizeRow>,
}

impl SizeReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn row(&self, component: &str) -> Option<&SizeRow> {
        self.rows.iter().find(|r| r.component == component)
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "{:<6} states={:<8} {} {:<10} {} {}",
                r.component,
                r.states,
                r.relation,
                if r.component == "M" { format!("2^{}", r.formula) } else { r.formula.to_string() },
                if r.ok { "ok" } else { "VIOLATED" },
                r.note
            )?;
        }
        Ok(())
    }
}

/// Automata sizes next to their closed-form counts and bounds.
///
/// Channel rows compare the constructed automaton with the number of
/// multisets within capacity (which it must equal) and report the
/// sequence-count formula alongside (which it must not exceed).
pub fn state_size_report(
    cfg: &SystemConfig,
    ac: &Automaton,
    oc: &Automaton,
    cc: &Automaton,
    cs: &Automaton,
    ce: &Automaton,
    monitor: Option<(&Automaton, u128)>,
) -> SizeReport {
    let mut rows = Vec::new();
    let ac_formula = cfg.rates.u as u128 + 2 + cfg.observable().difference(&cfg.compromised()).count() as u128;
    rows.push(SizeRow {
        component: "AC".into(),
        states: ac.state_count() as u128,
        formula: ac_formula,
        relation: "=",
        ok: ac.state_count() as u128 == ac_formula,
        note: String::new(),
    });
    for (name, a, kinds, delta, cap) in [
        ("OC", oc, cfg.observable().len() as u64, cfg.delta_o as u64, cfg.c_oc()),
        ("CC", cc, cfg.commands.len() as u64, cfg.delta_c as u64, cfg.c_cc()),
    ] {
        let formula = crate::channels::enumerate_channel_states(kinds, delta, cap);
        let multisets = multiset_count(kinds * (delta + 1), cap);
        let n = a.state_count() as u128;
        rows.push(SizeRow {
            component: name.into(),
            states: n,
            formula,
            relation: "<=",
            ok: n == multisets && n <= formula,
            note: format!("multisets={multisets}"),
        });
    }
    let cs_bound = crate::plant::storage_state_bound(cfg);
    rows.push(SizeRow {
        component: "CS".into(),
        states: cs.state_count() as u128,
        formula: cs_bound,
        relation: "<=",
        ok: cs.state_count() as u128 <= cs_bound,
        note: String::new(),
    });
    let ce_bound = crate::plant::execution_state_bound(cfg) as u128;
    let active = ce.state_count() as u128 - 1;
    rows.push(SizeRow {
        component: "CE".into(),
        states: ce.state_count() as u128,
        formula: ce_bound,
        relation: "<=",
        ok: active <= ce_bound,
        note: format!("active={active}"),
    });
    if let Some((m, log2_bound)) = monitor {
        let n = m.state_count() as u128;
        let log2_n = 128 - n.leading_zeros() as u128 - 1;
        rows.push(SizeRow {
            component: "M".into(),
            states: n,
            formula: log2_bound,
            relation: "<=",
            ok: log2_n <= log2_bound,
            note: String::new(),
        });
    }
    SizeReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;

    fn ev(s: &str) -> EventLabel {
        EventLabel::plain(s)
    }

    /// `c` controllable+observable, `u` uncontrollable+observable, `h` hidden.
    fn constraint(alphabet: &[&str], ctrl: &[&str], obs: &[&str]) -> ControlConstraint {
        ControlConstraint {
            alphabet: alphabet.iter().map(|s| ev(s)).collect(),
            controllable: ctrl.iter().map(|s| ev(s)).collect(),
            observable: obs.iter().map(|s| ev(s)).collect(),
        }
    }

    fn flags(a: &Automaton, names: &[&str]) -> Vec<bool> {
        a.states().map(|q| names.contains(&a.state_name(q).as_str())).collect()
    }

    #[test]
    fn unconstrained_gives_full_observer() {
        let mut b = AutomatonBuilder::new("P");
        b.events([ev("c"), ev("h")]);
        b.initial("0").transition("0", ev("h"), "1").transition("1", ev("c"), "2").transition("0", ev("c"), "3");
        let p = b.build().unwrap();
        let c = constraint(&["c", "h"], &["c"], &["c"]);
        let bad = vec![false; 4];
        let target = flags(&p, &["2"]);
        let s = supremal_supervisor(&p, &bad, &target, &c, SynthesisMode::DamageReachable).unwrap().unwrap();
        let full = ops::subset_construction(&p, &c.observable).unwrap();
        assert_eq!(s.automaton.state_count(), full.state_count());
        assert_eq!(s.automaton.transition_count(), full.transition_count());
        assert!(s.disabled_moves().is_empty());
    }

    #[test]
    fn every_path_through_bad_gives_nothing() {
        // 0 --u--> 1(bad) --c--> 2(target); the attacker cannot stop u
        let mut b = AutomatonBuilder::new("P");
        b.events([ev("c"), ev("u")]);
        b.initial("0").transition("0", ev("u"), "1").transition("1", ev("c"), "2");
        let p = b.build().unwrap();
        let c = constraint(&["c", "u"], &["c"], &["c", "u"]);
        for mode in [SynthesisMode::DamageNonblocking, SynthesisMode::DamageReachable] {
            let r = supremal_supervisor(&p, &flags(&p, &["1"]), &flags(&p, &["2"]), &c, mode).unwrap();
            assert!(r.is_none());
        }
    }

    #[test]
    fn controllable_edges_into_bad_are_disabled() {
        // 0 --c--> 1(bad); 0 --d--> 2(target)
        let mut b = AutomatonBuilder::new("P");
        b.events([ev("c"), ev("d")]);
        b.initial("0").transition("0", ev("c"), "1").transition("0", ev("d"), "2");
        let p = b.build().unwrap();
        let c = constraint(&["c", "d"], &["c", "d"], &["c", "d"]);
        let s = supremal_supervisor(&p, &flags(&p, &["1"]), &flags(&p, &["2"]), &c, SynthesisMode::DamageNonblocking)
            .unwrap()
            .unwrap();
        let a = &s.automaton;
        assert!(!a.is_enabled(a.initial(), a.event_id(&ev("c")).unwrap()));
        assert!(a.is_enabled(a.initial(), a.event_id(&ev("d")).unwrap()));
        assert_eq!(s.disabled_moves().len(), 1);
    }

    #[test]
    fn nonblocking_removes_dead_ends_that_reachable_keeps() {
        // 0 --c--> 1 (dead end) ; 0 --d--> 2(target)
        let mut b = AutomatonBuilder::new("P");
        b.events([ev("c"), ev("d")]);
        b.initial("0").transition("0", ev("c"), "1").transition("0", ev("d"), "2");
        let p = b.build().unwrap();
        let c = constraint(&["c", "d"], &["c", "d"], &["c", "d"]);
        let bad = vec![false; 3];
        let target = flags(&p, &["2"]);
        let nb = supremal_supervisor(&p, &bad, &target, &c, SynthesisMode::DamageNonblocking).unwrap().unwrap();
        let re = supremal_supervisor(&p, &bad, &target, &c, SynthesisMode::DamageReachable).unwrap().unwrap();
        assert_eq!(nb.automaton.state_count(), 2);
        assert_eq!(re.automaton.state_count(), 3);
    }

    #[test]
    fn hidden_uncontrollable_into_blocking_forces_cut_earlier() {
        // 0 --c--> 1 --h--> 3 (dead end, hidden); 1 --u--> 2(target); 0 --d--> 2
        let mut b = AutomatonBuilder::new("P");
        b.events([ev("c"), ev("d"), ev("h"), ev("u")]);
        b.initial("0")
            .transition("0", ev("c"), "1")
            .transition("1", ev("h"), "3")
            .transition("1", ev("u"), "2")
            .transition("0", ev("d"), "2");
        let p = b.build().unwrap();
        let c = constraint(&["c", "d", "h", "u"], &["c", "d"], &["c", "d", "u"]);
        let s = supremal_supervisor(&p, &[false; 4], &flags(&p, &["2"]), &c, SynthesisMode::DamageNonblocking)
            .unwrap()
            .unwrap();
        let a = &s.automaton;
        assert!(!a.is_enabled(a.initial(), a.event_id(&ev("c")).unwrap()));
        assert!(a.is_enabled(a.initial(), a.event_id(&ev("d")).unwrap()));
    }

    #[test]
    fn multisets() {
        assert_eq!(multiset_count(8, 2), 45);
        assert_eq!(multiset_count(3, 3), 20);
        assert_eq!(multiset_count(5, 0), 1);
    }

    #[test]
    fn modes_parse() {
        assert_eq!("nonblocking".parse::<SynthesisMode>().unwrap(), SynthesisMode::DamageNonblocking);
        assert_eq!("reachable".parse::<SynthesisMode>().unwrap(), SynthesisMode::DamageReachable);
        assert!("x".parse::<SynthesisMode>().is_err());
    }
}
