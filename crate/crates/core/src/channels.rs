//! Non-FIFO bounded-delay channels.
//!
//! A channel state is a multiset of `(message, remaining delay)` pairs. A
//! message entering the channel carries the maximum delay; `tick` decrements
//! every delay and is blocked while some message has delay zero; any message
//! may leave at any time, in any order.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::event::{EventLabel, Role};

/// `N_f · U · (Δ_o + 1)`
pub fn capacity_observation(n_f: u64, u: u64, delta_o: u64) -> u64 {
    n_f * u * (delta_o + 1)
}

/// `N_f · U · V · (Δ_o + Δ_c + 1) + V · (Δ_c + 1)`
pub fn capacity_control(n_f: u64, u: u64, v: u64, delta_o: u64, delta_c: u64) -> u64 {
    n_f * u * v * (delta_o + delta_c + 1) + v * (delta_c + 1)
}

/// Closed-form size `((k(Δ+1))^(C+1) − 1) / (k(Δ+1) − 1)` of the channel
/// state space for `k` message kinds, i.e. the number of sequences of length
/// at most `C` over `k·(Δ+1)` symbols. Saturates at `u128::MAX`.
pub fn enumerate_channel_states(kinds: u64, delta: u64, capacity: u64) -> u128 {
    let x = kinds as u128 * (delta as u128 + 1);
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=capacity {
        total = total.saturating_add(power);
        power = power.saturating_mul(x);
    }
    total
}

/// Every sequence over `messages × [0:Δ]` of length at most `capacity`.
///
/// This is the explicit state space counted by [`enumerate_channel_states`].
pub fn word_space(messages: &[&str], delta: u32, capacity: u64) -> Vec<Vec<(Arc<str>, u32)>> {
    let symbols: Vec<(Arc<str>, u32)> =
        messages.iter().flat_map(|m| (0..=delta).map(move |d| (Arc::<str>::from(*m), d))).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..capacity {
        let mut next = Vec::new();
        for w in &layer {
            for s in &symbols {
                let mut w2: Vec<(Arc<str>, u32)> = w.clone();
                w2.push(s.clone());
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every canonical multiset over `messages × [0:Δ]` of total multiplicity at
/// most `capacity`.
pub fn multiset_space(messages: &[&str], delta: u32, capacity: u64) -> Vec<ChannelState> {
    let mut seen: BTreeSet<ChannelState> = BTreeSet::new();
    for w in word_space(messages, delta, capacity) {
        let mut s = ChannelState::empty();
        for (m, d) in w {
            s.insert(&m, d);
        }
        seen.insert(s);
    }
    seen.into_iter().collect()
}

/// A bounded multiset of `(message, remaining delay)` pairs in canonical form:
/// entries sorted by `(message, delay)` with multiplicities of at least one.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelState {
    entries: Vec<(Arc<str>, u32, u32)>,
}

impl ChannelState {
    pub fn empty() -> Self {
        ChannelState::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total multiplicity.
    pub fn len(&self) -> u64 {
        self.entries.iter().map(|e| e.2 as u64).sum()
    }

    /// `(message, delay, multiplicity)` triples in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u32, u32)> + '_ {
        self.entries.iter().map(|(m, d, k)| (&**m, *d, *k))
    }

    pub fn multiplicity(&self, msg: &str, delay: u32) -> u32 {
        self.entries.iter().find(|(m, d, _)| &**m == msg && *d == delay).map_or(0, |e| e.2)
    }

    /// `q ⊎ {(msg, delay)}`
    pub fn insert(&mut self, msg: &str, delay: u32) {
        match self.entries.binary_search_by(|(m, d, _)| (&**m, *d).cmp(&(msg, delay))) {
            Ok(i) => self.entries[i].2 += 1,
            Err(i) => self.entries.insert(i, (Arc::from(msg), delay, 1)),
        }
    }

    /// `q − {(msg, delay)}`; `false` if the pair is absent.
    pub fn remove(&mut self, msg: &str, delay: u32) -> bool {
        match self.entries.binary_search_by(|(m, d, _)| (&**m, *d).cmp(&(msg, delay))) {
            Ok(i) => {
                self.entries[i].2 -= 1;
                if self.entries[i].2 == 0 {
                    self.entries.remove(i);
                }
                true
            }
            Err(_) => false,
        }
    }

    /// `T^{=0}(q) ≠ ∅`
    pub fn has_expired(&self) -> bool {
        self.entries.iter().any(|e| e.1 == 0)
    }

    /// `Tick(q)`, defined only when no entry has delay zero.
    pub fn tick(&self) -> Option<ChannelState> {
        if self.has_expired() {
            return None;
        }
        let entries = self.entries.iter().map(|(m, d, k)| (m.clone(), d - 1, *k)).collect();
        Some(ChannelState { entries })
    }

    /// Distinct delays currently held by `msg`, ascending.
    pub fn delays_of(&self, msg: &str) -> Vec<u32> {
        self.entries.iter().filter(|e| &*e.0 == msg).map(|e| e.1).collect()
    }
}

impl fmt::Display for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (m, d, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({m},{d})")?;
            if *k > 1 {
                write!(f, "^{k}")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Generic channel automaton. `inputs` pairs each entry event with the
/// message it adds; `outputs` pairs each exit event with the message it
/// removes.
fn build_channel(
    name: &str,
    inputs: &[(EventLabel, Arc<str>)],
    outputs: &[(EventLabel, Arc<str>)],
    delta: u32,
    capacity: u64,
) -> Automaton {
    let mut b = AutomatonBuilder::new(name);
    b.event(EventLabel::tick());
    b.events(inputs.iter().map(|(e, _)| e.clone()));
    b.events(outputs.iter().map(|(e, _)| e.clone()));
    let init = ChannelState::empty();
    b.initial(&init.to_string());
    let mut seen: HashMap<ChannelState, String> = HashMap::from([(init.clone(), init.to_string())]);
    let mut queue = VecDeque::from([init]);
    let visit = |s: ChannelState, seen: &mut HashMap<ChannelState, String>, queue: &mut VecDeque<ChannelState>| {
        seen.entry(s.clone())
            .or_insert_with(|| {
                queue.push_back(s.clone());
                s.to_string()
            })
            .clone()
    };
    while let Some(q) = queue.pop_front() {
        let src = seen[&q].clone();
        debug_assert!(q.len() <= capacity);
        if let Some(t) = q.tick() {
            let dst = visit(t, &mut seen, &mut queue);
            b.transition(&src, EventLabel::tick(), &dst);
        }
        if q.len() < capacity {
            for (e, m) in inputs {
                let mut t = q.clone();
                t.insert(m, delta);
                let dst = visit(t, &mut seen, &mut queue);
                b.transition(&src, e.clone(), &dst);
            }
        }
        for (e, m) in outputs {
            for d in q.delays_of(m) {
                let mut t = q.clone();
                t.remove(m, d);
                let dst = visit(t, &mut seen, &mut queue);
                b.transition(&src, e.clone(), &dst);
            }
        }
    }
    b.build().expect("channel alphabet covers every transition")
}

/// The observation channel `OC` with capacity `C_oc`.
pub fn build_observation_channel(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let compromised = cfg.compromised();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for e in cfg.events.iter().filter(|e| e.observable) {
        let m: Arc<str> = Arc::from(e.name.as_str());
        let entry =
            if compromised.contains(&e.name) { EventLabel::compromised(&e.name) } else { EventLabel::entry(&e.name) };
        inputs.push((entry, m.clone()));
        outputs.push((EventLabel::exit(&e.name), m));
    }
    Ok(build_channel("OC", &inputs, &outputs, cfg.delta_o, cfg.c_oc()))
}

/// The control channel `CC` with capacity `C_cc`.
pub fn build_control_channel(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for g in cfg.commands.keys() {
        let m: Arc<str> = Arc::from(g.as_str());
        inputs.push((EventLabel::command_in(g), m.clone()));
        outputs.push((EventLabel::command_out(g), m));
    }
    Ok(build_channel("CC", &inputs, &outputs, cfg.delta_c, cfg.c_cc()))
}

/// `OC^T`: entries by the plant and by the attacker both become the plain
/// plant event, so the monitor can compare against attack-free behaviour.
pub fn relabel_to_attack_free(oc: &Automaton) -> Result<Automaton> {
    if let Some(e) = oc.alphabet().iter().find(|e| e.role() == Role::Plain) {
        return Err(Error::Validation(format!(
            "`{}` already contains plain event `{e}`; relabelling would merge it",
            oc.name()
        )));
    }
    let out = oc.relabel_events(|e| match e.role() {
        Role::In | Role::Compromised => e.with_role(Role::Plain).expect("plant role keeps its base"),
        _ => e.clone(),
    });
    Ok(out.with_name(format!("{}^T", oc.name())))
}
