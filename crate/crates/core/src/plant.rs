//! Plant side of the loop: command storage `CS`, command execution `CE`,
//! the user plant `G`, and the pruned composition `G_new`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::automaton::{Automaton, AutomatonBuilder, StateId};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::event::{EventLabel, Role};
use crate::ops;

/// `N_f · U · V · (Δ_o + Δ_c + Δ_s + 1) + V · (Δ_c + Δ_s + 1)`
pub fn capacity_storage(n_f: u64, u: u64, v: u64, delta_o: u64, delta_c: u64, delta_s: u64) -> u64 {
    n_f * u * v * (delta_o + delta_c + delta_s + 1) + v * (delta_c + delta_s + 1)
}

/// Upper bound on the command storage state count.
pub fn storage_state_bound(cfg: &SystemConfig) -> u128 {
    crate::channels::enumerate_channel_states(cfg.commands.len() as u64, cfg.delta_s as u64, cfg.c_cs())
}

/// Upper bound `|Γ|·(1 + max t_e)` on the number of active execution states.
pub fn execution_state_bound(cfg: &SystemConfig) -> u64 {
    let max_te = cfg.events.iter().filter_map(|e| e.exec_delay).max().unwrap_or(0) as u64;
    cfg.commands.len() as u64 * (1 + max_te)
}

fn storage_name(q: &[(String, u32)]) -> String {
    if q.is_empty() {
        return "ε".to_string();
    }
    let mut s = String::new();
    for (g, t) in q {
        let _ = write!(s, "({g},{t})");
    }
    s
}

/// `tick` on a storage sequence: entries at time zero leave, the rest age.
pub fn storage_tick(q: &[(String, u32)]) -> Vec<(String, u32)> {
    q.iter().filter(|e| e.1 > 0).map(|(g, t)| (g.clone(), t - 1)).collect()
}

/// Fetching `γ`: removes the first entry for `γ`, if any.
pub fn storage_fetch(q: &[(String, u32)], command: &str) -> Option<Vec<(String, u32)>> {
    let i = q.iter().position(|e| e.0 == command)?;
    let mut t = q.to_vec();
    t.remove(i);
    Some(t)
}

/// The FIFO command storage `CS`.
///
/// States are sequences of `(command, remaining storage time)`. `tick` erases
/// entries at time zero and decrements the rest; `γ_out` appends `(γ, Δ_s)`
/// (undefined at capacity `C_cs`); `γ` removes the earliest `γ` entry.
pub fn build_command_storage(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let cap = cfg.c_cs();
    let mut b = AutomatonBuilder::new("CS");
    b.event(EventLabel::tick());
    for g in cfg.commands.keys() {
        b.event(EventLabel::command(g));
        b.event(EventLabel::command_out(g));
    }
    let init: Vec<(String, u32)> = Vec::new();
    b.initial(&storage_name(&init));
    let mut seen: BTreeSet<Vec<(String, u32)>> = BTreeSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    while let Some(q) = queue.pop_front() {
        let src = storage_name(&q);
        let mut succ: Vec<(EventLabel, Vec<(String, u32)>)> = Vec::new();
        succ.push((EventLabel::tick(), storage_tick(&q)));
        for g in cfg.commands.keys() {
            if (q.len() as u64) < cap {
                let mut t = q.clone();
                t.push((g.clone(), cfg.delta_s));
                succ.push((EventLabel::command_out(g), t));
            }
            if let Some(t) = storage_fetch(&q, g) {
                succ.push((EventLabel::command(g), t));
            }
        }
        for (e, t) in succ {
            b.transition(&src, e, &storage_name(&t));
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    b.build()
}

fn execution_name(q: &[(String, i64)]) -> String {
    let parts: Vec<String> = q.iter().map(|(s, t)| format!("({s},{t})")).collect();
    format!("{{{}}}", parts.join(","))
}

/// The command execution module `CE`.
///
/// The idle state `{}` fetches a command `γ` and moves to
/// `γ^num = {(σ, t_e^σ) | σ ∈ γ}`. `tick` is defined when idle or while some
/// countdown is positive; a controllable event fires when its countdown is
/// exactly zero; uncontrollable events fire anywhere. Every firing returns
/// to idle.
pub fn build_command_execution(cfg: &SystemConfig) -> Result<Automaton> {
    cfg.validate()?;
    let uncontrollable = cfg.uncontrollable();
    let mut b = AutomatonBuilder::new("CE");
    b.event(EventLabel::tick());
    b.events(cfg.plant_events());
    b.events(cfg.commands.keys().map(|g| EventLabel::command(g)));
    let idle = execution_name(&[]);
    b.initial(&idle);
    b.transition(&idle, EventLabel::tick(), &idle);
    for u in &uncontrollable {
        b.transition(&idle, EventLabel::plain(u), &idle);
    }
    for (g, members) in &cfg.commands {
        let mut q: Vec<(String, i64)> = members
            .iter()
            .map(|s| {
                let te = cfg.exec_delay(s).ok_or_else(|| {
                    Error::invalid(format!("command `{g}` uses `{s}` which has no execution delay"))
                })?;
                Ok((s.clone(), te as i64))
            })
            .collect::<Result<_>>()?;
        b.transition(&idle, EventLabel::command(g), &execution_name(&q));
        loop {
            let name = execution_name(&q);
            for u in &uncontrollable {
                b.transition(&name, EventLabel::plain(u), &idle);
            }
            for (s, _) in q.iter().filter(|e| e.1 == 0) {
                b.transition(&name, EventLabel::plain(s), &idle);
            }
            if !q.iter().any(|e| e.1 > 0) {
                break;
            }
            let next: Vec<(String, i64)> = q.iter().map(|(s, t)| (s.clone(), t - 1)).collect();
            b.transition(&name, EventLabel::tick(), &execution_name(&next));
            q = next;
        }
    }
    b.build()
}

/// For every state of `ce`, the event set of the command in use, or `None`
/// when idle. Derived from the structure: commands fetched at the initial
/// state, followed along `tick`.
pub(crate) fn execution_commands(ce: &Automaton, cfg: &SystemConfig) -> Result<Vec<Option<BTreeSet<String>>>> {
    let mut out: Vec<Option<BTreeSet<String>>> = vec![None; ce.state_count()];
    let tick = ce.event_id(&EventLabel::tick());
    for (g, members) in &cfg.commands {
        let e = ce.require_event(&EventLabel::command(g))?;
        for mut q in ce.successors(ce.initial(), e).collect::<Vec<_>>() {
            loop {
                if q == ce.initial() {
                    break;
                }
                match &out[q] {
                    Some(m) if m != members => {
                        return Err(Error::invalid(format!(
                            "execution state `{}` is shared by different commands",
                            ce.state_name(q)
                        )))
                    }
                    Some(_) => break,
                    None => out[q] = Some(members.clone()),
                }
                match tick.and_then(|t| ce.successors(q, t).next()) {
                    Some(n) => q = n,
                    None => break,
                }
            }
        }
    }
    Ok(out)
}

/// Names of plant events enabled at each state of `g`.
fn enabled_names(g: &Automaton) -> Vec<BTreeSet<String>> {
    g.states()
        .map(|q| g.enabled(q).into_iter().filter_map(|e| g.event(e).base().map(str::to_string)).collect())
        .collect()
}

/// `G_new`: the composition `CS || CE || G` with two prunings applied.
///
/// 1. States where `CE` is executing a command none of whose events is
///    enabled in `G` are deleted.
/// 2. `tick` is removed where `CE` is idle and some stored command shares an
///    event with those enabled in `G` (the command is fetched instead of
///    waiting).
///
/// The result is restricted to its reachable part and carries no marking.
pub fn compose_and_prune_plant(cs: &Automaton, ce: &Automaton, g: &Automaton, cfg: &SystemConfig) -> Result<Automaton> {
    let sigma = cfg.plant_events();
    if g.alphabet_set() != sigma {
        return Err(Error::Validation(format!(
            "plant alphabet {:?} differs from the configured event set {:?}",
            g.alphabet(),
            sigma
        )));
    }
    let active = execution_commands(ce, cfg)?;
    let en_g = enabled_names(g);
    // Com(s) per storage state: fetch events enabled there.
    let stored: Vec<Vec<&BTreeSet<String>>> = cs
        .states()
        .map(|s| {
            cs.enabled(s)
                .into_iter()
                .filter(|&e| cs.event(e).role() == Role::Command)
                .filter_map(|e| cfg.commands.get(cs.event(e).base().unwrap_or_default()))
                .collect()
        })
        .collect();
    let temp = ops::product(&[cs, ce, g]);
    let tick = temp.event_id(&EventLabel::tick());
    let parts = |p: StateId| {
        let t = temp.tuple(p).expect("product state");
        (t[0] as usize, t[1] as usize, t[2] as usize)
    };
    let keep_state = |p: StateId| {
        let (_, c, q) = parts(p);
        match &active[c] {
            Some(cmd) => cmd.iter().any(|s| en_g[q].contains(s)),
            None => true,
        }
    };
    let keep_edge = |p: StateId, e, _t| {
        if Some(e) != tick {
            return true;
        }
        let (s, c, q) = parts(p);
        !(active[c].is_none() && stored[s].iter().any(|cmd| cmd.iter().any(|x| en_g[q].contains(x))))
    };
    let pruned = temp.filter(keep_state, keep_edge).expect("initial state has an idle execution module");
    let unmarked = pruned.with_marked(&Default::default());
    Ok(unmarked.with_name("G_new"))
}

/// Reads a plant in the text format and checks it against the configuration.
///
/// Every plant event must be in `Σ`; missing events are added to the
/// alphabet. Every configured damage state must exist.
pub fn load_plant(path: impl AsRef<Path>, cfg: &SystemConfig) -> Result<Automaton> {
    let g = crate::text::read_file(path)?;
    check_plant(g, cfg)
}

pub fn check_plant(g: Automaton, cfg: &SystemConfig) -> Result<Automaton> {
    let sigma = cfg.plant_events();
    let stray: Vec<String> = g.alphabet().iter().filter(|e| !sigma.contains(*e)).map(|e| e.spelling()).collect();
    if !stray.is_empty() {
        return Err(Error::Validation(format!("plant `{}` uses events outside Σ: {}", g.name(), stray.join(" "))));
    }
    let g = g.extend_alphabet(sigma);
    damage_flags(&g, cfg)?;
    Ok(g)
}

/// Damage states of `g` as a flag vector.
pub fn damage_flags(g: &Automaton, cfg: &SystemConfig) -> Result<Vec<bool>> {
    let mut flags = vec![false; g.state_count()];
    let index: HashMap<String, StateId> = g.states().map(|q| (g.state_name(q), q)).collect();
    for d in &cfg.damage {
        let q = index
            .get(d)
            .ok_or_else(|| Error::Validation(format!("damage state `{d}` is not a state of plant `{}`", g.name())))?;
        flags[*q] = true;
    }
    Ok(flags)
}

/// Fails if `g_new` has a cycle made only of non-tick events.
pub fn check_activity_loop_free(g_new: &Automaton) -> Result<()> {
    longest_untimed_run(g_new).map(|_| ())
}

/// Largest number of plant events fired between two ticks in `g_new`.
pub fn max_events_per_tick(g_new: &Automaton) -> Result<u64> {
    longest_untimed_run(g_new)
}

fn longest_untimed_run(a: &Automaton) -> Result<u64> {
    // Iterative DFS with colours over the non-tick subgraph; longest path
    // counts plant events only.
    let n = a.state_count();
    let weight: Vec<Option<u64>> =
        a.alphabet().iter().map(|e| if e.is_tick() { None } else { Some((e.role() == Role::Plain) as u64) }).collect();
    let mut colour = vec![0u8; n];
    let mut best = vec![0u64; n];
    for root in a.states() {
        if colour[root] != 0 {
            continue;
        }
        let mut stack: Vec<(StateId, usize)> = vec![(root, 0)];
        colour[root] = 1;
        while let Some(&mut (q, ref mut i)) = stack.last_mut() {
            let row = a.transitions(q);
            if *i < row.len() {
                let (e, t) = row[*i];
                *i += 1;
                if weight[e].is_none() {
                    continue;
                }
                match colour[t] {
                    0 => {
                        colour[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => {
                        return Err(Error::Validation(format!(
                            "`{}` has a cycle of non-tick events through `{}`",
                            a.name(),
                            a.state_name(t)
                        )))
                    }
                    _ => {}
                }
            } else {
                let mut m = 0;
                for &(e, t) in row {
                    if let Some(w) = weight[e] {
                        m = m.max(w + best[t]);
                    }
                }
                best[q] = m;
                colour[q] = 2;
                stack.pop();
            }
        }
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// A warning when `g_new` can fire more than `N_f` plant events per tick.
pub fn rate_warning(g_new: &Automaton, cfg: &SystemConfig) -> Result<Option<String>> {
    let m = max_events_per_tick(g_new)?;
    Ok((m > cfg.rates.n_f).then(|| {
        format!("warning: the plant can fire {m} events within one tick, above the configured n_f={}", cfg.rates.n_f)
    }))
}
