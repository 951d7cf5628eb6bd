//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use netdes::attacker::{forwarding_attacker, validate_attack};
use netdes::channels::{build_observation_channel, enumerate_channel_states, word_space};
use netdes::config::{EventSpec, RateBounds};
use netdes::pipeline::{build_components, cmd_capacity};
use netdes::supervision::detection_state;
use netdes::synthesis::{
    check_local_maximality, closed_loop, language_included, synthesize_attack_supervisor, verify_covert,
    AttackOutcome, SynthesisMode,
};
use netdes::{ops, EventLabel, SystemConfig};
use proptest::test_runner::{Config, TestRunner};

const CAPACITY_LIMIT: Duration = Duration::from_secs(1);
const SIZE_LIMIT: Duration = Duration::from_secs(5);
const SYNTHESIS_LIMIT: Duration = Duration::from_secs(600);
const MAXIMALITY_LIMIT: Duration = Duration::from_secs(600);
const INCLUSION_DEPTH: usize = 12;
const KERNEL_CASES: u32 = 500;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn criterion(
    id: u32,
    title: &str,
    limit: Option<Duration>,
    failures: &mut u32,
    f: impl FnOnce() -> Outcome + std::panic::UnwindSafe,
) {
    let start = Instant::now();
    let out = std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        check(false, format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let ok = out.ok && in_time;
    if !ok {
        *failures += 1;
    }
    let budget = limit.map(|l| format!(" <= {:.0?}", l)).unwrap_or_default();
    println!(
        "{} [{id}] {title}: {} ({:.3?}{budget})",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
}

/// Number of sequences of length at most `cap` over `letters` symbols.
fn sequences(letters: u128, cap: u32) -> u128 {
    (0..=cap).map(|i| letters.pow(i)).sum()
}

/// Multisets of size at most `cap` over `kinds` symbols, by enumeration.
fn multisets(kinds: usize, cap: usize) -> usize {
    fn go(kinds: usize, left: usize, first: usize) -> usize {
        let mut n = 1;
        if left > 0 {
            for k in first..kinds {
                n += go(kinds, left - 1, k);
            }
        }
        n
    }
    go(kinds, cap, 0)
}

fn main() {
    let mut failures = 0;

    criterion(1, "capacity formulas", Some(CAPACITY_LIMIT), &mut failures, || {
        let cfg = workspace("guideway").cfg;
        let line = cmd_capacity(&cfg);
        check(line == "C_oc=2 C_cc=3 C_cs=3", line)
    });

    criterion(2, "state sizes", Some(SIZE_LIMIT), &mut failures, || {
        let b = built("guideway");
        let cfg = &b.cfg;
        let k_o = cfg.observable().len();
        let k_c = cfg.commands.len();
        let oc_full = sequences((k_o * (cfg.delta_o as usize + 1)) as u128, cfg.c_oc() as u32);
        let cc_full = sequences((k_c * (cfg.delta_c as usize + 1)) as u128, cfg.c_cc() as u32);
        let obs: Vec<String> = cfg.observable().into_iter().collect();
        let obs: Vec<&str> = obs.iter().map(String::as_str).collect();
        let cmds: Vec<&str> = cfg.command_names().collect();
        let oc_words = word_space(&obs, cfg.delta_o, cfg.c_oc()).len() as u128;
        let cc_words = word_space(&cmds, cfg.delta_c, cfg.c_cc()).len() as u128;
        let oc_formula = enumerate_channel_states(k_o as u64, cfg.delta_o as u64, cfg.c_oc());
        let cc_formula = enumerate_channel_states(k_c as u64, cfg.delta_c as u64, cfg.c_cc());
        let oc_ms = multisets(k_o * (cfg.delta_o as usize + 1), cfg.c_oc() as usize);
        let cc_ms = multisets(k_c * (cfg.delta_c as usize + 1), cfg.c_cc() as usize);
        let cs_bound = sequences((k_c * (cfg.delta_s as usize + 1)) as u128, cfg.c_cs() as u32);
        let max_te = cfg.events.iter().filter_map(|e| e.exec_delay).max().unwrap_or(0) as usize;
        let ce_bound = k_c * (1 + max_te);
        let ok = b.ac.state_count() == 3
            && (oc_full, oc_words, oc_formula) == (73, 73, 73)
            && (cc_full, cc_words, cc_formula) == (40, 40, 40)
            && b.oc.state_count() == oc_ms
            && b.cc.state_count() == cc_ms
            && b.cs.state_count() as u128 <= cs_bound
            && b.ce.state_count() - 1 <= ce_bound
            && b.size_report().ok();
        check(
            ok,
            format!(
                "|Q_ac|={} OC full={oc_words} (constructed multisets {}) CC full={cc_words} (constructed multisets {}) \
                 CS={}<={cs_bound} CE active={}<={ce_bound}",
                b.ac.state_count(),
                b.oc.state_count(),
                b.cc.state_count(),
                b.cs.state_count(),
                b.ce.state_count() - 1
            ),
        )
    });

    criterion(3, "non-FIFO exit from {(a,0),(a,1),(b,1)}", None, &mut failures, || {
        let ev = |n: &str| EventSpec {
            name: n.into(),
            controllable: false,
            observable: true,
            attacker_observable: true,
            compromised: false,
            exec_delay: None,
        };
        let cfg = SystemConfig {
            events: vec![ev("a"), ev("b")],
            delta_o: 1,
            rates: RateBounds { n_f: 1, u: 2, v: 1 },
            ..Default::default()
        };
        let oc = build_observation_channel(&cfg).unwrap();
        let q = oc.find_state("{(a,0),(a,1),(b,1)}").expect("state is reachable");
        let succ = |e: EventLabel| -> BTreeSet<String> {
            oc.event_id(&e).map(|id| oc.successors(q, id).map(|t| oc.state_name(t)).collect()).unwrap_or_default()
        };
        let a_out = succ(EventLabel::exit("a"));
        let b_out = succ(EventLabel::exit("b"));
        let tick = succ(EventLabel::tick());
        let expected: BTreeSet<String> = ["{(a,0),(b,1)}", "{(a,1),(b,1)}"].map(String::from).into();
        check(
            a_out == expected && b_out.len() == 1 && tick.is_empty(),
            format!("a_out -> {a_out:?}, b_out -> {b_out:?}, tick -> {tick:?}"),
        )
    });

    criterion(4, "guideway nonblocking attack", Some(SYNTHESIS_LIMIT), &mut failures, || {
        let b = built("guideway");
        let p = b.problem().unwrap();
        let Some(sup) = synthesize_attack_supervisor(&p, SynthesisMode::DamageNonblocking).unwrap() else {
            return check(false, "no attack synthesised");
        };
        let a = &sup.automaton;
        let covert = verify_covert(&p, a).unwrap().holds;
        let lp = closed_loop(&p, a).unwrap();
        let nonblocking = ops::is_nonblocking(&lp);
        let w = lockstep(&p.plant, a);
        let oracle_covert = w.pairs.iter().all(|&(q, _)| !p.bad.contains(q));
        let oracle_nonblocking = w.can_reach(|i| p.target.contains(w.pairs[i].0)).iter().all(|c| *c);
        let run = [
            EventLabel::command_in("v3"),
            EventLabel::command_out("v3"),
            EventLabel::command("v3"),
            EventLabel::plain("a1"),
            EventLabel::compromised("b1"),
            EventLabel::stop(),
            EventLabel::exit("b1"),
            EventLabel::command_in("v2"),
            EventLabel::command_out("v2"),
            EventLabel::command("v2"),
            EventLabel::plain("b1"),
        ];
        let mut q = Some(lp.initial());
        for e in &run {
            q = q.and_then(|q| step(&lp, q, e));
        }
        let g_state = q.map(|q| {
            let gn = p.plant.tuple(lp.tuple(q).unwrap()[0] as usize).unwrap()[0] as usize;
            b.g.state_name(b.g_new.tuple(gn).unwrap()[2] as usize)
        });
        check(
            covert && nonblocking && oracle_covert && oracle_nonblocking && g_state.as_deref() == Some("5"),
            format!(
                "|A|={} covert={covert} nonblocking={nonblocking} oracle=({oracle_covert},{oracle_nonblocking}) \
                 a1 answered by b1# reaches G state {}",
                a.state_count(),
                g_state.unwrap_or_else(|| "none (run blocked)".into())
            ),
        )
    });

    criterion(5, "reachable attack contains nonblocking attack", Some(SYNTHESIS_LIMIT), &mut failures, || {
        let p = built("guideway").problem().unwrap();
        let nb = synthesize_attack_supervisor(&p, SynthesisMode::DamageNonblocking).unwrap();
        let re = synthesize_attack_supervisor(&p, SynthesisMode::DamageReachable).unwrap();
        let (Some(nb), Some(re)) = (nb, re) else { return check(false, "an attack is missing") };
        let lib = language_included(&p, &nb.automaton, &re.automaton, Some(INCLUSION_DEPTH)).unwrap();
        let oracle = inclusion_counterexample(&p.plant, &nb.automaton, &re.automaton, INCLUSION_DEPTH);
        check(
            lib.holds && oracle.is_none(),
            format!(
                "|A_reach|={} |A_nb|={} depth {INCLUSION_DEPTH}: library {} oracle {}",
                re.automaton.state_count(),
                nb.automaton.state_count(),
                lib.holds,
                oracle.map_or("included".to_string(), |w| format!("counterexample {}", w.join(" ")))
            ),
        )
    });

    criterion(6, "attack-free loop never detected", None, &mut failures, || {
        let b = built("guideway");
        let p = b.problem().unwrap();
        let det = detection_state(&b.m).unwrap();
        let a = forwarding_attacker(&b.cfg).unwrap();
        let w = lockstep(&p.plant, &a);
        let detected = w.pairs.iter().filter(|&&(q, _)| p.plant.tuple(q).unwrap()[5] as usize == det).count();
        check(detected == 0, format!("{} reachable states, {detected} with monitor in ∅", w.pairs.len()))
    });

    criterion(7, "synthesised attacks validate", None, &mut failures, || {
        let mut outputs = 0;
        let mut bad = Vec::new();
        for name in fixtures() {
            for forwarded in [true, false] {
                let ws = workspace_with(&name, |c| c.count_forwarded = forwarded);
                let p = build_components(&ws).unwrap().problem().unwrap();
                for mode in [SynthesisMode::DamageNonblocking, SynthesisMode::DamageReachable] {
                    if let AttackOutcome::Attack(a) = netdes::synthesis::synthesize_supremal_attack(&p, mode).unwrap()
                    {
                        outputs += 1;
                        let r = validate_attack(&a, &p.constraint).unwrap();
                        if !r.is_valid() {
                            bad.push(format!("{name}/{mode}/{forwarded}: {}", r.violations.len()));
                        }
                    }
                }
            }
        }
        check(outputs > 0 && bad.is_empty(), format!("{outputs} outputs, violations: {bad:?}"))
    });

    criterion(8, "local maximality", Some(MAXIMALITY_LIMIT), &mut failures, || {
        let mut lines = Vec::new();
        let mut ok = true;
        for (name, mode) in [
            ("guideway", SynthesisMode::DamageNonblocking),
            ("guideway", SynthesisMode::DamageReachable),
            ("single_train", SynthesisMode::DamageReachable),
        ] {
            let p = built(name).problem().unwrap();
            let sup = synthesize_attack_supervisor(&p, mode).unwrap().unwrap();
            let edits = check_local_maximality(&p, &sup, mode).unwrap();
            let harmless = edits.iter().filter(|e| !e.breaks_something()).count();
            ok &= !edits.is_empty() && harmless == 0;
            lines.push(format!("{name}/{mode}: {} edits, {harmless} harmless", edits.len()));
        }
        check(ok, lines.join("; "))
    });

    criterion(9, "kernel properties", None, &mut failures, || {
        use common::kernel::*;
        let cfg = Config { cases: KERNEL_CASES, failure_persistence: None, ..Config::default() };
        let mut results = Vec::new();
        let mut run = |name: &str, r: Result<(), String>| results.push((name.to_string(), r));
        run(
            "observer determinism",
            TestRunner::new(cfg.clone())
                .run(&(spec(), 0u8..8), |(s, m)| observer_is_deterministic(&s, m))
                .map_err(|e| e.to_string()),
        );
        run(
            "projection language",
            TestRunner::new(cfg.clone())
                .run(&(spec(), 0u8..8), |(s, m)| observer_language_is_the_projection(&s, m))
                .map_err(|e| e.to_string()),
        );
        run(
            "product commutativity",
            TestRunner::new(cfg.clone()).run(&(spec(), spec()), |(x, y)| product_commutes(&x, &y)).map_err(|e| e.to_string()),
        );
        run(
            "product associativity",
            TestRunner::new(cfg.clone())
                .run(&(spec(), spec(), spec()), |(x, y, z)| product_associates(&x, &y, &z))
                .map_err(|e| e.to_string()),
        );
        run(
            "text round trip",
            TestRunner::new(cfg.clone()).run(&spec(), |s| text_round_trip(&s)).map_err(|e| e.to_string()),
        );
        let failed: Vec<String> =
            results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
        check(
            failed.is_empty(),
            if failed.is_empty() {
                format!("{} properties x {KERNEL_CASES} instances", results.len())
            } else {
                failed.join("; ")
            },
        )
    });

    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
}
