//! Synthesises a networked supervisor for the guideway from its
//! specification and compares it with the shipped hand-written one.

use std::collections::BTreeSet;
use std::path::PathBuf;

use netdes::channels::{build_control_channel, build_observation_channel, relabel_to_attack_free};
use netdes::plant::{build_command_execution, build_command_storage, compose_and_prune_plant, load_plant};
use netdes::supervision::{build_monitor, detection_state, synthesize_networked_supervisor};
use netdes::{ops, text, SystemConfig};

fn main() -> netdes::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/guideway");
    let cfg = SystemConfig::read_file(dir.join("config.txt"))?;
    let g = load_plant(dir.join("plant.fsa"), &cfg)?;
    let spec = text::read_file(dir.join("spec.fsa"))?;

    let cs = build_command_storage(&cfg)?;
    let ce = build_command_execution(&cfg)?;
    let g_new = compose_and_prune_plant(&cs, &ce, &g, &cfg)?;
    let oc_t = relabel_to_attack_free(&build_observation_channel(&cfg)?)?;
    let cc = build_control_channel(&cfg)?;

    let ns = synthesize_networked_supervisor(&g_new, &oc_t, &cc, &spec, &cfg)?;
    println!("synthesised NS: {} states, {} transitions", ns.state_count(), ns.transition_count());

    let m = build_monitor(&ns, &g_new, &oc_t, &cc)?;
    println!("its monitor: {} states, detection state present: {}", m.state_count(), detection_state(&m).is_some());

    let closed = ops::product(&[&g_new, &oc_t, &cc, &ns]);
    let visited: BTreeSet<usize> = closed
        .states()
        .map(|q| g_new.tuple(closed.tuple(q).unwrap()[0] as usize).unwrap()[2] as usize)
        .collect();
    let names: Vec<String> = visited.into_iter().map(|q| g.state_name(q)).collect();
    println!("plant states visited without attack: {}", names.join(" "));
    Ok(())
}
