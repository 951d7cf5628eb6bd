//! Command storage, command execution and the pruned plant `G_new` of the
//! guideway.

use netdes::plant::{
    build_command_execution, build_command_storage, compose_and_prune_plant, load_plant, max_events_per_tick,
};
use netdes::SystemConfig;

fn main() -> netdes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway");
    let cfg = SystemConfig::read_file(format!("{dir}/config.txt"))?;
    let g = load_plant(format!("{dir}/plant.fsa"), &cfg)?;

    let cs = build_command_storage(&cfg)?;
    let ce = build_command_execution(&cfg)?;
    println!("CS: {} states (capacity {})", cs.state_count(), cfg.c_cs());
    println!("CE: {} states", ce.state_count());
    for q in ce.states() {
        let out: Vec<String> =
            ce.transitions(q).iter().map(|&(e, t)| format!("{}->{}", ce.event(e), ce.state_name(t))).collect();
        println!("  {}: {}", ce.state_name(q), out.join(" "));
    }

    let g_new = compose_and_prune_plant(&cs, &ce, &g, &cfg)?;
    println!("G: {} states, G_new: {} states", g.state_count(), g_new.state_count());
    println!("most plant events between two ticks: {}", max_events_per_tick(&g_new)?);
    Ok(())
}
