//! Channel and storage capacities and the state-space sizes they imply.

use netdes::channels::{capacity_control, capacity_observation, enumerate_channel_states, multiset_space, word_space};
use netdes::plant::capacity_storage;
use netdes::SystemConfig;

fn main() -> netdes::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway/config.txt");
    let cfg = SystemConfig::read_file(path)?;
    let (n_f, u, v) = (cfg.rates.n_f, cfg.rates.u, cfg.rates.v);
    let (d_o, d_c, d_s) = (cfg.delta_o as u64, cfg.delta_c as u64, cfg.delta_s as u64);

    let c_oc = capacity_observation(n_f, u, d_o);
    let c_cc = capacity_control(n_f, u, v, d_o, d_c);
    let c_cs = capacity_storage(n_f, u, v, d_o, d_c, d_s);
    println!("C_oc={c_oc} C_cc={c_cc} C_cs={c_cs}");

    let observed: Vec<String> = cfg.observable().into_iter().collect();
    let observed: Vec<&str> = observed.iter().map(String::as_str).collect();
    let commands: Vec<&str> = cfg.command_names().collect();
    for (name, msgs, delta, cap) in [("OC", &observed, cfg.delta_o, c_oc), ("CC", &commands, cfg.delta_c, c_cc)] {
        println!(
            "{name}: formula {}  enumerated words {}  distinct multisets {}",
            enumerate_channel_states(msgs.len() as u64, delta as u64, cap),
            word_space(msgs, delta, cap).len(),
            multiset_space(msgs, delta, cap).len()
        );
    }
    Ok(())
}
