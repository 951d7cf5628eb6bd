//! The networked monitor of the guideway: it follows genuine observation
//! sequences and falls into `∅` on one no attack-free run can produce.

use netdes::pipeline::{build_components, Workspace};
use netdes::supervision::detection_state;
use netdes::EventLabel;

fn run(m: &netdes::Automaton, word: &[EventLabel]) -> String {
    let mut q = m.initial();
    for e in word {
        let id = m.event_id(e).expect("monitor event");
        match m.successors(q, id).next() {
            Some(t) => q = t,
            None => return format!("{e} undefined"),
        }
    }
    format!("{} plausible closed-loop states", m.members(q).map_or(0, <[u32]>::len))
}

fn main() -> netdes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway");
    let ws = Workspace::load(format!("{dir}/config.txt"), format!("{dir}/plant.fsa"), format!("{dir}/ns.fsa"))?;
    let built = build_components(&ws)?;
    let m = &built.m;
    println!("M: {} states, detection state {:?}", m.state_count(), detection_state(m).map(|q| m.state_name(q)));

    let v3 = EventLabel::command_in("v3");
    let genuine = [v3.clone(), EventLabel::exit("b1")];
    let forged = [v3, EventLabel::exit("a3")];
    println!("v3_in b1_out: {}", run(m, &genuine));
    println!("v3_in a3_out: {}", run(m, &forged));
    Ok(())
}
