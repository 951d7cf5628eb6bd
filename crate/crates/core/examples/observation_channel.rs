//! The non-FIFO observation channel: from `{(a,0),(a,1),(b,1)}` the copy of
//! `a` at either delay may leave first, and time cannot advance while a
//! message is due.

use netdes::channels::build_observation_channel;
use netdes::config::{EventSpec, RateBounds};
use netdes::{EventLabel, SystemConfig};

fn main() -> netdes::Result<()> {
    let event = |name: &str| EventSpec {
        name: name.into(),
        controllable: false,
        observable: true,
        attacker_observable: true,
        compromised: false,
        exec_delay: None,
    };
    let cfg = SystemConfig {
        events: vec![event("a"), event("b")],
        delta_o: 1,
        rates: RateBounds { n_f: 1, u: 2, v: 1 },
        ..Default::default()
    };
    let oc = build_observation_channel(&cfg)?;
    println!("OC: {} states, {} transitions", oc.state_count(), oc.transition_count());

    let q = oc.find_state("{(a,0),(a,1),(b,1)}").expect("reachable");
    for e in [EventLabel::exit("a"), EventLabel::exit("b"), EventLabel::tick()] {
        let id = oc.event_id(&e).unwrap();
        let succ: Vec<String> = oc.successors(q, id).map(|t| oc.state_name(t)).collect();
        println!("{} --{}--> [{}]", oc.state_name(q), e, succ.join(", "));
    }
    Ok(())
}
