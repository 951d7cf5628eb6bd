//! Supremal covert damage-nonblocking attack on the guideway, with its
//! certificate and the replacement run that drives the plant to state 5.

use netdes::pipeline::{build_components, Workspace};
use netdes::synthesis::{certify, closed_loop, synthesize_supremal_attack, AttackOutcome, SynthesisMode};
use netdes::EventLabel;

fn main() -> netdes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway");
    let ws = Workspace::load(format!("{dir}/config.txt"), format!("{dir}/plant.fsa"), format!("{dir}/ns.fsa"))?;
    let built = build_components(&ws)?;
    let problem = built.problem()?;
    println!(
        "P: {} states, {} bad, {} damage",
        problem.plant.state_count(),
        problem.bad.len(),
        problem.target.len()
    );

    let AttackOutcome::Attack(attack) = synthesize_supremal_attack(&problem, SynthesisMode::DamageNonblocking)? else {
        println!("no covert attack");
        return Ok(());
    };
    println!("A: {} states, {} transitions", attack.state_count(), attack.transition_count());
    print!("{}", certify(&problem, &attack)?);

    let lp = closed_loop(&problem, &attack)?;
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
    let mut q = lp.initial();
    for e in &run {
        q = lp.successors(q, lp.event_id(e).unwrap()).next().expect("run allowed by the attack");
    }
    let g_new_state = problem.plant.tuple(lp.tuple(q).unwrap()[0] as usize).unwrap()[0] as usize;
    let g_state = built.g_new.tuple(g_new_state).unwrap()[2] as usize;
    let spelled: Vec<String> = run.iter().map(EventLabel::spelling).collect();
    println!("{} => plant state {}", spelled.join(" "), built.g.state_name(g_state));
    Ok(())
}
