//! Checks two hand-written attackers against the guideway: the one that
//! never tampers, and one that swaps the first observed `a1`/`b1`.

use netdes::attacker::{forwarding_attacker, validate_attack};
use netdes::pipeline::{build_components, Workspace};
use netdes::synthesis::certify;
use netdes::text;

fn main() -> netdes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway");
    let ws = Workspace::load(format!("{dir}/config.txt"), format!("{dir}/plant.fsa"), format!("{dir}/ns.fsa"))?;
    let built = build_components(&ws)?;
    let problem = built.problem()?;

    let forward = forwarding_attacker(&ws.cfg)?;
    let swap = text::read_file(format!("{dir}/swap_attack.fsa"))?;
    for a in [&forward, &swap] {
        let report = validate_attack(a, &problem.constraint)?;
        println!("{}: {} violation(s)", a.name(), report.violations.len());
        print!("{}", certify(&problem, a)?);
    }
    Ok(())
}
