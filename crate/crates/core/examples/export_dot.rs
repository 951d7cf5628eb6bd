//! Renders the guideway plant as Graphviz DOT on standard output.

use netdes::dot::to_dot;
use netdes::plant::load_plant;
use netdes::SystemConfig;

fn main() -> netdes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/guideway");
    let cfg = SystemConfig::read_file(format!("{dir}/config.txt"))?;
    let g = load_plant(format!("{dir}/plant.fsa"), &cfg)?;
    print!("{}", to_dot(&g));
    Ok(())
}
