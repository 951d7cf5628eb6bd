use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use netdes::pipeline::{self, SynthesizeOutput, Workspace};
use netdes::synthesis::SynthesisMode;
use netdes::{Error, SystemConfig};

#[derive(Parser)]
#[command(name = "netdes", version, about = "Covert sensor-attack synthesis for networked DES")]
struct Cli {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    plant: Option<PathBuf>,
    #[arg(long, global = true)]
    ns: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Whether a forwarded compromised event counts towards the attack rounds.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    count_forwarded_event: Switch,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nonblocking,
    Reachable,
}

#[derive(Subcommand)]
enum Command {
    /// Print the channel and storage capacities.
    Capacity,
    /// Build every component automaton.
    Build,
    /// Synthesise the supremal covert attack.
    Synthesize {
        #[arg(long, value_enum, default_value_t = Mode::Nonblocking)]
        mode: Mode,
    },
    /// Check an attack automaton.
    Verify {
        #[arg(long)]
        attack: PathBuf,
    },
    /// Render an automaton file as Graphviz DOT.
    ExportDot { file: PathBuf },
}

enum Failure {
    Usage(String),
    Lib(Error),
    NoAttack(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref().ok_or_else(|| Failure::Usage(format!("missing required option --{flag}")))
}

fn config(cli: &Cli) -> Result<SystemConfig, Failure> {
    let mut cfg = SystemConfig::read_file(need(&cli.config, "config")?)?;
    cfg.count_forwarded = matches!(cli.count_forwarded_event, Switch::On);
    Ok(cfg)
}

fn workspace(cli: &Cli) -> Result<Workspace, Failure> {
    let cfg = config(cli)?;
    Ok(Workspace::from_config(cfg, need(&cli.plant, "plant")?, need(&cli.ns, "ns")?)?)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Capacity => {
            let cfg = config(cli)?;
            cfg.validate()?;
            println!("{}", pipeline::cmd_capacity(&cfg));
        }
        Command::Build => {
            let ws = workspace(cli)?;
            print!("{}", pipeline::cmd_build(&ws, &out_dir(cli))?);
        }
        Command::Synthesize { mode } => {
            let ws = workspace(cli)?;
            let mode = match mode {
                Mode::Nonblocking => SynthesisMode::DamageNonblocking,
                Mode::Reachable => SynthesisMode::DamageReachable,
            };
            match pipeline::cmd_synthesize(&ws, mode, &out_dir(cli))? {
                SynthesizeOutput::Attack { attack, certificate } => {
                    println!("{} states, {} transitions", attack.state_count(), attack.transition_count());
                    print!("{certificate}");
                }
                SynthesizeOutput::NoAttack => {
                    return Err(Failure::NoAttack(format!("no covert damage-{mode} attack exists")));
                }
            }
        }
        Command::Verify { attack } => {
            let ws = workspace(cli)?;
            let (report, certificate) = pipeline::cmd_verify(&ws, attack)?;
            print!("{report}");
            print!("{certificate}");
            if !certificate.covert.holds {
                return Err(Failure::NoAttack("the attack is not covert".into()));
            }
        }
        Command::ExportDot { file } => {
            let out = cli.out.clone().unwrap_or_else(|| file.with_extension("dot"));
            pipeline::cmd_export_dot(file, &out)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::NoAttack(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Io { .. } => 1,
                Error::Invalid(_) | Error::Validation(_) => 2,
            })
        }
    }
}
