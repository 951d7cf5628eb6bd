//! End-to-end workflows behind the command-line tool.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::attacker::{build_attack_constraints, validate_attack, AttackControlConstraint, ConstraintReport};
use crate::automaton::Automaton;
use crate::channels::{build_control_channel, build_observation_channel, relabel_to_attack_free};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::plant::{
    build_command_execution, build_command_storage, check_activity_loop_free, compose_and_prune_plant, load_plant,
    rate_warning,
};
use crate::supervision::{build_monitor, monitor_bound_log2, validate_networked_supervisor};
use crate::synthesis::{
    build_problem, certify, state_size_report, synthesize_attack_supervisor, Certificate, SizeReport,
    SynthesisMode, SynthesisProblem,
};
use crate::text;

/// Loaded inputs: configuration, plant and networked supervisor.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub cfg: SystemConfig,
    pub g: Automaton,
    pub ns: Automaton,
}

impl Workspace {
    pub fn load(config: impl AsRef<Path>, plant: impl AsRef<Path>, ns: impl AsRef<Path>) -> Result<Workspace> {
        let cfg = SystemConfig::read_file(config)?;
        Workspace::from_config(cfg, plant, ns)
    }

    pub fn from_config(cfg: SystemConfig, plant: impl AsRef<Path>, ns: impl AsRef<Path>) -> Result<Workspace> {
        cfg.validate()?;
        let g = load_plant(plant, &cfg)?;
        let ns = text::read_file(ns)?;
        Ok(Workspace { cfg, g, ns })
    }
}

/// Every component automaton of the attacked closed loop.
#[derive(Clone, Debug)]
pub struct Built {
    pub cfg: SystemConfig,
    pub g: Automaton,
    pub ns: Automaton,
    pub ac: Automaton,
    pub oc: Automaton,
    pub oc_t: Automaton,
    pub cc: Automaton,
    pub cs: Automaton,
    pub ce: Automaton,
    pub g_new: Automaton,
    pub m: Automaton,
    pub warnings: Vec<String>,
}

impl Built {
    pub fn problem(&self) -> Result<SynthesisProblem> {
        build_problem(&self.g_new, &self.ac, &self.oc, &self.ns, &self.cc, &self.m, &self.cfg)
    }

    pub fn size_report(&self) -> SizeReport {
        let bound = monitor_bound_log2(&self.ns, &self.g_new, &self.oc_t, &self.cc);
        state_size_report(&self.cfg, &self.ac, &self.oc, &self.cc, &self.cs, &self.ce, Some((&self.m, bound)))
    }

    /// Components in output order with their file stems.
    pub fn components(&self) -> [(&'static str, &Automaton); 8] {
        [
            ("AC", &self.ac),
            ("OC", &self.oc),
            ("OC_T", &self.oc_t),
            ("CC", &self.cc),
            ("CS", &self.cs),
            ("CE", &self.ce),
            ("G_new", &self.g_new),
            ("M", &self.m),
        ]
    }
}

pub fn build_components(ws: &Workspace) -> Result<Built> {
    let cfg = &ws.cfg;
    validate_networked_supervisor(&ws.ns, cfg)?.into_result()?;
    let cs = build_command_storage(cfg)?;
    let ce = build_command_execution(cfg)?;
    let g_new = compose_and_prune_plant(&cs, &ce, &ws.g, cfg)?;
    check_activity_loop_free(&g_new)?;
    let warnings = rate_warning(&g_new, cfg)?.into_iter().collect();
    let oc = build_observation_channel(cfg)?;
    let oc_t = relabel_to_attack_free(&oc)?;
    let cc = build_control_channel(cfg)?;
    let ac = build_attack_constraints(cfg)?;
    let m = build_monitor(&ws.ns, &g_new, &oc_t, &cc)?;
    Ok(Built {
        cfg: cfg.clone(),
        g: ws.g.clone(),
        ns: ws.ns.clone(),
        ac,
        oc,
        oc_t,
        cc,
        cs,
        ce,
        g_new,
        m,
        warnings,
    })
}

/// `C_oc=… C_cc=… C_cs=…`.
pub fn cmd_capacity(cfg: &SystemConfig) -> String {
    format!("C_oc={} C_cc={} C_cs={}", cfg.c_oc(), cfg.c_cc(), cfg.c_cs())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes every component to `out/<NAME>.fsa` plus `out/report.txt`, and
/// returns the report.
pub fn cmd_build(ws: &Workspace, out: &Path) -> Result<String> {
    let built = build_components(ws)?;
    ensure_dir(out)?;
    let mut report = String::new();
    for (stem, a) in built.components() {
        text::write_file(a, out.join(format!("{stem}.fsa")))?;
        let _ = writeln!(report, "{stem}: {} states, {} transitions", a.state_count(), a.transition_count());
    }
    report.push('\n');
    report.push_str(&built.size_report().to_string());
    for w in &built.warnings {
        let _ = writeln!(report, "{w}");
    }
    write(out.join("report.txt"), &report)?;
    Ok(report)
}

/// Result of `synthesize`.
#[derive(Clone, Debug)]
pub enum SynthesizeOutput {
    Attack { attack: Automaton, certificate: Certificate },
    NoAttack,
}

/// Synthesises the supremal attack for `mode` and writes `attack.fsa` and
/// `certificate.txt` into `out`.
pub fn cmd_synthesize(ws: &Workspace, mode: SynthesisMode, out: &Path) -> Result<SynthesizeOutput> {
    let built = build_components(ws)?;
    let problem = built.problem()?;
    let Some(sup) = synthesize_attack_supervisor(&problem, mode)? else {
        return Ok(SynthesizeOutput::NoAttack);
    };
    let attack = sup.automaton;
    let certificate = certify(&problem, &attack)?;
    ensure_dir(out)?;
    text::write_file(&attack, out.join("attack.fsa"))?;
    write(out.join("certificate.txt"), &format!("mode: {mode}\n{certificate}"))?;
    Ok(SynthesizeOutput::Attack { attack, certificate })
}

/// Checks an attack file against the attack control constraint and the
/// closed-loop properties.
pub fn cmd_verify(ws: &Workspace, attack_path: &Path) -> Result<(ConstraintReport, Certificate)> {
    let attack = text::read_file(attack_path)?;
    let built = build_components(ws)?;
    let constraint = AttackControlConstraint::new(&ws.cfg);
    let report = validate_attack(&attack, &constraint)?;
    report.clone().into_result()?;
    let certificate = certify(&built.problem()?, &attack)?;
    Ok((report, certificate))
}

/// Renders an automaton file as DOT into `out`.
pub fn cmd_export_dot(file: &Path, out: &Path) -> Result<()> {
    let a = text::read_file(file)?;
    crate::dot::write_dot(&a, out)
}
