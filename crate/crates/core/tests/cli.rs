mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture_dir;

fn netdes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netdes")).args(args).output().unwrap()
}

fn with_fixture<'a>(name: &str, extra: &[&'a str], out: &'a Path) -> Vec<String> {
    let d = fixture_dir(name);
    let mut v: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    for (flag, file) in [("--config", "config.txt"), ("--plant", "plant.fsa"), ("--ns", "ns.fsa")] {
        v.push(flag.into());
        v.push(d.join(file).to_string_lossy().into_owned());
    }
    v.push("--out".into());
    v.push(out.to_string_lossy().into_owned());
    v
}

fn run(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    netdes(&refs)
}

#[test]
fn capacity_reports_all_three() {
    let cfg = fixture_dir("guideway").join("config.txt");
    let o = netdes(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "C_oc=2 C_cc=3 C_cs=3");
}

#[test]
fn malformed_config_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    std::fs::write(&cfg, "[parameters] delta_o=x\n").unwrap();
    let o = netdes(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(netdes(&["capacity"]).status.code(), Some(1));
    assert_eq!(netdes(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(netdes(&["synthesize", "--mode", "sometimes"]).status.code(), Some(1));
}

#[test]
fn build_writes_components_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for out in [a.path(), b.path()] {
        let o = run(&with_fixture("guideway", &["build"], out));
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let stems = ["AC", "OC", "OC_T", "CC", "CS", "CE", "G_new", "M"];
    for stem in stems {
        let f = format!("{stem}.fsa");
        let x = std::fs::read(a.path().join(&f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(&f)).unwrap(), "{f} differs between runs");
        let parsed = netdes::text::parse(&String::from_utf8(x).unwrap()).unwrap();
        assert!(parsed.state_count() > 0);
    }
    let report = std::fs::read_to_string(a.path().join("report.txt")).unwrap();
    assert!(report.contains("AC: 3 states"));
    assert!(report.contains("OC: 45 states"));
}

#[test]
fn build_rejects_uncontrollable_ns() {
    let dir = tempfile::tempdir().unwrap();
    let ns = std::fs::read_to_string(fixture_dir("guideway").join("ns.fsa")).unwrap();
    let broken: String = ns.lines().filter(|l| *l != ".trans N1 tick N1").map(|l| format!("{l}\n")).collect();
    let path = dir.path().join("ns.fsa");
    std::fs::write(&path, broken).unwrap();
    let mut args = with_fixture("guideway", &["build"], dir.path());
    let i = args.iter().position(|a| a == "--ns").unwrap();
    args[i + 1] = path.to_string_lossy().into_owned();
    let o = run(&args);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("N1") && err.contains("tick"), "{err}");
}

#[test]
fn synthesize_and_verify_round_trip() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&with_fixture("guideway", &["synthesize", "--mode", "nonblocking"], out.path()));
    assert_eq!(o.status.code(), Some(0));
    let cert = std::fs::read_to_string(out.path().join("certificate.txt")).unwrap();
    assert!(cert.contains("covert: true"));
    assert!(cert.contains("damage-nonblocking: true"));

    let attack = out.path().join("attack.fsa");
    let o = run(&with_fixture("guideway", &["verify", "--attack", attack.to_str().unwrap()], out.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("covert: true"));
}

#[test]
fn no_attack_exits_3() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&with_fixture("single_train", &["synthesize", "--mode", "nonblocking"], out.path()));
    assert_eq!(o.status.code(), Some(3));
    let o = run(&with_fixture("single_train", &["synthesize", "--mode", "reachable"], out.path()));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn forwarding_switch_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    for switch in ["on", "off"] {
        let o = run(&with_fixture("guideway", &["build", "--count-forwarded-event", switch], dir.path()));
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(netdes(&["capacity", "--count-forwarded-event", "maybe"]).status.code(), Some(1));
}

#[test]
fn export_dot_renders_plant() {
    let out = tempfile::tempdir().unwrap();
    let dot = out.path().join("g.dot");
    let plant = fixture_dir("guideway").join("plant.fsa");
    let o = netdes(&["export-dot", plant.to_str().unwrap(), "--out", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert_eq!(text.matches(" -> ").count(), 20);
    assert_eq!(text.matches("label=\"").count() - text.matches(" -> ").count(), 16);
}
