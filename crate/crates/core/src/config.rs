//! System configuration: alphabet partitions, commands, delays and bounds.
//!
//! Text format (line oriented, `#` starts a comment token):
//!
//! ```text
//! [parameters] delta_o=1 delta_c=0 delta_s=0 n_f=1 u=1 v=1
//! [events]     a1 c o ao comp te=0
//!              a2 uc uo - - -
//! [commands]   v1 = a1
//! [damage]     5 10
//! ```
//!
//! Event columns: name, `c`/`uc`, `o`/`uo`, `ao`/`-` (attacker observable),
//! `comp`/`-` (compromised), `te=N`/`-` (execution delay, controllable only).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::event::EventLabel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventSpec {
    pub name: String,
    pub controllable: bool,
    pub observable: bool,
    pub attacker_observable: bool,
    pub compromised: bool,
    /// Ticks between fetching a command and being able to fire this event.
    pub exec_delay: Option<u32>,
}

/// Rate bounds of the closed loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RateBounds {
    /// Maximum number of plant events fired within one tick.
    pub n_f: u64,
    /// Maximum number of events the attacker sends per observation.
    pub u: u64,
    /// Maximum number of commands the supervisor sends per observation.
    pub v: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemConfig {
    pub events: Vec<EventSpec>,
    pub commands: BTreeMap<String, BTreeSet<String>>,
    pub delta_o: u32,
    pub delta_c: u32,
    pub delta_s: u32,
    pub rates: RateBounds,
    pub damage: BTreeSet<String>,
    /// When set (the default), an observed uncompromised event forwarded by
    /// the attacker counts toward its per-observation budget.
    pub count_forwarded: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            events: Vec::new(),
            commands: BTreeMap::new(),
            delta_o: 0,
            delta_c: 0,
            delta_s: 0,
            rates: RateBounds::default(),
            damage: BTreeSet::new(),
            count_forwarded: true,
        }
    }
}

impl SystemConfig {
    fn names_where(&self, f: impl Fn(&EventSpec) -> bool) -> BTreeSet<String> {
        self.events.iter().filter(|e| f(e)).map(|e| e.name.clone()).collect()
    }

    /// Σ
    pub fn sigma(&self) -> BTreeSet<String> {
        self.names_where(|_| true)
    }
    /// Σ_c
    pub fn controllable(&self) -> BTreeSet<String> {
        self.names_where(|e| e.controllable)
    }
    /// Σ_uc
    pub fn uncontrollable(&self) -> BTreeSet<String> {
        self.names_where(|e| !e.controllable)
    }
    /// Σ_o
    pub fn observable(&self) -> BTreeSet<String> {
        self.names_where(|e| e.observable)
    }
    /// Σ_uo
    pub fn unobservable(&self) -> BTreeSet<String> {
        self.names_where(|e| !e.observable)
    }
    /// Σ_o,a
    pub fn attacker_observable(&self) -> BTreeSet<String> {
        self.names_where(|e| e.attacker_observable)
    }
    /// Σ_s,a
    pub fn compromised(&self) -> BTreeSet<String> {
        self.names_where(|e| e.compromised)
    }

    pub fn event(&self, name: &str) -> Option<&EventSpec> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn exec_delay(&self, name: &str) -> Option<u32> {
        self.event(name).and_then(|e| e.exec_delay)
    }

    pub fn command_names(&self) -> impl Iterator<Item = &str> {
        self.commands.keys().map(String::as_str)
    }

    /// Capacity of the observation channel.
    pub fn c_oc(&self) -> u64 {
        crate::channels::capacity_observation(self.rates.n_f, self.rates.u, self.delta_o as u64)
    }

    /// Capacity of the control channel.
    pub fn c_cc(&self) -> u64 {
        crate::channels::capacity_control(
            self.rates.n_f,
            self.rates.u,
            self.rates.v,
            self.delta_o as u64,
            self.delta_c as u64,
        )
    }

    /// Capacity of the command storage.
    pub fn c_cs(&self) -> u64 {
        crate::plant::capacity_storage(
            self.rates.n_f,
            self.rates.u,
            self.rates.v,
            self.delta_o as u64,
            self.delta_c as u64,
            self.delta_s as u64,
        )
    }

    /// Plant events as labels (role `plain`).
    pub fn plant_events(&self) -> BTreeSet<EventLabel> {
        self.events.iter().map(|e| EventLabel::plain(&e.name)).collect()
    }

    /// The full alphabet shared by the attack constraints, the networked
    /// supervisor and every attack: Σ ∪ (Σ_o−Σ_s,a)^in ∪ Σ_s,a^# ∪ Σ_o^out ∪
    /// Γ^in ∪ Γ^out ∪ Γ ∪ {tick, stop}.
    pub fn full_alphabet(&self) -> BTreeSet<EventLabel> {
        let mut out = self.plant_events();
        for e in &self.events {
            if e.observable {
                out.insert(EventLabel::exit(&e.name));
                if e.compromised {
                    out.insert(EventLabel::compromised(&e.name));
                } else {
                    out.insert(EventLabel::entry(&e.name));
                }
            }
        }
        for g in self.commands.keys() {
            out.insert(EventLabel::command(g));
            out.insert(EventLabel::command_in(g));
            out.insert(EventLabel::command_out(g));
        }
        out.insert(EventLabel::tick());
        out.insert(EventLabel::stop());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for e in &self.events {
            EventLabel::new(crate::event::Role::Plain, Some(&e.name))?;
            if !seen.insert(e.name.as_str()) {
                return Err(Error::invalid(format!("event `{}` declared twice", e.name)));
            }
            if e.compromised && !e.attacker_observable {
                return Err(Error::invalid(format!("event `{}`: compromised events must be attacker-observable", e.name)));
            }
            if e.attacker_observable && !e.observable {
                return Err(Error::invalid(format!("event `{}`: attacker-observable events must be observable", e.name)));
            }
            match (e.controllable, e.exec_delay) {
                (true, None) => {
                    return Err(Error::invalid(format!("controllable event `{}` needs an execution delay", e.name)))
                }
                (false, Some(_)) => {
                    return Err(Error::invalid(format!(
                        "uncontrollable event `{}` cannot carry an execution delay",
                        e.name
                    )))
                }
                _ => {}
            }
        }
        for (g, members) in &self.commands {
            EventLabel::new(crate::event::Role::Command, Some(g))?;
            if seen.contains(g.as_str()) {
                return Err(Error::invalid(format!("command `{g}` clashes with an event name")));
            }
            if members.is_empty() {
                return Err(Error::invalid(format!("command `{g}` is empty")));
            }
            for m in members {
                match self.event(m) {
                    None => return Err(Error::invalid(format!("command `{g}` references unknown event `{m}`"))),
                    Some(e) if !e.controllable => {
                        return Err(Error::invalid(format!("command `{g}` contains uncontrollable event `{m}`")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<SystemConfig> {
        let mut cfg = SystemConfig::default();
        let mut section: Option<String> = None;
        let mut params: BTreeMap<String, (usize, u64)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut toks: Vec<&str> = raw.split_whitespace().take_while(|t| !t.starts_with('#')).collect();
            if toks.is_empty() {
                continue;
            }
            if let Some(h) = toks[0].strip_prefix('[') {
                let h = h
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line, format!("malformed section header `{}`", toks[0])))?;
                if !matches!(h, "parameters" | "events" | "commands" | "damage") {
                    return Err(Error::parse(line, format!("unknown section `[{h}]`")));
                }
                section = Some(h.to_string());
                toks.remove(0);
                if toks.is_empty() {
                    continue;
                }
            }
            match section.as_deref() {
                None => return Err(Error::parse(line, "content before any section header")),
                Some("parameters") => {
                    for t in toks {
                        let (k, v) = t
                            .split_once('=')
                            .ok_or_else(|| Error::parse(line, format!("parameter `{t}` is not key=value")))?;
                        let v: u64 =
                            v.parse().map_err(|_| Error::parse(line, format!("parameter `{k}` needs an integer")))?;
                        if !matches!(k, "delta_o" | "delta_c" | "delta_s" | "n_f" | "u" | "v") {
                            return Err(Error::parse(line, format!("unknown parameter `{k}`")));
                        }
                        params.insert(k.to_string(), (line, v));
                    }
                }
                Some("events") => cfg.events.push(parse_event_line(line, &toks)?),
                Some("commands") => {
                    let (name, rest) = toks.split_first().unwrap();
                    let rest = match rest.split_first() {
                        Some((&"=", r)) => r,
                        _ => return Err(Error::parse(line, "command lines read `NAME = EVENT ...`")),
                    };
                    let members: BTreeSet<String> = rest
                        .iter()
                        .flat_map(|t| t.split(','))
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect();
                    if cfg.commands.insert(name.to_string(), members).is_some() {
                        return Err(Error::parse(line, format!("command `{name}` declared twice")));
                    }
                }
                Some("damage") => cfg.damage.extend(toks.iter().map(|s| s.to_string())),
                Some(_) => unreachable!(),
            }
        }
        let get = |k: &str| -> Result<u64> {
            params.get(k).map(|&(_, v)| v).ok_or_else(|| Error::parse(1, format!("missing parameter `{k}`")))
        };
        let small = |k: &str| -> Result<u32> {
            let v = get(k)?;
            u32::try_from(v).map_err(|_| Error::parse(params[k].0, format!("parameter `{k}` is too large")))
        };
        cfg.delta_o = small("delta_o")?;
        cfg.delta_c = small("delta_c")?;
        cfg.delta_s = small("delta_s")?;
        cfg.rates = RateBounds { n_f: get("n_f")?, u: get("u")?, v: get("v")? };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<SystemConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SystemConfig::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "[parameters] delta_o={} delta_c={} delta_s={} n_f={} u={} v={}",
            self.delta_o, self.delta_c, self.delta_s, self.rates.n_f, self.rates.u, self.rates.v
        );
        out.push_str("[events]\n");
        for e in &self.events {
            let _ = writeln!(
                out,
                "  {} {} {} {} {} {}",
                e.name,
                if e.controllable { "c" } else { "uc" },
                if e.observable { "o" } else { "uo" },
                if e.attacker_observable { "ao" } else { "-" },
                if e.compromised { "comp" } else { "-" },
                e.exec_delay.map(|t| format!("te={t}")).unwrap_or_else(|| "-".into()),
            );
        }
        out.push_str("[commands]\n");
        for (g, m) in &self.commands {
            let _ = writeln!(out, "  {g} = {}", m.iter().cloned().collect::<Vec<_>>().join(" "));
        }
        let _ = writeln!(out, "[damage] {}", self.damage.iter().cloned().collect::<Vec<_>>().join(" "));
        out
    }
}

fn parse_event_line(line: usize, toks: &[&str]) -> Result<EventSpec> {
    if toks.len() != 6 {
        return Err(Error::parse(line, "event lines have six columns: NAME c|uc o|uo ao|- comp|- te=N|-"));
    }
    let flag = |t: &str, yes: &str, no: &str| -> Result<bool> {
        if t == yes {
            Ok(true)
        } else if t == no {
            Ok(false)
        } else {
            Err(Error::parse(line, format!("expected `{yes}` or `{no}`, found `{t}`")))
        }
    };
    let exec_delay = match toks[5] {
        "-" => None,
        t => {
            let v = t
                .strip_prefix("te=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(line, format!("expected `te=N` or `-`, found `{t}`")))?;
            Some(v)
        }
    };
    Ok(EventSpec {
        name: toks[0].to_string(),
        controllable: flag(toks[1], "c", "uc")?,
        observable: flag(toks[2], "o", "uo")?,
        attacker_observable: flag(toks[3], "ao", "-")?,
        compromised: flag(toks[4], "comp", "-")?,
        exec_delay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
[parameters] delta_o=1 delta_c=0 delta_s=0 n_f=1 u=1 v=1
[events]     a1 c o ao comp te=0
             a2 uc uo - - -
[commands]   v1 = a1
[damage]     5 10
";

    #[test]
    fn parses_sample() {
        let cfg = SystemConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.events.len(), 2);
        assert_eq!(cfg.delta_o, 1);
        assert_eq!(cfg.rates, RateBounds { n_f: 1, u: 1, v: 1 });
        assert_eq!(cfg.damage.len(), 2);
        assert_eq!(cfg.compromised(), BTreeSet::from(["a1".to_string()]));
        assert_eq!(cfg.unobservable(), BTreeSet::from(["a2".to_string()]));
        assert_eq!(SystemConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn malformed_parameter_names_line() {
        let bad = SAMPLE.replace("n_f=1", "n_f=x");
        let err = SystemConfig::parse(&bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn flag_implications_are_checked() {
        let bad = SAMPLE.replace("a1 c o ao comp", "a1 c uo ao comp");
        assert!(SystemConfig::parse(&bad).is_err());
        let bad = SAMPLE.replace("a1 c o ao comp", "a1 c o - comp");
        assert!(SystemConfig::parse(&bad).is_err());
        let bad = SAMPLE.replace("v1 = a1", "v1 = a2");
        assert!(SystemConfig::parse(&bad).is_err());
        let bad = SAMPLE.replace("a2 uc uo - - -", "a2 uc uo - - te=1");
        assert!(SystemConfig::parse(&bad).is_err());
    }

    #[test]
    fn full_alphabet_shape() {
        let cfg = SystemConfig::parse(SAMPLE).unwrap();
        let names: Vec<String> = cfg.full_alphabet().iter().map(|e| e.spelling()).collect();
        assert_eq!(names, ["a1", "a2", "a1#", "a1_out", "v1", "v1_in", "v1_out", "tick", "stop"]);
    }
}
