//! Covert sensor-attack synthesis for networked discrete-event systems.
//!
//! The crate builds the component automata of a supervised plant whose
//! observation and control channels have bounded, non-FIFO delays:
//!
//! * the plant with command storage and command execution ([`plant`]),
//! * the observation and control channels ([`channels`]),
//! * the sensor-attack constraints ([`attacker`]),
//! * the networked supervisor checks and the attack monitor ([`supervision`]),
//!
//! composes them, and synthesises the supremal covert damage-nonblocking or
//! damage-reachable sensor attack as a partial-observation supervisor
//! ([`synthesis`]). The automata kernel lives in [`automaton`] and [`ops`].
//!
//! ```no_run
//! use netdes::pipeline::{Workspace, build_components};
//! use netdes::synthesis::{synthesize_supremal_attack, SynthesisMode};
//!
//! let ws = Workspace::load("fixtures/guideway/config.txt", "fixtures/guideway/plant.fsa",
//!                          "fixtures/guideway/ns.fsa").unwrap();
//! let built = build_components(&ws).unwrap();
//! let problem = built.problem().unwrap();
//! let attack = synthesize_supremal_attack(&problem, SynthesisMode::DamageNonblocking);
//! ```

pub mod attacker;
pub mod automaton;
pub mod channels;
pub mod config;
pub mod dot;
pub mod error;
pub mod event;
pub mod ops;
pub mod pipeline;
pub mod plant;
pub mod supervision;
pub mod synthesis;
pub mod text;

pub use automaton::{Automaton, AutomatonBuilder, EventId, StateId, StateLabel, StateSet};
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use event::{EventLabel, Role};
