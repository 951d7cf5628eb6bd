//! Event labels and their roles in the networked closed loop.
//!
//! Every event in the composed system is a plant event or a command name
//! decorated with the role it plays: a channel entry, a tampered entry, a
//! channel exit, and so on. `tick` and `stop` are the only bare events.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The role an event plays in the networked architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// A plant event `σ`.
    Plain,
    /// `σ_in`: the plant pushes an uncompromised observation into the channel.
    In,
    /// `σ#`: the attacker pushes a (possibly forged) observation into the channel.
    Compromised,
    /// `σ_out`: an observation leaves the channel and reaches the supervisor.
    Out,
    /// `γ`: the plant fetches a stored command for execution.
    Command,
    /// `γ_in`: the supervisor sends a command into the control channel.
    CommandIn,
    /// `γ_out`: a command leaves the control channel and is stored.
    CommandOut,
    Tick,
    Stop,
}

impl Role {
    pub const ALL: [Role; 9] = [
        Role::Plain,
        Role::In,
        Role::Compromised,
        Role::Out,
        Role::Command,
        Role::CommandIn,
        Role::CommandOut,
        Role::Tick,
        Role::Stop,
    ];

    /// Name used in the `.alphabet` directive of the text format.
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Plain => "plain",
            Role::In => "in",
            Role::Compromised => "compromised",
            Role::Out => "out",
            Role::Command => "command",
            Role::CommandIn => "command-in",
            Role::CommandOut => "command-out",
            Role::Tick => "tick",
            Role::Stop => "stop",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.keyword() == s)
    }

    pub fn has_base(self) -> bool {
        !matches!(self, Role::Tick | Role::Stop)
    }

    /// Roles whose base is a plant event name.
    pub fn is_plant_role(self) -> bool {
        matches!(self, Role::Plain | Role::In | Role::Compromised | Role::Out)
    }

    /// Roles whose base is a command name.
    pub fn is_command_role(self) -> bool {
        matches!(self, Role::Command | Role::CommandIn | Role::CommandOut)
    }

    fn suffix(self) -> &'static str {
        match self {
            Role::In | Role::CommandIn => "_in",
            Role::Out | Role::CommandOut => "_out",
            Role::Compromised => "#",
            _ => "",
        }
    }
}

/// A tagged event name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventLabel {
    role: Role,
    base: Option<Arc<str>>,
}

impl EventLabel {
    pub fn new(role: Role, base: Option<&str>) -> Result<Self> {
        match (role.has_base(), base) {
            (true, Some(b)) => {
                validate_base(b)?;
                Ok(EventLabel { role, base: Some(Arc::from(b)) })
            }
            (false, None) => Ok(EventLabel { role, base: None }),
            (true, None) => Err(Error::invalid(format!("role `{}` requires a base name", role.keyword()))),
            (false, Some(b)) => Err(Error::invalid(format!(
                "role `{}` takes no base name (got `{b}`)",
                role.keyword()
            ))),
        }
    }

    fn based(role: Role, base: &str) -> Self {
        EventLabel::new(role, Some(base)).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn plain(base: &str) -> Self {
        Self::based(Role::Plain, base)
    }
    pub fn entry(base: &str) -> Self {
        Self::based(Role::In, base)
    }
    pub fn compromised(base: &str) -> Self {
        Self::based(Role::Compromised, base)
    }
    pub fn exit(base: &str) -> Self {
        Self::based(Role::Out, base)
    }
    pub fn command(base: &str) -> Self {
        Self::based(Role::Command, base)
    }
    pub fn command_in(base: &str) -> Self {
        Self::based(Role::CommandIn, base)
    }
    pub fn command_out(base: &str) -> Self {
        Self::based(Role::CommandOut, base)
    }
    pub fn tick() -> Self {
        EventLabel { role: Role::Tick, base: None }
    }
    pub fn stop() -> Self {
        EventLabel { role: Role::Stop, base: None }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn is_tick(&self) -> bool {
        self.role == Role::Tick
    }

    /// Same base, different role.
    pub fn with_role(&self, role: Role) -> Result<Self> {
        EventLabel::new(role, self.base())
    }

    /// The token used for this event inside `.trans` lines.
    pub fn spelling(&self) -> String {
        match self.role {
            Role::Tick => "tick".to_string(),
            Role::Stop => "stop".to_string(),
            r => format!("{}{}", self.base.as_deref().unwrap_or(""), r.suffix()),
        }
    }

    /// Parses an `.alphabet` entry: `spelling:role`, or bare `tick` / `stop`.
    pub fn parse_declaration(token: &str) -> Result<Self> {
        match token {
            "tick" => return Ok(EventLabel::tick()),
            "stop" => return Ok(EventLabel::stop()),
            _ => {}
        }
        let (spelling, keyword) = token
            .rsplit_once(':')
            .ok_or_else(|| Error::invalid(format!("event declaration `{token}` lacks a `:role` suffix")))?;
        let role = Role::from_keyword(keyword)
            .ok_or_else(|| Error::invalid(format!("unknown event role `{keyword}`")))?;
        if !role.has_base() {
            return if spelling == role.keyword() {
                Ok(EventLabel::new(role, None)?)
            } else {
                Err(Error::invalid(format!("`{token}`: role `{keyword}` must be spelled `{keyword}`")))
            };
        }
        let base = spelling.strip_suffix(role.suffix()).ok_or_else(|| {
            Error::invalid(format!("`{token}`: role `{keyword}` requires the suffix `{}`", role.suffix()))
        })?;
        EventLabel::new(role, Some(base))
    }

    /// The `.alphabet` declaration token for this event.
    pub fn declaration(&self) -> String {
        if self.role.has_base() {
            format!("{}:{}", self.spelling(), self.role.keyword())
        } else {
            self.spelling()
        }
    }
}

fn validate_base(b: &str) -> Result<()> {
    if b.is_empty()
        || b.chars().any(|c| c.is_whitespace() || matches!(c, '#' | ':' | '(' | ')' | '{' | '}' | ','))
    {
        return Err(Error::invalid(format!("`{b}` is not a valid event base name")));
    }
    if matches!(b, "tick" | "stop") {
        return Err(Error::invalid(format!("`{b}` is reserved")));
    }
    Ok(())
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spelling())
    }
}

impl fmt::Debug for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spelling())
    }
}

impl FromStr for EventLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EventLabel::parse_declaration(s)
    }
}
