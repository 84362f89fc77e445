//! JSON encoding of a system:
//! `{"n": 3, "k": 2, "active": [dist, ...], "standby": dist}` or the
//! shorthand `{"iid": dist, "n": 3, "k": 2, "standby": dist}`.

use crate::distributions::DiscreteLifetime;
use crate::orderstats::SystemSpec;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Wire form shared by both encodings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    active: Option<Vec<DiscreteLifetime>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iid: Option<DiscreteLifetime>,
    standby: DiscreteLifetime,
}

impl RawSpec {
    /// The system, or the key the problem is attached to with a message.
    fn validate(self) -> Result<SystemSpec, (&'static str, String)> {
        let active = match (self.active, self.iid) {
            (Some(_), Some(_)) => return Err(("iid", "give either \"active\" or \"iid\", not both".into())),
            (None, None) => return Err(("standby", "missing \"active\" (or the \"iid\" shorthand)".into())),
            (Some(a), None) => {
                if let Some(n) = self.n {
                    if n != a.len() {
                        return Err(("n", format!("\"n\" is {n} but \"active\" lists {} components", a.len())));
                    }
                }
                a
            }
            (None, Some(d)) => {
                let n = self.n.ok_or(("iid", "the \"iid\" shorthand needs \"n\"".to_string()))?;
                vec![d; n]
            }
        };
        SystemSpec::new(self.k, active, self.standby).map_err(|e| ("k", e.to_string()))
    }
}

impl TryFrom<RawSpec> for SystemSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> Result<Self, String> {
        raw.validate().map_err(|(_, msg)| msg)
    }
}

impl From<SystemSpec> for RawSpec {
    fn from(sys: SystemSpec) -> Self {
        RawSpec {
            n: Some(sys.n()),
            k: sys.k(),
            active: Some(sys.active().to_vec()),
            iid: None,
            standby: sys.standby().clone(),
        }
    }
}

/// A schema error with its position in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SpecError {}

/// Parses a system from JSON.
pub fn parse_system(json: &str) -> Result<SystemSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(json).map_err(|e| {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; keep only the message.
        let message = match msg.rfind(" at line ") {
            Some(i) => msg[..i].to_string(),
            None => msg,
        };
        SpecError { line: e.line(), column: e.column(), message }
    })?;
    raw.validate().map_err(|(key, message)| {
        let (line, column) = key_position(json, key);
        SpecError { line, column, message }
    })
}

/// 1-based position of the first `"key"` in the text, or the start.
fn key_position(json: &str, key: &str) -> (usize, usize) {
    let Some(offset) = json.find(&format!("\"{key}\"")) else {
        return (1, 1);
    };
    let before = &json[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Canonical JSON (explicit `active` list).
pub fn system_to_json(sys: &SystemSpec) -> String {
    serde_json::to_string_pretty(sys).expect("system specs always serialize")
}
