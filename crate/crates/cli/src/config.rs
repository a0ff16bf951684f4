use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const DEFAULT_SEED: u64 = 0x5EED_1005;

/// Sample count used when none is configured; the path-fibration suite needs a finer grid.
pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_PATHFIB_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lie,
    Loops,
    Forms,
    String,
    Caloron,
    Pathfib,
    Centralext,
    All,
}

impl Suite {
    /// Every concrete suite, in the order `all` runs them.
    pub const CONCRETE: [Suite; 7] = [Suite::Lie, Suite::Loops, Suite::Forms, Suite::String, Suite::Caloron, Suite::Pathfib, Suite::Centralext];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lie => "lie",
            Suite::Loops => "loops",
            Suite::Forms => "forms",
            Suite::String => "string",
            Suite::Caloron => "caloron",
            Suite::Pathfib => "pathfib",
            Suite::Centralext => "centralext",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::CONCRETE
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| CliError::UnknownSuite(s.to_string()))
    }
}

/// Everything a run depends on; together with the seed it reproduces a report exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    pub seed: u64,
    /// n in SU(n).
    pub rank: usize,
    /// Loop sample count N; unset means 64, or 256 for the path-fibration suite.
    pub samples: Option<usize>,
    pub fd_step: f64,
    /// Per-check tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { suite: Suite::All, seed: DEFAULT_SEED, rank: 2, samples: None, fd_step: 1e-4, tolerances: BTreeMap::new() }
    }
}

impl RunConfig {
    /// Overlays the fields present in a json object onto `self`.
    pub fn merged_with_json(&self, text: &str) -> Result<Self> {
        let overlay: serde_json::Value = serde_json::from_str(text)?;
        let serde_json::Value::Object(fields) = overlay else {
            return Err(CliError::Config("config file must hold a json object".into()));
        };
        let mut base = serde_json::to_value(self)?;
        let target = base.as_object_mut().expect("a struct serializes to an object");
        for (key, value) in fields {
            target.insert(key, value);
        }
        Ok(serde_json::from_value(base)?)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.samples {
            if n < 4 || n % 2 != 0 {
                return Err(CliError::Config(format!("loop samples must be even and at least 4, got {n}")));
            }
        }
        if self.rank < 2 {
            return Err(CliError::Config(format!("group rank must be at least 2, got {}", self.rank)));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(CliError::Config(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if let Some((name, t)) = self.tolerances.iter().find(|(_, t)| !(**t >= 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("tolerance for {name} must be finite and non-negative, got {t}")));
        }
        Ok(())
    }

    pub fn samples_for(&self, suite: Suite) -> usize {
        self.samples.unwrap_or(if suite == Suite::Pathfib { DEFAULT_PATHFIB_SAMPLES } else { DEFAULT_SAMPLES })
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}
