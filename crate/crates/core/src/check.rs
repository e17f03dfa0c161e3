use std::fmt;

use serde::{Deserialize, Serialize};

/// Result of one verification: a name, pass/fail, and on failure a witness
/// pointing at the first offending coefficient or equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
        }
    }

    /// Passes when `witness` is `None`.
    pub fn from_witness<W: fmt::Display>(name: impl Into<String>, witness: Option<W>) -> Self {
        match witness {
            None => Self::pass(name),
            Some(w) => Self::fail(name, w.to_string()),
        }
    }

    /// Combines several outcomes under one name; the first failure wins.
    pub fn all(name: impl Into<String>, parts: impl IntoIterator<Item = CheckOutcome>) -> Self {
        let name = name.into();
        for p in parts {
            if !p.passed {
                let w = p.witness.unwrap_or_default();
                return Self::fail(name, format!("{}: {}", p.name, w));
            }
        }
        Self::pass(name)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{status:<4} {}", self.name)?;
        if let Some(w) = &self.witness {
            write!(f, " ({w})")?;
        }
        Ok(())
    }
}
