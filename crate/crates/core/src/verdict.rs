use serde::{Deserialize, Serialize};

/// Three-valued outcome of a check that may not be numerically decidable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds { certificate: String },
    Fails { witness: String, atom: Option<usize> },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn holds(certificate: impl Into<String>) -> Self {
        Verdict::Holds { certificate: certificate.into() }
    }

    pub fn fails(witness: impl Into<String>, atom: Option<usize>) -> Self {
        Verdict::Fails { witness: witness.into(), atom }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict::Inconclusive { reason: reason.into() }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn is_decisive(&self) -> bool {
        !matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn decision(&self) -> Decision {
        match self {
            Verdict::Holds { .. } => Decision::Yes,
            Verdict::Fails { .. } => Decision::No,
            Verdict::Inconclusive { .. } => Decision::Unknown,
        }
    }

    /// Two verdicts agree when they are not decisively opposite.
    pub fn agrees_with(&self, other: &Verdict) -> bool {
        self.decision().agrees_with(other.decision())
    }
}

/// A membership answer that may be undecidable from closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn agrees_with(self, other: Decision) -> bool {
        !matches!(
            (self, other),
            (Decision::Yes, Decision::No) | (Decision::No, Decision::Yes)
        )
    }

    pub fn is_decisive(self) -> bool {
        self != Decision::Unknown
    }
}
