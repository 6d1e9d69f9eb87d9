use serde::Serialize;

/// A single numeric check: a measured deviation compared against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
            pass: deviation.is_finite() && deviation <= tolerance,
        }
    }

    /// A check whose outcome is decided by the caller rather than by
    /// comparing the deviation with the tolerance.
    pub fn with_outcome(name: impl Into<String>, deviation: f64, tolerance: f64, pass: bool) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
            pass,
        }
    }
}

/// One side-by-side identity comparison, `lhs == rhs` within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Stable machine-readable identifier of the identity.
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub fn compare(id: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let deviation = (lhs - rhs).abs();
        IdentityCheck {
            id: id.into(),
            lhs,
            rhs,
            deviation,
            tolerance,
            pass: deviation.is_finite() && deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identities: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.identities.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.identities.iter().filter(|c| !c.pass)
    }
}
