/// One named residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub detail: Option<String>,
}

/// Ordered list of uniquely named checks; the verdict is their conjunction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `residual <= tol`. Panics on a duplicate name.
    pub fn record(&mut self, name: impl Into<String>, residual: f64, tol: f64) -> &mut Check {
        let pass = residual.is_finite() && residual <= tol;
        self.push(Check {
            name: name.into(),
            residual,
            tol,
            pass,
            detail: None,
        })
    }

    /// Records a check whose pass flag is decided by the caller.
    pub fn record_flag(
        &mut self,
        name: impl Into<String>,
        pass: bool,
        residual: f64,
        tol: f64,
    ) -> &mut Check {
        self.push(Check {
            name: name.into(),
            residual,
            tol,
            pass,
            detail: None,
        })
    }

    pub fn push(&mut self, check: Check) -> &mut Check {
        assert!(
            self.get(&check.name).is_none(),
            "duplicate check name `{}`",
            check.name
        );
        self.checks.push(check);
        self.checks.last_mut().unwrap()
    }

    /// Appends all checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.push(c);
        }
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl Check {
    pub fn with_detail(&mut self, detail: impl Into<String>) -> &mut Self {
        self.detail = Some(detail.into());
        self
    }
}
