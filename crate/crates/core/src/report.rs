use serde::{Deserialize, Serialize};

/// One named check: the measured residual against its threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Machine-checkable validation outcome: a list of named residual checks
/// plus the overall verdict. Failures are report entries, never panics.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self {
            checks: Vec::new(),
            pass: true,
        }
    }

    /// Records a residual check; passes when `residual <= threshold`.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        let pass = residual <= threshold && residual.is_finite();
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.into(),
            residual,
            threshold,
            pass,
        });
    }

    /// Records a boolean check as a 0/1 residual.
    pub fn check_bool(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    /// Appends another report's checks, prefixing their names.
    pub fn merge(&mut self, prefix: &str, other: ValidationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.pass &= c.pass;
            self.checks.push(c);
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_tracks_checks() {
        let mut r = ValidationReport::new();
        r.check("ok", 1e-14, 1e-12);
        assert!(r.pass);
        r.check("bad", 1e-3, 1e-12);
        assert!(!r.pass);
        assert_eq!(r.failed_checks().count(), 1);
    }

    #[test]
    fn merge_prefixes_names() {
        let mut inner = ValidationReport::new();
        inner.check("x", 0.0, 1.0);
        let mut outer = ValidationReport::new();
        outer.merge("sic", inner);
        assert_eq!(outer.checks[0].name, "sic/x");
    }

    #[test]
    fn nan_residual_fails() {
        let mut r = ValidationReport::new();
        r.check("nan", f64::NAN, 1.0);
        assert!(!r.pass);
    }
}
