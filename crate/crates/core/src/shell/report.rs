use crate::error::Result;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equals,
}

/// One named check with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < tolerance`.
    pub fn below(suite: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self::new(suite, name, value, Relation::Below, tolerance, value < tolerance)
    }

    pub fn at_least(suite: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self::new(suite, name, value, Relation::AtLeast, tolerance, value >= tolerance)
    }

    pub fn equals(suite: &str, name: &str, value: f64, expected: f64) -> Self {
        Self::new(suite, name, value, Relation::Equals, expected, value == expected)
    }

    /// A boolean outcome recorded as `1 == 1`.
    pub fn holds(suite: &str, name: &str, ok: bool) -> Self {
        Self::equals(suite, name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    fn new(suite: &str, name: &str, value: f64, relation: Relation, tolerance: f64, pass: bool) -> Self {
        Self { suite: suite.into(), name: name.into(), value, relation, tolerance, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub wall_time_s: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Artifacts written, relative to the output directory.
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
    /// Set when a suite aborted with an error.
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn suites(&self) -> Vec<&str> {
        let mut s: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !s.contains(&c.suite.as_str()) {
                s.push(&c.suite);
            }
        }
        s
    }

    pub fn finish(&mut self, wall_time_s: f64) {
        self.wall_time_s = wall_time_s;
        self.passed = self.error.is_none() && self.checks.iter().all(|c| c.pass);
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let rel = match c.relation {
                Relation::Below => "<",
                Relation::AtLeast => ">=",
                Relation::Equals => "==",
            };
            let _ = writeln!(
                s,
                "{} {}/{}: {:e} {rel} {:e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                c.tolerance
            );
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "ERROR {e}");
        }
        let _ = writeln!(s, "{}: {} checks, {} failed", self.command, self.checks.len(), self.failures().count());
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| crate::error::invalid(format!("report serialization: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = RunReport::new("x");
        r.checks.push(Check::below("a", "small", 1e-14, 1e-13));
        r.checks.push(Check::at_least("b", "slope", 2.95, 2.9));
        r.finish(0.0);
        assert!(r.passed);
        r.checks.push(Check::holds("b", "flag", false));
        r.finish(0.0);
        assert!(!r.passed);
        assert_eq!(r.suites(), ["a", "b"]);
        assert_eq!(r.failures().count(), 1);
        assert!(r.summary().contains("FAIL b/flag"));
        // NaN never passes
        assert!(!Check::below("a", "nan", f64::NAN, 1.0).pass);
    }
}
