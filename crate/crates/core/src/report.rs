//! Pass/fail records produced by the verification operations.

use serde::Serialize;

/// One checked property, with a witness when it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub property: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// An ordered list of checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn pass(&mut self, property: impl Into<String>) {
        self.checks.push(Check { property: property.into(), pass: true, witness: None });
    }

    pub fn fail(&mut self, property: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            property: property.into(),
            pass: false,
            witness: Some(witness.into()),
        });
    }

    /// Records `property` as passing iff `witness` is `None`.
    pub fn record(&mut self, property: impl Into<String>, witness: Option<String>) {
        match witness {
            None => self.pass(property),
            Some(w) => self.fail(property, w),
        }
    }

    pub fn extend(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.property = format!("{prefix}.{}", c.property);
            }
            self.checks.push(c);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// Checks sharing a property name collapse into one line each in the text
    /// rendering; failures always keep their witness.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark} {}", c.property));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" -- {w}"));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_and_prefix() {
        let mut r = Report::new();
        r.record("a", None);
        let mut inner = Report::new();
        inner.fail("b", "x");
        r.extend("sub", inner);
        assert!(!r.all_pass());
        assert_eq!(r.first_failure().unwrap().property, "sub.b");
        assert_eq!(r.render_text(), "PASS a\nFAIL sub.b -- x\n");
    }
}
