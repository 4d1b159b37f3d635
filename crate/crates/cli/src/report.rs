//! Verification reports: named checks with expected and computed values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the published result being reproduced.
    Published,
    /// Computed independently by this tool or by hand.
    Computed,
}

impl Provenance {
    fn tag(self) -> &'static str {
        match self {
            Provenance::Published => "[published]",
            Provenance::Computed => "[computed]",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub provenance: Provenance,
    pub passed: bool,
}

impl Check {
    /// Passes when `computed` equals `expected` textually.
    pub fn equal(name: &str, expected: impl ToString, computed: impl ToString, provenance: Provenance) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        Self { name: name.into(), passed: expected == computed, expected, computed, tolerance: None, provenance }
    }

    /// Passes when |computed − expected| ≤ tolerance.
    pub fn close(name: &str, expected: f64, computed: f64, tolerance: f64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            expected: format!("{expected:.17}"),
            computed: format!("{computed:.17}"),
            tolerance: Some(tolerance),
            provenance,
            passed: (computed - expected).abs() <= tolerance,
        }
    }

    /// Passes when `value` ≤ `limit`.
    pub fn at_most(name: &str, limit: f64, value: f64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            expected: format!("<= {limit:e}"),
            computed: format!("{value:e}"),
            tolerance: Some(limit),
            provenance,
            passed: value <= limit,
        }
    }

    pub fn holds(name: &str, condition: bool, provenance: Provenance) -> Self {
        Self::equal(name, true, condition, provenance)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
    /// Exact certificates and other evidence, keyed by name.
    pub certificates: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), checks: Vec::new(), certificates: BTreeMap::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn certificate(&mut self, name: &str, value: serde_json::Value) {
        self.certificates.insert(name.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub sections: Vec<Section>,
    pub passed: bool,
    /// Seeded sampling traces; never part of pass/fail.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo: Option<serde_json::Value>,
    /// Wall-clock milliseconds per section; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, u128>,
}

impl VerificationReport {
    pub fn new(command: &str, parameters: BTreeMap<String, String>) -> Self {
        Self {
            command: command.into(),
            parameters,
            sections: Vec::new(),
            passed: true,
            demo: None,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, section: Section, millis: u128) {
        self.timings_ms.insert(section.name.clone(), millis);
        self.sections.push(section);
        self.passed = self.sections.iter().all(Section::passed);
    }

    pub fn check_count(&self) -> (usize, usize) {
        let total = self.sections.iter().map(|s| s.checks.len()).sum();
        let passed = self.sections.iter().flat_map(|s| &s.checks).filter(|c| c.passed).count();
        (passed, total)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for section in &self.sections {
            let _ = writeln!(out, "\n== {} ==", section.name);
            for c in &section.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "[{status}] {} {}", c.name, c.provenance.tag());
                let _ = writeln!(out, "       expected: {}", c.expected);
                let _ = writeln!(out, "       computed: {}", c.computed);
                if let Some(t) = c.tolerance {
                    let _ = writeln!(out, "       tolerance: {t:e}");
                }
            }
            for note in &section.notes {
                let _ = writeln!(out, "  note: {note}");
            }
            for (name, value) in &section.certificates {
                let _ = writeln!(out, "  certificate {name}: {value}");
            }
        }
        if let Some(demo) = &self.demo {
            let _ = writeln!(out, "\n== sampling demo (not checked) ==\n{}", serde_json::to_string_pretty(demo).unwrap_or_default());
        }
        let (passed, total) = self.check_count();
        let _ = writeln!(out, "\noverall: {} ({passed}/{total} checks passed)", if self.passed { "PASS" } else { "FAIL" });
        for (name, ms) in &self.timings_ms {
            let _ = writeln!(out, "timing {name}: {ms} ms");
        }
        out
    }
}
