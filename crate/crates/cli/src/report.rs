//! Check reports: a human text form with timing and a byte-deterministic
//! versioned JSON form without it.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub checks: Vec<CheckRecord>,
    pub lines: Vec<String>,
    pub elapsed_ms: u128,
}

#[derive(Serialize)]
struct MachineReport<'a> {
    schema_version: u32,
    command: &'a str,
    checks: &'a [CheckRecord],
    output: &'a [String],
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), checks: Vec::new(), lines: Vec::new(), elapsed_ms: 0 }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(CheckRecord { name: name.into(), status: Status::Pass, witness: None });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        });
    }

    pub fn record(&mut self, name: impl Into<String>, witness: Option<String>) {
        match witness {
            None => self.pass(name),
            Some(w) => self.fail(name, w),
        }
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// Human-readable rendering, timing included.
    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        for check in &self.checks {
            match check.status {
                Status::Pass => out.push_str(&format!("[pass] {}\n", check.name)),
                Status::Fail => out.push_str(&format!(
                    "[FAIL] {}: {}\n",
                    check.name,
                    check.witness.as_deref().unwrap_or("")
                )),
            }
        }
        out.push_str(&format!(
            "result: {} ({} checks, {} ms)\n",
            if self.all_passed() { "pass" } else { "FAIL" },
            self.checks.len(),
            self.elapsed_ms
        ));
        out
    }

    /// Machine rendering: versioned, no wall-clock content, byte
    /// deterministic for a fixed input and flag set.
    pub fn to_json(&self) -> String {
        let machine = MachineReport {
            schema_version: SCHEMA_VERSION,
            command: &self.command,
            checks: &self.checks,
            output: &self.lines,
        };
        serde_json::to_string_pretty(&machine).expect("report serializes")
    }
}
