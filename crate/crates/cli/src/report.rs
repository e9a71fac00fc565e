use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "hrd-report/1";

/// Exit codes: 0 clean, 1 findings reported, 2 usage or input error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exit {
    Ok = 0,
    Findings = 1,
    Error = 2,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: String,
    pub inputs: Vec<String>,
    pub findings: Value,
    pub exit_code: i32,
}

/// What a subcommand hands back before it is wrapped in a report.
pub struct Outcome {
    pub findings: Value,
    pub problems: bool,
    /// Replaces the JSON report on stdout when `--tsv` was asked for.
    pub tsv: Option<String>,
}

impl Outcome {
    pub fn clean(findings: impl Serialize) -> Outcome {
        Outcome::new(findings, false)
    }

    pub fn new(findings: impl Serialize, problems: bool) -> Outcome {
        Outcome {
            findings: serde_json::to_value(findings).expect("findings serialize"),
            problems,
            tsv: None,
        }
    }

    pub fn with_tsv(mut self, tsv: Option<String>) -> Outcome {
        self.tsv = tsv;
        self
    }
}

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}
