//! Machine-readable run reports.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NA")]
    Na,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    /// witness, certificate or failure detail
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub inputs_digest: String,
    pub seed: u64,
    pub verdicts: Vec<Verdict>,
    pub versions: Value,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value, seed: u64) -> RunReport {
        let inputs_digest = format!("{:x}", Sha256::digest(inputs.to_string().as_bytes()));
        let versions = serde_json::json!({ "unitary-cgroup": env!("CARGO_PKG_VERSION") });
        RunReport { command: command.into(), inputs, inputs_digest, seed, verdicts: Vec::new(), versions }
    }

    pub fn push(&mut self, check: impl Into<String>, status: Status, detail: Value) {
        self.verdicts.push(Verdict { check: check.into(), status, detail });
    }

    pub fn check(&mut self, check: impl Into<String>, ok: bool, detail: Value) {
        self.push(check, Status::from_bool(ok), detail);
    }

    pub fn failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Fail)
    }

    /// 0 when every verdict is OK or NA, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn status_of(&self, check: &str) -> Option<Status> {
        self.verdicts.iter().find(|v| v.check == check).map(|v| v.status)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}
