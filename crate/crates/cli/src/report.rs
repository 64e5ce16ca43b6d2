use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Report,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Pass | Status::Report => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
        }
    }

    pub fn from_check(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// What a command hands back: a JSON payload plus its human rendering.
pub struct Outcome {
    pub command: &'static str,
    pub status: Status,
    pub payload: Value,
    pub text: String,
}

impl Outcome {
    pub fn new(command: &'static str, status: Status, payload: Value) -> Self {
        Self {
            command,
            status,
            payload,
            text: String::new(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) -> &mut Self {
        let _ = writeln!(self.text, "{}", s.as_ref());
        self
    }

    pub fn emit(&self, json: bool) {
        if json {
            let doc = serde_json::json!({
                "command": self.command,
                "status": self.status,
                "payload": self.payload,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
            );
        } else {
            print!("{}", self.text);
            let status = match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Report => "REPORT",
            };
            println!("{}: {status}", self.command);
        }
    }
}

/// A command that could not produce an outcome.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn defect(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<pentagram_core::Error> for Failure {
    fn from(e: pentagram_core::Error) -> Self {
        Self {
            code: if e.is_usage() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

/// Destination for artifact files.
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(path: PathBuf) -> Self {
        Self(path)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.0)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", self.0.display())))?;
        let path = self.0.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::defect(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(
        &self,
        name: &str,
        value: &T,
    ) -> Result<PathBuf, Failure> {
        let text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::defect(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
