//! Line-delimited JSON result records.
//!
//! One record per line. Fields:
//!
//! | field            | type              | notes                                  |
//! |------------------|-------------------|----------------------------------------|
//! | `schema_version` | integer           | currently 1                            |
//! | `engine_version` | string            | crate version of the engine            |
//! | `command`        | string            | `check`, `prove`, `sorites`, ...       |
//! | `input`          | map of strings    | `sequent`, `parameter`, `mode`, bounds |
//! | `status`         | string or null    | `valid`, `invalid`, `unknown`, `pass`, `fail` |
//! | `method`         | string            | how the verdict was reached            |
//! | `detail`         | string or null    | free-form diagnostics                  |
//! | `countermodel`   | string or null    | model file text                        |
//! | `proof`          | string or null    | proof file text                        |
//! | `elapsed_ms`     | integer           |                                        |

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use tolerance_lab::calculus::{check_proof, parse_proof};
use tolerance_lab::consequence::{is_countermodel, Mode};
use tolerance_lab::parameter::parse_parameter;
use tolerance_lab::semantics::Model;
use tolerance_lab::syntax::parse_sequent;

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub engine_version: String,
    pub command: String,
    pub input: BTreeMap<String, String>,
    pub status: Option<String>,
    #[serde(default)]
    pub method: String,
    pub detail: Option<String>,
    pub countermodel: Option<String>,
    pub proof: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("record lacks input `{0}`")]
    MissingInput(&'static str),
    #[error("bad input `{field}`: {message}")]
    Input { field: &'static str, message: String },
    #[error("embedded countermodel does not refute the sequent")]
    NotACountermodel,
    #[error("embedded proof does not check: {0}")]
    BadProof(String),
}

impl ResultRecord {
    pub fn new(command: &str) -> ResultRecord {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            engine_version: ENGINE_VERSION.to_string(),
            command: command.to_string(),
            input: BTreeMap::new(),
            status: None,
            method: String::new(),
            detail: None,
            countermodel: None,
            proof: None,
            elapsed_ms: 0,
        }
    }

    pub fn with_input(mut self, key: &str, value: impl ToString) -> ResultRecord {
        self.input.insert(key.to_string(), value.to_string());
        self
    }

    pub fn elapsed(mut self, d: Duration) -> ResultRecord {
        self.elapsed_ms = u64::try_from(d.as_millis()).unwrap_or(u64::MAX);
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    /// Parses one line and re-verifies any embedded countermodel or proof.
    pub fn from_line(line: &str) -> Result<ResultRecord, RecordError> {
        let record: ResultRecord = serde_json::from_str(line)?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(RecordError::Schema(record.schema_version));
        }
        record.reverify()?;
        Ok(record)
    }

    fn input(&self, field: &'static str) -> Result<&str, RecordError> {
        self.input
            .get(field)
            .map(String::as_str)
            .ok_or(RecordError::MissingInput(field))
    }

    pub fn reverify(&self) -> Result<(), RecordError> {
        if self.countermodel.is_none() && self.proof.is_none() {
            return Ok(());
        }
        let bad = |field, e: &dyn std::fmt::Display| RecordError::Input {
            field,
            message: e.to_string(),
        };
        let sequent = parse_sequent(self.input("sequent")?).map_err(|e| bad("sequent", &e))?;
        if let Some(text) = &self.countermodel {
            let model: Model = text.parse().map_err(|e| bad("countermodel", &e))?;
            let param = parse_parameter(self.input("parameter")?).map_err(|e| bad("parameter", &e))?;
            let mode = match self.input("mode")? {
                "tolerant" => Mode::Tolerant,
                "plain" => Mode::Plain,
                other => return Err(bad("mode", &other)),
            };
            if !is_countermodel(&model, &sequent, &param, mode).map_err(|e| bad("countermodel", &e))? {
                return Err(RecordError::NotACountermodel);
            }
        }
        if let Some(text) = &self.proof {
            let proof = parse_proof(text).map_err(|e| RecordError::BadProof(e.to_string()))?;
            let report = check_proof(&proof);
            if !report.ok {
                return Err(RecordError::BadProof(report.reason.unwrap_or_default()));
            }
            if proof.conclusion != sequent {
                return Err(RecordError::BadProof("proof concludes a different sequent".into()));
            }
        }
        Ok(())
    }
}
