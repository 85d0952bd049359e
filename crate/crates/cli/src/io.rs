use std::fs;
use std::path::{Path, PathBuf};

use gaitmatrix::estimator::TrialRecord;
use gaitmatrix::statecore::RewardMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TRIALS_SCHEMA: &str = "gaitmatrix/trials/v1";
pub const TIMELINE_SCHEMA: &str = "gaitmatrix/timeline/v1";
pub const SESSION_SCHEMA: &str = "gaitmatrix/session/v1";
pub const TRIALS_HEADER: &str = "from,to,displacement_mm,timestamp_s,tag";

/// CSV artifacts open with a `# schema` comment line.
pub fn with_schema(schema: &str, body: &str) -> String {
    format!("# {}\n{}", schema, body)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

#[derive(Debug, Deserialize)]
struct RawTrial {
    from: String,
    to: String,
    displacement_mm: f64,
    timestamp_s: f64,
    #[serde(default)]
    tag: String,
}

/// Parses a trial log; states may be given as index, `(10)`, `10` or
/// `2:(10)`, resolved against `labels`.
pub fn parse_trials(text: &str, labels: &RewardMatrix) -> Result<Vec<TrialRecord<f64>>, CliError> {
    let mut out = Vec::new();
    for (k, row) in reader(text).deserialize::<RawTrial>().enumerate() {
        let line = k + 1;
        let raw = row.map_err(|e| CliError::input(format!("trial {}: {}", line, e)))?;
        let state = |tok: &str| {
            labels
                .resolve(tok)
                .map_err(|e| CliError::input(format!("trial {}: {}", line, e)))
        };
        out.push(TrialRecord {
            from: state(&raw.from)?,
            to: state(&raw.to)?,
            displacement: raw.displacement_mm,
            timestamp: raw.timestamp_s,
            tag: raw.tag,
        });
    }
    Ok(out)
}

pub fn render_trials(trials: &[TrialRecord<f64>], m: &RewardMatrix) -> String {
    let mut s = format!("{}\n", TRIALS_HEADER);
    for t in trials {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            m.describe(t.from),
            m.describe(t.to),
            t.displacement,
            t.timestamp,
            t.tag
        ));
    }
    with_schema(TRIALS_SCHEMA, &s)
}

/// The columns of a session log that the trajectory plot needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub t_ms: f64,
    pub state: String,
    pub com_mm: f64,
}

pub fn parse_session_log(text: &str) -> Result<Vec<LogRow>, CliError> {
    reader(text)
        .deserialize::<LogRow>()
        .enumerate()
        .map(|(k, r)| r.map_err(|e| CliError::input(format!("session log row {}: {}", k + 1, e))))
        .collect()
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::file(&path, e))?;
    Ok(path)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
