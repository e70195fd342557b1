use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Cli, Command, Format};

/// An error together with the process exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const BAD_INPUT: u8 = 2;
    pub const SIZE_LIMIT: u8 = 3;
    pub const SEARCH: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn bad_input(path: &Path, err: impl std::fmt::Display) -> Self {
        Failure {
            code: Self::BAD_INPUT,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<tsplab::Error> for Failure {
    fn from(e: tsplab::Error) -> Self {
        use tsplab::Error::*;
        let code = match e {
            SizeLimit { .. } => Failure::SIZE_LIMIT,
            SearchFailure(_) => Failure::SEARCH,
            Parse { .. } | UnsupportedFormat(_) | DegenerateInstance(_) | DegenerateFit(_) => {
                Failure::BAD_INPUT
            }
            _ => Failure::USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Body of a report before the resolved configuration is attached.
pub enum Report {
    Json(Map<String, Value>),
    /// CSV text including its header row.
    Csv(String),
}

impl Report {
    pub fn json(value: Value) -> Self {
        match value {
            Value::Object(map) => Report::Json(map),
            other => {
                let mut map = Map::new();
                map.insert("result".into(), other);
                Report::Json(map)
            }
        }
    }
}

#[derive(Serialize)]
struct Config<'a> {
    #[serde(flatten)]
    command: &'a Command,
    seed: u64,
    format: Format,
    output: Option<&'a Path>,
}

pub fn config_value(cli: &Cli) -> Value {
    serde_json::to_value(Config {
        command: &cli.command,
        seed: cli.seed,
        format: cli.format,
        output: cli.output.as_deref(),
    })
    .expect("config serializes")
}

pub fn csv_text<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Failure::usage(format!("csv output failed: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::usage(format!("csv output failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Attaches the configuration and writes the report. JSON reports carry it
/// under `"config"`; CSV reports start with a `# config: {...}` comment line.
pub fn emit(cli: &Cli, report: Report) -> Result<(), Failure> {
    let config = config_value(cli);
    let text = match report {
        Report::Json(mut map) => {
            map.insert("config".into(), config);
            let mut s =
                serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
            s.push('\n');
            s
        }
        Report::Csv(body) => format!("# config: {}\n{body}", json!(config)),
    };
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write report: {e}"))),
    }
}
