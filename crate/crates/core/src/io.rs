//! Reading marginal instances from JSON, CSV, and per-context sample files.
//!
//! JSON: `{"n": 3, "pbar": {"1": 0.5, ...}, "pjoint": {"1,2": "9/20", ...}}`.
//! CSV: one record per probability, `unary,i,p` or `pair,i,j,p`; lines that
//! repeat those literal headers are skipped.
//! Context CSV: header row of variable indices (one or two), then one
//! binary observation per row.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use crate::marginals::{
    estimate_from_contexts, parse_probability, ContextSample, ContextScope, EstimateError,
    MarginalError, MarginalKey, MarginalSet,
};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

impl InputError {
    /// Malformed input (as opposed to a well-formed file that breaks the
    /// schema or the probability constraints).
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            InputError::Io { .. }
                | InputError::Parse(_)
                | InputError::Marginal(MarginalError::Parse(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Json,
    Csv,
    Contexts,
}

/// A parsed instance plus the original text of fractional entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub set: MarginalSet,
    pub exact: BTreeMap<MarginalKey, String>,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads an instance. For [`InputFormat::Contexts`] each path is a context
/// CSV or a directory whose `*.csv` files are read in name order.
pub fn load(paths: &[PathBuf], format: InputFormat) -> Result<Instance, InputError> {
    match format {
        InputFormat::Json | InputFormat::Csv => {
            let [path] = paths else {
                return Err(InputError::Schema(format!(
                    "expected exactly one input file, got {}",
                    paths.len()
                )));
            };
            let text = read(path)?;
            if format == InputFormat::Json {
                parse_json(&text)
            } else {
                parse_csv(&text)
            }
        }
        InputFormat::Contexts => {
            let mut files = Vec::new();
            for path in paths {
                if path.is_dir() {
                    let entries = fs::read_dir(path).map_err(|source| InputError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let mut found: Vec<PathBuf> = entries
                        .filter_map(Result::ok)
                        .map(|e| e.path())
                        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                        .collect();
                    found.sort();
                    files.extend(found);
                } else {
                    files.push(path.clone());
                }
            }
            let samples = files
                .iter()
                .map(|f| parse_context_csv(&read(f)?))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Instance {
                set: estimate_from_contexts(&samples)?,
                exact: BTreeMap::new(),
            })
        }
    }
}

fn parse_value(key: MarginalKey, value: &Value) -> Result<(f64, Option<String>), InputError> {
    match value {
        Value::Number(num) => num
            .as_f64()
            .map(|v| (v, None))
            .ok_or_else(|| InputError::Schema(format!("{key}: unrepresentable number"))),
        Value::String(text) => {
            let v = parse_probability(text)?;
            Ok((v, text.contains('/').then(|| text.trim().to_string())))
        }
        other => Err(InputError::Schema(format!(
            "{key}: expected a number or string, got {other}"
        ))),
    }
}

fn parse_index(text: &str) -> Result<usize, InputError> {
    text.trim()
        .parse()
        .map_err(|_| InputError::Schema(format!("bad variable index {text:?}")))
}

fn finish(
    n: usize,
    entries: BTreeMap<MarginalKey, (f64, Option<String>)>,
) -> Result<Instance, InputError> {
    let values = entries.iter().map(|(k, (v, _))| (*k, *v)).collect();
    let set = MarginalSet::from_entries(n, &values)?;
    let exact = entries
        .into_iter()
        .filter_map(|(k, (_, text))| text.map(|t| (k, t)))
        .collect();
    Ok(Instance { set, exact })
}

fn insert(
    entries: &mut BTreeMap<MarginalKey, (f64, Option<String>)>,
    key: MarginalKey,
    value: (f64, Option<String>),
) -> Result<(), InputError> {
    if entries.insert(key, value).is_some() {
        return Err(InputError::Schema(format!("duplicate entry {key}")));
    }
    Ok(())
}

pub fn parse_json(text: &str) -> Result<Instance, InputError> {
    let root: Value = serde_json::from_str(text).map_err(|e| InputError::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| InputError::Schema("top level must be an object".into()))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| InputError::Schema("missing or non-integer \"n\"".into()))?
        as usize;
    let section = |name: &str| {
        obj.get(name)
            .and_then(Value::as_object)
            .ok_or_else(|| InputError::Schema(format!("missing object {name:?}")))
    };
    let mut entries = BTreeMap::new();
    for (k, v) in section("pbar")? {
        let key = MarginalKey::Complement(parse_index(k)?);
        insert(&mut entries, key, parse_value(key, v)?)?;
    }
    for (k, v) in section("pjoint")? {
        let (i, j) = k
            .split_once(',')
            .ok_or_else(|| InputError::Schema(format!("pair key {k:?} must look like \"i,j\"")))?;
        let (i, j) = (parse_index(i)?, parse_index(j)?);
        if i == j {
            return Err(InputError::Schema(format!(
                "pair key {k:?} repeats a variable"
            )));
        }
        let key = MarginalKey::Pair(i.min(j), i.max(j));
        insert(&mut entries, key, parse_value(key, v)?)?;
    }
    finish(n, entries)
}

pub fn parse_csv(text: &str) -> Result<Instance, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut entries = BTreeMap::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(|e| InputError::Parse(e.to_string()))?;
        let fields: Vec<&str> = record.iter().collect();
        let value = |key: MarginalKey, raw: &str| parse_value(key, &Value::String(raw.to_string()));
        match fields.as_slice() {
            [] | [""] => {}
            ["unary", "i", "p"] | ["pair", "i", "j", "p"] => {}
            ["unary", i, p] => {
                let i = parse_index(i)?;
                n = n.max(i);
                let key = MarginalKey::Complement(i);
                insert(&mut entries, key, value(key, p)?)?;
            }
            ["pair", i, j, p] => {
                let (i, j) = (parse_index(i)?, parse_index(j)?);
                if i == j {
                    return Err(InputError::Schema(format!(
                        "pair ({i},{j}) repeats a variable"
                    )));
                }
                n = n.max(i).max(j);
                let key = MarginalKey::Pair(i.min(j), i.max(j));
                insert(&mut entries, key, value(key, p)?)?;
            }
            other => {
                return Err(InputError::Parse(format!(
                    "unrecognized record {:?}",
                    other.join(",")
                )))
            }
        }
    }
    finish(n, entries)
}

pub fn parse_context_csv(text: &str) -> Result<ContextSample, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| InputError::Parse(e.to_string()))?
        .iter()
        .map(parse_index)
        .collect::<Result<Vec<_>, _>>()?;
    let (scope, swap) = match headers.as_slice() {
        [i] => (ContextScope::Unary(*i), false),
        [i, j] if i < j => (ContextScope::Pair(*i, *j), false),
        [i, j] if i > j => (ContextScope::Pair(*j, *i), true),
        _ => {
            return Err(InputError::Schema(format!(
                "context header must name one or two distinct variables, got {headers:?}"
            )))
        }
    };
    let mut observations = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| InputError::Parse(e.to_string()))?;
        let mut obs = record
            .iter()
            .map(|v| match v {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(InputError::Parse(format!(
                    "non-binary observation {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if swap {
            obs.reverse();
        }
        observations.push(obs);
    }
    Ok(ContextSample::new(scope, observations)?)
}
