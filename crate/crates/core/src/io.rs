//! JSON formats for games, policies and mediator matrices.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::game::{GameInstance, Policy, State};
use crate::mediator::TauMatrix;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFileV1 {
    pub schema_version: u64,
    pub states: Vec<State>,
}

fn malformed(e: impl std::fmt::Display) -> Error {
    Error::MalformedJson(e.to_string())
}

pub fn parse_game(bytes: &[u8]) -> Result<GameInstance> {
    let value: Value = serde_json::from_slice(bytes).map_err(malformed)?;
    match value.get("schema_version").map(Value::as_u64) {
        Some(Some(SCHEMA_VERSION)) => {}
        Some(Some(v)) => return Err(Error::SchemaVersionUnsupported(v)),
        _ => return Err(malformed("missing or non-integer schema_version")),
    }
    let file: GameFileV1 = serde_json::from_value(value).map_err(malformed)?;
    GameInstance::new(file.states)
}

pub fn serialize_game(game: &GameInstance) -> Vec<u8> {
    let file = GameFileV1 {
        schema_version: SCHEMA_VERSION,
        states: game.states().to_vec(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("finite values serialize");
    out.push(b'\n');
    out
}

fn number(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| malformed(format!("expected a number, got {v}")))
}

/// A policy given either as an array in state order or as an object keyed by
/// state label.
pub fn parse_policy(game: &GameInstance, bytes: &[u8]) -> Result<Policy> {
    let value: Value = serde_json::from_slice(bytes).map_err(malformed)?;
    let values = match value {
        Value::Array(items) => items.iter().map(number).collect::<Result<Vec<_>>>()?,
        Value::Object(map) => {
            let mut values = vec![None; game.len()];
            for (label, v) in &map {
                let i = game.index_of(label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                values[i] = Some(number(v)?);
            }
            let got = values.iter().flatten().count();
            values
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::LengthMismatch {
                    expected: game.len(),
                    got,
                })?
        }
        other => return Err(malformed(format!("expected an array or object, got {other}"))),
    };
    game.check_len(values.len())?;
    Policy::new(values)
}

pub fn parse_tau(bytes: &[u8]) -> Result<TauMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_slice(bytes).map_err(malformed)?;
    TauMatrix::new(rows)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable output");
    out.push(b'\n');
    out
}
