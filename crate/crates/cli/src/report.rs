use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub command: String,
    /// Every option with its resolved value.
    pub options: Value,
    /// Flags that reproduce this run.
    pub args: Vec<String>,
    pub payload: Value,
}

impl Report {
    pub fn new<O: Serialize>(command: &str, options: &O, payload: Value) -> anyhow::Result<Report> {
        let options = serde_json::to_value(options)?;
        let mut args = vec![command.to_string()];
        args.extend(echo_flags(&options));
        Ok(Report {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            options,
            args,
            payload,
        })
    }
}

/// `--key=value` for every field, with `snake_case` keys turned into flags.
fn echo_flags(options: &Value) -> Vec<String> {
    let empty = Map::new();
    let map = options.as_object().unwrap_or(&empty);
    map.iter()
        .filter_map(|(k, v)| {
            let value = match v {
                Value::Null => return None,
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            Some(format!("--{}={value}", k.replace('_', "-")))
        })
        .collect()
}
