use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Common header wrapped around every JSON result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub mode: Mode,
    pub tolerances: BTreeMap<String, f64>,
    /// SHA-256 of the input file, or of the canonical parameter JSON when there is none.
    pub input_hash: String,
    pub params: serde_json::Value,
    pub result: T,
}

pub struct Context {
    pub command: &'static str,
    pub seed: u64,
    pub mode: Mode,
    pub params: serde_json::Value,
    pub input_hash: String,
}

impl Context {
    pub fn new(command: &'static str, seed: u64, mode: Mode, params: serde_json::Value, input: Option<&[u8]>) -> Self {
        let bytes = match input {
            Some(b) => b.to_vec(),
            None => serde_json::to_vec(&params).expect("parameters serialize"),
        };
        Self { command, seed, mode, params, input_hash: sha256_hex(&bytes) }
    }

    pub fn report<T>(&self, tolerances: &[(&str, f64)], result: T) -> Report<T> {
        Report {
            tool: "rznk".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            seed: self.seed,
            mode: self.mode,
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            input_hash: self.input_hash.clone(),
            params: self.params.clone(),
            result,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON to `out`, or to stdout when no path is given.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// CSV rows to `out`, or to stdout when no path is given.
pub fn emit_csv(header: &[&str], rows: &[Vec<String>], out: Option<&Path>) -> anyhow::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn report_round_trip() {
        let ctx = Context::new("bounds", 7, Mode::Exact, serde_json::json!({"d": 2}), None);
        let r = ctx.report(&[("residual", 1e-8)], vec![1u32, 2]);
        let text = serde_json::to_string(&r).unwrap();
        let back: Report<Vec<u32>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
