//! The JSON report every subcommand emits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub v: u32,
    pub command: String,
    pub inputs: Inputs,
    /// Constants the run used, measured or supplied.
    pub constants: Map<String, Value>,
    pub results: Map<String, Value>,
    /// Certificates for every violated property. Empty iff `holds`.
    pub witnesses: Vec<Value>,
    pub holds: bool,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    /// SHA-256 over the command, the options that affect results and the
    /// bytes of every input file.
    pub digest: String,
    pub files: Map<String, Value>,
    pub seed: u64,
    pub options: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

impl RunReport {
    /// The report without its timing, which is the only field that varies
    /// between runs on the same inputs.
    pub fn deterministic_part(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().unwrap().remove("timing");
        v
    }
}

/// Accumulates labelled chunks into the input digest.
#[derive(Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        for chunk in [label.as_bytes(), bytes] {
            self.hasher.update((chunk.len() as u64).to_le_bytes());
            self.hasher.update(chunk);
        }
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_labels_from_bytes() {
        let run = |parts: &[(&str, &[u8])]| {
            let mut d = InputDigest::default();
            for (l, b) in parts {
                d.add(l, b);
            }
            d.finish()
        };
        assert_eq!(run(&[("a", b"bc")]), run(&[("a", b"bc")]));
        assert_ne!(run(&[("a", b"bc")]), run(&[("ab", b"c")]));
        assert_eq!(run(&[]).len(), 64);
    }
}
