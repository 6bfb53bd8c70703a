//! Run artifacts: the `report.json` summary and the spectrum CSV.
//!
//! Reports are reproducible: everything except the `timings` block is a pure
//! function of the inputs, the configuration and the seed.

use std::path::Path;

use romkit_core::hodmd::SpectrumRow;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Result;

/// Builder for `report.json`.
pub struct Report {
    command: String,
    config: Value,
    fields: Map<String, Value>,
    warnings: Vec<String>,
    started: std::time::Instant,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize) -> Report {
        Report {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            fields: Map::new(),
            warnings: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.fields
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn warn_all(&mut self, messages: &[String]) {
        self.warnings.extend_from_slice(messages);
    }

    /// Assemble the final document; `timings` is the only irreproducible key.
    pub fn finish(self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command));
        doc.insert("config".into(), self.config);
        for (k, v) in self.fields {
            doc.insert(k, v);
        }
        if !self.warnings.is_empty() {
            doc.insert("warnings".into(), json!(self.warnings));
        }
        doc.insert(
            "timings".into(),
            json!({ "seconds": self.started.elapsed().as_secs_f64() }),
        );
        Value::Object(doc)
    }

    pub fn write(self, dir: &Path) -> Result<()> {
        let doc = self.finish();
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    }
}

/// Spectrum CSV: `omega,delta,amplitude`, one row per mode, 17 significant
/// digits so values survive a parse round-trip exactly.
pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::from("omega,delta,amplitude\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            r.omega, r.delta, r.amplitude
        ));
    }
    out
}
