//! Report emission: CSV (dot decimal, LF, mandatory header) and JSON
//! (arrays of flat records), with the run configuration echoed into every
//! output for reproducibility.

use crate::error::Result;
use std::io::Write;
use std::path::Path;

pub struct Emitter {
    pub config_echo: String,
    pub format: String,
    pub out: Option<String>,
}

impl Emitter {
    pub fn emit_csv(&self, header: &str, rows: &[String]) -> Result<()> {
        let mut text = format!("# config: {}\n{}\n", self.config_echo, header);
        for r in rows {
            text.push_str(r);
            if !r.ends_with('\n') {
                text.push('\n');
            }
        }
        self.write(&text)
    }

    pub fn emit_json(&self, records: serde_json::Value) -> Result<()> {
        let doc = serde_json::json!({
            "config": self.config_echo,
            "records": records,
        });
        self.write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
    }

    pub fn emit(&self, header: &str, rows: &[String], records: serde_json::Value) -> Result<()> {
        if self.format == "json" {
            self.emit_json(records)
        } else {
            self.emit_csv(header, rows)
        }
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                if let Some(dir) = Path::new(path).parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)?;
                    }
                }
                std::fs::write(path, text)?;
                Ok(())
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}
