use std::fmt::Display;
use std::time::Duration;

use setpack_core::tsv;
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key/value block printed ahead of any command-specific table.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub digest: Option<String>,
    pub config: Vec<(String, String)>,
    pub results: Vec<(String, String)>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.results.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.result(key, tsv::num(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.results
            .iter()
            .chain(&self.config)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Everything except the wall time, which goes to stderr so stdout stays
    /// byte-identical across runs.
    pub fn to_tsv(&self) -> String {
        let mut out = tsv::row(["command", &self.command]);
        if let Some(d) = &self.digest {
            out.push_str(&tsv::row(["digest", &format!("sha256:{d}")]));
        }
        for (k, v) in &self.config {
            out.push_str(&tsv::row([format!("config.{k}"), v.clone()]));
        }
        for (k, v) in &self.results {
            out.push_str(&tsv::row([format!("result.{k}"), v.clone()]));
        }
        out
    }

    pub fn timing_line(&self) -> String {
        tsv::row(["wall_time_s", &format!("{:.6}", self.wall_time.as_secs_f64())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn report_layout() {
        let mut r = RunReport::new("solve");
        r.digest = Some("ab".into());
        r.config("s", 7).num("weight", 1.5);
        assert_eq!(
            r.to_tsv(),
            "command\tsolve\ndigest\tsha256:ab\nconfig.s\t7\nresult.weight\t1.5\n"
        );
        assert_eq!(r.get("weight"), Some("1.5"));
    }
}
