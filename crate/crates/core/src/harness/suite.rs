use std::path::Path;

use serde::Deserialize;

use super::HarnessError;

/// Manifest file inside a suite directory.
pub const MANIFEST: &str = "suite.toml";

#[derive(Clone, Debug, Deserialize, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    /// Program path relative to the suite directory.
    pub file: String,
    /// Standard input for regular runs.
    #[serde(default)]
    pub input: String,
    /// Smaller input for smoke tests; defaults to `input`.
    #[serde(default)]
    pub quick_input: String,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
pub struct Suite {
    #[serde(rename = "benchmark")]
    pub benchmarks: Vec<BenchmarkSpec>,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Suite, toml::de::Error> {
        let mut s: Suite = toml::from_str(text)?;
        for b in &mut s.benchmarks {
            if b.quick_input.is_empty() {
                b.quick_input = b.input.clone();
            }
        }
        Ok(s)
    }

    pub fn load(dir: &Path) -> Result<Suite, HarnessError> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        Suite::parse(&text).map_err(|source| HarnessError::Manifest { path, source })
    }

    pub fn get(&self, name: &str) -> Option<&BenchmarkSpec> {
        self.benchmarks.iter().find(|b| b.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_input_defaults_to_input() {
        let s = Suite::parse("[[benchmark]]\nname = \"t\"\nfile = \"t.gtp\"\ninput = \"5\"\n").unwrap();
        assert_eq!(s.benchmarks[0].quick_input, "5");
        assert!(s.get("t").is_some());
    }
}
