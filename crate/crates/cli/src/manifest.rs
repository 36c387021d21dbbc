use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Provenance record written next to every command's output.
///
/// `argv` holds the arguments after the program name; running the tool
/// again with them regenerates `solve`, `entropy-curve` and `simulate`
/// outputs byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is plain data") + "\n"
    }
}

/// `<out>.manifest.json`
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_rejects_garbage() {
        let m = RunManifest {
            command: "solve".into(),
            argv: vec!["solve".into(), "--omega".into(), "1".into()],
            parameters: serde_json::Map::new(),
            seed: None,
            tool_version: "0.1.0".into(),
            outputs: vec![],
            wall_clock_seconds: 0.5,
        };
        assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
        assert!(RunManifest::from_json("{\"command\": 3}").is_err());
        assert_eq!(
            manifest_path_for(Path::new("out/a.csv")),
            PathBuf::from("out/a.csv.manifest.json")
        );
    }
}
