//! Run manifests: flat `key = value` text embedding the full resolved
//! configuration and results, plus the artifact paths, so `report` can
//! regenerate figures without recomputation.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

pub const MANIFEST_HEADER: &str = "# shrinker-lab v1 manifest";

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Input(format!("manifest is missing '{key}'")))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MANIFEST_HEADER}\n");
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == MANIFEST_HEADER => {}
            other => {
                return Err(CliError::Input(format!(
                    "not a manifest (header {other:?})"
                )))
            }
        }
        let mut entries = BTreeMap::new();
        for line in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once(" = ") else {
                return Err(CliError::Input(format!("bad manifest line '{line}'")));
            };
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Manifest { entries })
    }

    pub fn load(path: &Path) -> Result<Manifest, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Manifest::parse(&text)
    }
}

/// Common result fields shared by the search commands.
pub fn record_search(man: &mut Manifest, res: &shrinker_core::SearchResult) {
    man.set("parameter", res.parameter);
    man.set("bracket_lo", res.bracket.0);
    man.set("bracket_hi", res.bracket.1);
    man.set(
        "classification",
        match res.classification {
            shrinker_core::Classification::ImmersedSphere => "immersed-sphere",
            shrinker_core::Classification::EmbeddedTorus => "embedded-torus",
            shrinker_core::Classification::ImmersedTorus => "immersed-torus",
            shrinker_core::Classification::Unclassified => "unclassified",
        },
    );
    man.set(
        "symmetry",
        match res.symmetry {
            shrinker_core::SymmetryAxis::VerticalAxis => "vertical-axis",
            shrinker_core::SymmetryAxis::Diagonal => "diagonal",
            shrinker_core::SymmetryAxis::None => "none",
        },
    );
    for (k, v) in &res.residuals {
        man.set(&format!("residual.{k}"), v);
    }
}
