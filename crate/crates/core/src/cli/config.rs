use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::AblationRow;
use crate::features::{EmbeddingTable, FeatureConfig, FeaturePreset, FeatureResources};
use crate::lexicons::{LexiconSet, NegationList};
use crate::model::TrainingSpec;
use crate::synth::SynthConfig;

/// Input and output locations. Unset resource paths fall back to the
/// bundled stand-ins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Unlabeled posts for `predict`.
    pub input: Option<PathBuf>,
    pub lexicon_manifest: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// One negation term per line.
    pub negations: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

/// Everything a run depends on. Written as `run_config.toml` next to the
/// outputs so the run can be repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub preset: FeaturePreset,
    /// Explicit feature toggles; takes precedence over `preset`.
    pub features: Option<FeatureConfig>,
    /// Ablation rows to run, by name. Empty means the standard five plus
    /// every entry of `extra_rows`.
    pub rows: Vec<String>,
    pub extra_rows: Vec<AblationRow>,
    pub paths: Paths,
    pub training: TrainingSpec,
    pub synthetic: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: None,
            preset: FeaturePreset::Full,
            features: None,
            rows: Vec::new(),
            extra_rows: Vec::new(),
            paths: Paths::default(),
            training: TrainingSpec::default(),
            synthetic: SynthConfig::default(),
        }
    }
}

pub const DEFAULT_OUT_DIR: &str = "triage-run";
pub const RUN_CONFIG_FILE: &str = "run_config.toml";

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    pub fn feature_config(&self) -> FeatureConfig {
        self.features
            .clone()
            .unwrap_or_else(|| self.preset.config())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    /// Training spec with the run seed applied.
    pub fn training_spec(&self) -> TrainingSpec {
        TrainingSpec {
            seed: self.seed,
            ..self.training.clone()
        }
    }

    pub fn require<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("no {what} given")))
    }

    /// Load the lexicons, embeddings and negation list named in `paths`.
    pub fn resources(&self) -> Result<FeatureResources> {
        let lexicons = match &self.paths.lexicon_manifest {
            Some(p) => LexiconSet::from_manifest(p)?,
            None => LexiconSet::builtin(),
        };
        let embeddings = match &self.paths.embeddings {
            Some(p) => EmbeddingTable::load(p)?,
            None => EmbeddingTable::tiny(),
        };
        let mut resources = FeatureResources::new(lexicons, Some(embeddings));
        if let Some(p) = &self.paths.negations {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            resources.negation = NegationList::new(
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#')),
            );
        }
        Ok(resources)
    }

    /// The ablation rows selected by `rows`.
    pub fn ablation_rows(&self) -> Result<Vec<AblationRow>> {
        if self.rows.is_empty() {
            let mut rows = AblationRow::standard();
            rows.extend(self.extra_rows.iter().cloned());
            return Ok(rows);
        }
        self.rows
            .iter()
            .map(|name| {
                if let Some(row) = self.extra_rows.iter().find(|r| &r.name == name) {
                    return Ok(row.clone());
                }
                let preset: FeaturePreset = name.parse()?;
                Ok(AblationRow::preset(preset))
            })
            .collect()
    }

    /// Write the resolved config into the output directory.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        write_file(&dir.join(RUN_CONFIG_FILE), &self.to_toml())
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
