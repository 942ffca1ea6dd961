//! The simulation plan file.
//!
//! A plan is TOML. Relative paths are resolved against the directory that
//! holds the plan file. Every section except `corpus` is optional:
//!
//! ```toml
//! corpus = "reuters.jsonl"
//! output_dir = "out/sweep-1"      # TOPICSIM_OUTPUT_DIR overrides this
//! master_seed = 7
//! gt_mode = "labels"              # or "baseline_as_gt"
//! stop_list_file = "stop.txt"     # default: built-in English list
//!
//! [preprocess]
//! stem = true
//! rare_df_threshold = 0.01
//!
//! [lda]
//! k = 20                          # default: number of classes, else 10
//! iterations = 500
//!
//! [actions]
//! stoplist_draws = 30
//! topic_count_draws = 30
//!
//! [evaluation]
//! silhouette_max_sample = 2000
//! pair_mode = { mode = "sampled", n_pairs = 10000, seed = 0 }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::actions::PlanParams;
use crate::metrics::EvalSettings;
use crate::model::LdaSettings;
use crate::preprocess::{PreprocessConfig, StopList};

/// Environment variable that replaces the plan's output directory.
pub const OUTPUT_DIR_ENV: &str = "TOPICSIM_OUTPUT_DIR";

/// Where the reference labels come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GtMode {
    /// Each document's own single label; multi-label and unlabelled
    /// documents are left out of the benchmark metrics.
    #[default]
    Labels,
    /// The baseline run's topic assignment. Only the size of a change is
    /// meaningful in this mode, not its direction.
    BaselineAsGt,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("topicsim-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationPlan {
    pub corpus: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub gt_mode: GtMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_list_file: Option<PathBuf>,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub lda: LdaSettings,
    #[serde(default)]
    pub actions: PlanParams,
    #[serde(default)]
    pub evaluation: EvalSettings,
}

impl SimulationPlan {
    /// A plan with default settings for `corpus`.
    pub fn new(corpus: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            corpus: corpus.into(),
            output_dir: output_dir.into(),
            master_seed: 0,
            gt_mode: GtMode::default(),
            stop_list_file: None,
            preprocess: PreprocessConfig::default(),
            lda: LdaSettings::default(),
            actions: PlanParams::default(),
            evaluation: EvalSettings::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Plan(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    /// Read a plan file, resolve its paths and apply the output directory
    /// override from the environment.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        let mut plan = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        plan.corpus = base.join(&plan.corpus);
        plan.output_dir = base.join(&plan.output_dir);
        plan.stop_list_file = plan.stop_list_file.map(|p| base.join(p));
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            plan.output_dir = PathBuf::from(dir);
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.preprocess.validate().map_err(|e| HarnessError::Plan(e.to_string()))?;
        if let Some(k) = self.lda.k {
            if k < 1 {
                return Err(HarnessError::Plan("lda.k must be at least 1".into()));
            }
        }
        if self.lda.iterations < 1 {
            return Err(HarnessError::Plan("lda.iterations must be at least 1".into()));
        }
        if self.evaluation.silhouette_max_sample < 2 {
            return Err(HarnessError::Plan("evaluation.silhouette_max_sample must be at least 2".into()));
        }
        Ok(())
    }

    pub fn stoplist(&self) -> Result<StopList, HarnessError> {
        match &self.stop_list_file {
            Some(path) => StopList::from_file(path).map_err(|e| HarnessError::Plan(e.to_string())),
            None => Ok(StopList::english()),
        }
    }

    /// LDA settings with the sampler seed filled in from the master seed
    /// when the plan leaves it unset.
    pub fn effective_lda(&self) -> LdaSettings {
        let mut lda = self.lda.clone();
        lda.seed = Some(lda.seed.unwrap_or_else(|| crate::seed::derive(self.master_seed, 0)));
        lda
    }
}
