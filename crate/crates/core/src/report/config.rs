//! Run configuration: a TOML file with top-level parameters and one
//! `[[language]]` block per language.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::phonotactics::Smoothing;

fn default_folds_phon() -> usize {
    10
}
fn default_folds_morph() -> usize {
    30
}
fn default_ngram_order() -> usize {
    4
}
fn default_smoothing() -> String {
    "witten-bell".to_string()
}
fn default_add_k() -> f64 {
    0.1
}
fn default_min_accuracy() -> f64 {
    0.75
}
fn default_alpha() -> f64 {
    0.05
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageConfig {
    pub id: String,
    pub unimorph_path: PathBuf,
    pub pron_path: PathBuf,
    pub freq_path: Option<PathBuf>,
    pub raw_text_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "language")]
    pub languages: Vec<LanguageConfig>,
    #[serde(default = "default_folds_phon")]
    pub folds_phon: usize,
    #[serde(default = "default_folds_morph")]
    pub folds_morph: usize,
    #[serde(default = "default_ngram_order")]
    pub ngram_order: usize,
    /// "witten-bell" or "add-k".
    #[serde(default = "default_smoothing")]
    pub smoothing: String,
    #[serde(default = "default_add_k")]
    pub add_k: f64,
    #[serde(default = "default_min_accuracy")]
    pub min_accuracy: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for per-language stages; 0 means all cores.
    #[serde(default)]
    pub jobs: usize,
}

impl RunConfig {
    /// Parses a config file and resolves the paths it names relative to the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut config: RunConfig = toml::from_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for lang in &mut config.languages {
            lang.unimorph_path = resolve(base, &lang.unimorph_path);
            lang.pron_path = resolve(base, &lang.pron_path);
            lang.freq_path = lang.freq_path.as_ref().map(|p| resolve(base, p));
            lang.raw_text_path = lang.raw_text_path.as_ref().map(|p| resolve(base, p));
        }
        if !config.output_dir.is_absolute() {
            config.output_dir = resolve(base, &config.output_dir);
        }
        Ok(config)
    }

    pub fn smoothing(&self) -> Result<Smoothing> {
        match self.smoothing.as_str() {
            "witten-bell" | "witten_bell" => Ok(Smoothing::WittenBell),
            "add-k" | "add_k" => {
                if self.add_k > 0.0 {
                    Ok(Smoothing::AddK(self.add_k))
                } else {
                    Err(Error::Config(format!("add_k must be positive, got {}", self.add_k)))
                }
            }
            other => Err(Error::Config(format!(
                "unknown smoothing {other:?}; expected \"witten-bell\" or \"add-k\""
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.languages.is_empty() {
            return Err(Error::Config("no languages configured".to_string()));
        }
        if self.folds_phon < 2 || self.folds_morph < 2 {
            return Err(Error::Config("fold counts must be at least 2".to_string()));
        }
        if self.ngram_order < 1 {
            return Err(Error::Config("ngram_order must be at least 1".to_string()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        self.smoothing()?;
        let mut seen = std::collections::HashSet::new();
        for lang in &self.languages {
            if !seen.insert(lang.id.as_str()) {
                return Err(Error::Config(format!("duplicate language id {:?}", lang.id)));
            }
            if lang.freq_path.is_some() == lang.raw_text_path.is_some() {
                return Err(Error::Config(format!(
                    "language {:?} needs exactly one of freq_path or raw_text_path",
                    lang.id
                )));
            }
            for path in [Some(&lang.unimorph_path), Some(&lang.pron_path)]
                .into_iter()
                .flatten()
                .chain(lang.freq_path.iter())
                .chain(lang.raw_text_path.iter())
            {
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "language {:?}: input {} does not exist",
                        lang.id,
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_a_minimal_config_with_defaults() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["u.tsv", "p.tsv", "f.tsv"] {
            let mut f = std::fs::File::create(dir.path().join(name)).unwrap();
            writeln!(f, "x").unwrap();
        }
        let config_path = dir.path().join("run.toml");
        std::fs::write(
            &config_path,
            r#"
seed = 7

[[language]]
id = "toy"
unimorph_path = "u.tsv"
pron_path = "p.tsv"
freq_path = "f.tsv"
"#,
        )
        .unwrap();
        let config = RunConfig::load(&config_path).unwrap();
        config.validate().unwrap();
        assert_eq!(config.folds_phon, 10);
        assert_eq!(config.folds_morph, 30);
        assert_eq!(config.ngram_order, 4);
        assert_eq!(config.min_accuracy, 0.75);
        assert_eq!(config.seed, 7);
        assert!(config.languages[0].unimorph_path.is_absolute() || config.languages[0].unimorph_path.starts_with(dir.path()));
        assert!(matches!(config.smoothing().unwrap(), Smoothing::WittenBell));
    }

    #[test]
    fn rejects_both_or_neither_frequency_source() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["u.tsv", "p.tsv", "f.tsv", "r.txt"] {
            std::fs::write(dir.path().join(name), "x").unwrap();
        }
        let config_path = dir.path().join("run.toml");
        std::fs::write(
            &config_path,
            r#"
[[language]]
id = "toy"
unimorph_path = "u.tsv"
pron_path = "p.tsv"
freq_path = "f.tsv"
raw_text_path = "r.txt"
"#,
        )
        .unwrap();
        let config = RunConfig::load(&config_path).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn rejects_missing_inputs_and_bad_parameters() {
        let dir = tempfile::tempdir().unwrap();
        let config_path = dir.path().join("run.toml");
        std::fs::write(
            &config_path,
            r#"
[[language]]
id = "toy"
unimorph_path = "missing.tsv"
pron_path = "missing2.tsv"
freq_path = "missing3.tsv"
"#,
        )
        .unwrap();
        let config = RunConfig::load(&config_path).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn parses_add_k_smoothing() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["u.tsv", "p.tsv", "f.tsv"] {
            std::fs::write(dir.path().join(name), "x").unwrap();
        }
        let config_path = dir.path().join("run.toml");
        std::fs::write(
            &config_path,
            r#"
smoothing = "add-k"
add_k = 0.5

[[language]]
id = "toy"
unimorph_path = "u.tsv"
pron_path = "p.tsv"
freq_path = "f.tsv"
"#,
        )
        .unwrap();
        let config = RunConfig::load(&config_path).unwrap();
        match config.smoothing().unwrap() {
            Smoothing::AddK(k) => assert_eq!(k, 0.5),
            other => panic!("unexpected smoothing {other:?}"),
        }
    }
}
