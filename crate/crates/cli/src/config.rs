//! Experiment files: flat TOML keys, lists in TOML array syntax.
//!
//! ```toml
//! preset = "fig1"          # starting point, default "custom"
//! schemes = ["SC", "MRC"]
//! conditions = ["HH", "HA"]
//! k_values = [5]
//! snr_grid_db = [0, 2, 4, 6]
//! rate = 0.5               # or gamma_th = 1.0
//! steps = 50
//! depth_factor = 15        # staircase depth in units of gamma_th
//! mc = true
//! trials = 1000000
//! seed = 1
//! ci_level = 0.99
//! csv = "out.csv"
//! svg = "out.svg"
//!
//! [condition_snr_db]
//! AH = [7.5]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use leo_outage::{McConfig, Threshold};
use serde::Deserialize;

use crate::experiment::{Condition, ExperimentSpec, Preset, Scheme, DEFAULT_SEED, DEFAULT_TRIALS};

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub schemes: Option<Vec<Scheme>>,
    pub conditions: Option<Vec<Condition>>,
    pub k_values: Option<Vec<u32>>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub condition_snr_db: Option<BTreeMap<Condition, Vec<f64>>>,
    pub rate: Option<f64>,
    pub gamma_th: Option<f64>,
    pub steps: Option<u32>,
    pub depth_factor: Option<f64>,
    pub mc: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub ci_level: Option<f64>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub no_mc: bool,
}

/// Preset defaults, then the file, then the command line.
pub fn resolve(file: &ConfigFile, cli: &Overrides) -> Result<ExperimentSpec> {
    let preset = cli.preset.or(file.preset).unwrap_or(Preset::Custom);
    let mut spec = ExperimentSpec::preset(preset);
    let f = file.clone();
    if let Some(v) = f.schemes {
        spec.schemes = v;
    }
    if let Some(v) = f.conditions {
        spec.conditions = v;
    }
    if let Some(v) = f.k_values {
        spec.k_values = v;
    }
    if let Some(v) = f.snr_grid_db {
        spec.snr_grid_db = v;
        spec.condition_snr_db.clear();
    }
    if let Some(v) = f.condition_snr_db {
        spec.condition_snr_db = v;
    }
    spec.threshold = match (f.rate, f.gamma_th) {
        (Some(_), Some(_)) => bail!("set either rate or gamma_th, not both"),
        (Some(r), None) => Threshold::from_rate(r)?,
        (None, Some(g)) => Threshold::from_gamma(g)?,
        (None, None) => spec.threshold,
    };
    if let Some(v) = f.steps {
        spec.steps = v;
    }
    if let Some(v) = f.depth_factor {
        spec.depth_factor = v;
    }

    let mc_on = !cli.no_mc && f.mc.unwrap_or(true);
    spec.mc = if mc_on {
        let trials = cli.trials.or(f.trials).unwrap_or(DEFAULT_TRIALS);
        let seed = cli.seed.or(f.seed).unwrap_or(DEFAULT_SEED);
        Some(McConfig::with_ci_level(
            trials,
            seed,
            f.ci_level.unwrap_or(0.99),
        )?)
    } else {
        None
    };
    spec.csv = cli.csv.clone().or(f.csv);
    spec.svg = cli.svg.clone().or(f.svg);
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_custom_defaults() {
        let spec = resolve(&ConfigFile::default(), &Overrides::default()).unwrap();
        assert_eq!(spec, ExperimentSpec::preset(Preset::Custom));
    }

    #[test]
    fn file_values_apply() {
        let f = ConfigFile::parse(
            r#"
            preset = "fig3"
            schemes = ["MRC"]
            gamma_th = 3.0
            depth_factor = 20
            trials = 500
            [condition_snr_db]
            HH = [10.0, 11.0]
            "#,
        )
        .unwrap();
        let s = resolve(&f, &Overrides::default()).unwrap();
        assert_eq!(s.schemes, vec![Scheme::Mrc]);
        assert_eq!(s.k_values, (2..=6).collect::<Vec<_>>());
        assert_eq!(s.grid_for(Condition::HH), &[10.0, 11.0]);
        assert_eq!(s.staircase().unwrap().depth(), 60.0);
        assert_eq!(s.mc.unwrap().trials(), 500);
    }

    #[test]
    fn flags_beat_file() {
        let f = ConfigFile::parse("seed = 4\ntrials = 10\ncsv = \"a.csv\"").unwrap();
        let o = Overrides {
            seed: Some(9),
            csv: Some("b.csv".into()),
            ..Overrides::default()
        };
        let s = resolve(&f, &o).unwrap();
        assert_eq!((s.mc.unwrap().seed(), s.mc.unwrap().trials()), (9, 10));
        assert_eq!(s.csv.unwrap(), PathBuf::from("b.csv"));
        let off = resolve(&f, &Overrides { no_mc: true, ..o }).unwrap();
        assert!(off.mc.is_none());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("schemes = [\"XYZ\"]").is_err());
        let both = ConfigFile::parse("rate = 1.0\ngamma_th = 2.0").unwrap();
        assert!(resolve(&both, &Overrides::default()).is_err());
        let empty = ConfigFile::parse("k_values = []").unwrap();
        assert!(resolve(&empty, &Overrides::default()).is_err());
    }
}
