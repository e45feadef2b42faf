use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{ensure, Context, Result};
use leo_outage::mcsim::{simulate_mrc, simulate_sc, simulate_ss};
use leo_outage::outage::{asymp_op_mrc, asymp_op_sc, op_mrc, op_sc, op_ss};
use leo_outage::{
    HopPair, LinkSnr, McConfig, OutageEstimate, SrParams, StaircaseConfig, Threshold,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("unknown scheme '{0}' (expected SS, SC or MRC)")]
    Scheme(String),
    #[error("unknown condition '{0}' (expected HH, HA, AH or AA)")]
    Condition(String),
    #[error("unknown preset '{0}' (expected fig1, fig2, fig3 or custom)")]
    Preset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Ss,
    Sc,
    Mrc,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ss, Scheme::Sc, Scheme::Mrc];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ss => "SS",
            Scheme::Sc => "SC",
            Scheme::Mrc => "MRC",
        }
    }
}

impl FromStr for Scheme {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SS" => Ok(Scheme::Ss),
            "SC" => Ok(Scheme::Sc),
            "MRC" => Ok(Scheme::Mrc),
            _ => Err(ParseError::Scheme(s.to_owned())),
        }
    }
}

/// Shadowing on the node→satellite and satellite→GS hops, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Condition {
    HH,
    HA,
    AH,
    AA,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::HH, Condition::HA, Condition::AH, Condition::AA];

    pub fn name(self) -> &'static str {
        match self {
            Condition::HH => "HH",
            Condition::HA => "HA",
            Condition::AH => "AH",
            Condition::AA => "AA",
        }
    }

    /// `(node→satellite, satellite→GS)` parameters.
    pub fn params(self) -> (SrParams, SrParams) {
        let (h, a) = (SrParams::heavy(), SrParams::average());
        match self {
            Condition::HH => (h, h),
            Condition::HA => (h, a),
            Condition::AH => (a, h),
            Condition::AA => (a, a),
        }
    }

    pub fn hops(self, snr_db: f64, k: u32) -> Result<Vec<HopPair>> {
        let (ns, sg) = self.params();
        let snr = LinkSnr::from_db(snr_db)?;
        Ok(vec![HopPair::equal_power(ns, sg, snr); k as usize])
    }
}

impl FromStr for Condition {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "HH" => Ok(Condition::HH),
            "HA" => Ok(Condition::HA),
            "AH" => Ok(Condition::AH),
            "AA" => Ok(Condition::AA),
            _ => Err(ParseError::Condition(s.to_owned())),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = ParseError;
            fn try_from(s: String) -> Result<Self, ParseError> {
                s.parse()
            }
        }
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.name().to_owned()
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}
string_serde!(Scheme);
string_serde!(Condition);
string_serde!(Preset);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Custom => "custom",
        }
    }
}

impl FromStr for Preset {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "custom" => Ok(Preset::Custom),
            _ => Err(ParseError::Preset(s.to_owned())),
        }
    }
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// A full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub schemes: Vec<Scheme>,
    pub conditions: Vec<Condition>,
    pub k_values: Vec<u32>,
    pub snr_grid_db: Vec<f64>,
    /// Replaces `snr_grid_db` for the listed conditions.
    pub condition_snr_db: BTreeMap<Condition, Vec<f64>>,
    pub threshold: Threshold,
    pub steps: u32,
    /// Staircase depth as a multiple of `γ_th`.
    pub depth_factor: f64,
    pub mc: Option<McConfig>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

fn db_range(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}

impl ExperimentSpec {
    pub fn preset(preset: Preset) -> Self {
        let mut spec = Self {
            preset,
            schemes: Scheme::ALL.to_vec(),
            conditions: Condition::ALL.to_vec(),
            k_values: vec![5],
            snr_grid_db: db_range(0.0, 2.0, 11),
            condition_snr_db: BTreeMap::new(),
            threshold: Threshold::from_rate(0.5).expect("positive rate"),
            steps: 50,
            depth_factor: 15.0,
            mc: Some(McConfig::new(DEFAULT_TRIALS, DEFAULT_SEED).expect("nonzero trials")),
            csv: None,
            svg: None,
        };
        match preset {
            Preset::Fig1 => spec.conditions = vec![Condition::HH, Condition::HA],
            Preset::Fig2 => {
                spec.conditions = vec![Condition::AH, Condition::AA];
                spec.snr_grid_db = db_range(-6.0, 1.5, 11);
            }
            Preset::Fig3 => {
                spec.schemes = vec![Scheme::Sc, Scheme::Mrc];
                spec.k_values = (2..=6).collect();
                spec.snr_grid_db = vec![13.5];
                spec.condition_snr_db =
                    [(Condition::AH, vec![7.5]), (Condition::AA, vec![7.5])].into();
            }
            Preset::Custom => {}
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.schemes.is_empty(), "at least one scheme is required");
        ensure!(
            !self.conditions.is_empty(),
            "at least one condition is required"
        );
        ensure!(
            !self.k_values.is_empty(),
            "at least one K value is required"
        );
        ensure!(
            self.k_values.iter().all(|&k| k >= 1),
            "K values must be >= 1"
        );
        ensure!(!self.snr_grid_db.is_empty(), "the SNR grid is empty");
        ensure!(
            self.condition_snr_db.values().all(|g| !g.is_empty()),
            "per-condition SNR grids must be nonempty"
        );
        ensure!(
            self.snr_grid_db
                .iter()
                .chain(self.condition_snr_db.values().flatten())
                .all(|x| x.is_finite()),
            "SNR grid values must be finite"
        );
        self.staircase()?;
        Ok(())
    }

    pub fn staircase(&self) -> Result<StaircaseConfig> {
        Ok(StaircaseConfig::new(
            self.steps,
            self.depth_factor * self.threshold.gamma_th(),
        )?)
    }

    pub fn grid_for(&self, c: Condition) -> &[f64] {
        self.condition_snr_db.get(&c).unwrap_or(&self.snr_grid_db)
    }

    /// Grid points in output order. SS rows use a single satellite.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for &scheme in &self.schemes {
            let ks: &[u32] = if scheme == Scheme::Ss {
                &[1]
            } else {
                &self.k_values
            };
            for &condition in &self.conditions {
                for &k in ks {
                    for &snr_db in self.grid_for(condition) {
                        out.push(Point {
                            scheme,
                            condition,
                            k,
                            snr_db,
                        });
                    }
                }
            }
        }
        out
    }

    /// Plots against K when every condition has a single SNR and K varies.
    pub fn k_on_x_axis(&self) -> bool {
        self.k_values.len() > 1 && self.conditions.iter().all(|&c| self.grid_for(c).len() == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub scheme: Scheme,
    pub condition: Condition,
    pub k: u32,
    pub snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Point,
    pub op_analytic: f64,
    /// `1 − op_analytic`, carried separately.
    pub op_complement: f64,
    pub op_asymptotic: Option<f64>,
    pub mc: Option<OutageEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
    pub k_on_x_axis: bool,
}

fn evaluate(p: Point, spec: &ExperimentSpec, cfg: StaircaseConfig) -> Result<Row> {
    let hops = p.condition.hops(p.snr_db, p.k)?;
    let thr = spec.threshold;
    let (analytic, asymptotic) = match p.scheme {
        Scheme::Ss => (op_ss(&hops[0], thr, cfg)?, None),
        Scheme::Sc => (op_sc(&hops, thr, cfg)?, Some(asymp_op_sc(&hops, thr)?)),
        Scheme::Mrc => (op_mrc(&hops, thr, cfg)?, Some(asymp_op_mrc(&hops, thr)?)),
    };
    let mc = spec
        .mc
        .map(|mc| match p.scheme {
            Scheme::Ss => simulate_ss(&hops[0], thr, mc),
            Scheme::Sc => simulate_sc(&hops, thr, mc),
            Scheme::Mrc => simulate_mrc(&hops, thr, mc),
        })
        .transpose()?;
    Ok(Row {
        point: p,
        op_analytic: analytic.probability(),
        op_complement: analytic.complement(),
        op_asymptotic: asymptotic,
        mc,
    })
}

/// Evaluates every grid point. Rows come back in [`ExperimentSpec::points`]
/// order whatever the pool size.
pub fn run(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let cfg = spec.staircase()?;
    let rows = spec
        .points()
        .into_par_iter()
        .map(|p| {
            evaluate(p, spec, cfg).with_context(|| {
                format!("{} {} K={} at {} dB", p.scheme, p.condition, p.k, p.snr_db)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        rows,
        k_on_x_axis: spec.k_on_x_axis(),
    })
}
