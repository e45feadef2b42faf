//! Seeded Monte Carlo estimates of the end-to-end outage probability.
//!
//! Trial `t` draws from its own generator keyed by `(seed, t)`, so the
//! estimates are bit-identical for any rayon pool size.

use rand::SeedableRng;
use rand_distr::Distribution;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{ShadowedRician, SrSampler};
use crate::error::{invalid, Result};
use crate::outage::{c_mrc, HopPair, Threshold};

/// Estimates with fewer outage events than this are flagged.
pub const MIN_EVENTS: u64 = 20;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    trials: u64,
    seed: u64,
    ci_level: f64,
}

impl McConfig {
    /// 99% confidence level.
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        Self::with_ci_level(trials, seed, 0.99)
    }

    pub fn with_ci_level(trials: u64, seed: u64, ci_level: f64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("Monte Carlo needs at least one trial"));
        }
        if !(ci_level > 0.0 && ci_level < 1.0) {
            return Err(invalid(format!(
                "ci_level must be in (0, 1), got {ci_level}"
            )));
        }
        Ok(Self {
            trials,
            seed,
            ci_level,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ci_level(&self) -> f64 {
        self.ci_level
    }
}

/// Outage frequency with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub outages: u64,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, ci_level: f64) -> Self {
        let n = trials as f64;
        let p = outages as f64 / n;
        let z = Normal::standard().inverse_cdf(0.5 + 0.5 * ci_level);
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            p_hat: p,
            ci_low: (centre - half).clamp(0.0, p),
            ci_high: (centre + half).clamp(p, 1.0),
            trials,
            outages,
        }
    }

    /// `p_hat · trials < 20`.
    pub fn low_confidence(&self) -> bool {
        self.outages < MIN_EVENTS
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    pub fn width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for trial `t`.
pub fn trial_rng(seed: u64, t: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(splitmix64(seed) ^ splitmix64(t ^ 0x5851_f42d_4c95_7f2d))
}

/// Runs `trials` trials, each returning a fixed-size vector of outage
/// indicators, and returns the per-slot counts.
fn count<const N: usize, F>(cfg: McConfig, trial: F) -> [u64; N]
where
    F: Fn(&mut Xoshiro256PlusPlus) -> [bool; N] + Sync,
{
    let chunks = cfg.trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [0u64; N];
            for t in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                let mut rng = trial_rng(cfg.seed, t);
                for (a, hit) in acc.iter_mut().zip(trial(&mut rng)) {
                    *a += u64::from(hit);
                }
            }
            acc
        })
        .reduce(
            || [0u64; N],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

struct Branches {
    samplers: Vec<(SrSampler, SrSampler)>,
}

impl Branches {
    fn new(hops_per_sat: &[HopPair]) -> Result<Self> {
        if hops_per_sat.is_empty() {
            return Err(invalid("at least one satellite is required"));
        }
        Ok(Self {
            samplers: hops_per_sat
                .iter()
                .map(|h| (h.ns.sampler(), h.sg.sampler()))
                .collect(),
        })
    }

    /// Draws every branch, node→satellite first, and folds the SNRs.
    fn draw<R: rand::Rng>(&self, rng: &mut R, mut visit: impl FnMut(f64, f64)) {
        for (ns, sg) in &self.samplers {
            let l_ns = ns.sample(rng);
            let l_sg = sg.sample(rng);
            visit(l_ns, l_sg);
        }
    }
}

/// Variable-gain end-to-end SNR `Λ_sg Λ_ns / (Λ_sg + 1 + Λ_ns)`.
fn variable_gain(l_ns: f64, l_sg: f64) -> f64 {
    l_sg * l_ns / (l_sg + 1.0 + l_ns)
}

/// Fixed-gain end-to-end SNR over branch sums.
fn fixed_gain(sum_ns: f64, sum_sg: f64, c_m: f64) -> f64 {
    sum_sg * sum_ns / (sum_sg + c_m)
}

pub fn simulate_ss(hops: &HopPair, thr: Threshold, cfg: McConfig) -> Result<OutageEstimate> {
    simulate_sc(std::slice::from_ref(hops), thr, cfg)
}

/// Selection combining: outage when the best variable-gain branch is below
/// threshold.
pub fn simulate_sc(
    hops_per_sat: &[HopPair],
    thr: Threshold,
    cfg: McConfig,
) -> Result<OutageEstimate> {
    let br = Branches::new(hops_per_sat)?;
    let g = thr.gamma_th();
    let [n] = count(cfg, |rng| {
        let mut best = 0.0f64;
        br.draw(rng, |ns, sg| best = best.max(variable_gain(ns, sg)));
        [best <= g]
    });
    Ok(OutageEstimate::from_counts(n, cfg.trials, cfg.ci_level))
}

/// Maximal-ratio combining with fixed gain `C_m` from the mean
/// node→satellite SNRs.
pub fn simulate_mrc(
    hops_per_sat: &[HopPair],
    thr: Threshold,
    cfg: McConfig,
) -> Result<OutageEstimate> {
    let br = Branches::new(hops_per_sat)?;
    let ns: Vec<ShadowedRician> = hops_per_sat.iter().map(|h| h.ns.clone()).collect();
    let c_m = c_mrc(&ns)?;
    let g = thr.gamma_th();
    let [n] = count(cfg, |rng| {
        let (mut s_ns, mut s_sg) = (0.0, 0.0);
        br.draw(rng, |ns, sg| {
            s_ns += ns;
            s_sg += sg;
        });
        [fixed_gain(s_ns, s_sg, c_m) <= g]
    });
    Ok(OutageEstimate::from_counts(n, cfg.trials, cfg.ci_level))
}

/// SS, SC and MRC estimates from one shared set of draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeEstimates {
    pub ss: OutageEstimate,
    pub sc: OutageEstimate,
    pub mrc: OutageEstimate,
}

/// Scores every trial under all three schemes. SS uses the first
/// satellite's branch. Each estimate is bit-identical to its single-scheme
/// counterpart at the same seed.
pub fn simulate_all(
    hops_per_sat: &[HopPair],
    thr: Threshold,
    cfg: McConfig,
) -> Result<SchemeEstimates> {
    let br = Branches::new(hops_per_sat)?;
    let ns: Vec<ShadowedRician> = hops_per_sat.iter().map(|h| h.ns.clone()).collect();
    let c_m = c_mrc(&ns)?;
    let g = thr.gamma_th();
    let [ss, sc, mrc] = count(cfg, |rng| {
        let (mut first, mut best) = (None, 0.0f64);
        let (mut s_ns, mut s_sg) = (0.0, 0.0);
        br.draw(rng, |ns, sg| {
            let v = variable_gain(ns, sg);
            first.get_or_insert(v);
            best = best.max(v);
            s_ns += ns;
            s_sg += sg;
        });
        [
            first.unwrap_or(0.0) <= g,
            best <= g,
            fixed_gain(s_ns, s_sg, c_m) <= g,
        ]
    });
    let est = |n| OutageEstimate::from_counts(n, cfg.trials, cfg.ci_level);
    Ok(SchemeEstimates {
        ss: est(ss),
        sc: est(sc),
        mrc: est(mrc),
    })
}
