//! Outage probabilities for single-satellite (SS), selection-combining (SC)
//! and maximal-ratio-combining (MRC) reception of an AF-relayed uplink.
//!
//! SS and SC use variable-gain relaying, which turns the outage event into
//! `(Λ_sg − γ)(Λ_ns − γ) ≤ γ² + γ`. MRC uses fixed gain, giving
//! `Δ_sg (Δ_ns − γ) ≤ C_m γ` over the per-hop SNR sums. Both are
//! probabilities of a hyperbolic region, evaluated by the M-step
//! staircase in [`staircase_probability`].

use crate::channel::{LinkSnr, ShadowedRician, SrParams, SumSr};
use crate::error::{invalid, Result};
use crate::specfun;

/// Step count and truncation depth of the staircase approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseConfig {
    steps: u32,
    depth: f64,
}

impl StaircaseConfig {
    /// `depth` is in the same linear SNR units as the thresholds.
    pub fn new(steps: u32, depth: f64) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("staircase step count must be >= 1"));
        }
        if !(depth > 0.0) || !depth.is_finite() {
            return Err(invalid(format!("staircase depth must be > 0, got {depth}")));
        }
        Ok(Self { steps, depth })
    }

    /// M = 50 steps with depth 15 γ_th.
    pub fn standard(thr: Threshold) -> Self {
        Self {
            steps: 50,
            depth: 15.0 * thr.gamma_th(),
        }
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }
}

/// SNR outage threshold `γ_th`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    gamma_th: f64,
}

impl Threshold {
    /// From a target rate in bit/s/Hz: `γ_th = 2^{2R} − 1`.
    pub fn from_rate(rate: f64) -> Result<Self> {
        Self::from_gamma((2.0 * rate).exp2() - 1.0)
    }

    pub fn from_gamma(gamma_th: f64) -> Result<Self> {
        if !(gamma_th > 0.0) || !gamma_th.is_finite() {
            return Err(invalid(format!("threshold must be > 0, got {gamma_th}")));
        }
        Ok(Self { gamma_th })
    }

    pub fn gamma_th(&self) -> f64 {
        self.gamma_th
    }

    /// `Υ = γ_th² + γ_th`.
    pub fn upsilon(&self) -> f64 {
        self.gamma_th * self.gamma_th + self.gamma_th
    }
}

/// Node→satellite and satellite→GS links of one satellite.
#[derive(Debug, Clone, PartialEq)]
pub struct HopPair {
    pub ns: ShadowedRician,
    pub sg: ShadowedRician,
}

impl HopPair {
    pub fn new(ns: ShadowedRician, sg: ShadowedRician) -> Self {
        Self { ns, sg }
    }

    /// Both hops at the same transmit SNR.
    pub fn equal_power(ns: SrParams, sg: SrParams, snr: LinkSnr) -> Self {
        Self {
            ns: ShadowedRician::new(ns, snr),
            sg: ShadowedRician::new(sg, snr),
        }
    }
}

/// An outage probability together with its complement, each accumulated
/// from nonnegative terms so that neither loses precision near 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outage {
    probability: f64,
    complement: f64,
}

impl Outage {
    fn new(probability: f64, complement: f64) -> Self {
        Self {
            probability: probability.clamp(0.0, 1.0),
            complement: complement.clamp(0.0, 1.0),
        }
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// `1 − probability`, carried separately.
    pub fn complement(&self) -> f64 {
        self.complement
    }

    /// Strict ordering that stays decidable when both probabilities round
    /// to the same double near 0 or 1.
    pub fn is_below(&self, other: &Outage) -> bool {
        if self.probability != other.probability {
            self.probability < other.probability
        } else {
            self.complement > other.complement
        }
    }
}

/// A CDF usable as a staircase marginal.
pub trait CdfEval {
    fn cdf(&self, x: f64) -> Result<f64>;

    /// Survival `1 − F(x)`.
    fn sf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.cdf(x)?)
    }
}

impl CdfEval for ShadowedRician {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(ShadowedRician::cdf(self, x))
    }

    fn sf(&self, x: f64) -> Result<f64> {
        Ok(ShadowedRician::sf(self, x))
    }
}

impl CdfEval for SumSr {
    fn cdf(&self, x: f64) -> Result<f64> {
        SumSr::cdf(self, x)
    }
}

/// Adapts a plain closure to [`CdfEval`].
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> CdfEval for FnCdf<F> {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x))
    }
}

/// CDF and survival at one abscissa.
#[derive(Debug, Clone, Copy)]
struct Point {
    f: f64,
    s: f64,
}

impl Point {
    fn at(d: &dyn CdfEval, x: f64) -> Result<Self> {
        Ok(Self {
            f: d.cdf(x)?,
            s: d.sf(x)?,
        })
    }

    /// `F(hi) − F(lo)` from whichever side is further from 1.
    fn mass_to(self, hi: Point) -> f64 {
        let v = if self.f < 0.5 {
            hi.f - self.f
        } else {
            self.s - hi.s
        };
        v.max(0.0)
    }
}

/// Every abscissa the staircase needs on one axis, each evaluated once.
struct AxisTable {
    offset: Point,
    /// `offset + √rhs + i·L/M` for `i = 0..=M`.
    grid: Vec<Point>,
    /// `offset + rhs / (√rhs + (i−1)·L/M)` for `i = 1..=M`.
    hyperbola: Vec<Point>,
}

impl AxisTable {
    fn build(d: &dyn CdfEval, offset: f64, rhs: f64, cfg: StaircaseConfig) -> Result<Self> {
        let root = rhs.sqrt();
        let step = cfg.depth / f64::from(cfg.steps);
        let grid = (0..=cfg.steps)
            .map(|i| Point::at(d, offset + root + f64::from(i) * step))
            .collect::<Result<Vec<_>>>()?;
        let hyperbola = (1..=cfg.steps)
            .map(|i| {
                if i == 1 {
                    Ok(grid[0])
                } else {
                    Point::at(d, offset + rhs / (root + f64::from(i - 1) * step))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            offset: Point::at(d, offset)?,
            grid,
            hyperbola,
        })
    }

    fn corner(&self) -> Point {
        self.grid[0]
    }
}

/// `Pr[(X − x_offset)(Y − y_offset) ≤ rhs]` for independent `X`, `Y` by the
/// M-step staircase.
///
/// The region is split into the half-planes `X ≤ x_offset` and
/// `Y ≤ y_offset`, the square between the offsets and the corner
/// `(x_offset + √rhs, y_offset + √rhs)`, and two staircases of `M` blocks
/// of width `L/M` running out to depth `L` beyond the corner. Each block's
/// height is the hyperbola at the block's inner edge, so the staircase
/// covers the hyperbola from outside. Mass beyond depth `L` is dropped; see
/// [`staircase_tail_bound`].
pub fn staircase_probability(
    fx: &dyn CdfEval,
    fy: &dyn CdfEval,
    x_offset: f64,
    y_offset: f64,
    rhs: f64,
    cfg: StaircaseConfig,
) -> Result<Outage> {
    if !(rhs > 0.0) || !(x_offset >= 0.0) || !(y_offset >= 0.0) {
        return Err(invalid(format!(
            "staircase needs rhs > 0 and nonnegative offsets, got rhs {rhs}, offsets ({x_offset}, {y_offset})"
        )));
    }
    let x = AxisTable::build(fx, x_offset, rhs, cfg)?;
    let y = AxisTable::build(fy, y_offset, rhs, cfg)?;
    let m = cfg.steps as usize;

    let mut p = Kahan::default();
    p.add(x.offset.f);
    p.add(y.offset.f * x.offset.s);
    p.add(x.offset.mass_to(x.corner()) * y.offset.mass_to(y.corner()));
    for i in 0..m {
        // R4: Y block i, X up to the hyperbola
        p.add(x.offset.mass_to(x.hyperbola[i]) * y.grid[i].mass_to(y.grid[i + 1]));
        // R5: X block i, Y up to the hyperbola
        p.add(y.offset.mass_to(y.hyperbola[i]) * x.grid[i].mass_to(x.grid[i + 1]));
    }

    // The complement: beyond the corner on both axes, the slivers between
    // each staircase step and the square's edge, and the strips past depth L.
    let mut q = Kahan::default();
    q.add(x.corner().s * y.corner().s);
    for i in 0..m {
        q.add(y.grid[i].mass_to(y.grid[i + 1]) * x.hyperbola[i].mass_to(x.corner()));
        q.add(x.grid[i].mass_to(x.grid[i + 1]) * y.hyperbola[i].mass_to(y.corner()));
    }
    q.add(y.grid[m].s * x.offset.mass_to(x.corner()));
    q.add(x.grid[m].s * y.offset.mass_to(y.corner()));

    Ok(Outage::new(p.total(), q.total()))
}

/// Upper bound on the probability of the part of the region that lies
/// beyond depth `L` and is therefore not counted by
/// [`staircase_probability`].
pub fn staircase_tail_bound(
    fx: &dyn CdfEval,
    fy: &dyn CdfEval,
    x_offset: f64,
    y_offset: f64,
    rhs: f64,
    cfg: StaircaseConfig,
) -> Result<f64> {
    let edge = rhs.sqrt() + cfg.depth;
    let reach = rhs / edge;
    let x_far = fx.sf(x_offset + edge)?;
    let y_far = fy.sf(y_offset + edge)?;
    let x_band = Point::at(fx, x_offset)?.mass_to(Point::at(fx, x_offset + reach)?);
    let y_band = Point::at(fy, y_offset)?.mass_to(Point::at(fy, y_offset + reach)?);
    Ok(x_far * y_band + y_far * x_band)
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Single-satellite outage under variable-gain relaying.
pub fn op_ss(hops: &HopPair, thr: Threshold, cfg: StaircaseConfig) -> Result<Outage> {
    let g = thr.gamma_th();
    staircase_probability(&hops.sg, &hops.ns, g, g, thr.upsilon(), cfg)
}

/// Selection combining: the product of the per-satellite SS outages.
pub fn op_sc(hops_per_sat: &[HopPair], thr: Threshold, cfg: StaircaseConfig) -> Result<Outage> {
    if hops_per_sat.is_empty() {
        return Err(invalid("at least one satellite is required"));
    }
    let mut prob = 1.0;
    let mut ln_complement = 0.0;
    for hops in hops_per_sat {
        let o = op_ss(hops, thr, cfg)?;
        prob *= o.probability();
        ln_complement += (-o.complement()).ln_1p();
    }
    Ok(Outage::new(prob, -ln_complement.exp_m1()))
}

/// Fixed-gain constant `C_m = [Σ_k 1/(1 + E[Λ_ns_k])]^{-1}`.
pub fn c_mrc(ns_links: &[ShadowedRician]) -> Result<f64> {
    if ns_links.is_empty() {
        return Err(invalid("at least one satellite is required"));
    }
    let inv: f64 = ns_links.iter().map(|l| 1.0 / (1.0 + l.mean())).sum();
    Ok(1.0 / inv)
}

fn require_iid(hops_per_sat: &[HopPair]) -> Result<&HopPair> {
    let first = hops_per_sat
        .first()
        .ok_or_else(|| invalid("at least one satellite is required"))?;
    if hops_per_sat.iter().any(|h| h != first) {
        return Err(invalid(
            "MRC sum statistics need identical fading parameters and SNR on every satellite",
        ));
    }
    Ok(first)
}

/// Maximal-ratio combining under fixed-gain relaying. All satellites must
/// share the same hop parameters.
pub fn op_mrc(hops_per_sat: &[HopPair], thr: Threshold, cfg: StaircaseConfig) -> Result<Outage> {
    let first = require_iid(hops_per_sat)?;
    let k = hops_per_sat.len() as u32;
    let ns: Vec<ShadowedRician> = hops_per_sat.iter().map(|h| h.ns.clone()).collect();
    let c_m = c_mrc(&ns)?;
    let sum_sg = first.sg.sum(k)?;
    let sum_ns = first.ns.sum(k)?;
    let g = thr.gamma_th();
    staircase_probability(&sum_sg, &sum_ns, 0.0, g, c_m * g, cfg)
}

fn common_snr(hops_per_sat: &[HopPair]) -> Result<f64> {
    let first = hops_per_sat
        .first()
        .ok_or_else(|| invalid("at least one satellite is required"))?;
    let eta = first.ns.snr();
    let equal = hops_per_sat
        .iter()
        .all(|h| h.ns.snr() == eta && h.sg.snr() == eta);
    if !equal {
        return Err(invalid(
            "asymptotic expressions assume equal power on every hop",
        ));
    }
    Ok(eta.eta())
}

/// `Π_k (α_sg,k + α_ns,k)^{1/K}`.
fn sc_alpha_mean(hops_per_sat: &[HopPair]) -> f64 {
    let k = hops_per_sat.len() as f64;
    hops_per_sat
        .iter()
        .map(|h| ((h.sg.derived().alpha + h.ns.derived().alpha).ln() / k).exp())
        .product()
}

/// Leading high-SNR term of the SC outage, `((γ/η) Π_k (α_sg+α_ns)^{1/K})^K`.
pub fn asymp_op_sc(hops_per_sat: &[HopPair], thr: Threshold) -> Result<f64> {
    let eta = common_snr(hops_per_sat)?;
    let k = hops_per_sat.len() as i32;
    Ok((thr.gamma_th() / eta * sc_alpha_mean(hops_per_sat)).powi(k))
}

/// Leading high-SNR term of the MRC outage,
/// `(γ α_ns / (Γ(K+1)^{1/K} η))^K`.
pub fn asymp_op_mrc(hops_per_sat: &[HopPair], thr: Threshold) -> Result<f64> {
    let eta = common_snr(hops_per_sat)?;
    let first = require_iid(hops_per_sat)?;
    let k = hops_per_sat.len() as f64;
    let ln =
        k * (thr.gamma_th() * first.ns.derived().alpha / eta).ln() - specfun::ln_gamma(k + 1.0)?;
    Ok(ln.exp())
}

/// Coding gains and diversity order of the high-SNR asymptotes
/// `P_out ≈ (G_c η)^{−d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingGains {
    pub sc: f64,
    pub mrc: f64,
    pub diversity_order: u32,
}

pub fn coding_gains(hops_per_sat: &[HopPair], thr: Threshold) -> Result<CodingGains> {
    common_snr(hops_per_sat)?;
    let first = require_iid(hops_per_sat)?;
    let k = hops_per_sat.len() as u32;
    let kf = f64::from(k);
    let sc = 1.0 / (thr.gamma_th() * sc_alpha_mean(hops_per_sat));
    let mrc =
        (specfun::ln_gamma(kf + 1.0)? / kf).exp() / (thr.gamma_th() * first.ns.derived().alpha);
    Ok(CodingGains {
        sc,
        mrc,
        diversity_order: k,
    })
}
