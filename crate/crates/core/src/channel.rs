//! Shadowed-Rician (SR) statistics of the instantaneous link SNR
//! `Λ = η |h|²`.
//!
//! The LoS amplitude is Nakagami-m with mean power Ω and the scatter is
//! circularly-symmetric Gaussian with total power 2b. For integer `m` the
//! SNR density is a finite sum of Gamma kernels sharing the rate
//! `(β − δ)/η`, which gives closed forms for the PDF, CDF and mean.
//! [`SumSr`] evaluates the CDF of a sum of K i.i.d. SR variables through
//! Whittaker functions.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{invalid, Result};
use crate::specfun::{self, SeriesControl};

/// Shadowed-Rician fading parameters `(m, b, Ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrParams {
    m: u32,
    b: f64,
    omega: f64,
}

impl SrParams {
    /// `m` must be a positive integer, `b > 0` and `omega >= 0`.
    pub fn new(m: f64, b: f64, omega: f64) -> Result<Self> {
        if !(m >= 1.0) || m.fract() != 0.0 || m > f64::from(u32::MAX) {
            return Err(invalid(format!(
                "shadowing severity m must be a positive integer, got {m}"
            )));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(invalid(format!(
                "multipath half-power b must be > 0, got {b}"
            )));
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(invalid(format!(
                "LoS power omega must be >= 0, got {omega}"
            )));
        }
        Ok(Self {
            m: m as u32,
            b,
            omega,
        })
    }

    /// Heavy shadowing, `(2, 0.063, 0.0005)`.
    pub fn heavy() -> Self {
        Self {
            m: 2,
            b: 0.063,
            omega: 0.0005,
        }
    }

    /// Average shadowing, `(5, 0.251, 0.279)`.
    pub fn average() -> Self {
        Self {
            m: 5,
            b: 0.251,
            omega: 0.279,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn derive(&self) -> SrDerived {
        let two_b = 2.0 * self.b;
        let mf = f64::from(self.m);
        let denom = two_b * mf + self.omega;
        SrDerived {
            alpha: (two_b * mf / denom).powi(self.m as i32) / two_b,
            beta: 1.0 / two_b,
            delta: self.omega / (two_b * denom),
        }
    }

    /// `ζ(κ) = (−1)^κ (1−m)_κ δ^κ / (κ!)²`; nonnegative for `κ < m`.
    pub fn zeta(&self, kappa: u32) -> f64 {
        let d = self.derive();
        let sign = if kappa & 1 == 0 { 1.0 } else { -1.0 };
        let fact = factorial(kappa);
        sign * specfun::pochhammer(1.0 - f64::from(self.m), kappa) * d.delta.powi(kappa as i32)
            / (fact * fact)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Constants `α`, `β`, `δ` of the SR density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrDerived {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

/// Transmit SNR `η = P/σ²` on a linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinkSnr(f64);

impl LinkSnr {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(invalid(format!("transmit SNR must be > 0, got {eta}")));
        }
        Ok(Self(eta))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn eta(&self) -> f64 {
        self.0
    }

    pub fn db(&self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// The SNR distribution of one SR-faded link with transmit SNR `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowedRician {
    params: SrParams,
    derived: SrDerived,
    snr: LinkSnr,
    /// `ζ(κ)` for `κ = 0..m`.
    zeta: Vec<f64>,
}

impl ShadowedRician {
    pub fn new(params: SrParams, snr: LinkSnr) -> Self {
        let zeta = (0..params.m).map(|k| params.zeta(k)).collect();
        Self {
            derived: params.derive(),
            params,
            snr,
            zeta,
        }
    }

    pub fn params(&self) -> SrParams {
        self.params
    }

    pub fn derived(&self) -> SrDerived {
        self.derived
    }

    pub fn snr(&self) -> LinkSnr {
        self.snr
    }

    /// Exponential decay rate `(β − δ)/η` shared by every term.
    pub fn rate(&self) -> f64 {
        (self.derived.beta - self.derived.delta) / self.snr.0
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let eta = self.snr.0;
        let mut acc = 0.0;
        let mut x_pow = 1.0;
        let mut eta_pow = eta;
        for &z in &self.zeta {
            acc += z * x_pow / eta_pow;
            x_pow *= x;
            eta_pow *= eta;
        }
        (self.derived.alpha * acc * (-self.rate() * x).exp()).max(0.0)
    }

    /// Survival function `1 − F(x)`, evaluated directly from the tail sum.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let eta = self.snr.0;
        let inv_rate = 1.0 / self.rate();
        let mut acc = 0.0;
        let mut eta_pow = eta;
        for (k, &z) in self.zeta.iter().enumerate() {
            // sum_p k!/p! * rate^-(k+1-p) * x^p
            let mut inner = 0.0;
            let mut coef = factorial(k as u32) * inv_rate.powi(k as i32 + 1);
            for p in 0..=k {
                inner += coef * x.powi(p as i32);
                coef *= self.rate() / (p as f64 + 1.0);
            }
            acc += z / eta_pow * inner;
            eta_pow *= eta;
        }
        (self.derived.alpha * acc * (-self.rate() * x).exp()).clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (1.0 - self.sf(x)).clamp(0.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        let d = self.derived;
        let r = d.beta - d.delta;
        let eta = self.snr.0;
        let acc: f64 = self
            .zeta
            .iter()
            .enumerate()
            .map(|(k, &z)| z * eta * factorial(k as u32 + 1) / r.powi(k as i32 + 2))
            .sum();
        d.alpha * acc
    }

    /// High-SNR linearization `α x / η`; not clamped.
    pub fn asymptotic_cdf(&self, x: f64) -> f64 {
        self.derived.alpha * x.max(0.0) / self.snr.0
    }

    /// High-SNR form of the K-fold sum CDF, `α^K x^K / (η^K Γ(K+1))`.
    pub fn asymptotic_sum_cdf(&self, k: u32, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let kf = f64::from(k);
        let ln = kf * (self.derived.alpha.ln() + x.ln() - self.snr.0.ln())
            - statrs::function::gamma::ln_gamma(kf + 1.0);
        ln.exp()
    }

    pub fn sampler(&self) -> SrSampler {
        SrSampler::new(self.params, self.snr)
    }

    /// One SNR draw. Builds a sampler per call; use [`Self::sampler`] in
    /// loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    pub fn sum(&self, k: u32) -> Result<SumSr> {
        SumSr::new(self.clone(), k, SeriesControl::default())
    }
}

/// Draws `Λ = η |A e^{jφ} + Z|²` with `A² ~ Gamma(m, Ω/m)` and
/// `Z ~ CN(0, 2b)`.
///
/// `Z` is circularly symmetric, so `|A e^{jφ} + Z|` has the same law as
/// `|A + Z|` and the phase draw is skipped.
#[derive(Debug, Clone, Copy)]
pub struct SrSampler {
    eta: f64,
    los_power: Option<Gamma<f64>>,
    sigma: f64,
}

impl SrSampler {
    pub fn new(params: SrParams, snr: LinkSnr) -> Self {
        let m = f64::from(params.m);
        let los_power = (params.omega > 0.0)
            .then(|| Gamma::new(m, params.omega / m).expect("validated SR parameters"));
        Self {
            eta: snr.0,
            los_power,
            sigma: params.b.sqrt(),
        }
    }
}

impl Distribution<f64> for SrSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.los_power.map_or(0.0, |g| g.sample(rng).sqrt());
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let re = a + self.sigma * re;
        let im = self.sigma * im;
        self.eta * (re * re + im * im)
    }
}

/// Constants `(K, d, c, ε)` of the K-fold sum CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumSrContext {
    pub k: u32,
    pub d: u32,
    pub c: u32,
    pub epsilon: f64,
}

impl SumSrContext {
    /// `d = max(K, ⌊mK⌋)`, `c = (d − K)⁺`, `ε = mK − d`.
    pub fn new(m: u32, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(invalid("number of summands K must be >= 1"));
        }
        let mk = f64::from(m) * f64::from(k);
        let d = k.max(mk.floor() as u32);
        Ok(Self {
            k,
            d,
            c: d.saturating_sub(k),
            epsilon: mk - f64::from(d),
        })
    }
}

/// CDF of `Δ = Λ₁ + … + Λ_K` for i.i.d. SR summands.
#[derive(Debug, Clone)]
pub struct SumSr {
    base: ShadowedRician,
    ctx: SumSrContext,
    ctrl: SeriesControl,
    /// `ln(α^K C(c,l) β^(c−l))` per `l`.
    ln_coef: Vec<f64>,
}

impl SumSr {
    pub fn new(base: ShadowedRician, k: u32, ctrl: SeriesControl) -> Result<Self> {
        let ctx = SumSrContext::new(base.params.m, k)?;
        let d = base.derived;
        let kf = f64::from(ctx.k);
        let ln_c_fact = specfun::ln_gamma(f64::from(ctx.c) + 1.0)?;
        let ln_coef = (0..=ctx.c)
            .map(|l| {
                let ln_binom = ln_c_fact
                    - specfun::ln_gamma(f64::from(l) + 1.0)?
                    - specfun::ln_gamma(f64::from(ctx.c - l) + 1.0)?;
                Ok(kf * d.alpha.ln() + ln_binom + f64::from(ctx.c - l) * d.beta.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base,
            ctx,
            ctrl,
            ln_coef,
        })
    }

    pub fn context(&self) -> SumSrContext {
        self.ctx
    }

    pub fn base(&self) -> &ShadowedRician {
        &self.base
    }

    /// `ln |𝒢(x, l, d, η)|` and its sign.
    fn ln_g(&self, x: f64, l: u32, d: u32) -> Result<(f64, f64)> {
        let r = self.base.derived.beta - self.base.derived.delta;
        let eta = self.base.snr.0;
        let (lf, df) = (f64::from(l), f64::from(d));
        let z = r * x / eta;
        let mu = 0.5 * (df + lf - 1.0);
        let nu = 0.5 * (df - lf);
        let m = specfun::whittaker_m_ln(mu, nu, z, self.ctrl)?;
        let half = 0.5 * (df - lf - 1.0);
        let ln = -(half + 1.0) * r.ln() - half * eta.ln() - specfun::ln_gamma(df - lf + 1.0)?
            + half * x.ln()
            - 0.5 * z
            + m.ln_abs;
        Ok((m.sign, ln))
    }

    /// Upper bound on `1 − F(x)`. The summed density is a mixture, with
    /// nonnegative weights, of Gamma laws of shape `K..=d` and rate
    /// `(β − δ)/η`, so the survival is at most that of the shape-`d` law.
    fn tail_bound(&self, x: f64) -> f64 {
        let z = self.base.rate() * x;
        statrs::function::gamma::gamma_ur(f64::from(self.ctx.d), z)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        // Below half an ulp of 1 the CDF rounds to exactly 1; skipping the
        // series here keeps its argument inside the convergent range.
        if self.tail_bound(x) < f64::EPSILON / 4.0 {
            return Ok(1.0);
        }
        let delta = self.base.derived.delta;
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut add = |v: f64| {
            let t = sum + v;
            if f64::abs(sum) >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
        };
        for l in 0..=self.ctx.c {
            let coef = self.ln_coef[l as usize];
            let (sign, ln) = self.ln_g(x, l, self.ctx.d)?;
            add(sign * (coef + ln).exp());
            if self.ctx.epsilon != 0.0 {
                let (sign, ln) = self.ln_g(x, l, self.ctx.d + 1)?;
                add(self.ctx.epsilon * delta * sign * (coef + ln).exp());
            }
        }
        Ok((sum + comp).clamp(0.0, 1.0))
    }
}
