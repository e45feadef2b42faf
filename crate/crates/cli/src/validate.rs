//! Oracle cross-checks behind the `validate` command.

use anyhow::Result;
use leo_outage::linkbudget::{feasible_range, leo_iot_grid};
use leo_outage::mcsim::{simulate_mrc, simulate_ss};
use leo_outage::outage::{op_mrc, op_ss};
use leo_outage::specfun::{whittaker_m_ln, SeriesControl};
use leo_outage::{
    oracle, HopPair, LinkSnr, McConfig, ShadowedRician, SrParams, StaircaseConfig, Threshold,
};
use serde::Serialize;

use crate::experiment::Condition;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn bound(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value < limit, format!("{value:.3e} < {limit:.0e}"))
    }
}

fn links() -> Vec<(&'static str, ShadowedRician)> {
    let mut out = Vec::new();
    for (name, p) in [
        ("heavy", SrParams::heavy()),
        ("average", SrParams::average()),
    ] {
        for eta in [1.0, 10.0] {
            out.push((
                name,
                ShadowedRician::new(p, LinkSnr::new(eta).expect("positive")),
            ));
        }
    }
    out
}

/// Runs every check; `draws` scales the sampling-based ones.
pub fn run_checks(draws: usize, trials: u64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, ch) in links() {
        let eta = ch.snr().eta();
        out.push(Check::bound(
            format!("pdf integrates to one ({name}, η={eta})"),
            (oracle::pdf_integral(&ch) - 1.0).abs(),
            1e-6,
        ));
        out.push(Check::bound(
            format!("cdf matches pdf ({name}, η={eta})"),
            oracle::cdf_pdf_consistency(&ch, 40),
            1e-4,
        ));
        out.push(Check::bound(
            format!("closed-form mean ({name}, η={eta})"),
            (oracle::mean_by_quadrature(&ch) / ch.mean() - 1.0).abs(),
            1e-8,
        ));
        let ks_limit = 1.63 / (draws as f64).sqrt();
        out.push(Check::bound(
            format!("sampler KS ({name}, η={eta})"),
            oracle::sampler_ks(&ch, draws, seed),
            ks_limit,
        ));
        out.push(Check::bound(
            format!("five-fold sum KS ({name}, η={eta})"),
            oracle::sum_ks(&ch, 5, draws / 4, seed ^ 1)?,
            1.63 / ((draws / 4) as f64).sqrt(),
        ));
    }

    let ctrl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    for z in [0.5f64, 2.0, 10.0, 40.0] {
        let sinh = 2.0 * (z / 2.0).sinh();
        worst = worst.max((whittaker_m_ln(0.0, 0.5, z, ctrl)?.value() / sinh - 1.0).abs());
        for nu in [0.5f64, 1.0, 2.5] {
            let closed = (nu + 0.5) * z.ln() - z / 2.0;
            worst = worst.max((whittaker_m_ln(nu + 0.5, nu, z, ctrl)?.ln_abs - closed).abs());
        }
    }
    out.push(Check::bound("Whittaker identities", worst, 1e-10));

    let thr = Threshold::from_gamma(1.0)?;
    let fine = StaircaseConfig::new(8000, 100.0)?;
    let mc = McConfig::new(trials, seed)?;
    let hh = Condition::HH.hops(10.0, 1)?;
    let exact = op_ss(&hh[0], thr, fine)?.probability();
    let est = simulate_ss(&hh[0], thr, mc)?;
    out.push(Check::new(
        "converged SS inside simulation CI (HH, 10 dB)",
        est.contains(exact),
        format!("{exact:.5e} in [{:.5e}, {:.5e}]", est.ci_low, est.ci_high),
    ));
    let (ns, sg) = Condition::AA.params();
    let aa = vec![HopPair::equal_power(ns, sg, LinkSnr::new(5.0)?); 5];
    let exact = op_mrc(&aa, thr, fine)?.probability();
    let est = simulate_mrc(&aa, thr, mc)?;
    out.push(Check::new(
        "converged MRC inside simulation CI (AA, η=5, K=5)",
        est.contains(exact),
        format!("{exact:.5e} in [{:.5e}, {:.5e}]", est.ci_low, est.ci_high),
    ));

    let (lo, hi) = feasible_range(&leo_iot_grid())?;
    out.push(Check::new(
        "link-budget range near (-9, 20) dB",
        (lo + 9.0).abs() <= 6.0 && (hi - 20.0).abs() <= 6.0,
        format!("({lo:.2}, {hi:.2}) dB"),
    ));
    Ok(out)
}
