//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line to
//! the unbuffered stderr handle so the verdict shows even when output
//! capture is on.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use leo_outage::linkbudget::{feasible_range, leo_iot_grid, slant_range_km, LinkBudget};
use leo_outage::mcsim::simulate_all;
use leo_outage::outage::{asymp_op_mrc, asymp_op_sc, op_mrc, op_sc, op_ss};
use leo_outage::specfun::{whittaker_m_ln, SeriesControl};
use leo_outage::{
    oracle, HopPair, LinkSnr, McConfig, Outage, ShadowedRician, SrParams, StaircaseConfig,
    Threshold,
};
use leo_outage_cli::experiment::{Condition, ExperimentSpec, Preset};

fn verdict(n: u32, title: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "{tag} criterion {n}: {title} [{detail}]");
    assert!(passed, "criterion {n} failed: {detail}");
}

fn thr() -> Threshold {
    Threshold::from_rate(0.5).unwrap()
}

fn standard() -> StaircaseConfig {
    StaircaseConfig::standard(thr())
}

fn link_laws() -> [(&'static str, SrParams); 2] {
    [
        ("heavy", SrParams::heavy()),
        ("average", SrParams::average()),
    ]
}

fn link(p: SrParams, eta: f64) -> ShadowedRician {
    ShadowedRician::new(p, LinkSnr::new(eta).unwrap())
}

/// Each condition on the SNR grid of the preset it appears in.
fn figure_points() -> Vec<(Condition, f64)> {
    [Preset::Fig1, Preset::Fig2]
        .into_iter()
        .flat_map(|p| {
            let spec = ExperimentSpec::preset(p);
            spec.conditions
                .iter()
                .flat_map(|&c| {
                    spec.grid_for(c)
                        .iter()
                        .map(move |&db| (c, db))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

struct Schemes {
    ss: Outage,
    sc: Outage,
    mrc: Outage,
}

fn schemes(hops: &[HopPair], cfg: StaircaseConfig) -> Schemes {
    Schemes {
        ss: op_ss(&hops[0], thr(), cfg).unwrap(),
        sc: op_sc(hops, thr(), cfg).unwrap(),
        mrc: op_mrc(hops, thr(), cfg).unwrap(),
    }
}

#[test]
fn criterion_01_distribution_correctness() {
    let start = Instant::now();
    let (mut mass, mut fd, mut ks) = (0.0f64, 0.0f64, 0.0f64);
    for (_, p) in link_laws() {
        for eta in [1.0, 10.0] {
            let ch = link(p, eta);
            mass = mass.max((oracle::pdf_integral(&ch) - 1.0).abs());
            fd = fd.max(oracle::cdf_pdf_consistency(&ch, 50));
            ks = ks.max(oracle::sampler_ks(&ch, 1_000_000, 11));
        }
    }
    let elapsed = start.elapsed();
    let ok = mass < 1e-6 && fd < 1e-4 && ks < 0.005 && elapsed < Duration::from_secs(30);
    verdict(
        1,
        "distribution correctness",
        ok,
        &format!("|mass-1| {mass:.2e}, finite difference {fd:.2e}, KS {ks:.2e}, {elapsed:.1?}"),
    );
}

#[test]
fn criterion_02_moment_identity() {
    let (mut quad_err, mut mc_err) = (0.0f64, 0.0f64);
    for (_, p) in link_laws() {
        for eta in [1.0, 10.0] {
            let ch = link(p, eta);
            quad_err = quad_err.max((oracle::mean_by_quadrature(&ch) / ch.mean() - 1.0).abs());
            mc_err = mc_err.max((oracle::sample_mean(&ch, 10_000_000, 5) / ch.mean() - 1.0).abs());
        }
    }
    verdict(
        2,
        "mean SNR identity",
        quad_err < 1e-8 && mc_err < 0.01,
        &format!("quadrature {quad_err:.2e}, sample mean {mc_err:.2e}"),
    );
}

#[test]
fn criterion_03_sum_cdf() {
    let mut ks = 0.0f64;
    let mut k1 = 0.0f64;
    for (_, p) in link_laws() {
        let ch = link(p, 1.0);
        for k in [2, 5] {
            ks = ks.max(oracle::sum_ks(&ch, k, 1_000_000, 100 + u64::from(k)).unwrap());
        }
        let one = ch.sum(1).unwrap();
        for i in 1..=20 {
            let x = ch.mean() * 0.25 * f64::from(i);
            k1 = k1.max((one.cdf(x).unwrap() / ch.cdf(x) - 1.0).abs());
        }
    }
    verdict(
        3,
        "sum-of-links CDF",
        ks < 0.005 && k1 < 1e-6,
        &format!("KS {ks:.2e}, K=1 reduction {k1:.2e}"),
    );
}

#[test]
fn criterion_04_staircase_inside_simulation_ci() {
    let start = Instant::now();
    let mc = McConfig::new(10_000_000, 20_240_601).unwrap();
    let (mut checked, mut misses) = (0, Vec::new());
    for (c, db) in figure_points() {
        let hops = c.hops(db, 5).unwrap();
        let a = schemes(&hops, standard());
        let analytic = [("SS", a.ss), ("SC", a.sc), ("MRC", a.mrc)];
        if analytic.iter().all(|(_, o)| o.probability() < 1e-4) {
            continue;
        }
        let est = simulate_all(&hops, thr(), mc).unwrap();
        for ((name, o), e) in analytic.iter().zip([est.ss, est.sc, est.mrc]) {
            let p = o.probability();
            if p < 1e-4 {
                continue;
            }
            checked += 1;
            if !e.contains(p) {
                misses.push((100.0 * (p / e.p_hat - 1.0), format!("{name} {c} {db} dB")));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = misses.is_empty() && elapsed < Duration::from_secs(15 * 60);
    misses.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    let worst: Vec<String> = misses
        .iter()
        .take(6)
        .map(|(d, at)| format!("{at} {d:+.2}%"))
        .collect();
    verdict(
        4,
        "default staircase inside 99% simulation interval",
        ok,
        &format!(
            "{} of {checked} outside, {elapsed:.0?}, largest deviations from simulation: {}",
            misses.len(),
            worst.join(", ")
        ),
    );
}

#[test]
fn criterion_05_staircase_self_convergence() {
    let fine = StaircaseConfig::new(200, 30.0 * thr().gamma_th()).unwrap();
    let mut worst = (0.0f64, String::new());
    let mut over = 0;
    for (c, db) in figure_points() {
        let hops = c.hops(db, 5).unwrap();
        let (a, b) = (schemes(&hops, standard()), schemes(&hops, fine));
        for (name, x, y) in [
            ("SS", a.ss, b.ss),
            ("SC", a.sc, b.sc),
            ("MRC", a.mrc, b.mrc),
        ] {
            let rel = (y.probability() / x.probability() - 1.0).abs();
            over += usize::from(rel >= 0.01);
            if rel > worst.0 {
                worst = (rel, format!("{name} {c} {db} dB"));
            }
        }
    }
    verdict(
        5,
        "staircase self-convergence",
        over == 0,
        &format!(
            "{over} points at or above 1%, worst {:.2}% at {}",
            100.0 * worst.0,
            worst.1
        ),
    );
}

#[test]
fn criterion_06_scheme_ordering() {
    let mut bad = Vec::new();
    for (c, db) in figure_points() {
        let s = schemes(&c.hops(db, 5).unwrap(), standard());
        if !(s.mrc.is_below(&s.sc) && s.sc.is_below(&s.ss)) {
            bad.push(format!("{c} {db} dB"));
        }
    }
    verdict(
        6,
        "MRC below SC below SS",
        bad.is_empty(),
        &format!("{} violations {}", bad.len(), bad.join(", ")),
    );
}

/// SNR at which the K=5 analytic curve crosses 1e-2.
fn snr_at_one_percent(c: Condition, mrc: bool) -> f64 {
    let grid: Vec<f64> = (0..=80).map(|i| 0.25 * f64::from(i)).collect();
    let ops: Vec<f64> = grid
        .iter()
        .map(|&db| {
            let hops = c.hops(db, 5).unwrap();
            let o = if mrc {
                op_mrc(&hops, thr(), standard())
            } else {
                op_sc(&hops, thr(), standard())
            };
            o.unwrap().probability()
        })
        .collect();
    oracle::crossing(&grid, &ops, 1e-2).expect("curve crosses 1e-2 inside 0..20 dB")
}

#[test]
fn criterion_07_snr_gaps() {
    let sc_hh = snr_at_one_percent(Condition::HH, false);
    let sc_ha = snr_at_one_percent(Condition::HA, false);
    let gap_hh = sc_hh - snr_at_one_percent(Condition::HH, true);
    let gap_ha = sc_ha - snr_at_one_percent(Condition::HA, true);
    let gs = sc_hh - sc_ha;
    let within = |v: f64, target: f64| (v - target).abs() <= 1.5;
    verdict(
        7,
        "SNR gaps at OP = 1e-2",
        within(gap_hh, 6.0) && within(gap_ha, 6.0) && within(gs, 3.0),
        &format!("SC-MRC HH {gap_hh:.2} dB, SC-MRC HA {gap_ha:.2} dB, SC HH-HA {gs:.2} dB"),
    );
}

#[test]
fn criterion_08_diversity_order() {
    let (mut asym_err, mut exact_err) = (0.0f64, 0.0f64);
    for c in Condition::ALL {
        for k in [2u32, 5] {
            let kf = f64::from(k);
            let at = |db: f64| c.hops(db, k).unwrap();
            let eta = |db: f64| LinkSnr::from_db(db).unwrap().eta();
            let (lo, hi) = (at(30.0), at(40.0));
            for f in [asymp_op_sc, asymp_op_mrc] {
                let s = oracle::loglog_slope(
                    (eta(30.0), f(&lo, thr()).unwrap()),
                    (eta(40.0), f(&hi, thr()).unwrap()),
                );
                asym_err = asym_err.max((s + kf).abs());
            }
            let (lo, hi) = (at(35.0), at(40.0));
            for f in [op_sc, op_mrc] {
                let s = oracle::loglog_slope(
                    (eta(35.0), f(&lo, thr(), standard()).unwrap().probability()),
                    (eta(40.0), f(&hi, thr(), standard()).unwrap().probability()),
                );
                exact_err = exact_err.max(((s + kf) / kf).abs());
            }
        }
    }
    verdict(
        8,
        "diversity order K",
        asym_err < 1e-9 && exact_err < 0.15,
        &format!(
            "asymptote slope error {asym_err:.1e}, exact slope deviation {:.1}%",
            100.0 * exact_err
        ),
    );
}

#[test]
fn criterion_09_more_satellites() {
    let spec = ExperimentSpec::preset(Preset::Fig3);
    let mut problems = Vec::new();
    for c in Condition::ALL {
        let db = spec.grid_for(c)[0];
        let (mut sc, mut mrc) = (Vec::new(), Vec::new());
        for &k in &spec.k_values {
            let hops = c.hops(db, k).unwrap();
            sc.push(op_sc(&hops, thr(), standard()).unwrap());
            mrc.push(op_mrc(&hops, thr(), standard()).unwrap());
        }
        let falling = |v: &[Outage]| v.windows(2).all(|w| w[1].is_below(&w[0]));
        if !falling(&sc) || !falling(&mrc) {
            problems.push(format!("{c}: not decreasing in K"));
        }
        let ratio: Vec<f64> = mrc
            .iter()
            .zip(&sc)
            .map(|(m, s)| m.probability() / s.probability())
            .collect();
        if !ratio.windows(2).all(|w| w[1] < w[0]) {
            problems.push(format!("{c}: MRC/SC ratio {ratio:?}"));
        }
    }
    verdict(
        9,
        "outage falls with K, faster for MRC",
        problems.is_empty(),
        &problems.join("; "),
    );
}

#[test]
fn criterion_10_whittaker_identities() {
    let ctrl = SeriesControl::default();
    let mut worst = 0.0f64;
    for z in [0.5f64, 2.0, 10.0, 40.0] {
        let m = whittaker_m_ln(0.0, 0.5, z, ctrl).unwrap().value();
        worst = worst.max((m / (2.0 * (z / 2.0).sinh()) - 1.0).abs());
        for nu in [0.0f64, 0.5, 1.0, 2.5, 4.0] {
            let m = whittaker_m_ln(nu + 0.5, nu, z, ctrl).unwrap().value();
            worst = worst.max((m / (z.powf(nu + 0.5) * (-z / 2.0).exp()) - 1.0).abs());
        }
    }
    verdict(
        10,
        "Whittaker identities",
        worst < 1e-10,
        &format!("max relative error {worst:.2e}"),
    );
}

#[test]
fn criterion_11_link_budget() {
    let (lo, hi) = feasible_range(&leo_iot_grid()).unwrap();
    let range_ok = (lo + 9.0).abs() <= 6.0 && (hi - 20.0).abs() <= 6.0 && lo <= hi;
    let base = LinkBudget::leo_iot(-15.0, 15e3);
    let snr = |b: LinkBudget| b.snr_db().unwrap();
    let sweep = |f: &dyn Fn(f64) -> LinkBudget, xs: &[f64], rising: bool| {
        xs.windows(2).all(|w| {
            let (a, b) = (snr(f(w[0])), snr(f(w[1])));
            if rising {
                b > a
            } else {
                b < a
            }
        })
    };
    let steps: Vec<f64> = (0..20).map(f64::from).collect();
    let mono = sweep(
        &|x| LinkBudget {
            g_over_t_dbk: -25.0 + x,
            ..base
        },
        &steps,
        true,
    ) && sweep(
        &|x| LinkBudget {
            eirp_dbm: 10.0 + x,
            ..base
        },
        &steps,
        true,
    ) && sweep(
        &|x| LinkBudget {
            bandwidth_hz: 3.75e3 * (1.0 + x),
            ..base
        },
        &steps,
        false,
    ) && sweep(
        &|x| LinkBudget {
            frequency_hz: 4e8 + 1e8 * x,
            ..base
        },
        &steps,
        false,
    ) && sweep(
        &|x| LinkBudget {
            altitude_km: 400.0 + 100.0 * x,
            ..base
        },
        &steps,
        false,
    ) && sweep(
        &|x| LinkBudget {
            elevation_deg: 10.0 + 4.0 * x,
            ..base
        },
        &steps,
        true,
    );
    let geometry = (slant_range_km(800.0, 90.0) - 800.0).abs() < 1e-9;
    let exact_terms = {
        let doubled = snr(LinkBudget {
            bandwidth_hz: 30e3,
            ..base
        });
        let plus_one = snr(LinkBudget {
            g_over_t_dbk: -14.0,
            ..base
        });
        (snr(base) - doubled - 10.0 * 2f64.log10()).abs() < 1e-12
            && (plus_one - snr(base) - 1.0).abs() < 1e-12
    };
    verdict(
        11,
        "link-budget range and monotonicity",
        range_ok && mono && geometry && exact_terms,
        &format!("range ({lo:.2}, {hi:.2}) dB, monotone {mono}, additive terms {exact_terms}"),
    );
}

fn preset_outputs(preset: &str, threads: &str, dir: &std::path::Path) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("{preset}-{threads}.csv"));
    let svg = dir.join(format!("{preset}-{threads}.svg"));
    let out = Command::new(env!("CARGO_BIN_EXE_leo-outage"))
        .args([
            "run",
            "--preset",
            preset,
            "--seed",
            "7",
            "--threads",
            threads,
        ])
        .arg("--csv")
        .arg(&csv)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (std::fs::read(csv).unwrap(), std::fs::read(svg).unwrap())
}

#[test]
fn criterion_12_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let mut same = true;
    let mut sizes = Vec::new();
    for preset in ["fig1", "fig3"] {
        let a = preset_outputs(preset, "1", dir.path());
        let b = preset_outputs(preset, "3", dir.path());
        same &= a == b;
        sizes.push(format!(
            "{preset}: {} B csv, {} B svg",
            a.0.len(),
            a.1.len()
        ));
    }
    verdict(
        12,
        "byte-identical outputs across worker counts",
        same,
        &sizes.join(", "),
    );
}
