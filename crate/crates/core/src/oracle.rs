//! Independent cross-checks shared by the test suites and the
//! `validate` command.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::channel::ShadowedRician;
use crate::error::Result;
use crate::quad;

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Length scale beyond which the density is negligible after ×50.
fn span(ch: &ShadowedRician) -> f64 {
    let eta = ch.snr().eta();
    50.0 * eta.max(1.0 / ch.rate())
}

/// `∫ pdf` over the support.
pub fn pdf_integral(ch: &ShadowedRician) -> f64 {
    quad::integrate(|x| ch.pdf(x), 0.0, span(ch), 1e-12).0
}

/// `∫ x pdf(x) dx` over the support.
pub fn mean_by_quadrature(ch: &ShadowedRician) -> f64 {
    quad::integrate(|x| x * ch.pdf(x), 0.0, span(ch), 1e-13).0
}

/// Largest relative gap between a central difference of the CDF and the
/// density over `n` points spread across the bulk of the distribution.
pub fn cdf_pdf_consistency(ch: &ShadowedRician, n: usize) -> f64 {
    let scale = ch.mean();
    (1..=n)
        .map(|i| {
            let x = scale * 5.0 * i as f64 / n as f64;
            let h = 1e-4 * x;
            let fd = (ch.cdf(x + h) - ch.cdf(x - h)) / (2.0 * h);
            ((fd - ch.pdf(x)) / ch.pdf(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// KS statistic of `draws` sampler outputs against the closed-form CDF.
pub fn sampler_ks(ch: &ShadowedRician, draws: usize, seed: u64) -> f64 {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut xs: Vec<f64> = (0..draws).map(|_| ch.sample(&mut rng)).collect();
    ks_statistic(&mut xs, |x| ch.cdf(x))
}

/// KS statistic of `draws` K-fold sums against the sum CDF.
pub fn sum_ks(ch: &ShadowedRician, k: u32, draws: usize, seed: u64) -> Result<f64> {
    let sum = ch.sum(k)?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut xs: Vec<f64> = (0..draws)
        .map(|_| (0..k).map(|_| ch.sample(&mut rng)).sum())
        .collect();
    // evaluate the CDF once per sample, propagating the first failure
    xs.sort_by(f64::total_cmp);
    let cdf: Vec<f64> = xs.iter().map(|&x| sum.cdf(x)).collect::<Result<_>>()?;
    let n = xs.len() as f64;
    Ok(cdf
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs()))
        .fold(0.0, f64::max))
}

/// Sample mean of `draws` sampler outputs.
pub fn sample_mean(ch: &ShadowedRician, draws: usize, seed: u64) -> f64 {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..draws {
        acc += ch.sample(&mut rng);
    }
    acc / draws as f64
}

/// First abscissa where a decreasing curve crosses `target`, interpolating
/// `log10 y` linearly in `x`.
pub fn crossing(xs: &[f64], ys: &[f64], target: f64) -> Option<f64> {
    let lt = target.log10();
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        let (a, b) = (y[0].log10(), y[1].log10());
        (a >= lt && b <= lt && a != b).then(|| x[0] + (x[1] - x[0]) * (a - lt) / (a - b))
    })
}

/// Slope of `log10 y` against `log10 x` between two points.
pub fn loglog_slope((x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    (y2.log10() - y1.log10()) / (x2.log10() - x1.log10())
}
