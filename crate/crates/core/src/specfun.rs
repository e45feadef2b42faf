//! Scalar special functions used by the shadowed-Rician distribution and
//! the K-fold sum CDF.
//!
//! Everything here works on real arguments only. The confluent
//! hypergeometric function is evaluated by its ascending series with
//! compensated summation; there is no asymptotic branch, so arguments too
//! large for the series surface as [`Error::NonConvergence`].

use crate::error::{Error, Result};

/// Truncation control for infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    rel_tolerance: f64,
    max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tolerance > 0.0) {
            return Err(Error::Domain {
                function: "SeriesControl::new",
                value: rel_tolerance,
                constraint: "rel_tolerance > 0",
            });
        }
        if max_terms == 0 {
            return Err(Error::Domain {
                function: "SeriesControl::new",
                value: 0.0,
                constraint: "max_terms >= 1",
            });
        }
        Ok(Self {
            rel_tolerance,
            max_terms,
        })
    }

    pub fn rel_tolerance(&self) -> f64 {
        self.rel_tolerance
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-12,
            max_terms: 500,
        }
    }
}

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLn {
    /// One of -1, 0 or +1.
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLn {
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self {
                sign: 0.0,
                ln_abs: f64::NEG_INFINITY,
            }
        } else {
            Self {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
            constraint: "x > 0",
        });
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Rising factorial `a (a+1) ... (a+n-1)`; equals 1 for `n == 0`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..n {
        acc *= a + f64::from(j);
    }
    acc
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Confluent hypergeometric function 1F1(a; b; z) for `z >= 0`.
pub fn kummer_1f1(a: f64, b: f64, z: f64, ctrl: SeriesControl) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain {
            function: "kummer_1f1",
            value: b,
            constraint: "b not a nonpositive integer",
        });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            function: "kummer_1f1",
            value: z,
            constraint: "z >= 0",
        });
    }
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }

    // Neumaier summation; the running term is t_n = (a)_n z^n / ((b)_n n!).
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    for n in 0..ctrl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) / (b + nf) * z / (nf + 1.0);
        term *= ratio;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;

        if term == 0.0 {
            // a is a nonpositive integer: the polynomial has terminated.
            return Ok(sum + comp);
        }
        if !term.is_finite() {
            break;
        }
        // Only stop once every later factor (a+n) is positive and the terms
        // are shrinking, so a small term cannot be followed by a larger one.
        let settled = a + nf + 1.0 > 0.0 && ratio.abs() < 1.0;
        if settled && term.abs() < ctrl.rel_tolerance * (sum + comp).abs() {
            return Ok(sum + comp);
        }
    }
    Err(Error::NonConvergence {
        function: "kummer_1f1",
        terms: ctrl.max_terms,
    })
}

/// Whittaker function M_{mu,nu}(z) in sign / log-magnitude form.
///
/// `M = exp(-z/2) z^(nu + 1/2) 1F1(nu - mu + 1/2; 1 + 2 nu; z)`.
pub fn whittaker_m_ln(mu: f64, nu: f64, z: f64, ctrl: SeriesControl) -> Result<SignedLn> {
    if !(z > 0.0) {
        return Err(Error::Domain {
            function: "whittaker_m_ln",
            value: z,
            constraint: "z > 0",
        });
    }
    let b = 1.0 + 2.0 * nu;
    if is_nonpositive_integer(b) {
        return Err(Error::Domain {
            function: "whittaker_m_ln",
            value: nu,
            constraint: "1 + 2 nu not a nonpositive integer",
        });
    }
    let f = kummer_1f1(nu - mu + 0.5, b, z, ctrl)?;
    let f = SignedLn::from_value(f);
    Ok(SignedLn {
        sign: f.sign,
        ln_abs: -0.5 * z + (nu + 0.5) * z.ln() + f.ln_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(rel(ln_gamma(6.0).unwrap(), 120f64.ln()) < 1e-14);
        assert!(rel(ln_gamma(0.5).unwrap(), std::f64::consts::PI.sqrt().ln()) < 1e-14);
        // Stirling with three correction terms is exact to ~1e-20 at 1e6.
        let x = 1e6_f64;
        let stirling =
            (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x.powi(3));
        assert!(rel(ln_gamma(x).unwrap(), stirling) < 1e-13);
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
        assert!(ln_gamma(-2.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(-1.0, 2), 0.0);
        assert_eq!(pochhammer(-1.0, 1), -1.0);
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(7.25, 0), 1.0);
    }

    #[test]
    fn kummer_trivial_cases() {
        let c = SeriesControl::default();
        assert_eq!(kummer_1f1(2.5, 3.0, 0.0, c).unwrap(), 1.0);
        assert_eq!(kummer_1f1(0.0, 4.0, 17.0, c).unwrap(), 1.0);
        for z in [0.1, 1.0, 10.0, 50.0] {
            let f = kummer_1f1(1.0, 2.0, z, c).unwrap();
            assert!(rel(f * z + 1.0, z.exp()) < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn kummer_terminating_polynomial() {
        // 1F1(-2; 3; z) = 1 - 2z/3 + z^2/12
        let c = SeriesControl::default();
        for z in [0.5, 3.0, 20.0] {
            let exact = 1.0 - 2.0 * z / 3.0 + z * z / 12.0;
            assert!(rel(kummer_1f1(-2.0, 3.0, z, c).unwrap(), exact) < 1e-13);
        }
    }

    #[test]
    fn kummer_errors() {
        let c = SeriesControl::default();
        assert!(matches!(
            kummer_1f1(1.0, -2.0, 1.0, c),
            Err(Error::Domain { .. })
        ));
        assert!(kummer_1f1(1.0, 2.0, -1.0, c).is_err());
        let short = SeriesControl::new(1e-12, 10).unwrap();
        assert!(matches!(
            kummer_1f1(1.0, 2.0, 200.0, short),
            Err(Error::NonConvergence { terms: 10, .. })
        ));
    }

    #[test]
    fn series_control_validation() {
        assert!(SeriesControl::new(0.0, 10).is_err());
        assert!(SeriesControl::new(1e-10, 0).is_err());
        assert!(SeriesControl::new(1e-10, 1).is_ok());
    }

    #[test]
    fn whittaker_identities() {
        let c = SeriesControl::default();
        for z in [0.5, 2.0, 10.0, 40.0] {
            let m = whittaker_m_ln(0.0, 0.5, z, c).unwrap().value();
            assert!(rel(m, 2.0 * (z / 2.0).sinh()) < 1e-10);
            let nu = 1.5;
            let m = whittaker_m_ln(nu + 0.5, nu, z, c).unwrap().value();
            assert!(rel(m, z.powf(nu + 0.5) * (-z / 2.0).exp()) < 1e-10);
        }
    }

    /// 1F1(1; 3; 4) = sum_n 2 * 4^n / (n+2)!, 200 terms summed smallest first.
    fn kummer_1_3_at_4_oracle() -> f64 {
        let mut terms = Vec::with_capacity(200);
        let mut t = 1.0_f64;
        terms.push(t);
        for n in 0..199u32 {
            t *= 4.0 / f64::from(n + 3);
            terms.push(t);
        }
        terms.iter().rev().sum()
    }

    #[test]
    fn whittaker_m_15_1_at_4() {
        // M_{1.5,1}(4) = e^{-2} 4^{1.5} 1F1(0; 3; 4) = 8 e^{-2}
        let c = SeriesControl::default();
        let m = whittaker_m_ln(1.5, 1.0, 4.0, c).unwrap();
        assert_eq!(m.sign, 1.0);
        assert!(rel(m.value(), 8.0 * (-2.0_f64).exp()) < 1e-14);

        // a generic case against the 200-term series oracle: M_{0.5,1}(4)
        let m = whittaker_m_ln(0.5, 1.0, 4.0, c).unwrap();
        let oracle = (-2.0_f64).exp() * 8.0 * kummer_1_3_at_4_oracle();
        assert!(rel(m.value(), oracle) < 1e-12);
    }

    #[test]
    fn whittaker_domain() {
        let c = SeriesControl::default();
        assert!(whittaker_m_ln(0.0, 0.5, 0.0, c).is_err());
        assert!(whittaker_m_ln(0.0, -1.0, 1.0, c).is_err());
    }

    #[test]
    fn whittaker_smooth_and_positive_in_sum_cdf_regime() {
        // The sum CDF uses mu = (d+l-1)/2, nu = (d-l)/2; with l = 0 all series
        // terms are positive. Strip the power and exponential factors and the
        // remaining ln 1F1 must rise smoothly with slope at most 1.
        let c = SeriesControl::default();
        let (mu, nu) = (4.5, 5.0);
        let h = 0.1;
        let mut prev: Option<f64> = None;
        for i in 1..400 {
            let z = h * f64::from(i);
            let m = whittaker_m_ln(mu, nu, z, c).unwrap();
            assert_eq!(m.sign, 1.0);
            let ln_f = m.ln_abs + 0.5 * z - (nu + 0.5) * z.ln();
            if let Some(p) = prev {
                let step = ln_f - p;
                assert!(step > 0.0 && step <= h, "z = {z}, step {step}");
            }
            prev = Some(ln_f);
        }
    }

    proptest! {
        #[test]
        fn pochhammer_recurrence(a in -20.0f64..20.0, n in 0u32..30) {
            prop_assert_eq!(pochhammer(a, n + 1), pochhammer(a, n) * (a + f64::from(n)));
        }

        #[test]
        fn kummer_exponential_identity(z in 0.0f64..60.0) {
            // 1F1(a; a; z) = e^z
            let f = kummer_1f1(2.5, 2.5, z, SeriesControl::default()).unwrap();
            prop_assert!(rel(f, z.exp()) < 1e-10);
        }
    }
}
