//! Scalar kernels: Pochhammer symbols, μ-numbers, Γ-ratios, generalized
//! hypergeometric series and Laguerre polynomials.
//!
//! Everything here returns an error instead of an infinity or NaN.

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Distance within which a float is treated as an integer when deciding
/// whether a series terminates or hits a pole.
pub const INTEGER_TOL: f64 = 1e-12;

/// Summation controls for non-terminating series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            max_terms: 500,
            tail_tol: 1e-16,
        }
    }
}

impl SeriesPolicy {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms == 0 || !(tail_tol > 0.0) {
            return Err(Error::Parameter(format!(
                "series policy needs max_terms >= 1 and tail_tol > 0, got {max_terms}, {tail_tol}"
            )));
        }
        Ok(SeriesPolicy {
            max_terms,
            tail_tol,
        })
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Splits `n = 2 n_e + n_p` with `n_p ∈ {0, 1}`.
pub fn parity(n: usize) -> (usize, usize) {
    (n / 2, n % 2)
}

/// `(-1)^k` from the parity of an exact integer.
pub fn neg1_pow(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign function with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// If `x` lies within [`INTEGER_TOL`] of a nonpositive integer `-m`, returns `m`.
pub fn nonpositive_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= INTEGER_TOL {
        Some((-r) as usize)
    } else {
        None
    }
}

fn finite(x: f64, what: &'static str, index: usize) -> Result<f64> {
    if x.is_nan() {
        Err(Error::NonFinite(what.to_string()))
    } else if x.is_infinite() {
        Err(Error::Overflow { what, index })
    } else {
        Ok(x)
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: f64, n: usize) -> Result<f64> {
    let mut p = 1.0;
    for k in 0..n {
        p = finite(p * (a + k as f64), "pochhammer", k)?;
    }
    finite(p, "pochhammer", n)
}

/// The μ-number `[n]_μ = n + (1 - (-1)^n) μ`.
pub fn mu_number(n: usize, mu: f64) -> f64 {
    if n.is_multiple_of(2) {
        n as f64
    } else {
        n as f64 + 2.0 * mu
    }
}

/// The μ-factorial `[1]_μ [2]_μ ... [n]_μ`.
pub fn mu_factorial(n: usize, mu: f64) -> Result<f64> {
    let mut p = 1.0;
    for k in 1..=n {
        p = finite(p * mu_number(k, mu), "mu_factorial", k)?;
    }
    Ok(p)
}

/// `∏Γ(num_i) / ∏Γ(den_j)` through log-gamma with sign tracking.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut log = 0.0;
    let mut sgn = 1.0;
    for (k, &x) in num.iter().chain(den.iter()).enumerate() {
        if x.is_nan() {
            return Err(Error::NonFinite("gamma_ratio argument".into()));
        }
        if x <= 0.0 && x == x.round() {
            return Err(Error::Pole(format!("Γ({x}) in gamma_ratio")));
        }
        let (lg, s) = libm::lgamma_r(x);
        if k < num.len() {
            log += lg;
        } else {
            log -= lg;
        }
        if s < 0 {
            sgn = -sgn;
        }
    }
    let v = log.exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: "gamma_ratio",
            index: 0,
        });
    }
    Ok(sgn * v)
}

/// Double-double quotient by long division: `twofloat`'s own quotient forms
/// the reciprocal residual without a fused multiply-add and is only accurate
/// to about one `f64` ulp.
pub(crate) fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// `(a)_n` in double-double.
pub(crate) fn dd_pochhammer(a: TwoFloat, n: usize) -> TwoFloat {
    (0..n).fold(TwoFloat::from(1.0), |p, k| p * (a + k as f64))
}

/// `[n]_μ!` in double-double.
pub(crate) fn dd_mu_factorial(n: usize, mu: f64) -> TwoFloat {
    let mu2 = TwoFloat::from(mu) * 2.0;
    (1..=n).fold(TwoFloat::from(1.0), |p, k| {
        if k % 2 == 0 {
            p * k as f64
        } else {
            p * (mu2 + k as f64)
        }
    })
}

/// Generalized hypergeometric series `pFq(num; den; x)`.
///
/// A numerator within [`INTEGER_TOL`] of `-m` makes the series terminate after
/// `m + 1` terms. Otherwise terms are
/// added until the geometric tail bound drops below `policy.tail_tol`
/// relative to the running sum.
pub fn hyp_pfq(num: &[f64], den: &[f64], x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if x.is_nan() || num.iter().chain(den).any(|v| v.is_nan()) {
        return Err(Error::NonFinite("hyp_pfq argument".into()));
    }
    let stop = num.iter().filter_map(|&a| nonpositive_integer(a)).min();
    for &b in den {
        if let Some(p) = nonpositive_integer(b) {
            if stop.is_none_or(|m| p < m) {
                return Err(Error::Pole(format!("denominator parameter {b} in hyp_pfq")));
            }
        }
    }
    if x == 0.0 {
        return Ok(1.0);
    }

    // Terms and partial sums are carried in double-double: the alternating
    // terminating series at unit argument have terms far larger than their sum.
    let xx = TwoFloat::from(x);
    let ratio = |k: usize| -> TwoFloat {
        let kf = k as f64;
        let mut r = xx / (kf + 1.0);
        for &a in num {
            r *= TwoFloat::new_add(a, kf);
        }
        for &b in den {
            r = dd_div(r, TwoFloat::new_add(b, kf));
        }
        r
    };
    let check = |v: TwoFloat, index: usize| -> Result<TwoFloat> {
        finite(v.hi(), "hyp_pfq term", index)?;
        Ok(v)
    };

    let mut term = TwoFloat::from(1.0);
    let mut acc = term;

    if let Some(m) = stop {
        for k in 0..m {
            term = check(term * ratio(k), k + 1)?;
            acc += term;
        }
        return finite(f64::from(acc), "hyp_pfq", m);
    }

    if num.len() > den.len() + 1 || (num.len() == den.len() + 1 && x.abs() >= 1.0) {
        return Err(Error::Domain(format!(
            "{}F{} at x = {x} does not converge",
            num.len(),
            den.len()
        )));
    }

    for k in 0..policy.max_terms {
        let r = f64::from(ratio(k)).abs();
        term = check(term * ratio(k), k + 1)?;
        acc += term;
        // Once the term ratio has settled below 1 the remainder is bounded by a
        // geometric series in the next ratio.
        let r_next = f64::from(ratio(k + 1)).abs();
        if r_next < 1.0 && r < 1.0 {
            let tail = (f64::from(term) * r_next).abs() / (1.0 - r_next);
            let s = f64::from(acc).abs();
            if tail <= policy.tail_tol * s || (s == 0.0 && tail == 0.0) {
                return finite(f64::from(acc), "hyp_pfq", k);
            }
        }
    }
    Err(Error::Convergence {
        terms: policy.max_terms,
    })
}

/// Laguerre polynomial `L_n^{(α)}(x) = (α+1)_n / n! · 1F1(-n; α+1; x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    if nonpositive_integer(alpha + 1.0).is_some() {
        // The 1F1 form has a removable pole here; sum the polynomial directly.
        let mut acc = CompensatedSum::new();
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                fact *= k as f64;
            }
            let c = pochhammer(alpha + k as f64 + 1.0, n - k)? / pochhammer(1.0, n - k)?;
            acc.add(c * (-x).powi(k as i32) / fact);
        }
        return finite(acc.value(), "laguerre", n);
    }
    let lead = pochhammer(alpha + 1.0, n)? / pochhammer(1.0, n)?;
    let f = hyp_pfq(&[-(n as f64)], &[alpha + 1.0], x, &SeriesPolicy::default())?;
    finite(lead * f, "laguerre", n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(7.3, 0).unwrap(), 1.0);
        assert_eq!(pochhammer(3.0, 2).unwrap(), 12.0);
        assert_eq!(pochhammer(0.5, 3).unwrap(), 1.875);
    }

    #[test]
    fn pochhammer_overflow_reports_index() {
        match pochhammer(10.0, 400) {
            Err(Error::Overflow { index, .. }) => assert!(index > 100 && index < 400),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn mu_number_examples() {
        assert_eq!(mu_number(0, 0.3), 0.0);
        assert_eq!(mu_number(1, 0.5), 2.0);
        assert_eq!(mu_number(4, 7.3), 4.0);
    }

    #[test]
    fn mu_factorial_examples() {
        assert_eq!(mu_factorial(0, 0.9).unwrap(), 1.0);
        assert!(close(mu_factorial(2, 0.9).unwrap(), 2.0 * 2.8, 1e-15));
        assert_eq!(mu_factorial(6, 0.0).unwrap(), 720.0);
    }

    #[test]
    fn hyp_pfq_examples() {
        let p = SeriesPolicy::default();
        let (b, c, x) = (1.7, 2.3, 0.4);
        assert!(close(
            hyp_pfq(&[-1.0, b], &[c], x, &p).unwrap(),
            1.0 - b * x / c,
            1e-15
        ));
        assert_eq!(
            hyp_pfq(&[0.3, 1.1, 2.0], &[0.7, 4.0], 0.0, &p).unwrap(),
            1.0
        );
        let v = hyp_pfq(&[-2.0, 1.0, 1.0], &[2.0, 2.0], 1.0, &p).unwrap();
        assert!(close(v, 11.0 / 18.0, 1e-15));
    }

    #[test]
    fn hyp_pfq_convergent_matches_exp_and_bessel() {
        let p = SeriesPolicy::default();
        // 0F0(;;x) = e^x, 1F1(a;a;x) = e^x
        assert!(close(
            hyp_pfq(&[], &[], 2.5, &p).unwrap(),
            2.5f64.exp(),
            1e-15
        ));
        assert!(close(
            hyp_pfq(&[1.3], &[1.3], -3.0, &p).unwrap(),
            (-3.0f64).exp(),
            1e-13
        ));
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let x = 0.6;
        assert!(close(
            hyp_pfq(&[1.0, 1.0], &[2.0], x, &p).unwrap(),
            -(1.0f64 - x).ln() / x,
            1e-14
        ));
    }

    #[test]
    fn hyp_pfq_errors() {
        let p = SeriesPolicy::default();
        assert!(matches!(
            hyp_pfq(&[0.5], &[-2.0], 0.3, &p),
            Err(Error::Pole(_))
        ));
        // termination before the pole is reached is fine
        assert!(hyp_pfq(&[-1.0], &[-2.0], 0.3, &p).is_ok());
        assert!(matches!(
            hyp_pfq(&[0.5, 0.5], &[1.5], 1.5, &p),
            Err(Error::Domain(_))
        ));
        let tight = SeriesPolicy::new(3, 1e-16).unwrap();
        assert!(matches!(
            hyp_pfq(&[], &[1.0], 5.0, &tight),
            Err(Error::Convergence { .. })
        ));
        assert!(SeriesPolicy::new(0, 1e-16).is_err());
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 0.4, 2.0).unwrap(), 1.0);
        assert!(close(laguerre(1, 0.4, 2.0).unwrap(), 1.4 - 2.0, 1e-15));
        assert!(close(laguerre(2, 0.0, 1.0).unwrap(), -0.5, 1e-15));
        // removable pole path: L_2^{(-1)}(x) = x^2/2 - x
        assert!(close(laguerre(2, -1.0, 3.0).unwrap(), 1.5, 1e-14));
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!(close(gamma_ratio(&[3.7], &[3.7]).unwrap(), 1.0, 1e-15));
        assert!(close(gamma_ratio(&[5.0], &[3.0]).unwrap(), 12.0, 1e-14));
        assert!(close(gamma_ratio(&[0.5], &[1.5]).unwrap(), 2.0, 1e-14));
        assert!(close(
            gamma_ratio(&[-0.5], &[]).unwrap(),
            -2.0 * std::f64::consts::PI.sqrt(),
            1e-14
        ));
        assert!(matches!(gamma_ratio(&[-2.0], &[1.0]), Err(Error::Pole(_))));
    }

    #[test]
    fn dd_div_is_double_double_accurate() {
        // (7.1)^10 / (2.3)^10 with both bases exact sums of doubles
        let a = TwoFloat::new_add(0.1, 7.0);
        let b = TwoFloat::new_add(0.3, 2.0);
        let mut q = TwoFloat::from(1.0);
        let mut p = TwoFloat::from(1.0);
        for _ in 0..10 {
            q = dd_div(q, b);
            p *= b;
        }
        let back = q * p;
        assert!((back - 1.0).hi().abs() < 1e-30);
        let back = dd_div(a * b, b) - a;
        assert!(back.hi().abs() < 1e-30 * a.hi());
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = csum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn helpers() {
        assert_eq!(parity(7), (3, 1));
        assert_eq!(neg1_pow(-3), -1.0);
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(nonpositive_integer(-3.0 + 1e-13), Some(3));
        assert_eq!(nonpositive_integer(-2.5), None);
        assert_eq!(nonpositive_integer(1.0), None);
    }
}
