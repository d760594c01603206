//! Dual −1 Hahn polynomials `R_n(x; η, ξ, N)`, monic, orthogonal on an
//! alternating linear grid of `N + 1` points.

use super::{require_finite, Method, OrthoData};
use crate::error::{Error, Result};
use twofloat::TwoFloat;

use crate::numerics::{dd_div, dd_pochhammer, hyp_pfq, neg1_pow, pochhammer, SeriesPolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualHahnParams {
    pub eta: f64,
    pub xi: f64,
    /// Truncation parameter `N`; the grid has `N + 1` points.
    pub big_n: usize,
}

/// `[m]_μ` for a possibly negative integer `m`.
fn mu_number_i(m: i64, mu: f64) -> f64 {
    if m.rem_euclid(2) == 0 {
        m as f64
    } else {
        m as f64 + 2.0 * mu
    }
}

fn poch(a: f64, n: usize) -> Result<f64> {
    pochhammer(a, n)
}

impl DualHahnParams {
    pub fn new(eta: f64, xi: f64, big_n: usize) -> Result<Self> {
        require_finite("eta", eta)?;
        require_finite("xi", xi)?;
        Ok(DualHahnParams { eta, xi, big_n })
    }

    /// `(b_n, u_n)` of `xR_n = R_{n+1} + b_n R_n + u_n R_{n-1}`.
    pub fn recurrence_coeffs(&self, n: usize) -> (f64, f64) {
        let nn = self.big_n as i64;
        let b = neg1_pow(n as i64 + 1) * (2.0 * self.xi + neg1_pow(nn) * 2.0 * self.eta) - 1.0;
        let u = 4.0 * mu_number_i(n as i64, self.xi) * mu_number_i(nn - n as i64 + 1, self.eta);
        (b, u)
    }

    pub fn eval_upto(&self, nmax: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for n in 0..nmax {
            let (b, u) = self.recurrence_coeffs(n);
            let next = (x - b) * cur - u * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `R_0, ..., R_nmax` at the reversed grid point `z_s`, with the point
    /// and the recurrence carried in double-double. Clebsch-Gordan sums
    /// cancel heavily, so they need these values to a few ulp.
    pub(crate) fn eval_upto_at_reversed_dd(&self, nmax: usize, s: usize) -> Vec<TwoFloat> {
        let eta = TwoFloat::from(self.eta);
        let xi = TwoFloat::from(self.xi);
        let nn = self.big_n as i64;
        let x = (eta * 2.0 + xi * 2.0 + (2 * s + 1) as f64) * neg1_pow((s + self.big_n + 1) as i64);
        let mu_i = |m: i64, mu: TwoFloat| {
            if m.rem_euclid(2) == 0 {
                TwoFloat::from(m as f64)
            } else {
                mu * 2.0 + m as f64
            }
        };
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (TwoFloat::from(0.0), TwoFloat::from(1.0));
        out.push(cur);
        for n in 0..nmax {
            let b = (xi * 2.0 + eta * (2.0 * neg1_pow(nn))) * neg1_pow(n as i64 + 1) - 1.0;
            let u = mu_i(n as i64, xi) * mu_i(nn - n as i64 + 1, eta) * 4.0;
            let next = (x - b) * cur - u * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    pub fn eval(&self, n: usize, x: f64, method: Method) -> Result<f64> {
        match method {
            Method::Recurrence => Ok(self.eval_upto(n, x)[n]),
            Method::Closed => self.closed(n, x),
        }
    }

    /// The `3F2` pair at unit argument, selected by the parities of `N` and `n`.
    fn closed(&self, n: usize, x: f64) -> Result<f64> {
        let (eta, xi) = (self.eta, self.xi);
        let big_n = self.big_n as f64;
        let p = SeriesPolicy::default();
        let m = n / 2;
        let mf = m as f64;
        let scale = 16f64.powi(m as i32);
        if self.big_n.is_multiple_of(2) {
            let d = -(eta + xi + big_n) / 2.0;
            let num = [-mf, d + (x + 1.0) / 4.0, d - (x + 1.0) / 4.0];
            let e = (1.0 - 2.0 * eta - big_n) / 2.0;
            if n.is_multiple_of(2) {
                let f = hyp_pfq(&num, &[-big_n / 2.0, e], 1.0, &p)?;
                Ok(scale * poch(-big_n / 2.0, m)? * poch(e, m)? * f)
            } else {
                let f = hyp_pfq(&num, &[1.0 - big_n / 2.0, e], 1.0, &p)?;
                Ok(scale
                    * poch(1.0 - big_n / 2.0, m)?
                    * poch(e, m)?
                    * (x + 2.0 * eta + 2.0 * xi + 1.0)
                    * f)
            }
        } else {
            let d = (eta + xi + 1.0) / 2.0;
            let num = [-mf, d + (x + 1.0) / 4.0, d - (x + 1.0) / 4.0];
            let h = (1.0 - big_n) / 2.0;
            if n.is_multiple_of(2) {
                let f = hyp_pfq(&num, &[h, xi + 0.5], 1.0, &p)?;
                Ok(scale * poch(h, m)? * poch(xi + 0.5, m)? * f)
            } else {
                let f = hyp_pfq(&num, &[h, xi + 1.5], 1.0, &p)?;
                Ok(scale * poch(h, m)? * poch(xi + 1.5, m)? * (x + 2.0 * xi - 2.0 * eta + 1.0) * f)
            }
        }
    }

    /// Grid point `y_s`.
    pub fn grid_point(&self, s: usize) -> f64 {
        let (eta, xi, big_n) = (self.eta, self.xi, self.big_n as f64);
        let sf = s as f64;
        let sgn = neg1_pow(s as i64);
        if self.big_n.is_multiple_of(2) {
            sgn * (2.0 * sf - 2.0 * eta - 2.0 * xi - 2.0 * big_n - 1.0)
        } else {
            sgn * (2.0 * sf + 2.0 * eta + 2.0 * xi + 1.0)
        }
    }

    /// Weight `ϖ_s`.
    pub fn weight(&self, s: usize) -> Result<f64> {
        let (eta, xi, big_n) = (self.eta, self.xi, self.big_n as f64);
        let h = big_n / 2.0;
        let k = s / 2;
        let odd = s % 2;
        let sgn = neg1_pow(k as i64);
        let kfact = poch(1.0, k)?;
        if self.big_n.is_multiple_of(2) {
            let num = poch(-h, k + odd)? * poch(-h - eta + 0.5, k)? * poch(-big_n - eta - xi, k)?;
            let den = kfact * poch(-h - xi + 0.5, k)? * poch(-h - eta - xi, k + odd)?;
            Ok(sgn * num / den)
        } else {
            let num =
                poch((1.0 - big_n) / 2.0, k)? * poch(xi + 0.5, k + odd)? * poch(eta + xi + 1.0, k)?;
            let den = kfact * poch(eta + 0.5, k + odd)? * poch((big_n + 3.0) / 2.0 + eta + xi, k)?;
            Ok(sgn * num / den)
        }
    }

    /// Norm `ν_n = Σ_s ϖ_s R_n(y_s)²`.
    pub fn norm(&self, n: usize) -> Result<f64> {
        let (eta, xi, big_n) = (self.eta, self.xi, self.big_n as f64);
        let h = big_n / 2.0;
        let k = n / 2;
        let odd = n % 2;
        let lead = 16f64.powi(n as i32) * poch(1.0, k)?;
        let sgn = if odd == 0 { 1.0 } else { -1.0 };
        if self.big_n.is_multiple_of(2) {
            let half = self.big_n / 2;
            let t = poch(-big_n - eta - xi, half)? / poch((-big_n - 2.0 * xi + 1.0) / 2.0, half)?;
            Ok(sgn
                * lead
                * poch(-h, k + odd)?
                * poch(xi + 0.5, k + odd)?
                * poch((-big_n - 2.0 * eta + 1.0) / 2.0, k)?
                * t)
        } else {
            let half = self.big_n.div_ceil(2);
            let t = poch(eta + xi + 1.0, half)? / poch(eta + 0.5, half)?;
            Ok(sgn
                * lead
                * poch((1.0 - big_n) / 2.0, k)?
                * poch(xi + 0.5, k + odd)?
                * poch(-h - eta, k + odd)?
                * t)
        }
    }

    /// Grid `y_s`, weights `ϖ_s` and norms `ν_n` for `s, n = 0..=N`.
    pub fn ortho(&self) -> Result<OrthoData> {
        let n1 = self.big_n + 1;
        let points = (0..n1).map(|s| self.grid_point(s)).collect();
        let weights = (0..n1)
            .map(|s| self.weight(s))
            .collect::<Result<Vec<_>>>()?;
        let norms = (0..n1).map(|n| self.norm(n)).collect::<Result<Vec<_>>>()?;
        OrthoData::validated(points, weights, norms, self.big_n)
    }

    /// Reversed grid `z_s = (-1)^{s+N+1}(2s+2η+2ξ+1)` with weights
    /// `ρ_s = ϖ_{N-s}` (N even) or `ϖ_s` (N odd).
    pub fn reversed(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let data = self.ortho()?;
        let big_n = self.big_n;
        let z = (0..=big_n).map(|s| self.reversed_point(s)).collect();
        let rho = (0..=big_n)
            .map(|s| {
                if big_n.is_multiple_of(2) {
                    data.weights[big_n - s]
                } else {
                    data.weights[s]
                }
            })
            .collect();
        Ok((z, rho))
    }

    /// `ν_0` in double-double.
    pub(crate) fn norm0_dd(&self) -> TwoFloat {
        let eta = TwoFloat::from(self.eta);
        let xi = TwoFloat::from(self.xi);
        let big_n = self.big_n as f64;
        if self.big_n.is_multiple_of(2) {
            let half = self.big_n / 2;
            dd_div(
                dd_pochhammer(-eta - xi - big_n, half),
                dd_pochhammer(-xi + (1.0 - big_n) / 2.0, half),
            )
        } else {
            let half = self.big_n.div_ceil(2);
            dd_div(
                dd_pochhammer(eta + xi + 1.0, half),
                dd_pochhammer(eta + 0.5, half),
            )
        }
    }

    /// `ρ_s` in double-double; `s ≤ N` is the caller's responsibility.
    pub(crate) fn reversed_weight_dd(&self, s: usize) -> TwoFloat {
        let s = if self.big_n.is_multiple_of(2) {
            self.big_n - s
        } else {
            s
        };
        let eta = TwoFloat::from(self.eta);
        let xi = TwoFloat::from(self.xi);
        let big_n = self.big_n as f64;
        let h = big_n / 2.0;
        let k = s / 2;
        let odd = s % 2;
        let sgn = neg1_pow(k as i64);
        let kfact = dd_pochhammer(TwoFloat::from(1.0), k);
        let (num, den) = if self.big_n.is_multiple_of(2) {
            (
                dd_pochhammer(TwoFloat::from(-h), k + odd)
                    * dd_pochhammer(-eta + (0.5 - h), k)
                    * dd_pochhammer(-eta - xi - big_n, k),
                kfact * dd_pochhammer(-xi + (0.5 - h), k) * dd_pochhammer(-eta - xi - h, k + odd),
            )
        } else {
            (
                dd_pochhammer(TwoFloat::from((1.0 - big_n) / 2.0), k)
                    * dd_pochhammer(xi + 0.5, k + odd)
                    * dd_pochhammer(eta + xi + 1.0, k),
                kfact
                    * dd_pochhammer(eta + 0.5, k + odd)
                    * dd_pochhammer(eta + xi + (big_n + 3.0) / 2.0, k),
            )
        };
        dd_div(num, den) * sgn
    }

    pub fn reversed_point(&self, s: usize) -> f64 {
        neg1_pow((s + self.big_n + 1) as i64)
            * (2.0 * s as f64 + 2.0 * self.eta + 2.0 * self.xi + 1.0)
    }

    /// `ρ_s` alone, without building the full grid.
    pub fn reversed_weight(&self, s: usize) -> Result<f64> {
        if s > self.big_n {
            return Err(Error::Constraint(format!(
                "grid index {s} exceeds N = {}",
                self.big_n
            )));
        }
        if self.big_n.is_multiple_of(2) {
            self.weight(self.big_n - s)
        } else {
            self.weight(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        for big_n in [3, 4] {
            let p = DualHahnParams::new(0.3, 0.7, big_n).unwrap();
            let x = 1.9;
            let r1 = x + 2.0 * 0.7 + neg1_pow(big_n as i64) * 0.6 + 1.0;
            for m in [Method::Recurrence, Method::Closed] {
                assert_eq!(p.eval(0, x, m).unwrap(), 1.0);
                assert!((p.eval(1, x, m).unwrap() - r1).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn grid_examples() {
        let p = DualHahnParams::new(0.3, 0.7, 4).unwrap();
        assert!((p.grid_point(0) + (0.6 + 1.4 + 8.0 + 1.0)).abs() < 1e-15);
        assert_eq!(p.weight(0).unwrap(), 1.0);
        let (z, _) = p.reversed().unwrap();
        assert!((z[4] - p.grid_point(0)).abs() < 1e-14);
        let q = DualHahnParams::new(0.3, 0.7, 3).unwrap();
        assert_eq!(q.reversed().unwrap().1[0], 1.0);
    }

    #[test]
    fn small_reference_values() {
        let p = DualHahnParams::new(0.3, 0.7, 2).unwrap();
        let d = p.ortho().unwrap();
        for (got, want) in d.weights.iter().zip([1.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in d.norms.iter().zip([2.5, 48.0, 614.4]) {
            assert!((got - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn negative_weight_is_reported() {
        let p = DualHahnParams::new(-1.3, 0.2, 3).unwrap();
        assert!(matches!(
            p.ortho(),
            Err(Error::NegativeWeight { .. }) | Err(Error::NonPositiveNorm { .. })
        ));
    }
}
