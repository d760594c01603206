//! Bannai-Ito polynomials `B_n(x; ρ1, ρ2, r1, r2)`, monic.

use super::{require_finite, Method, OrthoData};
use crate::error::{Error, Result};
use twofloat::TwoFloat;

use crate::numerics::{
    dd_div, dd_pochhammer, hyp_pfq, neg1_pow, parity, pochhammer, SeriesPolicy, INTEGER_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BannaiItoParams {
    pub rho1: f64,
    pub rho2: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Which condition makes `u_{N+1}` vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `r_j - ρ_l = (N+1)/2`, N even.
    RMinusRho { j: u8, l: u8 },
    /// `ρ1 + ρ2 = -(N+1)/2`, N odd.
    RhoSum,
    /// `r1 + r2 = (N+1)/2`, N odd.
    RSum,
    /// `ρ1 + ρ2 - r1 - r2 = -(N+1)/2`, N odd.
    GSum,
}

impl Truncation {
    pub fn label(&self) -> &'static str {
        match self {
            Truncation::RMinusRho { .. } => "i",
            Truncation::RhoSum => "ii",
            Truncation::RSum => "iii",
            Truncation::GSum => "iv",
        }
    }
}

impl BannaiItoParams {
    pub fn new(rho1: f64, rho2: f64, r1: f64, r2: f64) -> Result<Self> {
        for (name, v) in [("rho1", rho1), ("rho2", rho2), ("r1", r1), ("r2", r2)] {
            require_finite(name, v)?;
        }
        Ok(BannaiItoParams { rho1, rho2, r1, r2 })
    }

    pub fn g(&self) -> f64 {
        self.rho1 + self.rho2 - self.r1 - self.r2
    }

    /// `(A_n, C_n)` of the monic recurrence.
    pub fn recurrence_coeffs(&self, n: usize) -> Result<(f64, f64)> {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let g = self.g();
        let nf = n as f64;
        let pole = |d: f64| -> Result<f64> {
            if d.abs() <= INTEGER_TOL {
                Err(Error::Pole(format!(
                    "Bannai-Ito recurrence denominator vanishes at n = {n}"
                )))
            } else {
                Ok(d)
            }
        };
        let da = pole(4.0 * (nf + g + 1.0))?;
        if n.is_multiple_of(2) {
            let a = (nf + 2.0 * rho1 - 2.0 * r1 + 1.0) * (nf + 2.0 * rho1 - 2.0 * r2 + 1.0) / da;
            let c = if n == 0 {
                0.0
            } else {
                -nf * (nf - 2.0 * r1 - 2.0 * r2) / pole(4.0 * (nf + g))?
            };
            Ok((a, c))
        } else {
            let a = (nf + 2.0 * g + 1.0) * (nf + 2.0 * rho1 + 2.0 * rho2 + 1.0) / da;
            let c = -(nf + 2.0 * rho2 - 2.0 * r2) * (nf + 2.0 * rho2 - 2.0 * r1)
                / pole(4.0 * (nf + g))?;
            Ok((a, c))
        }
    }

    /// `u_n = A_{n-1} C_n` (`u_0 = 0`).
    pub fn u(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok(self.recurrence_coeffs(n - 1)?.0 * self.recurrence_coeffs(n)?.1)
    }

    /// `B_0(x), ..., B_nmax(x)`. The recurrence runs in double-double: with
    /// large `|ρ|` it amplifies rounding by up to `1e15` at `n ~ 15`.
    pub fn eval_upto(&self, nmax: usize, x: f64) -> Result<Vec<f64>> {
        for n in 0..nmax {
            self.recurrence_coeffs(n)?;
        }
        let dd = BannaiItoDd::from(*self);
        Ok(dd
            .eval_upto(nmax, TwoFloat::from(x))
            .iter()
            .map(|v| v.hi() + v.lo())
            .collect())
    }

    pub fn eval(&self, n: usize, x: f64, method: Method) -> Result<f64> {
        match method {
            Method::Recurrence => Ok(self.eval_upto(n, x)?[n]),
            Method::Closed => self.closed(n, x),
        }
    }

    /// `η_n` times a combination of two `4F3` series at unit argument.
    fn closed(&self, n: usize, x: f64) -> Result<f64> {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let g = self.g();
        let p = SeriesPolicy::default();
        let (ne, np) = parity(n);
        let (nef, npf) = (ne as f64, np as f64);
        let eta_den = pochhammer(nef + g + 1.0, ne + np)?;
        if eta_den == 0.0 {
            return Err(Error::Pole(format!("η_{n} denominator vanishes")));
        }
        let eta = neg1_pow(n as i64)
            * pochhammer(rho1 - r1 + 0.5, ne + np)?
            * pochhammer(rho2 - r1 + 0.5, ne + np)?
            * pochhammer(1.0 - r1 - r2, ne)?
            / eta_den;
        let t1 = hyp_pfq(
            &[-nef, nef + g + 1.0, x - r1 + 0.5, -x - r1 + 0.5],
            &[1.0 - r1 - r2, rho1 - r1 + 0.5, rho2 - r1 + 0.5],
            1.0,
            &p,
        )?;
        let coef = nef + npf + g * npf;
        let t2 = if coef == 0.0 {
            0.0
        } else {
            neg1_pow(n as i64) * coef * (x - r1 + 0.5) / ((rho1 - r1 + 0.5) * (rho2 - r1 + 0.5))
                * hyp_pfq(
                    &[
                        -nef - npf + 1.0,
                        nef + npf + g + 1.0,
                        x - r1 + 1.5,
                        -x - r1 + 0.5,
                    ],
                    &[1.0 - r1 - r2, rho1 - r1 + 1.5, rho2 - r1 + 1.5],
                    1.0,
                    &p,
                )?
        };
        Ok(eta * (t1 + t2))
    }

    /// Identifies the truncation condition satisfied at `N`, if any.
    pub fn truncation(&self, big_n: usize) -> Result<Truncation> {
        let half = (big_n as f64 + 1.0) / 2.0;
        let near = |v: f64| (v - half).abs() <= INTEGER_TOL;
        if big_n.is_multiple_of(2) {
            let rs = [self.r1, self.r2];
            let rhos = [self.rho1, self.rho2];
            // r2 - ρ1 first: that is the realization the grid formulas use.
            for (j, l) in [(2u8, 1u8), (1, 1), (1, 2), (2, 2)] {
                if near(rs[j as usize - 1] - rhos[l as usize - 1]) {
                    return Ok(Truncation::RMinusRho { j, l });
                }
            }
        } else if near(-(self.rho1 + self.rho2)) {
            return Ok(Truncation::RhoSum);
        } else if near(self.r1 + self.r2) {
            return Ok(Truncation::RSum);
        } else if near(-self.g()) {
            return Ok(Truncation::GSum);
        }
        Err(Error::Truncation {
            n: big_n,
            detail: if big_n.is_multiple_of(2) {
                "need r_j - rho_l = (N+1)/2 for some j, l".into()
            } else {
                "need rho1 + rho2 = -(N+1)/2, r1 + r2 = (N+1)/2 or g = -(N+1)/2".into()
            },
        })
    }

    /// Grid point `x_k = (-1)^k (k/2 + ρ1 + 1/4) - 1/4`.
    pub fn grid_point(&self, k: usize) -> f64 {
        neg1_pow(k as i64) * (k as f64 / 2.0 + self.rho1 + 0.25) - 0.25
    }

    /// Weight `w_k`.
    pub fn weight(&self, k: usize) -> Result<f64> {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let (ke, kp) = parity(k);
        let num = pochhammer(rho1 - r1 + 0.5, ke + kp)?
            * pochhammer(rho1 - r2 + 0.5, ke + kp)?
            * pochhammer(rho1 + rho2 + 1.0, ke)?
            * pochhammer(2.0 * rho1 + 1.0, ke)?;
        let den = pochhammer(1.0, ke)?
            * pochhammer(rho1 + r1 + 0.5, ke + kp)?
            * pochhammer(rho1 + r2 + 0.5, ke + kp)?
            * pochhammer(rho1 - rho2 + 1.0, ke)?;
        Ok(neg1_pow(k as i64) * num / den)
    }

    /// Norm `h_n = Σ_k w_k B_n(x_k)²` at truncation parameter `N`.
    ///
    /// The squared factor in the denominator is `(1 + n_e + g)_{n_e+n_p}`;
    /// this is the form that agrees with `h_0 ∏ u_k`.
    pub fn norm(&self, n: usize, big_n: usize) -> Result<f64> {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let g = self.g();
        let (ne, np) = parity(n);
        let nf = ne as f64;
        let npf = np as f64;
        let bne = big_n / 2;
        let sq = pochhammer(1.0 + nf + g, ne + np)?;
        let fact = |m: usize| pochhammer(1.0, m);
        let sub = |a: usize, b: usize| -> Result<usize> {
            a.checked_sub(b).ok_or_else(|| {
                Error::Constraint(format!("degree {n} exceeds truncation parameter {big_n}"))
            })
        };
        if big_n.is_multiple_of(2) {
            let num = fact(ne)?
                * fact(bne)?
                * pochhammer(1.0 + 2.0 * rho1, bne)?
                * pochhammer(1.0 + rho1 + rho2, ne)?
                * pochhammer(1.0 + nf + g, sub(bne, ne)?)?
                * pochhammer(0.5 + rho1 - r1, ne + np)?
                * pochhammer(0.5 + rho2 - r1, ne + np)?;
            let den = fact(sub(bne, ne + np)?)?
                * pochhammer(0.5 + rho1 + r1, sub(bne, ne)?)?
                * pochhammer(0.5 + nf + npf + rho2 - r2, sub(bne, ne + np)?)?
                * sq
                * sq;
            Ok(num / den)
        } else {
            let num = fact(ne)?
                * fact(bne)?
                * pochhammer(1.0 + 2.0 * rho1, bne + 1)?
                * pochhammer(1.0 - r1 - r2, ne)?
                * pochhammer(1.0 + nf + g, sub(bne + 1, ne)?)?
                * pochhammer(0.5 + rho1 - r1, ne + np)?
                * pochhammer(0.5 + rho1 - r2, ne + np)?;
            let den = fact(sub(bne, ne)?)?
                * pochhammer(0.5 + rho1 + r1, sub(bne + 1, ne + np)?)?
                * pochhammer(0.5 + nf + npf + rho2 - r2, sub(bne + 1, ne + np)?)?
                * sq
                * sq;
            Ok(num / den)
        }
    }

    /// Grid, weights and norms at truncation parameter `N`.
    ///
    /// Only `r2 - ρ1 = (N+1)/2` (N even) and `ρ1 + ρ2 = -(N+1)/2` (N odd)
    /// are supported, and `u_n > 0` must hold for `1 ≤ n ≤ N`.
    pub fn ortho(&self, big_n: usize) -> Result<OrthoData> {
        let case = self.truncation(big_n)?;
        let supported = match case {
            Truncation::RMinusRho { j: 2, l: 1 } => true,
            Truncation::RhoSum => true,
            _ => false,
        };
        if !supported {
            return Err(Error::Truncation {
                n: big_n,
                detail: format!(
                    "case {} holds, but the grid formulas need r2 - rho1 = (N+1)/2 (N even) or rho1 + rho2 = -(N+1)/2 (N odd)",
                    case.label()
                ),
            });
        }
        for n in 1..=big_n {
            let u = self.u(n)?;
            if !(u > 0.0) {
                return Err(Error::Positivity { index: n, value: u });
            }
        }
        let points = (0..=big_n).map(|k| self.grid_point(k)).collect();
        let weights = (0..=big_n)
            .map(|k| self.weight(k))
            .collect::<Result<Vec<_>>>()?;
        let norms = (0..=big_n)
            .map(|n| self.norm(n, big_n))
            .collect::<Result<Vec<_>>>()?;
        OrthoData::validated(points, weights, norms, big_n)
    }
}

/// Parameters carried in double-double, for the Racah tables whose sums
/// cancel heavily. Validation is left to the `f64` path.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BannaiItoDd {
    pub rho1: TwoFloat,
    pub rho2: TwoFloat,
    pub r1: TwoFloat,
    pub r2: TwoFloat,
}

impl From<BannaiItoParams> for BannaiItoDd {
    fn from(p: BannaiItoParams) -> Self {
        BannaiItoDd {
            rho1: p.rho1.into(),
            rho2: p.rho2.into(),
            r1: p.r1.into(),
            r2: p.r2.into(),
        }
    }
}

impl BannaiItoDd {
    fn g(&self) -> TwoFloat {
        self.rho1 + self.rho2 - self.r1 - self.r2
    }

    fn recurrence_coeffs(&self, n: usize) -> (TwoFloat, TwoFloat) {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let g = self.g();
        let nf = n as f64;
        let da = (g + nf + 1.0) * 4.0;
        let dc = (g + nf) * 4.0;
        if n.is_multiple_of(2) {
            let a = dd_div(
                (rho1 * 2.0 - r1 * 2.0 + nf + 1.0) * (rho1 * 2.0 - r2 * 2.0 + nf + 1.0),
                da,
            );
            let c = if n == 0 {
                TwoFloat::from(0.0)
            } else {
                -dd_div((r1 * -2.0 - r2 * 2.0 + nf) * nf, dc)
            };
            (a, c)
        } else {
            let a = dd_div(
                (g * 2.0 + nf + 1.0) * (rho1 * 2.0 + rho2 * 2.0 + nf + 1.0),
                da,
            );
            let c = -dd_div(
                (rho2 * 2.0 - r2 * 2.0 + nf) * (rho2 * 2.0 - r1 * 2.0 + nf),
                dc,
            );
            (a, c)
        }
    }

    fn grid_point(&self, k: usize) -> TwoFloat {
        (self.rho1 + (k as f64 / 2.0 + 0.25)) * neg1_pow(k as i64) - 0.25
    }

    fn eval_upto(&self, nmax: usize, x: TwoFloat) -> Vec<TwoFloat> {
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (TwoFloat::from(0.0), TwoFloat::from(1.0));
        let mut a_prev = TwoFloat::from(0.0);
        out.push(cur);
        for n in 0..nmax {
            let (a, c) = self.recurrence_coeffs(n);
            let next = (x - self.rho1 + a + c) * cur - a_prev * c * prev;
            prev = cur;
            cur = next;
            a_prev = a;
            out.push(cur);
        }
        out
    }

    /// `B_0, ..., B_nmax` at the grid point `x_k`.
    pub fn eval_upto_at_grid(&self, nmax: usize, k: usize) -> Vec<TwoFloat> {
        self.eval_upto(nmax, self.grid_point(k))
    }

    pub fn weight(&self, k: usize) -> TwoFloat {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let (ke, kp) = parity(k);
        let num = dd_pochhammer(rho1 - r1 + 0.5, ke + kp)
            * dd_pochhammer(rho1 - r2 + 0.5, ke + kp)
            * dd_pochhammer(rho1 + rho2 + 1.0, ke)
            * dd_pochhammer(rho1 * 2.0 + 1.0, ke);
        let den = dd_pochhammer(TwoFloat::from(1.0), ke)
            * dd_pochhammer(rho1 + r1 + 0.5, ke + kp)
            * dd_pochhammer(rho1 + r2 + 0.5, ke + kp)
            * dd_pochhammer(rho1 - rho2 + 1.0, ke);
        dd_div(num, den) * neg1_pow(k as i64)
    }

    /// `h_n` at truncation parameter `N`; requires `n ≤ N`.
    pub fn norm(&self, n: usize, big_n: usize) -> TwoFloat {
        let (rho1, rho2, r1, r2) = (self.rho1, self.rho2, self.r1, self.r2);
        let g = self.g();
        let (ne, np) = parity(n);
        let nf = ne as f64;
        let npf = np as f64;
        let bne = big_n / 2;
        let one = TwoFloat::from(1.0);
        let sq = dd_pochhammer(g + 1.0 + nf, ne + np);
        let fact = |m: usize| dd_pochhammer(one, m);
        let (num, den) = if big_n.is_multiple_of(2) {
            (
                fact(ne)
                    * fact(bne)
                    * dd_pochhammer(rho1 * 2.0 + 1.0, bne)
                    * dd_pochhammer(rho1 + rho2 + 1.0, ne)
                    * dd_pochhammer(g + 1.0 + nf, bne - ne)
                    * dd_pochhammer(rho1 - r1 + 0.5, ne + np)
                    * dd_pochhammer(rho2 - r1 + 0.5, ne + np),
                fact(bne - ne - np)
                    * dd_pochhammer(rho1 + r1 + 0.5, bne - ne)
                    * dd_pochhammer(rho2 - r2 + 0.5 + nf + npf, bne - ne - np)
                    * sq
                    * sq,
            )
        } else {
            (
                fact(ne)
                    * fact(bne)
                    * dd_pochhammer(rho1 * 2.0 + 1.0, bne + 1)
                    * dd_pochhammer(one - r1 - r2, ne)
                    * dd_pochhammer(g + 1.0 + nf, bne + 1 - ne)
                    * dd_pochhammer(rho1 - r1 + 0.5, ne + np)
                    * dd_pochhammer(rho1 - r2 + 0.5, ne + np),
                fact(bne - ne)
                    * dd_pochhammer(rho1 + r1 + 0.5, bne + 1 - ne - np)
                    * dd_pochhammer(rho2 - r2 + 0.5 + nf + npf, bne + 1 - ne - np)
                    * sq
                    * sq,
            )
        };
        dd_div(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_i(n: usize) -> BannaiItoParams {
        BannaiItoParams::new(0.2, 0.45, 0.35, 0.2 + (n as f64 + 1.0) / 2.0).unwrap()
    }

    #[test]
    fn low_degrees() {
        let p = BannaiItoParams::new(0.3, 0.8, -0.2, 0.55).unwrap();
        let (a0, c0) = p.recurrence_coeffs(0).unwrap();
        assert_eq!(c0, 0.0);
        let expect_a0 = (0.6 + 0.4 + 1.0) * (0.6 - 1.1 + 1.0) / (4.0 * (p.g() + 1.0));
        assert!((a0 - expect_a0).abs() < 1e-15);
        for m in [Method::Recurrence, Method::Closed] {
            assert_eq!(p.eval(0, 0.7, m).unwrap(), 1.0);
            assert!((p.eval(1, 0.7, m).unwrap() - (0.7 - 0.3 + a0)).abs() < 1e-14);
        }
    }

    #[test]
    fn truncation_cases() {
        assert_eq!(
            case_i(4).truncation(4).unwrap(),
            Truncation::RMinusRho { j: 2, l: 1 }
        );
        let p = BannaiItoParams::new(-0.7, -1.3, 0.1, 0.4).unwrap();
        assert_eq!(p.truncation(3).unwrap(), Truncation::RhoSum);
        let q = BannaiItoParams::new(0.31, 0.77, 0.12, 0.59).unwrap();
        assert!(matches!(q.truncation(3), Err(Error::Truncation { .. })));
        assert!(matches!(q.truncation(4), Err(Error::Truncation { .. })));
        let r = BannaiItoParams::new(0.31, 0.77, 0.5, 1.5).unwrap();
        assert_eq!(r.truncation(3).unwrap(), Truncation::RSum);
        assert!(r.ortho(3).is_err());
    }

    #[test]
    fn u_vanishes_at_truncation() {
        for n in [2, 4, 6] {
            let p = case_i(n);
            assert!(p.u(n + 1).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn grid_examples() {
        let p = case_i(4);
        assert!((p.grid_point(0) - p.rho1).abs() < 1e-15);
        assert!((p.grid_point(1) + p.rho1 + 1.0).abs() < 1e-15);
    }
}
