//! Big −1 Jacobi polynomials `J_n(x; a, b, c)`, normalized by `J_0 = 1`.
//!
//! For `|c| < 1` they are orthogonal on `𝒞 = (-1, -|c|) ∪ (|c|, 1)`.

use super::{require_finite, Method};
use crate::error::{Error, Result};
use crate::numerics::{gamma_ratio, hyp_pfq, pochhammer, sign, SeriesPolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigJacobiParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BigJacobiParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        require_finite("a", a)?;
        require_finite("b", b)?;
        require_finite("c", c)?;
        if a <= -1.0 || b <= -1.0 {
            return Err(Error::Parameter(format!(
                "Big -1 Jacobi needs a > -1 and b > -1, got a = {a}, b = {b}"
            )));
        }
        if c.abs() == 1.0 {
            return Err(Error::Parameter("Big -1 Jacobi needs |c| != 1".into()));
        }
        Ok(BigJacobiParams { a, b, c })
    }

    /// `(A_n, C_n)` of `xJ_n = A_n J_{n+1} + (1 - A_n - C_n) J_n + C_n J_{n-1}`.
    pub fn recurrence_coeffs(&self, n: usize) -> (f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let nf = n as f64;
        if n.is_multiple_of(2) {
            let big_a = (nf + a + 1.0) * (c + 1.0) / (2.0 * nf + a + b + 2.0);
            let big_c = if n == 0 {
                0.0
            } else {
                nf * (1.0 - c) / (2.0 * nf + a + b)
            };
            (big_a, big_c)
        } else {
            let big_a = (1.0 - c) * (nf + a + b + 1.0) / (2.0 * nf + a + b + 2.0);
            let big_c = (nf + b) * (1.0 + c) / (2.0 * nf + a + b);
            (big_a, big_c)
        }
    }

    pub fn eval_upto(&self, nmax: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for n in 0..nmax {
            let (big_a, big_c) = self.recurrence_coeffs(n);
            let next = ((x - 1.0 + big_a + big_c) * cur - big_c * prev) / big_a;
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

    /// Parity-split pair of `2F1` series in `(1 - x²)/(1 - c²)`.
    fn closed(&self, n: usize, x: f64) -> Result<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let p = SeriesPolicy::default();
        let nf = n as f64;
        let y = (1.0 - x * x) / (1.0 - c * c);
        let lin = (1.0 - x) / ((1.0 + c) * (a + 1.0));
        if n.is_multiple_of(2) {
            let f1 = hyp_pfq(
                &[-nf / 2.0, (nf + a + b + 2.0) / 2.0],
                &[(a + 1.0) / 2.0],
                y,
                &p,
            )?;
            if n == 0 {
                return Ok(f1);
            }
            let f2 = hyp_pfq(
                &[1.0 - nf / 2.0, (nf + a + b + 2.0) / 2.0],
                &[(a + 3.0) / 2.0],
                y,
                &p,
            )?;
            Ok(f1 + nf * lin * f2)
        } else {
            let m = (nf - 1.0) / 2.0;
            let f1 = hyp_pfq(&[-m, (nf + a + b + 1.0) / 2.0], &[(a + 1.0) / 2.0], y, &p)?;
            let f2 = hyp_pfq(&[-m, (nf + a + b + 3.0) / 2.0], &[(a + 3.0) / 2.0], y, &p)?;
            Ok(f1 - (nf + a + b + 1.0) * lin * f2)
        }
    }

    /// `sign(x)(1+x)(x-c)(x²-c²)^{(b-1)/2}(1-x²)^{(a-1)/2}` on `𝒞`.
    pub fn weight(&self, x: f64) -> Result<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        if !(c.abs() < 1.0) {
            return Err(Error::Domain(
                "Big -1 Jacobi weight is only defined here for |c| < 1".into(),
            ));
        }
        if !(x.abs() > c.abs() && x.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "Big -1 Jacobi weight needs |c| < |x| < 1, got x = {x}, c = {c}"
            )));
        }
        Ok(sign(x)
            * (1.0 + x)
            * (x - c)
            * (x * x - c * c).powf((b - 1.0) / 2.0)
            * (1.0 - x * x).powf((a - 1.0) / 2.0))
    }

    /// `(1-c²)^{(a+b+2)/2} / (1+c)`, the factor between `∫ w J_n²` and `h_n(a, b)`.
    pub fn norm_prefactor(&self) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        (1.0 - c * c).powf((a + b + 2.0) / 2.0) / (1.0 + c)
    }

    /// `∫_𝒞 w J_n² dx`.
    pub fn norm(&self, n: usize) -> Result<f64> {
        Ok(self.norm_prefactor() * bigjacobi_norm(n, self.a, self.b)?)
    }
}

/// The normalization factor `h_n(a, b)`.
pub fn bigjacobi_norm(n: usize, a: f64, b: f64) -> Result<f64> {
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::Parameter(format!(
            "h_n needs a > -1 and b > -1, got a = {a}, b = {b}"
        )));
    }
    let nf = n as f64;
    if n.is_multiple_of(2) {
        let k = n / 2;
        let g = gamma_ratio(
            &[(nf + b + 1.0) / 2.0, (nf + a + 3.0) / 2.0, k as f64 + 1.0],
            &[(nf + a + b + 2.0) / 2.0],
        )?;
        let p = pochhammer((a + 1.0) / 2.0, k)?;
        Ok(2.0 * g / ((nf + a + 1.0) * p * p))
    } else {
        let k = (n - 1) / 2;
        let g = gamma_ratio(
            &[(nf + b + 2.0) / 2.0, (nf + a + 2.0) / 2.0, k as f64 + 1.0],
            &[(nf + a + b + 3.0) / 2.0],
        )?;
        let p = pochhammer((a + 1.0) / 2.0, k + 1)?;
        Ok((nf + a + b + 1.0) * g / (2.0 * p * p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        let p = BigJacobiParams::new(0.5, 1.2, 0.3).unwrap();
        let x = 0.7;
        for m in [Method::Recurrence, Method::Closed] {
            assert_eq!(p.eval(0, x, m).unwrap(), 1.0);
            let expect = 1.0 - (0.5 + 1.2 + 2.0) * (1.0 - x) / (1.3 * 1.5);
            assert!((p.eval(1, x, m).unwrap() - expect).abs() < 1e-15);
        }
        // high-precision reference value
        let j3 = -0.925_376_162_299_239_2;
        assert!((p.eval(3, x, Method::Recurrence).unwrap() - j3).abs() < 1e-14);
        assert!((p.eval(3, x, Method::Closed).unwrap() - j3).abs() < 1e-14);
    }

    #[test]
    fn weight_examples() {
        let p = BigJacobiParams::new(1.0, 1.0, 0.0).unwrap();
        assert!((p.weight(0.5).unwrap() - 0.75).abs() < 1e-15);
        let q = BigJacobiParams::new(0.3, -0.4, 0.2).unwrap();
        assert!(q.weight(-0.5).unwrap() > 0.0);
        assert!(q.weight(0.1).is_err());
        assert!(BigJacobiParams::new(0.0, 0.0, 1.0).is_err());
        assert!(BigJacobiParams::new(0.0, 0.0, 1.5)
            .unwrap()
            .weight(0.5)
            .is_err());
    }

    #[test]
    fn h0_simplifies() {
        // h_0(2μ2, 2μ1) = Γ(μ1+1/2)Γ(μ2+1/2)/Γ(μ1+μ2+1)
        for &(m1, m2) in &[(0.6, 0.9), (0.1, 2.4), (1.7, 0.3)] {
            let h0 = bigjacobi_norm(0, 2.0 * m2, 2.0 * m1).unwrap();
            let g = libm::tgamma(m1 + 0.5) * libm::tgamma(m2 + 0.5) / libm::tgamma(m1 + m2 + 1.0);
            assert!((h0 - g).abs() < 1e-14 * g);
        }
        // a = b = 1, c = 0: both low norms equal 1
        let p = BigJacobiParams::new(1.0, 1.0, 0.0).unwrap();
        assert!((p.norm(0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.norm(1).unwrap() - 1.0).abs() < 1e-15);
    }
}
