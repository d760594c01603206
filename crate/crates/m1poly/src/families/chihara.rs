//! Specialized Chihara polynomials `P_n(λ; μ, γ)`, orthonormal on
//! `F = (-∞, -|γ|) ∪ (|γ|, ∞)`.

use super::{require_finite, Method};
use crate::error::{Error, Result};
use twofloat::TwoFloat;

use crate::numerics::{dd_div, gamma_ratio, laguerre, mu_number, neg1_pow, parity, sign};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiharaParams {
    pub mu: f64,
    pub gamma: f64,
}

impl ChiharaParams {
    pub fn new(mu: f64, gamma: f64) -> Result<Self> {
        require_finite("mu", mu)?;
        require_finite("gamma", gamma)?;
        if mu <= -0.5 {
            return Err(Error::Parameter(format!(
                "Chihara polynomials need mu > -1/2, got {mu}"
            )));
        }
        Ok(ChiharaParams { mu, gamma })
    }

    /// `P_0(λ), ..., P_nmax(λ)` from the recurrence
    /// `λP_n = √[n+1]_μ P_{n+1} + γ(-1)^n P_n + √[n]_μ P_{n-1}`.
    pub fn eval_upto(&self, nmax: usize, lambda: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for n in 0..nmax {
            let diag = self.gamma * neg1_pow(n as i64);
            let next = ((lambda - diag) * cur - mu_number(n, self.mu).sqrt() * prev)
                / mu_number(n + 1, self.mu).sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// [`eval_upto`](Self::eval_upto) carried in double-double.
    pub(crate) fn eval_upto_dd(&self, nmax: usize, lambda: f64) -> Vec<TwoFloat> {
        let mu2 = TwoFloat::from(self.mu) * 2.0;
        let sqrt_mu_number = |n: usize| {
            if n.is_multiple_of(2) {
                TwoFloat::from(n as f64).sqrt()
            } else {
                (mu2 + n as f64).sqrt()
            }
        };
        let mut out = Vec::with_capacity(nmax + 1);
        let (mut prev, mut cur) = (TwoFloat::from(0.0), TwoFloat::from(1.0));
        out.push(cur);
        for n in 0..nmax {
            let shifted = TwoFloat::new_add(lambda, -self.gamma * neg1_pow(n as i64));
            let next = dd_div(
                shifted * cur - sqrt_mu_number(n) * prev,
                sqrt_mu_number(n + 1),
            );
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    pub fn eval(&self, n: usize, lambda: f64, method: Method) -> Result<f64> {
        match method {
            Method::Recurrence => Ok(self.eval_upto(n, lambda)[n]),
            Method::Closed => self.closed(n, lambda),
        }
    }

    /// Even degrees use `L_k^{(μ-1/2)}`, odd degrees `(λ-γ) L_k^{(μ+1/2)}`,
    /// both at `(λ² - γ²)/2`.
    fn closed(&self, n: usize, lambda: f64) -> Result<f64> {
        let (k, odd) = parity(n);
        let x = (lambda * lambda - self.gamma * self.gamma) / 2.0;
        let kf = k as f64;
        let s = neg1_pow(k as i64);
        let mu = self.mu;
        if odd == 0 {
            let c = gamma_ratio(&[kf + 1.0, mu + 0.5], &[kf + mu + 0.5])?;
            Ok(s * c.sqrt() * laguerre(k, mu - 0.5, x)?)
        } else {
            let c = gamma_ratio(&[kf + 1.0, mu + 1.5], &[kf + mu + 1.5])?;
            Ok(
                s * c.sqrt() * (lambda - self.gamma) / (2.0 * mu + 1.0).sqrt()
                    * laguerre(k, mu + 0.5, x)?,
            )
        }
    }

    /// `sign(λ)(λ+γ)((λ²-γ²)/2)^{μ-1/2} e^{-(λ²-γ²)/2}`, divided by
    /// `2Γ(μ+1/2)` when `normalized`.
    pub fn weight(&self, lambda: f64, normalized: bool) -> Result<f64> {
        if !(lambda.abs() > self.gamma.abs()) {
            return Err(Error::Domain(format!(
                "Chihara weight needs |lambda| > |gamma|, got lambda = {lambda}, gamma = {}",
                self.gamma
            )));
        }
        let t = (lambda * lambda - self.gamma * self.gamma) / 2.0;
        let w = sign(lambda) * (lambda + self.gamma) * t.powf(self.mu - 0.5) * (-t).exp();
        if normalized {
            Ok(w / (2.0 * libm::tgamma(self.mu + 0.5)))
        } else {
            Ok(w)
        }
    }
}
