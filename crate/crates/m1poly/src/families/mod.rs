//! The four −1 polynomial families.
//!
//! Every family is defined by its three-term recurrence; the hypergeometric
//! closed forms are an independent second route to the same values.

pub mod bannai_ito;
pub mod big_jacobi;
pub mod chihara;
pub mod dual_hahn;

pub use bannai_ito::{BannaiItoParams, Truncation};
pub use big_jacobi::{bigjacobi_norm, BigJacobiParams};
pub use chihara::ChiharaParams;
pub use dual_hahn::DualHahnParams;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::csum;

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Recurrence,
    Closed,
}

/// Grid, weights and norms of a finite discrete orthogonality.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoData {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub norms: Vec<f64>,
    pub big_n: usize,
}

impl OrthoData {
    pub(crate) fn validated(
        points: Vec<f64>,
        weights: Vec<f64>,
        norms: Vec<f64>,
        big_n: usize,
    ) -> Result<Self> {
        debug_assert_eq!(points.len(), big_n + 1);
        debug_assert_eq!(weights.len(), big_n + 1);
        debug_assert_eq!(norms.len(), big_n + 1);
        for (i, v) in points.iter().chain(&weights).chain(&norms).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("orthogonality data entry {i}")));
            }
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| **w < 0.0) {
            return Err(Error::NegativeWeight { index, value });
        }
        if let Some((index, &value)) = norms.iter().enumerate().find(|(_, h)| **h <= 0.0) {
            return Err(Error::NonPositiveNorm { index, value });
        }
        Ok(OrthoData {
            points,
            weights,
            norms,
            big_n,
        })
    }

    /// `G[n][m] = Σ_s w_s p_n(x_s) p_m(x_s)` where `values(x)` returns
    /// `p_0(x), ..., p_N(x)`.
    pub fn gram<F>(&self, values: F) -> Result<DMatrix<f64>>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let dim = self.big_n + 1;
        let table = self
            .points
            .iter()
            .map(|&x| values(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(dim, dim, |n, m| {
            csum(
                table
                    .iter()
                    .zip(&self.weights)
                    .map(|(p, w)| w * p[n] * p[m]),
            )
        }))
    }
}

pub(crate) fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {v}")))
    }
}
