//! osp(1|2) Clebsch-Gordan and Racah coefficients, and truncated matrix
//! realizations of `X_c` and its coproduct.
//!
//! Clebsch-Gordan coefficients are dual −1 Hahn polynomials on the reversed
//! grid; Racah coefficients are Bannai-Ito polynomials on their grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::families::bannai_ito::BannaiItoDd;
use crate::families::{BannaiItoParams, DualHahnParams, OrthoData};
use crate::numerics::{dd_div, dd_mu_factorial, mu_number, neg1_pow};

/// An exact sign `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_int(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parameter(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    /// `(-1)^k`.
    pub fn parity(k: i64) -> Sign {
        if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_i64() as f64
    }

    pub fn pow(self, k: usize) -> Sign {
        match self {
            Sign::Plus => Sign::Plus,
            Sign::Minus => Sign::parity(k as i64),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A positive discrete series representation `(μ, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub mu: f64,
    pub eps: Sign,
}

impl IrrepLabel {
    pub fn new(mu: f64, eps: Sign) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Parameter(format!(
                "representation label needs finite mu > 0, got {mu}"
            )));
        }
        Ok(IrrepLabel { mu, eps })
    }
}

/// The component of `r1 ⊗ r2` with label `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledLabel {
    pub mu12: f64,
    pub eps12: Sign,
    pub j: usize,
}

impl CoupledLabel {
    /// `μ12 = μ1 + μ2 + j + 1/2`, `ε12 = ε1 ε2 (-1)^j`.
    pub fn new(r1: IrrepLabel, r2: IrrepLabel, j: usize) -> Self {
        CoupledLabel {
            mu12: r1.mu + r2.mu + j as f64 + 0.5,
            eps12: r1.eps * r2.eps * Sign::parity(j as i64),
            j,
        }
    }

    pub fn irrep(&self) -> IrrepLabel {
        IrrepLabel {
            mu: self.mu12,
            eps: self.eps12,
        }
    }
}

/// Shorthand for `CoupledLabel::new(r1, r2, j).irrep()`.
pub fn couple(r1: IrrepLabel, r2: IrrepLabel, j: usize) -> IrrepLabel {
    CoupledLabel::new(r1, r2, j).irrep()
}

/// `φ = n1(n1-1)/2 + j(j+1)/2 + n1(n1+n2+1)`.
pub fn cg_phase(n1: usize, n2: usize, j: usize) -> i64 {
    let (n1, n2, j) = (n1 as i64, n2 as i64, j as i64);
    n1 * (n1 - 1) / 2 + j * (j + 1) / 2 + n1 * (n1 + n2 + 1)
}

fn cg_params(r1: IrrepLabel, r2: IrrepLabel, total: usize) -> Result<DualHahnParams> {
    DualHahnParams::new(r2.mu, r1.mu, total)
}

/// Clebsch-Gordan coefficients `C^{T-j,j}_{n1,T-n1}` in double-double,
/// indexed `[n1][j]`. Sums against them cancel heavily at small `λ`, so
/// they are kept to about `1e-30` relative.
pub(crate) fn cg_table_dd(
    total: usize,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<Vec<Vec<TwoFloat>>> {
    let dh = cg_params(r1, r2, total)?;
    let nu0 = dh.norm0_dd();
    let mut table = vec![vec![TwoFloat::from(0.0); total + 1]; total + 1];
    let facts1: Vec<TwoFloat> = (0..=total).map(|n| dd_mu_factorial(n, r1.mu)).collect();
    let facts2: Vec<TwoFloat> = (0..=total).map(|n| dd_mu_factorial(n, r2.mu)).collect();
    for j in 0..=total {
        let rho = dh.reversed_weight_dd(j);
        let r = dh.eval_upto_at_reversed_dd(total, j);
        for n1 in 0..=total {
            let n2 = total - n1;
            // [n2]! ρ_j / ([n1]! [T]! ν_0)
            let rad = dd_div(facts2[n2] * rho, facts1[n1] * facts2[total] * nu0);
            if rad.hi() < 0.0 || !rad.hi().is_finite() {
                return Err(Error::NegativeRadicand {
                    what: "Clebsch-Gordan coefficient",
                    value: rad.hi(),
                });
            }
            let phase = neg1_pow(cg_phase(n1, n2, j)) * (r2.eps.as_f64() / 2.0).powi(n1 as i32);
            table[n1][j] = rad.sqrt() * r[n1] * phase;
        }
    }
    Ok(table)
}

/// Clebsch-Gordan coefficient `C^{N,j}_{n1,n2}` for `n1 + n2 = N + j`.
pub fn cg_coefficient(
    n1: usize,
    n2: usize,
    big_n: usize,
    j: usize,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    if n1 + n2 != big_n + j {
        return Err(Error::Constraint(format!(
            "n1 + n2 = N + j fails for ({n1}, {n2}, {big_n}, {j})"
        )));
    }
    let v = cg_table_dd(n1 + n2, r1, r2)?[n1][j];
    Ok(v.hi() + v.lo())
}

/// Clebsch-Gordan matrix at fixed `n1 + n2 = N + j = total`: rows are
/// `n1 = 0..=total`, columns are `j = 0..=total`.
pub fn cg_matrix(total: usize, r1: IrrepLabel, r2: IrrepLabel) -> Result<DMatrix<f64>> {
    let table = cg_table_dd(total, r1, r2)?;
    Ok(DMatrix::from_fn(total + 1, total + 1, |n1, j| {
        table[n1][j].hi() + table[n1][j].lo()
    }))
}

/// Decomposition integers of a three-fold tensor product, constrained by
/// `j123 = j_1_23 + j23 = j_12_3 + j12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeFoldLabels {
    j12: usize,
    j23: usize,
    j123: usize,
    j_12_3: usize,
    j_1_23: usize,
}

impl ThreeFoldLabels {
    pub fn new(j12: usize, j23: usize, j123: usize) -> Result<Self> {
        if j12 > j123 || j23 > j123 {
            return Err(Error::Constraint(format!(
                "need j12, j23 <= j123, got ({j12}, {j23}, {j123})"
            )));
        }
        Ok(ThreeFoldLabels {
            j12,
            j23,
            j123,
            j_12_3: j123 - j12,
            j_1_23: j123 - j23,
        })
    }

    pub fn from_parts(
        j12: usize,
        j23: usize,
        j123: usize,
        j_12_3: usize,
        j_1_23: usize,
    ) -> Result<Self> {
        if j_12_3 + j12 != j123 || j_1_23 + j23 != j123 {
            return Err(Error::Constraint(format!(
                "labels ({j12}, {j23}, {j123}, {j_12_3}, {j_1_23}) violate j123 = j_1_23 + j23 = j_12_3 + j12"
            )));
        }
        Ok(ThreeFoldLabels {
            j12,
            j23,
            j123,
            j_12_3,
            j_1_23,
        })
    }

    pub fn j12(&self) -> usize {
        self.j12
    }
    pub fn j23(&self) -> usize {
        self.j23
    }
    pub fn j123(&self) -> usize {
        self.j123
    }
    pub fn j_12_3(&self) -> usize {
        self.j_12_3
    }
    pub fn j_1_23(&self) -> usize {
        self.j_1_23
    }
}

/// `φ' = j123 (j12-1) j12 / 2 + (j123+1)(j23 + (j12+1) j12 / 2)`.
pub fn racah_phase(labels: &ThreeFoldLabels) -> i64 {
    let (j12, j23, j123) = (labels.j12 as i64, labels.j23 as i64, labels.j123 as i64);
    j123 * ((j12 - 1) * j12 / 2) + (j123 + 1) * (j23 + (j12 + 1) * j12 / 2)
}

/// Bannai-Ito parameters realizing the Racah coefficients at `j123`.
pub fn racah_params(mu1: f64, mu2: f64, mu3: f64, j123: usize) -> Result<BannaiItoParams> {
    let mu123 = mu1 + mu2 + mu3 + 1.0 + j123 as f64;
    let s = neg1_pow(j123 as i64);
    BannaiItoParams::new(
        (mu2 + mu3) / 2.0,
        (mu1 + s * mu123) / 2.0,
        (mu3 - mu2) / 2.0,
        (s * mu123 - mu1) / 2.0,
    )
}

/// Racah coefficients at fixed `(μ1, μ2, μ3, j123)`, with the Bannai-Ito
/// grid and `B_{j12}(x_{j23})` tabulated once.
#[derive(Debug, Clone)]
pub struct RacahTable {
    pub j123: usize,
    pub params: BannaiItoParams,
    pub data: OrthoData,
    /// `R_{j12, j23}` without the `ε3^{j12}` factor, rows `j12`.
    values: DMatrix<f64>,
}

impl RacahTable {
    pub fn new(mu1: f64, mu2: f64, mu3: f64, j123: usize) -> Result<Self> {
        for mu in [mu1, mu2, mu3] {
            if !(mu > 0.0) {
                return Err(Error::Parameter(format!(
                    "Racah coefficients need mu > 0, got {mu}"
                )));
            }
        }
        let params = racah_params(mu1, mu2, mu3, j123)?;
        let data = params.ortho(j123)?;
        // the f64 parameters validate the truncation; values come from the
        // same parameters rebuilt in double-double from the μ's
        let (m1, m2, m3) = (
            TwoFloat::from(mu1),
            TwoFloat::from(mu2),
            TwoFloat::from(mu3),
        );
        let mu123 = (m1 + m2 + m3 + 1.0 + j123 as f64) * neg1_pow(j123 as i64);
        let dd = BannaiItoDd {
            rho1: (m2 + m3) * 0.5,
            rho2: (m1 + mu123) * 0.5,
            r1: (m3 - m2) * 0.5,
            r2: (mu123 - m1) * 0.5,
        };
        let norms: Vec<TwoFloat> = (0..=j123).map(|n| dd.norm(n, j123)).collect();
        let mut values = DMatrix::zeros(j123 + 1, j123 + 1);
        for j23 in 0..=j123 {
            let b = dd.eval_upto_at_grid(j123, j23);
            let w = dd.weight(j23);
            for j12 in 0..=j123 {
                let labels = ThreeFoldLabels::new(j12, j23, j123)?;
                let v = dd_div(w, norms[j12]).sqrt() * b[j12] * neg1_pow(racah_phase(&labels));
                values[(j12, j23)] = v.hi() + v.lo();
            }
        }
        Ok(RacahTable {
            j123,
            params,
            data,
            values,
        })
    }

    pub fn coefficient(&self, j12: usize, j23: usize, eps3: Sign) -> Result<f64> {
        if j12 > self.j123 || j23 > self.j123 {
            return Err(Error::Constraint(format!(
                "labels ({j12}, {j23}) exceed j123 = {}",
                self.j123
            )));
        }
        Ok(eps3.pow(j12).as_f64() * self.values[(j12, j23)])
    }

    /// Rows `j12`, columns `j23`.
    pub fn matrix(&self, eps3: Sign) -> Result<DMatrix<f64>> {
        let n = self.j123 + 1;
        let mut m = DMatrix::zeros(n, n);
        for j12 in 0..n {
            for j23 in 0..n {
                m[(j12, j23)] = self.coefficient(j12, j23, eps3)?;
            }
        }
        Ok(m)
    }
}

/// Racah coefficient `R_{j12, j23}` at `j123`.
pub fn racah_coefficient(
    labels: &ThreeFoldLabels,
    mu1: f64,
    mu2: f64,
    mu3: f64,
    eps3: Sign,
) -> Result<f64> {
    RacahTable::new(mu1, mu2, mu3, labels.j123)?.coefficient(labels.j12, labels.j23, eps3)
}

/// Shareable memo of [`RacahTable`]s keyed by the exact bits of `(μ1, μ2, μ3)` and `j123`.
#[derive(Debug, Default)]
pub struct RacahCache {
    tables: Mutex<HashMap<(u64, u64, u64, usize), Arc<RacahTable>>>,
}

impl RacahCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, mu1: f64, mu2: f64, mu3: f64, j123: usize) -> Result<Arc<RacahTable>> {
        let key = (mu1.to_bits(), mu2.to_bits(), mu3.to_bits(), j123);
        if let Some(t) = self.tables.lock().expect("racah cache poisoned").get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(RacahTable::new(mu1, mu2, mu3, j123)?);
        self.tables
            .lock()
            .expect("racah cache poisoned")
            .insert(key, Arc::clone(&table));
        Ok(table)
    }
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMatrix {
    pub dimension: usize,
    pub diagonal: Vec<f64>,
    pub superdiagonal: Vec<f64>,
    pub subdiagonal: Vec<f64>,
}

impl TriMatrix {
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(
            v.len(),
            self.dimension,
            "vector length must match matrix dimension"
        );
        (0..self.dimension)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.subdiagonal[i - 1] * v[i - 1];
                }
                if i + 1 < self.dimension {
                    s += self.superdiagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal.clone()));
        for i in 0..self.dimension.saturating_sub(1) {
            m[(i, i + 1)] = self.superdiagonal[i];
            m[(i + 1, i)] = self.subdiagonal[i];
        }
        m
    }
}

/// `X_c` on the first `dim` basis vectors of `(μ, ε)`: diagonal `cε(-1)^n`,
/// off-diagonals `√[n+1]_μ`.
pub fn xc_matrix(dim: usize, r: IrrepLabel, c: f64) -> Result<TriMatrix> {
    if dim == 0 {
        return Err(Error::Parameter("xc_matrix needs dim >= 1".into()));
    }
    let diagonal = (0..dim)
        .map(|n| c * r.eps.as_f64() * neg1_pow(n as i64))
        .collect();
    let off: Vec<f64> = (0..dim - 1)
        .map(|n| mu_number(n + 1, r.mu).sqrt())
        .collect();
    Ok(TriMatrix {
        dimension: dim,
        diagonal,
        superdiagonal: off.clone(),
        subdiagonal: off,
    })
}

/// Result of applying `Δ(X_c)` to a truncated tensor vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaXcImage {
    pub coeffs: DMatrix<f64>,
}

impl DeltaXcImage {
    /// False on the last row or column, where the truncated input is missing
    /// the contributions from beyond the cut.
    pub fn is_trusted(&self, n1: usize, n2: usize) -> bool {
        n1 + 1 < self.coeffs.nrows() && n2 + 1 < self.coeffs.ncols()
    }
}

/// `Δ(X_c) = X_c ⊗ R + 1 ⊗ X_0` applied to `Σ v[n1, n2] e_{n1} ⊗ e_{n2}`.
pub fn delta_xc_apply(
    v: &DMatrix<f64>,
    r1: IrrepLabel,
    r2: IrrepLabel,
    c: f64,
) -> Result<DeltaXcImage> {
    let (d1, d2) = v.shape();
    let x1 = xc_matrix(d1, r1, c)?.to_dense();
    let x0 = xc_matrix(d2, r2, 0.0)?.to_dense();
    let rdiag = DMatrix::from_fn(d2, d2, |i, k| {
        if i == k {
            r2.eps.as_f64() * neg1_pow(i as i64)
        } else {
            0.0
        }
    });
    // coefficient matrix transforms as A ⊗ B : V ↦ A V Bᵀ
    let coeffs = &x1 * v * rdiag.transpose() + v * x0.transpose();
    Ok(DeltaXcImage { coeffs })
}
