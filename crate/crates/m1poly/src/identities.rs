//! Residual checks of the convolution identities, the Chihara generating
//! function, the realization of the coupled basis and the bilinear Big −1
//! Jacobi generating function.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::coupling::{
    cg_coefficient, cg_matrix, cg_table_dd, couple, CoupledLabel, IrrepLabel, RacahTable, Sign,
    ThreeFoldLabels,
};
use crate::error::{Error, Result};
use crate::families::{bigjacobi_norm, BigJacobiParams, ChiharaParams};
use crate::numerics::{
    csum, gamma_ratio, hyp_pfq, mu_factorial, mu_number, neg1_pow, parity, pochhammer, sign,
    SeriesPolicy,
};

pub const CONV1_TOL: f64 = 1e-9;
pub const CONV2_TOL: f64 = 1e-8;
pub const GENFUN_TOL: f64 = 1e-10;
pub const REALIZATION_TOL: f64 = 1e-9;
pub const BILINEAR_TOL: f64 = 1e-7;
/// Default truncation of the `j` sum in the bilinear generating function.
pub const DEFAULT_JMAX: usize = 40;

const REL_FLOOR: f64 = 1e-300;

/// `(λ1, λ2, c)` with `|λ2| > |λ1| > |c|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint2 {
    lambda1: f64,
    lambda2: f64,
    c: f64,
}

impl SpectralPoint2 {
    pub fn new(lambda1: f64, lambda2: f64, c: f64) -> Result<Self> {
        if ![lambda1, lambda2, c].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("spectral point".into()));
        }
        if !(lambda2.abs() > lambda1.abs() && lambda1.abs() > c.abs()) {
            return Err(Error::Domain(format!(
                "need |lambda2| > |lambda1| > |c|, got lambda1 = {lambda1}, lambda2 = {lambda2}, c = {c}"
            )));
        }
        Ok(SpectralPoint2 {
            lambda1,
            lambda2,
            c,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn c(&self) -> f64 {
        self.c
    }
}

/// `(λ1, λ2, λ3, c)` with `|λ3| > |λ2| > |λ1| > |c|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint3 {
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
    c: f64,
}

impl SpectralPoint3 {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64, c: f64) -> Result<Self> {
        SpectralPoint2::new(lambda1, lambda2, c)?;
        if !lambda3.is_finite() {
            return Err(Error::NonFinite("spectral point".into()));
        }
        if !(lambda3.abs() > lambda2.abs()) {
            return Err(Error::Domain(format!(
                "need |lambda3| > |lambda2|, got lambda2 = {lambda2}, lambda3 = {lambda3}"
            )));
        }
        Ok(SpectralPoint3 {
            lambda1,
            lambda2,
            lambda3,
            c,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }
    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub inputs: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1e-300)`.
    pub rel_residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Last retained term over the partial sum, for truncated series.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_estimate: Option<f64>,
}

impl ResidualReport {
    pub fn new(
        identity: &str,
        inputs: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> Self {
        let abs_residual = (lhs - rhs).abs();
        let rel_residual = abs_residual / lhs.abs().max(rhs.abs()).max(REL_FLOOR);
        let mut r = ResidualReport {
            identity: identity.to_string(),
            inputs,
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            tol,
            pass: false,
            seed: None,
            tail_estimate: None,
        };
        r.pass = r.passes();
        r
    }

    /// A report whose relative residual is `|lhs - rhs| / scale`, for entries
    /// such as Gram off-diagonals whose expected value is zero.
    pub fn scaled(
        identity: &str,
        inputs: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        scale: f64,
        tol: f64,
    ) -> Self {
        let mut r = ResidualReport::new(identity, inputs, lhs, rhs, tol);
        r.rel_residual = r.abs_residual / scale.abs().max(REL_FLOOR);
        r.pass = r.passes();
        r
    }

    fn passes(&self) -> bool {
        self.rel_residual.is_finite() && self.rel_residual <= self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.passes();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

fn record(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn inputs2(pt: &SpectralPoint2, r1: IrrepLabel, r2: IrrepLabel) -> BTreeMap<String, f64> {
    record(&[
        ("mu1", r1.mu),
        ("eps1", r1.eps.as_f64()),
        ("mu2", r2.mu),
        ("eps2", r2.eps.as_f64()),
        ("c", pt.c),
        ("lambda1", pt.lambda1),
        ("lambda2", pt.lambda2),
    ])
}

fn inputs3(pt: &SpectralPoint3, reps: [IrrepLabel; 3]) -> BTreeMap<String, f64> {
    record(&[
        ("mu1", reps[0].mu),
        ("eps1", reps[0].eps.as_f64()),
        ("mu2", reps[1].mu),
        ("eps2", reps[1].eps.as_f64()),
        ("mu3", reps[2].mu),
        ("eps3", reps[2].eps.as_f64()),
        ("c", pt.c),
        ("lambda1", pt.lambda1),
        ("lambda2", pt.lambda2),
        ("lambda3", pt.lambda3),
    ])
}

/// `K_j(λ2; μ2, μ1; c)`, the normalization of the coupled eigenfunctions.
///
/// The square root carries the sign `sign(λ2)^j`, so that `K_j J_j` is a
/// polynomial of degree `j` in `λ2`.
pub fn k_factor(
    j: usize,
    lambda2: f64,
    mu2: f64,
    mu1: f64,
    c: f64,
    eps1: Sign,
    eps2: Sign,
) -> Result<f64> {
    if !(lambda2.abs() > c.abs()) {
        return Err(Error::Domain(format!(
            "K_j needs |lambda2| > |c|, got lambda2 = {lambda2}, c = {c}"
        )));
    }
    let ce = c * (eps1 * eps2).as_f64();
    let den = lambda2 - neg1_pow(j as i64) * ce;
    if den == 0.0 {
        return Err(Error::Pole(format!("K_{j}: lambda2 = (-1)^j c eps1 eps2")));
    }
    if j == 0 {
        return Ok(1.0);
    }
    let s = (lambda2 * lambda2 - c * c) / 2.0;
    let g = gamma_ratio(&[mu1 + 0.5, mu2 + 0.5], &[mu1 + mu2 + j as f64 + 1.0])?;
    let h = bigjacobi_norm(j, 2.0 * mu2, 2.0 * mu1)?;
    let rad = s.powi(j as i32) * (lambda2 - ce) / den * g / h;
    if rad < 0.0 {
        return Err(Error::NegativeRadicand {
            what: "K_j",
            value: rad,
        });
    }
    let phase = if j % 2 == 1 { sign(lambda2) } else { 1.0 };
    Ok(phase * rad.sqrt())
}

/// `K_j(λ; μ_b, μ_a; κ) J_j(ε_b λ_a/λ; 2μ_b, 2μ_a, -κ ε_a ε_b/λ)`, the
/// factor left after coupling `a ⊗ b` to label `j`.
fn pair_factor(
    j: usize,
    lambda: f64,
    lambda_a: f64,
    kappa: f64,
    a: IrrepLabel,
    b: IrrepLabel,
) -> Result<f64> {
    let k = k_factor(j, lambda, b.mu, a.mu, kappa, a.eps, b.eps)?;
    let bj = BigJacobiParams::new(
        2.0 * b.mu,
        2.0 * a.mu,
        -kappa * (a.eps * b.eps).as_f64() / lambda,
    )?;
    Ok(k * bj.eval_upto(j, b.eps.as_f64() * lambda_a / lambda)[j])
}

/// `Υe_N` for the component `j`: `K_j J_j P_N(λ2; μ12, cε12)`.
pub fn coupled_function(
    big_n: usize,
    j: usize,
    pt: &SpectralPoint2,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    let r12 = CoupledLabel::new(r1, r2, j).irrep();
    let p = ChiharaParams::new(r12.mu, pt.c * r12.eps.as_f64())?;
    Ok(pair_factor(j, pt.lambda2, pt.lambda1, pt.c, r1, r2)?
        * p.eval_upto(big_n, pt.lambda2)[big_n])
}

/// `P_{n1}(λ1; μ1, cε1) P_{n2}(λ2; μ2, λ1ε2)`.
pub fn uncoupled_function(
    n1: usize,
    n2: usize,
    pt: &SpectralPoint2,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    let p1 = ChiharaParams::new(r1.mu, pt.c * r1.eps.as_f64())?;
    let p2 = ChiharaParams::new(r2.mu, pt.lambda1 * r2.eps.as_f64())?;
    Ok(p1.eval_upto(n1, pt.lambda1)[n1] * p2.eval_upto(n2, pt.lambda2)[n2])
}

/// The first convolution identity at `(N, j)`: the coupled function
/// against the Clebsch-Gordan sum of uncoupled products.
pub fn conv1_residual(
    big_n: usize,
    j: usize,
    pt: &SpectralPoint2,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<ResidualReport> {
    let total = big_n + j;
    let lhs = coupled_function(big_n, j, pt, r1, r2)?;
    // the terms can exceed the sum by 1e8 at small |λ|, so the whole sum is
    // carried in double-double
    let p1 = ChiharaParams::new(r1.mu, pt.c * r1.eps.as_f64())?.eval_upto_dd(total, pt.lambda1);
    let p2 =
        ChiharaParams::new(r2.mu, pt.lambda1 * r2.eps.as_f64())?.eval_upto_dd(total, pt.lambda2);
    let cg = cg_table_dd(total, r1, r2)?;
    let rhs = (0..=total).fold(TwoFloat::from(0.0), |acc, n1| {
        acc + cg[n1][j] * p1[n1] * p2[total - n1]
    });
    let rhs = rhs.hi() + rhs.lo();
    let mut inputs = inputs2(pt, r1, r2);
    inputs.insert("N".into(), big_n as f64);
    inputs.insert("j".into(), j as f64);
    Ok(ResidualReport::new("conv1", inputs, lhs, rhs, CONV1_TOL))
}

/// The inverse of the first identity: an uncoupled product against the
/// Clebsch-Gordan sum of coupled functions with `N + j = n1 + n2`.
pub fn conv1_inverse_residual(
    n1: usize,
    n2: usize,
    pt: &SpectralPoint2,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<ResidualReport> {
    let total = n1 + n2;
    let lhs = uncoupled_function(n1, n2, pt, r1, r2)?;
    let terms = (0..=total)
        .map(|j| {
            Ok(cg_coefficient(n1, n2, total - j, j, r1, r2)?
                * coupled_function(total - j, j, pt, r1, r2)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rhs = csum(terms);
    let mut inputs = inputs2(pt, r1, r2);
    inputs.insert("n1".into(), n1 as f64);
    inputs.insert("n2".into(), n2 as f64);
    Ok(ResidualReport::new(
        "conv1-inverse",
        inputs,
        lhs,
        rhs,
        CONV1_TOL,
    ))
}

/// `Θf / P_{n123}`: coupling `(1 ⊗ 2) ⊗ 3` with labels `j12`, `j(12)3`.
pub fn theta_f_reduced(
    labels: &ThreeFoldLabels,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
) -> Result<f64> {
    let [r1, r2, r3] = reps;
    let r12 = couple(r1, r2, labels.j12());
    Ok(
        pair_factor(labels.j12(), pt.lambda2, pt.lambda1, pt.c, r1, r2)?
            * pair_factor(labels.j_12_3(), pt.lambda3, pt.lambda2, pt.c, r12, r3)?,
    )
}

/// `Θg / P_{n123}`: coupling `1 ⊗ (2 ⊗ 3)` with labels `j23`, `j1(23)`.
/// The `j23` factor carries `λ1` in place of `c`.
pub fn theta_g_reduced(
    labels: &ThreeFoldLabels,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
) -> Result<f64> {
    let [r1, r2, r3] = reps;
    let r23 = couple(r2, r3, labels.j23());
    Ok(
        pair_factor(labels.j23(), pt.lambda3, pt.lambda2, pt.lambda1, r2, r3)?
            * pair_factor(labels.j_1_23(), pt.lambda3, pt.lambda1, pt.c, r1, r23)?,
    )
}

/// `P_{n123}(λ3; μ123, cε123)`.
fn total_polynomial(
    labels: &ThreeFoldLabels,
    n123: usize,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
) -> Result<f64> {
    let r123 = couple(
        couple(reps[0], reps[1], labels.j12()),
        reps[2],
        labels.j_12_3(),
    );
    let p = ChiharaParams::new(r123.mu, pt.c * r123.eps.as_f64())?;
    Ok(p.eval_upto(n123, pt.lambda3)[n123])
}

pub fn theta_f(
    labels: &ThreeFoldLabels,
    n123: usize,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
) -> Result<f64> {
    Ok(theta_f_reduced(labels, pt, reps)? * total_polynomial(labels, n123, pt, reps)?)
}

pub fn theta_g(
    labels: &ThreeFoldLabels,
    n123: usize,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
) -> Result<f64> {
    Ok(theta_g_reduced(labels, pt, reps)? * total_polynomial(labels, n123, pt, reps)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `Θf_{j12} = Σ_{j23} R_{j12,j23} Θg_{j23}`.
    Forward,
    /// `Θg_{j23} = Σ_{j12} R_{j12,j23} Θf_{j12}`.
    Inverse,
}

/// The second convolution identity, with the common `P_{n123}` cancelled.
pub fn conv2_residual(
    labels: &ThreeFoldLabels,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
    direction: Direction,
) -> Result<ResidualReport> {
    let table = RacahTable::new(reps[0].mu, reps[1].mu, reps[2].mu, labels.j123())?;
    conv2_residual_with(&table, labels, pt, reps, direction)
}

/// [`conv2_residual`] with a precomputed Racah table for `(μ1, μ2, μ3, j123)`.
pub fn conv2_residual_with(
    table: &RacahTable,
    labels: &ThreeFoldLabels,
    pt: &SpectralPoint3,
    reps: [IrrepLabel; 3],
    direction: Direction,
) -> Result<ResidualReport> {
    let j123 = labels.j123();
    if table.j123 != j123 {
        return Err(Error::Parameter(format!(
            "Racah table is for j123 = {}, labels have {j123}",
            table.j123
        )));
    }
    let eps3 = reps[2].eps;
    let (lhs, rhs, name) =
        match direction {
            Direction::Forward => {
                let lhs = theta_f_reduced(labels, pt, reps)?;
                let terms = (0..=j123)
                    .map(|j23| {
                        let l = ThreeFoldLabels::new(labels.j12(), j23, j123)?;
                        Ok(table.coefficient(labels.j12(), j23, eps3)?
                            * theta_g_reduced(&l, pt, reps)?)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (lhs, csum(terms), "conv2")
            }
            Direction::Inverse => {
                let lhs = theta_g_reduced(labels, pt, reps)?;
                let terms = (0..=j123)
                    .map(|j12| {
                        let l = ThreeFoldLabels::new(j12, labels.j23(), j123)?;
                        Ok(table.coefficient(j12, labels.j23(), eps3)?
                            * theta_f_reduced(&l, pt, reps)?)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (lhs, csum(terms), "conv2-inverse")
            }
        };
    let mut inputs = inputs3(pt, reps);
    inputs.insert("j12".into(), labels.j12() as f64);
    inputs.insert("j23".into(), labels.j23() as f64);
    inputs.insert("j123".into(), j123 as f64);
    Ok(ResidualReport::new(name, inputs, lhs, rhs, CONV2_TOL))
}

/// Evaluation route for the Chihara generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenFunForm {
    Hypergeometric,
    Bessel,
    /// `Σ_{n ≤ M} P_n(λ) z^n / √([n]_μ!)`.
    PartialSum(usize),
}

/// `₀F₁(; μ+1/2; X) + z(λ-γ)/(2μ+1) ₀F₁(; μ+3/2; X)` with `X = z²(λ²-γ²)/4`.
fn genfun_bracket(lambda: f64, z: f64, mu: f64, gamma: f64) -> Result<f64> {
    let p = SeriesPolicy::default();
    let x = z * z * (lambda * lambda - gamma * gamma) / 4.0;
    Ok(hyp_pfq(&[], &[mu + 0.5], x, &p)?
        + z * (lambda - gamma) / (2.0 * mu + 1.0) * hyp_pfq(&[], &[mu + 1.5], x, &p)?)
}

/// `I_ν(w)` for real `ν > -1`, `w > 0`.
fn bessel_i(nu: f64, w: f64) -> f64 {
    if nu >= 0.0 {
        puruspe::Inu_Knu(nu, w).0
    } else {
        let a = -nu;
        let (i, k) = puruspe::Inu_Knu(a, w);
        i + 2.0 / std::f64::consts::PI * (a * std::f64::consts::PI).sin() * k
    }
}

/// `Σ_n P_n(λ; μ, γ) z^n / √([n]_μ!)` with `γ = cε`.
pub fn chihara_genfun(lambda: f64, z: f64, p: &ChiharaParams, form: GenFunForm) -> Result<f64> {
    let (mu, gamma) = (p.mu, p.gamma);
    let damp = (-z * z / 2.0).exp();
    match form {
        GenFunForm::Hypergeometric => Ok(damp * genfun_bracket(lambda, z, mu, gamma)?),
        GenFunForm::Bessel => {
            let d = lambda * lambda - gamma * gamma;
            if z == 0.0 || !(d > 0.0) {
                return Ok(damp * genfun_bracket(lambda, z, mu, gamma)?);
            }
            let w = z.abs() * d.sqrt();
            let g = libm::tgamma(mu + 0.5) * (w / 2.0).powf(0.5 - mu);
            Ok(damp
                * g
                * (bessel_i(mu - 0.5, w) + z * (lambda - gamma) / w * bessel_i(mu + 0.5, w)))
        }
        GenFunForm::PartialSum(m) => {
            let values = p.eval_upto(m, lambda);
            let mut scale = 1.0;
            let mut terms = Vec::with_capacity(m + 1);
            for (n, v) in values.iter().enumerate() {
                if n > 0 {
                    scale *= z / mu_number(n, mu).sqrt();
                }
                terms.push(v * scale);
            }
            Ok(csum(terms))
        }
    }
}

/// The `j`-dependent factor `f_e(j)` (`odd = false`) or `f_o(j)` of the
/// coupled basis realization.
fn coupled_basis_factor(
    j: usize,
    odd: bool,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    if z2 == 0.0 {
        if z1 == 0.0 {
            return Ok(if j == 0 && !odd { 1.0 } else { 0.0 });
        }
        return Err(Error::Domain(
            "coupled basis realization needs z2 != 0".into(),
        ));
    }
    let p = SeriesPolicy::default();
    let (mu1, mu2) = (r1.mu, r2.mu);
    let (je, jp) = parity(j);
    let (jef, jpf, jf) = (je as f64, jp as f64, j as f64);
    let t = z1 / z2;
    let x = -t * t;
    let pre = neg1_pow((je + jp) as i64) * z2.powi(j as i32) / mu_factorial(j, mu2)?.sqrt()
        * (pochhammer(0.5 + mu1, je + jp)? / pochhammer(jef + 1.0 + mu1 + mu2, je + jp)?).sqrt();
    let lead = neg1_pow(jp as i64) * t / (r2.eps.as_f64() * (1.0 + 2.0 * mu1));
    if !odd {
        let f1 = hyp_pfq(&[-jef, 0.5 - jef - jpf - mu2], &[0.5 + mu1], x, &p)?;
        let k = jf + 2.0 * mu2 * jpf;
        let f2 = if k == 0.0 {
            0.0
        } else {
            hyp_pfq(&[1.0 - jef - jpf, 0.5 - jef - mu2], &[1.5 + mu1], x, &p)?
        };
        Ok(pre * (f1 + lead * k * f2))
    } else {
        let f1 = hyp_pfq(&[-jef - jpf, -0.5 - jef - mu2], &[0.5 + mu1], x, &p)?;
        let f2 = hyp_pfq(&[-jef, 0.5 - jef - jpf - mu2], &[1.5 + mu1], x, &p)?;
        let k = jf + 1.0 + 2.0 * mu1 + 2.0 * mu2 * jpf;
        Ok(sign(z2) / (1.0 + t * t).sqrt() * pre * (f1 + lead * k * f2))
    }
}

/// `e_N^{(μ12, ε12)}(z1, z2)` from the closed `₂F₁` realization.
pub fn coupled_basis_realization(
    big_n: usize,
    j: usize,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    if z2 == 0.0 {
        return Err(Error::Domain(
            "coupled basis realization needs z2 != 0".into(),
        ));
    }
    let mu12 = CoupledLabel::new(r1, r2, j).mu12;
    let f = coupled_basis_factor(j, big_n % 2 == 1, z1, z2, r1, r2)?;
    Ok((z1 * z1 + z2 * z2).powf(big_n as f64 / 2.0) / mu_factorial(big_n, mu12)?.sqrt() * f)
}

/// `e_N^{(μ12, ε12)}(z1, z2)` as the Clebsch-Gordan combination of the
/// monomials `z1^{n1} z2^{n2} / √([n1]_{μ1}! [n2]_{μ2}!)`.
pub fn coupled_basis_cg_sum(
    big_n: usize,
    j: usize,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<f64> {
    let total = big_n + j;
    let cg = cg_matrix(total, r1, r2)?;
    let terms = (0..=total)
        .map(|n1| {
            let n2 = total - n1;
            let m = (mu_factorial(n1, r1.mu)? * mu_factorial(n2, r2.mu)?).sqrt();
            Ok(cg[(n1, j)] * z1.powi(n1 as i32) * z2.powi(n2 as i32) / m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(csum(terms))
}

/// Closed realization of `e_N` against its Clebsch-Gordan expansion.
pub fn realization_residual(
    big_n: usize,
    j: usize,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
) -> Result<ResidualReport> {
    let lhs = coupled_basis_realization(big_n, j, z1, z2, r1, r2)?;
    let rhs = coupled_basis_cg_sum(big_n, j, z1, z2, r1, r2)?;
    let mut inputs = record(&[
        ("mu1", r1.mu),
        ("eps1", r1.eps.as_f64()),
        ("mu2", r2.mu),
        ("eps2", r2.eps.as_f64()),
        ("z1", z1),
        ("z2", z2),
    ]);
    inputs.insert("N".into(), big_n as f64);
    inputs.insert("j".into(), j as f64);
    Ok(ResidualReport::new(
        "realization",
        inputs,
        lhs,
        rhs,
        REALIZATION_TOL,
    ))
}

/// Both sides of the bilinear generating function: the product of the two
/// one-variable brackets, and the terms `j = 0..=jmax` of the right side.
pub fn bilinear_terms(
    pt: &SpectralPoint2,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
    jmax: usize,
) -> Result<(f64, Vec<f64>)> {
    let (l1, l2, c) = (pt.lambda1, pt.lambda2, pt.c);
    let lhs = genfun_bracket(l1, z1, r1.mu, c * r1.eps.as_f64())?
        * genfun_bracket(l2, z2, r2.mu, l1 * r2.eps.as_f64())?;
    let zz = z1 * z1 + z2 * z2;
    let big_z = zz.sqrt();
    let x = zz * (l2 * l2 - c * c) / 4.0;
    let p = SeriesPolicy::default();
    let terms = (0..=jmax)
        .map(|j| {
            let r12 = CoupledLabel::new(r1, r2, j).irrep();
            let k = pair_factor(j, l2, l1, c, r1, r2)?;
            let fe = coupled_basis_factor(j, false, z1, z2, r1, r2)?;
            let even = fe * hyp_pfq(&[], &[r12.mu + 0.5], x, &p)?;
            let odd = if big_z == 0.0 {
                0.0
            } else {
                let fo = coupled_basis_factor(j, true, z1, z2, r1, r2)?;
                fo * big_z * (l2 - c * r12.eps.as_f64()) / (2.0 * r12.mu + 1.0)
                    * hyp_pfq(&[], &[r12.mu + 1.5], x, &p)?
            };
            Ok(k * (even + odd))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((lhs, terms))
}

/// The bilinear Big −1 Jacobi generating function truncated at `jmax`.
pub fn bilinear_genfun_residual(
    pt: &SpectralPoint2,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
    jmax: usize,
) -> Result<ResidualReport> {
    let (lhs, terms) = bilinear_terms(pt, z1, z2, r1, r2, jmax)?;
    let last = *terms.last().expect("at least the j = 0 term");
    let rhs = csum(terms);
    let mut inputs = inputs2(pt, r1, r2);
    inputs.insert("z1".into(), z1);
    inputs.insert("z2".into(), z2);
    inputs.insert("jmax".into(), jmax as f64);
    let mut r = ResidualReport::new("bilinear", inputs, lhs, rhs, BILINEAR_TOL);
    r.tail_estimate = Some(last.abs() / rhs.abs().max(REL_FLOOR));
    Ok(r)
}

/// `|lhs - Σ_{j ≤ J}|` for `J = 0..=jmax`.
pub fn bilinear_sweep(
    pt: &SpectralPoint2,
    z1: f64,
    z2: f64,
    r1: IrrepLabel,
    r2: IrrepLabel,
    jmax: usize,
) -> Result<Vec<f64>> {
    let (lhs, terms) = bilinear_terms(pt, z1, z2, r1, r2, jmax)?;
    Ok((0..terms.len())
        .map(|k| (lhs - csum(terms[..=k].iter().copied())).abs())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(mu: f64, e: i64) -> IrrepLabel {
        IrrepLabel::new(mu, Sign::from_int(e).unwrap()).unwrap()
    }

    #[test]
    fn k_factor_trivial_and_factorwise() {
        for &(l2, c) in &[(3.0, 0.2), (-2.5, -0.7)] {
            assert!(
                (k_factor(0, l2, 0.9, 0.6, c, Sign::Plus, Sign::Minus).unwrap() - 1.0).abs()
                    < 1e-14
            );
        }
        // j = 2, μ1 = 0.6, μ2 = 0.9, c = 0.2, λ2 = 3: factors by hand
        let s: f64 = (9.0 - 0.04) / 2.0;
        let g = libm::tgamma(1.1) * libm::tgamma(1.4) / libm::tgamma(4.5);
        let h2 = bigjacobi_norm(2, 1.8, 1.2).unwrap();
        let expect = (s * s * g / h2).sqrt();
        let k = k_factor(2, 3.0, 0.9, 0.6, 0.2, Sign::Plus, Sign::Plus).unwrap();
        assert!((k - expect).abs() < 1e-13 * expect);
        assert!(k_factor(1, 0.1, 0.9, 0.6, 0.2, Sign::Plus, Sign::Plus).is_err());
    }

    #[test]
    fn trivial_reports() {
        let pt = SpectralPoint2::new(0.9, -1.7, 0.3).unwrap();
        let (r1, r2) = (rep(0.7, 1), rep(1.3, -1));
        let r = conv1_residual(0, 0, &pt, r1, r2).unwrap();
        assert_eq!((r.lhs, r.rhs, r.abs_residual), (1.0, 1.0, 0.0));
        assert!(r.pass);
        let r = conv1_inverse_residual(0, 0, &pt, r1, r2).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        let r = bilinear_genfun_residual(&pt, 0.0, 0.0, r1, r2, 5).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        assert!((coupled_basis_realization(0, 0, 0.3, -0.8, r1, r2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_ordering_is_enforced() {
        assert!(SpectralPoint2::new(1.0, 0.5, 0.1).is_err());
        assert!(SpectralPoint2::new(0.1, 0.5, 0.2).is_err());
        assert!(SpectralPoint3::new(0.5, 1.0, -0.9, 0.1).is_err());
    }

    #[test]
    fn report_floor_and_retolerance() {
        let r = ResidualReport::new("x", BTreeMap::new(), 0.0, 0.0, 1e-9);
        assert_eq!(r.rel_residual, 0.0);
        assert!(r.pass);
        let r = ResidualReport::new("x", BTreeMap::new(), 1.0, 1.0 + 1e-8, 1e-9);
        assert!(!r.pass);
        assert!(r.with_tol(1e-7).pass);
    }

    #[test]
    fn genfun_at_origin_and_boundary() {
        let p = ChiharaParams::new(0.7, -0.4).unwrap();
        for form in [
            GenFunForm::Hypergeometric,
            GenFunForm::Bessel,
            GenFunForm::PartialSum(10),
        ] {
            assert!((chihara_genfun(1.3, 0.0, &p, form).unwrap() - 1.0).abs() < 1e-15);
        }
        // λ² = γ²: both 0F1 equal 1
        let z: f64 = 0.8;
        let expect = (-z * z / 2.0).exp() * (1.0 + z * (0.4 + 0.4) / 2.4);
        for form in [GenFunForm::Hypergeometric, GenFunForm::Bessel] {
            assert!((chihara_genfun(0.4, z, &p, form).unwrap() - expect).abs() < 1e-15);
        }
    }
}
