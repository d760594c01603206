//! Draw helpers and matrix checks shared by the integration tests.
#![allow(dead_code)]

use m1poly::coupling::{racah_params, IrrepLabel, Sign};
use m1poly::families::{BannaiItoParams, BigJacobiParams, ChiharaParams, DualHahnParams, Method};
use m1poly::Result;
use nalgebra::DMatrix;
use rand::{Rng, RngExt};

pub fn rep(mu: f64, eps: i64) -> IrrepLabel {
    IrrepLabel::new(mu, Sign::from_int(eps).unwrap()).unwrap()
}

pub fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Chihara parameters and a point of `F`.
pub fn chihara_draw<R: Rng>(rng: &mut R) -> (ChiharaParams, f64) {
    let mu = rng.random_range(0.1..2.5);
    let gamma: f64 = rng.random_range(-0.8..0.8);
    let lambda = random_sign(rng) * (gamma.abs() + rng.random_range(0.05..4.0));
    (ChiharaParams::new(mu, gamma).unwrap(), lambda)
}

/// Big −1 Jacobi parameters and a point of `𝒞`.
pub fn bigjacobi_draw<R: Rng>(rng: &mut R) -> (BigJacobiParams, f64) {
    let a = rng.random_range(-0.9..5.0);
    let b = rng.random_range(-0.9..5.0);
    let c: f64 = rng.random_range(-0.8..0.8);
    let x = random_sign(rng) * (c.abs() + rng.random_range(0.0..1.0) * (1.0 - c.abs()));
    (BigJacobiParams::new(a, b, c).unwrap(), x)
}

pub fn dualhahn_draw<R: Rng>(rng: &mut R, big_n: usize) -> DualHahnParams {
    DualHahnParams::new(
        rng.random_range(0.1..2.5),
        rng.random_range(0.1..2.5),
        big_n,
    )
    .unwrap()
}

/// Bannai-Ito parameters with a supported truncation at `N`, built from
/// random `μ1, μ2, μ3` the way the Racah coefficients build them.
pub fn bannai_ito_draw<R: Rng>(rng: &mut R, big_n: usize) -> BannaiItoParams {
    let mu = [
        rng.random_range(0.1..2.5),
        rng.random_range(0.1..2.5),
        rng.random_range(0.1..2.5),
    ];
    racah_params(mu[0], mu[1], mu[2], big_n).unwrap()
}

/// Largest `|recurrence - closed|` over `n <= nmax`, each relative to
/// `max_{m <= n} |P_m(x)|` (at least `|P_0| = 1`), since `P_n` itself can
/// vanish at `x`.
pub fn cross_method_error<F>(eval: F, nmax: usize) -> Result<f64>
where
    F: Fn(usize, Method) -> Result<f64>,
{
    let (mut scale, mut worst) = (0.0f64, 0.0f64);
    for n in 0..=nmax {
        let r = eval(n, Method::Recurrence)?;
        let c = eval(n, Method::Closed)?;
        scale = scale.max(r.abs()).max(c.abs());
        worst = worst.max((r - c).abs() / scale);
    }
    Ok(worst)
}

/// `max |G_nm - δ_nm e_n| / √(e_n e_m)`.
pub fn scaled_gram_error(g: &DMatrix<f64>, expected: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let e = if i == j { expected[i] } else { 0.0 };
            worst = worst.max((g[(i, j)] - e).abs() / (expected[i] * expected[j]).sqrt());
        }
    }
    worst
}

/// `max |M Mᵀ - I|` entrywise.
pub fn orthogonality_error(m: &DMatrix<f64>) -> f64 {
    let g = m * m.transpose();
    scaled_gram_error(&g, &vec![1.0; g.nrows()])
}
