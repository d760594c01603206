//! Quadrature over the two-branch supports `(-outer, -inner) ∪ (inner, outer)`
//! and the region `|λ2| > |λ1| > |c|`, and the Gram matrices built on it.
//!
//! Compact branches use Gauss-Legendre panels after a tanh-sinh map, which
//! absorbs algebraic endpoint singularities. Infinite branches are written in
//! `t = (λ² - inner²)/2`: tanh-sinh Gauss-Legendre on `[0, T0]` and
//! Gauss-Laguerre on `[T0, ∞)`. Nodes carry their exact distances to the
//! branch endpoints so singular weights can be evaluated without cancellation.

use std::num::NonZeroUsize;

use gauss_quad::{laguerre::GaussLaguerre, legendre::GaussLegendre, FiniteAboveNegOneF64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::coupling::{CoupledLabel, IrrepLabel};
use crate::error::{Error, Result};
use crate::families::{bigjacobi_norm, BigJacobiParams, ChiharaParams};
use crate::identities::{k_factor, ResidualReport};
use crate::numerics::CompensatedSum;

/// Half-width of the tanh-sinh parameter interval. The outermost nodes sit
/// about `e^-634` from the endpoints, so an endpoint factor `s^(α-1)` loses
/// roughly `e^(-634α)/α` of mass; negligible for `α ≥ 0.05`.
const DE_HALF_WIDTH: f64 = 6.0;
/// Split point between the finite and the Laguerre part of an infinite branch.
const TAIL_START: f64 = 8.0;

/// `(-outer, -inner) ∪ (inner, outer)`, `outer` possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBranchDomain {
    inner: f64,
    outer: f64,
}

impl TwoBranchDomain {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner.is_finite()) {
            return Err(Error::Parameter(format!(
                "inner bound must be finite and >= 0, got {inner}"
            )));
        }
        if !(outer > inner) {
            return Err(Error::Parameter(format!(
                "need inner < outer, got inner = {inner}, outer = {outer}"
            )));
        }
        Ok(TwoBranchDomain { inner, outer })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }
    pub fn outer(&self) -> f64 {
        self.outer
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Gauss-Legendre nodes per panel.
    pub compact_nodes: usize,
    /// Gauss-Laguerre nodes for the tail of an infinite branch.
    pub tail_nodes: usize,
    /// Panels per branch.
    pub subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            compact_nodes: 96,
            tail_nodes: 64,
            subdivisions: 4,
        }
    }
}

impl QuadConfig {
    pub fn new(compact_nodes: usize, tail_nodes: usize, subdivisions: usize) -> Result<Self> {
        let cfg = QuadConfig {
            compact_nodes,
            tail_nodes,
            subdivisions,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.compact_nodes == 0 || self.tail_nodes == 0 || self.subdivisions == 0 {
            return Err(Error::Parameter(format!(
                "quadrature node counts must be positive, got {self:?}"
            )));
        }
        self.compact_nodes
            .checked_mul(self.subdivisions)
            .filter(|&n| n <= 1 << 20)
            .ok_or(Error::Overflow {
                what: "quadrature node count",
                index: self.compact_nodes,
            })?;
        Ok(())
    }

    /// The same rule with twice the Gauss-Legendre nodes per panel.
    pub fn doubled(&self) -> Self {
        QuadConfig {
            compact_nodes: 2 * self.compact_nodes,
            ..*self
        }
    }
}

/// A node on one branch of a [`TwoBranchDomain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// The signed abscissa.
    pub x: f64,
    /// `|x| - inner`.
    pub gap: f64,
    /// `(x² - inner²)/2`.
    pub half_sq: f64,
    /// `outer - |x|`, infinite on an infinite branch.
    pub to_outer: f64,
    pub weight: f64,
}

/// Tanh-sinh Gauss-Legendre rule on `(0, 1)`, as `(s, 1 - s, weight)`.
fn unit_rule(cfg: &QuadConfig) -> Result<Vec<(f64, f64, f64)>> {
    cfg.check()?;
    let gl = GaussLegendre::new(NonZeroUsize::new(cfg.compact_nodes).expect("checked positive"));
    let panel = 2.0 * DE_HALF_WIDTH / cfg.subdivisions as f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::with_capacity(cfg.compact_nodes * cfg.subdivisions);
    for k in 0..cfg.subdivisions {
        let mid = -DE_HALF_WIDTH + (k as f64 + 0.5) * panel;
        for &(node, w) in gl.as_node_weight_pairs() {
            let t = mid + node * panel / 2.0;
            let y = half_pi * t.sinh();
            let e = (-2.0 * y.abs()).exp();
            // s = (1 + tanh y)/2 and 1 - s without cancellation
            let (s, sc) = if y >= 0.0 {
                (1.0 / (1.0 + e), e / (1.0 + e))
            } else {
                (e / (1.0 + e), 1.0 / (1.0 + e))
            };
            let ds = 2.0 * half_pi * t.cosh() * s * sc;
            let weight = w * panel / 2.0 * ds;
            if s > 0.0 && sc > 0.0 && weight > 0.0 {
                out.push((s, sc, weight));
            }
        }
    }
    Ok(out)
}

fn mirrored(half: Vec<Node>) -> Vec<Node> {
    let mut out = Vec::with_capacity(2 * half.len());
    for n in &half {
        out.push(Node { x: -n.x, ..*n });
    }
    out.extend(half);
    out
}

/// Nodes on `(inner, inner + len)`; `len` is passed separately so that a
/// short branch keeps its exact length.
fn compact_nodes_from(rule: &[(f64, f64, f64)], inner: f64, len: f64) -> Vec<Node> {
    let outer = inner + len;
    let half = rule
        .iter()
        .filter_map(|&(s, sc, w)| {
            let gap = len * s;
            let to_outer = len * sc;
            let weight = len * w;
            if gap == 0.0 || to_outer == 0.0 || weight == 0.0 {
                return None;
            }
            let x = if gap < to_outer {
                inner + gap
            } else {
                outer - to_outer
            };
            Some(Node {
                x,
                gap,
                half_sq: gap * (x + inner) / 2.0,
                to_outer,
                weight,
            })
        })
        .collect();
    mirrored(half)
}

fn infinite_nodes(inner: f64, cfg: &QuadConfig) -> Result<Vec<Node>> {
    let rule = unit_rule(cfg)?;
    let alpha = FiniteAboveNegOneF64::new(0.0).expect("0 > -1");
    let lag = GaussLaguerre::new(
        NonZeroUsize::new(cfg.tail_nodes).expect("checked positive"),
        alpha,
    );
    let at = |t: f64, wt: f64| {
        let x = (inner * inner + 2.0 * t).sqrt();
        Node {
            x,
            gap: 2.0 * t / (x + inner),
            half_sq: t,
            to_outer: f64::INFINITY,
            weight: wt / x,
        }
    };
    let mut half: Vec<Node> = rule
        .iter()
        .map(|&(s, _, w)| at(TAIL_START * s, TAIL_START * w))
        .collect();
    for &(u, w) in lag.as_node_weight_pairs() {
        let wt = w * u.exp();
        if wt.is_finite() && wt > 0.0 {
            half.push(at(TAIL_START + u, wt));
        }
    }
    Ok(mirrored(half))
}

/// Nodes and weights of the rule on both branches of `dom`.
pub fn nodes(dom: &TwoBranchDomain, cfg: &QuadConfig) -> Result<Vec<Node>> {
    if dom.outer.is_finite() {
        Ok(compact_nodes_from(
            &unit_rule(cfg)?,
            dom.inner,
            dom.outer - dom.inner,
        ))
    } else {
        infinite_nodes(dom.inner, cfg)
    }
}

/// `∫ f` over both branches, with `f` given the full node.
pub fn integrate_nodes<F>(f: F, dom: &TwoBranchDomain, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(&Node) -> Result<f64>,
{
    let mut acc = CompensatedSum::new();
    for n in nodes(dom, cfg)? {
        let v = f(&n)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integrand at x = {}", n.x)));
        }
        acc.add(n.weight * v);
    }
    Ok(acc.value())
}

/// `∫ f(x) dx` over both branches.
pub fn integrate<F>(f: F, dom: &TwoBranchDomain, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_nodes(|n| f(n.x), dom, cfg)
}

/// `sign(λ)(λ + γ)` at a node whose inner bound is `|γ|`, or whose outer
/// bound is `|γ|` when `at_outer`.
fn signed_shift(n: &Node, gamma: f64, at_outer: bool) -> f64 {
    let near = if at_outer { n.to_outer } else { n.gap };
    if n.x.signum() * gamma < 0.0 {
        near
    } else {
        n.x.abs() + gamma.abs()
    }
}

/// Normalized Chihara weight from `t = (λ² - γ²)/2` and `sign(λ)(λ + γ)`.
fn chihara_weight_from(mu: f64, t: f64, shift: f64) -> f64 {
    shift * t.powf(mu - 0.5) * (-t).exp() / (2.0 * libm::tgamma(mu + 0.5))
}

/// Normalized Chihara weight at a node of `F = TwoBranchDomain(|γ|, ∞)`.
pub fn chihara_weight_at(p: &ChiharaParams, n: &Node) -> f64 {
    chihara_weight_from(p.mu, n.half_sq, signed_shift(n, p.gamma, false))
}

/// Big −1 Jacobi weight at a node of `𝒞 = TwoBranchDomain(|c|, 1)`.
pub fn bigjacobi_weight_at(p: &BigJacobiParams, n: &Node) -> f64 {
    let (a, b, c) = (p.a, p.b, p.c);
    let ax = n.x.abs();
    let one_plus_x = if n.x > 0.0 { 1.0 + ax } else { n.to_outer };
    let x_minus_c = n.x.signum() * signed_shift(n, -c, false);
    n.x.signum()
        * one_plus_x
        * x_minus_c
        // separate powers: the products underflow next to x = 0 when c = 0
        * n.gap.powf((b - 1.0) / 2.0)
        * (ax + c.abs()).powf((b - 1.0) / 2.0)
        * n.to_outer.powf((a - 1.0) / 2.0)
        * (1.0 + ax).powf((a - 1.0) / 2.0)
}

fn gram_from<F>(size: usize, nodes: &[Node], values: F) -> Result<DMatrix<f64>>
where
    F: Fn(&Node) -> Result<(f64, Vec<f64>)>,
{
    let mut acc = vec![CompensatedSum::new(); size * size];
    for n in nodes {
        let (w, v) = values(n)?;
        let w = w * n.weight;
        if !w.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("Gram integrand at x = {}", n.x)));
        }
        for i in 0..size {
            for j in i..size {
                acc[i * size + j].add(w * v[i] * v[j]);
            }
        }
    }
    Ok(DMatrix::from_fn(size, size, |i, j| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        acc[i * size + j].value()
    }))
}

/// `G_nm = ∫_F P_n P_m W dλ`, ideally the identity.
pub fn chihara_gram(nmax: usize, p: &ChiharaParams, cfg: &QuadConfig) -> Result<DMatrix<f64>> {
    let dom = TwoBranchDomain::new(p.gamma.abs(), f64::INFINITY)?;
    let nodes = nodes(&dom, cfg)?;
    gram_from(nmax + 1, &nodes, |n| {
        Ok((chihara_weight_at(p, n), p.eval_upto(nmax, n.x)))
    })
}

/// `G_nm = ∫_𝒞 J_n J_m w dx`, ideally `δ_nm` times the norm.
pub fn bigjacobi_gram(nmax: usize, p: &BigJacobiParams, cfg: &QuadConfig) -> Result<DMatrix<f64>> {
    if !(p.c.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "Big -1 Jacobi orthogonality needs |c| < 1, got c = {}",
            p.c
        )));
    }
    let dom = TwoBranchDomain::new(p.c.abs(), 1.0)?;
    let nodes = nodes(&dom, cfg)?;
    gram_from(nmax + 1, &nodes, |n| {
        Ok((bigjacobi_weight_at(p, n), p.eval_upto(nmax, n.x)))
    })
}

/// Two-variable basis of total degree at most `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoVarBasis {
    /// `P_{n1}(λ1; μ1, cε1) P_{n2}(λ2; μ2, λ1ε2)`.
    Uncoupled,
    /// `K_j J_j P_N(λ2; μ12, cε12)`.
    Coupled,
}

/// Basis labels in Gram order: by total degree, then `n1` (uncoupled) or
/// `j` (coupled) ascending. Entries are `(n1, n2)` or `(N, j)`.
pub fn twovar_labels(total_degree: usize, basis: TwoVarBasis) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for t in 0..=total_degree {
        for a in 0..=t {
            out.push(match basis {
                TwoVarBasis::Uncoupled => (a, t - a),
                TwoVarBasis::Coupled => (t - a, a),
            });
        }
    }
    out
}

/// Gram matrix of a two-variable basis under `W(λ1; μ1, cε1) W(λ2; μ2, λ1ε2)`
/// on `|λ2| > |λ1| > |c|`, integrating over `λ1` first.
pub fn twovar_gram(
    total_degree: usize,
    c: f64,
    reps: [IrrepLabel; 2],
    basis: TwoVarBasis,
    cfg: &QuadConfig,
) -> Result<DMatrix<f64>> {
    let [r1, r2] = reps;
    let (e1, e2) = (r1.eps.as_f64(), r2.eps.as_f64());
    let labels = twovar_labels(total_degree, basis);
    let size = labels.len();
    let rule = unit_rule(cfg)?;
    let outer = nodes(&TwoBranchDomain::new(c.abs(), f64::INFINITY)?, cfg)?;
    let p1 = ChiharaParams::new(r1.mu, c * e1)?;
    let mut acc = vec![CompensatedSum::new(); size * size];
    for o in &outer {
        let l2 = o.x;
        // the inner integral vanishes like gap^{μ1+μ2}; nothing to resolve
        if !(l2.abs() > c.abs()) {
            continue;
        }
        // λ2-only factors
        let coupled = match basis {
            TwoVarBasis::Uncoupled => None,
            TwoVarBasis::Coupled => {
                let mut per_j = Vec::with_capacity(total_degree + 1);
                for j in 0..=total_degree {
                    let r12 = CoupledLabel::new(r1, r2, j).irrep();
                    let k = k_factor(j, l2, r2.mu, r1.mu, c, r1.eps, r2.eps)?;
                    let p = ChiharaParams::new(r12.mu, c * r12.eps.as_f64())?
                        .eval_upto(total_degree, l2);
                    per_j.push((k, p));
                }
                Some((
                    per_j,
                    BigJacobiParams::new(2.0 * r2.mu, 2.0 * r1.mu, -c * e1 * e2 / l2)?,
                ))
            }
        };
        for n in compact_nodes_from(&rule, c.abs(), o.gap) {
            let l1 = n.x;
            let w1 = chihara_weight_at(&p1, &n);
            let t2 = n.to_outer * (l2.abs() + l1.abs()) / 2.0;
            let shifted = Node {
                x: l2,
                gap: 0.0,
                half_sq: t2,
                to_outer: n.to_outer,
                weight: 0.0,
            };
            let w2 = chihara_weight_from(r2.mu, t2, signed_shift(&shifted, l1 * e2, true));
            let w = o.weight * n.weight * w1 * w2;
            if w == 0.0 {
                continue;
            }
            let v: Vec<f64> = match &coupled {
                None => {
                    let a = p1.eval_upto(total_degree, l1);
                    let b = ChiharaParams::new(r2.mu, l1 * e2)?.eval_upto(total_degree, l2);
                    labels.iter().map(|&(n1, n2)| a[n1] * b[n2]).collect()
                }
                Some((per_j, bj)) => {
                    let jv = bj.eval_upto(total_degree, e2 * l1 / l2);
                    labels
                        .iter()
                        .map(|&(big_n, j)| per_j[j].0 * jv[j] * per_j[j].1[big_n])
                        .collect()
                }
            };
            if !w.is_finite() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "two-variable integrand at ({l1}, {l2})"
                )));
            }
            for i in 0..size {
                for j in i..size {
                    acc[i * size + j].add(w * v[i] * v[j]);
                }
            }
        }
    }
    Ok(DMatrix::from_fn(size, size, |i, j| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        acc[i * size + j].value()
    }))
}

/// `∫ W(λ1; μ1, cε1) W(λ2; μ2, λ1ε2) dλ1` over `|c| < |λ1| < |λ2|` against
/// its closed form, obtained by substituting `u = ε2λ1/λ2` and recognizing
/// the Big −1 Jacobi mass with parameters `(2μ2, 2μ1, -cε1ε2/λ2)`.
pub fn inner_measure_residual(
    lambda2: f64,
    c: f64,
    reps: [IrrepLabel; 2],
    cfg: &QuadConfig,
) -> Result<ResidualReport> {
    let [r1, r2] = reps;
    let (m1, m2) = (r1.mu, r2.mu);
    let (e1, e2) = (r1.eps.as_f64(), r2.eps.as_f64());
    if !(lambda2.abs() > c.abs()) {
        return Err(Error::Domain(format!(
            "need |lambda2| > |c|, got lambda2 = {lambda2}, c = {c}"
        )));
    }
    let p1 = ChiharaParams::new(m1, c * e1)?;
    let dom = TwoBranchDomain::new(c.abs(), lambda2.abs())?;
    let lhs = integrate_nodes(
        |n| {
            let t2 = n.to_outer * (lambda2.abs() + n.x.abs()) / 2.0;
            let probe = Node {
                x: lambda2,
                gap: 0.0,
                half_sq: t2,
                to_outer: n.to_outer,
                weight: 0.0,
            };
            Ok(chihara_weight_at(&p1, n)
                * chihara_weight_from(m2, t2, signed_shift(&probe, n.x * e2, true)))
        },
        &dom,
        cfg,
    )?;
    let bj = BigJacobiParams::new(2.0 * m2, 2.0 * m1, -c * e1 * e2 / lambda2)?;
    let l2sq = lambda2 * lambda2;
    let rhs =
        lambda2.abs() * l2sq * (l2sq / 2.0).powf(m1 + m2 - 1.0) * (-(l2sq - c * c) / 2.0).exp()
            / (4.0 * libm::tgamma(m1 + 0.5) * libm::tgamma(m2 + 0.5))
            * bj.norm_prefactor()
            * bigjacobi_norm(0, 2.0 * m2, 2.0 * m1)?;
    let inputs = [
        ("mu1", m1),
        ("eps1", e1),
        ("mu2", m2),
        ("eps2", e2),
        ("c", c),
        ("lambda2", lambda2),
    ]
    .iter()
    .map(|&(k, v)| (k.to_string(), v))
    .collect();
    Ok(ResidualReport::new(
        "inner-measure",
        inputs,
        lhs,
        rhs,
        INNER_MEASURE_TOL,
    ))
}

pub const INNER_MEASURE_TOL: f64 = 1e-7;
