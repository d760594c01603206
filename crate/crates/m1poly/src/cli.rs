//! Command-line front end: argument parsing, resolved run configuration and
//! the four commands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{cg_matrix, IrrepLabel, RacahTable, Sign, ThreeFoldLabels};
use crate::draws::{draw_rng, DrawBox};
use crate::error::{Error, Result};
use crate::families::{BannaiItoParams, BigJacobiParams, ChiharaParams, DualHahnParams, Method};
use crate::identities::{
    bilinear_genfun_residual, conv1_inverse_residual, conv1_residual, conv2_residual_with,
    Direction, ResidualReport, BILINEAR_TOL, CONV1_TOL, CONV2_TOL,
};
use crate::quadrature::{
    bigjacobi_gram, chihara_gram, twovar_gram, twovar_labels, QuadConfig, TwoVarBasis,
};
use crate::report::{Report, Table};

/// Redraws allowed per draw before giving up.
const MAX_REDRAWS: usize = 64;
const EVAL_TOL: f64 = 1e-10;
const DISCRETE_GRAM_TOL: f64 = 1e-10;
const CONTINUOUS_GRAM_TOL: f64 = 1e-8;
const TWOVAR_GRAM_TOL: f64 = 1e-6;
const COUPLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Evaluate a family by recurrence and closed form.
    Eval,
    /// Gram matrix of a family (discrete sums or quadrature).
    Gram,
    /// Residual sweep of an identity over seeded random draws.
    Convcheck,
    /// Clebsch-Gordan or Racah tables with orthogonality residuals.
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Chihara,
    BigJacobi,
    DualHahn,
    BannaiIto,
    /// The two-variable basis on `|λ2| > |λ1| > |c|` (gram only).
    TwoVariable,
    /// Clebsch-Gordan coefficients (coupling only).
    Cg,
    /// Racah coefficients (coupling only).
    Racah,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Conv1,
    Conv1Inverse,
    Conv2,
    Conv2Inverse,
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "m1poly",
    version,
    about = "Evaluate -1 orthogonal polynomials and check their identities"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long, value_enum)]
    pub identity: Option<Identity>,
    /// Comma-separated `key=value` pairs.
    #[arg(long)]
    pub params: Option<String>,
    /// Degree bound: n for eval/gram, N + j (conv1), j123 (conv2), jmax
    /// (bilinear), total (cg) or j123 (racah).
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Overrides the default tolerance of every entry.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

/// The fully resolved configuration echoed in every report. The output path
/// is left out so that the report bytes do not depend on where they go.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<Identity>,
    pub params: BTreeMap<String, ParamValue>,
    pub nmax: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
}

fn parse_params(raw: Option<&str>) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let Some(raw) = raw else { return Ok(out) };
    for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            Error::Parameter(format!(
                "--params entry '{item}' is not of the form key=value"
            ))
        })?;
        if out
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Error::Parameter(format!(
                "--params key '{}' given twice",
                k.trim()
            )));
        }
    }
    Ok(out)
}

/// Parameters resolved against a list of allowed keys and defaults.
struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    /// `keys` lists `(key, default)`; keys without a default are optional.
    fn resolve(
        raw: &BTreeMap<String, String>,
        keys: &[(&str, Option<ParamValue>)],
        context: &str,
    ) -> Result<Self> {
        for k in raw.keys() {
            if !keys.iter().any(|(s, _)| s == k) {
                let allowed: Vec<&str> = keys.iter().map(|(s, _)| *s).collect();
                return Err(Error::Parameter(format!(
                    "unknown parameter '{k}' for {context}; allowed: {}",
                    allowed.join(", ")
                )));
            }
        }
        let mut values = BTreeMap::new();
        for (k, default) in keys {
            let v = match raw.get(*k) {
                Some(s) => match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => ParamValue::Number(x),
                    Ok(_) => {
                        return Err(Error::Parameter(format!(
                            "parameter {k} must be finite, got {s}"
                        )))
                    }
                    Err(_) => ParamValue::Text(s.clone()),
                },
                None => match default {
                    Some(d) => d.clone(),
                    None => continue,
                },
            };
            values.insert(k.to_string(), v);
        }
        Ok(Params { values })
    }

    fn opt_num(&self, k: &str) -> Result<Option<f64>> {
        match self.values.get(k) {
            None => Ok(None),
            Some(ParamValue::Number(x)) => Ok(Some(*x)),
            Some(ParamValue::Text(s)) => Err(Error::Parameter(format!(
                "parameter {k} must be a number, got '{s}'"
            ))),
        }
    }

    fn num(&self, k: &str) -> Result<f64> {
        self.opt_num(k)?
            .ok_or_else(|| Error::Parameter(format!("parameter {k} is required")))
    }

    fn opt_int(&self, k: &str) -> Result<Option<usize>> {
        match self.opt_num(k)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= 1e6 => Ok(Some(x as usize)),
            Some(x) => Err(Error::Parameter(format!(
                "parameter {k} must be a non-negative integer, got {x}"
            ))),
        }
    }

    fn int(&self, k: &str) -> Result<usize> {
        self.opt_int(k)?
            .ok_or_else(|| Error::Parameter(format!("parameter {k} is required")))
    }

    fn sign(&self, k: &str) -> Result<Sign> {
        let v = self.num(k)?;
        if v == 1.0 || v == -1.0 {
            Sign::from_int(v as i64)
        } else {
            Err(Error::Parameter(format!(
                "parameter {k} must be 1 or -1, got {v}"
            )))
        }
    }

    fn irrep(&self, mu: &str, eps: &str) -> Result<IrrepLabel> {
        IrrepLabel::new(self.num(mu)?, self.sign(eps)?)
    }

    fn text(&self, k: &str) -> Result<&str> {
        match self.values.get(k) {
            Some(ParamValue::Text(s)) => Ok(s),
            Some(ParamValue::Number(x)) => Err(Error::Parameter(format!(
                "parameter {k} must be a name, got {x}"
            ))),
            None => Err(Error::Parameter(format!("parameter {k} is required"))),
        }
    }
}

fn n(x: f64) -> Option<ParamValue> {
    Some(ParamValue::Number(x))
}

fn quad_keys() -> [(&'static str, Option<ParamValue>); 3] {
    let d = QuadConfig::default();
    [
        ("compact_nodes", n(d.compact_nodes as f64)),
        ("tail_nodes", n(d.tail_nodes as f64)),
        ("subdivisions", n(d.subdivisions as f64)),
    ]
}

fn quad_config(p: &Params) -> Result<QuadConfig> {
    QuadConfig::new(
        p.int("compact_nodes")?,
        p.int("tail_nodes")?,
        p.int("subdivisions")?,
    )
}

fn family_keys(
    command: Command,
    family: Family,
) -> Result<Vec<(&'static str, Option<ParamValue>)>> {
    let unsupported = || {
        Err(Error::Parameter(format!(
            "family {family:?} is not available for {command:?}"
        )))
    };
    let mut keys = match (command, family) {
        (Command::Eval | Command::Gram, Family::Chihara) => vec![("mu", n(0.5)), ("gamma", n(0.0))],
        (Command::Eval | Command::Gram, Family::BigJacobi) => {
            vec![("a", n(1.0)), ("b", n(1.0)), ("c", n(0.0))]
        }
        (Command::Eval | Command::Gram, Family::DualHahn) => {
            vec![("eta", n(0.3)), ("xi", n(0.7)), ("N", n(4.0))]
        }
        (Command::Eval | Command::Gram, Family::BannaiIto) => {
            let mut k = vec![
                ("rho1", n(0.2)),
                ("rho2", n(0.45)),
                ("r1", n(0.35)),
                ("r2", n(2.7)),
            ];
            if command == Command::Gram {
                k.push(("N", n(4.0)));
            }
            k
        }
        (Command::Gram, Family::TwoVariable) => vec![
            ("mu1", n(0.5)),
            ("eps1", n(1.0)),
            ("mu2", n(0.5)),
            ("eps2", n(1.0)),
            ("c", n(0.0)),
            ("basis", Some(ParamValue::Text("coupled".into()))),
        ],
        (Command::Coupling, Family::Cg) => vec![
            ("mu1", n(0.5)),
            ("eps1", n(1.0)),
            ("mu2", n(0.5)),
            ("eps2", n(1.0)),
        ],
        (Command::Coupling, Family::Racah) => vec![
            ("mu1", n(0.5)),
            ("mu2", n(0.5)),
            ("mu3", n(0.5)),
            ("eps3", n(1.0)),
        ],
        _ => return unsupported(),
    };
    match (command, family) {
        (Command::Eval, Family::Chihara | Family::BigJacobi) => keys.push(("x", n(0.5))),
        (Command::Eval, Family::DualHahn | Family::BannaiIto) => keys.push(("x", n(1.5))),
        (Command::Gram, Family::Chihara | Family::BigJacobi | Family::TwoVariable) => {
            keys.extend(quad_keys())
        }
        _ => {}
    }
    Ok(keys)
}

fn identity_keys(identity: Identity) -> Vec<(&'static str, Option<ParamValue>)> {
    match identity {
        Identity::Conv1 => vec![("N", None), ("j", None)],
        Identity::Conv1Inverse => vec![("n1", None), ("n2", None)],
        Identity::Conv2 | Identity::Conv2Inverse => {
            vec![("j12", None), ("j23", None), ("j123", None)]
        }
        Identity::Bilinear => vec![("z_max", n(1.0))],
    }
}

/// Parses, resolves and runs one command.
pub fn run(cli: &Cli) -> Result<Report<RunConfig>> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Parameter(format!(
                "--tol must be positive and finite, got {t}"
            )));
        }
    }
    let raw = parse_params(cli.params.as_deref())?;
    match cli.command {
        Command::Convcheck => {
            if cli.family.is_some() {
                return Err(Error::Parameter(
                    "convcheck takes --identity, not --family".into(),
                ));
            }
            let identity = cli.identity.ok_or_else(|| {
                Error::Parameter(
                    "convcheck needs --identity conv1|conv1-inverse|conv2|conv2-inverse|bilinear"
                        .into(),
                )
            })?;
            let params = Params::resolve(&raw, &identity_keys(identity), "convcheck")?;
            convcheck(cli, identity, params)
        }
        command => {
            if cli.identity.is_some() {
                return Err(Error::Parameter(format!(
                    "{command:?} takes --family, not --identity"
                )));
            }
            if cli.draws.is_some() {
                return Err(Error::Parameter("--draws only applies to convcheck".into()));
            }
            let family = match (command, cli.family) {
                (_, Some(f)) => f,
                (Command::Coupling, None) => Family::Cg,
                _ => return Err(Error::Parameter(format!("{command:?} needs --family"))),
            };
            let params = Params::resolve(
                &raw,
                &family_keys(command, family)?,
                &format!("family {family:?}"),
            )?;
            match command {
                Command::Eval => eval(cli, family, params),
                Command::Gram => gram(cli, family, params),
                _ => coupling(cli, family, params),
            }
        }
    }
}

fn config(
    cli: &Cli,
    family: Option<Family>,
    identity: Option<Identity>,
    params: Params,
    nmax: usize,
    tol: f64,
) -> RunConfig {
    RunConfig {
        command: cli.command,
        family,
        identity,
        params: params.values,
        nmax,
        draws: None,
        seed: cli.seed,
        tol,
        format: cli.format,
    }
}

fn inputs(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn eval(cli: &Cli, family: Family, p: Params) -> Result<Report<RunConfig>> {
    let nmax = cli.nmax.unwrap_or(10);
    let tol = cli.tol.unwrap_or(EVAL_TOL);
    let x = p.num("x")?;
    let evaluator: Box<dyn Fn(usize, Method) -> Result<f64>> = match family {
        Family::Chihara => {
            let q = ChiharaParams::new(p.num("mu")?, p.num("gamma")?)?;
            Box::new(move |k, m| q.eval(k, x, m))
        }
        Family::BigJacobi => {
            let q = BigJacobiParams::new(p.num("a")?, p.num("b")?, p.num("c")?)?;
            Box::new(move |k, m| q.eval(k, x, m))
        }
        Family::DualHahn => {
            let q = DualHahnParams::new(p.num("eta")?, p.num("xi")?, p.int("N")?)?;
            if nmax > q.big_n {
                return Err(Error::Parameter(format!(
                    "dual -1 Hahn needs nmax <= N = {}, got {nmax}",
                    q.big_n
                )));
            }
            Box::new(move |k, m| q.eval(k, x, m))
        }
        Family::BannaiIto => {
            let q =
                BannaiItoParams::new(p.num("rho1")?, p.num("rho2")?, p.num("r1")?, p.num("r2")?)?;
            Box::new(move |k, m| q.eval(k, x, m))
        }
        _ => unreachable!("rejected by family_keys"),
    };
    let name = format!("eval:{}", family_name(family));
    let mut table = Table::new(&["n", "x", "recurrence", "closed", "delta"]);
    let mut entries = Vec::new();
    let mut scale: f64 = 0.0;
    for k in 0..=nmax {
        let r = evaluator(k, Method::Recurrence)?;
        let c = evaluator(k, Method::Closed)?;
        table.rows.push(vec![k as f64, x, r, c, r - c]);
        // relative to max_{m <= k} |P_m(x)|, since P_k itself can vanish at x
        scale = scale.max(r.abs()).max(c.abs());
        entries.push(ResidualReport::scaled(
            &name,
            inputs(&[("n", k as f64), ("x", x)]),
            r,
            c,
            scale,
            tol,
        ));
    }
    Ok(Report::new(
        config(cli, Some(family), None, p, nmax, tol),
        entries,
        Some(table),
        0,
    ))
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Chihara => "chihara",
        Family::BigJacobi => "big-jacobi",
        Family::DualHahn => "dual-hahn",
        Family::BannaiIto => "bannai-ito",
        Family::TwoVariable => "two-variable",
        Family::Cg => "cg",
        Family::Racah => "racah",
    }
}

/// Entries `n <= m` of a Gram matrix against `δ_nm e_n`, scaled by `√(e_n e_m)`.
fn gram_entries(
    name: &str,
    g: &nalgebra::DMatrix<f64>,
    expected: &[f64],
    tol: f64,
) -> Vec<ResidualReport> {
    let mut out = Vec::new();
    for i in 0..g.nrows() {
        for j in i..g.ncols() {
            let e = if i == j { expected[i] } else { 0.0 };
            let scale = (expected[i] * expected[j]).sqrt();
            out.push(ResidualReport::scaled(
                name,
                inputs(&[("n", i as f64), ("m", j as f64)]),
                g[(i, j)],
                e,
                scale,
                tol,
            ));
        }
    }
    out
}

fn gram(cli: &Cli, family: Family, p: Params) -> Result<Report<RunConfig>> {
    let name = format!("gram:{}", family_name(family));
    let (g, expected, nmax, tol) = match family {
        Family::Chihara | Family::BigJacobi => {
            let nmax = cli.nmax.unwrap_or(6);
            let cfg = quad_config(&p)?;
            let (g, expected) = if family == Family::Chihara {
                let q = ChiharaParams::new(p.num("mu")?, p.num("gamma")?)?;
                (chihara_gram(nmax, &q, &cfg)?, vec![1.0; nmax + 1])
            } else {
                let q = BigJacobiParams::new(p.num("a")?, p.num("b")?, p.num("c")?)?;
                let g = bigjacobi_gram(nmax, &q, &cfg)?;
                (
                    g,
                    (0..=nmax).map(|k| q.norm(k)).collect::<Result<Vec<_>>>()?,
                )
            };
            (g, expected, nmax, cli.tol.unwrap_or(CONTINUOUS_GRAM_TOL))
        }
        Family::DualHahn | Family::BannaiIto => {
            let big_n = p.int("N")?;
            let nmax = cli.nmax.unwrap_or(big_n);
            if nmax > big_n {
                return Err(Error::Parameter(format!(
                    "discrete Gram needs nmax <= N = {big_n}, got {nmax}"
                )));
            }
            let (data, g) = if family == Family::DualHahn {
                let q = DualHahnParams::new(p.num("eta")?, p.num("xi")?, big_n)?;
                let data = q.ortho()?;
                let g = data.gram(|x| Ok(q.eval_upto(big_n, x)))?;
                (data, g)
            } else {
                let q = BannaiItoParams::new(
                    p.num("rho1")?,
                    p.num("rho2")?,
                    p.num("r1")?,
                    p.num("r2")?,
                )?;
                let data = q.ortho(big_n)?;
                let g = data.gram(|x| q.eval_upto(big_n, x))?;
                (data, g)
            };
            let g = g.view((0, 0), (nmax + 1, nmax + 1)).into_owned();
            (
                g,
                data.norms[..=nmax].to_vec(),
                nmax,
                cli.tol.unwrap_or(DISCRETE_GRAM_TOL),
            )
        }
        Family::TwoVariable => {
            let nmax = cli.nmax.unwrap_or(2);
            let basis = match p.text("basis")? {
                "coupled" => TwoVarBasis::Coupled,
                "uncoupled" => TwoVarBasis::Uncoupled,
                other => {
                    return Err(Error::Parameter(format!(
                        "basis must be coupled or uncoupled, got '{other}'"
                    )))
                }
            };
            let reps = [p.irrep("mu1", "eps1")?, p.irrep("mu2", "eps2")?];
            let g = twovar_gram(nmax, p.num("c")?, reps, basis, &quad_config(&p)?)?;
            let size = twovar_labels(nmax, basis).len();
            (g, vec![1.0; size], nmax, cli.tol.unwrap_or(TWOVAR_GRAM_TOL))
        }
        _ => unreachable!("rejected by family_keys"),
    };
    let entries = gram_entries(&name, &g, &expected, tol);
    Ok(Report::new(
        config(cli, Some(family), None, p, nmax, tol),
        entries,
        None,
        0,
    ))
}

/// Entries of `M Mᵀ` against the identity.
fn orthogonality_entries(name: &str, m: &nalgebra::DMatrix<f64>, tol: f64) -> Vec<ResidualReport> {
    let g = m * m.transpose();
    gram_entries(name, &g, &vec![1.0; g.nrows()], tol)
}

fn coupling(cli: &Cli, family: Family, p: Params) -> Result<Report<RunConfig>> {
    let tol = cli.tol.unwrap_or(COUPLING_TOL);
    let (entries, table, nmax) = match family {
        Family::Cg => {
            let total = cli.nmax.unwrap_or(6);
            let m = cg_matrix(total, p.irrep("mu1", "eps1")?, p.irrep("mu2", "eps2")?)?;
            let mut table = Table::new(&["n1", "n2", "N", "j", "value"]);
            for n1 in 0..=total {
                for j in 0..=total {
                    table.rows.push(vec![
                        n1 as f64,
                        (total - n1) as f64,
                        (total - j) as f64,
                        j as f64,
                        m[(n1, j)],
                    ]);
                }
            }
            (
                orthogonality_entries("cg-orthogonality", &m, tol),
                table,
                total,
            )
        }
        Family::Racah => {
            let j123 = cli.nmax.unwrap_or(4);
            let t = RacahTable::new(p.num("mu1")?, p.num("mu2")?, p.num("mu3")?, j123)?;
            let m = t.matrix(p.sign("eps3")?)?;
            let mut table = Table::new(&["j12", "j23", "value"]);
            for j12 in 0..=j123 {
                for j23 in 0..=j123 {
                    table.rows.push(vec![j12 as f64, j23 as f64, m[(j12, j23)]]);
                }
            }
            (
                orthogonality_entries("racah-orthogonality", &m, tol),
                table,
                j123,
            )
        }
        _ => unreachable!("rejected by family_keys"),
    };
    Ok(Report::new(
        config(cli, Some(family), None, p, nmax, tol),
        entries,
        Some(table),
        0,
    ))
}

fn is_rejection(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::Pole(_))
}

/// One draw of `identity`, redrawing from the same stream on domain
/// violations. Returns the report and the number of rejections.
fn convcheck_draw(
    identity: Identity,
    p: &Params,
    nmax: usize,
    seed: u64,
    index: u64,
) -> Result<(ResidualReport, usize)> {
    let bx = DrawBox::default();
    let mut rng = draw_rng(seed, index);
    for rejected in 0..MAX_REDRAWS {
        let attempt = match identity {
            Identity::Conv1 | Identity::Conv1Inverse => {
                let (r1, r2) = (bx.irrep(&mut rng), bx.irrep(&mut rng));
                let pt = bx.point2(&mut rng);
                let (a_key, b_key) = if identity == Identity::Conv1 {
                    ("N", "j")
                } else {
                    ("n1", "n2")
                };
                let (a, b) = match (p.opt_int(a_key)?, p.opt_int(b_key)?) {
                    (Some(a), Some(b)) => (a, b),
                    (None, None) => {
                        let total = rng.random_range(0..=nmax);
                        let b = rng.random_range(0..=total);
                        (total - b, b)
                    }
                    _ => {
                        return Err(Error::Parameter(format!(
                            "fix both {a_key} and {b_key}, or neither"
                        )))
                    }
                };
                if identity == Identity::Conv1 {
                    conv1_residual(a, b, &pt, r1, r2)
                } else {
                    conv1_inverse_residual(a, b, &pt, r1, r2)
                }
            }
            Identity::Conv2 | Identity::Conv2Inverse => {
                let reps = [bx.irrep(&mut rng), bx.irrep(&mut rng), bx.irrep(&mut rng)];
                let pt = bx.point3(&mut rng);
                let j123 = match p.opt_int("j123")? {
                    Some(v) => v,
                    None => rng.random_range(0..=nmax),
                };
                let (j12, j23) = match (p.opt_int("j12")?, p.opt_int("j23")?) {
                    (Some(a), Some(b)) => (a, b),
                    (None, None) => (rng.random_range(0..=j123), rng.random_range(0..=j123)),
                    _ => return Err(Error::Parameter("fix both j12 and j23, or neither".into())),
                };
                let j123 = j123.max(j12).max(j23);
                let labels = ThreeFoldLabels::new(j12, j23, j123)?;
                let direction = if identity == Identity::Conv2 {
                    Direction::Forward
                } else {
                    Direction::Inverse
                };
                RacahTable::new(reps[0].mu, reps[1].mu, reps[2].mu, j123)
                    .and_then(|t| conv2_residual_with(&t, &labels, &pt, reps, direction))
            }
            Identity::Bilinear => {
                let (r1, r2) = (bx.irrep(&mut rng), bx.irrep(&mut rng));
                let pt = bx.point2(&mut rng);
                let z_max = p.num("z_max")?;
                if !(z_max > 0.0) {
                    return Err(Error::Parameter(format!(
                        "z_max must be positive, got {z_max}"
                    )));
                }
                let z1 = rng.random_range(-z_max..z_max);
                let z2 = rng.random_range(-z_max..z_max);
                bilinear_genfun_residual(&pt, z1, z2, r1, r2, nmax)
            }
        };
        match attempt {
            Ok(mut r) => {
                r.inputs.insert("draw".into(), index as f64);
                return Ok((r.with_seed(seed), rejected));
            }
            Err(e) if is_rejection(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Domain(format!(
        "draw {index} was rejected {MAX_REDRAWS} times"
    )))
}

fn convcheck(cli: &Cli, identity: Identity, p: Params) -> Result<Report<RunConfig>> {
    let (nmax, draws, tol) = match identity {
        Identity::Conv1 | Identity::Conv1Inverse => {
            (cli.nmax.unwrap_or(8), cli.draws.unwrap_or(50), CONV1_TOL)
        }
        Identity::Conv2 | Identity::Conv2Inverse => {
            (cli.nmax.unwrap_or(5), cli.draws.unwrap_or(30), CONV2_TOL)
        }
        Identity::Bilinear => (
            cli.nmax.unwrap_or(crate::identities::DEFAULT_JMAX),
            cli.draws.unwrap_or(50),
            BILINEAR_TOL,
        ),
    };
    let tol = cli.tol.unwrap_or(tol);
    let results = (0..draws as u64)
        .into_par_iter()
        .map(|i| convcheck_draw(identity, &p, nmax, cli.seed, i))
        .collect::<Result<Vec<_>>>()?;
    let rejected = results.iter().map(|(_, k)| k).sum();
    let entries = results.into_iter().map(|(r, _)| r.with_tol(tol)).collect();
    let mut cfg = config(cli, None, Some(identity), p, nmax, tol);
    cfg.draws = Some(draws);
    Ok(Report::new(cfg, entries, None, rejected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::parse_from(std::iter::once("m1poly").chain(args.iter().copied()))
    }

    #[test]
    fn params_parse_and_validate() {
        let raw = parse_params(Some("mu=0.5, gamma=-0.2")).unwrap();
        assert_eq!(raw["gamma"], "-0.2");
        assert!(parse_params(Some("mu")).is_err());
        assert!(parse_params(Some("mu=1,mu=2")).is_err());
        let err = run(&cli(&["eval", "--family", "chihara", "--params", "nu=1"])).unwrap_err();
        assert!(err.to_string().contains("allowed: mu, gamma, x"));
    }

    #[test]
    fn conv1_fixed_trivial_labels() {
        let r = run(&cli(&[
            "convcheck",
            "--identity",
            "conv1",
            "--params",
            "N=0,j=0",
            "--draws",
            "3",
        ]))
        .unwrap();
        assert!(r.all_pass());
        assert!(r.entries.iter().all(|e| e.abs_residual == 0.0));
    }

    #[test]
    fn coupling_trivial_cases() {
        let r = run(&cli(&["coupling", "--nmax", "0"])).unwrap();
        assert_eq!(r.table.unwrap().rows, vec![vec![0.0, 0.0, 0.0, 0.0, 1.0]]);
        let r = run(&cli(&["coupling", "--family", "racah", "--nmax", "0"])).unwrap();
        assert_eq!(r.table.unwrap().rows[0][2], 1.0);
    }
}
