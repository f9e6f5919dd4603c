//! JSON and CSV shapes of everything that crosses the command line.

use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use strichartz_core::audit::{AuditReport, SuiteReport};
use strichartz_core::certify::{Criterion, GapReport, Margin, RationalCertificate, Row, RowKind};
use strichartz_core::energy::{Component, SphereState};
use strichartz_core::harmonics::{CoeffField, MultiIndex};
use strichartz_core::penrose::{DeficitReport, ProfileKind, RadialProfile, TaylorReport};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub l: u32,
    pub m: [i32; 4],
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffFieldJson {
    pub lmax: u32,
    pub entries: Vec<EntryJson>,
}

impl CoeffFieldJson {
    pub fn from_field(f: &CoeffField) -> Self {
        CoeffFieldJson {
            lmax: f.lmax(),
            entries: f.iter().map(|(k, v)| EntryJson { l: k.ell, m: k.m, value: *v }).collect(),
        }
    }

    pub fn to_field(&self) -> Result<CoeffField, CliError> {
        let mut f = CoeffField::new(self.lmax);
        for (i, e) in self.entries.iter().enumerate() {
            let k = MultiIndex::new(e.l, e.m).map_err(|err| CliError::Field(format!("entries[{i}]"), err.to_string()))?;
            f.set(k, e.value).map_err(|err| CliError::Field(format!("entries[{i}]"), err.to_string()))?;
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereStateJson {
    pub f0: CoeffFieldJson,
    pub f1: CoeffFieldJson,
}

impl SphereStateJson {
    pub fn from_state(s: &SphereState) -> Self {
        SphereStateJson { f0: CoeffFieldJson::from_field(&s.f0), f1: CoeffFieldJson::from_field(&s.f1) }
    }

    pub fn to_state(&self) -> Result<SphereState, CliError> {
        let f0 = self.f0.to_field().map_err(|e| e.within("f0"))?;
        let f1 = self.f1.to_field().map_err(|e| e.within("f1"))?;
        Ok(SphereState::new(f0, f1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentJson {
    F0,
    F1,
}

impl From<ComponentJson> for Component {
    fn from(c: ComponentJson) -> Self {
        match c {
            ComponentJson::F0 => Component::F0,
            ComponentJson::F1 => Component::F1,
        }
    }
}

/// Profile parameters, selected by `kind`.
///
/// * `maximiser`: no parameters, `4 (1 + r^2)^{-2}`.
/// * `rational`: `amplitude (1 + (r/scale)^2)^{-power}`.
/// * `gaussian`: `amplitude exp(-(r/width)^2)`.
/// * `bump`: `amplitude exp(1 - 1/(1 - (r/radius)^2))` on `r < radius`.
/// * `table`: piecewise-linear samples, `radii[0] = 0`, zero past the end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum ShapeJson {
    Maximiser,
    Rational { amplitude: f64, scale: f64, power: f64 },
    Gaussian { amplitude: f64, width: f64 },
    Bump { amplitude: f64, radius: f64 },
    Table { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileJson {
    #[serde(flatten)]
    pub shape: ShapeJson,
    pub component: ComponentJson,
}

impl ProfileJson {
    pub fn to_profile(&self) -> Result<RadialProfile, CliError> {
        let kind = match self.shape.clone() {
            ShapeJson::Maximiser => ProfileKind::Maximiser,
            ShapeJson::Rational { amplitude, scale, power } => ProfileKind::Rational { amplitude, scale, power },
            ShapeJson::Gaussian { amplitude, width } => ProfileKind::Gaussian { amplitude, width },
            ShapeJson::Bump { amplitude, radius } => ProfileKind::Bump { amplitude, radius },
            ShapeJson::Table { radii, values } => ProfileKind::Table { radii, values },
        };
        RadialProfile::new(kind, self.component.into()).map_err(|e| CliError::Field("params".into(), e.to_string()))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginJson {
    /// `p/q`, to be divided by `pi`.
    Exact(String),
    Interval([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowJson {
    pub l: u32,
    pub m1: u32,
    pub kind: &'static str,
    pub margin: MarginJson,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailJson {
    pub from_l: u32,
    pub poly: Vec<String>,
    pub criterion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<u32>,
    pub identity_residual: String,
    pub b_sign: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionJson {
    pub a_increases: bool,
    pub b_decreases: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateJson {
    pub block: String,
    #[serde(rename = "C")]
    pub c: String,
    pub margin_units: &'static str,
    pub checked_range: [u32; 2],
    pub rows: Vec<RowJson>,
    pub reduction: ReductionJson,
    pub tail: TailJson,
    pub verdict: &'static str,
}

fn kind_name(k: RowKind) -> &'static str {
    match k {
        RowKind::Bottom => "bottom",
        RowKind::Interior => "interior",
        RowKind::Base => "base",
    }
}

fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

impl RowJson {
    pub fn from_row(r: &Row) -> Self {
        let margin = match &r.margin {
            Margin::Exact(q) => MarginJson::Exact(rational_string(q)),
            Margin::Interval(i) => MarginJson::Interval([i.lo(), i.hi()]),
        };
        RowJson { l: r.ell, m1: r.m1, kind: kind_name(r.kind), margin, value: r.margin.value() }
    }
}

impl CertificateJson {
    pub fn from_certificate(c: &RationalCertificate) -> Self {
        let shift = match c.tail.criterion {
            Criterion::ShiftedAllCoeffsPositive { shift } => Some(shift),
            _ => None,
        };
        CertificateJson {
            block: c.block.to_string(),
            c: rational_string(&c.constant_c),
            margin_units: "1/pi",
            checked_range: [c.rows.iter().map(|r| r.ell).min().unwrap_or(c.lmin), c.lcut],
            rows: c.rows.iter().map(RowJson::from_row).collect(),
            reduction: ReductionJson { a_increases: c.reduction.a_increases, b_decreases: c.reduction.b_decreases },
            tail: TailJson {
                from_l: c.tail.from_ell,
                poly: c.tail.poly.iter().map(ToString::to_string).collect(),
                criterion: c.tail.criterion.name(),
                shift,
                identity_residual: c.tail.identity_residual.to_string(),
                b_sign: c.tail.b_sign.name(),
            },
            verdict: c.verdict.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapJson {
    pub block: String,
    pub m1: u32,
    pub lmax: u32,
    pub dimension: usize,
    pub lambda_min: f64,
    pub residual: f64,
}

impl GapJson {
    pub fn from_report(g: &GapReport) -> Self {
        GapJson {
            block: g.block.to_string(),
            m1: g.m1,
            lmax: g.lmax,
            dimension: g.dimension,
            lambda_min: g.lambda_min,
            residual: g.residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitJson {
    pub h_norm_sq: f64,
    pub l4_fourth_power: f64,
    pub deficit: f64,
    /// `8 pi deficit / |x|_H^2`.
    pub relative_deficit: f64,
    #[serde(rename = "nT")]
    pub n_t: usize,
    #[serde(rename = "nX")]
    pub n_x: usize,
    pub quadrature_residual: f64,
}

impl DeficitJson {
    pub fn from_report(d: &DeficitReport) -> Self {
        DeficitJson {
            h_norm_sq: d.h_norm_sq,
            l4_fourth_power: d.l4_fourth_power,
            deficit: d.deficit,
            relative_deficit: 8.0 * std::f64::consts::PI * d.deficit / d.h_norm_sq,
            n_t: d.orders.n_t,
            n_x: d.orders.n_x,
            quadrature_residual: d.quadrature_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorPointJson {
    pub epsilon: f64,
    pub deficit: f64,
    pub remainder: f64,
    pub sandwich_ratio: f64,
    pub hessian_ratio: f64,
    pub dropped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorJson {
    pub q_form: f64,
    pub h_norm_sq: f64,
    /// `8 pi Q(g) / |g|_H^2`.
    pub q_ratio: f64,
    /// Small-`epsilon` limit of the sandwich ratio.
    pub limiting_sandwich_ratio: f64,
    pub slope: Option<f64>,
    pub points: Vec<TaylorPointJson>,
}

impl TaylorJson {
    pub fn from_report(t: &TaylorReport) -> Self {
        TaylorJson {
            q_form: t.q_form,
            h_norm_sq: t.h_norm_sq,
            q_ratio: t.q_ratio(),
            limiting_sandwich_ratio: t.limiting_sandwich_ratio(),
            slope: t.slope,
            points: t
                .points
                .iter()
                .map(|p| TaylorPointJson {
                    epsilon: p.epsilon,
                    deficit: p.deficit,
                    remainder: p.remainder,
                    sandwich_ratio: p.sandwich_ratio,
                    hessian_ratio: p.hessian_ratio,
                    dropped: p.dropped,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteJson {
    pub name: String,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub worst: String,
    pub passed: bool,
}

impl SuiteJson {
    pub fn from_suite(s: &SuiteReport) -> Self {
        SuiteJson {
            name: s.name.clone(),
            checks: s.checks,
            max_deviation: s.max_deviation,
            tolerance: s.tolerance,
            worst: s.worst.clone(),
            passed: s.passed,
        }
    }

    pub fn from_audit(a: &AuditReport) -> Vec<Self> {
        a.suites.iter().map(SuiteJson::from_suite).collect()
    }
}

/// Top-level wrapper of every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: C,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    pub fn new(command: &'static str, seed: u64, config: C, result: R) -> Self {
        Envelope { tool: "strichartz", version: env!("CARGO_PKG_VERSION"), command, seed, config, result }
    }
}

/// Writes `records` as CSV with a header row.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
