use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use strichartz_core::audit::{self, AuditConfig, SuiteReport, AUDIT_TOLERANCE};
use strichartz_core::certify::{self, RationalCertificate, Row, Verdict, DEFAULT_LCUT};
use strichartz_core::energy::{self, Component, SphereState};
use strichartz_core::harmonics::{CoeffField, MultiIndex};
use strichartz_core::penrose::{self, QuadratureOrders, RadialProfile};
use strichartz_core::quadform;

use crate::formats::{
    read_json, to_csv, CertificateJson, DeficitJson, Envelope, GapJson, MarginJson, ProfileJson, SphereStateJson,
    SuiteJson, TaylorJson, TaylorPointJson,
};
use crate::{BlockArg, CliError, Format, Outcome, Shared};

pub const DEFAULT_CONSTANT: &str = "36/85";
pub const GAP_LMAX: u32 = 200;
pub const GAP_MMAX: i64 = 10;
pub const DEFICIT_LMAX: u32 = 20;

fn render<C: Serialize, R: Serialize>(envelope: &Envelope<C, R>) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(envelope).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parse_constant(text: &str) -> Result<BigRational, CliError> {
    text.trim().parse::<BigRational>().map_err(|e| CliError::Usage(format!("--C {text}: {e}")))
}

fn mmax_of(shared: &Shared, default: i64) -> Result<u32, CliError> {
    let m = shared.mmax.unwrap_or(default);
    u32::try_from(m).map_err(|_| CliError::Usage(format!("empty block request: --mmax {m} is negative")))
}

fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct CertifyConfig {
    #[serde(rename = "C")]
    constant: String,
    lcut: u32,
    blocks: Vec<String>,
}

#[derive(Serialize)]
struct CertifyResult {
    verdict: &'static str,
    certificates: Vec<CertificateJson>,
}

#[derive(Serialize)]
struct CertifyCsvRow {
    block: String,
    #[serde(rename = "C")]
    constant: String,
    l: u32,
    m1: u32,
    kind: &'static str,
    exact: Option<String>,
    lo: Option<f64>,
    hi: Option<f64>,
    value: f64,
}

fn binding_row(certs: &[RationalCertificate]) -> Option<(Component, &Row)> {
    certs
        .iter()
        .flat_map(|c| c.failing_rows().map(move |r| (c.block, r)))
        .min_by(|a, b| a.1.margin.value().partial_cmp(&b.1.margin.value()).unwrap_or(Ordering::Equal))
}

pub fn certify(shared: &Shared, block: Option<BlockArg>) -> Result<Outcome, CliError> {
    let c = parse_constant(shared.constant.as_deref().unwrap_or(DEFAULT_CONSTANT))?;
    let lcut = shared.lcut.unwrap_or(DEFAULT_LCUT);
    let blocks = match block {
        Some(BlockArg::F0) => vec![Component::F0],
        Some(BlockArg::F1) => vec![Component::F1],
        None => vec![Component::F0, Component::F1],
    };
    let certs = blocks
        .iter()
        .map(|&b| certify::dominance_check(b, &c, lcut))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = if certs.iter().any(|x| x.verdict == Verdict::Falsified) {
        Verdict::Falsified
    } else if certs.iter().all(|x| x.verdict == Verdict::Certified) {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    };
    let json: Vec<CertificateJson> = certs.iter().map(CertificateJson::from_certificate).collect();
    let output = match shared.format {
        Format::Json => {
            let config = CertifyConfig { constant: c.to_string(), lcut, blocks: blocks.iter().map(ToString::to_string).collect() };
            render(&Envelope::new("certify", shared.seed, config, CertifyResult { verdict: verdict.name(), certificates: json }))?
        }
        Format::Csv => {
            let rows: Vec<CertifyCsvRow> = json
                .iter()
                .flat_map(|cert| {
                    cert.rows.iter().map(move |r| {
                        let (exact, lo, hi) = match &r.margin {
                            MarginJson::Exact(q) => (Some(q.clone()), None, None),
                            MarginJson::Interval([lo, hi]) => (None, Some(*lo), Some(*hi)),
                        };
                        CertifyCsvRow {
                            block: cert.block.clone(),
                            constant: cert.c.clone(),
                            l: r.l,
                            m1: r.m1,
                            kind: r.kind,
                            exact,
                            lo,
                            hi,
                            value: r.value,
                        }
                    })
                })
                .collect();
            to_csv(&rows)?
        }
    };
    let (code, message) = match verdict {
        Verdict::Certified => (0, None),
        Verdict::Falsified => {
            let msg = match binding_row(&certs) {
                Some((b, r)) => format!(
                    "falsified: {b} row (l={}, m1={}) has margin {:.6e}",
                    r.ell,
                    r.m1,
                    r.margin.value()
                ),
                None => {
                    let tails: Vec<String> =
                        certs.iter().filter(|x| !x.tail.holds()).map(|x| format!("{} tail", x.block)).collect();
                    format!("falsified: {}", tails.join(", "))
                }
            };
            (1, Some(msg))
        }
        Verdict::Inconclusive => (2, Some(String::from("inconclusive: interval rows straddle zero"))),
    };
    Ok(Outcome { output, status: code, message })
}

#[derive(Serialize)]
struct GapConfig {
    lmax: u32,
    mmax: u32,
}

#[derive(Serialize)]
struct GapResult {
    blocks: Vec<GapJson>,
    minimum: Option<GapJson>,
}

pub fn gap(shared: &Shared) -> Result<Outcome, CliError> {
    let lmax = shared.lmax.unwrap_or(GAP_LMAX);
    let mmax = mmax_of(shared, GAP_MMAX)?;
    let mut rows = Vec::new();
    for block in [Component::F0, Component::F1] {
        for m1 in 0..=mmax.min(lmax) {
            rows.push(GapJson::from_report(&certify::spectral_gap(block, m1, lmax)?));
        }
    }
    let output = match shared.format {
        Format::Json => {
            let minimum = rows
                .iter()
                .min_by(|a, b| a.lambda_min.partial_cmp(&b.lambda_min).unwrap_or(Ordering::Equal))
                .cloned();
            render(&Envelope::new("gap", shared.seed, GapConfig { lmax, mmax }, GapResult { blocks: rows, minimum }))?
        }
        Format::Csv => to_csv(&rows)?,
    };
    Ok(Outcome { output, status: 0, message: None })
}

#[derive(Serialize)]
struct DeficitConfig {
    lmax: u32,
    #[serde(rename = "nT")]
    n_t: usize,
    #[serde(rename = "nX")]
    n_x: usize,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<Vec<f64>>,
}

fn load_profiles(paths: &[PathBuf]) -> Result<[Option<RadialProfile>; 2], CliError> {
    let mut out: [Option<RadialProfile>; 2] = [None, None];
    for path in paths {
        let spec: ProfileJson = read_json(path)?;
        let profile = spec.to_profile()?;
        let slot = match profile.component {
            Component::F0 => 0,
            Component::F1 => 1,
        };
        if out[slot].is_some() {
            return Err(CliError::Usage(format!("two profiles for component {}", profile.component)));
        }
        out[slot] = Some(profile);
    }
    Ok(out)
}

fn input_name(paths: &[PathBuf], state: Option<&Path>) -> String {
    match state {
        Some(p) => format!("state {}", p.display()),
        None if paths.is_empty() => String::from("default"),
        None => {
            let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            format!("profile {}", names.join(","))
        }
    }
}

pub fn deficit(
    shared: &Shared,
    profiles: &[PathBuf],
    state: Option<&Path>,
    taylor: bool,
    eps: &[f64],
) -> Result<Outcome, CliError> {
    let lmax = shared.lmax.unwrap_or(DEFICIT_LMAX);
    let defaults = QuadratureOrders::for_lmax(lmax);
    let orders = QuadratureOrders { n_t: shared.n_t.unwrap_or(defaults.n_t), n_x: shared.n_x.unwrap_or(defaults.n_x) };
    let custom_orders = shared.n_t.is_some() || shared.n_x.is_some();
    let loaded = load_profiles(profiles)?;
    let x = match state {
        Some(path) => {
            let s: SphereStateJson = read_json(path)?;
            s.to_state().map_err(|e| match e {
                CliError::Field(f, m) => CliError::Parse { path: path.to_path_buf(), message: format!("field `{f}`: {m}") },
                other => other,
            })?
        }
        None if profiles.is_empty() => {
            if taylor {
                let f0 = CoeffField::unit(MultiIndex::zonal(2), lmax.max(2))?;
                SphereState::from_f0(f0)
            } else {
                return Err(CliError::Usage(String::from("deficit needs --profile or --state")));
            }
        }
        None => penrose::radial_state(loaded[0].as_ref(), loaded[1].as_ref(), lmax, orders.n_x)?,
    };
    let config = DeficitConfig {
        lmax,
        n_t: orders.n_t,
        n_x: orders.n_x,
        input: input_name(profiles, state),
        eps: taylor.then(|| eps.to_vec()),
    };
    if taylor {
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(CliError::Usage(String::from("--eps values must be positive")));
        }
        let g = energy::project_tilde(&x);
        let report = penrose::taylor_experiment(&g, eps, custom_orders.then_some(orders))?;
        let json = TaylorJson::from_report(&report);
        let output = match shared.format {
            Format::Json => render(&Envelope::new("deficit", shared.seed, config, json))?,
            Format::Csv => to_csv::<TaylorPointJson>(&json.points)?,
        };
        return Ok(Outcome { output, status: 0, message: None });
    }
    let report = penrose::deficit(&x, orders)?;
    let json = DeficitJson::from_report(&report);
    // a negative deficit beyond the quadrature error contradicts the sharp inequality
    let violated = json.relative_deficit < -1e-8 && report.deficit.abs() > 10.0 * report.quadrature_residual;
    let message = violated.then(|| format!("negative deficit {:.6e}", report.deficit));
    let output = match shared.format {
        Format::Json => render(&Envelope::new("deficit", shared.seed, config, json))?,
        Format::Csv => to_csv(&[json])?,
    };
    Ok(Outcome { output, status: status(!violated), message })
}

#[derive(Serialize)]
struct AuditConfigJson {
    lmax: u32,
    mmax: u32,
    recurrence_lmax: u32,
    samples: usize,
    #[serde(skip_serializing_if = "is_zero")]
    norm_perturbation: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Serialize)]
struct AuditResult {
    passed: bool,
    suites: Vec<SuiteJson>,
}

fn random_tilde_state(rng: &mut ChaCha8Rng, lmax: u32, mmax: u32) -> SphereState {
    let lmax = rng.gen_range(2..=lmax.max(2));
    let mut f0 = CoeffField::new(lmax);
    let mut f1 = CoeffField::new(lmax);
    for _ in 0..rng.gen_range(1..=3) {
        let m1 = rng.gen_range(0..=lmax.min(mmax) as i32);
        let m2 = rng.gen_range(0..=m1);
        let m3 = rng.gen_range(0..=m2);
        let m4 = rng.gen_range(-m3..=m3);
        for ell in m1 as u32..=lmax {
            let Ok(k) = MultiIndex::new(ell, [m1, m2, m3, m4]) else { continue };
            let decay = 1.0 / (1.0 + f64::from(ell));
            let _ = f0.set(k, rng.gen_range(-1.0..1.0) * decay * decay);
            let _ = f1.set(k, rng.gen_range(-1.0..1.0) * decay);
        }
    }
    energy::project_tilde(&SphereState::new(f0, f1))
}

/// Seeded comparison of the block form against the spacetime and the
/// trigonometric evaluation of `Q`.
pub fn dual_path_suite(seed: u64, samples: usize, lmax: u32, mmax: u32) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, String::from("none"));
    for i in 0..samples {
        let x = random_tilde_state(&mut rng, lmax.min(16), mmax);
        let direct = quadform::q_form(&x)?;
        let scale = direct.abs().max(energy::h_norm_sq(&x)).max(f64::MIN_POSITIVE);
        for (route, other) in [("spacetime", quadform::q_form_via_spacetime(&x)?), ("fourier", quadform::q_form_general(&x))] {
            let dev = (other - direct).abs() / scale;
            if !(dev <= worst.0) {
                worst = (dev, format!("sample {i} via {route}"));
            }
        }
    }
    Ok(SuiteReport {
        name: String::from("dual-path"),
        checks: 2 * samples,
        max_deviation: worst.0,
        tolerance: AUDIT_TOLERANCE,
        worst: worst.1,
        passed: worst.0 <= AUDIT_TOLERANCE,
    })
}

pub fn audit(shared: &Shared, samples: usize, perturb_norm: f64) -> Result<Outcome, CliError> {
    let defaults = AuditConfig::default();
    let cfg = AuditConfig {
        lmax: shared.lmax.unwrap_or(defaults.lmax),
        mmax: mmax_of(shared, i64::from(defaults.mmax))?,
        recurrence_lmax: defaults.recurrence_lmax,
        norm_perturbation: perturb_norm,
    };
    let mut report = audit::run_audit(&cfg)?;
    report.suites.push(dual_path_suite(shared.seed, samples, cfg.lmax, cfg.mmax)?);
    let passed = report.passed();
    let suites = SuiteJson::from_audit(&report);
    let message = (!passed).then(|| {
        let failed: Vec<String> =
            suites.iter().filter(|s| !s.passed).map(|s| format!("{} ({:.3e} at {})", s.name, s.max_deviation, s.worst)).collect();
        format!("audit failed: {}", failed.join("; "))
    });
    let output = match shared.format {
        Format::Json => {
            let config = AuditConfigJson {
                lmax: cfg.lmax,
                mmax: cfg.mmax,
                recurrence_lmax: cfg.recurrence_lmax,
                samples,
                norm_perturbation: cfg.norm_perturbation,
            };
            render(&Envelope::new("audit", shared.seed, config, AuditResult { passed, suites }))?
        }
        Format::Csv => to_csv(&suites)?,
    };
    Ok(Outcome { output, status: status(passed), message })
}

#[cfg(test)]
mod tests {
    use super::*;
    use strichartz_core::certify::Margin;

    #[test]
    fn constants_parse() {
        assert_eq!(parse_constant("36/85").unwrap().to_string(), "36/85");
        assert_eq!(parse_constant("72/170").unwrap().to_string(), "36/85");
        assert!(parse_constant("0.4").is_err());
    }

    #[test]
    fn dual_path_agrees() {
        let s = dual_path_suite(7, 10, 8, 3).unwrap();
        assert!(s.passed, "{s:?}");
        assert_eq!(s.checks, 20);
    }

    #[test]
    fn binding_row_is_most_negative() {
        let c = parse_constant("1/2").unwrap();
        let certs = vec![certify::dominance_check(Component::F0, &c, 10).unwrap()];
        let (_, r) = binding_row(&certs).unwrap();
        assert_eq!((r.ell, r.m1), (2, 0));
        assert!(matches!(r.margin, Margin::Exact(_)));
    }
}
