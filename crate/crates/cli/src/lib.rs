//! Configuration-driven front end: evaluates constants, certificates, radius
//! bounds and optional coefficient checks over a grid of inverse temperatures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use virial_bounds::basuev::{certify, select_alpha};
use virial_bounds::oracle::{
    c2, c3, check_bounds, triangle, virial_b2, virial_b3, BoundCheckReport, CoefficientEstimate, OracleConfig,
    OracleError, TriangleEstimate,
};
use virial_bounds::quadrature::c_breve_terms;
use virial_bounds::{BasuevCertificate, BoundsReport, PotentialConstants};

use config::{AlphaPolicy, RunConfig};

/// Coefficients and bound checks at one `β`.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub c2: CoefficientEstimate,
    pub c3: CoefficientEstimate,
    pub b2: CoefficientEstimate,
    pub b3: CoefficientEstimate,
    pub triangle: TriangleEstimate,
    pub triangle_monte_carlo: Option<TriangleEstimate>,
    pub checks: Vec<BoundCheckReport>,
}

#[derive(Debug, Clone)]
pub struct BetaResult {
    pub report: BoundsReport,
    pub oracle: Option<OracleOutcome>,
    pub warnings: Vec<String>,
}

/// Evaluate every `β` of the configuration, in parallel, returning results
/// in grid order. The first failure in grid order is returned.
pub fn evaluate(cfg: &RunConfig) -> Result<Vec<BetaResult>> {
    cfg.beta_values
        .par_iter()
        .map(|&beta| evaluate_beta(cfg, beta).with_context(|| format!("at beta = {beta}")))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn certificate(cfg: &RunConfig, beta: f64, pc: PotentialConstants) -> Result<(Option<BasuevCertificate>, PotentialConstants)> {
    let p = &cfg.potential;
    let sd = &cfg.stability;
    let bbar_lower = sd.bbar_lower(p.dimension());
    let (cert, upper) = match cfg.alpha {
        AlphaPolicy::None => return Ok((None, pc)),
        AlphaPolicy::Fixed { value } => {
            let cert = certify(p, value, &cfg.mu_bound).with_context(|| format!("Basuev certificate at alpha = {value}"))?;
            let upper = c_breve_terms(p, beta, value, bbar_lower, cfg.tol).context("C_breve")?;
            (cert, upper)
        }
        AlphaPolicy::Search { lo, hi } => select_alpha(p, beta, bbar_lower, (lo, hi), &cfg.mu_bound, cfg.tol)
            .with_context(|| format!("Basuev alpha search on [{lo}, {hi}]"))?,
    };
    let floor = c_breve_terms(p, beta, cert.alpha, sd.bbar_upper, cfg.tol).context("C_breve at bbar_upper")?;
    Ok((Some(cert), pc.with_c_breve_band(upper, floor)))
}

fn evaluate_beta(cfg: &RunConfig, beta: f64) -> Result<BetaResult> {
    let p = &cfg.potential;
    let sd = &cfg.stability;
    let pc = PotentialConstants::compute(p, beta, cfg.tol).context("regularity constants")?;
    let (cert, pc) = certificate(cfg, beta, pc)?;
    let report = BoundsReport::with_optimizer_tol(sd, &pc, cert.as_ref(), cfg.optimizer_tol).context("radius bounds")?;

    let mut warnings = sd.warnings(p.dimension(), cfg.negative_beyond_minimum);
    if let Some(w) = cert.as_ref().and_then(|c| c.stability_warning(sd)) {
        warnings.push(w);
    }
    let oracle = if cfg.oracle { Some(run_oracle(cfg, beta, &pc, cert.as_ref())?) } else { None };
    Ok(BetaResult { report, oracle, warnings })
}

fn run_oracle(
    cfg: &RunConfig,
    beta: f64,
    pc: &PotentialConstants,
    cert: Option<&BasuevCertificate>,
) -> Result<OracleOutcome, OracleError> {
    let p = &cfg.potential;
    let mc_cfg = OracleConfig { tol: cfg.tol, samples: cfg.samples, seed: cfg.seed };
    let (tri, tri_mc) = triangle(p, beta, &mc_cfg)?;
    // The cross-check has run; the coefficients reuse the quadrature alone.
    let quad_cfg = OracleConfig { samples: 0, ..mc_cfg };
    let c2v = c2(p, beta, cfg.tol)?;
    let c3v = c3(p, beta, &quad_cfg)?;
    let checks = vec![
        check_bounds(&c2v, &cfg.stability, pc, cert)?,
        check_bounds(&c3v, &cfg.stability, pc, cert)?,
    ];
    Ok(OracleOutcome {
        c2: c2v,
        c3: c3v,
        b2: virial_b2(p, beta, cfg.tol)?,
        b3: virial_b3(p, beta, &quad_cfg)?,
        triangle: tri,
        triangle_monte_carlo: tri_mc,
        checks,
    })
}

/// Process exit code for an error: 2 for a coefficient exceeding a bound,
/// 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let violation = err
        .chain()
        .any(|e| matches!(e.downcast_ref::<OracleError>(), Some(OracleError::BoundViolation { .. })));
    if violation {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Sweep,
}

/// Evaluate `cfg` and render the report. Returns the rendered report and
/// the human-readable summary lines.
pub fn execute(cfg: &RunConfig, mode: Mode) -> Result<(String, Vec<String>)> {
    if mode == Mode::Sweep && cfg.beta_values.len() < 2 {
        bail!("a sweep needs at least 2 beta values, got {}", cfg.beta_values.len());
    }
    let results = evaluate(cfg)?;
    let refs = report::compare_references(cfg, &results);
    let default = if mode == Mode::Sweep { config::Format::Csv } else { config::Format::Json };
    let body = match cfg.format.unwrap_or(default) {
        config::Format::Json => report::json(cfg, &results, &refs)?,
        config::Format::Csv => report::csv(&results)?,
    };
    Ok((body, report::summary(cfg, &results, &refs)))
}
