//! Certification of the Basuev condition and the choice of `α`.
//!
//! A regular potential is Basuev at `α` when `v(x) ≥ v_α > 0` for all
//! `|x| ≤ α` and `v_α > 2μ_v(α)`, where `μ_v(α)` is the largest total
//! attraction a particle at the origin can feel from configurations whose
//! points are pairwise more than `α` apart. `μ_v(α)` itself is never
//! computed; callers supply an upper bound through [`MuBound`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::{linspace, logspace};
use crate::potentials::{RadialPotential, StabilityData};
use crate::quadrature::{c_breve_terms, CBreve, QuadratureError};

/// Domain of the Lennard-Jones `μ` bound.
pub const LJ_MU_ALPHA_RANGE: (f64, f64) = (0.6, 0.7);
const LJ_MU_COEFFICIENT: f64 = 24.05;
const CORE_SCAN_POINTS: usize = 10_000;
const SELECT_GRID_POINTS: usize = 64;
const SELECT_REFINEMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotBasuevReason {
    /// `v_α ≤ 2μ(α)`.
    Margin,
    /// The grid scan found `v(r) < v_α` for some `r ≤ α`.
    MonotonicityScan,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasuevError {
    #[error("alpha = {alpha} outside [{lo}, {hi}], the domain of the mu bound")]
    AlphaOutOfRange { alpha: f64, lo: f64, hi: f64 },
    #[error("potential is not Basuev at alpha = {alpha} ({reason:?})")]
    NotBasuevAtAlpha { alpha: f64, reason: NotBasuevReason },
    #[error("no admissible alpha in [{lo}, {hi}]")]
    NoAdmissibleAlpha { lo: f64, hi: f64 },
    #[error("alpha = {alpha} must exceed the hard-core radius {core}")]
    AlphaOutsideSupport { alpha: f64, core: f64 },
    #[error("mu bound must be a non-negative finite number, got {0}")]
    InvalidMuBound(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuSource {
    LjYuhjtman,
    UserSupplied,
}

/// An upper bound on `μ_v(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuBound {
    /// `24.05/α³`, valid for the rescaled Lennard-Jones potential on
    /// `α ∈ [0.6, 0.7]`.
    LennardJones,
    /// A fixed bound supplied by the user, assumed valid for every `α` tried.
    Constant(f64),
}

impl MuBound {
    pub fn at(&self, alpha: f64) -> Result<f64, BasuevError> {
        match *self {
            MuBound::LennardJones => mu_upper_bound_lj(alpha),
            MuBound::Constant(mu) if mu >= 0.0 && mu.is_finite() => Ok(mu),
            MuBound::Constant(mu) => Err(BasuevError::InvalidMuBound(mu)),
        }
    }

    pub fn source(&self) -> MuSource {
        match self {
            MuBound::LennardJones => MuSource::LjYuhjtman,
            MuBound::Constant(_) => MuSource::UserSupplied,
        }
    }
}

/// `μ_LJ(α) ≤ 24.05/α³` for `α ∈ [0.6, 0.7]`.
pub fn mu_upper_bound_lj(alpha: f64) -> Result<f64, BasuevError> {
    let (lo, hi) = LJ_MU_ALPHA_RANGE;
    if !(lo..=hi).contains(&alpha) {
        return Err(BasuevError::AlphaOutOfRange { alpha, lo, hi });
    }
    Ok(LJ_MU_COEFFICIENT / alpha.powi(3))
}

/// Evidence that a potential is Basuev at `alpha`.
///
/// The core condition is checked on a 10⁴-point grid, so it is numerically
/// verified rather than proven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasuevCertificate {
    pub alpha: f64,
    pub v_alpha: f64,
    pub mu_bound: f64,
    /// `v_α - 2μ(α)`, always positive.
    pub margin: f64,
    pub mu_source: MuSource,
}

impl BasuevCertificate {
    /// A Basuev potential is stable with `B ≤ μ(α)/2`.
    pub fn stability_upper_bound(&self) -> f64 {
        0.5 * self.mu_bound
    }

    /// Warns when the stability data contradict `B ≤ μ(α)/2`.
    pub fn stability_warning(&self, sd: &StabilityData) -> Option<String> {
        (sd.b_lower > self.stability_upper_bound()).then(|| {
            format!(
                "b_lower {} exceeds mu(alpha)/2 = {}, contradicting the Basuev stability bound",
                sd.b_lower,
                self.stability_upper_bound()
            )
        })
    }
}

/// Check both Basuev conditions at `alpha`.
pub fn certify(p: &RadialPotential, alpha: f64, mu: &MuBound) -> Result<BasuevCertificate, BasuevError> {
    let core = p.hard_core_radius().unwrap_or(0.0);
    if !(alpha > core) {
        return Err(BasuevError::AlphaOutsideSupport { alpha, core });
    }
    let mu_bound = mu.at(alpha)?;
    let v_alpha = p.v_alpha(alpha);
    let margin = v_alpha - 2.0 * mu_bound;
    // mu_bound ≥ 0, so a positive margin also gives v_α > 0.
    if !(margin > 0.0) {
        return Err(BasuevError::NotBasuevAtAlpha { alpha, reason: NotBasuevReason::Margin });
    }
    let lo = if core > 0.0 { core + (alpha - core) * 1e-9 } else { alpha * 1e-6 };
    let dips = logspace(lo, alpha, CORE_SCAN_POINTS)
        .into_iter()
        .any(|r| !(p.evaluate(r) >= v_alpha));
    if dips {
        return Err(BasuevError::NotBasuevAtAlpha { alpha, reason: NotBasuevReason::MonotonicityScan });
    }
    Ok(BasuevCertificate { alpha, v_alpha, mu_bound, margin, mu_source: mu.source() })
}

/// Pick the admissible `α` in `[lo, hi]` with the smallest `C̆_v(β)`.
///
/// Scans 64 evenly spaced values, then makes three halving steps around the
/// best one. Grid points that fail certification are skipped.
pub fn select_alpha(
    p: &RadialPotential,
    beta: f64,
    bbar: f64,
    interval: (f64, f64),
    mu: &MuBound,
    tol: f64,
) -> Result<(BasuevCertificate, CBreve), BasuevError> {
    let (lo, hi) = interval;
    if !(lo <= hi) {
        return Err(BasuevError::NoAdmissibleAlpha { lo, hi });
    }
    mu.at(lo)?;
    mu.at(hi)?;

    let evaluate = |alpha: f64| -> Result<Option<(BasuevCertificate, CBreve)>, BasuevError> {
        match certify(p, alpha, mu) {
            Ok(cert) => Ok(Some((cert, c_breve_terms(p, beta, alpha, bbar, tol)?))),
            Err(BasuevError::NotBasuevAtAlpha { .. }) | Err(BasuevError::AlphaOutsideSupport { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let n = if lo == hi { 1 } else { SELECT_GRID_POINTS };
    let grid = linspace(lo, hi, n);
    let scanned: Vec<_> = grid.par_iter().map(|&a| evaluate(a)).collect::<Result<_, _>>()?;
    let mut best = scanned
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.1.value() < a.1.value() { b } else { a })
        .ok_or(BasuevError::NoAdmissibleAlpha { lo, hi })?;

    let mut step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    for _ in 0..SELECT_REFINEMENTS {
        step *= 0.5;
        if step == 0.0 {
            break;
        }
        for alpha in [best.0.alpha - step, best.0.alpha + step] {
            if alpha < lo || alpha > hi {
                continue;
            }
            if let Some(cand) = evaluate(alpha)? {
                if cand.1.value() < best.1.value() {
                    best = cand;
                }
            }
        }
    }
    Ok(best)
}
