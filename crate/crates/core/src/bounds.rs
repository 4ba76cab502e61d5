//! Lower bounds for the convergence radii of the Mayer and virial series.
//!
//! Every radius is a lower bound, so each stability constant enters in the
//! direction that can only shrink the result: the exponential prefactors use
//! `b_upper`/`bbar_upper`, the F-functions use the lower bound on `B̄`, the
//! denominator of `R_Bas` uses `C̆` at the lower `B̄` and the ratio inside
//! `F̆` uses `C̆` at `bbar_upper`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basuev::BasuevCertificate;
use crate::optimize::{grid_then_golden_min, linspace};
use crate::potentials::StabilityData;
use crate::quadrature::PotentialConstants;

const UNIT_GRID_POINTS: usize = 10_000;
const UNIT_LO: f64 = 1e-6;
const UNIT_HI: f64 = 1.0 - 1e-6;
/// Golden-section stopping width on `w`.
pub const UNIT_XTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("missing constant {0}")]
    MissingConstant(&'static str),
}

/// Maximise `g` over `(0, 1)`: 10⁴-point grid on `[1e-6, 1 - 1e-6]`, then
/// golden-section refinement to `|Δw| < 1e-10`. Returns `(w*, g(w*))`.
pub fn maximize_unit_interval<G: Fn(f64) -> f64>(g: G) -> (f64, f64) {
    maximize_unit_interval_with_tol(g, UNIT_XTOL)
}

pub fn maximize_unit_interval_with_tol<G: Fn(f64) -> f64>(g: G, xtol: f64) -> (f64, f64) {
    let grid = linspace(UNIT_LO, UNIT_HI, UNIT_GRID_POINTS);
    let (w, neg) = grid_then_golden_min(|w| -g(w), &grid, xtol);
    (w, -neg)
}

/// `max_w w[2e^{-w} + c1·w e^{-2w} + c2·w² e^{-3w} - 1]` over `(0, 1)`.
pub fn f_bracket(c1: f64, c2: f64) -> f64 {
    bracket(c1, c2, UNIT_XTOL)
}

fn bracket(c1: f64, c2: f64, xtol: f64) -> f64 {
    maximize_unit_interval_with_tol(
        |w| w * (2.0 * (-w).exp() + c1 * w * (-2.0 * w).exp() + c2 * w * w * (-3.0 * w).exp() - 1.0),
        xtol,
    )
    .1
}

/// `F(s) = max_w [(1 + e^{2s})e^{-w} - 1]·w/e^{2s}`.
pub fn f_lp(s: f64) -> f64 {
    lp(s, UNIT_XTOL)
}

fn lp(s: f64, xtol: f64) -> f64 {
    let q = (-2.0 * s).exp();
    maximize_unit_interval_with_tol(|w| ((q + 1.0) * (-w).exp() - q) * w, xtol).1
}

/// `F*` with coefficients `1 - e^{-β(B̄-B*)}` and
/// `(3/2)(1 - e^{-2β(B̄-(3/2)B*)})`.
pub fn f_star(beta: f64, bbar: f64, b_star: f64) -> f64 {
    star(beta, bbar, b_star, UNIT_XTOL)
}

fn star(beta: f64, bbar: f64, b_star: f64, xtol: f64) -> f64 {
    let c1 = -(-beta * (bbar - b_star)).exp_m1();
    let c2 = -1.5 * (-2.0 * beta * (bbar - 1.5 * b_star)).exp_m1();
    bracket(c1, c2, xtol)
}

/// `F̆` with coefficients `1 - e^{-β(B̄-B*)}·ρ` and
/// `(3/2)(1 - e^{-β(2B̄-3B*)}·ρ²)`, `ρ = C̃/C̆`. No floor is applied.
pub fn f_breve(beta: f64, bbar: f64, b_star: f64, c_tilde: f64, c_breve: f64) -> f64 {
    breve(beta, bbar, b_star, c_tilde / c_breve, UNIT_XTOL)
}

fn breve(beta: f64, bbar: f64, b_star: f64, ratio: f64, xtol: f64) -> f64 {
    let c1 = 1.0 - (-beta * (bbar - b_star)).exp() * ratio;
    let c2 = 1.5 * (1.0 - (-beta * (2.0 * bbar - 3.0 * b_star)).exp() * ratio * ratio);
    bracket(c1, c2, xtol)
}

/// `Σ_{n=1}^{N} n^{n-1}/n!·(we^{-w})^n`, with terms formed in log space.
pub fn euler_tree_partial_sum(w: f64, n_terms: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let log_x = w.ln() - w;
    let mut log_fact = 0.0;
    let mut terms = Vec::with_capacity(n_terms);
    for n in 1..=n_terms {
        let nf = n as f64;
        log_fact += nf.ln();
        terms.push(((nf - 1.0) * nf.ln() - log_fact + nf * log_x).exp());
    }
    terms.iter().rev().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MayerRadii {
    pub penrose_ruelle: f64,
    pub tree_graph: f64,
    pub basuev: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialRadii {
    pub lebowitz_penrose: f64,
    pub stable_variant: f64,
    pub stab: f64,
    pub basuev: Option<f64>,
    /// `max{stab, basuev}`.
    pub best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FValues {
    /// `F(βB)`.
    pub f_lp: f64,
    pub f_star: f64,
    pub f_breve: Option<f64>,
}

/// Values plugged in for `B` and `B̄` when forming radii.
#[derive(Debug, Clone, Copy)]
struct Plug {
    b: f64,
    bbar_exp: f64,
    bbar_f: f64,
    xtol: f64,
}

impl Plug {
    fn conservative(sd: &StabilityData, d: u32, xtol: f64) -> Self {
        Plug { b: sd.b_upper, bbar_exp: sd.bbar_upper, bbar_f: sd.bbar_lower(d), xtol }
    }

    fn optimistic(sd: &StabilityData, d: u32, xtol: f64) -> Self {
        let bbar = sd.bbar_lower(d);
        Plug { b: sd.b_lower, bbar_exp: bbar, bbar_f: bbar, xtol }
    }
}

/// `(C̆ upper, C̆ floor)` when a certified `α` is available.
fn breve_pair(pc: &PotentialConstants, cert: Option<&BasuevCertificate>) -> Result<Option<(f64, f64)>, BoundsError> {
    let Some(_) = cert else { return Ok(None) };
    let upper = pc.c_breve.ok_or(BoundsError::MissingConstant("C_breve"))?.value();
    let floor = pc.c_breve_floor.map_or(upper, |c| c.value());
    Ok(Some((upper, floor)))
}

// Radii are formed as logarithms so that tiny values stay comparable even
// when their exponentials underflow.
fn ln_mayer(plug: Plug, pc: &PotentialConstants, breve: Option<(f64, f64)>) -> MayerRadii {
    let beta = pc.beta;
    MayerRadii {
        penrose_ruelle: -2.0 * beta * plug.b - 1.0 - pc.c_regular.value.ln(),
        tree_graph: -beta * plug.b - 1.0 - pc.c_tilde.value.ln(),
        basuev: breve.map(|(upper, _)| -beta * plug.bbar_exp - 1.0 - upper.ln()),
    }
}

fn f_values_with(plug: Plug, sd: &StabilityData, pc: &PotentialConstants, breve_pair: Option<(f64, f64)>) -> FValues {
    let beta = pc.beta;
    FValues {
        f_lp: lp(beta * plug.b, plug.xtol),
        f_star: star(beta, plug.bbar_f, sd.b_star, plug.xtol),
        f_breve: breve_pair.map(|(_, floor)| breve(beta, plug.bbar_f, sd.b_star, pc.c_tilde.value / floor, plug.xtol)),
    }
}

fn ln_virial(plug: Plug, pc: &PotentialConstants, f: &FValues, breve: Option<(f64, f64)>) -> VirialRadii {
    let beta = pc.beta;
    let decay = -beta * plug.bbar_exp;
    let ln_ct = pc.c_tilde.value.ln();
    let stab = f.f_star.ln() + decay - ln_ct;
    let basuev = breve.zip(f.f_breve).map(|((upper, _), fb)| fb.ln() + decay - upper.ln());
    VirialRadii {
        lebowitz_penrose: f.f_lp.ln() - 2.0 * beta * plug.b - pc.c_regular.value.ln(),
        stable_variant: lp(0.0, plug.xtol).ln() + decay - ln_ct,
        stab,
        basuev,
        best: basuev.map_or(stab, |b| b.max(stab)),
    }
}

impl MayerRadii {
    fn exp(self) -> Self {
        MayerRadii {
            penrose_ruelle: self.penrose_ruelle.exp(),
            tree_graph: self.tree_graph.exp(),
            basuev: self.basuev.map(f64::exp),
        }
    }
}

impl VirialRadii {
    fn exp(self) -> Self {
        VirialRadii {
            lebowitz_penrose: self.lebowitz_penrose.exp(),
            stable_variant: self.stable_variant.exp(),
            stab: self.stab.exp(),
            basuev: self.basuev.map(f64::exp),
            best: self.best.exp(),
        }
    }
}

/// `R_PR`, `R_TG` and, with a certificate, `R_Ba`.
pub fn mayer_radii(
    sd: &StabilityData,
    pc: &PotentialConstants,
    cert: Option<&BasuevCertificate>,
) -> Result<MayerRadii, BoundsError> {
    let breve = breve_pair(pc, cert)?;
    Ok(ln_mayer(Plug::conservative(sd, pc.dimension, UNIT_XTOL), pc, breve).exp())
}

/// `R_LP`, `R_SV`, `R_stab`, `R_Bas` when certified, and their best.
pub fn virial_radii(
    sd: &StabilityData,
    pc: &PotentialConstants,
    cert: Option<&BasuevCertificate>,
) -> Result<VirialRadii, BoundsError> {
    let breve = breve_pair(pc, cert)?;
    let plug = Plug::conservative(sd, pc.dimension, UNIT_XTOL);
    let f = f_values_with(plug, sd, pc, breve);
    Ok(ln_virial(plug, pc, &f, breve).exp())
}

/// Radii recomputed with `b_lower` and the lower bound on `B̄` in the
/// exponentials. For display only; these are not certified lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimisticBand {
    pub mayer: MayerRadii,
    pub virial: VirialRadii,
}

/// All radius bounds at one `β` together with their inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub beta: f64,
    pub mayer: MayerRadii,
    pub virial: VirialRadii,
    /// Natural logarithms of `mayer`, finite even where the radii underflow.
    pub ln_mayer: MayerRadii,
    /// Natural logarithms of `virial`.
    pub ln_virial: VirialRadii,
    pub f_values: FValues,
    pub optimistic: OptimisticBand,
    pub stability: StabilityData,
    pub constants: PotentialConstants,
    pub certificate: Option<BasuevCertificate>,
}

impl BoundsReport {
    pub fn new(
        sd: &StabilityData,
        pc: &PotentialConstants,
        cert: Option<&BasuevCertificate>,
    ) -> Result<Self, BoundsError> {
        Self::with_optimizer_tol(sd, pc, cert, UNIT_XTOL)
    }

    /// As [`BoundsReport::new`] with golden-section width `xtol` in the
    /// F-function maximisations.
    pub fn with_optimizer_tol(
        sd: &StabilityData,
        pc: &PotentialConstants,
        cert: Option<&BasuevCertificate>,
        xtol: f64,
    ) -> Result<Self, BoundsError> {
        let breve = breve_pair(pc, cert)?;
        let plug = Plug::conservative(sd, pc.dimension, xtol);
        let f_values = f_values_with(plug, sd, pc, breve);
        let ln_mayer = ln_mayer(plug, pc, breve);
        let ln_virial = ln_virial(plug, pc, &f_values, breve);
        let opt = Plug::optimistic(sd, pc.dimension, xtol);
        let opt_f = f_values_with(opt, sd, pc, breve);
        Ok(BoundsReport {
            beta: pc.beta,
            mayer: ln_mayer.exp(),
            virial: ln_virial.exp(),
            ln_mayer,
            ln_virial,
            f_values,
            optimistic: OptimisticBand {
                mayer: self::ln_mayer(opt, pc, breve).exp(),
                virial: self::ln_virial(opt, pc, &opt_f, breve).exp(),
            },
            stability: *sd,
            constants: *pc,
            certificate: cert.copied(),
        })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use super::*;

    #[test]
    fn maximize_examples() {
        let (_, g) = maximize_unit_interval(|w| w * (2.0 * (-w).exp() - 1.0));
        assert!((g - 0.144767).abs() < 1e-6, "{g}");
        let (w, g) = maximize_unit_interval(|w| -(w - 0.5) * (w - 0.5));
        assert!((w - 0.5).abs() < 1e-9 && g.abs() < 1e-15);
        let (_, g) = maximize_unit_interval(|w| {
            w * (2.0 * (-w).exp() + w * (-2.0 * w).exp() + 1.5 * w * w * (-3.0 * w).exp() - 1.0)
        });
        assert!((g - 0.241857).abs() < 1e-5, "{g}");
    }

    #[test]
    fn f_lp_limits() {
        assert!((f_lp(0.0) - 0.144767).abs() < 1e-6);
        assert!((f_lp(50.0) - 1.0 / E).abs() < 1e-6);
        let mid = f_lp(1.0);
        assert!(mid > 0.144767 && mid < 1.0 / E);
    }

    #[test]
    fn f_lp_at_one_matches_dense_grid() {
        let q = (-2.0f64).exp();
        let dense = (1..=1_000_000)
            .map(|i| i as f64 / 1_000_001.0)
            .map(|w| ((q + 1.0) * (-w).exp() - q) * w)
            .fold(f64::MIN, f64::max);
        assert!((f_lp(1.0) - dense).abs() < 1e-10);
    }

    #[test]
    fn f_star_examples() {
        assert!((f_star(0.0, 8.61, 1.0) - 0.144767).abs() < 1e-6);
        assert!((f_star(100.0, 8.61, 1.0) - 0.241857).abs() < 1e-4);
        assert!(f_star(1.0, 8.61, 1.0) >= 0.2418);
    }

    #[test]
    fn f_breve_examples() {
        assert!(f_breve(1.0, 8.61, 1.0, 9.2, 4.3) >= 0.2417);
        // With β = 0 and C̃ = C̆ the bracket reduces to w(2e^{-w} - 1).
        assert!((f_breve(0.0, 8.61, 1.0, 1.0, 1.0) - 0.144767).abs() < 1e-6);
        assert!(f_bracket(-5.0, -5.0) > 0.0);
    }

    #[test]
    fn euler_partial_sums() {
        assert_eq!(euler_tree_partial_sum(0.0, 50), 0.0);
        assert!((euler_tree_partial_sum(0.5, 200) - 0.5).abs() < 1e-10);
        for w in [0.1, 0.3, 0.5] {
            assert!((euler_tree_partial_sum(w, 500) - w).abs() < 1e-10);
        }
    }

    #[test]
    fn euler_boundary_matches_stirling_tail() {
        // At w = 1 the terms behave like n^{-3/2}/√(2π), so the tail beyond N
        // is about 2/√(2πN).
        let n = 10_000;
        let gap = 1.0 - euler_tree_partial_sum(1.0, n);
        let tail = 2.0 / (2.0 * std::f64::consts::PI * n as f64).sqrt();
        assert!((gap - tail).abs() < 1e-3 * tail, "{gap} vs {tail}");
    }
}
