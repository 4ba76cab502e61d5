//! Radial pair potentials and the scalar constants derived from them.
//!
//! A potential is a function of the separation `r > 0` that may take the
//! value `+∞` (hard cores). The stability constants `B` and `B̄` are not
//! computed here: they are inputs carried in [`StabilityData`]. Only the
//! well depth `B*` is computed.

pub mod catalog;
pub mod expr;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::{grid_then_golden_min, logspace};

pub use catalog::{catalog, lookup, CatalogEntry};
pub use expr::{Expr, ExprError, Piece, Piecewise};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("tail exponent {exponent} must exceed the dimension {dimension} for the potential to be regular")]
    NonIntegrableTail { exponent: f64, dimension: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential evaluates to NaN at r = {0}")]
    NotANumber(f64),
    #[error("inconsistent stability data: {0}")]
    InconsistentStability(String),
    #[error("unknown catalog potential '{0}'")]
    UnknownPotential(String),
    #[error("stability data for '{0}' is not known and must be supplied")]
    MissingStabilityData(String),
    #[error(transparent)]
    Expression(#[from] ExprError),
}

/// Behaviour of the potential as `r → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "radius")]
pub enum CoreBehavior {
    FiniteAtZero,
    DivergesToPlusInfinity,
    /// `v(r) = +∞` for `r < radius`.
    HardCore(f64),
}

#[derive(Clone)]
enum Shape {
    /// `r^-12 - 2 r^-6`, minimum `-1` at `r = 1`.
    LennardJones,
    HardSphere { radius: f64 },
    /// `+∞` below `core`, `-depth` on `[core, range)`, zero beyond.
    SquareWell { depth: f64, core: f64, range: f64 },
    /// `depth·(e^{-2a(r-r0)} - 2e^{-a(r-r0)})`, minimum `-depth` at `r0`.
    Morse { depth: f64, r0: f64, a: f64 },
    Piecewise(Piecewise),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::LennardJones => write!(f, "LennardJones"),
            Shape::HardSphere { radius } => write!(f, "HardSphere {{ radius: {radius} }}"),
            Shape::SquareWell { depth, core, range } => {
                write!(f, "SquareWell {{ depth: {depth}, core: {core}, range: {range} }}")
            }
            Shape::Morse { depth, r0, a } => write!(f, "Morse {{ depth: {depth}, r0: {r0}, a: {a} }}"),
            Shape::Piecewise(p) => write!(f, "Piecewise({p:?})"),
            Shape::Custom(_) => write!(f, "Custom(<fn>)"),
        }
    }
}

/// A radial pair potential `v(|x|)` on `ℝ^d`.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    name: String,
    shape: Shape,
    dimension: u32,
    tail_exponent: f64,
    core: CoreBehavior,
}

fn check_regular(dimension: u32, tail_exponent: f64) -> Result<(), PotentialError> {
    if dimension == 0 {
        return Err(PotentialError::InvalidDimension);
    }
    if tail_exponent.is_nan() || tail_exponent <= dimension as f64 {
        return Err(PotentialError::NonIntegrableTail { exponent: tail_exponent, dimension });
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<f64, PotentialError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(PotentialError::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

impl RadialPotential {
    /// The rescaled three-dimensional Lennard-Jones potential `r^-12 - 2r^-6`.
    pub fn lennard_jones() -> Self {
        RadialPotential {
            name: "lennard-jones-rescaled".into(),
            shape: Shape::LennardJones,
            dimension: 3,
            tail_exponent: 6.0,
            core: CoreBehavior::DivergesToPlusInfinity,
        }
    }

    pub fn hard_sphere(radius: f64) -> Result<Self, PotentialError> {
        let radius = positive("radius", radius)?;
        Ok(RadialPotential {
            name: format!("hard-sphere(a={radius})"),
            shape: Shape::HardSphere { radius },
            dimension: 3,
            tail_exponent: f64::INFINITY,
            core: CoreBehavior::HardCore(radius),
        })
    }

    pub fn square_well(depth: f64, core: f64, range: f64) -> Result<Self, PotentialError> {
        let depth = positive("depth", depth)?;
        let core = positive("core", core)?;
        let range = positive("range", range)?;
        if range <= core {
            return Err(PotentialError::InvalidParameter(format!(
                "well range {range} must exceed the core radius {core}"
            )));
        }
        Ok(RadialPotential {
            name: format!("square-well(eps={depth},a={core},R={range})"),
            shape: Shape::SquareWell { depth, core, range },
            dimension: 3,
            tail_exponent: f64::INFINITY,
            core: CoreBehavior::HardCore(core),
        })
    }

    pub fn morse(depth: f64, r0: f64, a: f64) -> Result<Self, PotentialError> {
        let depth = positive("depth", depth)?;
        let r0 = positive("r0", r0)?;
        let a = positive("a", a)?;
        Ok(RadialPotential {
            name: format!("morse(eps={depth},r0={r0},a={a})"),
            shape: Shape::Morse { depth, r0, a },
            dimension: 3,
            tail_exponent: f64::INFINITY,
            core: CoreBehavior::FiniteAtZero,
        })
    }

    /// A user-defined piecewise potential.
    ///
    /// The core behaviour is inferred: an infinite first piece is a hard core,
    /// otherwise the value just above zero decides between finite and
    /// diverging. The potential is scanned for NaN on a log grid.
    pub fn piecewise(
        name: impl Into<String>,
        pieces: Piecewise,
        dimension: u32,
        tail_exponent: f64,
    ) -> Result<Self, PotentialError> {
        check_regular(dimension, tail_exponent)?;
        let first = &pieces.pieces()[0];
        let core = match first.below {
            Some(b) if first.expr.eval(0.5 * b) == f64::INFINITY => CoreBehavior::HardCore(b),
            _ => infer_core(|r| pieces.eval(r)),
        };
        let p = RadialPotential {
            name: name.into(),
            shape: Shape::Piecewise(pieces),
            dimension,
            tail_exponent,
            core,
        };
        p.scan_for_nan()?;
        Ok(p)
    }

    /// Wrap an arbitrary function. `core` and `tail_exponent` are trusted.
    pub fn custom<F>(
        name: impl Into<String>,
        dimension: u32,
        tail_exponent: f64,
        core: CoreBehavior,
        f: F,
    ) -> Result<Self, PotentialError>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_regular(dimension, tail_exponent)?;
        let p = RadialPotential {
            name: name.into(),
            shape: Shape::Custom(Arc::new(f)),
            dimension,
            tail_exponent,
            core,
        };
        p.scan_for_nan()?;
        Ok(p)
    }

    fn scan_for_nan(&self) -> Result<(), PotentialError> {
        for r in logspace(1e-6, 1e4, 4000) {
            if self.evaluate(r).is_nan() {
                return Err(PotentialError::NotANumber(r));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }

    pub fn core(&self) -> CoreBehavior {
        self.core
    }

    pub fn hard_core_radius(&self) -> Option<f64> {
        match self.core {
            CoreBehavior::HardCore(a) => Some(a),
            _ => None,
        }
    }

    /// `v(r)` for `r > 0`; may be `+∞`.
    pub fn evaluate(&self, r: f64) -> f64 {
        if let CoreBehavior::HardCore(a) = self.core {
            if r < a {
                return f64::INFINITY;
            }
        }
        match &self.shape {
            Shape::LennardJones => {
                let s6 = (r * r * r).powi(-2);
                s6 * s6 - 2.0 * s6
            }
            Shape::HardSphere { .. } => 0.0,
            Shape::SquareWell { depth, range, .. } => {
                if r < *range {
                    -depth
                } else {
                    0.0
                }
            }
            Shape::Morse { depth, r0, a } => {
                let e = (-a * (r - r0)).exp();
                depth * (e * e - 2.0 * e)
            }
            Shape::Piecewise(p) => p.eval(r),
            Shape::Custom(f) => f(r),
        }
    }

    /// `v⁻(r) = (|v(r)| - v(r))/2`.
    pub fn negative_part(&self, r: f64) -> f64 {
        let v = self.evaluate(r);
        if v < 0.0 {
            -v
        } else {
            0.0
        }
    }

    /// `min_{|x|=α} v(x)`, which for a radial potential is `v(α)`.
    pub fn v_alpha(&self, alpha: f64) -> f64 {
        self.evaluate(alpha)
    }

    /// Radii where the potential is known to be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::HardSphere { radius } => vec![*radius],
            Shape::SquareWell { core, range, .. } => vec![*core, *range],
            Shape::Piecewise(p) => p.boundaries(),
            _ => self.hard_core_radius().into_iter().collect(),
        }
    }

    /// Well depth in closed form, when the shape has one.
    pub fn closed_form_b_star(&self) -> Option<f64> {
        match &self.shape {
            Shape::LennardJones => Some(1.0),
            Shape::HardSphere { .. } => Some(0.0),
            Shape::SquareWell { depth, .. } => Some(*depth),
            Shape::Morse { depth, .. } => Some(*depth),
            Shape::Piecewise(_) | Shape::Custom(_) => None,
        }
    }

    /// Smallest radius at which the potential is finite.
    pub(crate) fn support_start(&self) -> f64 {
        self.hard_core_radius().unwrap_or(0.0)
    }
}

fn infer_core(v: impl Fn(f64) -> f64) -> CoreBehavior {
    let near_zero = v(1e-9);
    if near_zero == f64::INFINITY || near_zero > 1e6 {
        CoreBehavior::DivergesToPlusInfinity
    } else {
        CoreBehavior::FiniteAtZero
    }
}

/// `B* = sup_r v⁻(r)`: closed form for catalog shapes, otherwise
/// [`numeric_b_star`].
pub fn compute_b_star(p: &RadialPotential) -> f64 {
    p.closed_form_b_star().unwrap_or_else(|| numeric_b_star(p))
}

/// `B*` by a log-spaced grid scan (10⁴ points) followed by golden-section
/// minimisation of `v` to relative tolerance 1e-10.
///
/// A first scan over `[lo, 10³]` locates the minimum roughly; the second
/// scan covers `[lo, 10·r_min]`. Returns 0 when `v ≥ 0` everywhere.
pub fn numeric_b_star(p: &RadialPotential) -> f64 {
    const POINTS: usize = 10_000;
    let lo = p.hard_core_radius().unwrap_or(1e-3);
    let v = |r: f64| p.evaluate(r);

    let coarse = logspace(lo, 1e3, POINTS);
    let (r_est, _) = coarse
        .iter()
        .map(|&r| (r, v(r)))
        .fold((lo, f64::INFINITY), |acc, (r, y)| if y < acc.1 { (r, y) } else { acc });
    let hi = (10.0 * r_est).max(lo * 10.0);
    let fine = logspace(lo, hi, POINTS);
    let (_, v_min) = grid_then_golden_min(v, &fine, 1e-10 * r_est);
    if v_min < 0.0 {
        -v_min
    } else {
        0.0
    }
}

/// Literature-sourced stability constants of a potential.
///
/// `b_lower ≤ B ≤ b_upper`, `B̄ ≤ bbar_upper`, and `b_star = B*` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityData {
    pub b_lower: f64,
    pub b_upper: f64,
    pub bbar_upper: f64,
    pub b_star: f64,
}

impl StabilityData {
    /// Validates the hard ordering `0 ≤ b_lower ≤ b_upper ≤ bbar_upper` and
    /// `b_star ≥ 0`.
    pub fn new(b_lower: f64, b_upper: f64, bbar_upper: f64, b_star: f64) -> Result<Self, PotentialError> {
        let sd = StabilityData { b_lower, b_upper, bbar_upper, b_star };
        sd.validate()?;
        Ok(sd)
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        let all = [self.b_lower, self.b_upper, self.bbar_upper, self.b_star];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(PotentialError::InconsistentStability("all constants must be finite".into()));
        }
        if self.b_lower < 0.0 || self.b_star < 0.0 {
            return Err(PotentialError::InconsistentStability(
                "b_lower and b_star must be non-negative".into(),
            ));
        }
        if self.b_lower > self.b_upper {
            return Err(PotentialError::InconsistentStability(format!(
                "b_lower {} exceeds b_upper {}",
                self.b_lower, self.b_upper
            )));
        }
        if self.b_upper > self.bbar_upper {
            return Err(PotentialError::InconsistentStability(format!(
                "b_upper {} exceeds bbar_upper {} (B <= B-bar always)",
                self.b_upper, self.bbar_upper
            )));
        }
        Ok(())
    }

    /// A lower bound on `B̄`: `B̄ ≥ B ≥ b_lower`, and `B̄ ≥ 2B*` for `d ≥ 3`,
    /// `B̄ ≥ (3/2)B*` for `d = 2` and `B̄ ≥ B*` for `d = 1`.
    pub fn bbar_lower(&self, dimension: u32) -> f64 {
        let k = match dimension {
            1 => 1.0,
            2 => 1.5,
            _ => 2.0,
        };
        self.b_lower.max(k * self.b_star)
    }

    /// Soft consistency checks that depend on the dimension.
    ///
    /// `negative_beyond_minimum` asserts the potential reaches its minimum at
    /// some `r0` and is negative for all `r > r0`; only then is the sharper
    /// `(2d(d-1)+1)/(2d(d-1))` ratio checked.
    pub fn warnings(&self, dimension: u32, negative_beyond_minimum: bool) -> Vec<String> {
        let d = dimension as f64;
        let mut out = Vec::new();
        let ratio = (d + 1.0) / d;
        if self.bbar_upper > ratio * self.b_upper {
            out.push(format!(
                "bbar_upper {} exceeds (d+1)/d * b_upper = {}",
                self.bbar_upper,
                ratio * self.b_upper
            ));
        }
        if negative_beyond_minimum && dimension >= 3 {
            let k = 2.0 * d * (d - 1.0);
            let sharp = (k + 1.0) / k;
            if self.bbar_upper > sharp * self.b_upper {
                out.push(format!(
                    "bbar_upper {} exceeds (2d(d-1)+1)/(2d(d-1)) * b_upper = {}",
                    self.bbar_upper,
                    sharp * self.b_upper
                ));
            }
        }
        if self.bbar_upper > 0.0 && self.b_star > self.bbar_upper {
            out.push(format!("b_star {} exceeds bbar_upper {}", self.b_star, self.bbar_upper));
        }
        if dimension >= 3 && self.bbar_upper < 2.0 * self.b_star {
            out.push(format!(
                "bbar_upper {} is below 2 * b_star = {} (B-bar >= 2B* in d >= 3)",
                self.bbar_upper,
                2.0 * self.b_star
            ));
        } else if dimension == 2 && self.bbar_upper < 1.5 * self.b_star {
            out.push(format!(
                "bbar_upper {} is below 1.5 * b_star = {} (B-bar >= 3B*/2 in d = 2)",
                self.bbar_upper,
                1.5 * self.b_star
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn negative_part_examples() {
        let lj = RadialPotential::lennard_jones();
        assert_eq!(lj.negative_part(1.0), 1.0);
        assert_eq!(lj.negative_part(0.5), 0.0);
        let sw = RadialPotential::square_well(0.7, 1.0, 1.5).unwrap();
        assert_eq!(sw.negative_part(1.2), 0.7);
        assert_eq!(sw.negative_part(2.0), 0.0);
    }

    #[test]
    fn v_alpha_examples() {
        let lj = RadialPotential::lennard_jones();
        let a: f64 = 0.6397;
        let want = 1.0 / a.powi(12) - 2.0 / a.powi(6);
        assert!((lj.v_alpha(a) - want).abs() < 1e-12 * want);
        assert!(lj.v_alpha(2f64.powf(-1.0 / 6.0)).abs() < 1e-12);
        let hs = RadialPotential::hard_sphere(1.0).unwrap();
        assert_eq!(hs.v_alpha(0.5), f64::INFINITY);
        assert_eq!(hs.v_alpha(1.0), 0.0);
    }

    #[test]
    fn b_star_closed_forms() {
        assert_eq!(compute_b_star(&RadialPotential::lennard_jones()), 1.0);
        assert_eq!(compute_b_star(&RadialPotential::hard_sphere(1.0).unwrap()), 0.0);
    }

    #[test]
    fn numeric_b_star_matches_morse_minimum() {
        // Minimum of depth·(e^{-2a(r-r0)} - 2e^{-a(r-r0)}) is -depth at r0.
        let m = RadialPotential::morse(2.5, 1.3, 2.0).unwrap();
        let b = numeric_b_star(&m);
        assert!((b - 2.5).abs() < 1e-8 * 2.5, "{b}");
    }

    #[test]
    fn numeric_b_star_of_nonnegative_potential_is_zero() {
        let soft = RadialPotential::custom("gauss", 3, f64::INFINITY, CoreBehavior::FiniteAtZero, |r| {
            (-r * r).exp()
        })
        .unwrap();
        assert_eq!(numeric_b_star(&soft), 0.0);
    }

    #[test]
    fn piecewise_infers_hard_core() {
        let pw = Piecewise::new(vec![
            Piece { below: Some(1.0), expr: Expr::parse("inf").unwrap() },
            Piece { below: None, expr: Expr::parse("-exp(-r)").unwrap() },
        ])
        .unwrap();
        let p = RadialPotential::piecewise("yukawa-core", pw, 3, f64::INFINITY).unwrap();
        assert_eq!(p.core(), CoreBehavior::HardCore(1.0));
        assert!((numeric_b_star(&p) - (-1.0f64).exp()).abs() < 1e-10);

        let pw = Piecewise::new(vec![Piece { below: None, expr: Expr::parse("r^-12 - 2*r^-6").unwrap() }]).unwrap();
        let p = RadialPotential::piecewise("lj", pw, 3, 6.0).unwrap();
        assert_eq!(p.core(), CoreBehavior::DivergesToPlusInfinity);
    }

    #[test]
    fn rejects_non_regular_tail_and_nan() {
        let pw = Piecewise::new(vec![Piece { below: None, expr: Expr::parse("-r^-3").unwrap() }]).unwrap();
        assert!(matches!(
            RadialPotential::piecewise("coulombish", pw, 3, 3.0),
            Err(PotentialError::NonIntegrableTail { .. })
        ));
        let pw = Piecewise::new(vec![Piece { below: None, expr: Expr::parse("ln(r - 1)").unwrap() }]).unwrap();
        assert!(matches!(RadialPotential::piecewise("bad", pw, 3, 6.0), Err(PotentialError::NotANumber(_))));
    }

    #[test]
    fn stability_ordering_enforced() {
        assert!(StabilityData::new(8.61, 14.316, 14.331, 1.0).is_ok());
        assert!(StabilityData::new(15.0, 14.316, 14.331, 1.0).is_err());
        assert!(StabilityData::new(8.61, 14.4, 14.331, 1.0).is_err());
        assert!(StabilityData::new(-1.0, 14.316, 14.331, 1.0).is_err());
    }

    #[test]
    fn stability_warnings() {
        let lj = StabilityData::new(8.61, 14.316, 14.331, 1.0).unwrap();
        assert!(lj.warnings(3, true).is_empty());
        let loose = StabilityData::new(1.0, 1.0, 2.0, 0.5).unwrap();
        let w = loose.warnings(3, false);
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("(d+1)/d"));
        let shallow = StabilityData::new(1.0, 1.0, 1.2, 1.0).unwrap();
        assert!(shallow.warnings(3, false).iter().any(|w| w.contains("2 * b_star")));
        // 1.2 <= 4/3 but > 13/12
        assert!(shallow.warnings(3, true).iter().any(|w| w.contains("2d(d-1)")));
    }

    proptest! {
        #[test]
        fn negative_part_identity(r in 0.3f64..20.0) {
            for p in [RadialPotential::lennard_jones(), RadialPotential::morse(1.0, 1.0, 3.0).unwrap()] {
                let v = p.evaluate(r);
                let n = p.negative_part(r);
                prop_assert!(n >= 0.0);
                prop_assert!((2.0 * n + v - v.abs()).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
