//! Improper radial integrals and the regularity-type constants
//! `C_v(β)`, `C̃_v(β)` and `C̆_v(β)`.
//!
//! Integration is globally adaptive 21-point Gauss-Kronrod. The domain
//! `(0, ∞)` is split at user breakpoints, at the hard-core radius and at
//! the zeros of `v` (where `|v|` has a kink), and the piece beyond a cutoff
//! radius is mapped onto a finite interval by `u = 1/r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::logspace;
use crate::potentials::{CoreBehavior, RadialPotential};

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Lower integration limit for potentials that diverge at the origin.
pub const DIVERGENT_CORE_START: f64 = 1e-6;
const MAX_SUBDIVISIONS: usize = 4000;
const CUTOFF_MAX: f64 = 1e3;
const CUTOFF_NEGLIGIBLE: f64 = 1e-14;
const ZERO_SCAN_POINTS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("tolerance not met after {subdivisions} subdivisions (value {value}, error estimate {error})")]
    ToleranceNotMet { value: f64, error: f64, subdivisions: usize },
    #[error("tail exponent {exponent} does not exceed dimension {dimension}: integral diverges")]
    NonIntegrableTail { exponent: f64, dimension: u32 },
    #[error("alpha = {alpha} lies inside the hard core of radius {core}")]
    AlphaOutsideSupport { alpha: f64, core: f64 },
    #[error("integrand produced NaN at r = {0}")]
    NotANumber(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A quadrature value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
}

impl IntegralResult {
    fn sum(a: IntegralResult, b: IntegralResult) -> IntegralResult {
        IntegralResult {
            value: a.value + b.value,
            abs_error_estimate: a.abs_error_estimate + b.abs_error_estimate,
            subdivisions: a.subdivisions + b.subdivisions,
        }
    }

    fn scaled(self, k: f64) -> IntegralResult {
        IntegralResult {
            value: k * self.value,
            abs_error_estimate: k.abs() * self.abs_error_estimate,
            subdivisions: self.subdivisions,
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One Gauss-Kronrod 21 pass over `[a, b]`; returns `(value, error)`.
/// The error uses the QUADPACK rescaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    #[allow(clippy::needless_range_loop)]
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    Identity,
    /// `r = 1/u`, `dr = du/u²`; the interval is in `u`.
    Inverse,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    map: Map,
    value: f64,
    error: f64,
}

fn mapped<F: Fn(f64) -> f64>(f: &F, map: Map) -> impl Fn(f64) -> f64 + '_ {
    move |x| match map {
        Map::Identity => f(x),
        Map::Inverse => {
            if x <= 0.0 {
                return 0.0;
            }
            let r = 1.0 / x;
            if !r.is_finite() {
                return 0.0;
            }
            let y = f(r);
            if y == 0.0 {
                0.0
            } else {
                y * r * r
            }
        }
    }
}

fn eval_piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, map: Map) -> Result<Piece, QuadratureError> {
    let g = mapped(f, map);
    let (value, error) = gk21(&g, a, b);
    if value.is_nan() || error.is_nan() {
        let at = 0.5 * (a + b);
        return Err(QuadratureError::NotANumber(if map == Map::Inverse { 1.0 / at } else { at }));
    }
    Ok(Piece { a, b, map, value, error })
}

/// Integrate `f` over the segments between consecutive `points`, plus the
/// tail `(last point, ∞)` when `tail` is set.
///
/// Converges when the summed error estimate is at most
/// `tol · max(1, |value|)`.
pub(crate) fn integrate_points<F>(f: F, points: &[f64], tail: bool, tol: f64) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut pieces = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            pieces.push(eval_piece(&f, w[0], w[1], Map::Identity)?);
        }
    }
    if tail {
        let last = *points.last().expect("at least one point");
        if !(last > 0.0) {
            return Err(QuadratureError::InvalidArgument("tail must start at a positive radius".into()));
        }
        pieces.push(eval_piece(&f, 0.0, 1.0 / last, Map::Inverse)?);
    }
    if pieces.is_empty() {
        return Ok(IntegralResult { value: 0.0, abs_error_estimate: 0.0, subdivisions: 0 });
    }

    let mut subdivisions = pieces.len();
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(QuadratureError::ToleranceNotMet { value, error, subdivisions });
        }
        if error <= tol * value.abs().max(1.0) {
            return Ok(IntegralResult { value, abs_error_estimate: error, subdivisions });
        }
        // Worst piece that can still be split.
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let mid = 0.5 * (p.a + p.b);
                mid > p.a && mid < p.b
            })
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst.filter(|_| subdivisions < MAX_SUBDIVISIONS) else {
            return Err(QuadratureError::ToleranceNotMet { value, error, subdivisions });
        };
        let p = pieces[i];
        let mid = 0.5 * (p.a + p.b);
        pieces[i] = eval_piece(&f, p.a, mid, p.map)?;
        pieces.push(eval_piece(&f, mid, p.b, p.map)?);
        subdivisions += 1;
    }
}

/// `∫_a^b f(x) dx` to relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<IntegralResult, QuadratureError> {
    if a <= b {
        integrate_points(f, &[a, b], false, tol)
    } else {
        integrate_points(f, &[b, a], false, tol).map(|r| r.scaled(-1.0))
    }
}

/// Surface area of the unit sphere in `ℝ^d` (`S_3 = 4π`).
pub fn unit_sphere_area(d: u32) -> f64 {
    // Γ(d/2) by the recurrence from Γ(1) or Γ(1/2).
    let mut gamma = if d.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(d as f64 / 2.0) / gamma
}

/// Where and how to integrate a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDomain {
    /// Lower limit.
    pub start: f64,
    /// `[0, start]` belongs to the domain but is skipped; a bound on its
    /// contribution is added to the error estimate.
    pub truncated: bool,
    /// Upper limit, or `None` for `∞`.
    pub end: Option<f64>,
    /// Interior points the integrand may be non-smooth at.
    pub breakpoints: Vec<f64>,
    /// Beyond this radius the integral is done in `u = 1/r`.
    pub cutoff: f64,
    /// Integrand decays like `r^-p`; must exceed the dimension when `end` is `None`.
    pub tail_exponent: f64,
}

impl Default for RadialDomain {
    fn default() -> Self {
        RadialDomain {
            start: 0.0,
            truncated: false,
            end: None,
            breakpoints: vec![1e-2, 1e-1, 1.0, 1e1, 1e2],
            cutoff: CUTOFF_MAX,
            tail_exponent: f64::INFINITY,
        }
    }
}

impl RadialDomain {
    /// Domain adapted to `p`: starts at `10⁻⁶` for diverging cores, breaks
    /// at the hard core, at known discontinuities and at every zero of `v`
    /// found by bisection, and switches to `u = 1/r` where `|v| < 10⁻¹⁴`
    /// (or at `10³`).
    pub fn for_potential(p: &RadialPotential) -> Self {
        let start = match p.core() {
            CoreBehavior::DivergesToPlusInfinity => DIVERGENT_CORE_START,
            _ => 0.0,
        };
        let known = p.breakpoints();
        let last_known = known.iter().cloned().fold(1.0_f64, f64::max);
        let cutoff = find_cutoff(p, last_known);
        let mut breakpoints = known;
        breakpoints.extend(sign_changes(p, start.max(DIVERGENT_CORE_START), cutoff));
        RadialDomain {
            start,
            truncated: start > 0.0,
            end: None,
            breakpoints,
            cutoff,
            tail_exponent: p.tail_exponent(),
        }
    }

    /// Restrict to `[lo, hi]` (`hi = None` keeps the tail).
    pub fn restricted(&self, lo: f64, hi: Option<f64>) -> Self {
        RadialDomain {
            start: lo.max(self.start),
            truncated: self.truncated && lo <= self.start,
            end: hi,
            breakpoints: self.breakpoints.clone(),
            cutoff: self.cutoff,
            tail_exponent: self.tail_exponent,
        }
    }

    /// Sorted integration points from `start` to `end` (or to the cutoff).
    pub(crate) fn points(&self) -> Vec<f64> {
        let upper = self.end.unwrap_or(self.cutoff.max(self.start));
        let mut pts = vec![self.start];
        pts.extend(
            self.breakpoints
                .iter()
                .cloned()
                .filter(|&b| b > self.start && b < upper),
        );
        if upper > self.start {
            pts.push(upper);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
        pts
    }
}

fn find_cutoff(p: &RadialPotential, from: f64) -> f64 {
    let small = |r: f64| {
        let v = p.evaluate(r);
        v.is_finite() && v.abs() < CUTOFF_NEGLIGIBLE
    };
    let mut r = from * 1.0001;
    while r < CUTOFF_MAX {
        if small(r) && small(2.0 * r) && small(4.0 * r) {
            return r;
        }
        r *= 1.05;
    }
    CUTOFF_MAX
}

fn sign_class(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Radii in `[lo, hi]` where `v` changes sign class (including jumps to or
/// from zero), located by bisection.
fn sign_changes(p: &RadialPotential, lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let grid = logspace(lo, hi, ZERO_SCAN_POINTS);
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let ca = sign_class(p.evaluate(a));
        if ca == sign_class(p.evaluate(b)) {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sign_class(p.evaluate(m)) == ca {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(b);
    }
    out
}

/// `S_d ∫ f(r) r^{d-1} dr` over `domain` to relative tolerance `tol`.
pub fn radial_integral_on<F>(f: F, d: u32, domain: &RadialDomain, tol: f64) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if d == 0 {
        return Err(QuadratureError::InvalidArgument("dimension must be at least 1".into()));
    }
    if domain.end.is_none() && domain.tail_exponent <= d as f64 {
        return Err(QuadratureError::NonIntegrableTail { exponent: domain.tail_exponent, dimension: d });
    }
    let area = unit_sphere_area(d);
    let weighted = |r: f64| {
        let y = f(r);
        if y == 0.0 {
            0.0
        } else {
            y * r.powi(d as i32 - 1)
        }
    };
    let points = domain.points();
    // Tolerance is relative to the final scaled value.
    let mut res = integrate_points(weighted, &points, domain.end.is_none(), tol / area)?.scaled(area);
    if domain.truncated && domain.start > 0.0 {
        let s = domain.start;
        let sup = [s, 0.5 * s, 0.1 * s]
            .iter()
            .map(|&r| f(r).abs())
            .fold(0.0, f64::max);
        res.abs_error_estimate += area * s.powi(d as i32) / d as f64 * sup;
    }
    Ok(res)
}

/// `S_d ∫₀^∞ f(r) r^{d-1} dr` with a plain domain: breaks at each decade
/// from `10⁻²` to `10²`, tail in `u = 1/r` beyond `r = 10³`.
pub fn radial_integral<F>(f: F, d: u32, tol: f64) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    radial_integral_on(f, d, &RadialDomain::default(), tol)
}

/// `φ(t) = (1 - e^{-t})/t`, `φ(0) = 1`.
pub fn phi(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t / 2.0 + t * t / 6.0 - t * t * t / 24.0
    } else if t == f64::INFINITY {
        0.0
    } else {
        -(-t).exp_m1() / t
    }
}

fn check_beta(beta: f64) -> Result<(), QuadratureError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::InvalidArgument(format!("beta must be positive, got {beta}")))
    }
}

/// Regularity constant `C_v(β) = ∫ |e^{-βv(x)} - 1| dx`.
pub fn c_regular(p: &RadialPotential, beta: f64, tol: f64) -> Result<IntegralResult, QuadratureError> {
    check_beta(beta)?;
    let domain = RadialDomain::for_potential(p);
    radial_integral_on(|r| (-beta * p.evaluate(r)).exp_m1().abs(), p.dimension(), &domain, tol)
}

/// `C̃_v(β) = ∫ (1 - e^{-β|v(x)|}) dx`.
pub fn c_tilde(p: &RadialPotential, beta: f64, tol: f64) -> Result<IntegralResult, QuadratureError> {
    check_beta(beta)?;
    let domain = RadialDomain::for_potential(p);
    radial_integral_on(|r| -(-beta * p.evaluate(r).abs()).exp_m1(), p.dimension(), &domain, tol)
}

/// The two terms of `C̆_v(β)`: the integral over `|x| ≤ α` and the one over
/// `|x| ≥ α`, each with its prefactor applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CBreve {
    pub alpha: f64,
    pub bbar: f64,
    pub inner: IntegralResult,
    pub outer: IntegralResult,
}

impl CBreve {
    pub fn total(&self) -> IntegralResult {
        IntegralResult::sum(self.inner, self.outer)
    }

    pub fn value(&self) -> f64 {
        self.inner.value + self.outer.value
    }
}

/// `C̆_v(β)` split into its inner and outer terms:
///
/// ```text
/// e^{-βB̄} S_d ∫₀^α r^{d-1} β|v| φ(β(v - v_α - B̄)) dr
///   + φ(βB̄) S_d ∫_α^∞ r^{d-1} β|v| dr
/// ```
///
/// `C̆` is decreasing in `B̄`, so passing a lower bound for `B̄` yields an
/// upper bound for `C̆`.
pub fn c_breve_terms(
    p: &RadialPotential,
    beta: f64,
    alpha: f64,
    bbar: f64,
    tol: f64,
) -> Result<CBreve, QuadratureError> {
    check_beta(beta)?;
    if !(bbar > 0.0 && bbar.is_finite()) {
        return Err(QuadratureError::InvalidArgument(format!("bbar must be positive, got {bbar}")));
    }
    if !(alpha > p.support_start()) {
        return Err(QuadratureError::AlphaOutsideSupport { alpha, core: p.support_start() });
    }
    let d = p.dimension();
    let domain = RadialDomain::for_potential(p);
    let v_alpha = p.v_alpha(alpha);

    let inner_f = |r: f64| {
        let v = p.evaluate(r);
        if v.is_infinite() {
            // β|v|·φ(βv) → 1 as v → ∞
            return 1.0;
        }
        beta * v.abs() * phi(beta * (v - v_alpha - bbar))
    };
    let inner = radial_integral_on(inner_f, d, &domain.restricted(domain.start, Some(alpha)), tol)?
        .scaled((-beta * bbar).exp());
    let outer = radial_integral_on(|r| beta * p.evaluate(r).abs(), d, &domain.restricted(alpha, None), tol)?
        .scaled(phi(beta * bbar));
    Ok(CBreve { alpha, bbar, inner, outer })
}

/// `C̆_v(β)` as a single integral result.
pub fn c_breve(p: &RadialPotential, beta: f64, alpha: f64, bbar: f64, tol: f64) -> Result<IntegralResult, QuadratureError> {
    c_breve_terms(p, beta, alpha, bbar, tol).map(|c| c.total())
}

/// The constants entering the radius bounds at one inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialConstants {
    pub beta: f64,
    pub dimension: u32,
    pub c_regular: IntegralResult,
    pub c_tilde: IntegralResult,
    /// `C̆` at a lower bound of `B̄`, hence an upper bound on `C̆`.
    pub c_breve: Option<CBreve>,
    /// `C̆` at `bbar_upper`, a lower bound on `C̆`.
    pub c_breve_floor: Option<CBreve>,
}

impl PotentialConstants {
    /// `C` and `C̃` at `beta`; `C̆` is attached separately once an `α` is
    /// certified.
    pub fn compute(p: &RadialPotential, beta: f64, tol: f64) -> Result<Self, QuadratureError> {
        Ok(PotentialConstants {
            beta,
            dimension: p.dimension(),
            c_regular: c_regular(p, beta, tol)?,
            c_tilde: c_tilde(p, beta, tol)?,
            c_breve: None,
            c_breve_floor: None,
        })
    }

    /// Attach a single `C̆` used both as the upper and the lower bound.
    pub fn with_c_breve(self, c: CBreve) -> Self {
        self.with_c_breve_band(c, c)
    }

    pub fn with_c_breve_band(mut self, upper: CBreve, floor: CBreve) -> Self {
        self.c_breve = Some(upper);
        self.c_breve_floor = Some(floor);
        self
    }
}
