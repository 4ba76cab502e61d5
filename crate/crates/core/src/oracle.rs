//! Direct evaluation of the second and third Mayer and virial coefficients
//! in three dimensions, and checks of the known coefficient bounds.
//!
//! With `f(r) = e^{-βv(r)} - 1`:
//!
//! ```text
//! c₂ = ½ ∫ f            β₂ = ∫ f
//! c₃ = (1/6)[3(∫ f)² + T]  β₃ = T
//! T  = ∫∫ f(x) f(y) f(x - y) dx dy
//!    = 8π² ∫∫ r s f(r) f(s) [H(r + s) - H(|r - s|)] ds dr,  H(x) = ∫₀^x t f(t) dt
//! ```
//!
//! Virial coefficients are indexed by the number of vertices `n`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basuev::BasuevCertificate;
use crate::optimize::linspace;
use crate::potentials::{RadialPotential, StabilityData};
use crate::quadrature::{integrate, integrate_points, PotentialConstants, QuadratureError, RadialDomain};

pub const DEFAULT_SAMPLES: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 42;
const MC_BATCHES: u64 = 64;
const MC_SHELLS: usize = 400;
const TABLE_STEP: f64 = 0.0025;
const TABLE_GROWTH: f64 = 1.05;
const TABLE_TARGET: f64 = 1e-12;
const TABLE_MIN_WIDTH: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("the oracle only supports d = 3, got d = {0}")]
    UnsupportedDimension(u32),
    #[error("coefficient order {0} is not supported (only 2 and 3)")]
    UnsupportedOrder(u32),
    #[error("bounds apply to Mayer coefficients only")]
    NotMayer,
    #[error("triangle term: quadrature {quadrature} and Monte Carlo {monte_carlo} differ by more than {combined_error}")]
    MonteCarloDisagreement { quadrature: f64, monte_carlo: f64, combined_error: f64 },
    #[error("|c_{order}| = {magnitude} exceeds the {bound} bound {bound_value}")]
    BoundViolation { bound: BoundKind, order: u32, magnitude: f64, bound_value: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    Mayer,
    Virial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BipolarQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub order: u32,
    pub kind: CoefficientKind,
    pub value: f64,
    /// Quadrature: propagated error estimate. Monte Carlo: three standard errors.
    pub error_estimate: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub tol: f64,
    /// Monte Carlo samples for the triangle cross-check; 0 skips it.
    pub samples: u64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { tol: 1e-8, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
    }
}

/// The Mayer function `e^{-βv(r)} - 1`, equal to `-1` inside a hard core.
pub fn mayer_f(p: &RadialPotential, beta: f64, r: f64) -> f64 {
    let v = p.evaluate(r);
    if v == f64::INFINITY {
        -1.0
    } else {
        (-beta * v).exp_m1()
    }
}

fn check_dimension(p: &RadialPotential) -> Result<(), OracleError> {
    match p.dimension() {
        3 => Ok(()),
        d => Err(OracleError::UnsupportedDimension(d)),
    }
}

/// Integration points for `f`: the origin, known discontinuities, zeros of
/// `v` and the cutoff radius.
fn f_points(p: &RadialPotential) -> (Vec<f64>, RadialDomain) {
    let domain = RadialDomain { start: 0.0, truncated: false, ..RadialDomain::for_potential(p) };
    (domain.points(), domain)
}

/// `∫ f(x) dx` over `ℝ³`.
fn f_integral(p: &RadialPotential, beta: f64, tol: f64) -> Result<(f64, f64), OracleError> {
    check_dimension(p)?;
    let (points, _) = f_points(p);
    let res = integrate_points(|r| r * r * mayer_f(p, beta, r), &points, true, tol / (4.0 * PI))?;
    Ok((4.0 * PI * res.value, 4.0 * PI * res.abs_error_estimate))
}

/// Signed `c₂ = ½ ∫ f`.
pub fn c2(p: &RadialPotential, beta: f64, tol: f64) -> Result<CoefficientEstimate, OracleError> {
    let (value, err) = f_integral(p, beta, tol)?;
    Ok(CoefficientEstimate {
        order: 2,
        kind: CoefficientKind::Mayer,
        value: 0.5 * value,
        error_estimate: 0.5 * err,
        method: Method::BipolarQuadrature,
    })
}

/// `β₂ = ∫ f`.
pub fn virial_b2(p: &RadialPotential, beta: f64, tol: f64) -> Result<CoefficientEstimate, OracleError> {
    let (value, err) = f_integral(p, beta, tol)?;
    Ok(CoefficientEstimate {
        order: 2,
        kind: CoefficientKind::Virial,
        value,
        error_estimate: err,
        method: Method::BipolarQuadrature,
    })
}

/// `H(x) = ∫₀^x t f(t) dt` tabulated on a grid with exact values at the
/// nodes and cubic Hermite interpolation (using `H' = x f(x)`) between them.
struct Primitive {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// One-sided derivatives at the left and right end of each panel.
    slopes: Vec<(f64, f64)>,
    /// Largest interpolation error seen at panel midpoints plus the summed
    /// quadrature error of the node values.
    error: f64,
}

impl Primitive {
    fn build<F: Fn(f64) -> f64>(g: F, breaks: &[f64], near_end: f64, far_end: f64) -> Result<Self, QuadratureError> {
        let n_uniform = (near_end / TABLE_STEP).ceil() as usize;
        let mut nodes = linspace(0.0, near_end, n_uniform + 1);
        let mut x = near_end;
        while x < far_end {
            x *= TABLE_GROWTH;
            nodes.push(x.min(far_end));
        }
        nodes.extend(breaks.iter().cloned().filter(|&b| b > 0.0 && b < far_end));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

        let panel_tol = 1e-14;
        let mut kept = vec![nodes[0]];
        let mut values = vec![0.0];
        let mut slopes = Vec::with_capacity(nodes.len());
        let mut quad_err = 0.0;
        let mut interp_err: f64 = 0.0;
        // Panels are split until the Hermite midpoint matches the integral.
        let mut pending: Vec<(f64, f64)> = nodes.windows(2).rev().map(|w| (w[0], w[1])).collect();
        while let Some((a, b)) = pending.pop() {
            let nudge = 1e-9 * (b - a);
            let slope = (g(a + nudge), g(b - nudge));
            let piece = integrate(&g, a, b, panel_tol)?;
            let half = integrate(&g, a, 0.5 * (a + b), panel_tol)?;
            let y0 = *values.last().unwrap();
            let mid = hermite(y0, y0 + piece.value, slope, b - a, 0.5);
            let err = (mid - (y0 + half.value)).abs();
            if err > TABLE_TARGET && b - a > TABLE_MIN_WIDTH * b.max(1.0) {
                let m = 0.5 * (a + b);
                pending.push((m, b));
                pending.push((a, m));
                continue;
            }
            interp_err = interp_err.max(err);
            quad_err += piece.abs_error_estimate;
            kept.push(b);
            values.push(y0 + piece.value);
            slopes.push(slope);
        }
        let nodes = kept;
        Ok(Primitive { nodes, values, slopes, error: interp_err + quad_err })
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = self.nodes.len() - 1;
        if x >= self.nodes[last] {
            return self.values[last];
        }
        let i = self.nodes.partition_point(|&n| n <= x).saturating_sub(1).min(last - 1);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        hermite(self.values[i], self.values[i + 1], self.slopes[i], b - a, (x - a) / (b - a))
    }
}

fn hermite(y0: f64, y1: f64, (d0, d1): (f64, f64), h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// The triangle integral `T` with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

/// `T` by nested adaptive quadrature in bipolar coordinates.
pub fn triangle_quadrature(p: &RadialPotential, beta: f64, tol: f64) -> Result<TriangleEstimate, OracleError> {
    check_dimension(p)?;
    let f = |r: f64| mayer_f(p, beta, r);
    let g = |r: f64| r * f(r);
    let (points, domain) = f_points(p);
    let jumps = p.breakpoints();
    let last_break = jumps.iter().cloned().fold(1.0_f64, f64::max);
    let near_end = (2.0 * last_break).max(5.0);
    let table = Primitive::build(g, &jumps, near_end, 2.0 * domain.cutoff.max(near_end))?;

    let abs_moment = integrate_points(|r| g(r).abs(), &points, true, tol)?.value;
    let inner_tol = 0.1 * tol;
    let max_inner_err = Cell::new(0.0_f64);
    let failure: RefCell<Option<QuadratureError>> = RefCell::new(None);

    let inner = |r: f64| -> f64 {
        let mut pts = points.clone();
        pts.push(r);
        for &b in &jumps {
            pts.extend([b, r + b, r - b, b - r].into_iter().filter(|&x| x > 0.0));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
        let integrand = |s: f64| {
            let fs = f(s);
            if fs == 0.0 {
                0.0
            } else {
                s * fs * (table.eval(r + s) - table.eval((r - s).abs()))
            }
        };
        match integrate_points(integrand, &pts, true, inner_tol) {
            Ok(res) => {
                max_inner_err.set(max_inner_err.get().max(res.abs_error_estimate));
                res.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let outer = integrate_points(
        |r| {
            let gr = g(r);
            if gr == 0.0 {
                0.0
            } else {
                gr * inner(r)
            }
        },
        &points,
        true,
        tol / (8.0 * PI * PI),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    let outer = outer?;
    // Each inner value carries its own quadrature error plus the table
    // error, which enters twice through H(r + s) - H(|r - s|).
    let inner_err = max_inner_err.get() + 2.0 * abs_moment * table.error;
    let scale = 8.0 * PI * PI;
    Ok(TriangleEstimate {
        value: scale * outer.value,
        error_estimate: scale * (outer.abs_error_estimate + abs_moment * inner_err),
        method: Method::BipolarQuadrature,
    })
}

/// Importance sampler for a point `x ∈ ℝ³`: pick a spherical shell with
/// probability proportional to its volume times the largest `|f|` seen on
/// it, then a point uniform in the shell.
struct ShellSampler {
    edges: Vec<f64>,
    /// Sampling density `p_k / V_k` on each shell.
    density: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl ShellSampler {
    fn new<F: Fn(f64) -> f64>(f: F, edges: Vec<f64>) -> Option<Self> {
        let volumes: Vec<f64> = edges
            .windows(2)
            .map(|w| 4.0 / 3.0 * PI * (w[1].powi(3) - w[0].powi(3)))
            .collect();
        let peaks: Vec<f64> = edges
            .windows(2)
            .map(|w| {
                let nudge = 1e-9 * (w[1] - w[0]);
                linspace(w[0] + nudge, w[1] - nudge, 9)
                    .into_iter()
                    .map(|r| f(r).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let top = peaks.iter().cloned().fold(0.0, f64::max);
        if !(top > 0.0) {
            return None;
        }
        // A floor keeps every shell reachable, so the estimator stays unbiased
        // even where the peak scan misses a nonzero value.
        let weights: Vec<f64> = volumes
            .iter()
            .zip(&peaks)
            .map(|(v, m)| v * m.max(1e-6 * top))
            .collect();
        let total: f64 = weights.iter().sum();
        let density = weights.iter().zip(&volumes).map(|(w, v)| w / total / v).collect();
        let index = WeightedIndex::new(&weights).ok()?;
        Some(ShellSampler { edges, density, index })
    }

    /// A point and its sampling density.
    fn sample<R: Rng>(&self, rng: &mut R) -> ([f64; 3], f64) {
        let k = self.index.sample(rng);
        let (a3, b3) = (self.edges[k].powi(3), self.edges[k + 1].powi(3));
        let u: f64 = rng.random();
        let r = (a3 + u * (b3 - a3)).cbrt();
        let dir: [f64; 3] = UnitSphere.sample(rng);
        ([r * dir[0], r * dir[1], r * dir[2]], self.density[k])
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
        }
    }
}

/// Radius beyond which `|f|` stays below `10⁻⁶`; the triangle integrand needs
/// all three points close together, so the truncation is negligible.
fn sampling_radius<F: Fn(f64) -> f64>(f: F, jumps: &[f64]) -> f64 {
    let mut r = jumps.iter().cloned().fold(1.0_f64, f64::max) * 2.0;
    while r < 1e3 && (f(r).abs() >= 1e-6 || f(2.0 * r).abs() >= 1e-6) {
        r *= 1.1;
    }
    r
}

/// `T` by importance-sampled Monte Carlo over 64 fixed substreams of a
/// ChaCha8 generator seeded with `seed`.
pub fn triangle_monte_carlo(
    p: &RadialPotential,
    beta: f64,
    samples: u64,
    seed: u64,
) -> Result<TriangleEstimate, OracleError> {
    check_dimension(p)?;
    let f = |r: f64| mayer_f(p, beta, r);
    let jumps = p.breakpoints();
    let r_max = sampling_radius(f, &jumps);
    let mut edges = linspace(0.0, r_max, MC_SHELLS + 1);
    edges.extend(jumps.iter().cloned().filter(|&b| b > 0.0 && b < r_max));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let Some(sampler) = ShellSampler::new(f, edges) else {
        return Ok(TriangleEstimate { value: 0.0, error_estimate: 0.0, method: Method::MonteCarlo });
    };

    let per_batch = samples / MC_BATCHES;
    let extra = samples % MC_BATCHES;
    let batches: Vec<Moments> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let mut m = Moments::default();
            for _ in 0..per_batch + u64::from(batch < extra) {
                let (x, qx) = sampler.sample(&mut rng);
                let (y, qy) = sampler.sample(&mut rng);
                let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
                m.push(f(norm(x)) * f(norm(y)) * f(norm(d)) / (qx * qy));
            }
            m
        })
        .collect();
    let total = batches.into_iter().fold(Moments::default(), Moments::merge);
    let std_err = if total.n > 1 { (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt() } else { f64::INFINITY };
    Ok(TriangleEstimate { value: total.mean, error_estimate: 3.0 * std_err, method: Method::MonteCarlo })
}

/// Quadrature and, when `config.samples > 0`, Monte Carlo values of `T`.
/// Fails with `MonteCarloDisagreement` when they differ by more than the
/// sum of their error estimates.
pub fn triangle(
    p: &RadialPotential,
    beta: f64,
    config: &OracleConfig,
) -> Result<(TriangleEstimate, Option<TriangleEstimate>), OracleError> {
    let quad = triangle_quadrature(p, beta, config.tol)?;
    if config.samples == 0 {
        return Ok((quad, None));
    }
    let mc = triangle_monte_carlo(p, beta, config.samples, config.seed)?;
    let combined_error = quad.error_estimate + mc.error_estimate;
    if !((quad.value - mc.value).abs() <= combined_error) {
        return Err(OracleError::MonteCarloDisagreement {
            quadrature: quad.value,
            monte_carlo: mc.value,
            combined_error,
        });
    }
    Ok((quad, Some(mc)))
}

/// Signed `c₃ = (1/6)[3(∫f)² + T]`.
pub fn c3(p: &RadialPotential, beta: f64, config: &OracleConfig) -> Result<CoefficientEstimate, OracleError> {
    let (i, di) = f_integral(p, beta, config.tol)?;
    let (t, _) = triangle(p, beta, config)?;
    Ok(CoefficientEstimate {
        order: 3,
        kind: CoefficientKind::Mayer,
        value: (3.0 * i * i + t.value) / 6.0,
        error_estimate: (6.0 * i.abs() * di + 3.0 * di * di + t.error_estimate) / 6.0,
        method: Method::BipolarQuadrature,
    })
}

/// `β₃ = T`, the triangle being the only two-connected graph on three
/// vertices.
pub fn virial_b3(p: &RadialPotential, beta: f64, config: &OracleConfig) -> Result<CoefficientEstimate, OracleError> {
    let (t, _) = triangle(p, beta, config)?;
    Ok(CoefficientEstimate {
        order: 3,
        kind: CoefficientKind::Virial,
        value: t.value,
        error_estimate: t.error_estimate,
        method: Method::BipolarQuadrature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Penrose,
    TreeGraph,
    StableVariant,
    Basuev,
    Lemma,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Penrose => "penrose",
            BoundKind::TreeGraph => "tree-graph",
            BoundKind::StableVariant => "stable-variant",
            BoundKind::Basuev => "basuev",
            BoundKind::Lemma => "lemma",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: BoundKind,
    pub value: f64,
    /// `|c_n| / bound`.
    pub tightness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub order: u32,
    pub value: f64,
    pub error_estimate: f64,
    pub checks: Vec<BoundCheck>,
    /// The lemma bound is below the tree-graph bound and, when
    /// present, the Basuev bound.
    pub lemma_beats_tree_graph_and_basuev: bool,
}

/// `n^{n-2}/n!`.
fn tree_factor(n: u32) -> f64 {
    let n = n as f64;
    n.powf(n - 2.0) / (1..=n as u64).map(|k| k as f64).product::<f64>()
}

/// Compare `|c_n|` against every applicable bound.
///
/// Bounds are evaluated at the weak end of each input interval (`b_upper`,
/// `bbar_upper`, integrals plus their error estimates), so a violation can
/// only come from an error in the coefficient or in the constants.
pub fn check_bounds(
    est: &CoefficientEstimate,
    sd: &StabilityData,
    pc: &PotentialConstants,
    cert: Option<&BasuevCertificate>,
) -> Result<BoundCheckReport, OracleError> {
    if est.kind != CoefficientKind::Mayer {
        return Err(OracleError::NotMayer);
    }
    let n = est.order;
    if !(2..=3).contains(&n) {
        return Err(OracleError::UnsupportedOrder(n));
    }
    let beta = pc.beta;
    let nf = n as f64;
    let trees = tree_factor(n);
    let c = pc.c_regular.value + pc.c_regular.abs_error_estimate;
    let ct = pc.c_tilde.value + pc.c_tilde.abs_error_estimate;

    let mut bounds = vec![
        (BoundKind::Penrose, trees * (2.0 * beta * sd.b_upper * (nf - 2.0)).exp() * c.powf(nf - 1.0)),
        (BoundKind::TreeGraph, trees * (beta * sd.b_upper * nf).exp() * ct.powf(nf - 1.0)),
        (BoundKind::StableVariant, trees * (beta * sd.bbar_upper * (nf - 1.0)).exp() * ct.powf(nf - 1.0)),
    ];
    if let (Some(_), Some(cb)) = (cert, pc.c_breve) {
        let cb = cb.total();
        let cb = cb.value + cb.abs_error_estimate;
        bounds.push((BoundKind::Basuev, trees * (beta * sd.bbar_upper * (nf - 1.0)).exp() * cb.powf(nf - 1.0)));
    }
    let lemma = match n {
        2 => 0.5 * (beta * sd.b_star).exp() * ct,
        _ => 0.5 * (3.0 * beta * sd.b_star).exp() * ct * ct,
    };
    bounds.push((BoundKind::Lemma, lemma));

    let magnitude = est.value.abs();
    let mut checks = Vec::with_capacity(bounds.len());
    for (bound, value) in bounds {
        if !(magnitude <= value + est.error_estimate) {
            return Err(OracleError::BoundViolation { bound, order: n, magnitude, bound_value: value });
        }
        checks.push(BoundCheck { bound, value, tightness: magnitude / value });
    }
    let find = |k: BoundKind| checks.iter().find(|c| c.bound == k).map(|c| c.value);
    let tg = find(BoundKind::TreeGraph).unwrap_or(f64::INFINITY);
    let lemma_beats_tree_graph_and_basuev = lemma < tg && find(BoundKind::Basuev).is_none_or(|b| lemma < b);
    Ok(BoundCheckReport {
        order: n,
        value: est.value,
        error_estimate: est.error_estimate,
        checks,
        lemma_beats_tree_graph_and_basuev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_sphere_second_coefficient() {
        let hs = RadialPotential::hard_sphere(1.0).unwrap();
        let c = c2(&hs, 1.0, 1e-10).unwrap();
        assert!((c.value + 2.0 * PI / 3.0).abs() < 1e-8, "{c:?}");
        let b = virial_b2(&hs, 1.0, 1e-10).unwrap();
        assert!((b.value + 4.0 * PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn hard_sphere_triangle_closed_form() {
        let hs = RadialPotential::hard_sphere(1.0).unwrap();
        let t = triangle_quadrature(&hs, 1.0, 1e-9).unwrap();
        assert!((t.value + 5.0 * PI * PI / 6.0).abs() < 1e-7, "{t:?}");
        assert!(t.error_estimate < 1e-6);
    }

    #[test]
    fn primitive_table_matches_closed_form() {
        // t·e^{-t}: H(x) = 1 - (1 + x)e^{-x}
        let table = Primitive::build(|t: f64| t * (-t).exp(), &[], 5.0, 100.0).unwrap();
        for x in [0.001_f64, 0.3, 1.0, 2.71, 4.999, 7.5, 40.0] {
            let exact = 1.0 - (1.0 + x) * (-x).exp();
            assert!((table.eval(x) - exact).abs() < 1e-11, "{x}");
        }
        assert!(table.error < 1e-10);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let merged = xs
            .chunks(77)
            .map(|c| {
                let mut m = Moments::default();
                c.iter().for_each(|&x| m.push(x));
                m
            })
            .fold(Moments::default(), Moments::merge);
        assert_eq!(merged.n, all.n);
        assert!((merged.mean - all.mean).abs() < 1e-12);
        assert!((merged.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn zero_potential_gives_zero() {
        let zero = RadialPotential::custom("zero", 3, f64::INFINITY, crate::CoreBehavior::FiniteAtZero, |_| 0.0).unwrap();
        let cfg = OracleConfig { samples: 1000, ..OracleConfig::default() };
        assert_eq!(c3(&zero, 1.0, &cfg).unwrap().value, 0.0);
        assert_eq!(c2(&zero, 1.0, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn tree_factors() {
        assert_eq!(tree_factor(2), 0.5);
        assert!((tree_factor(3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_rejected() {
        let p = RadialPotential::custom("2d", 2, f64::INFINITY, crate::CoreBehavior::FiniteAtZero, |r| (-r).exp()).unwrap();
        assert_eq!(c2(&p, 1.0, 1e-8).unwrap_err(), OracleError::UnsupportedDimension(2));
    }
}
