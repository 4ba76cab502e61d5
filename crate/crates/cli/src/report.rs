//! JSON and CSV rendering. Every float is printed with 9 significant digits.

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};

use virial_bounds::oracle::{BoundCheckReport, CoefficientEstimate, TriangleEstimate};
use virial_bounds::quadrature::CBreve;
use virial_bounds::{CoreBehavior, IntegralResult, MayerRadii, VirialRadii};

use crate::config::{AlphaPolicy, Reference, Relation, RunConfig};
use crate::BetaResult;

pub const SCHEMA_ID: &str = "https://virial-bounds.invalid/report.schema.json";

/// Sweep columns, in order.
pub const COLUMNS: [&str; 14] = [
    "beta", "C", "C_tilde", "C_breve", "F_lp", "F_star", "F_breve", "R_PR", "R_TG", "R_Ba", "R_LP", "R_SV", "R_stab",
    "R_Bas",
];

/// Round to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// 9 significant digits, positional inside `[1e-4, 1e9)` and exponent
/// notation outside.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if (1e-4..1e9).contains(&a) {
        let decimals = (8 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig9(x)).map(Value::Number).unwrap_or(Value::Null)
}

fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn integral(r: &IntegralResult) -> Value {
    json!({ "value": num(r.value), "abs_error_estimate": num(r.abs_error_estimate), "subdivisions": r.subdivisions })
}

fn c_breve(c: &CBreve) -> Value {
    json!({
        "alpha": num(c.alpha),
        "bbar": num(c.bbar),
        "inner": integral(&c.inner),
        "outer": integral(&c.outer),
        "total": integral(&c.total()),
    })
}

fn mayer(m: &MayerRadii) -> Value {
    json!({
        "penrose-ruelle": num(m.penrose_ruelle),
        "tree-graph": num(m.tree_graph),
        "basuev": opt(m.basuev),
    })
}

fn virial(v: &VirialRadii) -> Value {
    json!({
        "lebowitz-penrose": num(v.lebowitz_penrose),
        "stable-variant": num(v.stable_variant),
        "stab": num(v.stab),
        "basuev": opt(v.basuev),
        "best": num(v.best),
    })
}

fn kebab<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("enum serializes")
}

fn coefficient(c: &CoefficientEstimate) -> Value {
    json!({
        "order": c.order,
        "kind": kebab(&c.kind),
        "value": num(c.value),
        "error_estimate": num(c.error_estimate),
        "method": kebab(&c.method),
    })
}

fn triangle(t: &TriangleEstimate) -> Value {
    json!({ "value": num(t.value), "error_estimate": num(t.error_estimate), "method": kebab(&t.method) })
}

fn checks(r: &BoundCheckReport) -> Value {
    json!({
        "order": r.order,
        "value": num(r.value),
        "error_estimate": num(r.error_estimate),
        "bounds": r.checks.iter().map(|c| json!({
            "bound": c.bound.to_string(),
            "value": num(c.value),
            "tightness": num(c.tightness),
        })).collect::<Vec<_>>(),
        "lemma_beats_tree_graph_and_basuev": r.lemma_beats_tree_graph_and_basuev,
    })
}

fn result(r: &BetaResult) -> Value {
    let b = &r.report;
    let pc = &b.constants;
    let certificate = b.certificate.map(|c| {
        json!({
            "alpha": num(c.alpha),
            "v_alpha": num(c.v_alpha),
            "mu_bound": num(c.mu_bound),
            "margin": num(c.margin),
            "mu_source": kebab(&c.mu_source),
            "monotonicity": "numerically verified",
        })
    });
    let oracle = r.oracle.as_ref().map(|o| {
        json!({
            "mayer": [coefficient(&o.c2), coefficient(&o.c3)],
            "virial": [coefficient(&o.b2), coefficient(&o.b3)],
            "virial_indexing": "vertex count",
            "triangle": triangle(&o.triangle),
            "triangle_monte_carlo": o.triangle_monte_carlo.as_ref().map(triangle),
            "bound_checks": o.checks.iter().map(checks).collect::<Vec<_>>(),
        })
    });
    json!({
        "beta": num(b.beta),
        "constants": {
            "C": integral(&pc.c_regular),
            "C_tilde": integral(&pc.c_tilde),
            "C_breve": pc.c_breve.as_ref().map(c_breve),
            "C_breve_floor": pc.c_breve_floor.as_ref().map(c_breve),
        },
        "certificate": certificate,
        "f_values": {
            "F_lp": num(b.f_values.f_lp),
            "F_star": num(b.f_values.f_star),
            "F_breve": opt(b.f_values.f_breve),
        },
        "mayer": mayer(&b.mayer),
        "virial": virial(&b.virial),
        "ln_mayer": mayer(&b.ln_mayer),
        "ln_virial": virial(&b.ln_virial),
        "optimistic": {
            "mayer": mayer(&b.optimistic.mayer),
            "virial": virial(&b.optimistic.virial),
        },
        "oracle": oracle,
        "warnings": r.warnings,
    })
}

fn core(c: CoreBehavior) -> Value {
    match c {
        CoreBehavior::FiniteAtZero => json!({ "kind": "finite-at-zero" }),
        CoreBehavior::DivergesToPlusInfinity => json!({ "kind": "diverges-to-plus-infinity" }),
        CoreBehavior::HardCore(r) => json!({ "kind": "hard-core", "radius": num(r) }),
    }
}

fn alpha_policy(a: AlphaPolicy) -> Value {
    match a {
        AlphaPolicy::None => json!({ "policy": "none" }),
        AlphaPolicy::Fixed { value } => json!({ "policy": "fixed", "value": num(value) }),
        AlphaPolicy::Search { lo, hi } => json!({ "policy": "search", "lo": num(lo), "hi": num(hi) }),
    }
}

/// The full report as pretty-printed JSON, newline terminated.
pub fn json(cfg: &RunConfig, results: &[BetaResult], refs: &[ReferenceLine]) -> Result<String> {
    let p = &cfg.potential;
    let sd = &cfg.stability;
    let mut root = Map::new();
    root.insert("$schema".into(), json!(SCHEMA_ID));
    root.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    root.insert(
        "potential".into(),
        json!({
            "name": p.name(),
            "dimension": p.dimension(),
            "tail_exponent": num(p.tail_exponent()),
            "core": core(p.core()),
        }),
    );
    root.insert(
        "stability".into(),
        json!({
            "b_lower": num(sd.b_lower),
            "b_upper": num(sd.b_upper),
            "bbar_upper": num(sd.bbar_upper),
            "bbar_lower": num(sd.bbar_lower(p.dimension())),
            "b_star": num(sd.b_star),
            "negative_beyond_minimum": cfg.negative_beyond_minimum,
        }),
    );
    root.insert(
        "settings".into(),
        json!({
            "tol": num(cfg.tol),
            "optimizer_tol": num(cfg.optimizer_tol),
            "seed": cfg.seed,
            "oracle": cfg.oracle,
            "samples": cfg.samples,
            "alpha": alpha_policy(cfg.alpha),
        }),
    );
    root.insert("results".into(), Value::Array(results.iter().map(result).collect()));
    root.insert(
        "references".into(),
        Value::Array(
            refs.iter()
                .map(|l| {
                    json!({
                        "quantity": l.reference.quantity,
                        "beta": num(l.beta),
                        "relation": kebab(&l.reference.relation),
                        "scaled": l.reference.scaled,
                        "reference": num(l.reference.value),
                        "computed": opt(l.computed),
                        "ok": l.ok,
                    })
                })
                .collect(),
        ),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(root))?;
    s.push('\n');
    Ok(s)
}

/// Value of a sweep column, `None` when the quantity is absent.
pub fn quantity(r: &BetaResult, name: &str) -> Option<f64> {
    let b = &r.report;
    let pc = &b.constants;
    Some(match name {
        "beta" => b.beta,
        "C" => pc.c_regular.value,
        "C_tilde" => pc.c_tilde.value,
        "C_breve" => pc.c_breve?.value(),
        "F_lp" => b.f_values.f_lp,
        "F_star" => b.f_values.f_star,
        "F_breve" => b.f_values.f_breve?,
        _ => ln_radius(r, name)?.exp(),
    })
}

fn ln_radius(r: &BetaResult, name: &str) -> Option<f64> {
    let (m, v) = (&r.report.ln_mayer, &r.report.ln_virial);
    Some(match name {
        "R_PR" => m.penrose_ruelle,
        "R_TG" => m.tree_graph,
        "R_Ba" => m.basuev?,
        "R_LP" => v.lebowitz_penrose,
        "R_SV" => v.stable_variant,
        "R_stab" => v.stab,
        "R_Bas" => v.basuev?,
        "R_best" => v.best,
        _ => return None,
    })
}

pub fn is_known_quantity(name: &str) -> bool {
    COLUMNS.contains(&name) || name == "R_best"
}

/// The sweep table.
pub fn csv(results: &[BetaResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in results {
        w.write_record(COLUMNS.iter().map(|c| quantity(r, c).map(fmt9).unwrap_or_default()))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Debug, Clone)]
pub struct ReferenceLine {
    pub reference: Reference,
    pub beta: f64,
    /// Computed value, scaled by `e^{β·bbar_upper}` when requested.
    pub computed: Option<f64>,
    pub ok: bool,
}

pub fn compare_references(cfg: &RunConfig, results: &[BetaResult]) -> Vec<ReferenceLine> {
    let mut out = Vec::new();
    for reference in &cfg.references {
        for r in results {
            let beta = r.report.beta;
            if reference.beta.is_some_and(|b| b != beta) {
                continue;
            }
            let shift = if reference.scaled { beta * cfg.stability.bbar_upper } else { 0.0 };
            let computed = match ln_radius(r, &reference.quantity) {
                Some(ln) => Some((ln + shift).exp()),
                None => quantity(r, &reference.quantity).map(|x| x * shift.exp()),
            };
            let ok = computed.is_some_and(|c| match reference.relation {
                Relation::Approx => (c - reference.value).abs() <= reference.rel_tol * reference.value.abs(),
                Relation::AtLeast => c >= reference.value,
                Relation::AtMost => c <= reference.value,
            });
            out.push(ReferenceLine { reference: reference.clone(), beta, computed, ok });
        }
    }
    out
}

/// Short human-readable lines for stderr.
pub fn summary(cfg: &RunConfig, results: &[BetaResult], refs: &[ReferenceLine]) -> Vec<String> {
    let mut lines = Vec::new();
    for r in results {
        let b = &r.report;
        let mut line = format!(
            "{} beta={}: C={} C_tilde={}",
            cfg.potential.name(),
            fmt9(b.beta),
            fmt9(b.constants.c_regular.value),
            fmt9(b.constants.c_tilde.value)
        );
        if let Some(c) = &b.constants.c_breve {
            line += &format!(" C_breve={} (alpha={})", fmt9(c.value()), fmt9(c.alpha));
        }
        line += &format!(" R_stab={} R_best={}", fmt9(b.virial.stab), fmt9(b.virial.best));
        lines.push(line);
        for w in &r.warnings {
            lines.push(format!("warning (beta={}): {w}", fmt9(b.beta)));
        }
        if let Some(o) = &r.oracle {
            lines.push(format!(
                "oracle beta={}: c2={} c3={} b2={} b3={}, all bounds hold",
                fmt9(b.beta),
                fmt9(o.c2.value),
                fmt9(o.c3.value),
                fmt9(o.b2.value),
                fmt9(o.b3.value)
            ));
        }
    }
    for l in refs {
        let r = &l.reference;
        let label = if r.scaled { format!("{}*e^(beta*bbar)", r.quantity) } else { r.quantity.clone() };
        let relation = match r.relation {
            Relation::Approx => format!("approx (rel {})", fmt9(r.rel_tol)),
            Relation::AtLeast => "at least".into(),
            Relation::AtMost => "at most".into(),
        };
        lines.push(format!(
            "reference beta={} {label}: computed {} vs reference {} [{relation}] {}",
            fmt9(l.beta),
            l.computed.map(fmt9).unwrap_or_else(|| "absent".into()),
            fmt9(r.value),
            if l.ok { "ok" } else { "MISMATCH" }
        ));
    }
    lines
}
