//! Built-in potentials together with their stability data.

use super::{PotentialError, RadialPotential, StabilityData};

/// A potential plus the stability constants used to bound it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub potential: RadialPotential,
    pub stability: StabilityData,
    /// The potential attains its minimum at some `r0` and is negative beyond.
    pub negative_beyond_minimum: bool,
}

/// Default catalog: rescaled Lennard-Jones, unit hard sphere,
/// square well `(ε=1, a=1, R=1.5)` and Morse `(ε=1, r0=1, a=3)`.
pub fn catalog() -> Vec<CatalogEntry> {
    [
        "lennard-jones-rescaled",
        "hard-sphere",
        "square-well(eps=1,a=1,R=1.5)",
        "morse(eps=1,r0=1,a=3)",
    ]
    .iter()
    .map(|name| lookup(name).expect("built-in catalog entries are valid"))
    .collect()
}

/// Look up `name` or `name(key=value, ...)`.
///
/// Recognised names and keys:
/// - `lennard-jones-rescaled` (alias `lj`), no parameters
/// - `hard-sphere`: `a` (radius, default 1)
/// - `square-well`: `eps` (depth, default 1), `a` (core, default 1), `R` (range, default 1.5)
/// - `morse`: `eps` (default 1), `r0` (default 1), `a` (default 3)
pub fn lookup(spec: &str) -> Result<CatalogEntry, PotentialError> {
    let (name, params) = split_params(spec)?;
    let get = |keys: &[&str], default: f64| -> f64 {
        params
            .iter()
            .find(|(k, _)| keys.contains(&k.as_str()))
            .map(|&(_, v)| v)
            .unwrap_or(default)
    };
    let known: &[&str] = match name.as_str() {
        "lennard-jones-rescaled" | "lj" => &[],
        "hard-sphere" => &["a", "radius"],
        "square-well" => &["eps", "ε", "epsilon", "depth", "a", "core", "R", "range"],
        "morse" => &["eps", "ε", "epsilon", "depth", "r0", "a"],
        _ => return Err(PotentialError::UnknownPotential(name)),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        return Err(PotentialError::InvalidParameter(format!("'{k}' is not a parameter of {name}")));
    }

    match name.as_str() {
        "lennard-jones-rescaled" | "lj" => Ok(CatalogEntry {
            potential: RadialPotential::lennard_jones(),
            // 8.61 <= B (numerical ground states), B <= 14.316 and B-bar <= 1.001 B.
            stability: StabilityData::new(8.61, 14.316, 14.331, 1.0)?,
            negative_beyond_minimum: true,
        }),
        "hard-sphere" => Ok(CatalogEntry {
            potential: RadialPotential::hard_sphere(get(&["a", "radius"], 1.0))?,
            stability: StabilityData::new(0.0, 0.0, 0.0, 0.0)?,
            negative_beyond_minimum: false,
        }),
        "square-well" => {
            let eps = get(&["eps", "ε", "epsilon", "depth"], 1.0);
            let core = get(&["a", "core"], 1.0);
            let range = get(&["R", "range"], 1.5);
            let potential = RadialPotential::square_well(eps, core, range)?;
            Ok(CatalogEntry {
                potential,
                stability: square_well_stability(eps, range / core)?,
                negative_beyond_minimum: false,
            })
        }
        "morse" => {
            let eps = get(&["eps", "ε", "epsilon", "depth"], 1.0);
            let r0 = get(&["r0"], 1.0);
            let a = get(&["a"], 3.0);
            let potential = RadialPotential::morse(eps, r0, a)?;
            let stability = morse_stability(&potential, eps, a * r0)
                .ok_or_else(|| PotentialError::MissingStabilityData(potential.name().to_string()))?;
            Ok(CatalogEntry {
                potential,
                stability,
                negative_beyond_minimum: true,
            })
        }
        _ => unreachable!(),
    }
}

/// Stability bounds for a 3d square well of depth `eps` and range ratio
/// `lambda = R/a`.
///
/// Upper: disjoint balls of radius a/2 around neighbours sit in a shell of
/// outer radius R + a/2, so a particle has at most `(2λ+1)³ - 1` neighbours
/// in the well and `B ≤ ε·N/2`; `B̄ ≤ (4/3)·b_upper`.
/// Lower: large fcc clusters have 12 neighbours at distance a and 6 more at
/// `√2·a`, giving `B ≥ 6ε`, or `9ε` once `λ > √2`.
fn square_well_stability(eps: f64, lambda: f64) -> Result<StabilityData, PotentialError> {
    let neighbours = ((2.0 * lambda + 1.0).powi(3) - 1.0).floor();
    let b_upper = eps * neighbours / 2.0;
    let b_lower = if lambda > std::f64::consts::SQRT_2 { 9.0 * eps } else { 6.0 * eps };
    StabilityData::new(b_lower, b_upper, 4.0 / 3.0 * b_upper, eps)
}

/// When `a·r0 ≥ ln 16` the Morse potential has a non-negative Fourier
/// transform, hence `B ≤ v(0)/2`. A dimer gives `B ≥ ε/2`. It is negative
/// beyond its minimum, so `B̄ ≤ (13/12)·B` in three dimensions.
fn morse_stability(p: &RadialPotential, eps: f64, a_r0: f64) -> Option<StabilityData> {
    if a_r0 < 16f64.ln() {
        return None;
    }
    let b_upper = p.evaluate(0.0) / 2.0;
    StabilityData::new(eps / 2.0, b_upper, 13.0 / 12.0 * b_upper, eps).ok()
}

fn split_params(spec: &str) -> Result<(String, Vec<(String, f64)>), PotentialError> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        return Ok((spec.to_string(), Vec::new()));
    };
    let name = spec[..open].trim().to_string();
    let inner = spec[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| PotentialError::InvalidParameter(format!("missing ')' in '{spec}'")))?;
    let mut params = Vec::new();
    for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| PotentialError::InvalidParameter(format!("expected key=value, got '{item}'")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| PotentialError::InvalidParameter(format!("'{v}' is not a number")))?;
        params.push((k.trim().to_string(), value));
    }
    Ok((name, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::numeric_b_star;

    #[test]
    fn lennard_jones_entry() {
        let e = lookup("lennard-jones-rescaled").unwrap();
        assert_eq!(e.stability.bbar_upper, 14.331);
        assert_eq!(e.stability.b_lower, 8.61);
        assert_eq!(e.stability.b_upper, 14.316);
        assert_eq!(e.stability.b_star, 1.0);
        assert_eq!(e.potential.dimension(), 3);
    }

    #[test]
    fn hard_sphere_entry_is_all_zero() {
        let e = lookup("hard-sphere").unwrap();
        let s = e.stability;
        assert_eq!((s.b_lower, s.b_upper, s.bbar_upper, s.b_star), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn square_well_with_unicode_key() {
        let e = lookup("square-well(ε=1,a=1,R=1.5)").unwrap();
        assert_eq!(e.stability.b_star, 1.0);
        assert_eq!(e.stability.b_lower, 9.0);
        assert_eq!(e.stability.b_upper, 31.5);
    }

    #[test]
    fn morse_requires_positive_definite_regime() {
        assert!(lookup("morse(eps=1,r0=1,a=3)").is_ok());
        assert!(matches!(lookup("morse(a=1)"), Err(PotentialError::MissingStabilityData(_))));
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(lookup("coulomb"), Err(PotentialError::UnknownPotential(_))));
        assert!(lookup("square-well(eps=1,a=1").is_err());
        assert!(lookup("square-well(eps=x)").is_err());
        assert!(lookup("hard-sphere(depth=2)").is_err());
    }

    #[test]
    fn catalog_is_consistent() {
        for e in catalog() {
            e.stability.validate().unwrap();
            let d = e.potential.dimension();
            assert!(e.stability.warnings(d, e.negative_beyond_minimum).is_empty(), "{}", e.potential.name());
        }
    }

    #[test]
    fn numeric_b_star_matches_closed_form_on_catalog() {
        for e in catalog() {
            let closed = e.potential.closed_form_b_star().unwrap();
            let numeric = numeric_b_star(&e.potential);
            assert!(
                (numeric - closed).abs() <= 1e-8 * closed.max(1e-300),
                "{}: {numeric} vs {closed}",
                e.potential.name()
            );
        }
    }
}
