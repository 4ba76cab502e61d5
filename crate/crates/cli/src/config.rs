//! Run configuration: TOML files, built-in presets and command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use virial_bounds::basuev::MuBound;
use virial_bounds::potentials::{compute_b_star, lookup, Expr, Piece, Piecewise};
use virial_bounds::{RadialPotential, StabilityData};

pub const PRESETS: &[(&str, &str)] = &[
    ("lj-reference", include_str!("../presets/lj-reference.toml")),
    ("hard-sphere", include_str!("../presets/hard-sphere.toml")),
    ("square-well", include_str!("../presets/square-well.toml")),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub potential: PotentialSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub reference: Vec<Reference>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// Catalog spec such as `square-well(eps=1,a=1,R=1.5)`, or a display name
    /// when `pieces` is given.
    pub name: String,
    #[serde(default)]
    pub pieces: Vec<PieceSpec>,
    #[serde(default = "default_dimension")]
    pub dimension: u32,
    pub tail_exponent: Option<f64>,
}

fn default_dimension() -> u32 {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    /// Upper end of the piece; omitted on the last one.
    pub below: Option<f64>,
    pub expr: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub b_lower: Option<f64>,
    pub b_upper: Option<f64>,
    pub bbar_upper: Option<f64>,
    pub b_star: Option<f64>,
    pub negative_beyond_minimum: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub alpha: AlphaPolicy,
    #[serde(default)]
    pub mu_bound: Option<MuSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_optimizer_tol")]
    pub optimizer_tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "default_samples")]
    pub samples: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            beta: default_beta(),
            alpha: AlphaPolicy::default(),
            mu_bound: None,
            tol: default_tol(),
            optimizer_tol: default_optimizer_tol(),
            seed: default_seed(),
            oracle: false,
            samples: default_samples(),
        }
    }
}

fn default_beta() -> Vec<f64> {
    vec![1.0]
}
fn default_tol() -> f64 {
    1e-8
}
fn default_optimizer_tol() -> f64 {
    virial_bounds::bounds::UNIT_XTOL
}
fn default_seed() -> u64 {
    virial_bounds::oracle::DEFAULT_SEED
}
fn default_samples() -> u64 {
    virial_bounds::oracle::DEFAULT_SAMPLES
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaPolicy {
    #[default]
    None,
    Fixed { value: f64 },
    Search { lo: f64, hi: f64 },
}

/// `"lj"` or a number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    Number(f64),
    Name(String),
}

impl MuSpec {
    fn resolve(&self) -> Result<MuBound> {
        match self {
            MuSpec::Number(x) if *x >= 0.0 && x.is_finite() => Ok(MuBound::Constant(*x)),
            MuSpec::Number(x) => bail!("mu_bound must be a non-negative number, got {x}"),
            MuSpec::Name(s) if s.eq_ignore_ascii_case("lj") => Ok(MuBound::LennardJones),
            MuSpec::Name(s) => bail!("mu_bound must be \"lj\" or a number, got \"{s}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A value to print next to the computed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    /// Column name as in the sweep CSV, e.g. `C_tilde` or `R_Bas`.
    pub quantity: String,
    pub relation: Relation,
    pub value: f64,
    /// Only compare at this β; all β when absent.
    pub beta: Option<f64>,
    /// Multiply radii by `e^{β·bbar_upper}` before comparing.
    #[serde(default)]
    pub scaled: bool,
    /// Relative tolerance for `approx`.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_rel_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Approx,
    AtLeast,
    AtMost,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub beta: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub oracle: bool,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: RadialPotential,
    pub stability: StabilityData,
    pub negative_beyond_minimum: bool,
    pub beta_values: Vec<f64>,
    pub alpha: AlphaPolicy,
    pub mu_bound: MuBound,
    pub tol: f64,
    pub optimizer_tol: f64,
    pub seed: u64,
    pub oracle: bool,
    pub samples: u64,
    pub out: Option<PathBuf>,
    /// JSON for `run`, CSV for `sweep` when unset.
    pub format: Option<Format>,
    pub references: Vec<Reference>,
}

pub fn preset(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            anyhow!("unknown preset '{name}' (available: {})", names.join(", "))
        })
}

pub fn load_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str) -> Result<ConfigFile> {
    Ok(toml::from_str(text)?)
}

impl ConfigFile {
    pub fn resolve(self, o: &Overrides) -> Result<RunConfig> {
        let (potential, catalog_stability, catalog_nbm) = self.potential.build()?;
        let s = &self.stability;
        let base = catalog_stability;
        let pick = |field: Option<f64>, from: Option<f64>, name: &str| {
            field
                .or(from)
                .ok_or_else(|| anyhow!("stability.{name} is required for potential '{}'", potential.name()))
        };
        let b_star = match (s.b_star, base.map(|b| b.b_star)) {
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => compute_b_star(&potential),
        };
        let stability = StabilityData::new(
            pick(s.b_lower, base.map(|b| b.b_lower), "b_lower")?,
            pick(s.b_upper, base.map(|b| b.b_upper), "b_upper")?,
            pick(s.bbar_upper, base.map(|b| b.bbar_upper), "bbar_upper")?,
            b_star,
        )
        .context("stability data")?;

        let run = self.run;
        let beta_values = o.beta.clone().unwrap_or(run.beta);
        if beta_values.is_empty() {
            bail!("empty beta grid");
        }
        if let Some(b) = beta_values.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            bail!("beta values must be positive and finite, got {b}");
        }
        let tol = o.tol.unwrap_or(run.tol);
        if !(tol > 0.0 && tol < 1.0) {
            bail!("tol must lie in (0, 1), got {tol}");
        }
        if !(run.optimizer_tol > 0.0 && run.optimizer_tol < 1.0) {
            bail!("optimizer_tol must lie in (0, 1), got {}", run.optimizer_tol);
        }
        match run.alpha {
            AlphaPolicy::Fixed { value } if !(value > 0.0) => bail!("alpha must be positive, got {value}"),
            AlphaPolicy::Search { lo, hi } if !(lo > 0.0 && lo <= hi) => {
                bail!("alpha search interval must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
            }
            _ => {}
        }
        for r in &self.reference {
            if !crate::report::is_known_quantity(&r.quantity) {
                bail!("reference quantity '{}' is not a report column", r.quantity);
            }
            if !(r.rel_tol > 0.0) {
                bail!("reference rel_tol must be positive, got {}", r.rel_tol);
            }
        }
        let mu_bound = match (&run.mu_bound, run.alpha) {
            (Some(m), _) => m.resolve()?,
            (None, AlphaPolicy::None) => MuBound::Constant(0.0),
            (None, _) => bail!("run.mu_bound is required when an alpha policy is set"),
        };
        Ok(RunConfig {
            potential,
            stability,
            negative_beyond_minimum: s.negative_beyond_minimum.or(catalog_nbm).unwrap_or(false),
            beta_values,
            alpha: run.alpha,
            mu_bound,
            tol,
            optimizer_tol: run.optimizer_tol,
            seed: o.seed.unwrap_or(run.seed),
            oracle: o.oracle || run.oracle,
            samples: run.samples,
            out: o.out.clone().or(self.output.path),
            format: o.format.or(self.output.format),
            references: self.reference,
        })
    }
}

impl PotentialSection {
    fn build(&self) -> Result<(RadialPotential, Option<StabilityData>, Option<bool>)> {
        if self.pieces.is_empty() {
            let entry = lookup(&self.name).with_context(|| format!("potential '{}'", self.name))?;
            return Ok((entry.potential, Some(entry.stability), Some(entry.negative_beyond_minimum)));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let expr = Expr::parse(&p.expr).with_context(|| format!("expression '{}'", p.expr))?;
                Ok(Piece { below: p.below, expr })
            })
            .collect::<Result<Vec<_>>>()?;
        let pw = Piecewise::new(pieces).map_err(|e| anyhow!("potential pieces: {e}"))?;
        let tail = self
            .tail_exponent
            .ok_or_else(|| anyhow!("potential.tail_exponent is required for expression potentials"))?;
        let p = RadialPotential::piecewise(&self.name, pw, self.dimension, tail)
            .with_context(|| format!("potential '{}'", self.name))?;
        Ok((p, None, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_resolve() {
        for (name, text) in PRESETS {
            let cfg = parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.resolve(&Overrides::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn empty_beta_grid() {
        let cfg = parse("[potential]\nname = \"lj\"\n[run]\nbeta = []\n").unwrap();
        let err = cfg.resolve(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("empty beta grid"));
    }

    #[test]
    fn expression_potential_needs_stability() {
        let text = r#"
            [potential]
            name = "soft"
            tail_exponent = 6
            [[potential.pieces]]
            expr = "r^-12 - 2*r^-6"
        "#;
        let err = parse(text).unwrap().resolve(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("b_lower"), "{err}");
        let text = format!("{text}\n[stability]\nb_lower = 8.61\nb_upper = 14.316\nbbar_upper = 14.331\n");
        let run = parse(&text).unwrap().resolve(&Overrides::default()).unwrap();
        assert!((run.stability.b_star - 1.0).abs() < 1e-8);
    }

    #[test]
    fn alpha_policies() {
        let text = "[potential]\nname = \"lj\"\n[run]\nmu_bound = \"lj\"\nalpha = { policy = \"fixed\", value = 0.6397 }\n";
        let run = parse(text).unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(run.alpha, AlphaPolicy::Fixed { value: 0.6397 });
        assert_eq!(run.mu_bound, MuBound::LennardJones);
        let text = "[potential]\nname = \"lj\"\n[run]\nalpha = { policy = \"search\", lo = 0.6, hi = 0.64 }\n";
        assert!(parse(text).unwrap().resolve(&Overrides::default()).is_err());
        let text = "[potential]\nname = \"lj\"\n[run]\nmu_bound = 50.0\nalpha = { policy = \"search\", lo = 0.7, hi = 0.64 }\n";
        assert!(parse(text).unwrap().resolve(&Overrides::default()).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse("[potential]\nname = \"lj\"\ncolour = 1\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let o = Overrides { beta: Some(vec![2.0, 3.0]), seed: Some(7), ..Overrides::default() };
        let run = parse(preset("hard-sphere").unwrap()).unwrap().resolve(&o).unwrap();
        assert_eq!(run.beta_values, vec![2.0, 3.0]);
        assert_eq!(run.seed, 7);
    }
}
