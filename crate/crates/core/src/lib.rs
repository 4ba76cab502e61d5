//! Rigorous lower bounds on the convergence radii of the Mayer and virial
//! series for classical gases with stable, regular pair potentials.
//!
//! The crate is organised bottom-up:
//!
//! - [`potentials`]: radial pair potentials, their well depth `B*` and the
//!   literature stability constants `B`, `B̄`.
//! - [`quadrature`]: the integrals `C_v(β)`, `C̃_v(β)` and `C̆_v(β)`.
//! - [`basuev`]: certification of the Basuev condition at a given `α` and
//!   the choice of `α` minimising `C̆`.
//! - [`bounds`]: the closed-form radius bounds and the `F`, `F*`, `F̆`
//!   maximisations.
//! - [`oracle`]: direct evaluation of `c₂`, `c₃`, `β₂`, `β₃` to check the
//!   coefficient bounds numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basuev;
pub mod bounds;
pub mod optimize;
pub mod oracle;
pub mod potentials;
pub mod quadrature;

pub use basuev::{BasuevCertificate, BasuevError, MuBound};
pub use bounds::{BoundsReport, MayerRadii, VirialRadii};
pub use potentials::{CoreBehavior, RadialPotential, StabilityData};
pub use quadrature::{IntegralResult, PotentialConstants};
