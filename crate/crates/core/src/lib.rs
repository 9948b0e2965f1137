//! Exact arithmetic for surfaces, curves, and stable pairs of degree five.
//!
//! Everything here computes over the rational numbers with arbitrary
//! precision; there are no floating-point tolerances anywhere. The crate is
//! organized bottom-up:
//!
//! - [`rat`]: exact rational scalars that serialize as `"p/q"` strings.
//! - [`matrix`]: determinants, linear solves, and signatures of exact
//!   rational matrices.
//! - [`hjsing`]: continued-fraction expansions of cyclic quotient
//!   singularities, the class-T test, index-two covers, and log canonical
//!   thresholds of plane cusps.
//! - [`picard`]: Picard lattices of rational surfaces under iterated
//!   blow-ups, with named divisor classes tracked as strict transforms.
//! - [`birational`]: contraction of curve configurations, discrepancies,
//!   numerical pullback, and ampleness tests against a tester set.
//! - [`pairs`]: constructors for the stable pairs of degree five carrying a
//!   genus-six double cover, one per stratum of the moduli atlas.
//! - [`reduction`]: multi-component central fibers and the step-by-step
//!   reduction scenarios (base change, weighted blow-up, flips,
//!   contractions) that land on the [`pairs`] models.

pub mod birational;
pub mod hjsing;
pub mod matrix;
pub mod pairs;
pub mod picard;
pub mod rat;
pub mod reduction;

pub use rat::Rat;
