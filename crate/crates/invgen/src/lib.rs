//! Inverse approximate uniform generation.
//!
//! Given uniform samples from the satisfying set of an unknown Boolean
//! function drawn from a known class (integer-weight threshold functions,
//! DNF formulas, k-DNF formulas), the [`pipeline`] builds a sampler whose
//! output distribution is close in total variation to the uniform
//! distribution on that satisfying set.
//!
//! The building blocks live in their own modules:
//!
//! * [`core`]: cube points, function representations, exact oracles.
//! * [`genct`]: forward counting and uniform generation.
//! * [`sq`]: statistical-query simulation from positive examples and SQ learners.
//! * [`densify`]: densifiers, including the LP-based online halfspace learner.
//! * [`hypsel`]: pairwise hypothesis competitions and the round-robin tournament.
//! * [`pipeline`]: the known-bias inverter, the certificate check and the outer grid search.
//! * [`graphauto`]: uniform sampling of a graph's automorphism group from examples.

pub mod core;
pub mod densify;
pub mod error;
pub mod genct;
pub mod graphauto;
pub mod hypsel;
pub mod pipeline;
pub mod seed;
pub mod sq;

pub use crate::core::{Assignment, BoolFunc, Conjunction, Dnf, FeatureDisjunction, Literal, Ltf, MassTable};
pub use error::{Error, Result};
pub use genct::BottomSampler;
pub use seed::SeedTree;
