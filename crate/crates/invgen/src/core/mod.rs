//! Cube points, Boolean-function representations and the brute-force
//! oracles every other module is tested against.

mod assignment;
mod func;
pub mod io;
mod mass;
mod oracle;

pub use assignment::{Assignment, MAX_DIM};
pub use func::{BoolFunc, Conjunction, Dnf, FeatureDisjunction, Literal, Ltf, W_MAX};
pub use mass::{tv_exact, tv_uniform_sets, MassTable};
pub use oracle::{
    brute_force_satisfying_set, chernoff_samples, estimate_mean, for_each_point, mean_of, satisfying_count,
    ENUMERATION_CAP,
};
