//! Workbench for finitely generated free-by-cyclic groups with unipotent
//! polynomially-growing monodromy: exact computation on finite balls.
//!
//! The pipeline: define a group and a filtered topological representative,
//! validate it, split along topmost edges into the cyclic hierarchy, collect
//! maximal product subgroups, cone them off in a finite Cayley ball, and run
//! coarse-geometry diagnostics (hyperbolicity defect, bottleneck width,
//! acylindricity tables, Morse and stability checks).

pub mod error;
pub mod words;
pub mod stallings;
pub mod group;
pub mod rep;

pub use error::{Error, Result};
pub use group::{ball, geodesics_between, CayleyBall, FbcElement, FbcGroup};
pub use stallings::StallingsAutomaton;
pub use words::{Basis, FreeAutomorphism, ReducedWord};

pub mod subgroups;
pub mod hierarchy;
pub mod tree;
pub mod coned;
pub mod morse;
pub mod defs;

#[cfg(test)]
pub(crate) mod fixtures;
