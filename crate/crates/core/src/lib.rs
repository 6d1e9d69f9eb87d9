//! Modular and fusion data of rational vertex operator algebra orbifolds.
//!
//! The crate works entirely at the level of labels, S-matrices, characters
//! and group-theoretic bookkeeping:
//!
//! - [`modular_data`]: S-matrix axioms, Verlinde fusion, quantum and global
//!   dimensions, simple currents.
//! - [`qseries`]: exact truncated Puiseux series, eta/theta characters, the
//!   S-transformation, and the limit defining quantum dimensions.
//! - [`group_alg`]: finite groups, 2-cocycles, central extensions, projective
//!   characters and the twisted module algebra `A_alpha(G, S)`.
//! - [`drinfeld_double`]: the bialgebra `D(G)`, its irreducibles and fusion.
//! - [`orbifold`]: derivation of the `V^G` irreducibles from a twisted-sector
//!   descriptor, and every counting / global-dimension identity.
//! - [`models`]: bundled rank-one lattice, Heisenberg, holomorphic and
//!   tensor-power fixtures.

pub mod drinfeld_double;
pub mod error;
pub mod group_alg;
pub mod models;
pub mod modular_data;
pub mod orbifold;
pub mod qseries;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use modular_data::{ChargeConjugation, FusionTable, ModularData, QdimClass, ValidationReport};
pub use report::{Check, IdentityCheck, IdentityReport};
