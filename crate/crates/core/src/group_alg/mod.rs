//! Finite groups, unitary 2-cocycles, projective characters and the
//! twisted module algebra.

mod characters;
mod cocycle;
mod group;
mod twisted_algebra;

pub(crate) use characters::dual_group_exponents;
pub use characters::{
    character_orthogonality, dual_group, gram_matrix, projective_irreducibles, CharacterTable, ProjectiveCharacter,
};
pub use cocycle::{central_extension, pauli_cocycle, root_of_unity, Cocycle2};
pub use group::{symmetric_group_s3, FiniteGroup, GroupFile, Presentation};
pub use twisted_algebra::{a_alpha_multiply, ScaledBasis, TwistedModuleAlgebraSpec};
