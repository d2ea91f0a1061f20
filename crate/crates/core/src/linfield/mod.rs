//! Filtrations of finite-dimensional vector spaces over an exact field.
//!
//! A family of filtrations is simultaneously diagonalizable exactly when the
//! total dimension of its multigraded space equals `dim V`. In that case the
//! graded representatives, taken together, form a diagonalizing basis.

mod echelon;
mod filtration;
mod graded;
mod subspace;

pub use echelon::{nullspace, rank, rref, solve_combination};
pub use filtration::{multi_intersection, ord_filtration, ExtRational, FieldFiltration};
pub use graded::{
    diagonalize_field, graded_table, jump_multiset, verify_diagonalizes, DiagonalBasis,
    Diagonalization, GradedPiece, GradedTable,
};
pub use subspace::Subspace;
