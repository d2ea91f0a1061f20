//! Filtrations of free modules over the truncated discrete valuation ring
//! `R = F[[t]]`: canonical submodules, graded pieces, simultaneous
//! diagonalization and level-by-level lifting of diagonalizing bases.

mod filtration;
mod graded;
mod lifting;
mod submodule;

pub use filtration::{DvrFiltration, Rescaled};
pub use graded::{
    diagonalize_dvr, dvr_graded_table, graded_table_at, jump_grid, multi_step, ord_vector,
    piece_bounds, rees_quotient_check, verify_span_identities, DiagonalizeOptions, DvrBasis,
    DvrDiagonalization, DvrGradedTable, DvrPiece,
};
pub use lifting::{
    constraint_matrix, diagonalize_mod, invert_matrix, lift_chain, torsor_transfer,
    ConstrainedMatrix, ModBasis,
};
pub use submodule::{ModVector, Submodule};
