//! Valuatively independent bases: tropicalization, certification at the
//! vertices of a refinement, construction by simultaneous diagonalization,
//! nesting across levels, cone gradings and graded-ring sample checks.
//!
//! Independence is decided at finitely many valuations. On each cell of
//! [`crate::skeleton::refine`] both `v(sum a_i theta_i)` and
//! `min v(a_i theta_i)` are linear in the normalized coordinates, so equality
//! at the cell vertices implies equality on the whole cell.
//!
//! No hypothesis on the geometric origin of the input is checked. An
//! obstruction reported for data that does come from a log Calabi-Yau
//! degeneration would point to a bug here, not a counterexample.

mod basis;
mod cone;
mod ring;
mod tropical;

use crate::skeleton::SkeletonPoint;
use crate::valuation::MonomialValuation;

pub use basis::{
    check_independence, construct_basis, equivariant_diagonalize, extend_basis, Certificate, Construction,
    Counterexample, ThetaBasis, Verdict,
};
pub use cone::{cone_assemble, cone_construct, cone_extract, ConeSpace, ORD_0, ORD_D};
pub use ring::{gr_ring_check, GrRingReport};
pub use tropical::{tropicalize, TropicalCell, TropicalFunction};

/// A valuation at which independence is certified: a skeleton point or one
/// of the auxiliary level valuations of a cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub label: String,
    pub valuation: MonomialValuation,
    pub point: Option<SkeletonPoint>,
}

impl Probe {
    pub fn at(point: SkeletonPoint) -> Self {
        let label = format!(
            "{:?}@[{}]",
            point.simplex,
            point.mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
        );
        Probe { label, valuation: point.valuation.clone(), point: Some(point) }
    }
}
