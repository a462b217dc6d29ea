//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be an even integer >= 4, got {n}")]
    InvalidGridSize { n: usize },

    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error(
        "state envelope reaches the grid edge (edge/peak amplitude {ratio:.3e} exceeds {limit:.1e}); \
         enlarge q_extent or recenter the grid"
    )]
    EnvelopeClipped { ratio: f64, limit: f64 },

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    #[error("phase-space maps live on different lattices")]
    LatticeMismatch,

    #[error(
        "superposition needs matching coefficient and state counts, got {coeffs} and {states}"
    )]
    SuperpositionArity { coeffs: usize, states: usize },

    #[error("hermite order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error(
        "grid too coarse for hermite order {order}: momentum reach {p_needed:.3} exceeds \
         half the band limit {p_half_limit:.3}"
    )]
    GridTooCoarse {
        order: usize,
        p_needed: f64,
        p_half_limit: f64,
    },

    #[error(
        "imaginary residue {residue:.3e} of the phase-space transform exceeds 1e-9 of the map scale; \
         the state is aliased or the input is inconsistent"
    )]
    AliasingResidue { residue: f64 },

    #[error("filter blocked the entire state; renormalized output undefined")]
    FullyBlocked,

    #[error("reference amplitude |psi(q0)|^2 = {value:.3e} is below 1e-6 of the marginal maximum")]
    ReferenceTooSmall { value: f64 },

    #[error("map purity {purity:.6} is too far from 1 to come from a pure state")]
    NotPure { purity: f64 },

    #[error("the coordinate origin does not lie on the grid lattice")]
    OriginNotOnLattice,

    #[error("direct-evaluation cross-check supports n <= {max}, got {n}")]
    DirectOracleTooLarge { n: usize, max: usize },

    #[error("observation planes must be sorted in ascending order")]
    UnsortedPlanes,
}
