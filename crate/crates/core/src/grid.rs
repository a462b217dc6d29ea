//! Sampling lattices and unit conventions.
//!
//! Everything in this crate lives on a uniform position lattice of even
//! length `n` spanning `q_extent` around `q_center`, with samples
//! `q_j = q_center + (j - n/2) dq`. Two momentum lattices derive from it:
//!
//! * the **Fourier** lattice `p_k = 2 pi hbar (k - n/2) / (n dq)`, the
//!   conjugate lattice on which the unitary Fourier transform of a state
//!   lives, and
//! * the **Wigner** lattice `p_k = pi hbar (k - n/2) / (n dq)`, with half
//!   the Fourier spacing, on which the discrete phase-space map lives.
//!
//! The half-spacing lattice falls out of evaluating the two-point
//! correlation on integer sample pairs (separation `2 s dq`); it is also
//! what makes the position marginal of the map equal `|psi(q_j)|^2` to
//! machine precision.
//!
//! Sampling guidance: the correlation product doubles spectral width, so a
//! state should be band-limited to `|p| < pi hbar / (2 dq)` (half the
//! Fourier range, equivalently the reach of the Wigner lattice), and its
//! envelope should decay below ~1e-12 at the grid edges. Out-of-grid
//! samples are treated as zero (compact support), never wrapped.
//!
//! The default unit system is dimensionless: `hbar = 1`, lengths quoted in
//! units of the relevant physical scale, momenta in `hbar`/length.

use crate::error::{Error, Result};

/// Action-scale constants. `h` is always `2 pi hbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    hbar: f64,
}

impl Constants {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::NonPositive {
                name: "hbar",
                value: hbar,
            });
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Planck constant, `2 pi hbar` exactly.
    pub fn h(&self) -> f64 {
        std::f64::consts::TAU * self.hbar
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

/// Uniform position lattice. Immutable after construction; cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n: usize,
    q_center: f64,
    q_extent: f64,
    dq: f64,
    constants: Constants,
}

/// Build a position lattice with `n` samples (even, >= 4) spanning
/// `q_extent` around `q_center`.
pub fn make_grid(n: usize, q_center: f64, q_extent: f64, hbar: f64) -> Result<SpatialGrid> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidGridSize { n });
    }
    if !q_center.is_finite() {
        return Err(Error::NonFinite {
            name: "q_center",
            value: q_center,
        });
    }
    if !(q_extent.is_finite() && q_extent > 0.0) {
        return Err(Error::NonPositive {
            name: "q_extent",
            value: q_extent,
        });
    }
    let constants = Constants::new(hbar)?;
    Ok(SpatialGrid {
        n,
        q_center,
        q_extent,
        dq: q_extent / n as f64,
        constants,
    })
}

impl SpatialGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q_center(&self) -> f64 {
        self.q_center
    }

    pub fn q_extent(&self) -> f64 {
        self.q_extent
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    /// Position of sample `j`.
    pub fn q(&self, j: usize) -> f64 {
        self.q_center + (j as f64 - self.n as f64 / 2.0) * self.dq
    }

    pub fn q_samples(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.q(j)).collect()
    }

    /// Index of the sample closest to `q` (clamped to the lattice).
    pub fn nearest_index(&self, q: f64) -> usize {
        let raw = (q - self.q_center) / self.dq + self.n as f64 / 2.0;
        raw.round().clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Conjugate lattice of the unitary Fourier transform.
    pub fn fourier_lattice(&self) -> MomentumGrid {
        MomentumGrid {
            spatial: *self,
            kind: MomentumKind::Fourier,
        }
    }

    /// Half-spacing lattice on which the phase-space map lives.
    pub fn wigner_lattice(&self) -> MomentumGrid {
        MomentumGrid {
            spatial: *self,
            kind: MomentumKind::Wigner,
        }
    }

    /// Band limit `pi hbar / (2 dq)` a state should respect to keep the
    /// phase-space transform alias-free.
    pub fn band_limit(&self) -> f64 {
        std::f64::consts::PI * self.hbar() / (2.0 * self.dq)
    }

    /// Lattice index of the coordinate origin, required by the
    /// convolution-style operators. Errors when `q = 0` is not a sample.
    pub(crate) fn origin_index(&self) -> Result<usize> {
        let raw = self.n as f64 / 2.0 - self.q_center / self.dq;
        let rounded = raw.round();
        if (raw - rounded).abs() > 1e-9 || rounded < 0.0 || rounded >= self.n as f64 {
            return Err(Error::OriginNotOnLattice);
        }
        Ok(rounded as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumKind {
    /// Spacing `2 pi hbar / (n dq)`.
    Fourier,
    /// Spacing `pi hbar / (n dq)`: half the Fourier spacing.
    Wigner,
}

/// Momentum lattice derived from a [`SpatialGrid`]; centered on `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    spatial: SpatialGrid,
    kind: MomentumKind,
}

impl MomentumGrid {
    pub fn spatial(&self) -> &SpatialGrid {
        &self.spatial
    }

    pub fn kind(&self) -> MomentumKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.spatial.n
    }

    pub fn hbar(&self) -> f64 {
        self.spatial.hbar()
    }

    /// Lattice spacing.
    pub fn dp(&self) -> f64 {
        let base =
            std::f64::consts::TAU * self.spatial.hbar() / (self.spatial.n as f64 * self.spatial.dq);
        match self.kind {
            MomentumKind::Fourier => base,
            MomentumKind::Wigner => base / 2.0,
        }
    }

    /// Momentum of sample `k`.
    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - self.spatial.n as f64 / 2.0) * self.dp()
    }

    pub fn p_samples(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.p(k)).collect()
    }
}
