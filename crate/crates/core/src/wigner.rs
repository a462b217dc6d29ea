//! Discrete phase-space transform and its companions: the unitary Fourier
//! transform, forward maps from either representation, cross terms,
//! marginals, normalization, overlap, and wavefunction recovery.
//!
//! # Discretization
//!
//! The map is built from the integer-pair correlation
//! `c_j[s] = conj(psi(q_{j-s})) psi(q_{j+s})`, i.e. the correlation
//! separation is `x = 2 s dq`. Indices that leave the grid contribute
//! zero (compact support, never periodic wrap). A length-`n` spectral
//! transform of `c_j` per position sample evaluates
//!
//! `w[j][k] = (2 dq / h) sum_s c_j[s] exp(-i p_k (2 s dq) / hbar)`
//!
//! on the half-spacing momentum lattice `p_k = pi hbar (k - n/2)/(n dq)`.
//! Two identities of this discretization carry the test suite:
//!
//! * the position marginal telescopes exactly,
//!   `sum_k w[j][k] dp = |psi(q_j)|^2` to machine precision, and
//! * the transform of a pure state is real up to rounding; the imaginary
//!   residue is checked (error above 1e-9 of the map scale) and then
//!   discarded.
//!
//! An `O(n^2)` direct evaluation of the same rule is kept alongside the
//! spectral path as a cross-check oracle for small grids.
//!
//! Completeness-type resolutions of identity over a truncated basis do
//! not converge pointwise on a finite lattice and are not asserted
//! anywhere; only the pairwise orthogonality of cross terms is validated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{upsample2_real, FftEngine};
use crate::grid::{MomentumGrid, SpatialGrid};
use crate::states::{MomentumWavefunction, PositionWavefunction, WaveRole};

/// Relative imaginary residue above which the transform refuses to
/// project a map to real values.
const RESIDUE_LIMIT: f64 = 1e-9;
/// Largest grid accepted by the direct-evaluation oracle.
const DIRECT_ORACLE_MAX_N: usize = 128;

/// Real-valued quasi-probability map on the `(q, p)` lattice,
/// row-major over `j * n + k` with `j` the position index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl WignerMap {
    pub(crate) fn from_values(grid: SpatialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n() * grid.n());
        Self { grid, values }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Momentum lattice the columns live on (half-spacing variant).
    pub fn p_lattice(&self) -> MomentumGrid {
        self.grid.wigner_lattice()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.grid.n() + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum_k w[j][k] dp`: the position density.
    pub fn marginal_q(&self) -> Vec<f64> {
        let n = self.grid.n();
        let dp = self.p_lattice().dp();
        (0..n)
            .map(|j| self.values[j * n..(j + 1) * n].iter().sum::<f64>() * dp)
            .collect()
    }

    /// `sum_j w[j][k] dq`: the momentum density on the half-spacing lattice.
    pub fn marginal_p(&self) -> Vec<f64> {
        let n = self.grid.n();
        let dq = self.grid.dq();
        let mut out = vec![0.0; n];
        for j in 0..n {
            let row = &self.values[j * n..(j + 1) * n];
            for (acc, v) in out.iter_mut().zip(row.iter()) {
                *acc += v;
            }
        }
        for acc in out.iter_mut() {
            *acc *= dq;
        }
        out
    }

    /// `sum w dq dp`; 1 for a unit-norm state.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dq() * self.p_lattice().dp()
    }

    /// `sum |w| dq dp`: the energy-style magnitude used for
    /// interference bookkeeping.
    pub fn abs_mass(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.dq() * self.p_lattice().dp()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest pointwise difference against another map on the same lattice.
    pub fn sup_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::LatticeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn mean_q(&self) -> f64 {
        let mq = self.marginal_q();
        let dq = self.grid.dq();
        let mass: f64 = mq.iter().sum::<f64>() * dq;
        mq.iter()
            .enumerate()
            .map(|(j, &w)| self.grid.q(j) * w)
            .sum::<f64>()
            * dq
            / mass
    }

    pub fn mean_p(&self) -> f64 {
        let mp = self.marginal_p();
        let lat = self.p_lattice();
        let mass: f64 = mp.iter().sum::<f64>() * lat.dp();
        mp.iter()
            .enumerate()
            .map(|(k, &w)| lat.p(k) * w)
            .sum::<f64>()
            * lat.dp()
            / mass
    }

    /// Position spread computed from the marginal.
    pub fn sigma_q(&self) -> f64 {
        let mq = self.marginal_q();
        let dq = self.grid.dq();
        let mass: f64 = mq.iter().sum::<f64>() * dq;
        let mean = self.mean_q();
        let var = mq
            .iter()
            .enumerate()
            .map(|(j, &w)| (self.grid.q(j) - mean).powi(2) * w)
            .sum::<f64>()
            * dq
            / mass;
        var.max(0.0).sqrt()
    }

    /// Momentum spread computed from the marginal.
    pub fn sigma_p(&self) -> f64 {
        let mp = self.marginal_p();
        let lat = self.p_lattice();
        let mass: f64 = mp.iter().sum::<f64>() * lat.dp();
        let mean = self.mean_p();
        let var = mp
            .iter()
            .enumerate()
            .map(|(k, &w)| (lat.p(k) - mean).powi(2) * w)
            .sum::<f64>()
            * lat.dp()
            / mass;
        var.max(0.0).sqrt()
    }
}

/// Complex bilinear phase-space map built from two different states;
/// its diagonal is the ordinary real map.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossWignerMap {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl CrossWignerMap {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn p_lattice(&self) -> MomentumGrid {
        self.grid.wigner_lattice()
    }

    pub fn value(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n() + k]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `2 Re` of the map: the interference contribution a conjugate pair
    /// of cross terms adds to a superposition's map.
    pub fn interference_part(&self) -> WignerMap {
        WignerMap::from_values(self.grid, self.values.iter().map(|v| 2.0 * v.re).collect())
    }
}

/// Phase-space inner product `integral W_a conj(W_b) dq dp` of two cross
/// maps. `h * cross_overlap(W_nm, W_n'm')` is `delta_nn' delta_mm'` for an
/// orthonormal family.
pub fn cross_overlap(a: &CrossWignerMap, b: &CrossWignerMap) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::LatticeMismatch);
    }
    let measure = a.grid.dq() * a.p_lattice().dp();
    Ok(a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| x * y.conj())
        .sum::<Complex64>()
        * measure)
}

/// Transition probability `h * integral W1 W2 dq dp`; equals
/// `|<psi1|psi2>|^2` for pure states.
pub fn overlap(w1: &WignerMap, w2: &WignerMap) -> Result<f64> {
    if w1.grid != w2.grid {
        return Err(Error::LatticeMismatch);
    }
    let measure = w1.grid.dq() * w1.p_lattice().dp() * w1.grid.constants().h();
    Ok(w1
        .values
        .iter()
        .zip(w2.values.iter())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * measure)
}

fn half_parity_sign(n: usize) -> f64 {
    // exp(-i pi n / 2) for even n
    if (n / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unitary Fourier transform onto the conjugate momentum lattice:
/// `phi(p) = h^(-1/2) sum_j psi(q_j) exp(-i p q_j / hbar) dq`.
pub fn fourier_transform(psi: &PositionWavefunction) -> MomentumWavefunction {
    let grid = *psi.grid();
    let n = grid.n();
    let mut engine = FftEngine::new();
    let fft = engine.forward(n);
    let mut buf: Vec<Complex64> = psi
        .amp()
        .iter()
        .enumerate()
        .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
        .collect();
    fft.process(&mut buf);

    let lattice = grid.fourier_lattice();
    let hbar = grid.hbar();
    let scale = grid.dq() / grid.constants().h().sqrt() * half_parity_sign(n);
    let amp: Vec<Complex64> = buf
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let center_phase = Complex64::from_polar(1.0, -lattice.p(k) * grid.q_center() / hbar);
            v * sign * scale * center_phase
        })
        .collect();
    MomentumWavefunction::from_parts(lattice, amp, psi.role())
}

/// Inverse of [`fourier_transform`]:
/// `psi(q) = h^(-1/2) sum_k phi(p_k) exp(i p_k q / hbar) dp`.
pub fn inverse_fourier_transform(phi: &MomentumWavefunction) -> PositionWavefunction {
    let lattice = *phi.lattice();
    let grid = *lattice.spatial();
    let n = grid.n();
    let hbar = grid.hbar();
    let mut engine = FftEngine::new();
    let ifft = engine.inverse(n);
    let mut buf: Vec<Complex64> = phi
        .amp()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let center_phase = Complex64::from_polar(1.0, lattice.p(k) * grid.q_center() / hbar);
            a * sign * center_phase
        })
        .collect();
    ifft.process(&mut buf);

    let scale = lattice.dp() / grid.constants().h().sqrt() * half_parity_sign(n);
    let amp: Vec<Complex64> = buf
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v * sign * scale
        })
        .collect();
    PositionWavefunction::from_parts(grid, amp, phi.role())
}

/// Build the complex correlation row for position sample `j`, folded and
/// parity-twiddled so a plain forward FFT lands on the centered momentum
/// lattice.
fn correlation_row(amp_a: &[Complex64], amp_b: &[Complex64], j: usize, row: &mut [Complex64]) {
    let n = row.len();
    row.fill(Complex64::ZERO);
    let reach = j.min(n - 1 - j) as isize;
    for s in -reach..=reach {
        let jm = (j as isize - s) as usize;
        let jp = (j as isize + s) as usize;
        let mut val = amp_a[jm].conj() * amp_b[jp];
        if s & 1 != 0 {
            val = -val;
        }
        let m = s.rem_euclid(n as isize) as usize;
        row[m] = val;
    }
}

fn project_real(grid: SpatialGrid, complex_values: Vec<Complex64>) -> Result<WignerMap> {
    let mut max_re = 0.0_f64;
    let mut max_im = 0.0_f64;
    for v in &complex_values {
        max_re = max_re.max(v.re.abs());
        max_im = max_im.max(v.im.abs());
    }
    if max_re > 0.0 && max_im > RESIDUE_LIMIT * max_re {
        return Err(Error::AliasingResidue {
            residue: max_im / max_re,
        });
    }
    Ok(WignerMap::from_values(
        grid,
        complex_values.into_iter().map(|v| v.re).collect(),
    ))
}

/// Forward map from the position representation.
pub fn wigner_from_position(psi: &PositionWavefunction) -> Result<WignerMap> {
    let cross = cross_wigner(psi, psi)?;
    project_real(cross.grid, cross.values)
}

/// Bilinear cross map of two states sharing a grid; the diagonal case
/// reproduces [`wigner_from_position`] exactly.
pub fn cross_wigner(
    psi_a: &PositionWavefunction,
    psi_b: &PositionWavefunction,
) -> Result<CrossWignerMap> {
    if psi_a.grid() != psi_b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *psi_a.grid();
    let n = grid.n();
    let mut engine = FftEngine::new();
    let fft = engine.forward(n);
    let scale = 2.0 * grid.dq() / grid.constants().h();

    let mut values = vec![Complex64::ZERO; n * n];
    let mut row = vec![Complex64::ZERO; n];
    for j in 0..n {
        correlation_row(psi_a.amp(), psi_b.amp(), j, &mut row);
        fft.process(&mut row);
        for (k, v) in row.iter().enumerate() {
            values[j * n + k] = v * scale;
        }
    }
    Ok(CrossWignerMap { grid, values })
}

/// Direct `O(n^2)`-per-row evaluation of the same discretization rule,
/// kept as an independent cross-check oracle for small grids.
pub fn wigner_from_position_direct(psi: &PositionWavefunction) -> Result<WignerMap> {
    let grid = *psi.grid();
    let n = grid.n();
    if n > DIRECT_ORACLE_MAX_N {
        return Err(Error::DirectOracleTooLarge {
            n,
            max: DIRECT_ORACLE_MAX_N,
        });
    }
    let amp = psi.amp();
    let scale = 2.0 * grid.dq() / grid.constants().h();
    let mut values = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        let reach = j.min(n - 1 - j) as isize;
        for k in 0..n {
            let k_centered = k as f64 - n as f64 / 2.0;
            let mut acc = Complex64::ZERO;
            for s in -reach..=reach {
                let jm = (j as isize - s) as usize;
                let jp = (j as isize + s) as usize;
                let angle = -std::f64::consts::TAU * k_centered * s as f64 / n as f64;
                acc += amp[jm].conj() * amp[jp] * Complex64::from_polar(1.0, angle);
            }
            values[j * n + k] = acc * scale;
        }
    }
    project_real(grid, values)
}

/// Amplitudes of the momentum representation on the half-spacing lattice
/// (length `2n`, `p = (k2 - n) dp_wigner`), obtained by transforming the
/// position samples on a zero-padded grid of doubled extent. Exact for
/// states supported inside the original grid.
pub(crate) fn fine_momentum_amplitudes(
    engine: &mut FftEngine,
    grid: &SpatialGrid,
    amp: &[Complex64],
) -> Vec<Complex64> {
    let n = grid.n();
    let m = 2 * n;
    let fft = engine.forward(m);
    let mut buf = vec![Complex64::ZERO; m];
    for (j, a) in amp.iter().enumerate() {
        let j2 = j + n / 2;
        buf[j2] = if j2 % 2 == 0 { *a } else { -*a };
    }
    fft.process(&mut buf);
    let dp_fine = grid.wigner_lattice().dp();
    let hbar = grid.hbar();
    let scale = grid.dq() / grid.constants().h().sqrt() * half_parity_sign(m);
    buf.iter()
        .enumerate()
        .map(|(k2, v)| {
            let sign = if k2 % 2 == 0 { 1.0 } else { -1.0 };
            let p = (k2 as f64 - n as f64) * dp_fine;
            v * sign * scale * Complex64::from_polar(1.0, -p * grid.q_center() / hbar)
        })
        .collect()
}

/// `|phi|^2` evaluated on the half-spacing momentum lattice straight from
/// the position samples (zero-padded transform). Serves as the
/// independent reference for [`WignerMap::marginal_p`].
pub fn momentum_density_halfstep(psi: &PositionWavefunction) -> Vec<f64> {
    let grid = *psi.grid();
    let n = grid.n();
    let mut engine = FftEngine::new();
    let fine = fine_momentum_amplitudes(&mut engine, &grid, psi.amp());
    (0..n).map(|k| fine[k + n / 2].norm_sqr()).collect()
}

/// Forward map from the momentum representation: mirror correlation over
/// the half-spacing momentum lattice, transformed along the separation
/// coordinate back to the position lattice.
pub fn wigner_from_momentum(phi: &MomentumWavefunction) -> Result<WignerMap> {
    let grid = *phi.lattice().spatial();
    let n = grid.n();
    let hbar = grid.hbar();
    let mut engine = FftEngine::new();

    // resample phi onto the half-spacing lattice (exact trigonometric
    // interpolation under the compact-support convention)
    let chi = inverse_fourier_transform(phi);
    let fine = fine_momentum_amplitudes(&mut engine, &grid, chi.amp());

    let dp_w = grid.wigner_lattice().dp();
    let ifft = engine.inverse(n);
    let scale = 2.0 * dp_w / grid.constants().h();
    let two_n = 2 * n;

    let mut values = vec![Complex64::ZERO; n * n];
    let mut fold = vec![Complex64::ZERO; n];
    for k in 0..n {
        let center = k + n / 2;
        fold.fill(Complex64::ZERO);
        for s in -(n as isize)..(n as isize) {
            let a = center as isize - s;
            let b = center as isize + s;
            if a < 0 || b < 0 || a >= two_n as isize || b >= two_n as isize {
                continue;
            }
            let mut val = fine[a as usize].conj() * fine[b as usize];
            if grid.q_center() != 0.0 {
                val *= Complex64::from_polar(1.0, grid.q_center() * 2.0 * s as f64 * dp_w / hbar);
            }
            fold[s.rem_euclid(n as isize) as usize] += val;
        }
        let mut buf: Vec<Complex64> = fold
            .iter()
            .enumerate()
            .map(|(sp, v)| if sp % 2 == 0 { *v } else { -*v })
            .collect();
        ifft.process(&mut buf);
        for (j, v) in buf.iter().enumerate() {
            values[j * n + k] = v * scale;
        }
    }
    project_real(grid, values)
}

/// Reference point for wavefunction recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Use the argmax of the position marginal.
    Auto,
    /// Force a specific lattice index.
    Index(usize),
}

/// Recover the wavefunction (up to one global phase) from the map of a
/// pure state, anchored at a reference point of non-negligible density.
/// Mid-lattice correlation midpoints are filled in by band-limited
/// interpolation along `q`.
pub fn reconstruct_position(map: &WignerMap, reference: Reference) -> Result<PositionWavefunction> {
    let grid = *map.grid();
    let n = grid.n();

    let purity = overlap(map, map)?;
    if (purity - 1.0).abs() > 1e-3 {
        return Err(Error::NotPure { purity });
    }

    let mq = map.marginal_q();
    let j0 = match reference {
        Reference::Auto => mq
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(j, _)| j)
            .unwrap_or(0),
        Reference::Index(j) => {
            if j >= n {
                return Err(Error::ReferenceTooSmall { value: 0.0 });
            }
            j
        }
    };
    let max_density = mq.iter().copied().fold(0.0_f64, f64::max);
    if mq[j0] < 1e-6 * max_density {
        return Err(Error::ReferenceTooSmall { value: mq[j0] });
    }

    // upsample every momentum column along q so correlation midpoints
    // (q_j + q_j0)/2 are available at fine index j + j0
    let mut engine = FftEngine::new();
    let mut fine = vec![0.0; 2 * n * n];
    let mut column = vec![0.0; n];
    for k in 0..n {
        for j in 0..n {
            column[j] = map.value(j, k);
        }
        let up = upsample2_real(&mut engine, &column);
        for (j2, v) in up.into_iter().enumerate() {
            fine[j2 * n + k] = v;
        }
    }

    let dp = map.p_lattice().dp();
    let mut amp = vec![Complex64::ZERO; n];
    for (j, out) in amp.iter_mut().enumerate() {
        let mid = j + j0;
        let row = &fine[mid * n..(mid + 1) * n];
        let step = std::f64::consts::PI * (j as f64 - j0 as f64) / n as f64;
        let mut acc = Complex64::ZERO;
        for (k, &w) in row.iter().enumerate() {
            let angle = step * (k as f64 - n as f64 / 2.0);
            acc += w * Complex64::from_polar(1.0, angle);
        }
        *out = acc * dp;
    }

    PositionWavefunction::from_parts(grid, amp, WaveRole::State).renormalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::states::{double_slit_state, gaussian_state, hermite_gauss_state};

    fn sup_c(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn fourier_gaussian_pair_and_parseval() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 2.0, 0.0, 0.0).unwrap();
        let phi = fourier_transform(&psi);
        assert!((phi.norm_sq() - psi.norm_sq()).abs() < 1e-12);
        // width hbar / q_i in momentum
        let lat = *phi.lattice();
        let expect = |p: f64| (4.0 / std::f64::consts::PI).powf(0.25) * (-p * p * 2.0).exp();
        for k in 0..g.n() {
            let got = phi.amp()[k].norm();
            assert!(
                (got - expect(lat.p(k))).abs() < 1e-10,
                "k={k}: {got} vs {}",
                expect(lat.p(k))
            );
        }
    }

    #[test]
    fn fourier_round_trip() {
        let g = make_grid(256, 0.5, 24.0, 0.75).unwrap();
        let psi = gaussian_state(&g, 1.0, 1.3, 0.4, 0.1).unwrap();
        let back = inverse_fourier_transform(&fourier_transform(&psi));
        assert!(sup_c(psi.amp(), back.amp()) < 1e-13);
    }

    #[test]
    fn cat_momentum_fringe_period() {
        let g = make_grid(1024, 0.0, 32.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let phi = fourier_transform(&cat);
        let lat = *phi.lattice();
        // |phi|^2 ~ envelope * cos^2(d p / hbar): zeros every pi hbar / (2 d),
        // intensity period pi hbar / d
        let density: Vec<f64> = phi.amp().iter().map(|a| a.norm_sqr()).collect();
        let period = std::f64::consts::PI / 4.0;
        let k_at = |p: f64| ((p / lat.dp()) + g.n() as f64 / 2.0).round() as usize;
        let p0 = 0.0;
        let i0 = density[k_at(p0)];
        let i_half = density[k_at(p0 + period / 2.0)];
        assert!(
            i_half < 1e-6 * i0,
            "fringe minimum not deep: {i_half} vs {i0}"
        );
        let i_full = density[k_at(p0 + period)];
        assert!((i_full - i0 * (-(period * period)).exp()).abs() < 1e-6 * i0);
    }

    #[test]
    fn gaussian_map_matches_closed_form_pointwise() {
        let g = make_grid(512, 0.0, 16.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let map = wigner_from_position(&psi).unwrap();
        let lat = map.p_lattice();
        let c = g.constants();
        let mut sup = 0.0_f64;
        for j in 0..g.n() {
            for k in 0..g.n() {
                let want = crate::states::analytic_gaussian_wdf(g.q(j), lat.p(k), 1.0, c);
                sup = sup.max((map.value(j, k) - want).abs());
            }
        }
        assert!(sup < 1e-9, "sup {sup}");
    }

    #[test]
    fn spectral_path_matches_direct_oracle() {
        let g = make_grid(128, 0.0, 16.0, 1.0).unwrap();
        for psi in [
            gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap(),
            gaussian_state(&g, 1.0, 0.8, 1.5, 0.3).unwrap(),
            double_slit_state(&g, 3.0, 0.7).unwrap(),
        ] {
            let fftd = wigner_from_position(&psi).unwrap();
            let direct = wigner_from_position_direct(&psi).unwrap();
            assert!(fftd.sup_diff(&direct).unwrap() < 1e-12);
        }
    }

    #[test]
    fn direct_oracle_rejects_large_grids() {
        let g = make_grid(256, 0.0, 16.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            wigner_from_position_direct(&psi),
            Err(Error::DirectOracleTooLarge { .. })
        ));
    }

    #[test]
    fn marginal_q_is_exact() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 1.0, 1.2, 0.7, 0.2).unwrap();
        let map = wigner_from_position(&psi).unwrap();
        let mq = map.marginal_q();
        for (j, &m) in mq.iter().enumerate() {
            let density = psi.amp()[j].norm_sqr();
            assert!((m - density).abs() < 1e-13, "j={j}: {m} vs {density}");
        }
    }

    #[test]
    fn marginal_p_matches_zero_padded_density() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.9, 0.0).unwrap();
        let map = wigner_from_position(&psi).unwrap();
        let mp = map.marginal_p();
        let oracle = momentum_density_halfstep(&psi);
        for k in 0..g.n() {
            assert!((mp[k] - oracle[k]).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn zero_state_maps_to_zero() {
        let g = make_grid(64, 0.0, 8.0, 1.0).unwrap();
        let zero =
            PositionWavefunction::from_parts(g, vec![Complex64::ZERO; g.n()], WaveRole::State);
        let map = wigner_from_position(&zero).unwrap();
        assert_eq!(map.max_value(), 0.0);
        assert_eq!(map.min_value(), 0.0);
        let phi = fourier_transform(&zero);
        let map2 = wigner_from_momentum(&phi).unwrap();
        assert_eq!(map2.max_value(), 0.0);
    }

    #[test]
    fn momentum_path_agrees_with_position_path() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let gauss = gaussian_state(&g, 0.5, 1.1, 0.6, 0.0).unwrap();
        let from_q = wigner_from_position(&gauss).unwrap();
        let from_p = wigner_from_momentum(&fourier_transform(&gauss)).unwrap();
        assert!(from_q.sup_diff(&from_p).unwrap() < 1e-8);

        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let from_q = wigner_from_position(&cat).unwrap();
        let from_p = wigner_from_momentum(&fourier_transform(&cat)).unwrap();
        assert!(from_q.sup_diff(&from_p).unwrap() < 1e-7);
    }

    #[test]
    fn cross_diagonal_equals_auto_map() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.3, 1.0, 0.2, 0.0).unwrap();
        let cross = cross_wigner(&psi, &psi).unwrap();
        let auto = wigner_from_position(&psi).unwrap();
        let mut max_im = 0.0_f64;
        let mut max_diff = 0.0_f64;
        for (c, a) in cross.values().iter().zip(auto.values().iter()) {
            max_im = max_im.max(c.im.abs());
            max_diff = max_diff.max((c.re - a).abs());
        }
        assert!(max_im < 1e-12);
        assert!(max_diff < 1e-15);
    }

    #[test]
    fn cross_conjugation_symmetry() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let a = gaussian_state(&g, 1.0, 1.0, 0.0, 0.0).unwrap();
        let b = hermite_gauss_state(&g, 1, 1.0).unwrap();
        let ab = cross_wigner(&a, &b).unwrap();
        let ba = cross_wigner(&b, &a).unwrap();
        let sup = ab
            .values()
            .iter()
            .zip(ba.values().iter())
            .map(|(x, y)| (x - y.conj()).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-14);
    }

    #[test]
    fn overlap_purity_and_displaced_gaussians() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = wigner_from_position(&psi).unwrap();
        assert!((overlap(&w, &w).unwrap() - 1.0).abs() < 1e-8);

        let a = gaussian_state(&g, 1.0, 1.0, 0.0, 0.0).unwrap();
        let b = gaussian_state(&g, -1.0, 1.0, 0.0, 0.0).unwrap();
        let wa = wigner_from_position(&a).unwrap();
        let wb = wigner_from_position(&b).unwrap();
        let got = overlap(&wa, &wb).unwrap();
        let want = (-2.0_f64).exp();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");

        let h0 = hermite_gauss_state(&g, 0, 1.0).unwrap();
        let h1 = hermite_gauss_state(&g, 1, 1.0).unwrap();
        let w0 = wigner_from_position(&h0).unwrap();
        let w1 = wigner_from_position(&h1).unwrap();
        assert!(overlap(&w0, &w1).unwrap().abs() < 1e-9);
    }

    #[test]
    fn total_mass_and_bilinearity() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let map = wigner_from_position(&psi).unwrap();
        assert!((map.total_mass() - 1.0).abs() < 1e-9);
        let doubled = psi.scaled(Complex64::new(2.0, 0.0));
        let map4 = wigner_from_position(&doubled).unwrap();
        assert!((map4.total_mass() - 4.0).abs() < 1e-8);
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let cat_map = wigner_from_position(&cat).unwrap();
        assert!((cat_map.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cat_map_has_deep_negative_patches() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let map = wigner_from_position(&cat).unwrap();
        // the oscillatory term swings to the scale of the map's peak
        assert!(map.min_value() < -0.1 * map.max_value());
    }

    #[test]
    fn reconstructs_gaussian_and_cat() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.4, 1.0, 0.8, 0.0).unwrap();
        let map = wigner_from_position(&psi).unwrap();
        let rec = reconstruct_position(&map, Reference::Auto).unwrap();
        assert!(rec.fidelity(&psi).unwrap() >= 1.0 - 1e-8);

        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let map = wigner_from_position(&cat).unwrap();
        let rec = reconstruct_position(&map, Reference::Auto).unwrap();
        assert!(rec.fidelity(&cat).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn reconstruct_rejects_zero_reference() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let odd = hermite_gauss_state(&g, 1, 1.0).unwrap();
        let map = wigner_from_position(&odd).unwrap();
        // psi(0) = 0 for the odd state, so the midpoint anchor is unusable
        let err = reconstruct_position(&map, Reference::Index(g.n() / 2)).unwrap_err();
        assert!(matches!(err, Error::ReferenceTooSmall { .. }));
        // the automatic anchor works fine
        let rec = reconstruct_position(&map, Reference::Auto).unwrap();
        assert!(rec.fidelity(&odd).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn translation_covariance_whole_samples() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let shift = 16usize;
        let mut shifted_amp = vec![Complex64::ZERO; g.n()];
        for j in 0..g.n() - shift {
            shifted_amp[j + shift] = psi.amp()[j];
        }
        let shifted = PositionWavefunction::from_parts(g, shifted_amp, WaveRole::State);
        let w = wigner_from_position(&psi).unwrap();
        let ws = wigner_from_position(&shifted).unwrap();
        let n = g.n();
        let mut sup = 0.0_f64;
        for j in 0..n - shift {
            for k in 0..n {
                sup = sup.max((ws.value(j + shift, k) - w.value(j, k)).abs());
            }
        }
        assert!(sup < 1e-14, "sup {sup}");
    }

    #[test]
    fn modulation_covariance_lattice_momentum() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let lat = g.wigner_lattice();
        let k0 = 12usize;
        let p_shift = k0 as f64 * lat.dp();
        let modulated_amp: Vec<Complex64> = psi
            .amp()
            .iter()
            .enumerate()
            .map(|(j, a)| a * Complex64::from_polar(1.0, p_shift * g.q(j) / g.hbar()))
            .collect();
        let modulated = PositionWavefunction::from_parts(g, modulated_amp, WaveRole::State);
        let w = wigner_from_position(&psi).unwrap();
        let wm = wigner_from_position(&modulated).unwrap();
        let n = g.n();
        let mut sup = 0.0_f64;
        for j in 0..n {
            for k in 0..n - k0 {
                sup = sup.max((wm.value(j, k + k0) - w.value(j, k)).abs());
            }
        }
        assert!(sup < 1e-12, "sup {sup}");
    }
}
