//! Filtering, detection, and interference bookkeeping.
//!
//! Every filter form exists twice: once on the wavefunction path
//! (pointwise product or windowed convolution of amplitudes) and once on
//! the phase-space path (partial convolution of maps along one axis).
//! The two paths describe the same physics and the test suite holds them
//! to ~1e-7 of each other; keeping both makes each an oracle for the
//! other.
//!
//! * position filter: product along `q`, map convolution along `p`;
//! * momentum filter: product along `p`, map convolution along `q`;
//! * generalized position/momentum filters: amplitude convolution with
//!   a modulated kernel, map convolution along `q`/`p` with the input
//!   map pre-shifted along the conjugate axis;
//! * detection: full 2-D convolution of maps, always nonnegative, equal
//!   to the squared modulus of a windowed transform of the amplitudes.
//!
//! Convolutions are linear (zero-padded), never circular: states have
//! compact support and wraparound would alias interference fringes.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fractional_shift_real, linear_convolve_window, FftEngine};
use crate::states::{MomentumWavefunction, PositionWavefunction, WaveRole};
use crate::wigner::WignerMap;

/// Result of pushing a state through a filter. `raw` keeps the memory of
/// the input (unnormalized); `renormalized` is the unit-norm copy used
/// for fidelity and visibility metrics, absent when the filter blocked
/// everything. `passed_fraction` is `norm^2(raw) / norm^2(input)`.
#[derive(Debug, Clone)]
pub struct FilteredOutput<W> {
    pub raw: W,
    pub renormalized: Option<W>,
    pub passed_fraction: f64,
}

impl<W> FilteredOutput<W> {
    pub fn is_blocked(&self) -> bool {
        self.renormalized.is_none()
    }
}

/// A filter in one of the four representations. Offsets are only
/// meaningful for the generalized forms, mirroring how the output
/// wavefunctions are defined.
#[derive(Debug, Clone)]
pub enum FilterSpec {
    Position {
        transmittance: PositionWavefunction,
    },
    Momentum {
        transmittance: MomentumWavefunction,
    },
    GeneralPosition {
        transmittance: PositionWavefunction,
        p0: f64,
    },
    GeneralMomentum {
        transmittance: MomentumWavefunction,
        q0: f64,
    },
}

fn finish_position(
    input: &PositionWavefunction,
    raw: PositionWavefunction,
) -> FilteredOutput<PositionWavefunction> {
    let passed = raw.norm_sq() / input.norm_sq();
    let renormalized = raw.renormalized().ok();
    FilteredOutput {
        raw,
        renormalized,
        passed_fraction: passed,
    }
}

fn finish_momentum(
    input: &MomentumWavefunction,
    raw: MomentumWavefunction,
) -> FilteredOutput<MomentumWavefunction> {
    let passed = raw.norm_sq() / input.norm_sq();
    let renormalized = raw.renormalized().ok();
    FilteredOutput {
        raw,
        renormalized,
        passed_fraction: passed,
    }
}

/// Pointwise transmission in the position representation:
/// `psi_out(q) = psi_in(q) psi_f(q)`.
pub fn apply_position_filter(
    input: &PositionWavefunction,
    transmittance: &PositionWavefunction,
) -> Result<FilteredOutput<PositionWavefunction>> {
    if input.grid() != transmittance.grid() {
        return Err(Error::GridMismatch);
    }
    let amp: Vec<Complex64> = input
        .amp()
        .iter()
        .zip(transmittance.amp().iter())
        .map(|(a, t)| a * t)
        .collect();
    let raw = PositionWavefunction::from_parts(*input.grid(), amp, WaveRole::State);
    Ok(finish_position(input, raw))
}

/// Pointwise transmission in the momentum representation:
/// `phi_out(p) = phi_in(p) phi_f(p)`.
pub fn apply_momentum_filter(
    input: &MomentumWavefunction,
    transmittance: &MomentumWavefunction,
) -> Result<FilteredOutput<MomentumWavefunction>> {
    if input.lattice() != transmittance.lattice() {
        return Err(Error::LatticeMismatch);
    }
    let amp: Vec<Complex64> = input
        .amp()
        .iter()
        .zip(transmittance.amp().iter())
        .map(|(a, t)| a * t)
        .collect();
    let raw = MomentumWavefunction::from_parts(*input.lattice(), amp, WaveRole::State);
    Ok(finish_momentum(input, raw))
}

/// Generalized position filter:
/// `psi_out(q) = h^(-1/2) sum_q' psi_in(q') psi_f(q - q') exp(i p0 q'/hbar) dq`.
pub fn general_filter_position(
    input: &PositionWavefunction,
    transmittance: &PositionWavefunction,
    p0: f64,
) -> Result<FilteredOutput<PositionWavefunction>> {
    if input.grid() != transmittance.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *input.grid();
    let origin = grid.origin_index()?;
    let hbar = grid.hbar();
    let modulated: Vec<Complex64> = input
        .amp()
        .iter()
        .enumerate()
        .map(|(j, a)| a * Complex64::from_polar(1.0, p0 * grid.q(j) / hbar))
        .collect();
    let mut engine = FftEngine::new();
    let conv = linear_convolve_window(&mut engine, &modulated, transmittance.amp(), origin);
    let scale = grid.dq() / grid.constants().h().sqrt();
    let amp: Vec<Complex64> = conv.into_iter().map(|v| v * scale).collect();
    let raw = PositionWavefunction::from_parts(grid, amp, WaveRole::State);
    Ok(finish_position(input, raw))
}

/// Generalized momentum filter:
/// `phi_out(p) = h^(-1/2) sum_p' phi_in(p') phi_f(p - p') exp(-i q0 p'/hbar) dp`.
pub fn general_filter_momentum(
    input: &MomentumWavefunction,
    transmittance: &MomentumWavefunction,
    q0: f64,
) -> Result<FilteredOutput<MomentumWavefunction>> {
    if input.lattice() != transmittance.lattice() {
        return Err(Error::LatticeMismatch);
    }
    let lattice = *input.lattice();
    let hbar = lattice.hbar();
    let modulated: Vec<Complex64> = input
        .amp()
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -q0 * lattice.p(k) / hbar))
        .collect();
    let mut engine = FftEngine::new();
    // the momentum lattice is centered: p = 0 sits at index n/2
    let conv = linear_convolve_window(
        &mut engine,
        &modulated,
        transmittance.amp(),
        lattice.n() / 2,
    );
    let scale = lattice.dp() / lattice.spatial().constants().h().sqrt();
    let amp: Vec<Complex64> = conv.into_iter().map(|v| v * scale).collect();
    let raw = MomentumWavefunction::from_parts(lattice, amp, WaveRole::State);
    Ok(finish_momentum(input, raw))
}

/// Apply any [`FilterSpec`] to a position-representation state, moving
/// through the momentum representation where the filter demands it.
pub fn apply_filter_spec(
    input: &PositionWavefunction,
    spec: &FilterSpec,
) -> Result<FilteredOutput<PositionWavefunction>> {
    use crate::wigner::{fourier_transform, inverse_fourier_transform};
    match spec {
        FilterSpec::Position { transmittance } => apply_position_filter(input, transmittance),
        FilterSpec::GeneralPosition { transmittance, p0 } => {
            general_filter_position(input, transmittance, *p0)
        }
        FilterSpec::Momentum { transmittance } => {
            let phi = fourier_transform(input);
            let out = apply_momentum_filter(&phi, transmittance)?;
            let raw = inverse_fourier_transform(&out.raw);
            Ok(finish_position(input, raw))
        }
        FilterSpec::GeneralMomentum { transmittance, q0 } => {
            let phi = fourier_transform(input);
            let out = general_filter_momentum(&phi, transmittance, *q0)?;
            let raw = inverse_fourier_transform(&out.raw);
            Ok(finish_position(input, raw))
        }
    }
}

fn lattice_check(a: &WignerMap, b: &WignerMap) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

/// Convolve two maps along the momentum axis, row by row in `q`:
/// `out(q, p) = sum_p' a(q, p') b(q, p - p') dp`.
fn convolve_along_p(a: &WignerMap, b: &WignerMap) -> WignerMap {
    let n = a.n();
    let dp = a.p_lattice().dp();
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut row_a = vec![Complex64::ZERO; n];
    let mut row_b = vec![Complex64::ZERO; n];
    for j in 0..n {
        for k in 0..n {
            row_a[k] = Complex64::new(a.value(j, k), 0.0);
            row_b[k] = Complex64::new(b.value(j, k), 0.0);
        }
        let conv = linear_convolve_window(&mut engine, &row_a, &row_b, n / 2);
        for (k, v) in conv.into_iter().enumerate() {
            values[j * n + k] = v.re * dp;
        }
    }
    WignerMap::from_values(*a.grid(), values)
}

/// Convolve two maps along the position axis, column by column in `p`:
/// `out(q, p) = sum_q' a(q', p) b(q - q', p) dq`.
fn convolve_along_q(a: &WignerMap, b: &WignerMap) -> Result<WignerMap> {
    let n = a.n();
    let dq = a.grid().dq();
    let origin = a.grid().origin_index()?;
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut col_a = vec![Complex64::ZERO; n];
    let mut col_b = vec![Complex64::ZERO; n];
    for k in 0..n {
        for j in 0..n {
            col_a[j] = Complex64::new(a.value(j, k), 0.0);
            col_b[j] = Complex64::new(b.value(j, k), 0.0);
        }
        let conv = linear_convolve_window(&mut engine, &col_a, &col_b, origin);
        for (j, v) in conv.into_iter().enumerate() {
            values[j * n + k] = v.re * dq;
        }
    }
    Ok(WignerMap::from_values(*a.grid(), values))
}

/// Shift a map along `p` by `p_shift` (band-limited fractional shift per
/// position row).
pub(crate) fn shift_map_p(map: &WignerMap, p_shift: f64) -> WignerMap {
    let n = map.n();
    let delta = p_shift / map.p_lattice().dp();
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for j in 0..n {
        for k in 0..n {
            row[k] = map.value(j, k);
        }
        fractional_shift_real(&mut engine, &mut row, delta);
        values[j * n..(j + 1) * n].copy_from_slice(&row);
    }
    WignerMap::from_values(*map.grid(), values)
}

/// Shift a map along `q` by `q_shift` (band-limited fractional shift per
/// momentum column).
pub(crate) fn shift_map_q(map: &WignerMap, q_shift: f64) -> WignerMap {
    let n = map.n();
    let delta = q_shift / map.grid().dq();
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for k in 0..n {
        for j in 0..n {
            col[j] = map.value(j, k);
        }
        fractional_shift_real(&mut engine, &mut col, delta);
        for j in 0..n {
            values[j * n + k] = col[j];
        }
    }
    WignerMap::from_values(*map.grid(), values)
}

/// Phase-space form of the position filter: multiplication along `q`,
/// convolution along `p`.
pub fn filter_phase_space_position(w_in: &WignerMap, w_f: &WignerMap) -> Result<WignerMap> {
    lattice_check(w_in, w_f)?;
    Ok(convolve_along_p(w_in, w_f))
}

/// Phase-space form of the momentum filter: multiplication along `p`,
/// convolution along `q`.
pub fn filter_phase_space_momentum(w_in: &WignerMap, w_f: &WignerMap) -> Result<WignerMap> {
    lattice_check(w_in, w_f)?;
    convolve_along_q(w_in, w_f)
}

/// Phase-space form of the generalized position filter: the input map is
/// displaced by `p0` along `p`, then convolved with the filter map along `q`.
pub fn general_filter_phase_space_position(
    w_in: &WignerMap,
    w_f: &WignerMap,
    p0: f64,
) -> Result<WignerMap> {
    lattice_check(w_in, w_f)?;
    let shifted = if p0 == 0.0 {
        w_in.clone()
    } else {
        shift_map_p(w_in, p0)
    };
    convolve_along_q(&shifted, w_f)
}

/// Phase-space form of the generalized momentum filter: the input map is
/// displaced by `q0` along `q`, then convolved with the filter map along `p`.
pub fn general_filter_phase_space_momentum(
    w_in: &WignerMap,
    w_f: &WignerMap,
    q0: f64,
) -> Result<WignerMap> {
    lattice_check(w_in, w_f)?;
    let shifted = if q0 == 0.0 {
        w_in.clone()
    } else {
        shift_map_q(w_in, q0)
    };
    Ok(convolve_along_p(&shifted, w_f))
}

/// Detection map: full 2-D convolution of the state map with the
/// detector map, `sum W_in(q', p') W_d(q - q', p - p') dq dp`.
/// Nonnegative up to rounding.
pub fn detect(w_in: &WignerMap, w_d: &WignerMap) -> Result<WignerMap> {
    lattice_check(w_in, w_d)?;
    let grid = *w_in.grid();
    let n = grid.n();
    let origin = grid.origin_index()?;
    let m = 2 * n;
    let mut engine = FftEngine::new();
    let fwd = engine.forward(m);
    let inv = engine.inverse(m);

    // zero-padded 2-D spectra, built with row FFTs then column FFTs
    let spectrum = |map: &WignerMap| -> Vec<Complex64> {
        let mut buf = vec![Complex64::ZERO; m * m];
        for j in 0..n {
            for k in 0..n {
                buf[j * m + k] = Complex64::new(map.value(j, k), 0.0);
            }
        }
        for row in buf.chunks_exact_mut(m) {
            fwd.process(row);
        }
        let mut col = vec![Complex64::ZERO; m];
        for k in 0..m {
            for j in 0..m {
                col[j] = buf[j * m + k];
            }
            fwd.process(&mut col);
            for j in 0..m {
                buf[j * m + k] = col[j];
            }
        }
        buf
    };
    let mut fa = spectrum(w_in);
    let fb = spectrum(w_d);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= *y;
    }
    drop(fb);
    let mut col = vec![Complex64::ZERO; m];
    for k in 0..m {
        for j in 0..m {
            col[j] = fa[j * m + k];
        }
        inv.process(&mut col);
        for j in 0..m {
            fa[j * m + k] = col[j];
        }
    }
    for row in fa.chunks_exact_mut(m) {
        inv.process(row);
    }

    let measure = grid.dq() * grid.wigner_lattice().dp() / ((m * m) as f64);
    let mut values = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            values[j * n + k] = fa[(j + origin) * m + (k + n / 2)].re * measure;
        }
    }
    Ok(WignerMap::from_values(grid, values))
}

/// Amplitude form of the detection map:
/// `h^(-1) |sum_q' psi_in(q') conj(psi_d(q - q')) exp(-i p q'/hbar) dq|^2`
/// on the same `(q, p)` lattice. Manifestly nonnegative; agrees with
/// [`detect`] applied to the corresponding maps to discretization
/// accuracy.
pub fn detect_from_states(
    psi_in: &PositionWavefunction,
    psi_d: &PositionWavefunction,
) -> Result<WignerMap> {
    if psi_in.grid() != psi_d.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *psi_in.grid();
    let n = grid.n();
    let origin = grid.origin_index()?;
    let m = 2 * n;
    let mut engine = FftEngine::new();
    let fft = engine.forward(m);

    // exponent -i p_k q_j' / hbar over the half-spacing p lattice is a
    // length-2n DFT in (k - n/2)(j' - n/2); constant phases per row/column
    // are unimodular and drop out of the squared modulus
    let prefactor = grid.dq() * grid.dq() / grid.constants().h();
    let mut values = vec![0.0; n * n];
    let mut buf = vec![Complex64::ZERO; m];
    for j in 0..n {
        buf.fill(Complex64::ZERO);
        for jp in 0..n {
            let det_idx = j as isize - jp as isize + origin as isize;
            if det_idx < 0 || det_idx >= n as isize {
                continue;
            }
            buf[jp] = psi_in.amp()[jp] * psi_d.amp()[det_idx as usize].conj();
        }
        fft.process(&mut buf);
        for k in 0..n {
            let bin = (k as isize - (n / 2) as isize).rem_euclid(m as isize) as usize;
            values[j * n + k] = prefactor * buf[bin].norm_sqr();
        }
    }
    Ok(WignerMap::from_values(grid, values))
}

/// Split a superposition map into the sum of pre-weighted auto-term maps
/// and the residual interference term.
pub fn split_interference(
    total: &WignerMap,
    auto_parts: &[WignerMap],
) -> Result<(WignerMap, WignerMap)> {
    let mut auto = WignerMap::from_values(*total.grid(), vec![0.0; total.values().len()]);
    for part in auto_parts {
        auto = auto.checked_add(part)?;
    }
    let interference = total.checked_sub(&auto)?;
    Ok((auto, interference))
}

/// Fringe contrast over a window. `degenerate` flags windows without an
/// interior minimum (single-lobe or flat data), reported as zero
/// visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub value: f64,
    pub degenerate: bool,
}

/// `(I_max - I_min) / (I_max + I_min)` with `I_min` taken between the
/// maxima bracketing the window's global peak, so envelope tails never
/// masquerade as fringe minima.
pub fn fringe_visibility(intensity: &[f64], window: Range<usize>) -> Visibility {
    let lo = window.start.min(intensity.len());
    let hi = window.end.min(intensity.len());
    if hi.saturating_sub(lo) < 3 {
        return Visibility {
            value: 0.0,
            degenerate: true,
        };
    }
    let slice = &intensity[lo..hi];
    let peak = slice
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let floor = slice[peak] * 1e-12;

    let is_local_max = |i: usize| -> bool {
        i > 0 && i + 1 < slice.len() && slice[i] > slice[i - 1] && slice[i] >= slice[i + 1]
    };
    let mut maxima: Vec<usize> = (1..slice.len().saturating_sub(1))
        .filter(|&i| is_local_max(i) && slice[i] > floor)
        .collect();
    if !maxima.contains(&peak) {
        maxima.push(peak);
        maxima.sort_unstable();
    }
    let pos = maxima.binary_search(&peak).unwrap();
    let left_dip = (pos > 0).then(|| {
        slice[maxima[pos - 1]..=peak]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    });
    let right_dip = (pos + 1 < maxima.len()).then(|| {
        slice[peak..=maxima[pos + 1]]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    });
    let i_min = match (left_dip, right_dip) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Visibility {
                value: 0.0,
                degenerate: true,
            }
        }
    };
    let i_max = slice[peak];
    let value = ((i_max - i_min) / (i_max + i_min)).clamp(0.0, 1.0);
    Visibility {
        value,
        degenerate: false,
    }
}

/// Default fringe window: the contiguous region around the global peak
/// where the smoothed intensity stays above 10% of its own maximum. The
/// smoothing length (a `2 (n/32) + 1` moving average) bridges fringe dips
/// without bridging genuinely disjoint lobes.
pub fn default_visibility_window(intensity: &[f64]) -> Range<usize> {
    let n = intensity.len();
    if n == 0 {
        return 0..0;
    }
    let half = (n / 32).max(2);
    let mut envelope = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        envelope[i] = intensity[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
    }
    let peak = envelope
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let threshold = envelope[peak] * 0.1;
    let mut start = peak;
    while start > 0 && envelope[start - 1] >= threshold {
        start -= 1;
    }
    let mut end = peak + 1;
    while end < n && envelope[end] >= threshold {
        end += 1;
    }
    start..end
}

/// Maximal runs where the intensity stays at or above `fraction` of its
/// global maximum: a lobe counter for separated-beam checks.
pub fn intensity_regions(intensity: &[f64], fraction: f64) -> Vec<Range<usize>> {
    let max = intensity.iter().copied().fold(0.0_f64, f64::max);
    let threshold = max * fraction;
    let mut regions = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &v) in intensity.iter().enumerate() {
        if v >= threshold && max > 0.0 {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            regions.push(s..i);
        }
    }
    if let Some(s) = start {
        regions.push(s..intensity.len());
    }
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::states::{
        double_slit_state, gaussian_state, gaussian_transmittance, slit_lobe_states,
    };
    use crate::wigner::{fourier_transform, wigner_from_position};

    #[test]
    fn identity_position_filter() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let ones = PositionWavefunction::from_parts(
            g,
            vec![Complex64::new(1.0, 0.0); g.n()],
            WaveRole::Transmittance,
        );
        let out = apply_position_filter(&psi, &ones).unwrap();
        assert_eq!(out.raw.amp(), psi.amp());
        assert!((out.passed_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blocked_filter_has_no_renormalized_state() {
        let g = make_grid(128, 0.0, 16.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let zero = PositionWavefunction::from_parts(
            g,
            vec![Complex64::ZERO; g.n()],
            WaveRole::Transmittance,
        );
        let out = apply_position_filter(&psi, &zero).unwrap();
        assert!(out.is_blocked());
        assert_eq!(out.passed_fraction, 0.0);
    }

    #[test]
    fn wide_gaussian_through_slits_resembles_cat() {
        let g = make_grid(1024, 0.0, 128.0, 1.0).unwrap();
        let wide = gaussian_state(&g, 0.0, 8.0, 0.0, 0.0).unwrap();
        let slits = double_slit_state(&g, 4.0, 1.0).unwrap();
        let out = apply_position_filter(&wide, &slits).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let fid = out.renormalized.unwrap().fidelity(&cat).unwrap();
        assert!(fid >= 0.99, "fidelity {fid}");
    }

    #[test]
    fn detector_filter_keeps_one_lobe() {
        let g = make_grid(1024, 0.0, 64.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let detector = gaussian_transmittance(&g, 4.0, 2.4).unwrap();
        let out = apply_position_filter(&cat, &detector).unwrap();
        assert!(
            out.passed_fraction > 0.4 && out.passed_fraction < 0.6,
            "passed {}",
            out.passed_fraction
        );
        let right_lobe = gaussian_state(&g, 4.0, 1.0, 0.0, 0.0).unwrap();
        let fid = out.renormalized.unwrap().fidelity(&right_lobe).unwrap();
        assert!(fid >= 0.95, "fidelity {fid}");
    }

    #[test]
    fn position_dual_path_identity_filter() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.5, 0.0, 0.0).unwrap();
        // the map of a unit transmittance is a delta ridge along p = 0
        let n = g.n();
        let dp = g.wigner_lattice().dp();
        let mut delta_values = vec![0.0; n * n];
        for j in 0..n {
            delta_values[j * n + n / 2] = 1.0 / dp;
        }
        let w_f = WignerMap::from_values(g, delta_values);
        let w_in = wigner_from_position(&psi).unwrap();
        let out = filter_phase_space_position(&w_in, &w_f).unwrap();
        assert!(out.sup_diff(&w_in).unwrap() < 1e-8);
    }

    #[test]
    fn position_dual_path_slit_filter() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let wide = gaussian_state(&g, 0.0, 4.0, 0.0, 0.0).unwrap();
        let slits = double_slit_state(&g, 4.0, 1.0).unwrap();
        let w_in = wigner_from_position(&wide).unwrap();
        let w_f = wigner_from_position(&slits).unwrap();
        let psp = filter_phase_space_position(&w_in, &w_f).unwrap();
        let out = apply_position_filter(&wide, &slits).unwrap();
        let wf_path = wigner_from_position(&out.raw).unwrap();
        let sup = psp.sup_diff(&wf_path).unwrap();
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn identity_momentum_filter() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.3, 0.0).unwrap();
        let phi = fourier_transform(&psi);
        let ones = MomentumWavefunction::from_parts(
            *phi.lattice(),
            vec![Complex64::new(1.0, 0.0); g.n()],
            WaveRole::Transmittance,
        );
        let out = apply_momentum_filter(&phi, &ones).unwrap();
        assert_eq!(out.raw.amp(), phi.amp());
        assert!((out.passed_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_dual_path_displaced_gaussian() {
        let g = make_grid(512, 0.0, 48.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let phi_in = fourier_transform(&psi);
        // momentum-side transmittance: displaced Gaussian in p
        let filt_pos = gaussian_state(&g, 0.0, 2.0, 0.5, 0.0).unwrap();
        let phi_f = fourier_transform(&filt_pos);
        let out = apply_momentum_filter(&phi_in, &phi_f).unwrap();
        let wf_path = crate::wigner::wigner_from_momentum(&out.raw).unwrap();
        let w_in = wigner_from_position(&psi).unwrap();
        let w_f = wigner_from_position(&filt_pos).unwrap();
        let psp = filter_phase_space_momentum(&w_in, &w_f).unwrap();
        let sup = psp.sup_diff(&wf_path).unwrap();
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn general_position_filter_delta_limit_and_widths() {
        let g = make_grid(512, 0.0, 48.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 2.0, 0.0, 0.0).unwrap();
        // near-delta kernel: convolution identity up to its finite width
        let narrow = gaussian_state(&g, 0.0, g.dq(), 0.0, 0.0).unwrap();
        let out = general_filter_position(&psi, &narrow, 0.0).unwrap();
        let renorm = out.renormalized.unwrap();
        let sup = renorm
            .amp()
            .iter()
            .zip(psi.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "sup {sup}");

        // gaussian (*) gaussian: widths add in quadrature
        let w1 = 1.5;
        let w2 = 2.0;
        let a = gaussian_state(&g, 0.0, w1, 0.0, 0.0).unwrap();
        let b = gaussian_state(&g, 0.0, w2, 0.0, 0.0).unwrap();
        let conv = general_filter_position(&a, &b, 0.0).unwrap();
        let expected_width = (w1 * w1 + w2 * w2).sqrt();
        let reference = gaussian_state(&g, 0.0, expected_width, 0.0, 0.0).unwrap();
        let fid = conv.renormalized.unwrap().fidelity(&reference).unwrap();
        assert!(fid > 1.0 - 1e-10, "fidelity {fid}");
    }

    #[test]
    fn general_dual_path_position() {
        let g = make_grid(512, 0.0, 48.0, 1.0).unwrap();
        let a = gaussian_state(&g, 0.5, 1.5, 0.0, 0.0).unwrap();
        let b = gaussian_state(&g, -0.3, 2.0, 0.0, 0.0).unwrap();
        let p0 = 0.37; // deliberately off-lattice
        let out = general_filter_position(&a, &b, p0).unwrap();
        let wf_path = wigner_from_position(&out.raw).unwrap();
        let w_in = wigner_from_position(&a).unwrap();
        let w_f = wigner_from_position(&b).unwrap();
        let psp = general_filter_phase_space_position(&w_in, &w_f, p0).unwrap();
        let sup = psp.sup_diff(&wf_path).unwrap();
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn lattice_momentum_offset_shifts_input_map_exactly() {
        let g = make_grid(512, 0.0, 48.0, 1.0).unwrap();
        let a = gaussian_state(&g, 0.0, 1.5, 0.0, 0.0).unwrap();
        // the p0 offset enters as a displacement of the input map along p;
        // for a whole lattice unit the spectral shift is an exact roll and
        // matches the map of the tilted state
        let p0 = g.wigner_lattice().dp();
        let w_in = wigner_from_position(&a).unwrap();
        let shifted = shift_map_p(&w_in, p0);
        let tilted = crate::optics::tilt(&a, p0);
        let w_tilted = wigner_from_position(&tilted).unwrap();
        let sup = shifted.sup_diff(&w_tilted).unwrap();
        assert!(sup < 1e-12, "sup {sup}");
    }

    #[test]
    fn general_dual_path_momentum() {
        let g = make_grid(512, 0.0, 48.0, 1.0).unwrap();
        let a = gaussian_state(&g, 0.4, 1.2, 0.3, 0.0).unwrap();
        let b = gaussian_state(&g, 0.0, 1.8, -0.2, 0.0).unwrap();
        let q0 = 0.53;
        let phi_a = fourier_transform(&a);
        let phi_b = fourier_transform(&b);
        let out = general_filter_momentum(&phi_a, &phi_b, q0).unwrap();
        let wf_path = crate::wigner::wigner_from_momentum(&out.raw).unwrap();
        let w_in = wigner_from_position(&a).unwrap();
        let w_f = wigner_from_position(&b).unwrap();
        let psp = general_filter_phase_space_momentum(&w_in, &w_f, q0).unwrap();
        let sup = psp.sup_diff(&wf_path).unwrap();
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn conflating_position_and_momentum_filters_is_wrong() {
        let g = make_grid(512, 0.0, 128.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 8.0, 0.0, 0.0).unwrap();
        let slits = double_slit_state(&g, 4.0, 1.0).unwrap();
        // path A: filter in q, then transform
        let path_a = fourier_transform(&apply_position_filter(&psi, &slits).unwrap().raw);
        // path B: transform, then multiply by the same functional form in p
        let phi = fourier_transform(&psi);
        let norm = (4.0 * std::f64::consts::PI).powf(-0.25) * (1.0 + (-16.0_f64).exp()).powf(-0.5);
        let slit_in_p = MomentumWavefunction::new(
            *phi.lattice(),
            (0..g.n())
                .map(|k| {
                    let p = phi.lattice().p(k);
                    let lobes =
                        (-(p - 4.0) * (p - 4.0) / 2.0).exp() + (-(p + 4.0) * (p + 4.0) / 2.0).exp();
                    Complex64::new(norm * lobes, 0.0)
                })
                .collect(),
        )
        .unwrap();
        let path_b = apply_momentum_filter(&phi, &slit_in_p).unwrap().raw;
        let sup = path_a
            .amp()
            .iter()
            .zip(path_b.amp().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(sup > 0.01, "the two pipelines must differ, sup {sup}");
    }

    #[test]
    fn detection_is_positive_and_matches_amplitude_form() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let det = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w_in = wigner_from_position(&cat).unwrap();
        let w_d = wigner_from_position(&det).unwrap();
        let lhs = detect(&w_in, &w_d).unwrap();
        let rhs = detect_from_states(&cat, &det).unwrap();
        assert!(
            w_in.min_value() < 0.0,
            "cat map should have negative patches"
        );
        assert!(lhs.min_value() >= -1e-10, "min {}", lhs.min_value());
        let sup = lhs.sup_diff(&rhs).unwrap();
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn detection_value_for_identical_centered_gaussians() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = wigner_from_position(&psi).unwrap();
        let out = detect(&w, &w).unwrap();
        let j0 = g.n() / 2;
        let got = out.value(j0, j0);
        let want = 1.0 / std::f64::consts::TAU;
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn detection_shift_covariance() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = wigner_from_position(&psi).unwrap();
        let shift_q = 8usize;
        let det_shifted = gaussian_state(&g, shift_q as f64 * g.dq(), 1.0, 0.0, 0.0).unwrap();
        let w_shifted = wigner_from_position(&det_shifted).unwrap();
        let base = detect(&w, &w).unwrap();
        let moved = detect(&w, &w_shifted).unwrap();
        let n = g.n();
        let mut sup = 0.0_f64;
        for j in 0..n - shift_q {
            for k in 0..n {
                sup = sup.max((moved.value(j + shift_q, k) - base.value(j, k)).abs());
            }
        }
        assert!(sup < 1e-9, "sup {sup}");
    }

    #[test]
    fn split_interference_cat_state() {
        let g = make_grid(512, 0.0, 32.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let (plus, minus) = slit_lobe_states(&g, 4.0, 1.0).unwrap();
        let total = wigner_from_position(&cat).unwrap();
        let w_plus = wigner_from_position(&plus).unwrap();
        let w_minus = wigner_from_position(&minus).unwrap();
        let (auto, interference) = split_interference(&total, &[w_plus, w_minus]).unwrap();
        // the interference term integrates to 2 Re <psi_+|psi_->, about
        // 1.1e-7 for d = 4 q_f, i.e. essentially zero
        let int_mass = interference.total_mass();
        let eps = (-16.0_f64).exp();
        let want = eps / (1.0 + eps);
        assert!((int_mass - want).abs() < 1e-9, "{int_mass} vs {want}");
        let roundtrip = auto.checked_add(&interference).unwrap();
        assert!(roundtrip.sup_diff(&total).unwrap() < 1e-15);
        // against the closed form of the cosine term
        let c = g.constants();
        let lat = total.p_lattice();
        let mut sup = 0.0_f64;
        for j in 0..g.n() {
            for k in 0..g.n() {
                let want =
                    crate::states::analytic_slit_wdf(g.q(j), lat.p(k), 4.0, 1.0, c).interference;
                sup = sup.max((interference.value(j, k) - want).abs());
            }
        }
        assert!(sup < 1e-7, "sup {sup}");
    }

    #[test]
    fn split_interference_single_part_is_zero() {
        let g = make_grid(256, 0.0, 24.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = wigner_from_position(&psi).unwrap();
        let (_, interference) = split_interference(&w, std::slice::from_ref(&w)).unwrap();
        assert!(interference.max_value().abs() < 1e-15);
        assert!(interference.min_value().abs() < 1e-15);
    }

    #[test]
    fn visibility_of_pure_fringes_and_flats() {
        let n = 256;
        let cos2: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::PI * i as f64 / 16.0).cos().powi(2))
            .collect();
        let v = fringe_visibility(&cos2, 0..n);
        assert!(!v.degenerate);
        assert!(v.value > 1.0 - 1e-12, "v {}", v.value);

        let flat = vec![0.7; n];
        let v = fringe_visibility(&flat, 0..n);
        assert!(v.degenerate);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn visibility_of_cat_momentum_fringes() {
        let g = make_grid(1024, 0.0, 64.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let map = wigner_from_position(&cat).unwrap();
        let mp = map.marginal_p();
        // central three fringe periods: period pi/4 on spacing dp
        let dp = map.p_lattice().dp();
        let half_span = (1.5 * std::f64::consts::PI / 4.0 / dp).round() as usize;
        let mid = g.n() / 2;
        let v = fringe_visibility(&mp, mid - half_span..mid + half_span);
        assert!(v.value >= 0.99, "v {}", v.value);
    }

    #[test]
    fn default_window_selects_single_lobe_for_disjoint_intensity() {
        let g = make_grid(1024, 0.0, 64.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let density: Vec<f64> = cat.amp().iter().map(|a| a.norm_sqr()).collect();
        let window = default_visibility_window(&density);
        let v = fringe_visibility(&density, window.clone());
        assert!(v.degenerate, "two disjoint lobes must read as no fringes");
        assert_eq!(v.value, 0.0);
        // and the lobe counter sees two regions
        let regions = intensity_regions(&density, 0.1);
        assert_eq!(regions.len(), 2);
    }
}
