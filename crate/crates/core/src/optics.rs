//! Propagation and optical elements.
//!
//! Free-space propagation is a quadratic phase in the momentum
//! representation, `phi(p) -> phi(p) exp(-i tau p^2 / 2 hbar)`; on the
//! map it acts as the shear `W(q, p) -> W(q - tau p, p)`, exact for the
//! quadratic phase. The wavefunction path is the authoritative
//! implementation; grid-level map shearing exists for cross-checks and
//! for shearing analytic maps.
//!
//! In the dimensionless convention (`hbar = 1`, lengths in slit widths)
//! a plane at distance `D` from the slits uses `tau = D`.
//!
//! A thin lens multiplies by `exp(-i q^2 / K^2)` exactly as written -
//! K carries the implicit action scale, so for `hbar != 1` the lens
//! phase is *not* rescaled; keep `hbar = 1` when mixing lenses with
//! other elements. A tilt multiplies by `exp(i p0 q / hbar)`. Both are
//! diagonal in `q` and therefore commute exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fractional_shift_real, FftEngine};
use crate::filters::FilterSpec;
use crate::states::PositionWavefunction;
use crate::wigner::{fourier_transform, inverse_fourier_transform, WignerMap};

/// Edge/peak amplitude limit after a propagation step. Density at the
/// boundary stays below 1e-10 of the peak, keeping wraparound far under
/// every bench tolerance while still rejecting genuinely sheared-off
/// states.
const EDGE_LIMIT_PROPAGATE: f64 = 1e-5;

/// One element of a bench, in beam order.
#[derive(Debug, Clone)]
pub enum Element {
    /// Shear by `tau` (propagation distance in slit-width units).
    FreeSpace { tau: f64 },
    /// Thin lens of refractive parameter `K`.
    Lens { k_param: f64 },
    /// Off-axis tilt imparting momentum `p0`.
    Tilt { p0: f64 },
    /// Arbitrary filter in any representation.
    Filter(FilterSpec),
    /// Unit-peak Gaussian detector-filter of width `q_d` at `center`.
    DetectorFilter { q_d: f64, center: f64 },
}

fn check_edges(psi: &PositionWavefunction) -> Result<()> {
    let ratio = psi.edge_ratio();
    if ratio > EDGE_LIMIT_PROPAGATE {
        Err(Error::EnvelopeClipped {
            ratio,
            limit: EDGE_LIMIT_PROPAGATE,
        })
    } else {
        Ok(())
    }
}

/// Propagate through free space: quadratic phase in the momentum
/// representation, transformed back. Errors when the sheared state
/// reaches the grid edge.
pub fn free_propagate(psi: &PositionWavefunction, tau: f64) -> Result<PositionWavefunction> {
    if !tau.is_finite() {
        return Err(Error::NonFinite {
            name: "tau",
            value: tau,
        });
    }
    let hbar = psi.grid().hbar();
    let phi = fourier_transform(psi);
    let lattice = *phi.lattice();
    let amp: Vec<Complex64> = phi
        .amp()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = lattice.p(k);
            a * Complex64::from_polar(1.0, -tau * p * p / (2.0 * hbar))
        })
        .collect();
    let out = inverse_fourier_transform(&crate::states::MomentumWavefunction::from_parts(
        lattice,
        amp,
        phi.role(),
    ));
    check_edges(&out)?;
    Ok(out)
}

/// Shear a map along `q` by `tau p` per row (band-limited fractional
/// shifting). Mass is preserved; errors when sheared weight reaches the
/// `q` boundary.
pub fn shear_wigner(map: &WignerMap, tau: f64) -> Result<WignerMap> {
    if !tau.is_finite() {
        return Err(Error::NonFinite {
            name: "tau",
            value: tau,
        });
    }
    let n = map.n();
    let lattice = map.p_lattice();
    let dq = map.grid().dq();
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for k in 0..n {
        for j in 0..n {
            col[j] = map.value(j, k);
        }
        fractional_shift_real(&mut engine, &mut col, tau * lattice.p(k) / dq);
        for j in 0..n {
            values[j * n + k] = col[j];
        }
    }
    let out = WignerMap::from_values(*map.grid(), values);
    let scale = out.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let edge = (0..n)
        .flat_map(|k| [out.value(0, k), out.value(n - 1, k)])
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale > 0.0 && edge > EDGE_LIMIT_PROPAGATE * scale {
        return Err(Error::EnvelopeClipped {
            ratio: edge / scale,
            limit: EDGE_LIMIT_PROPAGATE,
        });
    }
    Ok(out)
}

/// Shear a map along `p` at `rate` per unit `q` (the map-side action of a
/// quadratic phase in `q`, e.g. a thin lens with `rate = -2 hbar / K^2`).
pub fn shear_wigner_momentum(map: &WignerMap, rate: f64) -> Result<WignerMap> {
    if !rate.is_finite() {
        return Err(Error::NonFinite {
            name: "rate",
            value: rate,
        });
    }
    let n = map.n();
    let dp = map.p_lattice().dp();
    let grid = *map.grid();
    let mut engine = FftEngine::new();
    let mut values = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for j in 0..n {
        for k in 0..n {
            row[k] = map.value(j, k);
        }
        fractional_shift_real(&mut engine, &mut row, rate * grid.q(j) / dp);
        values[j * n..(j + 1) * n].copy_from_slice(&row);
    }
    Ok(WignerMap::from_values(grid, values))
}

/// Thin lens: pointwise phase `exp(-i q^2 / K^2)`; the modulus is
/// untouched.
pub fn thin_lens(psi: &PositionWavefunction, k_param: f64) -> Result<PositionWavefunction> {
    if !(k_param.is_finite() && k_param > 0.0) {
        return Err(Error::NonPositive {
            name: "K",
            value: k_param,
        });
    }
    let grid = *psi.grid();
    let amp: Vec<Complex64> = psi
        .amp()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let q = grid.q(j);
            a * Complex64::from_polar(1.0, -q * q / (k_param * k_param))
        })
        .collect();
    Ok(PositionWavefunction::from_parts(grid, amp, psi.role()))
}

/// Off-axis tilt: pointwise phase `exp(i p0 q / hbar)`, displacing the
/// map by `p0` along `p`. Check [`exceeds_band_limit`] afterwards when
/// `p0` is a sizable fraction of the lattice reach.
pub fn tilt(psi: &PositionWavefunction, p0: f64) -> PositionWavefunction {
    let grid = *psi.grid();
    let hbar = grid.hbar();
    let amp: Vec<Complex64> = psi
        .amp()
        .iter()
        .enumerate()
        .map(|(j, a)| a * Complex64::from_polar(1.0, p0 * grid.q(j) / hbar))
        .collect();
    PositionWavefunction::from_parts(grid, amp, psi.role())
}

/// True when the state carries non-negligible weight (above 1e-6 of its
/// momentum-space peak) at the edge of the alias-free band.
pub fn exceeds_band_limit(psi: &PositionWavefunction) -> bool {
    let density = crate::wigner::momentum_density_halfstep(psi);
    let peak = density.iter().copied().fold(0.0_f64, f64::max);
    if peak == 0.0 {
        return false;
    }
    let n = density.len();
    let edge = density[0].max(density[n - 1]);
    edge > 1e-12 * peak
}

/// Outcome of pushing a state through one element.
#[derive(Debug, Clone)]
pub struct ElementOutcome {
    pub state: PositionWavefunction,
    /// Fraction of the incoming norm that survived this element
    /// (1 for the unitary elements).
    pub passed_fraction: f64,
    pub warnings: Vec<String>,
}

/// Apply a single element on the wavefunction path.
pub fn apply_element(psi: &PositionWavefunction, element: &Element) -> Result<ElementOutcome> {
    match element {
        Element::FreeSpace { tau } => Ok(ElementOutcome {
            state: free_propagate(psi, *tau)?,
            passed_fraction: 1.0,
            warnings: Vec::new(),
        }),
        Element::Lens { k_param } => Ok(ElementOutcome {
            state: thin_lens(psi, *k_param)?,
            passed_fraction: 1.0,
            warnings: Vec::new(),
        }),
        Element::Tilt { p0 } => {
            let state = tilt(psi, *p0);
            let mut warnings = Vec::new();
            if exceeds_band_limit(&state) {
                warnings.push(format!(
                    "tilt p0 = {p0} pushes momentum content toward the band limit"
                ));
            }
            Ok(ElementOutcome {
                state,
                passed_fraction: 1.0,
                warnings,
            })
        }
        Element::Filter(spec) => {
            let out = crate::filters::apply_filter_spec(psi, spec)?;
            Ok(ElementOutcome {
                passed_fraction: out.passed_fraction,
                state: out.raw,
                warnings: Vec::new(),
            })
        }
        Element::DetectorFilter { q_d, center } => {
            let transmittance = crate::states::gaussian_transmittance(psi.grid(), *center, *q_d)?;
            let out = crate::filters::apply_position_filter(psi, &transmittance)?;
            Ok(ElementOutcome {
                passed_fraction: out.passed_fraction,
                state: out.raw,
                warnings: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::states::{double_slit_state, gaussian_state};
    use crate::wigner::wigner_from_position;

    #[test]
    fn zero_distance_is_identity() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.3, 1.0, 0.5, 0.0).unwrap();
        let out = free_propagate(&psi, 0.0).unwrap();
        let sup = psi
            .amp()
            .iter()
            .zip(out.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-13);
    }

    #[test]
    fn momentum_density_is_invariant() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.4, 0.0).unwrap();
        let before: Vec<f64> = fourier_transform(&psi)
            .amp()
            .iter()
            .map(|a| a.norm_sqr())
            .collect();
        for tau in [0.5, 2.0, 5.0] {
            let out = free_propagate(&psi, tau).unwrap();
            let after: Vec<f64> = fourier_transform(&out)
                .amp()
                .iter()
                .map(|a| a.norm_sqr())
                .collect();
            let sup = before
                .iter()
                .zip(after.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(sup <= 1e-10, "tau={tau}: sup {sup}");
            assert!((out.norm_sq() - psi.norm_sq()).abs() < 1e-10);
        }
    }

    #[test]
    fn shear_composition() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.3, 0.0).unwrap();
        let two_steps = free_propagate(&free_propagate(&psi, 1.3).unwrap(), 2.2).unwrap();
        let one_step = free_propagate(&psi, 3.5).unwrap();
        let sup = two_steps
            .amp()
            .iter()
            .zip(one_step.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-8, "sup {sup}");
    }

    #[test]
    fn first_moment_transport() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 1.0, 1.0, 0.8, 0.0).unwrap();
        let w0 = wigner_from_position(&psi).unwrap();
        let tau = 2.5;
        let w1 = wigner_from_position(&free_propagate(&psi, tau).unwrap()).unwrap();
        let want = w0.mean_q() + tau * w0.mean_p();
        assert!((w1.mean_q() - want).abs() < 1e-8);
        assert!((w1.mean_p() - w0.mean_p()).abs() < 1e-8);
    }

    #[test]
    fn propagation_clips_at_grid_edge() {
        let g = make_grid(128, 0.0, 14.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 2.0, 0.0).unwrap();
        let err = free_propagate(&psi, 3.0).unwrap_err();
        assert!(matches!(err, Error::EnvelopeClipped { .. }));
    }

    #[test]
    fn map_shear_matches_wavefunction_path() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.5, 1.1, 0.6, 0.0).unwrap();
        let tau = 1.7;
        let sheared = shear_wigner(&wigner_from_position(&psi).unwrap(), tau).unwrap();
        let direct = wigner_from_position(&free_propagate(&psi, tau).unwrap()).unwrap();
        let sup = sheared.sup_diff(&direct).unwrap();
        assert!(sup < 1e-6, "sup {sup}");
        assert!((sheared.total_mass() - direct.total_mass()).abs() < 1e-8);
    }

    #[test]
    fn zero_shear_is_identity_map() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = wigner_from_position(&psi).unwrap();
        let out = shear_wigner(&w, 0.0).unwrap();
        assert!(out.sup_diff(&w).unwrap() < 1e-15);
    }

    #[test]
    fn sheared_cat_marginal_oscillates() {
        let g = make_grid(1024, 0.0, 64.0, 1.0).unwrap();
        let cat = double_slit_state(&g, 4.0, 1.0).unwrap();
        let w0 = wigner_from_position(&cat).unwrap();
        let disjoint = crate::filters::intensity_regions(&w0.marginal_q(), 0.1);
        assert_eq!(disjoint.len(), 2, "two lobes before propagation");
        let w5 = shear_wigner(&w0, 5.0).unwrap();
        let mq = w5.marginal_q();
        let window = crate::filters::default_visibility_window(&mq);
        let v = crate::filters::fringe_visibility(&mq, window);
        assert!(v.value >= 0.5, "visibility {}", v.value);
    }

    #[test]
    fn lens_preserves_modulus_and_shears_momentum() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 1.0, 1.2, 0.0, 0.0).unwrap();
        let k_param = 2.0;
        let after = thin_lens(&psi, k_param).unwrap();
        for (a, b) in psi.amp().iter().zip(after.amp().iter()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        // map-side: shear along p with rate -2 hbar / K^2 per unit q
        let w_ref = shear_wigner_momentum(
            &wigner_from_position(&psi).unwrap(),
            -2.0 / (k_param * k_param),
        )
        .unwrap();
        let w_lens = wigner_from_position(&after).unwrap();
        let sup = w_lens.sup_diff(&w_ref).unwrap();
        assert!(sup < 1e-6, "sup {sup}");
    }

    #[test]
    fn huge_k_lens_is_identity() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let out = thin_lens(&psi, 1e12).unwrap();
        let sup = psi
            .amp()
            .iter()
            .zip(out.amp().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-12);
    }

    #[test]
    fn tilt_displaces_momentum_density() {
        let g = make_grid(512, 0.0, 64.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let p0 = 3.0;
        let tilted = tilt(&psi, p0);
        assert!((tilted.norm_sq() - psi.norm_sq()).abs() < 1e-12);
        let w = wigner_from_position(&tilted).unwrap();
        assert!((w.mean_p() - p0).abs() < 1e-9);
        // identity at p0 = 0
        let same = tilt(&psi, 0.0);
        assert_eq!(same.amp(), psi.amp());
    }

    #[test]
    fn tilt_and_lens_commute_exactly() {
        let g = make_grid(256, 0.0, 32.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        let a = tilt(&thin_lens(&psi, 2.0).unwrap(), 3.0);
        let b = thin_lens(&tilt(&psi, 3.0), 2.0).unwrap();
        let sup = a
            .amp()
            .iter()
            .zip(b.amp().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-12, "diagonal phases must commute, sup {sup}");
    }

    #[test]
    fn opposite_tilts_converge_at_crossing_distance() {
        let g = make_grid(1024, 0.0, 64.0, 1.0).unwrap();
        let d = 4.0;
        let p0 = 3.0;
        let tau_star = d / p0;
        for sign in [1.0, -1.0] {
            let lobe = gaussian_state(&g, sign * d, 1.0, 0.0, 0.0).unwrap();
            let tilted = tilt(&lobe, -sign * p0);
            let moved = free_propagate(&tilted, tau_star).unwrap();
            let w = wigner_from_position(&moved).unwrap();
            assert!(w.mean_q().abs() < 1e-6, "lobe center {}", w.mean_q());
        }
    }

    #[test]
    fn band_limit_flag_fires_for_extreme_tilt() {
        let g = make_grid(128, 0.0, 16.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(!exceeds_band_limit(&psi));
        let extreme = tilt(&psi, g.band_limit() * 1.05);
        assert!(exceeds_band_limit(&extreme));
    }
}
