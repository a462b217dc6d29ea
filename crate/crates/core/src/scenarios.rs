//! Canned slit-bench experiments and their summary metrics.
//!
//! A scenario is a source, a fixed slit geometry, an ordered element
//! chain at the slit plane, and a list of observation planes. The
//! pipeline tracks the full state *and* its two branch states (one per
//! slit) so the interference term of the map can be isolated at every
//! plane as `W_total - W_plus - W_minus`; every operator in the chain is
//! linear on amplitudes, so propagated branches stay consistent with the
//! propagated total.
//!
//! The interference-energy metric is `integral |W_int|` at the plane
//! normalized by the same integral for the plain two-slit state at the
//! same plane, which turns "the interference term has disappeared" into
//! a number.
//!
//! Default grid: `n = 1024`, extent `64` (slit-width units), centered on
//! zero: wide enough that a `tau = 5` shear of the `d = 4` bench keeps
//! every state far from the boundary.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::filters::{
    apply_position_filter, default_visibility_window, fringe_visibility, split_interference,
    Visibility,
};
use crate::grid::SpatialGrid;
use crate::optics::{apply_element, free_propagate, Element};
use crate::states::{double_slit_state, lens_output_parts, slit_lobe_states, PositionWavefunction};
use crate::wigner::{wigner_from_position, WignerMap};
use num_complex::Complex64;

/// Lattice request for a scenario (always centered on zero, `hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 1024,
            extent: 64.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<SpatialGrid> {
        crate::grid::make_grid(self.n, 0.0, self.extent, 1.0)
    }
}

/// Slit half-separation and width, in the scenario's length unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitGeometry {
    pub d: f64,
    pub q_f: f64,
}

/// What arrives at the slit plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    /// Wide Gaussian of width `q_i`, misaligned by `delta`, filtered by
    /// the slit pair.
    Gaussian { q_i: f64, delta: f64 },
    /// The ideal post-slit cat state itself.
    Cat,
    /// Cat state dressed by off-axis lenses (chirp `K`, tilts `+-p0`).
    LensOutput { k_param: f64, p0: f64 },
}

/// Elements applied at the slit plane, in order, before the observation
/// planes are scanned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementSpec {
    FreeSpace { tau: f64 },
    Lens { k_param: f64 },
    Tilt { p0: f64 },
    DetectorFilter { q_d: f64, center: f64 },
}

impl ElementSpec {
    fn to_element(self) -> Element {
        match self {
            ElementSpec::FreeSpace { tau } => Element::FreeSpace { tau },
            ElementSpec::Lens { k_param } => Element::Lens { k_param },
            ElementSpec::Tilt { p0 } => Element::Tilt { p0 },
            ElementSpec::DetectorFilter { q_d, center } => Element::DetectorFilter { q_d, center },
        }
    }
}

/// Which metric families a run should report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSelection {
    pub marginals: bool,
    pub visibility: bool,
    pub interference: bool,
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self {
            marginals: true,
            visibility: true,
            interference: true,
        }
    }
}

/// Declarative description of one bench run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub grid: GridSpec,
    pub source: SourceSpec,
    pub slits: SlitGeometry,
    pub elements: Vec<ElementSpec>,
    pub planes: Vec<f64>,
    pub metrics: MetricSelection,
}

/// Everything measured at one observation plane.
#[derive(Debug, Clone)]
pub struct PlaneResult {
    pub tau: f64,
    /// Unit-norm state at the plane.
    pub state: PositionWavefunction,
    pub wigner: WignerMap,
    /// `W_total - W_plus - W_minus` at this plane.
    pub interference_map: WignerMap,
    pub marginal_q: Vec<f64>,
    pub marginal_p: Vec<f64>,
    pub window_q: Range<usize>,
    pub window_p: Range<usize>,
    pub visibility_q: Visibility,
    pub visibility_p: Visibility,
    /// `integral |W_int|` relative to the plain cat state at this plane.
    pub interference_energy: f64,
    /// Cumulative fraction of the source that reached this plane.
    pub passed_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub planes: Vec<PlaneResult>,
    /// Cumulative passed fraction after the source stage and after each
    /// element, in chain order.
    pub element_passed: Vec<f64>,
    pub warnings: Vec<String>,
}

struct Prepared {
    full: PositionWavefunction,
    branches: Vec<PositionWavefunction>,
    element_passed: Vec<f64>,
    warnings: Vec<String>,
}

fn prepare(grid: &SpatialGrid, spec: &ScenarioSpec) -> Result<Prepared> {
    let SlitGeometry { d, q_f } = spec.slits;
    let mut warnings = Vec::new();
    let mut element_passed = Vec::new();

    let (mut full, mut branches) = match spec.source {
        SourceSpec::Gaussian { q_i, delta } => {
            if !(q_i.is_finite() && q_i > 0.0) {
                return Err(Error::NonPositive {
                    name: "q_i",
                    value: q_i,
                });
            }
            if q_i < 4.0 * q_f {
                warnings.push(format!(
                    "incident width q_i = {q_i} is not large against the slit width q_f = {q_f}; \
                     the post-slit state will deviate from the ideal two-slit state"
                ));
            }
            let (incident, edge) = crate::states::gaussian_source(grid, delta, q_i)?;
            if edge > 1e-9 {
                warnings.push(format!(
                    "incident beam is truncated at {edge:.1e} of its peak at the grid edge; \
                     the slit filter removes that weight before any observable is computed"
                ));
            }
            let slit_pair = double_slit_state(grid, d, q_f)?;
            let (lobe_plus, lobe_minus) = slit_lobe_states(grid, d, q_f)?;
            let out = apply_position_filter(&incident, &slit_pair)?;
            element_passed.push(out.passed_fraction);
            let branch_plus = apply_position_filter(&incident, &lobe_plus)?.raw;
            let branch_minus = apply_position_filter(&incident, &lobe_minus)?.raw;
            (out.raw, vec![branch_plus, branch_minus])
        }
        SourceSpec::Cat => {
            let full = double_slit_state(grid, d, q_f)?;
            let (plus, minus) = slit_lobe_states(grid, d, q_f)?;
            element_passed.push(1.0);
            (full, vec![plus, minus])
        }
        SourceSpec::LensOutput { k_param, p0 } => {
            let (full, plus, minus) = lens_output_parts(grid, d, q_f, k_param, p0)?;
            element_passed.push(1.0);
            (full, vec![plus, minus])
        }
    };

    for spec_el in &spec.elements {
        let element = spec_el.to_element();
        let outcome = apply_element(&full, &element)?;
        warnings.extend(outcome.warnings);
        let cumulative = element_passed.last().copied().unwrap_or(1.0) * outcome.passed_fraction;
        element_passed.push(cumulative);
        full = outcome.state;
        for branch in branches.iter_mut() {
            *branch = apply_element(branch, &element)?.state;
        }
    }

    // one consistent normalization for the full state and its branches,
    // so branch maps keep summing against the total
    let norm = full.norm_sq();
    if !(norm.is_finite() && norm > 1e-280) {
        return Err(Error::FullyBlocked);
    }
    let scale = Complex64::new(1.0 / norm.sqrt(), 0.0);
    full = full.scaled(scale);
    for branch in branches.iter_mut() {
        *branch = branch.scaled(scale);
    }

    Ok(Prepared {
        full,
        branches,
        element_passed,
        warnings,
    })
}

fn interference_at_plane(
    full: &PositionWavefunction,
    branches: &[PositionWavefunction],
    tau: f64,
) -> Result<(PositionWavefunction, WignerMap, WignerMap)> {
    let state = free_propagate(full, tau)?;
    let w_total = wigner_from_position(&state)?;
    let mut w_branches = Vec::with_capacity(branches.len());
    for branch in branches {
        let moved = free_propagate(branch, tau)?;
        w_branches.push(wigner_from_position(&moved)?);
    }
    let (_, w_int) = split_interference(&w_total, &w_branches)?;
    Ok((state, w_total, w_int))
}

/// Run a declarative scenario. Deterministic: identical specs produce
/// bitwise-identical results.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult> {
    if spec.planes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedPlanes);
    }
    let grid = spec.grid.build()?;
    let SlitGeometry { d, q_f } = spec.slits;
    if !(q_f.is_finite() && q_f > 0.0) {
        return Err(Error::NonPositive {
            name: "q_f",
            value: q_f,
        });
    }

    let prepared = prepare(&grid, spec)?;
    let passed_final = prepared.element_passed.last().copied().unwrap_or(1.0);

    // reference: the plain two-slit state, for the interference-energy
    // denominator
    let ref_full = double_slit_state(&grid, d, q_f)?;
    let (ref_plus, ref_minus) = slit_lobe_states(&grid, d, q_f)?;
    let ref_branches = vec![ref_plus, ref_minus];

    let mut planes = Vec::with_capacity(spec.planes.len());
    for &tau in &spec.planes {
        let (state, wigner, interference_map) =
            interference_at_plane(&prepared.full, &prepared.branches, tau)?;
        let (_, _, ref_int) = interference_at_plane(&ref_full, &ref_branches, tau)?;
        let ref_energy = ref_int.abs_mass();
        let interference_energy = if ref_energy > 0.0 {
            interference_map.abs_mass() / ref_energy
        } else {
            0.0
        };

        let marginal_q = wigner.marginal_q();
        let marginal_p = wigner.marginal_p();
        let window_q = default_visibility_window(&marginal_q);
        let window_p = default_visibility_window(&marginal_p);
        let visibility_q = fringe_visibility(&marginal_q, window_q.clone());
        let visibility_p = fringe_visibility(&marginal_p, window_p.clone());

        planes.push(PlaneResult {
            tau,
            state,
            wigner,
            interference_map,
            marginal_q,
            marginal_p,
            window_q,
            window_p,
            visibility_q,
            visibility_p,
            interference_energy,
            passed_fraction: passed_final,
        });
    }

    Ok(ScenarioResult {
        planes,
        element_passed: prepared.element_passed,
        warnings: prepared.warnings,
    })
}

/// Wide Gaussian through the slit pair, observed at the given planes.
pub fn run_double_slit(
    grid: &GridSpec,
    q_i: f64,
    d: f64,
    q_f: f64,
    delta: f64,
    planes: &[f64],
) -> Result<ScenarioResult> {
    run_scenario(&ScenarioSpec {
        grid: *grid,
        source: SourceSpec::Gaussian { q_i, delta },
        slits: SlitGeometry { d, q_f },
        elements: Vec::new(),
        planes: planes.to_vec(),
        metrics: MetricSelection::default(),
    })
}

/// Cat state filtered by a unit-peak Gaussian detector parked on the
/// `+d` slit, then propagated.
pub fn run_detector_filter(
    grid: &GridSpec,
    q_d: f64,
    d: f64,
    q_f: f64,
    planes: &[f64],
) -> Result<ScenarioResult> {
    run_scenario(&ScenarioSpec {
        grid: *grid,
        source: SourceSpec::Cat,
        slits: SlitGeometry { d, q_f },
        elements: vec![ElementSpec::DetectorFilter { q_d, center: d }],
        planes: planes.to_vec(),
        metrics: MetricSelection::default(),
    })
}

/// Off-axis-lens bench: lens output state propagated to the given
/// planes.
pub fn run_delayed_choice(
    grid: &GridSpec,
    k_param: f64,
    p0: f64,
    d: f64,
    q_f: f64,
    planes: &[f64],
) -> Result<ScenarioResult> {
    run_scenario(&ScenarioSpec {
        grid: *grid,
        source: SourceSpec::LensOutput { k_param, p0 },
        slits: SlitGeometry { d, q_f },
        elements: Vec::new(),
        planes: planes.to_vec(),
        metrics: MetricSelection::default(),
    })
}
