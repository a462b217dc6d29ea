//! Built-in reproduction set: the incident packet, the two-slit state
//! at the slit plane and after propagation, the detector transmittances
//! and the detector-filtered states for both detector widths, and the
//! off-axis-lens bench at its three planes.
//!
//! Each state figure is a bundle of three tables (map, position
//! density, momentum density); the transmittance figures are single
//! curve tables. All outputs are deterministic.

use std::io;
use std::path::Path;

use wigsim::filters::apply_position_filter;
use wigsim::grid::SpatialGrid;
use wigsim::optics::free_propagate;
use wigsim::scenarios::GridSpec;
use wigsim::states::{
    double_slit_state, gaussian_state, gaussian_transmittance, lens_output_state,
    PositionWavefunction,
};
use wigsim::wigner::wigner_from_position;

use crate::output::{write_marginal_csv, write_wigner_csv};
use crate::CliError;

/// Figure lattice: wide enough for the post-lens bench at its last
/// plane, fine enough to keep the tilted lobes inside the band limit.
pub fn default_grid() -> GridSpec {
    GridSpec {
        n: 512,
        extent: 64.0,
    }
}

fn write_state_bundle(
    dir: &Path,
    name: &str,
    state: &PositionWavefunction,
) -> Result<(), CliError> {
    let map = wigner_from_position(state)?;
    write_wigner_csv(&dir.join(format!("{name}_wigner.csv")), &map)?;
    let grid = map.grid();
    write_marginal_csv(
        &dir.join(format!("{name}_marginal_q.csv")),
        "q [q_f],density [1/q_f]",
        &grid.q_samples(),
        &map.marginal_q(),
    )?;
    write_marginal_csv(
        &dir.join(format!("{name}_marginal_p.csv")),
        "p [hbar/q_f],density [q_f/hbar]",
        &map.p_lattice().p_samples(),
        &map.marginal_p(),
    )?;
    Ok(())
}

fn write_transmittance_curves(
    dir: &Path,
    name: &str,
    grid: &SpatialGrid,
    d: f64,
    q_f: f64,
    q_d: f64,
) -> io::Result<()> {
    use std::io::Write;
    let mut out = io::BufWriter::new(std::fs::File::create(dir.join(format!("{name}.csv")))?);
    writeln!(out, "q [q_f],detector,slits")?;
    for j in 0..grid.n() {
        let q = grid.q(j);
        let detector = (-(q - d) * (q - d) / (2.0 * q_d * q_d)).exp();
        let slits = (-(q - d) * (q - d) / (2.0 * q_f * q_f)).exp()
            + (-(q + d) * (q + d) / (2.0 * q_f * q_f)).exp();
        writeln!(out, "{q},{detector:e},{slits:e}")?;
    }
    out.flush()
}

/// Emit the whole set into `dir`.
pub fn write_figures(dir: &Path, grid_spec: &GridSpec) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let grid = grid_spec.build()?;
    let (d, q_f) = (4.0, 1.0);

    let incident = gaussian_state(&grid, 0.0, 1.0, 0.0, 0.0)?;
    write_state_bundle(dir, "fig02_incident", &incident)?;

    let cat = double_slit_state(&grid, d, q_f)?;
    write_state_bundle(dir, "fig03_slit_plane", &cat)?;

    let propagated = free_propagate(&cat, 5.0)?;
    write_state_bundle(dir, "fig04_propagated", &propagated)?;

    for (curve_name, state_name, q_d) in [
        ("fig05_transmittance", "fig06_filtered", 2.4),
        ("fig07_transmittance", "fig08_filtered", 4.0),
    ] {
        write_transmittance_curves(dir, curve_name, &grid, d, q_f, q_d)?;
        let detector = gaussian_transmittance(&grid, d, q_d)?;
        let filtered = apply_position_filter(&cat, &detector)?;
        let state = filtered.renormalized.ok_or(wigsim::Error::FullyBlocked)?;
        write_state_bundle(dir, state_name, &state)?;
    }

    let lens = lens_output_state(&grid, d, q_f, 2.0, 3.0)?;
    write_state_bundle(dir, "fig10_lens_plane", &lens)?;
    for (name, tau) in [("fig11_superposed", 1.0), ("fig12_separated", 3.0)] {
        let moved = free_propagate(&lens, tau)?;
        write_state_bundle(dir, name, &moved)?;
    }
    Ok(())
}
