//! Delimited-text writers for maps, marginals, metrics, and the run
//! manifest. Numbers are printed in Rust's shortest round-trip form, so
//! reading a table back reproduces the in-memory values bit for bit and
//! reruns are byte-identical.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use wigsim::scenarios::{MetricSelection, PlaneResult, ScenarioResult};
use wigsim::wigner::WignerMap;

use crate::scenario_file::{print_scenario, OutputSpec, ScenarioFile};

/// Long-form `(q, p, w)` triples, `q`-major.
pub fn write_wigner_csv(path: &Path, map: &WignerMap) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "q [q_f],p [hbar/q_f],w [1/hbar]")?;
    let grid = map.grid();
    let lattice = map.p_lattice();
    let n = grid.n();
    for j in 0..n {
        let q = grid.q(j);
        for k in 0..n {
            writeln!(out, "{q},{},{:e}", lattice.p(k), map.value(j, k))?;
        }
    }
    out.flush()
}

pub fn write_marginal_csv(
    path: &Path,
    header: &str,
    coords: &[f64],
    values: &[f64],
) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{header}")?;
    for (c, v) in coords.iter().zip(values.iter()) {
        writeln!(out, "{c},{v:e}")?;
    }
    out.flush()
}

fn write_plane_metrics(
    out: &mut impl Write,
    plane: &PlaneResult,
    selection: &MetricSelection,
) -> io::Result<()> {
    writeln!(out, "[plane tau={}]", plane.tau)?;
    writeln!(out, "passed_fraction = {}", plane.passed_fraction)?;
    writeln!(out, "total_mass = {}", plane.wigner.total_mass())?;
    writeln!(out, "min_w = {}", plane.wigner.min_value())?;
    writeln!(out, "max_w = {}", plane.wigner.max_value())?;
    writeln!(out, "sigma_q = {}", plane.wigner.sigma_q())?;
    writeln!(out, "sigma_p = {}", plane.wigner.sigma_p())?;
    if selection.visibility {
        writeln!(out, "visibility_q = {}", plane.visibility_q.value)?;
        writeln!(
            out,
            "visibility_q_degenerate = {}",
            plane.visibility_q.degenerate
        )?;
        writeln!(out, "visibility_p = {}", plane.visibility_p.value)?;
        writeln!(
            out,
            "visibility_p_degenerate = {}",
            plane.visibility_p.degenerate
        )?;
        writeln!(
            out,
            "window_q = {}..{}",
            plane.window_q.start, plane.window_q.end
        )?;
        writeln!(
            out,
            "window_p = {}..{}",
            plane.window_p.start, plane.window_p.end
        )?;
    }
    if selection.interference {
        writeln!(out, "interference_energy = {}", plane.interference_energy)?;
    }
    writeln!(out)
}

pub fn write_metrics(
    path: &Path,
    result: &ScenarioResult,
    selection: &MetricSelection,
) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for plane in &result.planes {
        write_plane_metrics(&mut out, plane, selection)?;
    }
    out.flush()
}

/// Write the full bundle of one run: per-plane tables, the metrics
/// record, and a manifest that replays the run. The manifest never
/// names the output directory, so identical runs into different
/// directories stay byte-identical.
pub fn write_run_bundle(
    dir: &Path,
    file: &ScenarioFile,
    result: &ScenarioResult,
    version: &str,
) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for plane in &result.planes {
        let tau = plane.tau;
        write_wigner_csv(&dir.join(format!("wigner_tau{tau}.csv")), &plane.wigner)?;
        if file.spec.metrics.marginals {
            let grid = plane.wigner.grid();
            let lattice = plane.wigner.p_lattice();
            write_marginal_csv(
                &dir.join(format!("marginal_q_tau{tau}.csv")),
                "q [q_f],density [1/q_f]",
                &grid.q_samples(),
                &plane.marginal_q,
            )?;
            write_marginal_csv(
                &dir.join(format!("marginal_p_tau{tau}.csv")),
                "p [hbar/q_f],density [q_f/hbar]",
                &lattice.p_samples(),
                &plane.marginal_p,
            )?;
        }
    }
    write_metrics(&dir.join("metrics.txt"), result, &file.spec.metrics)?;
    let manifest = ScenarioFile {
        spec: file.spec.clone(),
        output: OutputSpec {
            directory: None,
            ..file.output.clone()
        },
    };
    std::fs::write(
        dir.join("manifest.scenario"),
        print_scenario(&manifest, Some(version)),
    )
}
