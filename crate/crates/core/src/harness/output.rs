//! File formats written by experiment runs.
//!
//! Every writer emits a fixed iteration order and no wall-clock content, so
//! identical runs produce identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::field::Field;
use crate::scheme::Monitor;

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `step,t,min,max,mass,l2norm`, one row per recorded monitor.
pub fn write_monitors(path: &Path, monitors: &[Monitor]) -> io::Result<()> {
    let mut out = create(path)?;
    Monitor::write_csv(monitors, &mut out)?;
    out.flush()
}

/// `x,y,value` at the local nodes of every element, shared nodes repeated.
pub fn write_field_csv<W: Write>(field: &Field, mut out: W) -> io::Result<()> {
    let space = field.space();
    let mesh = space.mesh();
    let kind = space.kind();
    writeln!(out, "x,y,value")?;
    for e in 0..mesh.num_elements() {
        let local = field.local(e);
        for (l, value) in local.iter().take(kind.local_dofs()).enumerate() {
            let (xi, eta) = kind.local_node(l);
            let [x, y] = mesh.map_point(e, xi, eta);
            writeln!(out, "{x:.17e},{y:.17e},{value:.17e}")?;
        }
    }
    Ok(())
}

/// Legacy VTK rectilinear grid with the element means as cell data.
pub fn write_field_vtk<W: Write>(field: &Field, name: &str, mut out: W) -> io::Result<()> {
    let mesh = field.space().mesh();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{name} element means")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET RECTILINEAR_GRID")?;
    writeln!(out, "DIMENSIONS {} {} 1", nx + 1, ny + 1)?;
    writeln!(out, "X_COORDINATES {} double", nx + 1)?;
    for i in 0..=nx {
        writeln!(out, "{:.17e}", i as f64 * mesh.dx())?;
    }
    writeln!(out, "Y_COORDINATES {} double", ny + 1)?;
    for j in 0..=ny {
        writeln!(out, "{:.17e}", j as f64 * mesh.dy())?;
    }
    writeln!(out, "Z_COORDINATES 1 double")?;
    writeln!(out, "0")?;
    writeln!(out, "CELL_DATA {}", nx * ny)?;
    writeln!(out, "SCALARS {name} double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    // VTK orders cells with x fastest
    for j in 0..ny {
        for i in 0..nx {
            writeln!(out, "{:.17e}", field.element_mean(mesh.element_index(i, j)))?;
        }
    }
    Ok(())
}

pub fn write_field_files(dir: &Path, field: &Field, name: &str) -> io::Result<()> {
    let mut csv = create(&dir.join("field.csv"))?;
    write_field_csv(field, &mut csv)?;
    csv.flush()?;
    let mut vtk = create(&dir.join("field.vtk"))?;
    write_field_vtk(field, name, &mut vtk)?;
    vtk.flush()
}

/// One row of the convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dx: f64,
    pub l2_error: f64,
    /// Order against the previous row; `None` on the first.
    pub observed_order: Option<f64>,
}

/// Observed order between two (Δx, error) pairs.
pub fn pairwise_order(coarse: (f64, f64), fine: (f64, f64)) -> f64 {
    (coarse.1 / fine.1).ln() / (coarse.0 / fine.0).ln()
}

/// Least-squares slope of `log(error)` against `log(Δx)`.
pub fn least_squares_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dx.ln(), r.l2_error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Rows for `(Δx, error)` pairs ordered from coarse to fine.
pub fn convergence_rows(pairs: &[(f64, f64)]) -> Vec<ConvergenceRow> {
    pairs
        .iter()
        .enumerate()
        .map(|(k, &(dx, err))| ConvergenceRow {
            dx,
            l2_error: err,
            observed_order: (k > 0).then(|| pairwise_order(pairs[k - 1], (dx, err))),
        })
        .collect()
}

/// `dx,l2_error,observed_order`, the order blank on the first row.
pub fn write_convergence<W: Write>(rows: &[ConvergenceRow], mut out: W) -> io::Result<()> {
    writeln!(out, "dx,l2_error,observed_order")?;
    for r in rows {
        match r.observed_order {
            Some(p) => writeln!(out, "{},{:.10e},{:.6}", r.dx, r.l2_error, p)?,
            None => writeln!(out, "{},{:.10e},", r.dx, r.l2_error)?,
        }
    }
    Ok(())
}

pub fn write_convergence_file(path: &Path, rows: &[ConvergenceRow]) -> io::Result<()> {
    let mut out = create(path)?;
    write_convergence(rows, &mut out)?;
    out.flush()
}

/// Whole-run summary, one row per run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub mode: String,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub steps: usize,
    pub t_end: f64,
    pub min: f64,
    pub max: f64,
    /// Largest relative change of the total mass over the run.
    pub mass_drift: f64,
    /// Distance to the exact solution at `t_end`, where one is known.
    pub l2_error: Option<f64>,
}

pub const SUMMARY_HEADER: &str = "experiment,mode,nx,ny,dt,steps,t_end,min,max,mass_drift,l2_error";

pub fn write_summaries<W: Write>(rows: &[RunSummary], mut out: W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        let err = r.l2_error.map(|e| format!("{e:.10e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.17e},{:.17e},{:.6e},{}",
            r.experiment,
            r.mode,
            r.nx,
            r.ny,
            r.dt,
            r.steps,
            r.t_end,
            r.min,
            r.max,
            r.mass_drift,
            err
        )?;
    }
    Ok(())
}

pub fn write_summary_file(path: &Path, rows: &[RunSummary]) -> io::Result<()> {
    let mut out = create(path)?;
    write_summaries(rows, &mut out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::Mesh;
    use crate::space::{FieldSpace, SpaceKind};

    #[test]
    fn orders_of_a_power_law() {
        let pairs: Vec<(f64, f64)> = [0.05, 0.02, 0.0125, 0.01]
            .iter()
            .map(|&h: &f64| (h, 3.0 * h.powi(2)))
            .collect();
        let rows = convergence_rows(&pairs);
        assert!(rows[0].observed_order.is_none());
        for r in &rows[1..] {
            assert!((r.observed_order.unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((least_squares_order(&rows) - 2.0).abs() < 1e-12);
        let mut buf = Vec::new();
        write_convergence(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "dx,l2_error,observed_order");
        assert!(lines[1].starts_with("0.05,") && lines[1].ends_with(','));
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn field_dumps() {
        let mesh = Arc::new(Mesh::unit_square(2, 3, false).unwrap());
        let f = Field::interpolate(FieldSpace::new(SpaceKind::Dg1Cg2, mesh), |x, y| x + y);
        let mut csv = Vec::new();
        write_field_csv(&f, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 1 + 6 * 6);
        for line in text.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((v[0] + v[1] - v[2]).abs() < 1e-14);
        }
        let mut vtk = Vec::new();
        write_field_vtk(&f, "theta", &mut vtk).unwrap();
        let text = String::from_utf8(vtk).unwrap();
        assert!(text.contains("DIMENSIONS 3 4 1"));
        assert!(text.contains("CELL_DATA 6"));
    }
}
