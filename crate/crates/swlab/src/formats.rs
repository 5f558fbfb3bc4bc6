//! On-disk formats. CSV values use `{:.16e}` so every double survives the
//! round trip and reruns are byte-identical.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use swlab_core::{RadialFunction, RadialGrid};

use crate::error::CliError;

/// Relative tolerance when matching CSV radii against grid nodes.
pub const NODE_MATCH_TOLERANCE: f64 = 1e-12;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` then one record per row.
pub fn write_csv<const K: usize>(path: &Path, header: [&str; K], rows: impl IntoIterator<Item = [String; K]>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `r,value` on every grid node.
pub fn write_profile(path: &Path, f: &RadialFunction) -> Result<(), CliError> {
    let rows = f.grid().nodes().iter().zip(f.values()).map(|(&r, &v)| [fmt(r), fmt(v)]);
    write_csv(path, ["r", "value"], rows)
}

/// Reads an `r,value` file written on `grid`.
pub fn read_profile(path: &Path, grid: &Arc<RadialGrid>) -> Result<RadialFunction, CliError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "value"] {
        return Err(CliError::Io(format!("{}: expected header r,value", path.display())));
    }
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64, CliError> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| CliError::Io(format!("{}: row {}: not a number: {:?}", path.display(), i + 1, &rec[k])))
        };
        let (r, v) = (parse(0)?, parse(1)?);
        let node = nodes.get(i).copied().unwrap_or(f64::NAN);
        if !((r - node).abs() <= NODE_MATCH_TOLERANCE * node) {
            return Err(CliError::Io(format!(
                "{}: row {}: radius {r:e} is not grid node {node:e}",
                path.display(),
                i + 1
            )));
        }
        values.push(v);
    }
    if values.len() != nodes.len() {
        return Err(CliError::Io(format!(
            "{}: {} rows for a grid of {} nodes",
            path.display(),
            values.len(),
            nodes.len()
        )));
    }
    Ok(RadialFunction::new(grid.clone(), values)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let grid = RadialGrid::new(3, 1e-3, 1e3, 64).unwrap();
        let f = RadialFunction::from_fn(&grid, |r| (-r * r).exp() / 3.0).unwrap();
        let path = dir.path().join("f.csv");
        write_profile(&path, &f).unwrap();
        let g = read_profile(&path, &grid).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn profile_on_other_grid_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = RadialGrid::new(3, 1e-3, 1e3, 64).unwrap();
        let b = RadialGrid::new(3, 1e-3, 1e3, 65).unwrap();
        let path = dir.path().join("f.csv");
        write_profile(&path, &RadialFunction::zeros(&a)).unwrap();
        let err = read_profile(&path, &b).unwrap_err().to_string();
        assert!(err.contains("grid node"), "{err}");
    }
}
