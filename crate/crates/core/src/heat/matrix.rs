use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{RadialFunction, RadialGrid};

/// Which integral operator a [`KernelMatrix`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Heat { t: f64 },
    Riesz { s: f64 },
    RieszTruncated { s: f64, radius: f64 },
}

/// Dense `N×N` matrix with quadrature weights folded in:
/// `(Kf)(r_i) = Σ_j entries[i][j] · f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    kind: KernelKind,
    grid: Arc<RadialGrid>,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub(crate) fn from_rows(kind: KernelKind, grid: Arc<RadialGrid>, rows: Vec<Vec<f64>>) -> Self {
        let n = grid.len();
        debug_assert_eq!(rows.len(), n);
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            debug_assert_eq!(row.len(), n);
            entries.extend(row);
        }
        Self { kind, grid, entries }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub(crate) fn add_to_entry(&mut self, i: usize, j: usize, value: f64) {
        let n = self.len();
        self.entries[i * n + j] += value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.len() + j]
    }

    /// Entry with the quadrature weight of column `j` divided out.
    pub fn raw_entry(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j) / self.grid.weights()[j]
    }

    pub(crate) fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        crate::par::map_rows(self.len(), |i| self.row(i).iter().zip(f).map(|(k, v)| k * v).sum())
    }

    pub fn apply(&self, f: &RadialFunction) -> Result<RadialFunction> {
        if f.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        Ok(RadialFunction::from_values(self.grid.clone(), self.apply_values(f.values())))
    }
}
