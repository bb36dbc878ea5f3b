use rayon::prelude::*;

use crate::field::{ComplexField, GridSpec};
use crate::scalar::Real;

/// Plaquettes darker than this fraction of the peak intensity are skipped.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// Net winding of the plaquette whose lower-left corner is pixel `(ix, iy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Charge {
    pub ix: usize,
    pub iy: usize,
    pub q: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityMap<T> {
    grid: GridSpec<T>,
    pub charges: Vec<Charge>,
}

impl<T: Real> SingularityMap<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// Physical centre of a plaquette.
    pub fn position(&self, c: &Charge) -> [T; 2] {
        let h = self.grid.pitch() / T::of(2.0);
        [self.grid.x(c.ix) + h, self.grid.y(c.iy) + h]
    }

    pub fn total_charge(&self) -> i64 {
        self.charges.iter().map(|c| c.q).sum()
    }

    /// Sum of charges whose plaquette centre lies within `radius` of `center`.
    pub fn enclosed_charge(&self, center: [T; 2], radius: T) -> i64 {
        let r2 = radius * radius;
        self.charges
            .iter()
            .filter(|c| {
                let p = self.position(c);
                (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) <= r2
            })
            .map(|c| c.q)
            .sum()
    }
}

fn wrap<T: Real>(d: T) -> T {
    // Into (−π, π].
    if d > T::PI() {
        d - T::TAU()
    } else if d <= -T::PI() {
        d + T::TAU()
    } else {
        d
    }
}

/// Winding number of every 2×2 plaquette, walking its corners
/// counter-clockwise (+x, then +y) and summing phase steps wrapped into
/// `(−π, π]`. Plaquettes with a corner below `threshold · max|ψ|²`, or with an
/// exactly zero corner, are skipped.
pub fn singularity_map<T: Real>(f: &ComplexField<T>, threshold: T) -> SingularityMap<T> {
    let g = *f.grid();
    let nx = g.nx();
    let cut = threshold * f.max_intensity();
    let phase: Vec<T> = f.values().iter().map(|v| v.arg()).collect();
    let inten = f.intensity();
    let rows: Vec<Vec<Charge>> = (0..g.ny() - 1)
        .into_par_iter()
        .map(|j| {
            let mut found = Vec::new();
            for i in 0..nx - 1 {
                let idx = [j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i];
                let dim = idx.iter().map(|&k| inten[k]).fold(T::infinity(), T::min);
                if dim < cut || dim == T::zero() {
                    continue;
                }
                let mut s = T::zero();
                for k in 0..4 {
                    s += wrap(phase[idx[(k + 1) % 4]] - phase[idx[k]]);
                }
                let q = (s / T::TAU()).round().to_i64().unwrap_or(0);
                if q != 0 {
                    found.push(Charge { ix: i, iy: j, q });
                }
            }
            found
        })
        .collect();
    SingularityMap {
        grid: g,
        charges: rows.into_iter().flatten().collect(),
    }
}
