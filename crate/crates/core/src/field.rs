//! Sampled complex wavefunctions on uniform rectangular grids.
//!
//! Samples are stored row-major: index `j * nx + i` holds the value at
//! physical position `(origin_x + i·pitch, origin_y + j·pitch)`. Rows run
//! along x, successive rows step in +y.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform rectangular sampling lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    nx: usize,
    ny: usize,
    pitch: T,
    origin: [T; 2],
}

impl<T: Real> GridSpec<T> {
    pub fn new(nx: usize, ny: usize, pitch: T, origin: [T; 2]) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::invalid("grid", format!("{nx}x{ny} has fewer than 2 samples per axis")));
        }
        if !(pitch > T::zero()) || !pitch.is_finite() {
            return Err(Error::invalid("pitch", format!("{pitch} is not a positive finite length")));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::invalid("origin", "non-finite coordinate"));
        }
        Ok(Self {
            nx,
            ny,
            pitch,
            origin,
        })
    }

    /// Grid whose pixel `(nx/2, ny/2)` (integer division) sits at the
    /// physical origin. This is the centring convention of every transform in
    /// [`crate::propagation`].
    pub fn centered(nx: usize, ny: usize, pitch: T) -> Result<Self> {
        let ox = -T::of_usize(nx / 2) * pitch;
        let oy = -T::of_usize(ny / 2) * pitch;
        Self::new(nx, ny, pitch, [ox, oy])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> T {
        self.pitch
    }

    pub fn origin(&self) -> [T; 2] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical extent `n·pitch` along x and y.
    pub fn extent(&self) -> [T; 2] {
        [T::of_usize(self.nx) * self.pitch, T::of_usize(self.ny) * self.pitch]
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.origin[0] + T::of_usize(i) * self.pitch
    }

    #[inline]
    pub fn y(&self, j: usize) -> T {
        self.origin[1] + T::of_usize(j) * self.pitch
    }

    /// Physical position of the reference pixel `(nx/2, ny/2)`.
    pub fn center(&self) -> [T; 2] {
        [self.x(self.nx / 2), self.y(self.ny / 2)]
    }

    /// Whether `p` lies inside the hull spanned by the pixel centres.
    pub fn contains(&self, p: [T; 2]) -> bool {
        let last = [self.x(self.nx - 1), self.y(self.ny - 1)];
        p[0] >= self.origin[0] && p[0] <= last[0] && p[1] >= self.origin[1] && p[1] <= last[1]
    }

    /// Distance from `p` to the nearest edge of the pixel-centre hull
    /// (negative when outside).
    pub fn distance_to_edge(&self, p: [T; 2]) -> T {
        let last = [self.x(self.nx - 1), self.y(self.ny - 1)];
        (p[0] - self.origin[0])
            .min(last[0] - p[0])
            .min(p[1] - self.origin[1])
            .min(last[1] - p[1])
    }

    pub(crate) fn same_lattice(&self, other: &Self) -> bool {
        self == other
    }
}

/// Which plane a field was produced for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneTag<T> {
    /// Exit surface of the hologram (or any object-plane field).
    HologramExit,
    /// Fresnel plane at propagation distance `z` metres. CFLD1 stores only the
    /// tag, so fields read back from disk carry `z: None`.
    Fresnel { z: Option<T> },
    /// Far field; grid coordinates are scattering angles in radians.
    Fraunhofer,
}

impl<T> PlaneTag<T> {
    pub fn code(&self) -> u8 {
        match self {
            PlaneTag::HologramExit => 0,
            PlaneTag::Fresnel { .. } => 1,
            PlaneTag::Fraunhofer => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(PlaneTag::HologramExit),
            1 => Some(PlaneTag::Fresnel { z: None }),
            2 => Some(PlaneTag::Fraunhofer),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PlaneTag::HologramExit => "hologram-exit",
            PlaneTag::Fresnel { .. } => "fresnel",
            PlaneTag::Fraunhofer => "fraunhofer",
        }
    }
}

/// Complex scalar wavefunction sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
    plane: PlaneTag<T>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<Complex<T>>, plane: PlaneTag<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("{} samples for a {}x{} grid", values.len(), grid.nx, grid.ny),
            ));
        }
        Ok(Self {
            grid,
            values,
            plane,
        })
    }

    /// Evaluates `f(x, y)` at every pixel centre. Rows are filled in parallel.
    pub fn from_fn<F>(grid: GridSpec<T>, plane: PlaneTag<T>, f: F) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Sync,
    {
        let mut values = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        values
            .par_chunks_mut(grid.nx)
            .enumerate()
            .for_each(|(j, row)| {
                let y = grid.y(j);
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f(grid.x(i), y);
                }
            });
        Self {
            grid,
            values,
            plane,
        }
    }

    pub fn zeros(grid: GridSpec<T>, plane: PlaneTag<T>) -> Self {
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
            plane,
        }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn plane(&self) -> PlaneTag<T> {
        self.plane
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.values[j * self.grid.nx + i]
    }

    pub fn with_plane(mut self, plane: PlaneTag<T>) -> Self {
        self.plane = plane;
        self
    }

    pub fn conjugate(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            plane: self.plane,
        }
    }

    /// |ψ|² per pixel.
    pub fn intensity(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_intensity(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), T::max)
    }

    /// Σ|ψ|²·pitch², summed in storage order.
    pub fn total_power(&self) -> T {
        let s: T = self.values.iter().map(|v| v.norm_sqr()).sum();
        s * self.grid.pitch * self.grid.pitch
    }

    /// Rescales to unit [`total_power`](Self::total_power).
    pub fn normalize(&self) -> Result<Self> {
        let p = self.total_power();
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::DegenerateField);
        }
        let s = p.sqrt().recip();
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            plane: self.plane,
        })
    }

    /// Bilinear interpolation of Re and Im at physical position `p`; `None`
    /// outside the pixel-centre hull.
    pub fn sample(&self, p: [T; 2]) -> Option<Complex<T>> {
        if !self.grid.contains(p) {
            return None;
        }
        let g = &self.grid;
        let fx = (p[0] - g.origin[0]) / g.pitch;
        let fy = (p[1] - g.origin[1]) / g.pitch;
        let mut i = fx.floor().to_usize()?;
        let mut j = fy.floor().to_usize()?;
        i = i.min(g.nx - 2);
        j = j.min(g.ny - 2);
        let tx = fx - T::of_usize(i);
        let ty = fy - T::of_usize(j);
        let one = T::one();
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        Some(
            v00 * ((one - tx) * (one - ty))
                + v10 * (tx * (one - ty))
                + v01 * ((one - tx) * ty)
                + v11 * (tx * ty),
        )
    }

    /// Resamples onto a polar lattice about `center`.
    ///
    /// Radii are `k·r_max/n_r` for `k = 1..=n_r` (the axis itself is never
    /// sampled), angles `2πj/n_phi`. Re and Im are interpolated separately.
    pub fn resample_polar(
        &self,
        center: [T; 2],
        n_r: usize,
        n_phi: usize,
        r_max: T,
    ) -> Result<PolarField<T>> {
        if n_r == 0 {
            return Err(Error::invalid("n_r", "must be positive"));
        }
        if n_phi < 2 || !n_phi.is_power_of_two() {
            return Err(Error::invalid("n_phi", format!("{n_phi} is not a power of two ≥ 2")));
        }
        if !(r_max > T::zero()) {
            return Err(Error::invalid("r_max", "must be positive"));
        }
        if !self.grid.contains(center) {
            return Err(Error::invalid("center", "outside the grid"));
        }
        let limit = self.grid.distance_to_edge(center);
        if r_max > limit {
            return Err(Error::PolarWindowExceedsGrid {
                r_max: r_max.f64(),
                limit: limit.f64(),
            });
        }
        let dphi = T::TAU() / T::of_usize(n_phi);
        let dr = r_max / T::of_usize(n_r);
        let trig: Vec<(T, T)> = (0..n_phi)
            .map(|j| {
                let a = dphi * T::of_usize(j);
                (a.cos(), a.sin())
            })
            .collect();
        let mut values = vec![Complex::new(T::zero(), T::zero()); n_r * n_phi];
        values
            .par_chunks_mut(n_phi)
            .enumerate()
            .for_each(|(k, ring)| {
                // The outermost ring may touch the hull within rounding.
                let r = (dr * T::of_usize(k + 1)).min(limit);
                for (v, &(c, s)) in ring.iter_mut().zip(&trig) {
                    let p = [center[0] + r * c, center[1] + r * s];
                    *v = self.sample(clamp_into(&self.grid, p)).unwrap_or_default();
                }
            });
        Ok(PolarField {
            n_r,
            n_phi,
            r_max,
            center,
            values,
        })
    }
}

fn clamp_into<T: Real>(g: &GridSpec<T>, p: [T; 2]) -> [T; 2] {
    let last = [g.x(g.nx - 1), g.y(g.ny - 1)];
    [
        p[0].max(g.origin[0]).min(last[0]),
        p[1].max(g.origin[1]).min(last[1]),
    ]
}

/// Field samples on a uniform `(r, φ)` lattice, ring-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField<T> {
    n_r: usize,
    n_phi: usize,
    r_max: T,
    center: [T; 2],
    values: Vec<Complex<T>>,
}

impl<T: Real> PolarField<T> {
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn center(&self) -> [T; 2] {
        self.center
    }

    pub fn dr(&self) -> T {
        self.r_max / T::of_usize(self.n_r)
    }

    pub fn radius(&self, k: usize) -> T {
        self.dr() * T::of_usize(k + 1)
    }

    pub fn angle(&self, j: usize) -> T {
        T::TAU() * T::of_usize(j) / T::of_usize(self.n_phi)
    }

    /// Samples of ring `k` (radius [`radius(k)`](Self::radius)).
    pub fn ring(&self, k: usize) -> &[Complex<T>] {
        &self.values[k * self.n_phi..(k + 1) * self.n_phi]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
}
