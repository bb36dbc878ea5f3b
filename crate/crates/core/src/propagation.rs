//! Scalar paraxial propagation to the far field and to Fresnel planes.
//!
//! All transforms use the centred DFT of [`crate::fft`]: on an `n`-point axis
//! pixel `n/2` is the reference. Conventions for a field `ψ(x, y)`:
//!
//! * far field: `Ψ(θ) = (1/λ) ∫ ψ(x) exp(−2πi x·θ/λ) dx`, sampled at angle
//!   pitch `λ/(n·pitch)`;
//! * Fresnel, single transform: `ψ_z(X) = 1/(iλz) · exp(iπX²/(λz)) ∫ ψ(x)
//!   exp(iπx²/(λz)) exp(−2πi x·X/(λz)) dx`, output pitch `λ|z|/(n·pitch)`;
//! * Fresnel, angular spectrum: transfer function `exp(−iπλz(fx² + fy²))` on
//!   the input grid.
//!
//! The common factor `exp(2πi z/λ)` is dropped everywhere. Every propagator is
//! unitary: total power is conserved up to rounding.
//!
//! The single-transform path samples its input chirp adequately only for
//! `|z| ≥ n·pitch²/λ`; the angular-spectrum transfer function only below that
//! bound. [`fresnel`] switches between them there.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{centered_2d, Direction};
use crate::field::{ComplexField, GridSpec, PlaneTag};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagationMode<T> {
    Fraunhofer,
    Fresnel { z: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationPlan<T> {
    mode: PropagationMode<T>,
    wavelength: T,
}

impl<T: Real> PropagationPlan<T> {
    pub fn new(mode: PropagationMode<T>, wavelength: T) -> Result<Self> {
        check_wavelength(wavelength)?;
        if let PropagationMode::Fresnel { z } = mode {
            check_distance(z)?;
        }
        Ok(Self { mode, wavelength })
    }

    pub fn mode(&self) -> PropagationMode<T> {
        self.mode
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn apply(&self, f: &ComplexField<T>) -> Result<ComplexField<T>> {
        match self.mode {
            PropagationMode::Fraunhofer => fraunhofer(f, self.wavelength),
            PropagationMode::Fresnel { z } => fresnel(f, z, self.wavelength),
        }
    }
}

fn check_wavelength<T: Real>(wavelength: T) -> Result<()> {
    if !(wavelength > T::zero()) || !wavelength.is_finite() {
        return Err(Error::invalid("wavelength", "must be positive and finite"));
    }
    Ok(())
}

fn check_distance<T: Real>(z: T) -> Result<()> {
    if z == T::zero() || !z.is_finite() {
        return Err(Error::invalid("z", "must be non-zero and finite"));
    }
    Ok(())
}

fn square_side<T: Real>(g: &GridSpec<T>) -> Result<usize> {
    if g.nx() != g.ny() {
        return Err(Error::NonSquareGrid {
            nx: g.nx(),
            ny: g.ny(),
        });
    }
    Ok(g.nx())
}

/// Offset of the physical grid from the centred convention, per axis.
fn origin_offset<T: Real>(g: &GridSpec<T>) -> [T; 2] {
    g.center()
}

/// Multiplies sample `(i, j)` by `row_factor(j) · col_factor[i]`.
fn apply_separable<T: Real>(
    values: &mut [Complex<T>],
    nx: usize,
    col: &[Complex<T>],
    row: &[Complex<T>],
) {
    values
        .par_chunks_mut(nx)
        .zip(row.par_iter())
        .for_each(|(line, &r)| {
            for (v, &c) in line.iter_mut().zip(col) {
                *v = *v * (r * c);
            }
        });
}

/// `exp(i·a·(k − c)²)` style factor along one axis of length `n`.
fn quadratic_phase<T: Real>(n: usize, coeff: T) -> Vec<Complex<T>> {
    let c = n / 2;
    (0..n)
        .map(|k| {
            let s = T::of_usize(k) - T::of_usize(c);
            Complex::from_polar(T::one(), coeff * s * s)
        })
        .collect()
}

/// `exp(i·a·(k − c))` along one axis.
fn linear_phase<T: Real>(n: usize, coeff: T) -> Vec<Complex<T>> {
    let c = n / 2;
    (0..n)
        .map(|k| Complex::from_polar(T::one(), coeff * (T::of_usize(k) - T::of_usize(c))))
        .collect()
}

/// Far-field amplitude on a centred angular grid of pitch `λ/(n·pitch)` radians.
/// Requires a square grid.
pub fn fraunhofer<T: Real>(f: &ComplexField<T>, wavelength: T) -> Result<ComplexField<T>> {
    check_wavelength(wavelength)?;
    let g = f.grid();
    let n = square_side(g)?;
    let p = g.pitch();
    let nt = T::of_usize(n);
    let out_pitch = wavelength / (nt * p);
    let mut values = f.values().to_vec();
    centered_2d(&mut values, n, n, Direction::Forward);
    // Pixel n/2 sits at `offset`, not at 0: restore the linear phase this omits.
    let [dx, dy] = origin_offset(g);
    let scale = p * p / wavelength;
    let kx: Vec<_> = linear_phase(n, -T::TAU() * dx / (nt * p))
        .into_iter()
        .map(|v| v * scale)
        .collect();
    let ky = linear_phase(n, -T::TAU() * dy / (nt * p));
    apply_separable(&mut values, n, &kx, &ky);
    ComplexField::new(GridSpec::centered(n, n, out_pitch)?, values, PlaneTag::Fraunhofer)
}

/// Smallest `|z|` at which the single-transform method samples its chirps.
pub fn single_transform_min_distance<T: Real>(grid: &GridSpec<T>, wavelength: T) -> T {
    let n = T::of_usize(grid.nx().max(grid.ny()));
    n * grid.pitch() * grid.pitch() / wavelength
}

/// Fresnel propagation by one chirp-multiplied transform. The output grid is
/// centred with pitch `λ|z|/(n·pitch)`. Requires a square grid and
/// `|z| ≥ n·pitch²/λ`.
pub fn fresnel_single_transform<T: Real>(
    f: &ComplexField<T>,
    z: T,
    wavelength: T,
) -> Result<ComplexField<T>> {
    check_wavelength(wavelength)?;
    check_distance(z)?;
    let g = f.grid();
    let n = square_side(g)?;
    let critical = single_transform_min_distance(g, wavelength);
    if z.abs() < critical {
        return Err(Error::UseAngularSpectrum {
            z: z.f64(),
            critical: critical.f64(),
        });
    }
    let p = g.pitch();
    let nt = T::of_usize(n);
    let lz = wavelength * z;
    let out_pitch = wavelength * z.abs() / (nt * p);
    let [dx, dy] = origin_offset(g);

    // Input chirp at physical x = (i − c)·p + d, split into separable factors.
    let chirp_in = |d: T| -> Vec<Complex<T>> {
        let c = n / 2;
        (0..n)
            .map(|i| {
                let x = (T::of_usize(i) - T::of_usize(c)) * p + d;
                Complex::from_polar(T::one(), T::PI() * x * x / lz)
            })
            .collect()
    };
    let mut values = f.values().to_vec();
    apply_separable(&mut values, n, &chirp_in(dx), &chirp_in(dy));

    let dir = if z > T::zero() {
        Direction::Forward
    } else {
        Direction::Inverse
    };
    centered_2d(&mut values, n, n, dir);

    // Output chirp, 1/(iλz)·pitch² and the shift phase exp(−2πi d·X/(λz)).
    let q = T::PI() * out_pitch * out_pitch / lz;
    let factor = Complex::new(T::zero(), -(p * p) / lz);
    let col: Vec<_> = quadratic_phase(n, q)
        .into_iter()
        .zip(linear_phase(n, -T::TAU() * dx * out_pitch / lz))
        .map(|(a, b)| a * b * factor)
        .collect();
    let row: Vec<_> = quadratic_phase(n, q)
        .into_iter()
        .zip(linear_phase(n, -T::TAU() * dy * out_pitch / lz))
        .map(|(a, b)| a * b)
        .collect();
    apply_separable(&mut values, n, &col, &row);
    ComplexField::new(
        GridSpec::centered(n, n, out_pitch)?,
        values,
        PlaneTag::Fresnel { z: Some(z) },
    )
}

/// Fresnel propagation on the input grid via the transfer function
/// `exp(−iπλz(fx² + fy²))`. Any grid shape.
pub fn fresnel_angular_spectrum<T: Real>(
    f: &ComplexField<T>,
    z: T,
    wavelength: T,
) -> Result<ComplexField<T>> {
    check_wavelength(wavelength)?;
    check_distance(z)?;
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let p = g.pitch();
    let mut values = f.values().to_vec();
    centered_2d(&mut values, nx, ny, Direction::Forward);
    let a = |n: usize| {
        let span = T::of_usize(n) * p;
        -T::PI() * wavelength * z / (span * span)
    };
    let norm = T::one() / T::of_usize(nx * ny);
    let col: Vec<_> = quadratic_phase(nx, a(nx)).into_iter().map(|v| v * norm).collect();
    let row = quadratic_phase(ny, a(ny));
    apply_separable(&mut values, nx, &col, &row);
    centered_2d(&mut values, nx, ny, Direction::Inverse);
    ComplexField::new(g, values, PlaneTag::Fresnel { z: Some(z) })
}

/// Fresnel propagation, choosing the single-transform method on square grids
/// at `|z| ≥ n·pitch²/λ` and the angular spectrum otherwise.
pub fn fresnel<T: Real>(f: &ComplexField<T>, z: T, wavelength: T) -> Result<ComplexField<T>> {
    check_wavelength(wavelength)?;
    check_distance(z)?;
    let g = f.grid();
    if g.nx() == g.ny() && z.abs() >= single_transform_min_distance(g, wavelength) {
        fresnel_single_transform(f, z, wavelength)
    } else {
        fresnel_angular_spectrum(f, z, wavelength)
    }
}

/// Grating equation `nλ/Λ`, radians.
pub fn order_angle<T: Real>(n: i64, period: T, wavelength: T) -> T {
    T::of(n as f64) * wavelength / period
}

fn require_far_field<T: Real>(f: &ComplexField<T>) -> Result<()> {
    match f.plane() {
        PlaneTag::Fraunhofer => Ok(()),
        other => Err(Error::WrongPlane {
            expected: "fraunhofer",
            found: other.name(),
        }),
    }
}

/// Keeps a disk of angular `radius` about order `n` (on the +x carrier axis),
/// zeroing everything else. Fails if the order centre is off the grid.
pub fn select_order<T: Real>(
    far: &ComplexField<T>,
    n: i64,
    period: T,
    wavelength: T,
    radius: T,
) -> Result<ComplexField<T>> {
    require_far_field(far)?;
    if !(radius > T::zero()) {
        return Err(Error::invalid("radius", "must be positive"));
    }
    let center = [order_angle(n, period, wavelength), T::zero()];
    if !far.grid().contains(center) {
        return Err(Error::DiskExitsGrid {
            x: center[0].f64(),
            y: center[1].f64(),
        });
    }
    let r2 = radius * radius;
    Ok(mask(far, |x, y| {
        (x - center[0]).powi(2) + (y - center[1]).powi(2) <= r2
    }))
}

/// Zeroes the half plane below order `n`: angles `x < (n − ½)λ/Λ`.
pub fn exclude_lower_orders<T: Real>(
    far: &ComplexField<T>,
    n: i64,
    period: T,
    wavelength: T,
) -> Result<ComplexField<T>> {
    require_far_field(far)?;
    let edge = (T::of(n as f64) - T::of(0.5)) * wavelength / period;
    Ok(mask(far, |x, _| x >= edge))
}

fn mask<T: Real>(f: &ComplexField<T>, keep: impl Fn(T, T) -> bool + Sync) -> ComplexField<T> {
    let g = *f.grid();
    let mut out = f.clone();
    out.values_mut()
        .par_chunks_mut(g.nx())
        .enumerate()
        .for_each(|(j, row)| {
            let y = g.y(j);
            for (i, v) in row.iter_mut().enumerate() {
                if !keep(g.x(i), y) {
                    *v = Complex::new(T::zero(), T::zero());
                }
            }
        });
    out
}
