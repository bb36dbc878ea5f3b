//! Centred discrete Fourier transforms.
//!
//! For length `n` with reference index `c = n / 2`, sample `i` represents
//! offset `i − c` and bin `k` represents frequency index `k − c`:
//!
//! ```text
//! F[k] = Σ_i f[i] · exp(∓2πi (k − c)(i − c) / n)
//! ```
//!
//! For even `n` this is the usual `fftshift(fft(ifftshift(f)))`. Transforms
//! are unnormalised; callers apply physical scale factors. Rows are processed
//! in parallel, each with its own scratch buffer, so results do not depend on
//! the thread count.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `exp(−2πi …)`.
    Forward,
    /// Kernel `exp(+2πi …)`, unnormalised.
    Inverse,
}

impl From<Direction> for FftDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => FftDirection::Forward,
            Direction::Inverse => FftDirection::Inverse,
        }
    }
}

fn plan<T: Real>(n: usize, dir: Direction) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft(n, dir.into())
}

fn centered_rows<T: Real>(data: &mut [Complex<T>], n: usize, dir: Direction) {
    let fft = plan::<T>(n, dir);
    let c = n / 2;
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex::new(T::zero(), T::zero()); scratch_len],
        |scratch, row| {
            row.rotate_left(c);
            fft.process_with_scratch(row, scratch);
            row.rotate_right(c);
        },
    );
}

/// Centred 1-D transform of every length-`n` chunk of `data`.
pub fn centered_1d<T: Real>(data: &mut [Complex<T>], n: usize, dir: Direction) {
    assert!(n > 0 && data.len() % n == 0, "data length not a multiple of {n}");
    centered_rows(data, n, dir);
}

/// Centred 2-D transform of a row-major `nx × ny` array, in place.
pub fn centered_2d<T: Real>(data: &mut [Complex<T>], nx: usize, ny: usize, dir: Direction) {
    assert_eq!(data.len(), nx * ny, "buffer does not match {nx}x{ny}");
    centered_rows(data, nx, dir);
    let mut t = vec![Complex::new(T::zero(), T::zero()); nx * ny];
    transpose(data, &mut t, nx, ny);
    centered_rows(&mut t, ny, dir);
    transpose(&t, data, ny, nx);
}

/// Writes the transpose of row-major `src` (`cols × rows`) into `dst`.
fn transpose<T: Copy + Send + Sync>(src: &[T], dst: &mut [T], cols: usize, rows: usize) {
    const B: usize = 32;
    // dst has `rows` columns and `cols` rows; fill it in bands of B output rows.
    dst.par_chunks_mut(rows * B)
        .enumerate()
        .for_each(|(band, out)| {
            let c0 = band * B;
            let c1 = (c0 + B).min(cols);
            for r0 in (0..rows).step_by(B) {
                let r1 = (r0 + B).min(rows);
                for c in c0..c1 {
                    let o = &mut out[(c - c0) * rows..(c - c0 + 1) * rows];
                    for r in r0..r1 {
                        o[r] = src[r * cols + c];
                    }
                }
            }
        });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    type C = Complex<f64>;

    fn naive_centered(f: &[C], sign: f64) -> Vec<C> {
        let n = f.len();
        let c = (n / 2) as f64;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        let ph = sign * TAU * (k as f64 - c) * (i as f64 - c) / n as f64;
                        f[i] * C::from_polar(1.0, ph)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_even_and_odd() {
        for n in [8usize, 9, 12, 15] {
            let f: Vec<C> = (0..n)
                .map(|i| C::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut g = f.clone();
                centered_1d(&mut g, n, dir);
                let r = naive_centered(&f, sign);
                for (a, b) in g.iter().zip(&r) {
                    assert!((a - b).norm() < 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn constant_maps_to_reference_bin() {
        let (nx, ny) = (8, 6);
        let mut d = vec![C::new(1.0, 0.0); nx * ny];
        centered_2d(&mut d, nx, ny, Direction::Forward);
        for j in 0..ny {
            for i in 0..nx {
                let v = d[j * nx + i];
                if i == nx / 2 && j == ny / 2 {
                    assert!((v - C::new(48.0, 0.0)).norm() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_2d_non_square() {
        let (nx, ny) = (10, 7);
        let f: Vec<C> = (0..nx * ny)
            .map(|k| C::new((k as f64).sqrt(), (k as f64 * 0.1).sin()))
            .collect();
        let mut g = f.clone();
        centered_2d(&mut g, nx, ny, Direction::Forward);
        centered_2d(&mut g, nx, ny, Direction::Inverse);
        for (a, b) in g.iter().zip(&f) {
            assert!((a / (nx * ny) as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn transpose_blocks() {
        let (cols, rows) = (70, 33);
        let src: Vec<usize> = (0..cols * rows).collect();
        let mut dst = vec![0; cols * rows];
        transpose(&src, &mut dst, cols, rows);
        for r in 0..rows {
            for c in 0..cols {
                assert_eq!(dst[c * rows + r], src[r * cols + c]);
            }
        }
    }
}
