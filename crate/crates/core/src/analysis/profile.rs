use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::scalar::Real;

/// Intensity-weighted centre of mass in physical coordinates.
pub fn centroid<T: Real>(f: &ComplexField<T>) -> Result<[T; 2]> {
    let g = f.grid();
    // Per-row partial sums, combined in row order.
    let rows: Vec<(T, T, T)> = f
        .values()
        .par_chunks(g.nx())
        .enumerate()
        .map(|(j, row)| {
            let y = g.y(j);
            let mut s = T::zero();
            let mut sx = T::zero();
            for (i, v) in row.iter().enumerate() {
                let w = v.norm_sqr();
                s += w;
                sx += w * g.x(i);
            }
            (s, sx, s * y)
        })
        .collect();
    let (s, sx, sy) = rows
        .iter()
        .fold((T::zero(), T::zero(), T::zero()), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::DegenerateField);
    }
    Ok([sx / s, sy / s])
}

/// Mean `|ψ|²` in `n_bins` equal-width rings about `center`, out to `r_max`
/// (default: the distance to the nearest grid edge). Returns `(bin-centre
/// radius, mean intensity)` for every bin that contains at least one pixel.
pub fn radial_profile<T: Real>(
    f: &ComplexField<T>,
    center: [T; 2],
    n_bins: usize,
    r_max: Option<T>,
) -> Result<Vec<(T, T)>> {
    if n_bins == 0 {
        return Err(Error::invalid("n_bins", "must be positive"));
    }
    let g = f.grid();
    let r_max = r_max.unwrap_or_else(|| g.distance_to_edge(center));
    if !(r_max > T::zero()) || !r_max.is_finite() {
        return Err(Error::invalid("r_max", "must be positive; is the centre inside the grid?"));
    }
    let width = r_max / T::of_usize(n_bins);
    let mut sum = vec![T::zero(); n_bins];
    let mut count = vec![0usize; n_bins];
    for j in 0..g.ny() {
        let dy = g.y(j) - center[1];
        for i in 0..g.nx() {
            let r = (g.x(i) - center[0]).hypot(dy);
            if r >= r_max {
                continue;
            }
            let k = (r / width).to_usize().unwrap_or(n_bins).min(n_bins - 1);
            sum[k] += f.at(i, j).norm_sqr();
            count[k] += 1;
        }
    }
    Ok((0..n_bins)
        .filter(|&k| count[k] > 0)
        .map(|k| {
            let r = (T::of_usize(k) + T::of(0.5)) * width;
            (r, sum[k] / T::of_usize(count[k]))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GridSpec, PlaneTag};
    use num_complex::Complex;

    fn gaussian(g: GridSpec<f64>, c: [f64; 2], w: f64) -> ComplexField<f64> {
        ComplexField::from_fn(g, PlaneTag::HologramExit, |x, y| {
            Complex::new((-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (w * w)).exp(), 0.0)
        })
    }

    #[test]
    fn centroid_of_shifted_gaussians() {
        let g = GridSpec::<f64>::centered(128, 96, 0.5).unwrap();
        let c = centroid(&gaussian(g, [0.0, 0.0], 6.0)).unwrap();
        assert!(c[0].abs() < 1e-9 && c[1].abs() < 1e-9);
        let d = [3.3, -2.15];
        let c = centroid(&gaussian(g, d, 6.0)).unwrap();
        assert!((c[0] - d[0]).abs() < 0.005 && (c[1] - d[1]).abs() < 0.005);
        let two = ComplexField::from_fn(g, PlaneTag::HologramExit, |x, y| {
            let a = (-((x + 10.0).powi(2) + (y - 4.0).powi(2)) / 4.0).exp();
            let b = (-((x - 14.0).powi(2) + (y - 4.0).powi(2)) / 4.0).exp();
            Complex::new(a + b, 0.0)
        });
        let c = centroid(&two).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] - 4.0).abs() < 1e-9);
        assert!(matches!(centroid(&ComplexField::zeros(g, PlaneTag::HologramExit)), Err(Error::DegenerateField)));
    }

    #[test]
    fn gaussian_profile_and_power() {
        let g = GridSpec::<f64>::centered(256, 256, 1.0).unwrap();
        let w = 20.0;
        let f = gaussian(g, [0.0, 0.0], w);
        let prof = radial_profile(&f, [0.0, 0.0], 100, None).unwrap();
        let width = 127.0 / 100.0;
        for &(r, v) in &prof {
            if r > 3.0 {
                let e = (-2.0 * r * r / (w * w)).exp();
                assert!((v - e).abs() < 0.01, "r={r}: {v} vs {e}");
            }
        }
        let integral: f64 = prof
            .iter()
            .map(|&(r, v)| v * 2.0 * std::f64::consts::PI * r * width)
            .sum();
        assert!((integral / f.total_power() - 1.0).abs() < 0.01);
    }

    #[test]
    fn doughnut_has_dark_core() {
        let g = GridSpec::<f64>::centered(128, 128, 1.0).unwrap();
        let f = ComplexField::from_fn(g, PlaneTag::HologramExit, |x, y| {
            let r2 = x * x + y * y;
            Complex::from_polar(r2 * (-r2 / 200.0).exp(), 2.0 * y.atan2(x))
        });
        let prof = radial_profile(&f, [0.0, 0.0], 200, None).unwrap();
        let peak = prof.iter().map(|b| b.1).fold(0.0, f64::max);
        assert_eq!(prof[0].1, 0.0);
        assert!(peak > 0.0);
        assert!(radial_profile(&f, [500.0, 0.0], 10, None).is_err());
    }
}
