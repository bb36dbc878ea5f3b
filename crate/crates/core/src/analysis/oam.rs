use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{centered_1d, Direction};
use crate::field::ComplexField;
use crate::scalar::Real;

/// Power per winding number.
#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum<T> {
    /// Ascending, `−n_phi/2 ..= n_phi/2 − 1`.
    pub m_values: Vec<i64>,
    /// Sums to one.
    pub weights: Vec<T>,
    pub mean: T,
    /// Weighted standard deviation over `√N_eff`, where `N_eff` is the Kish
    /// effective number of rings under their power weights.
    pub sem: T,
}

impl<T: Real> OamSpectrum<T> {
    pub fn weight(&self, m: i64) -> T {
        let lo = self.m_values[0];
        usize::try_from(m - lo)
            .ok()
            .and_then(|k| self.weights.get(k).copied())
            .unwrap_or_else(T::zero)
    }

    /// Winding number with the largest weight (lowest `m` on ties).
    pub fn peak(&self) -> i64 {
        let mut best = 0;
        for (k, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = k;
            }
        }
        self.m_values[best]
    }

    pub fn std_dev(&self) -> T {
        let var: T = self
            .m_values
            .iter()
            .zip(&self.weights)
            .map(|(&m, &w)| w * (T::of(m as f64) - self.mean).powi(2))
            .sum();
        var.sqrt()
    }
}

/// Azimuthal decomposition about `center`.
///
/// The field is resampled on `n_r` rings out to `r_max`; each ring's
/// coefficients `a_m(r) = (1/n_phi) Σ_j ψ(r, φ_j) e^{−imφ_j}` are combined as
/// `weight(m) ∝ Σ_r |a_m(r)|² r Δr`, the power carried by `m`.
pub fn oam_spectrum<T: Real>(
    f: &ComplexField<T>,
    center: [T; 2],
    n_r: usize,
    n_phi: usize,
    r_max: T,
) -> Result<OamSpectrum<T>> {
    let polar = f.resample_polar(center, n_r, n_phi, r_max)?;
    let mut rings = polar.values().to_vec();
    // The centred transform differs from the plain one by (−1)^m per bin,
    // which leaves |a_m| unchanged; bin k holds m = k − n_phi/2.
    centered_1d(&mut rings, n_phi, Direction::Forward);
    let dr = polar.dr();
    let inv_n2 = T::one() / T::of_usize(n_phi * n_phi);
    let per_ring: Vec<Vec<T>> = rings
        .par_chunks(n_phi)
        .enumerate()
        .map(|(k, ring)| {
            let jac = polar.radius(k) * dr * inv_n2;
            ring.iter().map(|a: &Complex<T>| a.norm_sqr() * jac).collect()
        })
        .collect();
    let mut weights = vec![T::zero(); n_phi];
    let mut ring_power = Vec::with_capacity(n_r);
    for ring in &per_ring {
        let mut s = T::zero();
        for (w, &v) in weights.iter_mut().zip(ring) {
            *w += v;
            s += v;
        }
        ring_power.push(s);
    }
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::DegenerateField);
    }
    for w in &mut weights {
        *w /= total;
    }
    let half = (n_phi / 2) as i64;
    let m_values: Vec<i64> = (0..n_phi as i64).map(|k| k - half).collect();
    let mean: T = m_values
        .iter()
        .zip(&weights)
        .map(|(&m, &w)| T::of(m as f64) * w)
        .sum();
    let sum_sq: T = ring_power.iter().map(|&p| p * p).sum();
    let n_eff = total * total / sum_sq;
    let mut spec = OamSpectrum {
        m_values,
        weights,
        mean,
        sem: T::zero(),
    };
    spec.sem = spec.std_dev() / n_eff.sqrt();
    Ok(spec)
}
