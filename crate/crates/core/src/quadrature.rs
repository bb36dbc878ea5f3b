//! Globally adaptive 7/15-point Gauss–Kronrod quadrature on finite intervals,
//! for real or complex integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Termination settings: stop once the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Piece<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

fn rule<T: Real, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> (Complex<T>, T) {
    let half = (b - a) / T::of(2.0);
    let mid = (a + b) / T::of(2.0);
    let fc = f(mid);
    let mut kron = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for k in 0..7 {
        let dx = half * T::of(XGK[k]);
        let s = f(mid - dx) + f(mid + dx);
        kron += s * T::of(WGK[k]);
        if k % 2 == 1 {
            gauss += s * T::of(WG[k / 2]);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    (value, error)
}

/// Integrates a complex-valued `f` over `[a, b]`, returning the value and an
/// error estimate. Subdivision always bisects the interval with the largest
/// error estimate, so the result is deterministic.
pub fn integrate_complex<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    tol: Tolerance,
) -> Result<(Complex<T>, T)> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("interval", "bounds must be finite"));
    }
    if a == b {
        return Ok((Complex::new(T::zero(), T::zero()), T::zero()));
    }
    let (value, error) = rule(&f, a, b);
    let mut pieces = vec![Piece { a, b, value, error }];
    loop {
        let total: Complex<T> = pieces.iter().map(|p| p.value).sum();
        let err: T = pieces.iter().map(|p| p.error).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::NonConvergent("integrand is not finite".into()));
        }
        let target = T::of(tol.abs_tol).max(T::of(tol.rel_tol) * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        if pieces.len() >= tol.max_intervals {
            return Err(Error::NonConvergent(format!(
                "error estimate {:e} above target {:e} after {} intervals",
                err.f64(),
                target.f64(),
                pieces.len()
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .fold(0, |w, (k, p)| if p.error > pieces[w].error { k } else { w });
        let Piece { a, b, .. } = pieces.swap_remove(worst);
        let mid = (a + b) / T::of(2.0);
        if !(mid > a && mid < b) {
            return Err(Error::NonConvergent("interval underflow".into()));
        }
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, error) = rule(&f, lo, hi);
            pieces.push(Piece {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Real-valued counterpart of [`integrate_complex`].
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: Tolerance) -> Result<(T, T)> {
    let (v, e) = integrate_complex(|x| Complex::new(f(x), T::zero()), a, b, tol)?;
    Ok((v.re, e))
}

/// Sum of adaptive integrals over consecutive panels `[edges[k], edges[k+1]]`.
pub fn integrate_panels<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    edges: &[T],
    tol: Tolerance,
) -> Result<Complex<T>> {
    let mut total = Complex::new(T::zero(), T::zero());
    for w in edges.windows(2) {
        total += integrate_complex(&f, w[0], w[1], tol)?.0;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 15 integrates degree ≤ 22 exactly.
        let (v, _) = integrate(|x: f64| x.powi(22) - 3.0 * x.powi(7), -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (2f64.powi(23) + 1.0) / 23.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((v / exact - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let (v, _) = integrate(|x: f64| (50.0 * x).cos(), 0.0, 3.0, Tolerance::default()).unwrap();
        assert!((v - (150f64).sin() / 50.0).abs() < 1e-13);
        let (v, _) = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v / exact - 1.0).abs() < 1e-11);
        let (v, _) = integrate(|x: f64| x.sqrt(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn complex_gaussian_chirp() {
        // ∫₀^∞ exp(−(1 + i)r²) r dr = 1/(2(1 + i))
        let c = Complex::new(1.0f64, 1.0);
        let (v, _) = integrate_complex(|r: f64| (-c * r * r).exp() * r, 0.0, 12.0, Tolerance::default()).unwrap();
        assert!((v - 0.5 / c).norm() < 1e-13);
    }

    #[test]
    fn reports_failure() {
        let tol = Tolerance {
            max_intervals: 5,
            ..Tolerance::default()
        };
        assert!(matches!(
            integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, tol),
            Err(Error::NonConvergent(_))
        ));
        assert!(integrate(|x: f64| x, 0.0, f64::INFINITY, Tolerance::default()).is_err());
    }
}
