use crate::scalar::Real;

// Stirling series coefficients B_{2k} / (2k(2k − 1)).
const STIRLING: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
];

/// `ln |Γ(x)|`. Returns `+∞` at the poles `x = 0, −1, −2, …`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::of(0.5) {
        // Reflection: Γ(x)Γ(1 − x) = π / sin(πx).
        let s = (T::PI() * (x - x.floor())).sin().abs();
        if s == T::zero() {
            return T::infinity();
        }
        return (T::PI() / s).ln() - ln_gamma(T::one() - x);
    }
    let mut x = x;
    let mut shift = T::one();
    while x < T::of(15.0) {
        shift *= x;
        x += T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for c in STIRLING {
        series += T::of(c) * pow;
        pow *= inv2;
    }
    (x - T::of(0.5)) * x.ln() - x + T::of(0.5) * T::TAU().ln() + series - shift.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_match_log_factorials() {
        let mut acc = 0.0f64;
        for k in 1..=300u32 {
            // Γ(k) = (k − 1)!
            let v = ln_gamma(k as f64);
            assert!((v - acc).abs() <= 1e-13 * acc.max(1.0), "k={k}");
            acc += (k as f64).ln();
        }
    }

    #[test]
    fn half_integers() {
        // Γ(n + ½) = (2n)! √π / (4ⁿ n!)
        for n in 0..60u32 {
            let ln_2n_fact: f64 = (1..=2 * n).map(|k| (k as f64).ln()).sum();
            let ln_n_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
            let expect = ln_2n_fact + 0.5 * std::f64::consts::PI.ln()
                - n as f64 * 4f64.ln()
                - ln_n_fact;
            let v = ln_gamma(n as f64 + 0.5);
            assert!((v - expect).abs() < 1e-12 * expect.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn reflection_and_poles() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(-0.5) - (2.0 * sqrt_pi).ln()).abs() < 1e-14);
        assert!((ln_gamma(-1.5) - (4.0 * sqrt_pi / 3.0).ln()).abs() < 1e-14);
        assert!(ln_gamma(0.0f64).is_infinite());
        assert!(ln_gamma(-3.0f64).is_infinite());
    }

    #[test]
    fn large_arguments_stay_finite() {
        let v = ln_gamma(1e5 + 1.0);
        // ln(10⁵!) by direct summation.
        let s: f64 = (1..=100_000u32).map(|k| (k as f64).ln()).sum();
        assert!((v - s).abs() < 1e-9 * s);
        assert!(ln_gamma(1e300f64).is_finite());
    }

    #[test]
    fn single_precision() {
        assert!((ln_gamma(10.0f32) - 362880f32.ln()).abs() < 1e-5);
    }
}
