use super::ln_gamma;
use crate::scalar::Real;

/// Bessel function of the first kind `J_n(x)` for integer order and real
/// argument.
///
/// Small arguments use the power series with a log-domain leading term.
/// Otherwise Miller's backward recurrence runs from an order well above
/// `max(n, x)` and is normalised by `J₀ + 2ΣJ₂ₖ = 1`; intermediate values
/// are rescaled whenever they grow large, and the number of rescalings is
/// carried in the exponent so tiny results do not flush to zero.
pub fn bessel_j<T: Real>(n: i64, x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let odd = n.rem_euclid(2) == 1;
    // J₋ₙ = (−1)ⁿ Jₙ and Jₙ(−x) = (−1)ⁿ Jₙ(x).
    let mut sign = T::one();
    if n < 0 && odd {
        sign = -sign;
    }
    if x < T::zero() && odd {
        sign = -sign;
    }
    let n = n.unsigned_abs();
    let x = x.abs();
    if x == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let nf = T::of(n as f64);
    if x <= T::of(2.0) || x * x < nf + T::one() {
        sign * series(n, x)
    } else {
        sign * miller(n, x)
    }
}

fn series<T: Real>(n: u64, x: T) -> T {
    let nf = T::of(n as f64);
    let half = x / T::of(2.0);
    // (x/2)ⁿ/n!: a direct product is exact to rounding for moderate n; the
    // log form avoids overflow beyond that.
    let lead = if n <= 60 {
        (1..=n).fold(T::one(), |acc, k| acc * half / T::of(k as f64))
    } else {
        (nf * half.ln() - ln_gamma(nf + T::one())).exp()
    };
    if lead == T::zero() {
        return lead;
    }
    let q = half * half;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..500u32 {
        let kf = T::of(k as f64);
        term = -term * q / (kf * (kf + nf));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * T::of(0.1) {
            break;
        }
    }
    lead * sum
}

fn miller<T: Real>(n: u64, x: T) -> T {
    let top = x.max(T::of(n as f64));
    let start = top + T::of(30.0) + T::of(15.0) * top.cbrt();
    let mut m = start.ceil().to_u64().unwrap_or(u64::MAX / 4);
    m += m % 2;

    let big = T::max_value().sqrt();
    let shrink = big.recip();
    let two_over_x = T::of(2.0) / x;

    let mut above = T::zero(); // J_{k+1}
    let mut cur = T::min_positive_value().sqrt(); // J_k, arbitrary seed
    let mut norm = T::zero();
    let mut captured = T::zero();
    let mut rescales_after_capture = 0i32;
    let mut have_capture = false;

    let mut k = m;
    loop {
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { T::of(2.0) * cur };
        }
        if k == n {
            captured = cur;
            have_capture = true;
        }
        if k == 0 {
            break;
        }
        let below = T::of(k as f64) * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > big {
            cur *= shrink;
            above *= shrink;
            norm *= shrink;
            if have_capture {
                rescales_after_capture += 1;
            } else {
                captured *= shrink;
            }
        }
    }
    if rescales_after_capture == 0 {
        return captured / norm;
    }
    if captured == T::zero() {
        return captured;
    }
    let log = captured.abs().ln() - norm.abs().ln()
        + T::of(rescales_after_capture as f64) * shrink.ln();
    let mag = log.exp();
    if (captured < T::zero()) != (norm < T::zero()) {
        -mag
    } else {
        mag
    }
}
