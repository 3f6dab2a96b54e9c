//! Gegenbauer polynomials with weight tied to the ambient dimension.
//!
//! `C_N` here always means the Gegenbauer polynomial with parameter
//! `(d-2)/2`, the coefficient family of the generating function
//! `(1 - 2rt + r²)^{-(d-2)/2} = Σ_N C_N(t) r^N`.

use num_traits::One;

use crate::num::{factorial, half_weight, pochhammer, Rat};

/// Evaluate `C_N(t)` by the three-term recurrence.
pub fn gegenbauer(n: u32, t: f64, d: usize) -> f64 {
    let lam = (d as f64 - 2.0) / 2.0;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lam * t;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * t * (kf + lam - 1.0) * cur - (kf + 2.0 * lam - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact coefficients of `C_N`: entry `k` multiplies `t^(N - 2k)`.
pub fn gegenbauer_coeffs(n: u32, d: usize) -> Vec<Rat> {
    let lam = half_weight(d);
    let mut out = Vec::with_capacity((n / 2 + 1) as usize);
    for k in 0..=(n / 2) {
        let mut c = pochhammer(&lam, n - k);
        c /= Rat::from_integer(factorial(k));
        c /= Rat::from_integer(factorial(n - 2 * k));
        // (-1)^k 2^(N-2k)
        let mut pow2 = Rat::one();
        for _ in 0..(n - 2 * k) {
            pow2 *= Rat::from_integer(2.into());
        }
        c *= pow2;
        if k % 2 == 1 {
            c = -c;
        }
        out.push(c);
    }
    out
}

/// `C_N(1) = (d-2)_N / N!`.
pub fn gegenbauer_at_one(n: u32, d: usize) -> f64 {
    (crate::num::ln_pochhammer(d as f64 - 2.0, n) - crate::num::ln_factorial(n)).exp()
}

/// Exact `C_N(1)`.
pub fn gegenbauer_at_one_exact(n: u32, d: usize) -> Rat {
    pochhammer(&Rat::from_integer((d as i64 - 2).into()), n)
        / Rat::from_integer(factorial(n))
}

/// Tail `Σ_{N > n_max} C_N(1) ρ^(2N)`, an upper bound on the squared mass an
/// evaluation vector at radius `ρ < 1` loses to truncation.
pub fn evaluation_tail_sq(n_max: u32, rho: f64, d: usize) -> f64 {
    debug_assert!(rho < 1.0);
    let q = rho * rho;
    let mut total = 0.0;
    let mut n = n_max + 1;
    let mut term = gegenbauer_at_one(n, d) * q.powi(n as i32);
    // ratio C_{N+1}(1)/C_N(1) = (d-2+N)/(N+1) -> 1, so the series is
    // eventually dominated by a geometric one with ratio q' < 1.
    loop {
        total += term;
        let ratio = (d as f64 - 2.0 + n as f64) / (n as f64 + 1.0) * q;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < total * 1e-15 + 1e-300 {
            total += term * ratio / (1.0 - ratio);
            break;
        }
        term *= ratio;
        n += 1;
    }
    // guard against rounding so the result stays a true upper bound
    total * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_to_f64;

    #[test]
    fn low_orders() {
        // C_0 = 1, C_1 = (d-2) t
        for d in 3..=5 {
            assert_eq!(gegenbauer(0, 0.3, d), 1.0);
            let t = 0.42;
            assert!((gegenbauer(1, t, d) - (d as f64 - 2.0) * t).abs() < 1e-15);
        }
    }

    #[test]
    fn value_at_one() {
        for d in 3..=5 {
            for n in 0..20u32 {
                let via_rec = gegenbauer(n, 1.0, d);
                let closed = gegenbauer_at_one(n, d);
                assert!(
                    (via_rec - closed).abs() <= 1e-12 * closed.max(1.0),
                    "d={d} n={n}: {via_rec} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn coeffs_match_recurrence() {
        for d in [3, 4, 5] {
            for n in 0..12u32 {
                let coeffs = gegenbauer_coeffs(n, d);
                let t: f64 = -0.37;
                let mut v = 0.0;
                for (k, c) in coeffs.iter().enumerate() {
                    v += rat_to_f64(c) * t.powi((n - 2 * k as u32) as i32);
                }
                assert!((v - gegenbauer(n, t, d)).abs() < 1e-12_f64.max(v.abs() * 1e-13));
            }
        }
    }

    #[test]
    fn generating_function_partial_sum() {
        // (1-2rt+r²)^{-(d-2)/2} ≈ Σ_{N≤K} C_N(t) r^N
        let (d, r, t) = (5, 0.35_f64, 0.6_f64);
        let closed = (1.0 - 2.0 * r * t + r * r).powf(-(d as f64 - 2.0) / 2.0);
        let mut sum = 0.0;
        for n in 0..=120u32 {
            sum += gegenbauer(n, t, d) * r.powi(n as i32);
        }
        assert!((sum - closed).abs() < 1e-12);
    }

    #[test]
    fn tail_dominates_partial_remainders() {
        let tail = evaluation_tail_sq(10, 0.4, 3);
        let mut direct = 0.0;
        for n in 11..200u32 {
            direct += gegenbauer_at_one(n, 3) * 0.4f64.powi(2 * n as i32);
        }
        assert!(tail >= direct * (1.0 - 1e-12));
        assert!(tail < direct * 1.05 + 1e-200);
    }
}
