//! Exact scalar helpers: big rationals, factorials, Pochhammer symbols and
//! binomial coefficients, each with an exact and a float flavor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact scalar used throughout the symbolic layer.
pub type Rat = BigRational;

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= k;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a big integer (0 when `k > n`).
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)` over the rationals.
pub fn pochhammer(x: &Rat, n: u32) -> Rat {
    let mut acc = Rat::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

/// Rising factorial in floats, for tail estimates and bound evaluation.
pub fn pochhammer_f64(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for k in 0..n {
        acc *= x + k as f64;
    }
    acc
}

/// `ln (x)_n`, stable for large `n`.
pub fn ln_pochhammer(x: f64, n: u32) -> f64 {
    let mut acc = 0.0;
    for k in 0..n {
        acc += (x + k as f64).ln();
    }
    acc
}

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    for k in 2..=n as u64 {
        acc += (k as f64).ln();
    }
    acc
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Half-integer rational `p/2`.
pub fn half(p: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(2))
}

/// The weight `(d-2)/2` attached to dimension `d`.
pub fn half_weight(d: usize) -> Rat {
    half(d as i64 - 2)
}

/// Exact rational to nearest f64.
pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fallback for extreme magnitudes: split into quotient and remainder.
        let (q, r) = (
            x.numer() / x.denom(),
            x.numer() % x.denom(),
        );
        q.to_f64().unwrap_or(f64::MAX) + Rat::new(r, x.denom().clone()).to_f64().unwrap_or(0.0)
    })
}
