//! Multi-indices `α ∈ N^d` keying monomials `x^α`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::num::factorial;

/// Exponent vector of a monomial. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u8>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The unit index `e_mu`.
    pub fn unit(d: usize, mu: usize) -> Self {
        let mut v = vec![0; d];
        v[mu] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// `α! = Π α_i!` as a big integer.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::from(1u8);
        for &e in &self.0 {
            acc *= factorial(e as u32);
        }
        acc
    }

    /// Index raised by one in slot `mu`.
    pub fn raised(&self, mu: usize) -> Self {
        let mut v = self.0.clone();
        v[mu] += 1;
        MultiIndex(v)
    }

    /// Index lowered by one in slot `mu`; `None` when the entry is zero.
    pub fn lowered(&self, mu: usize) -> Option<Self> {
        if self.0[mu] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[mu] -= 1;
        Some(MultiIndex(v))
    }

    /// Componentwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }
}

/// All multi-indices of dimension `d` and total degree `n`, lexicographic.
pub fn indices_of_degree(d: usize, n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; d];
    fill(&mut out, &mut cur, 0, n);
    out.sort();
    out
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u8>, pos: usize, left: u32) {
    if pos == cur.len() - 1 {
        cur[pos] = left as u8;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in 0..=left {
        cur[pos] = e as u8;
        fill(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}
