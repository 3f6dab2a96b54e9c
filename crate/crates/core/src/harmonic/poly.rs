//! Multivariate polynomials over exact big rationals.
//!
//! Coefficients live in a sorted map keyed by [`MultiIndex`]; explicit zeros
//! are never stored, so equality of maps is equality of polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::num::{rat_to_f64, Rat};
use crate::{Error, Result};

/// Exact multivariate polynomial in `d` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    d: usize,
    terms: BTreeMap<MultiIndex, Rat>,
}

/// Wire format: dimension plus (multi-index, numerator, denominator) triples
/// with decimal-string integers.
#[derive(Serialize, Deserialize)]
struct PolyData {
    d: usize,
    terms: Vec<(Vec<u8>, String, String)>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyData {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.0.clone(), v.numer().to_string(), v.denom().to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let data = PolyData::deserialize(de)?;
        let mut p = Poly::zero(data.d);
        for (idx, nu, de_) in data.terms {
            let nu: num_bigint::BigInt = nu.parse().map_err(D::Error::custom)?;
            let den: num_bigint::BigInt = de_.parse().map_err(D::Error::custom)?;
            if den == num_bigint::BigInt::from(0) {
                return Err(D::Error::custom("zero denominator"));
            }
            p.add_term(MultiIndex(idx), Rat::new(nu, den));
        }
        Ok(p)
    }
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: Rat) -> Self {
        let mut p = Poly::zero(d);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(d), c);
        }
        p
    }

    pub fn one(d: usize) -> Self {
        Poly::constant(d, Rat::one())
    }

    /// The coordinate monomial `x_mu`.
    pub fn variable(d: usize, mu: usize) -> Self {
        let mut p = Poly::zero(d);
        p.terms.insert(MultiIndex::unit(d, mu), Rat::one());
        p
    }

    /// `‖x‖² = Σ x_i²`.
    pub fn norm_squared(d: usize) -> Self {
        let mut p = Poly::zero(d);
        for mu in 0..d {
            let mut idx = MultiIndex::zero(d);
            idx.0[mu] = 2;
            p.terms.insert(idx, Rat::one());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Rat)>>(d: usize, it: I) -> Self {
        let mut p = Poly::zero(d);
        for (idx, c) in it {
            p.add_term(idx, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.degree()).max().unwrap_or(0)
    }

    /// True when every monomial has the same total degree (or the poly is 0).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|k| k.degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rat {
        self.terms.get(idx).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, idx: MultiIndex, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(idx.dim(), self.d);
        let entry = self.terms.entry(idx);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.d);
        }
        Poly {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            d: self.d,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.plus(b), ca * cb);
            }
        }
        out
    }

    /// Multiply by the monomial `x_mu`.
    pub fn mul_var(&self, mu: usize) -> Poly {
        Poly {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.raised(mu), v.clone()))
                .collect(),
        }
    }

    /// Partial derivative `∂_mu`.
    pub fn derivative(&self, mu: usize) -> Poly {
        let mut out = Poly::zero(self.d);
        for (idx, c) in &self.terms {
            if let Some(low) = idx.lowered(mu) {
                out.add_term(low, c * Rat::from_integer(idx.0[mu].into()));
            }
        }
        out
    }

    /// Euler operator `Σ x_i ∂_i` (scales each monomial by its degree).
    pub fn euler(&self) -> Poly {
        Poly {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() > 0)
                .map(|(k, v)| (k.clone(), v * Rat::from_integer(k.degree().into())))
                .collect(),
        }
    }

    /// Sum of second derivatives, exact.
    pub fn laplacian(&self) -> Poly {
        let mut out = Poly::zero(self.d);
        for mu in 0..self.d {
            out = out.add(&self.derivative(mu).derivative(mu));
        }
        out
    }

    /// Exact harmonicity test; the zero polynomial counts as harmonic.
    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// Homogeneous component of total degree `n`.
    pub fn homogeneous_part(&self, n: u32) -> Poly {
        Poly {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() == n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rat(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch(self.d, x.len()));
        }
        let mut acc = Rat::zero();
        for (idx, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &e) in x.iter().zip(&idx.0) {
                for _ in 0..e {
                    m *= xi;
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Float evaluation.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (idx, c) in &self.terms {
            let mut m = rat_to_f64(c);
            for (xi, &e) in x.iter().zip(&idx.0) {
                m *= xi.powi(e as i32);
            }
            acc += m;
        }
        acc
    }

    /// Largest coefficient magnitude, as a rational.
    pub fn max_abs_coeff(&self) -> Rat {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (mu, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", mu + 1, e)?;
                }
            }
        }
        Ok(())
    }
}
