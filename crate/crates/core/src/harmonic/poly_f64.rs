//! Float-coefficient polynomials for the dense numeric paths.
//!
//! The exact layer ([`super::poly::Poly`]) owns all symbolic identities; this
//! mirror type exists so that basis evaluation, matrix assembly and rotation
//! substitution run on `f64` without rational overhead.

use std::collections::BTreeMap;

use super::multi_index::MultiIndex;
use super::poly::Poly;
use crate::num::rat_to_f64;

/// Sparse float polynomial; terms sorted by multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyF64 {
    d: usize,
    pub(crate) terms: Vec<(MultiIndex, f64)>,
}

impl PolyF64 {
    pub fn zero(d: usize) -> Self {
        PolyF64 { d, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn from_exact(p: &Poly) -> Self {
        PolyF64 {
            d: p.dim(),
            terms: p.terms().map(|(k, v)| (k.clone(), rat_to_f64(v))).collect(),
        }
    }

    pub fn from_map(d: usize, map: BTreeMap<MultiIndex, f64>, prune: f64) -> Self {
        PolyF64 {
            d,
            terms: map.into_iter().filter(|(_, v)| v.abs() > prune).collect(),
        }
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(k, _)| k.degree()).max().unwrap_or(0)
    }

    /// `self + c * other`, merging sorted term lists.
    pub fn axpy(&self, c: f64, other: &PolyF64) -> PolyF64 {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = match (self.terms.get(i), other.terms.get(j)) {
                (Some((a, _)), Some((b, _))) => a <= b,
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                let (a, va) = &self.terms[i];
                if j < other.terms.len() && other.terms[j].0 == *a {
                    let v = va + c * other.terms[j].1;
                    if v != 0.0 {
                        out.push((a.clone(), v));
                    }
                    j += 1;
                } else {
                    out.push((a.clone(), *va));
                }
                i += 1;
            } else {
                let (b, vb) = &other.terms[j];
                let v = c * vb;
                if v != 0.0 {
                    out.push((b.clone(), v));
                }
                j += 1;
            }
        }
        PolyF64 { d: self.d, terms: out }
    }

    pub fn scale(&self, c: f64) -> PolyF64 {
        PolyF64 {
            d: self.d,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &PolyF64) -> PolyF64 {
        let mut map: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                *map.entry(a.plus(b)).or_insert(0.0) += va * vb;
            }
        }
        PolyF64::from_map(self.d, map, 0.0)
    }

    pub fn derivative(&self, mu: usize) -> PolyF64 {
        let mut map: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (idx, c) in &self.terms {
            if let Some(low) = idx.lowered(mu) {
                *map.entry(low).or_insert(0.0) += c * idx.0[mu] as f64;
            }
        }
        PolyF64::from_map(self.d, map, 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (idx, c) in &self.terms {
            let mut m = *c;
            for (xi, &e) in x.iter().zip(&idx.0) {
                m *= xi.powi(e as i32);
            }
            acc += m;
        }
        acc
    }

    /// Substitution `x -> A x` for a linear map `A` (rows index outputs).
    ///
    /// Images of monomials are built by peeling one variable at a time, so the
    /// cost stays polynomial in the degree.
    pub fn substitute_linear(&self, a: &nalgebra::DMatrix<f64>) -> PolyF64 {
        let d = self.d;
        // Linear forms (A x)_mu as degree-one polys.
        let lin: Vec<PolyF64> = (0..d)
            .map(|mu| {
                let mut terms = Vec::new();
                for j in 0..d {
                    let v = a[(mu, j)];
                    if v != 0.0 {
                        terms.push((MultiIndex::unit(d, j), v));
                    }
                }
                terms.sort_by(|x, y| x.0.cmp(&y.0));
                PolyF64 { d, terms }
            })
            .collect();
        let mut cache: BTreeMap<MultiIndex, PolyF64> = BTreeMap::new();
        let mut one = PolyF64::zero(d);
        one.terms.push((MultiIndex::zero(d), 1.0));
        cache.insert(MultiIndex::zero(d), one);
        let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (idx, c) in &self.terms {
            let img = Self::monomial_image(idx, &lin, &mut cache);
            for (k, v) in &img.terms {
                *out.entry(k.clone()).or_insert(0.0) += c * v;
            }
        }
        PolyF64::from_map(d, out, 0.0)
    }

    fn monomial_image(
        idx: &MultiIndex,
        lin: &[PolyF64],
        cache: &mut BTreeMap<MultiIndex, PolyF64>,
    ) -> PolyF64 {
        if let Some(p) = cache.get(idx) {
            return p.clone();
        }
        let mu = idx.0.iter().position(|&e| e > 0).expect("nonconstant");
        let lower = idx.lowered(mu).unwrap();
        let rest = Self::monomial_image(&lower, lin, cache);
        let img = rest.mul(&lin[mu]);
        cache.insert(idx.clone(), img.clone());
        img
    }
}
