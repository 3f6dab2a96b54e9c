//! The conformal algebra action on harmonic polynomials and the inner
//! products it preserves.
//!
//! Conventions: the degree operator acts as `E_x + (d-2)/2`; the raising
//! generator attached to coordinate `mu` acts as `2 x_mu (E_x + (d-2)/2) -
//! ‖x‖² ∂_mu` and raises degree by one; the lowering generator acts as
//! `∂_mu`; rotations act as `x_mu ∂_nu - x_nu ∂_mu`. On the grading these
//! satisfy the so(d+1,1) commutation relations.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use once_cell::sync::Lazy;

use super::green::kelvin_dual_via_green;
use super::multi_index::{indices_of_degree, MultiIndex};
use super::poly::Poly;
use crate::num::{binomial, half_weight, pochhammer, Rat};
use crate::{Error, Result};

/// Generators of the conformal Lie algebra in their action on harmonics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoGenerator {
    /// Degree-raising generator attached to coordinate `mu` (momentum).
    Raising(usize),
    /// Degree-lowering generator attached to coordinate `mu` (special conformal).
    Lowering(usize),
    /// Degree operator `E_x + (d-2)/2`.
    Degree,
    /// Rotation in the `(mu, nu)` plane.
    Rotation(usize, usize),
}

/// Apply a generator to a polynomial, exactly.
pub fn act_twisted(gen: SoGenerator, f: &Poly) -> Poly {
    let d = f.dim();
    let lam = half_weight(d);
    match gen {
        SoGenerator::Raising(mu) => {
            // 2 x_mu (E + lam) f - ‖x‖² ∂_mu f
            let ef = f.euler().add(&f.scale(&lam));
            let t1 = ef.mul_var(mu).scale(&Rat::from_integer(2.into()));
            let t2 = Poly::norm_squared(d).mul(&f.derivative(mu));
            t1.sub(&t2)
        }
        SoGenerator::Lowering(mu) => f.derivative(mu),
        SoGenerator::Degree => f.euler().add(&f.scale(&lam)),
        SoGenerator::Rotation(mu, nu) => {
            f.derivative(nu).mul_var(mu).sub(&f.derivative(mu).mul_var(nu))
        }
    }
}

/// `f(P).1`: apply the raising polynomial of `f` to the constant `1`.
///
/// For homogeneous harmonic `f` of degree `m` this equals
/// `2^m ((d-2)/2)_m f` (the projection formula); for general `f` it is the
/// canonical harmonic image used by the projection and the zonal vectors.
pub fn raise_polynomial(f: &Poly) -> Poly {
    let d = f.dim();
    let table = raising_table(d, f.degree());
    let mut out = Poly::zero(d);
    for (alpha, c) in f.terms() {
        out = out.add(&table.poly(alpha).scale(c));
    }
    out
}

/// Dimension of the space of degree-`n` harmonics in `d` variables.
pub fn dim_harm(d: usize, n: u32) -> u64 {
    use num_traits::ToPrimitive;
    let a = binomial(n + d as u32 - 1, d as u32 - 1);
    let b = if n >= 2 {
        binomial(n + d as u32 - 3, d as u32 - 1)
    } else {
        0.into()
    };
    (a - b).to_u64().expect("harmonic dimension fits u64")
}

/// Monomial inner product `(x^α, x^β) = δ_{α,β} α!`, exact.
pub fn fisher_inner(f: &Poly, g: &Poly) -> Result<Rat> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let mut acc = Rat::zero();
    for (alpha, cf) in f.terms() {
        let cg = g.coeff(alpha);
        if !cg.is_zero() {
            acc += cf * cg * Rat::from_integer(alpha.factorial());
        }
    }
    Ok(acc)
}

/// Representation inner product on harmonics: degreewise proportional to the
/// monomial product with factor `2^m ((d-2)/2)_m`, and zero across degrees.
pub fn h_inner(f: &Poly, g: &Poly) -> Result<Rat> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    if !f.is_harmonic() || !g.is_harmonic() {
        return Err(Error::NotHarmonic);
    }
    let d = f.dim();
    let lam = half_weight(d);
    let max = f.degree().max(g.degree());
    let mut acc = Rat::zero();
    for m in 0..=max {
        let fm = f.homogeneous_part(m);
        let gm = g.homogeneous_part(m);
        if fm.is_zero() || gm.is_zero() {
            continue;
        }
        let fish = fisher_inner(&fm, &gm)?;
        let mut scale = pochhammer(&lam, m);
        for _ in 0..m {
            scale *= Rat::from_integer(2.into());
        }
        acc += fish / scale;
    }
    Ok(acc)
}

/// Orthogonal projection onto harmonics, exact. Non-homogeneous input is
/// split by degree.
pub fn project_harmonic(f: &Poly) -> Poly {
    let d = f.dim();
    let lam = half_weight(d);
    let mut out = Poly::zero(d);
    for m in 0..=f.degree() {
        let fm = f.homogeneous_part(m);
        if fm.is_zero() {
            continue;
        }
        let raised = raise_polynomial(&fm);
        let mut scale = pochhammer(&lam, m);
        for _ in 0..m {
            scale *= Rat::from_integer(2.into());
        }
        out = out.add(&raised.scale(&scale.recip()));
    }
    out
}

/// Degree-`n` evaluation vector at a rational point: the harmonic polynomial
/// pairing to `g ↦ g(a)` in the representation inner product.
pub fn zonal(a: &[Rat], n: u32) -> Poly {
    let d = a.len();
    let table = raising_table(d, n);
    let mut out = Poly::zero(d);
    for alpha in indices_of_degree(d, n) {
        let mut c = Rat::from_integer(1.into()) / Rat::from_integer(alpha.factorial());
        for (ai, &e) in a.iter().zip(&alpha.0) {
            for _ in 0..e {
                c *= ai;
            }
        }
        if c.is_zero() {
            continue;
        }
        out = out.add(&table.poly(&alpha).scale(&c));
    }
    out
}

/// Kelvin-type dual: `‖x‖^(d-2+2m) f(-∂) ‖x‖^(2-d)` for homogeneous `f`.
/// Computed by exact differentiation of the Green kernel; equals
/// [`raise_polynomial`] identically.
pub fn kelvin_dual(f: &Poly) -> Poly {
    kelvin_dual_via_green(f)
}

/// Table of the canonical harmonics `P^γ.1` for `|γ| ≤ max_degree`.
pub struct RaisingTable {
    pub d: usize,
    pub max_degree: u32,
    polys: BTreeMap<MultiIndex, Poly>,
}

impl RaisingTable {
    fn build(d: usize, max_degree: u32) -> Self {
        let mut polys = BTreeMap::new();
        polys.insert(MultiIndex::zero(d), Poly::one(d));
        let mut frontier = vec![MultiIndex::zero(d)];
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for idx in frontier {
                let base = polys.get(&idx).unwrap().clone();
                for mu in 0..d {
                    let raised = idx.raised(mu);
                    if !polys.contains_key(&raised) {
                        polys.insert(raised.clone(), act_twisted(SoGenerator::Raising(mu), &base));
                        next.push(raised);
                    }
                }
            }
            frontier = next;
        }
        RaisingTable { d, max_degree, polys }
    }

    pub fn poly(&self, gamma: &MultiIndex) -> &Poly {
        self.polys
            .get(gamma)
            .expect("degree exceeds raising table")
    }

    /// Evaluate every table entry at a float point.
    pub fn values_at(&self, x: &[f64]) -> BTreeMap<MultiIndex, f64> {
        self.polys
            .iter()
            .map(|(k, p)| (k.clone(), p.eval_f64(x)))
            .collect()
    }
}

static RAISING_CACHE: Lazy<Mutex<HashMap<usize, Arc<RaisingTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Shared raising table for dimension `d`, grown on demand.
pub fn raising_table(d: usize, max_degree: u32) -> Arc<RaisingTable> {
    let mut cache = RAISING_CACHE.lock().unwrap();
    match cache.get(&d) {
        Some(t) if t.max_degree >= max_degree => t.clone(),
        _ => {
            let t = Arc::new(RaisingTable::build(d, max_degree));
            cache.insert(d, t.clone());
            t
        }
    }
}

static RAISING_F64_CACHE: Lazy<Mutex<HashMap<usize, (u32, Arc<Vec<(MultiIndex, super::poly_f64::PolyF64)>>)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Float mirror of the raising table, for evaluation-heavy consumers.
pub fn raising_table_f64(
    d: usize,
    max_degree: u32,
) -> Arc<Vec<(MultiIndex, super::poly_f64::PolyF64)>> {
    let mut cache = RAISING_F64_CACHE.lock().unwrap();
    match cache.get(&d) {
        Some((deg, t)) if *deg >= max_degree => t.clone(),
        _ => {
            let exact = raising_table(d, max_degree);
            let v: Vec<(MultiIndex, super::poly_f64::PolyF64)> = exact
                .polys
                .iter()
                .map(|(k, p)| (k.clone(), super::poly_f64::PolyF64::from_exact(p)))
                .collect();
            let arc = Arc::new(v);
            cache.insert(d, (exact.max_degree, arc.clone()));
            arc
        }
    }
}
