//! Exact symbolic calculus for functions of the shape `P(x) / ‖x‖^k`.
//!
//! Weighted forms of this kind are closed under partial derivatives, which is
//! all that is needed to differentiate the Green kernel `‖x‖^(2-d)` to any
//! order exactly.

use std::collections::BTreeMap;

use super::multi_index::MultiIndex;
use super::poly::Poly;
use crate::num::Rat;

/// `numer(x) / ‖x‖^k`, exact. After `j` derivatives of the Green kernel the
/// numerator is homogeneous of degree `j` and the weight is `d - 2 + 2j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialForm {
    pub numer: Poly,
    pub k: u32,
}

impl RadialForm {
    /// The Green kernel `1 / ‖x‖^(d-2)`.
    pub fn green(d: usize) -> Self {
        RadialForm { numer: Poly::one(d), k: d as u32 - 2 }
    }

    /// Partial derivative; the weight grows by two.
    pub fn derivative(&self, mu: usize) -> Self {
        let d = self.numer.dim();
        let dp = self.numer.derivative(mu);
        let term1 = dp.mul(&Poly::norm_squared(d));
        let term2 = self
            .numer
            .mul_var(mu)
            .scale(&Rat::from_integer(self.k.into()));
        RadialForm { numer: term1.sub(&term2), k: self.k + 2 }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.numer.eval_f64(x) / r2.powf(self.k as f64 / 2.0)
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }
}

/// Table of all derivatives `∂^δ ‖x‖^(2-d)` with `|δ| ≤ max_order`.
///
/// Built by raising one exponent at a time, so each entry is produced from a
/// previously computed one.
pub struct GreenTable {
    pub d: usize,
    pub max_order: u32,
    forms: BTreeMap<MultiIndex, RadialForm>,
}

impl GreenTable {
    pub fn build(d: usize, max_order: u32) -> Self {
        let mut forms = BTreeMap::new();
        forms.insert(MultiIndex::zero(d), RadialForm::green(d));
        let mut frontier = vec![MultiIndex::zero(d)];
        for _ in 0..max_order {
            let mut next = Vec::new();
            for idx in frontier {
                let base = forms.get(&idx).unwrap().clone();
                for mu in 0..d {
                    let raised = idx.raised(mu);
                    if !forms.contains_key(&raised) {
                        forms.insert(raised.clone(), base.derivative(mu));
                        next.push(raised);
                    }
                }
            }
            frontier = next;
        }
        GreenTable { d, max_order, forms }
    }

    pub fn form(&self, delta: &MultiIndex) -> Option<&RadialForm> {
        self.forms.get(delta)
    }

    /// `∂^δ ‖x‖^(2-d)` evaluated at `x`.
    pub fn eval(&self, delta: &MultiIndex, x: &[f64]) -> f64 {
        self.forms
            .get(delta)
            .expect("derivative order exceeds table")
            .eval_f64(x)
    }

    /// Float table of values at a fixed point, keyed like the form table.
    pub fn values_at(&self, x: &[f64]) -> BTreeMap<MultiIndex, f64> {
        self.forms
            .iter()
            .map(|(k, f)| (k.clone(), f.eval_f64(x)))
            .collect()
    }
}

/// `‖x‖^(d-2+2m) f(-∂) ‖x‖^(2-d)` for homogeneous `f` of degree `m`.
///
/// All contributing forms carry the weight `d - 2 + 2m`, so the weight cancels
/// and the result is an exact polynomial of degree `m`.
pub fn kelvin_dual_via_green(f: &Poly) -> Poly {
    let d = f.dim();
    let m = f.degree();
    debug_assert!(f.is_homogeneous());
    let table = GreenTable::build(d, m);
    let mut out = Poly::zero(d);
    for (alpha, c) in f.terms() {
        let form = table.form(alpha).expect("order covered");
        debug_assert_eq!(form.k, d as u32 - 2 + 2 * m);
        let signed = if alpha.degree() % 2 == 1 { -c.clone() } else { c.clone() };
        out = out.add(&form.numer.scale(&signed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_is_harmonic_away_from_origin() {
        // Σ_μ ∂_μ² ‖x‖^(2-d) = 0 exactly: second derivatives share the weight
        // d+2, so the numerators must cancel.
        for d in [3, 4, 5] {
            let g = RadialForm::green(d);
            let mut acc = Poly::zero(d);
            for mu in 0..d {
                let second = g.derivative(mu).derivative(mu);
                assert_eq!(second.k, d as u32 + 2);
                acc = acc.add(&second.numer);
            }
            assert!(acc.is_zero(), "d = {d}");
        }
    }

    #[test]
    fn first_derivative_value() {
        // ∂_1 ‖x‖^(2-d) = (2-d) x_1 ‖x‖^(-d)
        let d = 3;
        let g = RadialForm::green(d).derivative(0);
        let x = [0.4, -0.2, 0.1];
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let expect = (2.0 - d as f64) * x[0] / r.powi(d as i32);
        assert!((g.eval_f64(&x) - expect).abs() < 1e-14);
    }

    #[test]
    fn kelvin_dual_degree_one() {
        // f = x_1 gives (d-2) x_1
        for d in [3, 4, 5] {
            let f = Poly::variable(d, 0);
            let k = kelvin_dual_via_green(&f);
            let expect = Poly::variable(d, 0)
                .scale(&Rat::from_integer((d as i64 - 2).into()));
            assert_eq!(k, expect);
        }
    }

    #[test]
    fn green_table_matches_individual_derivatives() {
        let d = 3;
        let table = GreenTable::build(d, 3);
        let x = [0.3, 0.5, -0.7];
        let delta = MultiIndex(vec![2, 1, 0]);
        let manual = RadialForm::green(d)
            .derivative(0)
            .derivative(0)
            .derivative(1);
        let expect = manual.eval_f64(&x);
        assert!((table.eval(&delta, &x) - expect).abs() < 1e-12 * expect.abs().max(1.0));
    }
}
