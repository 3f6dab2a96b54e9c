//! The conformal group of `S^d` as matrices on `R^{d+1,1}`.
//!
//! Points of the sphere are projective null rays. We fix the null basis
//! `(e_1, ..., e_d, e_+, e_-)` with `⟨e_i, e_j⟩ = δ_ij`, `⟨e_+, e_-⟩ = 1`
//! and all other pairings zero, and chart the sphere by
//! `σ₀(x) = x - (‖x‖²/√2) e_+ + (1/√2) e_-`, with the missing point `[e_+]`
//! written `∞`. A matrix preserving the form and the positive null cone acts
//! on the chart by `g σ₀(x) = j_g(x) σ₀(g·x)`; the scalar `j_g` is the
//! inverse conformal factor.

pub mod decompose;
pub mod geometry;
pub mod sampling;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, POLE_EPS, TOL_GROUP};

pub use decompose::{
    decompose_interior, decompose_s, gauss_decompose, GaussFactors, InteriorFactors, SFactors,
};
pub use geometry::{
    classify, hyperbolic_invariant, image_ball, is_ce_config, BallRegion, Class, DiskConfig,
    InvariantDomain,
};

/// The bilinear form of signature `(d+1, 1)` in the null basis.
#[derive(Debug, Clone)]
pub struct MinkowskiGram {
    pub d: usize,
}

impl MinkowskiGram {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(MinkowskiGram { d })
    }

    /// Matrix of the form: identity block, off-diagonal unit in the null pair.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.d + 2;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..self.d {
            g[(i, i)] = 1.0;
        }
        g[(self.d, self.d + 1)] = 1.0;
        g[(self.d + 1, self.d)] = 1.0;
        g
    }

    /// Pairing of two vectors in null-basis coordinates.
    pub fn pair(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let d = self.d;
        let mut s = 0.0;
        for i in 0..d {
            s += u[i] * v[i];
        }
        s + u[d] * v[d + 1] + u[d + 1] * v[d]
    }
}

/// A point of the compactified chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Vec<f64>),
    Infinity,
}

impl SpherePoint {
    pub fn finite(x: &[f64]) -> Self {
        SpherePoint::Finite(x.to_vec())
    }

    pub fn as_finite(&self) -> Option<&[f64]> {
        match self {
            SpherePoint::Finite(x) => Some(x),
            SpherePoint::Infinity => None,
        }
    }
}

/// Element of the conformal group (or its ball-contraction monoid), stored as
/// a `(d+2)×(d+2)` matrix in the null basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMatrix {
    pub d: usize,
    pub m: DMatrix<f64>,
}

/// Generator kinds in the chart.
#[derive(Debug, Clone)]
pub enum Generator {
    /// `x ↦ x + a`.
    Translation(Vec<f64>),
    /// `x ↦ λ x`, `λ > 0`.
    Dilation(f64),
    /// `x ↦ R x` for `R` special orthogonal.
    Rotation(DMatrix<f64>),
    /// Special conformal map with parameter `c`.
    SpecialConformal(Vec<f64>),
    /// The inversion `x ↦ x / ‖x‖²`.
    Inversion,
    /// The Cayley-type map exchanging the ball and a half-space.
    Cayley,
}

/// Build a generator matrix.
pub fn make_generator(kind: Generator, d: usize) -> Result<MobiusMatrix> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let n = d + 2;
    let s2 = std::f64::consts::SQRT_2;
    let mut m = DMatrix::identity(n, n);
    match kind {
        Generator::Translation(a) => {
            if a.len() != d {
                return Err(Error::DimensionMismatch(d, a.len()));
            }
            let norm2: f64 = a.iter().map(|v| v * v).sum();
            for i in 0..d {
                m[(i, d + 1)] = s2 * a[i];
                m[(d, i)] = -s2 * a[i];
            }
            m[(d, d + 1)] = -norm2;
        }
        Generator::Dilation(lambda) => {
            if !(lambda > 0.0) {
                return Err(Error::NonPositiveDilation(lambda));
            }
            m[(d, d)] = lambda;
            m[(d + 1, d + 1)] = 1.0 / lambda;
        }
        Generator::Rotation(r) => {
            if r.nrows() != d || r.ncols() != d {
                return Err(Error::DimensionMismatch(d, r.nrows()));
            }
            let resid = (r.transpose() * &r - DMatrix::identity(d, d)).amax();
            if resid > TOL_GROUP || r.determinant() < 0.0 {
                return Err(Error::NonOrthogonalRotation(resid));
            }
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = r[(i, j)];
                }
            }
        }
        Generator::SpecialConformal(c) => {
            if c.len() != d {
                return Err(Error::DimensionMismatch(d, c.len()));
            }
            let norm2: f64 = c.iter().map(|v| v * v).sum();
            for i in 0..d {
                m[(i, d)] = s2 * c[i];
                m[(d + 1, i)] = -s2 * c[i];
            }
            m[(d + 1, d)] = -norm2;
        }
        Generator::Inversion => {
            m[(d, d)] = 0.0;
            m[(d + 1, d + 1)] = 0.0;
            m[(d, d + 1)] = -1.0;
            m[(d + 1, d)] = -1.0;
        }
        Generator::Cayley => {
            let h = 0.5;
            let k = d - 1; // chart coordinate entering the half-space swap
            m[(k, k)] = 0.0;
            m[(k, d)] = -1.0 / s2;
            m[(k, d + 1)] = -1.0 / s2;
            m[(d, k)] = 1.0 / s2;
            m[(d, d)] = h;
            m[(d, d + 1)] = -h;
            m[(d + 1, k)] = 1.0 / s2;
            m[(d + 1, d)] = -h;
            m[(d + 1, d + 1)] = h;
        }
    }
    Ok(MobiusMatrix { d, m })
}

impl MobiusMatrix {
    pub fn identity(d: usize) -> Self {
        MobiusMatrix { d, m: DMatrix::identity(d + 2, d + 2) }
    }

    pub fn translation(a: &[f64]) -> Self {
        make_generator(Generator::Translation(a.to_vec()), a.len()).expect("valid translation")
    }

    pub fn dilation(d: usize, lambda: f64) -> Result<Self> {
        make_generator(Generator::Dilation(lambda), d)
    }

    pub fn inversion(d: usize) -> Self {
        make_generator(Generator::Inversion, d).expect("valid inversion")
    }

    /// Null lift of a finite chart point.
    pub fn lift(d: usize, x: &[f64]) -> DVector<f64> {
        let s2 = std::f64::consts::SQRT_2;
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let mut v = DVector::zeros(d + 2);
        for i in 0..d {
            v[i] = x[i];
        }
        v[d] = -norm2 / s2;
        v[d + 1] = 1.0 / s2;
        v
    }

    /// `‖MᵀGM - G‖_max`, the defect of form preservation.
    pub fn gram_residual(&self) -> f64 {
        let g = MinkowskiGram { d: self.d }.matrix();
        (self.m.transpose() * &g * &self.m - g).amax()
    }

    /// True when the positive null cone is preserved.
    pub fn is_orthochronous(&self) -> bool {
        let v = Self::lift(self.d, &vec![0.0; self.d]);
        let w = &self.m * v;
        w[self.d + 1] - w[self.d] > 0.0
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    /// Check the matrix invariants for membership in the identity component.
    pub fn validate(&self) -> Result<()> {
        let resid = self.gram_residual();
        if resid > TOL_GROUP {
            return Err(Error::NonOrthogonalRotation(resid));
        }
        if !self.is_orthochronous() {
            return Err(Error::NotApplicable("matrix flips the null cone"));
        }
        Ok(())
    }

    /// Group inverse `G Mᵀ G` (uses `G² = I`).
    pub fn inverse(&self) -> MobiusMatrix {
        let g = MinkowskiGram { d: self.d }.matrix();
        MobiusMatrix { d: self.d, m: &g * self.m.transpose() * &g }
    }

    /// Matrix product; the left factor acts second.
    pub fn compose(&self, other: &MobiusMatrix) -> Result<MobiusMatrix> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Ok(MobiusMatrix { d: self.d, m: &self.m * &other.m })
    }

    /// Product of a word of factors, leftmost acting last.
    pub fn compose_all(factors: &[MobiusMatrix]) -> Result<MobiusMatrix> {
        let d = factors.first().map(|f| f.d).unwrap_or(3);
        let mut acc = MobiusMatrix::identity(d);
        for f in factors {
            acc = acc.compose(f)?;
        }
        Ok(acc)
    }

    /// Apply to a chart point: returns the image and the lift scalar `j`
    /// (zero when the image is `∞`).
    pub fn act(&self, p: &SpherePoint) -> (SpherePoint, f64) {
        let d = self.d;
        let s2 = std::f64::consts::SQRT_2;
        let w = match p {
            SpherePoint::Finite(x) => &self.m * Self::lift(d, x),
            SpherePoint::Infinity => self.m.column(d).into_owned(),
        };
        let j = s2 * w[d + 1];
        let scale = w.amax();
        if j.abs() < POLE_EPS * scale.max(1.0) {
            return (SpherePoint::Infinity, 0.0);
        }
        let y: Vec<f64> = (0..d).map(|i| w[i] / j).collect();
        (SpherePoint::Finite(y), j)
    }

    /// Image of a finite point, requiring a finite result.
    pub fn act_finite(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.act(&SpherePoint::finite(x)) {
            (SpherePoint::Finite(y), _) => Ok(y),
            (SpherePoint::Infinity, _) => Err(Error::PoleAtPoint),
        }
    }

    /// Conformal factor `Ω = 1/j` at a finite point with finite image.
    pub fn conformal_factor(&self, x: &[f64]) -> Result<f64> {
        match self.act(&SpherePoint::finite(x)) {
            (SpherePoint::Finite(_), j) => Ok(1.0 / j),
            (SpherePoint::Infinity, _) => Err(Error::PoleAtPoint),
        }
    }
}

/// Serialized form: dimension plus row-major entries.
#[derive(Serialize, Deserialize)]
pub struct MobiusMatrixData {
    pub d: usize,
    pub m: Vec<f64>,
}

impl Serialize for MobiusMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let data = MobiusMatrixData {
            d: self.d,
            m: self.m.row_iter().flat_map(|r| r.iter().cloned().collect::<Vec<_>>()).collect(),
        };
        data.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MobiusMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let data = MobiusMatrixData::deserialize(de)?;
        let n = data.d + 2;
        if data.m.len() != n * n {
            return Err(serde::de::Error::custom("matrix size mismatch"));
        }
        Ok(MobiusMatrix { d: data.d, m: DMatrix::from_row_slice(n, n, &data.m) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot3(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
    }

    #[test]
    fn generators_preserve_form() {
        let d = 3;
        let gens = [
            make_generator(Generator::Translation(vec![0.3, -0.1, 0.2]), d).unwrap(),
            make_generator(Generator::Dilation(1.7), d).unwrap(),
            make_generator(Generator::Rotation(rot3(0.8)), d).unwrap(),
            make_generator(Generator::SpecialConformal(vec![0.2, 0.1, -0.4]), d).unwrap(),
            make_generator(Generator::Inversion, d).unwrap(),
            make_generator(Generator::Cayley, d).unwrap(),
        ];
        for g in &gens {
            assert!(g.gram_residual() < TOL_GROUP);
            assert!(g.is_orthochronous());
        }
        // all but the inversion are in the identity component
        for g in &gens[..4] {
            assert!((g.determinant() - 1.0).abs() < 1e-9);
        }
        assert!((gens[4].determinant() + 1.0).abs() < 1e-9);
        assert!((gens[5].determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dilation_block_shape() {
        let g = make_generator(Generator::Dilation(2.0), 3).unwrap();
        assert_eq!(g.m[(3, 3)], 2.0);
        assert_eq!(g.m[(4, 4)], 0.5);
        for i in 0..3 {
            assert_eq!(g.m[(i, i)], 1.0);
        }
    }

    #[test]
    fn zero_translation_is_identity() {
        let g = make_generator(Generator::Translation(vec![0.0; 3]), 3).unwrap();
        assert_eq!(g, MobiusMatrix::identity(3));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_generator(Generator::Dilation(-1.0), 3),
            Err(Error::NonPositiveDilation(_))
        ));
        let bad = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            make_generator(Generator::Rotation(bad), 3),
            Err(Error::NonOrthogonalRotation(_))
        ));
    }

    #[test]
    fn actions_match_chart_formulas() {
        let d = 3;
        // translation
        let t = MobiusMatrix::translation(&[0.2, -0.3, 0.1]);
        let (p, j) = t.act(&SpherePoint::finite(&[0.1, 0.1, 0.1]));
        for (a, b) in p.as_finite().unwrap().iter().zip([0.3, -0.2, 0.2]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((j - 1.0).abs() < 1e-12);
        // dilation scales with j = 1/λ
        let dil = MobiusMatrix::dilation(d, 2.0).unwrap();
        let (p, j) = dil.act(&SpherePoint::finite(&[0.1, 0.0, 0.0]));
        let y = p.as_finite().unwrap();
        assert!((y[0] - 0.2).abs() < 1e-14 && y[1].abs() < 1e-14);
        assert!((j - 0.5).abs() < 1e-14);
        // special conformal factor
        let c = vec![0.2, 0.0, -0.1];
        let k = make_generator(Generator::SpecialConformal(c.clone()), d).unwrap();
        let x = [0.3, 0.2, 0.1];
        let cx: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        let c2: f64 = c.iter().map(|v| v * v).sum();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let expect_j = 1.0 - 2.0 * cx + c2 * x2;
        let (_, j) = k.act(&SpherePoint::finite(&x));
        assert!((j - expect_j).abs() < 1e-12);
        assert!((k.conformal_factor(&x).unwrap() - 1.0 / expect_j).abs() < 1e-12);
    }

    #[test]
    fn inversion_fixes_unit_sphere() {
        let d = 3;
        let inv = MobiusMatrix::inversion(d);
        let x = {
            let v = [0.3, -0.5, 0.81];
            let n: f64 = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let (p, j) = inv.act(&SpherePoint::finite(&x));
        let y = p.as_finite().unwrap();
        for (a, b) in x.iter().zip(y) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((j - 1.0).abs() < 1e-12);
        // and sends 0 to ∞
        let (p, j) = inv.act(&SpherePoint::finite(&[0.0, 0.0, 0.0]));
        assert_eq!(p, SpherePoint::Infinity);
        assert_eq!(j, 0.0);
    }

    #[test]
    fn conjugation_identity_inversion_translation() {
        // J T(a) J = K(-a)
        let d = 3;
        let a = vec![0.25, -0.15, 0.05];
        let j = MobiusMatrix::inversion(d);
        let t = MobiusMatrix::translation(&a);
        let lhs = j.compose(&t).unwrap().compose(&j).unwrap();
        let rhs = make_generator(
            Generator::SpecialConformal(a.iter().map(|v| -v).collect()),
            d,
        )
        .unwrap();
        assert!((&lhs.m - &rhs.m).amax() < TOL_GROUP);
    }

    #[test]
    fn one_parameter_dilations_compose() {
        let d = 4;
        let a = MobiusMatrix::dilation(d, 2.0).unwrap();
        let b = MobiusMatrix::dilation(d, 3.0).unwrap();
        let ab = a.compose(&b).unwrap();
        let six = MobiusMatrix::dilation(d, 6.0).unwrap();
        assert!((&ab.m - &six.m).amax() < TOL_GROUP);
        // g g^{-1} = id
        let idm = ab.compose(&ab.inverse()).unwrap();
        assert!((&idm.m - DMatrix::identity(d + 2, d + 2)).amax() < TOL_GROUP);
    }

    #[test]
    fn cocycle_law_on_samples() {
        let d = 3;
        let g = MobiusMatrix::translation(&[0.1, 0.2, -0.1])
            .compose(&MobiusMatrix::dilation(d, 0.7).unwrap())
            .unwrap();
        let h = make_generator(Generator::SpecialConformal(vec![0.1, -0.2, 0.15]), d)
            .unwrap()
            .compose(&MobiusMatrix::translation(&[-0.2, 0.1, 0.3]))
            .unwrap();
        let gh = g.compose(&h).unwrap();
        for x in [[0.1, 0.0, -0.2], [0.3, 0.2, 0.1], [-0.25, 0.2, 0.0]] {
            let (hx, jh) = h.act(&SpherePoint::finite(&x));
            let (_, jg) = g.act(&hx);
            let (_, jgh) = gh.act(&SpherePoint::finite(&x));
            assert!((jg * jh - jgh).abs() < 1e-12 * jgh.abs().max(1.0));
        }
    }

    #[test]
    fn mobius_serde_roundtrip() {
        let g = MobiusMatrix::translation(&[0.1, 0.2, 0.3]);
        let s = serde_json::to_string(&g).unwrap();
        let back: MobiusMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
