//! The truncated reproducing-kernel Hilbert space of harmonic polynomials
//! and the monoid action on it.
//!
//! The space is the orthogonal sum of the degree blocks up to a cutoff.
//! Evaluation vectors have coordinates `Y_{n,l}(a)`; dilations act
//! diagonally with entries `r^(n + (d-2)/2)`; rotations act block-diagonally;
//! a general ball contraction acts through its big-cell factorization as
//! (raising exponential) · (diagonal) · (rotation) · (lowering exponential).
//! All four factors are exact on the truncation: entries that connect degrees
//! `n → m` need exactly `|m - n|` ladder steps, so no truncated intermediate
//! degree contributes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::harmonic::basis::{GradedHarmonicBasis, BASIS_FORMAT_VERSION};
use crate::harmonic::gegenbauer::{evaluation_tail_sq, gegenbauer, gegenbauer_at_one};
use crate::harmonic::ops::dim_harm;
use crate::harmonic::poly_f64::PolyF64;
use crate::mobius::{gauss_decompose, MobiusMatrix};
use crate::num::ln_factorial;
use crate::{Error, Result};

/// Degree-truncated harmonic Hilbert space.
pub struct Truncation {
    pub basis: Arc<GradedHarmonicBasis>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Truncation {
    pub fn new(basis: Arc<GradedHarmonicBasis>) -> Self {
        let mut offsets = Vec::with_capacity(basis.blocks.len() + 1);
        let mut acc = 0;
        for b in &basis.blocks {
            offsets.push(acc);
            acc += b.len();
        }
        offsets.push(acc);
        Truncation { basis, offsets, dim: acc }
    }

    pub fn d(&self) -> usize {
        self.basis.d
    }

    pub fn n_max(&self) -> u32 {
        self.basis.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat index range of the degree-`n` block.
    pub fn block(&self, n: u32) -> std::ops::Range<usize> {
        self.offsets[n as usize]..self.offsets[n as usize + 1]
    }

    /// Degree owning a flat index.
    pub fn degree_of(&self, idx: usize) -> u32 {
        debug_assert!(idx < self.dim);
        (self.offsets.partition_point(|&o| o <= idx) - 1) as u32
    }

    /// Exponent `n + (d-2)/2` of the dilation eigenvalue at a flat index.
    pub fn scaling_weight(&self, idx: usize) -> f64 {
        self.degree_of(idx) as f64 + (self.d() as f64 - 2.0) / 2.0
    }
}

/// Coordinate vector over a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct HVector {
    pub coords: DVector<f64>,
}

impl HVector {
    pub fn zero(t: &Truncation) -> Self {
        HVector { coords: DVector::zeros(t.dim()) }
    }

    pub fn basis_vector(t: &Truncation, idx: usize) -> Self {
        let mut v = Self::zero(t);
        v.coords[idx] = 1.0;
        v
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn dot(&self, other: &HVector) -> f64 {
        self.coords.dot(&other.coords)
    }
}

/// Dense operator over a truncation, with provenance for export.
#[derive(Debug, Clone)]
pub struct HOperator {
    pub d: usize,
    pub n_max: u32,
    pub mat: DMatrix<f64>,
}

impl HOperator {
    pub fn apply(&self, v: &HVector) -> HVector {
        HVector { coords: &self.mat * &v.coords }
    }

    /// Largest singular value by power iteration on the normal matrix.
    pub fn operator_norm(&self) -> f64 {
        let m = &self.mat;
        let n = m.ncols();
        let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let mut last = 0.0;
        for _ in 0..500 {
            let w = m.transpose() * (m * &v);
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = w / norm;
            if (norm - last).abs() <= 1e-13 * norm.max(1.0) {
                last = norm;
                break;
            }
            last = norm;
        }
        last.sqrt()
    }

    /// Wire format with a self-describing header.
    pub fn export(&self) -> HOperatorData {
        HOperatorData {
            d: self.d,
            n_max: self.n_max,
            basis_version: BASIS_FORMAT_VERSION,
            rows: self.mat.nrows(),
            cols: self.mat.ncols(),
            data: self
                .mat
                .row_iter()
                .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
                .collect(),
        }
    }
}

/// Serialized operator: `(d, n_max, basis-version)` header plus row-major data.
#[derive(Serialize, Deserialize)]
pub struct HOperatorData {
    pub d: usize,
    pub n_max: u32,
    pub basis_version: u32,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl HOperatorData {
    pub fn into_operator(self) -> Result<HOperator> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::InvalidConfig("matrix payload size mismatch".into()));
        }
        Ok(HOperator {
            d: self.d,
            n_max: self.n_max,
            mat: DMatrix::from_row_slice(self.rows, self.cols, &self.data),
        })
    }
}

/// Reproducing kernel `(1 - 2(x,y) + |x|²|y|²)^{-(d-2)/2}`.
pub fn kernel(x: &[f64], y: &[f64], d: usize) -> Result<f64> {
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    if nx >= 1.0 || ny >= 1.0 {
        return Err(Error::OutsideDisk);
    }
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok((1.0 - 2.0 * xy + nx * ny).powf(-(d as f64 - 2.0) / 2.0))
}

/// Degree-`n` piece of the kernel pairing, via the generating family.
pub fn kernel_degree_term(x: &[f64], y: &[f64], n: u32, d: usize) -> f64 {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0 {
        return 1.0;
    }
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let t = (xy / (nx * ny)).clamp(-1.0, 1.0);
    nx.powi(n as i32) * ny.powi(n as i32) * gegenbauer(n, t, d)
}

/// Partial sum `Σ_{n≤K}` of the degreewise kernel pairing.
pub fn kernel_partial_sum(x: &[f64], y: &[f64], k: u32, d: usize) -> f64 {
    (0..=k).map(|n| kernel_degree_term(x, y, n, d)).sum()
}

/// Tail bound `Σ_{N>K} C_N(1) (‖x‖‖y‖)^N` for the kernel partial sums.
pub fn kernel_tail(x: &[f64], y: &[f64], k: u32, d: usize) -> f64 {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    evaluation_tail_sq(k, (nx * ny).sqrt(), d)
}

/// Evaluation vector at `a`: coordinates `Y_{n,l}(a)`.
pub fn e_vector(a: &[f64], t: &Truncation) -> Result<HVector> {
    if a.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
        return Err(Error::OutsideDisk);
    }
    Ok(HVector { coords: DVector::from_vec(t.basis.eval_all(a)) })
}

/// Squared norm of the tail an evaluation vector loses to truncation.
pub fn e_vector_tail_sq(a: &[f64], t: &Truncation) -> f64 {
    let rho = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    evaluation_tail_sq(t.n_max(), rho, t.d())
}

/// Diagonal dilation operator with entries `r^(n + (d-2)/2)`.
pub fn op_dilation(r: f64, t: &Truncation) -> Result<HOperator> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::NonPositiveDilation(r));
    }
    let mut mat = DMatrix::zeros(t.dim(), t.dim());
    for i in 0..t.dim() {
        mat[(i, i)] = r.powf(t.scaling_weight(i));
    }
    Ok(HOperator { d: t.d(), n_max: t.n_max(), mat })
}

/// Block-diagonal rotation action `Y ↦ Y ∘ R^{-1}`.
pub fn op_rotation(r: &DMatrix<f64>, t: &Truncation) -> Result<HOperator> {
    let d = t.d();
    let resid = (r.transpose() * r - DMatrix::identity(d, d)).amax();
    if resid > crate::TOL_GROUP || r.determinant() < 0.0 {
        return Err(Error::NonOrthogonalRotation(resid));
    }
    let r_inv = r.transpose();
    let mut mat = DMatrix::zeros(t.dim(), t.dim());
    for (n, block) in t.basis.blocks.iter().enumerate() {
        let range = t.block(n as u32);
        let scale = h_scale(d, n as u32);
        for (i, y) in block.polys.iter().enumerate() {
            let image = y.substitute_linear(&r_inv);
            for (j, z) in block.polys.iter().enumerate() {
                mat[(range.start + j, range.start + i)] = fisher_dot(&image, z) / scale;
            }
        }
    }
    Ok(HOperator { d, n_max: t.n_max(), mat })
}

/// `2^n ((d-2)/2)_n`, the degree-`n` ratio between the monomial and
/// representation inner products, as a float.
pub fn h_scale(d: usize, n: u32) -> f64 {
    2f64.powi(n as i32) * crate::num::pochhammer_f64((d as f64 - 2.0) / 2.0, n)
}

/// Monomial inner product of float polynomials.
pub(crate) fn fisher_dot(p: &PolyF64, q: &PolyF64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (pt, qt) = (p.terms(), q.terms());
    let mut acc = 0.0;
    while i < pt.len() && j < qt.len() {
        match pt[i].0.cmp(&qt[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let fac: f64 = pt[i]
                    .0
                     .0
                    .iter()
                    .map(|&e| ln_factorial(e as u32))
                    .sum::<f64>()
                    .exp();
                acc += pt[i].1 * qt[j].1 * fac;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// One-step lowering blocks of `Σ_mu c_mu ∂_mu`: entry `[n-1]` maps the
/// degree-`n` block to degree `n-1`.
fn lowering_blocks(c: &[f64], t: &Truncation) -> Vec<DMatrix<f64>> {
    let d = t.d();
    let mut out = Vec::with_capacity(t.n_max() as usize);
    for n in 1..=t.n_max() {
        let src = &t.basis.blocks[n as usize];
        let dst = &t.basis.blocks[n as usize - 1];
        let scale = h_scale(d, n - 1);
        let mut m = DMatrix::zeros(dst.len(), src.len());
        for (i, y) in src.polys.iter().enumerate() {
            let mut image = PolyF64::zero(d);
            for (mu, &cm) in c.iter().enumerate() {
                if cm != 0.0 {
                    image = image.axpy(cm, &y.derivative(mu));
                }
            }
            if image.terms().is_empty() {
                continue;
            }
            for (j, z) in dst.polys.iter().enumerate() {
                m[(j, i)] = fisher_dot(&image, z) / scale;
            }
        }
        out.push(m);
    }
    out
}

/// Exponential of the one-step lowering ladder, dense.
fn exp_lowering(blocks: &[DMatrix<f64>], t: &Truncation) -> DMatrix<f64> {
    let mut mat = DMatrix::identity(t.dim(), t.dim());
    for n in 1..=t.n_max() {
        let src = t.block(n);
        let mut acc = blocks[n as usize - 1].clone();
        let mut k = 1u32;
        loop {
            let dst = t.block(n - k);
            let fac = ln_factorial(k).exp();
            for (bi, i) in dst.clone().enumerate() {
                for (bj, j) in src.clone().enumerate() {
                    mat[(i, j)] = acc[(bi, bj)] / fac;
                }
            }
            if n - k == 0 {
                break;
            }
            k += 1;
            acc = &blocks[(n - k) as usize] * acc;
        }
    }
    mat
}

/// Exponential of the adjoint (raising) ladder: transposed one-step blocks.
fn exp_raising(blocks: &[DMatrix<f64>], t: &Truncation) -> DMatrix<f64> {
    let mut mat = DMatrix::identity(t.dim(), t.dim());
    for n in 1..=t.n_max() {
        let src = t.block(n - 1);
        let mut acc = blocks[n as usize - 1].transpose();
        let mut m = n;
        let mut k = 1u32;
        loop {
            let dst = t.block(m);
            let fac = ln_factorial(k).exp();
            for (bi, i) in dst.clone().enumerate() {
                for (bj, j) in src.clone().enumerate() {
                    mat[(i, j)] = acc[(bi, bj)] / fac;
                }
            }
            if m == t.n_max() {
                break;
            }
            k += 1;
            m += 1;
            acc = blocks[m as usize - 1].transpose() * acc;
        }
    }
    mat
}

/// Matrix of the monoid action of a ball contraction on the truncation.
///
/// Built as `exp(raising(shift)) · diag(scale) · rotation · exp(lowering(sct))`
/// from the big-cell factors. The orientation (raising goes with the
/// translation part, lowering with the special-conformal part, both with
/// positive sign) is pinned by `validate_rho` against the kernel action.
pub fn op_rho(g: &MobiusMatrix, t: &Truncation) -> Result<HOperator> {
    let factors = gauss_decompose(g)?;
    let d = t.d();
    let mut diag = DMatrix::zeros(t.dim(), t.dim());
    for i in 0..t.dim() {
        diag[(i, i)] = factors.scale.powf(t.scaling_weight(i));
    }
    let rot = op_rotation(&factors.rotation, t)?;
    let raise = exp_raising(&lowering_blocks(&factors.shift, t), t);
    let lower = exp_lowering(&lowering_blocks(&factors.sct, t), t);
    let mat = raise * diag * rot.mat * lower;
    Ok(HOperator { d, n_max: t.n_max(), mat })
}

/// Kernel-action defect of the truncated monoid action.
#[derive(Debug, Clone, Copy)]
pub struct RhoDefect {
    /// Largest norm of `op_rho(g) E_x - Ω^(d-2)/2 E_{g·x}` over the samples.
    pub max_defect: f64,
    /// Largest analytic tail bound over the samples.
    pub tail_bound: f64,
    /// `max_defect / tail_bound`, the certificate ratio (must stay ≲ 1).
    pub ratio: f64,
}

/// Defect of `op_rho` against the kernel action over a sample of points.
///
/// The truncated matrix equals `P ρ(g) P`, so the defect against the exact
/// relation `ρ(g) E_x = Ω^{(d-2)/2} E_{g·x}` is `-P ρ(g) (1-P) E_x`, whose
/// norm is at most the tail mass of `E_x` because the action is a
/// contraction.
pub fn validate_rho(g: &MobiusMatrix, t: &Truncation, xs: &[Vec<f64>]) -> Result<RhoDefect> {
    let op = op_rho(g, t)?;
    let p = (t.d() as f64 - 2.0) / 2.0;
    let mut max_defect = 0.0f64;
    let mut tail_bound = 0.0f64;
    for x in xs {
        let ex = e_vector(x, t)?;
        let gx = g.act_finite(x)?;
        let omega = g.conformal_factor(x)?;
        let egx = e_vector(&gx, t)?;
        let lhs = op.apply(&ex);
        let err = (lhs.coords - egx.coords * omega.powf(p)).norm();
        max_defect = max_defect.max(err);
        tail_bound = tail_bound.max(e_vector_tail_sq(x, t).sqrt());
    }
    Ok(RhoDefect {
        max_defect,
        tail_bound,
        ratio: max_defect / tail_bound.max(1e-300),
    })
}

/// Partial sum `Σ_{n≤N} A_{d,n} r^(n+(d-2)/2)` of the dilation trace.
pub fn dilation_trace_partial(d: usize, n_max: u32, r: f64) -> f64 {
    let p = (d as f64 - 2.0) / 2.0;
    (0..=n_max)
        .map(|n| dim_harm(d, n) as f64 * r.powf(n as f64 + p))
        .sum()
}

/// Closed form `r^((d-2)/2) (1+r) / (1-r)^(d-1)` of the full trace.
pub fn dilation_trace_closed(d: usize, r: f64) -> f64 {
    let p = (d as f64 - 2.0) / 2.0;
    r.powf(p) * (1.0 + r) / (1.0 - r).powi(d as i32 - 1)
}

/// Upper bound on the trace tail `Σ_{n>N} A_{d,n} r^(n+(d-2)/2)`, from
/// `A_{d,n} ≤ (n+d)^(d-1)/(d-1)!` and a geometric comparison.
pub fn dilation_trace_tail(d: usize, n_max: u32, r: f64) -> f64 {
    let p = (d as f64 - 2.0) / 2.0;
    let fac = ln_factorial(d as u32 - 1).exp();
    let term = |n: u32| (n as f64 + d as f64).powi(d as i32 - 1) / fac * r.powf(n as f64 + p);
    let n1 = n_max + 1;
    let ratio = ((n1 as f64 + 1.0 + d as f64) / (n1 as f64 + d as f64)).powi(d as i32 - 1) * r;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    term(n1) / (1.0 - ratio)
}

/// Exact value `n! ((d-2)/2)_n`: squared norm of the canonical complex
/// ladder vector, used as a cross-layer regression target.
pub fn ladder_norm_sq(n: u32, d: usize) -> f64 {
    (ln_factorial(n) + crate::num::ln_pochhammer((d as f64 - 2.0) / 2.0, n)).exp()
}

/// `C_N(1)` re-export for tail computations on the caller side.
pub fn degree_mass_at_one(n: u32, d: usize) -> f64 {
    gegenbauer_at_one(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::basis::build_basis;
    use crate::mobius::sampling::{random_in_g, random_rotation, word_in_s};
    use crate::mobius::{classify, Class};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trunc(d: usize, n: u32) -> Truncation {
        Truncation::new(Arc::new(build_basis(d, n).unwrap()))
    }

    #[test]
    fn kernel_basics() {
        let d = 3;
        let a = [0.3, 0.1, -0.2];
        let b = [0.0, 0.25, 0.1];
        assert_eq!(kernel(&[0.0; 3], &b, d).unwrap(), 1.0);
        assert!((kernel(&a, &b, d).unwrap() - kernel(&b, &a, d).unwrap()).abs() < 1e-15);
        let na: f64 = a.iter().map(|v| v * v).sum();
        let self_val = kernel(&a, &a, d).unwrap();
        assert!((self_val - (1.0 - na).powi(-(d as i32 - 2))).abs() < 1e-12);
        assert!(matches!(kernel(&[1.0, 0.0, 0.0], &b, d), Err(Error::OutsideDisk)));
    }

    #[test]
    fn evaluation_vector_at_origin() {
        let t = trunc(3, 4);
        let e0 = e_vector(&[0.0; 3], &t).unwrap();
        assert!((e0.coords[0] - 1.0).abs() < 1e-12);
        assert!(e0.coords.rows(1, t.dim() - 1).amax() < 1e-12);
    }

    #[test]
    fn evaluation_vectors_reproduce_kernel() {
        let d = 3;
        let t = trunc(d, 16);
        let a = [0.25, -0.1, 0.05];
        let b = [-0.1, 0.2, 0.15];
        let dot = e_vector(&a, &t).unwrap().dot(&e_vector(&b, &t).unwrap());
        let closed = kernel(&a, &b, d).unwrap();
        let tail = kernel_tail(&a, &b, t.n_max(), d);
        assert!(
            (dot - closed).abs() <= tail.max(1e-12),
            "dot {dot} closed {closed} tail {tail}"
        );
    }

    #[test]
    fn dilation_diagonal_and_consistency() {
        let d = 3;
        let t = trunc(d, 6);
        let r = 0.6;
        let op = op_dilation(r, &t).unwrap();
        let id = op_dilation(1.0, &t).unwrap();
        assert!((id.mat.clone() - DMatrix::identity(t.dim(), t.dim())).amax() < 1e-15);
        assert!((op.mat[(0, 0)] - r.powf((d as f64 - 2.0) / 2.0)).abs() < 1e-15);
        assert_eq!(op.mat, op.mat.transpose());
        // D(r) E_a = r^{(d-2)/2} E_{ra}
        let a = [0.2, 0.1, -0.3];
        let lhs = op.apply(&e_vector(&a, &t).unwrap());
        let ra: Vec<f64> = a.iter().map(|v| v * r).collect();
        let rhs = e_vector(&ra, &t).unwrap();
        let p = (d as f64 - 2.0) / 2.0;
        assert!((lhs.coords - rhs.coords * r.powf(p)).amax() < 1e-12);
    }

    #[test]
    fn strong_continuity_surrogate() {
        let t = trunc(3, 8);
        let v = e_vector(&[0.2, 0.0, 0.1], &t).unwrap();
        let mut last = f64::INFINITY;
        for r in [0.9, 0.99, 0.999] {
            let op = op_dilation(r, &t).unwrap();
            let dv = (op.apply(&v).coords - &v.coords).norm();
            assert!(dv < last);
            last = dv;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn trace_formula_partial_sums() {
        for d in [3, 4, 5] {
            for r in [0.3, 0.5] {
                let partial = dilation_trace_partial(d, 200, r);
                let closed = dilation_trace_closed(d, r);
                let tail = dilation_trace_tail(d, 200, r);
                // at these parameters the analytic tail is far below the f64
                // resolution of the two evaluations; allow summation noise
                assert!(
                    (partial - closed).abs() <= tail + 1e-12 * closed,
                    "d={d} r={r}: {partial} vs {closed} (tail {tail})"
                );
            }
        }
    }

    #[test]
    fn rotation_blocks_orthogonal() {
        let d = 3;
        let t = trunc(d, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_rotation(&mut rng, d);
        let op = op_rotation(&r, &t).unwrap();
        let id = op_rotation(&DMatrix::identity(d, d), &t).unwrap();
        assert!((id.mat - DMatrix::identity(t.dim(), t.dim())).amax() < 1e-12);
        let m = &op.mat;
        assert!((m.transpose() * m - DMatrix::identity(t.dim(), t.dim())).amax() < 1e-10);
        // matrix action matches symbolic substitution on a sample element
        let n = 3u32;
        let range = t.block(n);
        let y = &t.basis.blocks[n as usize].polys[1];
        let image = y.substitute_linear(&r.transpose());
        let x = [0.3, -0.2, 0.5];
        let direct = image.eval(&x);
        let mut via_matrix = 0.0;
        for (bj, j) in range.clone().enumerate() {
            via_matrix += m[(j, range.start + 1)] * t.basis.blocks[n as usize].polys[bj].eval(&x);
        }
        assert!((direct - via_matrix).abs() < 1e-10);
    }

    #[test]
    fn rho_reduces_to_dilation() {
        let d = 3;
        let t = trunc(d, 6);
        let g = MobiusMatrix::dilation(d, 0.55).unwrap();
        let op = op_rho(&g, &t).unwrap();
        let dil = op_dilation(0.55, &t).unwrap();
        assert!((op.mat - dil.mat).amax() < 1e-12);
    }

    #[test]
    fn rho_validates_against_kernel_action() {
        let d = 3;
        let t = trunc(d, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let xs: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                use rand::Rng;
                (0..d).map(|_| rng.gen_range(-0.17..0.17)).collect()
            })
            .collect();
        let ident = MobiusMatrix::identity(d);
        assert!(validate_rho(&ident, &t, &xs).unwrap().max_defect < 1e-11);
        for _ in 0..5 {
            let g = word_in_s(&mut rng, d, 5);
            let defect = validate_rho(&g, &t, &xs).unwrap();
            assert!(
                defect.ratio <= 1.5 || defect.max_defect < 1e-12,
                "tail ratio {} (defect {})",
                defect.ratio,
                defect.max_defect
            );
        }
    }

    #[test]
    fn rho_is_contraction_on_truncation() {
        let d = 3;
        let t = trunc(d, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let g = crate::mobius::sampling::random_interior(&mut rng, d, 0.05);
            let op = op_rho(&g, &t).unwrap();
            assert!(op.operator_norm() <= 1.0 + 1e-7);
        }
    }

    #[test]
    fn rho_unitary_on_automorphism_low_blocks() {
        let d = 3;
        let t = trunc(d, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = random_in_g(&mut rng, d, 3);
        assert_eq!(classify(&g), Class::InG);
        let op = op_rho(&g, &t).unwrap();
        let m = op.mat.transpose() * &op.mat;
        let low = t.block(0).start..t.block(3).end;
        let mut worst = 0.0f64;
        for i in low.clone() {
            for j in low.clone() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - target).abs());
            }
        }
        assert!(worst < 1e-6, "low-degree unitarity defect {worst}");
    }

    #[test]
    fn monoid_law_on_degree_preserving_pairs() {
        let d = 3;
        let t = trunc(d, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let r1 = random_rotation(&mut rng, d);
        let g1 = crate::mobius::make_generator(crate::mobius::Generator::Rotation(r1), d).unwrap();
        let g2 = MobiusMatrix::dilation(d, 0.7).unwrap();
        let lhs = op_rho(&g1.compose(&g2).unwrap(), &t).unwrap();
        let rhs = op_rho(&g1, &t).unwrap().mat * op_rho(&g2, &t).unwrap().mat;
        assert!((lhs.mat - rhs).amax() < 1e-10);
    }

    #[test]
    fn ladder_exactness_across_truncations() {
        // entries between surviving degrees are identical when the cutoff grows
        let d = 3;
        let small = trunc(d, 6);
        let big = trunc(d, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = word_in_s(&mut rng, d, 4);
        let op_s = op_rho(&g, &small).unwrap();
        let op_b = op_rho(&g, &big).unwrap();
        let n = small.dim();
        let shared = op_b.mat.view((0, 0), (n, n)) - op_s.mat.view((0, 0), (n, n));
        assert!(shared.amax() < 1e-11, "shared block drift {}", shared.amax());
    }

    #[test]
    fn operator_export_roundtrip() {
        let t = trunc(3, 3);
        let op = op_dilation(0.5, &t).unwrap();
        let s = serde_json::to_string(&op.export()).unwrap();
        let back: HOperatorData = serde_json::from_str(&s).unwrap();
        let op2 = back.into_operator().unwrap();
        assert_eq!(op.mat, op2.mat);
    }

    #[test]
    fn ladder_norm_matches_closed_form() {
        assert!((ladder_norm_sq(3, 3) - 6.0 * (0.5 * 1.5 * 2.5)).abs() < 1e-9);
        assert!((ladder_norm_sq(2, 4) - 2.0 * (1.0 * 2.0)).abs() < 1e-9);
    }
}
