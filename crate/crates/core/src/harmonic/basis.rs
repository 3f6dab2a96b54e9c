//! Orthonormal graded bases of harmonic polynomials.
//!
//! Per degree `n` the spanning set is `{P^α.1 : |α| = n, α_d ≤ 1}` in
//! lexicographic order — exactly `A_{d,n}` elements, each harmonic by
//! construction with exact rational coefficients. The change of basis to an
//! orthonormal family is computed in floats from the exact Gram matrix by
//! Cholesky, then refined until `‖B G Bᵀ - I‖ ≤ τ_basis`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::multi_index::{indices_of_degree, MultiIndex};
use super::ops::{dim_harm, fisher_inner, raising_table};
use super::poly::Poly;
use super::poly_f64::PolyF64;
use crate::num::{half_weight, pochhammer, rat_to_f64, Rat};
use crate::{Error, Result, TOL_BASIS};

/// Cache format tag; bump when the layout or conventions change.
pub const BASIS_FORMAT_VERSION: u32 = 1;

/// Environment variable naming the directory for cached basis files.
pub const CACHE_DIR_ENV: &str = "CONFDISK_CACHE_DIR";

/// One degree slice of the basis.
pub struct DegreeBlock {
    /// Degree of this block.
    pub degree: u32,
    /// Exact harmonic spanning polynomials (lex order of their indices).
    pub generators: Vec<Poly>,
    /// Orthonormalizing change of basis: row `i` gives the coefficients of
    /// the `i`-th orthonormal element over `generators`.
    pub coeff: DMatrix<f64>,
    /// Materialized float polynomials of the orthonormal elements.
    pub polys: Vec<PolyF64>,
}

impl DegreeBlock {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }
}

/// Orthonormal basis of all harmonics of degree at most `n_max`.
pub struct GradedHarmonicBasis {
    pub d: usize,
    pub n_max: u32,
    pub blocks: Vec<DegreeBlock>,
}

impl GradedHarmonicBasis {
    /// Total dimension `Σ_{n ≤ n_max} A_{d,n}`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Offset of the degree-`n` block in the flat index.
    pub fn block_offset(&self, n: u32) -> usize {
        self.blocks[..n as usize].iter().map(|b| b.len()).sum()
    }

    /// Evaluate every basis element at a point, flat order.
    pub fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            for p in &b.polys {
                out.push(p.eval(x));
            }
        }
        out
    }

    /// Residual `max |B G Bᵀ - I|` over all degrees, from the exact Gram.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let g = exact_gram_f64(self.d, &b.generators, b.degree);
            let m = &b.coeff * &g * b.coeff.transpose();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((m[(i, j)] - target).abs());
                }
            }
        }
        worst
    }
}

/// Spanning multi-indices for degree `n`: `|α| = n`, last exponent ≤ 1.
pub fn spanning_indices(d: usize, n: u32) -> Vec<MultiIndex> {
    indices_of_degree(d, n)
        .into_iter()
        .filter(|a| a.0[d - 1] <= 1)
        .collect()
}

/// Exact Gram matrix of the generators in the representation inner product,
/// scaled to f64 after an exact power-of-two balancing.
fn exact_gram_f64(d: usize, gens: &[Poly], degree: u32) -> DMatrix<f64> {
    let lam = half_weight(d);
    let mut scale = pochhammer(&lam, degree);
    for _ in 0..degree {
        scale *= Rat::from_integer(2.into());
    }
    let a = gens.len();
    let mut g = DMatrix::zeros(a, a);
    for i in 0..a {
        for j in i..a {
            let fish = fisher_inner(&gens[i], &gens[j]).expect("same dimension");
            let v = rat_to_f64(&(fish / scale.clone()));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Build the orthonormal basis for dimension `d` up to degree `n_max`.
pub fn build_basis(d: usize, n_max: u32) -> Result<GradedHarmonicBasis> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let table = raising_table(d, n_max);
    let mut blocks = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let alphas = spanning_indices(d, n);
        let expect = dim_harm(d, n) as usize;
        if alphas.len() != expect {
            return Err(Error::RankDeficiency(n as usize));
        }
        let generators: Vec<Poly> = alphas.iter().map(|a| table.poly(a).clone()).collect();
        // Balance magnitudes exactly by powers of two before going to floats.
        let balanced: Vec<Poly> = generators
            .iter()
            .map(|p| {
                let mag = rat_to_f64(&p.max_abs_coeff()).max(1.0);
                let e = mag.log2().round() as i64;
                let two = Rat::from_integer(2.into());
                let mut s = Rat::from_integer(1.into());
                for _ in 0..e.unsigned_abs() {
                    if e > 0 {
                        s /= &two;
                    } else {
                        s *= &two;
                    }
                }
                p.scale(&s)
            })
            .collect();
        let g = exact_gram_f64(d, &balanced, n);
        let mut coeff = match nalgebra::Cholesky::new(g.clone()) {
            Some(ch) => ch
                .l()
                .solve_lower_triangular(&DMatrix::identity(g.nrows(), g.ncols()))
                .ok_or(Error::RankDeficiency(n as usize))?,
            None => return Err(Error::RankDeficiency(n as usize)),
        };
        // refinement passes against the exact Gram
        for _ in 0..3 {
            let m = &coeff * &g * coeff.transpose();
            let resid = (0..m.nrows())
                .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| (m[(i, j)] - ind(i == j)).abs())
                .fold(0.0f64, f64::max);
            if resid <= TOL_BASIS {
                break;
            }
            let ch = nalgebra::Cholesky::new(m).ok_or(Error::RankDeficiency(n as usize))?;
            let corr = ch
                .l()
                .solve_lower_triangular(&DMatrix::identity(coeff.nrows(), coeff.nrows()))
                .ok_or(Error::RankDeficiency(n as usize))?;
            coeff = corr * coeff;
        }
        let gen_f64: Vec<PolyF64> = balanced.iter().map(PolyF64::from_exact).collect();
        let polys: Vec<PolyF64> = (0..coeff.nrows())
            .map(|i| {
                let mut acc = PolyF64::zero(d);
                for (k, gp) in gen_f64.iter().enumerate() {
                    let c = coeff[(i, k)];
                    if c != 0.0 {
                        acc = acc.axpy(c, gp);
                    }
                }
                acc
            })
            .collect();
        blocks.push(DegreeBlock { degree: n, generators: balanced, coeff, polys });
    }
    Ok(GradedHarmonicBasis { d, n_max, blocks })
}

fn ind(cond: bool) -> f64 {
    if cond {
        1.0
    } else {
        0.0
    }
}

/// Serialized basis: float coefficients of the orthonormal polynomials.
#[derive(Serialize, Deserialize)]
struct BasisFile {
    version: u32,
    d: usize,
    n_max: u32,
    blocks: Vec<Vec<Vec<(Vec<u8>, f64)>>>,
}

/// Cache path for `(d, n_max)` under `dir`.
pub fn cache_path(dir: &Path, d: usize, n_max: u32) -> PathBuf {
    dir.join(format!("basis_d{}_n{}_v{}.json", d, n_max, BASIS_FORMAT_VERSION))
}

/// Build the basis, consulting/populating the cache directory named by
/// `CONFDISK_CACHE_DIR` (or an explicit override).
///
/// Cached files carry only what the float paths need; exact generators are
/// rebuilt when an exact consumer asks for them.
pub fn load_or_build(d: usize, n_max: u32, dir: Option<&Path>) -> Result<GradedHarmonicBasis> {
    let env_dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
    let dir = dir.map(Path::to_path_buf).or(env_dir);
    if let Some(dir) = &dir {
        let path = cache_path(dir, d, n_max);
        if let Ok(bytes) = std::fs::read(&path) {
            if let Ok(file) = serde_json::from_slice::<BasisFile>(&bytes) {
                if file.version == BASIS_FORMAT_VERSION && file.d == d && file.n_max == n_max {
                    return from_file(file);
                }
            }
        }
    }
    let basis = build_basis(d, n_max)?;
    if let Some(dir) = &dir {
        let _ = std::fs::create_dir_all(dir);
        let file = to_file(&basis);
        if let Ok(bytes) = serde_json::to_vec(&file) {
            let _ = std::fs::write(cache_path(dir, d, n_max), bytes);
        }
    }
    Ok(basis)
}

fn to_file(b: &GradedHarmonicBasis) -> BasisFile {
    BasisFile {
        version: BASIS_FORMAT_VERSION,
        d: b.d,
        n_max: b.n_max,
        blocks: b
            .blocks
            .iter()
            .map(|blk| {
                blk.polys
                    .iter()
                    .map(|p| {
                        p.terms()
                            .iter()
                            .map(|(k, v)| (k.0.clone(), *v))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

fn from_file(f: BasisFile) -> Result<GradedHarmonicBasis> {
    let table = raising_table(f.d, f.n_max);
    let mut blocks = Vec::new();
    for (n, blk) in f.blocks.iter().enumerate() {
        let n = n as u32;
        let polys: Vec<PolyF64> = blk
            .iter()
            .map(|terms| {
                let map: BTreeMap<MultiIndex, f64> = terms
                    .iter()
                    .map(|(k, v)| (MultiIndex(k.clone()), *v))
                    .collect();
                PolyF64::from_map(f.d, map, 0.0)
            })
            .collect();
        // Loaded bases keep generator metadata minimal: exact consumers
        // rebuild via `build_basis`. Coefficients over the generators are
        // reconstructed lazily only in that path.
        let alphas = spanning_indices(f.d, n);
        let generators: Vec<Poly> = alphas.iter().map(|a| table.poly(a).clone()).collect();
        let a = polys.len();
        blocks.push(DegreeBlock {
            degree: n,
            generators,
            coeff: DMatrix::zeros(a, a),
            polys,
        });
    }
    Ok(GradedHarmonicBasis { d: f.d, n_max: f.n_max, blocks })
}

/// Exact rational Gram-Schmidt (orthogonal, not normalized) — the oracle path
/// for small products of `d` and `n_max`.
pub fn exact_orthogonal_basis(d: usize, n: u32) -> Result<Vec<Poly>> {
    let table = raising_table(d, n);
    let lam = half_weight(d);
    let mut scale = pochhammer(&lam, n);
    for _ in 0..n {
        scale *= Rat::from_integer(2.into());
    }
    let alphas = spanning_indices(d, n);
    let mut ortho: Vec<(Poly, Rat)> = Vec::new(); // (vector, its squared norm)
    for a in &alphas {
        let mut v = table.poly(a).clone();
        for (u, unorm) in &ortho {
            let proj = fisher_inner(&v, u)? / scale.clone() / unorm.clone();
            v = v.sub(&u.scale(&proj));
        }
        let vnorm = fisher_inner(&v, &v)? / scale.clone();
        if num_traits::Zero::is_zero(&vnorm) {
            return Err(Error::RankDeficiency(n as usize));
        }
        ortho.push((v, vnorm));
    }
    Ok(ortho.into_iter().map(|(v, _)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::ops::h_inner;

    #[test]
    fn degree_zero_is_vacuum() {
        let b = build_basis(3, 0).unwrap();
        assert_eq!(b.dim(), 1);
        let p = &b.blocks[0].polys[0];
        assert!((p.eval(&[0.3, 0.1, -0.2]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degree_one_count() {
        let b = build_basis(3, 1).unwrap();
        assert_eq!(b.blocks[1].len(), 3);
    }

    #[test]
    fn counts_match_dimension_formula() {
        for d in [3, 4, 5] {
            let b = build_basis(d, 4).unwrap();
            for n in 0..=4u32 {
                assert_eq!(b.blocks[n as usize].len() as u64, dim_harm(d, n));
            }
        }
    }

    #[test]
    fn orthonormal_within_tolerance() {
        for d in [3, 4] {
            let b = build_basis(d, 8).unwrap();
            assert!(b.orthonormality_residual() <= TOL_BASIS, "d = {d}");
        }
    }

    #[test]
    fn generators_are_exactly_harmonic() {
        let b = build_basis(4, 5).unwrap();
        for blk in &b.blocks {
            for g in &blk.generators {
                assert!(g.is_harmonic());
            }
        }
    }

    #[test]
    fn exact_oracle_agrees_on_small_blocks() {
        // d * n ≤ 8: exact orthogonalization must have full rank and its span
        // reproduces the same projector as the float basis.
        for (d, n) in [(3, 2), (4, 2), (3, 1)] {
            let exact = exact_orthogonal_basis(d, n).unwrap();
            assert_eq!(exact.len() as u64, dim_harm(d, n as u32));
            for (i, u) in exact.iter().enumerate() {
                for v in exact.iter().skip(i + 1) {
                    assert_eq!(h_inner(u, v).unwrap(), crate::num::Rat::from_integer(0.into()));
                }
            }
        }
    }

    #[test]
    fn cache_roundtrip(){
        let dir = std::env::temp_dir().join("confdisk-basis-test");
        let _ = std::fs::remove_dir_all(&dir);
        let built = load_or_build(3, 3, Some(&dir)).unwrap();
        assert!(cache_path(&dir, 3, 3).exists());
        let loaded = load_or_build(3, 3, Some(&dir)).unwrap();
        assert_eq!(built.dim(), loaded.dim());
        let x = [0.2, -0.1, 0.4];
        for (a, b) in built.eval_all(&x).iter().zip(loaded.eval_all(&x)) {
            assert!((a - b).abs() < 1e-15);
        }
        let _ = std::fs::remove_dir_all(&dir);
    }
}
