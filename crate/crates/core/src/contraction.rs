//! Two-point contraction bilinear forms on the harmonic Hilbert space.
//!
//! For a separated pair of balls `B_r(a)`, `B_s(b)` inside the unit ball the
//! form pairs two harmonics against derivatives of the Green kernel
//! `‖x-y‖^(2-d)`. Two independent computation routes are kept side by side:
//!
//! * the ladder route: reduce to separation ratios and evaluate the raised
//!   product polynomial at the unit separation direction;
//! * the Green route: differentiate the kernel symbolically and evaluate at
//!   the separation vector.
//!
//! Both assemble matrix elements over the orthonormal basis; their agreement
//! is a standing cross-check. Entrywise bounds, the Hilbert-Schmidt norm, a
//! closed-form lower-bound family and the divergence probe at tangent
//! geometry live here as well.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::harmonic::green::GreenTable;
use crate::harmonic::multi_index::MultiIndex;
use crate::harmonic::ops::raising_table_f64;
use crate::harmonic::poly_f64::PolyF64;
use crate::mobius::{decompose_s, is_ce_config, MobiusMatrix};
use crate::num::{ln_binomial, ln_factorial, ln_pochhammer};
use crate::rkhs::{h_scale, op_rho, HOperator, HVector, Truncation};
use crate::{Error, Result};

/// Matrix of a contraction form over a truncation, with the geometry that
/// produced it.
#[derive(Debug, Clone)]
pub struct ContractionMatrix {
    pub d: usize,
    pub n_max: u32,
    pub mat: DMatrix<f64>,
    /// Separation ratios of the generating translated-dilation pair.
    pub sigma1: f64,
    pub sigma2: f64,
    /// Human-readable provenance of the generating pair.
    pub provenance: String,
}

impl ContractionMatrix {
    /// Frobenius norm of the truncated matrix (a lower bound on the full
    /// Hilbert-Schmidt norm).
    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest singular value of the truncated matrix.
    pub fn operator_norm(&self) -> f64 {
        HOperator { d: self.d, n_max: self.n_max, mat: self.mat.clone() }.operator_norm()
    }

    /// Pair two coordinate vectors through the form.
    pub fn pair(&self, u: &HVector, v: &HVector) -> f64 {
        (u.coords.transpose() * &self.mat * &v.coords)[(0, 0)]
    }
}

/// Geometry of a separated translated-dilation pair.
#[derive(Debug, Clone, Copy)]
pub struct PairGeometry {
    pub sigma1: f64,
    pub sigma2: f64,
    pub separation: f64,
}

fn pair_geometry(a: &[f64], r: f64, b: &[f64], s: f64) -> Result<PairGeometry> {
    let sep: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let sigma1 = r / sep;
    let sigma2 = s / sep;
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(r > 0.0 && s > 0.0) || na + r > 1.0 || nb + s > 1.0 {
        return Err(Error::GeometricOverlap(sigma1 + sigma2));
    }
    if sigma1 + sigma2 >= 1.0 {
        return Err(Error::GeometricOverlap(sigma1 + sigma2));
    }
    Ok(PairGeometry { sigma1, sigma2, separation: sep })
}

/// Dense lookup of a value table keyed by exponent vectors.
struct ValueTable {
    stride: usize,
    d: usize,
    data: Vec<f64>,
}

impl ValueTable {
    fn new(d: usize, max_degree: u32, entries: impl Iterator<Item = (MultiIndex, f64)>) -> Self {
        let stride = max_degree as usize + 1;
        let mut data = vec![f64::NAN; stride.pow(d as u32)];
        for (idx, v) in entries {
            // shared caches may carry higher degrees than requested
            if idx.degree() <= max_degree {
                data[Self::key(&idx, stride)] = v;
            }
        }
        ValueTable { stride, d, data }
    }

    #[inline]
    fn key(idx: &MultiIndex, stride: usize) -> usize {
        let mut k = 0usize;
        for &e in &idx.0 {
            k = k * stride + e as usize;
        }
        k
    }

    /// Value at the sum of two exponent vectors.
    #[inline]
    fn at_sum(&self, a: &MultiIndex, b: &MultiIndex) -> f64 {
        let mut k = 0usize;
        for i in 0..self.d {
            k = k * self.stride + (a.0[i] + b.0[i]) as usize;
        }
        self.data[k]
    }
}

/// `Σ_{α,β} f_α g_β V[α+β]` for float polynomials against a value table.
fn pair_dot(f: &PolyF64, g: &PolyF64, v: &ValueTable) -> f64 {
    let mut acc = 0.0;
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            acc += ca * cb * v.at_sum(a, b);
        }
    }
    acc
}

fn assemble(
    t: &Truncation,
    values: &ValueTable,
    scale: impl Fn(u32, u32) -> f64 + Sync,
) -> DMatrix<f64> {
    let dim = t.dim();
    let rows: Vec<(usize, Vec<f64>)> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let n = t.degree_of(i);
            let yi = &t.basis.blocks[n as usize].polys[i - t.block(n).start];
            let mut row = vec![0.0; dim];
            for (j, slot) in row.iter_mut().enumerate() {
                let m = t.degree_of(j);
                let yj = &t.basis.blocks[m as usize].polys[j - t.block(m).start];
                *slot = scale(n, m) * pair_dot(yi, yj, values);
            }
            (i, row)
        })
        .collect();
    let mut mat = DMatrix::zeros(dim, dim);
    for (i, row) in rows {
        for (j, v) in row.into_iter().enumerate() {
            mat[(i, j)] = v;
        }
    }
    mat
}

/// Contraction matrix of the pair `(T_a D(r), T_b D(s))` over a truncation,
/// by the ladder route.
pub fn contraction_core(
    a: &[f64],
    r: f64,
    b: &[f64],
    s: f64,
    t: &Truncation,
) -> Result<ContractionMatrix> {
    let d = t.d();
    let geo = pair_geometry(a, r, b, s)?;
    let u: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) / geo.separation)
        .collect();
    let table = raising_table_f64(d, 2 * t.n_max());
    let values = ValueTable::new(
        d,
        2 * t.n_max(),
        table.iter().map(|(k, p)| (k.clone(), p.eval(&u))),
    );
    let p = (d as f64 - 2.0) / 2.0;
    let (s1, s2) = (geo.sigma1, geo.sigma2);
    let scale = |n: u32, m: u32| -> f64 {
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        sign * s1.powf(n as f64 + p) * s2.powf(m as f64 + p)
            / (h_scale(d, n) * h_scale(d, m))
    };
    let mat = assemble(t, &values, scale);
    Ok(ContractionMatrix {
        d,
        n_max: t.n_max(),
        mat,
        sigma1: s1,
        sigma2: s2,
        provenance: format!("core a={a:?} r={r} b={b:?} s={s}"),
    })
}

/// Single matrix element of the Green route: the `(β, γ)` derivative of the
/// kernel at the separation vector, with the dilation weights attached.
pub fn contraction_green(
    a: &[f64],
    r: f64,
    b: &[f64],
    s: f64,
    beta: &MultiIndex,
    gamma: &MultiIndex,
) -> Result<f64> {
    let d = a.len();
    let geo = pair_geometry(a, r, b, s)?;
    let _ = geo;
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let order = beta.degree() + gamma.degree();
    let table = GreenTable::build(d, order);
    let p = (d as f64 - 2.0) / 2.0;
    let sign = if gamma.degree() % 2 == 1 { -1.0 } else { 1.0 };
    let value = table.eval(&beta.plus(gamma), &diff);
    Ok(sign * r.powf(beta.degree() as f64 + p) * s.powf(gamma.degree() as f64 + p) * value)
}

/// Full matrix over the truncation by the Green route — the independent
/// oracle for `contraction_core`.
pub fn contraction_green_matrix(
    a: &[f64],
    r: f64,
    b: &[f64],
    s: f64,
    t: &Truncation,
) -> Result<ContractionMatrix> {
    let d = t.d();
    let geo = pair_geometry(a, r, b, s)?;
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let table = GreenTable::build(d, 2 * t.n_max());
    let values = ValueTable::new(
        d,
        2 * t.n_max(),
        table.values_at(&diff).into_iter(),
    );
    let p = (d as f64 - 2.0) / 2.0;
    let scale = |n: u32, m: u32| -> f64 {
        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
        sign * r.powf(n as f64 + p) * s.powf(m as f64 + p) / (h_scale(d, n) * h_scale(d, m))
    };
    let mat = assemble(t, &values, scale);
    Ok(ContractionMatrix {
        d,
        n_max: t.n_max(),
        mat,
        sigma1: geo.sigma1,
        sigma2: geo.sigma2,
        provenance: format!("green a={a:?} r={r} b={b:?} s={s}"),
    })
}

/// Contraction matrix of a general separated pair of ball contractions:
/// factor each element through its image ball and sandwich the core matrix
/// with the monoid action of the stabilizer factors.
pub fn contraction_general(
    g1: &MobiusMatrix,
    g2: &MobiusMatrix,
    t: &Truncation,
) -> Result<ContractionMatrix> {
    let cfg = is_ce_config(&[g1.clone(), g2.clone()])?;
    if !cfg.strict {
        return Err(Error::NonStrictConfig);
    }
    let f1 = decompose_s(g1)?;
    let f2 = decompose_s(g2)?;
    let core = contraction_core(&f1.center, f1.radius, &f2.center, f2.radius, t)?;
    let rho1 = op_rho(&f1.h, t)?;
    let rho2 = op_rho(&f2.h, t)?;
    let mat = rho1.mat.transpose() * core.mat * rho2.mat;
    Ok(ContractionMatrix {
        d: core.d,
        n_max: core.n_max,
        mat,
        sigma1: core.sigma1,
        sigma2: core.sigma2,
        provenance: "general pair via image-ball factorization".into(),
    })
}

/// Entrywise bound for unit basis vectors at degrees `(n, m)`:
/// `sqrt((d-2) A_{d,n+m} / (2n+2m+d-2)) ·
///  sqrt(((d-2)/2)_{n+m} / (((d-2)/2)_n ((d-2)/2)_m) · C(n+m,n)) · σ₁^n σ₂^m`.
pub fn entry_bound(n: u32, m: u32, sigma1: f64, sigma2: f64, d: usize) -> f64 {
    let lam = (d as f64 - 2.0) / 2.0;
    let nm = n + m;
    let a_dim = crate::harmonic::ops::dim_harm(d, nm) as f64;
    let first = ((d as f64 - 2.0) * a_dim / (2.0 * nm as f64 + d as f64 - 2.0)).sqrt();
    let ln_ratio = ln_pochhammer(lam, nm) - ln_pochhammer(lam, n) - ln_pochhammer(lam, m)
        + ln_binomial(nm, n);
    first
        * (0.5 * ln_ratio).exp()
        * sigma1.powi(n as i32)
        * sigma2.powi(m as i32)
}

/// Largest ratio of a matrix entry to its bound.
pub fn max_entry_ratio(c: &ContractionMatrix, t: &Truncation) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..=t.n_max() {
        for m in 0..=t.n_max() {
            let bound = entry_bound(n, m, c.sigma1, c.sigma2, c.d);
            for i in t.block(n) {
                for j in t.block(m) {
                    worst = worst.max(c.mat[(i, j)].abs() / bound);
                }
            }
        }
    }
    worst
}

/// Tail bound for the evaluation-vector sandwich: mass of the entries beyond
/// the truncation against the evaluation coordinates at radii `‖p‖`, `‖q‖`.
pub fn sandwich_tail(
    sigma1: f64,
    sigma2: f64,
    rho_p: f64,
    rho_q: f64,
    n_max: u32,
    d: usize,
) -> f64 {
    let mass = |n: u32, rho: f64| -> f64 {
        (crate::harmonic::gegenbauer::gegenbauer_at_one(n, d)).sqrt() * rho.powi(n as i32)
    };
    let mut total = 0.0;
    let horizon = 4 * n_max + 200;
    for n in 0..=horizon {
        for m in 0..=horizon {
            if n <= n_max && m <= n_max {
                continue;
            }
            let term = entry_bound(n, m, sigma1, sigma2, d) * mass(n, rho_p) * mass(m, rho_q);
            total += term;
        }
    }
    // geometric envelope for everything beyond the horizon
    total * (1.0 + 1e-6) + 1e-280
}

/// Hilbert-Schmidt mass of the matrix blocks beyond the truncation: an upper
/// bound on what a sandwich with contraction factors can pick up from the
/// discarded degrees.
pub fn hs_block_tail(sigma1: f64, sigma2: f64, n_max: u32, d: usize) -> f64 {
    let mut total = 0.0;
    let horizon = 4 * n_max + 200;
    for n in 0..=horizon {
        for m in 0..=horizon {
            if n <= n_max && m <= n_max {
                continue;
            }
            let b = entry_bound(n, m, sigma1, sigma2, d);
            let mass = (crate::harmonic::ops::dim_harm(d, n)
                * crate::harmonic::ops::dim_harm(d, m)) as f64;
            total += mass * b * b;
        }
    }
    total.sqrt() * (1.0 + 1e-6)
}

/// Closed-form family element of the divergence probe:
/// `A_{n,m} = (-1)^n (σ₁σ₂)^{(d-2)/2} (λ)_{n+m} / sqrt(n! m! (λ)_n (λ)_m) σ₁^n σ₂^m`.
pub fn probe_family_entry(n: u32, m: u32, sigma1: f64, sigma2: f64, d: usize) -> f64 {
    let lam = (d as f64 - 2.0) / 2.0;
    let ln_mag = ln_pochhammer(lam, n + m)
        - 0.5 * (ln_factorial(n) + ln_factorial(m) + ln_pochhammer(lam, n) + ln_pochhammer(lam, m))
        + n as f64 * sigma1.ln()
        + m as f64 * sigma2.ln()
        + lam * (sigma1 * sigma2).ln();
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_mag.exp()
}

/// Lower-bound data of the divergence probe at total ratio `σ` (split evenly)
/// and family cutoff `N`.
#[derive(Debug, Clone, Copy)]
pub struct LowerBoundProfile {
    /// Partial sum `(Σ_{N'≤N} σ^{2N'} / (N'+1))^{1/2}` for `d ≥ 4`, or the
    /// halved odd-denominator variant at `d = 3` — the literal bound shape.
    pub analytic: f64,
    /// The provable truncated bound: `analytic` scaled by `(σ₁σ₂)^{(d-2)/2}`.
    pub analytic_prefactored: f64,
    /// Frobenius norm of the closed-form family matrix on `[0,N]²`.
    pub family_norm: f64,
}

/// Evaluate the lower-bound family at even split `σ₁ = σ₂ = σ/2`.
pub fn lower_bound_profile(sigma: f64, n: u32, d: usize) -> LowerBoundProfile {
    let (s1, s2) = (sigma / 2.0, sigma / 2.0);
    let analytic = analytic_partial_bound(sigma, n, d);
    let lam = (d as f64 - 2.0) / 2.0;
    let prefactor = (s1 * s2).powf(lam);
    let mut frob_sq = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let a = probe_family_entry(i, j, s1, s2, d);
            frob_sq += a * a;
        }
    }
    LowerBoundProfile {
        analytic,
        analytic_prefactored: prefactor * analytic,
        family_norm: frob_sq.sqrt(),
    }
}

/// The literal partial-sum bound shape.
pub fn analytic_partial_bound(sigma: f64, n: u32, d: usize) -> f64 {
    let sum: f64 = if d == 3 {
        (0..=n)
            .map(|k| sigma.powi(2 * k as i32) / (2.0 * k as f64 + 1.0))
            .sum::<f64>()
            * 0.5
    } else {
        (0..=n)
            .map(|k| sigma.powi(2 * k as i32) / (k as f64 + 1.0))
            .sum()
    };
    sum.sqrt()
}

/// One row of the boundedness sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub sigma: f64,
    pub n: u32,
    /// Frobenius norm of the closed-form probe family on `[0,N]²`.
    pub hs_norm: f64,
    /// Provable truncated lower bound (prefactored).
    pub lower_bound: f64,
    /// Literal partial-sum bound shape, for reference.
    pub lower_bound_literal: f64,
    /// Largest `|A_{n,m}|` divided by its entrywise bound.
    pub max_entry_ratio: f64,
}

/// Produce sweep rows over a grid, sorted by `(σ, N)`.
///
/// Tangent geometry `σ = 1` is admitted here (and only here): the family norm
/// then grows without saturation, which is the finite-truncation signature of
/// the unbounded regime.
pub fn boundedness_sweep(sigmas: &[f64], ns: &[u32], d: usize) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = sigmas
        .par_iter()
        .flat_map(|&sigma| {
            ns.par_iter().map(move |&n| {
                let profile = lower_bound_profile(sigma, n, d);
                let (s1, s2) = (sigma / 2.0, sigma / 2.0);
                let mut worst = 0.0f64;
                for i in 0..=n {
                    for j in 0..=n {
                        let a = probe_family_entry(i, j, s1, s2, d).abs();
                        let b = entry_bound(i, j, s1, s2, d);
                        worst = worst.max(a / b);
                    }
                }
                SweepRow {
                    d,
                    sigma,
                    n,
                    hs_norm: profile.family_norm,
                    lower_bound: profile.analytic_prefactored,
                    lower_bound_literal: profile.analytic,
                    max_entry_ratio: worst,
                }
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.sigma, a.n)
            .partial_cmp(&(b.sigma, b.n))
            .expect("finite keys")
    });
    rows
}
