//! Batch verification suites with machine-readable reports.
//!
//! Each suite runs a list of named checks; a record stores the measured
//! quantity, the bound it must respect and the verdict. Sampling is fully
//! seeded, so reports are reproducible byte for byte.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{
    analytic_partial_bound, contraction_core, contraction_general, contraction_green_matrix,
    hs_block_tail, lower_bound_profile, max_entry_ratio, sandwich_tail,
};
use crate::fock::{
    npoint_wick_oracle, product_rho, radical_probe_2pt, sphere_state, vacuum_expectation,
    FockTruncation, FockVector, SphereStateOptions,
};
use crate::harmonic::basis::build_basis;
use crate::harmonic::ops::{
    act_twisted, dim_harm, fisher_inner, h_inner, kelvin_dual, project_harmonic,
    raise_polynomial, SoGenerator,
};
use crate::harmonic::poly::Poly;
use crate::mobius::sampling::{random_conformal, random_in_g, random_interior, word_in_s};
use crate::mobius::{
    classify, decompose_interior, decompose_s, gauss_decompose, hyperbolic_invariant, image_ball,
    BallRegion, Class, InvariantDomain, MobiusMatrix, SpherePoint,
};
use crate::num::Rat;
use crate::rkhs::{
    dilation_trace_closed, dilation_trace_partial, dilation_trace_tail, e_vector, kernel,
    kernel_partial_sum, kernel_tail, op_dilation, op_rho, validate_rho, Truncation,
};
use crate::Result;

/// Verification parameters; every randomized check derives from the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub d: usize,
    pub n_max: u32,
    pub p_max: usize,
    pub deg_max: u32,
    pub seed: u64,
    /// Number of random cases per sampled check.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { d: 3, n_max: 10, p_max: 4, deg_max: 10, seed: 1, samples: 200 }
    }
}

/// One check: the measured quantity must stay within the bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable identifier of the law being exercised.
    pub check: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(name: &str, check: &str, measured: f64, bound: f64) -> Self {
        CheckRecord {
            name: name.into(),
            check: check.into(),
            measured,
            bound,
            pass: measured.is_finite() && measured <= bound,
        }
    }
}

/// Result of one suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, records: Vec<CheckRecord>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        SuiteReport { suite: suite.into(), records, pass }
    }
}

/// Aggregated report over all suites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: VerifyConfig,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

fn sample_points<R: Rng>(rng: &mut R, d: usize, n: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| loop {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-radius..radius)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() < radius * radius {
                break x;
            }
        })
        .collect()
}

/// Group-law suite: cocycle, two-point identities, Jacobian conformality,
/// fixed sets and factorizations.
pub fn group_suite(cfg: &VerifyConfig) -> SuiteReport {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x67726f75);
    let mut records = Vec::new();

    // cocycle law over random words and points
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let g = random_conformal(&mut rng, d, 4);
        let h = random_conformal(&mut rng, d, 4);
        let x = sample_points(&mut rng, d, 1, 0.4).pop().unwrap();
        let gh = g.compose(&h).unwrap();
        let (hx, jh) = h.act(&SpherePoint::Finite(x.clone()));
        if let SpherePoint::Finite(_) = hx {
            let (_, jg) = g.act(&hx);
            let (_, jgh) = gh.act(&SpherePoint::Finite(x));
            if jg != 0.0 && jgh != 0.0 {
                worst = worst.max((jg * jh - jgh).abs() / jgh.abs().max(1e-12));
            }
        }
    }
    records.push(CheckRecord::new("cocycle law", "cocycle", worst, 1e-8));

    // distance identity on the monoid
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let g = word_in_s(&mut rng, d, 5);
        let pts = sample_points(&mut rng, d, 2, 0.6);
        let (x, y) = (&pts[0], &pts[1]);
        let gx = g.act_finite(x).unwrap();
        let gy = g.act_finite(y).unwrap();
        let om_x = g.conformal_factor(x).unwrap();
        let om_y = g.conformal_factor(y).unwrap();
        let lhs: f64 = gx.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum();
        let rhs: f64 =
            om_x * om_y * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-12));
    }
    records.push(CheckRecord::new("two-point distance identity", "distance-identity", worst, 1e-8));

    // automorphism identity for the kernel argument
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let g = random_in_g(&mut rng, d, 4);
        let pts = sample_points(&mut rng, d, 2, 0.6);
        let (x, y) = (&pts[0], &pts[1]);
        let gx = g.act_finite(x).unwrap();
        let gy = g.act_finite(y).unwrap();
        let om_x = g.conformal_factor(x).unwrap();
        let om_y = g.conformal_factor(y).unwrap();
        let form = |u: &[f64], v: &[f64]| -> f64 {
            let uv: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let nu: f64 = u.iter().map(|a| a * a).sum();
            let nv: f64 = v.iter().map(|a| a * a).sum();
            1.0 - 2.0 * uv + nu * nv
        };
        let lhs = form(&gx, &gy);
        let rhs = om_x * om_y * form(x, y);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-12));
    }
    records.push(CheckRecord::new("automorphism kernel identity", "kernel-identity", worst, 1e-8));

    // finite-difference Jacobian conformality
    let mut worst = 0.0f64;
    let fd_cases = cfg.samples.min(100);
    for _ in 0..fd_cases {
        let g = word_in_s(&mut rng, d, 4);
        let x = sample_points(&mut rng, d, 1, 0.5).pop().unwrap();
        let om = g.conformal_factor(&x).unwrap();
        let h = 1e-6;
        let mut jac = nalgebra::DMatrix::zeros(d, d);
        let gx = g.act_finite(&x).unwrap();
        for k in 0..d {
            let mut xp = x.clone();
            xp[k] += h;
            let gp = g.act_finite(&xp).unwrap();
            for i in 0..d {
                jac[(i, k)] = (gp[i] - gx[i]) / h;
            }
        }
        let jtj = jac.transpose() * &jac;
        let resid = (jtj - nalgebra::DMatrix::identity(d, d) * om * om).amax() / (om * om);
        worst = worst.max(resid);
    }
    records.push(CheckRecord::new("Jacobian conformality (finite differences)", "conformal-jacobian", worst, 1e-4));

    // inversion fixes exactly the unit sphere
    let inv = MobiusMatrix::inversion(d);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let x = sample_points(&mut rng, d, 1, 0.95).pop().unwrap();
        let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n < 0.2 {
            continue;
        }
        let unit: Vec<f64> = x.iter().map(|v| v / n).collect();
        let fixed = inv.act_finite(&unit).unwrap();
        let defect: f64 = fixed
            .iter()
            .zip(&unit)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(defect);
        // off the sphere the inversion must move the point
        let moved = inv.act_finite(&x).unwrap();
        let dist: f64 = moved
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let expect_move = (1.0 - n).abs() > 1e-3;
        if expect_move && dist < 1e-9 {
            worst = worst.max(1.0);
        }
    }
    records.push(CheckRecord::new("inversion fixed set", "inversion-fixed-set", worst, 1e-9));

    // factorizations: stabilizer membership and recomposition
    let mut worst_stab = 0.0f64;
    let mut worst_rec = 0.0f64;
    let inv_m = MobiusMatrix::inversion(d);
    for _ in 0..cfg.samples.min(150) {
        let g = word_in_s(&mut rng, d, 6);
        if classify(&g) != Class::InSNotG {
            continue;
        }
        let f = decompose_s(&g).unwrap();
        worst_stab = worst_stab.max((&inv_m.m * &f.h.m - &f.h.m * &inv_m.m).amax());
        let back = MobiusMatrix::translation(&f.center)
            .compose(&MobiusMatrix::dilation(d, f.radius).unwrap())
            .unwrap()
            .compose(&f.h)
            .unwrap();
        worst_rec = worst_rec.max((&back.m - &g.m).amax());
        let gf = gauss_decompose(&g).unwrap();
        worst_rec = worst_rec.max((gf.recompose(d).unwrap().m - &g.m).amax());
    }
    for _ in 0..cfg.samples.min(60) {
        let g = random_interior(&mut rng, d, 0.02);
        let f = decompose_interior(&g).unwrap();
        let back = f
            .h1
            .compose(&MobiusMatrix::dilation(d, f.radius).unwrap())
            .unwrap()
            .compose(&f.h2)
            .unwrap();
        worst_rec = worst_rec.max((&back.m - &g.m).amax());
        worst_stab = worst_stab.max((&inv_m.m * &f.h2.m - &f.h2.m * &inv_m.m).amax());
    }
    records.push(CheckRecord::new("factorization recomposition", "factorization", worst_rec, 1e-10));
    records.push(CheckRecord::new("stabilizer factor residual", "stabilizer-membership", worst_stab, 1e-8));

    // hyperbolic two-point invariant under automorphisms
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(150) {
        let g = random_in_g(&mut rng, d, 4);
        let pts = sample_points(&mut rng, d, 2, 0.7);
        let (x, y) = (&pts[0], &pts[1]);
        let before = hyperbolic_invariant(x, y, InvariantDomain::Ball).unwrap();
        let gx = g.act_finite(x).unwrap();
        let gy = g.act_finite(y).unwrap();
        let after = hyperbolic_invariant(&gx, &gy, InvariantDomain::Ball).unwrap();
        worst = worst.max((before - after).abs() / before.abs().max(1e-9));
    }
    records.push(CheckRecord::new("two-point invariant under automorphisms", "hyperbolic-invariant", worst, 1e-8));

    // image-ball postcondition: mapped boundary points land on the fit
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(100) {
        let g = word_in_s(&mut rng, d, 5);
        if let BallRegion::Ball { center, radius } = image_ball(&g) {
            for x in crate::mobius::geometry::boundary_sample(d) {
                let y = g.act_finite(&x).unwrap();
                let dist: f64 = y
                    .iter()
                    .zip(&center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max((dist - radius).abs());
            }
        }
    }
    records.push(CheckRecord::new("image ball contains mapped boundary", "image-ball-fit", worst, 1e-9));

    SuiteReport::new("group", records)
}

/// Exact-arithmetic suite over the polynomial layer. Measured quantities are
/// 0/1 flags (0 meaning the exact identity held).
pub fn harmonic_suite(cfg: &VerifyConfig) -> SuiteReport {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6861726d);
    let mut records = Vec::new();
    let rat = |n: i64, den: i64| Rat::new(n.into(), den.into());

    // random harmonic samples up to degree 6 via raising words
    let mut harmonics = vec![Poly::one(d)];
    let mut cur = Poly::one(d);
    for k in 0..6usize {
        cur = act_twisted(SoGenerator::Raising(k % d), &cur);
        harmonics.push(cur.clone());
    }

    // proportionality between the two inner products via adjointness
    let mut fail = 0.0f64;
    for f in &harmonics {
        for g in &harmonics {
            if f.degree() != g.degree() {
                continue;
            }
            for mu in 0..d {
                let lhs = h_inner(&act_twisted(SoGenerator::Raising(mu), f), &raise_one(g))
                    .unwrap_or_else(|_| rat(0, 1));
                let rhs = h_inner(f, &act_twisted(SoGenerator::Lowering(mu), &raise_one(g)))
                    .unwrap_or_else(|_| rat(0, 1));
                if lhs != rhs {
                    fail = 1.0;
                }
            }
        }
    }
    fn raise_one(g: &Poly) -> Poly {
        act_twisted(SoGenerator::Raising(0), g)
    }
    records.push(CheckRecord::new("ladder adjointness (exact)", "inner-product-adjointness", fail, 0.0));

    // kelvin dual equals the raised polynomial, exactly
    let mut fail = 0.0f64;
    for f in [
        Poly::one(d),
        Poly::variable(d, 0),
        Poly::variable(d, 0).mul(&Poly::variable(d, 1)),
        Poly::variable(d, 1)
            .mul(&Poly::variable(d, 1))
            .mul(&Poly::variable(d, 0)),
    ] {
        if kelvin_dual(&f) != raise_polynomial(&f) {
            fail = 1.0;
        }
    }
    records.push(CheckRecord::new("kelvin dual equals raising (exact)", "kelvin-dual", fail, 0.0));

    // commutation relations on the harmonic sample
    let mut fail = 0.0f64;
    for f in &harmonics {
        for mu in 0..d {
            for nu in 0..d {
                let lhs = act_twisted(SoGenerator::Raising(mu), &act_twisted(SoGenerator::Lowering(nu), f))
                    .sub(&act_twisted(SoGenerator::Lowering(nu), &act_twisted(SoGenerator::Raising(mu), f)));
                let mut rhs = Poly::zero(d);
                if mu == nu {
                    rhs = rhs.add(&act_twisted(SoGenerator::Degree, f));
                }
                rhs = rhs.add(&act_twisted(SoGenerator::Rotation(mu, nu), f));
                if lhs != rhs.scale(&rat(-2, 1)) {
                    fail = 1.0;
                }
            }
        }
    }
    records.push(CheckRecord::new("commutation relations (exact)", "commutators", fail, 0.0));

    // product bound for the monomial inner product
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(60) {
        let f = random_homogeneous(&mut rng, d, 3);
        let g = random_homogeneous(&mut rng, d, 2);
        let fg = f.mul(&g);
        let nfg = crate::num::rat_to_f64(&fisher_inner(&fg, &fg).unwrap());
        let nf = crate::num::rat_to_f64(&fisher_inner(&f, &f).unwrap());
        let ng = crate::num::rat_to_f64(&fisher_inner(&g, &g).unwrap());
        let binom = 10.0; // C(5, 3)
        worst = worst.max(nfg / (binom * nf * ng));
    }
    records.push(CheckRecord::new("product bound for monomial product", "fisher-product-bound", worst, 1.0 + 1e-12));

    // orthogonality of the squared-norm multiple (exact)
    let mut fail = 0.0f64;
    for h in &harmonics {
        let g = Poly::norm_squared(d).mul(h);
        for f in &harmonics {
            if fisher_inner(&g, f).unwrap() != rat(0, 1) {
                fail = 1.0;
            }
        }
    }
    records.push(CheckRecord::new("projection orthogonality (exact)", "projection-orthogonal", fail, 0.0));

    // harmonic projection idempotence (exact)
    let mut fail = 0.0f64;
    for _ in 0..10 {
        let f = random_homogeneous(&mut rng, d, 4);
        let p = project_harmonic(&f);
        if !p.is_harmonic() || project_harmonic(&p) != p {
            fail = 1.0;
        }
    }
    records.push(CheckRecord::new("harmonic projection idempotent (exact)", "projection-idempotent", fail, 0.0));

    // sphere sup bound on sampled directions
    let basis = build_basis(d, cfg.n_max.min(8)).unwrap();
    let mut worst = 0.0f64;
    for (n, block) in basis.blocks.iter().enumerate() {
        let a = dim_harm(d, n as u32) as f64;
        let cap = ((d as f64 - 2.0) * a / (2.0 * n as f64 + d as f64 - 2.0)).sqrt();
        for y in &block.polys {
            for _ in 0..20 {
                let x = sample_points(&mut rng, d, 1, 1.0).pop().unwrap();
                let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    continue;
                }
                let xi: Vec<f64> = x.iter().map(|v| v / norm).collect();
                worst = worst.max(y.eval(&xi).abs() / cap);
            }
        }
    }
    records.push(CheckRecord::new("sup bound on the sphere", "sphere-sup-bound", worst, 1.0 + 1e-9));

    // Monte-Carlo surface integral against the norm relation
    let mut worst = 0.0f64;
    let mc = 40_000;
    for n in 1..=3u32 {
        let y = &basis.blocks[n as usize].polys[0];
        let mut acc = 0.0;
        for _ in 0..mc {
            let dir: Vec<f64> = {
                let mut v: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
                let norm: f64 = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                v.iter_mut().for_each(|t| *t /= norm);
                v
            };
            let val = y.eval(&dir);
            acc += val * val;
        }
        let l2 = acc / mc as f64;
        let predicted = (d as f64 - 2.0) / (2.0 * n as f64 + d as f64 - 2.0); // ‖Y‖_H = 1
        // Monte-Carlo error scales like 1/√mc; allow five sigmas
        let rel = (l2 - predicted).abs() / predicted;
        worst = worst.max(rel / (5.0 * (mc as f64).sqrt().recip() * 3.0));
    }
    records.push(CheckRecord::new("surface integral relation (Monte-Carlo)", "l2-relation", worst, 1.0));

    SuiteReport::new("harmonic", records)
}

fn random_homogeneous<R: Rng>(rng: &mut R, d: usize, n: u32) -> Poly {
    let mut p = Poly::zero(d);
    for idx in crate::harmonic::multi_index::indices_of_degree(d, n) {
        let c: i64 = rng.gen_range(-4..=4);
        if c != 0 {
            p.add_term(idx, Rat::new(c.into(), 1.into()));
        }
    }
    if p.is_zero() {
        p.add_term(
            crate::harmonic::multi_index::MultiIndex::unit(d, 0),
            Rat::new(1.into(), 1.into()),
        );
    }
    p
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Strongly coupled separated pairs along several directions, used by the
/// two-point radical probe.
pub fn probe_grid(d: usize) -> Vec<(MobiusMatrix, MobiusMatrix)> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    dirs.push(e1);
    let mut e2 = vec![0.0; d];
    e2[1] = 1.0;
    dirs.push(e2);
    let mut diag = vec![0.0; d];
    diag[0] = std::f64::consts::FRAC_1_SQRT_2;
    diag[1] = 0.5;
    diag[2] = 0.5;
    dirs.push(diag);
    dirs.into_iter()
        .map(|u| {
            let a: Vec<f64> = u.iter().map(|v| 0.5 * v).collect();
            let b: Vec<f64> = u.iter().map(|v| -0.5 * v).collect();
            let g1 = MobiusMatrix::translation(&a)
                .compose(&MobiusMatrix::dilation(d, 0.35).unwrap())
                .unwrap();
            let g2 = MobiusMatrix::translation(&b)
                .compose(&MobiusMatrix::dilation(d, 0.35).unwrap())
                .unwrap();
            (g1, g2)
        })
        .collect()
}

/// Kernel-space suite: reproduction, traces, the monoid action and its
/// certificates.
pub fn rkhs_suite(cfg: &VerifyConfig) -> SuiteReport {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x726b6873);
    let mut records = Vec::new();
    let t = Truncation::new(Arc::new(build_basis(d, cfg.n_max).unwrap()));

    // kernel reproduction through evaluation vectors
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(60) {
        let pts = sample_points(&mut rng, d, 2, 0.5);
        let (a, b) = (&pts[0], &pts[1]);
        let dot = e_vector(a, &t).unwrap().dot(&e_vector(b, &t).unwrap());
        let closed = kernel(a, b, d).unwrap();
        let tail = kernel_tail(a, b, t.n_max(), d) + 1e-12 * closed.abs();
        worst = worst.max((dot - closed).abs() / tail);
    }
    records.push(CheckRecord::new("kernel reproduction within tail", "kernel-reproduction", worst, 1.0));

    // partial sums of the generating identity
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(60) {
        let pts = sample_points(&mut rng, d, 2, 0.5);
        let (a, b) = (&pts[0], &pts[1]);
        let partial = kernel_partial_sum(a, b, 40, d);
        let closed = kernel(a, b, d).unwrap();
        let tail = kernel_tail(a, b, 40, d) + 1e-12 * closed.abs();
        worst = worst.max((partial - closed).abs() / tail);
    }
    records.push(CheckRecord::new("generating-function partial sums", "kernel-partial-sums", worst, 1.0));

    // dilation trace formula
    let mut worst = 0.0f64;
    for r in [0.2, 0.35, 0.5] {
        let partial = dilation_trace_partial(d, 200, r);
        let closed = dilation_trace_closed(d, r);
        let tail = dilation_trace_tail(d, 200, r) + 1e-12 * closed;
        worst = worst.max((partial - closed).abs() / tail);
    }
    records.push(CheckRecord::new("dilation trace formula", "trace-formula", worst, 1.0));

    // dilation self-adjointness is structural; check the matrix is diagonal
    let op = op_dilation(0.37, &t).unwrap();
    let mut offdiag = 0.0f64;
    for i in 0..t.dim() {
        for j in 0..t.dim() {
            if i != j {
                offdiag = offdiag.max(op.mat[(i, j)].abs());
            }
        }
    }
    records.push(CheckRecord::new("dilation diagonality", "dilation-self-adjoint", offdiag, 0.0));

    // action defect against the kernel action
    let xs = sample_points(&mut rng, d, 6, 0.3);
    let mut worst_ratio = 0.0f64;
    for _ in 0..cfg.samples.min(40) {
        let g = word_in_s(&mut rng, d, 5);
        let defect = validate_rho(&g, &t, &xs).unwrap();
        if defect.max_defect > 1e-12 {
            worst_ratio = worst_ratio.max(defect.ratio);
        }
    }
    records.push(CheckRecord::new("action defect within tail", "action-kernel-defect", worst_ratio, 1.5));

    // contraction property of the truncated action
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(10) {
        let g = random_interior(&mut rng, d, 0.05);
        let op = op_rho(&g, &t).unwrap();
        worst = worst.max(op.operator_norm());
    }
    records.push(CheckRecord::new("action is a contraction", "action-contraction", worst, 1.0 + 1e-6));

    SuiteReport::new("rkhs", records)
}

/// Contraction-form suite: dual routes, bounds, closed-form sandwiches, the
/// invariance laws and the divergence probe.
pub fn contraction_suite(cfg: &VerifyConfig) -> SuiteReport {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x636f6e74);
    let mut records = Vec::new();
    let t = Truncation::new(Arc::new(build_basis(d, cfg.n_max).unwrap()));
    let t_small = Truncation::new(Arc::new(build_basis(d, 3).unwrap()));

    let mut a = vec![0.0; d];
    a[0] = 0.35;
    let mut b = vec![0.0; d];
    b[0] = -0.35;
    let (r, s) = (0.18, 0.2);

    // dual-route agreement on all entries with small total degree
    let core = contraction_core(&a, r, &b, s, &t_small).unwrap();
    let green = contraction_green_matrix(&a, r, &b, s, &t_small).unwrap();
    records.push(CheckRecord::new(
        "dual-route agreement",
        "contraction-dual-route",
        (&core.mat - &green.mat).amax(),
        1e-10,
    ));

    // entrywise bound on the full truncation
    let full = contraction_core(&a, r, &b, s, &t).unwrap();
    records.push(CheckRecord::new(
        "entries within bound",
        "contraction-entry-bound",
        max_entry_ratio(&full, &t),
        1.0 + 1e-9,
    ));

    // closed-form sandwich within tail
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.min(20) {
        let pts = sample_points(&mut rng, d, 2, 0.25);
        let (p, q) = (&pts[0], &pts[1]);
        let ep = e_vector(p, &t).unwrap();
        let eq = e_vector(q, &t).unwrap();
        let got = full.pair(&ep, &eq);
        let w = (d as f64 - 2.0) / 2.0;
        let img: Vec<f64> = (0..d)
            .map(|i| a[i] + r * p[i] - b[i] - s * q[i])
            .collect();
        let sep = img.iter().map(|v| v * v).sum::<f64>().sqrt();
        let closed = r.powf(w) * s.powf(w) / sep.powi(d as i32 - 2);
        let rho_p = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho_q = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tail =
            sandwich_tail(full.sigma1, full.sigma2, rho_p, rho_q, t.n_max(), d) + 1e-12 * closed;
        worst = worst.max((got - closed).abs() / tail);
    }
    records.push(CheckRecord::new("evaluation sandwich within tail", "contraction-evaluation", worst, 1.0));

    // swap covariance: the transposed matrix is the swapped pair
    let g1 = MobiusMatrix::translation(&a)
        .compose(&MobiusMatrix::dilation(d, r).unwrap())
        .unwrap();
    let g2 = MobiusMatrix::translation(&b)
        .compose(&MobiusMatrix::dilation(d, s).unwrap())
        .unwrap();
    let c12 = contraction_general(&g1, &g2, &t_small).unwrap();
    let c21 = contraction_general(&g2, &g1, &t_small).unwrap();
    records.push(CheckRecord::new(
        "swap covariance",
        "contraction-swap",
        (c12.mat.transpose() - &c21.mat).amax(),
        1e-9,
    ));

    // left invariance under an automorphism keeping the pair separated; the
    // two assemblies differ only through discarded degrees, so the HS mass
    // of the blocks beyond the truncation bounds the drift
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 5 {
        let h = random_in_g(&mut rng, d, 2);
        let hg1 = h.compose(&g1).unwrap();
        let hg2 = h.compose(&g2).unwrap();
        if let Ok(cfg_moved) = crate::mobius::is_ce_config(&[hg1.clone(), hg2.clone()]) {
            if !cfg_moved.strict {
                continue;
            }
            accepted += 1;
            let moved = contraction_general(&hg1, &hg2, &t_small).unwrap();
            let slack = hs_block_tail(
                moved.sigma1.max(c12.sigma1),
                moved.sigma2.max(c12.sigma2),
                t_small.n_max(),
                d,
            );
            worst = worst.max((&moved.mat - &c12.mat).amax() / (1e-9 + 2.0 * slack));
        }
    }
    records.push(CheckRecord::new("left invariance within slack", "contraction-left-invariance", worst, 1.0));

    // pre-composition law: C_{g1 f, g2} = C_{g1, g2} (ρ(f) ⊗ id)
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 5 {
        let f = word_in_s(&mut rng, d, 2);
        let g1f = g1.compose(&f).unwrap();
        if let Ok(cfg_moved) = crate::mobius::is_ce_config(&[g1f.clone(), g2.clone()]) {
            if !cfg_moved.strict {
                continue;
            }
            accepted += 1;
            let lhs = contraction_general(&g1f, &g2, &t_small).unwrap();
            let rho_f = op_rho(&f, &t_small).unwrap();
            let rhs = rho_f.mat.transpose() * &c12.mat;
            let slack = hs_block_tail(
                lhs.sigma1.max(c12.sigma1),
                lhs.sigma2.max(c12.sigma2),
                t_small.n_max(),
                d,
            );
            worst = worst.max((&lhs.mat - rhs).amax() / (1e-9 + 2.0 * slack));
        }
    }
    records.push(CheckRecord::new("pre-composition within slack", "contraction-precomposition", worst, 1.0));

    // lower-bound family consistency
    let profile = lower_bound_profile(0.8, 30, d.max(4));
    let ok = if profile.family_norm >= profile.analytic_prefactored {
        0.0
    } else {
        1.0
    };
    records.push(CheckRecord::new("family norm above its bound", "divergence-family-bound", ok, 0.0));
    let anchor = analytic_partial_bound(0.999, 60, 4);
    records.push(CheckRecord::new(
        "bound anchor near tangency",
        "divergence-anchor",
        if anchor > 2.0 { 0.0 } else { 1.0 },
        0.0,
    ));

    SuiteReport::new("contraction", records)
}

/// Symmetric-algebra suite: operad laws, the matching-sum duality, the
/// sphere state and the two-point radical probe.
pub fn fock_suite(cfg: &VerifyConfig) -> SuiteReport {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x666f636b);
    let mut records = Vec::new();
    let t = Arc::new(Truncation::new(Arc::new(build_basis(d, cfg.n_max).unwrap())));
    let ft = FockTruncation::new(t.clone(), cfg.p_max, cfg.deg_max);

    let mut a = vec![0.0; d];
    a[0] = 0.5;
    let mut b = vec![0.0; d];
    b[0] = -0.5;
    let g1 = MobiusMatrix::translation(&a)
        .compose(&MobiusMatrix::dilation(d, 0.12).unwrap())
        .unwrap();
    let g2 = MobiusMatrix::translation(&b)
        .compose(&MobiusMatrix::dilation(d, 0.12).unwrap())
        .unwrap();
    let mut c = vec![0.0; d];
    c[1] = 0.5;
    let g3 = MobiusMatrix::translation(&c)
        .compose(&MobiusMatrix::dilation(d, 0.12).unwrap())
        .unwrap();
    let mut e = vec![0.0; d];
    e[1] = -0.5;
    let g4 = MobiusMatrix::translation(&e)
        .compose(&MobiusMatrix::dilation(d, 0.12).unwrap())
        .unwrap();

    // unit law
    let v = FockVector::from_multiset(vec![1, 3]);
    let unit = product_rho(&[MobiusMatrix::identity(d)], &ft, &[v.clone()]).unwrap();
    records.push(CheckRecord::new("unit law", "operad-unit", unit.sub(&v).norm(), 1e-9));

    // vacuum absorption
    let with_vac = product_rho(&[g1.clone(), g2.clone()], &ft, &[v.clone(), FockVector::vacuum()])
        .unwrap();
    let dropped = product_rho(std::slice::from_ref(&g1), &ft, &[v.clone()]).unwrap();
    records.push(CheckRecord::new(
        "vacuum absorption",
        "operad-vacuum",
        with_vac.sub(&dropped).norm() / dropped.norm().max(1e-12),
        1e-9,
    ));

    // equivariance under permuting slots and inputs together
    let phi = FockVector::single(1);
    let psi = FockVector::single(2);
    let lhs = product_rho(&[g1.clone(), g2.clone()], &ft, &[phi.clone(), psi.clone()]).unwrap();
    let rhs = product_rho(&[g2.clone(), g1.clone()], &ft, &[psi.clone(), phi.clone()]).unwrap();
    records.push(CheckRecord::new(
        "slot equivariance",
        "operad-equivariance",
        lhs.sub(&rhs).norm() / lhs.norm().max(1e-12),
        1e-9,
    ));

    // matching-sum duality at arities 2 and 4
    let mut worst = 0.0f64;
    for particles in [vec![1u16, 2], vec![1, 2, 3, 1]] {
        let elements: Vec<MobiusMatrix> = match particles.len() {
            2 => vec![g1.clone(), g2.clone()],
            _ => vec![g1.clone(), g2.clone(), g3.clone(), g4.clone()],
        };
        let inputs: Vec<FockVector> = particles.iter().map(|&i| FockVector::single(i)).collect();
        let via_product = vacuum_expectation(&elements, &ft, &inputs).unwrap();
        let via_oracle = npoint_wick_oracle(&elements, &ft, &particles).unwrap();
        worst = worst.max((via_product - via_oracle).abs() / via_oracle.abs().max(1e-9));
    }
    records.push(CheckRecord::new("matching-sum duality", "wick-duality", worst, 1e-9));

    // dilation eigenstructure: only the vacuum sits at the minimal weight
    let basis = ft.enumerate_basis();
    let min_vacua = basis.iter().filter(|m| m.is_empty()).count();
    records.push(CheckRecord::new(
        "vacuum sector is one-dimensional",
        "vacuum-dimension",
        (min_vacua as f64 - 1.0).abs(),
        0.0,
    ));

    // composition discrepancy for a strict composed configuration
    let inner = vec![
        MobiusMatrix::dilation(d, 0.3).unwrap(),
        {
            let mut f = vec![0.0; d];
            f[1] = 0.6;
            MobiusMatrix::translation(&f)
                .compose(&MobiusMatrix::dilation(d, 0.2).unwrap())
                .unwrap()
        },
    ];
    let inputs = vec![FockVector::single(1), FockVector::single(0), FockVector::single(2)];
    let disc = crate::fock::operad_check(&[g1.clone(), g2.clone()], &inner, 0, &ft, &inputs)
        .unwrap();
    records.push(CheckRecord::new("composition discrepancy", "operad-composition", disc, 1e-6));

    // radical probe over low basis vectors, on strongly coupled pairs in
    // three directions (axis zeros of a single direction cannot hide a
    // vector from all three)
    let grid: Vec<(MobiusMatrix, MobiusMatrix)> = probe_grid(d);
    let probes: Vec<FockVector> = basis
        .iter()
        .filter(|m| m.len() <= 2 && ft.total_degree(m) <= 4)
        .map(|m| FockVector::from_multiset(m.clone()))
        .collect();
    let mut min_best = f64::INFINITY;
    for m in basis.iter().filter(|m| m.len() <= 2 && ft.total_degree(m) <= 4) {
        let v = FockVector::from_multiset(m.clone());
        let best = radical_probe_2pt(&v, &grid, &probes, &ft).unwrap();
        min_best = min_best.min(best);
    }
    records.push(CheckRecord::new(
        "two-point probe stays nonzero",
        "radical-probe",
        if min_best > 1e-6 { 0.0 } else { 1.0 },
        0.0,
    ));

    // sphere state: empty value, in-ball match, invariance, choice independence
    let inputs = vec![FockVector::single(0), FockVector::single(0)];
    let in_disk = vacuum_expectation(&[g1.clone(), g2.clone()], &ft, &inputs).unwrap();
    let opts = SphereStateOptions::default();
    let s0 = sphere_state(&[g1.clone(), g2.clone()], &ft, &inputs, &mut rng, opts).unwrap();
    records.push(CheckRecord::new(
        "sphere state matches in-ball value",
        "sphere-in-ball",
        (s0 - in_disk).abs() / in_disk.abs().max(1e-9),
        1e-6,
    ));
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let gamma = random_conformal(&mut rng, d, 3);
        let moved: Vec<MobiusMatrix> = [&g1, &g2]
            .iter()
            .map(|g| gamma.compose(g).unwrap())
            .collect();
        let val = sphere_state(&moved, &ft, &inputs, &mut rng, opts).unwrap();
        worst = worst.max((val - s0).abs() / s0.abs().max(1e-9));
    }
    records.push(CheckRecord::new("conformal invariance of the sphere state", "sphere-invariance", worst, 1e-6));
    let mut rng_b = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7370_6863);
    let s1 = sphere_state(&[g1.clone(), g2.clone()], &ft, &inputs, &mut rng_b, opts).unwrap();
    records.push(CheckRecord::new(
        "choice independence",
        "sphere-choice",
        (s1 - s0).abs() / s0.abs().max(1e-9),
        1e-7,
    ));

    SuiteReport::new("fock", records)
}

/// Run every suite.
pub fn run_all(cfg: &VerifyConfig) -> Result<Report> {
    let suites = vec![
        group_suite(cfg),
        harmonic_suite(cfg),
        rkhs_suite(cfg),
        contraction_suite(cfg),
        fock_suite(cfg),
    ];
    let pass = suites.iter().all(|s| s.pass);
    Ok(Report { config: cfg.clone(), suites, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes_quick_suites() {
        let cfg = VerifyConfig { samples: 40, n_max: 8, deg_max: 8, ..Default::default() };
        let report = run_all(&cfg).unwrap();
        for suite in &report.suites {
            for rec in &suite.records {
                assert!(rec.pass, "{}::{} measured {} bound {}", suite.suite, rec.name, rec.measured, rec.bound);
            }
        }
        assert!(report.pass);
    }

    #[test]
    fn report_serialization_is_deterministic() {
        let cfg = VerifyConfig { samples: 10, n_max: 6, deg_max: 6, ..Default::default() };
        let a = serde_json::to_string(&run_all(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_all(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
