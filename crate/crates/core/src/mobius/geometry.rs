//! Image geometry: where a conformal matrix sends the unit ball, membership
//! classification, configurations of disjoint images, and the two-point
//! invariant of the ball automorphism group.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{MobiusMatrix, SpherePoint};
use crate::{Error, Result, TOL_GEO};

/// Image of the unit ball: a ball, an open half-space, or the complement of a
/// closed ball (the case where the image contains `∞`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BallRegion {
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : normal·x > offset}` with unit normal; `∞` lies on the boundary.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    BallComplement { center: Vec<f64>, radius: f64 },
}

impl BallRegion {
    /// Closure contains the point at infinity?
    pub fn closure_has_infinity(&self) -> bool {
        !matches!(self, BallRegion::Ball { .. })
    }

    /// Closed-region membership with tolerance.
    pub fn closure_contains(&self, p: &SpherePoint, tol: f64) -> bool {
        match p {
            SpherePoint::Infinity => self.closure_has_infinity(),
            SpherePoint::Finite(x) => match self {
                BallRegion::Ball { center, radius } => dist(x, center) <= radius + tol,
                BallRegion::HalfSpace { normal, offset } => dot(normal, x) >= offset - tol,
                BallRegion::BallComplement { center, radius } => {
                    dist(x, center) >= radius - tol
                }
            },
        }
    }

    /// Are the closures of two regions disjoint (as subsets of the sphere)?
    pub fn closure_disjoint(&self, other: &BallRegion, tol: f64) -> bool {
        use BallRegion::*;
        if self.closure_has_infinity() && other.closure_has_infinity() {
            return false;
        }
        match (self, other) {
            (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => {
                dist(c1, c2) > r1 + r2 + tol
            }
            (Ball { center, radius }, HalfSpace { normal, offset })
            | (HalfSpace { normal, offset }, Ball { center, radius }) => {
                dot(normal, center) + radius < offset - tol
            }
            (Ball { center: c1, radius: r1 }, BallComplement { center: c2, radius: r2 })
            | (BallComplement { center: c2, radius: r2 }, Ball { center: c1, radius: r1 }) => {
                dist(c1, c2) + r1 < r2 - tol
            }
            _ => false,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Deterministic well-spread sample of `2d + 2` points on the unit sphere.
pub fn boundary_sample(d: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(2 * d + 2);
    for i in 0..d {
        let mut p = vec![0.0; d];
        p[i] = 1.0;
        pts.push(p.clone());
        p[i] = -1.0;
        pts.push(p);
    }
    let n = (d as f64).sqrt();
    pts.push((0..d).map(|_| 1.0 / n).collect());
    pts.push((0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / n).collect());
    pts
}

/// Fit the image of the unit sphere under `g` and orient the region by the
/// image of the center.
///
/// Boundary samples are mapped, a sphere is fitted by least squares, and the
/// fit residual is required to stay below the geometric tolerance. A fit
/// whose radius exceeds `1/τ_geo`, or a sample hitting `∞`, falls back to a
/// hyperplane.
pub fn image_ball(g: &MobiusMatrix) -> BallRegion {
    let d = g.d;
    let mut finite = Vec::new();
    let mut saw_infinity = false;
    for x in boundary_sample(d) {
        match g.act(&SpherePoint::Finite(x)) {
            (SpherePoint::Finite(y), _) => finite.push(y),
            (SpherePoint::Infinity, _) => saw_infinity = true,
        }
    }
    let interior = g.act(&SpherePoint::finite(&vec![0.0; d])).0;
    if !saw_infinity {
        if let Some((center, radius, resid)) = fit_sphere(d, &finite) {
            if resid < TOL_GEO * (1.0 + radius * radius) && radius < 1.0 / TOL_GEO {
                return match &interior {
                    SpherePoint::Infinity => BallRegion::BallComplement { center, radius },
                    SpherePoint::Finite(x0) => {
                        if dist(x0, &center) <= radius {
                            BallRegion::Ball { center, radius }
                        } else {
                            BallRegion::BallComplement { center, radius }
                        }
                    }
                };
            }
        }
    }
    let (normal, offset) = fit_hyperplane(d, &finite);
    match &interior {
        SpherePoint::Finite(x0) if dot(&normal, x0) < offset => BallRegion::HalfSpace {
            normal: normal.iter().map(|v| -v).collect(),
            offset: -offset,
        },
        _ => BallRegion::HalfSpace { normal, offset },
    }
}

fn fit_sphere(d: usize, pts: &[Vec<f64>]) -> Option<(Vec<f64>, f64, f64)> {
    // |p|² = 2 c·p + (r² - |c|²): least squares in (c, s) by normal equations
    let rows = pts.len();
    let mut a = DMatrix::zeros(rows, d + 1);
    let mut b = DVector::zeros(rows);
    for (k, p) in pts.iter().enumerate() {
        for i in 0..d {
            a[(k, i)] = 2.0 * p[i];
        }
        a[(k, d)] = 1.0;
        b[k] = p.iter().map(|v| v * v).sum();
    }
    let ata = a.transpose() * &a;
    let atb = a.transpose() * &b;
    let sol = ata.lu().solve(&atb)?;
    let center: Vec<f64> = (0..d).map(|i| sol[i]).collect();
    let r2 = sol[d] + center.iter().map(|v| v * v).sum::<f64>();
    if !(r2 > 0.0) {
        return None;
    }
    let radius = r2.sqrt();
    let resid = (a * sol - b).amax();
    Some((center, radius, resid))
}

fn fit_hyperplane(d: usize, pts: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let rows = pts.len();
    let mean: Vec<f64> = (0..d)
        .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / rows as f64)
        .collect();
    let mut a = DMatrix::zeros(rows, d);
    for (k, p) in pts.iter().enumerate() {
        for i in 0..d {
            a[(k, i)] = p[i] - mean[i];
        }
    }
    let svd = nalgebra::SVD::new(a, false, true);
    let vt = svd.v_t.expect("svd with v requested");
    let last = vt.nrows() - 1;
    let normal: Vec<f64> = (0..d).map(|i| vt[(last, i)]).collect();
    let offset = dot(&normal, &mean);
    (normal, offset)
}

/// Membership of a matrix relative to the ball-contraction monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    /// Ball automorphism.
    InG,
    /// Strict contraction of the ball.
    InSNotG,
    /// Not a self-map of the ball.
    NotInS,
}

/// Classify by the fitted image region.
pub fn classify(g: &MobiusMatrix) -> Class {
    if g.determinant() < 0.0 || !g.is_orthochronous() {
        return Class::NotInS;
    }
    match image_ball(g) {
        BallRegion::Ball { center, radius } => {
            let c_norm = center.iter().map(|v| v * v).sum::<f64>().sqrt();
            if c_norm < TOL_GEO && (radius - 1.0).abs() < TOL_GEO {
                Class::InG
            } else if c_norm + radius <= 1.0 + TOL_GEO {
                Class::InSNotG
            } else {
                Class::NotInS
            }
        }
        _ => Class::NotInS,
    }
}

/// A tuple of ball contractions with cached image geometry.
#[derive(Debug, Clone)]
pub struct DiskConfig {
    pub elements: Vec<MobiusMatrix>,
    pub balls: Vec<BallRegion>,
    /// Pairwise separation ratios `(r_i + r_j) / ‖c_i - c_j‖`.
    pub sigma: DMatrix<f64>,
    /// True when all pairwise closures are disjoint.
    pub strict: bool,
}

impl DiskConfig {
    pub fn arity(&self) -> usize {
        self.elements.len()
    }
}

/// Build the configuration record for a tuple of monoid elements.
///
/// `strict` is true exactly when the closed image balls are pairwise disjoint
/// (with every image staying inside the closed unit ball, which membership in
/// the monoid already guarantees).
pub fn is_ce_config(gs: &[MobiusMatrix]) -> Result<DiskConfig> {
    let n = gs.len();
    let mut balls = Vec::with_capacity(n);
    for g in gs {
        if classify(g) == Class::NotInS {
            return Err(Error::NotInS);
        }
        balls.push(image_ball(g));
    }
    let mut sigma = DMatrix::zeros(n, n);
    let mut strict = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if let (BallRegion::Ball { center: ci, radius: ri }, BallRegion::Ball { center: cj, radius: rj }) =
                (&balls[i], &balls[j])
            {
                let sep = dist(ci, cj);
                let s = if sep > 0.0 { (ri + rj) / sep } else { f64::INFINITY };
                sigma[(i, j)] = s;
                sigma[(j, i)] = s;
                // tangency within the geometric tolerance counts as overlap
                if !(sep - (ri + rj) > TOL_GEO * sep.max(1.0)) {
                    strict = false;
                }
            } else {
                // a ball automorphism in the tuple: its image is the whole
                // ball, so any companion breaks disjointness
                sigma[(i, j)] = f64::INFINITY;
                sigma[(j, i)] = f64::INFINITY;
                strict = false;
            }
        }
    }
    Ok(DiskConfig { elements: gs.to_vec(), balls, sigma, strict })
}

/// Two-point invariant of the automorphism group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantDomain {
    /// Open unit ball; value `4‖x-y‖² / ((1-|x|²)(1-|y|²))`.
    Ball,
    /// Upper half-space `x_d > 0`; value `‖x-y‖² / (x_d y_d)`.
    HalfSpace,
}

/// Evaluate the invariant; errors when a point leaves the domain.
pub fn hyperbolic_invariant(x: &[f64], y: &[f64], dom: InvariantDomain) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    let d2 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    match dom {
        InvariantDomain::Ball => {
            let nx = 1.0 - x.iter().map(|v| v * v).sum::<f64>();
            let ny = 1.0 - y.iter().map(|v| v * v).sum::<f64>();
            if nx <= 0.0 || ny <= 0.0 {
                return Err(Error::OutsideDomain);
            }
            Ok(4.0 * d2 / (nx * ny))
        }
        InvariantDomain::HalfSpace => {
            let (xd, yd) = (x[x.len() - 1], y[y.len() - 1]);
            if xd <= 0.0 || yd <= 0.0 {
                return Err(Error::OutsideDomain);
            }
            Ok(d2 / (xd * yd))
        }
    }
}
