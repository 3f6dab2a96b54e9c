//! Factorizations of ball contractions.
//!
//! * `decompose_s`: a strict contraction factors as translation · dilation ·
//!   automorphism, read off its image ball.
//! * `decompose_interior`: when the closed image stays inside the open ball,
//!   the element factors as automorphism · dilation · automorphism; the
//!   middle radius is found by recentring the image circle through the
//!   half-space model.
//! * `gauss_decompose`: the big-cell factorization translation · dilation ·
//!   rotation · special-conformal, extracted entrywise from the matrix
//!   blocks.

use nalgebra::DMatrix;

use super::geometry::{classify, image_ball, BallRegion, Class};
use super::{make_generator, Generator, MobiusMatrix};
use crate::{Error, Result, POLE_EPS, TOL_GEO};

/// Result of `decompose_s`: `g = T(center) D(radius) h` with `h` an
/// automorphism of the ball.
pub struct SFactors {
    pub center: Vec<f64>,
    pub radius: f64,
    pub h: MobiusMatrix,
}

/// Residual of membership in the ball stabilizer: an automorphism commutes
/// with the inversion, so `‖Jh - hJ‖` vanishes exactly on the stabilizer.
fn stabilizer_residual(h: &MobiusMatrix) -> f64 {
    let j = MobiusMatrix::inversion(h.d);
    (&j.m * &h.m - &h.m * &j.m).amax()
}

/// Damped Gauss-Newton with forward differences on a parameter vector,
/// minimizing the stabilizer residual of `build(params)`.
fn polish<F>(params: &mut [f64], build: F)
where
    F: Fn(&[f64]) -> Option<MobiusMatrix>,
{
    let j = match build(params) {
        Some(h) => MobiusMatrix::inversion(h.d),
        None => return,
    };
    let resvec = |p: &[f64]| -> Option<nalgebra::DVector<f64>> {
        let h = build(p)?;
        let r = &j.m * &h.m - &h.m * &j.m;
        Some(nalgebra::DVector::from_iterator(r.len(), r.iter().cloned()))
    };
    let mut cur = match resvec(params) {
        Some(r) => r,
        None => return,
    };
    for _ in 0..6 {
        let norm = cur.amax();
        if norm < 1e-14 {
            break;
        }
        let np = params.len();
        let mut jac = DMatrix::zeros(cur.len(), np);
        let step = 1e-7;
        for k in 0..np {
            let mut p = params.to_vec();
            p[k] += step;
            let r = match resvec(&p) {
                Some(r) => r,
                None => return,
            };
            jac.set_column(k, &((r - &cur) / step));
        }
        let delta = match nalgebra::SVD::new(jac, true, true).solve(&cur, 1e-12) {
            Ok(d) => d,
            Err(_) => return,
        };
        let mut trial = params.to_vec();
        for k in 0..np {
            trial[k] -= delta[k];
        }
        match resvec(&trial) {
            Some(r) if r.amax() < norm => {
                params.copy_from_slice(&trial);
                cur = r;
            }
            _ => break,
        }
    }
}

/// Factor a strict contraction through its image ball.
///
/// The automorphism factor is fixed as `D(r)^{-1} T(-x₀) g`; no further
/// canonicalization inside the stabilizer is applied.
pub fn decompose_s(g: &MobiusMatrix) -> Result<SFactors> {
    match classify(g) {
        Class::InSNotG => {}
        Class::InG => return Err(Error::NotApplicable("element is a ball automorphism")),
        Class::NotInS => return Err(Error::NotApplicable("element is not a ball contraction")),
    }
    let (center, radius) = match image_ball(g) {
        BallRegion::Ball { center, radius } => (center, radius),
        _ => return Err(Error::NotApplicable("image is not a finite ball")),
    };
    let d = g.d;
    let build = |p: &[f64]| -> Option<MobiusMatrix> {
        if !(p[d] > 0.0) {
            return None;
        }
        let t_inv = MobiusMatrix::translation(&p[..d].iter().map(|v| -v).collect::<Vec<_>>());
        let d_inv = MobiusMatrix::dilation(d, 1.0 / p[d]).ok()?;
        d_inv.compose(&t_inv).ok()?.compose(g).ok()
    };
    let mut params: Vec<f64> = center.iter().cloned().chain([radius]).collect();
    polish(&mut params, build);
    let h = build(&params).expect("polished parameters stay feasible");
    Ok(SFactors { center: params[..d].to_vec(), radius: params[d], h })
}

/// Result of `decompose_interior`: `g = h1 D(radius) h2` with both outer
/// factors automorphisms of the ball.
pub struct InteriorFactors {
    pub h1: MobiusMatrix,
    pub radius: f64,
    pub h2: MobiusMatrix,
}

/// Factor an element whose closed image ball lies inside the open unit ball.
pub fn decompose_interior(g: &MobiusMatrix) -> Result<InteriorFactors> {
    let d = g.d;
    if classify(g) == Class::NotInS {
        return Err(Error::NotApplicable("element is not a ball contraction"));
    }
    if classify(g) == Class::InG {
        // trivial middle dilation
        return Ok(InteriorFactors {
            h1: MobiusMatrix::identity(d),
            radius: 1.0,
            h2: g.clone(),
        });
    }
    let (center, radius) = match image_ball(g) {
        BallRegion::Ball { center, radius } => (center, radius),
        _ => return Err(Error::NotApplicable("image is not a finite ball")),
    };
    let c_norm = center.iter().map(|v| v * v).sum::<f64>().sqrt();
    if c_norm + radius >= 1.0 - TOL_GEO {
        return Err(Error::BoundaryTouching);
    }
    // Move to the half-space model, recentre the image sphere on the axis,
    // and rescale it to the fixed sphere of a pure dilation.
    let cayley = make_generator(Generator::Cayley, d)?;
    let cayley_inv = cayley.inverse();
    // Image of the boundary circle in the half-space: a ball with center
    // (y', y_d), radius rr, y_d > rr.
    let samples: Vec<Vec<f64>> = super::geometry::boundary_sample(d)
        .iter()
        .map(|x| {
            let on_image: Vec<f64> = center
                .iter()
                .zip(x)
                .map(|(c, t)| c + radius * t)
                .collect();
            cayley_inv.act_finite(&on_image)
        })
        .collect::<Result<_>>()?;
    let (hcenter, hradius) = fit_ball(d, &samples)?;
    let yd = hcenter[d - 1];
    if yd <= hradius {
        return Err(Error::BoundaryTouching);
    }
    let lambda = 1.0 / (yd * yd - hradius * hradius).sqrt();
    let top = lambda * (yd + hradius);
    let r_mid = (top - 1.0) / (top + 1.0);
    if !(r_mid > 0.0 && r_mid < 1.0) {
        return Err(Error::BoundaryTouching);
    }
    // params: half-space recentring shift (d-1 entries), scale, middle radius
    let build = |p: &[f64]| -> Option<(MobiusMatrix, MobiusMatrix)> {
        let r = p[d];
        let lam = p[d - 1];
        if !(r > 0.0 && r < 1.0 && lam > 0.0) {
            return None;
        }
        let mut shift = vec![0.0; d];
        shift[..d - 1].copy_from_slice(&p[..d - 1]);
        let w = MobiusMatrix::dilation(d, lam)
            .ok()?
            .compose(&MobiusMatrix::translation(
                &shift.iter().map(|v| -v).collect::<Vec<_>>(),
            ))
            .ok()?;
        let v = cayley.compose(&w).ok()?.compose(&cayley_inv).ok()?;
        let h2 = MobiusMatrix::dilation(d, 1.0 / r)
            .ok()?
            .compose(&v)
            .ok()?
            .compose(g)
            .ok()?;
        Some((v, h2))
    };
    let mut params: Vec<f64> = hcenter[..d - 1]
        .iter()
        .cloned()
        .chain([lambda, r_mid])
        .collect();
    polish(&mut params, |p| build(p).map(|(_, h2)| h2));
    let (v, h2) = build(&params).ok_or(Error::BoundaryTouching)?;
    Ok(InteriorFactors { h1: v.inverse(), radius: params[d], h2 })
}

fn fit_ball(d: usize, pts: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    use nalgebra::DVector;
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
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or(Error::NotApplicable("degenerate sphere fit"))?;
    let center: Vec<f64> = (0..d).map(|i| sol[i]).collect();
    let r2 = sol[d] + center.iter().map(|v| v * v).sum::<f64>();
    if !(r2 > 0.0) {
        return Err(Error::NotApplicable("degenerate sphere fit"));
    }
    Ok((center, r2.sqrt()))
}

/// Big-cell factors `g = T(shift) D(scale) R K(sct)`.
pub struct GaussFactors {
    pub shift: Vec<f64>,
    pub scale: f64,
    pub rotation: DMatrix<f64>,
    pub sct: Vec<f64>,
}

impl GaussFactors {
    /// Rebuild the product.
    pub fn recompose(&self, d: usize) -> Result<MobiusMatrix> {
        let t = MobiusMatrix::translation(&self.shift);
        let dil = MobiusMatrix::dilation(d, self.scale)?;
        let rot = make_generator(Generator::Rotation(self.rotation.clone()), d)?;
        let k = make_generator(Generator::SpecialConformal(self.sct.clone()), d)?;
        t.compose(&dil)?.compose(&rot)?.compose(&k)
    }
}

/// Extract the big-cell factorization from the matrix blocks.
///
/// In the null basis the product `T(b) D(λ) R K(c)` has last row
/// `(-√2 cᵀ/λ, -|c|²/λ, 1/λ)` and last column `(√2 b/λ, -|b|²/λ, 1/λ)ᵀ`, so
/// the factors are read off directly; the element lies outside the big cell
/// exactly when its bottom-right entry vanishes (the origin maps to `∞`).
pub fn gauss_decompose(g: &MobiusMatrix) -> Result<GaussFactors> {
    let d = g.d;
    let s2 = std::f64::consts::SQRT_2;
    let m = &g.m;
    let corner = m[(d + 1, d + 1)];
    if corner.abs() < POLE_EPS || corner < 0.0 {
        return Err(Error::OutsideBigCell);
    }
    let scale = 1.0 / corner;
    let shift: Vec<f64> = (0..d).map(|i| m[(i, d + 1)] * scale / s2).collect();
    let sct: Vec<f64> = (0..d).map(|i| -m[(d + 1, i)] * scale / s2).collect();
    let mut rotation = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            rotation[(i, j)] = m[(i, j)] + 2.0 * shift[i] * sct[j] / scale;
        }
    }
    let resid = (rotation.transpose() * &rotation - DMatrix::identity(d, d)).amax();
    if resid > 1e-8 || rotation.determinant() < 0.0 {
        return Err(Error::OutsideBigCell);
    }
    Ok(GaussFactors { shift, scale, rotation, sct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::sampling::{random_interior, word_in_s};
    use crate::TOL_GROUP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_on_pure_factors() {
        let d = 3;
        let g = MobiusMatrix::dilation(d, 2.0).unwrap();
        let f = gauss_decompose(&g).unwrap();
        assert!((f.scale - 2.0).abs() < 1e-12);
        assert!(f.shift.iter().all(|v| v.abs() < 1e-12));
        assert!(f.sct.iter().all(|v| v.abs() < 1e-12));
        let g2 = MobiusMatrix::translation(&[0.4, 0.0, -0.2])
            .compose(&MobiusMatrix::dilation(d, 0.3).unwrap())
            .unwrap();
        let f2 = gauss_decompose(&g2).unwrap();
        assert!((f2.shift[0] - 0.4).abs() < 1e-12 && (f2.scale - 0.3).abs() < 1e-12);
        assert!((f2.recompose(d).unwrap().m - g2.m).amax() < TOL_GROUP);
    }

    #[test]
    fn gauss_roundtrip_random() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = word_in_s(&mut rng, d, 6);
            let f = gauss_decompose(&g).unwrap();
            let back = f.recompose(d).unwrap();
            assert!((&back.m - &g.m).amax() < TOL_GROUP);
            // shift is the image of the origin
            let b = g.act_finite(&vec![0.0; d]).unwrap();
            for (s, e) in f.shift.iter().zip(&b) {
                assert!((s - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gauss_outside_big_cell() {
        // the inversion sends 0 to ∞
        let inv = MobiusMatrix::inversion(3);
        assert!(matches!(gauss_decompose(&inv), Err(Error::OutsideBigCell)));
    }

    #[test]
    fn s_factorization_roundtrip() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tried = 0;
        while tried < 100 {
            let g = word_in_s(&mut rng, d, 6);
            if classify(&g) != Class::InSNotG {
                continue;
            }
            tried += 1;
            let f = decompose_s(&g).unwrap();
            assert_eq!(classify(&f.h), Class::InG, "stabilizer factor must fix the ball");
            let back = MobiusMatrix::translation(&f.center)
                .compose(&MobiusMatrix::dilation(d, f.radius).unwrap())
                .unwrap()
                .compose(&f.h)
                .unwrap();
            assert!((back.m - g.m).amax() < 1e-8, "recomposition residual too large");
        }
    }

    #[test]
    fn s_factorization_rejects_automorphisms() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = crate::mobius::sampling::random_rotation(&mut rng, d);
        let rot = make_generator(Generator::Rotation(r), d).unwrap();
        assert!(decompose_s(&rot).is_err());
    }

    #[test]
    fn interior_factorization_roundtrip() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let g = random_interior(&mut rng, d, 0.02);
            let f = decompose_interior(&g).unwrap();
            assert_eq!(classify(&f.h1), Class::InG);
            assert_eq!(classify(&f.h2), Class::InG);
            assert!(f.radius > 0.0 && f.radius < 1.0);
            let back = f
                .h1
                .compose(&MobiusMatrix::dilation(d, f.radius).unwrap())
                .unwrap()
                .compose(&f.h2)
                .unwrap();
            assert!((&back.m - &g.m).amax() < 1e-7, "residual {}", (&back.m - &g.m).amax());
        }
    }

    #[test]
    fn interior_rejects_tangent_image() {
        // image ball internally tangent: T_{(1-r,0,0)} D(r)
        let d = 3;
        let r = 0.3;
        let g = MobiusMatrix::translation(&[1.0 - r, 0.0, 0.0])
            .compose(&MobiusMatrix::dilation(d, r).unwrap())
            .unwrap();
        assert!(matches!(decompose_interior(&g), Err(Error::BoundaryTouching)));
    }

    #[test]
    fn pure_dilation_interior_factors() {
        let d = 3;
        let g = MobiusMatrix::dilation(d, 0.4).unwrap();
        let f = decompose_interior(&g).unwrap();
        assert!((f.radius - 0.4).abs() < 1e-9);
    }
}
