//! Seeded random elements for tests and verification sweeps.
//!
//! Words of bounded length in the four chart generators, with parameters in
//! ranges that keep every image far from the poles: translations and
//! special-conformal parameters of norm at most 0.5, dilation factors in
//! [0.5, 2].

use nalgebra::DMatrix;
use rand::Rng;

use super::geometry::{classify, image_ball, BallRegion, Class};
use super::{make_generator, Generator, MobiusMatrix};

/// Haar-ish random special orthogonal matrix via QR of a Gaussian sample.
pub fn random_rotation<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(d, d, |_, _| standard_normal(rng));
        let qr = a.qr();
        let mut q = qr.q();
        let r = qr.r();
        // fix the sign convention so the distribution is uniform
        for i in 0..d {
            if r[(i, i)] < 0.0 {
                for k in 0..d {
                    q[(k, i)] = -q[(k, i)];
                }
            }
        }
        if q.determinant() < 0.0 {
            for k in 0..d {
                q[(k, 0)] = -q[(k, 0)];
            }
        }
        if (q.transpose() * &q - DMatrix::identity(d, d)).amax() < 1e-12 {
            return q;
        }
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; avoids an extra dependency in the hot path.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn ball_vector<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-max_norm..max_norm)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= max_norm * max_norm {
            return v;
        }
    }
}

/// Random word of the given length in all four generator kinds.
pub fn random_word<R: Rng>(rng: &mut R, d: usize, len: usize) -> MobiusMatrix {
    let mut acc = MobiusMatrix::identity(d);
    for _ in 0..len {
        let gen = match rng.gen_range(0..4) {
            0 => Generator::Translation(ball_vector(rng, d, 0.5)),
            1 => Generator::Dilation(rng.gen_range(0.5..2.0)),
            2 => Generator::Rotation(random_rotation(rng, d)),
            _ => Generator::SpecialConformal(ball_vector(rng, d, 0.5)),
        };
        acc = acc
            .compose(&make_generator(gen, d).expect("bounded parameters are valid"))
            .expect("same dimension");
    }
    acc
}

/// Random ball contraction: words filtered by classification.
pub fn word_in_s<R: Rng>(rng: &mut R, d: usize, max_len: usize) -> MobiusMatrix {
    loop {
        let len = rng.gen_range(1..=max_len);
        let g = random_word(rng, d, len);
        if classify(&g) != Class::NotInS {
            return g;
        }
    }
}

/// Random strict contraction whose closed image stays well inside the ball.
pub fn random_interior<R: Rng>(rng: &mut R, d: usize, margin: f64) -> MobiusMatrix {
    loop {
        let g = word_in_s(rng, d, 6);
        if classify(&g) != Class::InSNotG {
            continue;
        }
        if let BallRegion::Ball { center, radius } = image_ball(&g) {
            let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
            if c + radius < 1.0 - margin {
                return g;
            }
        }
    }
}

/// Random ball automorphism: rotations mixed with half-space isometries
/// conjugated back to the ball.
pub fn random_in_g<R: Rng>(rng: &mut R, d: usize, len: usize) -> MobiusMatrix {
    let cayley = make_generator(Generator::Cayley, d).expect("valid dimension");
    let cayley_inv = cayley.inverse();
    let mut acc = MobiusMatrix::identity(d);
    for _ in 0..len {
        let factor = match rng.gen_range(0..3) {
            0 => make_generator(Generator::Rotation(random_rotation(rng, d)), d).unwrap(),
            1 => {
                let mut t = ball_vector(rng, d, 0.4);
                t[d - 1] = 0.0;
                let w = MobiusMatrix::translation(&t);
                cayley.compose(&w).unwrap().compose(&cayley_inv).unwrap()
            }
            _ => {
                let w = MobiusMatrix::dilation(d, rng.gen_range(0.6..1.6)).unwrap();
                cayley.compose(&w).unwrap().compose(&cayley_inv).unwrap()
            }
        };
        acc = acc.compose(&factor).unwrap();
    }
    acc
}

/// Random orientation-preserving conformal transformation of the sphere
/// (unconstrained word, any image geometry).
pub fn random_conformal<R: Rng>(rng: &mut R, d: usize, len: usize) -> MobiusMatrix {
    random_word(rng, d, len)
}
