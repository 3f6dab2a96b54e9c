//! Run configuration and the JSON wire formats of queries.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use confdisk_core::fock::FockVector;
use confdisk_core::mobius::{make_generator, Generator, MobiusMatrix};
use confdisk_core::rkhs::{e_vector, Truncation};

/// Common knobs: every command accepts these flags; a config file, when
/// given, overrides them field by field.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Ambient dimension (at least 3).
    #[arg(long = "dim", default_value_t = 3)]
    pub dim: usize,
    /// One-particle degree cutoff.
    #[arg(long = "degree", default_value_t = 10)]
    pub degree: u32,
    /// Particle-number cutoff of the symmetric algebra.
    #[arg(long = "particles", default_value_t = 4)]
    pub particles: usize,
    /// Tolerance scale for pass/fail decisions where one applies.
    #[arg(long = "tol", default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for all sampling.
    #[arg(long = "seed", default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
    /// JSON config file; fields present in it override the flags.
    #[arg(long = "config")]
    pub config: Option<PathBuf>,
}

/// File form of the common knobs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunConfigFile {
    pub dim: Option<usize>,
    pub degree: Option<u32>,
    pub particles: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
}

/// Resolved configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub degree: u32,
    pub particles: usize,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file: RunConfigFile = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => RunConfigFile::default(),
        };
        let cfg = RunConfig {
            dim: file.dim.unwrap_or(args.dim),
            degree: file.degree.unwrap_or(args.degree),
            particles: file.particles.unwrap_or(args.particles),
            tol: file.tol.unwrap_or(args.tol),
            seed: file.seed.unwrap_or(args.seed),
            samples: file.samples.unwrap_or(200),
            out: file.out.or_else(|| args.out.clone()),
        };
        if cfg.dim < 3 {
            bail!("unsupported dimension {} (must be at least 3)", cfg.dim);
        }
        Ok(cfg)
    }

    /// Write a string to the output target.
    pub fn emit(&self, payload: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, payload)
                .with_context(|| format!("writing {}", path.display())),
            None => {
                println!("{payload}");
                Ok(())
            }
        }
    }
}

/// One factor of a group-element word.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordFactor {
    Translation { a: Vec<f64> },
    Dilation { lambda: f64 },
    Rotation { matrix: Vec<Vec<f64>> },
    SpecialConformal { c: Vec<f64> },
    Inversion,
    Cayley,
}

/// Build a matrix from a word (leftmost factor acts last).
pub fn element_from_word(word: &[WordFactor], d: usize) -> Result<MobiusMatrix> {
    let mut acc = MobiusMatrix::identity(d);
    for f in word {
        let gen = match f {
            WordFactor::Translation { a } => Generator::Translation(a.clone()),
            WordFactor::Dilation { lambda } => Generator::Dilation(*lambda),
            WordFactor::Rotation { matrix } => {
                let rows = matrix.len();
                let flat: Vec<f64> = matrix.iter().flatten().cloned().collect();
                Generator::Rotation(nalgebra_matrix(rows, &flat)?)
            }
            WordFactor::SpecialConformal { c } => Generator::SpecialConformal(c.clone()),
            WordFactor::Inversion => Generator::Inversion,
            WordFactor::Cayley => Generator::Cayley,
        };
        acc = acc
            .compose(&make_generator(gen, d).map_err(|e| anyhow::anyhow!("bad factor: {e}"))?)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
    }
    Ok(acc)
}

fn nalgebra_matrix(rows: usize, flat: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
    if flat.len() != rows * rows {
        bail!("rotation matrix must be square");
    }
    Ok(nalgebra::DMatrix::from_row_slice(rows, rows, flat))
}

/// Input-vector specification of a correlator query.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VectorSpec {
    /// The vacuum.
    Vacuum,
    /// Single particle in the orthonormal one-particle basis.
    Particle { degree: u32, index: usize },
    /// Multi-particle basis multiset, entries as (degree, index) pairs.
    Particles { items: Vec<(u32, usize)> },
    /// Truncated evaluation vector at a point of the open unit ball.
    Point { a: Vec<f64> },
}

impl VectorSpec {
    pub fn build(&self, t: &Truncation) -> Result<FockVector> {
        Ok(match self {
            VectorSpec::Vacuum => FockVector::vacuum(),
            VectorSpec::Particle { degree, index } => {
                FockVector::single(flat_index(t, *degree, *index)?)
            }
            VectorSpec::Particles { items } => {
                let mut idx: Vec<u16> = items
                    .iter()
                    .map(|(n, l)| flat_index(t, *n, *l))
                    .collect::<Result<_>>()?;
                idx.sort_unstable();
                FockVector::from_multiset(idx)
            }
            VectorSpec::Point { a } => {
                let hv = e_vector(a, t).map_err(|e| anyhow::anyhow!("{e}"))?;
                let mut out = FockVector::zero();
                for (i, c) in hv.coords.iter().enumerate() {
                    if *c != 0.0 {
                        out.add_term(vec![i as u16], *c);
                    }
                }
                out
            }
        })
    }

    /// True when the vector is a single particle (eligible for the
    /// matching-sum cross-check).
    pub fn particle_index(&self, t: &Truncation) -> Option<u16> {
        match self {
            VectorSpec::Particle { degree, index } => flat_index(t, *degree, *index).ok(),
            _ => None,
        }
    }
}

fn flat_index(t: &Truncation, degree: u32, index: usize) -> Result<u16> {
    if degree > t.n_max() {
        bail!("degree {degree} exceeds the cutoff {}", t.n_max());
    }
    let range = t.block(degree);
    if index >= range.len() {
        bail!("index {index} out of range for degree {degree}");
    }
    Ok((range.start + index) as u16)
}

/// A correlator query: a configuration of words plus one input per slot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NpointQuery {
    pub config: Vec<Vec<WordFactor>>,
    pub inputs: Vec<VectorSpec>,
}

/// Query file: a list of queries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NpointFile {
    pub queries: Vec<NpointQuery>,
}

/// Sphere-state input: configuration words plus inputs plus probe count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereFile {
    pub config: Vec<Vec<WordFactor>>,
    pub inputs: Vec<VectorSpec>,
    /// Number of random conformal transports for the invariance residual.
    #[serde(default = "default_probes")]
    pub invariance_probes: usize,
}

fn default_probes() -> usize {
    8
}

/// Deterministic hex digest of a serializable payload (64-bit FNV-1a).
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1_0000_0000_01b3);
    }
    format!("{h:016x}")
}
