//! Exact polynomial algebra, harmonic analysis and graded bases.

pub mod basis;
pub mod gegenbauer;
pub mod green;
pub mod multi_index;
pub mod ops;
pub mod poly;
pub mod poly_f64;

pub use basis::{build_basis, load_or_build, GradedHarmonicBasis};
pub use gegenbauer::{gegenbauer, gegenbauer_at_one, gegenbauer_coeffs};
pub use green::{GreenTable, RadialForm};
pub use multi_index::MultiIndex;
pub use ops::{
    act_twisted, dim_harm, fisher_inner, h_inner, kelvin_dual, project_harmonic,
    raise_polynomial, raising_table, zonal, SoGenerator,
};
pub use poly::Poly;
pub use poly_f64::PolyF64;
