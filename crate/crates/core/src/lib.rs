//! Numerical pluripotential theory on polynomial hypersurface germs.
//!
//! The crate computes Lelong numbers of plurisubharmonic functions restricted
//! to a hypersurface `A = {P = 0}` near a point, the fiber transforms
//! `φ_aver` / `φ_max` attached to a ramified covering `A → base`, local
//! multiplicities, projective masses and monodromy-based irreducibility
//! verdicts.
//!
//! Modules, bottom-up:
//! - [`poly`]: sparse polynomials, root solving, root continuation;
//! - [`variety`]: hypersurface charts and their fibers;
//! - [`pshfun`]: psh expression trees and fiber transforms;
//! - [`monodromy`]: sheet permutations around loops on base lines;
//! - [`lelong`]: slope estimators built on the layers above;
//! - [`verify`]: bundled verification suites.

pub mod error;
pub mod lelong;
pub mod monodromy;
pub mod par;
pub mod poly;
pub mod pshfun;
pub mod rng;
pub mod serde_ext;
pub mod variety;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Euclidean norm of a complex vector.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
