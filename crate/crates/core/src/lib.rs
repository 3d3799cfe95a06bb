//! Numerical tools for comparing lattice distances with norms of vector
//! functionals restricted to operator algebras.

pub mod algebra;
pub mod error;
pub mod funcnorm;
pub mod halmos;
pub mod lattice;
pub mod linalg;
pub mod problem;
pub mod random;
pub mod report;
pub mod scalar;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = linalg::Complex<f64>;
pub type CMatrix = linalg::CMat<f64>;
pub type CVector = linalg::CVec<f64>;
pub type Tolerances = linalg::Tolerances<f64>;
pub type Projection = lattice::Projection<f64>;
pub type SubspaceLattice = lattice::SubspaceLattice<f64>;
pub type AlgebraModel = algebra::AlgebraModel<f64>;
pub type HalmosModel = halmos::HalmosModel<f64>;
pub type NormResult = funcnorm::NormResult<f64>;
pub type VGapReport = verify::VGapReport<f64>;
pub type SplitData = witness::SplitData<f64>;
