//! Symbolic computation with finite-dimensional path algebras: module
//! skeleta, the polynomial equations of their Grassmannian charts, explicit
//! module realizations, and unipotent degenerations as limits of
//! one-parameter curves.
//!
//! All arithmetic is exact, over arbitrary-precision rationals.

pub mod algebra;
pub mod cancel;
pub mod degeneration;
pub mod equations;
pub mod layering;
pub mod linalg;
pub mod quiver;
pub mod realize;
pub mod scalar;
pub mod skeleta;

pub use algebra::{AlgebraPresentation, ModuleRealization, Relation, TruncatedModule};
pub use cancel::CancelToken;
pub use degeneration::{RationalFunction, SubspaceFamily, UnipotentCurve};
pub use equations::{FreeElement, GrassIdeal, Monomial, Polynomial};
pub use layering::{DimensionVector, SemisimpleSequence};
pub use linalg::Matrix;
pub use quiver::{ArrowId, ModPath, Path, Quiver, VertexId};
pub use realize::{PointData, SubmodulePresentation};
pub use skeleta::{CriticalData, ProjectiveContext, Setting, Skeleton};
pub use scalar::Rational;
