//! Numerical verification toolkit for curvature integrals and normal-speed
//! flows of star-shaped hypersurfaces in warped product manifolds.
//!
//! The crate certifies Heintze-Karcher type inequalities, Minkowski-type
//! integral identities and their equality (rigidity) cases on discretized
//! radial graphs over S^1 and S^2, in space forms and in custom sub-static
//! warped products with a horizon.

pub mod error;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod integrals;
mod par;
pub mod quadrature;
pub mod report;
pub mod surface;
pub mod symfunc;
pub mod warped;

pub use error::{Result, WarpError};
pub use geometry::{compute_geometry, compute_geometry_embedded, compute_geometry_seq, GeometrySample};
pub use grid::{Grid, GridSpec};
pub use report::{FunctionalReport, Verdict};
pub use surface::{RadialGraph, SurfaceShape};
pub use symfunc::{ConeReport, Spectrum};
pub use warped::{ManifoldKind, WarpSample, WarpedProduct};
