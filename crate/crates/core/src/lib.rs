pub mod action;
pub mod biquat;
pub mod error;
pub mod hypersurface;
pub mod kinematics;
pub mod lwfield;
pub mod quadrature;
pub mod regint;

pub use action::{ActionInputs, ActionReport, Estimate, Term, TubeGeometry};
pub use biquat::{Biquaternion, FourVector, SixVector};
pub use error::{Error, Result};
pub use hypersurface::{QuadratureScheme, SurfaceElement, SurfacePatch};
pub use kinematics::{RetardedFrame, Worldline, WorldlineFamily};
pub use lwfield::{ExternalField, SingularityField};
pub use num_complex::Complex64;
