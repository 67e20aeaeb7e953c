//! Finite-element discretization of the second-order action on composite
//! fluid–solid meshes.

mod action;
mod assemble;
mod dofmap;
mod eigen;
mod element;
mod evolve;
mod hydrostatic;
mod mesh;
mod model;
mod residuals;

pub use action::{action_value, expansion_check, frechet_fd_check, nonlinear_action, surface_form_pair, ActionTerms, ExpansionReport, FrechetReport};
pub use assemble::{assemble, nodal_vector, SystemMatrices};
pub use dofmap::{tangent_frame, DofMap, PhiDof, SlipNode};
pub use eigen::{eigenmodes, EigenModes};
pub use element::{cell_quadrature, face_quadrature, reference_shape, shape_at, FaceQuadPoint, QuadPoint};
pub use evolve::{evolve, Newmark, Trajectory};
pub use hydrostatic::{hydrostatic_assemble, HydrostaticReport};
pub use mesh::{Cell, CellKind, CompositeMesh, Face, FaceTag, Region, RegionKind, SplitPair};
pub use model::{Background, Density, EarthModel, ForcePotential, Material, PrestressField, ScalarFn, TensorFn, VectorFn};
pub use residuals::{interface_residuals, InterfaceReport, ResidualNorm};
pub(crate) use residuals::locate;
