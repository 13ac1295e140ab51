//! Numerical toolkit for the curvature operator of the second kind.
//!
//! Algebraic curvature tensors are stored as symmetric matrices on the
//! lexicographic `Λ²` basis with the sign convention `R̊ = id` on the unit sphere.

pub mod bochner;
pub mod claims;
pub mod cones;
pub mod curvature;
pub mod error;
pub mod harness;
pub mod implications;
pub mod io;
pub mod kahler;
pub mod models;
pub mod sampling;
pub mod tensor_space;
pub mod tol;

pub use claims::{ClaimId, ClaimStatus};
pub use cones::{cone_margin, cone_membership, ConeClass, ConeParams, ConeVerdict};
pub use curvature::{induce_second_kind, AlgebraicCurvature, Frame, SecondKindOperator};
pub use error::{Error, Result};
pub use harness::{run, CampaignReport, Command, PropGroup, RunConfig, ThresholdTable, Tolerances};
pub use implications::{ImplicationReport, Verdict};
pub use io::{TensorFile, TensorSource};
pub use kahler::ComplexStructure;
pub use models::ModelSpec;
pub use sampling::FrameSearch;
pub use tensor_space::{Dim, SymTensor2, TracelessSymTensor2, TwoForm};
