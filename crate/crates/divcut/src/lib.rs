#![forbid(unsafe_code)]

//! Exact joint inference of M diverse low-energy labelings for binary
//! submodular pairwise MRFs.
//!
//! For a concave node-wise diversity measure, the joint objective
//! `sum_m E(y^m) - lambda * Delta^M({y})` decouples into M independent
//! minimizations of `E(y) + gamma^m * sum_v y_v` with a closed-form schedule
//! `gamma^m = lambda * (delta(m) - delta(m-1))`, each solved by one min-cut.
//! The returned tuples are nested and globally optimal; exhaustive oracles
//! certify this on small instances.

pub mod diversity;
pub mod energy;
pub mod error;
pub mod fixed;
pub mod instance;
pub mod maxflow;
pub mod oracle;
pub mod reduction;
pub mod report;
pub mod solver;

pub use diversity::{DiversityMeasure, GammaSchedule, MeasureKind};
pub use energy::{EnergyModel, Labeling, LabelingTuple};
pub use error::{Error, Result};
pub use fixed::Scale;
pub use maxflow::{CutResult, ExtremalCut, FlowNetwork, NetworkSpec};
pub use reduction::{ReductionMap, Which};
pub use solver::{DiverseSolution, Strategy};
