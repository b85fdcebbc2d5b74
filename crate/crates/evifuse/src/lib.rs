//! Conflict-aware evidential fusion.
//!
//! Classifier heads emit non-negative *evidence* per class; evidence
//! parameterizes a Dirichlet distribution, which normalizes into an
//! *opinion* — per-class belief masses plus an explicit uncertainty mass.
//! Opinions from different views are combined by a conflict-aware operator
//! that measures how much two opinions disagree and lets consistent views
//! compound confidence while conflicting views erode it.
//!
//! The crate provides:
//!
//! * [`opinion`] — evidence / Dirichlet / opinion types and conversions;
//! * [`fusion`] — the conflict metric, pairwise and n-ary conflict-aware
//!   fusion, and baseline strategies for ablations;
//! * [`mapping`] — coarse-to-fine evidence redistribution for the
//!   W/NREM/REM vs W/N1/N2/N3/REM class hierarchies;
//! * [`specfn`] — log-gamma, digamma, trigamma;
//! * [`loss`] — evidential training losses, annealing, analytic gradients;
//! * [`toymodel`] — a synthetic two-view dataset generator and a small
//!   deterministic trainer for linear softplus evidence heads;
//! * [`harness`] — metrics, conflict statistics, CSV ingestion, and the
//!   reproducible experiment runner behind the `evifuse` CLI.

pub mod error;
pub mod fusion;
pub mod harness;
pub mod loss;
pub mod mapping;
pub mod opinion;
pub mod specfn;
pub mod toymodel;

pub use error::{Error, Result};
pub use fusion::{
    average_fuse, cmam_fuse_many, cmam_fuse_pair, conflict_degree, predicted_class,
    ConflictDegree, FusionStrategy,
};
pub use opinion::{
    dirichlet_to_opinion, evidence_to_dirichlet, opinion_to_dirichlet, DirichletParams, Evidence,
    Opinion,
};
