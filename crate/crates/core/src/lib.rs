//! Numerical construction and verification toolkit for closed self-shrinkers
//! of mean curvature flow, working at the level of their profile curves:
//! geodesic shooting in the weighted half-plane and quadrant, a modified
//! curve shortening flow converging to closed geodesics, and conservation-law
//! checks for planar self-shrinking curves.

pub mod curve;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod search;

pub mod ode;

pub mod birotational;
pub mod csf;
pub mod planar;
pub mod shooting;

pub mod testutil;

pub use error::{Error, Result, SweepSample};
pub use geometry::{MetricKind, MetricSpec, Point, DEFAULT_SHRINK_COEFF};
pub use ode::{
    integrate, EventDirection, EventKind, EventRecord, EventSpec, IntegrateOptions, ProfileState,
    Terminal, Trajectory,
};
pub use search::{Classification, SearchResult, SymmetryAxis};
