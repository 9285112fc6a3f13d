//! Volume-preserving nonhomogeneous Gauss curvature flow of convex radial
//! graphs in hyperbolic space `H^{n+1}`, for curves (`n = 1`) and
//! axisymmetric surfaces (`n = 2`).
//!
//! ```
//! use gaussflow::{EngineConfig, FlowEngine, RadialGraph, SpeedFunction, SphereGrid};
//!
//! let grid = SphereGrid::circle(64)?;
//! let graph = RadialGraph::from_fn(grid, |t| 1.0 + 0.05 * (2.0 * t).cos())?;
//! let engine = FlowEngine::new(SpeedFunction::power(1.0)?, EngineConfig::default())?;
//! let mut state = engine.init(graph)?;
//! for _ in 0..10 {
//!     state = engine.step(&state)?;
//! }
//! assert!(state.fields.kappa_min() > 0.0);
//! # Ok::<(), gaussflow::Error>(())
//! ```

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod graph;
pub mod grid;
pub mod hyperboloid;
pub mod io;
pub mod quermass;
pub mod shapes;
pub mod speed;

pub use config::RunConfig;
pub use diagnostics::{fit_rate, fit_sphere, predicted_rate, record, DiagnosticsRecord, SphereFit};
pub use error::{Error, Result};
pub use flow::{EngineConfig, FlowEngine, FlowState, RunOutcome, RunStatus};
pub use geometry::{compute_geometry, convexity_class, ConvexityClass, GeometryFields};
pub use graph::RadialGraph;
pub use grid::{GridKind, SphereGrid};
pub use quermass::{enclosed_volume, quermassintegrals, QuermassVector};
pub use shapes::{make_shape, ShapeSpec};
pub use speed::{validate_assumption, AssumptionReport, SpeedFamily, SpeedFunction};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/speed.md")]
    mod speed {}
    #[doc = include_str!("../../../book/src/quermass.md")]
    mod quermass {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
