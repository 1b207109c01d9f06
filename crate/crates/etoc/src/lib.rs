//! Event-triggered optimal output consensus for heterogeneous linear
//! multi-agent systems.
//!
//! The library couples a distributed optimal signal generator (which steers
//! local estimates toward the minimizer of a sum of convex costs over a
//! digraph) with per-agent output-regulation controllers, under event-triggered
//! control updates and event-triggered communication. It provides:
//!
//! - [`graph`]: weighted digraphs, Laplacian spectra, connectivity checks;
//! - [`costs`]: builtin cost functions, curvature bounds, the centralized
//!   optimum oracle;
//! - [`plant`]: agent models, regulator equations, gain synthesis, Lyapunov
//!   certificates;
//! - [`generator`]: the distributed optimal signal generator and its
//!   parameter recommendations;
//! - [`trigger`]: both triggering rules and the closed-loop parameter
//!   validation report;
//! - [`engine`]: the multi-rate fixed-step closed-loop simulator;
//! - [`analysis`]: inter-event statistics, convergence radii, rate fits, and
//!   the Lyapunov diagnostic along trajectories;
//! - [`scenario`]: TOML scenario files, validation, and the bundled
//!   four-agent reference scenario.

pub mod analysis;
pub mod costs;
pub mod engine;
pub mod generator;
pub mod graph;
pub mod plant;
pub mod scenario;
pub mod trigger;

pub use costs::{CostEnsemble, CostFunction};
pub use graph::WeightedDigraph;
