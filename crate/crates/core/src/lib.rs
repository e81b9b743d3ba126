//! Learning control policies for systems with unknown stochastic dynamics
//! so that they satisfy signal temporal logic (STL) specifications.
//!
//! The crate is organised bottom-up:
//!
//! * [`stl`] parses the STL fragment `F[0,T) psi | G[0,T) psi`, computes
//!   horizon lengths, Boolean satisfaction and robustness degrees of
//!   discrete-time signals.
//! * [`gridworld`] simulates a noisy Dubins-style robot on a partitioned
//!   rectangular workspace and exposes the partition's quotient graph.
//! * [`tau_mdp`] builds the MDP whose states are length-`tau` histories of
//!   partition regions, classifies those states against the inner formula
//!   and computes signed graph distances to the satisfying set.
//! * [`learning`] implements batch Q-learning for the max-probability and
//!   max-robustness objectives, together with a finite-horizon value
//!   iteration oracle and the contraction operator used to check it.
//! * [`experiment`] ties everything to configuration files, persisted
//!   artifacts and Monte-Carlo evaluation; the `stlq` binary is a thin
//!   wrapper around it.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the
//! experiment layer uses.

pub mod experiment;
pub mod gridworld;
pub mod learning;
mod scalar;
pub mod stl;
pub mod tau_mdp;

pub use scalar::Scalar;

pub type Formula64 = stl::Formula<f64>;
pub type Predicate64 = stl::Predicate<f64>;
pub type Signal64 = stl::Signal<f64>;
pub type Layout64 = gridworld::WorkspaceLayout<f64>;
pub type Noise64 = gridworld::NoiseModel<f64>;
pub type RobotState64 = gridworld::RobotState<f64>;
pub type QTable64 = learning::QTable<f64>;
pub type ExplicitModel64 = tau_mdp::ExplicitModel<f64>;

pub type Formula32 = stl::Formula<f32>;
pub type Signal32 = stl::Signal<f32>;
pub type QTable32 = learning::QTable<f32>;
