//! Adaptive-momentum extragradient optimization for stochastic min-max games.
//!
//! The crate is organized around a handful of modules:
//!
//! - [`optim`]: the ADAM³ state machine (extragradient half-step, momentum,
//!   β₃-decayed second-moment scaler).
//! - [`baselines`]: simultaneous Adam and optimistic AdaGrad.
//! - [`games`]: the [`Game`] abstraction plus the quadratic and bilinear
//!   instances used for experiments.
//! - [`theory`]: step-size, momentum cap and sample-size calculators.
//! - [`diagnostics`]: e_k / R_k metrics, finite-difference checks and
//!   trajectory audits.
//! - [`runner`]: seeded experiment driver producing traces.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the experiment
//! driver and CLI use.

// NaN must fail the `!(x > 0)` guards; coordinate loops index several vectors.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod diagnostics;
mod error;
pub mod games;
pub mod hyper;
pub mod optim;
pub mod point;
pub mod rng;
pub mod runner;
mod scalar;
pub mod theory;
pub(crate) mod vecops;

pub use baselines::{OAdagradState, SAdamState};
pub use diagnostics::{AuditReport, CheckStatus, TraceRecord};
pub use error::{Error, Result};
pub use games::{BilinearGame, FnGame, Game, QuadraticGame, QuadraticGameParams};
pub use hyper::HyperParams;
pub use optim::OptimizerState;
pub use point::Point;
pub use runner::{Method, RunFailure, RunOptions, RunOutput, StateRetention};
pub use scalar::Scalar;
pub use theory::{AssumptionConstants, SfneReport, SfneVerdict};

pub type Point64 = Point<f64>;
pub type HyperParams64 = HyperParams<f64>;
pub type OptimizerState64 = OptimizerState<f64>;
pub type SAdamState64 = SAdamState<f64>;
pub type OAdagradState64 = OAdagradState<f64>;
pub type TraceRecord64 = TraceRecord<f64>;
pub type QuadraticGame64 = QuadraticGame<f64>;
pub type BilinearGame64 = BilinearGame<f64>;
pub type AssumptionConstants64 = AssumptionConstants<f64>;
pub type RunOutput64 = RunOutput<f64>;

pub type Point32 = Point<f32>;
pub type HyperParams32 = HyperParams<f32>;
pub type OptimizerState32 = OptimizerState<f32>;
