//! Simulation and estimation toolkit for the co-integrated volatility of
//! bivariate Lévy processes.
//!
//! The core modules are generic over the scalar type through [`num::Real`]
//! (any `f32`/`f64`-like float); concrete `f64` aliases live at the crate
//! root for everyday use.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod model;
pub mod num;
pub mod quad;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use estimators::{
    combine_ecf, ecf, frequency_rule, realized_covariance, spectral_estimate, trc_estimate,
    EcfValue,
    SpectralConfig, SpectralEstimate, TrcConfig,
};
pub use harness::{
    deterministic_error_diagnostic, fit_rate, run_experiment, BenchmarkReport, CellStats,
    DeterministicErrorDiagnostic, EstimatorConfig, ExperimentPlan, RateFit, RateTarget,
    RawEstimate,
};
pub use model::{
    check_class_membership, cojump_exponent, cojump_integral, dependence_graph,
    harmonic_mean_bound, BrownianSpec, ClassParams, CojumpIntegral, LevyModelSpec,
    MembershipReport, StableJumpSpec,
};
pub use num::Real;
pub use rng::{derive_stream, StreamTag};
pub use simulate::{
    simulate_path, JumpEvent, JumpKind, PathSample, SimulationConfig, SmallJumpPolicy,
};

/// Concrete `f64` aliases for the generic core types.
pub type Model = model::LevyModelSpec<f64>;
pub type Brownian = model::BrownianSpec<f64>;
pub type StableJumps = model::StableJumpSpec<f64>;
pub type Path = simulate::PathSample<f64>;
pub type SimConfig = simulate::SimulationConfig<f64>;
pub type Plan = harness::ExperimentPlan<f64>;
pub type Estimator = harness::EstimatorConfig<f64>;

/// `f32` aliases for callers trading precision for footprint.
pub type ModelF32 = model::LevyModelSpec<f32>;
pub type PathF32 = simulate::PathSample<f32>;
