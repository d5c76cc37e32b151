//! Correlation games: symmetric 2x2 bi-matrix games whose payoffs are
//! re-expressed through measurement correlations on shared particle pairs.
//!
//! The library covers the full pipeline:
//!
//! - [`geometry`] — unit directions, spherical parameterization, uniform
//!   sampling;
//! - [`game`] — classical symmetric 2x2 games, bilinear mixed payoffs, and
//!   exact Nash enumeration;
//! - [`sources`] — analytic quantum / hidden-variable correlation laws and
//!   Monte Carlo measurement sessions;
//! - [`bell`] — the epsilon/sigma quantities, Bell-inequality checks, the
//!   correlation-to-(p, q) map, correlation-form payoffs, and the
//!   violating-regime re-expression;
//! - [`equilibrium`] — directional best responses, equilibrium search and
//!   certification, attainable-region scans, and the Prisoners' Dilemma
//!   demonstration;
//! - [`cli`] — the command-line front end with reproducible CSV/JSON
//!   artifacts.

pub mod bell;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod geometry;
pub mod sources;

pub use bell::{
    bell_check, correlation_payoffs, epsilon_sigma, pq_map, reexpress,
    symmetric_reconstruction_possible, BellCheck, BellConvention, CorrelationTriple, EpsilonSigma,
    PqPair, ReexpressedCoefficients,
};
pub use equilibrium::{
    best_response, certify, directional_payoffs, directions_for_pq, ne_search,
    pd_disappearance_experiment, region_scan, region_summary, triple_of, BestResponse,
    DirectionalProfile, EquilibriumCertificate, NeSearchResult, PdDemoReport, Player,
    QuantumRecheck, RegionSample, RegionScan, RegionSummary,
};
pub use error::{Error, Result};
pub use game::{
    classical_nash, pd_nash_inequalities, ClassicalNash, MixedProfile, PayoffCoefficients,
    SymmetricGame,
};
pub use geometry::{angle_between, sample_uniform_direction, Direction, SphericalAngles};
pub use sources::{
    analytic_correlation, estimate_triple, sample_outcomes, simulate_session, EstimatedTriple,
    MeasurementAxis, MeasurementRecord, SessionTally, SettingPair, SourceKind,
};
