//! Pair sources: analytic correlation laws for quantum and local
//! hidden-variable models, plus Monte Carlo simulation of the
//! equal-probability two-setting measurement protocol.
//!
//! Each simulated pair is measured once per side. A player measures along
//! their own move direction or along the shared axis, chosen independently
//! with probability one half, so a session populates four setting-pair
//! buckets from which the three correlations (and a same-axis calibration)
//! are estimated.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, sample_uniform_direction, Direction};

/// Pairs per deterministic generator stream. The stream layout depends only
/// on the seed and the pair count, never on how many workers process the
/// batches, so merged tallies are identical for any worker count.
const BATCH_PAIRS: u64 = 4096;

/// The statistical model generating outcome pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceKind {
    /// Quantum pair with `E(a, b) = a . b`: same-axis outcomes always agree.
    QuantumCorrelated,
    /// Quantum pair with `E(a, b) = -a . b` (singlet-like): same-axis
    /// outcomes always disagree.
    QuantumAnticorrelated,
    /// Shared hidden direction, both sides report its hemisphere:
    /// `E(a, b) = 1 - 2*theta/pi`.
    LhvCorrelated,
    /// Shared hidden direction with one side flipped:
    /// `E(a, b) = -1 + 2*theta/pi`.
    LhvAnticorrelated,
}

impl SourceKind {
    pub const ALL: [SourceKind; 4] = [
        SourceKind::QuantumCorrelated,
        SourceKind::QuantumAnticorrelated,
        SourceKind::LhvCorrelated,
        SourceKind::LhvAnticorrelated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::QuantumCorrelated => "quantum",
            SourceKind::QuantumAnticorrelated => "quantum-anti",
            SourceKind::LhvCorrelated => "lhv",
            SourceKind::LhvAnticorrelated => "lhv-anti",
        }
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(SourceKind::QuantumCorrelated),
            "quantum-anti" => Ok(SourceKind::QuantumAnticorrelated),
            "lhv" => Ok(SourceKind::LhvCorrelated),
            "lhv-anti" => Ok(SourceKind::LhvAnticorrelated),
            other => Err(Error::InvalidFlag {
                flag: "--source",
                message: format!(
                    "unknown source '{other}' (expected quantum, quantum-anti, lhv, lhv-anti)"
                ),
            }),
        }
    }
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which of a player's two available directions a measurement used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementAxis {
    /// The player's own move direction.
    Move,
    /// The shared z-axis.
    Shared,
}

/// One measured pair: the chosen axes and the two dichotomic outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub alice_axis: MeasurementAxis,
    pub bob_axis: MeasurementAxis,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
}

/// The four setting-pair buckets of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SettingPair {
    AlphaBeta,
    AlphaZ,
    ZBeta,
    ZZ,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair::AlphaBeta,
        SettingPair::AlphaZ,
        SettingPair::ZBeta,
        SettingPair::ZZ,
    ];

    pub fn of(alice: MeasurementAxis, bob: MeasurementAxis) -> Self {
        match (alice, bob) {
            (MeasurementAxis::Move, MeasurementAxis::Move) => SettingPair::AlphaBeta,
            (MeasurementAxis::Move, MeasurementAxis::Shared) => SettingPair::AlphaZ,
            (MeasurementAxis::Shared, MeasurementAxis::Move) => SettingPair::ZBeta,
            (MeasurementAxis::Shared, MeasurementAxis::Shared) => SettingPair::ZZ,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SettingPair::AlphaBeta => "alpha_beta",
            SettingPair::AlphaZ => "alpha_z",
            SettingPair::ZBeta => "z_beta",
            SettingPair::ZZ => "z_z",
        }
    }

    fn index(&self) -> usize {
        match self {
            SettingPair::AlphaBeta => 0,
            SettingPair::AlphaZ => 1,
            SettingPair::ZBeta => 2,
            SettingPair::ZZ => 3,
        }
    }
}

/// Per-bucket pair counts and outcome-product sums for one session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionTally {
    counts: [u64; 4],
    product_sums: [i64; 4],
}

impl SessionTally {
    pub fn record(&mut self, record: &MeasurementRecord) {
        let idx = SettingPair::of(record.alice_axis, record.bob_axis).index();
        self.counts[idx] += 1;
        self.product_sums[idx] += i64::from(record.alice_outcome * record.bob_outcome);
    }

    pub fn merge(&mut self, other: &SessionTally) {
        for i in 0..4 {
            self.counts[i] += other.counts[i];
            self.product_sums[i] += other.product_sums[i];
        }
    }

    pub fn count(&self, pair: SettingPair) -> u64 {
        self.counts[pair.index()]
    }

    pub fn product_sum(&self, pair: SettingPair) -> i64 {
        self.product_sums[pair.index()]
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Correlation estimates from a session, with plug-in standard errors, plus
/// the same-axis calibration estimate `cc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatedTriple {
    pub ab: f64,
    pub ac: f64,
    pub bc: f64,
    pub se_ab: f64,
    pub se_ac: f64,
    pub se_bc: f64,
    pub cc: f64,
}

impl EstimatedTriple {
    /// The estimates as a payoff-ready triple, clamped into `[-1, 1]`.
    pub fn triple(&self) -> crate::bell::CorrelationTriple {
        crate::bell::CorrelationTriple::new(
            self.ab.clamp(-1.0, 1.0),
            self.ac.clamp(-1.0, 1.0),
            self.bc.clamp(-1.0, 1.0),
        )
        .expect("clamped estimates are in range")
    }
}

/// The model correlation `E[outcome product]` for measurements along `a`
/// and `b`.
pub fn analytic_correlation(kind: SourceKind, a: &Direction, b: &Direction) -> f64 {
    match kind {
        SourceKind::QuantumCorrelated => a.dot(b).clamp(-1.0, 1.0),
        SourceKind::QuantumAnticorrelated => (-a.dot(b)).clamp(-1.0, 1.0),
        SourceKind::LhvCorrelated => 1.0 - 2.0 * angle_between(a, b) / std::f64::consts::PI,
        SourceKind::LhvAnticorrelated => -1.0 + 2.0 * angle_between(a, b) / std::f64::consts::PI,
    }
}

fn sign_or_one(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

/// Draws one outcome pair for measurements along `a` and `b`.
///
/// Quantum kinds sample the joint law `P(oa, ob) = (1 + oa*ob*E)/4`; hidden
/// variable kinds draw a uniform shared direction and report hemisphere
/// signs, flipping one side for the anticorrelated variant. Either way both
/// marginals are unbiased and the expected product equals
/// [`analytic_correlation`].
pub fn sample_outcomes<R: Rng + ?Sized>(
    kind: SourceKind,
    a: &Direction,
    b: &Direction,
    rng: &mut R,
) -> (i8, i8) {
    match kind {
        SourceKind::QuantumCorrelated | SourceKind::QuantumAnticorrelated => {
            let e = analytic_correlation(kind, a, b);
            let oa: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let agree = rng.random::<f64>() < (1.0 + e) / 2.0;
            let ob = if agree { oa } else { -oa };
            (oa, ob)
        }
        SourceKind::LhvCorrelated | SourceKind::LhvAnticorrelated => {
            let hidden = sample_uniform_direction(rng);
            let oa = sign_or_one(a.dot(&hidden));
            let ob_raw = sign_or_one(b.dot(&hidden));
            let ob = if kind == SourceKind::LhvCorrelated {
                ob_raw
            } else {
                -ob_raw
            };
            (oa, ob)
        }
    }
}

/// Measures one pair under the equal-probability two-setting protocol.
pub fn measure_pair<R: Rng + ?Sized>(
    kind: SourceKind,
    alpha: &Direction,
    beta: &Direction,
    rng: &mut R,
) -> MeasurementRecord {
    let alice_axis = if rng.random::<bool>() {
        MeasurementAxis::Move
    } else {
        MeasurementAxis::Shared
    };
    let bob_axis = if rng.random::<bool>() {
        MeasurementAxis::Move
    } else {
        MeasurementAxis::Shared
    };
    let a = match alice_axis {
        MeasurementAxis::Move => *alpha,
        MeasurementAxis::Shared => Direction::Z,
    };
    let b = match bob_axis {
        MeasurementAxis::Move => *beta,
        MeasurementAxis::Shared => Direction::Z,
    };
    let (alice_outcome, bob_outcome) = sample_outcomes(kind, &a, &b, rng);
    MeasurementRecord {
        alice_axis,
        bob_axis,
        alice_outcome,
        bob_outcome,
    }
}

/// Simulates a measurement session of `n_pairs` pairs.
///
/// Pairs are processed in fixed-size batches, each drawing from its own
/// generator stream derived from the master seed, so the result is
/// deterministic for a fixed seed and identical for any worker count.
pub fn simulate_session(
    kind: SourceKind,
    alpha: &Direction,
    beta: &Direction,
    n_pairs: u64,
    seed: u64,
) -> Result<SessionTally> {
    if n_pairs == 0 {
        return Err(Error::EmptySession);
    }
    let n_batches = n_pairs.div_ceil(BATCH_PAIRS);
    let tally = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let start = batch * BATCH_PAIRS;
            let len = BATCH_PAIRS.min(n_pairs - start);
            let mut partial = SessionTally::default();
            for _ in 0..len {
                partial.record(&measure_pair(kind, alpha, beta, &mut rng));
            }
            partial
        })
        .reduce(SessionTally::default, |mut acc, part| {
            acc.merge(&part);
            acc
        });
    Ok(tally)
}

/// Estimates the correlations from a session tally.
///
/// Each estimate is `product_sum / count`; the standard error is the exact
/// plug-in value `sqrt((1 - e^2)/count)` for a `+/-1` product estimator.
/// Every bucket must hold at least two pairs.
pub fn estimate_triple(tally: &SessionTally) -> Result<EstimatedTriple> {
    let mut estimates = [0.0f64; 4];
    let mut errors = [0.0f64; 4];
    for pair in SettingPair::ALL {
        let count = tally.count(pair);
        if count < 2 {
            return Err(Error::InsufficientBucket {
                bucket: pair.as_str(),
                count,
            });
        }
        let e = tally.product_sum(pair) as f64 / count as f64;
        estimates[pair.index()] = e;
        errors[pair.index()] = ((1.0 - e * e).max(0.0) / count as f64).sqrt();
    }
    Ok(EstimatedTriple {
        ab: estimates[0],
        ac: estimates[1],
        bc: estimates[2],
        se_ab: errors[0],
        se_ac: errors[1],
        se_bc: errors[2],
        cc: estimates[3],
    })
}
