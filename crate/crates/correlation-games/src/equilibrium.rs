//! Directional Nash equilibria of correlation games: best-response search
//! over the sphere, certification, attainable-region scans, inversion of the
//! (p, q) map, and the Prisoners' Dilemma demonstration.
//!
//! A directional profile fixes both players' move directions; its payoffs
//! are the correlation payoffs of the analytic triple the chosen source
//! assigns to it. Correlations depend only on pairwise angles, so rotating
//! both moves about the shared axis never changes payoffs; search quotients
//! this symmetry out by pinning the first player's azimuth and reports
//! canonical representatives.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{
    bell_check, correlation_payoffs, pq_map, BellConvention, CorrelationTriple, PqPair, SQRT_6,
};
use crate::game::{classical_nash, MixedProfile, PayoffCoefficients, SymmetricGame};
use crate::geometry::{angle_between, sample_uniform_direction, Direction, SphericalAngles};
use crate::sources::{analytic_correlation, SourceKind};

/// Smallest refinement step, radians.
const MIN_STEP: f64 = 1e-10;

/// Payoff gain below which an iterated best-response sweep counts as
/// converged.
const CONVERGENCE_EPS: f64 = 1e-9;

/// Angular distance below which two equilibrium profiles merge.
const DEDUP_ANGLE: f64 = 1e-3;

/// Best-response sweeps before a start is reported as unconverged.
const MAX_SWEEPS: usize = 40;

/// Random starting profiles added to the deterministic corner starts.
const RANDOM_STARTS: usize = 8;

/// A pair of move directions, one per player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalProfile {
    pub alice: Direction,
    pub bob: Direction,
}

impl DirectionalProfile {
    pub fn new(alice: Direction, bob: Direction) -> Self {
        Self { alice, bob }
    }

    /// The representative of this profile's orbit under rotation about the
    /// shared axis: the first player's azimuth is rotated to zero (the
    /// second player's when the first move sits on the axis). Moves within
    /// `1e-9` of a pole snap onto it, where the azimuth is gauge anyway.
    pub fn canonical(&self) -> Self {
        let snap = |d: &Direction| {
            if (d.x() * d.x() + d.y() * d.y()).sqrt() <= 1e-9 {
                if d.z() >= 0.0 {
                    Direction::Z
                } else {
                    -Direction::Z
                }
            } else {
                *d
            }
        };
        let alice = snap(&self.alice);
        let bob = snap(&self.bob);
        let off_axis = |d: &Direction| (d.x() * d.x() + d.y() * d.y()).sqrt() > 1e-9;
        let phase = if off_axis(&alice) {
            alice.spherical().phi()
        } else if off_axis(&bob) {
            bob.spherical().phi()
        } else {
            return Self { alice, bob };
        };
        Self {
            alice: alice.rotated_about_z(-phase),
            bob: bob.rotated_about_z(-phase),
        }
    }

    /// The larger of the two per-player angular distances.
    pub fn angular_distance(&self, other: &Self) -> f64 {
        angle_between(&self.alice, &other.alice).max(angle_between(&self.bob, &other.bob))
    }
}

/// Which player is responding in a best-response computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Alice,
    Bob,
}

/// The analytic correlation triple of a profile: moves against each other
/// and each move against the shared axis.
pub fn triple_of(kind: SourceKind, profile: &DirectionalProfile) -> CorrelationTriple {
    let ab = analytic_correlation(kind, &profile.alice, &profile.bob);
    let ac = analytic_correlation(kind, &profile.alice, &Direction::Z);
    let bc = analytic_correlation(kind, &Direction::Z, &profile.bob);
    CorrelationTriple::new(ab, ac, bc).expect("analytic correlations are in range")
}

/// Both players' correlation payoffs at a directional profile.
pub fn directional_payoffs(
    c: &PayoffCoefficients,
    kind: SourceKind,
    profile: &DirectionalProfile,
) -> (f64, f64) {
    correlation_payoffs(c, &triple_of(kind, profile))
}

/// A refined best response: the responder's direction and the payoff it
/// achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub direction: Direction,
    pub payoff: f64,
}

pub(crate) fn grid_theta(i: usize, n: usize) -> f64 {
    (i as f64 / (n - 1) as f64) * PI
}

pub(crate) fn grid_phi(j: usize, n: usize) -> f64 {
    (j as f64 / n as f64) * TAU
}

pub(crate) fn direction_at(theta: f64, phi: f64) -> Direction {
    let mut phi = phi.rem_euclid(TAU);
    if phi >= TAU {
        phi = 0.0;
    }
    Direction::from_spherical(
        SphericalAngles::new(theta.clamp(0.0, PI), phi).expect("clamped angles are in range"),
    )
}

/// Derivative-free local ascent on the sphere: shrinking coordinate steps in
/// the polar and azimuthal angles, accepting only strict improvements.
fn refine_on_sphere<F: Fn(f64, f64) -> f64>(
    eval: &F,
    mut theta: f64,
    mut phi: f64,
    start_step: f64,
    refine_tol: f64,
) -> (f64, f64, f64) {
    let mut best = eval(theta, phi);
    let mut step = start_step;
    while step > MIN_STEP {
        let mut scale_gain = 0.0;
        // Walk while this scale still pays; cap the walk so a flat ridge
        // cannot loop forever.
        for _ in 0..200 {
            let mut moved = false;
            for (dt, df) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let t = (theta + dt).clamp(0.0, PI);
                let f = (phi + df).rem_euclid(TAU);
                let value = eval(t, f);
                if value > best {
                    scale_gain += value - best;
                    best = value;
                    theta = t;
                    phi = f;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        // Scales that still improve by at least refine_tol are retried;
        // once improvement per scale falls below it, shrink.
        if scale_gain <= refine_tol {
            step *= 0.5;
        }
    }
    (theta, phi, best)
}

/// Maximizes the responder's correlation payoff against a fixed opposing
/// move.
///
/// Scans a `grid_n x grid_n` polar/azimuthal grid of own directions, then
/// refines the best cell by derivative-free local ascent until the payoff
/// improvement per step drops below `refine_tol`. The returned payoff is
/// never below the best grid payoff.
pub fn best_response(
    c: &PayoffCoefficients,
    kind: SourceKind,
    fixed: &Direction,
    who: Player,
    grid_n: usize,
    refine_tol: f64,
) -> BestResponse {
    assert!(grid_n >= 8, "best_response needs a grid of at least 8");
    let eval = |theta: f64, phi: f64| -> f64 {
        let own = direction_at(theta, phi);
        match who {
            Player::Alice => directional_payoffs(c, kind, &DirectionalProfile::new(own, *fixed)).0,
            Player::Bob => directional_payoffs(c, kind, &DirectionalProfile::new(*fixed, own)).1,
        }
    };

    let mut best = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    let mut best_phi = 0.0;
    for i in 0..grid_n {
        let theta = grid_theta(i, grid_n);
        for j in 0..grid_n {
            let phi = grid_phi(j, grid_n);
            let value = eval(theta, phi);
            if value > best {
                best = value;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    let start_step = PI / (grid_n - 1) as f64;
    let (theta, phi, payoff) =
        refine_on_sphere(&eval, best_theta, best_phi, start_step, refine_tol);
    BestResponse {
        direction: direction_at(theta, phi),
        payoff,
    }
}

/// A certified profile: the best unilateral payoff improvements found for
/// either player, the tolerance they were checked against, and the grid
/// resolution of the check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub profile: DirectionalProfile,
    pub payoffs: (f64, f64),
    pub alice_improvement: f64,
    pub bob_improvement: f64,
    pub tolerance: f64,
    pub verified_grid_resolution: usize,
}

impl EquilibriumCertificate {
    /// Valid when neither player improves by more than the tolerance.
    pub fn is_valid(&self) -> bool {
        self.alice_improvement.max(self.bob_improvement) <= self.tolerance
    }
}

/// Measures how far a profile is from equilibrium: each player's best
/// unilateral improvement (floored at zero), found with the best-response
/// machinery at the given grid resolution.
pub fn certify(
    c: &PayoffCoefficients,
    kind: SourceKind,
    profile: &DirectionalProfile,
    grid_n: usize,
    tol: f64,
) -> EquilibriumCertificate {
    let current = directional_payoffs(c, kind, profile);
    let refine_tol = (tol * 1e-3).min(1e-9);
    let alice = best_response(c, kind, &profile.bob, Player::Alice, grid_n, refine_tol);
    let bob = best_response(c, kind, &profile.alice, Player::Bob, grid_n, refine_tol);
    EquilibriumCertificate {
        profile: *profile,
        payoffs: current,
        alice_improvement: (alice.payoff - current.0).max(0.0),
        bob_improvement: (bob.payoff - current.1).max(0.0),
        tolerance: tol,
        verified_grid_resolution: grid_n,
    }
}

/// Outcome of a multi-start equilibrium search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeSearchResult {
    /// Set when the game's payoffs are constant, so every profile is an
    /// equilibrium; no certificates are enumerated in that case.
    pub all_profiles: bool,
    /// Certificates for distinct fixed points, re-verified at twice the
    /// search grid resolution; sorted by canonical angles.
    pub certificates: Vec<EquilibriumCertificate>,
    /// Starts whose best-response iteration hit the sweep limit.
    pub unconverged_starts: usize,
    /// Fixed points that failed re-verification at the doubled resolution.
    pub rejected_fixed_points: usize,
}

fn corner_starts() -> Vec<DirectionalProfile> {
    let mut starts = Vec::new();
    for theta_a in [0.0, PI / 2.0, PI] {
        for theta_b in [0.0, PI / 2.0, PI] {
            for delta_phi in [0.0, PI] {
                starts.push(DirectionalProfile::new(
                    direction_at(theta_a, 0.0),
                    direction_at(theta_b, delta_phi),
                ));
            }
        }
    }
    starts
}

fn iterate_best_response(
    c: &PayoffCoefficients,
    kind: SourceKind,
    start: DirectionalProfile,
    grid_n: usize,
    refine_tol: f64,
) -> Option<DirectionalProfile> {
    let mut profile = start;
    for _ in 0..MAX_SWEEPS {
        let current_a = directional_payoffs(c, kind, &profile).0;
        let response_a = best_response(c, kind, &profile.bob, Player::Alice, grid_n, refine_tol);
        let gain_a = response_a.payoff - current_a;
        if gain_a > CONVERGENCE_EPS {
            profile.alice = response_a.direction;
        }

        let current_b = directional_payoffs(c, kind, &profile).1;
        let response_b = best_response(c, kind, &profile.alice, Player::Bob, grid_n, refine_tol);
        let gain_b = response_b.payoff - current_b;
        if gain_b > CONVERGENCE_EPS {
            profile.bob = response_b.direction;
        }

        if gain_a <= CONVERGENCE_EPS && gain_b <= CONVERGENCE_EPS {
            return Some(profile);
        }
    }
    None
}

/// Searches for directional Nash equilibria by iterated best response from
/// corner and seeded random starts.
///
/// Fixed points are canonicalized, merged when closer than `1e-3` radians,
/// and re-certified on a grid of twice the search resolution; only
/// certificates valid at `tol` are returned. Non-convergent starts are
/// counted, not fatal. Constant games short-circuit to the all-profiles
/// flag.
pub fn ne_search(
    c: &PayoffCoefficients,
    kind: SourceKind,
    grid_n: usize,
    tol: f64,
    seed: u64,
) -> NeSearchResult {
    assert!(grid_n >= 8, "ne_search needs a grid of at least 8");
    if c.interaction == 0.0 && c.own == 0.0 && c.other == 0.0 {
        return NeSearchResult {
            all_profiles: true,
            certificates: Vec::new(),
            unconverged_starts: 0,
            rejected_fixed_points: 0,
        };
    }

    let mut starts = corner_starts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STARTS {
        let alice = sample_uniform_direction(&mut rng);
        let bob = sample_uniform_direction(&mut rng);
        starts.push(DirectionalProfile::new(alice, bob));
    }

    let refine_tol = (tol * 1e-3).min(1e-9);
    let outcomes: Vec<Option<DirectionalProfile>> = starts
        .par_iter()
        .map(|start| iterate_best_response(c, kind, *start, grid_n, refine_tol))
        .collect();

    let unconverged_starts = outcomes.iter().filter(|o| o.is_none()).count();
    let mut distinct: Vec<DirectionalProfile> = Vec::new();
    for profile in outcomes.into_iter().flatten() {
        let canonical = profile.canonical();
        if !distinct
            .iter()
            .any(|seen| seen.angular_distance(&canonical) <= DEDUP_ANGLE)
        {
            distinct.push(canonical);
        }
    }

    let verified: Vec<EquilibriumCertificate> = distinct
        .par_iter()
        .map(|profile| certify(c, kind, profile, 2 * grid_n, tol))
        .collect();
    let rejected_fixed_points = verified.iter().filter(|cert| !cert.is_valid()).count();
    let mut certificates: Vec<EquilibriumCertificate> = verified
        .into_iter()
        .filter(|cert| cert.is_valid())
        .collect();
    certificates.sort_by(|a, b| {
        let key = |cert: &EquilibriumCertificate| {
            let sa = cert.profile.alice.spherical();
            let sb = cert.profile.bob.spherical();
            (sa.theta(), sb.theta(), sb.phi())
        };
        key(a).partial_cmp(&key(b)).expect("angles are finite")
    });

    NeSearchResult {
        all_profiles: false,
        certificates,
        unconverged_starts,
        rejected_fixed_points,
    }
}

/// One grid sample of the attainable-region scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub profile: DirectionalProfile,
    pub pq: PqPair,
    pub bell_holds: bool,
}

/// Aggregate view of a region scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub grid_n: usize,
    pub samples: u64,
    pub min_p: f64,
    pub max_p: f64,
    pub min_q: f64,
    pub max_q: f64,
    pub bell_holds_count: u64,
    pub bell_holds_fraction: f64,
    /// First grid profile attaining `min_p`.
    pub min_p_profile: DirectionalProfile,
}

/// A full region scan: every sample plus the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionScan {
    pub summary: RegionSummary,
    pub samples: Vec<RegionSample>,
}

struct PartialSummary {
    samples: u64,
    min_p: f64,
    max_p: f64,
    min_q: f64,
    max_q: f64,
    holds: u64,
    min_p_profile: Option<DirectionalProfile>,
}

impl PartialSummary {
    fn new() -> Self {
        Self {
            samples: 0,
            min_p: f64::INFINITY,
            max_p: f64::NEG_INFINITY,
            min_q: f64::INFINITY,
            max_q: f64::NEG_INFINITY,
            holds: 0,
            min_p_profile: None,
        }
    }

    fn push(&mut self, sample: &RegionSample) {
        self.samples += 1;
        if sample.pq.p < self.min_p {
            self.min_p = sample.pq.p;
            self.min_p_profile = Some(sample.profile);
        }
        self.max_p = self.max_p.max(sample.pq.p);
        self.min_q = self.min_q.min(sample.pq.q);
        self.max_q = self.max_q.max(sample.pq.q);
        if sample.bell_holds {
            self.holds += 1;
        }
    }

    /// Combines in grid order, so ties keep the earliest profile.
    fn combine(mut self, other: PartialSummary) -> PartialSummary {
        self.samples += other.samples;
        if other.min_p < self.min_p {
            self.min_p = other.min_p;
            self.min_p_profile = other.min_p_profile;
        }
        self.max_p = self.max_p.max(other.max_p);
        self.min_q = self.min_q.min(other.min_q);
        self.max_q = self.max_q.max(other.max_q);
        self.holds += other.holds;
        self
    }
}

fn region_sample(kind: SourceKind, profile: DirectionalProfile) -> RegionSample {
    let triple = triple_of(kind, &profile);
    RegionSample {
        profile,
        pq: pq_map(&triple),
        bell_holds: bell_check(&triple, BellConvention::Correlated).holds,
    }
}

fn region_slices(kind: SourceKind, grid_n: usize) -> Vec<(PartialSummary, Vec<RegionSample>)> {
    (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let theta_a = grid_theta(i, grid_n);
            let mut partial = PartialSummary::new();
            let mut samples = Vec::with_capacity(grid_n * grid_n * grid_n);
            for j in 0..grid_n {
                let alice = direction_at(theta_a, grid_phi(j, grid_n));
                for k in 0..grid_n {
                    let theta_b = grid_theta(k, grid_n);
                    for l in 0..grid_n {
                        let bob = direction_at(theta_b, grid_phi(l, grid_n));
                        let sample = region_sample(kind, DirectionalProfile::new(alice, bob));
                        partial.push(&sample);
                        samples.push(sample);
                    }
                }
            }
            (partial, samples)
        })
        .collect()
}

/// Evaluates the replacement map over the full direction-pair grid
/// (`grid_n` polar values per player, `grid_n` azimuthal values per player)
/// and reports every sample plus the summary.
pub fn region_scan(kind: SourceKind, grid_n: usize) -> RegionScan {
    assert!(grid_n >= 8, "region_scan needs a grid of at least 8");
    let slices = region_slices(kind, grid_n);
    let mut summary = PartialSummary::new();
    let mut samples = Vec::new();
    for (partial, mut slice_samples) in slices {
        summary = summary.combine(partial);
        samples.append(&mut slice_samples);
    }
    RegionScan {
        summary: finish_summary(summary, grid_n),
        samples,
    }
}

/// The summary of [`region_scan`] without materializing the samples.
pub fn region_summary(kind: SourceKind, grid_n: usize) -> RegionSummary {
    assert!(grid_n >= 8, "region_summary needs a grid of at least 8");
    let summary = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let theta_a = grid_theta(i, grid_n);
            let mut partial = PartialSummary::new();
            for j in 0..grid_n {
                let alice = direction_at(theta_a, grid_phi(j, grid_n));
                for k in 0..grid_n {
                    let theta_b = grid_theta(k, grid_n);
                    for l in 0..grid_n {
                        let bob = direction_at(theta_b, grid_phi(l, grid_n));
                        partial.push(&region_sample(kind, DirectionalProfile::new(alice, bob)));
                    }
                }
            }
            partial
        })
        .reduce_with(PartialSummary::combine)
        .expect("grid is nonempty");
    finish_summary(summary, grid_n)
}

fn finish_summary(partial: PartialSummary, grid_n: usize) -> RegionSummary {
    RegionSummary {
        grid_n,
        samples: partial.samples,
        min_p: partial.min_p,
        max_p: partial.max_p,
        min_q: partial.min_q,
        max_q: partial.max_q,
        bell_holds_count: partial.holds,
        bell_holds_fraction: partial.holds as f64 / partial.samples as f64,
        min_p_profile: partial.min_p_profile.expect("grid is nonempty"),
    }
}

/// Finds direction pairs whose image under the replacement map lies within
/// `tol` (Euclidean in the (p, q) plane) of the target profile.
///
/// Scans the reduced grid (both polar angles plus the relative azimuth,
/// which is all the correlations depend on), locally refines every cell
/// that lands near the target, keeps refined profiles within `tol`, and
/// returns one representative per angular-proximity cluster. The result is
/// empty when the target is unattainable under the source.
pub fn directions_for_pq(
    kind: SourceKind,
    target: &MixedProfile,
    grid_n: usize,
    tol: f64,
) -> Vec<DirectionalProfile> {
    assert!(grid_n >= 8, "directions_for_pq needs a grid of at least 8");
    let step = PI / (grid_n - 1) as f64;
    let capture = tol + 3.0 * step;
    let distance = |theta_a: f64, theta_b: f64, delta_phi: f64| -> f64 {
        let profile =
            DirectionalProfile::new(direction_at(theta_a, 0.0), direction_at(theta_b, delta_phi));
        let pq = pq_map(&triple_of(kind, &profile));
        ((pq.p - target.p()).powi(2) + (pq.q - target.q()).powi(2)).sqrt()
    };

    // Candidate cells near the target, refined by coordinate descent on the
    // squared distance.
    let mut hits: Vec<DirectionalProfile> = Vec::new();
    for i in 0..grid_n {
        let theta_a = grid_theta(i, grid_n);
        for k in 0..grid_n {
            let theta_b = grid_theta(k, grid_n);
            for l in 0..grid_n {
                let delta_phi = grid_phi(l, grid_n);
                if distance(theta_a, theta_b, delta_phi) > capture {
                    continue;
                }
                let (ta, tb, dp) =
                    refine_towards_target(&distance, theta_a, theta_b, delta_phi, step);
                if distance(ta, tb, dp) <= tol {
                    hits.push(DirectionalProfile::new(
                        direction_at(ta, 0.0),
                        direction_at(tb, dp),
                    ));
                }
            }
        }
    }

    cluster_profiles(hits, 2.5 * step, |profile| {
        let pq = pq_map(&triple_of(kind, profile));
        ((pq.p - target.p()).powi(2) + (pq.q - target.q()).powi(2)).sqrt()
    })
}

fn refine_towards_target<F: Fn(f64, f64, f64) -> f64>(
    distance: &F,
    mut theta_a: f64,
    mut theta_b: f64,
    mut delta_phi: f64,
    start_step: f64,
) -> (f64, f64, f64) {
    let mut best = distance(theta_a, theta_b, delta_phi);
    let mut step = start_step;
    let mut budget = 10_000usize;
    while step > MIN_STEP && budget > 0 {
        budget -= 1;
        let mut moved = false;
        let moves = [
            (step, 0.0, 0.0),
            (-step, 0.0, 0.0),
            (0.0, step, 0.0),
            (0.0, -step, 0.0),
            (0.0, 0.0, step),
            (0.0, 0.0, -step),
        ];
        for (da, db, dp) in moves {
            let ta = (theta_a + da).clamp(0.0, PI);
            let tb = (theta_b + db).clamp(0.0, PI);
            let fp = (delta_phi + dp).rem_euclid(TAU);
            let value = distance(ta, tb, fp);
            if value < best {
                best = value;
                theta_a = ta;
                theta_b = tb;
                delta_phi = fp;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (theta_a, theta_b, delta_phi)
}

/// Greedy ball clustering: profiles are visited best score first, and each
/// becomes a cluster representative unless one already sits within
/// `radius`. Keeps topologically close but distinct solutions apart while
/// collapsing duplicates that refined into the same spot.
fn cluster_profiles<F: Fn(&DirectionalProfile) -> f64>(
    profiles: Vec<DirectionalProfile>,
    radius: f64,
    score: F,
) -> Vec<DirectionalProfile> {
    let angle_key = |p: &DirectionalProfile| {
        let sa = p.alice.spherical();
        let sb = p.bob.spherical();
        (sa.theta(), sb.theta(), sb.phi())
    };
    let mut scored: Vec<(f64, DirectionalProfile)> =
        profiles.into_iter().map(|p| (score(&p), p)).collect();
    scored.sort_by(|a, b| {
        (a.0, angle_key(&a.1))
            .partial_cmp(&(b.0, angle_key(&b.1)))
            .expect("scores and angles are finite")
    });
    let mut representatives: Vec<DirectionalProfile> = Vec::new();
    for (_, profile) in scored {
        if !representatives
            .iter()
            .any(|rep| rep.angular_distance(&profile) <= radius)
        {
            representatives.push(profile);
        }
    }
    representatives.sort_by(|a, b| angle_key(a).partial_cmp(&angle_key(b)).expect("finite"));
    representatives
}

/// Re-certification of one hidden-variable equilibrium under the quantum
/// source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumRecheck {
    pub profile: DirectionalProfile,
    pub lhv_payoffs: (f64, f64),
    pub lhv_improvements: (f64, f64),
    pub quantum_payoffs: (f64, f64),
    pub quantum_improvements: (f64, f64),
    /// Whether the profile still certifies at the same tolerance under the
    /// quantum source.
    pub remains_equilibrium: bool,
}

/// Report of the Prisoners' Dilemma demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdDemoReport {
    pub game: SymmetricGame,
    /// The unique classical equilibrium (mutual defection).
    pub classical_equilibrium: MixedProfile,
    pub classical_payoffs: (f64, f64),
    /// Directional equilibria found under the hidden-variable source.
    pub lhv_certificates: Vec<EquilibriumCertificate>,
    pub lhv_unconverged_starts: usize,
    /// Each hidden-variable equilibrium re-certified under the quantum
    /// source.
    pub quantum_recheck: Vec<QuantumRecheck>,
    /// Attainable-region summary under the quantum source.
    pub region: RegionSummary,
    /// Fraction of scanned profiles violating the correlated-pair Bell
    /// bound.
    pub violation_fraction: f64,
    /// Smallest attainable q under the replacement map.
    pub q_lower_bound: f64,
    /// Whether the classical equilibrium's q clears that bound; mutual
    /// defection does not, so no direction pair realizes it.
    pub classical_equilibrium_attainable: bool,
    /// Whether the violating-regime payoffs fit a symmetric game; false for
    /// the Prisoners' Dilemma.
    pub symmetric_reconstruction_possible: bool,
    pub grid_n: usize,
    pub tolerance: f64,
}

/// Grid used for the demonstration's region stage.
const DEMO_REGION_GRID: usize = 36;

/// Runs the Prisoners' Dilemma demonstration: classical equilibrium,
/// hidden-variable equilibrium search, quantum re-certification of every
/// hidden-variable equilibrium, the quantum violation-region summary, and
/// the symmetric-reconstruction verdict.
pub fn pd_disappearance_experiment(grid_n: usize, tol: f64, seed: u64) -> PdDemoReport {
    let game = SymmetricGame::prisoners_dilemma();
    let coefficients = game.coefficients();

    let nash = classical_nash(&coefficients);
    let classical_equilibrium = nash.points[0];
    let classical_payoffs = coefficients.payoffs(&classical_equilibrium);

    let lhv = ne_search(&coefficients, SourceKind::LhvCorrelated, grid_n, tol, seed);
    let quantum_recheck: Vec<QuantumRecheck> = lhv
        .certificates
        .iter()
        .map(|cert| {
            let requalified = certify(
                &coefficients,
                SourceKind::QuantumCorrelated,
                &cert.profile,
                2 * grid_n,
                tol,
            );
            QuantumRecheck {
                profile: cert.profile,
                lhv_payoffs: cert.payoffs,
                lhv_improvements: (cert.alice_improvement, cert.bob_improvement),
                quantum_payoffs: requalified.payoffs,
                quantum_improvements: (requalified.alice_improvement, requalified.bob_improvement),
                remains_equilibrium: requalified.is_valid(),
            }
        })
        .collect();

    let region = region_summary(SourceKind::QuantumCorrelated, DEMO_REGION_GRID);
    let q_lower_bound = 1.0 / (2.0 * SQRT_6);

    PdDemoReport {
        game,
        classical_equilibrium,
        classical_payoffs,
        lhv_certificates: lhv.certificates,
        lhv_unconverged_starts: lhv.unconverged_starts,
        quantum_recheck,
        violation_fraction: 1.0 - region.bell_holds_fraction,
        q_lower_bound,
        classical_equilibrium_attainable: classical_equilibrium.q() + 1e-12 >= q_lower_bound,
        symmetric_reconstruction_possible: crate::bell::symmetric_reconstruction_possible(
            &coefficients,
        ),
        region,
        grid_n,
        tolerance: tol,
    }
}
