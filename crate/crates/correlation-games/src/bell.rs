//! Correlation-form payoffs: the epsilon/sigma quantities, Bell-inequality
//! evaluation, the correlation-to-(p, q) replacement map, and the
//! re-expression of payoffs in the violating regime.
//!
//! The construction works on the three correlations of dichotomic outcomes
//! along the players' move directions and the shared axis. With
//!
//! ```text
//! epsilon = sqrt(3 + bc^2 + 2*ab*ac)
//! sigma   = sqrt(2*(1 + bc) + ab^2 + ac^2)
//! ```
//!
//! one has `epsilon^2 - sigma^2 = (1 - bc)^2 - (ab - ac)^2`, so
//! `epsilon >= sigma` exactly when `|ab - ac| <= 1 - bc`. The replacements
//! `p = (epsilon - sigma)/sqrt(6)` and `q = (epsilon + sigma)/(2*sqrt(6))`
//! land in `[0, 1]` precisely for triples satisfying that bound, which lets
//! a bilinear payoff in `(p, q)` be read as the classical mixed-strategy
//! payoff there and forces a sign-flipped coefficient structure elsewhere.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::PayoffCoefficients;

/// `sqrt(6)`, the maximum of both epsilon and sigma.
pub const SQRT_6: f64 = 2.449489742783178;

/// Guard window for radicands that are nonnegative in exact arithmetic.
const RADICAND_GUARD: f64 = 1e-12;

/// The three correlations of dichotomic outcomes: moves against each other
/// (`ab`), each move against the shared axis (`ac`, `bc`). Components lie in
/// `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    ab: f64,
    ac: f64,
    bc: f64,
}

impl CorrelationTriple {
    pub fn new(ab: f64, ac: f64, bc: f64) -> Result<Self> {
        let in_range = |v: f64| (-1.0..=1.0).contains(&v);
        if in_range(ab) && in_range(ac) && in_range(bc) {
            Ok(Self { ab, ac, bc })
        } else {
            Err(Error::TripleOutOfRange { ab, ac, bc })
        }
    }

    pub fn ab(&self) -> f64 {
        self.ab
    }

    pub fn ac(&self) -> f64 {
        self.ac
    }

    pub fn bc(&self) -> f64 {
        self.bc
    }
}

impl fmt::Display for CorrelationTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ab, self.ac, self.bc)
    }
}

/// Which right-hand side the Bell bound uses: `1 - bc` for pairs whose
/// same-axis outcomes agree, `1 + bc` for perfectly anticorrelated pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellConvention {
    Correlated,
    Anticorrelated,
}

/// Result of evaluating the Bell bound `|ab - ac| <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The pair of square-root quantities derived from a correlation triple.
///
/// `epsilon` is in `[1, sqrt(6)]` and `sigma` in `[0, sqrt(6)]`; the sign of
/// their difference tracks satisfaction of the correlated-pair Bell bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSigma {
    pub epsilon: f64,
    pub sigma: f64,
}

/// Image of a triple under the replacement map. `q` is always in
/// `[1/(2*sqrt(6)), 1]`; `p` is nonnegative exactly when the correlated-pair
/// Bell bound holds, and dips negative under violation, so the pair is not a
/// [`crate::game::MixedProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PqPair {
    pub p: f64,
    pub q: f64,
}

/// Computes epsilon and sigma for a triple.
///
/// Both radicands are nonnegative for in-range triples; values within the
/// `1e-12` guard window of zero are clamped to zero, anything lower is a
/// logic error.
pub fn epsilon_sigma(t: &CorrelationTriple) -> EpsilonSigma {
    let eps_sq = 3.0 + t.bc * t.bc + 2.0 * t.ab * t.ac;
    let sig_sq = 2.0 * (1.0 + t.bc) + t.ab * t.ab + t.ac * t.ac;
    debug_assert!(eps_sq >= -RADICAND_GUARD && sig_sq >= -RADICAND_GUARD);
    EpsilonSigma {
        epsilon: eps_sq.max(0.0).sqrt(),
        sigma: sig_sq.max(0.0).sqrt(),
    }
}

/// Evaluates the Bell bound `|ab - ac| <= 1 -/+ bc` under the chosen
/// convention. `holds` allows a `1e-12` slack on the boundary.
pub fn bell_check(t: &CorrelationTriple, convention: BellConvention) -> BellCheck {
    let lhs = (t.ab - t.ac).abs();
    let rhs = match convention {
        BellConvention::Correlated => 1.0 - t.bc,
        BellConvention::Anticorrelated => 1.0 + t.bc,
    };
    BellCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    }
}

/// Maps a triple to `(p, q) = ((epsilon - sigma)/sqrt(6),
/// (epsilon + sigma)/(2*sqrt(6)))`.
///
/// Defined for every in-range triple, including violating ones where `p`
/// goes negative; range enforcement belongs to
/// [`crate::game::MixedProfile`], not to this map.
pub fn pq_map(t: &CorrelationTriple) -> PqPair {
    let es = epsilon_sigma(t);
    PqPair {
        p: (es.epsilon - es.sigma) / SQRT_6,
        q: (es.epsilon + es.sigma) / (2.0 * SQRT_6),
    }
}

/// Both players' payoffs as functions of the correlation triple:
/// the bilinear payoff evaluated at the image of the replacement map, with
/// `p` allowed to be negative.
pub fn correlation_payoffs(c: &PayoffCoefficients, t: &CorrelationTriple) -> (f64, f64) {
    let pq = pq_map(t);
    (c.payoff_first(pq.p, pq.q), c.payoff_second(pq.p, pq.q))
}

/// Payoff coefficients valid in the violating regime, where the natural
/// variable is the flipped probability `sigma - epsilon` (scaled) instead of
/// `p`.
///
/// Relative to the source coefficients, the interaction and the focal
/// player's own weight flip sign in the first player's form, while in the
/// second player's form it is the opponent weight that flips. The two forms
/// no longer mirror each other, so no symmetric game reproduces them unless
/// both non-interaction weights vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReexpressedCoefficients {
    /// First player's bilinear form in `(flipped p, q)`.
    pub alice: PayoffCoefficients,
    /// Second player's bilinear form in `(flipped p, q)`; evaluate with
    /// [`PayoffCoefficients::payoff_second`].
    pub bob: PayoffCoefficients,
}

impl ReexpressedCoefficients {
    /// Both payoffs at `(flipped_p, q)`, `flipped_p = -p in [0, 1]`.
    pub fn payoffs(&self, flipped_p: f64, q: f64) -> (f64, f64) {
        (
            self.alice.payoff_first(flipped_p, q),
            self.bob.payoff_second(flipped_p, q),
        )
    }
}

/// Re-expresses the correlation payoffs of a violating triple in bilinear
/// form over the flipped probability.
///
/// Errors unless the triple violates the correlated-pair Bell bound
/// (`epsilon < sigma`), the only regime where the flip is needed.
pub fn reexpress(c: &PayoffCoefficients, t: &CorrelationTriple) -> Result<ReexpressedCoefficients> {
    let es = epsilon_sigma(t);
    let margin = es.epsilon - es.sigma;
    if margin >= 0.0 {
        return Err(Error::NotViolating { margin });
    }
    Ok(ReexpressedCoefficients {
        alice: PayoffCoefficients {
            interaction: -c.interaction,
            own: -c.own,
            other: c.other,
            base: c.base,
        },
        bob: PayoffCoefficients {
            interaction: -c.interaction,
            own: c.own,
            other: -c.other,
            base: c.base,
        },
    })
}

/// Whether the violating-regime payoff pair could itself be written as a
/// classical symmetric game in the flipped variables: true exactly when both
/// non-interaction weights are zero.
pub fn symmetric_reconstruction_possible(c: &PayoffCoefficients) -> bool {
    c.own == 0.0 && c.other == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::SymmetricGame;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn triple(ab: f64, ac: f64, bc: f64) -> CorrelationTriple {
        CorrelationTriple::new(ab, ac, bc).unwrap()
    }

    fn pd() -> PayoffCoefficients {
        SymmetricGame::prisoners_dilemma().coefficients()
    }

    #[test]
    fn out_of_range_triple_rejected() {
        assert!(CorrelationTriple::new(1.1, 0.0, 0.0).is_err());
        assert!(CorrelationTriple::new(0.0, -1.1, 0.0).is_err());
        assert!(CorrelationTriple::new(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn epsilon_sigma_symmetric_corner() {
        let es = epsilon_sigma(&triple(1.0, 1.0, 1.0));
        assert_close(es.epsilon, SQRT_6, 1e-12);
        assert_close(es.sigma, SQRT_6, 1e-12);
    }

    #[test]
    fn epsilon_sigma_violating_point() {
        let es = epsilon_sigma(&triple(0.5, -0.5, 0.5));
        assert_close(es.epsilon, 2.75f64.sqrt(), 1e-15); // 1.658312...
        assert_close(es.sigma, 3.5f64.sqrt(), 1e-15); // 1.870829...
    }

    #[test]
    fn epsilon_sigma_zero_sigma() {
        let es = epsilon_sigma(&triple(0.0, 0.0, -1.0));
        assert_eq!(es.epsilon, 2.0);
        assert_eq!(es.sigma, 0.0);
    }

    #[test]
    fn bell_check_boundary_and_violation() {
        let b = bell_check(&triple(1.0, 1.0, 1.0), BellConvention::Correlated);
        assert_eq!((b.lhs, b.rhs), (0.0, 0.0));
        assert!(b.holds);

        let b = bell_check(&triple(0.5, -0.5, 0.5), BellConvention::Correlated);
        assert_eq!((b.lhs, b.rhs), (1.0, 0.5));
        assert!(!b.holds);

        let b = bell_check(&triple(0.5, -0.5, 0.5), BellConvention::Anticorrelated);
        assert_eq!((b.lhs, b.rhs), (1.0, 1.5));
        assert!(b.holds);
    }

    #[test]
    fn pq_map_examples() {
        let pq = pq_map(&triple(1.0, 1.0, 1.0));
        assert_eq!(pq.p, 0.0);
        assert_eq!(pq.q, 1.0);

        let pq = pq_map(&triple(0.0, 0.0, -1.0));
        assert_close(pq.p, 0.816496580927726, 1e-12);
        assert_close(pq.q, 0.408248290463863, 1e-12);

        let pq = pq_map(&triple(0.5, -0.5, 0.5));
        assert_close(pq.p, -0.086759415439643, 1e-12);
        assert_close(pq.q, 0.720382908106152, 1e-12);
        assert!(pq.p < 0.0);
    }

    #[test]
    fn correlation_payoffs_examples() {
        let (pa, pb) = correlation_payoffs(&pd(), &triple(1.0, 1.0, 1.0));
        assert_eq!((pa, pb), (5.0, 0.0));

        let (pa, pb) = correlation_payoffs(&pd(), &triple(0.5, -0.5, 0.5));
        assert_close(pa, 4.03079104786425, 1e-12);
        assert_close(pb, -0.004920569864725, 1e-12);

        let constant = PayoffCoefficients::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(
            correlation_payoffs(&constant, &triple(0.3, -0.8, 0.1)),
            (1.0, 1.0)
        );
    }

    #[test]
    fn reexpress_pd_coefficients() {
        let re = reexpress(&pd(), &triple(0.5, -0.5, 0.5)).unwrap();
        assert_eq!(
            (
                re.alice.interaction,
                re.alice.own,
                re.alice.other,
                re.alice.base
            ),
            (1.0, 1.0, 4.0, 1.0)
        );
        assert_eq!(
            (re.bob.interaction, re.bob.own, re.bob.other, re.bob.base),
            (1.0, -1.0, -4.0, 1.0)
        );
    }

    #[test]
    fn reexpress_reproduces_payoffs() {
        let t = triple(0.5, -0.5, 0.5);
        let pq = pq_map(&t);
        let re = reexpress(&pd(), &t).unwrap();
        let (pa, pb) = re.payoffs(-pq.p, pq.q);
        let (ca, cb) = correlation_payoffs(&pd(), &t);
        assert_close(pa, ca, 1e-12);
        assert_close(pb, cb, 1e-12);
        assert_close(pa, 4.03079104786425, 1e-12);
    }

    #[test]
    fn reexpress_zero_game() {
        let zero = PayoffCoefficients::new(0.0, 0.0, 0.0, 2.5).unwrap();
        let re = reexpress(&zero, &triple(0.5, -0.5, 0.5)).unwrap();
        assert_eq!(
            (re.alice.interaction, re.alice.own, re.alice.other),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(
            (re.bob.interaction, re.bob.own, re.bob.other),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(re.alice.base, 2.5);
    }

    #[test]
    fn reexpress_rejects_satisfying_triple() {
        assert!(matches!(
            reexpress(&pd(), &triple(1.0, 1.0, 1.0)),
            Err(Error::NotViolating { .. })
        ));
    }

    #[test]
    fn symmetric_reconstruction_condition() {
        assert!(!symmetric_reconstruction_possible(&pd()));
        assert!(symmetric_reconstruction_possible(
            &PayoffCoefficients::new(2.0, 0.0, 0.0, 1.0).unwrap()
        ));
        assert!(symmetric_reconstruction_possible(
            &PayoffCoefficients::new(0.0, 0.0, 0.0, 0.0).unwrap()
        ));
    }

    #[test]
    fn difference_of_squares_identity_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let t = triple(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            );
            let es = epsilon_sigma(&t);
            let lhs = es.epsilon * es.epsilon - es.sigma * es.sigma;
            let rhs = (1.0 - t.bc()).powi(2) - (t.ab() - t.ac()).powi(2);
            assert!((lhs - rhs).abs() <= 1e-12, "identity broken at {t}");
        }
    }

    #[test]
    fn asymmetry_of_reexpressed_forms() {
        // Whenever a non-interaction weight is nonzero the two forms differ
        // somewhere: the mirror-image identity fails.
        let re = reexpress(&pd(), &triple(0.5, -0.5, 0.5)).unwrap();
        let bob_at = re.bob.payoff_second(0.3, 0.6);
        let mirrored = re.alice.payoff_first(0.6, 0.3);
        assert!((bob_at - mirrored).abs() > 0.1);

        // And across random games: probing the unit-square corners is enough,
        // since the mismatch is affine in (flipped p, q).
        let violating = triple(0.5, -0.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let c = PayoffCoefficients::new(
                rng.random_range(-5.0..=5.0),
                rng.random_range(-5.0..=5.0),
                rng.random_range(-5.0..=5.0),
                rng.random_range(-5.0..=5.0),
            )
            .unwrap();
            let re = reexpress(&c, &violating).unwrap();
            let mismatch = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
                .iter()
                .map(|&(fp, q)| (re.bob.payoff_second(fp, q) - re.alice.payoff_first(q, fp)).abs())
                .fold(0.0f64, f64::max);
            assert_eq!(mismatch > 1e-12, c.own != 0.0 || c.other != 0.0);
            assert_eq!(mismatch <= 1e-12, symmetric_reconstruction_possible(&c));
        }
    }

    proptest! {
        #[test]
        fn bounds_and_equivalence(
            ab in -1.0..=1.0f64,
            ac in -1.0..=1.0f64,
            bc in -1.0..=1.0f64,
        ) {
            let t = triple(ab, ac, bc);
            let es = epsilon_sigma(&t);
            prop_assert!(es.epsilon >= 1.0 - 1e-12 && es.epsilon <= SQRT_6 + 1e-12);
            prop_assert!(es.sigma >= 0.0 && es.sigma <= SQRT_6 + 1e-12);

            let pq = pq_map(&t);
            prop_assert!(pq.q >= 1.0 / (2.0 * SQRT_6) - 1e-12 && pq.q <= 1.0 + 1e-12);
            prop_assert!(pq.p > -1.0 && pq.p <= 1.0 + 1e-12);

            let check = bell_check(&t, BellConvention::Correlated);
            if (check.lhs - check.rhs).abs() > 1e-12 {
                prop_assert_eq!(es.epsilon >= es.sigma, check.holds);
            }
        }

        #[test]
        fn payoff_paths_agree(
            ab in -1.0..=1.0f64,
            ac in -1.0..=1.0f64,
            bc in -1.0..=1.0f64,
            interaction in -5.0..=5.0f64,
            own in -5.0..=5.0f64,
            other in -5.0..=5.0f64,
            base in -5.0..=5.0f64,
        ) {
            let t = triple(ab, ac, bc);
            let c = PayoffCoefficients::new(interaction, own, other, base).unwrap();
            let pq = pq_map(&t);
            let (pa, pb) = correlation_payoffs(&c, &t);
            prop_assert!((pa - c.payoff_first(pq.p, pq.q)).abs() <= 1e-12);
            prop_assert!((pb - c.payoff_second(pq.p, pq.q)).abs() <= 1e-12);
        }
    }
}
