//! Classical symmetric 2x2 bi-matrix games: payoff table, mixed-strategy
//! payoffs in bilinear form, and exact Nash-equilibrium enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payoff table of a symmetric two-strategy game, seen from the focal
/// player's side.
///
/// `both_first` is the payoff when both sides play the first strategy,
/// `first_vs_second` when the focal player plays the first strategy against
/// the second, and so on. The opponent's table is the mirror image, which is
/// what makes the game symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricGame {
    pub both_first: f64,
    pub first_vs_second: f64,
    pub second_vs_first: f64,
    pub both_second: f64,
}

impl SymmetricGame {
    pub fn new(
        both_first: f64,
        first_vs_second: f64,
        second_vs_first: f64,
        both_second: f64,
    ) -> Result<Self> {
        let game = Self {
            both_first,
            first_vs_second,
            second_vs_first,
            both_second,
        };
        if [both_first, first_vs_second, second_vs_first, both_second]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(game)
        } else {
            Err(Error::NonFinitePayoff)
        }
    }

    /// The Prisoners' Dilemma table: cooperation pays 3, defection against a
    /// cooperator 5, mutual defection 1, being defected on 0.
    pub fn prisoners_dilemma() -> Self {
        Self {
            both_first: 3.0,
            first_vs_second: 0.0,
            second_vs_first: 5.0,
            both_second: 1.0,
        }
    }

    /// Coefficients of the bilinear mixed-strategy payoff equivalent to this
    /// table.
    ///
    /// With entries `(r, s, t, u)` in field order, the expectation
    /// `pq*r + p(1-q)*s + (1-p)q*t + (1-p)(1-q)*u` expands to
    /// `(r-s-t+u)pq + (s-u)p + (t-u)q + u`.
    pub fn coefficients(&self) -> PayoffCoefficients {
        PayoffCoefficients {
            interaction: self.both_first - self.first_vs_second - self.second_vs_first
                + self.both_second,
            own: self.first_vs_second - self.both_second,
            other: self.second_vs_first - self.both_second,
            base: self.both_second,
        }
    }

    /// Expected payoff pair computed directly from the table, without the
    /// bilinear coefficients. Used as the independent cross-check.
    pub fn expected_payoffs(&self, profile: &MixedProfile) -> (f64, f64) {
        let (p, q) = (profile.p(), profile.q());
        let focal = |p: f64, q: f64| {
            p * q * self.both_first
                + p * (1.0 - q) * self.first_vs_second
                + (1.0 - p) * q * self.second_vs_first
                + (1.0 - p) * (1.0 - q) * self.both_second
        };
        (focal(p, q), focal(q, p))
    }
}

/// Coefficients of the bilinear payoff
/// `interaction*p*q + own*p + other*q + base`, where `p` is the focal
/// player's own first-strategy probability and `q` the opponent's.
///
/// The same four numbers give both players' payoffs in a symmetric game:
/// the second player's payoff swaps which argument the `own` and `other`
/// weights multiply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCoefficients {
    pub interaction: f64,
    pub own: f64,
    pub other: f64,
    pub base: f64,
}

impl PayoffCoefficients {
    pub fn new(interaction: f64, own: f64, other: f64, base: f64) -> Result<Self> {
        if [interaction, own, other, base]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(Self {
                interaction,
                own,
                other,
                base,
            })
        } else {
            Err(Error::NonFinitePayoff)
        }
    }

    /// Payoff of the player whose own probability is the first argument.
    pub fn payoff_first(&self, p: f64, q: f64) -> f64 {
        self.interaction * (p * q) + self.own * p + self.other * q + self.base
    }

    /// Payoff of the player whose own probability is the second argument.
    ///
    /// Defined as `payoff_first` with swapped arguments so the symmetry
    /// `P_B(p, q) = P_A(q, p)` holds bit for bit.
    pub fn payoff_second(&self, p: f64, q: f64) -> f64 {
        self.payoff_first(q, p)
    }

    /// Both players' payoffs at a mixed profile.
    pub fn payoffs(&self, profile: &MixedProfile) -> (f64, f64) {
        let (p, q) = (profile.p(), profile.q());
        (self.payoff_first(p, q), self.payoff_second(p, q))
    }
}

/// Probabilities of playing the first strategy, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    p: f64,
    q: f64,
}

impl MixedProfile {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q) {
            Ok(Self { p, q })
        } else {
            Err(Error::ProfileOutOfRange { p, q })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// An axis-aligned segment of equilibria, `[p_lo, p_hi] x [q_lo, q_hi]`,
/// where one of the two ranges is a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSegment {
    pub p_lo: f64,
    pub p_hi: f64,
    pub q_lo: f64,
    pub q_hi: f64,
}

/// The Nash equilibria of a symmetric 2x2 game.
///
/// When payoffs do not respond to either player's own move (`interaction`
/// and `own` both zero), every profile is an equilibrium and `all_profiles`
/// is set instead of enumerating a continuum. Otherwise the set consists of
/// isolated `points` plus, in two degenerate coefficient families, edge
/// `segments`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalNash {
    pub all_profiles: bool,
    pub points: Vec<MixedProfile>,
    pub segments: Vec<EquilibriumSegment>,
}

impl ClassicalNash {
    fn all() -> Self {
        Self {
            all_profiles: true,
            points: Vec::new(),
            segments: Vec::new(),
        }
    }
}

/// Tolerance for the best-response verification pass.
const NASH_VERIFY_TOL: f64 = 1e-9;
const VERIFY_GRID: usize = 1001;

/// Enumerates all Nash equilibria of the symmetric game with the given
/// bilinear coefficients.
///
/// The enumeration is closed form (pure corners, the symmetric indifference
/// point, and the two edge-segment families); every candidate is then
/// verified against best responses on a 1001-point grid before being
/// returned.
pub fn classical_nash(c: &PayoffCoefficients) -> ClassicalNash {
    let k = c.interaction;
    let l = c.own;

    if k == 0.0 && l == 0.0 {
        // Neither player's payoff depends on their own move.
        return ClassicalNash::all();
    }

    let mut points: Vec<MixedProfile> = Vec::new();
    let mut segments: Vec<EquilibriumSegment> = Vec::new();

    if k == 0.0 {
        // Both marginals are the constant `own`; the game is dominance
        // solvable.
        let x = if l > 0.0 { 1.0 } else { 0.0 };
        points.push(MixedProfile::new(x, x).unwrap());
    } else {
        // Pure corners. The first strategy is a best response to q exactly
        // when interaction*q + own >= 0, and the second when <= 0.
        if l <= 0.0 {
            points.push(MixedProfile::new(0.0, 0.0).unwrap());
        }
        if k + l >= 0.0 {
            points.push(MixedProfile::new(1.0, 1.0).unwrap());
        }
        if k + l <= 0.0 && l >= 0.0 {
            points.push(MixedProfile::new(0.0, 1.0).unwrap());
            points.push(MixedProfile::new(1.0, 0.0).unwrap());
        }
        // Symmetric indifference point.
        let x = -l / k;
        if (0.0..=1.0).contains(&x) {
            let candidate = MixedProfile::new(x, x).unwrap();
            if !points.iter().any(|m| m == &candidate) {
                points.push(candidate);
            }
        }
        // Edge-segment families: one player pinned at a pure strategy that
        // leaves the opponent indifferent, with the pin a best response
        // across the whole edge.
        if l == 0.0 && k < 0.0 {
            segments.push(EquilibriumSegment {
                p_lo: 0.0,
                p_hi: 0.0,
                q_lo: 0.0,
                q_hi: 1.0,
            });
            segments.push(EquilibriumSegment {
                p_lo: 0.0,
                p_hi: 1.0,
                q_lo: 0.0,
                q_hi: 0.0,
            });
        }
        if k + l == 0.0 && k < 0.0 {
            segments.push(EquilibriumSegment {
                p_lo: 1.0,
                p_hi: 1.0,
                q_lo: 0.0,
                q_hi: 1.0,
            });
            segments.push(EquilibriumSegment {
                p_lo: 0.0,
                p_hi: 1.0,
                q_lo: 1.0,
                q_hi: 1.0,
            });
        }
    }

    // Drop points already covered by a segment.
    points.retain(|m| {
        !segments
            .iter()
            .any(|s| (s.p_lo..=s.p_hi).contains(&m.p()) && (s.q_lo..=s.q_hi).contains(&m.q()))
    });
    points.sort_by(|a, b| (a.p(), a.q()).partial_cmp(&(b.p(), b.q())).unwrap());

    for m in &points {
        assert!(
            verify_equilibrium(c, m, VERIFY_GRID, NASH_VERIFY_TOL),
            "closed-form equilibrium ({}, {}) failed grid verification",
            m.p(),
            m.q()
        );
    }
    for s in &segments {
        for t in [0.0, 0.5, 1.0] {
            let m = MixedProfile::new(
                s.p_lo + t * (s.p_hi - s.p_lo),
                s.q_lo + t * (s.q_hi - s.q_lo),
            )
            .unwrap();
            assert!(
                verify_equilibrium(c, &m, VERIFY_GRID, NASH_VERIFY_TOL),
                "segment equilibrium ({}, {}) failed grid verification",
                m.p(),
                m.q()
            );
        }
    }

    ClassicalNash {
        all_profiles: false,
        points,
        segments,
    }
}

/// Checks that neither player can improve by more than `tol` against any of
/// `grid` equally spaced unilateral deviations.
pub fn verify_equilibrium(
    c: &PayoffCoefficients,
    profile: &MixedProfile,
    grid: usize,
    tol: f64,
) -> bool {
    let (pa, pb) = c.payoffs(profile);
    let step = 1.0 / (grid - 1) as f64;
    for i in 0..grid {
        let x = i as f64 * step;
        if c.payoff_first(x, profile.q()) > pa + tol {
            return false;
        }
        if c.payoff_second(profile.p(), x) > pb + tol {
            return false;
        }
    }
    true
}

/// Left-hand sides of the Prisoners' Dilemma equilibrium inequalities,
/// `((p* - p)(1 + q*), (q* - q)(1 + p*))`; both are nonpositive for every
/// deviation exactly when the candidate is `(0, 0)`.
pub fn pd_nash_inequalities(star: &MixedProfile, other: &MixedProfile) -> (f64, f64) {
    (
        (star.p() - other.p()) * (1.0 + star.q()),
        (star.q() - other.q()) * (1.0 + star.p()),
    )
}

/// Parses a game description in JSON form.
///
/// Two shapes are accepted: entries `{"r": .., "s": .., "t": .., "u": ..}`
/// (focal player's table read row-major), or a full table of payoff pairs
/// `{"table": [[[3,3],[0,5]],[[5,0],[1,1]]]}` with `table[i][j] =
/// [focal, opponent]`. Tables are cross-checked for symmetry: the opponent
/// entry at `(i, j)` must equal the focal entry at `(j, i)`.
pub fn parse_game_json(text: &str) -> Result<SymmetricGame> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum GameFile {
        Entries { r: f64, s: f64, t: f64, u: f64 },
        Table { table: [[[f64; 2]; 2]; 2] },
    }

    let parsed: GameFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidGame(format!("expected {{r,s,t,u}} or {{table}}: {e}")))?;
    match parsed {
        GameFile::Entries { r, s, t, u } => SymmetricGame::new(r, s, t, u),
        GameFile::Table { table } => {
            for (i, row) in table.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    let opponent = cell[1];
                    let mirrored = table[j][i][0];
                    if opponent != mirrored {
                        return Err(Error::InvalidGame(format!(
                            "asymmetric table: opponent payoff at ({i},{j}) is {opponent}, \
                             focal payoff at ({j},{i}) is {mirrored}"
                        )));
                    }
                }
            }
            SymmetricGame::new(
                table[0][0][0],
                table[0][1][0],
                table[1][0][0],
                table[1][1][0],
            )
        }
    }
}
