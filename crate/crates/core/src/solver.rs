//! Exact game values by memoized search over residue vectors.
//!
//! Only the residue of each live number matters, so a position is fully
//! described by its [`ResidueVector`] and the player to move, and the latter
//! follows from how many numbers are left. Positions related by a residue
//! symmetry (negation always, multiplication by a unit optionally) share one
//! memo entry.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{BoardState, GameConfig, Player, ResidueVector};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{config} needs up to {bound} states, above the budget of {budget}")]
    BudgetExceeded {
        config: GameConfig,
        bound: u128,
        budget: u64,
    },
    #[error("not a position of {config}: {reason}")]
    InvalidState { config: GameConfig, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameValue {
    pub winner: Player,
}

impl std::fmt::Display for GameValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.winner.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Upper bound on the number of residue vectors a solve may touch,
    /// estimated as the product of `a_r + 1` over the starting position.
    pub budget: u64,
    /// Also identify positions that differ by multiplying every residue by
    /// a unit modulo `d`.
    pub unit_symmetry: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            unit_symmetry: false,
        }
    }
}

/// A position as seen by the solver.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolveState {
    config: GameConfig,
    residues: ResidueVector,
}

impl SolveState {
    pub fn initial(config: GameConfig) -> Self {
        Self {
            config,
            residues: ResidueVector::initial(&config),
        }
    }

    pub fn from_board(board: &BoardState) -> Self {
        Self {
            config: board.config(),
            residues: board.residues().clone(),
        }
    }

    /// Wraps an arbitrary residue vector. Each count may not exceed the
    /// largest count of the initial board, and at least two numbers must
    /// remain.
    pub fn new(config: GameConfig, residues: ResidueVector) -> Result<Self, SolveError> {
        let invalid = |reason: String| SolveError::InvalidState { config, reason };
        if residues.modulus() != config.d() {
            return Err(invalid(format!("modulus {} != d", residues.modulus())));
        }
        let remaining = residues.total();
        if remaining < 2 || remaining > config.n() {
            return Err(invalid(format!("{remaining} numbers on the board")));
        }
        let cap = max_initial_count(&config);
        if let Some(r) = residues.present().find(|&r| residues.count(r) > cap) {
            return Err(invalid(format!("residue {r} exceeds {cap} numbers")));
        }
        Ok(Self { config, residues })
    }

    pub fn config(&self) -> GameConfig {
        self.config
    }

    pub fn residues(&self) -> &ResidueVector {
        &self.residues
    }

    pub fn remaining(&self) -> u32 {
        self.residues.total()
    }

    pub fn to_move(&self) -> Player {
        self.config.mover_at(self.remaining())
    }
}

fn max_initial_count(config: &GameConfig) -> u32 {
    config.n() / config.d() + u32::from(config.r_tilde() > 0)
}

fn units(d: u32) -> impl Iterator<Item = u32> {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..d).filter(move |&u| gcd(u, d) == 1)
}

/// Lexicographically smallest vector in the symmetry orbit of `v`.
///
/// The orbit always includes the negation `r -> d - r`; with
/// `unit_symmetry` it includes every map `r -> u * r` for `gcd(u, d) = 1`.
pub fn canonicalize(v: &ResidueVector, unit_symmetry: bool) -> ResidueVector {
    let d = v.modulus();
    let multipliers: Vec<u32> = if unit_symmetry {
        units(d).collect()
    } else {
        vec![1, d - 1]
    };
    multipliers
        .into_iter()
        .map(|u| {
            let mut counts = vec![0; d as usize];
            for r in 0..d {
                counts[(u as u64 * r as u64 % d as u64) as usize] = v.count(r);
            }
            ResidueVector::from_counts(counts)
        })
        .min()
        .expect("at least the identity")
}

/// Memoized minimax for one variant.
///
/// The memo table lives as long as the solver, so repeated queries against
/// positions of the same game reuse earlier work.
#[derive(Debug, Clone)]
pub struct Solver {
    config: GameConfig,
    options: SolverOptions,
    /// `weights[s][r]` is the key contribution of one number with residue
    /// `r` under the `s`-th symmetry; a vector's key under that symmetry
    /// orders like the permuted vector in lexicographic order.
    weights: Vec<Vec<u128>>,
    memo: HashMap<u128, bool>,
}

impl Solver {
    pub fn new(config: GameConfig) -> Self {
        Self::with_options(config, SolverOptions::default())
    }

    pub fn with_options(config: GameConfig, options: SolverOptions) -> Self {
        Self {
            config,
            options,
            weights: Vec::new(),
            memo: HashMap::new(),
        }
    }

    pub fn config(&self) -> GameConfig {
        self.config
    }

    pub fn options(&self) -> SolverOptions {
        self.options
    }

    /// Distinct canonical non-terminal positions evaluated so far.
    pub fn states_visited(&self) -> usize {
        self.memo.len()
    }

    /// Every pair sums to at most `2n - 1`, so no final pair can reach `d`.
    fn unreachable_modulus(&self) -> bool {
        self.config.d() >= 2 * self.config.n()
    }

    pub fn solve(&mut self) -> Result<GameValue, SolveError> {
        self.value(&SolveState::initial(self.config))
    }

    pub fn value(&mut self, state: &SolveState) -> Result<GameValue, SolveError> {
        if self.unreachable_modulus() {
            return Ok(GameValue { winner: Player::B });
        }
        self.prepare(state)?;
        let mut counts = state.residues().counts().to_vec();
        let mut keys = self.keys(&counts);
        let a_wins = self.a_wins(&mut counts, &mut keys, state.remaining());
        Ok(GameValue {
            winner: if a_wins { Player::A } else { Player::B },
        })
    }

    /// Residues whose removal keeps the best value the mover can reach.
    /// Empty only for terminal positions.
    pub fn optimal_moves(&mut self, state: &SolveState) -> Result<BTreeSet<u32>, SolveError> {
        if state.remaining() <= 2 {
            return Ok(BTreeSet::new());
        }
        let mover = state.to_move();
        let mut winning = BTreeSet::new();
        let present: Vec<u32> = state.residues().present().collect();
        for &r in &present {
            let child = SolveState {
                config: state.config,
                residues: state.residues().without(r),
            };
            if self.value(&child)?.winner == mover {
                winning.insert(r);
            }
        }
        if winning.is_empty() {
            Ok(present.into_iter().collect())
        } else {
            Ok(winning)
        }
    }

    fn prepare(&mut self, state: &SolveState) -> Result<(), SolveError> {
        let budget_error = |bound| SolveError::BudgetExceeded {
            config: self.config,
            bound,
            budget: self.options.budget,
        };
        let bound = state
            .residues()
            .counts()
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128 + 1));
        if bound > self.options.budget as u128 {
            return Err(budget_error(bound));
        }
        if !self.weights.is_empty() {
            return Ok(());
        }

        let d = self.config.d();
        let radix = max_initial_count(&self.config) as u128 + 1;
        // The full key space must fit in a u128.
        if radix.checked_pow(d).is_none() {
            return Err(budget_error(u128::MAX));
        }
        let multipliers: Vec<u32> = if self.options.unit_symmetry {
            units(d).collect()
        } else if d > 2 {
            vec![1, d - 1]
        } else {
            vec![1]
        };
        self.weights = multipliers
            .into_iter()
            .map(|u| {
                (0..d)
                    .map(|r| {
                        let pos = (u as u64 * r as u64 % d as u64) as u32;
                        radix.pow(d - 1 - pos)
                    })
                    .collect()
            })
            .collect();
        Ok(())
    }

    fn keys(&self, counts: &[u32]) -> Vec<u128> {
        self.weights
            .iter()
            .map(|w| counts.iter().zip(w).map(|(&c, &w)| c as u128 * w).sum())
            .collect()
    }

    fn a_wins(&mut self, counts: &mut [u32], keys: &mut [u128], remaining: u32) -> bool {
        let d = self.config.d();
        if remaining == 2 {
            let mut pair = counts
                .iter()
                .enumerate()
                .flat_map(|(r, &c)| std::iter::repeat_n(r as u32, c as usize));
            let (x, y) = (pair.next().unwrap(), pair.next().unwrap());
            return (x + y) % d == 0;
        }
        let key = *keys.iter().min().expect("identity key");
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let a_to_move = self.config.mover_at(remaining) == Player::A;
        // A to move: A wins if any child wins for A. B to move: A wins
        // only if every child does.
        let mut result = !a_to_move;
        for r in 0..d as usize {
            if counts[r] == 0 {
                continue;
            }
            counts[r] -= 1;
            for (k, w) in keys.iter_mut().zip(&self.weights) {
                *k -= w[r];
            }
            let child = self.a_wins(counts, keys, remaining - 1);
            counts[r] += 1;
            for (k, w) in keys.iter_mut().zip(&self.weights) {
                *k += w[r];
            }
            if child == a_to_move {
                result = a_to_move;
                break;
            }
        }
        self.memo.insert(key, result);
        result
    }
}

/// Exact winner of `config` under optimal play, with default options.
pub fn solve(config: GameConfig) -> Result<GameValue, SolveError> {
    Solver::new(config).solve()
}

/// Whether removing residue `r` from the position flips the value away
/// from the mover. Used to spot mistakes in recorded games.
pub fn is_value_flipping(
    solver: &mut Solver,
    state: &SolveState,
    r: u32,
) -> Result<bool, SolveError> {
    let mover = state.to_move();
    let before = solver.value(state)?.winner;
    let child = SolveState::new(state.config(), state.residues().without(r))?;
    let after = solver.value(&child)?.winner;
    Ok(before == mover && after != mover)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, d: u32) -> GameConfig {
        GameConfig::new(n, d).unwrap()
    }

    #[test]
    fn known_values() {
        assert_eq!(solve(cfg(15, 7)).unwrap().winner, Player::A);
        assert_eq!(solve(cfg(17, 7)).unwrap().winner, Player::B);
        assert_eq!(solve(cfg(29, 7)).unwrap().winner, Player::A);
    }

    #[test]
    fn budget_is_enforced() {
        let err = solve(cfg(2017, 8)).unwrap_err();
        assert!(
            matches!(err, SolveError::BudgetExceeded { budget, .. } if budget == DEFAULT_BUDGET)
        );
        let tiny = SolverOptions {
            budget: 10,
            unit_symmetry: false,
        };
        assert!(Solver::with_options(cfg(15, 7), tiny).solve().is_err());
    }

    #[test]
    fn huge_modulus_short_circuits() {
        let mut s = Solver::new(cfg(2017, 5000));
        assert_eq!(s.solve().unwrap().winner, Player::B);
        assert_eq!(s.states_visited(), 0);
    }

    #[test]
    fn canonical_forms() {
        let a = ResidueVector::from_counts(vec![0, 2, 0, 0, 0, 0, 0]);
        let b = ResidueVector::from_counts(vec![0, 0, 0, 0, 0, 0, 2]);
        assert_eq!(canonicalize(&a, false), canonicalize(&b, false));
        let fixed = ResidueVector::from_counts(vec![1, 0, 0, 0, 0]);
        assert_eq!(canonicalize(&fixed, false), fixed);
        assert_eq!(a.negated(), b);
    }

    #[test]
    fn optimal_opening_of_fifteen_seven() {
        let mut s = Solver::new(cfg(15, 7));
        let moves = s.optimal_moves(&SolveState::initial(cfg(15, 7))).unwrap();
        assert_eq!(moves, [1].into_iter().collect());
    }

    #[test]
    fn optimal_moves_near_the_end() {
        let config = cfg(15, 7);
        let state = SolveState::new(
            config,
            ResidueVector::from_counts(vec![0, 0, 0, 2, 1, 0, 0]),
        )
        .unwrap();
        assert_eq!(state.to_move(), Player::A);
        let mut s = Solver::new(config);
        assert_eq!(s.optimal_moves(&state).unwrap(), [3].into_iter().collect());
    }

    #[test]
    fn invalid_states_are_rejected() {
        let config = cfg(7, 7);
        let too_many = ResidueVector::from_counts(vec![0, 0, 0, 2, 1, 0, 0]);
        assert!(SolveState::new(config, too_many).is_err());
        let single = ResidueVector::from_counts(vec![0, 0, 0, 1, 0, 0, 0]);
        assert!(SolveState::new(config, single).is_err());
    }

    #[test]
    fn unit_symmetry_agrees() {
        for n in 5..=13 {
            for d in 2..=14 {
                let config = cfg(n, d);
                let plain = solve(config).unwrap();
                let units = Solver::with_options(
                    config,
                    SolverOptions {
                        unit_symmetry: true,
                        ..Default::default()
                    },
                )
                .solve()
                .unwrap();
                assert_eq!(plain, units, "{config}");
            }
        }
    }
}
