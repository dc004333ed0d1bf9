//! Strategies for the second player.
//!
//! `B` wins exactly when the final two numbers are both superfluous, so the
//! bots here either keep the board from collapsing into a single self-inverse
//! class (even `n`) or create superfluous numbers as quickly as they can.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use serde::{Deserialize, Serialize};

use crate::game::{BoardState, GameConfig, InverseSet, Player, ResidueVector};
use crate::strategy::{Strategy, StrategyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BotKind {
    /// `d = 2`, even `n`: answer every removal with the opposite parity.
    ParityPairer,
    /// Even `n`: keep fewer than three numbers in each self-inverse class.
    InverseSetReducer,
    /// Make numbers superfluous as fast as possible, then play at random.
    SuperfluousMaximizer,
}

impl BotKind {
    /// The kind whose guarantee covers `config`.
    pub fn for_config(config: &GameConfig) -> Self {
        match (config.n() % 2, config.d()) {
            (0, 2) => BotKind::ParityPairer,
            (0, _) => BotKind::InverseSetReducer,
            _ => BotKind::SuperfluousMaximizer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotProfile {
    pub kind: BotKind,
    pub rng_seed: u64,
}

/// A second-player bot.
///
/// The random stream is a PCG-XSH-RR generator with 64 bits of state
/// (`Pcg32`) seeded from the profile, so identical seeds and move sequences
/// give identical replies.
#[derive(Debug, Clone)]
pub struct Bot {
    profile: BotProfile,
    rng: Pcg32,
}

impl Bot {
    pub fn new(profile: BotProfile) -> Self {
        Self {
            profile,
            rng: Pcg32::seed_from_u64(profile.rng_seed),
        }
    }

    /// The superfluous-number bot used for play against humans.
    pub fn punisher(seed: u64) -> Self {
        Self::new(BotProfile {
            kind: BotKind::SuperfluousMaximizer,
            rng_seed: seed,
        })
    }

    pub fn for_config(config: &GameConfig, seed: u64) -> Self {
        Self::new(BotProfile {
            kind: BotKind::for_config(config),
            rng_seed: seed,
        })
    }

    pub fn profile(&self) -> BotProfile {
        self.profile
    }
}

impl Strategy for Bot {
    fn next_move(&mut self, board: &BoardState) -> Result<u32, StrategyError> {
        if board.to_move() != Player::B || board.is_terminal() {
            return Err(StrategyError::NotMyTurn);
        }
        match self.profile.kind {
            BotKind::ParityPairer => {
                let last = board
                    .last_removal()
                    .ok_or_else(|| StrategyError::NoLegalResponse("A has not moved".into()))?;
                parity_pair_response(board, last.number)
            }
            BotKind::InverseSetReducer => Ok(inverse_set_reducer_move(board)),
            BotKind::SuperfluousMaximizer => Ok(superfluous_maximizer_move(board, &mut self.rng)),
        }
    }
}

/// Smallest live number whose parity differs from `a_number`.
pub fn parity_pair_response(board: &BoardState, a_number: u32) -> Result<u32, StrategyError> {
    board
        .live()
        .iter()
        .copied()
        .find(|a| a % 2 != a_number % 2)
        .ok_or(StrategyError::NoOppositeParity { number: a_number })
}

/// A self-inverse residue still holding three or more numbers, largest
/// count first.
pub fn inverse_set_reduction_move(v: &ResidueVector) -> Option<u32> {
    InverseSet::new(v.modulus())
        .members()
        .into_iter()
        .filter(|&r| v.count(r) >= 3)
        .max_by_key(|&r| (v.count(r), std::cmp::Reverse(r)))
}

/// Full even-`n` reply: on the last move leave a pair with a sum not
/// divisible by `d`; before that, thin out the self-inverse classes.
pub fn inverse_set_reducer_move(board: &BoardState) -> u32 {
    let d = board.modulus();
    let live: Vec<u32> = board.live().iter().copied().collect();
    if live.len() == 3 {
        let losing_for_a = (0..3).find(|&i| {
            let rest: Vec<u32> = (0..3).filter(|&j| j != i).map(|j| live[j]).collect();
            !(rest[0] + rest[1]).is_multiple_of(d)
        });
        return live[losing_for_a.unwrap_or(0)];
    }
    if let Some(r) = inverse_set_reduction_move(board.residues()) {
        return board.smallest_with_residue(r, d).expect("count >= 3");
    }
    board
        .superfluous_numbers()
        .first()
        .copied()
        .unwrap_or(live[0])
}

/// The residue the superfluous-number bot would remove, or `None` once
/// every live number is superfluous.
///
/// Priority: a residue `i` outside the inverse set with
/// `1 <= a_i <= a_{d-i}`, preferring the largest gap `a_{d-i} - a_i` and
/// then the largest `i`; otherwise a self-inverse residue with at least two
/// numbers, largest count first.
pub fn superfluous_maximizer_residue(v: &ResidueVector) -> Option<u32> {
    let d = v.modulus();
    let inv = InverseSet::new(d);
    let drain = (0..d)
        .filter(|&i| !inv.contains(i))
        .filter(|&i| v.count(i) >= 1 && v.count(i) <= v.count(d - i))
        .max_by_key(|&i| (v.count(d - i) - v.count(i), i));
    drain.or_else(|| {
        inv.members()
            .into_iter()
            .filter(|&r| v.count(r) >= 2)
            .max_by_key(|&r| (v.count(r), std::cmp::Reverse(r)))
    })
}

/// B's move under the superfluous-number bot: the smallest live number of
/// the chosen residue, or a uniformly random live number once all are
/// superfluous.
pub fn superfluous_maximizer_move<R: Rng>(board: &BoardState, rng: &mut R) -> u32 {
    let d = board.modulus();
    match superfluous_maximizer_residue(board.residues()) {
        Some(r) => board
            .smallest_with_residue(r, d)
            .expect("chosen residue is live"),
        None => {
            let live: Vec<u32> = board.live().iter().copied().collect();
            live[rng.random_range(0..live.len())]
        }
    }
}

/// Whether one of the second-player guarantees covers `config`.
pub fn known_b_win(config: &GameConfig) -> bool {
    let (n, d) = (config.n(), config.d());
    if n % 2 == 0 {
        return true;
    }
    n >= 5 && ((n + 3 <= 2 * d && d < n) || d >= n + 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, d: u32) -> GameConfig {
        GameConfig::new(n, d).unwrap()
    }

    #[test]
    fn parity_pairing() {
        let config = cfg(6, 2);
        let board = BoardState::replay(config, [3]).unwrap();
        assert_eq!(parity_pair_response(&board, 3), Ok(2));
        let board = BoardState::replay(config, [2]).unwrap();
        assert_eq!(parity_pair_response(&board, 2), Ok(1));
    }

    #[test]
    fn parity_pairing_wins_four_two() {
        let config = cfg(4, 2);
        for first in 1..=4 {
            let mut board = BoardState::new(config);
            board.remove(first).unwrap();
            let reply = parity_pair_response(&board, first).unwrap();
            board.remove(reply).unwrap();
            assert_eq!(board.terminal_outcome().unwrap().winner, Player::B);
        }
    }

    #[test]
    fn reduction_targets() {
        let v = ResidueVector::initial(&cfg(12, 3));
        assert_eq!(v.counts(), &[4, 4, 4]);
        assert_eq!(inverse_set_reduction_move(&v), Some(0));
        assert_eq!(
            inverse_set_reduction_move(&ResidueVector::initial(&cfg(8, 8))),
            None
        );
    }

    #[test]
    fn maximizer_follows_the_worked_example() {
        let config = cfg(15, 9);
        let mut rng = Pcg32::seed_from_u64(0);
        let board = BoardState::replay(config, [9]).unwrap();
        assert_eq!(superfluous_maximizer_move(&board, &mut rng), 8);
        let board = board.apply_removal(8).unwrap();
        let superfluous: Vec<u32> = board.superfluous_numbers().into_iter().collect();
        assert_eq!(superfluous, vec![1, 10]);
        let board = board.apply_removal(1).unwrap();
        assert_eq!(superfluous_maximizer_move(&board, &mut rng), 7);
        let board = BoardState::replay(config, [9, 8, 1, 7, 2]).unwrap();
        let superfluous: Vec<u32> = board.superfluous_numbers().into_iter().collect();
        assert_eq!(superfluous, vec![10, 11]);
    }

    #[test]
    fn maximizer_breaks_single_pairs() {
        let config = cfg(23, 26);
        let board = BoardState::replay(config, [1]).unwrap();
        let v = board.residues();
        for r in v.present() {
            if !v.is_superfluous_residue(r) {
                assert_eq!((v.count(r), v.count(26 - r)), (1, 1));
            }
        }
        let mut rng = Pcg32::seed_from_u64(0);
        let b = superfluous_maximizer_move(&board, &mut rng);
        let after = board.apply_removal(b).unwrap();
        assert!(!board.superfluous_numbers().contains(&b));
        assert_eq!(
            after.superfluous_numbers().len(),
            board.superfluous_numbers().len() + 1
        );
    }

    #[test]
    fn random_fallback_is_seeded() {
        let config = cfg(15, 9);
        let keep = [4, 10, 11];
        let board = BoardState::replay(config, (1..=15).filter(|a| !keep.contains(a))).unwrap();
        assert_eq!(superfluous_maximizer_residue(board.residues()), None);
        let pick = |seed| superfluous_maximizer_move(&board, &mut Pcg32::seed_from_u64(seed));
        assert_eq!(pick(7), pick(7));
        assert!(keep.contains(&pick(7)));
    }

    #[test]
    fn known_b_cells() {
        assert!(known_b_win(&cfg(15, 9)));
        assert!(known_b_win(&cfg(23, 26)));
        assert!(!known_b_win(&cfg(15, 7)));
        assert!(known_b_win(&cfg(14, 7)));
        assert!(!known_b_win(&cfg(15, 17)));
        assert!(known_b_win(&cfg(15, 18)));
    }
}
