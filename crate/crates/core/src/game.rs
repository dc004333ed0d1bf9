//! Rules of Z(n, d) and the residue arithmetic every strategy is built on.
//!
//! A game starts with the numbers `1..=n` on the board. Players alternate
//! crossing out one number, `A` first, until two numbers remain. `A` wins
//! iff their sum is divisible by `d`. Since only sums modulo `d` matter, most
//! of the crate works on [`ResidueVector`]s (how many live numbers fall into
//! each residue class) rather than on the numbers themselves.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid configuration Z({n}, {d}): need n >= 4 and d >= 2")]
    InvalidConfig { n: u32, d: u32 },
    #[error("{number} is not on the board")]
    IllegalMove { number: u32 },
    #[error("the game is over, two numbers remain")]
    GameOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::A => "A",
            Player::B => "B",
        })
    }
}

/// The pair `(n, d)` selecting a variant of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct GameConfig {
    n: u32,
    d: u32,
}

#[derive(Deserialize)]
struct RawConfig {
    n: u32,
    d: u32,
}

impl TryFrom<RawConfig> for GameConfig {
    type Error = GameError;

    fn try_from(raw: RawConfig) -> Result<Self, Self::Error> {
        GameConfig::new(raw.n, raw.d)
    }
}

impl GameConfig {
    pub fn new(n: u32, d: u32) -> Result<Self, GameError> {
        if n < 4 || d < 2 {
            return Err(GameError::InvalidConfig { n, d });
        }
        Ok(Self { n, d })
    }

    /// Number of integers initially on the board.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// The divisor deciding the winner.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// `n mod d`.
    pub fn r_tilde(&self) -> u32 {
        r_tilde(self.n, self.d)
    }

    /// The player who moves when `remaining` numbers are left.
    pub fn mover_at(&self, remaining: u32) -> Player {
        if (self.n - remaining).is_multiple_of(2) {
            Player::A
        } else {
            Player::B
        }
    }
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z({}, {})", self.n, self.d)
    }
}

pub fn residue_of(a: u32, d: u32) -> u32 {
    a % d
}

pub fn r_tilde(n: u32, d: u32) -> u32 {
    n % d
}

/// Whether `x` and `y` form a mod-`d` pair: distinct, with a sum divisible by `d`.
pub fn is_mod_pair(x: u32, y: u32, d: u32) -> bool {
    x != y && (x + y).is_multiple_of(d)
}

/// Additive inverse of residue `r` modulo `d`.
pub fn complement(r: u32, d: u32) -> u32 {
    (d - r % d) % d
}

/// Residues that are their own additive inverse: `{0}`, plus `d/2` for even `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseSet {
    d: u32,
}

impl InverseSet {
    pub fn new(d: u32) -> Self {
        assert!(d >= 2, "modulus must be at least 2");
        Self { d }
    }

    pub fn contains(&self, r: u32) -> bool {
        r == 0 || (self.d.is_multiple_of(2) && r == self.d / 2)
    }

    pub fn members(&self) -> Vec<u32> {
        if self.d.is_multiple_of(2) {
            vec![0, self.d / 2]
        } else {
            vec![0]
        }
    }
}

/// Live-number counts per residue class: `counts[r]` is `a_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueVector {
    counts: Vec<u32>,
}

impl ResidueVector {
    /// Builds a vector from explicit counts; the modulus is `counts.len()`.
    ///
    /// # Panics
    ///
    /// If fewer than two counts are given.
    pub fn from_counts(counts: Vec<u32>) -> Self {
        assert!(counts.len() >= 2, "modulus must be at least 2");
        Self { counts }
    }

    pub fn zeros(d: u32) -> Self {
        Self::from_counts(vec![0; d as usize])
    }

    pub fn from_numbers<I: IntoIterator<Item = u32>>(numbers: I, d: u32) -> Self {
        let mut v = Self::zeros(d);
        for a in numbers {
            v.counts[residue_of(a, d) as usize] += 1;
        }
        v
    }

    /// Counts for the full board `1..=n`, in closed form.
    pub fn initial(config: &GameConfig) -> Self {
        let (n, d) = (config.n(), config.d());
        let base = n / d;
        let rt = config.r_tilde();
        let counts = (0..d)
            .map(|r| if r >= 1 && r <= rt { base + 1 } else { base })
            .collect();
        Self { counts }
    }

    pub fn modulus(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn count(&self, r: u32) -> u32 {
        self.counts[r as usize]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of live numbers.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn inverse_set(&self) -> InverseSet {
        InverseSet::new(self.modulus())
    }

    pub fn decrement(&mut self, r: u32) {
        let c = &mut self.counts[r as usize];
        assert!(*c > 0, "no live number with residue {r}");
        *c -= 1;
    }

    pub fn without(&self, r: u32) -> Self {
        let mut next = self.clone();
        next.decrement(r);
        next
    }

    pub fn increment(&mut self, r: u32) {
        self.counts[r as usize] += 1;
    }

    /// The vector obtained by sending every residue `r` to `d - r`.
    pub fn negated(&self) -> Self {
        let d = self.modulus();
        let counts = (0..d).map(|r| self.count(complement(r, d))).collect();
        Self { counts }
    }

    /// Residues with at least one live number, ascending.
    pub fn present(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.modulus()).filter(|&r| self.count(r) > 0)
    }

    /// `a_r = a_{d-r}` outside the inverse set and even counts inside it.
    pub fn is_a_situation(&self) -> bool {
        let d = self.modulus();
        let inv = self.inverse_set();
        (0..d).all(|r| {
            if inv.contains(r) {
                self.count(r).is_multiple_of(2)
            } else {
                self.count(r) == self.count(d - r)
            }
        })
    }

    /// Whether a live number with residue `r` has no partner on the board.
    pub fn is_superfluous_residue(&self, r: u32) -> bool {
        let d = self.modulus();
        if self.count(r) == 0 {
            return false;
        }
        if self.inverse_set().contains(r) {
            self.count(r) == 1
        } else {
            self.count(d - r) == 0
        }
    }

    /// Number of live numbers that are superfluous.
    pub fn superfluous_count(&self) -> u32 {
        self.present()
            .filter(|&r| self.is_superfluous_residue(r))
            .map(|r| self.count(r))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub player: Player,
    pub number: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub winner: Player,
    pub final_pair: (u32, u32),
}

impl GameOutcome {
    pub fn from_pair(x: u32, y: u32, d: u32) -> Self {
        let winner = if (x + y).is_multiple_of(d) {
            Player::A
        } else {
            Player::B
        };
        Self {
            winner,
            final_pair: (x.min(y), x.max(y)),
        }
    }
}

/// A concrete position: the live numbers plus the history that led there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardState {
    config: GameConfig,
    live: BTreeSet<u32>,
    removed: Vec<Removal>,
    to_move: Player,
    residues: ResidueVector,
}

impl BoardState {
    pub fn new(config: GameConfig) -> Self {
        Self {
            config,
            live: (1..=config.n()).collect(),
            removed: Vec::new(),
            to_move: Player::A,
            residues: ResidueVector::initial(&config),
        }
    }

    /// Plays `numbers` from the initial position, alternating from `A`.
    pub fn replay<I: IntoIterator<Item = u32>>(
        config: GameConfig,
        numbers: I,
    ) -> Result<Self, GameError> {
        let mut board = Self::new(config);
        for number in numbers {
            board.remove(number)?;
        }
        Ok(board)
    }

    pub fn config(&self) -> GameConfig {
        self.config
    }

    pub fn modulus(&self) -> u32 {
        self.config.d()
    }

    pub fn live(&self) -> &BTreeSet<u32> {
        &self.live
    }

    pub fn is_live(&self, number: u32) -> bool {
        self.live.contains(&number)
    }

    pub fn removed(&self) -> &[Removal] {
        &self.removed
    }

    pub fn last_removal(&self) -> Option<Removal> {
        self.removed.last().copied()
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn residues(&self) -> &ResidueVector {
        &self.residues
    }

    pub fn is_terminal(&self) -> bool {
        self.live.len() <= 2
    }

    /// Smallest live number in residue class `r` modulo `modulus`.
    ///
    /// `modulus` is usually `d`, but delegated strategies play modulo a
    /// multiple of `d`.
    pub fn smallest_with_residue(&self, r: u32, modulus: u32) -> Option<u32> {
        self.live.iter().copied().find(|&a| a % modulus == r)
    }

    /// Live numbers that have no live partner forming a mod-`d` pair.
    pub fn superfluous_numbers(&self) -> BTreeSet<u32> {
        let d = self.modulus();
        self.live
            .iter()
            .copied()
            .filter(|&a| self.residues.is_superfluous_residue(residue_of(a, d)))
            .collect()
    }

    pub fn remove(&mut self, number: u32) -> Result<(), GameError> {
        if self.is_terminal() {
            return Err(GameError::GameOver);
        }
        if !self.live.remove(&number) {
            return Err(GameError::IllegalMove { number });
        }
        self.residues.decrement(residue_of(number, self.modulus()));
        self.removed.push(Removal {
            player: self.to_move,
            number,
        });
        self.to_move = self.to_move.other();
        debug_assert_eq!(
            self.residues,
            ResidueVector::from_numbers(self.live.iter().copied(), self.modulus())
        );
        debug_assert_eq!(
            self.to_move,
            self.config.mover_at(self.live.len() as u32),
            "turn order out of sync with the board"
        );
        Ok(())
    }

    /// Takes back the most recent removal.
    pub fn undo(&mut self) -> Option<Removal> {
        let last = self.removed.pop()?;
        self.live.insert(last.number);
        self.residues
            .increment(residue_of(last.number, self.modulus()));
        self.to_move = last.player;
        Some(last)
    }

    pub fn apply_removal(&self, number: u32) -> Result<Self, GameError> {
        let mut next = self.clone();
        next.remove(number)?;
        Ok(next)
    }

    pub fn terminal_outcome(&self) -> Option<GameOutcome> {
        if self.live.len() != 2 {
            return None;
        }
        let mut it = self.live.iter().copied();
        let (x, y) = (it.next()?, it.next()?);
        Some(GameOutcome::from_pair(x, y, self.modulus()))
    }
}
