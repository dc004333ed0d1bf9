use thiserror::Error;

use crate::game::BoardState;
use crate::solver::SolveError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("position before B's removal of residue {residue} was not an A-situation")]
    NotAnASituation { residue: u32 },
    #[error("no legal response: {0}")]
    NoLegalResponse(String),
    #[error("no live number of opposite parity to {number}")]
    NoOppositeParity { number: u32 },
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("asked to move on the opponent's turn")]
    NotMyTurn,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Anything that can pick the next number to cross out.
///
/// Implementations may keep state between calls (a strategy phase, a random
/// stream); searches clone the strategy at every branch so each line of
/// play sees a consistent history.
pub trait Strategy: Clone {
    fn next_move(&mut self, board: &BoardState) -> Result<u32, StrategyError>;
}
