//! Strategies checked against every possible opponent.
//!
//! [`verify_strategy`] lets a strategy play one side and branches over every
//! legal move of the other side, so a report with zero losses is a proof that
//! the strategy wins the variant. The punisher checks do the opposite for the
//! superfluous-number bot: they enumerate the first player's moves and look
//! for games the bot loses after a mistake by `A`.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use serde::Serialize;
use thiserror::Error;

use crate::game::{BoardState, GameConfig, GameOutcome, Player};
use crate::solver::{SolveError, SolveState, Solver};
use crate::strategy::Strategy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("strategy stuck after {trace:?}: {reason}")]
    StrategyStuck { trace: Vec<u32>, reason: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub wins: u64,
    pub losses: u64,
    /// Moves of the first lost game, in order.
    pub first_loss_trace: Option<Vec<u32>>,
}

impl VerificationReport {
    pub fn success(&self) -> bool {
        self.losses == 0
    }
}

fn trace_of(board: &BoardState) -> Vec<u32> {
    board.removed().iter().map(|m| m.number).collect()
}

/// Plays `strategy` as `claimant` against every sequence of opponent moves.
pub fn verify_strategy<S: Strategy>(
    config: GameConfig,
    claimant: Player,
    strategy: S,
) -> Result<VerificationReport, VerifyError> {
    let mut report = VerificationReport::default();
    let mut board = BoardState::new(config);
    explore(&mut board, claimant, &strategy, &mut report)?;
    Ok(report)
}

fn explore<S: Strategy>(
    board: &mut BoardState,
    claimant: Player,
    strategy: &S,
    report: &mut VerificationReport,
) -> Result<(), VerifyError> {
    if let Some(outcome) = board.terminal_outcome() {
        if outcome.winner == claimant {
            report.wins += 1;
        } else {
            report.losses += 1;
            report
                .first_loss_trace
                .get_or_insert_with(|| trace_of(board));
        }
        return Ok(());
    }
    if board.to_move() == claimant {
        let mut next = strategy.clone();
        let number = next.next_move(board).map_err(|e| stuck(board, e))?;
        checked_remove(board, number)?;
        let result = explore(board, claimant, &next, report);
        board.undo();
        result
    } else {
        let options: Vec<u32> = board.live().iter().copied().collect();
        for number in options {
            board.remove(number).expect("live number");
            let result = explore(board, claimant, strategy, report);
            board.undo();
            result?;
        }
        Ok(())
    }
}

/// Plays one game to the end.
pub fn play_out<SA: Strategy, SB: Strategy>(
    config: GameConfig,
    a: &mut SA,
    b: &mut SB,
) -> Result<(GameOutcome, Vec<u32>), VerifyError> {
    let mut board = BoardState::new(config);
    loop {
        if let Some(outcome) = board.terminal_outcome() {
            return Ok((outcome, trace_of(&board)));
        }
        let pick = match board.to_move() {
            Player::A => a.next_move(&board),
            Player::B => b.next_move(&board),
        };
        let number = pick.map_err(|e| stuck(&board, e))?;
        checked_remove(&mut board, number)?;
    }
}

/// Outcome counts of games in which `A` made at least one value-flipping
/// move: a move from a position `A` wins to one `A` loses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PunisherReport {
    /// Complete games explored or sampled.
    pub games: u64,
    /// Games containing a value-flipping move by `A`.
    pub games_with_mistake: u64,
    /// Of those, games the bot still lost.
    pub bot_losses_after_mistake: u64,
    /// Games without a mistake that `A` won.
    pub clean_a_wins: u64,
    pub first_counterexample: Option<Vec<u32>>,
}

impl PunisherReport {
    pub fn holds(&self) -> bool {
        self.bot_losses_after_mistake == 0
    }

    fn record(&mut self, board: &BoardState, outcome: GameOutcome, mistake: bool) {
        self.games += 1;
        if mistake {
            self.games_with_mistake += 1;
            if outcome.winner == Player::A {
                self.bot_losses_after_mistake += 1;
                self.first_counterexample
                    .get_or_insert_with(|| trace_of(board));
            }
        } else if outcome.winner == Player::A {
            self.clean_a_wins += 1;
        }
    }
}

fn a_move_flips(solver: &mut Solver, board: &BoardState, number: u32) -> Result<bool, SolveError> {
    let before = solver.value(&SolveState::from_board(board))?.winner;
    if before != Player::A {
        return Ok(false);
    }
    let after = board.apply_removal(number).expect("live number");
    Ok(solver.value(&SolveState::from_board(&after))?.winner == Player::B)
}

/// Enumerates every sequence of `A` moves against `bot`.
pub fn punisher_exhaustive<S: Strategy>(
    config: GameConfig,
    bot: S,
) -> Result<PunisherReport, VerifyError> {
    let mut solver = Solver::new(config);
    let mut report = PunisherReport::default();
    let mut board = BoardState::new(config);
    punish(&mut board, &bot, false, &mut solver, &mut report)?;
    Ok(report)
}

fn punish<S: Strategy>(
    board: &mut BoardState,
    bot: &S,
    mistake: bool,
    solver: &mut Solver,
    report: &mut PunisherReport,
) -> Result<(), VerifyError> {
    if let Some(outcome) = board.terminal_outcome() {
        report.record(board, outcome, mistake);
        return Ok(());
    }
    match board.to_move() {
        Player::A => {
            let options: Vec<u32> = board.live().iter().copied().collect();
            for number in options {
                let flips = a_move_flips(solver, board, number)?;
                board.remove(number).expect("live number");
                let result = punish(board, bot, mistake || flips, solver, report);
                board.undo();
                result?;
            }
            Ok(())
        }
        Player::B => {
            let mut next = bot.clone();
            let number = next.next_move(board).map_err(|e| stuck(board, e))?;
            board.remove(number).expect("bot plays a live number");
            let result = punish(board, &next, mistake, solver, report);
            board.undo();
            result
        }
    }
}

fn stuck(board: &BoardState, e: impl std::fmt::Display) -> VerifyError {
    VerifyError::StrategyStuck {
        trace: trace_of(board),
        reason: e.to_string(),
    }
}

fn checked_remove(board: &mut BoardState, number: u32) -> Result<(), VerifyError> {
    if let Err(e) = board.remove(number) {
        return Err(stuck(board, e));
    }
    Ok(())
}

/// Plays `games` random games in which `A` picks uniformly among its moves,
/// except that the first mistake is forced at a random `A` turn so every
/// sampled game contains one.
pub fn punisher_sampled<S: Strategy>(
    config: GameConfig,
    bot: S,
    games: u64,
    seed: u64,
) -> Result<PunisherReport, VerifyError> {
    let mut solver = Solver::new(config);
    let mut rng = Pcg32::seed_from_u64(seed);
    let mut report = PunisherReport::default();
    let a_turns = (config.n() - 1) / 2;
    for _ in 0..games {
        let forced_turn = rng.random_range(0..a_turns);
        let mut board = BoardState::new(config);
        let mut bot = bot.clone();
        let mut mistake = false;
        let mut turn = 0;
        while !board.is_terminal() {
            let number = match board.to_move() {
                Player::A => {
                    let live: Vec<u32> = board.live().iter().copied().collect();
                    let mut flipping = Vec::new();
                    for &a in &live {
                        if a_move_flips(&mut solver, &board, a)? {
                            flipping.push(a);
                        }
                    }
                    let pool = if !mistake && turn >= forced_turn && !flipping.is_empty() {
                        &flipping
                    } else {
                        &live
                    };
                    let pick = pool[rng.random_range(0..pool.len())];
                    mistake |= flipping.contains(&pick);
                    turn += 1;
                    pick
                }
                Player::B => bot.next_move(&board).map_err(|e| stuck(&board, e))?,
            };
            board.remove(number).expect("legal move");
        }
        let outcome = board.terminal_outcome().expect("terminal");
        report.record(&board, outcome, mistake);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy_a::ConstructiveA;
    use crate::strategy_b::Bot;

    fn cfg(n: u32, d: u32) -> GameConfig {
        GameConfig::new(n, d).unwrap()
    }

    #[test]
    fn pairing_plan_wins_fifteen_seven() {
        let a = ConstructiveA::new(cfg(15, 7)).unwrap();
        let report = verify_strategy(cfg(15, 7), Player::A, a).unwrap();
        assert!(report.success());
        assert_eq!(report.wins, 14 * 12 * 10 * 8 * 6 * 4);
    }

    #[test]
    fn xyz_plan_wins_fifteen_six() {
        let a = ConstructiveA::new(cfg(15, 6)).unwrap();
        assert!(verify_strategy(cfg(15, 6), Player::A, a).unwrap().success());
    }

    #[test]
    fn bot_wins_fifteen_nine() {
        let report = verify_strategy(cfg(15, 9), Player::B, Bot::punisher(1)).unwrap();
        assert!(report.success(), "{report:?}");
    }

    #[test]
    fn losses_are_traced() {
        // The bot cannot stop A in Z(7, 7), so claiming it for B must fail.
        let report = verify_strategy(cfg(7, 7), Player::B, Bot::punisher(1)).unwrap();
        assert!(report.losses > 0);
        let trace = report.first_loss_trace.unwrap();
        assert_eq!(trace.len(), 5);
        let end = BoardState::replay(cfg(7, 7), trace).unwrap();
        assert_eq!(end.terminal_outcome().unwrap().winner, Player::A);
    }

    #[test]
    fn optimal_a_beats_the_bot() {
        let config = cfg(15, 7);
        let mut a = ConstructiveA::new(config).unwrap();
        let mut b = Bot::punisher(3);
        let (outcome, trace) = play_out(config, &mut a, &mut b).unwrap();
        assert_eq!(outcome.winner, Player::A);
        assert_eq!(trace.len(), 13);
    }

    #[test]
    fn small_punisher_run() {
        let report = punisher_exhaustive(cfg(7, 7), Bot::punisher(0)).unwrap();
        assert_eq!(report.games, 7 * 5 * 3);
        assert!(report.holds(), "{report:?}");
        assert!(report.games_with_mistake > 0);
    }
}
