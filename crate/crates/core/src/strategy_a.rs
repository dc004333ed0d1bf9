//! Constructive winning strategies for the first player.
//!
//! Every plan funnels into the pairing reply: once `B` faces an A-situation,
//! `A` answers each removal with the complementary residue and the final two
//! numbers form a mod-`d` pair. The plans differ in how `A` reaches the first
//! A-situation: a single opening removal, the three-residue plan that waits
//! for `B` to touch one of the designated classes, or playing modulo a
//! multiple of `d`.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::game::{complement, BoardState, GameConfig, InverseSet, Player, ResidueVector};
use crate::solver::{SolveState, Solver};
use crate::strategy::{Strategy, StrategyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XyzPhase {
    AwaitingTrigger,
    PostTrigger,
}

/// State of the three-residue plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XyzPlan {
    pub triple: [u32; 3],
    /// Residue of A's opening removal; never in the inverse set.
    pub opened: u32,
    pub phase: XyzPhase,
}

impl XyzPlan {
    /// Opens with the smallest designated residue outside the inverse set.
    pub fn new(triple: [u32; 3], d: u32) -> Option<Self> {
        let inv = InverseSet::new(d);
        let opened = triple.iter().copied().filter(|&r| !inv.contains(r)).min()?;
        Some(Self {
            triple,
            opened,
            phase: XyzPhase::AwaitingTrigger,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PlanMode {
    Pairing,
    Xyz(XyzPlan),
    EndgameD2,
    /// Play the inner plan modulo a multiple of `d`.
    Delegated(Box<StrategyPlan>),
    SolverBacked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyPlan {
    /// Modulus the plan's residues refer to.
    pub modulus: u32,
    pub opening: Option<u32>,
    pub mode: PlanMode,
}

impl StrategyPlan {
    /// Open with `opening`, then answer every removal with its complement.
    pub fn pairing(modulus: u32, opening: u32) -> Self {
        Self {
            modulus,
            opening: Some(opening),
            mode: PlanMode::Pairing,
        }
    }

    /// The three-residue plan for `triple`; `None` if every member is
    /// self-inverse.
    pub fn xyz(modulus: u32, triple: [u32; 3]) -> Option<Self> {
        let plan = XyzPlan::new(triple, modulus)?;
        Some(Self {
            modulus,
            opening: Some(plan.opened),
            mode: PlanMode::Xyz(plan),
        })
    }

    pub fn solver_backed(modulus: u32) -> Self {
        Self {
            modulus,
            opening: None,
            mode: PlanMode::SolverBacked,
        }
    }

    /// The plan that actually picks moves, looking through delegation.
    pub fn effective(&self) -> &StrategyPlan {
        match &self.mode {
            PlanMode::Delegated(inner) => inner.effective(),
            _ => self,
        }
    }
}

/// Pairing reply to B's removal of `b_residue`, checking that the position
/// before that removal was an A-situation with at least four numbers.
pub fn pairing_response(v: &ResidueVector, b_residue: u32) -> Result<u32, StrategyError> {
    let mut before = v.clone();
    before.increment(b_residue);
    if before.total() < 4 || !before.is_a_situation() {
        return Err(StrategyError::NotAnASituation { residue: b_residue });
    }
    pairing_reply(v, b_residue).ok_or(StrategyError::NotAnASituation { residue: b_residue })
}

/// The complementary residue, if a number with it is still live.
fn pairing_reply(v: &ResidueVector, b_residue: u32) -> Option<u32> {
    let reply = complement(b_residue, v.modulus());
    (v.count(reply) > 0).then_some(reply)
}

/// Sufficient condition for the three-residue plan to win with A to move.
///
/// Residues outside the triple and not complementary to any of its members
/// must already satisfy the A-situation criterion; every designated residue
/// outside the inverse set must lead its complement by exactly one; at least
/// one designated residue is self-inverse, each such has an odd count of at
/// least three.
pub fn xyz_applicable(v: &ResidueVector, triple: [u32; 3]) -> bool {
    let d = v.modulus();
    let [x, y, z] = triple;
    if d < 3 || x == y || y == z || x == z || triple.iter().any(|&r| r >= d) {
        return false;
    }
    let inv = InverseSet::new(d);
    let designated = |r: u32| triple.contains(&r);
    let settled = (0..d)
        .filter(|&r| !designated(r) && !designated(complement(r, d)))
        .all(|r| {
            if inv.contains(r) {
                v.count(r).is_multiple_of(2)
            } else {
                v.count(r) == v.count(d - r)
            }
        });
    let leading = triple
        .iter()
        .filter(|&&s| !inv.contains(s))
        .all(|&s| v.count(s) == v.count(d - s) + 1);
    let self_inverse: Vec<u32> = triple
        .iter()
        .copied()
        .filter(|&r| inv.contains(r))
        .collect();
    let enough = self_inverse
        .iter()
        .all(|&i| v.count(i) >= 3 && v.count(i) % 2 == 1);
    settled && leading && !self_inverse.is_empty() && enough
}

/// A's reply under the three-residue plan after B removed `b_residue`.
pub fn xyz_next_move(
    plan: &mut XyzPlan,
    v: &ResidueVector,
    b_residue: u32,
) -> Result<u32, StrategyError> {
    let stuck = || {
        StrategyError::NoLegalResponse(format!(
            "three-residue plan {:?} has no reply to residue {b_residue}",
            plan.triple
        ))
    };
    if plan.phase == XyzPhase::AwaitingTrigger
        && b_residue != plan.opened
        && plan.triple.contains(&b_residue)
    {
        let third = plan
            .triple
            .iter()
            .copied()
            .find(|&r| r != plan.opened && r != b_residue)
            .expect("triple has three distinct residues");
        if v.count(third) == 0 {
            return Err(stuck());
        }
        plan.phase = XyzPhase::PostTrigger;
        return Ok(third);
    }
    pairing_reply(v, b_residue).ok_or_else(stuck)
}

/// With `d = 2` and three numbers left, remove one so the other two share
/// a parity.
pub fn endgame_d2_move(live: [u32; 3]) -> u32 {
    (0..3)
        .find(|&i| {
            let rest: Vec<u32> = (0..3).filter(|&j| j != i).map(|j| live[j]).collect();
            (rest[0] + rest[1]).is_multiple_of(2)
        })
        .map(|i| live[i])
        .expect("two of three numbers always share a parity")
}

/// Board sizes `n` for which A wins `Z(n, d)`, generated from `k`.
pub fn a_winning_n_values(d: u32, k: u32) -> Result<BTreeSet<u32>, StrategyError> {
    if d < 7 || k < 1 {
        return Err(StrategyError::DomainError(format!(
            "need d >= 7 and k >= 1, got d = {d}, k = {k}"
        )));
    }
    let values = if d.is_multiple_of(2) {
        vec![k * d - 1, (k + 1) * d + 1, (k + 3) * d - 3]
    } else {
        vec![
            (2 * k - 1) * d - 2,
            (2 * k - 1) * d,
            2 * k * d - 1,
            2 * k * d + 1,
            (2 * k + 1) * d + 2,
            (k + 1) * 2 * d - 3,
        ]
    };
    Ok(values.into_iter().collect())
}

/// Moduli `d` for which A is known to win `Z(n, d)` for every odd `n >= 5`
/// of this size, independent of any residue formula.
pub fn known_a_win_dset(n: u32) -> BTreeSet<u32> {
    let mut set: BTreeSet<u32> = [2, 3, (n - 1) / 2, n.div_ceil(2), n, n + 1, n + 2]
        .into_iter()
        .filter(|&d| d >= 2)
        .collect();
    if n >= 11 {
        set.extend([4, 5, 6]);
    }
    set
}

/// Plans that open with one removal and pair from then on, keyed by the
/// modulus relative to `n`.
fn single_opening(n: u32, m: u32) -> Option<StrategyPlan> {
    let opening = if 2 * m + 1 == n {
        1
    } else if m == n {
        0
    } else if m == n + 1 {
        n.div_ceil(2)
    } else if m == n + 2 {
        1
    } else {
        return None;
    };
    Some(StrategyPlan::pairing(m, opening))
}

/// Play the single-opening plan for modulus `m`, a proper multiple of `d`.
fn delegate(n: u32, d: u32, m: u32) -> Option<StrategyPlan> {
    if m == d || !m.is_multiple_of(d) {
        return None;
    }
    single_opening(n, m).map(|inner| StrategyPlan {
        modulus: d,
        opening: inner.opening,
        mode: PlanMode::Delegated(Box::new(inner)),
    })
}

fn small_modulus_plan(n: u32, d: u32) -> Option<StrategyPlan> {
    if n < 11 {
        return None;
    }
    match (d, n % d) {
        (4, 1) if ((n - 1) / 4).is_multiple_of(2) => delegate(n, d, (n - 1) / 2),
        (4, 1) => StrategyPlan::xyz(4, [0, 1, 2]),
        (5, 1) => delegate(n, d, (n - 1) / 2),
        (5, 2) => StrategyPlan::xyz(5, [0, 1, 2]),
        (6, 1) if ((n - 1) / 6).is_multiple_of(2) => Some(StrategyPlan::pairing(6, 1)),
        (6, 1) => StrategyPlan::xyz(6, [0, 1, 3]),
        (6, 3) if ((n - 3) / 6).is_multiple_of(2) => StrategyPlan::xyz(6, [1, 2, 3]),
        (6, 3) => StrategyPlan::xyz(6, [0, 1, 2]),
        _ => None,
    }
}

fn residue_formula_plan(n: u32, d: u32) -> Option<StrategyPlan> {
    if d < 7 {
        return None;
    }
    let rem = n % d;
    if d.is_multiple_of(2) {
        let half = d / 2;
        if rem == d - 1 {
            let k = (n + 1) / d;
            let opening = if k.is_multiple_of(2) { 0 } else { half };
            return Some(StrategyPlan::pairing(d, opening));
        }
        if rem == 1 && n > 2 * d {
            let k = (n - 1) / d - 1;
            return if k.is_multiple_of(2) {
                StrategyPlan::xyz(d, [0, 1, half])
            } else {
                Some(StrategyPlan::pairing(d, 1))
            };
        }
        if rem == d - 3 && n + 3 >= 4 * d {
            let k = (n + 3) / d - 3;
            return if k.is_multiple_of(2) {
                StrategyPlan::xyz(d, [1, 2, half])
            } else {
                StrategyPlan::xyz(d, [0, 1, 2])
            };
        }
    } else {
        let q = n / d;
        if rem == d - 2 && (q + 1) % 2 == 1 {
            return Some(StrategyPlan::pairing(d, 1));
        }
        if rem == 0 && q % 2 == 1 {
            return Some(StrategyPlan::pairing(d, 0));
        }
        if rem == d - 1 && (q + 1).is_multiple_of(2) {
            return Some(StrategyPlan::pairing(d, 0));
        }
        if rem == 1 && q.is_multiple_of(2) {
            return Some(StrategyPlan::pairing(d, 1));
        }
        if rem == 2 && n >= 3 * d + 2 && ((n - 2) / d) % 2 == 1 {
            return StrategyPlan::xyz(d, [0, 1, 2]);
        }
        if rem == d - 3 && n + 3 >= 4 * d && ((n + 3) / d).is_multiple_of(2) {
            return StrategyPlan::xyz(d, [0, 1, 2]);
        }
    }
    None
}

/// Checks that a prescribed plan meets its own preconditions on the
/// initial board.
fn holds_on_initial_board(config: &GameConfig, plan: &StrategyPlan) -> bool {
    let plan = plan.effective();
    let v = ResidueVector::from_numbers(1..=config.n(), plan.modulus);
    match (&plan.mode, plan.opening) {
        (PlanMode::Pairing, Some(r)) => v.count(r) > 0 && v.without(r).is_a_situation(),
        (PlanMode::Xyz(xyz), _) => xyz_applicable(&v, xyz.triple),
        (PlanMode::EndgameD2, _) => true,
        _ => false,
    }
}

/// The constructive plan for A in `config`, if one of the known winning
/// constructions covers it.
///
/// Cases are tried in a fixed order: `d = 2`; `d` a proper divisor of
/// `n`, `n + 1` or `n + 2`; the single-opening moduli near
/// `n`; the small moduli 4 to 6; and the residue families for `d >= 7`.
/// A prescribed plan that fails its own preconditions is reported through
/// the log and replaced by [`PlanMode::SolverBacked`].
pub fn opening_move(config: GameConfig) -> Option<StrategyPlan> {
    let (n, d) = (config.n(), config.d());
    if n % 2 == 0 || n < 5 {
        return None;
    }
    if d == 2 {
        return Some(StrategyPlan {
            modulus: 2,
            opening: None,
            mode: PlanMode::EndgameD2,
        });
    }
    let delegated = [n, n + 1, n + 2]
        .into_iter()
        .find_map(|m| delegate(n, d, m));
    let plan = delegated
        .or_else(|| single_opening(n, d))
        .or_else(|| small_modulus_plan(n, d))
        .or_else(|| residue_formula_plan(n, d))?;
    if holds_on_initial_board(&config, &plan) {
        Some(plan)
    } else {
        log::warn!(
            "prescribed plan {plan:?} for {config} fails its preconditions; using the solver"
        );
        Some(StrategyPlan::solver_backed(d))
    }
}

/// Runs a [`StrategyPlan`] for player A on concrete boards.
///
/// Residues chosen by the plan become numbers by taking the smallest live
/// number in that class.
#[derive(Debug, Clone)]
pub struct ConstructiveA {
    plan: StrategyPlan,
    solver: Option<Arc<Mutex<Solver>>>,
}

impl ConstructiveA {
    /// The constructive player for `config`, or `None` when no plan is
    /// known.
    pub fn new(config: GameConfig) -> Option<Self> {
        opening_move(config).map(|plan| Self::from_plan(config, plan))
    }

    pub fn from_plan(config: GameConfig, plan: StrategyPlan) -> Self {
        let plan = plan.effective().clone();
        let solver = matches!(plan.mode, PlanMode::SolverBacked)
            .then(|| Arc::new(Mutex::new(Solver::new(config))));
        Self { plan, solver }
    }

    /// A player that consults the exact solver on every move.
    pub fn solver_backed(config: GameConfig) -> Self {
        Self::from_plan(config, StrategyPlan::solver_backed(config.d()))
    }

    pub fn plan(&self) -> &StrategyPlan {
        &self.plan
    }

    fn residue_choice(&mut self, board: &BoardState) -> Result<Choice, StrategyError> {
        let modulus = self.plan.modulus;
        if board.removed().is_empty() {
            if let Some(r) = self.plan.opening {
                return Ok(Choice::Residue(r));
            }
        }
        let v = if modulus == board.modulus() {
            board.residues().clone()
        } else {
            ResidueVector::from_numbers(board.live().iter().copied(), modulus)
        };
        let last_b = board.last_removal().map(|m| m.number % modulus);
        match (&mut self.plan.mode, last_b) {
            (PlanMode::EndgameD2, _) => {
                if board.live().len() == 3 {
                    let live: Vec<u32> = board.live().iter().copied().collect();
                    Ok(Choice::Number(endgame_d2_move([live[0], live[1], live[2]])))
                } else {
                    Ok(Choice::Number(*board.live().first().expect("live numbers")))
                }
            }
            (PlanMode::SolverBacked, _) => {
                let solver = self
                    .solver
                    .as_ref()
                    .expect("solver-backed plan has a solver");
                let moves = solver
                    .lock()
                    .expect("solver lock")
                    .optimal_moves(&SolveState::from_board(board))?;
                moves
                    .first()
                    .copied()
                    .map(Choice::Residue)
                    .ok_or_else(|| StrategyError::NoLegalResponse("terminal position".into()))
            }
            (PlanMode::Pairing, Some(b)) => pairing_response(&v, b).map(Choice::Residue),
            (PlanMode::Xyz(xyz), Some(b)) => xyz_next_move(xyz, &v, b).map(Choice::Residue),
            (PlanMode::Delegated(_), _) => unreachable!("plans are flattened on construction"),
            (_, None) => Err(StrategyError::NoLegalResponse(
                "plan has no opening move".into(),
            )),
        }
    }
}

enum Choice {
    Residue(u32),
    Number(u32),
}

impl Strategy for ConstructiveA {
    fn next_move(&mut self, board: &BoardState) -> Result<u32, StrategyError> {
        if board.to_move() != Player::A || board.is_terminal() {
            return Err(StrategyError::NotMyTurn);
        }
        let modulus = self.plan.modulus;
        match self.residue_choice(board)? {
            Choice::Number(a) => Ok(a),
            Choice::Residue(r) => board.smallest_with_residue(r, modulus).ok_or_else(|| {
                StrategyError::NoLegalResponse(format!(
                    "no live number with residue {r} modulo {modulus}"
                ))
            }),
        }
    }
}
