//! Winner tables over ranges of `(n, d)` and their conformance against the
//! known constructive results.

use std::collections::BTreeMap;
use std::io;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{GameConfig, Player};
use crate::solver::{SolveError, Solver, SolverOptions};
use crate::strategy_a::a_winning_n_values;

/// A known result covering a cell, and the winner it guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `d` is `(n-1)/2`, `(n+1)/2`, `n`, `n+1` or `n+2`.
    NearN,
    /// `d <= 6`.
    SmallModulus,
    /// `n` is produced by one of the residue formulas for `d >= 7`.
    ResidueFamily,
    /// `n` even.
    EvenBoard,
    /// `(n+3)/2 <= d <= n-1`.
    UpperHalf,
    /// `d >= n+3`.
    LargeModulus,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::NearN => "a:near-n",
            Family::SmallModulus => "a:small-modulus",
            Family::ResidueFamily => "a:residue-family",
            Family::EvenBoard => "b:even-board",
            Family::UpperHalf => "b:upper-half",
            Family::LargeModulus => "b:large-modulus",
        }
    }

    pub fn winner(self) -> Player {
        match self {
            Family::NearN | Family::SmallModulus | Family::ResidueFamily => Player::A,
            Family::EvenBoard | Family::UpperHalf | Family::LargeModulus => Player::B,
        }
    }
}

pub const OPEN_BAND: &str = "open-band";
pub const UNCLASSIFIED: &str = "unclassified";

/// Whether some residue formula for `d` produces `n`.
pub fn in_residue_family(n: u32, d: u32) -> bool {
    if d < 7 {
        return false;
    }
    // Every formula grows by at least d per step of k.
    (1..=n / d + 1).any(|k| a_winning_n_values(d, k).is_ok_and(|set| set.contains(&n)))
}

/// Every known result that predicts the winner of `config`.
pub fn predictions(config: &GameConfig) -> Vec<Family> {
    let (n, d) = (config.n(), config.d());
    let mut found = Vec::new();
    if n % 2 == 0 {
        found.push(Family::EvenBoard);
        return found;
    }
    if n < 5 {
        return found;
    }
    if [(n - 1) / 2, n.div_ceil(2), n, n + 1, n + 2].contains(&d) {
        found.push(Family::NearN);
    }
    if d <= 3 || (d <= 6 && n >= 11) {
        found.push(Family::SmallModulus);
    }
    if in_residue_family(n, d) {
        found.push(Family::ResidueFamily);
    }
    if n + 3 <= 2 * d && d < n {
        found.push(Family::UpperHalf);
    }
    if d >= n + 3 {
        found.push(Family::LargeModulus);
    }
    found
}

/// Odd `n` with `7 <= d <= (n-3)/2`, where no general winner is known.
pub fn in_open_band(n: u32, d: u32) -> bool {
    n % 2 == 1 && d >= 7 && 2 * d + 3 <= n
}

/// The annotation written for a cell: the first predicting family, or the
/// open band, or `unclassified`.
pub fn annotation(config: &GameConfig) -> &'static str {
    match predictions(config).first() {
        Some(family) => family.tag(),
        None if in_open_band(config.n(), config.d()) => OPEN_BAND,
        None => UNCLASSIFIED,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellValue {
    Solved(Player),
    BudgetExceeded { bound: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub config: GameConfig,
    pub value: CellValue,
    pub predictions: Vec<Family>,
    pub states_visited: u64,
}

impl Cell {
    pub fn winner(&self) -> Option<Player> {
        match self.value {
            CellValue::Solved(p) => Some(p),
            CellValue::BudgetExceeded { .. } => None,
        }
    }

    /// Predictions this cell contradicts, either by its solved value or
    /// because two predictions disagree with each other.
    pub fn conflicts(&self) -> Vec<Family> {
        let reference = self
            .winner()
            .or_else(|| self.predictions.first().map(|f| f.winner()));
        self.predictions
            .iter()
            .copied()
            .filter(|f| Some(f.winner()) != reference)
            .collect()
    }

    pub fn row(&self) -> Row {
        Row {
            n: self.config.n(),
            d: self.config.d(),
            winner: match self.value {
                CellValue::Solved(p) => p.to_string(),
                CellValue::BudgetExceeded { .. } => "budget_exceeded".to_string(),
            },
            annotation: annotation(&self.config).to_string(),
            states_visited: self.states_visited,
        }
    }
}

/// One exported line; field order is the column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub n: u32,
    pub d: u32,
    pub winner: String,
    pub annotation: String,
    pub states_visited: u64,
}

#[derive(Debug, Clone, Default)]
pub struct WinnerTable {
    /// Sorted by `(n, d)`.
    pub cells: Vec<Cell>,
}

/// Per-family totals of a table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FamilySummary {
    pub cells: u64,
    pub confirmed: u64,
    pub conflicts: u64,
    pub budget_exceeded: u64,
}

impl WinnerTable {
    pub fn cell(&self, n: u32, d: u32) -> Option<&Cell> {
        self.cells
            .binary_search_by_key(&(n, d), |c| (c.config.n(), c.config.d()))
            .ok()
            .map(|i| &self.cells[i])
    }

    pub fn conflicts(&self) -> impl Iterator<Item = (&Cell, Vec<Family>)> {
        self.cells
            .iter()
            .map(|c| (c, c.conflicts()))
            .filter(|(_, f)| !f.is_empty())
    }

    pub fn budget_exceeded(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.winner().is_none())
    }

    /// Totals per annotation tag. A cell with several predictions counts
    /// once under each of them.
    pub fn summary(&self) -> BTreeMap<&'static str, FamilySummary> {
        let mut out: BTreeMap<&'static str, FamilySummary> = BTreeMap::new();
        for cell in &self.cells {
            let conflicts = cell.conflicts();
            let tally = |entry: &mut FamilySummary, conflicted: bool| {
                entry.cells += 1;
                match cell.winner() {
                    None => entry.budget_exceeded += 1,
                    Some(_) if conflicted => entry.conflicts += 1,
                    Some(_) => entry.confirmed += 1,
                }
            };
            if cell.predictions.is_empty() {
                tally(out.entry(annotation(&cell.config)).or_default(), false);
            }
            for family in &cell.predictions {
                tally(
                    out.entry(family.tag()).or_default(),
                    conflicts.contains(family),
                );
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Row> {
        self.cells.iter().map(Cell::row).collect()
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(out);
        for row in self.rows() {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_json<W: io::Write>(&self, out: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(out, &self.rows())
    }
}

/// Solves one cell.
pub fn solve_cell(config: GameConfig, options: SolverOptions) -> Cell {
    let mut solver = Solver::with_options(config, options);
    let value = match solver.solve() {
        Ok(v) => CellValue::Solved(v.winner),
        Err(SolveError::BudgetExceeded { bound, .. }) => CellValue::BudgetExceeded { bound },
        Err(e @ SolveError::InvalidState { .. }) => unreachable!("initial state: {e}"),
    };
    Cell {
        config,
        value,
        predictions: predictions(&config),
        states_visited: solver.states_visited() as u64,
    }
}

/// Solves every valid cell of the ranges in parallel. Pairs with `n < 4` or
/// `d < 2` are skipped.
pub fn winner_table(
    n_range: RangeInclusive<u32>,
    d_range: RangeInclusive<u32>,
    options: SolverOptions,
) -> WinnerTable {
    let configs: Vec<GameConfig> = n_range
        .flat_map(|n| {
            d_range
                .clone()
                .filter_map(move |d| GameConfig::new(n, d).ok())
        })
        .collect();
    let mut cells: Vec<Cell> = configs
        .into_par_iter()
        .map(|config| solve_cell(config, options))
        .collect();
    cells.sort_by_key(|c| (c.config.n(), c.config.d()));
    WinnerTable { cells }
}
