//! Variants offered for play against the bot.
//!
//! The list holds every `Z(n, d)` with odd `n` in `5..=25` and
//! `2 <= d <= n + 3` that the first player wins, so a perfect human always
//! has a way to beat the bot. It is shipped precomputed and regenerated with
//! [`compute_registry`].

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{GameConfig, Player};
use crate::solver::{SolveError, Solver};

pub const MIN_N: u32 = 5;
pub const MAX_N: u32 = 25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registry {
    pub rule: String,
    pub count: usize,
    pub variants: Vec<GameConfig>,
}

impl Registry {
    pub fn contains(&self, config: &GameConfig) -> bool {
        self.variants.binary_search(config).is_ok()
    }

    /// The shipped file layout: one variant per line.
    pub fn to_file_json(&self) -> String {
        let lines: Vec<String> = self
            .variants
            .iter()
            .map(|c| format!("    {{\"n\": {}, \"d\": {}}}", c.n(), c.d()))
            .collect();
        format!(
            "{{\n  \"rule\": {},\n  \"count\": {},\n  \"variants\": [\n{}\n  ]\n}}\n",
            serde_json::Value::from(self.rule.as_str()),
            self.count,
            lines.join(",\n")
        )
    }
}

pub const RULE: &str = "odd n in 5..=25, d in 2..=n+3, first player wins";

const SHIPPED: &str = include_str!("../data/variants.json");

/// The shipped registry.
pub fn registry() -> &'static Registry {
    static CELL: OnceLock<Registry> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(SHIPPED).expect("shipped registry parses"))
}

pub fn is_playable_vs_bot(config: &GameConfig) -> bool {
    registry().contains(config)
}

/// Solves every candidate variant and collects the first-player wins.
pub fn compute_registry() -> Result<Registry, SolveError> {
    let candidates: Vec<GameConfig> = (MIN_N..=MAX_N)
        .step_by(2)
        .flat_map(|n| (2..=n + 3).map(move |d| GameConfig::new(n, d).expect("n >= 5")))
        .collect();
    let wins: Vec<Option<GameConfig>> = candidates
        .into_par_iter()
        .map(|config| {
            let value = Solver::new(config).solve()?;
            Ok((value.winner == Player::A).then_some(config))
        })
        .collect::<Result<_, SolveError>>()?;
    let mut variants: Vec<GameConfig> = wins.into_iter().flatten().collect();
    variants.sort();
    Ok(Registry {
        rule: RULE.to_string(),
        count: variants.len(),
        variants,
    })
}
