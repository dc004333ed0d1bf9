//! The crossing-out game Z(n, d): rules, strategies for both players, an
//! exact solver, winner tables and game sessions.

pub mod game;
pub mod registry;
pub mod session;
pub mod solver;
pub mod strategy;
pub mod strategy_a;
pub mod strategy_b;
pub mod table;
pub mod verify;

/// Runs the guide's code blocks as doctests.
#[cfg(doctest)]
mod guide {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub struct $name;
        };
    }

    chapter!(Introduction, "introduction.md");
    chapter!(Rules, "rules.md");
    chapter!(Residues, "residues.md");
    chapter!(FirstPlayer, "first-player.md");
    chapter!(SecondPlayer, "second-player.md");
    chapter!(Solver, "solver.md");
    chapter!(WinnerTable, "winner-table.md");
    chapter!(Playing, "playing.md");
}
