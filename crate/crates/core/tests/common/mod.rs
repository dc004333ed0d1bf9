//! Oracles that work on the numbers themselves and share no code with the
//! library.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Exact minimax on concrete boards. Bit `i - 1` of a mask marks `i` live.
pub struct ConcreteOracle {
    n: u32,
    d: u32,
    memo: Vec<u8>,
}

impl ConcreteOracle {
    pub fn new(n: u32, d: u32) -> Self {
        assert!(n <= 20, "the concrete oracle is exponential in n");
        Self {
            n,
            d,
            memo: vec![0; 1 << n],
        }
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    /// Whether the first player wins from the full board.
    pub fn a_wins_game(&mut self) -> bool {
        self.a_wins(self.full_mask())
    }

    pub fn a_wins(&mut self, mask: u32) -> bool {
        let count = mask.count_ones();
        if count == 2 {
            let numbers = numbers_of(mask);
            return (numbers[0] + numbers[1]).is_multiple_of(self.d);
        }
        match self.memo[mask as usize] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let a_to_move = (self.n - count).is_multiple_of(2);
        let mut result = !a_to_move;
        for number in numbers_of(mask) {
            let child = self.a_wins(mask & !(1 << (number - 1)));
            if child == a_to_move {
                result = a_to_move;
                break;
            }
        }
        self.memo[mask as usize] = if result { 2 } else { 1 };
        result
    }
}

pub fn numbers_of(mask: u32) -> Vec<u32> {
    (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| i + 1)
        .collect()
}

pub fn mask_of<'a>(numbers: impl IntoIterator<Item = &'a u32>) -> u32 {
    numbers.into_iter().fold(0, |m, &a| m | 1 << (a - 1))
}

/// Live numbers without a partner completing a sum divisible by `d`,
/// by scanning all pairs.
pub fn brute_superfluous(live: &[u32], d: u32) -> BTreeSet<u32> {
    live.iter()
        .copied()
        .filter(|&a| !live.iter().any(|&b| b != a && (a + b) % d == 0))
        .collect()
}

/// Residue counts of `1..=n` by counting.
pub fn brute_counts(n: u32, d: u32) -> Vec<u32> {
    let mut counts = vec![0; d as usize];
    for a in 1..=n {
        counts[(a % d) as usize] += 1;
    }
    counts
}

/// The A-situation test written out from its definition with explicit
/// inverse residues.
pub fn brute_a_situation(counts: &[u32]) -> bool {
    let d = counts.len();
    (0..d).all(|r| {
        let inverse = (d - r) % d;
        if inverse == r {
            counts[r].is_multiple_of(2)
        } else {
            counts[r] == counts[inverse]
        }
    })
}

/// Plain minimax on residue counts with no symmetry reduction. The mover
/// is `A` when `n - total` is even.
pub struct PlainResidueOracle {
    n: u32,
    memo: std::collections::HashMap<Vec<u32>, bool>,
}

impl PlainResidueOracle {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            memo: Default::default(),
        }
    }

    pub fn a_wins(&mut self, counts: &[u32]) -> bool {
        let d = counts.len();
        let total: u32 = counts.iter().sum();
        if total == 2 {
            let residues: Vec<usize> = (0..d)
                .flat_map(|r| std::iter::repeat_n(r, counts[r] as usize))
                .collect();
            return (residues[0] + residues[1]).is_multiple_of(d);
        }
        if let Some(&v) = self.memo.get(counts) {
            return v;
        }
        let a_to_move = (self.n - total).is_multiple_of(2);
        let mut result = !a_to_move;
        let mut child = counts.to_vec();
        for r in 0..d {
            if counts[r] == 0 {
                continue;
            }
            child[r] -= 1;
            let value = self.a_wins(&child);
            child[r] += 1;
            if value == a_to_move {
                result = a_to_move;
                break;
            }
        }
        self.memo.insert(counts.to_vec(), result);
        result
    }
}
