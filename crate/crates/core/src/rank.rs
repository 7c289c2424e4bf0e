//! Dense ranking of solvable states.
//!
//! The id of a state is its ordinal position among *solvable* permutations in
//! lexicographic order, so ids fill `0..181_440` with no holes. Rank and unrank
//! walk the cells left to right and count, for every smaller candidate at a
//! position, how many solvable completions exist below it.
//!
//! The tile-inversion parity of a full arrangement splits into a part fixed by
//! the placed prefix (each placed tile contributes the number of smaller tiles
//! not yet placed before it) and the inversions among the remaining tiles. If
//! at least two tiles remain, swapping them pairs up the completions so exactly
//! half are solvable; otherwise every completion shares the prefix parity.

use crate::error::{Error, Result};
use crate::puzzle::{is_solvable, PuzzleState, StateId, CELLS, REACHABLE_STATES};

const FACTORIAL: [u32; CELLS + 1] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880];

/// Required tile parity (that of the canonical goal).
const TARGET_PARITY: u32 = 0;

#[derive(Clone, Copy)]
struct Prefix {
    used: [bool; CELLS],
    /// Inversion parity contributed by the placed tiles.
    parity: u32,
    /// Remaining unplaced tiles (blank excluded).
    tiles_left: u32,
    placed: usize,
}

impl Prefix {
    fn new() -> Self {
        Prefix { used: [false; CELLS], parity: 0, tiles_left: (CELLS - 1) as u32, placed: 0 }
    }

    /// Smaller tiles still unplaced when `v` is placed next.
    fn digit(&self, v: u8) -> u32 {
        if v == 0 {
            return 0;
        }
        (1..v).filter(|&t| !self.used[t as usize]).count() as u32
    }

    /// Solvable completions of this prefix extended by `v`.
    fn completions_with(&self, v: u8) -> u32 {
        let rest = CELLS - self.placed - 1;
        let tiles = self.tiles_left - u32::from(v != 0);
        if tiles >= 2 {
            FACTORIAL[rest] / 2
        } else if (self.parity + self.digit(v)) & 1 == TARGET_PARITY {
            FACTORIAL[rest]
        } else {
            0
        }
    }

    fn place(&mut self, v: u8) {
        self.parity = (self.parity + self.digit(v)) & 1;
        self.used[v as usize] = true;
        if v != 0 {
            self.tiles_left -= 1;
        }
        self.placed += 1;
    }
}

pub fn rank(s: &PuzzleState) -> Result<StateId> {
    if !is_solvable(s) {
        return Err(Error::UnreachableState(s.to_string()));
    }
    let mut prefix = Prefix::new();
    let mut id = 0u32;
    for &cell in s.cells() {
        for v in 0..cell {
            if !prefix.used[v as usize] {
                id += prefix.completions_with(v);
            }
        }
        prefix.place(cell);
    }
    Ok(StateId(id))
}

pub fn unrank(id: StateId) -> Result<PuzzleState> {
    if id.0 >= REACHABLE_STATES {
        return Err(Error::IdOutOfRange { id: id.0.into(), limit: REACHABLE_STATES });
    }
    let mut remaining = id.0;
    let mut prefix = Prefix::new();
    let mut cells = [0u8; CELLS];
    for slot in cells.iter_mut() {
        let mut chosen = None;
        for v in 0..CELLS as u8 {
            if prefix.used[v as usize] {
                continue;
            }
            let count = prefix.completions_with(v);
            if remaining < count {
                chosen = Some(v);
                break;
            }
            remaining -= count;
        }
        let v = chosen.expect("id below REACHABLE_STATES always has a completion");
        *slot = v;
        prefix.place(v);
    }
    Ok(PuzzleState::from_cells_unchecked(cells))
}
