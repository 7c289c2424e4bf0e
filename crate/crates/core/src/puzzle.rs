//! 8-puzzle board representation and move semantics.
//!
//! Cells are stored row-major with `0` for the blank. A [`MoveDir`] names the
//! direction the *blank* travels, so `Up` swaps the blank with the tile above it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SIDE: usize = 3;
pub const CELLS: usize = SIDE * SIDE;

/// Number of states with the goal's permutation parity (9! / 2).
pub const REACHABLE_STATES: u32 = 181_440;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveDir {
    Up,
    Down,
    Left,
    Right,
}

impl MoveDir {
    /// Canonical neighbor order shared by graph construction, DFS and the UI.
    pub const ALL: [MoveDir; 4] = [MoveDir::Up, MoveDir::Down, MoveDir::Left, MoveDir::Right];

    pub fn inverse(self) -> MoveDir {
        match self {
            MoveDir::Up => MoveDir::Down,
            MoveDir::Down => MoveDir::Up,
            MoveDir::Left => MoveDir::Right,
            MoveDir::Right => MoveDir::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MoveDir::Up => "up",
            MoveDir::Down => "down",
            MoveDir::Left => "left",
            MoveDir::Right => "right",
        }
    }

    /// Blank cell after moving from `blank`, if it stays on the board.
    fn target(self, blank: usize) -> Option<usize> {
        let (row, col) = (blank / SIDE, blank % SIDE);
        match self {
            MoveDir::Up if row > 0 => Some(blank - SIDE),
            MoveDir::Down if row + 1 < SIDE => Some(blank + SIDE),
            MoveDir::Left if col > 0 => Some(blank - 1),
            MoveDir::Right if col + 1 < SIDE => Some(blank + 1),
            _ => None,
        }
    }
}

impl fmt::Display for MoveDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoveDir {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "u" => Ok(MoveDir::Up),
            "down" | "d" => Ok(MoveDir::Down),
            "left" | "l" => Ok(MoveDir::Left),
            "right" | "r" => Ok(MoveDir::Right),
            other => Err(Error::InvalidState(format!("unknown move {other:?}"))),
        }
    }
}

/// Dense index of a reachable state, `0..REACHABLE_STATES`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One 3×3 tile configuration. Always a permutation of `0..=8`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PuzzleState {
    cells: [u8; CELLS],
}

impl PuzzleState {
    pub fn new(cells: [u8; CELLS]) -> Result<Self> {
        let mut seen = [false; CELLS];
        for &c in &cells {
            let slot = seen
                .get_mut(c as usize)
                .ok_or_else(|| Error::InvalidState(format!("cell value {c} out of range")))?;
            if *slot {
                return Err(Error::InvalidState(format!("cell value {c} repeated")));
            }
            *slot = true;
        }
        Ok(Self { cells })
    }

    /// Caller guarantees `cells` is a permutation of `0..=8`.
    pub(crate) fn from_cells_unchecked(cells: [u8; CELLS]) -> Self {
        debug_assert!(Self::new(cells).is_ok());
        Self { cells }
    }

    pub fn cells(&self) -> &[u8; CELLS] {
        &self.cells
    }

    pub fn blank(&self) -> usize {
        self.cells.iter().position(|&c| c == 0).expect("permutation contains blank")
    }

    /// Cell index of every value: `positions()[v]` is where tile `v` sits.
    pub fn positions(&self) -> [u8; CELLS] {
        let mut pos = [0u8; CELLS];
        for (cell, &v) in self.cells.iter().enumerate() {
            pos[v as usize] = cell as u8;
        }
        pos
    }
}

impl fmt::Display for PuzzleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.cells {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PuzzleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PuzzleState({self})")
    }
}

impl FromStr for PuzzleState {
    type Err = Error;

    /// Nine digits, row-major, `0` for the blank (e.g. `"123456780"`).
    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.trim().as_bytes();
        if bytes.len() != CELLS {
            return Err(Error::InvalidState(format!("{s:?} is not nine digits")));
        }
        let mut cells = [0u8; CELLS];
        for (slot, &b) in cells.iter_mut().zip(bytes) {
            if !b.is_ascii_digit() {
                return Err(Error::InvalidState(format!("{s:?} contains a non-digit")));
            }
            *slot = b - b'0';
        }
        PuzzleState::new(cells).map_err(|_| Error::InvalidState(format!("{s:?} is not a permutation of 012345678")))
    }
}

impl Serialize for PuzzleState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PuzzleState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tiles 1..8 in row-major order, blank bottom-right.
pub fn canonical_goal() -> PuzzleState {
    PuzzleState::from_cells_unchecked([1, 2, 3, 4, 5, 6, 7, 8, 0])
}

/// Legal blank moves in the fixed order Up, Down, Left, Right.
pub fn legal_moves(s: &PuzzleState) -> Vec<MoveDir> {
    let blank = s.blank();
    MoveDir::ALL.into_iter().filter(|d| d.target(blank).is_some()).collect()
}

pub fn apply_move(s: &PuzzleState, dir: MoveDir) -> Option<PuzzleState> {
    let blank = s.blank();
    let target = dir.target(blank)?;
    let mut cells = s.cells;
    cells.swap(blank, target);
    Some(PuzzleState::from_cells_unchecked(cells))
}

/// Iterates `(move, successor)` pairs in canonical move order.
pub fn successors(s: &PuzzleState) -> impl Iterator<Item = (MoveDir, PuzzleState)> + '_ {
    let blank = s.blank();
    MoveDir::ALL.into_iter().filter_map(move |d| {
        let target = d.target(blank)?;
        let mut cells = s.cells;
        cells.swap(blank, target);
        Some((d, PuzzleState::from_cells_unchecked(cells)))
    })
}

/// Parity of the inversion count over tiles, blank excluded.
pub fn tile_parity(s: &PuzzleState) -> u32 {
    let mut inversions = 0u32;
    let tiles = s.cells.iter().filter(|&&c| c != 0);
    for (i, &a) in tiles.clone().enumerate() {
        inversions += tiles.clone().skip(i + 1).filter(|&&b| b < a).count() as u32;
    }
    inversions & 1
}

/// On a 3×3 board the blank row does not affect solvability; only tile parity
/// relative to the canonical goal matters.
pub fn is_solvable(s: &PuzzleState) -> bool {
    tile_parity(s) == tile_parity(&canonical_goal())
}

pub fn manhattan(s: &PuzzleState, goal: &PuzzleState) -> u32 {
    let here = s.positions();
    let there = goal.positions();
    (1..CELLS)
        .map(|t| {
            let (a, b) = (here[t] as usize, there[t] as usize);
            ((a / SIDE).abs_diff(b / SIDE) + (a % SIDE).abs_diff(b % SIDE)) as u32
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> PuzzleState {
        s.parse().unwrap()
    }

    #[test]
    fn goal_is_canonical() {
        let g = canonical_goal();
        assert_eq!(g.cells(), &[1, 2, 3, 4, 5, 6, 7, 8, 0]);
        assert_eq!(manhattan(&g, &g), 0);
        assert!(is_solvable(&g));
    }

    #[test]
    fn legal_moves_by_blank_cell() {
        use MoveDir::*;
        assert_eq!(legal_moves(&st("123405678")), vec![Up, Down, Left, Right]);
        assert_eq!(legal_moves(&st("012345678")), vec![Down, Right]);
        assert_eq!(legal_moves(&st("102345678")), vec![Down, Left, Right]);
        assert_eq!(legal_moves(&canonical_goal()), vec![Up, Left]);
    }

    #[test]
    fn apply_move_examples() {
        let g = canonical_goal();
        assert_eq!(apply_move(&g, MoveDir::Up), Some(st("123450786")));
        assert_eq!(apply_move(&g, MoveDir::Down), None);
        assert_eq!(apply_move(&g, MoveDir::Right), None);
        let up = apply_move(&g, MoveDir::Up).unwrap();
        assert_eq!(apply_move(&up, MoveDir::Down), Some(g));
        assert_eq!(manhattan(&up, &g), 1);
    }

    #[test]
    fn solvability_examples() {
        assert!(is_solvable(&st("123456780")));
        assert!(!is_solvable(&st("213456780")));
        // blank position alone does not change tile parity
        assert!(is_solvable(&st("012345678")));
    }

    #[test]
    fn parse_rejects_non_permutations() {
        assert!("12345678".parse::<PuzzleState>().is_err());
        assert!("1234567800".parse::<PuzzleState>().is_err());
        assert!("123456788".parse::<PuzzleState>().is_err());
        assert!("12345678a".parse::<PuzzleState>().is_err());
        assert!("123456789".parse::<PuzzleState>().is_err());
        assert_eq!(st("123456780").to_string(), "123456780");
    }

    #[test]
    fn new_rejects_out_of_range() {
        assert!(PuzzleState::new([1, 2, 3, 4, 5, 6, 7, 8, 9]).is_err());
        assert!(PuzzleState::new([0; 9]).is_err());
    }

    #[test]
    fn successors_match_apply_move() {
        let s = st("413026758");
        let via_succ: Vec<_> = successors(&s).collect();
        let via_apply: Vec<_> = legal_moves(&s).into_iter().map(|d| (d, apply_move(&s, d).unwrap())).collect();
        assert_eq!(via_succ, via_apply);
    }

    #[test]
    fn move_dir_round_trips_text() {
        for d in MoveDir::ALL {
            assert_eq!(d.as_str().parse::<MoveDir>().unwrap(), d);
            assert_eq!(d.inverse().inverse(), d);
        }
    }
}
