#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use atlas_core::{build_graph, canonical_goal, PuzzleState, StateGraph};
use itertools::Itertools;

pub fn graph() -> Arc<StateGraph> {
    static GRAPH: OnceLock<Arc<StateGraph>> = OnceLock::new();
    GRAPH.get_or_init(|| Arc::new(build_graph(&canonical_goal()).unwrap())).clone()
}

/// Parity of the tile sequence by counting selection-sort swaps.
pub fn swap_parity(cells: &[u8; 9]) -> u32 {
    let mut tiles: Vec<u8> = cells.iter().copied().filter(|&c| c != 0).collect();
    let mut swaps = 0;
    for i in 0..tiles.len() {
        let min = (i..tiles.len()).min_by_key(|&j| tiles[j]).unwrap();
        if min != i {
            tiles.swap(i, min);
            swaps += 1;
        }
    }
    swaps & 1
}

/// Every solvable permutation in lexicographic order.
pub fn solvable_in_lex_order() -> Vec<[u8; 9]> {
    (0u8..9)
        .permutations(9)
        .map(|p| <[u8; 9]>::try_from(p).unwrap())
        .filter(|p| swap_parity(p) == 0)
        .collect()
}

pub fn neighbors_by_hand(cells: &[u8; 9]) -> Vec<[u8; 9]> {
    let b = cells.iter().position(|&c| c == 0).unwrap() as i32;
    let (r, c) = (b / 3, b % 3);
    [(-1, 0), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter_map(|(dr, dc)| {
            let (rr, cc) = (r + dr, c + dc);
            ((0..3).contains(&rr) && (0..3).contains(&cc)).then(|| {
                let mut next = *cells;
                next.swap(b as usize, (rr * 3 + cc) as usize);
                next
            })
        })
        .collect()
}

/// BFS over raw cell arrays, independent of the graph and rank code.
pub fn oracle_distances(from: &PuzzleState) -> HashMap<[u8; 9], u32> {
    let mut dist = HashMap::new();
    dist.insert(*from.cells(), 0);
    let mut queue = VecDeque::from([*from.cells()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for v in neighbors_by_hand(&u) {
            dist.entry(v).or_insert_with(|| {
                queue.push_back(v);
                d + 1
            });
        }
    }
    dist
}

/// Small deterministic generator for sampling ids in tests.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u32) -> u32 {
        (self.next() % u64::from(n)) as u32
    }
}
