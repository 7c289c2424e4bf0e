//! The full reachable state space as an immutable CSR adjacency structure.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::puzzle::{successors, PuzzleState, StateId, CELLS, REACHABLE_STATES};
use crate::rank::{rank, unrank};
use crate::search::bfs_distance_map;

/// Undirected move edges in the reachable space.
pub const UNDIRECTED_EDGES: u32 = 241_920;
/// Each undirected edge is stored once per endpoint.
pub const DIRECTED_ENTRIES: u32 = 2 * UNDIRECTED_EDGES;

/// Adjacency of node `u` is `neighbors[offsets[u]..offsets[u + 1]]`, sorted
/// ascending and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateGraph {
    offsets: Vec<u32>,
    neighbors: Vec<StateId>,
    goal_id: StateId,
}

impl StateGraph {
    /// Assembles a graph from raw CSR arrays, checking only the structural
    /// properties needed for safe slicing.
    pub fn from_parts(offsets: Vec<u32>, neighbors: Vec<StateId>, goal_id: StateId) -> Result<Self> {
        let malformed = |m: &str| Err(Error::Malformed(m.to_owned()));
        if offsets.is_empty() || offsets[0] != 0 {
            return malformed("offsets must start at 0");
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return malformed("offsets must be non-decreasing");
        }
        if *offsets.last().unwrap() as usize != neighbors.len() {
            return malformed("final offset must equal neighbor count");
        }
        let n = (offsets.len() - 1) as u32;
        if neighbors.iter().any(|v| v.0 >= n) {
            return malformed("neighbor id out of range");
        }
        if goal_id.0 >= n {
            return malformed("goal id out of range");
        }
        Ok(StateGraph { offsets, neighbors, goal_id })
    }

    pub fn node_count(&self) -> u32 {
        (self.offsets.len() - 1) as u32
    }

    pub fn directed_entry_count(&self) -> u32 {
        self.neighbors.len() as u32
    }

    pub fn undirected_edge_count(&self) -> u32 {
        self.directed_entry_count() / 2
    }

    pub fn goal_id(&self) -> StateId {
        self.goal_id
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn neighbor_entries(&self) -> &[StateId] {
        &self.neighbors
    }

    pub fn check_id(&self, id: StateId) -> Result<()> {
        if id.0 < self.node_count() {
            Ok(())
        } else {
            Err(Error::IdOutOfRange { id: id.0.into(), limit: self.node_count() })
        }
    }

    pub fn neighbors_of(&self, id: StateId) -> Result<&[StateId]> {
        self.check_id(id)?;
        Ok(self.adjacent(id))
    }

    /// Unchecked variant for hot loops; panics on an out-of-range id.
    pub(crate) fn adjacent(&self, id: StateId) -> &[StateId] {
        let u = id.index();
        &self.neighbors[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    pub fn degree(&self, id: StateId) -> Result<usize> {
        self.neighbors_of(id).map(<[StateId]>::len)
    }

    pub fn has_edge(&self, u: StateId, v: StateId) -> bool {
        u.0 < self.node_count() && self.adjacent(u).binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            let u = StateId(u);
            self.adjacent(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }
}

/// Builds the graph by sweeping every dense id and ranking its move successors.
///
/// The node set does not depend on `goal` (any solvable goal has the same
/// parity class); only `goal_id` does.
pub fn build_graph(goal: &PuzzleState) -> Result<StateGraph> {
    let goal_id = rank(goal)?;
    let rows: Vec<([StateId; 4], u8)> = (0..REACHABLE_STATES)
        .into_par_iter()
        .map(|id| {
            let state = unrank(StateId(id)).expect("id in range");
            let mut row = [StateId(0); 4];
            let mut len = 0u8;
            for (_, next) in successors(&state) {
                row[len as usize] = rank(&next).expect("moves preserve parity");
                len += 1;
            }
            row[..len as usize].sort_unstable();
            (row, len)
        })
        .collect();

    let mut offsets = Vec::with_capacity(rows.len() + 1);
    let mut neighbors = Vec::with_capacity(DIRECTED_ENTRIES as usize);
    offsets.push(0);
    for (row, len) in &rows {
        neighbors.extend_from_slice(&row[..*len as usize]);
        offsets.push(neighbors.len() as u32);
    }
    StateGraph::from_parts(offsets, neighbors, goal_id)
}

/// Builds the graph by breadth-first expansion from `goal`, deduplicating by
/// state value and assigning ids by sorting the discovered states. Shares no
/// code with [`rank`], so it serves as an independent construction route.
pub fn build_graph_bfs(goal: &PuzzleState) -> StateGraph {
    let mut index: HashMap<PuzzleState, usize> = HashMap::new();
    let mut states = vec![*goal];
    let mut adjacency: Vec<Vec<usize>> = Vec::new();
    index.insert(*goal, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let mut row = Vec::with_capacity(4);
        let current = states[u];
        for (_, next) in successors(&current) {
            let v = *index.entry(next).or_insert_with(|| {
                states.push(next);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            row.push(v);
        }
        adjacency.push(row);
    }

    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_unstable_by_key(|&i| *states[i].cells());
    let mut dense = vec![0u32; states.len()];
    for (id, &i) in order.iter().enumerate() {
        dense[i] = id as u32;
    }

    let mut offsets = Vec::with_capacity(states.len() + 1);
    let mut neighbors = Vec::with_capacity(DIRECTED_ENTRIES as usize);
    offsets.push(0);
    for &i in &order {
        let start = neighbors.len();
        neighbors.extend(adjacency[i].iter().map(|&v| StateId(dense[v])));
        neighbors[start..].sort_unstable();
        offsets.push(neighbors.len() as u32);
    }
    StateGraph::from_parts(offsets, neighbors, StateId(dense[0])).expect("bfs construction is well formed")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub node_count: u32,
    pub undirected_edge_count: u32,
    pub directed_entry_count: u32,
    pub degree_histogram: BTreeMap<u32, u32>,
    /// Number of states with the blank in each cell.
    pub blank_cell_census: [u32; CELLS],
    pub eccentricity_from_goal: u32,
    /// `depth_histogram[k]` = states at BFS depth `k` from the goal.
    pub depth_histogram: Vec<u32>,
}

pub fn compute_stats(g: &StateGraph) -> GraphStats {
    let mut degree_histogram = BTreeMap::new();
    for u in 0..g.node_count() {
        *degree_histogram.entry(g.adjacent(StateId(u)).len() as u32).or_insert(0) += 1;
    }

    let blank_cell_census = (0..g.node_count())
        .into_par_iter()
        .filter_map(|u| unrank(StateId(u)).ok())
        .fold(|| [0u32; CELLS], |mut acc, s| {
            acc[s.blank()] += 1;
            acc
        })
        .reduce(|| [0u32; CELLS], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });

    let depths = bfs_distance_map(g, g.goal_id()).expect("goal id validated at construction");
    let reached = depths.iter().filter(|&&d| d != u32::MAX);
    let eccentricity_from_goal = reached.clone().copied().max().unwrap_or(0);
    let mut depth_histogram = vec![0u32; eccentricity_from_goal as usize + 1];
    for &d in reached {
        depth_histogram[d as usize] += 1;
    }

    GraphStats {
        node_count: g.node_count(),
        undirected_edge_count: g.undirected_edge_count(),
        directed_entry_count: g.directed_entry_count(),
        degree_histogram,
        blank_cell_census,
        eccentricity_from_goal,
        depth_histogram,
    }
}

/// Full structural validation. Returns one message per violated invariant.
pub fn check_invariants(g: &StateGraph) -> Vec<String> {
    let mut problems = Vec::new();
    let n = g.node_count();
    if n != REACHABLE_STATES {
        problems.push(format!("node_count {n} != {REACHABLE_STATES}"));
    }
    if g.directed_entry_count() != DIRECTED_ENTRIES {
        problems.push(format!("directed entries {} != {DIRECTED_ENTRIES}", g.directed_entry_count()));
    }

    let mut unsorted = 0u32;
    let mut bad_degree = 0u32;
    let mut asymmetric = 0u32;
    for u in (0..n).map(StateId) {
        let row = g.adjacent(u);
        if row.windows(2).any(|w| w[0] >= w[1]) {
            unsorted += 1;
        }
        if !(2..=4).contains(&row.len()) {
            bad_degree += 1;
        }
        asymmetric += row.iter().filter(|&&v| v == u || !g.has_edge(v, u)).count() as u32;
    }
    if unsorted > 0 {
        problems.push(format!("{unsorted} adjacency rows not strictly ascending"));
    }
    if bad_degree > 0 {
        problems.push(format!("{bad_degree} nodes with degree outside 2..=4"));
    }
    if asymmetric > 0 {
        problems.push(format!("{asymmetric} directed entries without a reverse entry"));
    }

    if n == REACHABLE_STATES {
        let mismatched = (0..n)
            .into_par_iter()
            .filter(|&u| {
                let state = unrank(StateId(u)).expect("in range");
                let mut expected: Vec<StateId> = successors(&state).filter_map(|(_, s)| rank(&s).ok()).collect();
                expected.sort_unstable();
                expected.as_slice() != g.adjacent(StateId(u))
            })
            .count();
        if mismatched > 0 {
            problems.push(format!("{mismatched} adjacency rows disagree with move semantics"));
        }
    }

    if let Ok(depths) = bfs_distance_map(g, g.goal_id()) {
        let unreached = depths.iter().filter(|&&d| d == u32::MAX).count();
        if unreached > 0 {
            problems.push(format!("{unreached} nodes unreachable from goal"));
        }
    }
    problems
}
