//! Engine for the complete 8-puzzle state space: ranking, CSR graph
//! construction, traced BFS/DFS/A* sessions, spatial layouts and the binary
//! file formats shared with the explorer.

pub mod error;
pub mod export;
pub mod format;
pub mod graph;
pub mod layout;
pub mod puzzle;
pub mod rank;
pub mod search;

pub use error::{Error, Result};
pub use graph::{build_graph, build_graph_bfs, check_invariants, compute_stats, GraphStats, StateGraph};
pub use layout::{LayoutKind, LayoutParams, LayoutResult};
pub use puzzle::{apply_move, canonical_goal, is_solvable, legal_moves, manhattan, MoveDir, PuzzleState, StateId};
pub use rank::{rank, unrank};
pub use search::{
    bfs_distance_map, EventKind, SearchAlgo, SearchResult, SearchSession, SessionStatus, TraceEvent,
};
