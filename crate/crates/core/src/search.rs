//! BFS, DFS and A* as resumable sessions emitting one trace event per step.
//!
//! A session is seeded with a `Discover` of the start node. Each subsequent
//! step yields either a queued `Discover`, or pops the frontier and yields an
//! `Expand`. The goal test happens on expansion: expanding the goal queues a
//! final `Goal` event. An empty frontier yields `Exhausted`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::puzzle::{manhattan, PuzzleState, StateId};
use crate::rank::unrank;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchAlgo {
    Bfs,
    Dfs,
    #[serde(alias = "a*")]
    AStar,
}

impl SearchAlgo {
    pub const ALL: [SearchAlgo; 3] = [SearchAlgo::Bfs, SearchAlgo::Dfs, SearchAlgo::AStar];

    pub fn as_str(self) -> &'static str {
        match self {
            SearchAlgo::Bfs => "bfs",
            SearchAlgo::Dfs => "dfs",
            SearchAlgo::AStar => "astar",
        }
    }
}

impl fmt::Display for SearchAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(SearchAlgo::Bfs),
            "dfs" => Ok(SearchAlgo::Dfs),
            "astar" | "a*" => Ok(SearchAlgo::AStar),
            other => Err(Error::InvalidState(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Discover,
    Expand,
    Goal,
    Exhausted,
}

/// Field order matches the JSONL trace format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: EventKind,
    pub node: StateId,
    pub parent: Option<StateId>,
    pub g: u32,
    pub h: u32,
    pub f: u32,
}

impl TraceEvent {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events always serialize")
    }
}

/// Writes events as newline-delimited JSON.
pub fn write_trace<'a, W: Write>(mut out: W, events: impl IntoIterator<Item = &'a TraceEvent>) -> io::Result<()> {
    for ev in events {
        writeln!(out, "{}", ev.to_json_line())?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Running,
    Succeeded,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub found: bool,
    pub path: Vec<StateId>,
    pub expanded_count: u64,
    pub discovered_count: u64,
}

impl SearchResult {
    /// Number of moves on the path (`path.len() - 1`), if found.
    pub fn moves(&self) -> Option<usize> {
        self.found.then(|| self.path.len() - 1)
    }
}

enum Frontier {
    Fifo(VecDeque<StateId>),
    Lifo(Vec<StateId>),
    /// Keyed by (f, h, insertion sequence). Stale entries are skipped on pop.
    Priority(BinaryHeap<Reverse<(u32, u32, u64, u32)>>),
}

pub struct SearchSession {
    graph: Arc<StateGraph>,
    algo: SearchAlgo,
    start: StateId,
    goal: StateId,
    goal_state: PuzzleState,
    status: SessionStatus,
    started: bool,
    next_step: u64,
    pending: VecDeque<TraceEvent>,
    frontier: Frontier,
    cost: Vec<u32>,
    parent: Vec<u32>,
    closed: Vec<bool>,
    push_seq: u64,
    expanded_count: u64,
    discovered_count: u64,
}

impl fmt::Debug for SearchSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchSession")
            .field("algo", &self.algo)
            .field("start", &self.start)
            .field("goal", &self.goal)
            .field("status", &self.status)
            .field("steps_emitted", &self.next_step)
            .finish()
    }
}

impl SearchSession {
    pub fn new(graph: Arc<StateGraph>, algo: SearchAlgo, start: StateId, goal: StateId) -> Result<Self> {
        graph.check_id(start)?;
        graph.check_id(goal)?;
        let goal_state = unrank(goal)?;
        let n = graph.node_count() as usize;
        let frontier = match algo {
            SearchAlgo::Bfs => Frontier::Fifo(VecDeque::new()),
            SearchAlgo::Dfs => Frontier::Lifo(Vec::new()),
            SearchAlgo::AStar => Frontier::Priority(BinaryHeap::new()),
        };
        Ok(SearchSession {
            graph,
            algo,
            start,
            goal,
            goal_state,
            status: SessionStatus::Running,
            started: false,
            next_step: 0,
            pending: VecDeque::new(),
            frontier,
            cost: vec![NONE; n],
            parent: vec![NONE; n],
            closed: vec![false; n],
            push_seq: 0,
            expanded_count: 0,
            discovered_count: 0,
        })
    }

    pub fn algo(&self) -> SearchAlgo {
        self.algo
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn goal(&self) -> StateId {
        self.goal
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn steps_emitted(&self) -> u64 {
        self.next_step
    }

    pub fn is_running(&self) -> bool {
        self.status == SessionStatus::Running
    }

    fn heuristic(&self, node: StateId) -> u32 {
        match self.algo {
            SearchAlgo::AStar => manhattan(&unrank(node).expect("graph ids are in range"), &self.goal_state),
            SearchAlgo::Bfs | SearchAlgo::Dfs => 0,
        }
    }

    fn parent_of(&self, node: StateId) -> Option<StateId> {
        let p = self.parent[node.index()];
        (p != NONE).then_some(StateId(p))
    }

    fn event(&self, kind: EventKind, node: StateId) -> TraceEvent {
        let g = match self.cost[node.index()] {
            NONE => 0,
            g => g,
        };
        let h = if kind == EventKind::Exhausted { 0 } else { self.heuristic(node) };
        TraceEvent { step: 0, kind, node, parent: self.parent_of(node), g, h, f: g + h }
    }

    fn push(&mut self, node: StateId, g: u32) {
        match &mut self.frontier {
            Frontier::Fifo(q) => q.push_back(node),
            Frontier::Lifo(s) => s.push(node),
            Frontier::Priority(heap) => {
                let h = match self.algo {
                    SearchAlgo::AStar => manhattan(&unrank(node).expect("in range"), &self.goal_state),
                    _ => 0,
                };
                heap.push(Reverse((g + h, h, self.push_seq, node.0)));
                self.push_seq += 1;
            }
        }
    }

    fn pop(&mut self) -> Option<StateId> {
        match &mut self.frontier {
            Frontier::Fifo(q) => q.pop_front(),
            Frontier::Lifo(s) => s.pop(),
            Frontier::Priority(heap) => {
                while let Some(Reverse((f, h, _, node))) = heap.pop() {
                    let i = node as usize;
                    if !self.closed[i] && f - h == self.cost[i] {
                        return Some(StateId(node));
                    }
                }
                None
            }
        }
    }

    fn expand(&mut self, u: StateId) -> TraceEvent {
        self.closed[u.index()] = true;
        self.expanded_count += 1;
        let expand = self.event(EventKind::Expand, u);
        if u == self.goal {
            self.pending.push_back(self.event(EventKind::Goal, u));
            return expand;
        }

        let graph = Arc::clone(&self.graph);
        let g_next = self.cost[u.index()] + 1;
        let mut fresh = Vec::with_capacity(4);
        for &v in graph.adjacent(u) {
            let i = v.index();
            if self.cost[i] == NONE {
                self.cost[i] = g_next;
                self.parent[i] = u.0;
                self.discovered_count += 1;
                fresh.push(v);
                self.pending.push_back(self.event(EventKind::Discover, v));
            } else if self.algo == SearchAlgo::AStar && !self.closed[i] && g_next < self.cost[i] {
                self.cost[i] = g_next;
                self.parent[i] = u.0;
                self.push(v, g_next);
            }
        }
        // DFS pushes descending so that the stack pops ascending.
        if self.algo == SearchAlgo::Dfs {
            fresh.reverse();
        }
        for v in fresh {
            self.push(v, g_next);
        }
        expand
    }

    /// Advances by exactly one event.
    pub fn step(&mut self) -> Result<TraceEvent> {
        if self.status != SessionStatus::Running {
            return Err(Error::SessionTerminated);
        }
        let mut ev = if !self.started {
            self.started = true;
            self.cost[self.start.index()] = 0;
            self.discovered_count += 1;
            self.push(self.start, 0);
            self.event(EventKind::Discover, self.start)
        } else if let Some(ev) = self.pending.pop_front() {
            ev
        } else {
            match self.pop() {
                Some(u) => self.expand(u),
                None => self.event(EventKind::Exhausted, self.goal),
            }
        };
        ev.step = self.next_step;
        self.next_step += 1;
        match ev.kind {
            EventKind::Goal => self.status = SessionStatus::Succeeded,
            EventKind::Exhausted => self.status = SessionStatus::Exhausted,
            _ => {}
        }
        Ok(ev)
    }

    /// Steps until terminal, handing every event to `on_event`.
    pub fn run_with(&mut self, mut on_event: impl FnMut(&TraceEvent)) -> Result<SearchResult> {
        if self.status != SessionStatus::Running {
            return Err(Error::SessionTerminated);
        }
        while self.status == SessionStatus::Running {
            let ev = self.step()?;
            on_event(&ev);
        }
        Ok(self.result().expect("terminal"))
    }

    pub fn run_to_completion(&mut self) -> Result<SearchResult> {
        self.run_with(|_| {})
    }

    /// Final result once the session is terminal.
    pub fn result(&self) -> Option<SearchResult> {
        let found = match self.status {
            SessionStatus::Running => return None,
            SessionStatus::Succeeded => true,
            SessionStatus::Exhausted => false,
        };
        let path = if found {
            let mut path = vec![self.goal];
            let mut cur = self.goal;
            while let Some(p) = self.parent_of(cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            path
        } else {
            Vec::new()
        };
        Some(SearchResult {
            found,
            path,
            expanded_count: self.expanded_count,
            discovered_count: self.discovered_count,
        })
    }
}

/// Exact BFS depth of every node from `source`; unreachable nodes get `u32::MAX`.
pub fn bfs_distance_map(g: &StateGraph, source: StateId) -> Result<Vec<u32>> {
    g.check_id(source)?;
    let mut depth = vec![NONE; g.node_count() as usize];
    let mut queue = VecDeque::with_capacity(g.node_count() as usize);
    depth[source.index()] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = depth[u.index()] + 1;
        for &v in g.adjacent(u) {
            if depth[v.index()] == NONE {
                depth[v.index()] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(depth)
}
