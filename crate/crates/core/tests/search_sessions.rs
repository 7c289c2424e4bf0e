mod common;

use std::collections::HashSet;
use std::sync::Arc;

use atlas_core::search::write_trace;
use atlas_core::{
    bfs_distance_map, rank, EventKind, SearchAlgo, SearchResult, SearchSession, StateGraph, StateId, TraceEvent,
};
use common::{graph, oracle_distances, SplitMix};

fn trace(g: &Arc<StateGraph>, algo: SearchAlgo, start: StateId) -> (Vec<TraceEvent>, SearchResult) {
    let mut s = SearchSession::new(g.clone(), algo, start, g.goal_id()).unwrap();
    let mut events = Vec::new();
    let r = s.run_with(|e| events.push(*e)).unwrap();
    (events, r)
}

fn assert_event_contract(g: &StateGraph, events: &[TraceEvent], start: StateId) {
    let first = events[0];
    assert_eq!((first.kind, first.node, first.parent, first.g), (EventKind::Discover, start, None, 0));
    let mut discovered = HashSet::new();
    let mut expanded_at = std::collections::HashMap::new();
    for (i, e) in events.iter().enumerate() {
        assert_eq!(e.step, i as u64);
        assert_eq!(e.f, e.g + e.h);
        match e.kind {
            EventKind::Discover => {
                assert!(discovered.insert(e.node), "double discover");
                if let Some(p) = e.parent {
                    assert!(expanded_at[&p] < e.step);
                    assert!(g.has_edge(p, e.node));
                }
            }
            EventKind::Expand => {
                assert!(discovered.contains(&e.node));
                assert!(expanded_at.insert(e.node, e.step).is_none(), "double expand");
            }
            EventKind::Goal | EventKind::Exhausted => assert_eq!(i, events.len() - 1),
        }
    }
}

fn assert_valid_path(g: &StateGraph, r: &SearchResult, start: StateId) {
    assert!(r.found);
    assert_eq!(r.path.first(), Some(&start));
    assert_eq!(r.path.last(), Some(&g.goal_id()));
    assert!(r.path.windows(2).all(|w| g.has_edge(w[0], w[1])));
    assert_eq!(r.path.iter().collect::<HashSet<_>>().len(), r.path.len());
}

#[test]
fn distance_map_matches_independent_bfs() {
    let g = graph();
    let oracle = oracle_distances(&atlas_core::canonical_goal());
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    assert_eq!(depth[g.goal_id().index()], 0);
    for (cells, d) in oracle {
        let id = rank(&atlas_core::PuzzleState::new(cells).unwrap()).unwrap();
        assert_eq!(depth[id.index()], d);
    }
    assert_eq!(depth.iter().max(), Some(&31));
}

#[test]
fn bfs_expansion_depths_are_exact() {
    let g = graph();
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    // BFS from the goal towards itself: the first expansion is the goal, so
    // search from the goal to a deepest node instead.
    let far = StateId(depth.iter().position(|&d| d == 31).unwrap() as u32);
    let mut s = SearchSession::new(g.clone(), SearchAlgo::Bfs, g.goal_id(), far).unwrap();
    let mut last_g = 0;
    let mut expanded = 0;
    s.run_with(|e| {
        if e.kind == EventKind::Expand {
            assert_eq!(e.g, depth[e.node.index()]);
            assert!(e.g >= last_g);
            last_g = e.g;
            expanded += 1;
        }
    })
    .unwrap();
    assert!(expanded > 181_000);
    assert_eq!(s.result().unwrap().path.len(), 32);
}

#[test]
fn start_equals_goal_on_full_graph() {
    let g = graph();
    for algo in SearchAlgo::ALL {
        let (events, r) = trace(&g, algo, g.goal_id());
        assert_eq!(events.len(), 3);
        assert_eq!(r.path, vec![g.goal_id()]);
        assert_eq!(r.expanded_count, 1);
    }
}

#[test]
fn astar_is_optimal_and_f_monotone() {
    let g = graph();
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    let mut rng = SplitMix(11);
    for _ in 0..100 {
        let start = StateId(rng.below(g.node_count()));
        let (events, r) = trace(&g, SearchAlgo::AStar, start);
        assert_event_contract(&g, &events, start);
        assert_valid_path(&g, &r, start);
        assert_eq!(r.moves().unwrap() as u32, depth[start.index()]);
        let goal = events.last().unwrap();
        assert_eq!((goal.kind, goal.g), (EventKind::Goal, depth[start.index()]));
        let fs: Vec<u32> = events.iter().filter(|e| e.kind == EventKind::Expand).map(|e| e.f).collect();
        assert!(fs.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn dfs_finds_valid_but_longer_paths() {
    let g = graph();
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    let mut rng = SplitMix(23);
    for _ in 0..100 {
        let start = StateId(rng.below(g.node_count()));
        let (events, r) = trace(&g, SearchAlgo::Dfs, start);
        assert_event_contract(&g, &events, start);
        assert_valid_path(&g, &r, start);
        assert!(r.moves().unwrap() as u32 >= depth[start.index()]);
    }
}

#[test]
fn bfs_paths_are_shortest() {
    let g = graph();
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    let mut rng = SplitMix(37);
    for _ in 0..25 {
        let start = StateId(rng.below(g.node_count()));
        let (events, r) = trace(&g, SearchAlgo::Bfs, start);
        assert_event_contract(&g, &events, start);
        assert_valid_path(&g, &r, start);
        assert_eq!(r.moves().unwrap() as u32, depth[start.index()]);
        assert!(r.moves().unwrap() <= 31);
    }
}

#[test]
fn dfs_descends_into_the_smallest_fresh_neighbor() {
    let g = graph();
    let mut s = SearchSession::new(g.clone(), SearchAlgo::Dfs, StateId(0), g.goal_id()).unwrap();
    let events: Vec<_> = (0..2000).map(|_| s.step().unwrap()).collect();
    let expands: Vec<usize> = (0..events.len()).filter(|&i| events[i].kind == EventKind::Expand).collect();
    let mut checked = 0;
    for w in expands.windows(2) {
        let fresh: Vec<StateId> = events[w[0] + 1..w[1]].iter().map(|e| e.node).collect();
        assert!(fresh.windows(2).all(|p| p[0] < p[1]), "discovers are ascending");
        if let Some(&smallest) = fresh.first() {
            assert_eq!(events[w[1]].node, smallest);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn traces_are_deterministic_and_resumable() {
    let g = graph();
    let mut rng = SplitMix(99);
    for algo in SearchAlgo::ALL {
        let start = StateId(rng.below(g.node_count()));
        let (a, ra) = trace(&g, algo, start);
        let (b, _) = trace(&g, algo, start);
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        write_trace(&mut ja, &a).unwrap();
        write_trace(&mut jb, &b).unwrap();
        assert_eq!(ja, jb);

        let mut partial = SearchSession::new(g.clone(), algo, start, g.goal_id()).unwrap();
        let head: Vec<_> = (0..a.len().min(37)).map(|_| partial.step().unwrap()).collect();
        assert_eq!(head, a[..head.len()]);
        if partial.is_running() {
            assert_eq!(partial.run_to_completion().unwrap(), ra);
        }
    }
}

#[test]
fn astar_expands_fewer_nodes_than_bfs_mostly() {
    let g = graph();
    let mut rng = SplitMix(2024);
    let trials = 200;
    let wins = (0..trials)
        .filter(|_| {
            let start = StateId(rng.below(g.node_count()));
            trace(&g, SearchAlgo::AStar, start).1.expanded_count <= trace(&g, SearchAlgo::Bfs, start).1.expanded_count
        })
        .count();
    eprintln!("A* expanded no more than BFS on {wins}/{trials} starts");
    assert!(wins * 10 >= trials * 9);
}
