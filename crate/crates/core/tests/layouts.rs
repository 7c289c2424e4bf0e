mod common;

use std::collections::BTreeSet;

use atlas_core::layout::{depth_layout, force_layout, heuristic_layout, heuristic_shells, mean_neighbor_chord, Position};
use atlas_core::{bfs_distance_map, LayoutParams, StateGraph, StateId};
use common::graph;

fn radius(p: Position) -> f64 {
    p.iter().map(|&c| f64::from(c) * f64::from(c)).sum::<f64>().sqrt()
}

/// Shell index recovered from a position's radius.
fn shell_of(p: Position, params: &LayoutParams) -> u32 {
    let r = radius(p);
    if r < 1e-6 {
        0
    } else {
        ((r - params.shell_base_radius) / params.shell_spacing).round() as u32 + 1
    }
}

fn assert_shells(g: &StateGraph, positions: &[Position], expected: &[u32], params: &LayoutParams) {
    assert_eq!(positions.len(), g.node_count() as usize);
    for (u, (&p, &k)) in positions.iter().zip(expected).enumerate() {
        assert!(p.iter().all(|c| c.is_finite()));
        assert_eq!(shell_of(p, params), k, "node {u}");
        let want = params.shell_radius(k);
        assert!((radius(p) - want).abs() <= 1e-5 * want.max(1.0), "node {u}: {} vs {want}", radius(p));
    }
    // lattice slots within a shell are distinct
    let distinct: BTreeSet<_> = positions.iter().map(|p| p.map(f32::to_bits)).collect();
    let singletons = expected.iter().filter(|&&k| k == 0).count();
    assert_eq!(distinct.len() + singletons.saturating_sub(1), positions.len());
}

#[test]
fn depth_layout_shells_follow_bfs_depth() {
    let g = graph();
    let params = LayoutParams::default();
    let layout = depth_layout(&g, &params).unwrap();
    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    assert_shells(&g, &layout.positions, &depth, &params);
    assert_eq!(layout.positions[g.goal_id().index()], [0.0; 3]);
    let radii: BTreeSet<u64> = layout.positions.iter().map(|&p| (radius(p) * 1e3).round() as u64).collect();
    assert_eq!(radii.len(), 32);
}

#[test]
fn depth_layout_from_another_root() {
    let g = graph();
    let root = StateId(12_345);
    let params = LayoutParams { root: Some(root), shell_spacing: 2.5, ..LayoutParams::default() };
    let layout = depth_layout(&g, &params).unwrap();
    let depth = bfs_distance_map(&g, root).unwrap();
    assert_shells(&g, &layout.positions, &depth, &params);
    assert_eq!(layout.params.root, Some(root));
    let bad = LayoutParams { root: Some(StateId(181_440)), ..LayoutParams::default() };
    assert!(depth_layout(&g, &bad).is_err());
}

#[test]
fn heuristic_layout_shells_follow_manhattan() {
    let g = graph();
    let params = LayoutParams::default();
    let layout = heuristic_layout(&g, g.goal_id(), &params).unwrap();
    let h = heuristic_shells(&g, g.goal_id()).unwrap();
    assert_shells(&g, &layout.positions, &h, &params);
    assert_eq!(layout.positions[g.goal_id().index()], [0.0; 3]);
    assert_eq!(h.iter().max(), Some(&22));

    let depth = bfs_distance_map(&g, g.goal_id()).unwrap();
    for (u, v) in g.edges() {
        assert_eq!(h[u.index()].abs_diff(h[v.index()]), 1);
    }
    assert!(h.iter().zip(&depth).all(|(h, d)| h <= d));
}

#[test]
fn force_layout_short_run() {
    let g = graph();
    let params = LayoutParams { iterations: 25, seed: 42, ..LayoutParams::default() };
    let a = force_layout(&g, &params).unwrap();
    let b = force_layout(&g, &params).unwrap();
    assert_eq!(a, b);
    for &p in &a.positions {
        assert!(p.iter().all(|c| c.is_finite()));
        assert!((radius(p) - 100.0).abs() <= 1e-3 * 100.0);
    }
    let initial = force_layout(&g, &LayoutParams { iterations: 0, ..params.clone() }).unwrap();
    let before = mean_neighbor_chord(&g, &initial.positions);
    let after = mean_neighbor_chord(&g, &a.positions);
    assert!(after < before, "{after} !< {before}");

    let other_seed = force_layout(&g, &LayoutParams { seed: 43, ..params }).unwrap();
    assert_ne!(other_seed.positions, a.positions);
}

#[test]
fn force_layout_ignores_thread_count() {
    let g = graph();
    let params = LayoutParams { iterations: 5, seed: 7, ..LayoutParams::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| force_layout(&g, &params).unwrap());
    assert_eq!(single, force_layout(&g, &params).unwrap());
}
