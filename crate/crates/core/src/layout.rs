//! 3D placements of the whole state space.
//!
//! * `Depth` and `Heuristic` put every node on a spherical shell chosen by its
//!   BFS depth from a root or its Manhattan distance to the goal. Shell 0 is
//!   the origin; shell `k >= 1` has radius `r0 + (k - 1) * dr`. Members of a
//!   shell occupy Fibonacci-lattice slots in ascending id order.
//! * `Force` runs a sampled-repulsion spring simulation constrained to a
//!   sphere. Every iteration reads a frozen snapshot of the previous positions
//!   and updates each node independently, so the output is identical for any
//!   thread count.
//!
//! Random numbers come from ChaCha8 seeded with `seed`: stream 0 drives the
//! initial placement and stream `t + 1` drives the repulsion partners of
//! iteration `t`: node `u` takes its partners from 32-bit words
//! `u * samples .. (u + 1) * samples` of that stream.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::puzzle::{manhattan, StateId};
use crate::rank::unrank;
use crate::search::bfs_distance_map;

pub type Position = [f32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Force,
    Depth,
    Heuristic,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 3] = [LayoutKind::Force, LayoutKind::Depth, LayoutKind::Heuristic];

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutKind::Force => "force",
            LayoutKind::Depth => "depth",
            LayoutKind::Heuristic => "heuristic",
        }
    }

    /// Tag byte in the position file.
    pub fn code(self) -> u8 {
        match self {
            LayoutKind::Force => 0,
            LayoutKind::Depth => 1,
            LayoutKind::Heuristic => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        LayoutKind::ALL.into_iter().find(|k| k.code() == code)
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayoutKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown layout kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    pub seed: u64,
    pub iterations: u32,
    pub repulsion_strength: f64,
    pub attraction_strength: f64,
    pub sample_count: u32,
    pub sphere_radius: f64,
    pub shell_base_radius: f64,
    pub shell_spacing: f64,
    /// Depth layout root; the graph's goal when absent.
    pub root: Option<StateId>,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            seed: 0,
            iterations: 300,
            repulsion_strength: 1.0,
            attraction_strength: 0.1,
            sample_count: 16,
            sphere_radius: 100.0,
            shell_base_radius: 10.0,
            shell_spacing: 6.0,
            root: None,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("repulsion_strength", self.repulsion_strength),
            ("attraction_strength", self.attraction_strength),
            ("sphere_radius", self.sphere_radius),
            ("shell_base_radius", self.shell_base_radius),
            ("shell_spacing", self.shell_spacing),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if self.sample_count == 0 {
            return Err(Error::InvalidParams("sample_count must be at least 1".into()));
        }
        Ok(())
    }

    /// Radius of shell `k`.
    pub fn shell_radius(&self, k: u32) -> f64 {
        match k {
            0 => 0.0,
            k => self.shell_base_radius + f64::from(k - 1) * self.shell_spacing,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutResult {
    pub kind: LayoutKind,
    pub params: LayoutParams,
    pub positions: Vec<Position>,
}

impl LayoutResult {
    /// Seed recorded in the position file; zero for the deterministic shell layouts.
    pub fn file_seed(&self) -> u64 {
        match self.kind {
            LayoutKind::Force => self.params.seed,
            LayoutKind::Depth | LayoutKind::Heuristic => 0,
        }
    }
}

pub fn compute_layout(g: &StateGraph, kind: LayoutKind, params: &LayoutParams) -> Result<LayoutResult> {
    match kind {
        LayoutKind::Force => force_layout(g, params),
        LayoutKind::Depth => depth_layout(g, params),
        LayoutKind::Heuristic => heuristic_layout(g, g.goal_id(), params),
    }
}

/// Slot `i` of `n` on the unit-sphere Fibonacci lattice.
pub fn fibonacci_point(i: usize, n: usize) -> [f64; 3] {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    let ring = (1.0 - z * z).max(0.0).sqrt();
    let theta = golden_angle * i as f64;
    [ring * theta.cos(), ring * theta.sin(), z]
}

/// Places nodes on concentric shells given each node's shell index.
pub fn shell_positions(shells: &[u32], params: &LayoutParams) -> Vec<Position> {
    let shell_count = shells.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut sizes = vec![0usize; shell_count];
    for &k in shells {
        sizes[k as usize] += 1;
    }
    let mut next_slot = vec![0usize; shell_count];
    shells
        .iter()
        .map(|&k| {
            let k = k as usize;
            let slot = next_slot[k];
            next_slot[k] += 1;
            let radius = params.shell_radius(k as u32);
            let [x, y, z] = fibonacci_point(slot, sizes[k]);
            [(x * radius) as f32, (y * radius) as f32, (z * radius) as f32]
        })
        .collect()
}

pub fn depth_layout(g: &StateGraph, params: &LayoutParams) -> Result<LayoutResult> {
    params.validate()?;
    let root = params.root.unwrap_or(g.goal_id());
    let depths = bfs_distance_map(g, root)?;
    // nodes outside the root's component go one shell past the deepest
    let beyond = depths.iter().copied().filter(|&d| d != u32::MAX).max().unwrap_or(0) + 1;
    let shells: Vec<u32> = depths.iter().map(|&d| if d == u32::MAX { beyond } else { d }).collect();
    Ok(LayoutResult {
        kind: LayoutKind::Depth,
        params: LayoutParams { root: Some(root), ..params.clone() },
        positions: shell_positions(&shells, params),
    })
}

/// Manhattan distance of every node to `goal`.
pub fn heuristic_shells(g: &StateGraph, goal: StateId) -> Result<Vec<u32>> {
    g.check_id(goal)?;
    let goal_state = unrank(goal)?;
    (0..g.node_count())
        .into_par_iter()
        .map(|u| unrank(StateId(u)).map(|s| manhattan(&s, &goal_state)))
        .collect()
}

pub fn heuristic_layout(g: &StateGraph, goal: StateId, params: &LayoutParams) -> Result<LayoutResult> {
    params.validate()?;
    let shells = heuristic_shells(g, goal)?;
    Ok(LayoutResult {
        kind: LayoutKind::Heuristic,
        params: LayoutParams { root: Some(goal), ..params.clone() },
        positions: shell_positions(&shells, params),
    })
}

type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Uniform `[0, 1)` from the top 53 bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn initial_sphere(n: usize, params: &LayoutParams) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    (0..n)
        .map(|_| {
            let z = 2.0 * unit(&mut rng) - 1.0;
            let phi = 2.0 * PI * unit(&mut rng);
            let ring = (1.0 - z * z).max(0.0).sqrt();
            scale([ring * phi.cos(), ring * phi.sin(), z], params.sphere_radius)
        })
        .collect()
}

/// Repulsion partners of every node for one iteration, as indices into the
/// `n - 1` other nodes (shifted past the node itself by the caller).
fn repulsion_partners(params: &LayoutParams, iteration: u32, n: usize) -> Vec<u32> {
    if n < 2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(u64::from(iteration) + 1);
    let others = (n - 1) as u64;
    (0..n * params.sample_count as usize)
        .map(|_| ((u64::from(rng.next_u32()) * others) >> 32) as u32)
        .collect()
}

fn force_step(g: &StateGraph, params: &LayoutParams, iteration: u32, prev: &[Vec3]) -> Vec<Vec3> {
    let n = prev.len();
    let radius = params.sphere_radius;
    let max_step = 0.02 * radius;
    let softening = (1e-3 * radius).powi(2);
    let samples = params.sample_count as usize;
    let partners = repulsion_partners(params, iteration, n);

    (0..n)
        .into_par_iter()
        .map(|u| {
            let p = prev[u];
            let mut disp = [0.0f64; 3];

            for &v in g.adjacent(StateId(u as u32)) {
                let d = sub(prev[v.index()], p);
                for (acc, c) in disp.iter_mut().zip(d) {
                    *acc += params.attraction_strength * c;
                }
            }

            for &r in partners.get(u * samples..(u + 1) * samples).unwrap_or_default() {
                let other = if r as usize >= u { r as usize + 1 } else { r as usize };
                let d = sub(p, prev[other]);
                let w = params.repulsion_strength / (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + softening);
                for (acc, c) in disp.iter_mut().zip(d) {
                    *acc += w * c;
                }
            }

            let len = norm(disp);
            if len > max_step {
                disp = scale(disp, max_step / len);
            }
            let moved = [p[0] + disp[0], p[1] + disp[1], p[2] + disp[2]];
            let m = norm(moved);
            if m > 0.0 {
                scale(moved, radius / m)
            } else {
                p
            }
        })
        .collect()
}

pub fn force_layout(g: &StateGraph, params: &LayoutParams) -> Result<LayoutResult> {
    params.validate()?;
    let mut positions = initial_sphere(g.node_count() as usize, params);
    for iteration in 0..params.iterations {
        positions = force_step(g, params, iteration, &positions);
    }
    Ok(LayoutResult {
        kind: LayoutKind::Force,
        params: params.clone(),
        positions: positions.iter().map(|p| p.map(|c| c as f32)).collect(),
    })
}

/// Mean Euclidean distance between the endpoints of every undirected edge.
pub fn mean_neighbor_chord(g: &StateGraph, positions: &[Position]) -> f64 {
    let (sum, count) = g.edges().fold((0.0f64, 0u64), |(sum, count), (u, v)| {
        let a = positions[u.index()].map(f64::from);
        let b = positions[v.index()].map(f64::from);
        (sum + norm(sub(a, b)), count + 1)
    });
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
