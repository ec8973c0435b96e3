//! Deterministic 2-D layouts: circular, spectral and spring
//! (Fruchterman-Reingold). Layouts are data for external renderers; nothing
//! here draws.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{NodeId, PropertyGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("cannot lay out an empty graph")]
    EmptyGraph,
}

pub type Result<T> = std::result::Result<T, LayoutError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub type LayoutMap = BTreeMap<NodeId, Point>;

/// Node of ascending rank `i` of `n` at angle `2πi/n` on the unit circle.
pub fn circular_layout(g: &PropertyGraph) -> Result<LayoutMap> {
    let ids = g.node_ids();
    if ids.is_empty() {
        return Err(LayoutError::EmptyGraph);
    }
    let n = ids.len() as f64;
    Ok(ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let theta = 2.0 * PI * i as f64 / n;
            (id, Point { x: theta.cos(), y: theta.sin() })
        })
        .collect())
}

/// Combinatorial Laplacian `D − A` over nodes in ascending id order, with
/// direction ignored, parallel edges collapsed and self-loops dropped.
pub fn laplacian(g: &PropertyGraph) -> (Vec<NodeId>, DMatrix<f64>) {
    let ids = g.node_ids();
    let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for edge in g.edges() {
        let (i, j) = (pos[&edge.source], pos[&edge.target]);
        if i != j && lap[(i, j)] == 0.0 {
            lap[(i, j)] = -1.0;
            lap[(j, i)] = -1.0;
        }
    }
    for i in 0..n {
        let degree: f64 = -(0..n).filter(|&j| j != i).map(|j| lap[(i, j)]).sum::<f64>();
        lap[(i, i)] = degree;
    }
    (ids, lap)
}

/// Eigenpairs behind a spectral layout, before rescaling.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub order: Vec<NodeId>,
    pub laplacian: DMatrix<f64>,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Up to two `(λ, v)` pairs for the smallest nonzero eigenvalues, each
    /// `v` unit length with its first nonzero component positive.
    pub axes: Vec<(f64, Vec<f64>)>,
}

const ZERO_EIGENVALUE: f64 = 1e-9;

pub fn spectral_embedding(g: &PropertyGraph) -> SpectralEmbedding {
    let (order, lap) = laplacian(g);
    let eig = SymmetricEigen::new(lap.clone());
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lambda)| (lambda, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let axes = pairs
        .into_iter()
        .filter(|(lambda, _)| *lambda > ZERO_EIGENVALUE)
        .take(2)
        .map(|(lambda, mut v)| {
            if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|c| *c = -*c);
                }
            }
            (lambda, v)
        })
        .collect();
    SpectralEmbedding { order, laplacian: lap, eigenvalues, axes }
}

/// Coordinates from the eigenvectors of the two smallest nonzero Laplacian
/// eigenvalues, centered and scaled uniformly into `[-1, 1]²`. Graphs with
/// fewer than 3 nodes or no nonzero eigenvalue fall back to the circular
/// layout; a graph with a single nonzero eigenvalue gets `y = 0`.
pub fn spectral_layout(g: &PropertyGraph) -> Result<LayoutMap> {
    if g.node_count() == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    if g.node_count() < 3 {
        return circular_layout(g);
    }
    let emb = spectral_embedding(g);
    if emb.axes.is_empty() {
        return circular_layout(g);
    }
    let n = emb.order.len();
    let coord = |axis: usize, i: usize| emb.axes.get(axis).map_or(0.0, |(_, v)| v[i]);
    let points: Vec<Point> = (0..n).map(|i| Point { x: coord(0, i), y: coord(1, i) }).collect();
    Ok(emb.order.iter().copied().zip(rescale_centered(points)).collect())
}

fn rescale_centered(mut points: Vec<Point>) -> Vec<Point> {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let (mx, my) = (mx / n, my / n);
    let mut extent: f64 = 0.0;
    for p in &mut points {
        p.x -= mx;
        p.y -= my;
        extent = extent.max(p.x.abs()).max(p.y.abs());
    }
    if extent > 0.0 {
        for p in &mut points {
            p.x /= extent;
            p.y /= extent;
        }
    }
    points
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpringTrace {
    pub layout: LayoutMap,
    /// Total node displacement applied in each iteration.
    pub displacement: Vec<f64>,
}

pub const DEFAULT_SPRING_ITERATIONS: usize = 50;

/// Fruchterman-Reingold layout.
///
/// Starts from seeded uniform positions in `[-1, 1]²`, uses `k = √(4/n)`,
/// repulsion `k²/d` between every pair and attraction `d²/k` along edges,
/// and caps each step by a temperature falling linearly from 0.1 toward 0.
/// If the result leaves `[-1, 1]²` it is scaled down uniformly about the
/// origin. Identical inputs give bit-identical output.
pub fn spring_layout(g: &PropertyGraph, iterations: usize, seed: u64) -> Result<LayoutMap> {
    spring_layout_trace(g, iterations, seed).map(|t| t.layout)
}

pub fn spring_layout_trace(g: &PropertyGraph, iterations: usize, seed: u64) -> Result<SpringTrace> {
    let ids = g.node_ids();
    let n = ids.len();
    if n == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    let pos_of: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut springs: Vec<(usize, usize)> = g
        .edges()
        .map(|e| (pos_of[&e.source], pos_of[&e.target]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    springs.sort_unstable();
    springs.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point { x: rng.random_range(-1.0..1.0), y: rng.random_range(-1.0..1.0) })
        .collect();
    let k = (4.0 / n as f64).sqrt();
    let mut displacement = Vec::with_capacity(iterations);

    for it in 0..iterations {
        let temperature = 0.1 * (1.0 - it as f64 / iterations as f64);
        let mut disp = vec![(0.0f64, 0.0f64); n];
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy, d) = separation(pos[i], pos[j]);
                let f = k * k / d;
                disp[i].0 += dx / d * f;
                disp[i].1 += dy / d * f;
                disp[j].0 -= dx / d * f;
                disp[j].1 -= dy / d * f;
            }
        }
        for &(i, j) in &springs {
            let (dx, dy, d) = separation(pos[i], pos[j]);
            let f = d * d / k;
            disp[i].0 -= dx / d * f;
            disp[i].1 -= dy / d * f;
            disp[j].0 += dx / d * f;
            disp[j].1 += dy / d * f;
        }
        let mut moved = 0.0;
        for (p, (dx, dy)) in pos.iter_mut().zip(disp) {
            let len = dx.hypot(dy);
            if len > 0.0 {
                let step = len.min(temperature);
                p.x += dx / len * step;
                p.y += dy / len * step;
                moved += step;
            }
        }
        displacement.push(moved);
    }

    let extent = pos.iter().fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    if extent > 1.0 {
        for p in &mut pos {
            p.x /= extent;
            p.y /= extent;
        }
    }
    Ok(SpringTrace { layout: ids.into_iter().zip(pos).collect(), displacement })
}

/// Vector from `b` to `a` and its length, never zero.
fn separation(a: Point, b: Point) -> (f64, f64, f64) {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    let d = dx.hypot(dy);
    if d < 1e-9 {
        (1e-9, 0.0, 1e-9)
    } else {
        (dx, dy, d)
    }
}
