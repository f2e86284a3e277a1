//! Exact scalar-height (n = 1) ground states in any dimension by min-cut.
//!
//! Layered construction for convex pairwise costs: one node per
//! (vertex, grid level). Level indicators `y_{v,i} = [x_v ≥ i]` are kept
//! monotone by infinite downward arcs; unary costs enter as per-increment
//! source/sink arcs; the quadratic pairwise cost decomposes as
//!
//! ```text
//! ½step²(x_u − x_v)² = c·Σ_{i,j} [y_{u,i} ≠ y_{v,j}]
//!                      − c·x_u(M−1−x_u) − c·x_v(M−1−x_v),   c = ½step²,
//! ```
//!
//! so the cross term is a uniform disagreement coupling (a pair of arcs per
//! level pair) and the two correction terms fold into the unaries. The
//! minimal source side of the final residual graph is the unique pointwise
//! minimal minimizer, which is the lexicographically smallest one.
//!
//! Infinite disorder values are clipped to a large finite cap; if a clipped
//! level is selected the solve is reported infeasible.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{EnergyModel, Exactness, GroundState, HeightGrid, SolverTag};
use crate::error::{Error, Result};

const MAX_NODES: usize = 100_000_000;

struct Dinic {
    // arc arrays: to[a], cap[a]; paired arcs a ^ 1
    to: Vec<u32>,
    cap: Vec<f64>,
    head: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    eps: f64,
}

impl Dinic {
    fn new(nodes: usize) -> Self {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
            eps: 0.0,
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, cap_fwd: f64, cap_bwd: f64) {
        let a = self.to.len() as u32;
        self.to.push(v as u32);
        self.cap.push(cap_fwd);
        self.to.push(u as u32);
        self.cap.push(cap_bwd);
        self.head[u].push(a);
        self.head[v].push(a + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        let mut queue = alloc::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.head[u] {
                let v = self.to[a as usize] as usize;
                if self.cap[a as usize] > self.eps && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: f64) -> f64 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.head[u].len() {
            let a = self.head[u][self.iter[u]] as usize;
            let v = self.to[a] as usize;
            if self.cap[a] > self.eps && self.level[v] == self.level[u] + 1 {
                let pushed = self.dfs(v, t, limit.min(self.cap[a]));
                if pushed > 0.0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize, cap_scale: f64) -> (f64, u64) {
        self.eps = 1e-12 * (1.0 + cap_scale);
        let mut flow = 0.0;
        let mut augmentations = 0u64;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
                flow += pushed;
                augmentations += 1;
            }
        }
        (flow, augmentations)
    }

    /// Vertices reachable from `s` in the residual graph: the minimal
    /// source side over all minimum cuts.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.head[u] {
                let v = self.to[a as usize] as usize;
                if self.cap[a as usize] > self.eps && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

pub fn solve_mincut(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    if model.ncomp() != 1 {
        return Err(Error::Precondition("min-cut supports n = 1 only".into()));
    }
    if grid.ncomp() != 1 {
        return Err(Error::Precondition("grid and model component counts differ".into()));
    }
    if model.disorder.is_point_support() && model.domain.dim() == 1 {
        // the candidate DP is both exact and cheaper there
        return super::solve_dp_1d(model, grid);
    }
    let mut g = grid.clone();
    let mut retried = false;
    loop {
        let (mut gs, saturated) = mincut_once(model, &g)?;
        if !saturated || retried {
            gs.window_saturated = saturated;
            return Ok(gs);
        }
        g = g.doubled();
        retried = true;
    }
}

/// Fixed-grid solve: exactly the given grid, no window-doubling retry.
pub fn solve_mincut_on(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    if model.ncomp() != 1 || grid.ncomp() != 1 {
        return Err(Error::Precondition("min-cut supports n = 1 only".into()));
    }
    let (mut gs, saturated) = mincut_once(model, grid)?;
    gs.window_saturated = saturated;
    Ok(gs)
}

pub(crate) fn mincut_once(model: &EnergyModel, grid: &HeightGrid) -> Result<(GroundState, bool)> {
    let domain = &model.domain;
    let m = grid.points_per_axis;
    let nv = domain.len();
    let levels = m - 1; // internal nodes per vertex
    let nodes = 2 + nv * levels;
    if nodes > MAX_NODES {
        return Err(Error::Resource(format!(
            "min-cut graph would need {nodes} nodes (cap {MAX_NODES})"
        )));
    }
    let lam = model.lambda;
    let heights = grid.axis_values(0);
    let bsurf = model.boundary_surface();

    // unary part: λη (clipped) + boundary-edge quadratics − coupling correction
    let mut eta = vec![vec![0.0f64; m]; nv];
    let mut max_finite: f64 = 0.0;
    for off in 0..nv {
        let v = domain.vertex_at(off);
        model.disorder.eval_batch_1d(&v, &heights, &mut eta[off]);
        for e in &eta[off] {
            if e.is_finite() {
                max_finite = max_finite.max(lam * e.abs());
            }
        }
    }
    let clip_cap = 1e6 * (1.0 + nv as f64 * max_finite);

    let step = grid.step;
    let c_pair = 0.5 * step * step;
    let mut unary = vec![vec![0.0f64; m]; nv];
    let mut interior_edges: Vec<(usize, usize)> = Vec::new();
    let mut clipped = vec![vec![false; m]; nv];
    let mut tau_val = [0.0f64; 1];
    for off in 0..nv {
        let mut k_int = 0usize;
        let mut boundary_quad = vec![0.0f64; m];
        domain.for_each_neighbor(off, &mut |_, noff, nvtx| match noff {
            Some(noff) => {
                k_int += 1;
                if noff > off {
                    interior_edges.push((off, noff));
                }
            }
            None => {
                bsurf.get(nvtx, &mut tau_val);
                for (x, bq) in boundary_quad.iter_mut().enumerate() {
                    let d = heights[x] - tau_val[0];
                    *bq += 0.5 * d * d;
                }
            }
        });
        for x in 0..m {
            let site = lam * eta[off][x];
            let site = if site.is_finite() {
                site
            } else {
                clipped[off][x] = true;
                clip_cap
            };
            let correction = c_pair * (k_int as f64) * (x as f64) * ((m - 1 - x) as f64);
            unary[off][x] = site + boundary_quad[x] - correction;
        }
    }

    let node = |off: usize, i: usize| -> usize { 2 + off * levels + (i - 1) };
    let mut net = Dinic::new(nodes);
    // the residual threshold is tied to the scale of *regular* capacities;
    // clip-cap arcs are far above it and their float dust far below
    let cap_scale = c_pair.max(max_finite);

    for off in 0..nv {
        // monotonicity: forbid y_{v,i} = 0, y_{v,i+1} = 1
        for i in 1..levels {
            net.add_edge(node(off, i + 1), node(off, i), f64::INFINITY, 0.0);
        }
        // unary increments
        for i in 1..=levels {
            let inc = unary[off][i] - unary[off][i - 1];
            if inc >= 0.0 {
                net.add_edge(node(off, i), 1, inc, 0.0);
            } else {
                net.add_edge(0, node(off, i), -inc, 0.0);
            }
        }
    }
    for &(u, v) in &interior_edges {
        for i in 1..=levels {
            for j in 1..=levels {
                net.add_edge(node(u, i), node(v, j), c_pair, c_pair);
            }
        }
    }

    let (_, augmentations) = net.max_flow(0, 1, cap_scale);
    let side = net.source_side(0);

    let mut surface = model.boundary_surface();
    let mut saturated = false;
    let mut any_clipped = false;
    for off in 0..nv {
        let mut x = 0usize;
        for i in 1..=levels {
            if side[node(off, i)] {
                x += 1;
            }
        }
        if x == 0 || x == m - 1 {
            saturated = true;
        }
        if clipped[off][x] {
            any_clipped = true;
        }
        surface.at_mut(off)[0] = heights[x];
    }
    if any_clipped {
        return Err(Error::Infeasible(
            "minimum cut selects a clipped infinite-cost level; no finite-energy grid configuration in the window".into(),
        ));
    }
    let energy = super::energy(model, &surface)?;
    Ok((
        GroundState {
            surface,
            energy,
            solver: SolverTag::MinCut,
            exactness: Exactness::ExactOnGrid,
            iterations: augmentations,
            window_saturated: false,
        },
        saturated,
    ))
}
