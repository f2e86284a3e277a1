//! Base environment samplers, one per disorder class.
//!
//! All draws go through keyed counter streams, so a generator is nothing
//! but parameters: evaluation never mutates anything.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{BumpFunction, DisorderParams, POINT_TOL};
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{Key, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    White,
    Poisson,
    Brownian,
    Linear,
    PeriodicWhite,
    Rpsg,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::White => "white",
            GeneratorKind::Poisson => "poisson",
            GeneratorKind::Brownian => "brownian",
            GeneratorKind::Linear => "linear",
            GeneratorKind::PeriodicWhite => "periodic-white",
            GeneratorKind::Rpsg => "rpsg",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    kind: GeneratorKind,
    seed: u64,
    ncomp: usize,
    delta: f64,
    intensity: f64,
    bump: BumpFunction,
    /// grid cells per unit period (periodic kind only)
    period_cells: i64,
    /// δ^{n/2}, the discretization prefactor of the white sums
    prefactor: f64,
}

impl Generator {
    pub fn new(p: DisorderParams) -> Result<Self> {
        let bump = BumpFunction::new(p.bump, p.ncomp)?;
        if !(p.delta > 0.0 && p.delta < 1.0) {
            return Err(Error::Param(format!("grid spacing δ must be in (0,1), got {}", p.delta)));
        }
        if p.kind == GeneratorKind::Poisson && !(p.intensity > 0.0) {
            return Err(Error::Param(format!(
                "poisson intensity must be positive, got {}",
                p.intensity
            )));
        }
        if p.kind == GeneratorKind::Brownian && p.ncomp != 1 {
            return Err(Error::Param("brownian disorder supports n = 1 only".into()));
        }
        let period_cells = if p.kind == GeneratorKind::PeriodicWhite {
            let m = math::round(1.0 / p.delta);
            if (m * p.delta - 1.0).abs() > 1e-12 || m < 2.0 {
                return Err(Error::Param(format!(
                    "periodic-white requires 1/δ to be an integer ≥ 2, got δ = {}",
                    p.delta
                )));
            }
            m as i64
        } else {
            0
        };
        let prefactor = math::powf(p.delta, p.ncomp as f64 / 2.0);
        Ok(Generator {
            kind: p.kind,
            seed: p.seed,
            ncomp: p.ncomp,
            delta: p.delta,
            intensity: p.intensity,
            bump,
            period_cells,
            prefactor,
        })
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn bump(&self) -> &BumpFunction {
        &self.bump
    }

    pub fn reseeded(&self, seed: u64) -> Generator {
        let mut g = self.clone();
        g.seed = seed;
        g
    }

    pub fn eval(&self, v: &[i64], t: &[f64]) -> f64 {
        match self.kind {
            GeneratorKind::White => self.white_eval(v, t, false),
            GeneratorKind::PeriodicWhite => self.white_eval(v, t, true),
            GeneratorKind::Poisson => self.point_eval(v, t),
            GeneratorKind::Rpsg => self.rpsg_eval(v, t),
            GeneratorKind::Linear => self.linear_eval(v, t),
            GeneratorKind::Brownian => self.brownian_eval(v, t[0]),
        }
    }

    pub fn eval_batch_1d(&self, v: &[i64], ts: &[f64], out: &mut [f64]) {
        match self.kind {
            GeneratorKind::White => self.white_batch_1d(v, ts, out, false),
            GeneratorKind::PeriodicWhite => self.white_batch_1d(v, ts, out, true),
            GeneratorKind::Brownian => self.brownian_batch(v, ts, out),
            _ => {
                for (i, &t) in ts.iter().enumerate() {
                    out[i] = self.eval(v, &[t]);
                }
            }
        }
    }

    pub fn candidates(&self, v: &[i64], lo: &[f64], hi: &[f64]) -> Option<Vec<Vec<f64>>> {
        match self.kind {
            GeneratorKind::Poisson => Some(self.poisson_candidates(v, lo, hi)),
            GeneratorKind::Rpsg => Some(self.rpsg_candidates(v, lo, hi)),
            _ => None,
        }
    }

    // ---- white / periodic-white -------------------------------------------

    fn white_cell_key(&self, v: &[i64], periodic: bool) -> Key {
        let stream = if periodic { Stream::PeriodicCell } else { Stream::WhiteCell };
        Key::new(self.seed, stream).absorb_vertex(v)
    }

    #[inline]
    fn white_gauss(&self, site_key: Key, k: &[i64], periodic: bool) -> f64 {
        let mut key = site_key;
        if periodic {
            for &c in k {
                key = key.absorb_i64(c.rem_euclid(self.period_cells));
            }
        } else {
            for &c in k {
                key = key.absorb_i64(c);
            }
        }
        key.normal(0)
    }

    /// `η(v,t) = δ^{n/2} Σ_{‖x_k − t‖ < 1} g_{v,k} b(x_k − t)`, `x_k = kδ`.
    fn white_eval(&self, v: &[i64], t: &[f64], periodic: bool) -> f64 {
        let n = self.ncomp;
        let d = self.delta;
        let site_key = self.white_cell_key(v, periodic);
        let lo: Vec<i64> = t.iter().map(|&x| math::ceil((x - 1.0) / d) as i64).collect();
        let hi: Vec<i64> = t.iter().map(|&x| math::floor((x + 1.0) / d) as i64).collect();
        let mut k = lo.clone();
        let mut diff = vec![0.0; n];
        let mut acc = 0.0;
        'outer: loop {
            for c in 0..n {
                diff[c] = k[c] as f64 * d - t[c];
            }
            let w = self.bump.eval(&diff);
            if w != 0.0 {
                acc += self.white_gauss(site_key, &k, periodic) * w;
            }
            // lexicographic increment over the cell box
            let mut axis = n;
            loop {
                if axis == 0 {
                    break 'outer;
                }
                axis -= 1;
                if k[axis] < hi[axis] {
                    k[axis] += 1;
                    break;
                }
                k[axis] = lo[axis];
            }
        }
        self.prefactor * acc
    }

    /// One-pass batch for scalar heights: materializes the needed Gaussian
    /// cells once, then convolves. Identical summation order per point as
    /// `white_eval`, so values are bit-identical.
    fn white_batch_1d(&self, v: &[i64], ts: &[f64], out: &mut [f64], periodic: bool) {
        let d = self.delta;
        if ts.is_empty() {
            return;
        }
        let mut tmin = ts[0];
        let mut tmax = ts[0];
        for &t in ts {
            tmin = tmin.min(t);
            tmax = tmax.max(t);
        }
        let klo = math::ceil((tmin - 1.0) / d) as i64;
        let khi = math::floor((tmax + 1.0) / d) as i64;
        let site_key = self.white_cell_key(v, periodic);
        let gauss: Vec<f64> =
            (klo..=khi).map(|k| self.white_gauss(site_key, &[k], periodic)).collect();
        for (i, &t) in ts.iter().enumerate() {
            let lo = math::ceil((t - 1.0) / d) as i64;
            let hi = math::floor((t + 1.0) / d) as i64;
            let mut acc = 0.0;
            for k in lo..=hi {
                let w = self.bump.eval1(k as f64 * d - t);
                if w != 0.0 {
                    acc += gauss[(k - klo) as usize] * w;
                }
            }
            out[i] = self.prefactor * acc;
        }
    }

    // ---- poisson ----------------------------------------------------------

    fn poisson_cell_points(&self, v: &[i64], cell: &[i64], out: &mut Vec<Vec<f64>>) {
        let count_key = Key::new(self.seed, Stream::PoissonCount).absorb_vertex(v).absorb_vertex(cell);
        let count = count_key.poisson(self.intensity, 0);
        if count == 0 {
            return;
        }
        let pos_key = Key::new(self.seed, Stream::PoissonPoint).absorb_vertex(v).absorb_vertex(cell);
        for i in 0..count {
            let p: Vec<f64> = (0..self.ncomp)
                .map(|c| cell[c] as f64 + pos_key.uniform(i * self.ncomp as u64 + c as u64))
                .collect();
            out.push(p);
        }
    }

    fn poisson_candidates(&self, v: &[i64], lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
        let n = self.ncomp;
        let clo: Vec<i64> = lo.iter().map(|&x| math::floor(x) as i64).collect();
        let chi: Vec<i64> = hi.iter().map(|&x| (math::ceil(x) as i64 - 1).max(math::floor(x) as i64)).collect();
        let mut pts = Vec::new();
        let mut cell = clo.clone();
        if clo.iter().zip(&chi).any(|(a, b)| a > b) {
            return pts;
        }
        'outer: loop {
            let mut cell_pts = Vec::new();
            self.poisson_cell_points(v, &cell, &mut cell_pts);
            for p in cell_pts {
                if (0..n).all(|c| p[c] >= lo[c] && p[c] < hi[c]) {
                    pts.push(p);
                }
            }
            let mut axis = n;
            loop {
                if axis == 0 {
                    break 'outer;
                }
                axis -= 1;
                if cell[axis] < chi[axis] {
                    cell[axis] += 1;
                    break;
                }
                cell[axis] = clo[axis];
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    fn point_eval(&self, v: &[i64], t: &[f64]) -> f64 {
        let n = self.ncomp;
        let lo: Vec<f64> = t.iter().map(|&x| x - 2.0 * POINT_TOL).collect();
        let hi: Vec<f64> = t.iter().map(|&x| x + 2.0 * POINT_TOL).collect();
        let near = self.poisson_candidates(v, &lo, &hi);
        for p in &near {
            if (0..n).all(|c| (p[c] - t[c]).abs() <= POINT_TOL) {
                return 0.0;
            }
        }
        f64::INFINITY
    }

    // ---- rpsg --------------------------------------------------------------

    fn rpsg_phase(&self, v: &[i64], comp: usize) -> f64 {
        Key::new(self.seed, Stream::RpsgPhase).absorb_vertex(v).uniform(comp as u64)
    }

    fn rpsg_candidates(&self, v: &[i64], lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
        let n = self.ncomp;
        let u: Vec<f64> = (0..n).map(|c| self.rpsg_phase(v, c)).collect();
        // p = k + u ∈ [lo, hi)  ⇔  k ∈ [lo − u, hi − u)
        let klo: Vec<i64> = (0..n).map(|c| math::ceil(lo[c] - u[c]) as i64).collect();
        let khi: Vec<i64> = (0..n).map(|c| (math::ceil(hi[c] - u[c]) as i64) - 1).collect();
        let mut pts = Vec::new();
        if klo.iter().zip(&khi).any(|(a, b)| a > b) {
            return pts;
        }
        let mut k = klo.clone();
        'outer: loop {
            pts.push((0..n).map(|c| k[c] as f64 + u[c]).collect());
            let mut axis = n;
            loop {
                if axis == 0 {
                    break 'outer;
                }
                axis -= 1;
                if k[axis] < khi[axis] {
                    k[axis] += 1;
                    break;
                }
                k[axis] = klo[axis];
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    fn rpsg_eval(&self, v: &[i64], t: &[f64]) -> f64 {
        for c in 0..self.ncomp {
            let x = t[c] - self.rpsg_phase(v, c);
            if (x - math::round(x)).abs() > POINT_TOL {
                return f64::INFINITY;
            }
        }
        0.0
    }

    // ---- linear ------------------------------------------------------------

    /// The slope vector ζ_v.
    pub fn linear_slope(&self, v: &[i64]) -> Vec<f64> {
        let key = Key::new(self.seed, Stream::LinearSlope).absorb_vertex(v);
        (0..self.ncomp).map(|c| key.normal(c as u64)).collect()
    }

    fn linear_eval(&self, v: &[i64], t: &[f64]) -> f64 {
        let key = Key::new(self.seed, Stream::LinearSlope).absorb_vertex(v);
        (0..self.ncomp).map(|c| key.normal(c as u64) * t[c]).sum()
    }

    // ---- brownian ----------------------------------------------------------

    #[inline]
    fn brownian_increment(&self, v: &[i64], side: i64, idx: u64) -> f64 {
        let key = Key::new(self.seed, Stream::BrownianStep).absorb_vertex(v).absorb_i64(side);
        math::sqrt(self.delta) * key.normal(idx)
    }

    /// Walk value at grid index `j` (prefix sum of increments from 0).
    fn brownian_prefix(&self, v: &[i64], j: i64) -> f64 {
        let mut acc = 0.0;
        if j >= 0 {
            for i in 1..=j {
                acc += self.brownian_increment(v, 1, i as u64);
            }
        } else {
            for i in 1..=(-j) {
                acc += self.brownian_increment(v, -1, i as u64);
            }
        }
        acc
    }

    fn brownian_eval(&self, v: &[i64], t: f64) -> f64 {
        let d = self.delta;
        let j = math::floor(t / d) as i64;
        let pj = self.brownian_prefix(v, j);
        let pj1 = self.brownian_prefix(v, j + 1);
        let frac = (t - j as f64 * d) / d;
        pj + frac * (pj1 - pj)
    }

    fn brownian_batch(&self, v: &[i64], ts: &[f64], out: &mut [f64]) {
        let d = self.delta;
        if ts.is_empty() {
            return;
        }
        let mut jmin = i64::MAX;
        let mut jmax = i64::MIN;
        for &t in ts {
            let j = math::floor(t / d) as i64;
            jmin = jmin.min(j);
            jmax = jmax.max(j + 1);
        }
        // prefix(j) for j in [jmin, jmax], accumulated in the same
        // ascending-index order as `brownian_prefix`
        let len = (jmax - jmin + 1) as usize;
        let mut prefix = vec![0.0; len];
        let mut acc = 0.0;
        for j in 1..=jmax.max(0) {
            acc += self.brownian_increment(v, 1, j as u64);
            if j >= jmin {
                prefix[(j - jmin) as usize] = acc;
            }
        }
        acc = 0.0;
        for j in 1..=(-jmin).max(0) {
            acc += self.brownian_increment(v, -1, j as u64);
            if -j <= jmax {
                prefix[(-j - jmin) as usize] = acc;
            }
        }
        if jmin <= 0 && 0 <= jmax {
            prefix[(-jmin) as usize] = 0.0;
        }
        for (i, &t) in ts.iter().enumerate() {
            let j = math::floor(t / d) as i64;
            let pj = prefix[(j - jmin) as usize];
            let pj1 = prefix[(j + 1 - jmin) as usize];
            let frac = (t - j as f64 * d) / d;
            out[i] = pj + frac * (pj1 - pj);
        }
    }
}
