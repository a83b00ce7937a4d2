//! Balanced transportation problems: an exact solver (primal transportation
//! simplex on the bipartite spanning-tree basis) and the greedy
//! cheapest-pair matcher.
//!
//! Both solvers are generic over the mass type. `f64` masses serve general
//! callers; `u128` masses let distance code run on proportions scaled to a
//! common denominator, so every flow is exact and only costs are floating.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Sub};

use thiserror::Error;

/// Marginal feasibility tolerance for floating masses.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum TransportError {
    #[error("marginals are unbalanced: sources sum to {sources}, sinks to {sinks}")]
    InfeasibleMarginals { sources: f64, sinks: f64 },
    #[error("cost matrix has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tie keys must match the number of sources and sinks")]
    KeyMismatch,
    #[error("mass {0} is negative or not finite")]
    InvalidMass(f64),
    #[error("cost {0} is negative or not finite")]
    InvalidCost(f64),
    #[error("simplex did not converge within {0} pivots")]
    IterationLimit(usize),
}

pub trait Mass: Copy + Debug + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
    /// Largest imbalance between the two marginal totals that is accepted.
    const TOLERANCE: f64;
    fn to_f64(self) -> f64;
    fn total_cmp(&self, other: &Self) -> Ordering;
}

impl Mass for f64 {
    const ZERO: f64 = 0.0;
    const TOLERANCE: f64 = MARGINAL_TOLERANCE;
    fn to_f64(self) -> f64 {
        self
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
}

impl Mass for u128 {
    const ZERO: u128 = 0;
    const TOLERANCE: f64 = 0.0;
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

fn min_mass<M: Mass>(a: M, b: M) -> M {
    if a <= b {
        a
    } else {
        b
    }
}

/// Supplies, demands and a dense row-major cost matrix.
///
/// `source_keys` and `sink_keys` drive greedy tie-breaking: candidate cells
/// of equal cost are ordered by the unordered pair of their keys, so the
/// transposed problem is matched in the same sequence. Keys should be unique
/// within each side; by default they are the positions.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProblem<M = f64> {
    sources: Vec<M>,
    sinks: Vec<M>,
    cost: Vec<f64>,
    source_keys: Vec<u32>,
    sink_keys: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution<M = f64> {
    /// `sum cost * flow`, in the units of the masses.
    pub total_cost: f64,
    /// Cells with positive flow, sorted by `(source, sink)`.
    pub flow: Vec<(usize, usize, M)>,
}

impl<M: Mass> TransportProblem<M> {
    pub fn new(sources: Vec<M>, sinks: Vec<M>, cost: Vec<f64>) -> Result<Self, TransportError> {
        let source_keys = (0..sources.len() as u32).collect();
        let sink_keys = (0..sinks.len() as u32).collect();
        Self::with_keys(sources, sinks, cost, source_keys, sink_keys)
    }

    pub fn with_keys(
        sources: Vec<M>,
        sinks: Vec<M>,
        cost: Vec<f64>,
        source_keys: Vec<u32>,
        sink_keys: Vec<u32>,
    ) -> Result<Self, TransportError> {
        let expected = sources.len() * sinks.len();
        if cost.len() != expected {
            return Err(TransportError::DimensionMismatch { expected, got: cost.len() });
        }
        if source_keys.len() != sources.len() || sink_keys.len() != sinks.len() {
            return Err(TransportError::KeyMismatch);
        }
        for &m in sources.iter().chain(&sinks) {
            let v = m.to_f64();
            if !v.is_finite() || v < 0.0 {
                return Err(TransportError::InvalidMass(v));
            }
        }
        if let Some(&c) = cost.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(TransportError::InvalidCost(c));
        }
        let total = |v: &[M]| v.iter().fold(M::ZERO, |a, &b| a + b);
        let (s, t) = (total(&sources), total(&sinks));
        let balanced = s == t || (s.to_f64() - t.to_f64()).abs() <= M::TOLERANCE;
        if !balanced {
            return Err(TransportError::InfeasibleMarginals { sources: s.to_f64(), sinks: t.to_f64() });
        }
        // -0.0 would sort before 0.0 in the greedy bit-packed order.
        let cost = cost.into_iter().map(|c| c + 0.0).collect();
        Ok(TransportProblem { sources, sinks, cost, source_keys, sink_keys })
    }

    pub fn sources(&self) -> &[M] {
        &self.sources
    }

    pub fn sinks(&self) -> &[M] {
        &self.sinks
    }

    pub fn cost(&self, source: usize, sink: usize) -> f64 {
        self.cost[source * self.sinks.len() + sink]
    }

    /// Sources and sinks swapped, cost matrix transposed.
    pub fn transposed(&self) -> Self {
        let (m, n) = (self.sources.len(), self.sinks.len());
        let mut cost = Vec::with_capacity(m * n);
        for j in 0..n {
            for i in 0..m {
                cost.push(self.cost[i * n + j]);
            }
        }
        TransportProblem {
            sources: self.sinks.clone(),
            sinks: self.sources.clone(),
            cost,
            source_keys: self.sink_keys.clone(),
            sink_keys: self.source_keys.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct BasicCell<M> {
    row: usize,
    col: usize,
    flow: M,
}

/// Minimum-cost flow meeting both marginals.
pub fn solve_transport_exact<M: Mass>(p: &TransportProblem<M>) -> Result<TransportSolution<M>, TransportError> {
    let rows: Vec<usize> = (0..p.sources.len()).filter(|&i| p.sources[i] > M::ZERO).collect();
    let cols: Vec<usize> = (0..p.sinks.len()).filter(|&j| p.sinks[j] > M::ZERO).collect();
    if rows.is_empty() || cols.is_empty() {
        return Ok(TransportSolution { total_cost: 0.0, flow: Vec::new() });
    }
    let supply: Vec<M> = rows.iter().map(|&i| p.sources[i]).collect();
    let demand: Vec<M> = cols.iter().map(|&j| p.sinks[j]).collect();
    let cost: Vec<f64> = rows.iter().flat_map(|&i| cols.iter().map(move |&j| p.cost(i, j))).collect();

    let mut simplex = Simplex::new(&supply, &demand, cost);
    simplex.optimize()?;

    let mut flow: Vec<(usize, usize, M)> = simplex
        .basis
        .iter()
        .filter(|c| c.flow > M::ZERO)
        .map(|c| (rows[c.row], cols[c.col], c.flow))
        .collect();
    flow.sort_by_key(|&(i, j, _)| (i, j));
    let total_cost = flow.iter().map(|&(i, j, x)| p.cost(i, j) * x.to_f64()).sum();
    Ok(TransportSolution { total_cost, flow })
}

struct Simplex<M> {
    m: usize,
    n: usize,
    cost: Vec<f64>,
    basis: Vec<BasicCell<M>>,
    is_basic: Vec<bool>,
    // scratch
    adjacency: Vec<Vec<(usize, usize)>>,
    potential: Vec<f64>,
    parent: Vec<Option<(usize, usize)>>,
}

impl<M: Mass> Simplex<M> {
    /// North-west corner start; degenerate cells stay basic so the basis is
    /// always a spanning tree with `m + n - 1` cells.
    fn new(supply: &[M], demand: &[M], cost: Vec<f64>) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut ra = supply.to_vec();
        let mut rb = demand.to_vec();
        let mut basis = Vec::with_capacity(m + n - 1);
        let mut is_basic = vec![false; m * n];
        let (mut i, mut j) = (0, 0);
        loop {
            let x = min_mass(ra[i], rb[j]);
            ra[i] = ra[i] - x;
            rb[j] = rb[j] - x;
            basis.push(BasicCell { row: i, col: j, flow: x });
            is_basic[i * n + j] = true;
            if i == m - 1 && j == n - 1 {
                break;
            }
            let row_done = ra[i] <= M::ZERO;
            if j == n - 1 || (row_done && i < m - 1) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Simplex {
            m,
            n,
            cost,
            basis,
            is_basic,
            adjacency: vec![Vec::new(); m + n],
            potential: vec![0.0; m + n],
            parent: vec![None; m + n],
        }
    }

    fn rebuild_tree(&mut self) {
        for adj in &mut self.adjacency {
            adj.clear();
        }
        for (k, c) in self.basis.iter().enumerate() {
            self.adjacency[c.row].push((self.m + c.col, k));
            self.adjacency[self.m + c.col].push((c.row, k));
        }
    }

    /// Dual potentials with `u_0 = 0`: `cost = u_row + v_col` on basic cells.
    fn compute_potentials(&mut self) {
        let mut seen = vec![false; self.m + self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        self.potential[0] = 0.0;
        while let Some(node) = stack.pop() {
            for &(next, k) in &self.adjacency[node] {
                if !seen[next] {
                    seen[next] = true;
                    let c = &self.basis[k];
                    self.potential[next] = self.cost[c.row * self.n + c.col] - self.potential[node];
                    stack.push(next);
                }
            }
        }
    }

    /// Basic cells on the tree path from row node `from` to column node `to`,
    /// in order starting at `from`.
    fn tree_path(&mut self, from: usize, to: usize) -> Vec<usize> {
        self.parent.iter_mut().for_each(|p| *p = None);
        let mut seen = vec![false; self.m + self.n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(node) = stack.pop() {
            if node == to {
                break;
            }
            for &(next, k) in &self.adjacency[node] {
                if !seen[next] {
                    seen[next] = true;
                    self.parent[next] = Some((node, k));
                    stack.push(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = to;
        while node != from {
            let (prev, k) = self.parent[node].expect("basis is a spanning tree");
            path.push(k);
            node = prev;
        }
        path.reverse();
        path
    }

    fn entering(&self, bland: bool, tol: f64) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.m {
            let u = self.potential[i];
            let row = &self.cost[i * self.n..(i + 1) * self.n];
            for (j, &c) in row.iter().enumerate() {
                if self.is_basic[i * self.n + j] {
                    continue;
                }
                let reduced = c - u - self.potential[self.m + j];
                if reduced < -tol {
                    if bland {
                        return Some((i, j));
                    }
                    if best.is_none_or(|b| reduced < b.2) {
                        best = Some((i, j, reduced));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn optimize(&mut self) -> Result<(), TransportError> {
        let max_cost = self.cost.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-12 * max_cost.max(1.0);
        let limit = 50 * self.m * self.n + 1000;
        let mut degenerate_run = 0;
        for _ in 0..limit {
            self.rebuild_tree();
            self.compute_potentials();
            let Some((p, q)) = self.entering(degenerate_run > 32, tol) else {
                return Ok(());
            };
            // Cycle: entering cell (+), then the tree path from column q back
            // to row p with alternating signs starting with (-).
            let path = self.tree_path(p, self.m + q);
            let minus: Vec<usize> = path.iter().rev().step_by(2).copied().collect();
            let plus: Vec<usize> = path.iter().rev().skip(1).step_by(2).copied().collect();
            let leave = *minus
                .iter()
                .min_by(|&&a, &&b| {
                    let (ca, cb) = (&self.basis[a], &self.basis[b]);
                    ca.flow.total_cmp(&cb.flow).then((ca.row, ca.col).cmp(&(cb.row, cb.col)))
                })
                .expect("cycle has a decreasing cell");
            let theta = self.basis[leave].flow;
            degenerate_run = if theta > M::ZERO { 0 } else { degenerate_run + 1 };
            for &k in &plus {
                self.basis[k].flow = self.basis[k].flow + theta;
            }
            for &k in &minus {
                self.basis[k].flow = self.basis[k].flow - theta;
            }
            let old = self.basis[leave];
            self.is_basic[old.row * self.n + old.col] = false;
            self.is_basic[p * self.n + q] = true;
            self.basis[leave] = BasicCell { row: p, col: q, flow: theta };
        }
        Err(TransportError::IterationLimit(limit))
    }
}

/// Greedy matching: cells are visited by increasing cost (ties by the
/// unordered key pair), each moving the smaller remaining mass.
///
/// Returns the total cost in mass units. The per-cell contributions are
/// summed in a canonical order, so the result of a problem and of its
/// transpose are bit-identical.
pub fn greedy_transport<M: Mass>(p: &TransportProblem<M>) -> Result<f64, TransportError> {
    let n = p.sinks.len();
    let mut order: Vec<(u128, u32)> = Vec::with_capacity(p.cost.len());
    for (i, &ks) in p.source_keys.iter().enumerate() {
        if p.sources[i] <= M::ZERO {
            continue;
        }
        for (j, &kt) in p.sink_keys.iter().enumerate() {
            if p.sinks[j] <= M::ZERO {
                continue;
            }
            let (lo, hi) = if ks <= kt { (ks, kt) } else { (kt, ks) };
            let key = ((p.cost[i * n + j].to_bits() as u128) << 64) | ((lo as u128) << 32) | hi as u128;
            order.push((key, (i * n + j) as u32));
        }
    }
    order.sort_unstable();

    let mut ra = p.sources.clone();
    let mut rb = p.sinks.clone();
    let mut terms: Vec<(f64, M)> = Vec::new();
    for &(_, cell) in &order {
        let (i, j) = (cell as usize / n, cell as usize % n);
        let t = min_mass(ra[i], rb[j]);
        if t > M::ZERO {
            ra[i] = ra[i] - t;
            rb[j] = rb[j] - t;
            terms.push((p.cost[cell as usize], t));
        }
    }
    Ok(canonical_sum(&mut terms))
}

/// `sum cost * mass` over terms sorted by `(cost, mass)`.
pub(crate) fn canonical_sum<M: Mass>(terms: &mut [(f64, M)]) -> f64 {
    terms.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    terms.iter().map(|&(c, t)| c * t.to_f64()).sum()
}
