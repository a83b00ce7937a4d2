//! Helpers shared by the integration tests: random instance generators and
//! two transport oracles that share no code with the library solver.
#![allow(dead_code)]

use std::collections::BTreeMap;

use milpdist::model::{ConstraintTemplate, NormalizedInstance, PairKey, Proportion, RhsClass};
use rand::Rng;

const RHS: [RhsClass; 3] = [RhsClass::Zero, RhsClass::One, RhsClass::OtherReal];

/// A constraint template over at most `support` distinct pairs with small
/// counts, so that random draws collide often enough to share templates.
pub fn random_template(rng: &mut impl Rng, support: usize) -> ConstraintTemplate {
    let mut counts = [0u64; PairKey::COUNT];
    let k = rng.gen_range(1..=support.clamp(1, PairKey::COUNT));
    for _ in 0..k {
        counts[rng.gen_range(0..PairKey::COUNT)] += rng.gen_range(1..=3);
    }
    ConstraintTemplate::from_counts(&counts, RHS[rng.gen_range(0..3)]).unwrap()
}

pub fn random_objective(rng: &mut impl Rng) -> ConstraintTemplate {
    let mut counts = [0u64; PairKey::COUNT];
    if rng.gen_bool(0.9) {
        for _ in 0..rng.gen_range(1..=3) {
            counts[rng.gen_range(0..PairKey::COUNT)] += rng.gen_range(1..=4);
        }
    }
    ConstraintTemplate::from_counts(&counts, RhsClass::NoneObjective).unwrap()
}

/// Builds an instance from template multiplicities, merging repeats.
pub fn instance_from_counts(
    name: &str,
    objective: ConstraintTemplate,
    constraints: impl IntoIterator<Item = (ConstraintTemplate, u64)>,
) -> NormalizedInstance {
    let mut merged: BTreeMap<ConstraintTemplate, u64> = BTreeMap::new();
    for (t, c) in constraints {
        *merged.entry(t).or_default() += c;
    }
    let m: u64 = merged.values().sum();
    let templates = merged.into_iter().map(|(t, c)| (t, Proportion::new(c, m).unwrap())).collect();
    NormalizedInstance::new(name, m, 1, objective, templates).unwrap()
}

pub fn random_instance(rng: &mut impl Rng, max_templates: usize) -> NormalizedInstance {
    let n = rng.gen_range(1..=max_templates);
    let constraints: Vec<_> = (0..n).map(|_| (random_template(rng, 3), rng.gen_range(1..=6))).collect();
    instance_from_counts("random", random_objective(rng), constraints)
}

/// A transportation problem with positive masses normalized to one.
pub struct DenseProblem {
    pub sources: Vec<f64>,
    pub sinks: Vec<f64>,
    pub cost: Vec<f64>,
}

fn normalized(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=20) as f64).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Costs are drawn from `{0, alpha, beta, alpha + beta}`.
pub fn random_problem(rng: &mut impl Rng, max_side: usize, alpha: f64, beta: f64) -> DenseProblem {
    let m = rng.gen_range(1..=max_side);
    let n = rng.gen_range(1..=max_side);
    let palette = [0.0, alpha, beta, alpha + beta];
    DenseProblem {
        sources: normalized(rng, m),
        sinks: normalized(rng, n),
        cost: (0..m * n).map(|_| palette[rng.gen_range(0..4)]).collect(),
    }
}

/// Minimizes `c'x` subject to `Ax = b`, `x >= 0` with a dense two-phase
/// tableau simplex under Bland's rule. Returns `None` when infeasible.
pub fn lp_min(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    const EPS: f64 = 1e-12;
    let rows = a.len();
    let n = c.len();
    let width = n + rows + 1;
    let mut t: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width];
            for j in 0..n {
                row[j] = sign * a[i][j];
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * b[i];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + rows).collect();

    let phase1: Vec<f64> = (0..n + rows).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    run_bland(&mut t, &mut basis, &phase1, n + rows);
    let infeasibility: f64 = (0..rows).map(|i| phase1[basis[i]] * t[i][width - 1]).sum();
    if infeasibility > 1e-9 {
        return None;
    }
    // Pivot artificials that stay basic at zero out of the basis; rows where
    // that is impossible are redundant and dropped.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| t[i][j].abs() > EPS) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, rows));
    run_bland(&mut t, &mut basis, &phase2, n);
    Some((0..t.len()).map(|i| phase2[basis[i]] * t[i][width - 1]).sum())
}

fn run_bland(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], allowed: usize) {
    const EPS: f64 = 1e-12;
    let rhs = t[0].len() - 1;
    loop {
        let entering = (0..allowed).filter(|j| !basis.contains(j)).find(|&j| {
            let reduced = cost[j] - (0..t.len()).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
            reduced < -1e-11
        });
        let Some(j) = entering else { return };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][j] > EPS {
                let ratio = t[i][rhs] / t[i][j];
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (i, _) = leave.expect("transportation LPs are bounded");
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && row[c] != 0.0 {
            let f = row[c];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    basis[r] = c;
}

/// Optimal transport cost through the general LP oracle.
pub fn lp_transport(p: &DenseProblem) -> f64 {
    let (m, n) = (p.sources.len(), p.sinks.len());
    let mut a = Vec::with_capacity(m + n);
    for i in 0..m {
        a.push((0..m * n).map(|k| if k / n == i { 1.0 } else { 0.0 }).collect());
    }
    for j in 0..n {
        a.push((0..m * n).map(|k| if k % n == j { 1.0 } else { 0.0 }).collect());
    }
    let b: Vec<f64> = p.sources.iter().chain(&p.sinks).copied().collect();
    lp_min(&p.cost, &a, &b).expect("balanced problems are feasible")
}

/// Optimal transport cost by enumerating every basic solution: each choice
/// of `m + n - 1` cells whose marginal system has a unique nonnegative
/// solution is a vertex of the transportation polytope.
pub fn vertex_transport(p: &DenseProblem) -> f64 {
    let (m, n) = (p.sources.len(), p.sinks.len());
    let cells = m * n;
    let r = m + n - 1;
    let rhs: Vec<f64> = p.sources.iter().chain(&p.sinks).copied().collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << cells) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let chosen: Vec<usize> = (0..cells).filter(|k| mask & (1 << k) != 0).collect();
        let system: Vec<Vec<f64>> = (0..m + n)
            .map(|e| {
                let mut row: Vec<f64> = chosen
                    .iter()
                    .map(|&k| if (e < m && k / n == e) || (e >= m && k % n == e - m) { 1.0 } else { 0.0 })
                    .collect();
                row.push(rhs[e]);
                row
            })
            .collect();
        if let Some(x) = solve_unique(system, r) {
            if x.iter().all(|&v| v >= -1e-12) {
                let cost: f64 = chosen.iter().zip(&x).map(|(&k, v)| p.cost[k] * v).sum();
                best = best.min(cost);
            }
        }
    }
    best
}

/// Gaussian elimination on an augmented system with `unknowns` columns;
/// `None` unless the system is consistent with a unique solution.
fn solve_unique(mut s: Vec<Vec<f64>>, unknowns: usize) -> Option<Vec<f64>> {
    let rows = s.len();
    let mut pivot_row = 0;
    for col in 0..unknowns {
        let best = (pivot_row..rows).max_by(|&a, &b| s[a][col].abs().total_cmp(&s[b][col].abs()))?;
        if s[best][col].abs() < 1e-12 {
            return None;
        }
        s.swap(pivot_row, best);
        let pivot = s[pivot_row].clone();
        for (i, row) in s.iter_mut().enumerate() {
            let f = row[col] / pivot[col];
            if i != pivot_row && f != 0.0 {
                for (v, pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * pv;
                }
            }
        }
        pivot_row += 1;
    }
    if s[pivot_row..].iter().any(|row| row[unknowns].abs() > 1e-9) {
        return None;
    }
    Some((0..unknowns).map(|i| s[i][unknowns] / s[i][i]).collect())
}

/// Repeats every constraint `k` times and every column `j` times, so each
/// row holds `j` copies of each of its coefficients. The objective is
/// widened the same way.
pub fn inflate(c: &milpdist::CanonicalInstance, k: usize, j: usize) -> milpdist::CanonicalInstance {
    use milpdist::canonical::{LeRow, Variable};
    let widen = |coefs: &[(usize, f64)]| -> Vec<(usize, f64)> {
        coefs.iter().flat_map(|&(v, w)| (0..j).map(move |r| (v * j + r, w))).collect()
    };
    let variables = c
        .variables
        .iter()
        .flat_map(|v| (0..j).map(move |r| Variable { name: format!("{}_{r}", v.name), class: v.class }))
        .collect();
    let constraints = (0..k)
        .flat_map(|_| c.constraints.iter().map(|row| LeRow { coefficients: widen(&row.coefficients), rhs: row.rhs }))
        .collect();
    milpdist::CanonicalInstance {
        name: format!("{}_k{k}_j{j}", c.name),
        objective: widen(&c.objective),
        constraints,
        variables,
    }
}
