//! Distances between weight-variable pairs, constraint templates and
//! normalized instances, in exact and greedy flavors.
//!
//! Both transport levels run on integer masses: proportions are scaled to
//! the least common denominator of the two sides, so flows never carry
//! rounding error and identical inputs give exactly zero.

use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ConstraintTemplate, DistanceParams, NormalizedInstance, PairKey, Proportion};
use crate::transport::{canonical_sum, greedy_transport, solve_transport_exact, TransportProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Greedy,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "greedy" => Ok(Mode::Greedy),
            other => Err(format!("unknown mode `{other}` (expected exact or greedy)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Greedy => "greedy",
        })
    }
}

pub fn pair_ground_distance(a: PairKey, b: PairKey, params: &DistanceParams) -> f64 {
    let mut d = 0.0;
    if a.weight != b.weight {
        d += params.alpha;
    }
    if a.variable != b.variable {
        d += params.beta;
    }
    d
}

/// Integer masses of a template over the 9 pair slots, summing to `scale`.
#[derive(Debug, Clone, Copy)]
struct PairMasses {
    scale: u64,
    mass: [u64; PairKey::COUNT],
}

impl PairMasses {
    fn of(t: &ConstraintTemplate) -> Self {
        let scale = t.pairs().values().fold(1u64, |acc, p| acc.lcm(&p.denom()));
        let mut mass = [0u64; PairKey::COUNT];
        for (k, p) in t.pairs() {
            mass[k.index()] = p.numer() * (scale / p.denom());
        }
        PairMasses { scale, mass }
    }

    fn is_empty(&self) -> bool {
        self.mass.iter().all(|&m| m == 0)
    }

    fn rescaled(&self, scale: u128) -> [u128; PairKey::COUNT] {
        let factor = scale / self.scale as u128;
        self.mass.map(|m| m as u128 * factor)
    }
}

/// Precomputed pair costs and greedy visiting order for one parameter set.
#[derive(Debug, Clone)]
pub struct DistanceEngine {
    params: DistanceParams,
    pair_cost: [f64; PairKey::COUNT * PairKey::COUNT],
    greedy_order: Vec<(u8, u8)>,
}

impl DistanceEngine {
    pub fn new(params: DistanceParams) -> Self {
        let mut pair_cost = [0.0; PairKey::COUNT * PairKey::COUNT];
        for a in PairKey::all() {
            for b in PairKey::all() {
                pair_cost[a.index() * PairKey::COUNT + b.index()] = pair_ground_distance(a, b, &params);
            }
        }
        let mut greedy_order: Vec<(u8, u8)> = (0..PairKey::COUNT as u8)
            .flat_map(|i| (0..PairKey::COUNT as u8).map(move |j| (i, j)))
            .collect();
        greedy_order.sort_by(|&(a, b), &(c, d)| {
            let ca = pair_cost[a as usize * PairKey::COUNT + b as usize];
            let cb = pair_cost[c as usize * PairKey::COUNT + d as usize];
            ca.total_cmp(&cb).then((a.min(b), a.max(b)).cmp(&(c.min(d), c.max(d))))
        });
        DistanceEngine { params, pair_cost, greedy_order }
    }

    pub fn params(&self) -> &DistanceParams {
        &self.params
    }

    fn rhs_term(&self, a: &ConstraintTemplate, b: &ConstraintTemplate) -> f64 {
        if a.rhs() != b.rhs() {
            self.params.gamma
        } else {
            0.0
        }
    }

    /// Transport part of the constraint distance plus the rhs indicator term.
    pub fn constraint_distance(&self, a: &ConstraintTemplate, b: &ConstraintTemplate, mode: Mode) -> f64 {
        self.pair_transport(a, b, mode) + self.rhs_term(a, b)
    }

    fn pair_transport(&self, a: &ConstraintTemplate, b: &ConstraintTemplate, mode: Mode) -> f64 {
        self.pair_transport_masses(&PairMasses::of(a), &PairMasses::of(b), mode)
    }

    fn pair_transport_masses(&self, ma: &PairMasses, mb: &PairMasses, mode: Mode) -> f64 {
        match (ma.is_empty(), mb.is_empty()) {
            (true, true) => return 0.0,
            // An empty objective sits at the largest pair distance from any
            // non-empty one.
            (true, false) | (false, true) => return self.params.alpha + self.params.beta,
            _ => {}
        }
        // Masses are reduced fractions over their own lcm, so equal
        // distributions have equal representations.
        if ma.scale == mb.scale && ma.mass == mb.mass {
            return 0.0;
        }
        let scale = (ma.scale as u128).lcm(&(mb.scale as u128));
        let (ra, rb) = (ma.rescaled(scale), mb.rescaled(scale));
        let raw = match mode {
            Mode::Greedy => self.greedy_pairs(ra, rb),
            Mode::Exact => {
                let src: Vec<usize> = (0..PairKey::COUNT).filter(|&i| ra[i] > 0).collect();
                let dst: Vec<usize> = (0..PairKey::COUNT).filter(|&j| rb[j] > 0).collect();
                let cost = src
                    .iter()
                    .flat_map(|&i| dst.iter().map(move |&j| self.pair_cost[i * PairKey::COUNT + j]))
                    .collect();
                let problem = TransportProblem::new(
                    src.iter().map(|&i| ra[i]).collect(),
                    dst.iter().map(|&j| rb[j]).collect(),
                    cost,
                )
                .expect("template masses are balanced");
                solve_transport_exact(&problem).expect("transport over at most 9 x 9 pairs converges").total_cost
            }
        };
        raw / scale as f64
    }

    fn greedy_pairs(&self, mut ra: [u128; PairKey::COUNT], mut rb: [u128; PairKey::COUNT]) -> f64 {
        // Every step exhausts a source or a sink, so at most 17 cells move mass.
        let mut terms = [(0.0, 0u128); 2 * PairKey::COUNT];
        let mut len = 0;
        for &(i, j) in &self.greedy_order {
            let (i, j) = (i as usize, j as usize);
            let t = ra[i].min(rb[j]);
            if t > 0 {
                ra[i] -= t;
                rb[j] -= t;
                terms[len] = (self.pair_cost[i * PairKey::COUNT + j], t);
                len += 1;
            }
        }
        canonical_sum(&mut terms[..len])
    }

    /// Constraint distances between every template of `a` (rows) and of `b`.
    pub fn ground_costs(&self, a: &NormalizedInstance, b: &NormalizedInstance, mode: Mode) -> Vec<f64> {
        let masses = |n: &NormalizedInstance| n.templates().iter().map(|(t, _)| (PairMasses::of(t), t.rhs())).collect::<Vec<_>>();
        let (ma, mb) = (masses(a), masses(b));
        let mut out = Vec::with_capacity(ma.len() * mb.len());
        for (pa, ra) in &ma {
            for (pb, rb) in &mb {
                let rhs = if ra != rb { self.params.gamma } else { 0.0 };
                out.push(self.pair_transport_masses(pa, pb, mode) + rhs);
            }
        }
        out
    }

    pub fn instance_distance(&self, a: &NormalizedInstance, b: &NormalizedInstance, mode: Mode) -> f64 {
        self.template_transport(a, b, mode) + self.params.zeta * self.constraint_distance(a.objective(), b.objective(), mode)
    }

    fn template_transport(&self, a: &NormalizedInstance, b: &NormalizedInstance, mode: Mode) -> f64 {
        let (ta, tb) = (a.templates(), b.templates());
        match (ta.is_empty(), tb.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return self.params.alpha + self.params.beta + self.params.gamma,
            _ => {}
        }
        let scale_of = |t: &[(ConstraintTemplate, Proportion)]| t.iter().fold(1u128, |acc, (_, p)| acc.lcm(&(p.denom() as u128)));
        let scale = scale_of(ta).lcm(&scale_of(tb));
        let masses = |t: &[(ConstraintTemplate, Proportion)]| -> Vec<u128> {
            t.iter().map(|(_, p)| p.numer() as u128 * (scale / p.denom() as u128)).collect()
        };
        let cost = self.ground_costs(a, b, mode);
        let (ka, kb) = shared_ranks(ta, tb);
        let problem = TransportProblem::with_keys(masses(ta), masses(tb), cost, ka, kb)
            .expect("template proportions sum to one on both sides");
        let raw = match mode {
            Mode::Exact => solve_transport_exact(&problem).expect("transportation simplex converges").total_cost,
            Mode::Greedy => greedy_transport(&problem).expect("greedy transport is total"),
        };
        raw / scale as f64
    }
}

/// Ranks of both template lists within their sorted union; equal templates
/// share a rank. Both inputs are sorted by template order.
fn shared_ranks(
    a: &[(ConstraintTemplate, Proportion)],
    b: &[(ConstraintTemplate, Proportion)],
) -> (Vec<u32>, Vec<u32>) {
    let (mut ra, mut rb) = (Vec::with_capacity(a.len()), Vec::with_capacity(b.len()));
    let (mut i, mut j, mut rank) = (0, 0, 0u32);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                ra.push(rank);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rb.push(rank);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                ra.push(rank);
                rb.push(rank);
                i += 1;
                j += 1;
            }
        }
        rank += 1;
    }
    (ra, rb)
}

pub fn constraint_distance(a: &ConstraintTemplate, b: &ConstraintTemplate, params: &DistanceParams, mode: Mode) -> f64 {
    DistanceEngine::new(*params).constraint_distance(a, b, mode)
}

pub fn instance_distance(a: &NormalizedInstance, b: &NormalizedInstance, params: &DistanceParams, mode: Mode) -> f64 {
    DistanceEngine::new(*params).instance_distance(a, b, mode)
}

/// Dense square matrix of instance distances, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub size: usize,
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.size..(i + 1) * self.size]
    }
}

/// All pairwise distances; the upper triangle is computed in parallel and
/// mirrored, so the matrix is exactly symmetric with a zero diagonal.
pub fn distance_matrix(instances: &[NormalizedInstance], params: &DistanceParams, mode: Mode) -> DistanceMatrix {
    let engine = DistanceEngine::new(*params);
    let n = instances.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let upper: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| engine.instance_distance(&instances[i], &instances[j], mode))
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), &d) in cells.iter().zip(&upper) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    DistanceMatrix { size: n, values }
}

/// Distances from each `rows` instance to every `cols` instance, plus the
/// wall-clock time each row took. Rows run in parallel; each row is timed
/// on its own worker.
pub fn cross_distances(
    rows: &[NormalizedInstance],
    cols: &[NormalizedInstance],
    params: &DistanceParams,
    mode: Mode,
) -> (Vec<Vec<f64>>, Vec<Duration>) {
    let engine = DistanceEngine::new(*params);
    rows.par_iter()
        .map(|r| {
            let start = Instant::now();
            let row: Vec<f64> = cols.iter().map(|c| engine.instance_distance(r, c, mode)).collect();
            (row, start.elapsed())
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RhsClass, VarClass, WeightClass};
    use std::collections::BTreeMap;

    fn p(n: u64, d: u64) -> Proportion {
        Proportion::new(n, d).unwrap()
    }

    fn tpl(pairs: &[(WeightClass, VarClass, Proportion)], rhs: RhsClass) -> ConstraintTemplate {
        let map: BTreeMap<_, _> = pairs.iter().map(|&(w, v, p)| (PairKey::new(w, v), p)).collect();
        ConstraintTemplate::new(map, rhs).unwrap()
    }

    fn ones() -> DistanceParams {
        DistanceParams::default()
    }

    #[test]
    fn pair_distance_examples() {
        use VarClass::*;
        use WeightClass::*;
        let ob = PairKey::new(One, Binary);
        assert_eq!(pair_ground_distance(ob, ob, &ones()), 0.0);
        assert_eq!(pair_ground_distance(ob, PairKey::new(MinusOne, Binary), &ones()), 1.0);
        assert_eq!(pair_ground_distance(ob, PairKey::new(MinusOne, Continuous), &ones()), 2.0);
        let params = DistanceParams::new(0.5, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(pair_ground_distance(ob, PairKey::new(One, Integer), &params), 3.0);
    }

    #[test]
    fn constraint_distance_examples() {
        use VarClass::*;
        use WeightClass::*;
        let a = tpl(&[(One, Binary, p(1, 2)), (MinusOne, Continuous, p(1, 2))], RhsClass::Zero);
        let b = tpl(&[(One, Binary, p(1, 1))], RhsClass::Zero);
        for mode in [Mode::Exact, Mode::Greedy] {
            assert_eq!(constraint_distance(&a, &a, &ones(), mode), 0.0);
            assert_eq!(constraint_distance(&a, &b, &ones(), mode), 1.0);
            let b1 = tpl(&[(One, Binary, p(1, 1))], RhsClass::One);
            assert_eq!(constraint_distance(&b, &b1, &ones(), mode), 1.0);
        }
    }

    #[test]
    fn instance_distance_single_forced_flow() {
        use VarClass::*;
        use WeightClass::*;
        let obj = tpl(&[(One, Binary, p(1, 1))], RhsClass::NoneObjective);
        let a = NormalizedInstance::new("a", 1, 1, obj.clone(), vec![(tpl(&[(One, Binary, p(1, 1))], RhsClass::One), Proportion::ONE)])
            .unwrap();
        let b = NormalizedInstance::new("b", 1, 1, obj, vec![(tpl(&[(MinusOne, Binary, p(1, 1))], RhsClass::One), Proportion::ONE)])
            .unwrap();
        for mode in [Mode::Exact, Mode::Greedy] {
            assert_eq!(instance_distance(&a, &b, &ones(), mode), 1.0);
            assert_eq!(instance_distance(&a, &a, &ones(), mode), 0.0);
        }
    }

    #[test]
    fn empty_objective_handling() {
        use VarClass::*;
        use WeightClass::*;
        let empty = ConstraintTemplate::new(BTreeMap::new(), RhsClass::NoneObjective).unwrap();
        let obj = tpl(&[(One, Binary, p(1, 1))], RhsClass::NoneObjective);
        let e = DistanceEngine::new(ones());
        assert_eq!(e.constraint_distance(&empty, &empty, Mode::Exact), 0.0);
        assert_eq!(e.constraint_distance(&empty, &obj, Mode::Exact), 2.0);
        assert_eq!(e.constraint_distance(&obj, &empty, Mode::Greedy), 2.0);
    }

    #[test]
    fn shared_ranks_merge() {
        use VarClass::*;
        use WeightClass::*;
        let t = |w, r| (tpl(&[(w, Binary, p(1, 1))], r), p(1, 2));
        let a = vec![t(MinusOne, RhsClass::Zero), t(One, RhsClass::Zero)];
        let b = vec![t(One, RhsClass::Zero), t(OtherReal, RhsClass::Zero)];
        assert_eq!(shared_ranks(&a, &b), (vec![0, 1], vec![1, 2]));
    }
}
