//! Seeded generators for small benchmark families and mixed random models.
//!
//! Generators emit a [`RawInstance`] (so the MPS output keeps `=` and `>=`
//! rows as a modeler would write them) and a canonical form of it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canonical::{canonicalize, write_mps, CanonicalInstance};
use crate::mps::{Bound, BoundType, Column, ObjSense, RawInstance, Row, RowSense};

pub const ITEM_RANGE: std::ops::RangeInclusive<usize> = 5..=200;
pub const GROUP_RANGE: std::ops::RangeInclusive<usize> = 2..=50;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0}")]
    BadSizeParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    BinPacking,
    Knapsack,
    SetCover,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::BinPacking, Family::Knapsack, Family::SetCover];

    pub fn label(self) -> &'static str {
        match self {
            Family::BinPacking => "binpacking",
            Family::Knapsack => "knapsack",
            Family::SetCover => "setcover",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "binpacking" | "bpp" => Ok(Family::BinPacking),
            "knapsack" | "kps" => Ok(Family::Knapsack),
            "setcover" | "scp" => Ok(Family::SetCover),
            other => Err(format!("unknown family `{other}` (binpacking, knapsack, setcover)")),
        }
    }
}

/// `items` is the number of items (bin packing, knapsack) or elements (set
/// cover); `groups` the number of bins or sets. Knapsack ignores `groups`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeParams {
    pub items: usize,
    pub groups: usize,
}

impl SizeParams {
    pub fn new(items: usize, groups: usize) -> Self {
        SizeParams { items, groups }
    }

    fn validate(&self, family: Family) -> Result<(), SynthError> {
        if !ITEM_RANGE.contains(&self.items) {
            return Err(SynthError::BadSizeParams(format!(
                "items = {} outside {}..={}",
                self.items,
                ITEM_RANGE.start(),
                ITEM_RANGE.end()
            )));
        }
        if family != Family::Knapsack && !GROUP_RANGE.contains(&self.groups) {
            return Err(SynthError::BadSizeParams(format!(
                "bins/sets = {} outside {}..={}",
                self.groups,
                GROUP_RANGE.start(),
                GROUP_RANGE.end()
            )));
        }
        Ok(())
    }
}

/// Incremental construction of a [`RawInstance`].
struct ModelBuilder {
    raw: RawInstance,
}

impl ModelBuilder {
    fn new(name: String, sense: ObjSense) -> Self {
        ModelBuilder {
            raw: RawInstance {
                name,
                objective_sense: sense,
                rows: vec![Row { name: "obj".into(), sense: RowSense::Free }],
                objective_row: Some(0),
                columns: Vec::new(),
                coefficients: BTreeMap::new(),
                rhs: BTreeMap::new(),
                ranges: BTreeMap::new(),
                bounds: Vec::new(),
            },
        }
    }

    fn binary(&mut self, name: String) -> usize {
        let j = self.raw.columns.len();
        self.raw.columns.push(Column { name, integer: true });
        self.raw.bounds.push(Bound { kind: BoundType::Bv, column: j, value: None });
        j
    }

    fn column(&mut self, name: String, integer: bool) -> usize {
        let j = self.raw.columns.len();
        self.raw.columns.push(Column { name, integer });
        j
    }

    fn objective(&mut self, j: usize, w: f64) {
        self.raw.coefficients.insert((0, j), w);
    }

    fn row(&mut self, sense: RowSense, coefficients: &[(usize, f64)], rhs: f64) {
        let i = self.raw.rows.len();
        self.raw.rows.push(Row { name: format!("r{i}"), sense });
        for &(j, w) in coefficients {
            self.raw.coefficients.insert((i, j), w);
        }
        if rhs != 0.0 {
            self.raw.rhs.insert(i, rhs);
        }
    }
}

pub fn generate_raw(family: Family, size: SizeParams, seed: u64) -> Result<RawInstance, SynthError> {
    size.validate(family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (family as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let name = match family {
        Family::Knapsack => format!("{}_n{}_s{seed}", family.label(), size.items),
        _ => format!("{}_n{}_g{}_s{seed}", family.label(), size.items, size.groups),
    };
    let raw = match family {
        Family::BinPacking => bin_packing(name, size, &mut rng),
        Family::Knapsack => knapsack(name, size, &mut rng),
        Family::SetCover => set_cover(name, size, &mut rng),
    };
    Ok(raw)
}

/// Deterministic for a fixed `(family, size, seed)`.
pub fn generate_synthetic(family: Family, size: SizeParams, seed: u64) -> Result<CanonicalInstance, SynthError> {
    let raw = generate_raw(family, size, seed)?;
    Ok(canonicalize(&raw).expect("generated models are well formed"))
}

/// Items into bins: one `= 1` assignment row per item and one capacity row
/// per bin, minimizing the number of bins opened.
fn bin_packing(name: String, size: SizeParams, rng: &mut ChaCha8Rng) -> RawInstance {
    let (n, b) = (size.items, size.groups);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(2..=40) as f64).collect();
    let total: f64 = weights.iter().sum();
    let capacity = (total / b as f64).ceil().max(weights.iter().cloned().fold(0.0, f64::max)) + rng.gen_range(0..=5) as f64;
    let mut m = ModelBuilder::new(name, ObjSense::Minimize);
    let x: Vec<Vec<usize>> = (0..n).map(|i| (0..b).map(|k| m.binary(format!("x_{i}_{k}"))).collect()).collect();
    let y: Vec<usize> = (0..b).map(|k| m.binary(format!("y_{k}"))).collect();
    for &yk in &y {
        m.objective(yk, 1.0);
    }
    for xi in &x {
        let row: Vec<_> = xi.iter().map(|&j| (j, 1.0)).collect();
        m.row(RowSense::Eq, &row, 1.0);
    }
    for k in 0..b {
        let mut row: Vec<_> = (0..n).map(|i| (x[i][k], weights[i])).collect();
        row.push((y[k], -capacity));
        m.row(RowSense::Le, &row, 0.0);
    }
    m.raw
}

/// A single capacity row over binaries, maximizing value.
fn knapsack(name: String, size: SizeParams, rng: &mut ChaCha8Rng) -> RawInstance {
    let n = size.items;
    let mut m = ModelBuilder::new(name, ObjSense::Maximize);
    let mut row = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        let j = m.binary(format!("x_{i}"));
        let w = rng.gen_range(2..=100) as f64;
        total += w;
        m.objective(j, rng.gen_range(2..=100) as f64);
        row.push((j, w));
    }
    m.row(RowSense::Le, &row, (total / 2.0).floor());
    m.raw
}

/// Every element covered by at least one chosen set.
fn set_cover(name: String, size: SizeParams, rng: &mut ChaCha8Rng) -> RawInstance {
    let (n, s) = (size.items, size.groups);
    let mut m = ModelBuilder::new(name, ObjSense::Minimize);
    let sets: Vec<usize> = (0..s).map(|k| m.binary(format!("s_{k}"))).collect();
    for &j in &sets {
        m.objective(j, rng.gen_range(1..=10) as f64);
    }
    let mut order: Vec<usize> = (0..s).collect();
    for _ in 0..n {
        order.shuffle(rng);
        let k = rng.gen_range(1..=s.min(5));
        let mut members: Vec<usize> = order[..k].to_vec();
        members.sort_unstable();
        let row: Vec<_> = members.iter().map(|&k| (sets[k], 1.0)).collect();
        m.row(RowSense::Ge, &row, 1.0);
    }
    m.raw
}

/// A structurally diverse model: rows of random length over binary, integer
/// and continuous columns, with coefficients and rhs drawn from a small mix
/// of singleton and general values. Produces many distinct templates.
pub fn random_mixed(constraints: usize, variables: usize, seed: u64) -> CanonicalInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variables = variables.max(1);
    let mut m = ModelBuilder::new(format!("mixed_m{constraints}_n{variables}_s{seed}"), ObjSense::Minimize);
    let cols: Vec<usize> = (0..variables)
        .map(|j| match rng.gen_range(0..3) {
            0 => m.binary(format!("b{j}")),
            1 => m.column(format!("i{j}"), true),
            _ => m.column(format!("c{j}"), false),
        })
        .collect();
    const WEIGHTS: [f64; 6] = [-1.0, 1.0, 1.0, -1.0, 2.5, -7.0];
    const RHS: [f64; 4] = [0.0, 1.0, 4.0, -2.0];
    for &j in cols.iter().take(variables.min(8)) {
        m.objective(j, WEIGHTS[rng.gen_range(0..WEIGHTS.len())]);
    }
    for _ in 0..constraints {
        let len = rng.gen_range(1..=12usize).min(variables);
        let chosen: Vec<usize> = cols.choose_multiple(&mut rng, len).copied().collect();
        let row: Vec<_> = chosen.iter().map(|&j| (j, WEIGHTS[rng.gen_range(0..WEIGHTS.len())])).collect();
        m.row(RowSense::Le, &row, RHS[rng.gen_range(0..RHS.len())]);
    }
    canonicalize(&m.raw).expect("generated models are well formed")
}

/// Writes `per_family` instances of every family plus `manifest.csv`. In each
/// family `tests` evenly spaced instances are marked as test instances and
/// the rest as references.
/// Item counts are spread over 10..=60 so sizes vary sixfold within a family.
pub fn write_corpus(dir: &Path, per_family: usize, tests: usize, seed: u64) -> Result<PathBuf, SynthError> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut manifest = String::from("path,class,subclass,split\n");
    let test_slots: Vec<usize> = (0..tests.min(per_family)).map(|t| t * per_family / tests).collect();
    for family in Family::ALL {
        for k in 0..per_family {
            let items = 10 + 50 * k / per_family.saturating_sub(1).max(1);
            let groups = rng.gen_range(2..=10);
            let instance_seed: u64 = rng.gen();
            let raw = generate_raw(family, SizeParams::new(items, groups), instance_seed)?;
            let file = format!("{}_{k:03}.mps", family.label());
            std::fs::write(dir.join(&file), write_mps(&raw))?;
            let split = if test_slots.contains(&k) { "test" } else { "reference" };
            manifest.push_str(&format!("{file},{},,{split}\n", family.label()));
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarClass;

    #[test]
    fn knapsack_shape() {
        let c = generate_synthetic(Family::Knapsack, SizeParams::new(10, 0), 1).unwrap();
        assert_eq!(c.num_constraints(), 1);
        assert_eq!(c.num_variables(), 10);
        assert!(c.variables.iter().all(|v| v.class == VarClass::Binary));
    }

    #[test]
    fn bin_packing_shape() {
        let raw = generate_raw(Family::BinPacking, SizeParams::new(12, 4), 3).unwrap();
        // objective + 12 assignment rows + 4 capacity rows
        assert_eq!(raw.rows.len(), 1 + 12 + 4);
        let c = canonicalize(&raw).unwrap();
        assert_eq!(c.num_constraints(), 2 * 12 + 4);
        assert_eq!(c.num_variables(), 12 * 4 + 4);
    }

    #[test]
    fn set_cover_shape() {
        let c = generate_synthetic(Family::SetCover, SizeParams::new(30, 8), 9).unwrap();
        assert_eq!(c.num_constraints(), 30);
        assert!(c.constraints.iter().all(|r| r.rhs == -1.0 && r.coefficients.iter().all(|&(_, w)| w == -1.0)));
    }

    #[test]
    fn same_seed_same_instance() {
        for family in Family::ALL {
            let size = SizeParams::new(20, 5);
            assert_eq!(generate_synthetic(family, size, 42).unwrap(), generate_synthetic(family, size, 42).unwrap());
        }
        assert_ne!(
            generate_synthetic(Family::Knapsack, SizeParams::new(20, 5), 1).unwrap(),
            generate_synthetic(Family::Knapsack, SizeParams::new(20, 5), 2).unwrap()
        );
    }

    #[test]
    fn size_validation() {
        assert!(matches!(
            generate_synthetic(Family::Knapsack, SizeParams::new(4, 2), 0),
            Err(SynthError::BadSizeParams(_))
        ));
        assert!(matches!(
            generate_synthetic(Family::SetCover, SizeParams::new(10, 51), 0),
            Err(SynthError::BadSizeParams(_))
        ));
        assert!(generate_synthetic(Family::Knapsack, SizeParams::new(200, 0), 0).is_ok());
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("bin-packing".parse::<Family>(), Ok(Family::BinPacking));
        assert_eq!("KPS".parse::<Family>(), Ok(Family::Knapsack));
        assert!("tsp".parse::<Family>().is_err());
    }

    #[test]
    fn mixed_models_are_deterministic() {
        assert_eq!(random_mixed(50, 30, 7), random_mixed(50, 30, 7));
    }
}
