//! Class-identification experiments: manifests of labelled instances, top-k
//! nearest-reference accuracy and exact-versus-greedy comparisons.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{cross_distances, Mode};
use crate::load::{load_instance, LoadError};
use crate::model::{DistanceParams, NormalizedInstance};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("manifest row {row}: file `{path}` does not exist")]
    MissingFile { row: usize, path: String },
    #[error("manifest row {row}: split `{value}` is neither `test` nor `reference`")]
    BadSplitValue { row: usize, value: String },
    #[error("class `{0}` has no reference instances")]
    EmptyClass(String),
    #[error("manifest row {row}: path `{path}` listed twice")]
    DuplicatePath { row: usize, path: String },
    #[error("manifest is missing the `{0}` column")]
    MissingColumn(&'static str),
    #[error("manifest row {row}: no subclass label")]
    MissingSubclass { row: usize },
    #[error("k = {k} but only {references} reference instances are available")]
    KTooLarge { k: usize, references: usize },
    #[error("manifest has no test instances")]
    NoTests,
    #[error("manifest: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Load(#[from] LoadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Test,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub class: String,
    pub subclass: Option<String>,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

/// Which label a neighbor must share to count as a hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelLevel {
    #[default]
    Class,
    Subclass,
}

impl std::str::FromStr for LabelLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "class" => Ok(LabelLevel::Class),
            "subclass" => Ok(LabelLevel::Subclass),
            other => Err(format!("unknown label level `{other}` (class or subclass)")),
        }
    }
}

#[derive(Deserialize)]
struct ManifestRow {
    path: String,
    class: String,
    #[serde(default)]
    subclass: Option<String>,
    split: String,
}

/// Reads a `path,class,subclass,split` CSV. Relative paths are resolved
/// against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, EvalError> {
    let path = path.as_ref();
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    for column in ["path", "class", "split"] {
        if !headers.iter().any(|h| h == column) {
            return Err(EvalError::MissingColumn(column));
        }
    }
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, record) in reader.deserialize::<ManifestRow>().enumerate() {
        let row = idx + 2;
        let record = record?;
        let split = match record.split.to_ascii_lowercase().as_str() {
            "test" => Split::Test,
            "reference" | "ref" => Split::Reference,
            _ => return Err(EvalError::BadSplitValue { row, value: record.split }),
        };
        let file = base.join(&record.path);
        if !file.is_file() {
            return Err(EvalError::MissingFile { row, path: file.display().to_string() });
        }
        if !seen.insert(file.clone()) {
            return Err(EvalError::DuplicatePath { row, path: record.path });
        }
        entries.push(ManifestEntry {
            path: file,
            class: record.class,
            subclass: record.subclass.filter(|s| !s.is_empty()),
            split,
        });
    }
    let manifest = DatasetManifest { entries };
    manifest.check_references(LabelLevel::Class)?;
    Ok(manifest)
}

impl DatasetManifest {
    fn label(&self, idx: usize, level: LabelLevel) -> Result<&str, EvalError> {
        let e = &self.entries[idx];
        match level {
            LabelLevel::Class => Ok(&e.class),
            LabelLevel::Subclass => e.subclass.as_deref().ok_or(EvalError::MissingSubclass { row: idx + 2 }),
        }
    }

    fn check_references(&self, level: LabelLevel) -> Result<(), EvalError> {
        let mut classes = BTreeSet::new();
        let mut with_refs = BTreeSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            let label = self.label(i, level)?;
            classes.insert(label);
            if e.split == Split::Reference {
                with_refs.insert(label);
            }
        }
        match classes.difference(&with_refs).next() {
            Some(c) => Err(EvalError::EmptyClass(c.to_string())),
            None => Ok(()),
        }
    }
}

/// A manifest with every instance loaded and normalized.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: DatasetManifest,
    pub instances: Vec<NormalizedInstance>,
}

impl Corpus {
    /// Loads all instances in parallel; the first failure (in manifest order) wins.
    pub fn load(manifest: DatasetManifest) -> Result<Self, EvalError> {
        let instances = manifest
            .entries
            .par_iter()
            .map(|e| load_instance(&e.path))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus { manifest, instances })
    }

    pub fn from_parts(manifest: DatasetManifest, instances: Vec<NormalizedInstance>) -> Self {
        assert_eq!(manifest.entries.len(), instances.len(), "one instance per manifest entry");
        Corpus { manifest, instances }
    }

    fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.manifest.entries.len()).filter(|&i| self.manifest.entries[i].split == split).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub path: String,
    pub label: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub path: String,
    pub label: String,
    pub accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    pub neighbors: Vec<Neighbor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

impl TimingStats {
    fn of(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return TimingStats { mean_seconds: 0.0, std_seconds: 0.0 };
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        TimingStats { mean_seconds: mean, std_seconds: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKReport {
    pub mode: Mode,
    pub k: usize,
    pub level: LabelLevel,
    /// Mean own-label share of the k nearest references, per label.
    pub per_class: BTreeMap<String, f64>,
    /// Unweighted mean of `per_class`.
    pub mean_accuracy: f64,
    pub tests: Vec<TestResult>,
    /// Per-test wall-clock statistics; `None` once stripped for reproducible output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingStats>,
    #[serde(skip)]
    neighbor_sets: Vec<Vec<usize>>,
}

impl TopKReport {
    /// Human-readable per-class accuracy table.
    pub fn render_table(&self) -> String {
        let width = self.per_class.keys().map(String::len).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "top-{} accuracy ({} mode)", self.k, self.mode);
        for (class, acc) in &self.per_class {
            let _ = writeln!(out, "{class:<width$}  {:>6.1}", 100.0 * acc);
        }
        let _ = writeln!(out, "{:<width$}  {:>6.1}", "mean", 100.0 * self.mean_accuracy);
        if let Some(t) = self.timing {
            let _ = writeln!(out, "time per test instance: {:.3e} s (std {:.3e} s)", t.mean_seconds, t.std_seconds);
        }
        out
    }

    /// Drops wall-clock measurements so that repeated runs serialize identically.
    pub fn strip_timings(&mut self) {
        self.timing = None;
        for t in &mut self.tests {
            t.seconds = None;
        }
    }

    /// Reference indices (manifest positions) selected for each test.
    pub fn neighbor_sets(&self) -> &[Vec<usize>] {
        &self.neighbor_sets
    }
}

/// Distances from each test instance to every reference instance; the `k`
/// nearest (ties in manifest order) are scored by the share carrying the
/// test instance's label.
pub fn topk_accuracy(
    corpus: &Corpus,
    k: usize,
    params: &DistanceParams,
    mode: Mode,
    level: LabelLevel,
) -> Result<TopKReport, EvalError> {
    let manifest = &corpus.manifest;
    manifest.check_references(level)?;
    let tests = corpus.indices(Split::Test);
    let refs = corpus.indices(Split::Reference);
    if tests.is_empty() {
        return Err(EvalError::NoTests);
    }
    if k == 0 || k > refs.len() {
        return Err(EvalError::KTooLarge { k, references: refs.len() });
    }
    let test_instances: Vec<_> = tests.iter().map(|&i| corpus.instances[i].clone()).collect();
    let ref_instances: Vec<_> = refs.iter().map(|&i| corpus.instances[i].clone()).collect();
    let (distances, times) = cross_distances(&test_instances, &ref_instances, params, mode);

    let mut results = Vec::with_capacity(tests.len());
    let mut neighbor_sets = Vec::with_capacity(tests.len());
    let mut by_class: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((&t, row), elapsed) in tests.iter().zip(&distances).zip(&times) {
        let label = manifest.label(t, level)?.to_string();
        let mut order: Vec<usize> = (0..refs.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        order.truncate(k);
        let mut neighbors = Vec::with_capacity(k);
        let mut hits = 0usize;
        for &r in &order {
            let ref_label = manifest.label(refs[r], level)?;
            if ref_label == label {
                hits += 1;
            }
            neighbors.push(Neighbor {
                path: manifest.entries[refs[r]].path.display().to_string(),
                label: ref_label.to_string(),
                distance: row[r],
            });
        }
        let accuracy = hits as f64 / k as f64;
        by_class.entry(label.clone()).or_default().push(accuracy);
        neighbor_sets.push(order.iter().map(|&r| refs[r]).collect());
        results.push(TestResult {
            path: manifest.entries[t].path.display().to_string(),
            label,
            accuracy,
            seconds: Some(elapsed.as_secs_f64()),
            neighbors,
        });
    }
    let per_class: BTreeMap<String, f64> =
        by_class.into_iter().map(|(c, v)| (c, v.iter().sum::<f64>() / v.len() as f64)).collect();
    let mean_accuracy = per_class.values().sum::<f64>() / per_class.len() as f64;
    let seconds: Vec<f64> = times.iter().map(Duration::as_secs_f64).collect();
    Ok(TopKReport {
        mode,
        k,
        level,
        per_class,
        mean_accuracy,
        tests: results,
        timing: Some(TimingStats::of(&seconds)),
        neighbor_sets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassComparison {
    pub exact: f64,
    pub greedy: f64,
    /// `greedy - exact`.
    pub delta: f64,
    /// Mean share of neighbors selected by both modes.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub k: usize,
    pub per_class: BTreeMap<String, ClassComparison>,
    pub mean_overlap: f64,
    pub identical_classes: usize,
    /// Mean exact time per test instance over mean greedy time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_ratio: Option<f64>,
    pub exact: TopKReport,
    pub greedy: TopKReport,
}

impl ModeComparison {
    pub fn render_table(&self) -> String {
        let width = self.per_class.keys().map(String::len).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "top-{} accuracy, exact vs greedy", self.k);
        let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6}  {:>7}", "class", "exact", "greedy", "delta", "overlap");
        for (class, c) in &self.per_class {
            let _ = writeln!(
                out,
                "{class:<width$}  {:>6.1}  {:>6.1}  {:>+6.1}  {:>7.3}",
                100.0 * c.exact,
                100.0 * c.greedy,
                100.0 * c.delta,
                c.overlap
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.1}  {:>6.1}  {:>+6.1}  {:>7.3}",
            "mean",
            100.0 * self.exact.mean_accuracy,
            100.0 * self.greedy.mean_accuracy,
            100.0 * (self.greedy.mean_accuracy - self.exact.mean_accuracy),
            self.mean_overlap
        );
        let _ = write!(out, "identical classes: {}/{}", self.identical_classes, self.per_class.len());
        if let Some(r) = self.time_ratio {
            let _ = write!(out, "; exact/greedy time ratio: {r:.1}");
        }
        out.push('\n');
        out
    }

    pub fn strip_timings(&mut self) {
        self.time_ratio = None;
        self.exact.strip_timings();
        self.greedy.strip_timings();
    }
}

/// Share of common elements between two neighbor lists of length `k`.
pub fn neighbor_overlap(a: &[usize], b: &[usize], k: usize) -> f64 {
    let set: HashSet<_> = a.iter().collect();
    b.iter().filter(|x| set.contains(x)).count() as f64 / k as f64
}

pub fn compare_modes(
    corpus: &Corpus,
    k: usize,
    params: &DistanceParams,
    level: LabelLevel,
) -> Result<ModeComparison, EvalError> {
    let exact = topk_accuracy(corpus, k, params, Mode::Exact, level)?;
    let greedy = topk_accuracy(corpus, k, params, Mode::Greedy, level)?;
    let overlaps: Vec<f64> = exact
        .neighbor_sets
        .iter()
        .zip(&greedy.neighbor_sets)
        .map(|(a, b)| neighbor_overlap(a, b, k))
        .collect();
    let mut class_overlap: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (t, o) in exact.tests.iter().zip(&overlaps) {
        class_overlap.entry(&t.label).or_default().push(*o);
    }
    let per_class: BTreeMap<String, ClassComparison> = exact
        .per_class
        .iter()
        .map(|(c, &e)| {
            let g = greedy.per_class[c];
            let o = &class_overlap[c.as_str()];
            let overlap = o.iter().sum::<f64>() / o.len() as f64;
            (c.clone(), ClassComparison { exact: e, greedy: g, delta: g - e, overlap })
        })
        .collect();
    let identical_classes = per_class.values().filter(|c| c.delta == 0.0).count();
    let mean_overlap = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
    let time_ratio = match (exact.timing, greedy.timing) {
        (Some(e), Some(g)) if g.mean_seconds > 0.0 => Some(e.mean_seconds / g.mean_seconds),
        _ => None,
    };
    Ok(ModeComparison { k, per_class, mean_overlap, identical_classes, time_ratio, exact, greedy })
}
