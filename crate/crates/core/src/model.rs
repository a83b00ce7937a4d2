//! Shared vocabulary: feature classes, exact proportions, constraint templates,
//! normalized instances and distance weights.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid proportion {num}/{den}")]
    InvalidProportion { num: u64, den: u64 },
    #[error("cannot parse proportion `{0}` (expected \"num/den\")")]
    ProportionSyntax(String),
    #[error("unknown {kind} class `{token}`")]
    UnknownClass { kind: &'static str, token: String },
    #[error("template pair proportions sum to {0}, expected 1")]
    TemplateMassNotOne(String),
    #[error("template proportions sum to {0}, expected 1")]
    InstanceMassNotOne(String),
    #[error("template has no weight-variable pairs")]
    EmptyTemplate,
    #[error("zero proportion stored for pair {0}")]
    ZeroProportion(PairKey),
    #[error("duplicate template in normalized instance")]
    DuplicateTemplate,
    #[error("rhs class `none` is reserved for objectives")]
    ObjectiveRhsOnConstraint,
    #[error("objective template must carry rhs class `none`")]
    ConstraintRhsOnObjective,
    #[error("normalized instance has constraints but no templates")]
    NoTemplates,
    #[error("distance parameter {name} = {value} must be finite and non-negative")]
    InvalidParam { name: &'static str, value: f64 },
}

/// Variable domain class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarClass {
    Binary,
    Integer,
    Continuous,
}

/// Coefficient class: the two dominant singletons and everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightClass {
    MinusOne,
    One,
    OtherReal,
}

/// Right-hand-side class. `NoneObjective` only ever labels an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhsClass {
    Zero,
    One,
    OtherReal,
    NoneObjective,
}

impl VarClass {
    pub const ALL: [VarClass; 3] = [VarClass::Binary, VarClass::Integer, VarClass::Continuous];

    pub fn symbol(self) -> &'static str {
        match self {
            VarClass::Binary => "B",
            VarClass::Integer => "I",
            VarClass::Continuous => "C",
        }
    }
}

impl WeightClass {
    pub const ALL: [WeightClass; 3] = [WeightClass::MinusOne, WeightClass::One, WeightClass::OtherReal];

    /// Display form used in template tables.
    pub fn symbol(self) -> &'static str {
        match self {
            WeightClass::MinusOne => "−1",
            WeightClass::One => "1",
            WeightClass::OtherReal => "ℝ",
        }
    }

    fn token(self) -> &'static str {
        match self {
            WeightClass::MinusOne => "-1",
            WeightClass::One => "1",
            WeightClass::OtherReal => "R",
        }
    }
}

impl RhsClass {
    pub fn symbol(self) -> &'static str {
        match self {
            RhsClass::Zero => "0",
            RhsClass::One => "1",
            RhsClass::OtherReal => "ℝ",
            RhsClass::NoneObjective => "none",
        }
    }

    fn token(self) -> &'static str {
        match self {
            RhsClass::Zero => "0",
            RhsClass::One => "1",
            RhsClass::OtherReal => "R",
            RhsClass::NoneObjective => "none",
        }
    }
}

impl FromStr for VarClass {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "B" => Ok(VarClass::Binary),
            "I" => Ok(VarClass::Integer),
            "C" => Ok(VarClass::Continuous),
            _ => Err(ModelError::UnknownClass { kind: "variable", token: s.to_string() }),
        }
    }
}

impl FromStr for WeightClass {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-1" | "−1" => Ok(WeightClass::MinusOne),
            "1" => Ok(WeightClass::One),
            "R" | "ℝ" => Ok(WeightClass::OtherReal),
            _ => Err(ModelError::UnknownClass { kind: "weight", token: s.to_string() }),
        }
    }
}

impl FromStr for RhsClass {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(RhsClass::Zero),
            "1" => Ok(RhsClass::One),
            "R" | "ℝ" => Ok(RhsClass::OtherReal),
            "none" => Ok(RhsClass::NoneObjective),
            _ => Err(ModelError::UnknownClass { kind: "rhs", token: s.to_string() }),
        }
    }
}

/// An exact fraction in `[0, 1]`, always kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Proportion(Ratio<u64>);

impl Proportion {
    pub const ONE: Proportion = Proportion(Ratio::new_raw(1, 1));
    pub const ZERO: Proportion = Proportion(Ratio::new_raw(0, 1));

    pub fn new(num: u64, den: u64) -> Result<Self, ModelError> {
        if den == 0 || num > den {
            return Err(ModelError::InvalidProportion { num, den });
        }
        Ok(Proportion(Ratio::new(num, den)))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Proportion {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::ProportionSyntax(s.to_string());
        let (num, den) = s.split_once('/').ok_or_else(bad)?;
        let num = num.trim().parse().map_err(|_| bad())?;
        let den = den.trim().parse().map_err(|_| bad())?;
        Proportion::new(num, den)
    }
}

/// Exact sum of proportions, wide enough for any realistic instance.
pub(crate) fn exact_sum<'a>(props: impl IntoIterator<Item = &'a Proportion>) -> Ratio<u128> {
    props
        .into_iter()
        .fold(Ratio::new_raw(0u128, 1), |acc, p| acc + Ratio::new(p.numer() as u128, p.denom() as u128))
}

/// A (weight class, variable class) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub weight: WeightClass,
    pub variable: VarClass,
}

impl PairKey {
    pub const COUNT: usize = 9;

    pub fn new(weight: WeightClass, variable: VarClass) -> Self {
        PairKey { weight, variable }
    }

    /// Dense index in `0..9`, consistent with the `Ord` impl.
    pub fn index(self) -> usize {
        self.weight as usize * 3 + self.variable as usize
    }

    pub fn from_index(idx: usize) -> Self {
        assert!(idx < Self::COUNT, "pair index out of range");
        PairKey::new(WeightClass::ALL[idx / 3], VarClass::ALL[idx % 3])
    }

    pub fn all() -> impl Iterator<Item = PairKey> {
        (0..Self::COUNT).map(PairKey::from_index)
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.weight.symbol(), self.variable.symbol())
    }
}

/// A constraint reduced to the proportions of its weight-variable pairs and
/// the class of its right-hand side.
///
/// Pair proportions sum to exactly one and no stored proportion is zero. The
/// only template allowed to be empty is the objective of an instance whose
/// objective has no nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintTemplate {
    pairs: BTreeMap<PairKey, Proportion>,
    rhs: RhsClass,
}

impl ConstraintTemplate {
    pub fn new(pairs: BTreeMap<PairKey, Proportion>, rhs: RhsClass) -> Result<Self, ModelError> {
        if let Some((k, _)) = pairs.iter().find(|(_, p)| p.is_zero()) {
            return Err(ModelError::ZeroProportion(*k));
        }
        if pairs.is_empty() {
            if rhs == RhsClass::NoneObjective {
                return Ok(ConstraintTemplate { pairs, rhs });
            }
            return Err(ModelError::EmptyTemplate);
        }
        let total = exact_sum(pairs.values());
        if total != Ratio::from_integer(1) {
            return Err(ModelError::TemplateMassNotOne(total.to_string()));
        }
        Ok(ConstraintTemplate { pairs, rhs })
    }

    /// Builds a template from raw occurrence counts indexed by [`PairKey::index`].
    pub fn from_counts(counts: &[u64; PairKey::COUNT], rhs: RhsClass) -> Result<Self, ModelError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return ConstraintTemplate::new(BTreeMap::new(), rhs);
        }
        let pairs = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| Proportion::new(c, total).map(|p| (PairKey::from_index(i), p)))
            .collect::<Result<_, _>>()?;
        ConstraintTemplate::new(pairs, rhs)
    }

    pub fn pairs(&self) -> &BTreeMap<PairKey, Proportion> {
        &self.pairs
    }

    pub fn rhs(&self) -> RhsClass {
        self.rhs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Deterministic byte encoding: pair count, then each pair in
    /// `(WeightClass, VarClass)` order with its reduced fraction, then the rhs.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(2 + self.pairs.len() * 18);
        key.push(self.pairs.len() as u8);
        for (pair, p) in &self.pairs {
            key.push(pair.weight as u8);
            key.push(pair.variable as u8);
            key.extend_from_slice(&p.numer().to_be_bytes());
            key.extend_from_slice(&p.denom().to_be_bytes());
        }
        key.push(self.rhs as u8);
        key
    }
}

/// The dimension-free form of an instance: an objective template plus the
/// distinct constraint templates weighted by how often they occur.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInstance {
    name: String,
    num_constraints: u64,
    num_variables: u64,
    objective: ConstraintTemplate,
    templates: Vec<(ConstraintTemplate, Proportion)>,
}

impl NormalizedInstance {
    /// Validates and stores the templates sorted by template order.
    pub fn new(
        name: impl Into<String>,
        num_constraints: u64,
        num_variables: u64,
        objective: ConstraintTemplate,
        mut templates: Vec<(ConstraintTemplate, Proportion)>,
    ) -> Result<Self, ModelError> {
        if objective.rhs() != RhsClass::NoneObjective {
            return Err(ModelError::ConstraintRhsOnObjective);
        }
        if templates.iter().any(|(t, _)| t.rhs() == RhsClass::NoneObjective) {
            return Err(ModelError::ObjectiveRhsOnConstraint);
        }
        if templates.is_empty() {
            if num_constraints > 0 {
                return Err(ModelError::NoTemplates);
            }
        } else {
            let total = exact_sum(templates.iter().map(|(_, p)| p));
            if total != Ratio::from_integer(1) {
                return Err(ModelError::InstanceMassNotOne(total.to_string()));
            }
        }
        if let Some((t, _)) = templates.iter().find(|(_, p)| p.is_zero()) {
            return Err(ModelError::ZeroProportion(*t.pairs().keys().next().unwrap()));
        }
        templates.sort_by(|a, b| a.0.cmp(&b.0));
        if templates.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ModelError::DuplicateTemplate);
        }
        Ok(NormalizedInstance {
            name: name.into(),
            num_constraints,
            num_variables,
            objective,
            templates,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of constraints after canonicalization (`m`).
    pub fn num_constraints(&self) -> u64 {
        self.num_constraints
    }

    /// Number of variables (`n`).
    pub fn num_variables(&self) -> u64 {
        self.num_variables
    }

    pub fn objective(&self) -> &ConstraintTemplate {
        &self.objective
    }

    pub fn templates(&self) -> &[(ConstraintTemplate, Proportion)] {
        &self.templates
    }

    pub fn proportion_of(&self, template: &ConstraintTemplate) -> Option<Proportion> {
        self.templates
            .binary_search_by(|(t, _)| t.cmp(template))
            .ok()
            .map(|i| self.templates[i].1)
    }

    /// Same structure, compared without the name and size metadata.
    pub fn same_structure(&self, other: &NormalizedInstance) -> bool {
        self.objective == other.objective && self.templates == other.templates
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("normalized instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, JsonError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        Ok(doc.try_into()?)
    }
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

// JSON documents. Proportions are strings "num/den"; classes use ASCII tokens.

#[derive(Serialize, Deserialize)]
struct PairDoc {
    weight: String,
    variable: String,
    proportion: String,
}

#[derive(Serialize, Deserialize)]
struct TemplateDoc {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    proportion: Option<String>,
    pairs: Vec<PairDoc>,
    rhs: String,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    name: String,
    num_constraints: u64,
    num_variables: u64,
    objective: TemplateDoc,
    templates: Vec<TemplateDoc>,
}

impl TemplateDoc {
    fn new(t: &ConstraintTemplate, proportion: Option<Proportion>) -> Self {
        TemplateDoc {
            proportion: proportion.map(|p| p.to_string()),
            pairs: t
                .pairs()
                .iter()
                .map(|(k, p)| PairDoc {
                    weight: k.weight.token().to_string(),
                    variable: k.variable.symbol().to_string(),
                    proportion: p.to_string(),
                })
                .collect(),
            rhs: t.rhs().token().to_string(),
        }
    }

    fn template(&self) -> Result<ConstraintTemplate, ModelError> {
        let mut pairs = BTreeMap::new();
        for doc in &self.pairs {
            let key = PairKey::new(doc.weight.parse()?, doc.variable.parse()?);
            pairs.insert(key, doc.proportion.parse()?);
        }
        ConstraintTemplate::new(pairs, self.rhs.parse()?)
    }
}

impl From<&NormalizedInstance> for InstanceDoc {
    fn from(n: &NormalizedInstance) -> Self {
        InstanceDoc {
            name: n.name.clone(),
            num_constraints: n.num_constraints,
            num_variables: n.num_variables,
            objective: TemplateDoc::new(&n.objective, None),
            templates: n.templates.iter().map(|(t, p)| TemplateDoc::new(t, Some(*p))).collect(),
        }
    }
}

impl TryFrom<InstanceDoc> for NormalizedInstance {
    type Error = ModelError;
    fn try_from(doc: InstanceDoc) -> Result<Self, Self::Error> {
        let objective = doc.objective.template()?;
        let templates = doc
            .templates
            .iter()
            .map(|t| {
                let p = t
                    .proportion
                    .as_deref()
                    .ok_or_else(|| ModelError::ProportionSyntax(String::new()))?
                    .parse()?;
                Ok((t.template()?, p))
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        NormalizedInstance::new(doc.name, doc.num_constraints, doc.num_variables, objective, templates)
    }
}

/// Weights of the weight, variable, rhs and objective terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
}

impl DistanceParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, zeta: f64) -> Result<Self, ModelError> {
        for (name, value) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("zeta", zeta)] {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidParam { name, value });
            }
        }
        Ok(DistanceParams { alpha, beta, gamma, zeta })
    }
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams { alpha: 1.0, beta: 1.0, gamma: 1.0, zeta: 1.0 }
    }
}
