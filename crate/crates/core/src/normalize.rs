//! Feature classification and folding of a canonical model into its
//! normalized template form.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::canonical::CanonicalInstance;
use crate::model::{ConstraintTemplate, ModelError, NormalizedInstance, PairKey, Proportion, RhsClass, WeightClass};

/// Absolute tolerance for matching the singleton classes.
pub const CLASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum NormalizeError {
    #[error("non-finite value {0}")]
    NonFiniteValue(f64),
    #[error("instance has no constraints")]
    EmptyInstance,
    #[error("coefficient references variable {0}, which does not exist")]
    UnknownVariable(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn classify_weight(w: f64) -> Result<WeightClass, NormalizeError> {
    if !w.is_finite() {
        return Err(NormalizeError::NonFiniteValue(w));
    }
    Ok(if (w + 1.0).abs() <= CLASS_TOLERANCE {
        WeightClass::MinusOne
    } else if (w - 1.0).abs() <= CLASS_TOLERANCE {
        WeightClass::One
    } else {
        WeightClass::OtherReal
    })
}

pub fn classify_rhs(b: f64) -> Result<RhsClass, NormalizeError> {
    if !b.is_finite() {
        return Err(NormalizeError::NonFiniteValue(b));
    }
    Ok(if b.abs() <= CLASS_TOLERANCE {
        RhsClass::Zero
    } else if (b - 1.0).abs() <= CLASS_TOLERANCE {
        RhsClass::One
    } else {
        RhsClass::OtherReal
    })
}

fn fold_row(
    c: &CanonicalInstance,
    coefficients: &[(usize, f64)],
    rhs: RhsClass,
) -> Result<ConstraintTemplate, NormalizeError> {
    let mut counts = [0u64; PairKey::COUNT];
    for &(j, w) in coefficients {
        let var = c.variables.get(j).ok_or(NormalizeError::UnknownVariable(j))?;
        counts[PairKey::new(classify_weight(w)?, var.class).index()] += 1;
    }
    Ok(ConstraintTemplate::from_counts(&counts, rhs)?)
}

/// Folds every constraint into its template and merges identical templates,
/// weighting each by its share of the constraint rows.
pub fn normalize(c: &CanonicalInstance) -> Result<NormalizedInstance, NormalizeError> {
    let m = c.constraints.len() as u64;
    if m == 0 {
        return Err(NormalizeError::EmptyInstance);
    }
    let objective = fold_row(c, &c.objective, RhsClass::NoneObjective)?;

    let mut multiplicity: HashMap<ConstraintTemplate, u64> = HashMap::new();
    for row in &c.constraints {
        let t = fold_row(c, &row.coefficients, classify_rhs(row.rhs)?)?;
        *multiplicity.entry(t).or_insert(0) += 1;
    }
    let templates = multiplicity
        .into_iter()
        .map(|(t, count)| Ok((t, Proportion::new(count, m)?)))
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(NormalizedInstance::new(c.name.clone(), m, c.variables.len() as u64, objective, templates)?)
}

/// Mantissa-exponent form with one decimal, e.g. `2.0e-1`, `1.0e-0`.
pub fn format_proportion(p: f64) -> String {
    if p <= 0.0 {
        return "0.0e-0".into();
    }
    let mut exp = p.log10().floor() as i32;
    let mut mantissa = (p / 10f64.powi(exp) * 10.0).round() / 10.0;
    if mantissa >= 10.0 {
        mantissa /= 10.0;
        exp += 1;
    } else if mantissa < 1.0 {
        mantissa *= 10.0;
        exp -= 1;
    }
    if exp <= 0 {
        format!("{mantissa:.1}e-{}", -exp)
    } else {
        format!("{mantissa:.1}e{exp}")
    }
}

/// Two decimals with a trailing zero dropped: `0.33`, `0.5`, `1.0`.
pub fn format_pair_share(p: f64) -> String {
    let s = format!("{p:.2}");
    match s.strip_suffix('0') {
        Some(short) => short.to_string(),
        None => s,
    }
}

/// `0.33 × ℝ·B + 0.67 × 1·C`; pairs by descending share, then class order.
pub fn format_template_lhs(t: &ConstraintTemplate) -> String {
    if t.is_empty() {
        return "0".into();
    }
    let mut pairs: Vec<_> = t.pairs().iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    pairs
        .iter()
        .map(|(k, p)| format!("{} × {}", format_pair_share(p.to_f64()), k))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Templates in display order: descending proportion, ties by canonical key.
pub fn display_order(n: &NormalizedInstance) -> Vec<&(ConstraintTemplate, Proportion)> {
    let mut rows: Vec<_> = n.templates().iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.canonical_key().cmp(&b.0.canonical_key())));
    rows
}

/// Objective line, header, then one line per template.
pub fn render_template_table(n: &NormalizedInstance) -> String {
    let rows: Vec<(String, String)> = display_order(n)
        .into_iter()
        .map(|(t, p)| (format_proportion(p.to_f64()), format!("{} ≤ {}", format_template_lhs(t), t.rhs().symbol())))
        .collect();
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "Minimize {}", format_template_lhs(n.objective()));
    let _ = writeln!(out, "{:<width$} | Constraint Representation", "Prop");
    for (prop, repr) in rows {
        let _ = writeln!(out, "{prop:<width$} | {repr}");
    }
    out
}
