//! Rewriting a parsed MPS model into minimization form with `<=` rows only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::VarClass;
use crate::mps::{Bound, BoundType, Column, ObjSense, RawInstance, Row, RowSense};

#[derive(Debug, Error, PartialEq)]
pub enum CanonicalError {
    #[error("model has no objective (N) row")]
    NoObjectiveRow,
    #[error("column `{column}` has lower bound {lower} above upper bound {upper}")]
    InfeasibleBoundDeclaration { column: String, lower: f64, upper: f64 },
    #[error("coefficient of `{column}` is not finite")]
    NonFinite { column: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub class: VarClass,
}

/// `sum(coefficients) <= rhs`, nonzero coefficients only.
#[derive(Debug, Clone, PartialEq)]
pub struct LeRow {
    pub coefficients: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A model in `min c'x s.t. Ax <= b` form. Coefficients index into `variables`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalInstance {
    pub name: String,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<LeRow>,
    pub variables: Vec<Variable>,
}

impl CanonicalInstance {
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Free-format MPS text; reading it back and canonicalizing reproduces `self`.
    pub fn to_mps(&self) -> String {
        write_mps(&self.to_raw())
    }

    /// The same model as an MPS document with `L` rows and class-preserving bounds.
    pub fn to_raw(&self) -> RawInstance {
        let mut rows = vec![Row { name: "obj".into(), sense: RowSense::Free }];
        rows.extend((0..self.constraints.len()).map(|i| Row { name: format!("c{i}"), sense: RowSense::Le }));
        let columns = self
            .variables
            .iter()
            .map(|v| Column { name: v.name.clone(), integer: v.class != VarClass::Continuous })
            .collect();
        let mut coefficients = BTreeMap::new();
        for &(j, w) in &self.objective {
            coefficients.insert((0, j), w);
        }
        let mut rhs = BTreeMap::new();
        for (i, row) in self.constraints.iter().enumerate() {
            for &(j, w) in &row.coefficients {
                coefficients.insert((i + 1, j), w);
            }
            if row.rhs != 0.0 {
                rhs.insert(i + 1, row.rhs);
            }
        }
        let bounds = self
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.class == VarClass::Binary)
            .map(|(j, _)| Bound { kind: BoundType::Bv, column: j, value: None })
            .collect();
        RawInstance {
            name: self.name.clone(),
            objective_sense: ObjSense::Minimize,
            rows,
            objective_row: Some(0),
            columns,
            coefficients,
            rhs,
            ranges: BTreeMap::new(),
            bounds,
        }
    }
}

fn push_row(out: &mut Vec<LeRow>, coefficients: &[(usize, f64)], sign: f64, rhs: f64) {
    if coefficients.is_empty() {
        return;
    }
    out.push(LeRow {
        coefficients: coefficients.iter().map(|&(j, w)| (j, sign * w)).collect(),
        rhs: sign * rhs,
    });
}

/// Minimization with `<=` rows only.
///
/// `G` rows are negated, `E` rows become a `<=` row and a negated `>=` row,
/// ranged rows gain their second side, and extra `N` rows, bound declarations
/// and rows without nonzeros produce no constraint. Variables are binary when
/// declared integer with bounds `[0, 1]`, integer when declared integer
/// otherwise, and continuous else.
pub fn canonicalize(raw: &RawInstance) -> Result<CanonicalInstance, CanonicalError> {
    let objective_row = raw.objective_row.ok_or(CanonicalError::NoObjectiveRow)?;

    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); raw.rows.len()];
    for (&(row, col), &value) in &raw.coefficients {
        if !value.is_finite() {
            return Err(CanonicalError::NonFinite { column: raw.columns[col].name.clone() });
        }
        if value != 0.0 {
            per_row[row].push((col, value));
        }
    }

    let sign = match raw.objective_sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    let objective = per_row[objective_row].iter().map(|&(j, w)| (j, sign * w)).collect();

    let mut constraints = Vec::new();
    for (i, row) in raw.rows.iter().enumerate() {
        let coefs = &per_row[i];
        let b = raw.rhs_of(i);
        let range = raw.ranges.get(&i).copied();
        match (row.sense, range) {
            (RowSense::Free, _) => {}
            (RowSense::Le, None) => push_row(&mut constraints, coefs, 1.0, b),
            (RowSense::Ge, None) => push_row(&mut constraints, coefs, -1.0, b),
            (RowSense::Le, Some(r)) => {
                push_row(&mut constraints, coefs, 1.0, b);
                push_row(&mut constraints, coefs, -1.0, b - r.abs());
            }
            (RowSense::Ge, Some(r)) => {
                push_row(&mut constraints, coefs, 1.0, b + r.abs());
                push_row(&mut constraints, coefs, -1.0, b);
            }
            (RowSense::Eq, r) => {
                let (lo, hi) = match r {
                    Some(r) if r > 0.0 => (b, b + r),
                    Some(r) if r < 0.0 => (b + r, b),
                    _ => (b, b),
                };
                push_row(&mut constraints, coefs, 1.0, hi);
                push_row(&mut constraints, coefs, -1.0, lo);
            }
        }
    }

    let mut lower = vec![0.0f64; raw.columns.len()];
    let mut upper = vec![f64::INFINITY; raw.columns.len()];
    for bound in &raw.bounds {
        let j = bound.column;
        let v = bound.value.unwrap_or(0.0);
        match bound.kind {
            BoundType::Up | BoundType::Ui => {
                if v < 0.0 && lower[j] == 0.0 {
                    lower[j] = f64::NEG_INFINITY;
                }
                upper[j] = v;
            }
            BoundType::Lo | BoundType::Li => lower[j] = v,
            BoundType::Fx => {
                lower[j] = v;
                upper[j] = v;
            }
            BoundType::Fr => {
                lower[j] = f64::NEG_INFINITY;
                upper[j] = f64::INFINITY;
            }
            BoundType::Mi => lower[j] = f64::NEG_INFINITY,
            BoundType::Pl => upper[j] = f64::INFINITY,
            BoundType::Bv => {
                lower[j] = 0.0;
                upper[j] = 1.0;
            }
        }
    }

    let mut variables = Vec::with_capacity(raw.columns.len());
    for (j, col) in raw.columns.iter().enumerate() {
        if lower[j] > upper[j] {
            return Err(CanonicalError::InfeasibleBoundDeclaration {
                column: col.name.clone(),
                lower: lower[j],
                upper: upper[j],
            });
        }
        let class = if !col.integer {
            VarClass::Continuous
        } else if lower[j] == 0.0 && upper[j] == 1.0 {
            VarClass::Binary
        } else {
            VarClass::Integer
        };
        variables.push(Variable { name: col.name.clone(), class });
    }

    Ok(CanonicalInstance { name: raw.name.clone(), objective, constraints, variables })
}

fn mps_name(name: &str) -> String {
    if name.is_empty() {
        return "_".into();
    }
    name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}

/// Free-format MPS text for a parsed model.
pub fn write_mps(raw: &RawInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", mps_name(&raw.name));
    if raw.objective_sense == ObjSense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    for row in &raw.rows {
        let tag = match row.sense {
            RowSense::Free => "N",
            RowSense::Le => "L",
            RowSense::Ge => "G",
            RowSense::Eq => "E",
        };
        let _ = writeln!(out, " {tag}  {}", mps_name(&row.name));
    }

    let mut by_column: Vec<Vec<(usize, f64)>> = vec![Vec::new(); raw.columns.len()];
    for (&(i, j), &w) in &raw.coefficients {
        by_column[j].push((i, w));
    }
    out.push_str("COLUMNS\n");
    let mut in_block = false;
    let mut marker = 0;
    for (j, col) in raw.columns.iter().enumerate() {
        if col.integer != in_block {
            let tag = if col.integer { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    MARKER{marker}  'MARKER'  '{tag}'");
            marker += 1;
            in_block = col.integer;
        }
        let name = mps_name(&col.name);
        if by_column[j].is_empty() {
            // Keep the column declared even without coefficients.
            let obj = raw.objective_row.map(|r| raw.rows[r].name.as_str()).unwrap_or("obj");
            let _ = writeln!(out, "    {name}  {}  0", mps_name(obj));
        }
        for &(i, w) in &by_column[j] {
            let _ = writeln!(out, "    {name}  {}  {w:?}", mps_name(&raw.rows[i].name));
        }
    }
    if in_block {
        let _ = writeln!(out, "    MARKER{marker}  'MARKER'  'INTEND'");
    }
    if !raw.rhs.is_empty() {
        out.push_str("RHS\n");
        for (&i, &b) in &raw.rhs {
            let _ = writeln!(out, "    RHS  {}  {b:?}", mps_name(&raw.rows[i].name));
        }
    }
    if !raw.ranges.is_empty() {
        out.push_str("RANGES\n");
        for (&i, &r) in &raw.ranges {
            let _ = writeln!(out, "    RNG  {}  {r:?}", mps_name(&raw.rows[i].name));
        }
    }
    if !raw.bounds.is_empty() {
        out.push_str("BOUNDS\n");
        for b in &raw.bounds {
            let tag = match b.kind {
                BoundType::Up => "UP",
                BoundType::Lo => "LO",
                BoundType::Fx => "FX",
                BoundType::Fr => "FR",
                BoundType::Mi => "MI",
                BoundType::Pl => "PL",
                BoundType::Bv => "BV",
                BoundType::Li => "LI",
                BoundType::Ui => "UI",
            };
            let name = mps_name(&raw.columns[b.column].name);
            match b.value {
                Some(v) => {
                    let _ = writeln!(out, " {tag} BND  {name}  {v:?}");
                }
                None => {
                    let _ = writeln!(out, " {tag} BND  {name}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
