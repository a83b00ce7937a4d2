//! MPS reader (fixed and free format, optionally gzip-compressed).
//!
//! The reader keeps the file's content as declared: row senses, coefficients,
//! right-hand sides, ranges, bounds and integrality markers. Turning that into
//! the all-`<=` minimization form is [`crate::canonical::canonicalize`]'s job.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("empty MPS document")]
    EmptyFile,
    #[error("line {line}, column {column}: malformed {section} entry: {message}")]
    MalformedSection {
        line: usize,
        column: usize,
        section: &'static str,
        message: String,
    },
    #[error("line {line}: row `{name}` declared twice")]
    DuplicateRow { line: usize, name: String },
    #[error("line {line}, column {column}: reference to undeclared row `{name}`")]
    UnknownRowReference { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: reference to undeclared column `{name}`")]
    UnknownColumnReference { line: usize, column: usize, name: String },
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: section `{name}` is not supported (quadratic, SOS and indicator data cannot be represented)")]
    UnsupportedSection { line: usize, name: String },
    #[error("input looks like {0} format; only MPS is supported")]
    UnsupportedFormat(&'static str),
    #[error("MPS document is not valid UTF-8")]
    Encoding,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundType {
    Up,
    Lo,
    Fx,
    Fr,
    Mi,
    Pl,
    Bv,
    Li,
    Ui,
}

impl BoundType {
    fn parse(token: &str) -> Option<Self> {
        Some(match token.to_ascii_uppercase().as_str() {
            "UP" => BoundType::Up,
            "LO" => BoundType::Lo,
            "FX" => BoundType::Fx,
            "FR" => BoundType::Fr,
            "MI" => BoundType::Mi,
            "PL" => BoundType::Pl,
            "BV" => BoundType::Bv,
            "LI" => BoundType::Li,
            "UI" => BoundType::Ui,
            _ => return None,
        })
    }

    fn needs_value(self) -> bool {
        matches!(self, BoundType::Up | BoundType::Lo | BoundType::Fx | BoundType::Li | BoundType::Ui)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub sense: RowSense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub kind: BoundType,
    pub column: usize,
    pub value: Option<f64>,
}

/// Faithful transcription of an MPS document. Row and column references are
/// indices into `rows` and `columns`, so they always point at declared items.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub name: String,
    pub objective_sense: ObjSense,
    pub rows: Vec<Row>,
    /// Index of the first free row, which is the objective.
    pub objective_row: Option<usize>,
    pub columns: Vec<Column>,
    /// `(row, column) -> coefficient`.
    pub coefficients: BTreeMap<(usize, usize), f64>,
    /// Rows without an entry have rhs 0.
    pub rhs: BTreeMap<usize, f64>,
    pub ranges: BTreeMap<usize, f64>,
    pub bounds: Vec<Bound>,
}

impl RawInstance {
    pub fn rhs_of(&self, row: usize) -> f64 {
        self.rhs.get(&row).copied().unwrap_or(0.0)
    }
}

/// Reads and parses a file, decompressing gzip transparently.
pub fn read_mps_file(path: impl AsRef<Path>) -> Result<RawInstance, MpsError> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut raw = parse_mps(std::io::BufReader::new(file))?;
    if raw.name.is_empty() {
        raw.name = instance_stem(path.as_ref());
    }
    Ok(raw)
}

/// File name without `.mps`/`.gz` style extensions.
pub fn instance_stem(path: &Path) -> String {
    let mut name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    for ext in [".gz", ".mps", ".MPS", ".json"] {
        if let Some(stripped) = name.strip_suffix(ext) {
            name = stripped.to_string();
        }
    }
    name
}

pub fn parse_mps<R: Read>(mut source: R) -> Result<RawInstance, MpsError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut inflated = Vec::new();
        GzDecoder::new(bytes.as_slice()).read_to_end(&mut inflated)?;
        bytes = inflated;
    }
    let text = String::from_utf8(bytes).map_err(|_| MpsError::Encoding)?;
    parse_mps_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    ObjSense,
    ObjName,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

impl Section {
    fn label(self) -> &'static str {
        match self {
            Section::None => "header",
            Section::Name => "NAME",
            Section::ObjSense => "OBJSENSE",
            Section::ObjName => "OBJNAME",
            Section::Rows => "ROWS",
            Section::Columns => "COLUMNS",
            Section::Rhs => "RHS",
            Section::Ranges => "RANGES",
            Section::Bounds => "BOUNDS",
            Section::End => "ENDATA",
        }
    }
}

const UNSUPPORTED: &[&str] = &[
    "SOS", "SETS", "QUADOBJ", "QMATRIX", "QSECTION", "QCMATRIX", "CSECTION", "INDICATORS", "CONE",
    "GENCONS", "PWLOBJ",
];

const LP_KEYWORDS: &[&str] = &[
    "minimize", "maximize", "minimise", "maximise", "minimum", "maximum", "min", "max", "subject",
    "st", "s.t.",
];

/// A token with its 1-based column in the source line.
#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(|t| Tok { text: t, column: t.as_ptr() as usize - base + 1 })
        .collect()
}

/// Fixed-format fields (columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61).
fn fixed_fields(line: &str) -> Vec<Tok<'_>> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let mut out = Vec::new();
    for (start, end) in SPANS {
        if start >= line.len() {
            break;
        }
        let end = end.min(line.len());
        let (Some(raw), true) = (line.get(start..end), line.is_char_boundary(start)) else {
            break;
        };
        let text = raw.trim();
        if !text.is_empty() {
            let offset = raw.find(text).unwrap_or(0);
            out.push(Tok { text, column: start + offset + 1 });
        }
    }
    out
}

struct Parser {
    raw: RawInstance,
    row_index: HashMap<String, usize>,
    col_index: HashMap<String, usize>,
    in_integer_block: bool,
    rhs_set: Option<String>,
    range_set: Option<String>,
    bound_set: Option<String>,
    objname: Option<(usize, String)>,
}

impl Parser {
    fn malformed(&self, line: usize, column: usize, section: Section, message: impl Into<String>) -> MpsError {
        MpsError::MalformedSection { line, column, section: section.label(), message: message.into() }
    }

    fn number(&self, tok: Tok<'_>, line: usize, section: Section) -> Result<f64, MpsError> {
        let value: f64 = tok
            .text
            .parse()
            .map_err(|_| self.malformed(line, tok.column, section, format!("`{}` is not a number", tok.text)))?;
        if !value.is_finite() && section != Section::Bounds {
            return Err(self.malformed(line, tok.column, section, "non-finite value"));
        }
        Ok(value)
    }

    fn row(&self, tok: Tok<'_>, line: usize) -> Result<usize, MpsError> {
        self.row_index.get(tok.text).copied().ok_or_else(|| MpsError::UnknownRowReference {
            line,
            column: tok.column,
            name: tok.text.to_string(),
        })
    }

    fn column(&self, tok: Tok<'_>, line: usize) -> Result<usize, MpsError> {
        self.col_index.get(tok.text).copied().ok_or_else(|| MpsError::UnknownColumnReference {
            line,
            column: tok.column,
            name: tok.text.to_string(),
        })
    }

    fn data_line(&mut self, section: Section, toks: &[Tok<'_>], line: &str, lineno: usize) -> Result<(), MpsError> {
        match section {
            Section::None => Err(self.malformed(lineno, toks[0].column, section, "data line before any section header")),
            Section::Name => {
                if self.raw.name.is_empty() {
                    self.raw.name = line.trim().to_string();
                }
                Ok(())
            }
            Section::ObjSense => {
                self.raw.objective_sense = parse_sense(toks[0].text)
                    .ok_or_else(|| self.malformed(lineno, toks[0].column, section, "expected MIN or MAX"))?;
                Ok(())
            }
            Section::ObjName => {
                self.objname = Some((lineno, toks[0].text.to_string()));
                Ok(())
            }
            Section::Rows => self.rows_line(toks, lineno),
            Section::Columns => self.columns_line(toks, lineno),
            Section::Rhs | Section::Ranges => self.vector_line(toks, lineno, section),
            Section::Bounds => self.bounds_line(toks, lineno),
            Section::End => Ok(()),
        }
    }

    fn rows_line(&mut self, toks: &[Tok<'_>], line: usize) -> Result<(), MpsError> {
        if toks.len() != 2 {
            return Err(self.malformed(line, toks[0].column, Section::Rows, "expected `<sense> <name>`"));
        }
        let sense = match toks[0].text.to_ascii_uppercase().as_str() {
            "N" => RowSense::Free,
            "L" => RowSense::Le,
            "G" => RowSense::Ge,
            "E" => RowSense::Eq,
            other => {
                return Err(self.malformed(line, toks[0].column, Section::Rows, format!("unknown row type `{other}`")))
            }
        };
        let name = toks[1].text.to_string();
        if self.row_index.contains_key(&name) {
            return Err(MpsError::DuplicateRow { line, name });
        }
        let idx = self.raw.rows.len();
        if sense == RowSense::Free && self.raw.objective_row.is_none() {
            self.raw.objective_row = Some(idx);
        }
        self.row_index.insert(name.clone(), idx);
        self.raw.rows.push(Row { name, sense });
        Ok(())
    }

    fn columns_line(&mut self, toks: &[Tok<'_>], line: usize) -> Result<(), MpsError> {
        if toks.len() >= 3 && toks[1].text.trim_matches('\'').eq_ignore_ascii_case("MARKER") {
            match toks[2].text.trim_matches('\'').to_ascii_uppercase().as_str() {
                "INTORG" => self.in_integer_block = true,
                "INTEND" => self.in_integer_block = false,
                other => {
                    return Err(self.malformed(line, toks[2].column, Section::Columns, format!("unknown marker `{other}`")))
                }
            }
            return Ok(());
        }
        if toks.len() != 3 && toks.len() != 5 {
            return Err(self.malformed(
                line,
                toks[0].column,
                Section::Columns,
                "expected `<column> <row> <value> [<row> <value>]`",
            ));
        }
        let entries = toks[1..]
            .chunks(2)
            .map(|pair| Ok((self.row(pair[0], line)?, self.number(pair[1], line, Section::Columns)?)))
            .collect::<Result<Vec<_>, MpsError>>()?;
        let col = match self.col_index.get(toks[0].text) {
            Some(&c) => {
                if self.in_integer_block {
                    self.raw.columns[c].integer = true;
                }
                c
            }
            None => {
                let c = self.raw.columns.len();
                self.col_index.insert(toks[0].text.to_string(), c);
                self.raw.columns.push(Column { name: toks[0].text.to_string(), integer: self.in_integer_block });
                c
            }
        };
        for (row, value) in entries {
            *self.raw.coefficients.entry((row, col)).or_insert(0.0) += value;
        }
        Ok(())
    }

    /// Shared by RHS and RANGES: `[set] row value [row value]`.
    fn vector_line(&mut self, toks: &[Tok<'_>], line: usize, section: Section) -> Result<(), MpsError> {
        let (set, rest) = if toks.len() % 2 == 1 { (Some(toks[0].text), &toks[1..]) } else { (None, toks) };
        if rest.is_empty() || rest.len() > 4 {
            return Err(self.malformed(line, toks[0].column, section, "expected `[<set>] <row> <value> [<row> <value>]`"));
        }
        let entries = rest
            .chunks(2)
            .map(|pair| Ok((self.row(pair[0], line)?, self.number(pair[1], line, section)?)))
            .collect::<Result<Vec<_>, MpsError>>()?;
        let chosen = if section == Section::Rhs { &mut self.rhs_set } else { &mut self.range_set };
        let set = set.unwrap_or("").to_string();
        match chosen {
            None => *chosen = Some(set),
            Some(existing) if *existing != set => {
                log::debug!("line {line}: ignoring additional {} set `{set}`", section.label());
                return Ok(());
            }
            _ => {}
        }
        let target = if section == Section::Rhs { &mut self.raw.rhs } else { &mut self.raw.ranges };
        target.extend(entries);
        Ok(())
    }

    fn bounds_line(&mut self, toks: &[Tok<'_>], line: usize) -> Result<(), MpsError> {
        let kind = BoundType::parse(toks[0].text).ok_or_else(|| {
            self.malformed(line, toks[0].column, Section::Bounds, format!("unsupported bound type `{}`", toks[0].text))
        })?;
        let rest = &toks[1..];
        let (set, col_tok, value_tok) = match (kind.needs_value(), rest.len()) {
            (true, 3) => (Some(rest[0]), rest[1], Some(rest[2])),
            (true, 2) => (None, rest[0], Some(rest[1])),
            (false, 1) => (None, rest[0], None),
            (false, 3) => (Some(rest[0]), rest[1], None),
            (false, 2) => {
                let looks_valued = self.col_index.contains_key(rest[0].text) && rest[1].text.parse::<f64>().is_ok();
                if looks_valued {
                    (None, rest[0], None)
                } else {
                    (Some(rest[0]), rest[1], None)
                }
            }
            _ => {
                return Err(self.malformed(line, toks[0].column, Section::Bounds, "wrong number of fields"));
            }
        };
        let column = self.column(col_tok, line)?;
        let value = value_tok.map(|t| self.number(t, line, Section::Bounds)).transpose()?;
        let set = set.map(|t| t.text).unwrap_or("").to_string();
        match &self.bound_set {
            None => self.bound_set = Some(set),
            Some(existing) if *existing != set => return Ok(()),
            _ => {}
        }
        if matches!(kind, BoundType::Bv | BoundType::Li | BoundType::Ui) {
            self.raw.columns[column].integer = true;
        }
        self.raw.bounds.push(Bound { kind, column, value });
        Ok(())
    }
}

pub fn parse_mps_str(text: &str) -> Result<RawInstance, MpsError> {
    let mut p = Parser {
        raw: RawInstance {
            name: String::new(),
            objective_sense: ObjSense::Minimize,
            rows: Vec::new(),
            objective_row: None,
            columns: Vec::new(),
            coefficients: BTreeMap::new(),
            rhs: BTreeMap::new(),
            ranges: BTreeMap::new(),
            bounds: Vec::new(),
        },
        row_index: HashMap::new(),
        col_index: HashMap::new(),
        in_integer_block: false,
        rhs_set: None,
        range_set: None,
        bound_set: None,
        objname: None,
    };
    let mut section = Section::None;
    let mut saw_content = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim_end();
        if trimmed.trim_start().is_empty() || trimmed.starts_with('*') {
            continue;
        }
        if !saw_content {
            saw_content = true;
            let first = trimmed.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
            if trimmed.starts_with('\\') || LP_KEYWORDS.contains(&first.as_str()) {
                return Err(MpsError::UnsupportedFormat("LP"));
            }
        }
        if section == Section::End {
            continue;
        }

        let is_header = !trimmed.starts_with(char::is_whitespace);
        if is_header {
            let toks = tokenize(trimmed);
            let head = toks[0].text.to_ascii_uppercase();
            section = match head.as_str() {
                "NAME" => {
                    p.raw.name = trimmed[toks[0].text.len()..].trim().to_string();
                    Section::Name
                }
                "OBJSENSE" | "OBJSENS" => {
                    if let Some(v) = toks.get(1) {
                        p.raw.objective_sense = parse_sense(v.text)
                            .ok_or_else(|| p.malformed(lineno, v.column, Section::ObjSense, "expected MIN or MAX"))?;
                    }
                    Section::ObjSense
                }
                "OBJNAME" => {
                    if let Some(v) = toks.get(1) {
                        p.objname = Some((lineno, v.text.to_string()));
                    }
                    Section::ObjName
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other if UNSUPPORTED.contains(&other) => {
                    return Err(MpsError::UnsupportedSection { line: lineno, name: other.to_string() })
                }
                other => return Err(MpsError::UnknownSection { line: lineno, name: other.to_string() }),
            };
            continue;
        }

        let toks = tokenize(trimmed);
        if let Err(err) = p.data_line(section, &toks, trimmed, lineno) {
            // Fixed-format files may carry names with embedded spaces.
            let fixed = fixed_fields(trimmed);
            let differs = fixed.len() != toks.len() || fixed.iter().zip(&toks).any(|(a, b)| a.text != b.text);
            if !differs || fixed.is_empty() || p.data_line(section, &fixed, trimmed, lineno).is_err() {
                return Err(err);
            }
        }
    }

    if !saw_content {
        return Err(MpsError::EmptyFile);
    }
    if let Some((line, name)) = p.objname.take() {
        let idx = p.row_index.get(&name).copied().ok_or(MpsError::UnknownRowReference { line, column: 1, name })?;
        if p.raw.rows[idx].sense != RowSense::Free {
            return Err(p.malformed(line, 1, Section::ObjName, "objective row must be of type N"));
        }
        p.raw.objective_row = Some(idx);
    }
    Ok(p.raw)
}

fn parse_sense(token: &str) -> Option<ObjSense> {
    match token.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" | "MINIMISE" => Some(ObjSense::Minimize),
        "MAX" | "MAXIMIZE" | "MAXIMISE" => Some(ObjSense::Maximize),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
NAME          small
ROWS
 N  obj
 L  c1
COLUMNS
    x         obj       1.0          c1        2.0
    y         obj       -1.0         c1        1.0
RHS
    rhs       c1        4.0
ENDATA
";

    #[test]
    fn parses_minimal_document() {
        let raw = parse_mps_str(SMALL).unwrap();
        assert_eq!(raw.name, "small");
        assert_eq!(raw.rows.len(), 2);
        assert_eq!(raw.columns.len(), 2);
        assert_eq!(raw.objective_row, Some(0));
        assert_eq!(raw.coefficients[&(1, 0)], 2.0);
        assert_eq!(raw.rhs_of(1), 4.0);
        assert_eq!(raw.objective_sense, ObjSense::Minimize);
    }

    #[test]
    fn integer_markers() {
        let text = "\
NAME m
ROWS
 N obj
 L c
COLUMNS
    MARKER                 'MARKER'                 'INTORG'
    x  obj 1 c 1
    MARKER                 'MARKER'                 'INTEND'
    y  obj 1 c 1
RHS
    rhs c 1
ENDATA
";
        let raw = parse_mps_str(text).unwrap();
        assert!(raw.columns[0].integer);
        assert!(!raw.columns[1].integer);
    }

    #[test]
    fn undeclared_row_in_rhs() {
        let text = SMALL.replace("rhs       c1", "rhs       c9");
        match parse_mps_str(&text) {
            Err(MpsError::UnknownRowReference { line, name, column }) => {
                assert_eq!(line, 9);
                assert_eq!(name, "c9");
                assert_eq!(column, 15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_row() {
        let text = SMALL.replace(" L  c1\n", " L  c1\n G  c1\n");
        assert!(matches!(parse_mps_str(&text), Err(MpsError::DuplicateRow { line: 5, .. })));
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(matches!(parse_mps_str(""), Err(MpsError::EmptyFile)));
        assert!(matches!(parse_mps_str("* nothing\n\n"), Err(MpsError::EmptyFile)));
    }

    #[test]
    fn rejects_lp_and_quadratic() {
        assert!(matches!(
            parse_mps_str("Minimize\n obj: x\nSubject To\n c: x >= 1\nEnd\n"),
            Err(MpsError::UnsupportedFormat("LP"))
        ));
        let text = SMALL.replace("ENDATA", "QUADOBJ\n    x x 1\nENDATA");
        assert!(matches!(parse_mps_str(&text), Err(MpsError::UnsupportedSection { ref name, .. }) if name == "QUADOBJ"));
        let text = SMALL.replace("ENDATA", "FOO\nENDATA");
        assert!(matches!(parse_mps_str(&text), Err(MpsError::UnknownSection { .. })));
    }

    #[test]
    fn malformed_number_reports_position() {
        let text = SMALL.replace("2.0", "two");
        match parse_mps_str(&text) {
            Err(MpsError::MalformedSection { line, column, section, .. }) => {
                assert_eq!((line, section), (6, "COLUMNS"));
                assert_eq!(column, 48);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn objsense_ranges_and_bounds() {
        let text = "\
NAME b
OBJSENSE
    MAX
ROWS
 N obj
 N other
 G r1
 E r2
COLUMNS
    x obj 1 r1 1
    x r2 1 other 5
    y obj 2 r1 1
RHS
    r1 1 r2 3
RANGES
    rng r1 4
BOUNDS
 UP bnd x 1
 BV bnd y
 FR bnd x
ENDATA
";
        let raw = parse_mps_str(text).unwrap();
        assert_eq!(raw.objective_sense, ObjSense::Maximize);
        assert_eq!(raw.objective_row, Some(0));
        assert_eq!(raw.ranges[&2], 4.0);
        assert_eq!(raw.rhs_of(3), 3.0);
        assert_eq!(raw.bounds.len(), 3);
        assert!(raw.columns[1].integer);
        assert_eq!(raw.bounds[1], Bound { kind: BoundType::Bv, column: 1, value: None });
    }

    /// Lays fields out at the fixed-format start columns 2, 5, 15, 25, 40, 50.
    fn fixed_line(fields: &[&str]) -> String {
        const START: [usize; 6] = [1, 4, 14, 24, 39, 49];
        let mut line = String::new();
        for (field, start) in fields.iter().zip(START) {
            while line.len() < start {
                line.push(' ');
            }
            line.push_str(field);
        }
        line
    }

    #[test]
    fn fixed_format_names_with_spaces() {
        let text = [
            "NAME          fixed".to_string(),
            "ROWS".into(),
            fixed_line(&["N", "cost"]),
            fixed_line(&["L", "lim 1"]),
            "COLUMNS".into(),
            fixed_line(&["", "x 1", "cost", "1.0", "lim 1", "1.0"]),
            "RHS".into(),
            fixed_line(&["", "RHS", "lim 1", "2.0"]),
            "ENDATA".into(),
        ]
        .join("\n");
        let raw = parse_mps_str(&text).unwrap();
        assert_eq!(raw.rows[1].name, "lim 1");
        assert_eq!(raw.columns.len(), 1);
        assert_eq!(raw.columns[0].name, "x 1");
        assert_eq!(raw.coefficients[&(1, 0)], 1.0);
        assert_eq!(raw.rhs_of(1), 2.0);
    }

    #[test]
    fn gzip_is_transparent() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(SMALL.as_bytes()).unwrap();
        let bytes = enc.finish().unwrap();
        assert_eq!(parse_mps(bytes.as_slice()).unwrap(), parse_mps_str(SMALL).unwrap());
    }
}
