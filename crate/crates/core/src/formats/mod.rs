//! Text formats read and written by the pipeline.
//!
//! Every format is line oriented: fields are comma separated, surrounding
//! whitespace is insignificant, `%` starts a comment, and LF or CRLF line
//! endings are accepted. Serializers emit LF. Parsers collect as many
//! diagnostics as they can before giving up; they never panic.

pub mod anthropometry;
pub mod description;
pub mod dictionary;
pub mod environment;
pub mod lengths;
pub mod markers;
pub mod mass;
pub mod scaling;
pub mod setup;

use nalgebra::Vector3;

use crate::diag::{Code, Diagnostic};

/// One non-empty logical line with its 1-based physical line number.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Record<'a> {
    pub line: usize,
    pub fields: Vec<&'a str>,
}

/// Splits `text` into records, dropping comments and blank lines.
pub(crate) fn records<'a>(text: &'a str, comment_chars: &'a [char]) -> impl Iterator<Item = Record<'a>> + 'a {
    text.split('\n').enumerate().filter_map(move |(i, raw)| {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match raw.find(comment_chars) {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            return None;
        }
        Some(Record {
            line: i + 1,
            fields: content.split(',').map(str::trim).collect(),
        })
    })
}

pub(crate) const PERCENT: &[char] = &['%'];

/// Strict decimal: optional sign, digits with optional fraction, optional
/// exponent. Rejects `inf`, `nan`, hex and empty strings.
pub fn parse_number(text: &str) -> Option<f64> {
    let b = text.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Shortest decimal text that parses back to the identical `f64`.
pub fn format_number(value: f64) -> String {
    format!("{value:?}")
}

pub(crate) fn format_vec3(v: &Vector3<f64>) -> String {
    format!(
        "{}, {}, {}",
        format_number(v.x),
        format_number(v.y),
        format_number(v.z)
    )
}

/// Per-file helper that builds located diagnostics.
#[derive(Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub file: &'a str,
}

impl<'a> Ctx<'a> {
    pub fn new(file: &'a str) -> Self {
        Self { file }
    }

    pub fn err(&self, line: usize, code: Code, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(code, message).at(self.file, line)
    }

    pub fn warn(&self, line: usize, code: Code, message: impl Into<String>) -> Diagnostic {
        Diagnostic::warning(code, message).at(self.file, line)
    }

    pub fn number(&self, rec: &Record<'_>, index: usize, what: &str) -> Result<f64, Diagnostic> {
        let field = rec.fields.get(index).copied().unwrap_or("");
        parse_number(field).ok_or_else(|| {
            self.err(
                rec.line,
                Code::NonNumericValue,
                format!("{what}: expected a decimal number, found {field:?}"),
            )
        })
    }

    pub fn vec3(&self, rec: &Record<'_>, start: usize, what: &str) -> Result<Vector3<f64>, Diagnostic> {
        Ok(Vector3::new(
            self.number(rec, start, what)?,
            self.number(rec, start + 1, what)?,
            self.number(rec, start + 2, what)?,
        ))
    }

    pub fn positive_length(&self, rec: &Record<'_>, index: usize, what: &str) -> Result<f64, Diagnostic> {
        let v = self.number(rec, index, what)?;
        if v <= 0.0 {
            return Err(self.err(
                rec.line,
                Code::NegativeLength,
                format!("{what} must be strictly positive, found {}", format_number(v)),
            ));
        }
        Ok(v)
    }

    pub fn name(&self, rec: &Record<'_>, index: usize, what: &str) -> Result<String, Diagnostic> {
        match rec.fields.get(index) {
            Some(f) if !f.is_empty() => Ok((*f).to_owned()),
            _ => Err(self.err(rec.line, Code::EmptyName, format!("{what} is empty"))),
        }
    }

    pub fn field_count(
        &self,
        rec: &Record<'_>,
        min: usize,
        max: usize,
        what: &str,
    ) -> Result<(), Diagnostic> {
        let n = rec.fields.len();
        if n < min || n > max {
            let expected = if min == max {
                format!("{min}")
            } else {
                format!("{min} to {max}")
            };
            return Err(self.err(
                rec.line,
                Code::WrongFieldCount,
                format!("{what}: expected {expected} fields, found {n}"),
            ));
        }
        Ok(())
    }
}

/// Drops trailing empty fields (`a, b, , ,` → `a, b`).
pub(crate) fn trim_trailing_empty(rec: &mut Record<'_>) {
    while rec.fields.len() > 1 && rec.fields.last().is_some_and(|f| f.is_empty()) {
        rec.fields.pop();
    }
}
