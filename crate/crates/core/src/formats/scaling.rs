//! Scaling tables.
//!
//! ```text
//! segment_type,gender,length_fraction,mass_fraction,com_fraction,rgyr_x,rgyr_y,rgyr_z
//! Thigh,male,0.242504,0.1416,0.4095,0.329,0.329,0.149
//! ```
//!
//! Child tables use the header
//! `segment_type,a,b,com_fraction,rgyr_x,rgyr_y,rgyr_z`. An empty gender
//! applies to both genders.

use crate::anthro::{AlgorithmId, Coefficients, Gender, ScalingRow, ScalingTable, TableKind};
use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::{format_number, records, Ctx, Record, PERCENT};

pub const REGRESSION_HEADER: [&str; 8] = [
    "segment_type",
    "gender",
    "length_fraction",
    "mass_fraction",
    "com_fraction",
    "rgyr_x",
    "rgyr_y",
    "rgyr_z",
];

pub const CHILD_HEADER: [&str; 7] = ["segment_type", "a", "b", "com_fraction", "rgyr_x", "rgyr_y", "rgyr_z"];

fn header_kind(fields: &[&str]) -> Option<TableKind> {
    let same = |expected: &[&str]| {
        fields.len() == expected.len()
            && fields.iter().zip(expected).all(|(f, e)| f.eq_ignore_ascii_case(e))
    };
    if same(&REGRESSION_HEADER) {
        Some(TableKind::Regression)
    } else if same(&CHILD_HEADER) {
        Some(TableKind::Child)
    } else {
        None
    }
}

fn fraction(ctx: &Ctx<'_>, rec: &Record<'_>, index: usize, what: &str) -> Result<f64, Diagnostic> {
    let v = ctx.number(rec, index, what)?;
    if v < 0.0 {
        return Err(ctx.err(
            rec.line,
            Code::NegativeValue,
            format!("{what} must not be negative, found {}", format_number(v)),
        ));
    }
    Ok(v)
}

fn row(ctx: &Ctx<'_>, rec: &Record<'_>, kind: TableKind) -> Result<ScalingRow, Diagnostic> {
    let segment_type = ctx.name(rec, 0, "segment type")?;
    let (gender, coefficients, rest) = match kind {
        TableKind::Regression => {
            ctx.field_count(rec, 8, 8, "scaling row")?;
            let gender = match rec.fields[1] {
                "" => None,
                g => Some(Gender::parse(g).ok_or_else(|| {
                    ctx.err(
                        rec.line,
                        Code::InvalidValue,
                        format!("gender must be male or female, found {g:?}"),
                    )
                })?),
            };
            let coefficients = Coefficients::Regression {
                length_fraction: fraction(ctx, rec, 2, "length_fraction")?,
                mass_fraction: fraction(ctx, rec, 3, "mass_fraction")?,
            };
            (gender, coefficients, 4)
        }
        TableKind::Child => {
            ctx.field_count(rec, 7, 7, "scaling row")?;
            // `b` is a slope in age and may be negative.
            let coefficients = Coefficients::Child {
                a: fraction(ctx, rec, 1, "a")?,
                b: ctx.number(rec, 2, "b")?,
            };
            (None, coefficients, 3)
        }
    };
    Ok(ScalingRow {
        segment_type,
        gender,
        coefficients,
        com_fraction: fraction(ctx, rec, rest, "com_fraction")?,
        rgyr: [
            fraction(ctx, rec, rest + 1, "rgyr_x")?,
            fraction(ctx, rec, rest + 2, "rgyr_y")?,
            fraction(ctx, rec, rest + 3, "rgyr_z")?,
        ],
    })
}

pub fn parse_scaling_table(
    text: &str,
    file: &str,
    algorithm: AlgorithmId,
) -> Result<Parsed<ScalingTable>, Report> {
    let ctx = Ctx::new(file);
    let mut recs = records(text, PERCENT);
    let Some(header) = recs.next() else {
        return Err(Report::from(
            Diagnostic::error(Code::MalformedHeader, "scaling table has no header row").in_file(file),
        ));
    };
    let Some(kind) = header_kind(&header.fields) else {
        return Err(Report::from(ctx.err(
            header.line,
            Code::MalformedHeader,
            format!(
                "expected header {:?} or {:?}",
                REGRESSION_HEADER.join(","),
                CHILD_HEADER.join(",")
            ),
        )));
    };

    let mut report = Report::new();
    let mut rows: Vec<ScalingRow> = Vec::new();
    for rec in recs {
        match row(&ctx, &rec, kind) {
            Ok(r) => {
                if rows
                    .iter()
                    .any(|o| o.segment_type.eq_ignore_ascii_case(&r.segment_type) && o.gender == r.gender)
                {
                    report.push(ctx.err(
                        rec.line,
                        Code::DuplicateEntry,
                        format!("segment type {:?} listed twice", r.segment_type),
                    ));
                } else {
                    rows.push(r);
                }
            }
            Err(d) => report.push(d),
        }
    }
    if report.has_errors() {
        return Err(report);
    }
    Ok(Parsed::new(ScalingTable {
        algorithm,
        kind,
        rows,
    }))
}

pub fn serialize_scaling_table(table: &ScalingTable) -> String {
    let mut out = match table.kind {
        TableKind::Regression => REGRESSION_HEADER.join(","),
        TableKind::Child => CHILD_HEADER.join(","),
    };
    out.push('\n');
    for r in &table.rows {
        let mut fields = vec![r.segment_type.clone()];
        match r.coefficients {
            Coefficients::Regression {
                length_fraction,
                mass_fraction,
            } => {
                fields.push(r.gender.map_or("", |g| g.as_str()).to_owned());
                fields.push(format_number(length_fraction));
                fields.push(format_number(mass_fraction));
            }
            Coefficients::Child { a, b } => {
                fields.push(format_number(a));
                fields.push(format_number(b));
            }
        }
        fields.push(format_number(r.com_fraction));
        fields.extend(r.rgyr.iter().map(|v| format_number(*v)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
