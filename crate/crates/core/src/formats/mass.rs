//! Object mass-properties files.
//!
//! ```text
//! Box, UseMeanDensity, 700
//! Exo_Thigh, UseUserValues, 1.2, 0, 0, -0.2, 0.01, 0, 0, 0, 0.01, 0, 0, 0, 0.002
//! ```
//!
//! The first field is a segment name or type. User values are the mass in
//! kg, the CoM in the segment frame and the nine inertia entries row by row,
//! about the CoM.

use std::collections::BTreeSet;

use nalgebra::Matrix3;

use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::{format_number, format_vec3, records, trim_trailing_empty, Ctx, Record, PERCENT};
use crate::kinematics::MassPolicies;
use crate::mesh::{check_symmetric, MassPolicy};

fn non_negative(ctx: &Ctx<'_>, rec: &Record<'_>, index: usize, what: &str) -> Result<f64, Diagnostic> {
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

fn policy(ctx: &Ctx<'_>, rec: &Record<'_>) -> Result<MassPolicy, Diagnostic> {
    match rec.fields[1] {
        "UseMeanDensity" => {
            ctx.field_count(rec, 3, 3, "UseMeanDensity entry")?;
            Ok(MassPolicy::MeanDensity(non_negative(ctx, rec, 2, "density")?))
        }
        "UseUserValues" => {
            ctx.field_count(rec, 15, 15, "UseUserValues entry")?;
            let mass = non_negative(ctx, rec, 2, "mass")?;
            let com = ctx.vec3(rec, 3, "centre of mass")?;
            let mut entries = [0.0; 9];
            for (i, e) in entries.iter_mut().enumerate() {
                *e = ctx.number(rec, 6 + i, "inertia")?;
            }
            let inertia = Matrix3::from_row_slice(&entries);
            check_symmetric(&inertia).map_err(|e| ctx.err(rec.line, e.code(), e.to_string()))?;
            Ok(MassPolicy::UserValues { mass, com, inertia })
        }
        other => Err(ctx.err(
            rec.line,
            Code::UnknownMassPolicy,
            format!("unknown mass policy {other:?} (expected UseMeanDensity or UseUserValues)"),
        )),
    }
}

pub fn parse_mass_properties(text: &str, file: &str) -> Result<Parsed<MassPolicies>, Report> {
    let ctx = Ctx::new(file);
    let mut policies = MassPolicies::default();
    let mut seen = BTreeSet::new();
    let mut report = Report::new();
    for mut rec in records(text, PERCENT) {
        trim_trailing_empty(&mut rec);
        let result = (|| {
            ctx.field_count(&rec, 2, usize::MAX, "mass-properties entry")?;
            let name = ctx.name(&rec, 0, "segment")?;
            let p = policy(&ctx, &rec)?;
            if !seen.insert(name.clone()) {
                return Err(ctx.err(
                    rec.line,
                    Code::DuplicateEntry,
                    format!("mass properties for {name:?} given more than once"),
                ));
            }
            policies.entries.push((name, p));
            Ok(())
        })();
        if let Err(d) = result {
            report.push(d);
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::new(policies))
    }
}

pub fn serialize_mass_properties(policies: &MassPolicies) -> String {
    let mut out = String::new();
    for (name, p) in &policies.entries {
        match p {
            MassPolicy::MeanDensity(d) => {
                out.push_str(&format!("{name}, UseMeanDensity, {}\n", format_number(*d)))
            }
            MassPolicy::UserValues { mass, com, inertia } => {
                let rows: Vec<String> = (0..3)
                    .flat_map(|r| (0..3).map(move |c| (r, c)))
                    .map(|(r, c)| format_number(inertia[(r, c)]))
                    .collect();
                out.push_str(&format!(
                    "{name}, UseUserValues, {}, {}, {}\n",
                    format_number(*mass),
                    format_vec3(com),
                    rows.join(", ")
                ));
            }
        }
    }
    out
}
