//! Model description files.
//!
//! ```text
//! % name, type, joint, parent, point set, constraint set
//! Segment_Pelvis, Pelvis, TXTZRY, ROOT
//! Segment_Foot, Foot, RY, Segment_Shank, Points_Foot_Sagittal, ConstraintSet_Foot_Sagittal
//! ```
//!
//! The last two fields are optional and may be left empty.

use crate::diag::{Parsed, Report};
use crate::formats::{records, trim_trailing_empty, Ctx, PERCENT};
use crate::kinematics::{DescriptionLine, ModelDescription};

pub fn parse_description(text: &str, file: &str) -> Result<Parsed<ModelDescription>, Report> {
    let ctx = Ctx::new(file);
    let mut report = Report::new();
    let mut lines = Vec::new();
    for mut rec in records(text, PERCENT) {
        trim_trailing_empty(&mut rec);
        let parsed = (|| {
            ctx.field_count(&rec, 4, 6, "description line")?;
            let optional = |i: usize| {
                rec.fields
                    .get(i)
                    .filter(|f| !f.is_empty())
                    .map(|f| (*f).to_owned())
            };
            Ok(DescriptionLine {
                name: ctx.name(&rec, 0, "segment name")?,
                segment_type: ctx.name(&rec, 1, "segment type")?,
                joint: ctx.name(&rec, 2, "joint")?,
                parent: ctx.name(&rec, 3, "parent name")?,
                point_set: optional(4),
                constraint_set: optional(5),
                line: rec.line,
            })
        })();
        match parsed {
            Ok(l) => lines.push(l),
            Err(d) => report.push(d),
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::new(ModelDescription { lines }))
    }
}

/// Serializes one line per segment; `line` numbers are not preserved.
pub fn serialize_description(description: &ModelDescription) -> String {
    let mut out = String::new();
    for l in &description.lines {
        let mut fields = vec![
            l.name.as_str(),
            l.segment_type.as_str(),
            l.joint.as_str(),
            l.parent.as_str(),
        ];
        match (&l.point_set, &l.constraint_set) {
            (None, None) => {}
            (p, None) => fields.push(p.as_deref().unwrap_or("")),
            (p, Some(c)) => {
                fields.push(p.as_deref().unwrap_or(""));
                fields.push(c);
            }
        }
        out.push_str(&fields.join(", "));
        out.push('\n');
    }
    out
}
