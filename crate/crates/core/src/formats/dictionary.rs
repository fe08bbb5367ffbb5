//! Dictionary extension files.
//!
//! ```text
//! [joints]
//! Joint_Hinge, RY
//! Joint_ScapuloThoracic, RXRYRZ, surface=ellipsoid
//! [points]
//! Points_Hand_R_3D, ProximalMetacarpal_Medial_R, -0.2, 0.15, -0.2
//! Points_Foot_Sagittal, Heel_Sagittal, @heel
//! [constraints]
//! ConstraintSet_Foot_Sagittal, FootFlat_Sagittal, Heel_Sagittal, 1, 0, 0
//! [loops]
//! LoopSet_Exo, Segment_Thigh_R, ThighCuff, Exo_Thigh, Cuff, 0, 0, 0, 1, 0, 1
//! ```
//!
//! Both `#` and `%` start comments. Entries of one set may span several
//! lines; they are grouped in file order.

use crate::diag::{Code, Parsed, Report};
use crate::dictionary::{
    parse_joint_code, BodyPoint, ConstraintSet, ConstraintSubset, ContactRow, Dictionary,
    FootLandmark, LoopConstraintSet, LoopRow, PointCoord, PointEntry, PointSet,
};
use crate::formats::{format_number, format_vec3, records, Ctx, Record};

const COMMENTS: &[char] = &['#', '%'];
const NORMAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Joints,
    Points,
    Constraints,
    Loops,
}

pub fn parse_dictionary(text: &str, file: &str) -> Result<Parsed<Dictionary>, Report> {
    let ctx = Ctx::new(file);
    let mut dict = Dictionary::default();
    let mut report = Report::new();
    let mut section = None;

    for rec in records(text, COMMENTS) {
        if rec.fields.len() == 1 && rec.fields[0].starts_with('[') {
            let header = rec.fields[0];
            section = match header.to_ascii_lowercase().as_str() {
                "[joints]" => Some(Section::Joints),
                "[points]" => Some(Section::Points),
                "[constraints]" => Some(Section::Constraints),
                "[loops]" => Some(Section::Loops),
                _ => {
                    report.push(ctx.err(
                        rec.line,
                        Code::UnknownSection,
                        format!("unknown section {header}"),
                    ));
                    None
                }
            };
            continue;
        }
        let result = match section {
            Some(Section::Joints) => joint_line(&ctx, &rec, &mut dict),
            Some(Section::Points) => point_line(&ctx, &rec, &mut dict),
            Some(Section::Constraints) => constraint_line(&ctx, &rec, &mut dict),
            Some(Section::Loops) => loop_line(&ctx, &rec, &mut dict),
            None => Err(ctx.err(
                rec.line,
                Code::UnknownSection,
                "entry outside of a [joints], [points], [constraints] or [loops] section",
            )),
        };
        if let Err(d) = result {
            report.push(d);
        }
    }

    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::with_warnings(dict, report.0))
    }
}

type LineResult = Result<(), crate::diag::Diagnostic>;

fn joint_line(ctx: &Ctx<'_>, rec: &Record<'_>, dict: &mut Dictionary) -> LineResult {
    ctx.field_count(rec, 2, usize::MAX, "joint entry")?;
    let name = ctx.name(rec, 0, "joint name")?;
    let mut joint =
        parse_joint_code(rec.fields[1]).map_err(|e| ctx.err(rec.line, e.code(), e.to_string()))?;
    if rec.fields.len() > 2 {
        joint.custom_payload = Some(rec.fields[2..].join(", "));
    }
    if dict.joints.insert(name.clone(), joint).is_some() {
        return Err(ctx.err(rec.line, Code::DuplicateEntry, format!("joint {name:?} defined twice")));
    }
    Ok(())
}

fn point_line(ctx: &Ctx<'_>, rec: &Record<'_>, dict: &mut Dictionary) -> LineResult {
    let set = ctx.name(rec, 0, "point set name")?;
    let point = ctx.name(rec, 1, "point name")?;
    let coord = match rec.fields.len() {
        3 => {
            let token = rec.fields[2];
            let landmark = FootLandmark::from_token(token).ok_or_else(|| {
                ctx.err(
                    rec.line,
                    Code::InvalidValue,
                    format!("unknown foot landmark {token:?}"),
                )
            })?;
            PointCoord::Foot(landmark)
        }
        5 => PointCoord::Scaled(ctx.vec3(rec, 2, "point coordinates")?),
        n => {
            return Err(ctx.err(
                rec.line,
                Code::WrongFieldCount,
                format!("point entry: expected 3 or 5 fields, found {n}"),
            ))
        }
    };
    let entry = dict.point_sets.entry(set.clone()).or_insert_with(|| PointSet {
        name: set.clone(),
        entries: Vec::new(),
    });
    if entry.get(&point).is_some() {
        return Err(ctx.err(
            rec.line,
            Code::DuplicateEntry,
            format!("point {point:?} defined twice in {set:?}"),
        ));
    }
    entry.entries.push(PointEntry { name: point, coord });
    Ok(())
}

fn constraint_line(ctx: &Ctx<'_>, rec: &Record<'_>, dict: &mut Dictionary) -> LineResult {
    ctx.field_count(rec, 6, 6, "constraint entry")?;
    let set = ctx.name(rec, 0, "constraint set name")?;
    let subset = ctx.name(rec, 1, "constraint subset name")?;
    let point = ctx.name(rec, 2, "point name")?;
    let normal = ctx.vec3(rec, 3, "constraint normal")?;
    if (normal.norm() - 1.0).abs() > NORMAL_TOLERANCE {
        return Err(ctx.err(
            rec.line,
            Code::InvalidValue,
            format!("constraint normal must have unit length, found {}", format_vec3(&normal)),
        ));
    }
    let entry = dict
        .constraint_sets
        .entry(set.clone())
        .or_insert_with(|| ConstraintSet {
            name: set,
            subsets: Vec::new(),
        });
    let row = ContactRow { point, normal };
    match entry.subsets.iter_mut().find(|s| s.name == subset) {
        Some(s) => s.rows.push(row),
        None => entry.subsets.push(ConstraintSubset {
            name: subset,
            rows: vec![row],
        }),
    }
    Ok(())
}

fn loop_line(ctx: &Ctx<'_>, rec: &Record<'_>, dict: &mut Dictionary) -> LineResult {
    ctx.field_count(rec, 11, 11, "loop entry")?;
    let set = ctx.name(rec, 0, "loop set name")?;
    let predecessor = BodyPoint {
        body: ctx.name(rec, 1, "predecessor body")?,
        point: ctx.name(rec, 2, "predecessor point")?,
    };
    let successor = BodyPoint {
        body: ctx.name(rec, 3, "successor body")?,
        point: ctx.name(rec, 4, "successor point")?,
    };
    if predecessor.body == successor.body {
        return Err(ctx.err(
            rec.line,
            Code::InvalidValue,
            format!("loop constraint must join two distinct bodies, both are {:?}", successor.body),
        ));
    }
    let mut axis = [0.0; 6];
    for (i, a) in axis.iter_mut().enumerate() {
        *a = ctx.number(rec, 5 + i, "loop axis")?;
    }
    dict.loop_sets
        .entry(set.clone())
        .or_insert_with(|| LoopConstraintSet {
            name: set,
            rows: Vec::new(),
        })
        .rows
        .push(LoopRow {
            predecessor,
            successor,
            axis,
        });
    Ok(())
}

pub fn serialize_dictionary(dict: &Dictionary) -> String {
    let mut out = String::from("[joints]\n");
    for (name, j) in &dict.joints {
        out.push_str(&format!("{name}, {}", j.code));
        if let Some(p) = &j.custom_payload {
            out.push_str(&format!(", {p}"));
        }
        out.push('\n');
    }
    out.push_str("\n[points]\n");
    for set in dict.point_sets.values() {
        for e in &set.entries {
            match &e.coord {
                PointCoord::Scaled(v) => {
                    out.push_str(&format!("{}, {}, {}\n", set.name, e.name, format_vec3(v)))
                }
                PointCoord::Foot(l) => {
                    out.push_str(&format!("{}, {}, {}\n", set.name, e.name, l.token()))
                }
            }
        }
    }
    out.push_str("\n[constraints]\n");
    for set in dict.constraint_sets.values() {
        for subset in &set.subsets {
            for row in &subset.rows {
                out.push_str(&format!(
                    "{}, {}, {}, {}\n",
                    set.name,
                    subset.name,
                    row.point,
                    format_vec3(&row.normal)
                ));
            }
        }
    }
    out.push_str("\n[loops]\n");
    for set in dict.loop_sets.values() {
        for row in &set.rows {
            let axis: Vec<String> = row.axis.iter().map(|v| format_number(*v)).collect();
            out.push_str(&format!(
                "{}, {}, {}, {}, {}, {}\n",
                set.name,
                row.predecessor.body,
                row.predecessor.point,
                row.successor.body,
                row.successor.point,
                axis.join(", ")
            ));
        }
    }
    out
}
