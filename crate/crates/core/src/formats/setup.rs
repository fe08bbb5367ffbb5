//! Object setup files: one `SegmentType, property, values...` per line.
//!
//! ```text
//! Exo_Thigh, scale_to, Segment_Thigh_R
//! Exo_Thigh, mesh, cylinder, 0.04, L
//! Exo_Thigh, mesh_center, 0, 0, -0.5L
//! Box, mesh, cuboid, 0.4, 0.3, 0.2
//! Box, mass, 5
//! ```
//!
//! | property         | values                                                      |
//! |------------------|-------------------------------------------------------------|
//! | `length`         | metres                                                      |
//! | `scale_to`       | human segment whose length is copied                        |
//! | `direction`      | `up` or `down` (default `down`)                             |
//! | `joint_offset`   | joint position in the parent frame, metres                  |
//! | `joint_rotation` | intrinsic X-Y-Z Euler angles, degrees                       |
//! | `mesh`           | `cuboid x y z`, `cylinder r h`, `sphere r`, `file path sx sy sz` |
//! | `mesh_center`    | visual centre in the segment frame                          |
//! | `mass`, `com`, `inertia` | values used when no mass-properties entry applies   |
//!
//! Primitive dimensions and `mesh_center` coordinates are metres, or a
//! multiple of the segment length written `L`, `0.5L`, `-2L`. The nine
//! inertia entries are row by row, about the CoM.

use std::collections::BTreeSet;

use nalgebra::Matrix3;

use crate::anthro::Direction;
use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::{format_number, format_vec3, parse_number, records, Ctx, Record, PERCENT};
use crate::kinematics::{Dimension, MeshSpec, ObjectSetup, SegmentSetup};
use crate::mesh::{check_symmetric, PrimitiveKind};

pub const PROPERTIES: [&str; 10] = [
    "length",
    "scale_to",
    "direction",
    "joint_offset",
    "joint_rotation",
    "mesh",
    "mesh_center",
    "mass",
    "com",
    "inertia",
];

fn dimension(ctx: &Ctx<'_>, rec: &Record<'_>, index: usize, what: &str) -> Result<Dimension, Diagnostic> {
    let field = rec.fields.get(index).copied().unwrap_or("");
    let parsed = match field.strip_suffix(['L', 'l']) {
        Some("") => Some(Dimension::Length(1.0)),
        Some("-") => Some(Dimension::Length(-1.0)),
        Some(k) => parse_number(k).map(Dimension::Length),
        None => parse_number(field).map(Dimension::Metres),
    };
    parsed.ok_or_else(|| {
        ctx.err(
            rec.line,
            Code::NonNumericValue,
            format!("{what}: expected metres or a multiple of L, found {field:?}"),
        )
    })
}

fn format_dimension(d: &Dimension) -> String {
    match *d {
        Dimension::Metres(v) => format_number(v),
        Dimension::Length(k) if k == 1.0 => "L".into(),
        Dimension::Length(k) => format!("{}L", format_number(k)),
    }
}

fn mesh_spec(ctx: &Ctx<'_>, rec: &Record<'_>) -> Result<MeshSpec, Diagnostic> {
    let kind_field = rec.fields.get(2).copied().unwrap_or("");
    if kind_field.eq_ignore_ascii_case("file") {
        ctx.field_count(rec, 7, 7, "mesh file")?;
        let path = ctx.name(rec, 3, "mesh path")?;
        let scale = ctx.vec3(rec, 4, "mesh scale")?;
        return Ok(MeshSpec::File { path, scale });
    }
    let kind = PrimitiveKind::parse(kind_field).ok_or_else(|| {
        ctx.err(
            rec.line,
            Code::InvalidValue,
            format!("unknown mesh kind {kind_field:?} (expected cuboid, cylinder, sphere or file)"),
        )
    })?;
    let n = kind.dimension_count();
    ctx.field_count(rec, 3 + n, 3 + n, kind.as_str())?;
    let dims = (0..n)
        .map(|i| dimension(ctx, rec, 3 + i, "mesh dimension"))
        .collect::<Result<Vec<_>, _>>()?;
    for d in &dims {
        let (Dimension::Metres(v) | Dimension::Length(v)) = *d;
        if v <= 0.0 {
            return Err(ctx.err(
                rec.line,
                Code::NonPositiveDimension,
                format!("mesh dimensions must be strictly positive, found {}", format_dimension(d)),
            ));
        }
    }
    Ok(MeshSpec::Primitive { kind, dims })
}

fn apply(ctx: &Ctx<'_>, rec: &Record<'_>, seg: &mut SegmentSetup) -> Result<(), Diagnostic> {
    let property = rec.fields[1];
    let count = |n: usize| ctx.field_count(rec, 2 + n, 2 + n, property);
    match property {
        "length" => {
            count(1)?;
            seg.length = Some(ctx.positive_length(rec, 2, "length")?);
        }
        "scale_to" => {
            count(1)?;
            seg.scale_to = Some(ctx.name(rec, 2, "scale_to segment")?);
        }
        "direction" => {
            count(1)?;
            seg.direction = Some(match rec.fields[2].to_ascii_lowercase().as_str() {
                "up" => Direction::Up,
                "down" => Direction::Down,
                other => {
                    return Err(ctx.err(
                        rec.line,
                        Code::InvalidValue,
                        format!("direction must be up or down, found {other:?}"),
                    ))
                }
            });
        }
        "joint_offset" => {
            count(3)?;
            seg.joint_offset = Some(ctx.vec3(rec, 2, "joint offset")?);
        }
        "joint_rotation" => {
            count(3)?;
            seg.joint_rotation = Some(ctx.vec3(rec, 2, "joint rotation")?);
        }
        "mesh" => seg.mesh = Some(mesh_spec(ctx, rec)?),
        "mesh_center" => {
            count(3)?;
            seg.mesh_center = Some([
                dimension(ctx, rec, 2, "mesh centre")?,
                dimension(ctx, rec, 3, "mesh centre")?,
                dimension(ctx, rec, 4, "mesh centre")?,
            ]);
        }
        "mass" => {
            count(1)?;
            let m = ctx.number(rec, 2, "mass")?;
            if m < 0.0 {
                return Err(ctx.err(rec.line, Code::NegativeValue, "mass must not be negative"));
            }
            seg.mass = Some(m);
        }
        "com" => {
            count(3)?;
            seg.com = Some(ctx.vec3(rec, 2, "centre of mass")?);
        }
        "inertia" => {
            count(9)?;
            let mut e = [0.0; 9];
            for (i, v) in e.iter_mut().enumerate() {
                *v = ctx.number(rec, 2 + i, "inertia")?;
            }
            let inertia = Matrix3::from_row_slice(&e);
            check_symmetric(&inertia).map_err(|err| ctx.err(rec.line, err.code(), err.to_string()))?;
            seg.inertia = Some(inertia);
        }
        other => {
            return Err(ctx.err(
                rec.line,
                Code::UnknownKeyword,
                format!("unknown setup property {other:?}"),
            ))
        }
    }
    Ok(())
}

pub fn parse_object_setup(text: &str, file: &str) -> Result<Parsed<ObjectSetup>, Report> {
    let ctx = Ctx::new(file);
    let mut setup = ObjectSetup::default();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut report = Report::new();
    for rec in records(text, PERCENT) {
        let result = (|| {
            ctx.field_count(&rec, 3, usize::MAX, "setup entry")?;
            let ty = ctx.name(&rec, 0, "segment type")?;
            let property = rec.fields[1];
            if !seen.insert((ty.clone(), property.to_owned())) && PROPERTIES.contains(&property) {
                return Err(ctx.err(
                    rec.line,
                    Code::DuplicateKeyword,
                    format!("{ty}: {property} given more than once"),
                ));
            }
            let index = match setup.segments.iter().position(|s| s.segment_type == ty) {
                Some(i) => i,
                None => {
                    setup.segments.push(SegmentSetup {
                        segment_type: ty.clone(),
                        line: rec.line,
                        ..Default::default()
                    });
                    setup.segments.len() - 1
                }
            };
            let seg = &mut setup.segments[index];
            apply(&ctx, &rec, seg)?;
            if seg.length.is_some() && seg.scale_to.is_some() {
                return Err(ctx.err(
                    rec.line,
                    Code::InvalidValue,
                    format!("{ty}: length and scale_to cannot both be given"),
                ));
            }
            Ok(())
        })();
        if let Err(d) = result {
            report.push(d);
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::new(setup))
    }
}

pub fn serialize_object_setup(setup: &ObjectSetup) -> String {
    let mut out = String::new();
    for s in &setup.segments {
        let t = &s.segment_type;
        let mut line = |property: &str, values: String| {
            out.push_str(&format!("{t}, {property}, {values}\n"));
        };
        if let Some(l) = s.length {
            line("length", format_number(l));
        }
        if let Some(target) = &s.scale_to {
            line("scale_to", target.clone());
        }
        if let Some(d) = s.direction {
            line("direction", if d == Direction::Up { "up" } else { "down" }.into());
        }
        if let Some(v) = &s.joint_offset {
            line("joint_offset", format_vec3(v));
        }
        if let Some(v) = &s.joint_rotation {
            line("joint_rotation", format_vec3(v));
        }
        match &s.mesh {
            None => {}
            Some(MeshSpec::Primitive { kind, dims }) => {
                let dims: Vec<String> = dims.iter().map(format_dimension).collect();
                line("mesh", format!("{}, {}", kind.as_str(), dims.join(", ")));
            }
            Some(MeshSpec::File { path, scale }) => {
                line("mesh", format!("file, {path}, {}", format_vec3(scale)))
            }
        }
        if let Some(v) = &s.mesh_center {
            let v: Vec<String> = v.iter().map(format_dimension).collect();
            line("mesh_center", v.join(", "));
        }
        if let Some(m) = s.mass {
            line("mass", format_number(m));
        }
        if let Some(v) = &s.com {
            line("com", format_vec3(v));
        }
        if let Some(i) = &s.inertia {
            let e: Vec<String> = (0..3)
                .flat_map(|r| (0..3).map(move |c| (r, c)))
                .map(|rc| format_number(i[rc]))
                .collect();
            line("inertia", e.join(", "));
        }
    }
    out
}
