//! Marker files. Each record spans two lines:
//!
//! ```text
//! Segment_Pelvis, Cluster, 0.043
//! Pelvis_1, Pelvis_2, Pelvis_3, , , , -1.0, -0.05, 0.90, 0, 20, 0
//! ```
//!
//! The first line names the segment, the marker type (`Marker`, `Cluster`
//! or `DoubleCluster`) and the marker spacing in metres (optional for
//! `Marker`). The second holds six name slots, a translational offset as
//! fractions of segment length and a rotational offset as intrinsic X-Y-Z
//! Euler angles in degrees.

use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::{format_number, format_vec3, records, trim_trailing_empty, Ctx, Record, PERCENT};
use crate::kinematics::{MarkerEntry, MarkerKind, MarkerSpec};

const NAME_SLOTS: usize = 6;

fn header(ctx: &Ctx<'_>, rec: &Record<'_>) -> Result<(String, MarkerKind, f64), Diagnostic> {
    ctx.field_count(rec, 2, 3, "marker header")?;
    let segment = ctx.name(rec, 0, "segment name")?;
    let kind = MarkerKind::parse(rec.fields[1]).ok_or_else(|| {
        ctx.err(
            rec.line,
            Code::UnknownMarkerType,
            format!(
                "unknown marker type {:?} (expected Marker, Cluster or DoubleCluster)",
                rec.fields[1]
            ),
        )
    })?;
    let distance = match (kind, rec.fields.len()) {
        (MarkerKind::Marker, 2) => 0.0,
        (MarkerKind::Marker, _) => {
            let d = ctx.number(rec, 2, "marker spacing")?;
            if d < 0.0 {
                return Err(ctx.err(rec.line, Code::NegativeLength, "marker spacing must not be negative"));
            }
            d
        }
        (_, 2) => {
            return Err(ctx.err(
                rec.line,
                Code::WrongFieldCount,
                format!("{kind} header needs the marker spacing"),
            ))
        }
        _ => ctx.positive_length(rec, 2, "marker spacing")?,
    };
    Ok((segment, kind, distance))
}

fn body(
    ctx: &Ctx<'_>,
    rec: &Record<'_>,
    segment: String,
    kind: MarkerKind,
    distance: f64,
    header_line: usize,
) -> Result<MarkerEntry, Diagnostic> {
    ctx.field_count(rec, NAME_SLOTS + 6, NAME_SLOTS + 6, "marker names and offsets")?;
    let names: Vec<String> = rec.fields[..NAME_SLOTS]
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| (*f).to_owned())
        .collect();
    if names.len() != kind.name_count() {
        return Err(ctx.err(
            rec.line,
            Code::NameCountMismatch,
            format!("{kind} needs {} marker names, found {}", kind.name_count(), names.len()),
        ));
    }
    Ok(MarkerEntry {
        segment,
        kind,
        distance,
        names,
        translation: ctx.vec3(rec, NAME_SLOTS, "translational offset")?,
        rotation: ctx.vec3(rec, NAME_SLOTS + 3, "rotational offset")?,
        line: header_line,
    })
}

pub fn parse_marker_file(text: &str, file: &str) -> Result<Parsed<MarkerSpec>, Report> {
    let ctx = Ctx::new(file);
    let mut spec = MarkerSpec::default();
    let mut report = Report::new();
    let mut recs = records(text, PERCENT);
    while let Some(mut head) = recs.next() {
        trim_trailing_empty(&mut head);
        let parsed_header = header(&ctx, &head);
        let Some(mut rest) = recs.next() else {
            report.push(ctx.err(
                head.line,
                Code::WrongFieldCount,
                "marker record is missing its name/offset line",
            ));
            break;
        };
        trim_trailing_empty(&mut rest);
        match parsed_header {
            Ok((segment, kind, distance)) => {
                match body(&ctx, &rest, segment, kind, distance, head.line) {
                    Ok(e) => spec.entries.push(e),
                    Err(d) => report.push(d),
                }
            }
            Err(d) => report.push(d),
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::new(spec))
    }
}

pub fn serialize_marker_file(spec: &MarkerSpec) -> String {
    let mut out = String::new();
    for e in &spec.entries {
        out.push_str(&format!(
            "{}, {}, {}\n",
            e.segment,
            e.kind,
            format_number(e.distance)
        ));
        let mut slots: Vec<&str> = e.names.iter().map(String::as_str).collect();
        slots.resize(NAME_SLOTS, "");
        out.push_str(&format!(
            "{}, {}, {}\n",
            slots.join(", "),
            format_vec3(&e.translation),
            format_vec3(&e.rotation)
        ));
    }
    out
}
