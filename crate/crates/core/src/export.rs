//! Lua model files, their JSON mirror and a preview scene.
//!
//! The Lua file returns one table:
//!
//! ```lua
//! return {
//!   gravity = { 0.0, 0.0, -9.81 },
//!   frames = {
//!     {
//!       name = "Segment_Pelvis",
//!       parent = "ROOT",
//!       joint = { { 0, 0, 0, 1, 0, 0 }, { 0, 0, 0, 0, 0, 1 }, { 0, 1, 0, 0, 0, 0 } },
//!       joint_frame = { r = { 0.0, 0.0, 0.0 }, E = { ... } },
//!       body = { mass = 11.2, com = { ... }, inertia = { ... } },
//!       markers = { LASI = { ... } },
//!       visuals = { { src = "unit_cuboid.obj", dimensions = { ... }, mesh_center = { ... } } },
//!     },
//!   },
//!   points = { { name = "Heel_Sagittal", body = "Segment_Foot", point = { ... } } },
//!   constraint_sets = {
//!     FootFlat_Sagittal = { { constraint_type = "contact", body = "Segment_Foot", name = "Heel_Sagittal", point = { ... }, normal = { ... } } },
//!   },
//! }
//! ```
//!
//! `joint_frame.E` is the rotation from parent to child coordinates (the
//! transpose of the child orientation), row by row. Inertia is about the
//! CoM in segment axes. Keys are written in sorted order and numbers in
//! their shortest round-trip form, so output is byte-stable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::format_number;
use crate::kinematics::{reference_pose_frames, validate_model, KinematicModel, ModelSegment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportDocument {
    pub gravity: [f64; 3],
    pub frames: Vec<FrameDoc>,
    pub points: Vec<PointDoc>,
    pub constraint_sets: BTreeMap<String, Vec<ConstraintRowDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub name: String,
    pub parent: String,
    pub joint: Vec<[u8; 6]>,
    pub joint_frame: JointFrameDoc,
    pub body: BodyDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markers: Option<BTreeMap<String, [f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visuals: Option<Vec<VisualDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_joint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointFrameDoc {
    pub r: [f64; 3],
    #[serde(rename = "E")]
    pub e: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDoc {
    pub mass: f64,
    pub com: [f64; 3],
    pub inertia: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualDoc {
    pub src: String,
    pub dimensions: [f64; 3],
    pub mesh_center: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub name: String,
    pub body: String,
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint_type", rename_all = "lowercase")]
pub enum ConstraintRowDoc {
    Contact {
        body: String,
        name: String,
        point: [f64; 3],
        normal: [f64; 3],
    },
    Loop {
        predecessor_body: String,
        predecessor_point: [f64; 3],
        successor_body: String,
        successor_point: [f64; 3],
        axis: [f64; 6],
    },
}

fn arr(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|r| [m[(r, 0)], m[(r, 1)], m[(r, 2)]])
}

fn frame_doc(seg: &ModelSegment, name: &str, parent: &str) -> FrameDoc {
    let markers: BTreeMap<String, [f64; 3]> = seg
        .markers
        .iter()
        .map(|m| (m.name.clone(), arr(&m.position)))
        .collect();
    FrameDoc {
        name: name.to_owned(),
        parent: parent.to_owned(),
        joint: seg.joint.rows.clone(),
        joint_frame: JointFrameDoc {
            r: arr(&seg.joint_frame.translation),
            e: rows(&seg.joint_frame.rotation.transpose()),
        },
        body: BodyDoc {
            mass: seg.mass,
            com: arr(&seg.com),
            inertia: rows(&seg.inertia),
        },
        markers: (!markers.is_empty()).then_some(markers),
        visuals: seg.visual.as_ref().map(|v| {
            vec![VisualDoc {
                src: v.mesh.src().to_owned(),
                dimensions: arr(&v.dimensions),
                mesh_center: arr(&v.center),
            }]
        }),
        custom_joint: seg.joint.custom_payload.clone(),
    }
}

/// Validation errors block export; validation warnings are the caller's
/// business and are not repeated here.
fn check(model: &KinematicModel) -> Result<(), Report> {
    let report = validate_model(model);
    if report.has_errors() {
        let mut out = Report::from(Diagnostic::error(
            Code::ValidationFailed,
            format!("model {:?} failed validation; nothing exported", model.name),
        ));
        out.extend(report);
        return Err(out);
    }
    Ok(())
}

/// Export names of one model's segments after collision renaming.
struct Placed<'m> {
    model: &'m KinematicModel,
    names: Vec<String>,
}

impl Placed<'_> {
    fn exported(&self, original: &str) -> Option<&str> {
        self.model
            .segments
            .iter()
            .position(|s| s.name == original)
            .map(|i| self.names[i].as_str())
    }
}

fn add_set(
    doc: &mut ExportDocument,
    warnings: &mut Vec<Diagnostic>,
    key: String,
    owner: &str,
    rows: Vec<ConstraintRowDoc>,
) {
    let key = if doc.constraint_sets.contains_key(&key) {
        let renamed = format!("{key}_{owner}");
        warnings.push(
            Diagnostic::warning(
                Code::DuplicateEntry,
                format!("constraint set {key:?} is used by several segments; exported as {renamed:?}"),
            )
            .located(owner.to_owned()),
        );
        renamed
    } else {
        key
    };
    doc.constraint_sets.insert(key, rows);
}

fn assemble(placed: &[Placed<'_>], warnings: &mut Vec<Diagnostic>) -> ExportDocument {
    let gravity = placed
        .first()
        .map_or(crate::kinematics::DEFAULT_GRAVITY, |p| arr(&p.model.gravity));
    let mut doc = ExportDocument {
        gravity,
        frames: Vec::new(),
        points: Vec::new(),
        constraint_sets: BTreeMap::new(),
    };

    for p in placed {
        for (seg, name) in p.model.segments.iter().zip(&p.names) {
            let parent = match seg.parent_id {
                0 => seg.parent_name.as_str(),
                id => p.names[id - 1].as_str(),
            };
            doc.frames.push(frame_doc(seg, name, parent));
            for pt in &seg.points {
                doc.points.push(PointDoc {
                    name: pt.name.clone(),
                    body: name.clone(),
                    point: arr(&pt.position),
                });
            }
            let mut subsets: Vec<(String, Vec<ConstraintRowDoc>)> = Vec::new();
            for c in &seg.constraints {
                let row = ConstraintRowDoc::Contact {
                    body: name.clone(),
                    name: c.point.clone(),
                    point: arr(&c.position),
                    normal: arr(&c.normal),
                };
                match subsets.iter_mut().find(|(s, _)| *s == c.subset) {
                    Some((_, rows)) => rows.push(row),
                    None => subsets.push((c.subset.clone(), vec![row])),
                }
            }
            for (key, rows) in subsets {
                add_set(&mut doc, warnings, key, name, rows);
            }
        }
    }

    // Loop rows resolve against their own model first, then the others.
    let resolve = |own: usize, body: &str, point: &str| -> Option<(String, [f64; 3])> {
        std::iter::once(&placed[own])
            .chain(placed.iter().enumerate().filter(|(i, _)| *i != own).map(|(_, p)| p))
            .find_map(|p| {
                let seg = p.model.segment(body)?;
                let pt = seg.point(point)?;
                Some((p.exported(body)?.to_owned(), arr(&pt.position)))
            })
    };
    let mut loops: BTreeMap<String, Vec<ConstraintRowDoc>> = BTreeMap::new();
    for (i, p) in placed.iter().enumerate() {
        for lc in &p.model.loop_constraints {
            let r = &lc.row;
            match (
                resolve(i, &r.predecessor.body, &r.predecessor.point),
                resolve(i, &r.successor.body, &r.successor.point),
            ) {
                (Some((pb, pp)), Some((sb, sp))) => {
                    loops.entry(lc.set.clone()).or_default().push(ConstraintRowDoc::Loop {
                        predecessor_body: pb,
                        predecessor_point: pp,
                        successor_body: sb,
                        successor_point: sp,
                        axis: r.axis,
                    })
                }
                _ => warnings.push(
                    Diagnostic::warning(
                        Code::UnresolvedLoop,
                        format!(
                            "loop row {}.{} -> {}.{} of set {:?} is not exported: a body or point is missing",
                            r.predecessor.body, r.predecessor.point, r.successor.body, r.successor.point, lc.set
                        ),
                    )
                    .located(lc.set.clone()),
                ),
            }
        }
    }
    for (key, rows) in loops {
        add_set(&mut doc, warnings, key, "loop", rows);
    }
    doc
}

/// Document for a single validated model.
pub fn model_document(model: &KinematicModel) -> Result<Parsed<ExportDocument>, Report> {
    combined_document(Some(model), &[])
}

/// Human frames first, then objects in order; colliding object segment
/// names get an `Object<k>_` prefix.
pub fn combined_document(
    human: Option<&KinematicModel>,
    objects: &[&KinematicModel],
) -> Result<Parsed<ExportDocument>, Report> {
    let mut warnings = Vec::new();
    let mut errors = Report::new();
    for m in human.into_iter().chain(objects.iter().copied()) {
        if let Err(r) = check(m) {
            errors.extend(r);
        }
    }
    if errors.has_errors() {
        return Err(errors);
    }

    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut placed = Vec::new();
    if let Some(h) = human {
        taken.extend(h.segments.iter().map(|s| s.name.clone()));
        placed.push(Placed {
            model: h,
            names: h.segments.iter().map(|s| s.name.clone()).collect(),
        });
    }
    for (k, o) in objects.iter().enumerate() {
        let names: Vec<String> = o
            .segments
            .iter()
            .map(|s| {
                if taken.contains(&s.name) {
                    let mut renamed = format!("Object{}_{}", k + 1, s.name);
                    while taken.contains(&renamed) {
                        renamed = format!("Object{}_{renamed}", k + 1);
                    }
                    warnings.push(
                        Diagnostic::warning(
                            Code::RenamedFrame,
                            format!("object {} segment {:?} exported as {renamed:?}", k + 1, s.name),
                        )
                        .located(s.name.clone()),
                    );
                    renamed
                } else {
                    s.name.clone()
                }
            })
            .collect();
        taken.extend(names.iter().cloned());
        placed.push(Placed { model: o, names });
    }
    let doc = assemble(&placed, &mut warnings);
    Ok(Parsed::with_warnings(doc, warnings))
}

fn is_identifier(key: &str) -> bool {
    const RESERVED: [&str; 22] = [
        "and", "break", "do", "else", "elseif", "end", "false", "for", "function", "goto", "if",
        "in", "local", "nil", "not", "or", "repeat", "return", "then", "true", "until", "while",
    ];
    let mut chars = key.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&key)
}

fn lua_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\{:03}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn lua_number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        return i.to_string();
    }
    format_number(n.as_f64().unwrap_or(0.0))
}

/// Values that fit on one line: scalars and arrays of inline values.
fn is_inline(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !matches!(i, Value::Object(_)) && is_inline(i)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn lua_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Null => out.push_str("nil"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&lua_number(n)),
        Value::String(s) => out.push_str(&lua_string(s)),
        Value::Array(items) if items.is_empty() => out.push_str("{}"),
        Value::Array(items) if is_inline(v) => {
            out.push_str("{ ");
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                lua_value(item, indent, out);
            }
            out.push_str(" }");
        }
        Value::Array(items) => {
            out.push_str("{\n");
            for item in items {
                out.push_str(&pad);
                lua_value(item, indent + 1, out);
                out.push_str(",\n");
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (key, item) in map {
                out.push_str(&pad);
                if is_identifier(key) {
                    out.push_str(key);
                } else {
                    let _ = write!(out, "[{}]", lua_string(key));
                }
                out.push_str(" = ");
                lua_value(item, indent + 1, out);
                out.push_str(",\n");
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Renders a document as a Lua chunk returning the model table.
pub fn render_lua(doc: &ExportDocument, title: &str) -> String {
    let value = serde_json::to_value(doc).expect("export document is plain data");
    let mut out = format!("-- {title}\nreturn ");
    lua_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn header(models: &[&KinematicModel]) -> String {
    let mut lines = Vec::new();
    for m in models {
        lines.push(format!("model {} ({})", m.name, m.kind));
        for (role, digest) in &m.provenance.inputs {
            lines.push(format!("input {}:{role} sha256 {digest}", m.name));
        }
    }
    lines.join("\n-- ")
}

pub fn write_lua_model(model: &KinematicModel) -> Result<Parsed<String>, Report> {
    write_combined(Some(model), &[])
}

pub fn write_combined(
    human: Option<&KinematicModel>,
    objects: &[&KinematicModel],
) -> Result<Parsed<String>, Report> {
    let parsed = combined_document(human, objects)?;
    let models: Vec<&KinematicModel> = human.into_iter().chain(objects.iter().copied()).collect();
    Ok(Parsed::with_warnings(
        render_lua(&parsed.value, &header(&models)),
        parsed.warnings,
    ))
}

pub fn render_json(doc: &ExportDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("export document is plain data");
    text.push('\n');
    text
}

pub fn write_json(model: &KinematicModel) -> Result<Parsed<String>, Report> {
    write_combined_json(Some(model), &[])
}

pub fn write_combined_json(
    human: Option<&KinematicModel>,
    objects: &[&KinematicModel],
) -> Result<Parsed<String>, Report> {
    let parsed = combined_document(human, objects)?;
    Ok(Parsed::with_warnings(render_json(&parsed.value), parsed.warnings))
}

/// One Wavefront mesh with every visual posed at the reference pose. Marker
/// and point positions (world frame) are listed as comments.
pub fn write_preview_scene(model: &KinematicModel) -> Result<String, Report> {
    check(model)?;
    let pose = reference_pose_frames(model);
    let mut out = format!("# preview scene of {} ({})\n", model.name, model.kind);
    let mut base = 1;
    for seg in &model.segments {
        let frame = pose.by_id(seg.id).expect("pose covers every segment");
        for p in &seg.points {
            let w = frame.apply(&p.position);
            let _ = writeln!(out, "# point {} {} {}", seg.name, p.name, fmt3(&w));
        }
        for m in &seg.markers {
            let w = frame.apply(&m.position);
            let _ = writeln!(out, "# marker {} {} {}", seg.name, m.name, fmt3(&w));
        }
        let Some(visual) = &seg.visual else { continue };
        let mesh = visual.local_mesh();
        let _ = writeln!(out, "o {}", seg.name);
        for v in &mesh.vertices {
            let _ = writeln!(out, "v {}", fmt3(&frame.apply(v)));
        }
        for t in &mesh.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + base, t[1] + base, t[2] + base);
        }
        base += mesh.vertices.len();
    }
    Ok(out)
}

fn fmt3(v: &Vector3<f64>) -> String {
    format!("{} {} {}", format_number(v.x), format_number(v.y), format_number(v.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anthro::Direction;
    use crate::dictionary::parse_joint_code;
    use crate::kinematics::{JointFrame, MeshRef, ModelKind, Visual, ROOT};
    use crate::mesh::PrimitiveKind;
    use crate::pipeline::{build_environment, Built};

    fn segment(id: usize, name: &str, parent: usize, parent_name: &str) -> ModelSegment {
        ModelSegment {
            id,
            name: name.into(),
            segment_type: "Box".into(),
            parent_name: parent_name.into(),
            parent_id: parent,
            joint: parse_joint_code("RY").unwrap(),
            joint_frame: JointFrame::default(),
            mass: 2.0,
            com: Vector3::new(0.0, 0.0, 0.1),
            inertia: Matrix3::from_diagonal(&Vector3::new(0.1, 0.2, 0.3)),
            length: 0.2,
            direction: Direction::Up,
            visual: None,
            points: Vec::new(),
            constraints: Vec::new(),
            markers: Vec::new(),
        }
    }

    fn two_cuboids() -> KinematicModel {
        let mut m = KinematicModel::new("boxes", ModelKind::Object);
        let cube = Visual {
            mesh: MeshRef::Primitive(PrimitiveKind::Cuboid),
            dimensions: Vector3::new(0.1, 0.2, 0.3),
            center: Vector3::zeros(),
        };
        let mut a = segment(1, "A", 0, ROOT);
        a.visual = Some(cube.clone());
        let mut b = segment(2, "B", 1, "A");
        b.joint_frame.translation = Vector3::new(0.0, 0.0, 0.5);
        b.visual = Some(cube);
        m.segments = vec![a, b];
        m
    }

    fn foot_model() -> Built {
        let files: BTreeMap<String, String> = [
            ("a", "gender, male\nheight, 1.8\nweight, 80\nfootLength, 0.26\nfootWidth, 0.1\nheelAnkleOffset, 0.05\nankleHeight, 0.08\n"),
            ("d", "Segment_Foot, Foot, TXTZRY, ROOT, Points_Foot_Sagittal, ConstraintSet_Foot_Sagittal\n"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect();
        let env = "humanModel_Anthropometry, a\nhumanModel_Description, d\nhumanModel_ScalingAlgorithm, deleva_sagittal\n";
        build_environment(env, "env", &files).unwrap().value
    }

    #[test]
    fn one_segment_one_frame() {
        let mut m = KinematicModel::new("one", ModelKind::Object);
        m.segments.push(segment(1, "Only", 0, ROOT));
        let doc = model_document(&m).unwrap().value;
        assert_eq!(doc.frames.len(), 1);
        assert_eq!(doc.frames[0].parent, "ROOT");
        let lua = write_lua_model(&m).unwrap().value;
        assert!(lua.contains("parent = \"ROOT\""));
        assert!(lua.starts_with("-- model one (object)\nreturn {\n"));
    }

    #[test]
    fn foot_flat_contact_rows() {
        let built = foot_model();
        let doc = model_document(built.human.as_ref().unwrap()).unwrap().value;
        let rows = &doc.constraint_sets["FootFlat_Sagittal"];
        let normals: Vec<[f64; 3]> = rows
            .iter()
            .map(|r| match r {
                ConstraintRowDoc::Contact { normal, .. } => *normal,
                other => panic!("unexpected row {other:?}"),
            })
            .collect();
        assert_eq!(normals, vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]);
        assert_eq!(doc.points.len(), 2);
    }

    #[test]
    fn output_is_deterministic_and_json_round_trips() {
        let built = foot_model();
        let h = built.human.as_ref().unwrap();
        assert_eq!(write_lua_model(h).unwrap().value, write_lua_model(h).unwrap().value);
        let json = write_json(h).unwrap().value;
        let back: ExportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model_document(h).unwrap().value);
        assert_eq!(write_combined(Some(h), &[]).unwrap().value, write_lua_model(h).unwrap().value);
    }

    #[test]
    fn joint_frame_e_is_transposed_rotation() {
        let mut m = two_cuboids();
        let r = crate::kinematics::euler_xyz_degrees(&Vector3::new(0.0, 0.0, 90.0));
        m.segments[1].joint_frame.rotation = r;
        let doc = model_document(&m).unwrap().value;
        assert_eq!(doc.frames[1].joint_frame.e, rows(&r.transpose()));
        assert_eq!(doc.frames[1].joint_frame.r, [0.0, 0.0, 0.5]);
    }

    #[test]
    fn scene_of_two_cuboids() {
        let scene = write_preview_scene(&two_cuboids()).unwrap();
        assert_eq!(scene.lines().filter(|l| l.starts_with("v ")).count(), 16);
        assert_eq!(scene.lines().filter(|l| l.starts_with("f ")).count(), 24);
        assert!(scene.contains("f 9 "));
        // Second cube sits 0.5 above the first.
        assert!(scene.contains("v -0.05 -0.1 0.35\n"));
    }

    #[test]
    fn scene_without_visuals_has_annotations_only() {
        let mut m = KinematicModel::new("bare", ModelKind::Object);
        let mut s = segment(1, "S", 0, ROOT);
        s.markers.push(crate::kinematics::Marker {
            name: "M1".into(),
            position: Vector3::new(0.0, 0.0, 1.0),
        });
        m.segments.push(s);
        let scene = write_preview_scene(&m).unwrap();
        assert!(scene.lines().all(|l| l.starts_with('#')));
        assert!(scene.contains("# marker S M1 0.0 0.0 1.0"));
    }

    #[test]
    fn colliding_object_frames_are_renamed() {
        let mut human = KinematicModel::new("human", ModelKind::Human);
        human.segments.push(segment(1, "Segment_Pelvis", 0, ROOT));
        let mut obj = KinematicModel::new("object1", ModelKind::Object);
        obj.segments.push(segment(1, "Segment_Pelvis", 0, ROOT));
        obj.segments.push(segment(2, "Strap", 1, "Segment_Pelvis"));
        let parsed = combined_document(Some(&human), &[&obj]).unwrap();
        let names: Vec<(&str, &str)> = parsed
            .value
            .frames
            .iter()
            .map(|f| (f.name.as_str(), f.parent.as_str()))
            .collect();
        assert_eq!(
            names,
            vec![
                ("Segment_Pelvis", "ROOT"),
                ("Object1_Segment_Pelvis", "ROOT"),
                ("Strap", "Object1_Segment_Pelvis")
            ]
        );
        assert!(parsed.warnings.iter().any(|w| w.code == Code::RenamedFrame));
    }

    #[test]
    fn invalid_models_are_not_exported() {
        let mut m = KinematicModel::new("bad", ModelKind::Object);
        let mut s = segment(1, "S", 0, ROOT);
        s.mass = -1.0;
        m.segments.push(s);
        let err = write_lua_model(&m).unwrap_err();
        assert!(err.contains(Code::ValidationFailed));
        assert!(write_preview_scene(&m).is_err());
    }


    #[test]
    fn identifiers_and_strings() {
        assert!(is_identifier("FootFlat_Sagittal"));
        assert!(!is_identifier("1abc"));
        assert!(!is_identifier("end"));
        assert!(!is_identifier("a-b"));
        assert_eq!(lua_string("a\"b\\c\n"), "\"a\\\"b\\\\c\\n\"");
    }

    #[test]
    fn numbers_render_shortest() {
        let v = serde_json::json!({"a": [0.1, 1, -2.5e-8], "b": "x"});
        let mut out = String::new();
        lua_value(&v, 0, &mut out);
        assert_eq!(out, "{\n  a = { 0.1, 1, -2.5e-8 },\n  b = \"x\",\n}");
    }
}
