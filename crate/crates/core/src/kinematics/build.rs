use std::collections::{BTreeMap, HashMap};

use nalgebra::{Matrix3, Vector3};

use crate::anthro::{
    direction_of, joint_site_of, side_of, AnthropometryProfile, Direction, JointOffsets,
    JointSite, SegmentDefaults,
};
use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::dictionary::{Dictionary, FootLandmark, JointDescriptor, PointCoord};
use crate::kinematics::markers::euler_xyz_degrees;
use crate::kinematics::{
    AttachedPoint, ContactConstraint, DescriptionLine, Dimension, Functionality, JointFrame,
    KinematicModel, LoopConstraint, MassPolicies, MeshRef, MeshSpec, ModelDescription,
    ModelKind, ModelSegment, ObjectSetup, Visual, ROOT,
};
use crate::mesh::{apply_mass_policy, make_primitive, MassPolicy, PrimitiveKind, TriMesh};

fn line_error(line: &DescriptionLine, code: Code, message: impl Into<String>) -> Diagnostic {
    let mut d = Diagnostic::error(code, message).located(line.name.clone());
    d.line = Some(line.line);
    d
}

/// Parent index (0 = ROOT, otherwise 1-based line index) for every line.
/// Parents must be listed before their children.
fn resolve_parents(description: &ModelDescription) -> Result<Vec<usize>, Report> {
    let mut report = Report::new();
    let mut first_index: HashMap<&str, usize> = HashMap::new();
    for (i, line) in description.lines.iter().enumerate() {
        if line.name == ROOT {
            report.push(line_error(line, Code::DuplicateSegmentName, "ROOT is reserved"));
        } else if first_index.insert(line.name.as_str(), i).is_some() {
            report.push(line_error(
                line,
                Code::DuplicateSegmentName,
                format!("segment {:?} is defined more than once", line.name),
            ));
        }
    }

    let mut parents = Vec::with_capacity(description.lines.len());
    for (i, line) in description.lines.iter().enumerate() {
        if line.parent == ROOT {
            parents.push(0);
            continue;
        }
        match first_index.get(line.parent.as_str()) {
            Some(&p) if p < i => parents.push(p + 1),
            Some(_) => {
                // Walk up from this segment; coming back to it means a cycle.
                let mut cursor = line.parent.as_str();
                let mut cyclic = false;
                for _ in 0..=description.lines.len() {
                    if cursor == line.name {
                        cyclic = true;
                        break;
                    }
                    match first_index.get(cursor) {
                        Some(&k) => cursor = description.lines[k].parent.as_str(),
                        None => break,
                    }
                }
                if cyclic {
                    report.push(line_error(
                        line,
                        Code::CycleDetected,
                        format!("parent chain of {:?} loops back onto itself", line.name),
                    ));
                } else {
                    report.push(line_error(
                        line,
                        Code::DanglingParent,
                        format!(
                            "parent {:?} must be listed before its child {:?}",
                            line.parent, line.name
                        ),
                    ));
                }
                parents.push(0);
            }
            None => {
                report.push(line_error(
                    line,
                    Code::DanglingParent,
                    format!("parent {:?} of {:?} is not defined", line.parent, line.name),
                ));
                parents.push(0);
            }
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(parents)
    }
}

fn resolve_joint(dict: &Dictionary, line: &DescriptionLine) -> Result<JointDescriptor, Diagnostic> {
    dict.resolve_joint(&line.joint).map_err(|e| {
        if line.joint.contains('_') {
            line_error(
                line,
                Code::UnknownDictionaryName,
                format!("joint {:?} is not in the dictionary", line.joint),
            )
        } else {
            line_error(line, e.code(), e.to_string())
        }
    })
}

type FootResolver<'a> = dyn Fn(FootLandmark) -> Result<Vector3<f64>, String> + 'a;

fn attach_points(
    dict: &Dictionary,
    line: &DescriptionLine,
    length: f64,
    foot: &FootResolver<'_>,
) -> Result<Vec<AttachedPoint>, Diagnostic> {
    let Some(set_name) = &line.point_set else {
        return Ok(Vec::new());
    };
    let set = dict.point_sets.get(set_name).ok_or_else(|| {
        line_error(
            line,
            Code::UnknownDictionaryName,
            format!("point set {set_name:?} is not in the dictionary"),
        )
    })?;
    set.entries
        .iter()
        .map(|entry| {
            let position = match &entry.coord {
                PointCoord::Scaled(v) => v * length,
                PointCoord::Foot(landmark) => foot(*landmark).map_err(|why| {
                    line_error(
                        line,
                        Code::MissingAnthropometry,
                        format!("point {:?} ({}): {why}", entry.name, landmark.token()),
                    )
                })?,
            };
            Ok(AttachedPoint {
                name: entry.name.clone(),
                position,
            })
        })
        .collect()
}

enum ConstraintAttachment {
    None,
    Contacts(Vec<ContactConstraint>),
    Loops(Vec<LoopConstraint>),
}

fn attach_constraints(
    dict: &Dictionary,
    line: &DescriptionLine,
    points: &[AttachedPoint],
) -> Result<ConstraintAttachment, Diagnostic> {
    let Some(set_name) = &line.constraint_set else {
        return Ok(ConstraintAttachment::None);
    };
    if let Some(set) = dict.constraint_sets.get(set_name) {
        let mut rows = Vec::new();
        for subset in &set.subsets {
            for row in &subset.rows {
                let point = points.iter().find(|p| p.name == row.point).ok_or_else(|| {
                    line_error(
                        line,
                        Code::UnknownDictionaryName,
                        format!(
                            "constraint {}/{} refers to point {:?}, which is not attached to {:?}",
                            set.name, subset.name, row.point, line.name
                        ),
                    )
                })?;
                rows.push(ContactConstraint {
                    set: set.name.clone(),
                    subset: subset.name.clone(),
                    point: row.point.clone(),
                    position: point.position,
                    normal: row.normal,
                });
            }
        }
        return Ok(ConstraintAttachment::Contacts(rows));
    }
    if let Some(set) = dict.loop_sets.get(set_name) {
        return Ok(ConstraintAttachment::Loops(
            set.rows
                .iter()
                .map(|row| LoopConstraint {
                    set: set.name.clone(),
                    row: row.clone(),
                })
                .collect(),
        ));
    }
    Err(line_error(
        line,
        Code::UnknownDictionaryName,
        format!("constraint set {set_name:?} is not in the dictionary"),
    ))
}

fn is_trunk(segment_type: &str) -> bool {
    ["Pelvis", "LowerTrunk", "MidTrunk", "UpperTrunk", "Trunk", "Neck"]
        .iter()
        .any(|t| t.eq_ignore_ascii_case(segment_type))
}

/// Geometric stand-in visual for a human segment.
fn human_visual(
    segment_type: &str,
    length: f64,
    direction: Direction,
    profile: &AnthropometryProfile,
) -> Visual {
    let along = Vector3::new(0.0, 0.0, direction.sign() * length / 2.0);
    if segment_type.eq_ignore_ascii_case("Head") {
        return Visual {
            mesh: MeshRef::Primitive(PrimitiveKind::Sphere),
            dimensions: Vector3::new(0.75 * length, 0.65 * length, length),
            center: along,
        };
    }
    if is_trunk(segment_type) {
        let width = profile.pelvis_width.unwrap_or(0.3);
        return Visual {
            mesh: MeshRef::Primitive(PrimitiveKind::Cuboid),
            dimensions: Vector3::new(0.6 * width, width, length),
            center: along,
        };
    }
    if segment_type.eq_ignore_ascii_case("Foot") {
        if let (Ok(heel), Ok(toe)) = (
            profile.foot_landmark(FootLandmark::Heel),
            profile.foot_landmark(FootLandmark::Toe),
        ) {
            let height = -heel.z;
            let width = profile.foot_width.unwrap_or(0.35 * length);
            return Visual {
                mesh: MeshRef::Primitive(PrimitiveKind::Cuboid),
                dimensions: Vector3::new(toe.x - heel.x, width, height),
                center: Vector3::new((toe.x + heel.x) / 2.0, 0.0, -height / 2.0),
            };
        }
    }
    Visual {
        mesh: MeshRef::Primitive(PrimitiveKind::Cylinder),
        dimensions: Vector3::new(0.3 * length, 0.3 * length, length),
        center: along,
    }
}

fn record_attachments(
    model: &mut KinematicModel,
    segment: &mut ModelSegment,
    attachment: ConstraintAttachment,
) {
    if !segment.points.is_empty() {
        model.features.insert(Functionality::Points);
    }
    match attachment {
        ConstraintAttachment::None => {}
        ConstraintAttachment::Contacts(rows) => {
            model.features.insert(Functionality::PointConstraints);
            segment.constraints = rows;
        }
        ConstraintAttachment::Loops(rows) => {
            model.features.insert(Functionality::PointConstraints);
            model.loop_constraints.extend(rows);
        }
    }
}

/// Builds a scaled human model. `defaults` are matched to description
/// lines by segment name.
pub fn build_human_model(
    description: &ModelDescription,
    dictionary: &Dictionary,
    defaults: &[SegmentDefaults],
    offsets: &JointOffsets,
    profile: &AnthropometryProfile,
) -> Result<Parsed<KinematicModel>, Report> {
    let parents = resolve_parents(description)?;
    let by_name: BTreeMap<&str, &SegmentDefaults> =
        defaults.iter().map(|d| (d.segment.as_str(), d)).collect();
    let foot = |landmark: FootLandmark| {
        offsets
            .foot
            .get(&landmark)
            .copied()
            .or_else(|| profile.foot_landmark(landmark).ok())
            .ok_or_else(|| {
                profile
                    .foot_landmark(landmark)
                    .err()
                    .map(|e| e.to_string())
                    .unwrap_or_default()
            })
    };

    let mut model = KinematicModel::new("human", ModelKind::Human);
    for f in [
        Functionality::Anthropometry,
        Functionality::ModelDescription,
        Functionality::ScalingAlgorithms,
        Functionality::JointTypes,
    ] {
        model.features.insert(f);
    }

    let mut report = Report::new();
    for (i, line) in description.lines.iter().enumerate() {
        let result = (|| -> Result<(), Diagnostic> {
            let joint = resolve_joint(dictionary, line)?;
            let d = by_name.get(line.name.as_str()).ok_or_else(|| {
                line_error(
                    line,
                    Code::UnknownSegmentType,
                    format!(
                        "no scaled properties for segment {:?} of type {:?}",
                        line.name, line.segment_type
                    ),
                )
            })?;
            let direction = direction_of(&line.segment_type);
            let translation = match parents[i] {
                0 => Vector3::zeros(),
                p => {
                    let parent: &ModelSegment = &model.segments[p - 1];
                    let side = side_of(&line.name);
                    match joint_site_of(&line.segment_type) {
                        JointSite::Hip => offsets.lateral(JointSite::Hip, side),
                        JointSite::Shoulder => {
                            parent.distal_offset() + offsets.lateral(JointSite::Shoulder, side)
                        }
                        JointSite::Distal => parent.distal_offset(),
                    }
                }
            };
            let points = attach_points(dictionary, line, d.length, &foot)?;
            let attachment = attach_constraints(dictionary, line, &points)?;
            let mut segment = ModelSegment {
                id: i + 1,
                name: line.name.clone(),
                segment_type: line.segment_type.clone(),
                parent_name: line.parent.clone(),
                parent_id: parents[i],
                joint,
                joint_frame: JointFrame {
                    translation,
                    rotation: Matrix3::identity(),
                },
                mass: d.mass,
                com: d.com,
                inertia: d.inertia,
                length: d.length,
                direction,
                visual: Some(human_visual(&line.segment_type, d.length, direction, profile)),
                points,
                constraints: Vec::new(),
                markers: Vec::new(),
            };
            record_attachments(&mut model, &mut segment, attachment);
            model.segments.push(segment);
            Ok(())
        })();
        if let Err(d) = result {
            report.push(d);
            return Err(report);
        }
    }
    Ok(Parsed::new(model))
}

/// Builds an object model from its description and declarative setup.
/// `meshes` holds file meshes referenced by the setup, keyed by path.
pub fn build_object_model(
    name: &str,
    description: &ModelDescription,
    dictionary: &Dictionary,
    setup: &ObjectSetup,
    policies: &MassPolicies,
    meshes: &BTreeMap<String, TriMesh>,
    human: Option<&KinematicModel>,
) -> Result<Parsed<KinematicModel>, Report> {
    let parents = resolve_parents(description)?;
    let mut model = KinematicModel::new(name, ModelKind::Object);
    for f in [
        Functionality::ModelDescription,
        Functionality::JointTypes,
        Functionality::CustomSetups,
    ] {
        model.features.insert(f);
    }
    let mut warnings = Vec::new();
    let no_foot = |_: FootLandmark| -> Result<Vector3<f64>, String> {
        Err("foot landmarks need subject anthropometry, which objects do not have".into())
    };

    for (i, line) in description.lines.iter().enumerate() {
        let result = (|| -> Result<(), Diagnostic> {
            let joint = resolve_joint(dictionary, line)?;
            let seg_setup = setup.get(&line.segment_type).ok_or_else(|| {
                line_error(
                    line,
                    Code::UnknownSegmentType,
                    format!("segment type {:?} is not defined in the object setup", line.segment_type),
                )
            })?;

            let length = match &seg_setup.scale_to {
                Some(target) => {
                    let human = human.ok_or_else(|| {
                        line_error(
                            line,
                            Code::MissingHumanContext,
                            format!("{:?} scales to human segment {target:?}, but no human model was built", line.name),
                        )
                    })?;
                    human.segment(target).map(|s| s.length).ok_or_else(|| {
                        line_error(
                            line,
                            Code::MissingHumanContext,
                            format!("human model has no segment {target:?} to scale {:?} to", line.name),
                        )
                    })?
                }
                None => seg_setup.length.unwrap_or(0.0),
            };
            let direction = seg_setup.direction.unwrap_or(Direction::Down);
            let translation = match (seg_setup.joint_offset, parents[i]) {
                (Some(offset), _) => offset,
                (None, 0) => Vector3::zeros(),
                (None, p) => model.segments[p - 1].distal_offset(),
            };
            let rotation = seg_setup
                .joint_rotation
                .map(|r| euler_xyz_degrees(&r))
                .unwrap_or_else(Matrix3::identity);

            let center = seg_setup
                .mesh_center
                .map_or_else(Vector3::zeros, |c| Dimension::resolve3(&c, length));
            let (visual, mass_mesh) = match &seg_setup.mesh {
                None => (None, None),
                Some(MeshSpec::Primitive { kind, dims }) => {
                    let dims: Vec<f64> = dims.iter().map(|d| d.resolve(length)).collect();
                    let mesh = make_primitive(*kind, &dims)
                        .map_err(|e| line_error(line, e.code(), e.to_string()))?;
                    let visual = Visual {
                        mesh: MeshRef::Primitive(*kind),
                        dimensions: kind.extents(&dims),
                        center,
                    };
                    (Some(visual), Some((mesh, Vector3::repeat(1.0))))
                }
                Some(MeshSpec::File { path, scale }) => {
                    let mesh = meshes.get(path).ok_or_else(|| {
                        line_error(line, Code::UnknownMeshRef, format!("mesh {path:?} could not be loaded"))
                    })?;
                    let visual = Visual {
                        mesh: MeshRef::File {
                            path: path.clone(),
                            mesh: mesh.clone(),
                        },
                        dimensions: *scale,
                        center,
                    };
                    (Some(visual), Some((mesh.clone(), *scale)))
                }
            };

            let policy = policies
                .get(&line.name)
                .or_else(|| policies.get(&line.segment_type));
            let (mass, com, inertia) = match policy {
                Some(policy) => {
                    model.features.insert(match policy {
                        MassPolicy::MeanDensity(_) => Functionality::SegmentMassFromMesh,
                        MassPolicy::UserValues { .. } => Functionality::SegmentMassFromUser,
                    });
                    let props = apply_mass_policy(
                        policy,
                        mass_mesh.as_ref().map(|(m, _)| m),
                        &mass_mesh.as_ref().map_or(Vector3::repeat(1.0), |(_, s)| *s),
                    )
                    .map_err(|e| line_error(line, e.code(), e.to_string()))?;
                    let com = match policy {
                        MassPolicy::MeanDensity(_) => props.com + center,
                        MassPolicy::UserValues { .. } => props.com,
                    };
                    (props.mass, com, props.inertia)
                }
                None => match seg_setup.mass {
                    Some(mass) => (
                        mass,
                        seg_setup.com.unwrap_or_else(Vector3::zeros),
                        seg_setup.inertia.unwrap_or_else(Matrix3::zeros),
                    ),
                    None => {
                        return Err(line_error(
                            line,
                            Code::MissingMassProperties,
                            format!(
                                "segment {:?} has neither setup mass values nor a mass-properties entry",
                                line.name
                            ),
                        ))
                    }
                },
            };

            let points = attach_points(dictionary, line, length, &no_foot)?;
            let attachment = attach_constraints(dictionary, line, &points)?;
            let mut segment = ModelSegment {
                id: i + 1,
                name: line.name.clone(),
                segment_type: line.segment_type.clone(),
                parent_name: line.parent.clone(),
                parent_id: parents[i],
                joint,
                joint_frame: JointFrame {
                    translation,
                    rotation,
                },
                mass,
                com,
                inertia,
                length,
                direction,
                visual,
                points,
                constraints: Vec::new(),
                markers: Vec::new(),
            };
            record_attachments(&mut model, &mut segment, attachment);
            model.segments.push(segment);
            Ok(())
        })();
        if let Err(d) = result {
            return Err(Report::from(d));
        }
    }

    for (key, _) in &policies.entries {
        if !description
            .lines
            .iter()
            .any(|l| &l.name == key || &l.segment_type == key)
        {
            warnings.push(Diagnostic::warning(
                Code::UnknownSegment,
                format!("mass properties given for {key:?}, which is not a segment of {name:?}"),
            ));
        }
    }
    Ok(Parsed::with_warnings(model, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anthro::Gender;
    use crate::dictionary::builtin_dictionary;

    fn line(name: &str, ty: &str, joint: &str, parent: &str) -> DescriptionLine {
        DescriptionLine {
            name: name.into(),
            segment_type: ty.into(),
            joint: joint.into(),
            parent: parent.into(),
            point_set: None,
            constraint_set: None,
            line: 1,
        }
    }

    fn defaults_for(desc: &ModelDescription, length: f64) -> Vec<SegmentDefaults> {
        desc.lines
            .iter()
            .map(|l| SegmentDefaults {
                segment: l.name.clone(),
                segment_type: l.segment_type.clone(),
                length,
                mass: 1.0,
                com: Vector3::zeros(),
                inertia: Matrix3::identity(),
                com_fraction: 0.5,
                rgyr: [0.3, 0.3, 0.1],
            })
            .collect()
    }

    fn profile() -> AnthropometryProfile {
        AnthropometryProfile {
            gender: Some(Gender::Male),
            height: Some(1.8),
            weight: Some(80.0),
            ..Default::default()
        }
    }

    fn build(desc: &ModelDescription) -> Result<Parsed<KinematicModel>, Report> {
        build_human_model(
            desc,
            &builtin_dictionary(),
            &defaults_for(desc, 1.0),
            &JointOffsets::default(),
            &profile(),
        )
    }

    #[test]
    fn planar_root_segment() {
        let desc = ModelDescription {
            lines: vec![line("Segment_Pelvis", "Pelvis", "TXTZRY", ROOT)],
        };
        let model = build(&desc).unwrap().value;
        assert_eq!(model.segments.len(), 1);
        assert_eq!(model.segments[0].parent_id, 0);
        assert_eq!(model.dof(), 3);
    }

    #[test]
    fn hand_points_scale_with_unit_length() {
        let mut hand = line("Segment_Hand_R", "Hand", "RY", ROOT);
        hand.point_set = Some("Points_Hand_R_3D".into());
        let model = build(&ModelDescription { lines: vec![hand] }).unwrap().value;
        assert_eq!(
            model.segments[0].points[0].position,
            Vector3::new(-0.2, 0.15, -0.2)
        );
    }

    #[test]
    fn constraint_point_must_be_attached() {
        let mut foot = line("Segment_Foot", "Foot", "RY", ROOT);
        foot.constraint_set = Some("ConstraintSet_Foot_Sagittal".into());
        let err = build(&ModelDescription { lines: vec![foot] }).unwrap_err();
        assert!(err.contains(Code::UnknownDictionaryName));
    }

    #[test]
    fn tree_errors() {
        let dup = ModelDescription {
            lines: vec![line("A", "Thigh", "RY", ROOT), line("A", "Thigh", "RY", ROOT)],
        };
        assert!(build(&dup).unwrap_err().contains(Code::DuplicateSegmentName));

        let dangling = ModelDescription {
            lines: vec![line("A", "Thigh", "RY", "Nope")],
        };
        assert!(build(&dangling).unwrap_err().contains(Code::DanglingParent));

        let cycle = ModelDescription {
            lines: vec![line("A", "Thigh", "RY", "B"), line("B", "Thigh", "RY", "A")],
        };
        assert!(build(&cycle).unwrap_err().contains(Code::CycleDetected));

        let later = ModelDescription {
            lines: vec![line("B", "Thigh", "RY", "A"), line("A", "Thigh", "RY", ROOT)],
        };
        assert!(build(&later).unwrap_err().contains(Code::DanglingParent));

        let bad_joint = ModelDescription {
            lines: vec![line("A", "Thigh", "Joint_Missing", ROOT)],
        };
        assert!(build(&bad_joint).unwrap_err().contains(Code::UnknownDictionaryName));
    }

    #[test]
    fn children_attach_at_parent_distal_end() {
        let desc = ModelDescription {
            lines: vec![
                line("Segment_Thigh", "Thigh", "RY", ROOT),
                line("Segment_Shank", "Shank", "RY", "Segment_Thigh"),
            ],
        };
        let model = build(&desc).unwrap().value;
        assert_eq!(
            model.segments[1].joint_frame.translation,
            Vector3::new(0.0, 0.0, -1.0)
        );
    }

    #[test]
    fn hips_attach_at_pelvis_origin_with_offsets() {
        let desc = ModelDescription {
            lines: vec![
                line("Segment_Pelvis", "Pelvis", "TXTZRY", ROOT),
                line("Segment_Thigh_R", "Thigh", "RY", "Segment_Pelvis"),
                line("Segment_MidTrunk", "MidTrunk", "RY", "Segment_Pelvis"),
            ],
        };
        let mut offsets = JointOffsets::default();
        offsets
            .joints
            .insert("Hip_R".into(), Vector3::new(0.0, -0.09, 0.0));
        let model = build_human_model(
            &desc,
            &builtin_dictionary(),
            &defaults_for(&desc, 0.5),
            &offsets,
            &profile(),
        )
        .unwrap()
        .value;
        assert_eq!(
            model.segments[1].joint_frame.translation,
            Vector3::new(0.0, -0.09, 0.0)
        );
        assert_eq!(
            model.segments[2].joint_frame.translation,
            Vector3::new(0.0, 0.0, 0.5)
        );
    }
}
