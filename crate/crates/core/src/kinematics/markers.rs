use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::kinematics::{KinematicModel, Marker};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerKind {
    Marker,
    Cluster,
    DoubleCluster,
}

impl MarkerKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "marker" => Some(MarkerKind::Marker),
            "cluster" => Some(MarkerKind::Cluster),
            "doublecluster" => Some(MarkerKind::DoubleCluster),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MarkerKind::Marker => "Marker",
            MarkerKind::Cluster => "Cluster",
            MarkerKind::DoubleCluster => "DoubleCluster",
        }
    }

    pub fn name_count(&self) -> usize {
        match self {
            MarkerKind::Marker => 1,
            MarkerKind::Cluster => 3,
            MarkerKind::DoubleCluster => 6,
        }
    }
}

impl fmt::Display for MarkerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One marker record: a single marker or a rigid cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerEntry {
    pub segment: String,
    pub kind: MarkerKind,
    /// Spacing between cluster markers, metres.
    pub distance: f64,
    pub names: Vec<String>,
    /// Fractions of segment length.
    pub translation: Vector3<f64>,
    /// Intrinsic X-Y-Z Euler angles, degrees.
    pub rotation: Vector3<f64>,
    /// Line of the record header in its source file.
    pub line: usize,
}

impl MarkerEntry {
    /// Marker positions in the segment frame.
    pub fn positions(&self, length: f64) -> Vec<Vector3<f64>> {
        let rot = euler_xyz_degrees(&self.rotation);
        let origin = self.translation * length;
        let d = self.distance;
        let cluster = [Vector3::zeros(), Vector3::new(d, 0.0, 0.0), Vector3::new(0.0, 0.0, d)];
        let local: Vec<Vector3<f64>> = match self.kind {
            MarkerKind::Marker => vec![Vector3::zeros()],
            MarkerKind::Cluster => cluster.to_vec(),
            MarkerKind::DoubleCluster => {
                let shift = Vector3::new(0.0, d, 0.0);
                cluster.iter().copied().chain(cluster.iter().map(|p| p + shift)).collect()
            }
        };
        local.iter().map(|p| origin + rot * p).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarkerSpec {
    pub entries: Vec<MarkerEntry>,
}

/// Rotation for intrinsic X-Y-Z Euler angles in degrees.
pub fn euler_xyz_degrees(angles: &Vector3<f64>) -> Matrix3<f64> {
    let axis = |v: Vector3<f64>, deg: f64| {
        Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(v), deg.to_radians())
            .into_inner()
    };
    axis(Vector3::x(), angles.x) * axis(Vector3::y(), angles.y) * axis(Vector3::z(), angles.z)
}

fn entry_error(entry: &MarkerEntry, code: Code, message: String) -> Diagnostic {
    let mut d = Diagnostic::error(code, message).located(entry.segment.clone());
    d.line = Some(entry.line);
    d
}

fn existing_names(model: &KinematicModel) -> BTreeSet<String> {
    model
        .segments
        .iter()
        .flat_map(|s| s.markers.iter().map(|m| m.name.clone()))
        .collect()
}

fn attach(
    model: &mut KinematicModel,
    entry: &MarkerEntry,
    taken: &mut BTreeSet<String>,
) -> Result<(), Diagnostic> {
    if entry.names.len() != entry.kind.name_count() {
        return Err(entry_error(
            entry,
            Code::NameCountMismatch,
            format!(
                "{} needs {} marker names, found {}",
                entry.kind,
                entry.kind.name_count(),
                entry.names.len()
            ),
        ));
    }
    let Some(segment) = model.segment_mut(&entry.segment) else {
        return Err(entry_error(
            entry,
            Code::UnknownSegment,
            format!("markers refer to unknown segment {:?}", entry.segment),
        ));
    };
    let positions = entry.positions(segment.length);
    for (name, position) in entry.names.iter().zip(positions) {
        if !taken.insert(name.clone()) {
            return Err(entry_error(
                entry,
                Code::DuplicateMarkerName,
                format!("marker {name:?} is already attached"),
            ));
        }
        segment.markers.push(Marker {
            name: name.clone(),
            position,
        });
    }
    Ok(())
}

/// Attaches every marker of `spec`; all named segments must exist.
pub fn place_markers(
    mut model: KinematicModel,
    spec: &MarkerSpec,
) -> Result<KinematicModel, Report> {
    let mut taken = existing_names(&model);
    let mut report = Report::new();
    for entry in &spec.entries {
        if let Err(d) = attach(&mut model, entry, &mut taken) {
            report.push(d);
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(model)
    }
}

/// The bundled default markerset.
pub fn default_markerset() -> &'static MarkerSpec {
    static SET: OnceLock<MarkerSpec> = OnceLock::new();
    SET.get_or_init(|| {
        crate::formats::markers::parse_marker_file(DEFAULT_MARKERSET, "default.markers")
            .expect("bundled markerset parses")
            .value
    })
}

pub const DEFAULT_MARKERSET: &str = include_str!("../../data/markers/default.markers");

/// Attaches the default markerset, skipping records whose segment is absent.
pub fn add_default_markerset(mut model: KinematicModel) -> Result<Parsed<KinematicModel>, Report> {
    let mut taken = existing_names(&model);
    let mut report = Report::new();
    let mut skipped: Vec<(&str, Vec<&str>)> = Vec::new();
    for entry in &default_markerset().entries {
        if model.segment(&entry.segment).is_none() {
            let names = entry.names.iter().map(String::as_str);
            match skipped.iter_mut().find(|(s, _)| *s == entry.segment) {
                Some((_, list)) => list.extend(names),
                None => skipped.push((&entry.segment, names.collect())),
            }
            continue;
        }
        if let Err(d) = attach(&mut model, entry, &mut taken) {
            report.push(d);
        }
    }
    let warnings = skipped
        .into_iter()
        .map(|(segment, names)| {
            Diagnostic::warning(
                Code::MarkerSkipped,
                format!(
                    "default markers {} skipped: model has no segment {segment:?}",
                    names.join(", ")
                ),
            )
            .located(segment.to_owned())
        })
        .collect();
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::with_warnings(model, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn entry(kind: MarkerKind, names: &[&str], d: f64) -> MarkerEntry {
        MarkerEntry {
            segment: "Seg".into(),
            kind,
            distance: d,
            names: names.iter().map(|s| s.to_string()).collect(),
            translation: Vector3::zeros(),
            rotation: Vector3::zeros(),
            line: 1,
        }
    }

    #[test]
    fn cluster_layout() {
        let e = entry(MarkerKind::Cluster, &["a", "b", "c"], 0.043);
        assert_eq!(
            e.positions(1.0),
            vec![
                Vector3::zeros(),
                Vector3::new(0.043, 0.0, 0.0),
                Vector3::new(0.0, 0.0, 0.043)
            ]
        );
    }

    #[test]
    fn double_cluster_copies_along_local_y() {
        let mut e = entry(MarkerKind::DoubleCluster, &["a", "b", "c", "d", "e", "f"], 0.1);
        e.rotation = Vector3::new(0.0, 0.0, 90.0);
        let p = e.positions(1.0);
        assert_eq!(p.len(), 6);
        assert_relative_eq!(p[3], Vector3::new(-0.1, 0.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(p[1], Vector3::new(0.0, 0.1, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn translation_scales_with_length() {
        let mut e = entry(MarkerKind::Marker, &["m"], 0.0);
        e.translation = Vector3::new(-1.0, -0.05, 0.9);
        assert_relative_eq!(
            e.positions(0.2)[0],
            Vector3::new(-0.2, -0.01, 0.18),
            epsilon = 1e-15
        );
    }

    #[test]
    fn euler_order_is_intrinsic_xyz() {
        let r = euler_xyz_degrees(&Vector3::new(90.0, 90.0, 0.0));
        // x -> -z under Ry, then -z -> y under Rx.
        assert_relative_eq!(r * Vector3::x(), Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(euler_xyz_degrees(&Vector3::zeros()), Matrix3::identity());
    }

    #[test]
    fn default_markerset_is_large_enough() {
        let count: usize = default_markerset().entries.iter().map(|e| e.names.len()).sum();
        assert!(count >= 35, "{count}");
    }
}
