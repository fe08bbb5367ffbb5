//! Kinematic trees for human and object models.

mod build;
mod markers;
mod pose;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::anthro::Direction;
use crate::dictionary::{JointDescriptor, LoopRow};
use crate::mesh::{MassPolicy, PrimitiveKind, TriMesh};

pub use build::{build_human_model, build_object_model};
pub use markers::{
    add_default_markerset, default_markerset, euler_xyz_degrees, place_markers, MarkerEntry,
    MarkerKind, MarkerSpec,
};
pub use pose::{reference_pose_frames, PoseFrames, WorldFrame};
pub use validate::{capability_violation, validate_model};

pub const ROOT: &str = "ROOT";

/// One line of a model description file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionLine {
    pub name: String,
    pub segment_type: String,
    pub joint: String,
    pub parent: String,
    pub point_set: Option<String>,
    pub constraint_set: Option<String>,
    /// Physical line in the source file.
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelDescription {
    pub lines: Vec<DescriptionLine>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Human,
    Object,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Human => "human",
            ModelKind::Object => "object",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rows of the human/object capability matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Functionality {
    Anthropometry,
    ModelDescription,
    ScalingAlgorithms,
    CustomScaling,
    JointTypes,
    Points,
    PointConstraints,
    CustomMarkers,
    CustomSetups,
    SegmentMassFromMesh,
    SegmentMassFromUser,
}

impl Functionality {
    pub const ALL: [Functionality; 11] = [
        Functionality::Anthropometry,
        Functionality::ModelDescription,
        Functionality::ScalingAlgorithms,
        Functionality::CustomScaling,
        Functionality::JointTypes,
        Functionality::Points,
        Functionality::PointConstraints,
        Functionality::CustomMarkers,
        Functionality::CustomSetups,
        Functionality::SegmentMassFromMesh,
        Functionality::SegmentMassFromUser,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Functionality::Anthropometry => "Anthropometry",
            Functionality::ModelDescription => "Model description",
            Functionality::ScalingAlgorithms => "Scaling algorithms",
            Functionality::CustomScaling => "Custom scaling",
            Functionality::JointTypes => "Joint types",
            Functionality::Points => "Points",
            Functionality::PointConstraints => "Point constraints",
            Functionality::CustomMarkers => "Custom markers",
            Functionality::CustomSetups => "Custom setups",
            Functionality::SegmentMassFromMesh => "Segment mass from mesh",
            Functionality::SegmentMassFromUser => "Segment mass from user",
        }
    }

    pub fn available_for(&self, kind: ModelKind) -> bool {
        use Functionality::*;
        match self {
            Anthropometry | ScalingAlgorithms | CustomScaling => kind == ModelKind::Human,
            CustomSetups | SegmentMassFromMesh | SegmentMassFromUser => kind == ModelKind::Object,
            ModelDescription | JointTypes | Points | PointConstraints | CustomMarkers => true,
        }
    }
}

/// Placement of a joint in its parent frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointFrame {
    pub translation: Vector3<f64>,
    /// Orientation of the child frame expressed in the parent frame.
    pub rotation: Matrix3<f64>,
}

impl Default for JointFrame {
    fn default() -> Self {
        Self {
            translation: Vector3::zeros(),
            rotation: Matrix3::identity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshRef {
    Primitive(PrimitiveKind),
    /// Mesh file loaded at build time; `path` is kept for the export.
    File { path: String, mesh: TriMesh },
}

impl MeshRef {
    pub fn src(&self) -> &str {
        match self {
            MeshRef::Primitive(kind) => kind.unit_mesh_name(),
            MeshRef::File { path, .. } => path,
        }
    }
}

/// A visual: unit-extent mesh scaled by `dimensions` and centred at `center`.
/// File meshes use `dimensions` as a per-axis scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Visual {
    pub mesh: MeshRef,
    pub dimensions: Vector3<f64>,
    pub center: Vector3<f64>,
}

impl Visual {
    /// Mesh in segment-local coordinates.
    pub fn local_mesh(&self) -> TriMesh {
        match &self.mesh {
            MeshRef::Primitive(kind) => kind.unit_mesh().scaled(&self.dimensions),
            MeshRef::File { mesh, .. } => mesh.scaled(&self.dimensions),
        }
        .translated(&self.center)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttachedPoint {
    pub name: String,
    /// Metres, segment-local.
    pub position: Vector3<f64>,
}

/// A contact row resolved against the points of its segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactConstraint {
    pub set: String,
    pub subset: String,
    pub point: String,
    pub position: Vector3<f64>,
    pub normal: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub name: String,
    pub position: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSegment {
    /// 1-based; 0 is ROOT.
    pub id: usize,
    pub name: String,
    pub segment_type: String,
    pub parent_name: String,
    pub parent_id: usize,
    pub joint: JointDescriptor,
    pub joint_frame: JointFrame,
    pub mass: f64,
    pub com: Vector3<f64>,
    /// About the CoM, segment-local axes.
    pub inertia: Matrix3<f64>,
    pub length: f64,
    pub direction: Direction,
    pub visual: Option<Visual>,
    pub points: Vec<AttachedPoint>,
    pub constraints: Vec<ContactConstraint>,
    pub markers: Vec<Marker>,
}

impl ModelSegment {
    /// Offset from the segment origin to its distal end.
    pub fn distal_offset(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.direction.sign() * self.length)
    }

    pub fn point(&self, name: &str) -> Option<&AttachedPoint> {
        self.points.iter().find(|p| p.name == name)
    }
}

/// A loop constraint row tagged with the set it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopConstraint {
    pub set: String,
    pub row: LoopRow,
}

/// Where a model came from: SHA-256 digests of its inputs keyed by role.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn record(&mut self, role: &str, contents: &[u8]) {
        use sha2::{Digest, Sha256};
        self.inputs
            .insert(role.to_owned(), hex::encode(Sha256::digest(contents)));
    }
}

/// What a model build consumed, in terms of capability-matrix rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureUse(pub BTreeSet<Functionality>);

impl FeatureUse {
    pub fn insert(&mut self, f: Functionality) {
        self.0.insert(f);
    }

    pub fn contains(&self, f: Functionality) -> bool {
        self.0.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicModel {
    pub name: String,
    pub kind: ModelKind,
    pub segments: Vec<ModelSegment>,
    pub loop_constraints: Vec<LoopConstraint>,
    pub gravity: Vector3<f64>,
    pub provenance: Provenance,
    pub features: FeatureUse,
}

pub const DEFAULT_GRAVITY: [f64; 3] = [0.0, 0.0, -9.81];

impl KinematicModel {
    pub fn new(name: impl Into<String>, kind: ModelKind) -> Self {
        Self {
            name: name.into(),
            kind,
            segments: Vec::new(),
            loop_constraints: Vec::new(),
            gravity: Vector3::from(DEFAULT_GRAVITY),
            provenance: Provenance::default(),
            features: FeatureUse::default(),
        }
    }

    pub fn segment(&self, name: &str) -> Option<&ModelSegment> {
        self.segments.iter().find(|s| s.name == name)
    }

    pub fn segment_mut(&mut self, name: &str) -> Option<&mut ModelSegment> {
        self.segments.iter_mut().find(|s| s.name == name)
    }

    pub fn dof(&self) -> usize {
        self.segments.iter().map(|s| s.joint.dof()).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.segments.iter().map(|s| s.mass).sum()
    }

    pub fn marker_count(&self) -> usize {
        self.segments.iter().map(|s| s.markers.len()).sum()
    }
}

/// Per-segment configuration of an object.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SegmentSetup {
    pub segment_type: String,
    pub length: Option<f64>,
    /// Copy the length of this human segment.
    pub scale_to: Option<String>,
    pub direction: Option<Direction>,
    pub joint_offset: Option<Vector3<f64>>,
    /// Intrinsic X-Y-Z Euler angles, degrees.
    pub joint_rotation: Option<Vector3<f64>>,
    pub mesh: Option<MeshSpec>,
    pub mesh_center: Option<[Dimension; 3]>,
    pub mass: Option<f64>,
    pub com: Option<Vector3<f64>>,
    pub inertia: Option<Matrix3<f64>>,
    pub line: usize,
}

/// A mesh dimension: a literal in metres or a multiple of segment length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Metres(f64),
    Length(f64),
}

impl Dimension {
    pub fn resolve(&self, length: f64) -> f64 {
        match *self {
            Dimension::Metres(v) => v,
            Dimension::Length(k) => k * length,
        }
    }

    pub fn resolve3(dims: &[Dimension; 3], length: f64) -> Vector3<f64> {
        Vector3::new(dims[0].resolve(length), dims[1].resolve(length), dims[2].resolve(length))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Primitive {
        kind: PrimitiveKind,
        dims: Vec<Dimension>,
    },
    File {
        path: String,
        scale: Vector3<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectSetup {
    pub segments: Vec<SegmentSetup>,
}

impl ObjectSetup {
    pub fn get(&self, segment_type: &str) -> Option<&SegmentSetup> {
        self.segments.iter().find(|s| s.segment_type == segment_type)
    }
}

/// Mass policies from a mass-properties file, keyed by segment name or type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MassPolicies {
    pub entries: Vec<(String, MassPolicy)>,
}

impl MassPolicies {
    pub fn get(&self, key: &str) -> Option<&MassPolicy> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, p)| p)
    }
}
