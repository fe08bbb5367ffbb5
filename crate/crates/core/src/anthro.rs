//! Segment lengths, masses, centres of mass and inertia from anthropometry.
//!
//! Local frame convention: a segment frame sits at its proximal joint with
//! X forward, Y left and Z up. Limb segments hang along -Z; the pelvis,
//! trunk parts and head extend along +Z from their lower joint. Inertia is
//! parameterized by gyration radii: `I_axis = m * (r_axis * L)^2` about the
//! centre of mass.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::diag::{Code, Diagnostic};
use crate::dictionary::FootLandmark;
use crate::kinematics::ModelDescription;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "male" => Some(Gender::Male),
            "female" => Some(Gender::Female),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnthropometryProfile {
    pub gender: Option<Gender>,
    /// Years.
    pub age: Option<f64>,
    /// Metres.
    pub height: Option<f64>,
    /// Body mass in kg.
    pub weight: Option<f64>,
    pub pelvis_width: Option<f64>,
    pub hip_center_distance: Option<f64>,
    pub shoulder_center_distance: Option<f64>,
    pub foot_length: Option<f64>,
    pub foot_width: Option<f64>,
    pub heel_ankle_offset: Option<f64>,
    pub ankle_height: Option<f64>,
}

impl AnthropometryProfile {
    fn require(value: Option<f64>, field: &'static str) -> Result<f64, ScalingError> {
        value.ok_or(ScalingError::MissingAnthropometry(field))
    }

    pub fn require_height(&self) -> Result<f64, ScalingError> {
        Self::require(self.height, "height")
    }

    pub fn require_weight(&self) -> Result<f64, ScalingError> {
        Self::require(self.weight, "weight")
    }

    pub fn require_gender(&self) -> Result<Gender, ScalingError> {
        self.gender.ok_or(ScalingError::MissingAnthropometry("gender"))
    }

    /// Position of a foot landmark in the foot frame (origin at the ankle).
    pub fn foot_landmark(&self, landmark: FootLandmark) -> Result<Vector3<f64>, ScalingError> {
        let heel_offset = Self::require(self.heel_ankle_offset, "heel_ankle_offset")?;
        let ankle_height = Self::require(self.ankle_height, "ankle_height")?;
        let x = if landmark.is_heel() {
            -heel_offset
        } else {
            Self::require(self.foot_length, "foot_length")? - heel_offset
        };
        let sign = landmark.lateral_sign();
        let y = if sign == 0.0 {
            0.0
        } else {
            sign * Self::require(self.foot_width, "foot_width")? / 2.0
        };
        Ok(Vector3::new(x, y, -ankle_height))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("missing anthropometry value {0:?}")]
    MissingAnthropometry(&'static str),
    #[error("segment {segment:?}: type {segment_type:?} is not in the {algorithm} scaling table")]
    UnknownSegmentType {
        segment: String,
        segment_type: String,
        algorithm: AlgorithmId,
    },
    #[error("no segment length provided for {0:?}")]
    MissingSegmentLength(String),
    #[error("segment {segment:?}: length must be strictly positive, got {value}")]
    NonPositiveLength { segment: String, value: f64 },
    #[error("custom segment length given for unknown segment {0:?}")]
    UnknownSegment(String),
    #[error("all default segment masses are zero; cannot redistribute mass")]
    ZeroUnadjustedMass,
    #[error("the {0} table cannot be used with this scaling method")]
    WrongTableKind(AlgorithmId),
}

impl ScalingError {
    pub fn code(&self) -> Code {
        match self {
            ScalingError::MissingAnthropometry(_) => Code::MissingAnthropometry,
            ScalingError::UnknownSegmentType { .. } => Code::UnknownSegmentType,
            ScalingError::MissingSegmentLength(_) => Code::MissingSegmentLength,
            ScalingError::NonPositiveLength { .. } => Code::NonPositiveLength,
            ScalingError::UnknownSegment(_) => Code::UnknownSegment,
            ScalingError::ZeroUnadjustedMass => Code::ZeroUnadjustedMass,
            ScalingError::WrongTableKind(_) => Code::InvalidValue,
        }
    }
}

impl From<ScalingError> for Diagnostic {
    fn from(e: ScalingError) -> Self {
        Diagnostic::error(e.code(), e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgorithmId {
    DeLeva3SegTorso,
    DeLevaFusedTorso,
    DeLevaSagittal,
    JensenChild,
    Custom,
}

impl AlgorithmId {
    pub const BUILTIN: [AlgorithmId; 4] = [
        AlgorithmId::DeLeva3SegTorso,
        AlgorithmId::DeLevaFusedTorso,
        AlgorithmId::DeLevaSagittal,
        AlgorithmId::JensenChild,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::DeLeva3SegTorso => "deleva_3seg_torso",
            AlgorithmId::DeLevaFusedTorso => "deleva_fused_torso",
            AlgorithmId::DeLevaSagittal => "deleva_sagittal",
            AlgorithmId::JensenChild => "jensen_child",
            AlgorithmId::Custom => "custom",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::BUILTIN
            .into_iter()
            .chain([AlgorithmId::Custom])
            .find(|a| a.as_str().eq_ignore_ascii_case(text))
    }

    fn builtin_source(&self) -> Option<&'static str> {
        match self {
            AlgorithmId::DeLeva3SegTorso => Some(include_str!("../data/scaling/deleva_3seg_torso.csv")),
            AlgorithmId::DeLevaFusedTorso => Some(include_str!("../data/scaling/deleva_fused_torso.csv")),
            AlgorithmId::DeLevaSagittal => Some(include_str!("../data/scaling/deleva_sagittal.csv")),
            AlgorithmId::JensenChild => Some(include_str!("../data/scaling/jensen_child.csv")),
            AlgorithmId::Custom => None,
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficients {
    /// Fractions of body height and body mass.
    Regression { length_fraction: f64, mass_fraction: f64 },
    /// Mass fraction `a + b * age`; lengths come from the user.
    Child { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub segment_type: String,
    /// `None` applies to both genders.
    pub gender: Option<Gender>,
    pub coefficients: Coefficients,
    /// CoM distance from the proximal joint as a fraction of length.
    pub com_fraction: f64,
    /// Gyration radius fractions about the sagittal (X), transverse (Y)
    /// and longitudinal (Z) axes.
    pub rgyr: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Regression,
    Child,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub algorithm: AlgorithmId,
    pub kind: TableKind,
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    /// One of the bundled tables; `None` for [`AlgorithmId::Custom`].
    pub fn builtin(id: AlgorithmId) -> Option<ScalingTable> {
        let source = id.builtin_source()?;
        let table = crate::formats::scaling::parse_scaling_table(source, id.as_str(), id)
            .expect("bundled scaling table must parse")
            .value;
        Some(table)
    }

    /// Gender-specific row first, then a row valid for both genders.
    pub fn row(&self, segment_type: &str, gender: Option<Gender>) -> Option<&ScalingRow> {
        let matches_type = |r: &&ScalingRow| r.segment_type.eq_ignore_ascii_case(segment_type);
        gender
            .and_then(|g| {
                self.rows
                    .iter()
                    .filter(matches_type)
                    .find(|r| r.gender == Some(g))
            })
            .or_else(|| self.rows.iter().filter(matches_type).find(|r| r.gender.is_none()))
    }
}

/// Default (or customized) properties of one segment, in its local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDefaults {
    pub segment: String,
    pub segment_type: String,
    pub length: f64,
    pub mass: f64,
    pub com: Vector3<f64>,
    /// About the CoM, principal in local axes.
    pub inertia: Matrix3<f64>,
    pub com_fraction: f64,
    pub rgyr: [f64; 3],
}

/// Which way a segment extends from its proximal joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

impl Direction {
    pub fn sign(&self) -> f64 {
        match self {
            Direction::Down => -1.0,
            Direction::Up => 1.0,
        }
    }
}

const UPWARD_TYPES: [&str; 7] = [
    "Pelvis",
    "LowerTrunk",
    "MidTrunk",
    "UpperTrunk",
    "Trunk",
    "Neck",
    "Head",
];

pub fn direction_of(segment_type: &str) -> Direction {
    if UPWARD_TYPES.iter().any(|t| t.eq_ignore_ascii_case(segment_type)) {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// Where a human child segment's joint sits on its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointSite {
    /// Parent origin plus the lateral hip offset.
    Hip,
    /// Parent distal end plus the lateral shoulder offset.
    Shoulder,
    /// Parent distal end.
    Distal,
}

pub fn joint_site_of(segment_type: &str) -> JointSite {
    if segment_type.eq_ignore_ascii_case("Thigh") {
        JointSite::Hip
    } else if segment_type.eq_ignore_ascii_case("UpperArm") {
        JointSite::Shoulder
    } else {
        JointSite::Distal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
    Center,
}

/// Side from the conventional `_R` / `_L` name suffix.
pub fn side_of(segment_name: &str) -> Side {
    if segment_name.ends_with("_R") || segment_name.ends_with("_r") {
        Side::Right
    } else if segment_name.ends_with("_L") || segment_name.ends_with("_l") {
        Side::Left
    } else {
        Side::Center
    }
}

fn gyration_properties(
    direction: Direction,
    length: f64,
    mass: f64,
    com_fraction: f64,
    rgyr: [f64; 3],
) -> (Vector3<f64>, Matrix3<f64>) {
    let com = Vector3::new(0.0, 0.0, direction.sign() * com_fraction * length);
    let inertia = Matrix3::from_diagonal(&Vector3::from_fn(|i, _| {
        let r = rgyr[i] * length;
        mass * r * r
    }));
    (com, inertia)
}

fn defaults_from(
    name: &str,
    row: &ScalingRow,
    segment_type: &str,
    length: f64,
    mass: f64,
) -> SegmentDefaults {
    let (com, inertia) =
        gyration_properties(direction_of(segment_type), length, mass, row.com_fraction, row.rgyr);
    SegmentDefaults {
        segment: name.to_owned(),
        segment_type: segment_type.to_owned(),
        length,
        mass,
        com,
        inertia,
        com_fraction: row.com_fraction,
        rgyr: row.rgyr,
    }
}

fn lookup<'t>(
    table: &'t ScalingTable,
    name: &str,
    segment_type: &str,
    gender: Option<Gender>,
) -> Result<&'t ScalingRow, ScalingError> {
    table
        .row(segment_type, gender)
        .ok_or_else(|| ScalingError::UnknownSegmentType {
            segment: name.to_owned(),
            segment_type: segment_type.to_owned(),
            algorithm: table.algorithm,
        })
}

/// Height/weight regression scaling for every segment in `description`.
pub fn scale_segments_regression(
    table: &ScalingTable,
    profile: &AnthropometryProfile,
    description: &ModelDescription,
) -> Result<Vec<SegmentDefaults>, ScalingError> {
    if table.kind != TableKind::Regression {
        return Err(ScalingError::WrongTableKind(table.algorithm));
    }
    let gender = profile.require_gender()?;
    let height = profile.require_height()?;
    let weight = profile.require_weight()?;
    description
        .lines
        .iter()
        .map(|line| {
            let row = lookup(table, &line.name, &line.segment_type, Some(gender))?;
            let Coefficients::Regression {
                length_fraction,
                mass_fraction,
            } = row.coefficients
            else {
                return Err(ScalingError::WrongTableKind(table.algorithm));
            };
            Ok(defaults_from(
                &line.name,
                row,
                &line.segment_type,
                length_fraction * height,
                mass_fraction * weight,
            ))
        })
        .collect()
}

/// Age/weight scaling for children; segment lengths are user supplied and
/// keyed by segment name.
pub fn scale_segments_child(
    table: &ScalingTable,
    profile: &AnthropometryProfile,
    description: &ModelDescription,
    lengths: &BTreeMap<String, f64>,
) -> Result<Vec<SegmentDefaults>, ScalingError> {
    if table.kind != TableKind::Child {
        return Err(ScalingError::WrongTableKind(table.algorithm));
    }
    let age = AnthropometryProfile::require(profile.age, "age")?;
    let weight = profile.require_weight()?;
    description
        .lines
        .iter()
        .map(|line| {
            let row = lookup(table, &line.name, &line.segment_type, profile.gender)?;
            let Coefficients::Child { a, b } = row.coefficients else {
                return Err(ScalingError::WrongTableKind(table.algorithm));
            };
            let length = *lengths
                .get(&line.name)
                .ok_or_else(|| ScalingError::MissingSegmentLength(line.name.clone()))?;
            if length <= 0.0 {
                return Err(ScalingError::NonPositiveLength {
                    segment: line.name.clone(),
                    value: length,
                });
            }
            Ok(defaults_from(
                &line.name,
                row,
                &line.segment_type,
                length,
                (a + b * age) * weight,
            ))
        })
        .collect()
}

/// Replaces default lengths with custom ones and redistributes mass in
/// proportion to the length ratios so the total stays `total_mass`.
pub fn apply_custom_lengths(
    defaults: &[SegmentDefaults],
    custom: &BTreeMap<String, f64>,
    total_mass: f64,
) -> Result<Vec<SegmentDefaults>, ScalingError> {
    for (name, &length) in custom {
        if !defaults.iter().any(|d| &d.segment == name) {
            return Err(ScalingError::UnknownSegment(name.clone()));
        }
        if length <= 0.0 {
            return Err(ScalingError::NonPositiveLength {
                segment: name.clone(),
                value: length,
            });
        }
    }

    let ratios: Vec<f64> = defaults
        .iter()
        .map(|d| custom.get(&d.segment).map_or(1.0, |l| l / d.length))
        .collect();
    let unadjusted: f64 = defaults.iter().zip(&ratios).map(|(d, r)| d.mass * r).sum();
    if unadjusted == 0.0 {
        return Err(ScalingError::ZeroUnadjustedMass);
    }
    let factor = total_mass / unadjusted;

    Ok(defaults
        .iter()
        .zip(&ratios)
        .map(|(d, &ratio)| {
            let length = custom.get(&d.segment).copied().unwrap_or(d.length);
            let mass = d.mass * ratio * factor;
            if mass == d.mass && length == d.length {
                return d.clone();
            }
            let (com, inertia) = gyration_properties(
                direction_of(&d.segment_type),
                length,
                mass,
                d.com_fraction,
                d.rgyr,
            );
            SegmentDefaults {
                length,
                mass,
                com,
                inertia,
                ..d.clone()
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Sagittal,
    Spatial,
}

impl Plane {
    /// A description is spatial when it carries any left/right segment.
    pub fn of_description(description: &ModelDescription) -> Plane {
        if description
            .lines
            .iter()
            .any(|l| side_of(&l.name) != Side::Center)
        {
            Plane::Spatial
        } else {
            Plane::Sagittal
        }
    }
}

/// Lateral joint-centre offsets and anthropometric foot landmarks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointOffsets {
    /// Keys `Hip_R`, `Hip_L`, `Shoulder_R`, `Shoulder_L`.
    pub joints: BTreeMap<String, Vector3<f64>>,
    pub foot: BTreeMap<FootLandmark, Vector3<f64>>,
}

impl JointOffsets {
    pub fn lateral(&self, site: JointSite, side: Side) -> Vector3<f64> {
        let prefix = match site {
            JointSite::Hip => "Hip",
            JointSite::Shoulder => "Shoulder",
            JointSite::Distal => return Vector3::zeros(),
        };
        let suffix = match side {
            Side::Right => "R",
            Side::Left => "L",
            Side::Center => return Vector3::zeros(),
        };
        self.joints
            .get(&format!("{prefix}_{suffix}"))
            .copied()
            .unwrap_or_else(Vector3::zeros)
    }
}

pub fn compute_joint_offsets(
    profile: &AnthropometryProfile,
    plane: Plane,
) -> Result<JointOffsets, ScalingError> {
    let mut offsets = JointOffsets::default();
    if plane == Plane::Spatial {
        let hip = AnthropometryProfile::require(profile.hip_center_distance, "hip_center_distance")?;
        let shoulder = AnthropometryProfile::require(
            profile.shoulder_center_distance,
            "shoulder_center_distance",
        )?;
        for (name, half) in [("Hip", hip / 2.0), ("Shoulder", shoulder / 2.0)] {
            offsets
                .joints
                .insert(format!("{name}_R"), Vector3::new(0.0, -half, 0.0));
            offsets
                .joints
                .insert(format!("{name}_L"), Vector3::new(0.0, half, 0.0));
        }
    }
    for landmark in FootLandmark::ALL {
        if plane == Plane::Sagittal && landmark.lateral_sign() != 0.0 {
            continue;
        }
        if let Ok(p) = profile.foot_landmark(landmark) {
            offsets.foot.insert(landmark, p);
        }
    }
    Ok(offsets)
}
