//! Built-in and user-supplied descriptors for joints, point sets, contact
//! constraint sets and loop constraints.
//!
//! Joint descriptors follow the spatial-vector convention: each degree of
//! freedom is one 6-vector with indices (rot X, rot Y, rot Z, trans X,
//! trans Y, trans Z).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::Vector3;
use thiserror::Error;

use crate::diag::{Code, Diagnostic};

/// Axis tokens in motion-subspace index order.
pub const AXIS_TOKENS: [&str; 6] = ["RX", "RY", "RZ", "TX", "TY", "TZ"];

/// One degree of freedom: a one-hot 6-vector.
pub type MotionRow = [u8; 6];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("malformed joint code {code:?}: {reason}")]
    MalformedJointCode { code: String, reason: String },
}

impl DictionaryError {
    pub fn code(&self) -> Code {
        match self {
            DictionaryError::MalformedJointCode { .. } => Code::MalformedJointCode,
        }
    }
}

impl From<DictionaryError> for Diagnostic {
    fn from(e: DictionaryError) -> Self {
        Diagnostic::error(e.code(), e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDescriptor {
    /// Canonical uppercase token string, e.g. `TXTZRY`.
    pub code: String,
    pub rows: Vec<MotionRow>,
    /// Opaque text carried into the export untouched.
    pub custom_payload: Option<String>,
}

impl JointDescriptor {
    pub fn dof(&self) -> usize {
        self.rows.len()
    }

    /// Rebuilds the token string from the rows.
    pub fn serialize_code(&self) -> String {
        self.rows
            .iter()
            .map(|row| {
                let axis = row.iter().position(|&v| v == 1).unwrap_or(0);
                AXIS_TOKENS[axis]
            })
            .collect()
    }
}

/// Parses a concatenation of `RX|RY|RZ|TX|TY|TZ` tokens (any case).
pub fn parse_joint_code(code: &str) -> Result<JointDescriptor, DictionaryError> {
    let malformed = |reason: &str| DictionaryError::MalformedJointCode {
        code: code.to_owned(),
        reason: reason.to_owned(),
    };
    if code.is_empty() {
        return Err(malformed("empty code"));
    }
    if !code.is_ascii() {
        return Err(malformed("non-ASCII character"));
    }
    if code.len() % 2 != 0 {
        return Err(malformed("odd number of characters"));
    }
    let upper = code.to_ascii_uppercase();
    let bytes = upper.as_bytes();
    let mut rows = Vec::with_capacity(bytes.len() / 2);
    for pair in bytes.chunks_exact(2) {
        let offset = match pair[0] {
            b'R' => 0,
            b'T' => 3,
            other => {
                return Err(malformed(&format!(
                    "motion kind {:?} is neither R nor T",
                    other as char
                )))
            }
        };
        let axis = match pair[1] {
            b'X' => 0,
            b'Y' => 1,
            b'Z' => 2,
            other => return Err(malformed(&format!("unknown axis letter {:?}", other as char))),
        };
        let mut row = [0u8; 6];
        row[offset + axis] = 1;
        rows.push(row);
    }
    Ok(JointDescriptor {
        code: upper,
        rows,
        custom_payload: None,
    })
}

/// Foot landmarks computed from anthropometry rather than stored as
/// length fractions. Written as `@token` in dictionary files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FootLandmark {
    Heel,
    Toe,
    HeelYPos,
    HeelYNeg,
    ToeYPos,
    ToeYNeg,
}

impl FootLandmark {
    pub const ALL: [FootLandmark; 6] = [
        FootLandmark::Heel,
        FootLandmark::Toe,
        FootLandmark::HeelYPos,
        FootLandmark::HeelYNeg,
        FootLandmark::ToeYPos,
        FootLandmark::ToeYNeg,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            FootLandmark::Heel => "@heel",
            FootLandmark::Toe => "@toe",
            FootLandmark::HeelYPos => "@heel_ypos",
            FootLandmark::HeelYNeg => "@heel_yneg",
            FootLandmark::ToeYPos => "@toe_ypos",
            FootLandmark::ToeYNeg => "@toe_yneg",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.token().eq_ignore_ascii_case(token))
    }

    pub fn is_heel(&self) -> bool {
        matches!(
            self,
            FootLandmark::Heel | FootLandmark::HeelYPos | FootLandmark::HeelYNeg
        )
    }

    /// Sign of the lateral (Y) offset; zero for sagittal landmarks.
    pub fn lateral_sign(&self) -> f64 {
        match self {
            FootLandmark::Heel | FootLandmark::Toe => 0.0,
            FootLandmark::HeelYPos | FootLandmark::ToeYPos => 1.0,
            FootLandmark::HeelYNeg | FootLandmark::ToeYNeg => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointCoord {
    /// Dimensionless, multiplied by the segment length.
    Scaled(Vector3<f64>),
    /// Absolute position derived from foot anthropometry.
    Foot(FootLandmark),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointEntry {
    pub name: String,
    pub coord: PointCoord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub name: String,
    pub entries: Vec<PointEntry>,
}

impl PointSet {
    pub fn get(&self, point: &str) -> Option<&PointEntry> {
        self.entries.iter().find(|e| e.name == point)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactRow {
    pub point: String,
    /// Unit normal in base coordinates.
    pub normal: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSubset {
    pub name: String,
    pub rows: Vec<ContactRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub name: String,
    pub subsets: Vec<ConstraintSubset>,
}

impl ConstraintSet {
    pub fn subset(&self, name: &str) -> Option<&ConstraintSubset> {
        self.subsets.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BodyPoint {
    pub body: String,
    pub point: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopRow {
    pub predecessor: BodyPoint,
    pub successor: BodyPoint,
    pub axis: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConstraintSet {
    pub name: String,
    pub rows: Vec<LoopRow>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dictionary {
    pub joints: BTreeMap<String, JointDescriptor>,
    pub point_sets: BTreeMap<String, PointSet>,
    pub constraint_sets: BTreeMap<String, ConstraintSet>,
    pub loop_sets: BTreeMap<String, LoopConstraintSet>,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.joints.len() + self.point_sets.len() + self.constraint_sets.len() + self.loop_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Resolves the joint field of a description line: a descriptor name,
    /// the same name with a `Joint_` prefix, or a bare axis code.
    pub fn resolve_joint(&self, field: &str) -> Result<JointDescriptor, DictionaryError> {
        if let Some(j) = self.joints.get(field) {
            return Ok(j.clone());
        }
        if let Some(j) = self.joints.get(&format!("Joint_{field}")) {
            return Ok(j.clone());
        }
        parse_joint_code(field)
    }
}

static BUILTIN_SOURCE: &str = include_str!("../data/builtin.dict");
static BUILTIN: OnceLock<Dictionary> = OnceLock::new();

/// The shipped dictionary. Parsed once from the bundled declarative file.
pub fn builtin_dictionary() -> Dictionary {
    BUILTIN
        .get_or_init(|| {
            crate::formats::dictionary::parse_dictionary(BUILTIN_SOURCE, "builtin.dict")
                .expect("bundled dictionary must parse")
                .value
        })
        .clone()
}

/// Source text of the bundled dictionary, for documentation and tooling.
pub fn builtin_dictionary_source() -> &'static str {
    BUILTIN_SOURCE
}

/// Union of `base` and `extension`; extension entries replace base entries
/// of the same name and each replacement yields one warning.
pub fn merge_custom_dictionary(
    base: Dictionary,
    extension: Dictionary,
) -> (Dictionary, Vec<Diagnostic>) {
    fn merge_map<V>(
        kind: &str,
        target: &mut BTreeMap<String, V>,
        source: BTreeMap<String, V>,
        warnings: &mut Vec<Diagnostic>,
    ) {
        for (name, value) in source {
            if target.insert(name.clone(), value).is_some() {
                warnings.push(Diagnostic::warning(
                    Code::DictionaryOverride,
                    format!("custom {kind} {name:?} overrides the built-in definition"),
                ));
            }
        }
    }

    let mut merged = base;
    let mut warnings = Vec::new();
    merge_map("joint", &mut merged.joints, extension.joints, &mut warnings);
    merge_map("point set", &mut merged.point_sets, extension.point_sets, &mut warnings);
    merge_map(
        "constraint set",
        &mut merged.constraint_sets,
        extension.constraint_sets,
        &mut warnings,
    );
    merge_map("loop set", &mut merged.loop_sets, extension.loop_sets, &mut warnings);
    (merged, warnings)
}
