//! Environment files: `keyword, value` lines naming one human model, any
//! number of numbered object models and the export options.
//!
//! ```text
//! humanModel_Anthropometry, subject.anthro
//! humanModel_Description, human.desc
//! humanModel_ScalingAlgorithm, deleva_sagittal
//! humanModel_Save, human.lua
//! objectModel_Description_1, box.desc
//! objectModel_Setup_1, box.setup
//! objectModel_MassProperties_1, box.mass
//! combinedModel_Save, scene.lua
//! OutputFolder, out
//! ```
//!
//! Paths are relative to the environment file. Output paths are relative to
//! `OutputFolder`, which is itself relative to the environment file.
//! `Gravity, x, y, z` overrides the default gravity and `CustomDictionary`
//! takes one or more dictionary files. Unknown keywords are reported as
//! warnings and otherwise ignored.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::formats::{format_vec3, records, Ctx, Record, PERCENT};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TypeMeshes {
    #[default]
    Geometric,
    Detailed,
}

impl TypeMeshes {
    pub fn as_str(&self) -> &'static str {
        match self {
            TypeMeshes::Geometric => "geometric",
            TypeMeshes::Detailed => "detailed",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HumanEnv {
    pub anthropometry: String,
    pub description: String,
    /// A bundled algorithm id or the path of a scaling table.
    pub scaling_algorithm: String,
    pub custom_lengths: Option<String>,
    pub type_meshes: TypeMeshes,
    pub add_markers: bool,
    pub save: Option<String>,
    /// Object-only inputs; parsed so validation can reject them.
    pub setup: Option<String>,
    pub mass_properties: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectEnv {
    pub index: usize,
    pub description: String,
    pub setup: String,
    pub mass_properties: Option<String>,
    pub save: Option<String>,
    /// Human-only inputs; parsed so validation can reject them.
    pub anthropometry: Option<String>,
    pub scaling_algorithm: Option<String>,
    pub custom_lengths: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub human: Option<HumanEnv>,
    pub objects: Vec<ObjectEnv>,
    pub custom_markers: Option<String>,
    pub custom_dictionaries: Vec<String>,
    pub combined_save: Option<String>,
    pub output_folder: String,
    pub gravity: Option<Vector3<f64>>,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            human: None,
            objects: Vec::new(),
            custom_markers: None,
            custom_dictionaries: Vec::new(),
            combined_save: None,
            output_folder: ".".into(),
            gravity: None,
        }
    }
}

const HUMAN_KEYS: [&str; 9] = [
    "Anthropometry",
    "Description",
    "ScalingAlgorithm",
    "CustomSegmentLengths",
    "TypeMeshes",
    "AddMarkers",
    "Save",
    "Setup",
    "MassProperties",
];

const OBJECT_KEYS: [&str; 7] = [
    "Description",
    "Setup",
    "MassProperties",
    "Save",
    "Anthropometry",
    "ScalingAlgorithm",
    "CustomSegmentLengths",
];

fn parse_bool(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

/// Splits `objectModel_Description_3` into `("Description", 3)`.
fn object_key(keyword: &str) -> Option<(&str, &str)> {
    let rest = keyword.strip_prefix("objectModel_")?;
    let (prop, index) = rest.rsplit_once('_')?;
    Some((prop, index))
}

pub fn parse_environment(text: &str, file: &str) -> Result<Parsed<Environment>, Report> {
    let ctx = Ctx::new(file);
    let mut report = Report::new();
    let mut env = Environment::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut human: BTreeMap<&'static str, (String, usize)> = BTreeMap::new();
    let mut objects: BTreeMap<usize, BTreeMap<&'static str, (String, usize)>> = BTreeMap::new();

    let single = |rec: &Record<'_>| -> Result<String, Diagnostic> {
        ctx.field_count(rec, 2, 2, rec.fields[0])?;
        ctx.name(rec, 1, rec.fields[0])
    };

    for rec in records(text, PERCENT) {
        let keyword = rec.fields[0];
        if let Some(&first) = seen.get(keyword) {
            report.push(ctx.err(
                rec.line,
                Code::DuplicateKeyword,
                format!("{keyword} already given on line {first}"),
            ));
            continue;
        }
        seen.insert(keyword.to_owned(), rec.line);

        let result = (|| -> Result<(), Diagnostic> {
            if let Some(prop) = keyword.strip_prefix("humanModel_") {
                let Some(&key) = HUMAN_KEYS.iter().find(|k| **k == prop) else {
                    report.push(ctx.warn(rec.line, Code::UnknownKeyword, format!("unknown keyword {keyword}; ignored")));
                    return Ok(());
                };
                human.insert(key, (single(&rec)?, rec.line));
                return Ok(());
            }
            if let Some((prop, index)) = object_key(keyword) {
                let key = OBJECT_KEYS.iter().find(|k| **k == prop);
                match (key, index.parse::<usize>()) {
                    (Some(&key), Ok(k)) if k >= 1 && !index.starts_with(['+', '0']) => {
                        objects.entry(k).or_default().insert(key, (single(&rec)?, rec.line));
                    }
                    _ => report.push(ctx.warn(
                        rec.line,
                        Code::UnknownKeyword,
                        format!("unknown keyword {keyword}; ignored"),
                    )),
                }
                return Ok(());
            }
            match keyword {
                "UseCustomMarkers" => env.custom_markers = Some(single(&rec)?),
                "combinedModel_Save" => env.combined_save = Some(single(&rec)?),
                "OutputFolder" => env.output_folder = single(&rec)?,
                "CustomDictionary" => {
                    ctx.field_count(&rec, 2, usize::MAX, keyword)?;
                    for i in 1..rec.fields.len() {
                        env.custom_dictionaries.push(ctx.name(&rec, i, "dictionary path")?);
                    }
                }
                "Gravity" => {
                    ctx.field_count(&rec, 4, 4, keyword)?;
                    env.gravity = Some(ctx.vec3(&rec, 1, "gravity")?);
                }
                _ => report.push(ctx.warn(
                    rec.line,
                    Code::UnknownKeyword,
                    format!("unknown keyword {keyword}; ignored"),
                )),
            }
            Ok(())
        })();
        if let Err(d) = result {
            report.push(d);
        }
    }

    let last_line = text.lines().count().max(1);
    if !human.is_empty() || objects.is_empty() {
        let take = |key: &str| human.get(key).map(|(v, _)| v.clone());
        let mut missing = Vec::new();
        let mut mandatory = |key: &'static str| {
            take(key).unwrap_or_else(|| {
                missing.push(key);
                String::new()
            })
        };
        let anthropometry = mandatory("Anthropometry");
        let description = mandatory("Description");
        let scaling_algorithm = mandatory("ScalingAlgorithm");
        for key in missing {
            report.push(ctx.err(
                last_line,
                Code::MissingMandatory,
                format!("humanModel_{key} is mandatory"),
            ));
        }
        let mut h = HumanEnv {
            anthropometry,
            description,
            scaling_algorithm,
            custom_lengths: take("CustomSegmentLengths"),
            save: take("Save"),
            setup: take("Setup"),
            mass_properties: take("MassProperties"),
            ..Default::default()
        };
        if let Some((v, line)) = human.get("TypeMeshes") {
            match v.to_ascii_lowercase().as_str() {
                "geometric" => h.type_meshes = TypeMeshes::Geometric,
                "detailed" => h.type_meshes = TypeMeshes::Detailed,
                _ => report.push(ctx.err(
                    *line,
                    Code::InvalidValue,
                    format!("humanModel_TypeMeshes must be geometric or detailed, found {v:?}"),
                )),
            }
        }
        if let Some((v, line)) = human.get("AddMarkers") {
            match parse_bool(v) {
                Some(b) => h.add_markers = b,
                None => report.push(ctx.err(
                    *line,
                    Code::InvalidValue,
                    format!("humanModel_AddMarkers must be true or false, found {v:?}"),
                )),
            }
        }
        env.human = Some(h);
    }

    for (position, (&k, props)) in objects.iter().enumerate() {
        let first_line = props.values().map(|(_, l)| *l).min().unwrap_or(last_line);
        if k != position + 1 {
            report.push(ctx.err(
                first_line,
                Code::GappedObjectIndex,
                format!("object {k} follows object {position}; object indices must run 1, 2, 3, ..."),
            ));
        }
        let take = |key: &str| props.get(key).map(|(v, _)| v.clone());
        let mut required = |key: &str| {
            take(key).unwrap_or_else(|| {
                report.push(ctx.err(
                    first_line,
                    Code::MissingMandatory,
                    format!("objectModel_{key}_{k} is mandatory for object {k}"),
                ));
                String::new()
            })
        };
        let description = required("Description");
        let setup = required("Setup");
        env.objects.push(ObjectEnv {
            index: k,
            description,
            setup,
            mass_properties: take("MassProperties"),
            save: take("Save"),
            anthropometry: take("Anthropometry"),
            scaling_algorithm: take("ScalingAlgorithm"),
            custom_lengths: take("CustomSegmentLengths"),
        });
    }

    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::with_warnings(env, report.0))
    }
}

pub fn serialize_environment(env: &Environment) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: &str| out.push_str(&format!("{k}, {v}\n"));
    if let Some(h) = &env.human {
        kv("humanModel_Anthropometry", &h.anthropometry);
        kv("humanModel_Description", &h.description);
        kv("humanModel_ScalingAlgorithm", &h.scaling_algorithm);
        if let Some(v) = &h.custom_lengths {
            kv("humanModel_CustomSegmentLengths", v);
        }
        kv("humanModel_TypeMeshes", h.type_meshes.as_str());
        kv("humanModel_AddMarkers", if h.add_markers { "true" } else { "false" });
        for (key, value) in [("Save", &h.save), ("Setup", &h.setup), ("MassProperties", &h.mass_properties)] {
            if let Some(v) = value {
                kv(&format!("humanModel_{key}"), v);
            }
        }
    }
    for o in &env.objects {
        let k = o.index;
        kv(&format!("objectModel_Description_{k}"), &o.description);
        kv(&format!("objectModel_Setup_{k}"), &o.setup);
        for (key, value) in [
            ("MassProperties", &o.mass_properties),
            ("Save", &o.save),
            ("Anthropometry", &o.anthropometry),
            ("ScalingAlgorithm", &o.scaling_algorithm),
            ("CustomSegmentLengths", &o.custom_lengths),
        ] {
            if let Some(v) = value {
                kv(&format!("objectModel_{key}_{k}"), v);
            }
        }
    }
    if let Some(v) = &env.custom_markers {
        kv("UseCustomMarkers", v);
    }
    if !env.custom_dictionaries.is_empty() {
        kv("CustomDictionary", &env.custom_dictionaries.join(", "));
    }
    if let Some(v) = &env.combined_save {
        kv("combinedModel_Save", v);
    }
    kv("OutputFolder", &env.output_folder);
    if let Some(g) = &env.gravity {
        kv("Gravity", &format_vec3(g));
    }
    out
}

/// Line of the first occurrence of every keyword.
pub fn keyword_lines(text: &str) -> BTreeMap<String, usize> {
    let mut lines = BTreeMap::new();
    for r in records(text, PERCENT) {
        lines.entry(r.fields[0].to_owned()).or_insert(r.line);
    }
    lines
}
