//! Environment-driven model creation: parse every input, build the human,
//! then each object in index order, attach custom markers, validate and
//! render the requested outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::anthro::{
    apply_custom_lengths, compute_joint_offsets, scale_segments_child, scale_segments_regression,
    AlgorithmId, Plane, ScalingTable, TableKind,
};
use crate::diag::{Code, Diagnostic, Parsed, Report};
use crate::dictionary::{builtin_dictionary, merge_custom_dictionary, Dictionary};
use crate::export::{
    write_combined, write_combined_json, write_json, write_lua_model, write_preview_scene,
};
use crate::formats::anthropometry::parse_anthropometry;
use crate::formats::description::parse_description;
use crate::formats::dictionary::parse_dictionary;
use crate::formats::environment::{parse_environment, Environment, HumanEnv, ObjectEnv, TypeMeshes};
use crate::formats::lengths::parse_segment_lengths;
use crate::formats::markers::parse_marker_file;
use crate::formats::mass::parse_mass_properties;
use crate::formats::scaling::parse_scaling_table;
use crate::formats::setup::parse_object_setup;
use crate::kinematics::{
    add_default_markerset, build_human_model, build_object_model, place_markers, validate_model,
    Functionality, KinematicModel, MarkerSpec, MeshSpec,
};
use crate::mesh::{load_mesh, MassPolicy};

/// Where input files come from. Paths are as written in the environment.
pub trait Sources {
    fn read(&self, path: &str) -> io::Result<Vec<u8>>;
}

/// Files relative to a base directory; absolute paths are used as given.
pub struct FsSources {
    pub base: PathBuf,
}

impl Sources for FsSources {
    fn read(&self, path: &str) -> io::Result<Vec<u8>> {
        fs::read(self.base.join(path))
    }
}

impl Sources for BTreeMap<String, String> {
    fn read(&self, path: &str) -> io::Result<Vec<u8>> {
        self.get(path)
            .map(|s| s.clone().into_bytes())
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, "no such input"))
    }
}

#[derive(Debug, Clone)]
pub struct Built {
    pub env: Environment,
    pub human: Option<KinematicModel>,
    /// Objects with their environment index.
    pub objects: Vec<(usize, KinematicModel)>,
}

impl Built {
    pub fn models(&self) -> impl Iterator<Item = &KinematicModel> {
        self.human.iter().chain(self.objects.iter().map(|(_, m)| m))
    }
}

struct Loader<'s> {
    sources: &'s dyn Sources,
    report: Report,
    warnings: Vec<Diagnostic>,
}

impl Loader<'_> {
    fn text(&mut self, path: &str, role: &str) -> Option<String> {
        match self.sources.read(path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(s) => Some(s),
                Err(_) => {
                    self.report.push(
                        Diagnostic::error(Code::Io, format!("{role} file is not UTF-8")).in_file(path),
                    );
                    None
                }
            },
            Err(e) => {
                self.report.push(
                    Diagnostic::error(Code::Io, format!("cannot read {role} file: {e}")).in_file(path),
                );
                None
            }
        }
    }

    fn parse<T>(
        &mut self,
        path: &str,
        role: &str,
        parser: fn(&str, &str) -> Result<Parsed<T>, Report>,
    ) -> Option<(T, String)> {
        let text = self.text(path, role)?;
        match parser(&text, path) {
            Ok(p) => {
                self.warnings.extend(p.warnings);
                Some((p.value, text))
            }
            Err(r) => {
                self.report.extend(r);
                None
            }
        }
    }

    fn take<T>(&mut self, result: Result<Parsed<T>, Report>) -> Option<T> {
        match result {
            Ok(p) => {
                self.warnings.extend(p.warnings);
                Some(p.value)
            }
            Err(r) => {
                self.report.extend(r);
                None
            }
        }
    }
}

fn record(model: &mut KinematicModel, role: &str, text: &str) {
    model.provenance.record(role, text.as_bytes());
}

/// The built-in dictionary merged with each custom one, plus the custom
/// sources for provenance.
fn load_dictionary(loader: &mut Loader<'_>, env: &Environment) -> (Dictionary, Vec<(String, String)>) {
    let mut dict = builtin_dictionary();
    let mut texts = Vec::new();
    for path in &env.custom_dictionaries {
        if let Some((extra, text)) = loader.parse(path, "dictionary", parse_dictionary) {
            texts.push((format!("dictionary {path}"), text));
            let (merged, warnings) = merge_custom_dictionary(dict, extra);
            loader.warnings.extend(warnings.into_iter().map(|d| d.in_file(path)));
            dict = merged;
        }
    }
    (dict, texts)
}

fn scaling_table(loader: &mut Loader<'_>, spec: &str) -> Option<(ScalingTable, Option<String>)> {
    if let Some(id) = AlgorithmId::parse(spec).filter(|id| *id != AlgorithmId::Custom) {
        return ScalingTable::builtin(id).map(|t| (t, None));
    }
    let text = loader.text(spec, "scaling table")?;
    let table = loader.take(parse_scaling_table(&text, spec, AlgorithmId::Custom))?;
    Some((table, Some(text)))
}

fn build_human(loader: &mut Loader<'_>, env: &Environment, h: &HumanEnv, dict: &Dictionary) -> Option<KinematicModel> {
    let profile = loader.parse(&h.anthropometry, "anthropometry", parse_anthropometry);
    let description = loader.parse(&h.description, "description", parse_description);
    let table = scaling_table(loader, &h.scaling_algorithm);
    let lengths = h
        .custom_lengths
        .as_ref()
        .map(|p| loader.parse(p, "segment lengths", parse_segment_lengths));
    let (Some((profile, profile_text)), Some((description, description_text)), Some((table, table_text))) =
        (profile, description, table)
    else {
        return None;
    };
    let lengths = match lengths {
        Some(None) => return None,
        Some(Some(l)) => Some(l),
        None => None,
    };

    let at_anthro = |e: crate::anthro::ScalingError| Diagnostic::from(e).in_file(&h.anthropometry);
    let defaults = match (table.kind, &lengths) {
        (TableKind::Child, Some((l, _))) => scale_segments_child(&table, &profile, &description, l),
        (TableKind::Child, None) => {
            loader.report.push(
                Diagnostic::error(
                    Code::MissingMandatory,
                    "the child scaling table needs humanModel_CustomSegmentLengths",
                )
                .located("humanModel_CustomSegmentLengths"),
            );
            return None;
        }
        (TableKind::Regression, _) => scale_segments_regression(&table, &profile, &description)
            .and_then(|d| match &lengths {
                Some((l, _)) => {
                    let total = profile.require_weight()?;
                    apply_custom_lengths(&d, l, total)
                }
                None => Ok(d),
            }),
    };
    let defaults = match defaults {
        Ok(d) => d,
        Err(e) => {
            use crate::anthro::ScalingError as E;
            let line_of = |name: &str| description.lines.iter().find(|l| l.name == name).map(|l| l.line);
            let d = Diagnostic::from(e.clone());
            let d = match &e {
                E::UnknownSegment(_) => d.in_file(h.custom_lengths.as_deref().unwrap_or(&h.description)),
                E::UnknownSegmentType { segment, .. }
                | E::MissingSegmentLength(segment)
                | E::NonPositiveLength { segment, .. } => match line_of(segment) {
                    Some(line) => d.at(&h.description, line),
                    None => d.in_file(&h.description),
                },
                _ => d.in_file(&h.anthropometry),
            };
            loader.report.push(d);
            return None;
        }
    };
    let offsets = match compute_joint_offsets(&profile, Plane::of_description(&description)) {
        Ok(o) => o,
        Err(e) => {
            loader.report.push(at_anthro(e));
            return None;
        }
    };
    let built = build_human_model(&description, dict, &defaults, &offsets, &profile)
        .map_err(|r| r.in_file(&h.description));
    let mut model = loader.take(built)?;

    record(&mut model, "anthropometry", &profile_text);
    record(&mut model, "description", &description_text);
    if let Some(text) = table_text {
        record(&mut model, "scaling", &text);
    }
    if let Some((_, text)) = &lengths {
        record(&mut model, "lengths", text);
        model.features.insert(Functionality::CustomScaling);
    }
    if h.type_meshes == TypeMeshes::Detailed {
        loader.warnings.push(
            Diagnostic::warning(
                Code::DetailedMeshUnavailable,
                "detailed meshes are not bundled; geometric shapes are used",
            )
            .located("humanModel_TypeMeshes"),
        );
    }
    if h.setup.is_some() {
        model.features.insert(Functionality::CustomSetups);
    }
    if let Some(path) = &h.mass_properties {
        if let Some((policies, _)) = loader.parse(path, "mass properties", parse_mass_properties) {
            let mut any = false;
            for (_, p) in &policies.entries {
                any = true;
                model.features.insert(match p {
                    MassPolicy::MeanDensity(_) => Functionality::SegmentMassFromMesh,
                    MassPolicy::UserValues { .. } => Functionality::SegmentMassFromUser,
                });
            }
            if !any {
                model.features.insert(Functionality::SegmentMassFromUser);
            }
        }
    }
    if h.add_markers {
        model = loader.take(add_default_markerset(model))?;
    }
    if let Some(g) = env.gravity {
        model.gravity = g;
    }
    Some(model)
}

fn build_object(
    loader: &mut Loader<'_>,
    env: &Environment,
    o: &ObjectEnv,
    dict: &Dictionary,
    human: Option<&KinematicModel>,
) -> Option<KinematicModel> {
    let description = loader.parse(&o.description, "description", parse_description);
    let setup = loader.parse(&o.setup, "setup", parse_object_setup);
    let policies = o
        .mass_properties
        .as_ref()
        .map(|p| loader.parse(p, "mass properties", parse_mass_properties));
    let (Some((description, description_text)), Some((setup, setup_text))) = (description, setup) else {
        return None;
    };
    let (policies, policies_text) = match policies {
        Some(None) => return None,
        Some(Some((p, t))) => (p, Some(t)),
        None => (Default::default(), None),
    };

    let mut meshes = BTreeMap::new();
    let mut mesh_texts = Vec::new();
    for seg in &setup.segments {
        if let Some(MeshSpec::File { path, .. }) = &seg.mesh {
            if meshes.contains_key(path) {
                continue;
            }
            let text = loader.text(path, "mesh")?;
            match load_mesh(&text) {
                Ok(mesh) => {
                    meshes.insert(path.clone(), mesh);
                    mesh_texts.push((path.clone(), text));
                }
                Err(e) => {
                    loader.report.push(Diagnostic::from(e).in_file(path));
                    return None;
                }
            }
        }
    }

    let name = format!("object{}", o.index);
    let built = build_object_model(&name, &description, dict, &setup, &policies, &meshes, human)
        .map_err(|r| r.in_file(&o.setup));
    let mut model = loader.take(built)?;
    record(&mut model, "description", &description_text);
    record(&mut model, "setup", &setup_text);
    if let Some(text) = policies_text {
        record(&mut model, "mass", &text);
    }
    for (path, text) in &mesh_texts {
        record(&mut model, &format!("mesh {path}"), text);
    }
    for (present, f) in [
        (o.anthropometry.is_some(), Functionality::Anthropometry),
        (o.scaling_algorithm.is_some(), Functionality::ScalingAlgorithms),
        (o.custom_lengths.is_some(), Functionality::CustomScaling),
    ] {
        if present {
            model.features.insert(f);
        }
    }
    if let Some(g) = env.gravity {
        model.gravity = g;
    }
    Some(model)
}

/// Sends each custom marker record to the first model (human, then objects)
/// that has the named segment.
fn apply_custom_markers(loader: &mut Loader<'_>, path: &str, models: &mut [&mut KinematicModel]) {
    let Some((spec, text)) = loader.parse(path, "markers", parse_marker_file) else {
        return;
    };
    let mut split: Vec<MarkerSpec> = vec![MarkerSpec::default(); models.len()];
    for entry in spec.entries {
        match models.iter().position(|m| m.segment(&entry.segment).is_some()) {
            Some(i) => split[i].entries.push(entry),
            None => loader.report.push(
                Diagnostic::error(
                    Code::UnknownSegment,
                    format!("marker segment {:?} is not part of any model", entry.segment),
                )
                .at(path, entry.line),
            ),
        }
    }
    for (model, spec) in models.iter_mut().zip(split) {
        if spec.entries.is_empty() {
            continue;
        }
        match place_markers((**model).clone(), &spec) {
            Ok(mut placed) => {
                placed.features.insert(Functionality::CustomMarkers);
                placed.provenance.record("markers", text.as_bytes());
                **model = placed;
            }
            Err(r) => loader.report.extend(r.in_file(path)),
        }
    }
}

/// Runs the whole build for an environment. Paths inside `env_text` are
/// resolved through `sources`.
pub fn build_environment(
    env_text: &str,
    env_file: &str,
    sources: &dyn Sources,
) -> Result<Parsed<Built>, Report> {
    let parsed = parse_environment(env_text, env_file)?;
    let env = parsed.value;
    let mut loader = Loader {
        sources,
        report: Report::new(),
        warnings: parsed.warnings,
    };
    let (dict, dict_texts) = load_dictionary(&mut loader, &env);

    let human = match &env.human {
        Some(h) => {
            let model = build_human(&mut loader, &env, h, &dict);
            if model.is_none() {
                return Err(loader.report);
            }
            model
        }
        None => None,
    };

    let mut objects = Vec::new();
    for o in &env.objects {
        if let Some(m) = build_object(&mut loader, &env, o, &dict, human.as_ref()) {
            objects.push((o.index, m));
        }
    }
    if loader.report.has_errors() {
        return Err(loader.report);
    }

    let mut human = human;
    for m in human.iter_mut().chain(objects.iter_mut().map(|(_, m)| m)) {
        for (role, text) in &dict_texts {
            record(m, role, text);
        }
    }
    if let Some(path) = env.custom_markers.clone() {
        let mut models: Vec<&mut KinematicModel> = human
            .iter_mut()
            .chain(objects.iter_mut().map(|(_, m)| m))
            .collect();
        apply_custom_markers(&mut loader, &path, &mut models);
    }

    for m in human.iter().chain(objects.iter().map(|(_, m)| m)) {
        for d in validate_model(m) {
            let d = if d.code == Code::CapabilityViolation {
                d.in_file(env_file)
            } else {
                d
            };
            if d.is_error() {
                loader.report.push(d);
            } else {
                loader.warnings.push(d);
            }
        }
    }
    if loader.report.has_errors() {
        return Err(loader.report);
    }
    Ok(Parsed::with_warnings(Built { env, human, objects }, loader.warnings))
}

/// Reads the environment file and resolves inputs next to it.
pub fn load_environment(env_path: &Path) -> Result<Parsed<Built>, Report> {
    let name = env_path.display().to_string();
    let text = fs::read_to_string(env_path).map_err(|e| {
        Report::from(Diagnostic::error(Code::Io, format!("cannot read environment: {e}")).in_file(&name))
    })?;
    let base = env_path.parent().map(Path::to_path_buf).unwrap_or_default();
    build_environment(&text, &name, &FsSources { base })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Lua,
    Json,
    /// Lua, JSON and the preview scene.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    /// Relative to the environment directory unless absolute.
    pub path: PathBuf,
    pub contents: String,
}

fn target(env: &Environment, save: &str, ext: &str) -> PathBuf {
    Path::new(&env.output_folder).join(save).with_extension(ext)
}

/// Renders every output the environment asks for. A model without a save
/// keyword is written as `human.lua` or `object<k>.lua`.
pub fn render_outputs(built: &Built, format: OutputFormat) -> Result<Parsed<Vec<Output>>, Report> {
    let env = &built.env;
    let mut outputs = Vec::new();
    let mut warnings = Vec::new();
    let mut report = Report::new();
    let lua = matches!(format, OutputFormat::Lua | OutputFormat::All);
    let json = matches!(format, OutputFormat::Json | OutputFormat::All);
    let scene = format == OutputFormat::All;

    let mut emit = |result: Result<Parsed<String>, Report>, path: PathBuf, outputs: &mut Vec<Output>| match result {
        Ok(p) => {
            warnings.extend(p.warnings);
            outputs.push(Output { path, contents: p.value });
        }
        Err(r) => report.extend(r),
    };

    let mut individual: Vec<(&KinematicModel, String)> = Vec::new();
    if let (Some(h), Some(henv)) = (&built.human, &env.human) {
        individual.push((h, henv.save.clone().unwrap_or_else(|| "human.lua".into())));
    }
    for (k, m) in &built.objects {
        let save = env
            .objects
            .iter()
            .find(|o| o.index == *k)
            .and_then(|o| o.save.clone())
            .unwrap_or_else(|| format!("object{k}.lua"));
        individual.push((m, save));
    }
    for (model, save) in &individual {
        if lua {
            emit(write_lua_model(model), target(env, save, "lua"), &mut outputs);
        }
        if json {
            emit(write_json(model), target(env, save, "json"), &mut outputs);
        }
        if scene {
            emit(
                write_preview_scene(model).map(Parsed::new),
                target(env, save, "obj"),
                &mut outputs,
            );
        }
    }
    if let Some(save) = &env.combined_save {
        let objects: Vec<&KinematicModel> = built.objects.iter().map(|(_, m)| m).collect();
        if lua {
            emit(write_combined(built.human.as_ref(), &objects), target(env, save, "lua"), &mut outputs);
        }
        if json {
            emit(
                write_combined_json(built.human.as_ref(), &objects),
                target(env, save, "json"),
                &mut outputs,
            );
        }
    }
    drop(emit);
    if report.has_errors() {
        return Err(report);
    }
    let mut unique: Vec<Diagnostic> = Vec::new();
    for w in warnings {
        if !unique.contains(&w) {
            unique.push(w);
        }
    }
    Ok(Parsed::with_warnings(outputs, unique))
}

/// Writes outputs below `base`, refusing to replace existing files unless
/// `force` is set. Nothing is written if any target exists.
pub fn write_outputs(base: &Path, outputs: &[Output], force: bool) -> Result<Vec<PathBuf>, Report> {
    let paths: Vec<PathBuf> = outputs.iter().map(|o| base.join(&o.path)).collect();
    if !force {
        let mut existing = Report::new();
        for p in paths.iter().filter(|p| p.exists()) {
            existing.push(
                Diagnostic::error(Code::OutputExists, "output exists; use --force to overwrite")
                    .in_file(&p.display().to_string()),
            );
        }
        if !existing.is_empty() {
            return Err(existing);
        }
    }
    for (path, output) in paths.iter().zip(outputs) {
        let io_err = |e: io::Error| {
            Report::from(Diagnostic::error(Code::Io, e.to_string()).in_file(&path.display().to_string()))
        };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        fs::write(path, &output.contents).map_err(io_err)?;
    }
    Ok(paths)
}
