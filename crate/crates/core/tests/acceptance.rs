//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use nalgebra::{Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use common::lua::{parse_chunk, Lua};
use common::{read, sample, samples_dir, Overlay};
use modelforge::anthro::{
    apply_custom_lengths, AlgorithmId, Coefficients, Gender, ScalingTable, SegmentDefaults,
};
use modelforge::dictionary::{builtin_dictionary, parse_joint_code, AXIS_TOKENS};
use modelforge::export::{combined_document, write_lua_model};
use modelforge::formats::anthropometry::{parse_anthropometry, serialize_anthropometry};
use modelforge::formats::description::{parse_description, serialize_description};
use modelforge::formats::dictionary::{parse_dictionary, serialize_dictionary};
use modelforge::formats::environment::{parse_environment, serialize_environment};
use modelforge::formats::lengths::{parse_segment_lengths, serialize_segment_lengths};
use modelforge::formats::markers::{parse_marker_file, serialize_marker_file};
use modelforge::formats::mass::{parse_mass_properties, serialize_mass_properties};
use modelforge::formats::scaling::{parse_scaling_table, serialize_scaling_table};
use modelforge::formats::setup::{parse_object_setup, serialize_object_setup};
use modelforge::kinematics::{Functionality, KinematicModel};
use modelforge::mesh::{cuboid, cylinder, icosphere, volume_properties, MeshError, TriMesh};
use modelforge::pipeline::{build_environment, load_environment, render_outputs, write_outputs, OutputFormat};
use modelforge::{Code, Report};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// 1. Joint algebra

fn joint_algebra() -> Outcome {
    let j = parse_joint_code("TXTZRY").map_err(|e| e.to_string())?;
    ensure!(
        j.rows == vec![[0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1], [0, 1, 0, 0, 0, 0]],
        "TXTZRY rows {:?}",
        j.rows
    );
    for (i, axis) in AXIS_TOKENS.iter().enumerate() {
        let j = parse_joint_code(axis).map_err(|e| e.to_string())?;
        let mut one_hot = [0u8; 6];
        one_hot[i] = 1;
        ensure!(j.rows == vec![one_hot], "{axis} rows {:?}", j.rows);
    }
    let dict = builtin_dictionary();
    for (name, j) in &dict.joints {
        let again = parse_joint_code(&j.serialize_code()).map_err(|e| e.to_string())?;
        ensure!(again.rows == j.rows, "{name} does not round trip");
    }
    let back = parse_dictionary(&serialize_dictionary(&dict), "builtin").map_err(|r| r.to_string())?;
    ensure!(back.value == dict, "built-in dictionary does not round trip");
    Ok(())
}

// 2. Dictionary fidelity

fn dictionary_fidelity() -> Outcome {
    use modelforge::dictionary::PointCoord;
    let dict = builtin_dictionary();
    let hand = dict.point_sets.get("Points_Hand_R_3D").ok_or("Points_Hand_R_3D missing")?;
    let expected = [
        ("ProximalMetacarpal_Medial_R", [-0.2, 0.15, -0.2]),
        ("ProximalMetacarpal_Lateral_R", [0.2, 0.15, -0.2]),
        ("DistalMetacarpal_Medial_R", [-0.2, 0.15, -0.6]),
        ("DistalMetacarpal_Lateral_R", [0.2, 0.15, -0.6]),
    ];
    ensure!(hand.entries.len() == 4, "hand set has {} points", hand.entries.len());
    for ((name, xyz), p) in expected.iter().zip(&hand.entries) {
        ensure!(p.name == *name, "point {} where {name} expected", p.name);
        match &p.coord {
            PointCoord::Scaled(v) => ensure!(*v == Vector3::from(*xyz), "{name} at {v:?}"),
            other => return Err(format!("{name} is {other:?}")),
        }
    }

    let set = dict
        .constraint_sets
        .get("ConstraintSet_Foot_Sagittal")
        .ok_or("ConstraintSet_Foot_Sagittal missing")?;
    let x = Vector3::x();
    let z = Vector3::z();
    let expected = [
        ("FootFlat_Sagittal", vec![("Heel_Sagittal", x), ("Heel_Sagittal", z), ("Toe_Sagittal", z)]),
        ("HeelFixed_Sagittal", vec![("Heel_Sagittal", x), ("Heel_Sagittal", z)]),
        ("ToeFixed_Sagittal", vec![("Toe_Sagittal", x), ("Toe_Sagittal", z)]),
    ];
    ensure!(set.subsets.len() == 3, "{} subsets", set.subsets.len());
    for ((name, rows), subset) in expected.iter().zip(&set.subsets) {
        ensure!(subset.name == *name, "subset {} where {name} expected", subset.name);
        let got: Vec<(&str, Vector3<f64>)> =
            subset.rows.iter().map(|r| (r.point.as_str(), r.normal)).collect();
        ensure!(&got == rows, "{name} rows {got:?}");
    }
    Ok(())
}

// 3. Custom scaling oracle

fn defaults(masses: &[f64], lengths: &[f64]) -> Vec<SegmentDefaults> {
    masses
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(i, (&m, &l))| SegmentDefaults {
            segment: format!("S{i}"),
            segment_type: "Thigh".into(),
            length: l,
            mass: m,
            com: Vector3::new(0.0, 0.0, -0.4 * l),
            inertia: Matrix3::zeros(),
            com_fraction: 0.4,
            rgyr: [0.3, 0.3, 0.1],
        })
        .collect()
}

/// Direct evaluation of the redistribution rule, written independently of
/// the library.
fn oracle(masses: &[f64], lengths: &[f64], custom: &[f64], total: f64) -> Vec<f64> {
    let unadjusted: f64 = (0..masses.len()).map(|i| masses[i] * custom[i] / lengths[i]).sum();
    (0..masses.len())
        .map(|i| masses[i] * (custom[i] / lengths[i]) * (total / unadjusted))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn custom_scaling() -> Outcome {
    let d = defaults(&[10.0, 20.0], &[1.0, 1.0]);
    let custom: BTreeMap<String, f64> = [("S0".to_owned(), 2.0)].into();
    let out = apply_custom_lengths(&d, &custom, 30.0).map_err(|e| e.to_string())?;
    let got: Vec<f64> = out.iter().map(|s| s.mass).collect();
    ensure!(got == vec![15.0, 15.0], "two-segment case gives {got:?}");
    ensure!(
        oracle(&[10.0, 20.0], &[1.0, 1.0], &[2.0, 1.0], 30.0) == vec![15.0, 15.0],
        "oracle disagrees"
    );

    let instance = (1usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1f64..60.0, n),
            prop::collection::vec(0.05f64..1.2, n),
            prop::collection::vec(prop::option::of(0.05f64..1.2), n),
            1.0f64..150.0,
            0.1f64..10.0,
        )
    });
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&instance, |(masses, lengths, custom, total, k)| {
            let d = defaults(&masses, &lengths);
            let map: BTreeMap<String, f64> = custom
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.map(|c| (format!("S{i}"), c)))
                .collect();
            let lcustom: Vec<f64> = (0..masses.len()).map(|i| custom[i].unwrap_or(lengths[i])).collect();
            let out = apply_custom_lengths(&d, &map, total).unwrap();
            let sum: f64 = out.iter().map(|s| s.mass).sum();
            prop_assert!(rel(sum, total) <= 1e-12, "sum {} vs {}", sum, total);
            for (s, o) in out.iter().zip(oracle(&masses, &lengths, &lcustom, total)) {
                prop_assert!(rel(s.mass, o) <= 1e-12, "{} vs oracle {}", s.mass, o);
            }

            let heavy = defaults(&masses.iter().map(|m| m * k).collect::<Vec<_>>(), &lengths);
            let scaled = apply_custom_lengths(&heavy, &map, total * k).unwrap();
            for (a, b) in scaled.iter().zip(&out) {
                prop_assert!(rel(a.mass, b.mass * k) <= 1e-12, "mass scaling {} vs {}", a.mass, b.mass * k);
            }
            let long = defaults(&masses, &lengths.iter().map(|l| l * k).collect::<Vec<_>>());
            let long_map: BTreeMap<String, f64> = map.iter().map(|(n, l)| (n.clone(), l * k)).collect();
            let stretched = apply_custom_lengths(&long, &long_map, total).unwrap();
            for (a, b) in stretched.iter().zip(&out) {
                prop_assert!(rel(a.mass, b.mass) <= 1e-12, "length scaling {} vs {}", a.mass, b.mass);
                prop_assert!(rel(a.length, b.length * k) <= 1e-12);
            }

            let natural: f64 = masses.iter().sum();
            let same = apply_custom_lengths(&d, &BTreeMap::new(), natural).unwrap();
            prop_assert_eq!(&same, &d);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(())
}

// 4. Scaling-table sanity

fn is_midline(segment_type: &str) -> bool {
    matches!(segment_type, "Head" | "Trunk" | "UpperTrunk" | "MidTrunk" | "Pelvis")
}

fn scaling_tables() -> Outcome {
    for id in [AlgorithmId::DeLeva3SegTorso, AlgorithmId::DeLevaFusedTorso, AlgorithmId::DeLevaSagittal] {
        let table = ScalingTable::builtin(id).ok_or("missing built-in table")?;
        for g in [Gender::Male, Gender::Female] {
            let sum: f64 = table
                .rows
                .iter()
                .filter(|r| r.gender == Some(g))
                .map(|r| {
                    let Coefficients::Regression { mass_fraction, .. } = r.coefficients else {
                        return f64::NAN;
                    };
                    let sides = if id == AlgorithmId::DeLevaSagittal || is_midline(&r.segment_type) { 1.0 } else { 2.0 };
                    mass_fraction * sides
                })
                .sum();
            ensure!((sum - 1.0).abs() <= 0.005, "{id} {g:?} mass fractions sum to {sum}");
        }
    }

    for dir in ["sagittal_exo", "human_3d"] {
        let env = sample(dir).join("environment.env");
        let mut text = read(&env);
        text = text
            .lines()
            .filter(|l| !l.starts_with("humanModel_CustomSegmentLengths"))
            .collect::<Vec<_>>()
            .join("\n");
        let overlay = Overlay::new(sample(dir), &[]);
        let plain = build_environment(&text, "environment.env", &overlay).map_err(|r| r.to_string())?;
        let h = plain.value.human.ok_or("no human")?;
        let weight = profile_weight(dir)?;
        ensure!(
            rel(h.total_mass(), weight) <= 0.005,
            "{dir}: total mass {} vs weight {weight}",
            h.total_mass()
        );
        let custom = load_environment(&env).map_err(|r| r.to_string())?.value;
        let h = custom.human.ok_or("no human")?;
        ensure!(
            rel(h.total_mass(), weight) <= 1e-12,
            "{dir}: custom-scaled mass {} vs weight {weight}",
            h.total_mass()
        );
    }
    Ok(())
}

fn profile_weight(dir: &str) -> Result<f64, String> {
    let text = read(&sample(dir).join("subject.anthro"));
    let p = parse_anthropometry(&text, "subject.anthro").map_err(|r| r.to_string())?;
    p.value.weight.ok_or_else(|| "no weight".into())
}

// 5. Mesh inertia oracle

fn second_moment(inertia: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::identity() * (inertia.trace() / 2.0) - inertia
}

fn transformed(mesh: &TriMesh, a: &Matrix3<f64>, t: &Vector3<f64>) -> TriMesh {
    TriMesh {
        vertices: mesh.vertices.iter().map(|v| a * v + t).collect(),
        triangles: mesh.triangles.clone(),
    }
}

fn mesh_oracle() -> Outcome {
    let unit = cuboid(1.0, 1.0, 1.0).translated(&Vector3::repeat(0.5));
    let p = volume_properties(&unit).map_err(|e| e.to_string())?;
    ensure!((p.volume - 1.0).abs() <= 1e-9, "cube volume {}", p.volume);
    ensure!((p.centroid - Vector3::repeat(0.5)).amax() <= 1e-9, "cube centroid {:?}", p.centroid);
    ensure!(
        (p.inertia - Matrix3::identity() / 6.0).amax() <= 1e-9,
        "cube inertia {:?}",
        p.inertia
    );

    let sphere = volume_properties(&icosphere(1.0, 4)).map_err(|e| e.to_string())?;
    let exact = 4.0 * std::f64::consts::PI / 3.0;
    ensure!(rel(sphere.volume, exact) <= 0.01, "icosphere volume {}", sphere.volume);

    match volume_properties(&unit.reversed()) {
        Err(MeshError::Inverted(_)) => {}
        other => return Err(format!("reversed cube gives {other:?}")),
    }

    let bases = [
        cuboid(0.4, 0.3, 0.2).translated(&Vector3::new(0.3, -0.2, 0.1)),
        cylinder(0.1, 0.5, 16).translated(&Vector3::new(0.0, 0.05, -0.2)),
        icosphere(0.2, 2),
    ];
    let transform = (
        0usize..3,
        prop::array::uniform3(0.2f64..3.0),
        prop::array::uniform3(-3.0f64..3.0),
        prop::array::uniform3(-5.0f64..5.0),
    );
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    runner
        .run(&transform, |(which, s, angles, t)| {
            let base = &bases[which];
            let before = volume_properties(base).unwrap();
            let r = Rotation3::from_euler_angles(angles[0], angles[1], angles[2]).into_inner();
            let a = r * Matrix3::from_diagonal(&Vector3::from(s));
            let t = Vector3::from(t);
            let after = volume_properties(&transformed(base, &a, &t)).unwrap();
            let det = s[0] * s[1] * s[2];
            prop_assert!(rel(after.volume, before.volume * det) <= 1e-9);
            let c = a * before.centroid + t;
            prop_assert!((after.centroid - c).amax() <= 1e-9 * (1.0 + c.amax()));
            let moment = a * second_moment(&before.inertia) * a.transpose() * det;
            let expected = Matrix3::identity() * moment.trace() - moment;
            prop_assert!(
                (after.inertia - expected).amax() <= 1e-9 * (1.0 + expected.amax()),
                "inertia {:?} vs {:?}",
                after.inertia,
                expected
            );
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(())
}

// 6. Grammar coverage

type Check = fn(&str, &str) -> Result<(), Report>;

fn format_of(path: &Path) -> Option<(&'static str, Check)> {
    fn rt<T>(
        parse: impl Fn(&str, &str) -> Result<modelforge::Parsed<T>, Report>,
        ser: impl Fn(&T) -> String,
        text: &str,
        file: &str,
    ) -> Result<(), Report> {
        // Parsed values carry source lines, so compare serialized forms.
        let once = ser(&parse(text, file)?.value);
        let twice = ser(&parse(&once, file)?.value);
        if once != twice {
            return Err(Report::from(modelforge::Diagnostic::error(
                Code::InvalidValue,
                format!("{file} does not round trip"),
            )));
        }
        Ok(())
    }
    let name = path.file_name()?.to_str()?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    Some(match (ext, name) {
        ("env", _) => ("environment", |t, f| rt(parse_environment, serialize_environment, t, f)),
        ("anthro", _) => ("anthropometry", |t, f| rt(parse_anthropometry, serialize_anthropometry, t, f)),
        ("desc", _) => ("description", |t, f| rt(parse_description, serialize_description, t, f)),
        ("markers", _) => ("markers", |t, f| rt(parse_marker_file, serialize_marker_file, t, f)),
        ("mass", _) => ("mass properties", |t, f| rt(parse_mass_properties, serialize_mass_properties, t, f)),
        ("setup", _) => ("setup", |t, f| rt(parse_object_setup, serialize_object_setup, t, f)),
        ("dict", _) => ("dictionary", |t, f| rt(parse_dictionary, serialize_dictionary, t, f)),
        ("csv", _) => ("scaling table", |t, f| {
            rt(|t, f| parse_scaling_table(t, f, AlgorithmId::Custom), serialize_scaling_table, t, f)
        }),
        ("txt", n) if n.starts_with("lengths") => {
            ("segment lengths", |t, f| rt(parse_segment_lengths, serialize_segment_lengths, t, f))
        }
        _ => return None,
    })
}

fn sample_files() -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    let scaling = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/scaling");
    let markers = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/markers");
    let dictionary = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/builtin.dict");
    for dir in std::fs::read_dir(samples_dir()).unwrap().chain(std::fs::read_dir(&scaling).unwrap()) {
        let p = dir.unwrap().path();
        if p.is_dir() {
            files.extend(std::fs::read_dir(&p).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()));
        } else {
            files.push(p);
        }
    }
    files.extend(std::fs::read_dir(markers).unwrap().map(|e| e.unwrap().path()));
    files.push(dictionary);
    files.sort();
    files
}

fn is_comment(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('%') || t.starts_with('#') || t.starts_with('[')
}

/// Every numeric field of every line, replaced in turn by a malformed
/// number. Environment and description files have few numeric fields, so
/// they also get a duplicated keyword and a truncated line.
fn faults(format: &str, text: &str) -> Vec<(String, usize)> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if is_comment(line) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        for (j, f) in fields.iter().enumerate() {
            if j == 0 || f.trim().parse::<f64>().is_err() {
                continue;
            }
            let mut broken = fields.clone();
            broken[j] = " 1.2.3";
            let mut all = lines.clone();
            let joined = broken.join(",");
            all[i] = &joined;
            out.push((all.join("\n"), i + 1));
        }
        match format {
            "environment" => {
                let mut all = lines.clone();
                all.insert(i + 1, line);
                out.push((all.join("\n"), i + 2));
            }
            "description" => {
                let mut all = lines.clone();
                let cut = fields[..3].join(",");
                all[i] = &cut;
                out.push((all.join("\n"), i + 1));
            }
            _ => {}
        }
    }
    out
}

fn grammar_coverage() -> Outcome {
    let mut formats = std::collections::BTreeSet::new();
    let mut injected = 0;
    for path in sample_files() {
        let Some((format, check)) = format_of(&path) else { continue };
        let text = read(&path);
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        check(&text, &file).map_err(|r| format!("{}: {r}", path.display()))?;
        formats.insert(format);
        if format == "scaling table" && !file.starts_with("deleva_sagittal") {
            continue;
        }
        for (broken, line) in faults(format, &text) {
            injected += 1;
            match check(&broken, &file) {
                Ok(()) => return Err(format!("{file}: fault at line {line} not detected")),
                Err(r) => {
                    for d in r.errors() {
                        ensure!(
                            d.line == Some(line) && d.file.as_deref() == Some(file.as_str()),
                            "{file}: fault at line {line} reported as {d}"
                        );
                    }
                }
            }
        }
    }
    for f in [
        "environment",
        "anthropometry",
        "description",
        "segment lengths",
        "markers",
        "mass properties",
        "setup",
        "scaling table",
        "dictionary",
    ] {
        ensure!(formats.contains(f), "no sample covers the {f} format");
    }
    ensure!(injected > 100, "only {injected} faults injected");
    Ok(())
}

// 7. Export determinism and validity

fn create_into(env: &Path, out: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let built = load_environment(env).map_err(|r| r.to_string())?;
    let outputs = render_outputs(&built.value, OutputFormat::All).map_err(|r| r.to_string())?;
    let paths = write_outputs(out, &outputs.value, false).map_err(|r| r.to_string())?;
    Ok(paths
        .iter()
        .map(|p| (p.strip_prefix(out).unwrap().display().to_string(), std::fs::read(p).unwrap()))
        .collect())
}

fn hand_counted_dof(description: &str) -> usize {
    description
        .lines()
        .filter(|l| !is_comment(l))
        .map(|l| {
            let joint = l.split(',').nth(2).unwrap().trim();
            let code = joint.rsplit('_').next().unwrap();
            code.len() / 2
        })
        .sum()
}

fn check_lua_against(model: &KinematicModel, lua: &Lua, dof: usize) -> Outcome {
    let frames = lua.get("frames").ok_or("no frames")?.items();
    ensure!(frames.len() == model.segments.len(), "{} frames", frames.len());
    let total: usize = frames.iter().map(|f| f.get("joint").map_or(0, |j| j.items().len())).sum();
    ensure!(total == dof && total == model.dof(), "DoF {total} vs hand count {dof}");
    for (f, s) in frames.iter().zip(&model.segments) {
        let mass = f.get("body").and_then(|b| b.get("mass")).and_then(Lua::num);
        ensure!(mass == Some(s.mass), "{}: mass {mass:?} vs {}", s.name, s.mass);
        let inertia: Vec<f64> = f
            .get("body")
            .and_then(|b| b.get("inertia"))
            .map(|i| i.items().iter().flat_map(Lua::numbers).collect())
            .unwrap_or_default();
        let expected: Vec<f64> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| s.inertia[(r, c)]).collect();
        ensure!(inertia == expected, "{}: inertia differs", s.name);
    }
    let sets = lua.get("constraint_sets").and_then(Lua::fields).ok_or("no constraint_sets")?;
    let mut contact_rows = 0;
    for s in &model.segments {
        for c in &s.constraints {
            let rows = sets.get(&c.subset).ok_or(format!("subset {} missing", c.subset))?.items();
            let found = rows.iter().any(|r| {
                r.get("body").and_then(Lua::str) == Some(s.name.as_str())
                    && r.get("name").and_then(Lua::str) == Some(c.point.as_str())
                    && r.get("normal").map(Lua::numbers) == Some(vec![c.normal.x, c.normal.y, c.normal.z])
                    && r.get("point").map(Lua::numbers) == Some(vec![c.position.x, c.position.y, c.position.z])
            });
            ensure!(found, "constraint row {}/{} missing", c.subset, c.point);
            contact_rows += 1;
        }
    }
    let exported: usize = sets
        .values()
        .flat_map(Lua::items)
        .filter(|r| r.get("constraint_type").and_then(Lua::str) == Some("contact"))
        .count();
    ensure!(exported == contact_rows, "{exported} contact rows exported, {contact_rows} in model");
    Ok(())
}

fn export_determinism() -> Outcome {
    for dir in ["sagittal_exo", "human_3d"] {
        let env = sample(dir).join("environment.env");
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let first = create_into(&env, a.path())?;
        let second = create_into(&env, b.path())?;
        ensure!(first == second, "{dir}: outputs differ between runs");
        for ext in ["lua", "json", "obj"] {
            ensure!(first.keys().any(|k| k.ends_with(ext)), "{dir}: no .{ext} output");
        }

        let built = load_environment(&env).map_err(|r| r.to_string())?.value;
        let human = built.human.as_ref().ok_or("no human")?;
        let lua_key = first
            .keys()
            .find(|k| k.ends_with(".lua") && Path::new(k).file_name().unwrap().to_string_lossy().starts_with("human"))
            .ok_or("no human Lua")?;
        let lua = parse_chunk(std::str::from_utf8(&first[lua_key]).unwrap())?;
        let dof = hand_counted_dof(&read(&sample(dir).join("human.desc")));
        check_lua_against(human, &lua, dof).map_err(|e| format!("{dir}: {e}"))?;
        let json: serde_json::Value =
            serde_json::from_slice(&first[&lua_key.replace(".lua", ".json")]).map_err(|e| e.to_string())?;
        ensure!(
            json["frames"].as_array().map(Vec::len) == Some(human.segments.len()),
            "{dir}: JSON frame count"
        );
    }

    let env = sample("sagittal_exo").join("environment.env");
    let built = load_environment(&env).map_err(|r| r.to_string())?.value;
    let human = built.human.as_ref().ok_or("no human")?;
    let objects: Vec<&KinematicModel> = built.objects.iter().map(|(_, m)| m).collect();
    ensure!(objects.len() == 2, "{} objects", objects.len());
    let combined = combined_document(Some(human), &objects).map_err(|r| r.to_string())?;
    let names: Vec<&str> = combined.value.frames.iter().map(|f| f.name.as_str()).collect();
    let total: usize = built.models().map(|m| m.segments.len()).sum();
    ensure!(names.len() == total, "{} combined frames of {total}", names.len());
    ensure!(names.contains(&"Object2_Segment_Pelvis"), "colliding exo frame not renamed: {names:?}");
    ensure!(
        combined.warnings.iter().any(|w| w.code == Code::RenamedFrame),
        "no rename warning"
    );
    let exo_child = combined.value.frames.iter().find(|f| f.name == "Exo_Thigh").ok_or("Exo_Thigh missing")?;
    ensure!(exo_child.parent == "Object2_Segment_Pelvis", "Exo_Thigh parent {}", exo_child.parent);
    let loops = combined.value.constraint_sets.get("Loop_Exo_Thigh").ok_or("loop set missing")?;
    ensure!(loops.len() == 2, "{} loop rows", loops.len());
    let text = modelforge::export::write_combined(Some(human), &objects).map_err(|r| r.to_string())?;
    let lua = parse_chunk(&text.value)?;
    ensure!(lua.get("frames").map(|f| f.items().len()) == Some(total), "combined Lua frame count");
    ensure!(
        write_lua_model(human).map_err(|r| r.to_string())?.value
            == modelforge::export::write_combined(Some(human), &[]).map_err(|r| r.to_string())?.value,
        "zero-object combined export differs from the individual one"
    );
    Ok(())
}

// 8. Capability matrix

fn capability_matrix() -> Outcome {
    let dir = sample("sagittal_exo");
    let base = read(&dir.join("environment.env"));
    let user_mass = "Segment_Pelvis, UseUserValues, 10, 0, 0, 0.1, 0.1, 0, 0, 0, 0.1, 0, 0, 0, 0.1\n";
    let density_mass = "Segment_Pelvis, UseMeanDensity, 1000\n";
    let cases = [
        ("humanModel_Setup, box.setup", Functionality::CustomSetups),
        ("humanModel_MassProperties, density.mass", Functionality::SegmentMassFromMesh),
        ("humanModel_MassProperties, user.mass", Functionality::SegmentMassFromUser),
        ("objectModel_Anthropometry_1, subject.anthro", Functionality::Anthropometry),
        ("objectModel_ScalingAlgorithm_1, deleva_sagittal", Functionality::ScalingAlgorithms),
        ("objectModel_CustomSegmentLengths_1, lengths.txt", Functionality::CustomScaling),
    ];
    let overlay = Overlay::new(
        dir.clone(),
        &[("user.mass", user_mass), ("density.mass", density_mass), ("lengths.txt", "0.4, Segment_Box\n")],
    );
    build_environment(&base, "environment.env", &overlay).map_err(|r| format!("baseline fails: {r}"))?;
    for (line, f) in cases {
        let env = format!("{base}\n{line}\n");
        let err = match build_environment(&env, "environment.env", &overlay) {
            Ok(_) => return Err(format!("{line}: accepted")),
            Err(r) => r,
        };
        let violations: Vec<_> = err.iter().filter(|d| d.code == Code::CapabilityViolation).collect();
        ensure!(violations.len() == 1, "{line}: {} violations ({err})", violations.len());
        let d = violations[0];
        ensure!(
            d.location.as_deref() == Some(f.label()) && d.message.contains(f.label()),
            "{line}: diagnostic {d} does not name {}",
            f.label()
        );
    }
    Ok(())
}

// 9. End-to-end pipeline

fn end_to_end() -> Outcome {
    let env = sample("sagittal_exo").join("environment.env");
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let written = create_into(&env, out.path())?;
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 2.0, "pipeline took {elapsed:?}");
    ensure!(written.len() == 11, "{} files written", written.len());

    let built = load_environment(&env).map_err(|r| r.to_string())?.value;
    let human = built.human.as_ref().ok_or("no human")?;
    let exo = &built.objects.iter().find(|(k, _)| *k == 2).ok_or("no exoskeleton")?.1;
    for (exo_seg, human_seg) in [("Exo_Thigh", "Segment_Thigh"), ("Exo_Shank", "Segment_Shank")] {
        let a = exo.segment(exo_seg).ok_or(format!("{exo_seg} missing"))?.length;
        let b = human.segment(human_seg).ok_or(format!("{human_seg} missing"))?.length;
        ensure!(a.to_bits() == b.to_bits(), "{exo_seg} length {a} vs {human_seg} {b}");
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("joint algebra", joint_algebra),
        ("dictionary fidelity", dictionary_fidelity),
        ("custom scaling oracle", custom_scaling),
        ("scaling-table sanity", scaling_tables),
        ("mesh inertia oracle", mesh_oracle),
        ("grammar coverage", grammar_coverage),
        ("export determinism and validity", export_determinism),
        ("capability matrix", capability_matrix),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = started.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {} {name} ({ms} ms)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
