use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use modelforge::dictionary::JointDescriptor;
use modelforge::export::{model_document, ExportDocument, FrameDoc};
use modelforge::pipeline::{load_environment, render_outputs, write_outputs, Built, OutputFormat};
use modelforge::{Diagnostic, Report};

#[derive(Parser)]
#[command(name = "modelforge", version, about = "Build scaled human and object multibody models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build every model of an environment and write the requested files.
    Create {
        #[command(flatten)]
        env: EnvArg,
        /// Build and validate only; write nothing.
        #[arg(long)]
        dry_run: bool,
        /// Replace existing output files.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = Format::Lua)]
        format: Format,
        /// Print errors only.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Build and validate an environment and print its diagnostics.
    Validate {
        #[command(flatten)]
        env: EnvArg,
    },
    /// Print the tree, DoF table, masses or one segment of a model.
    #[command(group(ArgGroup::new("query").required(true).args(["tree", "dof", "masses", "segment"])))]
    Inspect {
        /// Environment file, or a JSON model written by `create`.
        path: PathBuf,
        #[arg(long)]
        tree: bool,
        #[arg(long)]
        dof: bool,
        #[arg(long)]
        masses: bool,
        #[arg(long, value_name = "NAME")]
        segment: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EnvArg {
    /// Environment file.
    #[arg(value_name = "ENV", required_unless_present = "env", conflicts_with = "env")]
    positional: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    env: Option<PathBuf>,
}

impl EnvArg {
    fn path(&self) -> &Path {
        self.env
            .as_deref()
            .or(self.positional.as_deref())
            .expect("clap enforces one of the two")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lua,
    Json,
    All,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Lua => OutputFormat::Lua,
            Format::Json => OutputFormat::Json,
            Format::All => OutputFormat::All,
        }
    }
}

fn print_diagnostics<'a>(diags: impl IntoIterator<Item = &'a Diagnostic>, quiet: bool) {
    for d in diags {
        if !quiet || d.is_error() {
            eprintln!("{d}");
        }
    }
}

fn fail(report: &Report) -> ExitCode {
    print_diagnostics(report, false);
    ExitCode::from(1)
}

fn summary(built: &Built) {
    for m in built.models() {
        println!(
            "{} ({}): {} segments, {} DoF, total mass {} kg, {} markers",
            m.name,
            m.kind,
            m.segments.len(),
            m.dof(),
            modelforge::formats::format_number(m.total_mass()),
            m.marker_count()
        );
    }
}

fn create(env: &Path, dry_run: bool, force: bool, format: Format, quiet: bool) -> ExitCode {
    let built = match load_environment(env) {
        Ok(b) => b,
        Err(r) => return fail(&r),
    };
    print_diagnostics(&built.warnings, quiet);
    let outputs = match render_outputs(&built.value, format.into()) {
        Ok(o) => o,
        Err(r) => return fail(&r),
    };
    print_diagnostics(&outputs.warnings, quiet);
    if !quiet {
        summary(&built.value);
    }
    if dry_run {
        if !quiet {
            for o in &outputs.value {
                println!("would write {}", o.path.display());
            }
        }
        return ExitCode::SUCCESS;
    }
    let base = env.parent().unwrap_or(Path::new(""));
    match write_outputs(base, &outputs.value, force) {
        Ok(paths) => {
            if !quiet {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(r) => fail(&r),
    }
}

fn validate(env: &Path) -> ExitCode {
    match load_environment(env) {
        Ok(built) => {
            print_diagnostics(&built.warnings, false);
            summary(&built.value);
            println!("valid");
            ExitCode::SUCCESS
        }
        Err(r) => fail(&r),
    }
}

fn documents(path: &Path) -> Result<Vec<(String, ExportDocument)>, String> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let doc: ExportDocument =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let name = path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned());
        return Ok(vec![(name, doc)]);
    }
    let built = load_environment(path).map_err(|r| r.to_string())?;
    built
        .value
        .models()
        .map(|m| {
            model_document(m)
                .map(|d| (m.name.clone(), d.value))
                .map_err(|r| r.to_string())
        })
        .collect()
}

fn joint_code(frame: &FrameDoc) -> String {
    let code = JointDescriptor {
        code: String::new(),
        rows: frame.joint.clone(),
        custom_payload: None,
    }
    .serialize_code();
    if code.is_empty() {
        "fixed".into()
    } else {
        code
    }
}

fn print_tree(doc: &ExportDocument, parent: &str, depth: usize) {
    for f in doc.frames.iter().filter(|f| f.parent == parent) {
        println!("{}{} [{}]", "  ".repeat(depth + 1), f.name, joint_code(f));
        print_tree(doc, &f.name, depth + 1);
    }
}

fn json_line(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("plain data"));
}

enum Query<'a> {
    Tree,
    Dof,
    Masses,
    Segment(&'a str),
}

fn inspect(path: &Path, query: Query<'_>, json: bool) -> ExitCode {
    let docs = match documents(path) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let fmt = modelforge::formats::format_number;
    match query {
        Query::Tree => {
            if json {
                json_line(serde_json::json!(docs
                    .iter()
                    .map(|(name, d)| serde_json::json!({
                        "model": name,
                        "frames": d.frames.iter().map(|f| serde_json::json!({
                            "name": f.name, "parent": f.parent, "joint": joint_code(f)
                        })).collect::<Vec<_>>()
                    }))
                    .collect::<Vec<_>>()));
            } else {
                for (name, d) in &docs {
                    println!("{name}");
                    print_tree(d, "ROOT", 0);
                }
            }
        }
        Query::Dof => {
            if json {
                json_line(serde_json::json!(docs
                    .iter()
                    .map(|(name, d)| serde_json::json!({
                        "model": name,
                        "segments": d.frames.iter().map(|f| serde_json::json!({
                            "name": f.name, "joint": joint_code(f), "dof": f.joint.len()
                        })).collect::<Vec<_>>(),
                        "total": d.frames.iter().map(|f| f.joint.len()).sum::<usize>()
                    }))
                    .collect::<Vec<_>>()));
            } else {
                for (name, d) in &docs {
                    println!("{name}");
                    for f in &d.frames {
                        println!("  {:<28} {:<14} {}", f.name, joint_code(f), f.joint.len());
                    }
                    println!("  total DoF {}", d.frames.iter().map(|f| f.joint.len()).sum::<usize>());
                }
            }
        }
        Query::Masses => {
            if json {
                json_line(serde_json::json!(docs
                    .iter()
                    .map(|(name, d)| serde_json::json!({
                        "model": name,
                        "segments": d.frames.iter().map(|f| serde_json::json!({
                            "name": f.name, "mass": f.body.mass
                        })).collect::<Vec<_>>(),
                        "total": d.frames.iter().map(|f| f.body.mass).sum::<f64>()
                    }))
                    .collect::<Vec<_>>()));
            } else {
                for (name, d) in &docs {
                    println!("{name}");
                    for f in &d.frames {
                        println!("  {:<28} {}", f.name, fmt(f.body.mass));
                    }
                    println!("  total mass {}", fmt(d.frames.iter().map(|f| f.body.mass).sum()));
                }
            }
        }
        Query::Segment(segment) => {
            let found = docs
                .iter()
                .find_map(|(_, d)| d.frames.iter().find(|f| f.name == segment));
            let Some(frame) = found else {
                eprintln!("no segment named {segment:?}");
                return ExitCode::from(1);
            };
            if json {
                json_line(serde_json::to_value(frame).expect("plain data"));
            } else {
                let v3 = |v: &[f64; 3]| format!("{} {} {}", fmt(v[0]), fmt(v[1]), fmt(v[2]));
                println!("name     {}", frame.name);
                println!("parent   {}", frame.parent);
                println!("joint    {} ({} DoF)", joint_code(frame), frame.joint.len());
                println!("r        {}", v3(&frame.joint_frame.r));
                println!("mass     {}", fmt(frame.body.mass));
                println!("com      {}", v3(&frame.body.com));
                for (i, row) in frame.body.inertia.iter().enumerate() {
                    println!("{}{}", if i == 0 { "inertia  " } else { "         " }, v3(row));
                }
                if let Some(markers) = &frame.markers {
                    for (name, p) in markers {
                        println!("marker   {name} {}", v3(p));
                    }
                }
            }
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Create {
            env,
            dry_run,
            force,
            format,
            quiet,
        } => create(env.path(), *dry_run, *force, *format, *quiet),
        Command::Validate { env } => validate(env.path()),
        Command::Inspect {
            path,
            tree,
            dof,
            masses,
            segment,
            json,
        } => {
            let query = match (tree, dof, masses, segment) {
                (true, ..) => Query::Tree,
                (_, true, ..) => Query::Dof,
                (_, _, true, _) => Query::Masses,
                (_, _, _, Some(s)) => Query::Segment(s),
                _ => unreachable!("clap requires one query"),
            };
            inspect(path, query, *json)
        }
    }
}
