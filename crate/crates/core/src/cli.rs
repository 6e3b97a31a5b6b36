//! Command-line front end. `run` parses arguments, executes one command and
//! returns the process exit status.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::export;
use crate::geom::Point;
use crate::jointcover::{build_joint_cover, JointCover};
use crate::planner::{plan, PlanOptions, PlanOutcome};
use crate::robot::{build_complex, RobotSpec};
use crate::scene::{Scene, SceneFile, SCHEMA_VERSION};
use crate::states::{h_signature, path_representation, refine_path};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_RESOLUTION: i32 = 4;
pub const EXIT_DIFFERENT: i32 = 10;
pub const EXIT_CERTIFICATE: i32 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "pathclass",
    version,
    about = "Free-space covers, path classes and class-aware planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cover of a scene and write it as JSON.
    Decompose {
        scene: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        obj: Option<PathBuf>,
        /// Also write the underlying triangulation.
        #[arg(long)]
        dump_triangulation: Option<PathBuf>,
    },
    /// Decide whether two sampled paths are in the same class.
    Classify {
        scene: PathBuf,
        /// Robot file, or `point`.
        robot: String,
        path_a: PathBuf,
        path_b: PathBuf,
        /// Subdivide steps that cross more than one boundary instead of failing.
        #[arg(long)]
        refine: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Plan from a start to a goal configuration.
    Plan {
        scene: PathBuf,
        /// Robot file, or `point`.
        robot: String,
        /// Key-point coordinates as inline JSON or a JSON file.
        start: String,
        goal: String,
        #[arg(long, default_value_t = 1)]
        alternatives: usize,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 12)]
        length_bound: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Cover after deleting one obstacle.
    RemoveObstacle {
        scene: PathBuf,
        id: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Render a scene's cover, optionally with paths.
    Export {
        scene: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        obj: Option<PathBuf>,
        /// Path files to overlay (key point traces).
        #[arg(long = "path")]
        paths: Vec<PathBuf>,
    },
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
        }
    };
    let seed = match std::env::var("PATHCLASS_SEED") {
        Ok(s) => match s.parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                eprintln!("error: PATHCLASS_SEED must be an unsigned integer, got {s:?}");
                return EXIT_MALFORMED;
            }
        },
        Err(_) => None,
    };
    match execute(cli.command, seed) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn header(seed: Option<u64>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if let Some(s) = seed {
        m.insert("seed".into(), json!(s));
    }
    m
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
            o.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

/// A scene file, or the output of `decompose` (whose embedded scene is
/// rebuilt and checked against the recorded fingerprint).
pub fn load_scene(path: &Path) -> Result<(Scene, JointCover)> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        Error::Input(format!(
            "{} line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    if let (Some(sv), Some(fp)) = (v.get("scene"), v.get("fingerprint")) {
        let file: SceneFile = serde_json::from_value(sv.clone())
            .map_err(|e| Error::Input(format!("{}: embedded scene: {e}", path.display())))?;
        let scene = file.into_scene()?;
        let (jc, _) = build_joint_cover(&scene)?;
        if fp.as_str() != Some(jc.fingerprint().to_string().as_str()) {
            return Err(Error::Validation(
                "cover fingerprint does not match its embedded scene".into(),
            ));
        }
        return Ok((scene, jc));
    }
    let scene = Scene::from_json_str(&text).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        e => e,
    })?;
    let (jc, _) = build_joint_cover(&scene)?;
    Ok((scene, jc))
}

pub fn load_robot(arg: &str) -> Result<RobotSpec> {
    if arg == "point" {
        Ok(RobotSpec::point())
    } else {
        RobotSpec::from_file(arg)
    }
}

fn parse_point(v: &Value) -> Result<Point> {
    let c: Vec<f64> = serde_json::from_value(v.clone())
        .map_err(|e| Error::Input(format!("bad coordinates {v}: {e}")))?;
    Point::from_slice(&c)
}

/// A configuration: `[x, y]` for one key point or `[[x, y], ...]`.
fn parse_config(v: &Value) -> Result<Vec<Point>> {
    match v.as_array() {
        Some(a) if a.first().is_some_and(|x| x.is_array()) => a.iter().map(parse_point).collect(),
        Some(_) => Ok(vec![parse_point(v)?]),
        None => Err(Error::Input(format!("expected a configuration, got {v}"))),
    }
}

/// Path file: `{"configurations": [...]}` or a bare array of configurations.
pub fn load_path(path: &Path) -> Result<Vec<Vec<Point>>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        Error::Input(format!(
            "{} line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let list = match &v {
        Value::Object(m) => m
            .get("configurations")
            .ok_or_else(|| Error::Input(format!("{}: missing configurations", path.display())))?,
        _ => &v,
    };
    let arr = list.as_array().ok_or_else(|| {
        Error::Input(format!(
            "{}: configurations must be an array",
            path.display()
        ))
    })?;
    arr.iter().map(parse_config).collect()
}

fn config_arg(arg: &str) -> Result<Vec<Point>> {
    let v: Value = match serde_json::from_str(arg) {
        Ok(v) => v,
        Err(_) => serde_json::from_str(&std::fs::read_to_string(arg)?)
            .map_err(|e| Error::Input(format!("{arg}: {e}")))?,
    };
    let v = match &v {
        Value::Object(m) => m
            .get("configuration")
            .cloned()
            .ok_or_else(|| Error::Input(format!("{arg}: missing configuration")))?,
        _ => v,
    };
    parse_config(&v)
}

fn traces(configs: &[Vec<Point>]) -> Vec<Vec<Point>> {
    let n = configs.first().map_or(0, |c| c.len());
    (0..n)
        .map(|k| configs.iter().map(|c| c[k]).collect())
        .collect()
}

fn render(
    scene: &Scene,
    jc: &JointCover,
    paths: &[Vec<Point>],
    svg: Option<&Path>,
    obj: Option<&Path>,
) -> Result<()> {
    if let Some(p) = svg {
        if scene.dim() != 2 {
            return Err(Error::Unsupported(
                "SVG export is planar only; use --obj".into(),
            ));
        }
        std::fs::write(p, export::svg(scene, jc, paths))?;
    }
    if let Some(p) = obj {
        std::fs::write(p, export::obj(scene, jc, paths))?;
    }
    Ok(())
}

/// The JSON written by `decompose`.
pub fn decompose_json(scene: &Scene, jc: &JointCover, seed: Option<u64>) -> Value {
    let mut m = header(seed);
    m.insert(
        "scene".into(),
        serde_json::to_value(scene.to_file_format()).expect("scene serializes"),
    );
    m.insert("fingerprint".into(), json!(jc.fingerprint().to_string()));
    m.insert("cover".into(), jc.to_json());
    Value::Object(m)
}

fn execute(cmd: Command, seed: Option<u64>) -> Result<i32> {
    match cmd {
        Command::Decompose {
            scene,
            out,
            svg,
            obj,
            dump_triangulation,
        } => {
            let (scene, jc) = load_scene(&scene)?;
            write_out(out.as_deref(), &pretty(&decompose_json(&scene, &jc, seed)))?;
            if let Some(p) = dump_triangulation {
                let mut m = header(seed);
                m.insert("triangulation".into(), jc.triangulation().to_json());
                std::fs::write(p, pretty(&Value::Object(m)))?;
            }
            render(&scene, &jc, &[], svg.as_deref(), obj.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Classify {
            scene,
            robot,
            path_a,
            path_b,
            refine,
            out,
        } => {
            let (scene, jc) = load_scene(&scene)?;
            let spec = load_robot(&robot)?;
            let sb = build_complex(&spec)?;
            let mut reps = Vec::new();
            let mut raw = Vec::new();
            for (name, p) in [("A", &path_a), ("B", &path_b)] {
                let mut configs = load_path(p)?;
                if refine {
                    configs = refine_path(&configs, &jc, 40)?;
                }
                let rep = path_representation(&configs, &jc, &sb).map_err(|e| match e {
                    Error::Resolution { step, key_point } => {
                        eprintln!("path {name}: step {step} crosses more than one region boundary (key point {key_point})");
                        e
                    }
                    e => e,
                })?;
                println!(
                    "path {name}: {}",
                    rep.states
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(" -> ")
                );
                reps.push(rep);
                raw.push(configs);
            }
            let same = crate::states::same_class(&reps[0], &reps[1])?;
            println!("{}", if same { "SAME" } else { "DIFFERENT" });
            let mut report = header(seed);
            report.insert("same".into(), json!(same));
            report.insert("a".into(), reps[0].to_json());
            report.insert("b".into(), reps[1].to_json());
            if scene.dim() == 2 && sb.n_vertices == 1 {
                let pa: Vec<Point> = raw[0].iter().map(|c| c[0]).collect();
                let pb: Vec<Point> = raw[1].iter().map(|c| c[0]).collect();
                let (ha, hb) = (h_signature(&pa, &scene)?, h_signature(&pb, &scene)?);
                let agree = (ha == hb) == same;
                println!("h-signature A: {ha}");
                println!("h-signature B: {hb}");
                println!(
                    "h-signature agreement: {}",
                    if agree { "yes" } else { "NO" }
                );
                report.insert(
                    "h_signature".into(),
                    json!({"a": ha, "b": hb, "agree": agree}),
                );
            }
            if let Some(p) = out {
                std::fs::write(p, pretty(&Value::Object(report)))?;
            }
            Ok(if same { EXIT_OK } else { EXIT_DIFFERENT })
        }
        Command::Plan {
            scene,
            robot,
            start,
            goal,
            alternatives,
            step,
            length_bound,
            out,
            svg,
            obj,
        } => {
            if !(step > 0.0 && step.is_finite()) || alternatives == 0 {
                return Err(Error::Input(
                    "--step must be positive and --alternatives at least 1".into(),
                ));
            }
            let (scene, jc) = load_scene(&scene)?;
            let spec = load_robot(&robot)?;
            let (s, g) = (config_arg(&start)?, config_arg(&goal)?);
            let opts = PlanOptions {
                alternatives,
                step,
                length_bound,
                ..Default::default()
            };
            let outcome = plan(&scene, &s, &g, &jc, &spec, &opts)?;
            let mut report = header(seed);
            report.insert(
                "result".into(),
                serde_json::to_value(&outcome).expect("plan serializes"),
            );
            if let Some(p) = &out {
                std::fs::write(p, pretty(&Value::Object(report)))?;
            }
            match outcome {
                PlanOutcome::Plans { plans } => {
                    let mut overlay = Vec::new();
                    for (i, p) in plans.iter().enumerate() {
                        println!(
                            "plan {i}: {} waypoints, regions {:?}",
                            p.waypoints.len(),
                            p.regions
                        );
                        println!("  class: {}", p.class.join(" -> "));
                        overlay.extend(traces(&p.waypoints));
                    }
                    render(&scene, &jc, &overlay, svg.as_deref(), obj.as_deref())?;
                    Ok(EXIT_OK)
                }
                PlanOutcome::Certificate { certificate } => {
                    println!(
                        "no path: {:?} certificate{} (key point {}, region {} cannot reach region {})",
                        certificate.kind,
                        if certificate.heuristic { ", heuristic" } else { "" },
                        certificate.key_point,
                        certificate.start_region,
                        certificate.goal_region
                    );
                    render(&scene, &jc, &[], svg.as_deref(), obj.as_deref())?;
                    Ok(EXIT_CERTIFICATE)
                }
            }
        }
        Command::RemoveObstacle {
            scene,
            id,
            out,
            svg,
        } => {
            let (scene, jc) = load_scene(&scene)?;
            let (after, _) = jc.what_if_remove(id)?;
            let mut m = header(seed);
            m.insert("removed".into(), json!(id));
            m.insert("cover".into(), after.to_json());
            write_out(out.as_deref(), &pretty(&Value::Object(m)))?;
            render(&scene, &after, &[], svg.as_deref(), None)?;
            Ok(EXIT_OK)
        }
        Command::Export {
            scene,
            svg,
            obj,
            paths,
        } => {
            if svg.is_none() && obj.is_none() {
                return Err(Error::Input("export needs --svg or --obj".into()));
            }
            let (scene, jc) = load_scene(&scene)?;
            let mut overlay = Vec::new();
            for p in &paths {
                overlay.extend(traces(&load_path(p)?));
            }
            render(&scene, &jc, &overlay, svg.as_deref(), obj.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}
