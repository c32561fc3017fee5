//! `compliant` command-line tool: simulate demonstrations, learn primitives,
//! replay them and export plotting data.

mod inspect;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use compliant_core::io::{primitive_from_json, primitive_to_json, read_config, read_demo, write_demo, PrimitiveFile};
use compliant_core::{learn_primitive, Channel, CompliantPrimitive, LearnReport, LearnerConfig, Pose};
use compliant_sim::controller::write_trajectory_csv;
use compliant_sim::scenarios::{self, PegGeometry, Side};
use compliant_sim::{generate_demo, reproduce, DemoSpec, Environment, NoiseSpec, SimParams};
use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "compliant", version, about = "Learn and replay linear compliant motion primitives")]
struct Cli {
    /// Learner configuration (JSON mirroring LearnerConfig).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic path; recorded in each output file.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, or directory where a command writes several files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a primitive from demonstration files (JSON or CSV).
    Learn {
        #[arg(required = true)]
        demos: Vec<PathBuf>,
        /// Also write the bare primitive to this file.
        #[arg(long)]
        primitive: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Generate synthetic demonstrations in a scenario.
    Simulate {
        /// Bundled scenario name or an environment JSON file.
        scenario: String,
        /// Valley face to start on; selects a single demonstration.
        #[arg(long)]
        side: Option<SideArg>,
        /// Start error angle in degrees (peg2d, couple); selects a single demonstration.
        #[arg(long)]
        angle: Option<f64>,
        /// Standard deviation of the teacher direction noise, degrees.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Demonstration spec (JSON) replacing the built-in teacher.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Run a learned primitive in a scenario and write the trajectory CSV.
    Reproduce {
        /// Primitive file or learn report.
        primitive: PathBuf,
        scenario: String,
        /// Start pose as `x,y,z` or `x,y,z,qw,qx,qy,qz`.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, default_value_t = 8000)]
        max_steps: usize,
    },
    /// Export plot-ready CSV and SVG from a learn report.
    Inspect {
        report: PathBuf,
        what: inspect::What,
        #[arg(long, value_enum, default_value_t = ChannelArg::Translation)]
        channel: ChannelArg,
    },
    /// Replay a primitive from many perturbed starts in parallel.
    Sweep {
        primitive: PathBuf,
        scenario: String,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        /// Half-width of the horizontal start offset, m.
        #[arg(long, default_value_t = 0.01)]
        spread: f64,
        /// Largest start tilt, degrees.
        #[arg(long, default_value_t = 0.0)]
        tilt: f64,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, default_value_t = 8000)]
        max_steps: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    sigma_demo: Option<f64>,
    #[arg(long)]
    sigma_work: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ChannelArg {
    Translation,
    Rotation,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Channel {
        match c {
            ChannelArg::Translation => Channel::Translation,
            ChannelArg::Rotation => Channel::Rotation,
        }
    }
}

/// A failed command: exit code plus a one-line diagnostic.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub fn fail(code: u8, message: impl std::fmt::Display) -> Failure {
    Failure { code, message: message.to_string().replace('\n', " ") }
}

/// Learn output: the report with the seed of the invocation.
#[derive(Serialize, Deserialize)]
pub struct ReportFile {
    pub seed: u64,
    pub report: LearnReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Learn { demos, primitive, overrides } => learn(&cli, demos, primitive.as_deref(), overrides),
        Command::Simulate { scenario, side, angle, noise, spec } => {
            simulate(&cli, scenario, *side, *angle, *noise, spec.as_deref())
        }
        Command::Reproduce { primitive, scenario, start, max_steps } => {
            replay(&cli, primitive, scenario, start.as_deref(), *max_steps)
        }
        Command::Inspect { report, what, channel } => inspect::run(report, *what, (*channel).into(), cli.out.as_deref()),
        Command::Sweep { primitive, scenario, starts, spread, tilt, start, max_steps, threads } => sweep(
            &cli,
            primitive,
            scenario,
            SweepSpec { starts: *starts, spread: *spread, tilt: *tilt, max_steps: *max_steps, threads: *threads },
            start.as_deref(),
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn learner_config(cli: &Cli, o: &Overrides) -> Result<LearnerConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => read_config(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?,
        None => LearnerConfig::default(),
    };
    if let Some(v) = o.zeta {
        cfg.zeta = v;
    }
    if let Some(v) = o.window {
        cfg.window = v;
    }
    if let Some(v) = o.sigma_demo {
        cfg.sigma_demo = v;
    }
    if let Some(v) = o.sigma_work {
        cfg.sigma_work = v;
    }
    if let Some(v) = o.eta {
        cfg.eta_deg = v;
    }
    if let Some(v) = o.xi {
        cfg.xi_deg = v;
    }
    cfg.validate().map_err(|e| fail(2, e))?;
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))
}

fn learn(cli: &Cli, paths: &[PathBuf], primitive_out: Option<&Path>, o: &Overrides) -> Result<u8, Failure> {
    let cfg = learner_config(cli, o)?;
    let demos = paths
        .iter()
        .map(|p| read_demo(p).map_err(|e| fail(2, format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let report = learn_primitive(&demos, &cfg).map_err(|e| fail(if e.is_input_error() { 2 } else { 3 }, e))?;

    for ch in [Channel::Translation, Channel::Rotation] {
        let r = report.channel(ch);
        let mut line = format!("{ch}: work ratio {:.3}", r.work.ratio);
        if r.three_dof_compliant {
            line += ", 3-DOF compliant";
        } else if r.stationary {
            line += ", stationary (stiff)";
        }
        if let Some(d) = &r.direction {
            line += &format!(", inlier ratio {:.3}", d.inlier_ratio);
            match d.direction {
                Some(v) => line += &format!(", direction [{:.3}, {:.3}, {:.3}]", v.x, v.y, v.z),
                None => line += ", no direction",
            }
        }
        if let Some(c) = &r.compliance {
            line += &format!(", D = {}", c.n_axes);
        }
        println!("{line}");
    }
    if let Some(p) = report.primitive.pitch {
        println!("pitch: {p:.5} m/rad");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }

    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("report.json"));
    let file = ReportFile { seed: cli.seed, report };
    write_file(&out, &serde_json::to_string_pretty(&file).map_err(|e| fail(3, e))?)?;
    if let Some(path) = primitive_out {
        let pf = PrimitiveFile {
            primitive: file.report.primitive.clone(),
            config: file.report.config.clone(),
            demo_ids: file.report.demo_ids.clone(),
        };
        write_file(path, &primitive_to_json(&pf).map_err(|e| fail(3, e))?)?;
    }
    Ok(0)
}

/// A bundled scenario name, or a path to an environment file.
fn load_env(scenario: &str) -> Result<Environment, Failure> {
    if Path::new(scenario).is_file() {
        let text = std::fs::read_to_string(scenario).map_err(|e| fail(2, format!("{scenario}: {e}")))?;
        return Environment::from_json_str(&text).map_err(|e| fail(2, format!("{scenario}: {e}")));
    }
    scenarios::environment(scenario).map_err(|e| fail(2, e))
}

fn noise_spec(deg: f64) -> NoiseSpec {
    NoiseSpec { direction_deg: deg, correlation_time: 0.2, ..Default::default() }
}

fn demo_specs(
    scenario: &str,
    side: Option<SideArg>,
    angle: Option<f64>,
    noise: f64,
    spec: Option<&Path>,
) -> Result<Vec<(String, DemoSpec)>, Failure> {
    if let Some(path) = spec {
        let text = std::fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        let s: DemoSpec = serde_json::from_str(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "demo".into());
        return Ok(vec![(id, s)]);
    }
    let n = noise_spec(noise);
    let g = PegGeometry::default();
    let single = match (scenario, side, angle) {
        (_, None, None) => return scenarios::default_demos(scenario, n).map_err(|e| fail(2, e)),
        ("valley", Some(s), None) => {
            let (side, name) = match s {
                SideArg::Left => (Side::Left, "left"),
                SideArg::Right => (Side::Right, "right"),
            };
            (format!("valley-{name}"), scenarios::valley_demo(side, noise))
        }
        ("peg2d", None, Some(a)) => (format!("peg-{a}"), scenarios::peg_demo(&g, a, n)),
        ("couple", None, Some(a)) => (format!("couple-{a}"), scenarios::couple_demo(a, n)),
        _ => {
            // still report an unknown scenario as such
            scenarios::default_demos(scenario, n).map_err(|e| fail(2, e))?;
            return Err(fail(2, format!("--side applies to valley, --angle to peg2d and couple (got '{scenario}')")));
        }
    };
    Ok(vec![single])
}

fn simulate(
    cli: &Cli,
    scenario: &str,
    side: Option<SideArg>,
    angle: Option<f64>,
    noise: f64,
    spec: Option<&Path>,
) -> Result<u8, Failure> {
    let env = load_env(scenario)?;
    let specs = demo_specs(scenario, side, angle, noise, spec)?;
    let p = SimParams::default();
    // an --out without extension names a directory
    let out_file = cli.out.as_ref().filter(|o| !o.is_dir() && o.extension().is_some());
    let paths: Vec<PathBuf> = if let Some(file) = out_file {
        if specs.len() > 1 {
            return Err(fail(2, format!("{} demonstrations need a directory for --out", specs.len())));
        }
        vec![file.clone()]
    } else {
        let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| fail(2, format!("{}: {e}", dir.display())))?;
        specs.iter().map(|(id, _)| dir.join(format!("{id}.json"))).collect()
    };
    for (i, ((id, s), path)) in specs.iter().zip(&paths).enumerate() {
        let seed = cli.seed + i as u64;
        let demo = generate_demo(&env, s, &p, seed, id).map_err(|e| fail(1, format!("{id}: {e}")))?;
        write_demo(path, &demo, Some(seed)).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        println!("{id}: {} samples, {:.2} s -> {}", demo.samples.len(), demo.samples.last().map_or(0.0, |s| s.t), path.display());
    }
    Ok(0)
}

/// Reads a primitive file or a learn report (with or without the seed wrapper).
fn load_primitive(path: &Path) -> Result<CompliantPrimitive, Failure> {
    let bad = |e: &dyn std::fmt::Display| fail(2, format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(&e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
    let primitive = if let Some(r) = value.get("report") {
        serde_json::from_value::<LearnReport>(r.clone()).map_err(|e| bad(&e))?.primitive
    } else if value.get("translation").is_some() {
        serde_json::from_value::<LearnReport>(value).map_err(|e| bad(&e))?.primitive
    } else {
        primitive_from_json(&text).map_err(|e| bad(&e))?.primitive
    };
    primitive.check().map_err(|e| bad(&e))?;
    Ok(primitive)
}

fn parse_pose(text: &str) -> Result<Pose, Failure> {
    let v = text
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail(2, format!("bad pose '{text}': {e}")))?;
    match v.len() {
        3 => Ok(Pose::new(Vector3::new(v[0], v[1], v[2]), UnitQuaternion::identity())),
        7 => Pose::from_wxyz([v[0], v[1], v[2]], [v[3], v[4], v[5], v[6]]).map_err(|e| fail(2, e)),
        n => Err(fail(2, format!("pose needs 3 or 7 numbers, got {n}"))),
    }
}

/// The explicit start, else the start of the scenario's first default demo.
fn start_pose(scenario: &str, start: Option<&str>) -> Result<Pose, Failure> {
    if let Some(s) = start {
        return parse_pose(s);
    }
    let specs = scenarios::default_demos(scenario, NoiseSpec::default())
        .map_err(|_| fail(2, format!("--start is required for '{scenario}'")))?;
    specs[0].1.start.to_pose().map_err(|e| fail(2, e))
}

fn write_trajectory(path: &Path, r: &compliant_sim::Reproduction, seed: u64) -> Result<(), Failure> {
    let f = std::fs::File::create(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    write_trajectory_csv(std::io::BufWriter::new(f), &r.trajectory, Some(seed))
        .map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn replay(cli: &Cli, primitive: &Path, scenario: &str, start: Option<&str>, max_steps: usize) -> Result<u8, Failure> {
    let pr = load_primitive(primitive)?;
    let env = load_env(scenario)?;
    let start = start_pose(scenario, start)?;
    let r = reproduce(&pr, &env, &start, max_steps, &SimParams::default());
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    write_trajectory(&out, &r, cli.seed)?;
    let end = r.trajectory.last().expect("trajectory holds the start");
    if r.success {
        println!("goal reached at t = {:.3} s", end.t);
        Ok(0)
    } else {
        let why = match r.diverged_at {
            Some(step) => format!("left the workspace at step {step}"),
            None => format!("stopped after {:.3} s", end.t),
        };
        let pos = end.pose.position;
        println!(
            "goal not reached: {why}, position error {:.2e} m at [{:.4}, {:.4}, {:.4}]",
            env.goal.position_error(&end.pose),
            pos.x,
            pos.y,
            pos.z
        );
        Ok(1)
    }
}

struct SweepSpec {
    starts: usize,
    spread: f64,
    tilt: f64,
    max_steps: usize,
    threads: Option<usize>,
}

/// Offsets `base` horizontally and tilts it, then lifts it out of contact.
fn perturbed(env: &Environment, base: &Pose, rng: &mut ChaCha8Rng, spread: f64, tilt: f64) -> (Pose, f64) {
    let dx = if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 };
    let dy = if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 };
    let angle = if tilt > 0.0 { rng.random_range(-tilt..=tilt) } else { 0.0 };
    let heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let axis = nalgebra::Unit::new_normalize(Vector3::new(heading.cos(), heading.sin(), 0.0));
    let q = UnitQuaternion::from_axis_angle(&axis, angle.to_radians()) * base.orientation;
    let mut pose = Pose::new(base.position + Vector3::new(dx, dy, 0.0), q);
    for _ in 0..1000 {
        let gap = env.min_gap(&pose);
        if gap >= 0.0 {
            break;
        }
        pose.position.z += (-gap).max(1e-5);
    }
    (pose, angle)
}

fn sweep(cli: &Cli, primitive: &Path, scenario: &str, s: SweepSpec, start: Option<&str>) -> Result<u8, Failure> {
    let pr = load_primitive(primitive)?;
    let env = load_env(scenario)?;
    let base = start_pose(scenario, start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let starts: Vec<(Pose, f64)> = (0..s.starts).map(|_| perturbed(&env, &base, &mut rng, s.spread, s.tilt)).collect();

    let threads = s
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, s.starts.max(1));
    let chunk = s.starts.div_ceil(threads).max(1);
    let p = SimParams::default();
    let results: Vec<(bool, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|part| {
                let (pr, env, p) = (&pr, &env, &p);
                scope.spawn(move || {
                    part.iter()
                        .map(|(pose, _)| {
                            let r = reproduce(pr, env, pose, s.max_steps, p);
                            (r.success, r.trajectory.last().map_or(0.0, |x| x.t))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let mut csv = format!("# seed={}\nindex,x,y,z,tilt_deg,success,t_end\n", cli.seed);
    for (i, ((pose, tilt), (ok, t))) in starts.iter().zip(&results).enumerate() {
        let x = pose.position;
        csv += &format!("{i},{},{},{},{tilt},{},{t}\n", x.x, x.y, x.z, *ok as u8);
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
    write_file(&out, &csv)?;
    let ok = results.iter().filter(|r| r.0).count();
    println!("{ok}/{} starts reached the goal", results.len());
    Ok(0)
}
