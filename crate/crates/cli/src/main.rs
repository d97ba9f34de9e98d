use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use scrollforge_core::analysis::{analyze, AnalysisOptions};
use scrollforge_core::export::{
    write_kc_csv, write_report_json, write_trajectory_csv, write_transitions_csv,
};
use scrollforge_core::{
    equilibrium_report, integrate, load_system_file, EquilibriumStatus, Error, FactorySystem,
    IntegrationConfig, PwlSystem, Vec3,
};

#[derive(Parser)]
#[command(
    name = "scrollforge",
    version,
    about = "Simulate and analyze multi-scroll PWL systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a system and write trajectory.csv and transitions.csv.
    Simulate(RunArgs),
    /// Integrate and write report.json and kc.csv (0-1 test, LLE, symbols).
    Analyze(AnalyzeArgs),
    /// Report per-piece equilibria and whether the system has none.
    Verify(SystemArg),
}

#[derive(Args)]
struct SystemArg {
    /// example1-double, example1-triple, example2-triple or file:<path>
    #[arg(long)]
    system: String,
}

#[derive(Args, Serialize)]
struct RunArgs {
    /// example1-double, example1-triple, example2-triple or file:<path>
    #[arg(long)]
    system: String,
    #[arg(long, value_parser = parse_x0, default_value = "0,0,0")]
    x0: Vec3,
    #[arg(long, default_value_t = 50.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 1)]
    sample_every: usize,
    #[arg(long, env = "SCROLLFORGE_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    /// example1-double, example1-triple, example2-triple or file:<path>
    #[arg(long)]
    system: String,
    #[arg(long, value_parser = parse_x0, default_value = "0,0,0")]
    x0: Vec3,
    #[arg(long, default_value_t = 500.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// 25 at step 0.01 samples every 0.25 time units.
    #[arg(long, default_value_t = 25)]
    sample_every: usize,
    /// Seeds the c values of the 0-1 test.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, env = "SCROLLFORGE_OUT", default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    no_lle: bool,
    #[arg(long)]
    no_k: bool,
}

fn parse_x0(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Vec3::try_new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

fn load(system: &str) -> Result<PwlSystem, Error> {
    match system.strip_prefix("file:") {
        Some(path) => load_system_file(path).map_err(|e| match e {
            Error::Io(io) => Error::InvalidConfig(format!("cannot read `{path}`: {io}")),
            other => other,
        }),
        None => Ok(system.parse::<FactorySystem>()?.build()),
    }
}

fn config(
    x0: Vec3,
    duration: f64,
    step: f64,
    sample_every: usize,
) -> Result<IntegrationConfig, Error> {
    let cfg = IntegrationConfig::new(x0, duration)
        .with_step(step)
        .with_sample_every(sample_every);
    cfg.validate()?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_manifest(dir: &Path, command: &str, args: &impl Serialize) -> Result<(), Error> {
    let manifest = serde_json::json!({ "command": command, "args": args });
    let mut w = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    Ok(())
}

fn simulate(args: &RunArgs) -> Result<(), Error> {
    let sys = load(&args.system)?;
    let cfg = config(args.x0, args.duration, args.step, args.sample_every)?;
    let traj = integrate(&sys, &cfg, &sys.region_scheme())?;
    fs::create_dir_all(&args.out)?;
    write_trajectory_csv(&traj, create(&args.out, "trajectory.csv")?)?;
    write_transitions_csv(&traj, create(&args.out, "transitions.csv")?)?;
    write_manifest(&args.out, "simulate", args)?;
    println!("duration: {}", args.duration);
    println!("samples: {}", traj.len());
    println!("transitions: {}", traj.transitions.len());
    println!("max|x|: {}", traj.max_abs());
    Ok(())
}

fn analyze_cmd(args: &AnalyzeArgs) -> Result<(), Error> {
    let sys = load(&args.system)?;
    let cfg = config(args.x0, args.duration, args.step, args.sample_every)?;
    let opts = AnalysisOptions {
        lle: !args.no_lle,
        k: !args.no_k,
        seed: args.seed,
        ..Default::default()
    };
    let (_, report) = analyze(&sys, &cfg, &opts)?;
    fs::create_dir_all(&args.out)?;
    write_report_json(&report, create(&args.out, "report.json")?)?;
    if opts.k {
        write_kc_csv(&report, create(&args.out, "kc.csv")?)?;
    }
    write_manifest(&args.out, "analyze", args)?;
    if let Some(k) = report.k_median {
        println!("K: {k:.4}");
    }
    if let Some(lle) = report.lle {
        println!("LLE: {lle:.4}");
    }
    println!("max|x|: {}", report.max_abs);
    let occ: Vec<String> = report
        .occupancy
        .iter()
        .map(|(l, f)| format!("{l}={f:.3}"))
        .collect();
    println!("occupancy: {}", occ.join(" "));
    Ok(())
}

fn verify(args: &SystemArg) -> Result<(), Error> {
    let sys = load(&args.system)?;
    let report = equilibrium_report(&sys);
    for p in &report.pieces {
        let detail = match &p.status {
            EquilibriumStatus::None => "no solution of Ax + B = 0".to_string(),
            EquilibriumStatus::Isolated {
                point,
                inside_guard,
            } => format!(
                "virtual equilibrium {}, inside guard: {}",
                short(point),
                yes_no(*inside_guard)
            ),
            EquilibriumStatus::Degenerate {
                point,
                directions,
                meets_guard,
            } => {
                let dirs: Vec<String> = directions.iter().map(short).collect();
                format!(
                    "equilibria {} + span[{}], meets guard: {}",
                    short(point),
                    dirs.join(", "),
                    yes_no(*meets_guard)
                )
            }
        };
        println!(
            "piece {:2}: has_equilibrium: {:3}  {detail}",
            p.piece_index + 1,
            yes_no(p.has_equilibrium)
        );
    }
    println!("equilibrium-free: {}", yes_no(report.equilibrium_free));
    Ok(())
}

/// Six decimals, with negative zero printed as zero.
fn short(v: &Vec3) -> String {
    let c = v
        .to_array()
        .map(|x| format!("{:.6}", x + 0.0).replace("-0.000000", "0.000000"));
    format!("({}, {}, {})", c[0], c[1], c[2])
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
