use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use warpflow::curvature::{curvature_field, extremal_sectional, warped_curvature, SearchConfig, SearchMode};
use warpflow::ode::{bound_check, closed_form, integrate, RiccatiProblem};

use warpflow_cli::bench::{run_criterion, CRITERIA};
use warpflow_cli::experiment::audit_pick;
use warpflow_cli::formats::{read_field_file, read_state_file};
use warpflow_cli::report::{summary, summary_text};
use warpflow_cli::{emit_report, parse_config, read_archive, run_experiment, write_archive, CliError, ReportFormat};

/// Environment variable overriding the output root of `simulate`.
const OUT_ENV: &str = "WARPFLOW_OUT";

#[derive(Parser)]
#[command(name = "warpflow", version, about = "Ricci flow experiments on warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow experiment and write its archive.
    Simulate {
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output root; defaults to $WARPFLOW_OUT, then the config, then `runs`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature of a profile snapshot, per node or in detail at one node.
    Curvature {
        profile: PathBuf,
        #[arg(long)]
        node: Option<usize>,
        /// Seed for the extremal plane searches.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run and audit a point-pick on a space-time field.
    Pointpick {
        field: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Integrate the Riccati comparison equation against its closed form.
    Ode {
        #[arg(long = "C")]
        c: f64,
        #[arg(long = "a0", allow_hyphen_values = true)]
        a0: f64,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        #[arg(long = "r-max", default_value_t = 5.0)]
        r_max: f64,
        #[arg(long, default_value_t = 0.05)]
        dr: f64,
    },
    /// Export tables from an archive.
    Report {
        archive: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Run the acceptance criteria.
    Bench {
        /// Run only this criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` signals a monitor or criterion failure.
fn dispatch(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Simulate { config, seed, out } => simulate(&config, seed, out),
        Command::Curvature { profile, node, seed } => curvature(&profile, node, seed),
        Command::Pointpick { field, k } => {
            let field = read_field_file(&field)?;
            let audit = audit_pick(&field, k)?;
            emit(&pretty(&audit));
            Ok(!audit.failed())
        }
        Command::Ode { c, a0, slack, r_max, dr } => {
            let problem = RiccatiProblem::new(c, a0, slack)?;
            let exact = closed_form(c, a0)?;
            let trajectory = integrate(&problem, r_max, dr)?;
            let samples: Vec<_> = trajectory
                .r
                .iter()
                .zip(&trajectory.a)
                .map(|(&r, &a)| json!({ "r": r, "a": a, "closed_form": exact.eval(r) }))
                .collect();
            let out = json!({
                "c": c,
                "a0": a0,
                "slack": slack,
                "branch": exact.branch,
                "closed_form_blowup": exact.blowup_radius(),
                "integrated_blowup": trajectory.blowup,
                "bound_holds": bound_check(&trajectory, c, a0),
                "samples": samples,
            });
            emit(&pretty(&out));
            Ok(true)
        }
        Command::Report { archive, format } => {
            let archive = read_archive(&archive)?;
            for path in emit_report(&archive, format)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Bench { only } => {
            let ids: Vec<u8> = match only {
                Some(id) if CRITERIA.iter().any(|c| c.0 == id) => vec![id],
                Some(id) => return Err(CliError::InvalidConfig(format!("no criterion {id}; expected 1-12"))),
                None => CRITERIA.iter().map(|c| c.0).collect(),
            };
            let mut all = true;
            for id in ids {
                let result = run_criterion(id);
                println!("{result}");
                all &= result.passed;
            }
            Ok(all)
        }
    }
}

/// Prints to stdout, exiting quietly when the reader has gone away.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}").and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn pretty<S: serde::Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("report values serialize")
}

fn simulate(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let root = out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let outcome = run_experiment(&config)?;
    let archive = write_archive(&outcome, &root.join(&config.name))?;
    println!("archive: {}", archive.dir.display());
    println!(
        "run: {:?} at t = {} after {} steps",
        archive.manifest.run_status, archive.manifest.stop_time, archive.manifest.steps
    );
    print!("{}", summary_text(&summary(&archive)?));
    Ok(!outcome.any_failed())
}

fn curvature(path: &Path, node: Option<usize>, seed: u64) -> Result<bool, CliError> {
    let state = read_state_file(path)?;
    let profile = &state.profile;
    match node {
        Some(i) => {
            if i >= profile.len() {
                return Err(CliError::InvalidConfig(format!(
                    "node {i} out of range (profile has {} nodes)",
                    profile.len()
                )));
            }
            let pc = warped_curvature(profile, i)?;
            let op = pc.operator();
            let search = SearchConfig { seed, ..SearchConfig::default() };
            let real = extremal_sectional(&op, SearchMode::Real, &search)?;
            let complex = extremal_sectional(&op, SearchMode::Complex, &search)?;
            let out = json!({
                "node": i,
                "x": profile.x()[i],
                "curvature": pc,
                "min_eigenvalue": pc.min_eigenvalue(),
                "min_sectional": real.value,
                "min_complex_sectional": complex.value,
            });
            emit(&pretty(&out));
        }
        None => {
            let mut table = String::from("node,x,k_rad,scal,min_eigenvalue\n");
            for (i, pc) in curvature_field(profile)?.iter().enumerate() {
                let x = profile.x()[i];
                match pc {
                    Some(pc) => writeln!(table, "{i},{x:?},{:?},{:?},{:?}", pc.k_rad, pc.scal, pc.min_eigenvalue()),
                    None => writeln!(table, "{i},{x:?},,,"),
                }
                .expect("writing to a String");
            }
            emit(table.trim_end());
        }
    }
    Ok(true)
}
