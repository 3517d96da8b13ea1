//! `hcm`: design, sweep and simulate hair-clip bistable ribbons.

mod calib;
mod config;
mod error;
mod plot;
mod report;
mod sim;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hcm_core::snapdyn::Medium;
use hcm_core::swim::WaveKind;

use config::{Design, DesignConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "hcm", version, about = "Bistable hair-clip mechanism designer")]
struct Cli {
    /// Design config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for output files; reports go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Use the bare tip-angle integral (C_psi = 1).
    #[arg(long, global = true)]
    uncalibrated: bool,

    /// Calibration file; defaults to data/calibration.json, then the built-in copy.
    #[arg(long, global = true)]
    calibration: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tip angle, barrier and snap timescale of one design.
    Analyze,
    /// Map the (theta, gamma_s) design space.
    Sweep {
        /// `start:stop:step` in degrees, or one value.
        #[arg(long, allow_hyphen_values = true)]
        theta_deg: String,
        /// `start:stop:step`, or one value.
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Kicked snap-through in the double well.
    Snap {
        #[arg(long, value_enum, default_value = "air")]
        medium: MediumArg,
    },
    /// Cruise speed of a tail driven by the design.
    Swim {
        #[arg(long, value_enum, default_value = "bistable")]
        waveform: WaveArg,
        #[arg(long)]
        frequency: Option<f64>,
        /// Run both waveforms and report the speed ratio.
        #[arg(long)]
        compare: bool,
        /// Also write the reported-swimmer comparison table.
        #[arg(long)]
        table: bool,
    },
    /// Discrete-ribbon energy minimisation against the analytic barrier.
    Oracle {
        #[arg(long)]
        n_links: Option<usize>,
    },
    /// Anchor C_psi on the configured design.
    Calibrate {
        #[arg(long)]
        psi_deg: f64,
    },
    /// Heatmaps from a sweep CSV.
    Plot { sweep_csv: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MediumArg {
    Air,
    Water,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WaveArg {
    Sinusoid,
    Bistable,
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numeric(format!("serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Quote a CSV field only when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Report to `DIR/name` when `--out` is set, otherwise stdout.
fn emit(out: Option<&Path>, name: &str, body: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            write_file(dir, name, body)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn load_design(cli: &Cli) -> Result<Design, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Input("--config PATH is required".into()))?;
    DesignConfig::load(path)?.design()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    let calibration = || calib::load(cli.calibration.as_deref(), cli.uncalibrated);
    match &cli.command {
        Command::Analyze => {
            let design = load_design(cli)?;
            let format = cli.format.unwrap_or(Format::Json);
            let body = report::run_analyze(&design, &calibration()?, format)?;
            emit(out, &format!("analyze.{}", ext(format)), &body)
        }
        Command::Sweep { theta_deg, gamma } => {
            let design = load_design(cli)?;
            let thetas = sweep::parse_range(theta_deg, "--theta-deg")?;
            let gammas = sweep::parse_range(gamma, "--gamma")?;
            let calib = calibration()?;
            calib.check_model(design.buckling.model)?;
            let rows = sweep::sweep(&design, &calib.calibration, &thetas, &gammas)?;
            let format = cli.format.unwrap_or(Format::Csv);
            let body = match format {
                Format::Csv => sweep::to_csv(&rows),
                Format::Json => to_json(&rows)?,
            };
            emit(out, &format!("sweep.{}", ext(format)), &body)
        }
        Command::Snap { medium } => {
            let design = load_design(cli)?;
            let medium = match medium {
                MediumArg::Air => Medium::Air,
                MediumArg::Water => Medium::Water,
            };
            let (summary, run) = sim::run_snap(&design, &calibration()?, medium)?;
            if let Some(dir) = out {
                let mut buf = Vec::new();
                run.trace.write_csv(&mut buf)?;
                write_file(dir, &format!("snap_{}.csv", sim::medium_name(medium)), &String::from_utf8_lossy(&buf))?;
            }
            print!("{}", sim::snap_text(&summary, cli.format.unwrap_or(Format::Csv))?);
            Ok(())
        }
        Command::Swim { waveform, frequency, compare, table } => {
            let design = load_design(cli)?;
            let calib = calibration()?;
            let (hydro, body_length) = sim::hydro_for(&design)?;
            let primary = match waveform {
                WaveArg::Sinusoid => WaveKind::Sinusoid,
                WaveArg::Bistable => WaveKind::Bistable,
            };
            let kinds = if *compare { vec![WaveKind::Bistable, WaveKind::Sinusoid] } else { vec![primary] };
            let mut runs = Vec::new();
            for kind in kinds {
                let w = sim::waveform_for(&design, &calib, kind, *frequency)?;
                let (line, result) = sim::swim_line(&w, &hydro, body_length)?;
                if let Some(dir) = out {
                    let mut buf = Vec::new();
                    result.write_csv(&mut buf)?;
                    write_file(dir, &format!("swim_{}.csv", sim::kind_name(kind)), &String::from_utf8_lossy(&buf))?;
                }
                runs.push(line);
            }
            let ratio = (runs.len() == 2).then(|| runs[0].speed_cm_s / runs[1].speed_cm_s);
            let summary = sim::SwimSummary { hydro, body_length_m: body_length, runs, bistable_over_sinusoid: ratio };
            if *table {
                let body = sim::table_csv()?;
                match out {
                    Some(dir) => {
                        write_file(dir, "speed_table.csv", &body)?;
                    }
                    None => print!("{body}"),
                }
            }
            print!("{}", sim::swim_text(&summary, cli.format.unwrap_or(Format::Json))?);
            Ok(())
        }
        Command::Oracle { n_links } => {
            let design = load_design(cli)?;
            let n = n_links.unwrap_or(design.config.options.n_links);
            let format = cli.format.unwrap_or(Format::Json);
            let body = report::run_oracle(&design, &calibration()?, n, format)?;
            emit(out, &format!("oracle.{}", ext(format)), &body)
        }
        Command::Calibrate { psi_deg } => {
            let design = load_design(cli)?;
            let (_, body) = report::run_calibrate(&design, *psi_deg)?;
            emit(out, "calibration.json", &body)
        }
        Command::Plot { sweep_csv } => {
            let rows = plot::read_sweep(sweep_csv)?;
            let dir = out.unwrap_or(Path::new("."));
            for q in plot::QUANTITIES {
                write_file(dir, &format!("{q}.svg"), &plot::render(&rows, q)?)?;
            }
            Ok(())
        }
    }
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hcm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
