//! Command-line surface: signal synthesis, wave-front reports,
//! operator application and the verification suites.
//!
//! Exit codes: 0 success, 2 verification failure, 1 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::Config;
use crate::error::Result;
use crate::gabor::gabor_analysis;
use crate::grid::{make_grid, synthesize, Grid, SignalKind};
use crate::io;
use crate::operators::{localization_apply, weyl_apply};
use crate::symbols::{parse_symbol, sample_phase_grid, sample_weyl_grid};
use crate::tf::{stft, Window};
use crate::verify::{run_suite, SuiteReport, SUITES};
use crate::wavefront::{wavefront_of_field, PhaseField, RadialConfig, SectorPartition};
use crate::GaborError;

#[derive(Parser, Debug)]
#[command(
    name = "gabor-wf",
    about = "Time-frequency analysis: STFT/Gabor transforms, wave front estimation, Weyl and localization operators",
    version,
    disable_version_flag = false
)]
struct Cli {
    /// Path to a TOML config file; missing keys fall back to defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a standard test signal to a CSV file.
    Synthesize(SynthesizeArgs),
    /// Estimate the wave front set of a signal file.
    Wavefront(WavefrontArgs),
    /// Apply a Weyl or localization operator to a signal file.
    Apply(ApplyArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Signal kind: delta | plane_wave | chirp | gaussian | hermite.
    #[arg(long)]
    kind: String,
    /// Center (delta, gaussian).
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// Frequency (plane_wave, gaussian).
    #[arg(long, default_value_t = 0.0)]
    xi0: f64,
    /// Chirp rate (chirp); must be nonzero.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Hermite index (hermite).
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Optional phase-space shift "X0,XI0" applied after synthesis.
    #[arg(long)]
    shift: Option<String>,
    /// Grid size override (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Grid length override.
    #[arg(long, name = "L")]
    length: Option<f64>,
    /// Output CSV path.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct WavefrontArgs {
    /// Input signal CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// Analysis mode: stft | gabor.
    #[arg(long, default_value = "stft")]
    mode: String,
    /// Window spec: gaussian | hermite:K.
    #[arg(long, default_value = "gaussian")]
    window: String,
    /// Sector count override.
    #[arg(long)]
    k_sectors: Option<usize>,
    /// Threshold override.
    #[arg(long)]
    n_thr: Option<f64>,
    /// Output JSON report path.
    #[arg(short, long)]
    out: PathBuf,
    /// Optional 16-bit PGM heatmap of |V| (stft mode only).
    #[arg(long)]
    heatmap: Option<PathBuf>,
    /// Optional per-sector shell-maximum CSV dump.
    #[arg(long)]
    rays: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("op").required(true).args(["weyl", "localize"])))]
struct ApplyArgs {
    /// Input signal CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// Weyl symbol spec (one | x | xi | sincos | elliptic | bump | cone:A,B[,R][,anti]).
    #[arg(long)]
    weyl: Option<String>,
    /// Localization mask spec (same grammar as --weyl).
    #[arg(long)]
    localize: Option<String>,
    /// Window spec for the localization operator.
    #[arg(long, default_value = "gaussian")]
    window: String,
    /// Output signal CSV path.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suites to run; defaults to all of
    /// inversion, frames, oracles, microlocal, invariance.
    suites: Vec<String>,
    /// Override the lattice density for the frames suite; densities at
    /// or beyond 2π are reported as an expected frame collapse.
    #[arg(long)]
    alpha_beta_product: Option<f64>,
    /// Optional JSON report path.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn init_threads() {
    if let Ok(v) = std::env::var("GABORWF_THREADS") {
        if let Ok(t) = v.trim().parse::<usize>() {
            if t >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
        }
    }
}

pub fn main() -> ExitCode {
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; everything else is usage.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let run = match cli.command {
        Command::Synthesize(a) => cmd_synthesize(&cfg, a).map(|_| true),
        Command::Wavefront(a) => cmd_wavefront(&cfg, a).map(|_| true),
        Command::Apply(a) => cmd_apply(&cfg, a).map(|_| true),
        Command::Verify(a) => cmd_verify(&cfg, a),
    };
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    match &cli.config {
        Some(path) => Config::load(path),
        None => Ok(Config::default()),
    }
}

fn parse_kind(a: &SynthesizeArgs) -> Result<SignalKind> {
    let base = match a.kind.as_str() {
        "delta" => SignalKind::Delta { x0: a.x0 },
        "plane_wave" => SignalKind::PlaneWave { xi0: a.xi0 },
        "chirp" => SignalKind::Chirp { c: a.c },
        "gaussian" => SignalKind::Gaussian { x0: a.x0, xi0: a.xi0 },
        "hermite" => SignalKind::Hermite { k: a.k },
        other => {
            return Err(GaborError::Parse(format!(
                "unknown signal kind {other:?} (expected delta, plane_wave, chirp, gaussian or hermite)"
            )))
        }
    };
    match &a.shift {
        None => Ok(base),
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 2 {
                return Err(GaborError::Parse(format!(
                    "shift must be \"X0,XI0\", got {spec:?}"
                )));
            }
            let x0 = parts[0]
                .trim()
                .parse()
                .map_err(|_| GaborError::Parse(format!("bad shift x0 in {spec:?}")))?;
            let xi0 = parts[1]
                .trim()
                .parse()
                .map_err(|_| GaborError::Parse(format!("bad shift xi0 in {spec:?}")))?;
            Ok(SignalKind::PhaseShift {
                inner: Box::new(base),
                x0,
                xi0,
            })
        }
    }
}

fn parse_window(spec: &str, grid: Grid) -> Result<Window> {
    if spec == "gaussian" {
        return Window::normalized(synthesize(
            &SignalKind::Gaussian { x0: 0.0, xi0: 0.0 },
            grid,
        )?);
    }
    if let Some(rest) = spec.strip_prefix("hermite:") {
        let k: usize = rest
            .parse()
            .map_err(|_| GaborError::Parse(format!("bad hermite window index {rest:?}")))?;
        return Window::normalized(synthesize(&SignalKind::Hermite { k }, grid)?);
    }
    Err(GaborError::Parse(format!(
        "unknown window spec {spec:?} (expected gaussian or hermite:K)"
    )))
}

fn cmd_synthesize(cfg: &Config, a: SynthesizeArgs) -> Result<()> {
    let grid = make_grid(a.n.unwrap_or(cfg.n), a.length.unwrap_or(cfg.length))?;
    let kind = parse_kind(&a)?;
    let u = synthesize(&kind, grid)?;
    io::write_signal(&a.out, &u)
}

fn cmd_wavefront(cfg: &Config, a: WavefrontArgs) -> Result<()> {
    let u = io::read_signal(&a.input)?;
    let grid = u.grid;
    let phi = parse_window(&a.window, grid)?;
    let part = SectorPartition::new(a.k_sectors.unwrap_or(cfg.k_sectors))?;
    let n_thr = a.n_thr.unwrap_or(cfg.n_thr);
    let r_max = 0.8 * (grid.length() / 2.0).min(grid.freq_max());
    let rad = RadialConfig::new(cfg.r_min, r_max, cfg.n_shells)?;
    let est = match a.mode.as_str() {
        "stft" => {
            let v = stft(&u, &phi)?;
            if let Some(path) = &a.heatmap {
                io::write_heatmap_pgm(path, &v)?;
            }
            wavefront_of_field(&PhaseField::Stft(&v), part, rad, n_thr, u.label.clone())?
        }
        "gabor" => {
            if a.heatmap.is_some() {
                return Err(GaborError::Parse(
                    "--heatmap requires --mode stft (Gabor coefficients are not a full-grid field)"
                        .into(),
                ));
            }
            let lat = cfg.lattice(grid)?;
            let coeffs = gabor_analysis(&u, &phi, &lat)?;
            wavefront_of_field(&PhaseField::Gabor(&coeffs), part, rad, n_thr, u.label.clone())?
        }
        other => {
            return Err(GaborError::Parse(format!(
                "unknown mode {other:?} (expected stft or gabor)"
            )))
        }
    };
    if let Some(path) = &a.rays {
        io::write_rays_csv(path, &est.profile)?;
    }
    io::write_wavefront_json(&a.out, &est)
}

fn cmd_apply(cfg: &Config, a: ApplyArgs) -> Result<()> {
    let u = io::read_signal(&a.input)?;
    let out = if let Some(spec) = &a.weyl {
        let sym = sample_weyl_grid(&parse_symbol(spec)?, u.grid)?;
        weyl_apply(&sym, &u)?
    } else {
        let spec = a.localize.as_ref().expect("clap group guarantees one");
        let mask = sample_phase_grid(&parse_symbol(spec)?, u.grid)?;
        let psi = parse_window(&a.window, u.grid)?;
        localization_apply(&mask, &psi, &u)?
    };
    let _ = cfg;
    io::write_signal(&a.out, &out)
}

#[derive(Serialize)]
struct VerifyReport {
    suites: Vec<SuiteReport>,
}

fn cmd_verify(cfg: &Config, a: VerifyArgs) -> Result<bool> {
    let names: Vec<String> = if a.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        a.suites.clone()
    };
    for name in &names {
        if !SUITES.contains(&name.as_str()) {
            return Err(GaborError::Parse(format!(
                "unknown suite {name:?}; expected one of {SUITES:?}"
            )));
        }
    }
    let mut suites = Vec::new();
    let mut all_passed = true;
    for name in &names {
        let ab = if name == "frames" {
            a.alpha_beta_product
        } else {
            None
        };
        let rep = run_suite(name, cfg, ab)?;
        println!("suite {}:", rep.suite);
        print!("{}", rep.text());
        all_passed &= rep.passed();
        suites.push(rep);
    }
    println!("{}", if all_passed { "all checks passed" } else { "FAILURES present" });
    if let Some(path) = &a.out {
        let mut json =
            serde_json::to_string_pretty(&VerifyReport { suites }).expect("serialize");
        json.push('\n');
        io::write_text(path, &json)?;
    }
    Ok(all_passed)
}
