//! `h1geom` command-line tool: invariant verification, CSV export and
//! instability certificates.
//!
//! Exit codes: 0 success, 1 check or certificate failure, 2 usage or
//! configuration error, 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "h1geom", version, about = "Heisenberg group H1 geometry: verify, export, certify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout if absent)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the named invariant checks and print one line per identity
    Verify {
        /// core | geodesics | surfaces | stability | numerics | all
        #[arg(long)]
        suite: Option<String>,
        /// Threshold override NAME=VALUE (check name or group key), repeatable
        #[arg(long = "tol")]
        tol: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Write CSV data
    Export {
        #[command(subcommand)]
        kind: ExportKind,
    },
    /// Search for an instability certificate and write it as key=value lines
    Certify {
        #[command(subcommand)]
        target: CertifyTarget,
    },
}

#[derive(Subcommand)]
enum ExportKind {
    /// Samples of a geodesic: s,x,y,t,lambda,speed
    Geodesic {
        /// Start point x,y,t
        #[arg(long, allow_hyphen_values = true)]
        p0: Option<String>,
        /// Initial velocity as X,Y,T frame coefficients a,b,c
        #[arg(long, allow_hyphen_values = true)]
        v0: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Surface invariants on a parameter grid
    SurfaceGrid {
        /// vertical_plane | plane | paraboloid | helicoid | catenoid
        #[arg(long)]
        surface: Option<String>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Catenoid sheet, +1 or -1
        #[arg(long, allow_hyphen_values = true)]
        sheet: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        /// First parameter axis min,max,n
        #[arg(long, allow_hyphen_values = true)]
        u1: Option<String>,
        /// Second parameter axis min,max,n
        #[arg(long, allow_hyphen_values = true)]
        u2: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct QuadArgs {
    /// Gauss-Legendre points per cell (4, 8, 16, 32)
    #[arg(long)]
    quad_points: Option<usize>,
    /// Cells per axis as AxB
    #[arg(long)]
    quad_cells: Option<String>,
}

#[derive(Subcommand)]
enum CertifyTarget {
    /// Helicoid H_2 via the bracket search
    H2 {
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Helicoid H_R, derived from H_2 by dilation
    Helicoid {
        #[arg(long = "R")]
        r: Option<f64>,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Catenoid of parameter lambda via ruled coordinates
    Catenoid {
        #[arg(long)]
        lambda: Option<f64>,
        /// Largest k scanned (k = 1..k_max)
        #[arg(long)]
        k_max: Option<usize>,
        /// Half-width of the bump in the ruling-transverse direction
        #[arg(long)]
        phi_half_width: Option<f64>,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        common: Common,
    },
}

type Runner = fn(&RunConfig) -> Result<commands::Outcome, CliError>;

fn merge(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &common.output {
        cfg.set("output", o.display().to_string());
    }
    Ok(cfg)
}

fn quad_flags(cfg: &mut RunConfig, q: &QuadArgs) {
    cfg.set_opt("quad_points", &q.quad_points);
    cfg.set_opt("quad_cells", &q.quad_cells);
}

fn prepare(cli: &Cli) -> Result<(RunConfig, Runner), CliError> {
    Ok(match &cli.command {
        Command::Verify { suite, tol, common } => {
            let mut cfg = merge(common)?;
            cfg.set_opt("suite", suite);
            for t in tol {
                let (k, v) = t
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("--tol expects NAME=VALUE, got {t:?}")))?;
                cfg.set(&format!("tol.{}", k.trim()), v.trim());
            }
            (cfg, commands::verify)
        }
        Command::Export { kind: ExportKind::Geodesic { p0, v0, s_min, s_max, samples, common } } => {
            let mut cfg = merge(common)?;
            cfg.set_opt("p0", p0);
            cfg.set_opt("v0", v0);
            cfg.set_opt("s_min", s_min);
            cfg.set_opt("s_max", s_max);
            cfg.set_opt("samples", samples);
            (cfg, commands::export_geodesic)
        }
        Command::Export {
            kind: ExportKind::SurfaceGrid { surface, r, lambda, sheet, a, b, c, x0, y0, phi, u1, u2, common },
        } => {
            let mut cfg = merge(common)?;
            cfg.set_opt("surface", surface);
            cfg.set_opt("R", r);
            cfg.set_opt("lambda", lambda);
            cfg.set_opt("sheet", sheet);
            cfg.set_opt("a", a);
            cfg.set_opt("b", b);
            cfg.set_opt("c", c);
            cfg.set_opt("x0", x0);
            cfg.set_opt("y0", y0);
            cfg.set_opt("phi", phi);
            cfg.set_opt("u1", u1);
            cfg.set_opt("u2", u2);
            (cfg, commands::export_surface_grid)
        }
        Command::Certify { target: CertifyTarget::H2 { quad, common } } => {
            let mut cfg = merge(common)?;
            quad_flags(&mut cfg, quad);
            (cfg, commands::certify_h2)
        }
        Command::Certify { target: CertifyTarget::Helicoid { r, quad, common } } => {
            let mut cfg = merge(common)?;
            cfg.set_opt("R", r);
            quad_flags(&mut cfg, quad);
            (cfg, commands::certify_helicoid)
        }
        Command::Certify { target: CertifyTarget::Catenoid { lambda, k_max, phi_half_width, quad, common } } => {
            let mut cfg = merge(common)?;
            cfg.set_opt("lambda", lambda);
            cfg.set_opt("k_max", k_max);
            cfg.set_opt("phi_half_width", phi_half_width);
            quad_flags(&mut cfg, quad);
            (cfg, commands::certify_catenoid)
        }
    })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let (cfg, runner) = prepare(cli)?;
    let out = runner(&cfg)?;
    match cfg.get_str("output") {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?,
        None => print!("{}", out.text),
    }
    Ok(out.code as u8)
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
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("h1geom: {e}");
            ExitCode::from(e.code())
        }
    }
}
