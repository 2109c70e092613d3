use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cirdiff::cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "cirdiff",
    about = "CIR-difference short-rate model: curve bootstrap, calibration, simulation and pricing"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Quotes CSV (type,tenor_years,rate).
    #[arg(long, global = true)]
    quotes: Option<PathBuf>,

    /// Curve CSV (maturity_years,zero_rate,discount).
    #[arg(long, global = true)]
    curve: Option<PathBuf>,

    /// Simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Euler step in years.
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Number of Monte Carlo paths.
    #[arg(long, global = true)]
    paths: Option<usize>,

    /// Valuation date (ISO, e.g. 2019-12-30).
    #[arg(long, global = true)]
    date: Option<chrono::NaiveDate>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Calibration guess: 8 comma-separated floats
    /// phi1_x,phi2_x,phi3_x,phi1_y,phi2_y,phi3_y,x0,y0.
    #[arg(long, global = true, value_parser = parse_guess)]
    guess: Option<Guess>,

    /// Number of extra multi-start draws for the calibration.
    #[arg(long, global = true)]
    multistart: Option<usize>,

    /// Simulation horizon in years.
    #[arg(long, global = true)]
    horizon: Option<f64>,

    /// Swaption quotes CSV (maturity_years,tenor_years,strike,normal_vol).
    #[arg(long, global = true)]
    swaptions: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Guess([f64; 8]);

fn parse_guess(s: &str) -> Result<Guess, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 8 {
        return Err(format!(
            "expected 8 comma-separated floats, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; 8];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse().map_err(|_| format!("bad float '{p}'"))?;
    }
    Ok(Guess(out))
}

#[derive(Subcommand)]
enum Cmd {
    /// Bootstrap the zero curve from quotes and write curve.csv.
    Bootstrap,
    /// Calibrate the model to the curve; writes the report and the fit CSV.
    Calibrate,
    /// Simulate paths; writes discount-factor comparison, distribution and
    /// a sample trajectory.
    Simulate,
    /// Forward zero-coupon comparisons and the swaption grid report.
    Price,
    /// Run the whole pipeline and write a manifest.
    Report,
}

fn build_config(args: &Args) -> cirdiff::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(q) = &args.quotes {
        cfg.quotes = Some(q.clone());
        cfg.curve = None;
    }
    if let Some(c) = &args.curve {
        cfg.curve = Some(c.clone());
        cfg.quotes = None;
    }
    if let Some(seed) = args.seed {
        cfg.simulation.seed = seed;
    }
    if let Some(delta) = args.delta {
        cfg.simulation.delta = delta;
    }
    if let Some(paths) = args.paths {
        cfg.simulation.paths = paths;
    }
    if let Some(h) = args.horizon {
        cfg.simulation.horizon = h;
    }
    if let Some(d) = args.date {
        cfg.valuation_date = Some(d);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(g) = &args.guess {
        cfg.calibration.guess = Some(g.0);
    }
    if let Some(n) = args.multistart {
        cfg.calibration.multistart = n;
    }
    if let Some(s) = &args.swaptions {
        cfg.pricing.swaption_grid = Some(s.clone());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cmd = match args.command {
        Cmd::Bootstrap => Command::Bootstrap,
        Cmd::Calibrate => Command::Calibrate,
        Cmd::Simulate => Command::Simulate,
        Cmd::Price => Command::Price,
        Cmd::Report => Command::Report,
    };
    let cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cmd, &cfg) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
