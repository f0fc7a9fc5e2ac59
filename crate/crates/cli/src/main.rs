use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use friedrichs_cli::config::{parse_k, parse_point};
use friedrichs_cli::{run, CliError, Command, Format, RunConfig};

/// Spectrum, thresholds and bands of the lattice Friedrichs model on T³.
///
/// Reports are JSON (or CSV for spectrum, bands and scan-gamma) and embed the
/// resolved configuration, so `--config report.json` re-runs a computation.
/// Exit codes: 0 success, 2 invalid input, 3 numerical failure or a failed
/// verification, 1 when the report cannot be written.
#[derive(Debug, Parser)]
#[command(name = "friedrichs", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Coupling function, e.g. "1", "cos(p1) + 0.5", "(1 - cos(p1))^2 sin(2p3)"
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Quasi-momentum "k1,k2,k3"
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Threshold point: origin, lambda:i, or lambda with --i
    #[arg(long)]
    point: Option<String>,
    /// Index of a point of Λ, 1..=8
    #[arg(long)]
    i: Option<usize>,
    /// Per-axis k-grid size for bands
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_max: Option<f64>,
    /// Number of γ samples for scan-gamma
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Per-axis node count of the coarsest quadrature grid
    #[arg(long)]
    quad_n: Option<usize>,
    /// Relative tolerance of the quadrature refinement
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Radius of the ball around a threshold singularity
    #[arg(long)]
    ball_radius: Option<f64>,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    threads: Option<usize>,
    /// JSON run configuration, or a previous report; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigFile {
        path: shown.clone(),
        source,
    })?;
    let bad = |source| CliError::ConfigJson {
        path: shown.clone(),
        source,
    };
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    // a report carries its configuration under "config"
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(bad)
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::new(cli.command),
    };
    c.command = cli.command;
    if cli.gamma.is_some() {
        c.model.gamma = cli.gamma;
    }
    if cli.mu.is_some() {
        c.model.mu = cli.mu;
    }
    if let Some(v) = &cli.v {
        c.v = v.clone();
    }
    if let Some(k) = &cli.k {
        c.k = Some(parse_k(k)?);
    }
    if cli.i.is_some() {
        c.i = cli.i;
    }
    if let Some(p) = &cli.point {
        c.point = Some(parse_point(p, cli.i)?);
    }
    if cli.resolution.is_some() {
        c.resolution = cli.resolution;
    }
    if cli.gamma_min.is_some() || cli.gamma_max.is_some() {
        let [lo, hi] = c.gamma_range.unwrap_or(friedrichs_cli::config::DEFAULT_GAMMA_RANGE);
        c.gamma_range = Some([cli.gamma_min.unwrap_or(lo), cli.gamma_max.unwrap_or(hi)]);
    }
    if cli.steps.is_some() {
        c.steps = cli.steps;
    }
    if cli.output.is_some() {
        c.output_path = cli.output.clone();
    }
    if let Some(f) = cli.format {
        c.format = f;
    }
    if let Some(n) = cli.quad_n {
        c.quadrature.base_grid = n;
    }
    if let Some(t) = cli.quad_tol {
        c.quadrature.target_rel_tol = t;
    }
    if let Some(r) = cli.ball_radius {
        c.quadrature.ball_radius = r;
    }
    Ok(c)
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let config = resolve(cli)?;
    let outcome = run(&config)?;
    let text = outcome.render()?;
    match &config.output_path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a closed pipe (`| head`) is the reader's choice, not a failure
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Output(e.to_string())),
                _ => {}
            }
        }
    }
    Ok(!outcome.failed_checks)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("friedrichs: some verification checks failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("friedrichs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
