use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bs_quantize::config::DecayConfig;
use bs_quantize::setup::PRESET_HELP;
use bs_quantize::{run, ExperimentConfig, ExperimentKind, ExperimentReport, OutputFormat, WGrid};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bs-quantize", version, about = "Scaling experiments for quantized Legendrian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the Szegő kernel at rescaled arguments with the Heisenberg Gaussian.
    KernelCheck(Common),
    /// Evaluate quantized states on a grid, without verdicts.
    Quantize(Common),
    /// Transverse profile and error order of the truncated expansion.
    Profile(Common),
    /// Decay away from the circle orbit of the Legendrian.
    Decay(Common),
    /// Quadrature convergence under node doubling.
    Convergence(Common),
    /// List model spaces and loop presets.
    Models,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `bf:<d>` or `cp1:<D>`.
    #[arg(long)]
    model: Option<String>,
    /// Loop preset, `<name>[:<params>]`.
    #[arg(long = "loop")]
    loop_preset: Option<String>,
    /// Levels, strictly ascending.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Tangent vectors `"<re>,<im>[;...]"`.
    #[arg(long, conflicts_with = "w_grid", allow_hyphen_values = true)]
    w: Option<String>,
    /// Grid `"p=<start>:<stop>:<step>,q=<start>:<stop>:<step>"`.
    #[arg(long, allow_hyphen_values = true)]
    w_grid: Option<String>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Constant in the validity window `‖w‖ ≤ c·k^{1/6}`.
    #[arg(long)]
    window_const: Option<f64>,
    /// Number of leading levels used to calibrate remainder constants.
    #[arg(long)]
    calibration: Option<usize>,
    /// Loop parameter of the base point.
    #[arg(long, allow_hyphen_values = true)]
    base_t: Option<f64>,
    #[arg(long)]
    quad_nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exponent `a` in `‖w⊥‖ = c·k^a`.
    #[arg(long)]
    decay_exponent: Option<f64>,
    /// Constants `c` in `‖w⊥‖ = c·k^a`.
    #[arg(long, value_delimiter = ',')]
    decay_constants: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl Common {
    fn resolve(self) -> anyhow::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.model {
            c.model = v;
        }
        if let Some(v) = self.loop_preset {
            c.loop_preset = v;
        }
        if let Some(v) = self.k {
            c.k_list = v;
        }
        if let Some(v) = self.w {
            c.w_grid = WGrid::parse_points(&v)?;
        }
        if let Some(v) = self.w_grid {
            c.w_grid = WGrid::parse_grid(&v)?;
        }
        if let Some(v) = self.ell {
            c.ell = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.window_const {
            c.window_const = v;
        }
        if let Some(v) = self.calibration {
            c.calibration = Some(v);
        }
        if let Some(v) = self.base_t {
            c.base_parameter = v;
        }
        if let Some(v) = self.quad_nodes {
            c.quad_nodes = Some(v);
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        let DecayConfig { exponent, constants, .. } = &mut c.decay;
        if let Some(v) = self.decay_exponent {
            *exponent = v;
        }
        if let Some(v) = self.decay_constants {
            *constants = v;
        }
        if let Some(v) = self.format {
            c.format = match v {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
        }
        if let Some(v) = self.out {
            c.out = Some(v);
        }
        if let Some(v) = self.svg {
            c.svg = Some(v);
        }
        c.validate()?;
        Ok(c)
    }
}

fn list_models() {
    println!("models:");
    println!("  bf:<d>     Bargmann-Fock model over C^d");
    println!("  cp1:<D>    projective line with the degree-D bundle");
    println!("loop presets:");
    for (name, what) in PRESET_HELP {
        println!("  {name}\n      {what}");
    }
}

fn emit(report: &ExperimentReport) -> anyhow::Result<()> {
    let text = match report.config.format {
        OutputFormat::Csv => report.to_csv()?,
        OutputFormat::Json => report.to_json()?,
    };
    match &report.config.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &report.config.svg {
        std::fs::write(path, bs_quantize::svg::render(report)).with_context(|| format!("writing {}", path.display()))?;
    }
    for (name, fit) in &report.fits {
        if fit.dropped > 0 {
            eprintln!("warning: {name}: dropped {} nonpositive samples", fit.dropped);
        }
        eprintln!("fit {name}: slope {:.4} ± {:.4}", fit.slope, fit.confidence);
    }
    for (name, verdict) in &report.verdicts {
        eprintln!("verdict {name}: {verdict:?}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (kind, common) = match cli.command {
        Command::Models => {
            list_models();
            return ExitCode::SUCCESS;
        }
        Command::KernelCheck(c) => (ExperimentKind::KernelCheck, c),
        Command::Quantize(c) => (ExperimentKind::Quantize, c),
        Command::Profile(c) => (ExperimentKind::Profile, c),
        Command::Decay(c) => (ExperimentKind::Decay, c),
        Command::Convergence(c) => (ExperimentKind::Convergence, c),
    };
    let config = match common.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let report = match run(kind, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
