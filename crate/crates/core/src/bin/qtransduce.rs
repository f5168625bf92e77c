use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qtransduce::amplify::NuRule;
use qtransduce::experiment::{self, ExperimentConfig, OutputFormat};
use qtransduce::io::{write_csv, write_json_file};
use qtransduce::transduce::Variant;
use qtransduce::{Error, Result};

#[derive(Parser)]
#[command(name = "qtransduce", version, about = "Multiplicative amplitude transduction on a statevector simulator")]
struct Cli {
    /// Key-value (TOML) file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Register sizes for a cutoff and relative precision.
    Plan {
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Synthesize and amplify; print diagnostics.
    Synth,
    /// Synthesize, amplify and sample the Boltzmann state.
    Sample,
    /// Reproduce the amplification table and compare against it.
    Table1,
    /// Compare pre-amplification norms of the reference methods.
    Baselines,
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long, global = true)]
    rows: Option<usize>,
    #[arg(long, global = true)]
    cols: Option<usize>,
    #[arg(long, global = true)]
    beta_j: Option<f64>,
    /// beta*J as a multiple of the critical value.
    #[arg(long, global = true)]
    beta_rel_critical: Option<f64>,
    #[arg(long, global = true)]
    variant: Option<Variant>,
    #[arg(long, global = true)]
    d: Option<u32>,
    /// Fixed number of amplification rounds.
    #[arg(long, global = true)]
    nu: Option<u32>,
    #[arg(long, global = true)]
    nu_rule: Option<NuRule>,
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Raise the statevector budget to 3 GiB.
    #[arg(long, global = true)]
    allow_large: bool,
    /// Force exactly zero amplitude below the cutoff.
    #[arg(long, global = true)]
    enforce_zero: bool,
    /// Amplitude table (CSV `index,alpha` or JSON array).
    #[arg(long, global = true)]
    alphas: Option<PathBuf>,
    /// Smallest amplitude kept by `synth --alphas` and `baselines`.
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Relative precision for `synth --alphas`.
    #[arg(long, global = true)]
    rel_precision: Option<f64>,
}

impl Flags {
    fn to_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            rows: self.rows,
            cols: self.cols,
            beta_j: self.beta_j,
            beta_rel_critical: self.beta_rel_critical,
            variant: self.variant,
            d: self.d,
            nu: self.nu,
            nu_rule: self.nu_rule,
            shots: self.shots,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            allow_large: self.allow_large.then_some(true),
            enforce_zero: self.enforce_zero.then_some(true),
            eps: self.cutoff,
            delta: self.rel_precision,
            alphas: self.alphas.clone(),
        }
    }
}

fn emit<R: serde::Serialize, W: serde::Serialize>(config: &ExperimentConfig, rows: &[R], whole: &W) -> Result<()> {
    let format = config.format.unwrap_or_default();
    match (&config.out, format) {
        (Some(path), OutputFormat::Json) => write_json_file(path, whole),
        (Some(path), OutputFormat::Csv) => qtransduce::io::write_csv_file(path, rows),
        (None, OutputFormat::Json) => {
            println!("{}", serde_json::to_string_pretty(whole)?);
            Ok(())
        }
        (None, OutputFormat::Csv) => write_csv(std::io::stdout().lock(), rows),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    config = config.merged(&cli.flags.to_config());

    match cli.command {
        Command::Plan { eps, delta } => {
            let report = experiment::plan(eps, delta)?;
            emit(&config, std::slice::from_ref(&report), &report)
        }
        Command::Synth => {
            let report = experiment::run_synth(&config)?;
            let g = &report.diagnostics;
            eprintln!(
                "{} {}: {} qubits, d={}, u^2={:.6}, nu={}, A'^2={:.5}",
                report.source,
                report.variant.name(),
                g.total_qubits,
                report.d,
                g.u_sq,
                g.nu,
                g.a_prime_sq_measured
            );
            if config.out.is_some() || config.format == Some(OutputFormat::Json) {
                let whole = ExperimentConfig {
                    format: Some(OutputFormat::Json),
                    ..config.clone()
                };
                emit(&whole, std::slice::from_ref(&report), &report)?;
            }
            Ok(())
        }
        Command::Sample => {
            let output = experiment::run_sample(&config)?;
            let g = &output.metadata.diagnostics;
            eprintln!(
                "{} qubits, nu={}, A'^2={:.5}, efficiency={:.5}",
                g.total_qubits,
                g.nu,
                g.a_prime_sq_measured,
                g.efficiency.unwrap_or(0.0)
            );
            if let Some(t) = &output.boltzmann_test {
                eprintln!("chi2={:.2} dof={} p={:.4} tvd={:.4}", t.statistic, t.dof, t.p_value, t.tvd);
            }
            match &config.out {
                Some(dir) => {
                    for path in experiment::write_sample(&output, dir, config.format.unwrap_or_default())? {
                        eprintln!("wrote {}", path.display());
                    }
                    Ok(())
                }
                None => emit(&config, &output.counts, &output.counts),
            }
        }
        Command::Table1 => {
            let shots = config.shots()?;
            let report = experiment::run_table1(
                config.nu_rule.unwrap_or_default(),
                shots,
                config.seed(),
                config.allow_large.unwrap_or(false),
            )?;
            println!("lattice  variant     qubits  d  nu  u^2       A'^2      efficiency  status");
            for r in &report.rows {
                let g = &r.diagnostics;
                println!(
                    "{0}x{0}      {1:<11} {2:>6} {3:>2} {4:>3}  {5:.6}  {6:.6}  {7:.6}    {8}",
                    r.expected.size,
                    r.expected.variant.name(),
                    g.total_qubits,
                    g.d,
                    g.nu,
                    g.u_sq,
                    g.a_prime_sq,
                    g.efficiency.unwrap_or(0.0),
                    if r.passed() { "ok" } else { "MISMATCH" }
                );
            }
            for s in &report.skipped {
                println!("skipped {s}");
            }
            if let Some(path) = &config.out {
                experiment::write_table1(&report, path, config.format.unwrap_or_default())?;
            }
            report.check()
        }
        Command::Baselines => {
            let report = experiment::run_baselines(&config)?;
            emit(&config, &report.rows, &report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    err.exit_code() as u8
}
