use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sample_sched_core::experiments::{
    run_example1, run_example2, run_sweep_alpha, run_verify, write_report, Format, InstanceClass, QuantityRow,
    Report,
};
use sample_sched_core::montecarlo::{estimate_cost, estimate_regret};
use sample_sched_core::pairwise::analyze;
use sample_sched_core::{AnalysisReport, Instance, Policy, QuadratureConfig, Result};

/// Exact analysis and simulation of sample-driven single-machine scheduling.
#[derive(Parser)]
#[command(name = "sample-sched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exact cost, rog, kappa and alpha of a static policy on an instance file.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "sam")]
        policy: Policy,
        /// Relative quadrature tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo estimate of a policy's expected cost (or regret).
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "sam")]
        policy: Policy,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Estimate regret against the per-realization optimum instead of cost.
        #[arg(long)]
        regret: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Reproduce the zero-atom counterexample.
    Example1 {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long = "M", alias = "m", default_value_t = 100.0)]
        m: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Reproduce the weighted translated counterexample.
    Example2 {
        #[arg(long = "M", alias = "m", default_value_t = 100.0)]
        m: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check a class guarantee on random instances.
    Verify {
        #[arg(long)]
        class: InstanceClass,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw log-uniform weights for the translated class (guarantee not claimed).
        #[arg(long)]
        non_unit_weights: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Exponential instances against rog <= 1/(1+alpha).
    SweepAlpha {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        alphas: Vec<f64>,
        /// Random separated instances per alpha.
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Serialize)]
struct AnalyzeOutput(AnalysisReport);

impl Report for AnalyzeOutput {
    type Row = AnalysisReport;

    fn rows(&self) -> &[AnalysisReport] {
        std::slice::from_ref(&self.0)
    }

    fn passed(&self) -> bool {
        self.0.kappa_bound_ok
    }
}

#[derive(Serialize)]
struct SimulateOutput {
    rows: Vec<QuantityRow>,
}

impl Report for SimulateOutput {
    type Row = QuantityRow;

    fn rows(&self) -> &[QuantityRow] {
        &self.rows
    }

    fn passed(&self) -> bool {
        true
    }
}

fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<R: Report>(report: &R, output: &Output) -> Result<bool> {
    let mut w = open(output.out.as_deref())?;
    write_report(report, output.format, &mut w)?;
    w.flush()?;
    Ok(report.passed())
}

fn emit_analysis(report: &AnalysisReport, output: &Output) -> Result<bool> {
    if output.format == Format::Json {
        return emit(&AnalyzeOutput(report.clone()), output);
    }
    // Own CSV layout: alpha may be infinite and bound_alpha may be absent.
    let mut w = csv::Writer::from_writer(open(output.out.as_deref())?);
    w.write_record(AnalysisReport::CSV_HEADER)?;
    w.write_record(report.csv_record())?;
    w.flush()?;
    Ok(report.kappa_bound_ok)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Analyze {
            instance,
            policy,
            tol,
            output,
        } => {
            let inst = Instance::load(&instance)?;
            let cfg = match tol {
                Some(t) => QuadratureConfig::with_rel_tol(t),
                None => QuadratureConfig::default(),
            };
            cfg.validate()?;
            let report = analyze(&inst, policy, &cfg)?;
            emit_analysis(&report, &output)
        }
        Command::Simulate {
            instance,
            policy,
            trials,
            seed,
            regret,
            output,
        } => {
            let inst = Instance::load(&instance)?;
            let (quantity, est) = if regret {
                ("regret", estimate_regret(&inst, policy, trials, seed)?)
            } else {
                ("cost", estimate_cost(&inst, policy, trials, seed)?)
            };
            let row = QuantityRow {
                stderr: Some(est.stderr),
                ..QuantityRow::exact(quantity, "monte-carlo", est.mean)
            }
            .with_note(format!("policy={policy}; trials={trials}; seed={seed}"));
            emit(&SimulateOutput { rows: vec![row] }, &output)
        }
        Command::Example1 {
            n,
            m,
            eps,
            trials,
            seed,
            output,
        } => emit(&run_example1(n, m, eps, trials, seed)?, &output),
        Command::Example2 {
            m,
            eps,
            trials,
            seed,
            output,
        } => emit(&run_example2(m, eps, trials, seed)?, &output),
        Command::Verify {
            class,
            count,
            seed,
            non_unit_weights,
            output,
        } => {
            let report = run_verify(class, count, seed, non_unit_weights)?;
            eprintln!(
                "{class}: {} passed, {} failed, {} skipped, worst margin {:.3e}{}",
                report.passes,
                report.failures,
                report.skipped,
                report.worst_margin,
                if report.note.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", report.note)
                }
            );
            emit(&report, &output)
        }
        Command::SweepAlpha {
            alphas,
            count,
            seed,
            output,
        } => emit(&run_sweep_alpha(&alphas, count, seed)?, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
