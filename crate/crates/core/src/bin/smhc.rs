use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use smhc::channel::check_invariants;
use smhc::code::{build_code, export_parity_check, ExportFormat, Family};
use smhc::harness::{
    default_workers, run_point, run_sweep, with_workers, write_sweep, DecoderId, SweepConfig,
    CSV_HEADER,
};
use smhc::nn::{generate_dataset, load_model_for, save_model, train, MlpSpec, TrainConfig, TrainReport};
use smhc::{Error, Result};

#[derive(Parser)]
#[command(name = "smhc", version, about = "Subsystem many-hypercube codes under bit-flip noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its parameters.
    Build {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "subsystem")]
        family: Family,
        /// Check every structural and channel invariant.
        #[arg(long)]
        validate: bool,
    },
    /// Run a p sweep described by a TOML file.
    Sweep {
        config: PathBuf,
        /// Overrides the output path of the config.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Train a network decoder for the subsystem family.
    Train {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 0.04)]
        p: f64,
        #[arg(long, default_value_t = 1 << 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        epochs: usize,
        #[arg(long, default_value_t = 256)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 0.5)]
        lr_decay: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate one logical error rate and print it as a CSV row.
    Eval {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "subsystem")]
        family: Family,
        /// bd, bd-genie, oracle, blockmap, md or nn:<model>
        #[arg(long)]
        decoder: DecoderId,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write the Z-stabilizer parity-check matrix.
    Export {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "subsystem")]
        family: Family,
        #[arg(long, default_value = "alist")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct TrainRecord<'a> {
    level: usize,
    config: &'a TrainConfig,
    report: &'a TrainReport,
}

fn build(level: usize, family: Family, validate: bool) -> Result<()> {
    let code = build_code(family, level)?;
    if validate {
        code.validate()?;
        check_invariants(&code, 200, 0)?;
    }
    let s = code.summary(level <= 2)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{s}")?;
    writeln!(out, "stab={} gauge={}", s.stabilizers, s.g)?;
    let list = |v: &[usize]| v.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",");
    writeln!(out, "check weights: {}", list(&s.check_weights))?;
    writeln!(out, "stabilizer weights: {}", list(&s.stabilizer_weights))?;
    writeln!(out, "logical weight: {}", s.logical_weight)?;
    if family == Family::Subsystem {
        let a = code.ancilla_report();
        writeln!(
            out,
            "ancillas: {} per direction, {} total with reuse, {} without; (data + ancilla) / data = {}",
            a.ancillas_per_direction, a.total_with_reuse, a.total_without_reuse, a.overhead_ratio
        )?;
    }
    if validate {
        writeln!(out, "all invariants hold")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            level,
            family,
            validate,
        } => build(level, family, validate),
        Command::Sweep {
            config,
            output,
            workers,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(out) = output {
                cfg.output = out;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            let points = run_sweep(&cfg)?;
            let meta = write_sweep(&cfg, &points)?;
            for p in &points {
                eprintln!("p={} rate={:.4e} ({} errors / {} shots)", p.p, p.rate, p.errors, p.shots);
            }
            eprintln!("wrote {} and {}", cfg.output.display(), meta.display());
            Ok(())
        }
        Command::Train {
            level,
            p,
            samples,
            seed,
            epochs,
            batch_size,
            lr,
            lr_decay,
            out,
        } => {
            let cfg = TrainConfig {
                p_train: p,
                num_samples: samples,
                batch_size,
                epochs,
                learning_rate: lr,
                lr_decay,
                seed,
                ..TrainConfig::default()
            };
            cfg.validate()?;
            let code = build_code(Family::Subsystem, level)?;
            let data = generate_dataset(&code, p, samples, seed)?;
            let net = MlpSpec::for_level(level, seed)?;
            let (net, report) = train(&net, &cfg, &data)?;
            for (epoch, loss) in report.loss_history.iter().enumerate() {
                eprintln!("epoch {epoch}: loss {loss:.6}");
            }
            save_model(&net, &out)?;
            let mut record_path = out.clone().into_os_string();
            record_path.push(".train.json");
            let record = TrainRecord {
                level,
                config: &cfg,
                report: &report,
            };
            let json =
                serde_json::to_string_pretty(&record).map_err(|e| Error::Format(e.to_string()))?;
            std::fs::write(&record_path, json)?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Eval {
            level,
            family,
            decoder,
            p,
            shots,
            seed,
            workers,
        } => {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::Usage(format!("p must lie in [0, 0.5], got {p}")));
            }
            let code = build_code(family, level)?;
            let model = match &decoder {
                DecoderId::Nn(path) => Some(load_model_for(&code, path)?),
                _ => None,
            };
            let point = with_workers(workers.unwrap_or_else(default_workers), || {
                run_point(&decoder, &code, p, shots, seed, model.as_ref())
            })??;
            let mut out = std::io::stdout().lock();
            writeln!(out, "{CSV_HEADER}")?;
            writeln!(out, "{}", point.csv_row())?;
            Ok(())
        }
        Command::Export {
            level,
            family,
            format,
            out,
        } => {
            let format: ExportFormat = format.parse()?;
            let code = build_code(family, level)?;
            export_parity_check(&code, format, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
