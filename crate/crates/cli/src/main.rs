use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tpvr::exponent::parse_exponent_list;
use tpvr::harness::{
    exponents_grid, exponents_report, grid_to_csv, records_to_csv, sweep, verify, vr_numeric, Quantity,
    DEFAULT_TOLERANCE, SCHEMA_VERSION,
};
use tpvr::idnorm::{idnorm_estimate, idnorm_ratio_search};
use tpvr::io::read_tensor;
use tpvr::norm::{eps_norm_ascend, eps_norm_exact, pi_norm, PiOptions};
use tpvr::volume::{radial_volume, schuett_lower_bound, BallSpec, NormKind, NormMode};
use tpvr::{Error, Result, SpaceSpec};

#[derive(Parser)]
#[command(
    name = "tpg",
    version,
    about = "Tensor norms, ball volumes and volume ratios of lp tensor products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Certified,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pi,
    Eps,
}

impl From<Kind> for NormKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Pi => NormKind::Pi,
            Kind::Eps => NormKind::Eps,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent tables for one spec, or the whole 3-fold grid.
    Exponents {
        /// Comma-separated exponents, e.g. `1,4/3,inf`.
        #[arg(long, required_unless_present = "grid")]
        spec: Option<String>,
        #[arg(long)]
        grid: bool,
        /// Use the k-fold bounds even when k = 3.
        #[arg(long)]
        kfold: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Injective or projective norm of a stored tensor.
    Norm {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value = "pi")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "heuristic")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo volume of a tensor unit ball.
    Volume {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "pi")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "heuristic")]
        mode: Mode,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Bracket on the norm of the identity from l2.
    Idnorm {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        /// Hill-climbing restarts for an extra heuristic lower bound.
        #[arg(long, default_value_t = 0)]
        search: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Bracket on the volume ratio.
    Vr {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep over n and compare the fitted slope with the exponent tables.
    Sweep {
        #[arg(long)]
        spec: String,
        /// Comma-separated, strictly increasing, e.g. `2,3,4`.
        #[arg(long)]
        n_list: String,
        #[arg(long, default_value = "vr")]
        quantity: String,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run a named invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_only(output: &Output, command: &str) -> Result<()> {
    match output.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Usage(format!(
            "`{command}` has no tabular output; use --format json"
        ))),
    }
}

fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad entry {s:?} in --n-list")))
        })
        .collect()
}

fn csv_sibling(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Exponents {
            spec,
            grid,
            kfold,
            output,
        } => {
            if grid {
                let rows = exponents_grid();
                let text = match output.format {
                    Format::Json => pretty(&json!({ "schema": SCHEMA_VERSION, "rows": rows }))?,
                    Format::Csv => grid_to_csv(&rows)?,
                };
                return emit(&output, &text);
            }
            json_only(&output, "exponents --spec")?;
            let exps = parse_exponent_list(spec.as_deref().unwrap_or_default())?;
            emit(&output, &pretty(&exponents_report(&exps, kfold)?)?)
        }
        Command::Norm {
            tensor,
            spec,
            kind,
            mode,
            seed,
            output,
        } => {
            json_only(&output, "norm")?;
            let a = read_tensor(&tensor)?;
            let spec = SpaceSpec::parse(&spec, a.n())?;
            let body = match (kind, mode) {
                (Kind::Eps, Mode::Certified) => {
                    let (value, witness) = eps_norm_exact(&a, &spec)?.ok_or_else(|| {
                        Error::Unsupported(format!("no exact injective oracle for {spec} at n = {}", a.n()))
                    })?;
                    json!({ "schema": SCHEMA_VERSION, "kind": "eps", "value": value, "witness": witness })
                }
                (Kind::Eps, Mode::Heuristic) => {
                    let est = eps_norm_ascend(&a, &spec, 16, 1e-10)?;
                    json!({ "schema": SCHEMA_VERSION, "kind": "eps", "estimate": est })
                }
                (Kind::Pi, _) => {
                    let opts = PiOptions {
                        seed,
                        ..PiOptions::default()
                    };
                    let est = pi_norm(&a, &spec, &opts)?;
                    json!({ "schema": SCHEMA_VERSION, "kind": "pi", "estimate": est })
                }
            };
            emit(&output, &pretty(&body)?)
        }
        Command::Volume {
            spec,
            n,
            kind,
            mode,
            samples,
            seed,
            output,
        } => {
            json_only(&output, "volume")?;
            let spec = SpaceSpec::parse(&spec, n)?;
            let mode = match mode {
                Mode::Certified => NormMode::ExactOracle,
                Mode::Heuristic => NormMode::Heuristic,
            };
            let ball = BallSpec::tensor(kind.into(), spec, mode)?;
            if ball.dim() > tpvr::volume::SANTALO_MAX_DIM {
                return Err(Error::ResourceGuard(format!(
                    "dimension {} is above the Monte Carlo limit",
                    ball.dim()
                )));
            }
            let estimate = radial_volume(&ball, samples, seed)?;
            let schuett = schuett_lower_bound(&ball, samples, tpvr::sampling::child_seed(seed, 1))?;
            let body = json!({
                "schema": SCHEMA_VERSION,
                "ball": ball.label(),
                "vol_root": estimate.vol_root(),
                "estimate": estimate,
                "schuett_lower": schuett,
            });
            emit(&output, &pretty(&body)?)
        }
        Command::Idnorm {
            spec,
            n,
            search,
            seed,
            output,
        } => {
            json_only(&output, "idnorm")?;
            let spec = SpaceSpec::parse(&spec, n)?;
            let estimate = idnorm_estimate(&spec)?;
            let searched = if search > 0 {
                let found = idnorm_ratio_search(&spec, search, seed)?;
                Some(json!({ "value": found.value, "label": found.label }))
            } else {
                None
            };
            let body = json!({ "schema": SCHEMA_VERSION, "estimate": estimate, "search": searched });
            emit(&output, &pretty(&body)?)
        }
        Command::Vr {
            spec,
            n,
            samples,
            seed,
            output,
        } => {
            json_only(&output, "vr")?;
            let spec = SpaceSpec::parse(&spec, n)?;
            let record = vr_numeric(&spec, samples, seed)?;
            emit(
                &output,
                &pretty(&json!({ "schema": SCHEMA_VERSION, "spec": spec.exponent_label(), "record": record }))?,
            )
        }
        Command::Sweep {
            spec,
            n_list,
            quantity,
            samples,
            seed,
            tolerance,
            output,
        } => {
            let exps = parse_exponent_list(&spec)?;
            let quantity: Quantity = quantity.parse()?;
            let report = sweep(quantity, &exps, &parse_n_list(&n_list)?, samples, seed, tolerance)?;
            let csv = records_to_csv(&report.records)?;
            match output.format {
                Format::Json => {
                    emit(&output, &(report.to_json() + "\n"))?;
                    if let Some(path) = &output.out {
                        std::fs::write(csv_sibling(path), &csv)?;
                    }
                }
                Format::Csv => emit(&output, &csv)?,
            }
            if let Some(f) = report.failures.first() {
                return Err(match f.exit_code {
                    2 => Error::ResourceGuard(format!("n = {}: {}", f.n, f.message)),
                    3 => Error::Numerical(format!("n = {}: {}", f.n, f.message)),
                    _ => Error::Usage(format!("n = {}: {}", f.n, f.message)),
                });
            }
            Ok(())
        }
        Command::Verify { suite, seed, output } => {
            json_only(&output, "verify")?;
            let summary = verify(&suite, seed)?;
            emit(&output, &pretty(&summary)?)?;
            if !summary.passed {
                let failed: Vec<&str> = summary
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Error::Verification(failed.join(", ")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tpg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
