use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coframe_cli::{
    exit_code, generate, run, to_json_string, ExperimentSpec, Family, GeneratorSpec, LambdaSpec, Operation, QSpec,
    RunOutput, SweepGrid, SystemSource, WindowSpec,
};
use coframe_core::removal::{RemovalConfig, ShrinkStrategy};
use coframe_core::{Error, Result};

#[derive(Parser)]
#[command(name = "coframe", version, about = "Coherent frames over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a coherent system as JSON.
    Gen(SystemArgs),
    /// Frame bounds, dual pairings and excess.
    Analyze(SystemArgs),
    /// Beurling densities and frame measures over the window profile.
    Density(SystemArgs),
    /// Fundamental identity residuals and the density corollaries.
    Identity(SystemArgs),
    /// Run the positive-density removal pipeline.
    Remove {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        removal: RemovalArgs,
        /// Include the intermediate matrices in the report.
        #[arg(long)]
        emit_trace: bool,
    },
    /// Recheck a removal certificate (or a fresh pipeline run) end to end.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        removal: RemovalArgs,
        /// Certificate JSON produced by `remove`.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// CSV over a grid of sizes, index-set sizes and seeds.
    Sweep {
        #[arg(long, value_enum, default_value = "gabor")]
        family: FamilyArg,
        /// Comma-separated list of N.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// Comma-separated index-set sizes; `full` for the whole group.
        #[arg(long, value_delimiter = ',', default_value = "full")]
        lambda_sizes: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, value_enum, default_value = "canonical")]
        windows: WindowArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON spec file.
    Run {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gabor,
    Heisenberg,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Canonical,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShrinkArg {
    DropLargestPairing,
    DropLargestRowSum,
}

#[derive(Args)]
struct SystemArgs {
    /// System JSON; overrides the builtin options below.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gabor")]
    family: FamilyArg,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// `e0`, `random`, or comma-separated `re:im` entries.
    #[arg(long, default_value = "random")]
    g: String,
    /// `full`, `random:K`, or a comma-separated element list.
    #[arg(long, default_value = "full")]
    lambda: String,
    /// `identity` or `canonical:R`.
    #[arg(long, default_value = "identity")]
    q: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "canonical")]
    windows: WindowArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RemovalArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = RemovalConfig::default().max_truncation_order)]
    max_truncation_order: usize,
    #[arg(long, value_enum, default_value = "drop-largest-pairing")]
    shrink: ShrinkArg,
}

impl RemovalArgs {
    fn config(&self) -> RemovalConfig {
        RemovalConfig {
            alpha: self.alpha,
            epsilon: self.epsilon,
            max_truncation_order: self.max_truncation_order,
            shrink_strategy: match self.shrink {
                ShrinkArg::DropLargestPairing => ShrinkStrategy::DropLargestPairing,
                ShrinkArg::DropLargestRowSum => ShrinkStrategy::DropLargestRowSum,
            },
        }
    }
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Gabor => Family::Gabor,
        FamilyArg::Heisenberg => Family::Heisenberg,
    }
}

fn windows(w: WindowArg) -> WindowSpec {
    match w {
        WindowArg::Canonical => WindowSpec::Canonical,
        WindowArg::Full => WindowSpec::Full,
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn parse_generator(s: &str) -> Result<GeneratorSpec> {
    if s == "e0" || s == "random" {
        return Ok(GeneratorSpec::Named(s.into()));
    }
    s.split(',')
        .map(|entry| {
            let (re, im) = entry.split_once(':').unwrap_or((entry, "0"));
            let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| invalid(format!("bad entry `{entry}`: {e}")));
            Ok([parse(re)?, parse(im)?])
        })
        .collect::<Result<_>>()
        .map(GeneratorSpec::Explicit)
}

fn parse_lambda(s: &str) -> Result<LambdaSpec> {
    if s == "full" {
        return Ok(LambdaSpec::Named(s.into()));
    }
    if let Some(k) = s.strip_prefix("random:") {
        let random = k.parse().map_err(|e| invalid(format!("bad size `{k}`: {e}")))?;
        return Ok(LambdaSpec::Random { random });
    }
    let mut list: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|e| invalid(format!("bad element `{x}`: {e}"))))
        .collect::<Result<_>>()?;
    list.sort_unstable();
    Ok(LambdaSpec::Explicit(list))
}

fn parse_q(s: &str) -> Result<QSpec> {
    if s == "identity" {
        return Ok(QSpec::Named(s.into()));
    }
    match s.strip_prefix("canonical:") {
        Some(r) => Ok(QSpec::Canonical {
            canonical: r.parse().map_err(|e| invalid(format!("bad radius `{r}`: {e}")))?,
        }),
        None => Err(invalid(format!("unknown Q `{s}`"))),
    }
}

impl SystemArgs {
    fn source(&self) -> Result<SystemSource> {
        if let Some(path) = &self.system {
            return Ok(SystemSource::File { path: path.clone() });
        }
        Ok(SystemSource::Builtin {
            family: family(self.family),
            n: self.n,
            g: parse_generator(&self.g)?,
            lambda: parse_lambda(&self.lambda)?,
            q: parse_q(&self.q)?,
        })
    }

    fn spec(&self, operation: Operation) -> Result<ExperimentSpec> {
        Ok(ExperimentSpec {
            system: Some(self.source()?),
            windows: windows(self.windows),
            seed: self.seed,
            operation,
            removal: RemovalConfig::default(),
            emit_trace: false,
            certificate: None,
            grid: None,
        })
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let (spec, out) = match cli.command {
        Command::Gen(args) => {
            let text = to_json_string(&generate(&args.source()?, args.seed)?)?;
            return emit(&text, args.out.as_ref());
        }
        Command::Analyze(args) => (args.spec(Operation::Analyze)?, args.out),
        Command::Density(args) => (args.spec(Operation::Density)?, args.out),
        Command::Identity(args) => (args.spec(Operation::Identity)?, args.out),
        Command::Remove {
            system,
            removal,
            emit_trace,
        } => {
            let mut spec = system.spec(Operation::Remove)?;
            spec.removal = removal.config();
            spec.emit_trace = emit_trace;
            (spec, system.out)
        }
        Command::Verify {
            system,
            removal,
            certificate,
        } => {
            let mut spec = system.spec(Operation::Verify)?;
            spec.removal = removal.config();
            spec.certificate = certificate;
            (spec, system.out)
        }
        Command::Sweep {
            family: f,
            ns,
            lambda_sizes,
            seeds,
            windows: w,
            out,
        } => {
            let lambda_sizes = lambda_sizes
                .iter()
                .map(|s| match s.as_str() {
                    "full" => Ok(None),
                    k => k.parse().map(Some).map_err(|e| invalid(format!("bad size `{k}`: {e}"))),
                })
                .collect::<Result<_>>()?;
            let spec = ExperimentSpec {
                system: None,
                windows: windows(w),
                seed: 0,
                operation: Operation::Sweep,
                removal: RemovalConfig::default(),
                emit_trace: false,
                certificate: None,
                grid: Some(SweepGrid {
                    family: family(f),
                    ns,
                    lambda_sizes,
                    seeds,
                }),
            };
            (spec, out)
        }
        Command::Run { spec, out } => {
            let text = fs::read_to_string(&spec)?;
            let spec: ExperimentSpec = serde_json::from_str(&text)?;
            (spec, out)
        }
    };
    let output = run(&spec)?;
    let text = output.render()?;
    if let (RunOutput::Json(v), true) = (&output, out.is_some()) {
        // report goes to a file; leave a status line on stderr
        if let Some(op) = v.get("operation") {
            eprintln!("wrote {op} report");
        }
    }
    emit(&text, out.as_ref())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
