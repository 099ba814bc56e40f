use clap::{Parser, Subcommand, ValueEnum};
use nonlocal_cli::config::{parse_config_as, validate, Config, Format, RawConfig};
use nonlocal_cli::output::{emit_csv, emit_svg, file_stem};
use nonlocal_cli::registry::{registry_help, Experiment, Named};
use nonlocal_cli::run::{run, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "nonlocal", version, about = "Runs nonlocal vector calculus experiments", after_help = registry_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 picks one per core. NONLOCAL_THREADS is used when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    max_evals: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Normalization and moment checks of a kernel family.
    CheckKernel,
    /// Nonlocal Gauss-Green identity.
    NtCheck,
    /// Nonlocal divergence against the local divergence.
    ConvergeDc,
    /// Exterior normal integral against the boundary flux.
    ConvergeNc,
    /// Concentration of the fractional kernels.
    ApproxIdentity,
    /// Perimeter, mollified maximizers, p-Laplacian and curvature.
    FracSuite,
    /// Fractional perimeter sweep and scaling.
    Perimeter,
    /// Fractional mean curvature.
    Curvature,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::CheckKernel => Experiment::CheckKernel,
            Command::NtCheck => Experiment::NtCheck,
            Command::ConvergeDc => Experiment::ConvergeDc,
            Command::ConvergeNc => Experiment::ConvergeNc,
            Command::ApproxIdentity => Experiment::ApproxIdentity,
            Command::FracSuite => Experiment::FracSuite,
            Command::Perimeter => Experiment::Perimeter,
            Command::Curvature => Experiment::Curvature,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

fn load(cli: &Cli) -> Result<Config, String> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config_as(&text, Some(experiment)).map_err(|ds| {
                ds.iter()
                    .map(|d| format!("{}: {d}", path.display()))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?
        }
        None => {
            let raw = RawConfig {
                experiment: Some(experiment.name().to_string()),
                ..RawConfig::default()
            };
            validate(raw, None).map_err(|ds| {
                ds.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("\n")
            })?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    for (name, v) in [("rel-tol", cli.rel_tol), ("abs-tol", cli.abs_tol)] {
        if let Some(t) = v {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--{name} = {t} out of range: must be positive"));
            }
        }
    }
    cfg.quad.rel_tol = cli.rel_tol.or(cfg.quad.rel_tol);
    cfg.quad.abs_tol = cli.abs_tol.or(cfg.quad.abs_tol);
    cfg.quad.max_evals = cli.max_evals.or(cfg.quad.max_evals);
    if let Some(f) = cli.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::CsvSvg => Format::CsvSvg,
        };
    }
    Ok(cfg)
}

fn threads(cli: &Cli) -> Result<usize, String> {
    match cli.threads {
        Some(n) => Ok(n),
        None => match std::env::var("NONLOCAL_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| format!("NONLOCAL_THREADS = `{v}` is not a thread count")),
            Err(_) => Ok(0),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let setup = threads(&cli).and_then(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
        load(&cli)
    });
    let cfg = match setup {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let reports = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                RunError::Config(_) => EXIT_CONFIG,
                RunError::Numerical(_) => EXIT_FAILED,
            });
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.out_dir) {
        eprintln!("error: {}: {e}", cfg.out_dir.display());
        return ExitCode::from(EXIT_FAILED);
    }
    let mut passed = true;
    for report in &reports {
        println!("{report}");
        passed &= report.passed();
        let stem = file_stem(&report.id);
        let mut written = emit_csv(report, &cfg.out_dir.join(format!("{stem}.csv")));
        if cfg.format == Format::CsvSvg {
            written =
                written.and_then(|()| emit_svg(report, &cfg.out_dir.join(format!("{stem}.svg"))));
        }
        if let Err(e) = written {
            eprintln!("error: writing {stem}: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    }
    if passed {
        println!("PASS");
        ExitCode::SUCCESS
    } else {
        println!("FAIL");
        ExitCode::from(EXIT_FAILED)
    }
}
