use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpmin::qe::Rule;
use dpmin::runner::{
    replay, run, DeltaSpec, ExperimentConfig, HahnConfig, Kind, PadicConfig, QeConfig, RunError, RunReport,
    VcConfig, SCHEMA_VERSION,
};
use dpmin::vc::Recipe;

#[derive(Parser)]
#[command(name = "dpmin", version, about = "Exact desk-scale experiments on dp-minimal structures")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "DPMIN_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML). Its values take precedence over flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write <STEM>.report.toml and <STEM>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Bounded search for an ICT pattern.
    IctSearch(Common),
    /// Check an inp certificate.
    InpCheck(Common),
    /// Breakpoint profile of an indiscernible-style sequence.
    Breakpoints(Common),
    /// Exact Δ-type counts and the fitted growth exponent.
    VcProfile {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "simple_dlo")]
        structure: String,
        /// Δ formula in x with parameter y; repeatable.
        #[arg(long = "delta")]
        deltas: Vec<String>,
        #[arg(long, default_value = "uniform-grid")]
        recipe: String,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        sizes: Vec<usize>,
    },
    /// Quantifier elimination for the lexicographic group.
    Qe {
        #[command(flatten)]
        common: Common,
        /// Formula to eliminate; without it the seeded block corpus runs.
        formula: Option<String>,
        #[arg(long, default_value = "validated")]
        rule: Rule,
        #[arg(long, default_value_t = 6)]
        oracle_grid: usize,
        #[arg(long, default_value_t = 500)]
        blocks: usize,
    },
    /// Class arithmetic, axioms and R_n on finite-support Hahn series.
    HahnVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// RV criterion and least cell-like k on p-adic approximations.
    PadicVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long = "p", value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
        #[arg(long = "n", value_delimiter = ',')]
        ns: Vec<u32>,
        #[arg(long = "k", value_delimiter = ',')]
        ks: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        precision: u32,
        #[arg(long, default_value_t = 0)]
        triples: usize,
        #[arg(long, default_value_t = 8)]
        bound: u32,
    },
    /// Re-run the config echoed in a report and diff the tables.
    Replay {
        report: PathBuf,
    },
}

fn base(kind: Kind, seed: Option<u64>) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        kind,
        name: None,
        seed,
        structure: None,
        ict: None,
        inp: None,
        breakpoints: None,
        vc: None,
        qe: None,
        hahn: None,
        padic: None,
    }
}

fn load(common: &Common, kind: Kind) -> Result<Option<ExperimentConfig>, RunError> {
    let Some(path) = &common.config else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    if cfg.kind != kind {
        return Err(RunError::Config(format!(
            "config is for {}, not {}",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(Some(cfg))
}

fn config_only(common: &Common, kind: Kind) -> Result<ExperimentConfig, RunError> {
    load(common, kind)?.ok_or_else(|| RunError::Config(format!("{} needs --config", kind.as_str())))
}

fn build(cmd: &Command) -> Result<(ExperimentConfig, Option<PathBuf>), RunError> {
    Ok(match cmd {
        Command::IctSearch(c) => (config_only(c, Kind::IctSearch)?, c.out.clone()),
        Command::InpCheck(c) => (config_only(c, Kind::InpCheck)?, c.out.clone()),
        Command::Breakpoints(c) => (config_only(c, Kind::Breakpoints)?, c.out.clone()),
        Command::VcProfile { common, structure, deltas, recipe, sizes } => {
            let cfg = match load(common, Kind::VcProfile)? {
                Some(cfg) => cfg,
                None => {
                    let recipe = match recipe.as_str() {
                        "uniform-grid" | "uniform_grid" => Recipe::UniformGrid,
                        "two-family" | "two_family" => Recipe::TwoFamily,
                        "random" => Recipe::Random,
                        other => return Err(RunError::Config(format!("unknown recipe `{other}`"))),
                    };
                    let mut cfg = base(Kind::VcProfile, common.seed);
                    cfg.structure = Some(structure.clone());
                    cfg.vc = Some(VcConfig {
                        element_var: "x".into(),
                        deltas: deltas.iter().map(|d| DeltaSpec { formula: d.clone(), params: vec!["y".into()] }).collect(),
                        delta_id: if deltas.is_empty() { "empty".into() } else { "cli".into() },
                        recipe,
                        sizes: sizes.clone(),
                        expect_counts: None,
                        expect_slope: None,
                        slope_tolerance: None,
                    });
                    cfg
                }
            };
            (cfg, common.out.clone())
        }
        Command::Qe { common, formula, rule, oracle_grid, blocks } => {
            let cfg = match load(common, Kind::Qe)? {
                Some(cfg) => cfg,
                None => {
                    let mut cfg = base(Kind::Qe, common.seed.or(Some(0)));
                    cfg.qe = Some(QeConfig {
                        rule: *rule,
                        oracle_grid: *oracle_grid,
                        formula: formula.clone(),
                        blocks: if formula.is_some() { 0 } else { *blocks },
                        include_regression: formula.is_none(),
                        expect_agreement: *rule == Rule::Validated,
                    });
                    cfg
                }
            };
            (cfg, common.out.clone())
        }
        Command::HahnVerify { common, samples } => {
            let cfg = match load(common, Kind::HahnVerify)? {
                Some(cfg) => cfg,
                None => {
                    let mut cfg = base(Kind::HahnVerify, common.seed.or(Some(0)));
                    cfg.hahn = Some(HahnConfig {
                        samples: *samples,
                        axioms: ["3", "5", "5'", "6", "7", "8", "8'"].iter().map(|s| s.to_string()).collect(),
                    });
                    cfg
                }
            };
            (cfg, common.out.clone())
        }
        Command::PadicVerify { common, primes, ns, ks, precision, triples, bound } => {
            let cfg = match load(common, Kind::PadicVerify)? {
                Some(cfg) => cfg,
                None => {
                    let mut cfg = base(Kind::PadicVerify, common.seed.or(Some(0)));
                    cfg.padic = Some(PadicConfig {
                        primes: primes.clone(),
                        ks: ks.clone(),
                        precision: *precision,
                        triples: *triples,
                        ns: ns.clone(),
                        bound: *bound,
                        expect_k: Vec::new(),
                    });
                    cfg
                }
            };
            (cfg, common.out.clone())
        }
        Command::Replay { .. } => unreachable!(),
    })
}

fn emit(report: &RunReport, out: Option<&PathBuf>) -> Result<(), RunError> {
    if let Some(stem) = out {
        report.write(stem)?;
    }
    let mut stdout = std::io::stdout().lock();
    let printed = match out {
        Some(stem) => write!(
            stdout,
            "{}wrote {} and {}\n",
            report.summary(),
            stem.with_extension("report.toml").display(),
            stem.with_extension("csv").display()
        ),
        None => write!(stdout, "{}{}", report.summary(), report.csv),
    };
    match printed.and_then(|_| stdout.flush()) {
        // A closed pipe (`| head`) is not an error.
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Replay { report } => replay(report, cli.workers).map(|r| {
            if r.diffs.is_empty() {
                println!("replay of {}: tables identical", report.display());
                r.report.exit_code()
            } else {
                println!("replay of {}: {} differing lines", report.display(), r.diffs.len());
                for d in &r.diffs {
                    println!("  {d}");
                }
                1
            }
        }),
        cmd => build(cmd).and_then(|(cfg, out)| {
            let report = run(&cfg, cli.workers)?;
            emit(&report, out.as_ref())?;
            Ok(report.exit_code())
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dpmin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
