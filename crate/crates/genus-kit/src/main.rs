use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use genus_core::exact::{self, SearchBudget, SearchMode};
use genus_core::partition::regular_partition;
use genus_core::pipeline::{self, Config, PipelineError};
use genus_core::quotient::build_quotient;
use genus_core::rng;
use genus_core::rotation::trace_faces;
use genus_kit::formats::{self, FormatError, Report};
use genus_kit::WallClock;

#[derive(Parser)]
#[command(
    name = "genus-kit",
    version,
    about = "Genus estimation and certified embeddings for dense graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the minimum genus within the accuracy factor
    Estimate {
        graph: PathBuf,
        /// Accuracy factor in (0, 1/2]
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on partition parts
        #[arg(long)]
        k_max: Option<usize>,
        /// Also write the report to this path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Construct a rotation system and report the genus it achieves
    Embed {
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Rotation file to write
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact minimum genus by rotation-system search (small graphs)
    Exact {
        graph: PathBuf,
        /// Rotation-system budget before falling back to hill-climbing
        #[arg(long, default_value_t = 1e8)]
        max_rotations: f64,
        /// Wall-clock deadline in seconds
        #[arg(long)]
        max_seconds: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a rotation file against a graph and trace its faces
    Verify { graph: PathBuf, rotation: PathBuf },
    /// Print the partition and quotient the estimator would use
    Partition {
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Randomized,
}

enum CliError {
    /// Bad file, flag, or mismatched artifact: exit 2.
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn config_for(eps: f64, seed: u64, k_max: Option<usize>) -> Result<Config, CliError> {
    let mut cfg = Config::new(eps).map_err(|e| CliError::Input(e.to_string()))?;
    cfg.seed = seed;
    if let Some(k) = k_max {
        cfg.k_max = k;
    }
    Ok(cfg)
}

fn emit(report: &Report, path: Option<&Path>) -> Result<(), CliError> {
    let text = report.render();
    print!("{text}");
    if let Some(p) = path {
        fs::write(p, text)?;
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Estimate { graph, eps, seed, k_max, report } => {
            let g = formats::load_graph(&graph)?;
            let cfg = config_for(eps, seed, k_max)?;
            let out = pipeline::estimate(&g, &cfg)?;
            let r = Report {
                n: g.n(),
                e: g.edge_count(),
                phase: Some(out.phase),
                k: (out.phase >= 2).then_some(out.k),
                nu: (out.phase >= 2).then_some(out.nu),
                estimate: Some(out.estimate),
                lower: Some(out.lower),
                upper: Some(out.upper),
                seed: Some(seed),
                ..Report::default()
            };
            emit(&r, report.as_deref())
        }
        Cmd::Embed { graph, eps, out, seed, report } => {
            let g = formats::load_graph(&graph)?;
            let cfg = config_for(eps, seed, None)?;
            let res = pipeline::embed_with_clock(&g, &cfg, &WallClock::new())?;
            fs::write(&out, formats::format_rotation(&res.rotation))?;
            let r = Report {
                n: g.n(),
                e: g.edge_count(),
                phase: Some(res.phase),
                k: (res.k > 0).then_some(res.k),
                nu: (res.phase >= 2).then_some(res.nu),
                estimate: Some(res.estimate),
                lower: Some(res.lower),
                upper: Some(res.upper),
                genus_achieved: Some(res.genus_achieved),
                f3: Some(res.census.f3()),
                f4: Some(res.census.f4()),
                blossoms_removed: Some(res.blossoms_removed),
                g0_edges: Some(res.g0_edges),
                seed: Some(seed),
            };
            emit(&r, report.as_deref())
        }
        Cmd::Exact { graph, max_rotations, max_seconds, mode, seed } => {
            let g = formats::load_graph(&graph)?;
            let budget = SearchBudget {
                max_rotations,
                max_seconds,
                mode: match mode {
                    ModeArg::Exhaustive => SearchMode::Exhaustive,
                    ModeArg::Randomized => SearchMode::Randomized,
                },
            };
            let out = exact::exact_genus(&g, &budget, &WallClock::new(), seed);
            let census = trace_faces(&g, &out.rotation)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let genus = f64::from(out.genus);
            let r = Report {
                n: g.n(),
                e: g.edge_count(),
                phase: Some(1),
                estimate: Some(genus),
                lower: Some(if out.exact { genus } else { f64::from(out.euler_bound) }),
                upper: Some(genus),
                genus_achieved: Some(out.genus),
                f3: Some(census.f3()),
                f4: Some(census.f4()),
                seed: Some(seed),
                ..Report::default()
            };
            emit(&r, None)
        }
        Cmd::Verify { graph, rotation } => {
            let g = formats::load_graph(&graph)?;
            let rot = formats::load_rotation(&rotation, g.n())?;
            let census =
                pipeline::verify(&g, &rot).map_err(|e| CliError::Input(e.to_string()))?;
            let r = Report {
                n: g.n(),
                e: g.edge_count(),
                genus_achieved: Some(census.genus),
                f3: Some(census.f3()),
                f4: Some(census.f4()),
                ..Report::default()
            };
            emit(&r, None)
        }
        Cmd::Partition { graph, eps, seed } => {
            let g = formats::load_graph(&graph)?;
            let cfg = config_for(eps, seed, None)?;
            let reg = regular_partition(
                &g,
                cfg.eps_reg,
                cfg.m,
                cfg.max_rounds,
                cfg.k_max,
                rng::derive(cfg.seed, 0xe57),
            );
            let quotient = build_quotient(&g, &reg.partition, cfg.eps1, &reg.irregular);
            print!("{}", formats::format_partition(&reg.partition));
            print!("{}", formats::format_quotient(&quotient));
            Ok(())
        }
    }
}
