use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schmidt_core::qstate::{read_state_json, RngStream};
use schmidt_core::witness::search_witness;
use schmidt_scope::activation::{run_activation, DEFAULT_RESTARTS};
use schmidt_scope::certify::{certify_text, CertifyOptions};
use schmidt_scope::output::{self, Format};
use schmidt_scope::scan::{run_scan, ScanConfig};
use schmidt_scope::seed::{resolve_seed, SEED_ENV};
use schmidt_scope::survey::{run_survey, Measure, SurveyConfig, SurveyCriterion};
use schmidt_scope::CliError;

/// Certify entanglement dimension and unfaithfulness of bipartite states.
#[derive(Parser, Debug)]
#[command(name = "schmidt-scope", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Base seed (falls back to $SCHMIDT_SCOPE_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Bisection tolerance for `scan`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fractions of random states that are PPT, or NPT and certified unfaithful.
    Survey {
        /// Local dimension(s).
        #[arg(long = "d", num_args = 1.., default_values_t = [2usize])]
        dims: Vec<usize>,
        #[arg(long, value_enum, num_args = 1.., default_values_t = [MeasureArg::Hs])]
        measure: Vec<MeasureArg>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, value_enum, num_args = 1..)]
        criteria: Vec<CriterionArg>,
        /// JSON file with SurveyConfig fields (overrides the flags above).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Bisect criterion thresholds along the white-noise family.
    Scan {
        /// Schmidt rank r of the maximally entangled target |Psi_r>.
        #[arg(long, default_value_t = 2)]
        target_rank: usize,
        /// Local dimension of the embedding.
        #[arg(long = "d", default_value_t = 3)]
        d: usize,
        /// Dimension D of the unfaithfulness test (S_{D-1}^1 on the other side).
        #[arg(long = "dim", default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        /// Number of grid points for the margin table.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate every criterion on one state file.
    Certify {
        state: PathBuf,
        #[arg(long = "dim", default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Also search for a fidelity witness.
        #[arg(long)]
        witness: bool,
        #[arg(long, default_value_t = 2)]
        witness_dim: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Check that the activation state is unfaithful while its square is not.
    Activation {
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Search for a fidelity witness on one state file.
    Witness {
        state: PathBuf,
        #[arg(long = "dim", default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum MeasureArg {
    Hs,
    Bures,
    Real,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Hs => Measure::Hs,
            MeasureArg::Bures => Measure::Bures,
            MeasureArg::Real => Measure::Real,
        }
    }
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum CriterionArg {
    Ppt,
    Unfaithful,
    Reduction,
}

impl From<CriterionArg> for SurveyCriterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Ppt => SurveyCriterion::Ppt,
            CriterionArg::Unfaithful => SurveyCriterion::Unfaithful,
            CriterionArg::Reduction => SurveyCriterion::Reduction,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(global: &Global, text: String) -> Result<(), CliError> {
    match &global.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = &cli.global;
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(g.seed, env.as_deref()).map_err(CliError::Input)?;
    match cli.command {
        Command::Survey {
            dims,
            measure,
            samples,
            criteria,
            config,
        } => {
            let configs: Vec<SurveyConfig> = match config {
                Some(path) => {
                    let mut c: SurveyConfig = serde_json::from_str(&read(&path)?)
                        .map_err(|e| CliError::Input(format!("survey config: {e}")))?;
                    if g.workers.is_some() {
                        c.workers = g.workers;
                    }
                    vec![c]
                }
                None => dims
                    .iter()
                    .flat_map(|&d| measure.iter().map(move |&m| (d, m)))
                    .map(|(d, m)| {
                        let mut c = SurveyConfig::new(d, m.into(), samples, seed);
                        if !criteria.is_empty() {
                            c.criteria = criteria.iter().map(|&c| c.into()).collect();
                        }
                        c.workers = g.workers;
                        c
                    })
                    .collect(),
            };
            let results = configs.iter().map(run_survey).collect::<Result<Vec<_>, _>>()?;
            let text = match g.format {
                Format::Text => output::survey_text(&results),
                Format::Json => output::json(&results),
                Format::Csv => output::survey_csv(&results)?,
            };
            emit(g, text)?;
        }
        Command::Scan {
            target_rank,
            d,
            dim,
            lo,
            hi,
            grid,
            config,
        } => {
            let mut cfg = match config {
                Some(path) => serde_json::from_str(&read(&path)?)
                    .map_err(|e| CliError::Input(format!("scan config: {e}")))?,
                None => {
                    let mut c = ScanConfig::new(target_rank, d, dim);
                    c.lo = lo;
                    c.hi = hi;
                    c.grid = grid;
                    c
                }
            };
            if let Some(t) = g.tolerance {
                cfg.tolerance = t;
            }
            if g.workers.is_some() {
                cfg.workers = g.workers;
            }
            let report = run_scan(&cfg)?;
            let text = match g.format {
                Format::Text => output::scan_text(&report),
                Format::Json => output::json(&report),
                Format::Csv => output::scan_csv(&report)?,
            };
            emit(g, text)?;
        }
        Command::Certify {
            state,
            dim,
            level,
            witness,
            witness_dim,
            restarts,
        } => {
            let opts = CertifyOptions {
                dim,
                level,
                witness: witness.then_some((witness_dim, restarts)),
                seed,
            };
            let report = schmidt_scope::with_workers(g.workers, || certify_text(&read(&state)?, &opts))?;
            let text = match g.format {
                Format::Text => output::certify_text(&report),
                Format::Json => output::json(&report),
                Format::Csv => output::certify_csv(&report)?,
            };
            emit(g, text)?;
        }
        Command::Activation { restarts } => {
            let report = run_activation(restarts, seed, g.workers)?;
            let text = match g.format {
                Format::Text => output::activation_text(&report),
                Format::Json => output::json(&report),
                Format::Csv => output::activation_csv(&report),
            };
            emit(g, text)?;
            if !report.reproduced {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Witness { state, dim, restarts } => {
            let rho = read_state_json(&read(&state)?)?;
            let w = schmidt_scope::with_workers(g.workers, || {
                search_witness(&rho, dim, restarts, RngStream::new(seed, 0))
            })?;
            let report = schmidt_scope::certify::WitnessEntry {
                dim,
                restarts,
                violation: w.violation,
                re: w.psi.amplitudes().iter().map(|z| z.re).collect(),
                im: w.psi.amplitudes().iter().map(|z| z.im).collect(),
            };
            let text = match g.format {
                Format::Json => output::json(&report),
                _ => format!("violation {}\n", schmidt_scope::scan::format_sig12(w.violation)),
            };
            emit(g, text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
