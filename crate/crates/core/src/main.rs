use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use elocast::matchmodels::ModelFamily;
use elocast::pipeline::{validate_all, RunInputs};
use elocast::report::{
    coefficients_json, diagnostics_csv, diagnostics_json, parse_coefficients_json, sankey, sankey_svg,
    score_csv, stage_csv, write_file, RunMetadata, StageEncoding,
};
use elocast::scoring::{score_all, RpsVariant};
use elocast::tournament::{PenaltyModel, SimConfig, StageDistribution};
use elocast::{Error, Result};

#[derive(Parser)]
#[command(name = "elocast", version, about = "Elo-covariate Poisson forecasts for World Cup tournaments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit match models for every participant.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Model family, or `all`.
        #[arg(long, default_value = "all")]
        model: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulate the tournament and write stage tables and the Sankey diagram.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "nested")]
        model: ModelFamily,
        /// Coefficients from `fit`; refit from the data when absent.
        #[arg(long)]
        coefficients: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fit, simulate and score all four families against a realized result.
    Validate {
        #[command(flatten)]
        input: InputArgs,
        /// Knockout record CSV; defaults to the preset's shipped result.
        #[arg(long)]
        realized: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        /// Compare the cumulative forecast against the point indicator.
        #[arg(long)]
        rps_literal: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rebuild stage tables, Sankey output and scores from a saved distribution.
    Report {
        /// `distribution.json` written by `simulate`.
        #[arg(long)]
        distribution: PathBuf,
        #[arg(long)]
        realized: Option<PathBuf>,
        /// Preset whose shipped result is used when `--realized` is absent.
        #[arg(long)]
        preset: Option<u16>,
        #[arg(long)]
        rps_literal: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Match CSV file or directory of CSV files.
    #[arg(long, default_value = "data/matches")]
    data: PathBuf,
    /// Built-in configuration: 2010, 2014 or 2018.
    #[arg(long, conflicts_with_all = ["format", "filter"])]
    preset: Option<u16>,
    /// Elo snapshot CSV; required without `--preset`.
    #[arg(long)]
    elo: Option<PathBuf>,
    /// Tournament format JSON; required without `--preset`.
    #[arg(long, requires = "filter")]
    format: Option<PathBuf>,
    /// Data filter JSON; required without `--preset`.
    #[arg(long, requires = "format")]
    filter: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Replications.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value_t = 2018)]
    seed: u64,
    #[arg(long, default_value_t = elocast::elo::WORLD_CUP_K)]
    k_factor: f64,
    /// Keep Elo ratings fixed during a replication.
    #[arg(long)]
    no_elo_update: bool,
    /// Worker threads; all cores by default.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Penalties::Rates)]
    penalties: Penalties,
}

#[derive(Clone, Copy, ValueEnum)]
enum Penalties {
    Rates,
    Coin,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            replications: self.n,
            seed: self.seed,
            update_elo: !self.no_elo_update,
            k_factor: self.k_factor,
            threads: self.workers,
        }
    }

    fn penalty_model(&self) -> PenaltyModel {
        match self.penalties {
            Penalties::Rates => PenaltyModel::RateProportional,
            Penalties::Coin => PenaltyModel::FairCoin,
        }
    }
}

impl InputArgs {
    fn load(&self) -> Result<RunInputs> {
        match (self.preset, &self.format, &self.filter, &self.elo) {
            (Some(y), _, _, elo) => RunInputs::from_preset(y, &self.data, elo.as_deref()),
            (None, Some(format), Some(filter), Some(elo)) => RunInputs::from_files(format, elo, filter, &self.data),
            _ => Err(Error::InvalidInput(
                "give --preset, or all of --format, --filter and --elo".into(),
            )),
        }
    }
}

fn families(model: &str) -> Result<Vec<ModelFamily>> {
    if model == "all" {
        Ok(ModelFamily::ALL.to_vec())
    } else {
        Ok(vec![model.parse()?])
    }
}

fn variant(literal: bool) -> RpsVariant {
    if literal {
        RpsVariant::Literal
    } else {
        RpsVariant::Cumulative
    }
}

fn write_stage_outputs(out: &Path, stem: &str, dist: &StageDistribution, meta: &RunMetadata) -> Result<()> {
    write_file(
        &out.join(format!("{stem}stages.csv")),
        &stage_csv(dist, StageEncoding::Cumulative, meta),
    )?;
    write_file(
        &out.join(format!("{stem}stages_exclusive.csv")),
        &stage_csv(dist, StageEncoding::Exclusive, meta),
    )?;
    let s = sankey(dist, meta);
    write_file(&out.join(format!("{stem}sankey.json")), &serde_json::to_string_pretty(&s)?)?;
    write_file(&out.join(format!("{stem}sankey.svg")), &sankey_svg(&s))?;
    write_file(
        &out.join(format!("{stem}distribution.json")),
        &serde_json::to_string_pretty(&Saved { metadata: meta, distribution: dist })?,
    )
}

#[derive(serde::Serialize)]
struct Saved<'a> {
    metadata: &'a RunMetadata,
    distribution: &'a StageDistribution,
}

#[derive(serde::Deserialize)]
struct Loaded {
    metadata: RunMetadata,
    distribution: StageDistribution,
}

fn top_table(dist: &StageDistribution, rows: usize) -> String {
    let mut s = String::from("team                      champion  final   semi    quarter r16\n");
    for i in dist.ranking().into_iter().take(rows) {
        let r = dist.reach(i);
        let _ = writeln!(
            s,
            "{:<25} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
            dist.teams[i], r[0], r[1], r[2], r[3], r[4]
        );
    }
    s
}

fn score_table(rows: &[(ModelFamily, elocast::scoring::ScoreReport)]) -> String {
    let mut s = String::from("model         E1      E2       Brier    RPS\n");
    for (f, r) in rows {
        let _ = writeln!(s, "{:<12} {:>4} {:>8.4} {:>8.4} {:>8.4}", f.as_str(), r.e1, r.e2, r.brier, r.rps);
    }
    s
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { input, model, out } => {
            let inputs = input.load()?;
            let (coeffs, diags) = inputs.fit(&families(&model)?)?;
            write_file(&out.join("coefficients.json"), &coefficients_json(&coeffs)?)?;
            write_file(&out.join("diagnostics.json"), &diagnostics_json(&diags)?)?;
            write_file(&out.join("diagnostics.csv"), &diagnostics_csv(&diags))?;
            println!("fitted {} teams; wrote {}", coeffs.len(), out.display());
        }
        Command::Simulate {
            input,
            model,
            coefficients,
            sim,
            out,
        } => {
            let inputs = input.load()?;
            let coeffs = match coefficients {
                Some(path) => parse_coefficients_json(&read(&path)?)?,
                None => inputs.fit(&[model])?.0,
            };
            let cfg = sim.config();
            let dist = inputs.simulate(model, &coeffs, &cfg, sim.penalty_model())?;
            dist.check_invariants()?;
            let meta = inputs.metadata(model, &cfg);
            write_stage_outputs(&out, "", &dist, &meta)?;
            print!("{}", top_table(&dist, 10));
        }
        Command::Validate {
            input,
            realized,
            sim,
            rps_literal,
            out,
        } => {
            let inputs = input.load()?;
            let real = inputs
                .realized(realized.as_deref())?
                .ok_or_else(|| Error::InvalidInput("no realized result: pass --realized".into()))?;
            let cfg = sim.config();
            let results = validate_all(&inputs, &real, &cfg, sim.penalty_model(), variant(rps_literal))?;
            let mut rows = Vec::new();
            for (f, dist, score) in results {
                let meta = inputs.metadata(f, &cfg);
                write_stage_outputs(&out, &format!("{}_", f.as_str()), &dist, &meta)?;
                write_file(
                    &out.join(format!("{}_scores.json", f.as_str())),
                    &serde_json::to_string_pretty(&score)?,
                )?;
                rows.push((f, score));
            }
            let meta = inputs.metadata(ModelFamily::Independent, &cfg);
            let meta = RunMetadata {
                model: "all".into(),
                ..meta
            };
            write_file(&out.join("scores.csv"), &score_csv(&rows, Some(&meta)))?;
            print!("{}", score_table(&rows));
        }
        Command::Report {
            distribution,
            realized,
            preset,
            rps_literal,
            out,
        } => {
            let saved: Loaded = serde_json::from_str(&read(&distribution)?)?;
            let dist = saved.distribution;
            dist.check_invariants()?;
            write_stage_outputs(&out, "", &dist, &saved.metadata)?;
            let real = match (realized, preset) {
                (Some(path), _) => {
                    let records = elocast::scoring::load_knockout_record(&path)?;
                    Some(elocast::scoring::realized_results(&dist.teams, &records)?)
                }
                (None, Some(y)) => elocast::presets::Preset::load(y)?.realized().transpose()?,
                (None, None) => None,
            };
            if let Some(real) = real {
                let family: ModelFamily = saved.metadata.model.parse()?;
                let score = score_all(&dist, &real, variant(rps_literal))?;
                let rows = [(family, score)];
                write_file(&out.join("scores.csv"), &score_csv(&rows, Some(&saved.metadata)))?;
                print!("{}", score_table(&rows));
            }
            print!("{}", top_table(&dist, 10));
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
