//! End-to-end run: load inputs, fit, simulate, score.

use std::path::Path;

use crate::dataio::{load_elo_snapshot, load_matches, AliasTable, DataFilter, EloSnapshot, MatchRecord};
use crate::error::{Error, Result};
use crate::matchmodels::{fit_all_models, CoefficientMap, ModelFamily, TeamDiagnostics};
use crate::presets::Preset;
use crate::report::RunMetadata;
use crate::scoring::{load_knockout_record, realized_results, score_all, RealizedResult, RpsVariant, ScoreReport};
use crate::tournament::{monte_carlo, FittedSampler, PenaltyModel, SimConfig, StageDistribution, TournamentFormat};

/// Everything a run needs besides the model choice and simulation settings.
#[derive(Debug, Clone)]
pub struct RunInputs {
    pub preset: Option<u16>,
    pub format: TournamentFormat,
    pub elo: EloSnapshot,
    pub filter: DataFilter,
    pub matches: Vec<MatchRecord>,
}

impl RunInputs {
    /// Preset configuration with an optional Elo snapshot replacing the shipped one.
    pub fn from_preset(year: u16, data: &Path, elo: Option<&Path>) -> Result<Self> {
        let p = Preset::load(year)?;
        let elo = match elo {
            Some(path) => load_elo_snapshot(path)?,
            None => p.elo_snapshot()?,
        };
        Self::assemble(Some(year), p.format, elo, p.filter, data)
    }

    pub fn from_files(format: &Path, elo: &Path, filter: &Path, data: &Path) -> Result<Self> {
        let format = TournamentFormat::from_json(&crate::dataio::read_to_string(format)?)?;
        let elo = load_elo_snapshot(elo)?;
        let filter: DataFilter = serde_json::from_str(&crate::dataio::read_to_string(filter)?)?;
        Self::assemble(None, format, elo, filter, data)
    }

    fn assemble(
        preset: Option<u16>,
        format: TournamentFormat,
        elo: EloSnapshot,
        filter: DataFilter,
        data: &Path,
    ) -> Result<Self> {
        if !data.exists() {
            return Err(Error::io(
                data,
                std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
            ));
        }
        let teams = format.teams();
        elo.check_participants(&teams)?;
        filter.validate(&teams)?;
        let matches = load_matches(data, &AliasTable::standard())?;
        Ok(Self {
            preset,
            format,
            elo,
            filter,
            matches,
        })
    }

    pub fn teams(&self) -> Vec<String> {
        self.format.teams()
    }

    pub fn fit(&self, families: &[ModelFamily]) -> Result<(CoefficientMap, Vec<TeamDiagnostics>)> {
        fit_all_models(&self.matches, &self.teams(), &self.filter, &self.elo, families)
    }

    pub fn simulate(
        &self,
        family: ModelFamily,
        coeffs: &CoefficientMap,
        cfg: &SimConfig,
        penalties: PenaltyModel,
    ) -> Result<StageDistribution> {
        let sampler = FittedSampler::new(family, &self.teams(), coeffs, penalties)?;
        monte_carlo(&self.format, &sampler, &self.elo, cfg)
    }

    /// Realized result from a knockout record file, else the preset's.
    pub fn realized(&self, record: Option<&Path>) -> Result<Option<RealizedResult>> {
        if let Some(path) = record {
            let records = load_knockout_record(path)?;
            return realized_results(&self.teams(), &records).map(Some);
        }
        match self.preset {
            Some(y) => Preset::load(y)?.realized().transpose(),
            None => Ok(None),
        }
    }

    pub fn metadata(&self, family: ModelFamily, cfg: &SimConfig) -> RunMetadata {
        RunMetadata {
            model: family.as_str().to_string(),
            seed: cfg.seed,
            replications: cfg.replications,
            elo_update: cfg.update_elo,
            preset: self.preset.map(|y| y.to_string()),
        }
    }
}

/// Fits every family, simulates each and scores it against `real`.
pub fn validate_all(
    inputs: &RunInputs,
    real: &RealizedResult,
    cfg: &SimConfig,
    penalties: PenaltyModel,
    variant: RpsVariant,
) -> Result<Vec<(ModelFamily, StageDistribution, ScoreReport)>> {
    let (coeffs, _) = inputs.fit(&ModelFamily::ALL)?;
    ModelFamily::ALL
        .iter()
        .map(|&f| {
            let dist = inputs.simulate(f, &coeffs, cfg, penalties)?;
            let score = score_all(&dist, real, variant)?;
            Ok((f, dist, score))
        })
        .collect()
}
