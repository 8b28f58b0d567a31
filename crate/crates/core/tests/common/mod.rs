#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use elocast::dataio::EloSnapshot;
use elocast::matchmodels::{sample_independent, ScoreLine};
use elocast::tournament::{MatchSampler, SimRng, TournamentFormat};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/matches")
}

/// Independent Poisson with rates from the Elo gap.
pub struct EloPoisson {
    pub base: f64,
    pub slope: f64,
}

impl EloPoisson {
    pub fn rates(&self, ea: f64, eb: f64) -> (f64, f64) {
        let d = (ea - eb) / 400.0;
        (self.base * (self.slope * d).exp(), self.base * (-self.slope * d).exp())
    }
}

impl MatchSampler for EloPoisson {
    fn regulation(&self, _a: usize, _b: usize, ea: f64, eb: f64, rng: &mut SimRng) -> ScoreLine {
        let (la, lb) = self.rates(ea, eb);
        sample_independent(la, lb, rng)
    }
    fn extra_time(&self, _a: usize, _b: usize, ea: f64, eb: f64, rng: &mut SimRng) -> ScoreLine {
        let (la, lb) = self.rates(ea, eb);
        sample_independent(la / 3.0, lb / 3.0, rng)
    }
    fn penalty_prob_a(&self, _a: usize, _b: usize, ea: f64, eb: f64) -> f64 {
        let (la, lb) = self.rates(ea, eb);
        la / (la + lb)
    }
}

/// Fixed rates regardless of the teams, fixed shootout probability.
pub struct Constant {
    pub lambda: f64,
    pub penalty_a: f64,
}

impl MatchSampler for Constant {
    fn regulation(&self, _a: usize, _b: usize, _ea: f64, _eb: f64, rng: &mut SimRng) -> ScoreLine {
        sample_independent(self.lambda, self.lambda, rng)
    }
    fn extra_time(&self, _a: usize, _b: usize, _ea: f64, _eb: f64, rng: &mut SimRng) -> ScoreLine {
        sample_independent(self.lambda / 3.0, self.lambda / 3.0, rng)
    }
    fn penalty_prob_a(&self, _a: usize, _b: usize, _ea: f64, _eb: f64) -> f64 {
        self.penalty_a
    }
}

/// The higher-rated side wins 1:0, always.
pub struct HigherEloWins;

impl MatchSampler for HigherEloWins {
    fn regulation(&self, _a: usize, _b: usize, ea: f64, eb: f64, _rng: &mut SimRng) -> ScoreLine {
        if ea > eb {
            ScoreLine::new(1, 0)
        } else {
            ScoreLine::new(0, 1)
        }
    }
    fn extra_time(&self, _a: usize, _b: usize, _ea: f64, _eb: f64, _rng: &mut SimRng) -> ScoreLine {
        ScoreLine::new(0, 0)
    }
    fn penalty_prob_a(&self, _a: usize, _b: usize, _ea: f64, _eb: f64) -> f64 {
        0.5
    }
}

/// Distinct ratings: first listed team 2100, then 10 points lower each.
pub fn spread_snapshot(format: &TournamentFormat) -> EloSnapshot {
    let ratings: BTreeMap<String, f64> = format
        .teams()
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, 2100.0 - 10.0 * i as f64))
        .collect();
    EloSnapshot { as_of: None, ratings }
}
