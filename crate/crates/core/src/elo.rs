//! World Football Elo expectancy and post-match updates.
//!
//! Expectancy uses the 400-point base-10 logistic scale; the update is
//! `K * G * (W - We)` with the goal-margin multiplier `G` (1 for a margin of
//! at most one, 1.5 for two, `(11 + margin) / 8` beyond). Neutral ground, so no
//! home bonus.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dataio::EloSnapshot;
use crate::error::{Error, Result};
use crate::matchmodels::ScoreLine;

/// K for World Cup finals matches.
pub const WORLD_CUP_K: f64 = 60.0;

/// Deltas are rounded to this grid so every rating stays on it and sums of
/// ratings are exact in `f64`: an update is exactly zero-sum.
const DELTA_QUANTUM: f64 = 1.0 / (1u64 << 20) as f64;

pub fn expectancy(r_a: f64, r_b: f64) -> f64 {
    1.0 / (10f64.powf(-(r_a - r_b) / 400.0) + 1.0)
}

pub fn margin_multiplier(margin: u32) -> f64 {
    match margin {
        0 | 1 => 1.0,
        2 => 1.5,
        m => (11.0 + f64::from(m)) / 8.0,
    }
}

/// Rating change of A (B receives the negation). `draw_result` forces
/// `W = 0.5`, as for a match decided on penalties.
pub fn rating_delta(r_a: f64, r_b: f64, score: ScoreLine, k: f64, draw_result: bool) -> f64 {
    let w = if draw_result || score.is_draw() {
        0.5
    } else if score.goals_a > score.goals_b {
        1.0
    } else {
        0.0
    };
    let margin = score.goals_a.abs_diff(score.goals_b);
    let raw = k * margin_multiplier(margin) * (w - expectancy(r_a, r_b));
    (raw / DELTA_QUANTUM).round() * DELTA_QUANTUM
}

/// Ratings indexed by a fixed team order, mutated during one simulated tournament.
#[derive(Debug, Clone)]
pub struct EloTable {
    index: Arc<HashMap<String, usize>>,
    names: Arc<Vec<String>>,
    ratings: Vec<f64>,
    pub k_factor: f64,
}

impl EloTable {
    pub fn new<S: AsRef<str>>(teams: &[S], snapshot: &EloSnapshot, k_factor: f64) -> Result<Self> {
        if !(k_factor.is_finite() && k_factor > 0.0) {
            return Err(Error::InvalidInput(format!("K-factor must be positive, got {k_factor}")));
        }
        let names: Vec<String> = teams.iter().map(|t| t.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        let mut ratings = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate team {n}")));
            }
            let r = snapshot.rating(n)?;
            // keep ratings on the delta grid
            ratings.push((r / DELTA_QUANTUM).round() * DELTA_QUANTUM);
        }
        Ok(Self {
            index: Arc::new(index),
            names: Arc::new(names),
            ratings,
            k_factor,
        })
    }

    pub fn index_of(&self, team: &str) -> Result<usize> {
        self.index
            .get(team)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn rating(&self, team: &str) -> Result<f64> {
        Ok(self.ratings[self.index_of(team)?])
    }

    pub fn rating_at(&self, i: usize) -> f64 {
        self.ratings[i]
    }

    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }

    pub fn total(&self) -> f64 {
        self.ratings.iter().sum()
    }

    /// Applies a result between the teams at indices `a` and `b`.
    pub fn update_at(&mut self, a: usize, b: usize, score: ScoreLine, draw_result: bool) -> (f64, f64) {
        let d = rating_delta(self.ratings[a], self.ratings[b], score, self.k_factor, draw_result);
        self.ratings[a] += d;
        self.ratings[b] -= d;
        (d, -d)
    }

    /// Applies `score` (oriented A:B) and returns `(delta_a, delta_b)`.
    pub fn update(&mut self, team_a: &str, team_b: &str, score: ScoreLine) -> Result<(f64, f64)> {
        let a = self.index_of(team_a)?;
        let b = self.index_of(team_b)?;
        Ok(self.update_at(a, b, score, false))
    }

    /// Restores every rating from `other`, which must share this table's team order.
    pub fn reset_from(&mut self, other: &EloTable) {
        debug_assert!(Arc::ptr_eq(&self.names, &other.names));
        self.ratings.copy_from_slice(&other.ratings);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(ra: f64, rb: f64) -> EloTable {
        let snap = EloSnapshot {
            as_of: None,
            ratings: [("A".to_string(), ra), ("B".to_string(), rb), ("C".to_string(), 1700.0)]
                .into_iter()
                .collect(),
        };
        EloTable::new(&["A", "B", "C"], &snap, WORLD_CUP_K).unwrap()
    }

    #[test]
    fn expectancy_values() {
        assert_eq!(expectancy(1900.0, 1900.0), 0.5);
        assert!((expectancy(2300.0, 1900.0) - 10.0 / 11.0).abs() < 1e-15);
        assert!((expectancy(2131.0, 2092.0) + expectancy(2092.0, 2131.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn update_examples() {
        let mut t = table(2000.0, 2000.0);
        assert_eq!(t.update("A", "B", ScoreLine::new(1, 1)).unwrap(), (0.0, 0.0));
        let mut t = table(2000.0, 2000.0);
        assert_eq!(t.update("A", "B", ScoreLine::new(1, 0)).unwrap(), (30.0, -30.0));
        let mut t = table(2000.0, 2000.0);
        assert_eq!(t.update("A", "B", ScoreLine::new(4, 1)).unwrap(), (52.5, -52.5));
        assert_eq!(t.rating("A").unwrap(), 2052.5);
        assert!(t.update("A", "Z", ScoreLine::new(1, 0)).is_err());
    }

    #[test]
    fn penalty_counts_as_draw() {
        let mut t = table(2000.0, 2000.0);
        let a = t.index_of("A").unwrap();
        let b = t.index_of("B").unwrap();
        assert_eq!(t.update_at(a, b, ScoreLine::new(1, 1), true), (0.0, 0.0));
    }

    #[test]
    fn margin_multipliers() {
        assert_eq!(margin_multiplier(0), 1.0);
        assert_eq!(margin_multiplier(1), 1.0);
        assert_eq!(margin_multiplier(2), 1.5);
        assert_eq!(margin_multiplier(3), 14.0 / 8.0);
        assert_eq!(margin_multiplier(6), 17.0 / 8.0);
    }

    proptest! {
        #[test]
        fn zero_sum_exact(ra in 1000.0f64..2300.0, rb in 1000.0f64..2300.0, ga in 0u32..9, gb in 0u32..9) {
            let mut t = table(ra, rb);
            let before = t.total();
            t.update("A", "B", ScoreLine::new(ga, gb)).unwrap();
            t.update("C", "A", ScoreLine::new(gb, ga)).unwrap();
            prop_assert_eq!(t.total(), before);
        }

        #[test]
        fn expectancy_increasing(d in -800.0f64..800.0, step in 0.5f64..50.0) {
            prop_assert!(expectancy(1800.0 + d + step, 1800.0) > expectancy(1800.0 + d, 1800.0));
        }
    }
}
