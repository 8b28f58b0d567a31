//! World Cup tournament state machine (eight groups of four, 16-team knockout
//! bracket) and the Monte Carlo replication engine.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivpois::MAX_SAMPLING_RATE;
use crate::dataio::EloSnapshot;
use crate::elo::EloTable;
use crate::error::{Error, Result};
use crate::matchmodels::{match_rates, MatchRates, ModelFamily, ScoreLine, TeamCoefficients};

pub type SimRng = ChaCha8Rng;

pub const N_OUTCOMES: usize = 6;
pub const STAGE_LABELS: [&str; N_OUTCOMES] = [
    "champion",
    "lost final",
    "out in semi",
    "out in quarter",
    "out in R16",
    "out in group",
];

/// Group fixtures by matchday, as positions within the group.
const GROUP_SCHEDULE: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (3, 1)], [(3, 0), (1, 2)]];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentFormat {
    pub name: String,
    /// Eight ordered groups of four, groups lettered A..H in order.
    pub groups: Vec<Vec<String>>,
    /// The 16 round-of-16 slots in bracket order, e.g. `"1A"`, `"2B"`. Slots
    /// `2i` and `2i+1` meet in the round of 16, and winners of adjacent
    /// matches meet in the following round.
    pub bracket: Vec<String>,
}

const PRESET_2010: &str = include_str!("../../../data/formats/wc2010.json");
const PRESET_2014: &str = include_str!("../../../data/formats/wc2014.json");
const PRESET_2018: &str = include_str!("../../../data/formats/wc2018.json");

impl TournamentFormat {
    pub fn preset(year: u16) -> Result<Self> {
        let text = match year {
            2010 => PRESET_2010,
            2014 => PRESET_2014,
            2018 => PRESET_2018,
            y => return Err(Error::InvalidInput(format!("no tournament preset for {y}"))),
        };
        Self::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TournamentFormat = serde_json::from_str(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn teams(&self) -> Vec<String> {
        self.groups.iter().flatten().cloned().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.groups.len() != 8 || self.groups.iter().any(|g| g.len() != 4) {
            return bad("format needs 8 groups of 4 teams".into());
        }
        let teams: HashSet<&String> = self.groups.iter().flatten().collect();
        if teams.len() != 32 {
            return bad("format teams are not 32 distinct teams".into());
        }
        if self.bracket.len() != 16 {
            return bad(format!("bracket needs 16 slots, found {}", self.bracket.len()));
        }
        let mut seen = HashSet::new();
        for s in &self.bracket {
            parse_slot(s)?;
            if !seen.insert(s) {
                return bad(format!("bracket slot {s} used twice"));
            }
        }
        Ok(())
    }

    fn slots(&self) -> Vec<(usize, usize)> {
        self.bracket.iter().map(|s| parse_slot(s).expect("validated")).collect()
    }
}

/// `"1A"` -> (rank 0, group 0).
fn parse_slot(s: &str) -> Result<(usize, usize)> {
    let b = s.as_bytes();
    if b.len() == 2 && (b'1'..=b'2').contains(&b[0]) && (b'A'..=b'H').contains(&b[1]) {
        Ok(((b[0] - b'1') as usize, (b[1] - b'A') as usize))
    } else {
        Err(Error::InvalidInput(format!("invalid bracket slot `{s}`")))
    }
}

/// Score generation used by the simulator. Teams are indices into the
/// tournament's team order.
pub trait MatchSampler: Sync {
    fn regulation(&self, a: usize, b: usize, elo_a: f64, elo_b: f64, rng: &mut SimRng) -> ScoreLine;
    fn extra_time(&self, a: usize, b: usize, elo_a: f64, elo_b: f64, rng: &mut SimRng) -> ScoreLine;
    /// Probability that A wins a penalty shootout.
    fn penalty_prob_a(&self, a: usize, b: usize, elo_a: f64, elo_b: f64) -> f64;
}

/// Penalty shootout model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyModel {
    /// `P[A wins] = lambda_A / (lambda_A + lambda_B)` with the 90-minute expected goals.
    #[default]
    RateProportional,
    FairCoin,
}

/// A fitted model family bound to the tournament's team order.
pub struct FittedSampler {
    family: ModelFamily,
    names: Vec<String>,
    coeffs: Vec<TeamCoefficients>,
    penalties: PenaltyModel,
}

impl FittedSampler {
    pub fn new(
        family: ModelFamily,
        teams: &[String],
        coeffs: &BTreeMap<String, TeamCoefficients>,
        penalties: PenaltyModel,
    ) -> Result<Self> {
        let mut v = Vec::with_capacity(teams.len());
        for t in teams {
            let c = coeffs
                .get(t)
                .ok_or_else(|| Error::InvalidInput(format!("missing coefficients for {t}")))?;
            if !c.has_family(family) {
                return Err(Error::InvalidInput(format!("{t} has no fitted {family} coefficients")));
            }
            v.push(c.clone());
        }
        Ok(Self {
            family,
            names: teams.to_vec(),
            coeffs: v,
            penalties,
        })
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn rates(&self, a: usize, b: usize, elo_a: f64, elo_b: f64) -> MatchRates {
        match_rates(
            self.family,
            (&self.names[a], &self.coeffs[a]),
            (&self.names[b], &self.coeffs[b]),
            elo_a,
            elo_b,
        )
        .expect("families checked at construction")
    }
}

impl MatchSampler for FittedSampler {
    fn regulation(&self, a: usize, b: usize, elo_a: f64, elo_b: f64, rng: &mut SimRng) -> ScoreLine {
        self.rates(a, b, elo_a, elo_b).sample(rng)
    }

    fn extra_time(&self, a: usize, b: usize, elo_a: f64, elo_b: f64, rng: &mut SimRng) -> ScoreLine {
        self.rates(a, b, elo_a, elo_b).extra_time().sample(rng)
    }

    fn penalty_prob_a(&self, a: usize, b: usize, elo_a: f64, elo_b: f64) -> f64 {
        match self.penalties {
            PenaltyModel::FairCoin => 0.5,
            PenaltyModel::RateProportional => {
                let (la, lb) = self.rates(a, b, elo_a, elo_b).expected_goals();
                let (la, lb) = (la.min(MAX_SAMPLING_RATE), lb.min(MAX_SAMPLING_RATE));
                if la + lb > 0.0 {
                    la / (la + lb)
                } else {
                    0.5
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupRow {
    pub team: usize,
    pub points: u32,
    pub goals_for: u32,
    pub goals_against: u32,
}

impl GroupRow {
    pub fn goal_difference(&self) -> i64 {
        i64::from(self.goals_for) - i64::from(self.goals_against)
    }

    fn key(&self) -> (u32, i64, u32) {
        (self.points, self.goal_difference(), self.goals_for)
    }
}

/// One played group match, oriented `home` vs `away` as in `score`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupResult {
    pub home: usize,
    pub away: usize,
    pub score: ScoreLine,
}

/// Table of the listed teams over those results in which both sides are listed.
pub fn group_table(teams: &[usize], results: &[GroupResult]) -> Vec<GroupRow> {
    let mut rows: Vec<GroupRow> = teams.iter().map(|&t| GroupRow { team: t, ..Default::default() }).collect();
    let pos = |t: usize| teams.iter().position(|&x| x == t);
    for r in results {
        let (Some(h), Some(a)) = (pos(r.home), pos(r.away)) else {
            continue;
        };
        let (gh, ga) = (r.score.goals_a, r.score.goals_b);
        rows[h].goals_for += gh;
        rows[h].goals_against += ga;
        rows[a].goals_for += ga;
        rows[a].goals_against += gh;
        match gh.cmp(&ga) {
            std::cmp::Ordering::Greater => rows[h].points += 3,
            std::cmp::Ordering::Less => rows[a].points += 3,
            std::cmp::Ordering::Equal => {
                rows[h].points += 1;
                rows[a].points += 1;
            }
        }
    }
    rows
}

/// Splits `items` (already sorted descending by `key`) into runs of equal keys.
fn tie_blocks<T, K: PartialEq>(items: &[T], key: impl Fn(&T) -> K) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=items.len() {
        if i == items.len() || key(&items[i]) != key(&items[start]) {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Final group order under the FIFA criteria without fair play: points, goal
/// difference, goals scored; then the same three restricted to matches among
/// the tied teams; then drawing of lots from `rng`.
pub fn rank_group<R: Rng + ?Sized>(teams: &[usize; 4], results: &[GroupResult], rng: &mut R) -> [usize; 4] {
    let mut rows = group_table(teams, results);
    rows.sort_by(|x, y| y.key().cmp(&x.key()));
    let mut order: Vec<usize> = rows.iter().map(|r| r.team).collect();

    for block in tie_blocks(&rows, GroupRow::key) {
        if block.len() < 2 {
            continue;
        }
        let tied: Vec<usize> = order[block.clone()].to_vec();
        let mut h2h = group_table(&tied, results);
        h2h.sort_by(|x, y| y.key().cmp(&x.key()));
        let mut sub: Vec<usize> = h2h.iter().map(|r| r.team).collect();
        for inner in tie_blocks(&h2h, GroupRow::key) {
            if inner.len() > 1 {
                sub[inner].shuffle(rng);
            }
        }
        order[block].copy_from_slice(&sub);
    }
    [order[0], order[1], order[2], order[3]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnockoutResult {
    pub winner: usize,
    pub loser: usize,
    /// Score after 90 or 120 minutes, oriented (a, b) as called.
    pub score: ScoreLine,
    pub extra_time: bool,
    pub penalties: bool,
}

/// Plays a knockout tie: 90 minutes, then extra time at a third of the rates,
/// then a shootout. Elo is updated from the final open-play score, a shootout
/// counting as a draw.
pub fn play_knockout_match<M: MatchSampler + ?Sized>(
    sampler: &M,
    a: usize,
    b: usize,
    elo: &mut EloTable,
    update_elo: bool,
    rng: &mut SimRng,
) -> KnockoutResult {
    let (ea, eb) = (elo.rating_at(a), elo.rating_at(b));
    let mut score = sampler.regulation(a, b, ea, eb, rng);
    let mut extra_time = false;
    let mut penalties = false;
    let a_wins = if !score.is_draw() {
        score.goals_a > score.goals_b
    } else {
        extra_time = true;
        score = score + sampler.extra_time(a, b, ea, eb, rng);
        if !score.is_draw() {
            score.goals_a > score.goals_b
        } else {
            penalties = true;
            rng.random::<f64>() < sampler.penalty_prob_a(a, b, ea, eb)
        }
    };
    if update_elo {
        elo.update_at(a, b, score, penalties);
    }
    let (winner, loser) = if a_wins { (a, b) } else { (b, a) };
    KnockoutResult {
        winner,
        loser,
        score,
        extra_time,
        penalties,
    }
}

/// Outcome of one simulated tournament: a code 1..=6 per team (tournament
/// team order) and the number of matches played.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replication {
    pub codes: Vec<u8>,
    pub matches_played: u32,
    pub group_order: Vec<[usize; 4]>,
}

/// Simulates one tournament on `elo`, which should hold the pre-tournament
/// ratings in the format's team order.
pub fn simulate_tournament<M: MatchSampler + ?Sized>(
    format: &TournamentFormat,
    sampler: &M,
    elo: &mut EloTable,
    update_elo: bool,
    rng: &mut SimRng,
) -> Replication {
    let n_teams = 32;
    let mut codes = vec![6u8; n_teams];
    let mut played = 0u32;
    let groups: Vec<[usize; 4]> = (0..8).map(|g| [4 * g, 4 * g + 1, 4 * g + 2, 4 * g + 3]).collect();

    let mut results: Vec<Vec<GroupResult>> = vec![Vec::with_capacity(6); 8];
    for matchday in GROUP_SCHEDULE {
        for (g, teams) in groups.iter().enumerate() {
            for (i, j) in matchday {
                let (h, a) = (teams[i], teams[j]);
                let score = sampler.regulation(h, a, elo.rating_at(h), elo.rating_at(a), rng);
                if update_elo {
                    elo.update_at(h, a, score, false);
                }
                results[g].push(GroupResult { home: h, away: a, score });
                played += 1;
            }
        }
    }
    let group_order: Vec<[usize; 4]> = groups
        .iter()
        .zip(&results)
        .map(|(t, r)| rank_group(t, r, rng))
        .collect();

    let mut alive: Vec<usize> = format
        .slots()
        .into_iter()
        .map(|(rank, g)| group_order[g][rank])
        .collect();
    for &t in &alive {
        codes[t] = 5;
    }
    // R16 losers keep 5, QF losers 4, SF losers 3
    let mut semifinal_losers = Vec::new();
    for round_code in [4u8, 3, 2] {
        let mut next = Vec::with_capacity(alive.len() / 2);
        for pair in alive.chunks(2) {
            let r = play_knockout_match(sampler, pair[0], pair[1], elo, update_elo, rng);
            played += 1;
            codes[r.winner] = round_code;
            if round_code == 2 {
                semifinal_losers.push(r.loser);
            }
            next.push(r.winner);
        }
        alive = next;
    }
    // third place match changes nothing in the coding but moves ratings
    play_knockout_match(sampler, semifinal_losers[0], semifinal_losers[1], elo, update_elo, rng);
    played += 1;
    let f = play_knockout_match(sampler, alive[0], alive[1], elo, update_elo, rng);
    played += 1;
    codes[f.winner] = 1;
    codes[f.loser] = 2;

    Replication {
        codes,
        matches_played: played,
        group_order,
    }
}

/// Per-team probabilities over the six exit levels, from simulation counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDistribution {
    pub teams: Vec<String>,
    pub counts: Vec<[u64; N_OUTCOMES]>,
    pub replications: u64,
    pub seed: Option<u64>,
}

impl StageDistribution {
    pub fn from_counts(teams: Vec<String>, counts: Vec<[u64; N_OUTCOMES]>, replications: u64, seed: Option<u64>) -> Self {
        Self {
            teams,
            counts,
            replications,
            seed,
        }
    }

    /// Exclusive probabilities `p_1..p_6` of `team_index`.
    pub fn probs(&self, i: usize) -> [f64; N_OUTCOMES] {
        let n = self.replications as f64;
        self.counts[i].map(|c| c as f64 / n)
    }

    /// Cumulative reach probabilities: champion, final, semi, quarter, R16,
    /// followed by the group-exit probability.
    pub fn reach(&self, i: usize) -> [f64; N_OUTCOMES] {
        let c = self.counts[i];
        let n = self.replications as f64;
        let mut out = [0.0; N_OUTCOMES];
        let mut acc = 0u64;
        for k in 0..5 {
            acc += c[k];
            out[k] = acc as f64 / n;
        }
        out[5] = c[5] as f64 / n;
        out
    }

    pub fn index_of(&self, team: &str) -> Option<usize> {
        self.teams.iter().position(|t| t == team)
    }

    /// Team indices ordered by champion probability, then by deeper reach.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.teams.len()).collect();
        idx.sort_by(|&x, &y| {
            let (cx, cy) = (self.counts[x], self.counts[y]);
            let cum = |c: [u64; 6]| {
                let mut acc = 0;
                let mut out = [0u64; 5];
                for k in 0..5 {
                    acc += c[k];
                    out[k] = acc;
                }
                out
            };
            cum(cy).cmp(&cum(cx)).then_with(|| self.teams[x].cmp(&self.teams[y]))
        });
        idx
    }

    /// Checks the sum-to-one, single-champion and monotone-reach invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidInput(m));
        let mut champions = 0u64;
        for (i, t) in self.teams.iter().enumerate() {
            let total: u64 = self.counts[i].iter().sum();
            if total != self.replications {
                return fail(format!("{t}: outcome counts sum to {total}, not {}", self.replications));
            }
            let p: f64 = self.probs(i).iter().sum();
            if (p - 1.0).abs() > 1e-12 {
                return fail(format!("{t}: probabilities sum to {p}"));
            }
            let r = self.reach(i);
            if !(r[0] <= r[1] && r[1] <= r[2] && r[2] <= r[3] && r[3] <= r[4]) {
                return fail(format!("{t}: reach probabilities not monotone {r:?}"));
            }
            champions += self.counts[i][0];
        }
        if champions != self.replications {
            return fail(format!("{champions} champions in {} replications", self.replications));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub replications: u64,
    pub seed: u64,
    pub update_elo: bool,
    pub k_factor: f64,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            replications: 100_000,
            seed: 2018,
            update_elo: true,
            k_factor: crate::elo::WORLD_CUP_K,
            threads: None,
        }
    }
}

/// Random stream of replication `i`: the seed fixes the key, `i` selects the
/// ChaCha stream, so results do not depend on how replications are scheduled.
pub fn replication_rng(seed: u64, i: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

pub fn monte_carlo<M: MatchSampler + ?Sized>(
    format: &TournamentFormat,
    sampler: &M,
    snapshot: &EloSnapshot,
    cfg: &SimConfig,
) -> Result<StageDistribution> {
    if cfg.replications == 0 {
        return Err(Error::InvalidInput("replication count must be at least 1".into()));
    }
    format.validate()?;
    let teams = format.teams();
    let base = EloTable::new(&teams, snapshot, cfg.k_factor)?;

    let run = || {
        (0..cfg.replications)
            .into_par_iter()
            .fold(
                || (vec![[0u64; N_OUTCOMES]; 32], base.clone()),
                |(mut counts, mut elo), i| {
                    elo.reset_from(&base);
                    let mut rng = replication_rng(cfg.seed, i);
                    let rep = simulate_tournament(format, sampler, &mut elo, cfg.update_elo, &mut rng);
                    for (t, c) in rep.codes.iter().enumerate() {
                        counts[t][usize::from(*c) - 1] += 1;
                    }
                    (counts, elo)
                },
            )
            .map(|(c, _)| c)
            .reduce(
                || vec![[0u64; N_OUTCOMES]; 32],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        for k in 0..N_OUTCOMES {
                            x[k] += y[k];
                        }
                    }
                    a
                },
            )
    };
    let counts = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(StageDistribution::from_counts(teams, counts, cfg.replications, Some(cfg.seed)))
}
