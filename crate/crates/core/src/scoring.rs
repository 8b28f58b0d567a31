//! Ordinal tournament outcomes and the four forecast error scores.
//!
//! Outcome codes: 1 champion, 2 lost final, 3 out in semi, 4 out in quarter,
//! 5 out in R16, 6 out in group.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::{parse_err, read_to_string};
use crate::error::{Error, Result};
use crate::tournament::{StageDistribution, N_OUTCOMES};

const REALIZED_2010: &str = include_str!("../../../data/realized/wc2010.csv");
const REALIZED_2014: &str = include_str!("../../../data/realized/wc2014.csv");

/// Required code counts for a 32-team cup, indexed by code - 1.
pub const CODE_MULTISET: [usize; N_OUTCOMES] = [1, 1, 2, 4, 8, 16];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedResult {
    pub codes: BTreeMap<String, u8>,
}

impl RealizedResult {
    pub fn new(codes: BTreeMap<String, u8>) -> Result<Self> {
        let r = Self { codes };
        r.validate()?;
        Ok(r)
    }

    pub fn code(&self, team: &str) -> Result<u8> {
        self.codes
            .get(team)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let mut counts = [0usize; N_OUTCOMES];
        for (t, &c) in &self.codes {
            if !(1..=6).contains(&c) {
                return Err(Error::InvalidInput(format!("{t}: outcome code {c} outside 1..6")));
            }
            counts[usize::from(c) - 1] += 1;
        }
        if counts != CODE_MULTISET {
            return Err(Error::InvalidInput(format!(
                "outcome codes {counts:?} do not match the 32-team pattern {CODE_MULTISET:?}"
            )));
        }
        Ok(())
    }

    /// Shipped realized results for 2010 and 2014.
    pub fn preset(year: u16, participants: &[String]) -> Result<Self> {
        let text = match year {
            2010 => REALIZED_2010,
            2014 => REALIZED_2014,
            y => return Err(Error::InvalidInput(format!("no realized results shipped for {y}"))),
        };
        let records = parse_knockout_record(text, Path::new(&format!("wc{year}.csv")))?;
        realized_results(participants, &records)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KnockoutStage {
    R16,
    QF,
    SF,
    ThirdPlace,
    Final,
}

impl KnockoutStage {
    fn from_code(s: &str) -> Option<Self> {
        Some(match s {
            "R16" => Self::R16,
            "QF" => Self::QF,
            "SF" => Self::SF,
            "3P" => Self::ThirdPlace,
            "F" => Self::Final,
            _ => return None,
        })
    }

    fn expected_matches(self) -> usize {
        match self {
            Self::R16 => 8,
            Self::QF => 4,
            Self::SF => 2,
            Self::ThirdPlace | Self::Final => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnockoutRecord {
    pub stage: KnockoutStage,
    pub team_a: String,
    pub team_b: String,
    pub winner: String,
}

impl KnockoutRecord {
    pub fn loser(&self) -> &str {
        if self.winner == self.team_a {
            &self.team_b
        } else {
            &self.team_a
        }
    }
}

/// Parses `stage,team_a,team_b,goals_a,goals_b,winner` lines; the goal columns
/// are optional and only checked for consistency with `winner`.
pub fn parse_knockout_record(text: &str, path: &Path) -> Result<Vec<KnockoutRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((hline, header)) = lines.next() else {
        return Err(Error::InvalidInput(format!("{}: empty knockout record", path.display())));
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |n: &str| cols.iter().position(|c| *c == n);
    let mut idx = [0usize; 4];
    for (k, name) in ["stage", "team_a", "team_b", "winner"].iter().enumerate() {
        idx[k] = find(name).ok_or_else(|| parse_err(path, hline, name, "missing column in header"))?;
    }
    let goals_idx = find("goals_a").zip(find("goals_b"));

    let mut out = Vec::new();
    for (lineno, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() < cols.len() {
            return Err(parse_err(path, lineno, cols[f.len()], "missing field"));
        }
        let stage = KnockoutStage::from_code(f[idx[0]])
            .ok_or_else(|| parse_err(path, lineno, "stage", format!("unknown stage `{}`", f[idx[0]])))?;
        let (a, b, w) = (f[idx[1]], f[idx[2]], f[idx[3]]);
        if a == b {
            return Err(parse_err(path, lineno, "team_b", "team plays itself"));
        }
        if w != a && w != b {
            return Err(parse_err(path, lineno, "winner", format!("`{w}` did not play in this match")));
        }
        if let Some((ga, gb)) = goals_idx {
            let g = |i: usize, n: &str| -> Result<u32> {
                f[i].parse().map_err(|_| parse_err(path, lineno, n, "goals must be a non-negative integer"))
            };
            let (ga, gb) = (g(ga, "goals_a")?, g(gb, "goals_b")?);
            if (ga > gb && w != a) || (gb > ga && w != b) {
                return Err(parse_err(path, lineno, "winner", "winner contradicts the score"));
            }
        }
        out.push(KnockoutRecord {
            stage,
            team_a: a.to_string(),
            team_b: b.to_string(),
            winner: w.to_string(),
        });
    }
    Ok(out)
}

pub fn load_knockout_record(path: &Path) -> Result<Vec<KnockoutRecord>> {
    parse_knockout_record(&read_to_string(path)?, path)
}

/// Outcome codes from a complete knockout record. Participants not in the
/// round of 16 are coded 6.
pub fn realized_results(participants: &[String], records: &[KnockoutRecord]) -> Result<RealizedResult> {
    let known: BTreeSet<&str> = participants.iter().map(String::as_str).collect();
    let mut by_stage: BTreeMap<KnockoutStage, Vec<&KnockoutRecord>> = BTreeMap::new();
    for r in records {
        for t in [&r.team_a, &r.team_b] {
            if !known.contains(t.as_str()) {
                return Err(Error::UnknownTeam(t.clone()));
            }
        }
        by_stage.entry(r.stage).or_default().push(r);
    }
    for stage in [KnockoutStage::R16, KnockoutStage::QF, KnockoutStage::SF, KnockoutStage::Final] {
        let found = by_stage.get(&stage).map_or(0, Vec::len);
        if found != stage.expected_matches() {
            return Err(Error::InvalidInput(format!(
                "incomplete record: {found} {stage:?} matches, expected {}",
                stage.expected_matches()
            )));
        }
    }

    let mut codes: BTreeMap<String, u8> = participants.iter().map(|t| (t.clone(), 6)).collect();
    let mut alive: Option<BTreeSet<&str>> = None;
    for (stage, loser_code) in [
        (KnockoutStage::R16, 5u8),
        (KnockoutStage::QF, 4),
        (KnockoutStage::SF, 3),
        (KnockoutStage::Final, 2),
    ] {
        let mut teams = BTreeSet::new();
        for r in &by_stage[&stage] {
            for t in [r.team_a.as_str(), r.team_b.as_str()] {
                if !teams.insert(t) {
                    return Err(Error::InvalidInput(format!("{t} plays twice in {stage:?}")));
                }
                if alive.as_ref().is_some_and(|a| !a.contains(t)) {
                    return Err(Error::InvalidInput(format!("{t} appears in {stage:?} without advancing")));
                }
            }
            codes.insert(r.loser().to_string(), loser_code);
            codes.insert(r.winner.clone(), loser_code - 1);
        }
        alive = Some(by_stage[&stage].iter().map(|r| r.winner.as_str()).collect());
    }
    RealizedResult::new(codes)
}

/// Index of the largest probability; ties go to the better (smaller) code.
pub fn argmax_code(p: &[f64; N_OUTCOMES]) -> u8 {
    let mut best = 0;
    for j in 1..N_OUTCOMES {
        if p[j] > p[best] {
            best = j;
        }
    }
    best as u8 + 1
}

pub fn e1_term(p: &[f64; N_OUTCOMES], result: u8) -> f64 {
    f64::from(argmax_code(p).abs_diff(result))
}

pub fn e2_term(p: &[f64; N_OUTCOMES], result: u8) -> f64 {
    (1..=N_OUTCOMES as u8)
        .zip(p)
        .map(|(j, pj)| pj * f64::from(j.abs_diff(result)))
        .sum()
}

pub fn brier_term(p: &[f64; N_OUTCOMES], result: u8) -> f64 {
    (1..=N_OUTCOMES as u8)
        .zip(p)
        .map(|(j, pj)| {
            let d = pj - if j == result { 1.0 } else { 0.0 };
            d * d
        })
        .sum()
}

/// Reading of the ranked probability score indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RpsVariant {
    /// Cumulative forecast against the cumulative outcome indicator.
    #[default]
    Cumulative,
    /// Cumulative forecast against the point indicator `1[result = i]`.
    Literal,
}

pub fn rps_term(p: &[f64; N_OUTCOMES], result: u8, variant: RpsVariant) -> f64 {
    let r = usize::from(result);
    let mut cum = 0.0;
    let mut sum = 0.0;
    for i in 1..N_OUTCOMES {
        cum += p[i - 1];
        let ind = match variant {
            RpsVariant::Cumulative => r <= i,
            RpsVariant::Literal => r == i,
        };
        let d = cum - if ind { 1.0 } else { 0.0 };
        sum += d * d;
    }
    sum / (N_OUTCOMES - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamScore {
    pub team: String,
    pub result: u8,
    pub e1: f64,
    pub e2: f64,
    pub brier: f64,
    pub rps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub e1: f64,
    pub e2: f64,
    pub brier: f64,
    pub rps: f64,
    pub rps_variant: RpsVariant,
    pub per_team: Vec<TeamScore>,
}

fn rows<'a>(dist: &'a StageDistribution, real: &RealizedResult) -> Result<Vec<(&'a str, [f64; N_OUTCOMES], u8)>> {
    if dist.teams.len() != real.codes.len() {
        return Err(Error::InvalidInput(format!(
            "forecast covers {} teams, realized result {}",
            dist.teams.len(),
            real.codes.len()
        )));
    }
    dist.teams
        .iter()
        .enumerate()
        .map(|(i, t)| Ok((t.as_str(), dist.probs(i), real.code(t)?)))
        .collect()
}

fn score_with(
    dist: &StageDistribution,
    real: &RealizedResult,
    term: impl Fn(&[f64; N_OUTCOMES], u8) -> f64,
) -> Result<(f64, Vec<(String, f64)>)> {
    let per: Vec<(String, f64)> = rows(dist, real)?
        .into_iter()
        .map(|(t, p, r)| (t.to_string(), term(&p, r)))
        .collect();
    Ok((per.iter().map(|(_, v)| v).sum(), per))
}

pub fn score_e1(dist: &StageDistribution, real: &RealizedResult) -> Result<(f64, Vec<(String, f64)>)> {
    score_with(dist, real, e1_term)
}

pub fn score_e2(dist: &StageDistribution, real: &RealizedResult) -> Result<(f64, Vec<(String, f64)>)> {
    score_with(dist, real, e2_term)
}

pub fn score_brier(dist: &StageDistribution, real: &RealizedResult) -> Result<(f64, Vec<(String, f64)>)> {
    score_with(dist, real, brier_term)
}

pub fn score_rps(
    dist: &StageDistribution,
    real: &RealizedResult,
    variant: RpsVariant,
) -> Result<(f64, Vec<(String, f64)>)> {
    score_with(dist, real, |p, r| rps_term(p, r, variant))
}

/// All four scores with the per-team breakdown.
pub fn score_all(dist: &StageDistribution, real: &RealizedResult, variant: RpsVariant) -> Result<ScoreReport> {
    let per_team: Vec<TeamScore> = rows(dist, real)?
        .into_iter()
        .map(|(t, p, r)| TeamScore {
            team: t.to_string(),
            result: r,
            e1: e1_term(&p, r),
            e2: e2_term(&p, r),
            brier: brier_term(&p, r),
            rps: rps_term(&p, r, variant),
        })
        .collect();
    Ok(ScoreReport {
        e1: per_team.iter().map(|s| s.e1).sum(),
        e2: per_team.iter().map(|s| s.e2).sum(),
        brier: per_team.iter().map(|s| s.brier).sum(),
        rps: per_team.iter().map(|s| s.rps).sum(),
        rps_variant: variant,
        per_team,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIFORM: [f64; 6] = [1.0 / 6.0; 6];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn degenerate(code: u8) -> [f64; 6] {
        let mut p = [0.0; 6];
        p[usize::from(code) - 1] = 1.0;
        p
    }

    #[test]
    fn e1_examples() {
        assert_eq!(e1_term(&degenerate(4), 4), 0.0);
        assert_eq!(argmax_code(&UNIFORM), 1);
        assert_eq!(e1_term(&UNIFORM, 6), 5.0);
        assert_eq!(e1_term(&[0.1, 0.2, 0.4, 0.1, 0.1, 0.1], 1), 2.0);
    }

    #[test]
    fn e2_examples() {
        assert_eq!(e2_term(&degenerate(2), 2), 0.0);
        assert!(close(e2_term(&UNIFORM, 6), 2.5));
        assert!(close(e2_term(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0], 2), 0.5));
    }

    #[test]
    fn brier_examples() {
        assert_eq!(brier_term(&degenerate(5), 5), 0.0);
        assert!(close(brier_term(&UNIFORM, 3), 5.0 / 6.0));
        assert_eq!(brier_term(&degenerate(1), 6), 2.0);
    }

    #[test]
    fn rps_examples() {
        assert_eq!(rps_term(&degenerate(1), 1, RpsVariant::Cumulative), 0.0);
        assert_eq!(rps_term(&degenerate(1), 1, RpsVariant::Literal), 0.8);
        assert_eq!(rps_term(&degenerate(3), 3, RpsVariant::Cumulative), 0.0);
        assert_eq!(rps_term(&degenerate(1), 6, RpsVariant::Cumulative), 1.0);
        assert!(close(rps_term(&UNIFORM, 1, RpsVariant::Cumulative), 11.0 / 36.0));
        // literal reading penalises a correct degenerate forecast past the result
        assert!(rps_term(&degenerate(3), 3, RpsVariant::Literal) > 0.0);
    }

    #[test]
    fn realized_2014() {
        let f = crate::tournament::TournamentFormat::preset(2014).unwrap();
        let r = RealizedResult::preset(2014, &f.teams()).unwrap();
        assert_eq!(r.code("Germany").unwrap(), 1);
        assert_eq!(r.code("Argentina").unwrap(), 2);
        assert_eq!(r.code("Brazil").unwrap(), 3);
        assert_eq!(r.code("Netherlands").unwrap(), 3);
        assert_eq!(r.code("Costa Rica").unwrap(), 4);
        assert_eq!(r.code("Algeria").unwrap(), 5);
        assert_eq!(r.code("Italy").unwrap(), 6);
    }

    #[test]
    fn realized_2010() {
        let f = crate::tournament::TournamentFormat::preset(2010).unwrap();
        let r = RealizedResult::preset(2010, &f.teams()).unwrap();
        assert_eq!(r.code("Spain").unwrap(), 1);
        assert_eq!(r.code("Netherlands").unwrap(), 2);
        assert_eq!(r.code("Uruguay").unwrap(), 3);
        assert_eq!(r.code("Ghana").unwrap(), 4);
        assert_eq!(r.code("Italy").unwrap(), 6);
    }

    #[test]
    fn incomplete_record_is_rejected() {
        let f = crate::tournament::TournamentFormat::preset(2014).unwrap();
        let mut rec = parse_knockout_record(REALIZED_2014, Path::new("x")).unwrap();
        rec.retain(|r| r.stage != KnockoutStage::Final);
        assert!(realized_results(&f.teams(), &rec).is_err());
    }

    #[test]
    fn winner_must_play() {
        let text = "stage,team_a,team_b,winner\nF,A,B,C\n";
        assert!(parse_knockout_record(text, Path::new("x")).is_err());
        let text = "stage,team_a,team_b,goals_a,goals_b,winner\nF,A,B,2,0,B\n";
        assert!(parse_knockout_record(text, Path::new("x")).is_err());
    }

    #[test]
    fn code_multiset_enforced() {
        let codes: BTreeMap<String, u8> = (0..32).map(|i| (format!("T{i}"), 6)).collect();
        assert!(RealizedResult::new(codes).is_err());
    }
}
