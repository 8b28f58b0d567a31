//! Match and Elo ingestion plus the per-team observation filter.
//!
//! Match files are plain comma-separated UTF-8 with the header
//! `date,team1,team2,goals1,goals2,venue` and optional `elo1,elo2` columns.
//! Names must not contain commas; there is no quoting. Columns are located by
//! header name, and unrecognised columns (e.g. a `tournament` note) are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matchmodels::ModelFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Venue {
    Neutral,
    HomeOfFirst,
    HomeOfSecond,
}

impl Venue {
    pub fn code(self) -> &'static str {
        match self {
            Venue::Neutral => "N",
            Venue::HomeOfFirst => "H1",
            Venue::HomeOfSecond => "H2",
        }
    }

    pub fn from_code(code: &str) -> Option<Venue> {
        match code {
            "N" => Some(Venue::Neutral),
            "H1" => Some(Venue::HomeOfFirst),
            "H2" => Some(Venue::HomeOfSecond),
            _ => None,
        }
    }
}

/// One historical match. `home_team` is the first team listed in the file,
/// which is not necessarily the host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub date: NaiveDate,
    pub home_team: String,
    pub away_team: String,
    pub home_goals: u32,
    pub away_goals: u32,
    pub venue: Venue,
    pub elo_home_at_match: Option<f64>,
    pub elo_away_at_match: Option<f64>,
}

impl MatchRecord {
    /// `(goals_for, goals_against, opponent, opponent_elo_at_match)` as seen by `side`.
    fn oriented(&self, first: bool) -> (u32, u32, &str, Option<f64>) {
        if first {
            (
                self.home_goals,
                self.away_goals,
                &self.away_team,
                self.elo_away_at_match,
            )
        } else {
            (
                self.away_goals,
                self.home_goals,
                &self.home_team,
                self.elo_home_at_match,
            )
        }
    }
}

/// Maps historical team names onto the name used for fitting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AliasTable {
    aliases: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alias: impl Into<String>, canonical: impl Into<String>) {
        self.aliases.insert(alias.into(), canonical.into());
    }

    pub fn canonical<'a>(&'a self, name: &'a str) -> &'a str {
        self.aliases.get(name).map(String::as_str).unwrap_or(name)
    }
}

/// Serbia inherits the records of its predecessor federations.
impl AliasTable {
    pub fn standard() -> Self {
        let mut t = Self::empty();
        t.insert("Yugoslavia", "Serbia");
        t.insert("Serbia and Montenegro", "Serbia");
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EloSnapshot {
    pub as_of: Option<NaiveDate>,
    pub ratings: BTreeMap<String, f64>,
}

impl EloSnapshot {
    pub fn rating(&self, team: &str) -> Result<f64> {
        self.ratings
            .get(team)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }

    /// Every listed participant must have a rating.
    pub fn check_participants<S: AsRef<str>>(&self, participants: &[S]) -> Result<()> {
        for p in participants {
            self.rating(p.as_ref())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VenuePolicy {
    NeutralOnly,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateWindow {
    pub fn contains(&self, d: NaiveDate) -> bool {
        self.from <= d && d <= self.to
    }
}

/// Team-specific departures from the global filter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TeamOverride {
    /// Replaces the filter's `date_from` for this team.
    #[serde(default)]
    pub date_from: Option<NaiveDate>,
    /// Matches inside these windows are kept whatever their venue
    /// (e.g. a home tournament).
    #[serde(default)]
    pub extra_windows: Vec<DateWindow>,
    /// Keep only matches against these opponents.
    #[serde(default)]
    pub opponents: Option<BTreeSet<String>>,
    /// Further names whose records count as this team.
    #[serde(default)]
    pub aliases: Vec<String>,
    /// Model families the override applies to; empty means all.
    #[serde(default)]
    pub families: Vec<ModelFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFilter {
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
    pub venue_policy: VenuePolicy,
    #[serde(default)]
    pub team_overrides: BTreeMap<String, TeamOverride>,
}

impl DataFilter {
    pub fn new(date_from: NaiveDate, date_to: NaiveDate, venue_policy: VenuePolicy) -> Result<Self> {
        if date_from >= date_to {
            return Err(Error::InvalidInput(format!(
                "filter window is empty: {date_from} is not before {date_to}"
            )));
        }
        Ok(Self {
            date_from,
            date_to,
            venue_policy,
            team_overrides: BTreeMap::new(),
        })
    }

    pub fn with_override(mut self, team: impl Into<String>, rule: TeamOverride) -> Self {
        self.team_overrides.insert(team.into(), rule);
        self
    }

    /// Checks the window and that every override names a known team.
    pub fn validate<S: AsRef<str>>(&self, known_teams: &[S]) -> Result<()> {
        if self.date_from >= self.date_to {
            return Err(Error::InvalidInput(format!(
                "filter window is empty: {} is not before {}",
                self.date_from, self.date_to
            )));
        }
        for team in self.team_overrides.keys() {
            if !known_teams.iter().any(|k| k.as_ref() == team) {
                return Err(Error::InvalidInput(format!(
                    "override references unknown team {team}"
                )));
            }
        }
        Ok(())
    }

    /// The filter as seen by one model family: overrides scoped to other
    /// families are dropped.
    pub fn for_family(&self, family: ModelFamily) -> DataFilter {
        let mut out = self.clone();
        out.team_overrides
            .retain(|_, o| o.families.is_empty() || o.families.contains(&family));
        out
    }
}

/// One regression observation oriented from the fitted team's viewpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub opponent_elo: f64,
    pub goals_for: u32,
    pub goals_against: u32,
}

pub(crate) fn parse_err(path: &Path, line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads one match CSV, or every `*.csv` inside a directory in file-name order.
pub fn load_matches(path: &Path, aliases: &AliasTable) -> Result<Vec<MatchRecord>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        let mut all = Vec::new();
        for f in files {
            all.extend(load_match_file(&f, aliases)?);
        }
        return Ok(all);
    }
    load_match_file(path, aliases)
}

fn load_match_file(path: &Path, aliases: &AliasTable) -> Result<Vec<MatchRecord>> {
    parse_matches(&read_to_string(path)?, path, aliases)
}

/// Parses match CSV text. `path` is only used in error messages.
pub fn parse_matches(text: &str, path: &Path, aliases: &AliasTable) -> Result<Vec<MatchRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let Some((hline, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let mut idx = [0usize; 6];
    for (slot, name) in ["date", "team1", "team2", "goals1", "goals2", "venue"]
        .iter()
        .enumerate()
    {
        idx[slot] = find(name)
            .ok_or_else(|| parse_err(path, hline, name, "missing column in header"))?;
    }
    let elo_idx = (find("elo1"), find("elo2"));

    let mut out = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < cols.len() {
            return Err(parse_err(
                path,
                lineno,
                cols[fields.len()],
                format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let get = |i: usize| fields[i];

        let date = NaiveDate::parse_from_str(get(idx[0]), "%Y-%m-%d")
            .map_err(|e| parse_err(path, lineno, "date", e.to_string()))?;
        let home = aliases.canonical(get(idx[1])).to_string();
        let away = aliases.canonical(get(idx[2])).to_string();
        if home.is_empty() || away.is_empty() {
            return Err(parse_err(path, lineno, "team1", "empty team name"));
        }
        if home == away {
            return Err(parse_err(path, lineno, "team2", "team plays itself"));
        }
        let goals = |slot: usize, name: &str| -> Result<u32> {
            get(idx[slot])
                .parse::<u32>()
                .map_err(|_| parse_err(path, lineno, name, "goals must be a non-negative integer"))
        };
        let home_goals = goals(3, "goals1")?;
        let away_goals = goals(4, "goals2")?;
        let venue = Venue::from_code(get(idx[5])).ok_or_else(|| {
            parse_err(
                path,
                lineno,
                "venue",
                format!("unknown venue code `{}` (expected N, H1 or H2)", get(idx[5])),
            )
        })?;
        let elo = |i: Option<usize>, name: &str| -> Result<Option<f64>> {
            match i.map(get) {
                None | Some("") => Ok(None),
                Some(s) => {
                    let v: f64 = s
                        .parse()
                        .map_err(|_| parse_err(path, lineno, name, "rating is not a number"))?;
                    if !v.is_finite() || v <= 0.0 {
                        return Err(parse_err(path, lineno, name, "rating must be positive"));
                    }
                    Ok(Some(v))
                }
            }
        };
        out.push(MatchRecord {
            date,
            home_team: home,
            away_team: away,
            home_goals,
            away_goals,
            venue,
            elo_home_at_match: elo(elo_idx.0, "elo1")?,
            elo_away_at_match: elo(elo_idx.1, "elo2")?,
        });
    }
    Ok(out)
}

pub fn load_elo_snapshot(path: &Path) -> Result<EloSnapshot> {
    parse_elo_snapshot(&read_to_string(path)?, path)
}

/// Parses `team,rating` rows. A leading `# as_of=YYYY-MM-DD` comment sets the
/// snapshot date.
pub fn parse_elo_snapshot(text: &str, path: &Path) -> Result<EloSnapshot> {
    let mut as_of = None;
    let mut ratings = BTreeMap::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(d) = comment.trim().strip_prefix("as_of=") {
                as_of = Some(
                    NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
                        .map_err(|e| parse_err(path, lineno, "as_of", e.to_string()))?,
                );
            }
            continue;
        }
        if !seen_header {
            seen_header = true;
            if line.replace(' ', "") != "team,rating" {
                return Err(parse_err(path, lineno, "header", "expected `team,rating`"));
            }
            continue;
        }
        let (team, rating) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, lineno, "rating", "missing rating"))?;
        let team = team.trim();
        let rating: f64 = rating
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, "rating", "rating is not a number"))?;
        if !rating.is_finite() || rating <= 0.0 {
            return Err(parse_err(path, lineno, "rating", "rating must be finite and positive"));
        }
        if ratings.insert(team.to_string(), rating).is_some() {
            return Err(parse_err(path, lineno, "team", format!("duplicate team {team}")));
        }
    }
    if ratings.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no participants in Elo snapshot",
            path.display()
        )));
    }
    Ok(EloSnapshot { as_of, ratings })
}

/// Observations for `team` after applying the filter, oriented from `team`'s
/// side. The opponent covariate is the per-match rating when the file carries
/// one, otherwise the snapshot rating.
pub fn observations_for_team(
    matches: &[MatchRecord],
    team: &str,
    filter: &DataFilter,
    elo: &EloSnapshot,
) -> Result<Vec<Observation>> {
    let rule = filter.team_overrides.get(team);
    let date_from = rule.and_then(|r| r.date_from).unwrap_or(filter.date_from);
    let is_team = |name: &str| name == team || rule.is_some_and(|r| r.aliases.iter().any(|a| a == name));

    let mut out = Vec::new();
    for m in matches {
        let first = if is_team(&m.home_team) {
            true
        } else if is_team(&m.away_team) {
            false
        } else {
            continue;
        };
        if m.date < date_from || m.date > filter.date_to {
            continue;
        }
        let in_extra = rule.is_some_and(|r| r.extra_windows.iter().any(|w| w.contains(m.date)));
        if filter.venue_policy == VenuePolicy::NeutralOnly && m.venue != Venue::Neutral && !in_extra {
            continue;
        }
        let (goals_for, goals_against, opponent, opp_elo) = m.oriented(first);
        if let Some(allowed) = rule.and_then(|r| r.opponents.as_ref()) {
            if !allowed.contains(opponent) {
                continue;
            }
        }
        let opponent_elo = match opp_elo {
            Some(e) => e,
            None => elo.rating(opponent)?,
        };
        out.push(Observation {
            opponent_elo,
            goals_for,
            goals_against,
        });
    }
    if out.is_empty() {
        return Err(Error::InsufficientData {
            team: team.to_string(),
            found: 0,
            required: 1,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn parse(text: &str) -> Result<Vec<MatchRecord>> {
        parse_matches(text, Path::new("t.csv"), &AliasTable::standard())
    }

    const HEADER: &str = "date,team1,team2,goals1,goals2,venue\n";

    #[test]
    fn single_row() {
        let m = parse(&format!("{HEADER}2014-06-13,Spain,Netherlands,1,5,N\n")).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].home_goals, 1);
        assert_eq!(m[0].away_goals, 5);
        assert_eq!(m[0].venue, Venue::Neutral);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse(HEADER).unwrap().is_empty());
    }

    #[test]
    fn negative_goals_name_the_line() {
        let err = parse(&format!("{HEADER}2014-06-13,Spain,Chile,0,2,N\n2014-06-13,Spain,Netherlands,-1,5,N\n"))
            .unwrap_err();
        match err {
            Error::Parse { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "goals1");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_venue_rejected() {
        let err = parse(&format!("{HEADER}2014-06-13,Spain,Netherlands,1,5,X\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { ref field, .. } if field == "venue"));
    }

    #[test]
    fn bad_date_and_self_match_rejected() {
        assert!(parse(&format!("{HEADER}2014-02-30,Spain,Chile,1,5,N\n")).is_err());
        assert!(parse(&format!("{HEADER}2014-06-13,Spain,Spain,1,5,N\n")).is_err());
    }

    #[test]
    fn aliases_and_optional_elo_columns() {
        let text = "date,team1,team2,goals1,goals2,venue,elo1,elo2,tournament\n\
                    2002-06-03,Yugoslavia,Brazil,0,1,N,1800,2050,friendly\n\
                    2004-06-03,Serbia and Montenegro,Chile,1,1,H1,,,friendly\n";
        let m = parse(text).unwrap();
        assert_eq!(m[0].home_team, "Serbia");
        assert_eq!(m[1].home_team, "Serbia");
        assert_eq!(m[0].elo_away_at_match, Some(2050.0));
        assert_eq!(m[1].elo_home_at_match, None);
    }

    #[test]
    fn elo_snapshot_rows() {
        let s = parse_elo_snapshot(
            "# as_of=2018-03-28\nteam,rating\nBrazil,2131\nGermany,2092\n",
            Path::new("elo.csv"),
        )
        .unwrap();
        assert_eq!(s.ratings["Brazil"], 2131.0);
        assert_eq!(s.ratings["Germany"], 2092.0);
        assert_eq!(s.as_of, Some(d("2018-03-28")));
    }

    #[test]
    fn elo_snapshot_errors() {
        let p = Path::new("elo.csv");
        assert!(parse_elo_snapshot("team,rating\n", p).is_err());
        assert!(parse_elo_snapshot("team,rating\nBrazil,2131\nBrazil,2000\n", p).is_err());
        assert!(parse_elo_snapshot("team,rating\nBrazil,strong\n", p).is_err());
        assert!(parse_elo_snapshot("team,rating\nBrazil,-3\n", p).is_err());
    }

    fn snapshot() -> EloSnapshot {
        let mut ratings = BTreeMap::new();
        for (t, r) in [("France", 1984.0), ("Italy", 1900.0), ("Spain", 2048.0), ("Chile", 1880.0)] {
            ratings.insert(t.to_string(), r);
        }
        EloSnapshot { as_of: None, ratings }
    }

    fn fixture() -> Vec<MatchRecord> {
        parse(&format!(
            "{HEADER}\
             2010-06-11,France,Italy,0,0,N\n\
             2011-06-01,Spain,France,2,1,N\n\
             2012-06-11,France,Chile,3,1,N\n\
             2014-06-11,Italy,France,1,2,N\n\
             2016-06-10,France,Spain,2,0,H1\n\
             2016-07-01,Chile,Spain,1,1,N\n"
        ))
        .unwrap()
    }

    #[test]
    fn override_moves_date_from_and_reopens_home_window() {
        let filter = DataFilter::new(d("2010-01-01"), d("2017-12-31"), VenuePolicy::NeutralOnly)
            .unwrap()
            .with_override(
                "France",
                TeamOverride {
                    date_from: Some(d("2012-01-01")),
                    extra_windows: vec![DateWindow {
                        from: d("2016-06-10"),
                        to: d("2016-07-10"),
                    }],
                    ..Default::default()
                },
            );
        let obs = observations_for_team(&fixture(), "France", &filter, &snapshot()).unwrap();
        // 2012 Chile, 2014 Italy, 2016 Spain (home, reopened)
        assert_eq!(obs.len(), 3);
        assert_eq!(obs[1].goals_for, 2);
        assert_eq!(obs[1].goals_against, 1);
        assert_eq!(obs[1].opponent_elo, 1900.0);
    }

    #[test]
    fn away_side_orientation() {
        let filter = DataFilter::new(d("2010-01-01"), d("2017-12-31"), VenuePolicy::NeutralOnly).unwrap();
        let fr = observations_for_team(&fixture(), "France", &filter, &snapshot()).unwrap();
        let sp = observations_for_team(&fixture(), "Spain", &filter, &snapshot()).unwrap();
        // 2011-06-01 Spain 2-1 France
        assert_eq!(fr[1].goals_for, 1);
        assert_eq!(sp[0].goals_against, 1);
        assert_eq!(fr[1].goals_against, sp[0].goals_for);
    }

    #[test]
    fn opponent_restriction_and_missing_team() {
        let filter = DataFilter::new(d("2010-01-01"), d("2017-12-31"), VenuePolicy::All)
            .unwrap()
            .with_override(
                "Spain",
                TeamOverride {
                    opponents: Some(["Chile".to_string()].into_iter().collect()),
                    ..Default::default()
                },
            );
        let sp = observations_for_team(&fixture(), "Spain", &filter, &snapshot()).unwrap();
        assert_eq!(sp.len(), 1);
        let err = observations_for_team(&fixture(), "Peru", &filter, &snapshot()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { ref team, .. } if team == "Peru"));
    }

    #[test]
    fn family_scoped_override() {
        let filter = DataFilter::new(d("2010-01-01"), d("2017-12-31"), VenuePolicy::All)
            .unwrap()
            .with_override(
                "Spain",
                TeamOverride {
                    families: vec![ModelFamily::Nested],
                    ..Default::default()
                },
            );
        assert_eq!(filter.for_family(ModelFamily::Nested).team_overrides.len(), 1);
        assert!(filter.for_family(ModelFamily::Independent).team_overrides.is_empty());
        assert!(filter.validate(&["Spain"]).is_ok());
        assert!(filter.validate(&["France"]).is_err());
    }

    #[test]
    fn empty_window_rejected() {
        assert!(DataFilter::new(d("2017-01-01"), d("2010-01-01"), VenuePolicy::All).is_err());
    }
}
