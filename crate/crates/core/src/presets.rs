//! Built-in run configurations for the 2010, 2014 and 2018 tournaments:
//! format, Elo snapshot, data filter and (where known) realized results.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;

use crate::dataio::{parse_elo_snapshot, DataFilter, DateWindow, EloSnapshot, TeamOverride, VenuePolicy};
use crate::error::{Error, Result};
use crate::matchmodels::ModelFamily;
use crate::scoring::RealizedResult;
use crate::tournament::TournamentFormat;

pub const PRESET_YEARS: [u16; 3] = [2010, 2014, 2018];

const ELO_2010: &str = include_str!("../../../data/elo/elo2010.csv");
const ELO_2014: &str = include_str!("../../../data/elo/elo2014.csv");
const ELO_2018: &str = include_str!("../../../data/elo/elo2018.csv");

#[derive(Debug, Clone)]
pub struct Preset {
    pub year: u16,
    pub format: TournamentFormat,
    pub filter: DataFilter,
}

fn d(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("preset date")
}

fn window(from: &str, to: &str) -> DateWindow {
    DateWindow { from: d(from), to: d(to) }
}

fn extra(windows: &[(&str, &str)]) -> TeamOverride {
    TeamOverride {
        extra_windows: windows.iter().map(|(a, b)| window(a, b)).collect(),
        ..Default::default()
    }
}

impl Preset {
    pub fn load(year: u16) -> Result<Self> {
        let format = TournamentFormat::preset(year)?;
        let filter = match year {
            2010 => filter_2010(&format)?,
            2014 => filter_2014()?,
            2018 => filter_2018()?,
            y => return Err(Error::InvalidInput(format!("no preset for {y}"))),
        };
        filter.validate(&format.teams())?;
        Ok(Self { year, format, filter })
    }

    pub fn elo_snapshot(&self) -> Result<EloSnapshot> {
        let text = match self.year {
            2010 => ELO_2010,
            2014 => ELO_2014,
            _ => ELO_2018,
        };
        parse_elo_snapshot(text, Path::new(&format!("elo{}.csv", self.year)))
    }

    /// Realized stage codes, when the tournament has been played and shipped.
    pub fn realized(&self) -> Option<Result<RealizedResult>> {
        match self.year {
            2010 | 2014 => Some(RealizedResult::preset(self.year, &self.format.teams())),
            _ => None,
        }
    }
}

fn filter_2018() -> Result<DataFilter> {
    let qualifiers = [("2016-09-01", "2017-11-30")];
    Ok(DataFilter::new(d("2010-01-01"), d("2017-12-31"), VenuePolicy::NeutralOnly)?
        .with_override(
            "France",
            TeamOverride {
                date_from: Some(d("2012-01-01")),
                extra_windows: vec![window("2016-06-10", "2016-07-10")],
                ..Default::default()
            },
        )
        .with_override("Iceland", extra(&[("2014-09-01", "2017-10-31")]))
        .with_override("Serbia", extra(&qualifiers))
        .with_override("Sweden", extra(&qualifiers))
        .with_override("Poland", extra(&qualifiers)))
}

fn filter_2014() -> Result<DataFilter> {
    let qualifiers = [("2012-09-01", "2013-10-31")];
    Ok(DataFilter::new(d("2002-01-01"), d("2014-06-11"), VenuePolicy::NeutralOnly)?
        .with_override("Bosnia and Herzegovina", extra(&qualifiers))
        .with_override("Belgium", extra(&qualifiers)))
}

fn filter_2010(format: &TournamentFormat) -> Result<DataFilter> {
    let participants: BTreeSet<String> = format.teams().into_iter().collect();
    Ok(DataFilter::new(d("2000-01-01"), d("2010-06-10"), VenuePolicy::NeutralOnly)?
        .with_override(
            "Germany",
            TeamOverride {
                extra_windows: vec![window("2006-06-09", "2006-07-09")],
                families: vec![ModelFamily::Bivariate],
                ..Default::default()
            },
        )
        .with_override(
            "Slovenia",
            TeamOverride {
                extra_windows: vec![window("2008-09-01", "2009-11-30")],
                opponents: Some(participants),
                families: vec![ModelFamily::Nested],
                ..Default::default()
            },
        )
        .with_override("Slovakia", extra(&[("2008-09-01", "2009-10-31")]))
        .with_override("New Zealand", extra(&[("2007-11-01", "2009-11-30")])))
}
