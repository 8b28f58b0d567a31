use std::path::Path;

use elocast::dataio::{load_matches, observations_for_team, AliasTable};
use elocast::matchmodels::ModelFamily;
use elocast::presets::{Preset, PRESET_YEARS};

fn main() {
    let matches = load_matches(Path::new("data/matches"), &AliasTable::standard()).unwrap();
    for y in PRESET_YEARS {
        let p = Preset::load(y).unwrap();
        let elo = p.elo_snapshot().unwrap();
        for t in p.format.teams() {
            let counts: Vec<usize> = ModelFamily::ALL
                .iter()
                .map(|f| {
                    observations_for_team(&matches, &t, &p.filter.for_family(*f), &elo)
                        .map(|o| o.len())
                        .unwrap_or(0)
                })
                .collect();
            println!("{y} {t:<24} {counts:?}");
        }
    }
}
