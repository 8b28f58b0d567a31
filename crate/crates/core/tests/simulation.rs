mod common;

use common::{spread_snapshot, Constant, EloPoisson, HigherEloWins};
use elocast::dataio::EloSnapshot;
use elocast::elo::{EloTable, WORLD_CUP_K};
use elocast::report::{stage_csv, RunMetadata, StageEncoding};
use elocast::tournament::{
    monte_carlo, play_knockout_match, replication_rng, simulate_tournament, SimConfig, TournamentFormat,
};

fn format() -> TournamentFormat {
    TournamentFormat::preset(2018).unwrap()
}

fn pair_table(ra: f64, rb: f64) -> EloTable {
    let snap = EloSnapshot {
        as_of: None,
        ratings: [("A".to_string(), ra), ("B".to_string(), rb)].into_iter().collect(),
    };
    EloTable::new(&["A", "B"], &snap, WORLD_CUP_K).unwrap()
}

fn cfg(n: u64, seed: u64) -> SimConfig {
    SimConfig {
        replications: n,
        seed,
        ..SimConfig::default()
    }
}

fn meta(n: u64) -> RunMetadata {
    RunMetadata {
        model: "test".into(),
        seed: 7,
        replications: n,
        elo_update: true,
        preset: None,
    }
}

#[test]
fn identical_teams_split_knockout_ties_evenly() {
    let s = Constant {
        lambda: 1.2,
        penalty_a: 0.5,
    };
    let n = 100_000;
    let mut wins = 0u32;
    for i in 0..n {
        let mut elo = pair_table(1800.0, 1800.0);
        let mut rng = replication_rng(11, i);
        if play_knockout_match(&s, 0, 1, &mut elo, true, &mut rng).winner == 0 {
            wins += 1;
        }
    }
    let p = f64::from(wins) / n as f64;
    assert!((p - 0.5).abs() < 0.01, "{p}");
}

#[test]
fn goalless_ties_follow_the_shootout_probability() {
    let s = Constant {
        lambda: 0.0,
        penalty_a: 2.0 / 3.0,
    };
    let n = 100_000;
    let mut wins = 0u32;
    for i in 0..n {
        let mut elo = pair_table(1800.0, 1800.0);
        let mut rng = replication_rng(12, i);
        let r = play_knockout_match(&s, 0, 1, &mut elo, true, &mut rng);
        assert!(r.extra_time && r.penalties);
        // a shootout counts as a draw for Elo
        assert_eq!(elo.rating_at(0), 1800.0);
        if r.winner == 0 {
            wins += 1;
        }
    }
    let p = f64::from(wins) / n as f64;
    assert!((p - 2.0 / 3.0).abs() < 0.01, "{p}");
}

#[test]
fn higher_rated_team_always_wins_the_title() {
    let f = format();
    let snap = spread_snapshot(&f);
    for update in [true, false] {
        let c = SimConfig {
            update_elo: update,
            ..cfg(200, 3)
        };
        let dist = monte_carlo(&f, &HigherEloWins, &snap, &c).unwrap();
        assert_eq!(dist.probs(0)[0], 1.0);
        assert_eq!(dist.ranking()[0], 0);
    }
}

#[test]
fn one_replication_is_structurally_complete_and_zero_sum() {
    let f = format();
    let snap = spread_snapshot(&f);
    let s = EloPoisson { base: 1.3, slope: 1.0 };
    for i in 0..200 {
        let mut elo = EloTable::new(&f.teams(), &snap, WORLD_CUP_K).unwrap();
        let before = elo.total();
        let mut rng = replication_rng(5, i);
        let rep = simulate_tournament(&f, &s, &mut elo, true, &mut rng);
        assert_eq!(rep.matches_played, 64);
        let mut codes = rep.codes.clone();
        codes.sort_unstable();
        let mut want = vec![1u8, 2, 3, 3];
        want.extend([4; 4]);
        want.extend([5; 8]);
        want.extend([6; 16]);
        assert_eq!(codes, want);
        assert_eq!(elo.total(), before, "replication {i}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let f = format();
    let snap = spread_snapshot(&f);
    let s = EloPoisson { base: 1.3, slope: 1.0 };
    let one = monte_carlo(&f, &s, &snap, &SimConfig { threads: Some(1), ..cfg(20_000, 9) }).unwrap();
    let four = monte_carlo(&f, &s, &snap, &SimConfig { threads: Some(4), ..cfg(20_000, 9) }).unwrap();
    assert_eq!(one, four);
    assert_eq!(
        stage_csv(&one, StageEncoding::Cumulative, &meta(20_000)),
        stage_csv(&four, StageEncoding::Cumulative, &meta(20_000))
    );
}

#[test]
fn same_seed_repeats_and_different_seeds_agree_statistically() {
    let f = format();
    let snap = spread_snapshot(&f);
    let s = EloPoisson { base: 1.3, slope: 1.0 };
    let a = monte_carlo(&f, &s, &snap, &cfg(100_000, 1)).unwrap();
    let again = monte_carlo(&f, &s, &snap, &cfg(100_000, 1)).unwrap();
    let b = monte_carlo(&f, &s, &snap, &cfg(100_000, 2)).unwrap();
    assert_eq!(a, again);
    assert_ne!(a, b);
    for i in 0..32 {
        let (pa, pb) = (a.probs(i), b.probs(i));
        for k in 0..6 {
            assert!((pa[k] - pb[k]).abs() < 0.01, "team {i} level {k}: {} vs {}", pa[k], pb[k]);
        }
    }
}

#[test]
fn single_replication_is_a_valid_distribution() {
    let f = format();
    let snap = spread_snapshot(&f);
    let s = EloPoisson { base: 1.3, slope: 1.0 };
    let d = monte_carlo(&f, &s, &snap, &cfg(1, 4)).unwrap();
    d.check_invariants().unwrap();
    for i in 0..32 {
        let p = d.probs(i);
        assert_eq!(p.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(p.iter().filter(|&&x| x == 0.0).count(), 5);
    }
    assert!(monte_carlo(&f, &s, &snap, &cfg(0, 4)).is_err());
}

#[test]
fn elo_updating_changes_the_forecast() {
    let f = format();
    let snap = spread_snapshot(&f);
    let s = EloPoisson { base: 1.3, slope: 1.5 };
    let on = monte_carlo(&f, &s, &snap, &cfg(20_000, 8)).unwrap();
    let off = monte_carlo(&f, &s, &snap, &SimConfig { update_elo: false, ..cfg(20_000, 8) }).unwrap();
    assert_ne!(on, off);
}
