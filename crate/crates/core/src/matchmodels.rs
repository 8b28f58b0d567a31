//! The four match-score models: independent Poisson, bivariate Poisson,
//! diagonal-inflated bivariate Poisson and the nested (sequential) model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivpois::{
    self, bivpois_sample, combine_rates, poisson_draw, BivariateRates, BivariateTeamFit,
    DiagonalInflation,
};
use crate::dataio::{observations_for_team, DataFilter, EloSnapshot, MatchRecord, Observation};
use crate::error::{Error, Result};
use crate::glm::{deviance_report, fit_poisson, gof_chi_square, DevianceReport, GofReport, PoissonData};

pub const MIN_OBS_INDEPENDENT: usize = 5;
pub const MIN_OBS_DEPENDENT: usize = bivpois::MIN_OBSERVATIONS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Independent,
    Nested,
    Bivariate,
    Inflated,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 4] = [
        ModelFamily::Independent,
        ModelFamily::Nested,
        ModelFamily::Bivariate,
        ModelFamily::Inflated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::Independent => "independent",
            ModelFamily::Nested => "nested",
            ModelFamily::Bivariate => "bivariate",
            ModelFamily::Inflated => "inflated",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelFamily::Independent => "Independent Poisson regression",
            ModelFamily::Nested => "Nested Poisson regression",
            ModelFamily::Bivariate => "Bivariate Poisson regression",
            ModelFamily::Inflated => "Diagonal Inflated Bivariate Poisson regression",
        }
    }

    pub fn min_observations(self) -> usize {
        match self {
            ModelFamily::Independent => MIN_OBS_INDEPENDENT,
            _ => MIN_OBS_DEPENDENT,
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelFamily::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreLine {
    pub goals_a: u32,
    pub goals_b: u32,
}

impl ScoreLine {
    pub fn new(goals_a: u32, goals_b: u32) -> Self {
        Self { goals_a, goals_b }
    }

    pub fn swapped(self) -> Self {
        Self::new(self.goals_b, self.goals_a)
    }

    pub fn is_draw(self) -> bool {
        self.goals_a == self.goals_b
    }
}

impl std::ops::Add for ScoreLine {
    type Output = ScoreLine;

    fn add(self, o: ScoreLine) -> ScoreLine {
        ScoreLine::new(self.goals_a + o.goals_a, self.goals_b + o.goals_b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflatedFit {
    pub fit: BivariateTeamFit,
    pub inflation: DiagonalInflation,
}

/// Fitted coefficients of one team. A family's entry is present iff that
/// family was fitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TeamCoefficients {
    /// `log mu = a0 + a1 * opponent_elo` (goals scored).
    pub attack: Option<[f64; 2]>,
    /// `log nu = b0 + b1 * opponent_elo` (goals conceded).
    pub defense: Option<[f64; 2]>,
    pub bivariate: Option<BivariateTeamFit>,
    pub inflated: Option<InflatedFit>,
    /// `log lambda = g0 + g1 * opponent_elo + g2 * opponent_goals`, used when
    /// this team is the lower-rated side.
    pub nested_gamma: Option<[f64; 3]>,
}

impl TeamCoefficients {
    pub fn mu(&self, opponent_elo: f64) -> Option<f64> {
        self.attack.map(|a| (a[0] + a[1] * opponent_elo).exp())
    }

    pub fn nu(&self, opponent_elo: f64) -> Option<f64> {
        self.defense.map(|b| (b[0] + b[1] * opponent_elo).exp())
    }

    pub fn has_family(&self, family: ModelFamily) -> bool {
        match family {
            ModelFamily::Independent => self.attack.is_some() && self.defense.is_some(),
            ModelFamily::Nested => {
                self.attack.is_some() && self.defense.is_some() && self.nested_gamma.is_some()
            }
            ModelFamily::Bivariate => self.bivariate.is_some(),
            ModelFamily::Inflated => self.inflated.is_some(),
        }
    }
}

fn missing(team: &str, what: &str) -> Error {
    Error::InvalidInput(format!("{team} has no fitted {what} coefficients"))
}

/// Per-match parameters for one family, oriented as (A, B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MatchRates {
    Independent {
        lambda_a_given_b: f64,
        lambda_b_given_a: f64,
    },
    Bivariate {
        rates: BivariateRates,
        inflation: Option<DiagonalInflation>,
    },
    /// The higher-rated side draws first from `lambda_strong`; the other side's
    /// rate is `scale * exp(g0 + g1 * elo_strong + g2 * strong_goals)`.
    Nested {
        strong_is_a: bool,
        lambda_strong: f64,
        gamma: [f64; 3],
        elo_strong: f64,
        scale: f64,
    },
}

impl MatchRates {
    pub fn is_valid(&self) -> bool {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        match self {
            MatchRates::Independent {
                lambda_a_given_b,
                lambda_b_given_a,
            } => pos(*lambda_a_given_b) && pos(*lambda_b_given_a),
            MatchRates::Bivariate { rates, inflation } => {
                rates.is_valid() && inflation.is_none_or(|d| d.is_valid())
            }
            MatchRates::Nested {
                lambda_strong,
                gamma,
                elo_strong,
                scale,
                ..
            } => pos(*lambda_strong) && pos(*scale) && gamma.iter().all(|g| g.is_finite()) && elo_strong.is_finite(),
        }
    }

    /// Rates for a 30-minute extra time: every rate divided by three. The
    /// diagonal inflation describes full-match draws and is not carried over.
    pub fn extra_time(&self) -> MatchRates {
        self.scaled(1.0 / 3.0)
    }

    pub fn scaled(&self, f: f64) -> MatchRates {
        match *self {
            MatchRates::Independent {
                lambda_a_given_b,
                lambda_b_given_a,
            } => MatchRates::Independent {
                lambda_a_given_b: lambda_a_given_b * f,
                lambda_b_given_a: lambda_b_given_a * f,
            },
            MatchRates::Bivariate { rates, .. } => MatchRates::Bivariate {
                rates: rates.scaled(f),
                inflation: None,
            },
            MatchRates::Nested {
                strong_is_a,
                lambda_strong,
                gamma,
                elo_strong,
                scale,
            } => MatchRates::Nested {
                strong_is_a,
                lambda_strong: lambda_strong * f,
                gamma,
                elo_strong,
                scale: scale * f,
            },
        }
    }

    /// Expected goals of (A, B).
    pub fn expected_goals(&self) -> (f64, f64) {
        match *self {
            MatchRates::Independent {
                lambda_a_given_b,
                lambda_b_given_a,
            } => (lambda_a_given_b, lambda_b_given_a),
            MatchRates::Bivariate { rates, inflation } => {
                let (ma, mb) = rates.marginal_means();
                match inflation {
                    Some(d) => {
                        let diag = d.theta[1] + 2.0 * d.theta[2];
                        ((1.0 - d.p) * ma + d.p * diag, (1.0 - d.p) * mb + d.p * diag)
                    }
                    None => (ma, mb),
                }
            }
            MatchRates::Nested {
                strong_is_a,
                lambda_strong,
                gamma,
                elo_strong,
                scale,
            } => {
                // E[exp(g2 G)] = exp(lambda (e^g2 - 1)) for G ~ Poisson(lambda)
                let weak = scale
                    * (gamma[0] + gamma[1] * elo_strong + lambda_strong * (gamma[2].exp() - 1.0)).exp();
                if strong_is_a {
                    (lambda_strong, weak)
                } else {
                    (weak, lambda_strong)
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ScoreLine {
        match *self {
            MatchRates::Independent {
                lambda_a_given_b,
                lambda_b_given_a,
            } => sample_independent(lambda_a_given_b, lambda_b_given_a, rng),
            MatchRates::Bivariate { rates, inflation } => sample_bivariate(&rates, inflation.as_ref(), rng),
            MatchRates::Nested {
                strong_is_a,
                lambda_strong,
                gamma,
                elo_strong,
                scale,
            } => {
                let gs = poisson_draw(lambda_strong, rng);
                let lw = scale * (gamma[0] + gamma[1] * elo_strong + gamma[2] * f64::from(gs)).exp();
                let gw = poisson_draw(lw, rng);
                if strong_is_a {
                    ScoreLine::new(gs, gw)
                } else {
                    ScoreLine::new(gw, gs)
                }
            }
        }
    }
}

pub fn sample_independent<R: Rng + ?Sized>(lambda_a: f64, lambda_b: f64, rng: &mut R) -> ScoreLine {
    ScoreLine::new(poisson_draw(lambda_a, rng), poisson_draw(lambda_b, rng))
}

/// With probability `p` a diagonal score drawn from `theta`, otherwise a
/// bivariate Poisson draw.
pub fn sample_bivariate<R: Rng + ?Sized>(
    rates: &BivariateRates,
    inflation: Option<&DiagonalInflation>,
    rng: &mut R,
) -> ScoreLine {
    if let Some(d) = inflation {
        if d.p > 0.0 && rng.random::<f64>() < d.p {
            let k = d.sample_cell(rng);
            return ScoreLine::new(k, k);
        }
    }
    let (a, b) = bivpois_sample(rates, rng);
    ScoreLine::new(a, b)
}

/// `lambda_{A|B} = (mu_A(elo_B) + nu_B(elo_A)) / 2` and symmetrically.
pub fn rates_independent(
    (name_a, ca): (&str, &TeamCoefficients),
    (name_b, cb): (&str, &TeamCoefficients),
    elo_a: f64,
    elo_b: f64,
) -> Result<MatchRates> {
    let mu_a = ca.mu(elo_b).ok_or_else(|| missing(name_a, "attack"))?;
    let nu_a = ca.nu(elo_b).ok_or_else(|| missing(name_a, "defense"))?;
    let mu_b = cb.mu(elo_a).ok_or_else(|| missing(name_b, "attack"))?;
    let nu_b = cb.nu(elo_a).ok_or_else(|| missing(name_b, "defense"))?;
    Ok(MatchRates::Independent {
        lambda_a_given_b: (mu_a + nu_b) / 2.0,
        lambda_b_given_a: (mu_b + nu_a) / 2.0,
    })
}

/// Whether A is the side that draws first in the nested model: the higher
/// Elo, ties broken by the lexicographically smaller name.
pub fn nested_a_is_strong(name_a: &str, name_b: &str, elo_a: f64, elo_b: f64) -> bool {
    if elo_a != elo_b {
        elo_a > elo_b
    } else {
        name_a <= name_b
    }
}

pub fn rates_nested(
    (name_a, ca): (&str, &TeamCoefficients),
    (name_b, cb): (&str, &TeamCoefficients),
    elo_a: f64,
    elo_b: f64,
) -> Result<MatchRates> {
    let strong_is_a = nested_a_is_strong(name_a, name_b, elo_a, elo_b);
    let ((sn, sc, se), (wn, wc, we)) = if strong_is_a {
        ((name_a, ca, elo_a), (name_b, cb, elo_b))
    } else {
        ((name_b, cb, elo_b), (name_a, ca, elo_a))
    };
    let mu_s = sc.mu(we).ok_or_else(|| missing(sn, "attack"))?;
    let nu_w = wc.nu(se).ok_or_else(|| missing(wn, "defense"))?;
    let gamma = wc.nested_gamma.ok_or_else(|| missing(wn, "nested"))?;
    Ok(MatchRates::Nested {
        strong_is_a,
        lambda_strong: (mu_s + nu_w) / 2.0,
        gamma,
        elo_strong: se,
        scale: 1.0,
    })
}

pub fn sample_nested<R: Rng + ?Sized>(
    a: (&str, &TeamCoefficients),
    b: (&str, &TeamCoefficients),
    elo_a: f64,
    elo_b: f64,
    rng: &mut R,
) -> Result<ScoreLine> {
    Ok(rates_nested(a, b, elo_a, elo_b)?.sample(rng))
}

pub fn rates_bivariate(
    (name_a, ca): (&str, &TeamCoefficients),
    (name_b, cb): (&str, &TeamCoefficients),
    elo_a: f64,
    elo_b: f64,
    inflated: bool,
) -> Result<MatchRates> {
    if inflated {
        let fa = ca.inflated.as_ref().ok_or_else(|| missing(name_a, "inflated"))?;
        let fb = cb.inflated.as_ref().ok_or_else(|| missing(name_b, "inflated"))?;
        let rates = combine_rates(&fa.fit, &fb.fit, elo_a, elo_b);
        // the mixture of a match averages the two teams' inflation parameters
        let p = (fa.inflation.p + fb.inflation.p) / 2.0;
        let theta = if p > 0.0 {
            let mut t = [0.0; 3];
            for k in 0..3 {
                t[k] = (fa.inflation.p * fa.inflation.theta[k] + fb.inflation.p * fb.inflation.theta[k]) / (2.0 * p);
            }
            t
        } else {
            [1.0 / 3.0; 3]
        };
        Ok(MatchRates::Bivariate {
            rates,
            inflation: Some(DiagonalInflation { p, theta }),
        })
    } else {
        let fa = ca.bivariate.as_ref().ok_or_else(|| missing(name_a, "bivariate"))?;
        let fb = cb.bivariate.as_ref().ok_or_else(|| missing(name_b, "bivariate"))?;
        Ok(MatchRates::Bivariate {
            rates: combine_rates(fa, fb, elo_a, elo_b),
            inflation: None,
        })
    }
}

/// Rates of a match under `family`.
pub fn match_rates(
    family: ModelFamily,
    a: (&str, &TeamCoefficients),
    b: (&str, &TeamCoefficients),
    elo_a: f64,
    elo_b: f64,
) -> Result<MatchRates> {
    match family {
        ModelFamily::Independent => rates_independent(a, b, elo_a, elo_b),
        ModelFamily::Nested => rates_nested(a, b, elo_a, elo_b),
        ModelFamily::Bivariate => rates_bivariate(a, b, elo_a, elo_b, false),
        ModelFamily::Inflated => rates_bivariate(a, b, elo_a, elo_b, true),
    }
}

/// Regression diagnostics of one team.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TeamDiagnostics {
    pub team: String,
    pub n_matches: usize,
    pub attack_deviance: Option<DevianceReport>,
    pub defense_deviance: Option<DevianceReport>,
    pub attack_gof: Option<GofReport>,
    pub defense_gof: Option<GofReport>,
    pub nested_deviance: Option<DevianceReport>,
    pub bivariate_aic: Option<f64>,
    pub inflated_aic: Option<f64>,
    pub inflation: Option<DiagonalInflation>,
}

fn require(team: &str, obs: &[Observation], family: ModelFamily) -> Result<()> {
    let need = family.min_observations();
    if obs.len() < need {
        return Err(Error::InsufficientData {
            team: team.to_string(),
            found: obs.len(),
            required: need,
        });
    }
    Ok(())
}

fn elo_design(obs: &[Observation]) -> Vec<Vec<f64>> {
    obs.iter().map(|o| vec![o.opponent_elo]).collect()
}

/// Fits every requested family for one team.
pub fn fit_team(
    matches: &[MatchRecord],
    team: &str,
    filter: &DataFilter,
    elo: &EloSnapshot,
    families: &[ModelFamily],
) -> Result<(TeamCoefficients, TeamDiagnostics)> {
    let mut coeffs = TeamCoefficients::default();
    let mut diag = TeamDiagnostics {
        team: team.to_string(),
        ..Default::default()
    };
    let needs_indep = families
        .iter()
        .any(|f| matches!(f, ModelFamily::Independent | ModelFamily::Nested));

    if needs_indep {
        let obs = observations_for_team(matches, team, &filter.for_family(ModelFamily::Independent), elo)?;
        require(team, &obs, ModelFamily::Independent)?;
        diag.n_matches = obs.len();
        let x = elo_design(&obs);
        let gf = PoissonData::new(x.clone(), obs.iter().map(|o| f64::from(o.goals_for)).collect())?;
        let ga = PoissonData::new(x, obs.iter().map(|o| f64::from(o.goals_against)).collect())?;
        let fa = fit_poisson(&gf)?;
        let fd = fit_poisson(&ga)?;
        diag.attack_deviance = deviance_report(&fa, &gf).ok();
        diag.defense_deviance = deviance_report(&fd, &ga).ok();
        diag.attack_gof = gof_chi_square(&fa, &gf).ok();
        diag.defense_gof = gof_chi_square(&fd, &ga).ok();
        coeffs.attack = Some([fa.coefficients[0], fa.coefficients[1]]);
        coeffs.defense = Some([fd.coefficients[0], fd.coefficients[1]]);
    }
    if families.contains(&ModelFamily::Nested) {
        let obs = observations_for_team(matches, team, &filter.for_family(ModelFamily::Nested), elo)?;
        require(team, &obs, ModelFamily::Nested)?;
        let x = obs
            .iter()
            .map(|o| vec![o.opponent_elo, f64::from(o.goals_against)])
            .collect();
        let data = PoissonData::new(x, obs.iter().map(|o| f64::from(o.goals_for)).collect())?;
        let f = fit_poisson(&data)?;
        diag.nested_deviance = deviance_report(&f, &data).ok();
        coeffs.nested_gamma = Some([f.coefficients[0], f.coefficients[1], f.coefficients[2]]);
    }
    if families.contains(&ModelFamily::Bivariate) {
        let obs = observations_for_team(matches, team, &filter.for_family(ModelFamily::Bivariate), elo)?;
        require(team, &obs, ModelFamily::Bivariate)?;
        let f = bivpois::fit_bivpois_em(&obs)?;
        diag.bivariate_aic = Some(f.aic);
        coeffs.bivariate = Some(f);
    }
    if families.contains(&ModelFamily::Inflated) {
        let obs = observations_for_team(matches, team, &filter.for_family(ModelFamily::Inflated), elo)?;
        require(team, &obs, ModelFamily::Inflated)?;
        let (fit, inflation, aic) = bivpois::fit_inflated_em(&obs, true)?;
        diag.inflated_aic = Some(aic);
        diag.inflation = Some(inflation);
        if diag.bivariate_aic.is_none() {
            diag.bivariate_aic = bivpois::fit_bivpois_em(&obs).ok().map(|f| f.aic);
        }
        coeffs.inflated = Some(InflatedFit { fit, inflation });
    }
    Ok((coeffs, diag))
}

pub type CoefficientMap = BTreeMap<String, TeamCoefficients>;

/// Fits all participants in parallel; the first failure (in participant
/// order) is returned with the team attached.
pub fn fit_all_models<S: AsRef<str> + Sync>(
    matches: &[MatchRecord],
    participants: &[S],
    filter: &DataFilter,
    elo: &EloSnapshot,
    families: &[ModelFamily],
) -> Result<(CoefficientMap, Vec<TeamDiagnostics>)> {
    let results: Vec<_> = participants
        .par_iter()
        .map(|t| {
            let t = t.as_ref();
            fit_team(matches, t, filter, elo, families)
                .map(|r| (t.to_string(), r))
                .map_err(|e| e.for_team(t))
        })
        .collect();
    let mut coeffs = BTreeMap::new();
    let mut diags = Vec::with_capacity(results.len());
    for r in results {
        let (team, (c, d)) = r?;
        coeffs.insert(team, c);
        diags.push(d);
    }
    Ok((coeffs, diags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coeffs(mu: f64, nu: f64) -> TeamCoefficients {
        TeamCoefficients {
            attack: Some([mu.ln(), 0.0]),
            defense: Some([nu.ln(), 0.0]),
            nested_gamma: Some([0.0, 0.0, 0.0]),
            ..Default::default()
        }
    }

    #[test]
    fn independent_rates_average() {
        let a = coeffs(2.0, 0.7);
        let b = coeffs(0.4, 1.0);
        let r = rates_independent(("A", &a), ("B", &b), 1900.0, 1700.0).unwrap();
        let MatchRates::Independent {
            lambda_a_given_b,
            lambda_b_given_a,
        } = r
        else {
            unreachable!()
        };
        assert!((lambda_a_given_b - 1.5).abs() < 1e-12);
        assert!((lambda_b_given_a - 0.55).abs() < 1e-12);
        let s = rates_independent(("B", &b), ("A", &a), 1700.0, 1900.0).unwrap();
        assert_eq!(
            s,
            MatchRates::Independent {
                lambda_a_given_b: lambda_b_given_a,
                lambda_b_given_a: lambda_a_given_b
            }
        );
    }

    #[test]
    fn independent_rates_direct_evaluation() {
        let a = TeamCoefficients {
            attack: Some([2.1, -0.0009]),
            defense: Some([-3.2, 0.0014]),
            ..Default::default()
        };
        let b = TeamCoefficients {
            attack: Some([1.4, -0.0007]),
            defense: Some([-2.2, 0.0011]),
            ..Default::default()
        };
        let r = rates_independent(("A", &a), ("B", &b), 2092.0, 1985.0).unwrap();
        let want_a = ((2.1 - 0.0009 * 1985.0f64).exp() + (-2.2 + 0.0011 * 2092.0f64).exp()) / 2.0;
        let want_b = ((1.4 - 0.0007 * 2092.0f64).exp() + (-3.2 + 0.0014 * 1985.0f64).exp()) / 2.0;
        let (ga, gb) = r.expected_goals();
        assert!((ga - want_a).abs() < 1e-12);
        assert!((gb - want_b).abs() < 1e-12);
    }

    #[test]
    fn extra_time_is_a_third() {
        let r = MatchRates::Independent {
            lambda_a_given_b: 1.5,
            lambda_b_given_a: 0.9,
        };
        assert_eq!(
            r.extra_time(),
            MatchRates::Independent {
                lambda_a_given_b: 1.5 / 3.0,
                lambda_b_given_a: 0.9 / 3.0
            }
        );
        let b = MatchRates::Bivariate {
            rates: BivariateRates::new(1.2, 0.9, 0.3).unwrap(),
            inflation: Some(DiagonalInflation::new(0.1, [1.0, 0.0, 0.0]).unwrap()),
        };
        let MatchRates::Bivariate { rates, inflation } = b.extra_time() else {
            unreachable!()
        };
        assert_eq!(rates, BivariateRates::new(1.2, 0.9, 0.3).unwrap().scaled(1.0 / 3.0));
        assert!(inflation.is_none());
    }

    #[test]
    fn nested_orientation_is_total() {
        assert!(nested_a_is_strong("B", "A", 2000.0, 1900.0));
        assert!(!nested_a_is_strong("A", "B", 1900.0, 2000.0));
        assert!(nested_a_is_strong("A", "B", 1900.0, 1900.0));
        assert!(!nested_a_is_strong("B", "A", 1900.0, 1900.0));
    }

    #[test]
    fn nested_missing_gamma_names_weaker_team() {
        let a = coeffs(1.0, 1.0);
        let mut b = coeffs(1.0, 1.0);
        b.nested_gamma = None;
        let err = rates_nested(("Strong", &a), ("Weak", &b), 2000.0, 1800.0).unwrap_err();
        assert!(err.to_string().contains("Weak"));
        // weaker team has gamma: fine even though the stronger one lacks it
        let mut c = coeffs(1.0, 1.0);
        c.nested_gamma = None;
        assert!(rates_nested(("Strong", &c), ("Weak", &a), 2000.0, 1800.0).is_ok());
    }

    #[test]
    fn nested_zero_gamma_gives_unit_rate() {
        let a = coeffs(2.0, 1.0);
        let b = coeffs(1.0, 1.0);
        let r = rates_nested(("A", &a), ("B", &b), 2000.0, 1800.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut sum = [0.0f64; 2];
        let mut cnt = [0usize; 2];
        for _ in 0..n {
            let s = r.sample(&mut rng);
            let k = usize::from(s.goals_a > 1);
            sum[k] += f64::from(s.goals_b);
            cnt[k] += 1;
        }
        for k in 0..2 {
            let m = sum[k] / cnt[k] as f64;
            assert!((m - 1.0).abs() < 4.0 * (1.0 / cnt[k] as f64).sqrt(), "stratum {k}: {m}");
        }
    }

    #[test]
    fn inflation_degenerate_mixture() {
        let rates = BivariateRates::new(1.2, 0.8, 0.2).unwrap();
        let d = DiagonalInflation::new(1.0, [0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            assert_eq!(sample_bivariate(&rates, Some(&d), &mut rng), ScoreLine::new(1, 1));
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in ModelFamily::ALL {
            assert_eq!(f.as_str().parse::<ModelFamily>().unwrap(), f);
        }
        assert!("poisson".parse::<ModelFamily>().is_err());
    }
}
