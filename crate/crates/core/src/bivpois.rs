//! Bivariate Poisson law `(X1 + X0, X2 + X0)` for independent Poisson
//! `X1, X2, X0`, its EM regression fit with the opponent's Elo rating as
//! covariate, and the diagonal-inflated mixture over the draws 0:0, 1:1, 2:2.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::dataio::Observation;
use crate::error::{Error, Result};
use crate::glm::{fit_poisson_from, PoissonData};

pub const MIN_OBSERVATIONS: usize = 6;
pub const TAU_LOWER_BOUND: f64 = 1e-8;
const EM_TOL: f64 = 1e-8;
const EM_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateRates {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda0: f64,
}

impl BivariateRates {
    pub fn new(lambda1: f64, lambda2: f64, lambda0: f64) -> Result<Self> {
        let r = Self {
            lambda1,
            lambda2,
            lambda0,
        };
        if r.is_valid() {
            Ok(r)
        } else {
            Err(Error::InvalidInput(format!("invalid bivariate rates {r:?}")))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lambda1.is_finite()
            && self.lambda2.is_finite()
            && self.lambda0.is_finite()
            && self.lambda1 > 0.0
            && self.lambda2 > 0.0
            && self.lambda0 >= 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lambda1: self.lambda1 * factor,
            lambda2: self.lambda2 * factor,
            lambda0: self.lambda0 * factor,
        }
    }

    pub fn marginal_means(&self) -> (f64, f64) {
        (self.lambda1 + self.lambda0, self.lambda2 + self.lambda0)
    }
}

fn ln_fact(n: u32) -> f64 {
    ln_factorial(u64::from(n))
}

/// `k ln(lambda)` with the convention `0 ln 0 = 0`.
fn k_ln(k: u32, lambda: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        f64::from(k) * lambda.ln()
    }
}

pub fn bivpois_ln_pmf(y1: u32, y2: u32, rates: &BivariateRates) -> f64 {
    let BivariateRates {
        lambda1: l1,
        lambda2: l2,
        lambda0: l0,
    } = *rates;
    let kmax = if l0 > 0.0 { y1.min(y2) } else { 0 };
    let terms: Vec<f64> = (0..=kmax)
        .map(|k| {
            k_ln(y1 - k, l1) + k_ln(y2 - k, l2) + k_ln(k, l0)
                - ln_fact(y1 - k)
                - ln_fact(y2 - k)
                - ln_fact(k)
        })
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = if m == f64::NEG_INFINITY {
        m
    } else {
        m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
    };
    lse - (l1 + l2 + l0)
}

pub fn bivpois_pmf(y1: u32, y2: u32, rates: &BivariateRates) -> f64 {
    bivpois_ln_pmf(y1, y2, rates).exp()
}

/// Largest goal rate used when sampling. Regressions extrapolated far outside
/// a team's observed opponent range can produce absurd or overflowing rates.
pub const MAX_SAMPLING_RATE: f64 = 15.0;

/// Poisson draw that also accepts a zero rate; rates above
/// [`MAX_SAMPLING_RATE`] (including infinity) are clamped to it.
pub fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    if lambda <= 0.0 || lambda.is_nan() {
        return 0;
    }
    let d = Poisson::new(lambda.min(MAX_SAMPLING_RATE)).expect("finite positive Poisson rate");
    d.sample(rng) as u32
}

pub fn bivpois_sample<R: Rng + ?Sized>(rates: &BivariateRates, rng: &mut R) -> (u32, u32) {
    let x1 = poisson_draw(rates.lambda1, rng);
    let x2 = poisson_draw(rates.lambda2, rng);
    let x0 = poisson_draw(rates.lambda0, rng);
    (x1 + x0, x2 + x0)
}

/// Mixture weight `p` on the diagonal cells 0:0, 1:1, 2:2 with probabilities `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalInflation {
    pub p: f64,
    pub theta: [f64; 3],
}

impl DiagonalInflation {
    pub fn none() -> Self {
        Self {
            p: 0.0,
            theta: [1.0 / 3.0; 3],
        }
    }

    pub fn new(p: f64, theta: [f64; 3]) -> Result<Self> {
        let d = Self { p, theta };
        if d.is_valid() {
            Ok(d)
        } else {
            Err(Error::InvalidInput(format!("invalid diagonal inflation {d:?}")))
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.p)
            && self.theta.iter().all(|t| *t >= 0.0)
            && (self.theta.iter().sum::<f64>() - 1.0).abs() < 1e-9
    }

    /// Probability mass of the inflation component at `(y1, y2)`.
    pub fn diag_mass(&self, y1: u32, y2: u32) -> f64 {
        if y1 == y2 && y1 < 3 {
            self.theta[y1 as usize]
        } else {
            0.0
        }
    }

    /// Draws a diagonal cell index from `theta`.
    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, t) in self.theta.iter().enumerate() {
            acc += t;
            if u < acc {
                return k as u32;
            }
        }
        // rounding slack: last cell with positive mass
        self.theta.iter().rposition(|t| *t > 0.0).unwrap_or(0) as u32
    }
}

pub fn inflated_pmf(y1: u32, y2: u32, rates: &BivariateRates, infl: &DiagonalInflation) -> f64 {
    (1.0 - infl.p) * bivpois_pmf(y1, y2, rates) + infl.p * infl.diag_mass(y1, y2)
}

/// Per-team bivariate regression: `log mu = a10 + a11 elo`, `log nu = a20 + a21 elo`,
/// `log tau = a30`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateTeamFit {
    pub mu_coeffs: [f64; 2],
    pub nu_coeffs: [f64; 2],
    pub tau_coeff: f64,
    pub loglik: f64,
    pub aic: f64,
    #[serde(default)]
    pub iterations: usize,
    /// Set when no observation had both counts positive and tau was pinned
    /// at its lower bound.
    #[serde(default)]
    pub tau_at_lower_bound: bool,
    #[serde(skip)]
    pub loglik_trace: Vec<f64>,
}

impl BivariateTeamFit {
    pub fn mu(&self, opponent_elo: f64) -> f64 {
        (self.mu_coeffs[0] + self.mu_coeffs[1] * opponent_elo).exp()
    }

    pub fn nu(&self, opponent_elo: f64) -> f64 {
        (self.nu_coeffs[0] + self.nu_coeffs[1] * opponent_elo).exp()
    }

    pub fn tau(&self) -> f64 {
        self.tau_coeff.exp()
    }

    pub fn rates_against(&self, opponent_elo: f64) -> BivariateRates {
        BivariateRates {
            lambda1: self.mu(opponent_elo),
            lambda2: self.nu(opponent_elo),
            lambda0: self.tau(),
        }
    }

    fn params(&self) -> [f64; 5] {
        [
            self.mu_coeffs[0],
            self.mu_coeffs[1],
            self.nu_coeffs[0],
            self.nu_coeffs[1],
            self.tau_coeff,
        ]
    }
}

/// Match rates from the two team fits, each rate the mean of the two
/// teams' estimates.
pub fn combine_rates(
    fit_a: &BivariateTeamFit,
    fit_b: &BivariateTeamFit,
    elo_a: f64,
    elo_b: f64,
) -> BivariateRates {
    BivariateRates {
        lambda1: (fit_a.mu(elo_b) + fit_b.nu(elo_a)) / 2.0,
        lambda2: (fit_b.mu(elo_a) + fit_a.nu(elo_b)) / 2.0,
        lambda0: (fit_a.tau() + fit_b.tau()) / 2.0,
    }
}

fn check_observations(obs: &[Observation]) -> Result<()> {
    if obs.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData {
            team: String::new(),
            found: obs.len(),
            required: MIN_OBSERVATIONS,
        });
    }
    Ok(())
}

/// `E[X0 | Y1 = x, Y2 = y]` under `rates`.
fn expected_shared(x: u32, y: u32, rates: &BivariateRates) -> f64 {
    if x == 0 || y == 0 || rates.lambda0 <= 0.0 {
        return 0.0;
    }
    (rates.lambda0.ln() + bivpois_ln_pmf(x - 1, y - 1, rates) - bivpois_ln_pmf(x, y, rates)).exp()
}

/// Observed-data log-likelihood of the (optionally inflated) model.
pub fn observed_loglik(
    obs: &[Observation],
    mu: [f64; 2],
    nu: [f64; 2],
    tau: f64,
    infl: Option<&DiagonalInflation>,
) -> f64 {
    obs.iter()
        .map(|o| {
            let r = BivariateRates {
                lambda1: (mu[0] + mu[1] * o.opponent_elo).exp(),
                lambda2: (nu[0] + nu[1] * o.opponent_elo).exp(),
                lambda0: tau,
            };
            match infl {
                Some(d) if d.p > 0.0 => inflated_pmf(o.goals_for, o.goals_against, &r, d).ln(),
                _ => bivpois_ln_pmf(o.goals_for, o.goals_against, &r),
            }
        })
        .sum()
}

struct EmState {
    mu: [f64; 2],
    nu: [f64; 2],
    tau: f64,
    infl: Option<DiagonalInflation>,
}

fn independent_start(obs: &[Observation]) -> Result<([f64; 2], [f64; 2])> {
    let x: Vec<Vec<f64>> = obs.iter().map(|o| vec![o.opponent_elo]).collect();
    let gf = PoissonData::new(x.clone(), obs.iter().map(|o| f64::from(o.goals_for)).collect())?;
    let ga = PoissonData::new(x, obs.iter().map(|o| f64::from(o.goals_against)).collect())?;
    let a = fit_poisson_from(&gf, None)?;
    let b = fit_poisson_from(&ga, None)?;
    Ok((
        [a.coefficients[0], a.coefficients[1]],
        [b.coefficients[0], b.coefficients[1]],
    ))
}

fn em(obs: &[Observation], mut st: EmState) -> Result<(EmState, Vec<f64>, usize, bool)> {
    let n = obs.len();
    let x: Vec<Vec<f64>> = obs.iter().map(|o| vec![o.opponent_elo]).collect();
    let mut ll = observed_loglik(obs, st.mu, st.nu, st.tau, st.infl.as_ref());
    let mut trace = vec![ll];
    let any_shared = obs.iter().any(|o| o.goals_for > 0 && o.goals_against > 0);
    let mut iterations = 0;

    while iterations < EM_MAX_ITER {
        iterations += 1;
        // E-step: inflation membership and expected shared component
        let mut z = vec![0.0; n];
        let mut s = vec![0.0; n];
        for (i, o) in obs.iter().enumerate() {
            let r = BivariateRates {
                lambda1: (st.mu[0] + st.mu[1] * o.opponent_elo).exp(),
                lambda2: (st.nu[0] + st.nu[1] * o.opponent_elo).exp(),
                lambda0: st.tau,
            };
            if let Some(d) = &st.infl {
                let dm = d.p * d.diag_mass(o.goals_for, o.goals_against);
                if dm > 0.0 {
                    let bp = (1.0 - d.p) * bivpois_pmf(o.goals_for, o.goals_against, &r);
                    z[i] = dm / (dm + bp);
                }
            }
            s[i] = expected_shared(o.goals_for, o.goals_against, &r);
        }

        // M-step
        let w: Vec<f64> = z.iter().map(|z| 1.0 - z).collect();
        let y1: Vec<f64> = obs.iter().zip(&s).map(|(o, s)| (f64::from(o.goals_for) - s).max(0.0)).collect();
        let y2: Vec<f64> = obs
            .iter()
            .zip(&s)
            .map(|(o, s)| (f64::from(o.goals_against) - s).max(0.0))
            .collect();
        // The shared component can absorb every goal of one side, which
        // leaves that marginal regression without an MLE; stop at the last iterate.
        let mass = |y: &[f64]| y.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>();
        if mass(&y1) <= 1e-12 || mass(&y2) <= 1e-12 {
            break;
        }
        let f1 = fit_poisson_from(&PoissonData::weighted(x.clone(), y1, w.clone())?, Some(&st.mu))?;
        let f2 = fit_poisson_from(&PoissonData::weighted(x.clone(), y2, w.clone())?, Some(&st.nu))?;
        let wsum: f64 = w.iter().sum();
        let tau = if any_shared && wsum > 0.0 {
            (w.iter().zip(&s).map(|(w, s)| w * s).sum::<f64>() / wsum).max(TAU_LOWER_BOUND)
        } else {
            TAU_LOWER_BOUND
        };
        let infl = st.infl.map(|d| {
            let zsum: f64 = z.iter().sum();
            let mut theta = d.theta;
            if zsum > 0.0 {
                theta = [0.0; 3];
                for (o, zi) in obs.iter().zip(&z) {
                    if o.goals_for == o.goals_against && o.goals_for < 3 {
                        theta[o.goals_for as usize] += zi;
                    }
                }
                theta.iter_mut().for_each(|t| *t /= zsum);
            }
            DiagonalInflation {
                p: zsum / n as f64,
                theta,
            }
        });
        let next = EmState {
            mu: [f1.coefficients[0], f1.coefficients[1]],
            nu: [f2.coefficients[0], f2.coefficients[1]],
            tau,
            infl,
        };
        let next_ll = observed_loglik(obs, next.mu, next.nu, next.tau, next.infl.as_ref());
        // EM never decreases the likelihood; anything beyond round-off means
        // the M-step failed, so keep the previous parameters.
        if next_ll < ll - 1e-9 * (ll.abs() + 1.0) {
            break;
        }
        let gain = next_ll - ll;
        st = next;
        ll = next_ll;
        trace.push(ll);
        if gain < EM_TOL {
            break;
        }
    }
    Ok((st, trace, iterations, !any_shared))
}

/// EM fit of the uninflated bivariate regression, warm-started from the
/// independent Poisson fits with `tau = 0.1`.
pub fn fit_bivpois_em(obs: &[Observation]) -> Result<BivariateTeamFit> {
    check_observations(obs)?;
    let (mu, nu) = independent_start(obs)?;
    let (st, trace, iterations, degenerate) = em(
        obs,
        EmState {
            mu,
            nu,
            tau: 0.1,
            infl: None,
        },
    )?;
    let loglik = *trace.last().expect("trace starts non-empty");
    Ok(BivariateTeamFit {
        mu_coeffs: st.mu,
        nu_coeffs: st.nu,
        tau_coeff: st.tau.ln(),
        loglik,
        aic: 2.0 * 5.0 - 2.0 * loglik,
        iterations,
        tau_at_lower_bound: degenerate || st.tau <= TAU_LOWER_BOUND,
        loglik_trace: trace,
    })
}

/// Fits the mixture `(1 - p) BP + p Diag(theta)`. With `inflate = false` this is
/// the plain bivariate fit with `p = 0`. The returned AIC counts five
/// regression parameters plus, when inflated, `p` and two free `theta` entries.
pub fn fit_inflated_em(
    obs: &[Observation],
    inflate: bool,
) -> Result<(BivariateTeamFit, DiagonalInflation, f64)> {
    let base = fit_bivpois_em(obs)?;
    if !inflate {
        let aic = base.aic;
        return Ok((base, DiagonalInflation::none(), aic));
    }
    let (st, trace, iterations, degenerate) = em(
        obs,
        EmState {
            mu: base.mu_coeffs,
            nu: base.nu_coeffs,
            tau: base.tau(),
            infl: Some(DiagonalInflation {
                p: 0.05,
                theta: [1.0 / 3.0; 3],
            }),
        },
    )?;
    let loglik = *trace.last().expect("trace starts non-empty");
    let aic = 2.0 * 8.0 - 2.0 * loglik;
    let fit = BivariateTeamFit {
        mu_coeffs: st.mu,
        nu_coeffs: st.nu,
        tau_coeff: st.tau.ln(),
        loglik,
        aic,
        iterations,
        tau_at_lower_bound: degenerate || st.tau <= TAU_LOWER_BOUND,
        loglik_trace: trace,
    };
    Ok((fit, st.infl.expect("inflated state"), aic))
}

/// Standard errors of `(a10, a11, a20, a21, a30)` from the observed
/// information, by central differences of the observed-data log-likelihood.
pub fn bivariate_standard_errors(fit: &BivariateTeamFit, obs: &[Observation]) -> Result<[f64; 5]> {
    // step sizes scaled to each parameter's covariate magnitude
    let h = [1e-4, 1e-7, 1e-4, 1e-7, 1e-4];
    let ll = |p: &[f64; 5]| observed_loglik(obs, [p[0], p[1]], [p[2], p[3]], p[4].exp(), None);
    let base = fit.params();
    let mut hess = DMatrix::zeros(5, 5);
    for i in 0..5 {
        for j in i..5 {
            let eval = |si: f64, sj: f64| {
                let mut p = base;
                p[i] += si * h[i];
                p[j] += sj * h[j];
                ll(&p)
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let cov = (-hess).try_inverse().ok_or(Error::RankDeficient)?;
    let mut se = [0.0; 5];
    for (k, s) in se.iter_mut().enumerate() {
        *s = cov[(k, k)].max(0.0).sqrt();
    }
    Ok(se)
}
