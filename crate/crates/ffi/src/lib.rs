//! C ABI over `elocast`. Every fallible call returns an [`ElocastStatus`];
//! the message of the last failure on the calling thread is available from
//! [`elocast_last_error`]. Handles are opaque and released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use elocast::elo::rating_delta;
use elocast::matchmodels::{CoefficientMap, ModelFamily, ScoreLine};
use elocast::pipeline::RunInputs;
use elocast::report::{coefficients_json, stage_csv, StageEncoding};
use elocast::scoring::{score_all, RpsVariant};
use elocast::tournament::{PenaltyModel, SimConfig, StageDistribution, N_OUTCOMES};
use elocast::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElocastStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInput = 5,
    InsufficientData = 6,
    FitFailed = 7,
    NotAvailable = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElocastFamily {
    Independent = 0,
    Nested = 1,
    Bivariate = 2,
    Inflated = 3,
}

impl From<ElocastFamily> for ModelFamily {
    fn from(f: ElocastFamily) -> Self {
        match f {
            ElocastFamily::Independent => ModelFamily::Independent,
            ElocastFamily::Nested => ModelFamily::Nested,
            ElocastFamily::Bivariate => ModelFamily::Bivariate,
            ElocastFamily::Inflated => ModelFamily::Inflated,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ElocastSimConfig {
    pub replications: u64,
    pub seed: u64,
    pub update_elo: bool,
    pub k_factor: f64,
    /// 0 uses all cores.
    pub threads: u32,
    /// Decide shootouts by a fair coin instead of the expected-goals ratio.
    pub fair_coin_penalties: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ElocastScores {
    pub e1: f64,
    pub e2: f64,
    pub brier: f64,
    pub rps: f64,
}

/// Loaded match data, tournament format, Elo snapshot and filter.
pub struct ElocastInputs {
    inner: RunInputs,
}

/// Fitted coefficients for every participant.
pub struct ElocastCoefficients {
    inner: CoefficientMap,
}

/// Simulated stage distribution.
pub struct ElocastDistribution {
    inner: StageDistribution,
    names: Vec<CString>,
    meta: elocast::report::RunMetadata,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ElocastStatus {
    match e {
        Error::Io { .. } => ElocastStatus::Io,
        Error::Parse { .. } | Error::Json(_) => ElocastStatus::Parse,
        Error::InvalidInput(_) | Error::UnknownTeam(_) => ElocastStatus::InvalidInput,
        Error::InsufficientData { .. } => ElocastStatus::InsufficientData,
        Error::Team { source, .. } => match status_of(source) {
            ElocastStatus::InsufficientData => ElocastStatus::InsufficientData,
            _ => ElocastStatus::FitFailed,
        },
        Error::RankDeficient | Error::NoConvergence { .. } | Error::Overparameterized { .. } => {
            ElocastStatus::FitFailed
        }
    }
}

struct Fail(ElocastStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ElocastStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ElocastStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ElocastStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ElocastStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ElocastStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(ElocastStatus::InvalidInput, "string contains NUL".into()))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn elocast_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn elocast_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default simulation settings: 100000 replications, seed 2018, Elo
/// updating with K = 60, all cores, expected-goals penalties.
#[no_mangle]
pub extern "C" fn elocast_sim_config_default() -> ElocastSimConfig {
    let d = SimConfig::default();
    ElocastSimConfig {
        replications: d.replications,
        seed: d.seed,
        update_elo: d.update_elo,
        k_factor: d.k_factor,
        threads: 0,
        fair_coin_penalties: false,
    }
}

/// Elo change of side A after a match, written to `out_delta`.
/// `draw_result` scores the match as a draw whatever the goals (shootouts).
#[no_mangle]
pub extern "C" fn elocast_elo_delta(
    rating_a: f64,
    rating_b: f64,
    goals_a: u32,
    goals_b: u32,
    k_factor: f64,
    draw_result: bool,
    out_delta: *mut f64,
) -> ElocastStatus {
    guard(|| {
        if out_delta.is_null() {
            return Err(null("out_delta"));
        }
        if !(rating_a.is_finite() && rating_b.is_finite() && k_factor.is_finite() && k_factor > 0.0) {
            return Err(Fail(ElocastStatus::InvalidInput, "ratings and K must be finite, K positive".into()));
        }
        let d = rating_delta(rating_a, rating_b, ScoreLine::new(goals_a, goals_b), k_factor, draw_result);
        unsafe { *out_delta = d };
        Ok(())
    })
}

/// Loads a built-in preset (2010, 2014 or 2018) with match data from
/// `data_path` (file or directory). `elo_path` may be null to use the
/// shipped snapshot.
///
/// # Safety
/// String arguments must be null or valid NUL-terminated strings; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_inputs_from_preset(
    year: u16,
    data_path: *const c_char,
    elo_path: *const c_char,
    out: *mut *mut ElocastInputs,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let data = str_arg(data_path, "data_path")?;
        let elo = opt_str_arg(elo_path, "elo_path")?;
        let inner = RunInputs::from_preset(year, Path::new(data), elo.map(Path::new))?;
        *out = Box::into_raw(Box::new(ElocastInputs { inner }));
        Ok(())
    })
}

/// Loads a custom configuration from format JSON, Elo CSV, filter JSON and
/// match data paths.
///
/// # Safety
/// As for [`elocast_inputs_from_preset`].
#[no_mangle]
pub unsafe extern "C" fn elocast_inputs_from_files(
    format_path: *const c_char,
    elo_path: *const c_char,
    filter_path: *const c_char,
    data_path: *const c_char,
    out: *mut *mut ElocastInputs,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inner = RunInputs::from_files(
            Path::new(str_arg(format_path, "format_path")?),
            Path::new(str_arg(elo_path, "elo_path")?),
            Path::new(str_arg(filter_path, "filter_path")?),
            Path::new(str_arg(data_path, "data_path")?),
        )?;
        *out = Box::into_raw(Box::new(ElocastInputs { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from an `elocast_inputs_*` constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elocast_inputs_free(p: *mut ElocastInputs) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Fits one model family for every participant.
///
/// # Safety
/// `inputs` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_fit(
    inputs: *const ElocastInputs,
    family: ElocastFamily,
    out: *mut *mut ElocastCoefficients,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inputs = handle(inputs, "inputs")?;
        let (inner, _) = inputs.inner.fit(&[family.into()])?;
        *out = Box::into_raw(Box::new(ElocastCoefficients { inner }));
        Ok(())
    })
}

/// Coefficients as JSON; release the string with [`elocast_string_free`].
///
/// # Safety
/// `coeffs` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_coefficients_json(
    coeffs: *const ElocastCoefficients,
    out: *mut *mut c_char,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let c = handle(coeffs, "coefficients")?;
        *out = into_c_string(coefficients_json(&c.inner)?)?;
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`elocast_fit`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elocast_coefficients_free(p: *mut ElocastCoefficients) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the Monte Carlo simulation. `config` may be null for defaults.
///
/// # Safety
/// Handles must be live; `config` null or valid; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_simulate(
    inputs: *const ElocastInputs,
    coeffs: *const ElocastCoefficients,
    family: ElocastFamily,
    config: *const ElocastSimConfig,
    out: *mut *mut ElocastDistribution,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inputs = handle(inputs, "inputs")?;
        let coeffs = handle(coeffs, "coefficients")?;
        let c = config.as_ref().copied().unwrap_or_else(|| elocast_sim_config_default());
        let cfg = SimConfig {
            replications: c.replications,
            seed: c.seed,
            update_elo: c.update_elo,
            k_factor: c.k_factor,
            threads: (c.threads > 0).then_some(c.threads as usize),
        };
        let penalties = if c.fair_coin_penalties {
            PenaltyModel::FairCoin
        } else {
            PenaltyModel::RateProportional
        };
        let family: ModelFamily = family.into();
        let inner = inputs.inner.simulate(family, &coeffs.inner, &cfg, penalties)?;
        let names = inner
            .teams
            .iter()
            .map(|t| CString::new(t.as_str()).unwrap_or_default())
            .collect();
        let meta = inputs.inner.metadata(family, &cfg);
        *out = Box::into_raw(Box::new(ElocastDistribution { inner, names, meta }));
        Ok(())
    })
}

/// Number of teams in the distribution (0 for a null handle).
///
/// # Safety
/// `dist` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn elocast_distribution_team_count(dist: *const ElocastDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.inner.teams.len())
}

/// Name of team `index`, borrowed from the handle; null when out of range.
///
/// # Safety
/// `dist` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn elocast_distribution_team_name(
    dist: *const ElocastDistribution,
    index: usize,
) -> *const c_char {
    dist.as_ref()
        .and_then(|d| d.names.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Writes the six exit-level probabilities of team `index` (champion,
/// runner-up, semi-final, quarter-final, round of 16, group) to `out`.
///
/// # Safety
/// `dist` must be a live handle; `out` must point to 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn elocast_distribution_probs(
    dist: *const ElocastDistribution,
    index: usize,
    out: *mut f64,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = handle(dist, "distribution")?;
        if index >= d.inner.teams.len() {
            return Err(Fail(
                ElocastStatus::InvalidInput,
                format!("team index {index} out of range"),
            ));
        }
        let p = d.inner.probs(index);
        std::slice::from_raw_parts_mut(out, N_OUTCOMES).copy_from_slice(&p);
        Ok(())
    })
}

/// Stage table as CSV; cumulative (reach) columns when `cumulative`,
/// exclusive exit levels otherwise. Release with [`elocast_string_free`].
///
/// # Safety
/// `dist` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_distribution_stage_csv(
    dist: *const ElocastDistribution,
    cumulative: bool,
    out: *mut *mut c_char,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let d = handle(dist, "distribution")?;
        let enc = if cumulative {
            StageEncoding::Cumulative
        } else {
            StageEncoding::Exclusive
        };
        *out = into_c_string(stage_csv(&d.inner, enc, &d.meta))?;
        Ok(())
    })
}

/// Scores the distribution against the preset's realized result.
/// Returns `NotAvailable` when the inputs carry no realized result.
///
/// # Safety
/// Handles must be live; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn elocast_score(
    inputs: *const ElocastInputs,
    dist: *const ElocastDistribution,
    literal_rps: bool,
    out: *mut ElocastScores,
) -> ElocastStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inputs = handle(inputs, "inputs")?;
        let d = handle(dist, "distribution")?;
        let real = inputs
            .inner
            .realized(None)?
            .ok_or_else(|| Fail(ElocastStatus::NotAvailable, "no realized result for these inputs".into()))?;
        let variant = if literal_rps {
            RpsVariant::Literal
        } else {
            RpsVariant::Cumulative
        };
        let s = score_all(&d.inner, &real, variant)?;
        *out = ElocastScores {
            e1: s.e1,
            e2: s.e2,
            brier: s.brier,
            rps: s.rps,
        };
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`elocast_simulate`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elocast_distribution_free(p: *mut ElocastDistribution) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn elocast_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
