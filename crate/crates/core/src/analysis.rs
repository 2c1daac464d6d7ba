//! Regime characterization: spectral-slope fits, detuning sweeps and
//! transition detection.
//!
//! Inside the resonance region the excitation spectrum follows a weak
//! power law `p_n ~ n^beta` (fit in ln-ln space); outside it decays
//! exponentially, `p_n ~ exp(alpha n)` (fit in semilog space). Both fits
//! are unweighted ordinary least squares: the simulation is deterministic
//! and carries no error bars.

use rayon::prelude::*;

use crate::classical::pr_condition;
use crate::drive::{DriveParams, SimConfig};
use crate::dynamics::evolve;
use crate::error::{Error, Result};
use crate::scalar::{fp, Real};
use crate::spectral::{decompose, SpectralDecomposition};
use crate::state::ground_state;

/// Smallest probability admitted into a log-space fit.
const POSITIVITY_FLOOR: f64 = 1e-300;
/// Default fit window: even n from 2 up to the last index with
/// `p_n > WINDOW_FLOOR`, capped at `WINDOW_CAP` (the power law is only
/// valid up to a finite n).
const WINDOW_FLOOR: f64 = 1e-12;
const WINDOW_CAP: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    PowerLaw,
    Exponential,
}

impl core::fmt::Display for FitModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FitModel::PowerLaw => write!(f, "power_law"),
            FitModel::Exponential => write!(f, "exponential"),
        }
    }
}

/// Least-squares fit of a spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    pub model: FitModel,
    /// `beta` (power law) or `alpha` (exponential, per unit n).
    pub slope: T,
    /// Intercept in the fit's log space.
    pub intercept: T,
    /// Coefficient of determination of the log-space fit.
    pub r_squared: T,
    /// First and last even indices used.
    pub n_range: (usize, usize),
    pub points_used: usize,
}

/// Whether a drive sits in the classical parametric-resonance region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    InsidePr,
    OutsidePr,
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Regime::InsidePr => write!(f, "inside_pr"),
            Regime::OutsidePr => write!(f, "outside_pr"),
        }
    }
}

/// Observables of one successful sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowObservables<T> {
    pub p0: T,
    pub p2: T,
    pub p4: T,
    pub p6: T,
    /// Closed-form `<H_0>` of the evolved state.
    pub energy: T,
    pub regime: Regime,
    /// Regime-appropriate fitted slope; `None` when the fit failed.
    pub slope: Option<T>,
    pub fit_error: Option<Error>,
}

/// One grid point of a detuning sweep. Failures are recorded per row so
/// the sweep continues past them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub r: T,
    pub h: T,
    pub nu: u32,
    pub outcome: Result<RowObservables<T>>,
}

/// Ordered result of a detuning sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub h: T,
    pub nu: u32,
    /// Rows sorted by ascending `r`, one per grid point.
    pub rows: Vec<SweepRow<T>>,
}

fn ols<T: Real>(points: &[(T, T)]) -> Result<(T, T, T)> {
    let n = fp::<T>(points.len() as f64);
    let mean_x = points.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let mean_y = points.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for &(x, y) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= T::zero() {
        return Err(Error::DegenerateFit("zero variance in regressor".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy > T::zero() {
        let ss_res = points.iter().fold(T::zero(), |acc, &(x, y)| {
            let r = y - (intercept + slope * x);
            acc + r * r
        });
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    } else {
        // constant response is reproduced exactly by the zero-slope line
        T::one()
    };
    Ok((slope, intercept, r_squared))
}

/// Default fit window for a decomposition, `None` when no index
/// qualifies.
pub fn default_fit_window<T: Real>(dec: &SpectralDecomposition<T>) -> Option<(usize, usize)> {
    let hi = dec
        .iter_even()
        .take_while(|&(n, p)| n <= WINDOW_CAP && p > fp(WINDOW_FLOOR))
        .last()?
        .0;
    (hi >= 2).then_some((2, hi))
}

fn collect_points<T: Real>(
    dec: &SpectralDecomposition<T>,
    n_range: Option<(usize, usize)>,
    x_of: impl Fn(usize) -> T,
    y_of: impl Fn(usize, T) -> T,
) -> Result<(Vec<(T, T)>, (usize, usize))> {
    let (lo, hi) = match n_range {
        Some(range) => range,
        None => default_fit_window(dec).ok_or(Error::InsufficientPoints { needed: 3, got: 0 })?,
    };
    let points: Vec<(T, T)> = dec
        .iter_even()
        .filter(|&(n, p)| n >= lo.max(2) && n <= hi && p > fp(POSITIVITY_FLOOR))
        .map(|(n, p)| (x_of(n), y_of(n, p)))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    Ok((points, (lo, hi)))
}

/// Power-law fit `ln(p_n / p_0)` against `ln n` over even `n >= 2`
/// (`p_0` is excluded: `ln 0` is undefined and the spectrum is analyzed
/// relative to the ground-state weight).
pub fn fit_powerlaw<T: Real>(
    dec: &SpectralDecomposition<T>,
    n_range: Option<(usize, usize)>,
) -> Result<FitResult<T>> {
    let p0 = dec.p(0).filter(|p| *p > fp(POSITIVITY_FLOOR)).ok_or_else(|| {
        Error::DegenerateFit("ground-state probability vanishes".into())
    })?;
    let (points, n_range) = collect_points(
        dec,
        n_range,
        |n| fp::<T>(n as f64).ln(),
        |_, p| (p / p0).ln(),
    )?;
    let (slope, intercept, r_squared) = ols(&points)?;
    Ok(FitResult {
        model: FitModel::PowerLaw,
        slope,
        intercept,
        r_squared,
        n_range,
        points_used: points.len(),
    })
}

/// Exponential fit `ln p_n` against `n` over even `n >= 2`; the slope is
/// the decay rate per unit `n`.
pub fn fit_exponential<T: Real>(
    dec: &SpectralDecomposition<T>,
    n_range: Option<(usize, usize)>,
) -> Result<FitResult<T>> {
    let (points, n_range) = collect_points(dec, n_range, |n| fp(n as f64), |_, p| p.ln())?;
    let (slope, intercept, r_squared) = ols(&points)?;
    Ok(FitResult {
        model: FitModel::Exponential,
        slope,
        intercept,
        r_squared,
        n_range,
        points_used: points.len(),
    })
}

fn sweep_row<T: Real>(h: T, nu: u32, r: T, config: &SimConfig<T>) -> SweepRow<T> {
    let outcome = (|| {
        let params = DriveParams::from_ratio(h, r, nu)?;
        let state = evolve(&ground_state(), &params, config)?;
        let dec = decompose(&state, config);
        let regime = if pr_condition(&params)? {
            Regime::InsidePr
        } else {
            Regime::OutsidePr
        };
        let fit = match regime {
            Regime::InsidePr => fit_powerlaw(&dec, None),
            Regime::OutsidePr => fit_exponential(&dec, None),
        };
        let (slope, fit_error) = match fit {
            Ok(f) => (Some(f.slope), None),
            Err(e) => (None, Some(e)),
        };
        Ok(RowObservables {
            p0: dec.p(0).unwrap_or_else(T::nan),
            p2: dec.p(2).unwrap_or_else(T::nan),
            p4: dec.p(4).unwrap_or_else(T::nan),
            p6: dec.p(6).unwrap_or_else(T::nan),
            energy: dec.energy_analytic,
            regime,
            slope,
            fit_error,
        })
    })();
    SweepRow { r, h, nu, outcome }
}

/// Evolve the ground state at every `r` in the grid and tabulate the
/// observables. Rows are computed independently (in parallel) and
/// assembled in ascending-`r` order, so the output is identical for any
/// thread count. Per-row failures are stored in the row; the sweep
/// itself only fails on an invalid grid or configuration.
pub fn sweep<T: Real>(h: T, nu: u32, r_grid: &[T], config: &SimConfig<T>) -> Result<SweepResult<T>> {
    if r_grid.is_empty() {
        return Err(Error::InvalidParams("empty sweep grid".into()));
    }
    if r_grid.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParams("non-finite r in sweep grid".into()));
    }
    config.validate()?;
    if config.n_max < 6 {
        return Err(Error::InvalidParams(
            "sweep records p_0..p_6 and needs n_max >= 6".into(),
        ));
    }
    let mut rows: Vec<SweepRow<T>> = r_grid
        .par_iter()
        .map(|&r| sweep_row(h, nu, r, config))
        .collect();
    rows.sort_by(|a, b| a.r.partial_cmp(&b.r).expect("finite r values"));
    Ok(SweepResult { h, nu, rows })
}

/// `(r, p0)` pairs of the successful rows on one side of r = 0, ordered
/// by increasing |r|. The coordinate returned is |r|.
fn side_profile<T: Real>(sweep: &SweepResult<T>, positive: bool) -> Vec<(T, T)> {
    let mut pts: Vec<(T, T)> = sweep
        .rows
        .iter()
        .filter_map(|row| {
            let obs = row.outcome.as_ref().ok()?;
            let keep = if positive {
                row.r >= T::zero()
            } else {
                row.r <= T::zero()
            };
            (keep && obs.p0.is_finite()).then(|| (row.r.abs(), obs.p0))
        })
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite |r|"));
    pts
}

/// Outermost upward crossing of `level`, scanning from small to large
/// |r|, located by linear interpolation between adjacent grid points.
fn last_upward_crossing<T: Real>(profile: &[(T, T)], level: T) -> Option<T> {
    let mut found = None;
    for w in profile.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if y0 < level && level <= y1 {
            let t = (level - y0) / (y1 - y0);
            found = Some(x0 + t * (x1 - x0));
        }
    }
    found
}

/// Estimate where `p_0` crosses 1/2 on each side of `r = 0`: the
/// transition out of the resonance region. Returns `(r_minus, r_plus)`.
pub fn detect_transition<T: Real>(sweep: &SweepResult<T>) -> Result<(T, T)> {
    let plus = last_upward_crossing(&side_profile(sweep, true), fp(0.5))
        .ok_or_else(|| Error::NoCrossing("p0 never crosses 1/2 for r > 0".into()))?;
    let minus = last_upward_crossing(&side_profile(sweep, false), fp(0.5))
        .ok_or_else(|| Error::NoCrossing("p0 never crosses 1/2 for r < 0".into()))?;
    Ok((-minus, plus))
}

/// Width of the band where `p_0` climbs from `lo` to `hi` on each side
/// of r = 0 (`None` for a side without both crossings). The standard
/// 10-90% sharpness measure of the transition.
pub fn transition_width<T: Real>(sweep: &SweepResult<T>, lo: T, hi: T) -> (Option<T>, Option<T>) {
    let width = |positive: bool| {
        let profile = side_profile(sweep, positive);
        let a = last_upward_crossing(&profile, lo)?;
        let b = last_upward_crossing(&profile, hi)?;
        Some(b - a)
    };
    (width(false), width(true))
}

/// Render a row error deterministically for tabular output.
pub fn row_error_label(err: &Error) -> String {
    match err {
        Error::UndefinedRatio => "undefined_ratio".into(),
        Error::IntegrationFailure(_) => "integration_failure".into(),
        Error::UnitarityViolation { .. } => "unitarity_violation".into(),
        other => format!("{other}").replace(' ', "_"),
    }
}
