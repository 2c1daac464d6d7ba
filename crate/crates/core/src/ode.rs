//! Explicit Runge-Kutta integrators over small fixed-size systems.
//!
//! `dopri5` is the production integrator: the Dormand-Prince 5(4) pair
//! with an embedded error estimate, PI-free step control and the FSAL
//! property. `rk4_fixed` is the classic fixed-step scheme kept as a
//! reference for convergence-order checks.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, fp, Real};

/// Step-control options for [`dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Hard cap on the step size.
    pub max_step: T,
    /// Hard cap on the number of attempted steps.
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: fp(1e-10),
            rel_tol: fp(1e-10),
            max_step: T::infinity(),
            max_steps: 50_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat, where b_hat is the embedded 4th-order weight row.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        let c = fp::<T>(*c);
        for i in 0..N {
            out[i] = out[i] + h * c * k[i];
        }
    }
    out
}

/// Integrate `dy/dtau = f(tau, y)` from `t0` to `t_end >= t0`.
///
/// `observe` runs at `t0` and after every accepted step; returning an
/// error from it aborts the integration (used for unitarity and
/// positivity guards). The final step is shortened to land on `t_end`
/// exactly.
pub fn dopri5<T, const N: usize, F, O>(
    mut f: F,
    t0: T,
    t_end: T,
    y0: [T; N],
    opts: &OdeOptions<T>,
    mut observe: O,
) -> Result<[T; N]>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
    O: FnMut(T, &[T; N]) -> Result<()>,
{
    let span = t_end - t0;
    if !span.is_finite() || span < T::zero() {
        return Err(Error::IntegrationFailure(format!(
            "invalid integration span [{}, {}]",
            as_f64(t0),
            as_f64(t_end)
        )));
    }
    observe(t0, &y0)?;
    if span == T::zero() {
        return Ok(y0);
    }

    let hmax = opts.max_step.min(span);
    let hmin = fp::<T>(16.0) * T::epsilon() * t_end.abs().max(T::one());
    let mut h = hmax * fp(1e-2);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    for _ in 0..opts.max_steps {
        let mut last = false;
        if t + h >= t_end {
            h = t_end - t;
            last = true;
        }

        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = f(t + fp::<T>(C2) * h, &y2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(t + fp::<T>(C3) * h, &y3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(t + fp::<T>(C4) * h, &y4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(t + fp::<T>(C5) * h, &y5);
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = f(t + h, &y6);
        let ynew = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &ynew);

        // weighted rms of the embedded error estimate
        let mut err_sq = T::zero();
        let mut finite = true;
        for i in 0..N {
            let e = h
                * (fp::<T>(E1) * k1[i]
                    + fp::<T>(E3) * k3[i]
                    + fp::<T>(E4) * k4[i]
                    + fp::<T>(E5) * k5[i]
                    + fp::<T>(E6) * k6[i]
                    + fp::<T>(E7) * k7[i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
            let q = e / scale;
            err_sq += q * q;
            finite &= ynew[i].is_finite();
        }
        let err = (err_sq / fp(N as f64)).sqrt();

        if !finite || !err.is_finite() {
            // sharp retreat from a blown-up trial step
            h = h * fp(0.25);
            if h < hmin {
                return Err(Error::IntegrationFailure(format!(
                    "non-finite state at tau = {}",
                    as_f64(t)
                )));
            }
            continue;
        }

        if err <= T::one() {
            t = if last { t_end } else { t + h };
            y = ynew;
            k1 = k7; // FSAL
            observe(t, &y)?;
            if last {
                return Ok(y);
            }
            let fac = (fp::<T>(0.9) * err.powf(fp(-0.2)))
                .min(fp(5.0))
                .max(fp(0.2));
            h = (h * fac).min(hmax);
        } else {
            let fac = (fp::<T>(0.9) * err.powf(fp(-0.2)))
                .min(T::one())
                .max(fp(0.2));
            h = h * fac;
        }
        if h < hmin {
            return Err(Error::IntegrationFailure(format!(
                "step size underflow at tau = {}",
                as_f64(t)
            )));
        }
    }
    Err(Error::IntegrationFailure("step budget exhausted".into()))
}

/// Classic fixed-step 4th-order Runge-Kutta over `n_steps` equal steps.
pub fn rk4_fixed<T, const N: usize, F>(mut f: F, t0: T, t_end: T, y0: [T; N], n_steps: usize) -> [T; N]
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    assert!(n_steps > 0, "rk4_fixed requires at least one step");
    let h = (t_end - t0) / fp(n_steps as f64);
    let mut y = y0;
    let mut t = t0;
    for i in 0..n_steps {
        let k1 = f(t, &y);
        let y2 = axpy(&y, h, &[(0.5, &k1)]);
        let k2 = f(t + fp::<T>(0.5) * h, &y2);
        let y3 = axpy(&y, h, &[(0.5, &k2)]);
        let k3 = f(t + fp::<T>(0.5) * h, &y3);
        let y4 = axpy(&y, h, &[(1.0, &k3)]);
        let k4 = f(t + h, &y4);
        for j in 0..N {
            y[j] = y[j]
                + h * (k1[j] + fp::<T>(2.0) * k2[j] + fp::<T>(2.0) * k3[j] + k4[j]) / fp(6.0);
        }
        t = if i + 1 == n_steps { t_end } else { t0 + h * fp((i + 1) as f64) };
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn circle(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn dopri5_tracks_harmonic_motion() {
        let opts = OdeOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_step: 0.1,
            ..OdeOptions::default()
        };
        let tf = 10.0 * std::f64::consts::PI;
        let y = dopri5(circle, 0.0, tf, [1.0, 0.0], &opts, |_, _| Ok(())).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(y[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn dopri5_lands_exactly_on_t_end() {
        let opts = OdeOptions::<f64> {
            max_step: 0.37,
            ..OdeOptions::default()
        };
        let mut last_t = f64::NAN;
        let tf = 2.5;
        dopri5(circle, 0.0, tf, [1.0, 0.0], &opts, |t, _| {
            last_t = t;
            Ok(())
        })
        .unwrap();
        assert_eq!(last_t, tf);
    }

    #[test]
    fn dopri5_zero_span_returns_initial_state() {
        let opts = OdeOptions::<f64>::default();
        let y = dopri5(circle, 1.0, 1.0, [0.3, 0.7], &opts, |_, _| Ok(())).unwrap();
        assert_eq!(y, [0.3, 0.7]);
    }

    #[test]
    fn dopri5_observer_can_abort() {
        let opts = OdeOptions::<f64>::default();
        let r = dopri5(circle, 0.0, 1.0, [1.0, 0.0], &opts, |t, _| {
            if t > 0.5 {
                Err(Error::IntegrationFailure("abort".into()))
            } else {
                Ok(())
            }
        });
        assert!(r.is_err());
    }

    #[test]
    fn dopri5_reports_blowup() {
        // dy/dt = y^2 from y(0) = 1 blows up at t = 1
        let opts = OdeOptions::<f64>::default();
        let r = dopri5(
            |_t, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            2.0,
            [1.0],
            &opts,
            |_, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::IntegrationFailure(_))));
    }

    #[test]
    fn rk4_is_fourth_order_on_harmonic_motion() {
        let tf = 2.0 * std::f64::consts::PI;
        let err = |n: usize| {
            let y = rk4_fixed(circle, 0.0, tf, [1.0, 0.0], n);
            ((y[0] - 1.0).powi(2) + y[1].powi(2)).sqrt()
        };
        let ratio = err(200) / err(400);
        assert!((13.0..19.0).contains(&ratio), "ratio = {ratio}");
    }
}
