//! Floating-point utilities shared by the numeric layers: `libm`-backed math
//! for `no_std`, small dense linear algebra, 2x2 eigenvalues, and an
//! embedded Dormand-Prince 5(4) step engine with PI step-size control.

use alloc::vec::Vec;

pub use libm::{atan2, cos, fabs, hypot, sin, sqrt};

pub fn powi(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        e >>= 1;
        b *= b;
    }
    acc
}

/// Wrap an angle to `[-pi, pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut x = t % two_pi;
    if x < -core::f64::consts::PI {
        x += two_pi;
    } else if x >= core::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Distance between two angles modulo 2*pi.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    fabs(wrap_angle(a - b))
}

/// Eigenvalues of `[[a, b], [c, d]]` as (re, im) pairs, sorted by real part.
pub fn eig2(a: f64, b: f64, c: f64, d: f64) -> [(f64, f64); 2] {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = sqrt(disc);
        let l1 = tr / 2.0 - s;
        let l2 = tr / 2.0 + s;
        [(l1, 0.0), (l2, 0.0)]
    } else {
        let s = sqrt(-disc);
        [(tr / 2.0, -s), (tr / 2.0, s)]
    }
}

/// Solve a small dense system by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if fabs(a[i][k]) > fabs(a[piv][k]) {
                piv = i;
            }
        }
        if fabs(a[piv][k]) < 1e-300 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// One accepted integrator step, with endpoint derivatives for cubic Hermite
/// interpolation (dense output at this order of accuracy).
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub t0: f64,
    pub t1: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
}

impl StepRecord {
    /// Cubic Hermite interpolant at `t` in `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        (0..self.y0.len())
            .map(|i| {
                h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
            })
            .collect()
    }
}

/// Why the integrator stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    /// Reached the requested end time.
    Completed,
    /// Observer requested an early stop.
    ObserverStop,
    /// Step size underflowed below `h_min` (stiffness beyond tolerance).
    StepUnderflow,
    /// Exceeded the step budget.
    MaxSteps,
    /// A state or derivative became non-finite.
    NonFinite,
}

pub struct RkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions { rel_tol: 1e-8, abs_tol: 1e-10, max_step: 1.0, max_steps: 1_000_000 }
    }
}

const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Adaptive explicit Dormand-Prince 5(4). Calls `observe` after each accepted
/// step; returning `false` stops the run. Integrates from `t = 0` to `t_end`.
pub fn integrate_dopri5<F, O>(
    rhs: F,
    y0: &[f64],
    t_end: f64,
    opts: &RkOptions,
    mut observe: O,
) -> StopReason
where
    F: Fn(&[f64]) -> Vec<f64>,
    O: FnMut(&StepRecord) -> bool,
{
    let dim = y0.len();
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut f_now = rhs(&y);
    if !f_now.iter().all(|v| v.is_finite()) {
        return StopReason::NonFinite;
    }
    if t_end <= 0.0 {
        return StopReason::Completed;
    }
    let h_min = t_end * 1e-14;
    let mut h = initial_step(&y, &f_now, opts, t_end);
    let mut steps = 0usize;
    let mut k = alloc::vec![alloc::vec![0.0; dim]; 7];

    while t < t_end {
        if steps >= opts.max_steps {
            return StopReason::MaxSteps;
        }
        steps += 1;
        if t + h > t_end {
            h = t_end - t;
        }
        k[0].copy_from_slice(&f_now);
        let mut failed_non_finite = false;
        for stage in 0..6 {
            let mut ys = y.clone();
            for (i, v) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += DP_A[stage][j] * kj[i];
                }
                *v += h * acc;
            }
            let _ = DP_C; // stage times are implicit (autonomous systems)
            let f = rhs(&ys);
            if !f.iter().all(|v| v.is_finite()) {
                failed_non_finite = true;
                break;
            }
            k[stage + 1] = f;
        }
        if failed_non_finite {
            h *= 0.5;
            if h < h_min {
                return StopReason::NonFinite;
            }
            continue;
        }
        // error estimate and norm
        let mut err_norm = 0.0f64;
        let y_new: Vec<f64> = (0..dim)
            .map(|i| {
                y[i] + h
                    * (DP_A[5][0] * k[0][i]
                        + DP_A[5][2] * k[2][i]
                        + DP_A[5][3] * k[3][i]
                        + DP_A[5][4] * k[4][i]
                        + DP_A[5][5] * k[5][i])
            })
            .collect();
        for i in 0..dim {
            let e: f64 = (0..7).map(|j| DP_E[j] * k[j][i]).sum::<f64>() * h;
            let scale = opts.abs_tol + opts.rel_tol * fabs(y[i]).max(fabs(y_new[i]));
            err_norm += (e / scale) * (e / scale);
        }
        err_norm = sqrt(err_norm / dim as f64);
        if !y_new.iter().all(|v| v.is_finite()) {
            return StopReason::NonFinite;
        }
        if err_norm <= 1.0 {
            // accept; k[6] is f(y_new) by the FSAL property
            let rec = StepRecord {
                t0: t,
                t1: t + h,
                y0: y.clone(),
                y1: y_new.clone(),
                f0: k[0].clone(),
                f1: k[6].clone(),
            };
            t += h;
            y = y_new;
            f_now = k[6].clone();
            if !observe(&rec) {
                return StopReason::ObserverStop;
            }
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * libm::pow(err_norm, -0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(opts.max_step);
        if h < h_min {
            return StopReason::StepUnderflow;
        }
    }
    StopReason::Completed
}

fn initial_step(y: &[f64], f: &[f64], opts: &RkOptions, t_end: f64) -> f64 {
    let ynorm = y.iter().map(|v| v * v).sum::<f64>();
    let fnorm = f.iter().map(|v| v * v).sum::<f64>();
    let h = if fnorm > 1e-30 {
        0.01 * sqrt((ynorm + opts.abs_tol) / fnorm)
    } else {
        1e-3 * t_end
    };
    h.min(opts.max_step).min(t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal() {
        let e = eig2(-2.0, 0.0, 0.0, 3.0);
        assert!((e[0].0 + 2.0).abs() < 1e-14 && e[0].1 == 0.0);
        assert!((e[1].0 - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_complex_pair() {
        let e = eig2(0.0, 1.0, -1.0, 0.0);
        assert!((e[0].0).abs() < 1e-14);
        assert!((e[0].1 + 1.0).abs() < 1e-14);
        assert!((e[1].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_exponential_decay() {
        let opts = RkOptions { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() };
        let mut last = alloc::vec![1.0];
        let reason = integrate_dopri5(
            |y| alloc::vec![-y[0]],
            &[1.0],
            1.0,
            &opts,
            |rec| {
                last = rec.y1.clone();
                true
            },
        );
        assert_eq!(reason, StopReason::Completed);
        assert!((last[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn order_of_convergence() {
        // tightening tolerances by 1e2 should reduce global error by >= 2^4
        let run = |tol: f64| {
            let opts = RkOptions { rel_tol: tol, abs_tol: tol * 1e-2, ..Default::default() };
            let mut last = alloc::vec![1.0];
            integrate_dopri5(|y| alloc::vec![-y[0]], &[1.0], 1.0, &opts, |rec| {
                last = rec.y1.clone();
                true
            });
            (last[0] - (-1.0f64).exp()).abs()
        };
        let e_loose = run(1e-5);
        let e_tight = run(1e-7);
        assert!(e_tight * 16.0 <= e_loose + 1e-15, "loose {e_loose} tight {e_tight}");
    }

    #[test]
    fn hermite_interpolation_matches_endpoints() {
        let rec = StepRecord {
            t0: 0.0,
            t1: 1.0,
            y0: alloc::vec![1.0],
            y1: alloc::vec![2.0],
            f0: alloc::vec![0.5],
            f1: alloc::vec![1.5],
        };
        assert!((rec.interpolate(0.0)[0] - 1.0).abs() < 1e-14);
        assert!((rec.interpolate(1.0)[0] - 2.0).abs() < 1e-14);
    }
}
