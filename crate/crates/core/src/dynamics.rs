//! Numerical evidence layer: adaptive integration of the full slow-fast
//! system with tube-event detection, the reduced flow on branches, a
//! canard-following arclength metric, exact and floating Euler-map iteration,
//! and the discrete-time multiplier condition on the critical set.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Signed;

use crate::canard::{project_rho, FastFrame};
use crate::numeric::{self, RkOptions, StepRecord, StopReason};
use crate::poly::{rat_to_f64, PolyError, PolyVectorField, Rational};
use crate::stratify::{BranchId, CriticalSet, Side};

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    InvalidConfig(String),
    /// A multiplier-check point is off the critical set beyond tolerance.
    PointNotOnCriticalSet { point: [f64; 2], residual: f64 },
    Poly(PolyError),
}

impl From<PolyError> for DynamicsError {
    fn from(e: PolyError) -> Self {
        DynamicsError::Poly(e)
    }
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            DynamicsError::PointNotOnCriticalSet { point, residual } => write!(
                f,
                "point ({}, {}) is not on the critical set (residual {residual:.3e})",
                point[0], point[1]
            ),
            DynamicsError::Poly(e) => write!(f, "{e}"),
        }
    }
}

/// Configuration of the full-system integrator.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// The perturbation parameter value.
    pub epsilon: f64,
}

impl IntegratorConfig {
    pub fn new(epsilon: f64) -> Result<Self, DynamicsError> {
        let cfg = IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 0.5,
            max_steps: 2_000_000,
            epsilon,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2 && self.abs_tol > 0.0 && self.abs_tol <= 1e-2)
        {
            return Err(DynamicsError::InvalidConfig(
                "tolerances must lie in (0, 1e-2]".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-1) {
            return Err(DynamicsError::InvalidConfig("epsilon must lie in (0, 1e-1]".into()));
        }
        Ok(())
    }

    fn rk_options(&self) -> RkOptions {
        RkOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
        }
    }
}

/// Default tube radius around a branch: canard deviations scale near
/// `sqrt(eps)`.
pub fn default_tube_radius(epsilon: f64) -> f64 {
    (10.0 * numeric::sqrt(epsilon)).max(1e-3)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    EnteredTube(BranchId),
    LeftTube(BranchId),
    PassedSingularPoint,
    /// Reduced flow reached the singular point on a non-canard branch.
    UndefinedAtSingularPoint,
    CrossedSingularPoint,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::EnteredTube(b) => write!(f, "entered tube of {b}"),
            EventKind::LeftTube(b) => write!(f, "left tube of {b}"),
            EventKind::PassedSingularPoint => write!(f, "passed singular point"),
            EventKind::UndefinedAtSingularPoint => {
                write!(f, "reduced flow undefined at singular point")
            }
            EventKind::CrossedSingularPoint => write!(f, "crossed singular point"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

/// An integrated orbit with tagged events.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 2]>,
    pub events: Vec<Event>,
}

impl Trajectory {
    fn push(&mut self, t: f64, q: [f64; 2]) {
        self.times.push(t);
        self.states.push(q);
    }

    pub fn last_state(&self) -> Option<[f64; 2]> {
        self.states.last().copied()
    }

    pub fn arclength(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| numeric::hypot(w[1][0] - w[0][0], w[1][1] - w[0][1]))
            .sum()
    }
}

/// Why a full-system integration ended early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegrationDiagnostic {
    /// Step size underflow: stiffness beyond the configured tolerances. The
    /// partial trajectory is still returned.
    StepUnderflow,
    NonFiniteState,
    MaxStepsExceeded,
}

#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub trajectory: Trajectory,
    pub diagnostic: Option<IntegrationDiagnostic>,
}

/// Context for tube-event detection during full-system integration.
pub struct EventSpec<'a> {
    pub critical_set: &'a CriticalSet,
    pub singular_point: Option<[f64; 2]>,
    pub tube_radius: f64,
}

/// First-order distance of a point to a branch: `|F_i| / |grad F_i|`.
pub fn branch_distance(cs: &CriticalSet, branch: BranchId, q: [f64; 2]) -> f64 {
    let br = cs.branch(branch);
    let f = numeric::fabs(br.defining_poly.eval_f64(&q));
    let g = br.gradient_f64(q);
    f / numeric::hypot(g[0], g[1]).max(1e-12)
}

/// Integrate the full system `X0 + eps X1` with an adaptive embedded 5(4)
/// Runge-Kutta pair; events (tube entry and exit per branch, passing the
/// singular point) are located on the dense output by bisection.
pub fn integrate_full(
    x0: &PolyVectorField,
    x1: &PolyVectorField,
    cfg: &IntegratorConfig,
    q0: [f64; 2],
    t_end: f64,
    events: Option<&EventSpec<'_>>,
) -> Result<IntegrationResult, DynamicsError> {
    cfg.validate()?;
    let eps = cfg.epsilon;
    let rhs = move |q: &[f64]| -> Vec<f64> {
        let a = x0.eval_f64(q);
        let b = x1.eval_f64(q);
        alloc::vec![a[0] + eps * b[0], a[1] + eps * b[1]]
    };
    let mut traj = Trajectory::default();
    traj.push(0.0, q0);
    if t_end <= 0.0 {
        return Ok(IntegrationResult { trajectory: traj, diagnostic: None });
    }

    // tube membership per branch, for edge detection
    let mut inside: Vec<bool> = events
        .map(|ev| {
            ev.critical_set
                .branches
                .iter()
                .map(|b| branch_distance(ev.critical_set, b.id, q0) < ev.tube_radius)
                .collect()
        })
        .unwrap_or_default();
    let mut ps_dist_prev: Option<f64> = None;
    let mut ps_decreasing = false;

    let reason = numeric::integrate_dopri5(rhs, &q0, t_end, &cfg.rk_options(), |rec| {
        let q1 = [rec.y1[0], rec.y1[1]];
        traj.push(rec.t1, q1);
        if let Some(ev) = events {
            for (bi, b) in ev.critical_set.branches.iter().enumerate() {
                let now = branch_distance(ev.critical_set, b.id, q1) < ev.tube_radius;
                if now != inside[bi] {
                    let t_cross = locate_tube_crossing(ev, b.id, rec, ev.tube_radius);
                    traj.events.push(Event {
                        time: t_cross,
                        kind: if now {
                            EventKind::EnteredTube(b.id)
                        } else {
                            EventKind::LeftTube(b.id)
                        },
                    });
                    inside[bi] = now;
                }
            }
            if let Some(ps) = ev.singular_point {
                let d = numeric::hypot(q1[0] - ps[0], q1[1] - ps[1]);
                if let Some(dp) = ps_dist_prev {
                    if d < dp {
                        ps_decreasing = true;
                    } else if ps_decreasing && dp < ev.tube_radius {
                        traj.events.push(Event {
                            time: rec.t0,
                            kind: EventKind::PassedSingularPoint,
                        });
                        ps_decreasing = false;
                    }
                }
                ps_dist_prev = Some(d);
            }
        }
        true
    });
    let diagnostic = match reason {
        StopReason::Completed | StopReason::ObserverStop => None,
        StopReason::StepUnderflow => Some(IntegrationDiagnostic::StepUnderflow),
        StopReason::NonFinite => Some(IntegrationDiagnostic::NonFiniteState),
        StopReason::MaxSteps => Some(IntegrationDiagnostic::MaxStepsExceeded),
    };
    Ok(IntegrationResult { trajectory: traj, diagnostic })
}

fn locate_tube_crossing(
    ev: &EventSpec<'_>,
    branch: BranchId,
    rec: &StepRecord,
    radius: f64,
) -> f64 {
    let f = |t: f64| {
        let q = rec.interpolate(t);
        branch_distance(ev.critical_set, branch, [q[0], q[1]]) - radius
    };
    let (mut lo, mut hi) = (rec.t0, rec.t1);
    let mut flo = f(lo);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Integrate the reduced flow `rho(X1)` along one branch from `q0`. The
/// vector field is the oblique projection of `X1` onto the branch tangent
/// along the fast foliation; the orbit is re-projected onto the branch after
/// every step. Crossing the singular point is permitted exactly when
/// `crossing_allowed` (the branch carries a relaxed smooth stratum); on other
/// branches the orbit halts there with an event.
pub fn integrate_reduced(
    x1: &PolyVectorField,
    cs: &CriticalSet,
    frame: &FastFrame,
    branch: BranchId,
    q0: [f64; 2],
    t_end: f64,
    singular_point: Option<[f64; 2]>,
    crossing_allowed: bool,
) -> Result<Trajectory, DynamicsError> {
    let br = cs.branch(branch);
    let rhs = move |q: &[f64]| -> Vec<f64> {
        let p = [q[0], q[1]];
        let s = project_rho(x1, p, br, frame);
        if !s.well_defined {
            return alloc::vec![f64::NAN, f64::NAN];
        }
        let g = br.gradient_f64(p);
        let t = [-g[1], g[0]];
        alloc::vec![s.tangent_component * t[0], s.tangent_component * t[1]]
    };
    let mut traj = Trajectory::default();
    traj.push(0.0, q0);
    if t_end <= 0.0 {
        return Ok(traj);
    }
    let opts = RkOptions { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.01, max_steps: 4_000_000 };
    // signed coordinate along the tangent direction at p_s detects crossings
    let crossing_axis = singular_point.map(|ps| {
        let g = br.gradient_f64(ps);
        let t = [-g[1], g[0]];
        let n = numeric::hypot(t[0], t[1]).max(1e-30);
        (ps, [t[0] / n, t[1] / n])
    });
    let mut halted = false;
    numeric::integrate_dopri5(rhs, &q0, t_end, &opts, |rec| {
        // re-project the endpoint onto the branch (first-order Newton)
        let mut q1 = [rec.y1[0], rec.y1[1]];
        for _ in 0..3 {
            let fv = br.defining_poly.eval_f64(&q1);
            let g = br.gradient_f64(q1);
            let n2 = g[0] * g[0] + g[1] * g[1];
            if n2 < 1e-18 {
                break;
            }
            q1[0] -= fv * g[0] / n2;
            q1[1] -= fv * g[1] / n2;
        }
        if let Some((ps, axis)) = crossing_axis {
            let q0s = traj.last_state().unwrap();
            // asymptotically pinned at the singular point (the reduced flow
            // vanishes there): halt with the event rather than spin forever
            if !crossing_allowed
                && numeric::hypot(q1[0] - ps[0], q1[1] - ps[1]) < 1e-9
            {
                traj.push(rec.t1, q1);
                traj.events.push(Event {
                    time: rec.t1,
                    kind: EventKind::UndefinedAtSingularPoint,
                });
                return false;
            }
            let e0 = (q0s[0] - ps[0]) * axis[0] + (q0s[1] - ps[1]) * axis[1];
            let e1 = (q1[0] - ps[0]) * axis[0] + (q1[1] - ps[1]) * axis[1];
            if e0 * e1 < 0.0 {
                if crossing_allowed {
                    traj.events.push(Event {
                        time: rec.t0,
                        kind: EventKind::CrossedSingularPoint,
                    });
                } else {
                    // halt exactly at the singular point
                    traj.push(rec.t0 + (rec.t1 - rec.t0) * e0 / (e0 - e1), ps);
                    traj.events.push(Event {
                        time: rec.t1,
                        kind: EventKind::UndefinedAtSingularPoint,
                    });
                    halted = true;
                    return false;
                }
            }
        }
        traj.push(rec.t1, q1);
        true
    });
    let _ = halted;
    Ok(traj)
}

/// Arclength the trajectory spends inside the tube of the repelling half of
/// `branch` past the singular point, up to its first exit. Zero when the
/// orbit never enters the repelling side of the tube.
pub fn canard_metric(
    traj: &Trajectory,
    cs: &CriticalSet,
    branch: BranchId,
    p_s: [f64; 2],
    tube_radius: f64,
) -> f64 {
    // repelling side of the branch: sign of the transverse eigenvalue at a
    // sample point on each half
    let br = cs.branch(branch);
    let repelling_side = {
        let mut found: Option<Side> = None;
        for side in [Side::Neg, Side::Pos] {
            let q = crate::canard::float_branch_point(br, p_s, side, tube_radius.max(0.05));
            if cs.transverse_eigenvalue_f64(q) > 0.0 {
                found = Some(side);
            }
        }
        match found {
            Some(s) => s,
            None => return 0.0, // no repelling half
        }
    };
    // signed position along the tangent: positive side has the tangent
    // direction, matching Side::Pos
    let g = br.gradient_f64(p_s);
    let t = [-g[1], g[0]];
    let n = numeric::hypot(t[0], t[1]).max(1e-30);
    let axis = [t[0] / n, t[1] / n];
    let on_repelling_side = |q: [f64; 2]| -> bool {
        let e = (q[0] - p_s[0]) * axis[0] + (q[1] - p_s[1]) * axis[1];
        match repelling_side {
            Side::Pos => e > 0.0,
            Side::Neg => e < 0.0,
        }
    };
    let mut total = 0.0;
    let mut in_run = false;
    for w in traj.states.windows(2) {
        let q = w[1];
        let inside = branch_distance(cs, branch, q) < tube_radius && on_repelling_side(q);
        if inside {
            total += numeric::hypot(w[1][0] - w[0][0], w[1][1] - w[0][1]);
            in_run = true;
        } else if in_run {
            break; // first exit ends the metric window
        }
    }
    total
}

/// The Euler discretisation `q -> q + (X0 + eps X1)(q) delta`, iterated
/// exactly in rational arithmetic until a bit budget is exceeded, then in
/// floating point (flagged).
#[derive(Debug, Clone)]
pub struct EulerMap {
    pub x0: PolyVectorField,
    pub x1: PolyVectorField,
    pub delta: Rational,
    pub epsilon: Rational,
    /// Iteration switches to floating point when a coordinate's numerator or
    /// denominator exceeds this many bits.
    pub bit_budget: u64,
}

#[derive(Debug, Clone)]
pub struct EulerOrbit {
    pub points: Vec<[f64; 2]>,
    /// Number of leading iterates computed exactly.
    pub exact_prefix: usize,
    pub switched_to_float: bool,
}

impl EulerMap {
    pub fn new(
        x0: PolyVectorField,
        x1: PolyVectorField,
        delta: Rational,
        epsilon: Rational,
    ) -> Result<Self, DynamicsError> {
        if !delta.is_positive() {
            return Err(DynamicsError::InvalidConfig("delta must be positive".into()));
        }
        Ok(EulerMap { x0, x1, delta, epsilon, bit_budget: 4096 })
    }

    /// One exact step.
    pub fn step_exact(&self, q: &[Rational; 2]) -> Result<[Rational; 2], PolyError> {
        let at = [("x", q[0].clone()), ("y", q[1].clone())];
        let mut out = q.clone();
        for i in 0..2 {
            let a = self.x0.component(i).eval_rational(&at)?;
            let b = self.x1.component(i).eval_rational(&at)?;
            out[i] = &q[i] + (&a + &self.epsilon * &b) * &self.delta;
        }
        Ok(out)
    }

    pub fn step_f64(&self, q: [f64; 2]) -> [f64; 2] {
        let a = self.x0.eval_f64(&q);
        let b = self.x1.eval_f64(&q);
        let d = rat_to_f64(&self.delta);
        let e = rat_to_f64(&self.epsilon);
        [q[0] + (a[0] + e * b[0]) * d, q[1] + (a[1] + e * b[1]) * d]
    }

    fn bits(r: &Rational) -> u64 {
        r.numer().bits().max(r.denom().bits())
    }

    /// `n` iterates from `q0` (the orbit includes `q0` itself).
    pub fn iterate(&self, q0: [Rational; 2], n: usize) -> Result<EulerOrbit, PolyError> {
        let mut points = Vec::with_capacity(n + 1);
        let mut exact: Option<[Rational; 2]> = Some(q0.clone());
        let mut float_state = [rat_to_f64(&q0[0]), rat_to_f64(&q0[1])];
        points.push(float_state);
        let mut exact_prefix = 0;
        for _ in 0..n {
            match exact.take() {
                Some(q) => {
                    let next = self.step_exact(&q)?;
                    float_state = [rat_to_f64(&next[0]), rat_to_f64(&next[1])];
                    points.push(float_state);
                    exact_prefix += 1;
                    if Self::bits(&next[0]) > self.bit_budget
                        || Self::bits(&next[1]) > self.bit_budget
                    {
                        exact = None; // budget exceeded: continue in floats
                    } else {
                        exact = Some(next);
                    }
                }
                None => {
                    float_state = self.step_f64(float_state);
                    points.push(float_state);
                }
            }
        }
        let switched = exact_prefix < n;
        Ok(EulerOrbit { points, exact_prefix, switched_to_float: switched })
    }
}

/// Multiplier report for one point of the critical set.
#[derive(Debug, Clone)]
pub struct MultiplierReport {
    pub point: [f64; 2],
    pub multipliers: [(f64, f64); 2],
    /// No multiplier on the unit circle except the trivial tangential one.
    pub normally_hyperbolic: bool,
    /// The transverse multiplier itself landed on the unit circle.
    pub degenerate: bool,
}

pub const UNIT_CIRCLE_TOL: f64 = 1e-9;
pub const ON_SET_RESIDUAL: f64 = 1e-10;

/// Eigenvalues of `Id + delta DX0` at points of the critical set. On the
/// critical set `DX0` has rank one, so one multiplier is the trivial
/// tangential `1`; it is excluded from the normal-hyperbolicity test.
pub fn multiplier_check(
    cs: &CriticalSet,
    delta: f64,
    points: &[[f64; 2]],
) -> Result<Vec<MultiplierReport>, DynamicsError> {
    let field = cs.desingularized_field();
    let jac = field.jacobian()?;
    let mut out = Vec::with_capacity(points.len());
    for &q in points {
        let fval = cs.common_poly.eval_f64(&q);
        let fx = cs.common_poly.differentiate("x")?.eval_f64(&q);
        let fy = cs.common_poly.differentiate("y")?.eval_f64(&q);
        let scale = numeric::hypot(fx, fy).max(1.0);
        if numeric::fabs(fval) / scale > ON_SET_RESIDUAL {
            return Err(DynamicsError::PointNotOnCriticalSet {
                point: q,
                residual: numeric::fabs(fval) / scale,
            });
        }
        let j = [
            [jac[0][0].eval_f64(&q), jac[0][1].eval_f64(&q)],
            [jac[1][0].eval_f64(&q), jac[1][1].eval_f64(&q)],
        ];
        let eig = numeric::eig2(j[0][0], j[0][1], j[1][0], j[1][1]);
        let mults = [
            (1.0 + delta * eig[0].0, delta * eig[0].1),
            (1.0 + delta * eig[1].0, delta * eig[1].1),
        ];
        // exclude the multiplier closest to 1 as the trivial tangential one
        let d0 = numeric::hypot(mults[0].0 - 1.0, mults[0].1);
        let d1 = numeric::hypot(mults[1].0 - 1.0, mults[1].1);
        let transverse = if d0 <= d1 { mults[1] } else { mults[0] };
        let on_circle =
            numeric::fabs(numeric::hypot(transverse.0, transverse.1) - 1.0) <= UNIT_CIRCLE_TOL;
        out.push(MultiplierReport {
            point: q,
            multipliers: mults,
            normally_hyperbolic: !on_circle,
            degenerate: on_circle,
        });
    }
    Ok(out)
}


#[cfg(test)]
mod extra_tests {
    use super::*;
    use crate::canard::{detect_singular_canards, FastFrame};
    use crate::poly::{parse_poly, Vars};
    use crate::stratify::{build_critical_set, find_singular_points, AnalysisBox};

    fn planar(a: &str, b: &str) -> PolyVectorField {
        let vars = Vars::xy();
        PolyVectorField::planar(
            parse_poly(a, &vars).unwrap(),
            parse_poly(b, &vars).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn pitchfork_reduced_flow_crossing() {
        let x0 = planar("(x + y/2)*(x - y/2)*(y - x^2)", "0");
        let x1 = planar("-1", "-x");
        let cs = build_critical_set(&x0).unwrap();
        let bx = AnalysisBox::default();
        let pts = find_singular_points(&cs, &bx).unwrap();
        let frame = FastFrame::validated(&cs, &pts[0], &bx).unwrap();
        let report = detect_singular_canards(&x1, &cs, &pts[0], &frame, &bx).unwrap();
        let canard = report.canard_branches()[0];
        let ps = pts[0].location.to_f64();

        // the parabola crosses: start on the attracting side (x > 0)
        let traj =
            integrate_reduced(&x1, &cs, &frame, canard, [0.5, 0.25], 3.0, Some(ps), true).unwrap();
        assert!(traj
            .events
            .iter()
            .any(|e| e.kind == EventKind::CrossedSingularPoint));
        let last = traj.last_state().unwrap();
        assert!(last[0] < -0.2, "{last:?}");

        // the line x = y/2 attracts its reduced flow into the singular
        // point (the projection vanishes there): the orbit pins at p_s and
        // halts with the event, never crossing
        let line = cs
            .branches
            .iter()
            .find(|b| alloc::format!("{}", b.defining_poly) == "x - 1/2*y")
            .unwrap()
            .id;
        let traj = integrate_reduced(
            &x1, &cs, &frame, line, [0.25, 0.5], 60.0, Some(ps), false,
        )
        .unwrap();
        assert!(traj
            .events
            .iter()
            .any(|e| e.kind == EventKind::UndefinedAtSingularPoint));
        assert!(!traj
            .events
            .iter()
            .any(|e| e.kind == EventKind::CrossedSingularPoint));
        let last = traj.last_state().unwrap();
        assert!(numeric::hypot(last[0], last[1]) < 1e-8, "{last:?}");
    }

    #[test]
    fn monotone_canard_separation_across_eps() {
        let x0 = planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
        let x1 = planar("1", "1/2");
        let cs = build_critical_set(&x0).unwrap();
        let canard = cs
            .branches
            .iter()
            .find(|b| alloc::format!("{}", b.defining_poly) == "x - 2*y")
            .unwrap()
            .id;
        // X1 rotated by 0.1 rad
        let rot = planar(
            "99500416527802576/100000000000000000 - 99833416646828154/2000000000000000000",
            "99833416646828154/1000000000000000000 + 99500416527802576/200000000000000000",
        );
        for eps in [1e-2, 1e-3] {
            let cfg = IntegratorConfig::new(eps).unwrap();
            let run = |x1: &PolyVectorField| {
                let res =
                    integrate_full(&x0, x1, &cfg, [-0.5, -0.25 + 1e-4], 1700.0, None).unwrap();
                canard_metric(&res.trajectory, &cs, canard, [0.0, 0.0], 1e-2)
            };
            let aligned = run(&x1);
            let rotated = run(&rot);
            assert!(
                aligned > rotated,
                "eps {eps}: aligned {aligned} not greater than rotated {rotated}"
            );
        }
    }
}
