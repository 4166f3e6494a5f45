//! Singular-canard detection: the fast-foliation frame, projection of the
//! perturbation onto branch tangents along fast fibres, and the exact
//! tangency (wedge) condition selecting canard branches at a transverse
//! self-intersection of the critical set.
//!
//! The canard condition is an exact vanishing test: for a rational singular
//! point everything below is computed in rational arithmetic, and a branch is
//! a canard branch iff its wedge value is exactly zero while the perturbation
//! does not vanish at the point.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::numeric;
use crate::poly::{rat, rat_to_f64, MultiPoly, PolyError, PolyVectorField, Rational};
use crate::stratify::{
    AnalysisBox, Branch, BranchChart, BranchId, Coord2, CriticalSet, CriticalSetError, Side,
    SingularPoint,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CanardError {
    /// The point does not lie on the branch.
    PointNotOnBranch,
    /// The branch itself is singular (zero gradient) at the point.
    BranchSingularAt,
    /// `X1` vanishes at the singular point; the standing assumption
    /// `|X1(p_s)| = O(1)` is violated.
    PerturbationVanishes,
    /// Fast generator vanishes on a one-dimensional stratum.
    FrameVanishes { branch: BranchId, at: [f64; 2] },
    /// Fast generator is tangent to a branch along a stratum.
    FrameTangent { branch: BranchId, at: [f64; 2] },
    Poly(PolyError),
    CriticalSet(CriticalSetError),
}

impl From<PolyError> for CanardError {
    fn from(e: PolyError) -> Self {
        CanardError::Poly(e)
    }
}

impl From<CriticalSetError> for CanardError {
    fn from(e: CriticalSetError) -> Self {
        CanardError::CriticalSet(e)
    }
}

impl fmt::Display for CanardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanardError::PointNotOnBranch => write!(f, "point is not on the branch"),
            CanardError::BranchSingularAt => {
                write!(f, "branch has zero gradient at the point")
            }
            CanardError::PerturbationVanishes => {
                write!(f, "X1 vanishes at the singular point (|X1(p_s)| = O(1) violated)")
            }
            CanardError::FrameVanishes { branch, at } => {
                write!(f, "fast generator vanishes on {branch} near ({}, {})", at[0], at[1])
            }
            CanardError::FrameTangent { branch, at } => {
                write!(f, "fast generator tangent to {branch} near ({}, {})", at[0], at[1])
            }
            CanardError::Poly(e) => write!(f, "{e}"),
            CanardError::CriticalSet(e) => write!(f, "{e}"),
        }
    }
}

/// The fast-foliation frame: the cofactor `(A-hat, B-hat)` left after
/// removing the common factor from `X0`.
#[derive(Debug, Clone)]
pub struct FastFrame {
    pub generator: [MultiPoly; 2],
}

const FRAME_SAMPLES: u32 = 16;

impl FastFrame {
    /// Build the frame from a critical set and validate it along every
    /// incident half-branch inside the box: the generator must not vanish
    /// and must not be tangent to the branch at sampled stratum points.
    pub fn validated(
        cs: &CriticalSet,
        p: &SingularPoint,
        bx: &AnalysisBox,
    ) -> Result<FastFrame, CanardError> {
        let frame = FastFrame { generator: cs.fast_cofactor.clone() };
        for &bid in &p.incident_branches {
            let base = p.location.to_f64();
            let br = cs.branch(bid);
            for side in [Side::Neg, Side::Pos] {
                for k in 1..=FRAME_SAMPLES {
                    let t = bx.half_extent() * k as f64 / FRAME_SAMPLES as f64;
                    let q = float_branch_point(br, base, side, t);
                    let g = [frame.generator[0].eval_f64(&q), frame.generator[1].eval_f64(&q)];
                    if numeric::hypot(g[0], g[1]) < 1e-9 {
                        return Err(CanardError::FrameVanishes { branch: bid, at: q });
                    }
                    let grad = br.gradient_f64(q);
                    let tangent = [-grad[1], grad[0]];
                    let det = g[0] * tangent[1] - g[1] * tangent[0];
                    let scale = numeric::hypot(g[0], g[1]) * numeric::hypot(tangent[0], tangent[1]);
                    if numeric::fabs(det) < 1e-9 * scale.max(1e-30) {
                        return Err(CanardError::FrameTangent { branch: bid, at: q });
                    }
                }
            }
        }
        Ok(frame)
    }

    pub fn eval_f64(&self, p: [f64; 2]) -> [f64; 2] {
        [self.generator[0].eval_f64(&p), self.generator[1].eval_f64(&p)]
    }
}

/// Follow the branch from `base` by `side * t` along its tangent, then Newton
/// back onto the curve (floating helper for scans and validation).
pub(crate) fn float_branch_point(br: &Branch, base: [f64; 2], side: Side, t: f64) -> [f64; 2] {
    let g = br.gradient_f64(base);
    let tang = [-g[1], g[0]];
    let n = numeric::hypot(tang[0], tang[1]).max(1e-30);
    let mut q = [
        base[0] + side.signum() * t * tang[0] / n,
        base[1] + side.signum() * t * tang[1] / n,
    ];
    for _ in 0..50 {
        let f = br.defining_poly.eval_f64(&q);
        if numeric::fabs(f) < 1e-14 {
            break;
        }
        let gg = br.gradient_f64(q);
        let n2 = gg[0] * gg[0] + gg[1] * gg[1];
        if n2 < 1e-18 {
            break;
        }
        q[0] -= f * gg[0] / n2;
        q[1] -= f * gg[1] / n2;
    }
    q
}

/// Tangent direction of a branch at a rational point on it: the 90-degree
/// rotated gradient `(-dF/dy, dF/dx)`, unnormalised.
pub fn tangent_at(branch: &Branch, p: &[Rational; 2]) -> Result<[Rational; 2], CanardError> {
    let at = [("x", p[0].clone()), ("y", p[1].clone())];
    if !branch.defining_poly.eval_rational(&at)?.is_zero() {
        return Err(CanardError::PointNotOnBranch);
    }
    let gx = branch.gradient[0].eval_rational(&at)?;
    let gy = branch.gradient[1].eval_rational(&at)?;
    if gx.is_zero() && gy.is_zero() {
        return Err(CanardError::BranchSingularAt);
    }
    Ok([-gy, gx])
}

/// Exact or floating wedge value `X1(p_s) ^ T_{p_s} V(F_i)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WedgeValue {
    /// Exact 2x2 determinant; canard condition holds iff it is exactly zero.
    Exact(Rational),
    /// Floating determinant at an irrational singular point, with the
    /// below-threshold verdict flagged as non-exact.
    Approx(f64),
}

impl WedgeValue {
    pub const APPROX_ZERO_THRESHOLD: f64 = 1e-10;

    pub fn is_zero(&self) -> bool {
        match self {
            WedgeValue::Exact(r) => r.is_zero(),
            WedgeValue::Approx(v) => numeric::fabs(*v) < Self::APPROX_ZERO_THRESHOLD,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, WedgeValue::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            WedgeValue::Exact(r) => rat_to_f64(r),
            WedgeValue::Approx(v) => *v,
        }
    }
}

/// The wedge (exterior-product) condition for one branch: the determinant of
/// `[X1(p_s), tangent(p_s)]`. Exact at rational singular points. Errors when
/// `X1(p_s) = 0`.
pub fn wedge_condition(
    x1: &PolyVectorField,
    p_s: &SingularPoint,
    branch: &Branch,
) -> Result<WedgeValue, CanardError> {
    match &p_s.location {
        Coord2::Exact(p) => {
            let at = [("x", p[0].clone()), ("y", p[1].clone())];
            let v = [
                x1.component(0).eval_rational(&at)?,
                x1.component(1).eval_rational(&at)?,
            ];
            if v[0].is_zero() && v[1].is_zero() {
                return Err(CanardError::PerturbationVanishes);
            }
            let t = tangent_at(branch, p)?;
            Ok(WedgeValue::Exact(&v[0] * &t[1] - &v[1] * &t[0]))
        }
        Coord2::Approx(p) => {
            let v = x1.eval_f64(&p[..]);
            if numeric::hypot(v[0], v[1]) < 1e-12 {
                return Err(CanardError::PerturbationVanishes);
            }
            let g = branch.gradient_f64(*p);
            if numeric::hypot(g[0], g[1]) < 1e-12 {
                return Err(CanardError::BranchSingularAt);
            }
            let t = [-g[1], g[0]];
            Ok(WedgeValue::Approx(v[0] * t[1] - v[1] * t[0]))
        }
    }
}

/// Decomposition of the perturbation at a regular branch point.
#[derive(Debug, Clone)]
pub struct ReducedFlowSample {
    pub point: [f64; 2],
    /// Signed speed along the oriented branch tangent.
    pub tangent_component: f64,
    /// Component along the fast generator.
    pub fast_component: f64,
    /// False when the fast generator is tangent to the branch at the point.
    pub well_defined: bool,
}

/// Exact projection onto the branch tangent along the fast foliation: solve
/// `X1(p) = alpha * t + beta * g` at a rational point. `None` when the
/// tangent and fast generator are linearly dependent (fold-like tangency).
pub fn project_rho_exact(
    x1: &PolyVectorField,
    p: &[Rational; 2],
    branch: &Branch,
    frame: &FastFrame,
) -> Result<Option<(Rational, Rational)>, CanardError> {
    let t = tangent_at(branch, p)?;
    let at = [("x", p[0].clone()), ("y", p[1].clone())];
    let g = [
        frame.generator[0].eval_rational(&at)?,
        frame.generator[1].eval_rational(&at)?,
    ];
    let det = &t[0] * &g[1] - &t[1] * &g[0];
    if det.is_zero() {
        return Ok(None);
    }
    let v = [
        x1.component(0).eval_rational(&at)?,
        x1.component(1).eval_rational(&at)?,
    ];
    let alpha = (&v[0] * &g[1] - &v[1] * &g[0]) / &det;
    let beta = (&t[0] * &v[1] - &t[1] * &v[0]) / &det;
    Ok(Some((alpha, beta)))
}

/// Floating projection, usable anywhere on a branch away from the singular
/// point.
pub fn project_rho(
    x1: &PolyVectorField,
    p: [f64; 2],
    branch: &Branch,
    frame: &FastFrame,
) -> ReducedFlowSample {
    let grad = branch.gradient_f64(p);
    let t = [-grad[1], grad[0]];
    let g = frame.eval_f64(p);
    let det = t[0] * g[1] - t[1] * g[0];
    let scale = numeric::hypot(t[0], t[1]) * numeric::hypot(g[0], g[1]);
    if numeric::fabs(det) < 1e-12 * scale.max(1e-300) {
        return ReducedFlowSample {
            point: p,
            tangent_component: f64::NAN,
            fast_component: f64::NAN,
            well_defined: false,
        };
    }
    let v = x1.eval_f64(&p[..]);
    ReducedFlowSample {
        point: p,
        tangent_component: (v[0] * g[1] - v[1] * g[0]) / det,
        fast_component: (t[0] * v[1] - t[1] * v[0]) / det,
        well_defined: true,
    }
}

/// Stability of a half-branch, from the sign of the transverse eigenvalue of
/// the (desingularised) Jacobian sampled along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Attracting,
    Repelling,
    /// Sign change along the half-branch: the input violates the standing
    /// normal-hyperbolicity assumption away from the singular point.
    Mixed,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stability::Attracting => write!(f, "attracting"),
            Stability::Repelling => write!(f, "repelling"),
            Stability::Mixed => write!(f, "mixed"),
        }
    }
}

/// Stability transition along the branch, ordered by the reduced-flow
/// direction through the singular point (by the positive tangent orientation
/// when the flow direction is undefined there).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationNote {
    AttractingToRepelling,
    RepellingToAttracting,
    Mixed,
    AttractingToAttracting,
    RepellingToRepelling,
}

impl fmt::Display for OrientationNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrientationNote::AttractingToRepelling => write!(f, "attracting->repelling"),
            OrientationNote::RepellingToAttracting => write!(f, "repelling->attracting"),
            OrientationNote::Mixed => write!(f, "mixed"),
            OrientationNote::AttractingToAttracting => write!(f, "attracting->attracting"),
            OrientationNote::RepellingToRepelling => write!(f, "repelling->repelling"),
        }
    }
}

/// Verdict for a single branch through the singular point.
#[derive(Debug, Clone)]
pub struct BranchVerdict {
    pub branch: BranchId,
    /// Exact tangent at a rational singular point.
    pub tangent_at_ps: Option<[Rational; 2]>,
    pub tangent_f64: [f64; 2],
    pub wedge: WedgeValue,
    pub is_canard: bool,
    /// Reduced-flow equilibria found along the branch inside the box (their
    /// presence violates the no-equilibria standing assumption).
    pub reduced_flow_equilibria: Vec<[f64; 2]>,
    /// Stability of the negative and positive half-branches.
    pub stability: [Stability; 2],
    pub orientation: OrientationNote,
}

/// Full canard analysis at one singular point.
#[derive(Debug, Clone)]
pub struct CanardReport {
    pub singular_point: SingularPoint,
    pub per_branch: Vec<BranchVerdict>,
    pub warnings: Vec<String>,
}

impl CanardReport {
    pub fn canard_branches(&self) -> Vec<BranchId> {
        self.per_branch
            .iter()
            .filter(|b| b.is_canard)
            .map(|b| b.branch)
            .collect()
    }
}

const EQUILIBRIUM_SCAN_SAMPLES: u32 = 64;
const STABILITY_SAMPLES: u32 = 8;
const REDUCED_EQ_TOL: f64 = 1e-10;

/// Canard detection at a pairwise-transversal singular point: per incident
/// branch, the exact wedge value and verdict, a reduced-flow equilibrium scan
/// (64 samples per half-branch), and attracting/repelling labels from the
/// transverse eigenvalue (8 samples per half-branch).
pub fn detect_singular_canards(
    x1: &PolyVectorField,
    cs: &CriticalSet,
    p_s: &SingularPoint,
    frame: &FastFrame,
    bx: &AnalysisBox,
) -> Result<CanardReport, CanardError> {
    if !p_s.pairwise_transversal {
        return Err(CanardError::CriticalSet(CriticalSetError::NotTransversal));
    }
    let mut warnings = Vec::new();
    let mut per_branch = Vec::new();
    let base = p_s.location.to_f64();
    for &bid in &p_s.incident_branches {
        let branch = cs.branch(bid);
        let wedge = wedge_condition(x1, p_s, branch)?;
        if !wedge.is_exact() {
            warnings.push(alloc::format!(
                "{bid}: singular point is not rational; wedge test is a 1e-10 threshold, not exact"
            ));
        }
        let is_canard = wedge.is_zero();

        let (tangent_exact, tangent_f64) = match p_s.location.as_exact() {
            Some(p) => {
                let t = tangent_at(branch, p)?;
                let tf = [rat_to_f64(&t[0]), rat_to_f64(&t[1])];
                (Some(t), tf)
            }
            None => {
                let g = branch.gradient_f64(base);
                (None, [-g[1], g[0]])
            }
        };

        // reduced-flow equilibrium scan along both half-branches
        let mut equilibria = Vec::new();
        for side in [Side::Neg, Side::Pos] {
            scan_reduced_equilibria(x1, branch, frame, base, side, bx, &mut equilibria);
        }
        if !equilibria.is_empty() {
            warnings.push(alloc::format!(
                "{bid}: reduced flow has {} equilibrium(s) inside the box; \
                 the no-equilibria assumption is violated",
                equilibria.len()
            ));
        }

        let stability = [
            half_branch_stability(cs, p_s, bid, Side::Neg, bx)?,
            half_branch_stability(cs, p_s, bid, Side::Pos, bx)?,
        ];
        if stability.contains(&Stability::Mixed) {
            warnings.push(alloc::format!(
                "{bid}: transverse eigenvalue changes sign along a half-branch"
            ));
        }

        // flow direction through p_s: tangential component of X1(p_s)
        let flow_sign = match (&tangent_exact, p_s.location.as_exact()) {
            (Some(t), Some(p)) => {
                let at = [("x", p[0].clone()), ("y", p[1].clone())];
                let v = [
                    x1.component(0).eval_rational(&at)?,
                    x1.component(1).eval_rational(&at)?,
                ];
                let dot = &v[0] * &t[0] + &v[1] * &t[1];
                if dot.is_zero() {
                    0
                } else if dot.is_positive() {
                    1
                } else {
                    -1
                }
            }
            _ => {
                let v = x1.eval_f64(&base[..]);
                let dot = v[0] * tangent_f64[0] + v[1] * tangent_f64[1];
                if dot > 0.0 {
                    1
                } else if dot < 0.0 {
                    -1
                } else {
                    0
                }
            }
        };
        let (first, second) = if flow_sign >= 0 {
            (stability[0], stability[1])
        } else {
            (stability[1], stability[0])
        };
        let orientation = match (first, second) {
            (Stability::Mixed, _) | (_, Stability::Mixed) => OrientationNote::Mixed,
            (Stability::Attracting, Stability::Repelling) => {
                OrientationNote::AttractingToRepelling
            }
            (Stability::Repelling, Stability::Attracting) => {
                OrientationNote::RepellingToAttracting
            }
            (Stability::Attracting, Stability::Attracting) => {
                OrientationNote::AttractingToAttracting
            }
            (Stability::Repelling, Stability::Repelling) => {
                OrientationNote::RepellingToRepelling
            }
        };

        per_branch.push(BranchVerdict {
            branch: bid,
            tangent_at_ps: tangent_exact,
            tangent_f64,
            wedge,
            is_canard,
            reduced_flow_equilibria: equilibria,
            stability,
            orientation,
        });
    }
    Ok(CanardReport { singular_point: p_s.clone(), per_branch, warnings })
}

fn scan_reduced_equilibria(
    x1: &PolyVectorField,
    branch: &Branch,
    frame: &FastFrame,
    base: [f64; 2],
    side: Side,
    bx: &AnalysisBox,
    out: &mut Vec<[f64; 2]>,
) {
    let t_max = bx.half_extent();
    let alpha_at = |t: f64| -> Option<(f64, [f64; 2])> {
        let q = float_branch_point(branch, base, side, t);
        if !bx.contains_f64(q) {
            return None;
        }
        let s = project_rho(x1, q, branch, frame);
        s.well_defined.then_some((s.tangent_component, q))
    };
    let mut prev: Option<(f64, f64)> = None; // (t, alpha)
    for k in 1..=EQUILIBRIUM_SCAN_SAMPLES {
        let t = t_max * k as f64 / EQUILIBRIUM_SCAN_SAMPLES as f64;
        let Some((alpha, q)) = alpha_at(t) else {
            prev = None;
            continue;
        };
        if numeric::fabs(alpha) < REDUCED_EQ_TOL {
            push_unique(out, q);
        } else if let Some((tp, ap)) = prev {
            if ap * alpha < 0.0 {
                // bisection refinement of the sign change
                let (mut lo, mut hi, mut alo) = (tp, t, ap);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    match alpha_at(mid) {
                        Some((am, _)) if am * alo <= 0.0 => hi = mid,
                        Some((am, _)) => {
                            lo = mid;
                            alo = am;
                        }
                        None => break,
                    }
                }
                if let Some((_, q)) = alpha_at(0.5 * (lo + hi)) {
                    push_unique(out, q);
                }
            }
        }
        prev = Some((t, alpha));
    }
}

fn push_unique(out: &mut Vec<[f64; 2]>, q: [f64; 2]) {
    if !out
        .iter()
        .any(|p| numeric::hypot(p[0] - q[0], p[1] - q[1]) < 1e-7)
    {
        out.push(q);
    }
}

/// Transverse-eigenvalue stability of one half-branch, sampled at 8 rational
/// points (exact sign when the samples are rational).
fn half_branch_stability(
    cs: &CriticalSet,
    p_s: &SingularPoint,
    bid: BranchId,
    side: Side,
    bx: &AnalysisBox,
) -> Result<Stability, CanardError> {
    let mut signs: Vec<i8> = Vec::new();
    match p_s.location.as_exact() {
        Some(base) => {
            let chart = BranchChart::at_exact(cs, bid, base)?;
            let t_max = Rational::from_float(bx.half_extent()).unwrap_or_else(|| rat(1, 4));
            for k in 1..=STABILITY_SAMPLES {
                let t = &t_max * rat(k as i64, STABILITY_SAMPLES as i64);
                match chart.sample(cs, side, &t)? {
                    Coord2::Exact(q) => {
                        let lam = cs.transverse_eigenvalue_exact(&q)?;
                        signs.push(if lam.is_zero() {
                            0
                        } else if lam.is_positive() {
                            1
                        } else {
                            -1
                        });
                    }
                    Coord2::Approx(q) => {
                        let lam = cs.transverse_eigenvalue_f64(q);
                        signs.push(if lam > 0.0 { 1 } else { -1 });
                    }
                }
            }
        }
        None => {
            let base = p_s.location.to_f64();
            let br = cs.branch(bid);
            for k in 1..=STABILITY_SAMPLES {
                let t = bx.half_extent() * k as f64 / STABILITY_SAMPLES as f64;
                let q = float_branch_point(br, base, side, t);
                let lam = cs.transverse_eigenvalue_f64(q);
                signs.push(if lam > 0.0 { 1 } else { -1 });
            }
        }
    }
    let neg = signs.iter().any(|&s| s < 0);
    let pos = signs.iter().any(|&s| s > 0);
    Ok(match (neg, pos) {
        (true, false) => Stability::Attracting,
        (false, true) => Stability::Repelling,
        _ => Stability::Mixed,
    })
}
