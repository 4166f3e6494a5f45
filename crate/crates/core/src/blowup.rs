//! Weighted spherical blow-up of the nilpotent singular point: exact
//! directional-chart vector fields with their division exponents, numeric
//! evaluation of the desingularised field on the blown-up sphere, equator
//! equilibria with classification, canard connections across the hemisphere,
//! and the one-dimensional circle dynamics of the odd-power
//! desingularisation.
//!
//! Chart conventions (variables `(r, u, v)`; the fixed coordinate is `+-1`):
//!
//! * `eps`:  `x = r^ax u`,   `y = r^ay v`,   `eps = r^ae`
//! * `x+-`:  `x = +-r^ax`,   `y = r^ay v`,   `eps = r^ae u`
//! * `y+-`:  `y = +-r^ay`,   `x = r^ax v`,   `eps = r^ae u`
//!
//! The sphere itself is handled in ambient direction vectors
//! `n = (cos t sin p, sin t sin p, cos p)` with `x = r^ax n1, y = r^ay n2,
//! eps = r^ae n3`; solving the pushforward for `(rdot/r, ndot)` has a closed
//! form used by `SphereField`, which avoids every angular coordinate
//! degeneracy except the poles of the `(theta, phi)` parameterisation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::numeric::{self, RkOptions};
use crate::poly::{rat_to_f64, MultiPoly, PolyError, PolyVectorField, Rational, Vars};
use crate::stratify::{Branch, BranchId};

/// Blow-up weights `(a_x, a_y, a_eps)`, positive with gcd one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weights {
    pub a_x: u32,
    pub a_y: u32,
    pub a_eps: u32,
}

impl Weights {
    pub fn new(a_x: u32, a_y: u32, a_eps: u32) -> Result<Self, BlowupError> {
        if a_x == 0 || a_y == 0 || a_eps == 0 {
            return Err(BlowupError::InvalidWeights("weights must be positive".into()));
        }
        if a_x.gcd(&a_y).gcd(&a_eps) != 1 {
            return Err(BlowupError::InvalidWeights(
                "weights must have greatest common divisor one".into(),
            ));
        }
        Ok(Weights { a_x, a_y, a_eps })
    }

    fn as_array(&self) -> [u32; 3] {
        [self.a_x, self.a_y, self.a_eps]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartId {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    Eps,
}

impl ChartId {
    pub const ALL: [ChartId; 5] = [
        ChartId::XPlus,
        ChartId::XMinus,
        ChartId::YPlus,
        ChartId::YMinus,
        ChartId::Eps,
    ];
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::XPlus => write!(f, "x+"),
            ChartId::XMinus => write!(f, "x-"),
            ChartId::YPlus => write!(f, "y+"),
            ChartId::YMinus => write!(f, "y-"),
            ChartId::Eps => write!(f, "eps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlowupError {
    InvalidWeights(String),
    /// A chart component would carry a negative power of `r`, or the minimum
    /// valuation gives no division at all: the weights do not desingularise
    /// this field.
    ValuationFailure { chart: ChartId, component: String, exponent: i64 },
    /// Angular evaluation at a coordinate degeneracy of the sphere map.
    DegenerateJacobian { theta: f64, phi: f64 },
    /// The field vanishes identically in a chart (nothing to desingularise).
    ZeroField { chart: ChartId },
    Poly(PolyError),
}

impl From<PolyError> for BlowupError {
    fn from(e: PolyError) -> Self {
        BlowupError::Poly(e)
    }
}

impl fmt::Display for BlowupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlowupError::InvalidWeights(msg) => write!(f, "invalid weights: {msg}"),
            BlowupError::ValuationFailure { chart, component, exponent } => write!(
                f,
                "valuation failure in chart {chart}: component {component} has \
                 r-exponent {exponent} after division; weights do not desingularise"
            ),
            BlowupError::DegenerateJacobian { theta, phi } => {
                write!(f, "degenerate sphere map at theta={theta}, phi={phi}")
            }
            BlowupError::ZeroField { chart } => {
                write!(f, "field is identically zero in chart {chart}")
            }
            BlowupError::Poly(e) => write!(f, "{e}"),
        }
    }
}

/// Extend a planar slow-fast pair to the three-dimensional field
/// `(X0 + eps*X1, 0)` over `(x, y, eps)`, treating `eps` as a coordinate.
pub fn extend_field(
    x0: &PolyVectorField,
    x1: &PolyVectorField,
) -> Result<PolyVectorField, PolyError> {
    let xye = Vars::xye();
    let eps = MultiPoly::var(&xye, "eps")?;
    let mut comps = Vec::with_capacity(3);
    for i in 0..2 {
        let a = x0.component(i).cast_to(&xye)?;
        let b = x1.component(i).cast_to(&xye)?;
        comps.push(a.add(&b.mul(&eps)?)?);
    }
    comps.push(MultiPoly::zero(&xye));
    PolyVectorField::new(comps)
}

/// One directional chart of the weighted blow-up.
#[derive(Debug, Clone)]
pub struct BlownUpChart {
    pub chart_id: ChartId,
    /// Desingularised chart field `(rdot, udot, vdot)` over `(r, u, v)`.
    pub field: PolyVectorField,
    /// Division exponent `m`: the blown-up field was divided by `r^m`.
    pub division_exponent: i64,
}

struct ChartSpec {
    /// ambient index of the fixed coordinate (0 = x, 1 = y, 2 = eps)
    fixed: usize,
    sign: i64,
    /// ambient index represented by chart variable `u`, then `v`
    u_maps: usize,
    v_maps: usize,
}

fn chart_spec(chart: ChartId) -> ChartSpec {
    match chart {
        ChartId::Eps => ChartSpec { fixed: 2, sign: 1, u_maps: 0, v_maps: 1 },
        ChartId::XPlus => ChartSpec { fixed: 0, sign: 1, u_maps: 2, v_maps: 1 },
        ChartId::XMinus => ChartSpec { fixed: 0, sign: -1, u_maps: 2, v_maps: 1 },
        ChartId::YPlus => ChartSpec { fixed: 1, sign: 1, u_maps: 2, v_maps: 0 },
        ChartId::YMinus => ChartSpec { fixed: 1, sign: -1, u_maps: 2, v_maps: 0 },
    }
}

/// Ambient substitution polynomials `(x, y, eps)` of a chart, over `(r,u,v)`.
fn chart_map(chart: ChartId, w: &Weights) -> Result<[MultiPoly; 3], PolyError> {
    let ruv = Vars::ruv();
    let r = MultiPoly::var(&ruv, "r")?;
    let u = MultiPoly::var(&ruv, "u")?;
    let v = MultiPoly::var(&ruv, "v")?;
    let spec = chart_spec(chart);
    let a = w.as_array();
    let sign = MultiPoly::constant(&ruv, Rational::from_integer(spec.sign.into()));
    let mut map: [MultiPoly; 3] = [
        MultiPoly::zero(&ruv),
        MultiPoly::zero(&ruv),
        MultiPoly::zero(&ruv),
    ];
    map[spec.fixed] = r.pow(a[spec.fixed]).mul(&sign)?;
    map[spec.u_maps] = r.pow(a[spec.u_maps]).mul(&u)?;
    map[spec.v_maps] = r.pow(a[spec.v_maps]).mul(&v)?;
    Ok(map)
}

/// Exact directional-chart field: substitutes the chart map into the extended
/// field, solves the chain rule for `(rdot, udot, vdot)`, divides by the
/// minimal power of `r`, and records the division exponent `m`. Errors when
/// `m <= 0` (the weights fail to desingularise the field).
pub fn chart_field(
    xhat: &PolyVectorField,
    w: &Weights,
    chart: ChartId,
) -> Result<BlownUpChart, BlowupError> {
    assert_eq!(xhat.dim(), 3, "extended field expected");
    let ruv = Vars::ruv();
    let spec = chart_spec(chart);
    let a = w.as_array();
    let map = chart_map(chart, w)?;
    let subs: Vec<(&str, MultiPoly)> = alloc::vec![
        ("x", map[0].clone()),
        ("y", map[1].clone()),
        ("eps", map[2].clone()),
    ];
    let n: Vec<MultiPoly> = xhat
        .components()
        .iter()
        .map(|c| c.substitute(&ruv, &subs))
        .collect::<Result<_, _>>()?;

    // common power s clears all intermediate negative exponents
    let s = *a.iter().max().unwrap();
    let a_i = a[spec.fixed];
    let sigma = Rational::from_integer(spec.sign.into());
    let inv_ai = Rational::new(1.into(), a_i.into());

    // P_r = (sign / a_i) * N_fixed * r^(s + 1 - a_i)
    let p_r = n[spec.fixed]
        .scale(&(&sigma * &inv_ai))
        .mul_by_power("r", s + 1 - a_i)?;

    // P_j = N_j r^(s - a_j) - (a_j / a_i) sign w_j N_fixed r^(s - a_i)
    let chart_var = |name: &str| MultiPoly::var(&ruv, name).expect("chart var");
    let p_for = |ambient: usize, var: &MultiPoly| -> Result<MultiPoly, PolyError> {
        let lead = n[ambient].mul_by_power("r", s - a[ambient])?;
        let corr = n[spec.fixed]
            .mul(var)?
            .scale(&(&sigma * Rational::new(a[ambient].into(), a_i.into())))
            .mul_by_power("r", s - a_i)?;
        lead.sub(&corr)
    };
    let p_u = p_for(spec.u_maps, &chart_var("u"))?;
    let p_v = p_for(spec.v_maps, &chart_var("v"))?;

    let vals = [
        p_r.valuation("r")?,
        p_u.valuation("r")?,
        p_v.valuation("r")?,
    ];
    let names = ["rdot", "udot", "vdot"];
    let mut min_val: Option<(u32, usize)> = None;
    for (i, v) in vals.iter().enumerate() {
        if let Some(v) = v {
            if min_val.map(|(mv, _)| *v < mv).unwrap_or(true) {
                min_val = Some((*v, i));
            }
        }
    }
    let Some((min_val, min_idx)) = min_val else {
        return Err(BlowupError::ZeroField { chart });
    };
    let m = min_val as i64 - s as i64;
    if m <= 0 {
        return Err(BlowupError::ValuationFailure {
            chart,
            component: names[min_idx].to_string(),
            exponent: m,
        });
    }
    let field = PolyVectorField::new(alloc::vec![
        p_r.divide_by_power("r", min_val)?,
        p_u.divide_by_power("r", min_val)?,
        p_v.divide_by_power("r", min_val)?,
    ])?;
    Ok(BlownUpChart { chart_id: chart, field, division_exponent: m })
}

/// Exact pushforward identity at one rational chart point: mapping the
/// desingularised chart field forward through the blow-up map and multiplying
/// by `r^m` must reproduce the extended field there. Returns the residual.
pub fn pushforward_residual(
    chart: &BlownUpChart,
    xhat: &PolyVectorField,
    w: &Weights,
    point: &[Rational; 3],
) -> Result<Vec<Rational>, BlowupError> {
    let spec = chart_spec(chart.chart_id);
    let a = w.as_array();
    let map = chart_map(chart.chart_id, w)?;
    let at = [
        ("r", point[0].clone()),
        ("u", point[1].clone()),
        ("v", point[2].clone()),
    ];
    // ambient point and extended-field value there
    let ambient: Vec<Rational> = map
        .iter()
        .map(|p| p.eval_rational(&at))
        .collect::<Result<_, _>>()?;
    let ambient_at = [
        ("x", ambient[0].clone()),
        ("y", ambient[1].clone()),
        ("eps", ambient[2].clone()),
    ];
    let want: Vec<Rational> = xhat
        .components()
        .iter()
        .map(|c| c.eval_rational(&ambient_at))
        .collect::<Result<_, _>>()?;
    // chart velocities, un-desingularised: multiply by r^m
    let rm = pow_rat(&point[0], chart.division_exponent as u32);
    let rdot = chart.field.component(0).eval_rational(&at)? * &rm;
    let udot = chart.field.component(1).eval_rational(&at)? * &rm;
    let vdot = chart.field.component(2).eval_rational(&at)? * &rm;
    // chain rule forward
    let r = &point[0];
    let sigma = Rational::from_integer(spec.sign.into());
    let mut got = alloc::vec![Rational::from_integer(0.into()); 3];
    got[spec.fixed] = &sigma
        * Rational::new(a[spec.fixed].into(), 1.into())
        * pow_rat(r, a[spec.fixed] - 1)
        * &rdot;
    for (ambient_idx, wdot, wval) in [
        (spec.u_maps, &udot, &point[1]),
        (spec.v_maps, &vdot, &point[2]),
    ] {
        let aj = a[ambient_idx];
        got[ambient_idx] =
            Rational::new(aj.into(), 1.into()) * pow_rat(r, aj - 1) * &rdot * wval
                + pow_rat(r, aj) * wdot;
    }
    Ok((0..3).map(|i| &got[i] - &want[i]).collect())
}

fn pow_rat(r: &Rational, e: u32) -> Rational {
    let mut acc = Rational::from_integer(1.into());
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// The desingularised field on the blown-up sphere, evaluated numerically at
/// `r = 0` by a Jacobian-inverse pushforward at two small radii with linear
/// Richardson extrapolation.
#[derive(Debug, Clone)]
pub struct SphereField {
    xhat: PolyVectorField,
    pub weights: Weights,
    /// Global division exponent: the minimum over all five directional
    /// charts (they agree for quasi-homogeneously calibrated weights).
    pub division_exponent: i64,
}

pub const RICHARDSON_R1: f64 = 1e-4;
pub const RICHARDSON_R2: f64 = 1e-5;

impl SphereField {
    /// Validates every directional chart and fixes the division exponent.
    pub fn new(xhat: &PolyVectorField, w: Weights) -> Result<Self, BlowupError> {
        let mut m: Option<i64> = None;
        for chart in ChartId::ALL {
            let c = chart_field(xhat, &w, chart)?;
            m = Some(match m {
                None => c.division_exponent,
                Some(prev) => prev.min(c.division_exponent),
            });
        }
        Ok(SphereField {
            xhat: xhat.clone(),
            weights: w,
            division_exponent: m.expect("charts exist"),
        })
    }

    pub fn extended_field(&self) -> &PolyVectorField {
        &self.xhat
    }

    /// Raw direction-vector velocity at radius `r > 0`:
    /// solve `x_j = r^(a_j) n_j` for `(rdot/r, ndot)` and divide by `r^m`.
    fn ndot_at_radius(&self, n: [f64; 3], r: f64) -> [f64; 3] {
        let a = self.weights.as_array().map(|x| x as f64);
        let point = [
            numeric::powi(r, self.weights.a_x) * n[0],
            numeric::powi(r, self.weights.a_y) * n[1],
            numeric::powi(r, self.weights.a_eps) * n[2],
        ];
        let f = self.xhat.eval_f64(&point);
        let w = [
            f[0] / numeric::powi(r, self.weights.a_x),
            f[1] / numeric::powi(r, self.weights.a_y),
            f[2] / numeric::powi(r, self.weights.a_eps),
        ];
        let denom = a[0] * n[0] * n[0] + a[1] * n[1] * n[1] + a[2] * n[2] * n[2];
        let s = (a[0] * n[0] * w[0] + a[1] * n[1] * w[1] + a[2] * n[2] * w[2]) / denom;
        let rm = numeric::powi(r, self.division_exponent as u32);
        [
            (w[0] - s * a[0] * n[0]) / rm,
            (w[1] - s * a[1] * n[1]) / rm,
            (w[2] - s * a[2] * n[2]) / rm,
        ]
    }

    /// Sphere velocity at `r = 0`: linear Richardson extrapolation from the
    /// two sample radii.
    pub fn ndot(&self, n: [f64; 3]) -> [f64; 3] {
        self.ndot_extrapolated(n, RICHARDSON_R1, RICHARDSON_R2)
    }

    pub fn ndot_extrapolated(&self, n: [f64; 3], r1: f64, r2: f64) -> [f64; 3] {
        let f1 = self.ndot_at_radius(n, r1);
        let f2 = self.ndot_at_radius(n, r2);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (r1 * f2[i] - r2 * f1[i]) / (r1 - r2);
        }
        out
    }

    /// Angular components `(theta_dot, phi_dot)` of the desingularised field
    /// at a sphere point, `phi` away from the poles.
    pub fn angular(&self, theta: f64, phi: f64) -> Result<(f64, f64), BlowupError> {
        self.angular_extrapolated(theta, phi, RICHARDSON_R1, RICHARDSON_R2)
    }

    pub fn angular_extrapolated(
        &self,
        theta: f64,
        phi: f64,
        r1: f64,
        r2: f64,
    ) -> Result<(f64, f64), BlowupError> {
        let sp = numeric::sin(phi);
        if numeric::fabs(sp) < 1e-9 {
            return Err(BlowupError::DegenerateJacobian { theta, phi });
        }
        let n = [
            numeric::cos(theta) * sp,
            numeric::sin(theta) * sp,
            numeric::cos(phi),
        ];
        let nd = self.ndot_extrapolated(n, r1, r2);
        let planar2 = n[0] * n[0] + n[1] * n[1];
        let theta_dot = (n[0] * nd[1] - n[1] * nd[0]) / planar2;
        let phi_dot = -nd[2] / sp;
        Ok((theta_dot, phi_dot))
    }
}

/// Equilibrium of the equator flow with its angular linearisation.
#[derive(Debug, Clone)]
pub struct SphereEquilibrium {
    pub theta: f64,
    pub phi: f64,
    pub eigenvalues: [(f64, f64); 2],
    pub classification: Classification,
    pub origin_label: OriginLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StableNode,
    UnstableNode,
    Saddle,
    Source,
    Sink,
    Nonhyperbolic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::StableNode => write!(f, "stable node"),
            Classification::UnstableNode => write!(f, "unstable node"),
            Classification::Saddle => write!(f, "saddle"),
            Classification::Source => write!(f, "source"),
            Classification::Sink => write!(f, "sink"),
            Classification::Nonhyperbolic => write!(f, "nonhyperbolic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OriginLabel {
    /// Fast-foliation direction (`theta` 0 or pi).
    FastFoliation,
    /// Direction of a critical-set branch under the weighted blow-up.
    Branch(BranchId),
    Interior,
}

impl fmt::Display for OriginLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OriginLabel::FastFoliation => write!(f, "fast-foliation"),
            OriginLabel::Branch(b) => write!(f, "{b}"),
            OriginLabel::Interior => write!(f, "interior"),
        }
    }
}

const EQUATOR_SCAN_POINTS: usize = 2048;
const EIG_FD_STEP: f64 = 1e-6;
const HYPERBOLICITY_TOL: f64 = 1e-9;

/// All equilibria of the equator flow on `[-pi, pi)`: a 2048-point sign scan
/// with bisection to `1e-12`, merged with the exact equator roots of the
/// four directional-chart polynomials (which also catch even-multiplicity
/// zeros the sign scan cannot see, such as two branches collapsing onto one
/// weighted direction). Each equilibrium is labeled fast-foliation (`theta`
/// 0 or pi), branch (weighted initial form of a branch vanishing in that
/// direction), or interior, and carries the eigenvalues of the 2x2 angular
/// linearisation (central differences, step `1e-6`).
pub fn equator_equilibria(
    sf: &SphereField,
    branches: &[Branch],
) -> Result<Vec<SphereEquilibrium>, BlowupError> {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let g = |t: f64| -> Result<f64, BlowupError> { Ok(sf.angular(t, half_pi)?.0) };
    let mut roots: Vec<f64> = Vec::new();
    let n = EQUATOR_SCAN_POINTS;
    // start half a cell before -pi so roots at the wrap point are interior
    let start = -core::f64::consts::PI - core::f64::consts::PI / n as f64;
    let mut prev_t = start;
    let mut prev_g = g(prev_t)?;
    for k in 1..=n {
        let t = start + 2.0 * core::f64::consts::PI * k as f64 / n as f64;
        let gt = g(t)?;
        if prev_g == 0.0 {
            push_angle(&mut roots, prev_t);
        } else if prev_g * gt < 0.0 {
            let (mut lo, mut hi, mut glo) = (prev_t, t, prev_g);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if glo * gm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            push_angle(&mut roots, 0.5 * (lo + hi));
        }
        prev_t = t;
        prev_g = gt;
    }
    for t in chart_equator_roots(sf)? {
        push_angle(&mut roots, t);
    }

    let mut out = Vec::new();
    for theta in roots {
        let eigenvalues = angular_eigenvalues(sf, theta, half_pi)?;
        let classification = classify(eigenvalues);
        let origin_label = label_angle(sf, branches, theta);
        out.push(SphereEquilibrium {
            theta: numeric::wrap_angle(theta),
            phi: half_pi,
            eigenvalues,
            classification,
            origin_label,
        });
    }
    out.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

fn push_angle(roots: &mut Vec<f64>, t: f64) {
    let t = numeric::wrap_angle(t);
    if !roots.iter().any(|&r| numeric::angle_distance(r, t) < 1e-9) {
        roots.push(t);
    }
}

/// Exact equator equilibria through the directional charts: on each chart's
/// invariant equator line `{r = 0, u = 0}` the flow is a univariate
/// polynomial in `v`; its real roots map back to sphere angles through the
/// (strictly monotone) weighted transition maps.
fn chart_equator_roots(sf: &SphereField) -> Result<Vec<f64>, BlowupError> {
    use crate::poly::sturm::isolate_roots;
    let ruv = Vars::ruv();
    let zero = MultiPoly::zero(&ruv);
    let mut out = Vec::new();
    let qx = sf.weights.a_y as f64 / sf.weights.a_x as f64;
    let qy = sf.weights.a_x as f64 / sf.weights.a_y as f64;
    for chart in [ChartId::XPlus, ChartId::XMinus, ChartId::YPlus, ChartId::YMinus] {
        let c = chart_field(sf.extended_field(), &sf.weights, chart)?;
        // restrict vdot to the equator line r = 0, u = 0
        let vdot = c.field.component(2).substitute(
            &ruv,
            &[("r", zero.clone()), ("u", zero.clone())],
        )?;
        if vdot.is_zero() {
            continue; // the whole line is critical; handled by the scan
        }
        let vidx = ruv.index_of("v").expect("v");
        let deg = vdot.degree_in(vidx) as usize;
        let mut coeffs = alloc::vec![crate::poly::Rational::from_integer(0.into()); deg + 1];
        for (m, co) in vdot.terms() {
            coeffs[m.0[vidx] as usize] = co.clone();
        }
        // |v| <= 8 comfortably overlaps the neighbouring chart family
        let bound = crate::poly::rat(8, 1);
        let width = crate::poly::Rational::new(1.into(), num_bigint::BigInt::from(1u128 << 44));
        for root in isolate_roots(&coeffs, &(-bound.clone()), &bound, &width) {
            let v = root.to_f64();
            let theta = match chart {
                // v = sin(t) / cos(t)^(ay/ax), strictly increasing on (-pi/2, pi/2)
                ChartId::XPlus => invert_monotone(v, |t| {
                    numeric::sin(t) / libm::pow(numeric::cos(t), qx)
                }),
                ChartId::XMinus => {
                    let psi = invert_monotone(v, |t| {
                        numeric::sin(t) / libm::pow(numeric::cos(t), qx)
                    });
                    core::f64::consts::PI - psi
                }
                // v = cos(t) / sin(t)^(ax/ay), strictly decreasing on (0, pi)
                ChartId::YPlus => invert_monotone(-v, |t| {
                    -numeric::cos(t + core::f64::consts::FRAC_PI_2)
                        / libm::pow(numeric::sin(t + core::f64::consts::FRAC_PI_2), qy)
                }) + core::f64::consts::FRAC_PI_2,
                ChartId::YMinus => {
                    let psi = invert_monotone(-v, |t| {
                        -numeric::cos(t + core::f64::consts::FRAC_PI_2)
                            / libm::pow(numeric::sin(t + core::f64::consts::FRAC_PI_2), qy)
                    }) + core::f64::consts::FRAC_PI_2;
                    -psi
                }
                ChartId::Eps => unreachable!(),
            };
            out.push(numeric::wrap_angle(theta));
        }
    }
    Ok(out)
}

/// Invert a strictly increasing function on `(-pi/2, pi/2)` by bisection.
fn invert_monotone<F: Fn(f64) -> f64>(target: f64, f: F) -> f64 {
    let mut lo = -core::f64::consts::FRAC_PI_2 + 1e-12;
    let mut hi = core::f64::consts::FRAC_PI_2 - 1e-12;
    if f(lo) >= target {
        return lo;
    }
    if f(hi) <= target {
        return hi;
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn angular_eigenvalues(
    sf: &SphereField,
    theta: f64,
    phi: f64,
) -> Result<[(f64, f64); 2], BlowupError> {
    let h = EIG_FD_STEP;
    let tp = sf.angular(theta + h, phi)?;
    let tm = sf.angular(theta - h, phi)?;
    let pp = sf.angular(theta, phi + h)?;
    let pm = sf.angular(theta, phi - h)?;
    let j = [
        [(tp.0 - tm.0) / (2.0 * h), (pp.0 - pm.0) / (2.0 * h)],
        [(tp.1 - tm.1) / (2.0 * h), (pp.1 - pm.1) / (2.0 * h)],
    ];
    Ok(numeric::eig2(j[0][0], j[0][1], j[1][0], j[1][1]))
}

fn classify(eig: [(f64, f64); 2]) -> Classification {
    let complex = numeric::fabs(eig[0].1) > HYPERBOLICITY_TOL;
    if eig.iter().any(|e| numeric::fabs(e.0) < HYPERBOLICITY_TOL) {
        return Classification::Nonhyperbolic;
    }
    if complex {
        if eig[0].0 < 0.0 {
            Classification::Sink
        } else {
            Classification::Source
        }
    } else if eig[0].0 < 0.0 && eig[1].0 < 0.0 {
        Classification::StableNode
    } else if eig[0].0 > 0.0 && eig[1].0 > 0.0 {
        Classification::UnstableNode
    } else {
        Classification::Saddle
    }
}

/// Label an equator angle by its origin downstairs: the fast directions are
/// `theta` 0 and pi; a branch claims the angle when its weighted initial form
/// vanishes at `(cos theta, sin theta)`.
fn label_angle(sf: &SphereField, branches: &[Branch], theta: f64) -> OriginLabel {
    let t = numeric::wrap_angle(theta);
    if numeric::angle_distance(t, 0.0) < 1e-6
        || numeric::angle_distance(t, core::f64::consts::PI) < 1e-6
    {
        return OriginLabel::FastFoliation;
    }
    let wxy = [sf.weights.a_x, sf.weights.a_y];
    let dir = [numeric::cos(t), numeric::sin(t)];
    for br in branches {
        let init = br.defining_poly.weighted_initial_form(&wxy);
        if init.is_zero() {
            continue;
        }
        let v = init.eval_f64(&dir);
        let scale: f64 = init
            .terms()
            .map(|(_, c)| numeric::fabs(rat_to_f64(c)))
            .sum::<f64>()
            .max(1e-30);
        if numeric::fabs(v) < 1e-6 * scale {
            return OriginLabel::Branch(br.id);
        }
    }
    OriginLabel::Interior
}

/// Result of a connection attempt between two equator equilibria.
#[derive(Debug, Clone)]
pub struct ConnectionTrace {
    pub connected: bool,
    /// Orbit samples as `(theta, phi)` pairs.
    pub orbit: Vec<(f64, f64)>,
    pub terminal_distance: f64,
    pub arclength: f64,
}

pub const CONNECTION_PERTURBATION: f64 = 1e-3;
pub const CONNECTION_CAPTURE_RADIUS: f64 = 1e-2;
pub const CONNECTION_ARCLENGTH_BUDGET: f64 = 1e3;

/// Integrate the desingularised sphere flow from `from`, perturbed by `1e-3`
/// into the upper hemisphere, and test whether the orbit enters the capture
/// radius of `to`. The integration runs in ambient direction vectors, so
/// passing over the poles needs no chart switching.
///
/// The perturbation direction is refined by bisection: when the target is
/// only partially hyperbolic (the pitchfork landing point has a center
/// direction along the meridians), a generic start peels off the connection
/// before entering the capture ball, while orbits on the two sides of the
/// connecting manifold separate cleanly (escape past the target versus slide
/// back along the equator). Bisecting the start direction at fixed
/// perturbation size pins the connection when it exists.
pub fn connection_trace(
    sf: &SphereField,
    from: &SphereEquilibrium,
    to: &SphereEquilibrium,
) -> ConnectionTrace {
    // side of `to` reached by overshooting, seen from `from`
    let sweep = numeric::wrap_angle(to.theta - from.theta);
    let mut best_trace: Option<ConnectionTrace> = None;
    let consider = |t: ConnectionTrace, best: &mut Option<ConnectionTrace>| -> bool {
        let better = match best {
            None => true,
            Some(b) => t.terminal_distance < b.terminal_distance,
        };
        let connected = t.connected;
        if better {
            *best = Some(t);
        }
        connected
    };

    // first attempt: purely meridional perturbation
    let run0 = shoot(sf, from, to, 0.0);
    if consider(run0.0, &mut best_trace) {
        return best_trace.unwrap();
    }
    let mut lo = (0.0, run0.1);
    // search for a bracketing pair of start-direction angles
    let mut hi: Option<(f64, Outcome)> = None;
    for k in 1..=8 {
        let s = libm::copysign(0.2 * k as f64, sweep);
        let run = shoot(sf, from, to, s);
        let outcome = run.1;
        if consider(run.0, &mut best_trace) {
            return best_trace.unwrap();
        }
        if outcome != lo.1 {
            hi = Some((s, outcome));
            break;
        }
        lo = (s, outcome);
    }
    let Some(mut hi) = hi else {
        return best_trace.unwrap();
    };
    // bisection on the start direction
    for _ in 0..60 {
        let mid = 0.5 * (lo.0 + hi.0);
        let run = shoot(sf, from, to, mid);
        let outcome = run.1;
        if consider(run.0, &mut best_trace) {
            return best_trace.unwrap();
        }
        if outcome == lo.1 {
            lo = (mid, outcome);
        } else {
            hi = (mid, outcome);
        }
    }
    best_trace.unwrap()
}

/// How a shot through the blow-up hemisphere ended, for bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// Swept past the target (in the direction from `from` to `to`).
    Past,
    /// Fell back before reaching the target.
    Short,
}

/// One forward integration from `from` perturbed by the fixed magnitude in
/// the in-hemisphere direction tilted by `tilt` radians towards the target.
fn shoot(
    sf: &SphereField,
    from: &SphereEquilibrium,
    to: &SphereEquilibrium,
    tilt: f64,
) -> (ConnectionTrace, Outcome) {
    let h = CONNECTION_PERTURBATION;
    let th0 = from.theta + h * numeric::sin(tilt);
    let ph0 = core::f64::consts::FRAC_PI_2 - h * numeric::cos(tilt);
    let n0 = [
        numeric::cos(th0) * numeric::sin(ph0),
        numeric::sin(th0) * numeric::sin(ph0),
        numeric::cos(ph0),
    ];
    let target = [numeric::cos(to.theta), numeric::sin(to.theta), 0.0];
    let sweep_total = numeric::wrap_angle(to.theta - from.theta);
    let rhs = |y: &[f64]| -> Vec<f64> {
        let norm = numeric::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).max(1e-30);
        let n = [y[0] / norm, y[1] / norm, y[2] / norm];
        sf.ndot(n).to_vec()
    };
    let sample = |y: &[f64]| -> (f64, f64) {
        let norm = numeric::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).max(1e-30);
        (
            numeric::atan2(y[1] / norm, y[0] / norm),
            libm::acos((y[2] / norm).clamp(-1.0, 1.0)),
        )
    };
    let mut orbit: Vec<(f64, f64)> = alloc::vec![sample(&n0)];
    let mut arclength = 0.0;
    let mut best = f64::INFINITY;
    let mut connected = false;
    let mut furthest_progress: f64 = 0.0;
    let opts = RkOptions { rel_tol: 1e-9, abs_tol: 1e-11, max_step: 0.05, max_steps: 400_000 };
    numeric::integrate_dopri5(rhs, &n0, 1e6, &opts, |rec| {
        arclength += numeric::sqrt(
            (rec.y1[0] - rec.y0[0]) * (rec.y1[0] - rec.y0[0])
                + (rec.y1[1] - rec.y0[1]) * (rec.y1[1] - rec.y0[1])
                + (rec.y1[2] - rec.y0[2]) * (rec.y1[2] - rec.y0[2]),
        );
        let (theta, phi) = sample(&rec.y1);
        orbit.push((theta, phi));
        let norm = numeric::sqrt(
            rec.y1[0] * rec.y1[0] + rec.y1[1] * rec.y1[1] + rec.y1[2] * rec.y1[2],
        )
        .max(1e-30);
        let dist = numeric::sqrt(
            (rec.y1[0] / norm - target[0]) * (rec.y1[0] / norm - target[0])
                + (rec.y1[1] / norm - target[1]) * (rec.y1[1] / norm - target[1])
                + (rec.y1[2] / norm - target[2]) * (rec.y1[2] / norm - target[2]),
        );
        best = best.min(dist);
        if dist < CONNECTION_CAPTURE_RADIUS {
            connected = true;
            return false;
        }
        // progress towards the target, as a fraction of the equator sweep
        let prog = numeric::wrap_angle(theta - from.theta) / sweep_total;
        furthest_progress = furthest_progress.max(prog);
        // stop when stalled at an equilibrium
        let speed = {
            let f = rhs(&rec.y1);
            numeric::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2])
        };
        if speed < 1e-9 && phi > core::f64::consts::FRAC_PI_2 - 0.2 {
            return false;
        }
        arclength < CONNECTION_ARCLENGTH_BUDGET
    });
    let outcome = if furthest_progress > 1.0 { Outcome::Past } else { Outcome::Short };
    (
        ConnectionTrace { connected, orbit, terminal_distance: best, arclength },
        outcome,
    )
}

/// Outcome of the reflection-symmetry check about the meridian `theta=pi/2`.
#[derive(Debug, Clone)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub max_violation: f64,
    pub worst_point: (f64, f64),
}

pub const SYMMETRY_GRID: usize = 32;
pub const SYMMETRY_TOL: f64 = 1e-6;

/// Verify `thetadot(pi - theta, phi) = thetadot(theta, phi)` and
/// `phidot(pi - theta, phi) = -phidot(theta, phi)` on a 32x32 grid of the
/// upper hemisphere (away from the pole, where the angular chart degenerates).
pub fn symmetry_check_pitchfork(sf: &SphereField) -> Result<SymmetryCheck, BlowupError> {
    let mut max_violation: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    let half_pi = core::f64::consts::FRAC_PI_2;
    for i in 0..SYMMETRY_GRID {
        let theta = -core::f64::consts::PI
            + 2.0 * core::f64::consts::PI * (i as f64 + 0.5) / SYMMETRY_GRID as f64;
        for j in 0..SYMMETRY_GRID {
            let phi = 0.3 + (half_pi - 0.3) * j as f64 / (SYMMETRY_GRID - 1) as f64;
            let (td, pd) = sf.angular(theta, phi)?;
            let (tdr, pdr) = sf.angular(core::f64::consts::PI - theta, phi)?;
            let v = numeric::fabs(tdr - td).max(numeric::fabs(pdr + pd));
            if v > max_violation {
                max_violation = v;
                worst = (theta, phi);
            }
        }
    }
    Ok(SymmetryCheck { holds: max_violation < SYMMETRY_TOL, max_violation, worst_point: worst })
}

// ---------------------------------------------------------------------------
// Circle dynamics of the odd-power desingularisation
// ---------------------------------------------------------------------------

/// Sign of the constant forcing in `xdot = x^(2k+1) + sign * eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingSign {
    Plus,
    Minus,
    None,
}

impl ForcingSign {
    fn factor(&self, psi: f64, k: u32) -> f64 {
        let c = numeric::powi(numeric::cos(psi), 2 * k + 1);
        match self {
            ForcingSign::Plus => c + numeric::sin(psi),
            ForcingSign::Minus => c - numeric::sin(psi),
            ForcingSign::None => c,
        }
    }
}

/// Stability of a circle equilibrium (one-dimensional flow).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleStability {
    Stable,
    Source,
    Nonhyperbolic,
}

#[derive(Debug, Clone)]
pub struct CircleEquilibrium {
    pub psi: f64,
    pub derivative: f64,
    pub stability: CircleStability,
}

/// The circle dynamics after blowing up `xdot = x^(2k+1) + eps` along the
/// `(x, eps)` directions with weights `(1, 2k+1)` and dividing by `r^(2k)`.
#[derive(Debug, Clone)]
pub struct CircleLemmaSystem {
    pub k: u32,
    pub sign: ForcingSign,
}

impl CircleLemmaSystem {
    pub fn new(k: u32, sign: ForcingSign) -> Result<Self, BlowupError> {
        if k < 1 {
            return Err(BlowupError::InvalidWeights("k must be at least one".into()));
        }
        Ok(CircleLemmaSystem { k, sign })
    }

    /// Closed-form motion on the circle:
    /// `(2k+1) sin(psi) (cos^(2k+1)(psi) +- sin(psi)) / (k cos(2 psi) - k - 1)`.
    pub fn psi_dot(&self, psi: f64) -> f64 {
        let k = self.k;
        (2.0 * k as f64 + 1.0) * numeric::sin(psi) * self.sign.factor(psi, k)
            / (k as f64 * numeric::cos(2.0 * psi) - k as f64 - 1.0)
    }

    /// Independently derived motion: numeric pushforward of the planar field
    /// through `x = r cos(psi), eps = r^(2k+1) sin(psi)`, division by
    /// `r^(2k)`, Richardson extrapolation from two radii.
    pub fn psi_dot_derived(&self, psi: f64) -> f64 {
        let eval = |r: f64| -> f64 {
            let a = [1.0, 2.0 * self.k as f64 + 1.0];
            let n = [numeric::cos(psi), numeric::sin(psi)];
            let x = r * n[0];
            let xdot = {
                let nonlin = numeric::powi(x, 2 * self.k + 1);
                let eps = numeric::powi(r, 2 * self.k + 1) * n[1];
                match self.sign {
                    ForcingSign::Plus => nonlin + eps,
                    ForcingSign::Minus => nonlin - eps,
                    ForcingSign::None => nonlin,
                }
            };
            let w = [xdot / r, 0.0];
            let denom = a[0] * n[0] * n[0] + a[1] * n[1] * n[1];
            let s = (a[0] * n[0] * w[0] + a[1] * n[1] * w[1]) / denom;
            let nd = [w[0] - s * a[0] * n[0], w[1] - s * a[1] * n[1]];
            (n[0] * nd[1] - n[1] * nd[0]) / numeric::powi(r, 2 * self.k)
        };
        let (r1, r2) = (RICHARDSON_R1, RICHARDSON_R2);
        let (f1, f2) = (eval(r1), eval(r2));
        (r1 * f2 - r2 * f1) / (r1 - r2)
    }

    /// All equilibria on `[0, pi]`: the fast directions `0` and `pi`, plus
    /// the roots of the forcing factor (sign scan and bisection), with
    /// stability from the derivative of the closed form.
    pub fn equilibria(&self) -> Vec<CircleEquilibrium> {
        let mut psis = alloc::vec![0.0, core::f64::consts::PI];
        let n = 4096;
        let mut prev_psi = 1e-9;
        let mut prev = self.sign.factor(prev_psi, self.k);
        for i in 1..=n {
            let psi = core::f64::consts::PI * i as f64 / n as f64;
            let val = self.sign.factor(psi, self.k);
            if prev * val < 0.0 {
                let (mut lo, mut hi, mut flo) = (prev_psi, psi, prev);
                while hi - lo > 1e-14 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.sign.factor(mid, self.k);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                psis.push(0.5 * (lo + hi));
            }
            prev = val;
            prev_psi = psi;
        }
        psis.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        psis.iter()
            .map(|&psi| {
                let h = 1e-7;
                let d = if psi < h {
                    (self.psi_dot(psi + h) - self.psi_dot(psi)) / h
                } else if psi > core::f64::consts::PI - h {
                    (self.psi_dot(psi) - self.psi_dot(psi - h)) / h
                } else {
                    (self.psi_dot(psi + h) - self.psi_dot(psi - h)) / (2.0 * h)
                };
                let stability = if numeric::fabs(d) < 1e-9 {
                    CircleStability::Nonhyperbolic
                } else if d < 0.0 {
                    CircleStability::Stable
                } else {
                    CircleStability::Source
                };
                CircleEquilibrium { psi, derivative: d, stability }
            })
            .collect()
    }

    /// Maximum deviation between the closed form and the derived pushforward
    /// over `samples` interior points of `(0, pi)`.
    pub fn max_form_deviation(&self, samples: usize) -> f64 {
        let mut max: f64 = 0.0;
        for i in 1..samples {
            let psi = core::f64::consts::PI * i as f64 / samples as f64;
            max = max.max(numeric::fabs(self.psi_dot(psi) - self.psi_dot_derived(psi)));
        }
        max
    }
}

/// Convenience: build and analyse the circle-lemma system.
pub fn circle_lemma(
    k: u32,
    sign: ForcingSign,
) -> Result<(CircleLemmaSystem, Vec<CircleEquilibrium>), BlowupError> {
    let sys = CircleLemmaSystem::new(k, sign)?;
    let eq = sys.equilibria();
    Ok((sys, eq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat};
    use crate::stratify::build_critical_set;

    fn planar(a: &str, b: &str) -> PolyVectorField {
        let vars = Vars::xy();
        PolyVectorField::planar(
            parse_poly(a, &vars).unwrap(),
            parse_poly(b, &vars).unwrap(),
        )
        .unwrap()
    }

    fn transcritical_hat() -> PolyVectorField {
        extend_field(
            &planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0"),
            &planar("1", "1/2"),
        )
        .unwrap()
    }

    fn pitchfork_hat() -> PolyVectorField {
        extend_field(
            &planar("(x + y/2)*(x - y/2)*(y - x^2)", "0"),
            &planar("-1", "-x"),
        )
        .unwrap()
    }

    #[test]
    fn extend_field_examples() {
        let xhat = transcritical_hat();
        let xye = Vars::xye();
        let expect0 = parse_poly("(y-x)*(y+x)*(y-x/2)*(y+x/2) + eps", &xye).unwrap();
        let expect1 = parse_poly("eps/2", &xye).unwrap();
        assert_eq!(xhat.component(0), &expect0);
        assert_eq!(xhat.component(1), &expect1);
        assert!(xhat.component(2).is_zero());

        // the appendix display form of the second example (with X1 = (1, x))
        let ph = extend_field(&planar("(x + y/2)*(x - y/2)*(y - x^2)", "0"), &planar("1", "x"))
            .unwrap();
        let expect1 = parse_poly("eps*x", &xye).unwrap();
        assert_eq!(ph.component(1), &expect1);

        let zero = extend_field(&planar("x", "y"), &planar("0", "0")).unwrap();
        assert_eq!(zero.component(0), &parse_poly("x", &xye).unwrap());
        assert!(zero.component(2).is_zero());
    }

    #[test]
    fn transcritical_eps_chart() {
        let xhat = transcritical_hat();
        let w = Weights::new(1, 1, 4).unwrap();
        let chart = chart_field(&xhat, &w, ChartId::Eps).unwrap();
        assert_eq!(chart.division_exponent, 3);
        let ruv = Vars::ruv();
        assert!(chart.field.component(0).is_zero()); // rdot = 0
        let udot = parse_poly("(v-u)*(v+u)*(v-u/2)*(v+u/2) + 1", &ruv).unwrap();
        assert_eq!(chart.field.component(1), &udot);
        assert_eq!(chart.field.component(2), &parse_poly("1/2", &ruv).unwrap());
    }

    #[test]
    fn pitchfork_division_exponent() {
        let xhat = pitchfork_hat();
        let w = Weights::new(1, 2, 4).unwrap();
        for chart in ChartId::ALL {
            let c = chart_field(&xhat, &w, chart).unwrap();
            assert_eq!(c.division_exponent, 3, "chart {chart}");
        }
    }

    #[test]
    fn invalid_weights_valuation_failure() {
        let xhat = transcritical_hat();
        let w = Weights::new(1, 1, 1).unwrap();
        let err = SphereField::new(&xhat, w).unwrap_err();
        assert!(matches!(err, BlowupError::ValuationFailure { .. }), "{err:?}");
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(0, 1, 4).is_err());
        assert!(Weights::new(2, 2, 4).is_err());
        assert!(Weights::new(1, 2, 4).is_ok());
    }

    #[test]
    fn pushforward_identity_exact() {
        let xhat = transcritical_hat();
        let w = Weights::new(1, 1, 4).unwrap();
        for chart_id in ChartId::ALL {
            let chart = chart_field(&xhat, &w, chart_id).unwrap();
            for (r, u, v) in [(1i64, 100i64, 3i64), (1, 250, -2), (3, 1000, 5)] {
                let point = [rat(r, 100), rat(u, 100), rat(v, 7)];
                let res = pushforward_residual(&chart, &xhat, &w, &point).unwrap();
                assert!(
                    res.iter().all(|x| num_traits::Zero::is_zero(x)),
                    "chart {chart_id} residual {res:?}"
                );
            }
        }
    }

    #[test]
    fn equator_matches_reference_formula() {
        let sf = SphereField::new(&transcritical_hat(), Weights::new(1, 1, 4).unwrap()).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..100 {
            let t = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * i as f64 / 100.0;
            let (td, pd) = sf.angular(t, core::f64::consts::FRAC_PI_2).unwrap();
            let reference = -1.0 / 16.0
                * numeric::sin(t)
                * (-6.0 * numeric::cos(2.0 * t) + 5.0 * numeric::cos(4.0 * t) + 5.0);
            max_err = max_err.max(numeric::fabs(td - reference)).max(numeric::fabs(pd));
        }
        assert!(max_err < 1e-6, "max err {max_err}");
    }

    #[test]
    fn transcritical_equator_equilibria() {
        let x0 = planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
        let cs = build_critical_set(&x0).unwrap();
        let sf = SphereField::new(&transcritical_hat(), Weights::new(1, 1, 4).unwrap()).unwrap();
        let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
        assert_eq!(eqs.len(), 10);
        let a = libm::atan(0.5);
        let pi = core::f64::consts::PI;
        let mut want = alloc::vec![
            -pi,
            -pi + a,
            -3.0 * pi / 4.0,
            -pi / 4.0,
            -a,
            0.0,
            a,
            pi / 4.0,
            3.0 * pi / 4.0,
            pi - a,
        ];
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in &want {
            let hits = eqs
                .iter()
                .filter(|e| numeric::angle_distance(e.theta, *w) < 1e-9)
                .count();
            assert_eq!(hits, 1, "angle {w} matched {hits} equilibria");
        }
        for e in &eqs {
            if numeric::angle_distance(e.theta, 0.0) < 1e-6
                || numeric::angle_distance(e.theta, pi) < 1e-6
            {
                assert_eq!(e.origin_label, OriginLabel::FastFoliation);
            } else {
                assert!(matches!(e.origin_label, OriginLabel::Branch(_)), "{:?}", e);
            }
        }
    }

    #[test]
    fn simple_two_line_field_equator() {
        // X0 = (y^2 - x^2, 0), X1 = (1, 0), weights (1,1,2): slopes +-1 plus
        // the fast directions
        let xhat = extend_field(&planar("y^2 - x^2", "0"), &planar("1", "0")).unwrap();
        let sf = SphereField::new(&xhat, Weights::new(1, 1, 2).unwrap()).unwrap();
        let cs = build_critical_set(&planar("y^2 - x^2", "0")).unwrap();
        let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
        let pi = core::f64::consts::PI;
        let expected = [0.0, -pi, pi / 4.0, -pi / 4.0, 3.0 * pi / 4.0, -3.0 * pi / 4.0];
        assert_eq!(eqs.len(), expected.len());
        for w in expected {
            assert!(
                eqs.iter().any(|e| numeric::angle_distance(e.theta, w) < 1e-9),
                "missing {w}"
            );
        }
    }

    #[test]
    fn invariant_meridian() {
        let sf = SphereField::new(&transcritical_hat(), Weights::new(1, 1, 4).unwrap()).unwrap();
        let theta = -core::f64::consts::PI + libm::atan(0.5);
        for j in 1..=50 {
            let phi = core::f64::consts::FRAC_PI_2 * j as f64 / 50.0;
            let (td, _) = sf.angular(theta, phi).unwrap();
            assert!(numeric::fabs(td) < 1e-6, "theta_dot {td} at phi {phi}");
        }
    }

    #[test]
    fn transcritical_connection() {
        let x0 = planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
        let cs = build_critical_set(&x0).unwrap();
        let sf = SphereField::new(&transcritical_hat(), Weights::new(1, 1, 4).unwrap()).unwrap();
        let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
        let a = libm::atan(0.5);
        let from = eqs
            .iter()
            .find(|e| numeric::angle_distance(e.theta, -core::f64::consts::PI + a) < 1e-6)
            .unwrap();
        let to = eqs
            .iter()
            .find(|e| numeric::angle_distance(e.theta, a) < 1e-6)
            .unwrap();
        let trace = connection_trace(&sf, from, to);
        assert!(trace.connected, "terminal distance {}", trace.terminal_distance);
        assert!(trace.terminal_distance < 1e-2);
    }

    #[test]
    fn rotated_transcritical_does_not_connect_half_slope_pair() {
        // X1 = (1, 1): the canard moves to y = x, so the y = x/2 pair is not
        // connected
        let xhat =
            extend_field(&planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0"), &planar("1", "1")).unwrap();
        let x0 = planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
        let cs = build_critical_set(&x0).unwrap();
        let sf = SphereField::new(&xhat, Weights::new(1, 1, 4).unwrap()).unwrap();
        let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
        let a = libm::atan(0.5);
        let from = eqs
            .iter()
            .find(|e| numeric::angle_distance(e.theta, -core::f64::consts::PI + a) < 1e-6)
            .unwrap();
        let to = eqs
            .iter()
            .find(|e| numeric::angle_distance(e.theta, a) < 1e-6)
            .unwrap();
        let trace = connection_trace(&sf, from, to);
        assert!(!trace.connected);
    }

    #[test]
    fn pitchfork_symmetry() {
        let sf = SphereField::new(&pitchfork_hat(), Weights::new(1, 2, 4).unwrap()).unwrap();
        let check = symmetry_check_pitchfork(&sf).unwrap();
        assert!(check.holds, "violation {} at {:?}", check.max_violation, check.worst_point);
    }

    #[test]
    fn transcritical_lacks_pitchfork_symmetry() {
        let sf = SphereField::new(&transcritical_hat(), Weights::new(1, 1, 4).unwrap()).unwrap();
        let check = symmetry_check_pitchfork(&sf).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn theta_dot_identically_zero_is_symmetric() {
        // X0 = (0, y): critical set is the x-axis; the blown-up flow is
        // meridional, so the reflection check holds trivially
        let xhat = extend_field(&planar("0", "y"), &planar("0", "0")).unwrap();
        let sf = SphereField::new(&xhat, Weights::new(1, 1, 2).unwrap());
        if let Ok(sf) = sf {
            let check = symmetry_check_pitchfork(&sf).unwrap();
            assert!(check.holds);
        }
    }

    #[test]
    fn circle_lemma_k1() {
        let (sys, eqs) = circle_lemma(1, ForcingSign::Plus).unwrap();
        assert!(sys.max_form_deviation(1000) < 1e-12);
        assert_eq!(eqs.len(), 3);
        assert!(numeric::fabs(eqs[0].psi) < 1e-12);
        assert!(numeric::fabs(eqs[2].psi - core::f64::consts::PI) < 1e-12);
        let interior = &eqs[1];
        assert!(
            numeric::fabs(interior.psi - 2.542825948334841) < 1e-9,
            "psi* = {}",
            interior.psi
        );
        assert_eq!(eqs[0].stability, CircleStability::Stable);
        assert_eq!(eqs[2].stability, CircleStability::Stable);
        assert_eq!(interior.stability, CircleStability::Source);
    }

    #[test]
    fn circle_lemma_uniqueness_all_k() {
        for k in 1..=6 {
            let (_, eqs) = circle_lemma(k, ForcingSign::Plus).unwrap();
            assert_eq!(eqs.len(), 3, "k = {k}");
        }
    }

    #[test]
    fn circle_lemma_minus_sign_has_interior_root_before_half_pi() {
        let (_, eqs) = circle_lemma(2, ForcingSign::Minus).unwrap();
        assert_eq!(eqs.len(), 3);
        assert!(eqs[1].psi > 0.0 && eqs[1].psi < core::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn circle_lemma_rejects_k0() {
        assert!(circle_lemma(0, ForcingSign::Plus).is_err());
    }
}

#[cfg(test)]
mod extra_tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::stratify::build_critical_set;

    fn planar(a: &str, b: &str) -> PolyVectorField {
        let vars = Vars::xy();
        PolyVectorField::planar(
            parse_poly(a, &vars).unwrap(),
            parse_poly(b, &vars).unwrap(),
        )
        .unwrap()
    }

    fn tc_sphere() -> (crate::stratify::CriticalSet, SphereField) {
        let x0 = planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
        let cs = build_critical_set(&x0).unwrap();
        let xhat = extend_field(&x0, &planar("1", "1/2")).unwrap();
        let sf = SphereField::new(&xhat, Weights::new(1, 1, 4).unwrap()).unwrap();
        (cs, sf)
    }

    fn pf_sphere() -> SphereField {
        let x0 = planar("(x + y/2)*(x - y/2)*(y - x^2)", "0");
        let xhat = extend_field(&x0, &planar("-1", "-x")).unwrap();
        SphereField::new(&xhat, Weights::new(1, 2, 4).unwrap()).unwrap()
    }

    #[test]
    fn equator_is_invariant_on_fine_grid() {
        let (_, tc) = tc_sphere();
        let pf = pf_sphere();
        let half_pi = core::f64::consts::FRAC_PI_2;
        for sf in [&tc, &pf] {
            let mut worst: f64 = 0.0;
            for i in 0..1024 {
                let t = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * i as f64 / 1024.0;
                let (_, pd) = sf.angular(t, half_pi).unwrap();
                worst = worst.max(numeric::fabs(pd));
            }
            assert!(worst < 1e-6, "equator |phi_dot| {worst}");
        }
    }

    #[test]
    fn richardson_radius_pairs_agree() {
        let (_, tc) = tc_sphere();
        let pf = pf_sphere();
        for sf in [&tc, &pf] {
            let mut worst: f64 = 0.0;
            for i in 0..10 {
                let t = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * (i as f64 + 0.5) / 10.0;
                for j in 0..10 {
                    let p = 0.3 + (core::f64::consts::FRAC_PI_2 - 0.3) * j as f64 / 9.0;
                    let a = sf.angular_extrapolated(t, p, 1e-4, 1e-5).unwrap();
                    let b = sf.angular_extrapolated(t, p, 1e-3, 1e-4).unwrap();
                    worst = worst
                        .max(numeric::fabs(a.0 - b.0))
                        .max(numeric::fabs(a.1 - b.1));
                }
            }
            assert!(worst < 1e-5, "radius-pair disagreement {worst}");
        }
    }

    #[test]
    fn chart_side_classification_cross_checks() {
        // the equator equilibrium at arctan(1/2) sits at (r,u,v) = (0,0,1/2)
        // in the x+ chart; the exact chart Jacobian's eigenvalue signs must
        // match the saddle classification found on the sphere
        let (cs, sf) = tc_sphere();
        let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
        let a = libm::atan(0.5);
        let eq = eqs
            .iter()
            .find(|e| numeric::angle_distance(e.theta, a) < 1e-9)
            .unwrap();

        let chart = chart_field(sf.extended_field(), &sf.weights, ChartId::XPlus).unwrap();
        let jac = chart.field.jacobian().unwrap();
        let at = [("r", crate::poly::rat(0, 1)), ("u", crate::poly::rat(0, 1)), ("v", crate::poly::rat(1, 2))];
        // angular block: rows/cols for (u, v)
        let j = [
            [
                rat_to_f64(&jac[1][1].eval_rational(&at).unwrap()),
                rat_to_f64(&jac[1][2].eval_rational(&at).unwrap()),
            ],
            [
                rat_to_f64(&jac[2][1].eval_rational(&at).unwrap()),
                rat_to_f64(&jac[2][2].eval_rational(&at).unwrap()),
            ],
        ];
        let chart_eig = numeric::eig2(j[0][0], j[0][1], j[1][0], j[1][1]);
        // exact chart algebra: the equator direction carries eigenvalue 3/8,
        // the meridional direction is a center (the eps-weight 4 pushes the
        // normal dynamics to higher order); the numeric sphere-side
        // linearisation must reproduce both
        let mut chart_vals = [chart_eig[0].0, chart_eig[1].0];
        chart_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(numeric::fabs(chart_vals[0]) < 1e-12, "{chart_eig:?}");
        assert!(numeric::fabs(chart_vals[1] - 0.375) < 1e-12, "{chart_eig:?}");
        let mut sphere_vals = [eq.eigenvalues[0].0, eq.eigenvalues[1].0];
        sphere_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // the chart and sphere desingularisations divide by different radial
        // coordinates; on the equator they differ by the positive conformal
        // factor cos(theta)^m, which scales eigenvalues but not their signs
        let conformal = numeric::powi(numeric::cos(a), 3);
        assert!(numeric::fabs(sphere_vals[0] - chart_vals[0] * conformal) < 1e-5, "{sphere_vals:?}");
        assert!(numeric::fabs(sphere_vals[1] - chart_vals[1] * conformal) < 1e-5, "{sphere_vals:?}");
        assert_eq!(eq.classification, Classification::Nonhyperbolic);
    }

    #[test]
    fn core_types_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<MultiPoly>();
        assert_send_sync::<PolyVectorField>();
        assert_send_sync::<crate::stratify::CriticalSet>();
        assert_send_sync::<SphereField>();
        assert_send_sync::<crate::canard::FastFrame>();
    }
}
