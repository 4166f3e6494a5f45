//! Built-in reproduction suite: re-derives every quantitative anchor of the
//! two worked examples (wedge selection, blow-up charts, equator data,
//! connections, symmetry, circle dynamics) and reports one pass/fail line per
//! check.

use canard_core::blowup::{
    chart_field, circle_lemma, connection_trace, equator_equilibria, extend_field,
    pushforward_residual, symmetry_check_pitchfork, ChartId, CircleStability, ForcingSign,
    SphereField, Weights,
};
use canard_core::canard::{detect_singular_canards, FastFrame, WedgeValue};
use canard_core::numeric;
use canard_core::poly::{format_rat, parse_poly, rat, Vars};
use canard_core::stratify::{build_critical_set, find_singular_points, AnalysisBox, CriticalSet};
use canard_core::PolyVectorField;
use num_traits::Zero;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn planar(a: &str, b: &str) -> PolyVectorField {
    let vars = Vars::xy();
    PolyVectorField::planar(parse_poly(a, &vars).unwrap(), parse_poly(b, &vars).unwrap()).unwrap()
}

pub fn transcritical_x0() -> PolyVectorField {
    planar("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0")
}

pub fn transcritical_x1() -> PolyVectorField {
    planar("1", "1/2")
}

pub fn pitchfork_x0() -> PolyVectorField {
    planar("(x + y/2)*(x - y/2)*(y - x^2)", "0")
}

pub fn pitchfork_x1() -> PolyVectorField {
    planar("-1", "-x")
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Wedge selection for the transcritical system under a given perturbation:
/// passes iff exactly the branch `x - 2y` (that is, `y = x/2`) has wedge
/// value exactly zero.
pub fn transcritical_wedge_check(x1: &PolyVectorField) -> Check {
    let cs = build_critical_set(&transcritical_x0()).unwrap();
    let bx = AnalysisBox::default();
    let pts = find_singular_points(&cs, &bx).unwrap();
    let frame = match FastFrame::validated(&cs, &pts[0], &bx) {
        Ok(f) => f,
        Err(e) => return check("transcritical-wedge", false, format!("{e}")),
    };
    let report = match detect_singular_canards(x1, &cs, &pts[0], &frame, &bx) {
        Ok(r) => r,
        Err(e) => return check("transcritical-wedge", false, format!("{e}")),
    };
    let mut zero = Vec::new();
    let mut detail = Vec::new();
    for v in &report.per_branch {
        let name = format!("{}", cs.branch(v.branch).defining_poly);
        let w = match &v.wedge {
            WedgeValue::Exact(r) => format_rat(r),
            WedgeValue::Approx(x) => format!("~{x:.3e}"),
        };
        if v.is_canard {
            zero.push(name.clone());
        }
        detail.push(format!("{name}: {w}"));
    }
    let passed = zero == ["x - 2*y"];
    check("transcritical-wedge", passed, detail.join(", "))
}

fn pitchfork_wedge_check() -> Check {
    let cs = build_critical_set(&pitchfork_x0()).unwrap();
    let bx = AnalysisBox::default();
    let pts = find_singular_points(&cs, &bx).unwrap();
    let frame = FastFrame::validated(&cs, &pts[0], &bx).unwrap();
    let report = detect_singular_canards(&pitchfork_x1(), &cs, &pts[0], &frame, &bx).unwrap();
    let canards: Vec<String> = report
        .per_branch
        .iter()
        .filter(|v| v.is_canard)
        .map(|v| format!("{}", cs.branch(v.branch).defining_poly))
        .collect();
    let passed = canards == ["x^2 - y"];
    check("pitchfork-wedge", passed, format!("canard branches: {canards:?}"))
}

fn spheres() -> ((CriticalSet, SphereField), (CriticalSet, SphereField)) {
    let tc_cs = build_critical_set(&transcritical_x0()).unwrap();
    let tc_hat = extend_field(&transcritical_x0(), &transcritical_x1()).unwrap();
    let tc_sf = SphereField::new(&tc_hat, Weights::new(1, 1, 4).unwrap()).unwrap();
    let pf_cs = build_critical_set(&pitchfork_x0()).unwrap();
    let pf_hat = extend_field(&pitchfork_x0(), &pitchfork_x1()).unwrap();
    let pf_sf = SphereField::new(&pf_hat, Weights::new(1, 2, 4).unwrap()).unwrap();
    ((tc_cs, tc_sf), (pf_cs, pf_sf))
}

fn equator_field_check() -> Vec<Check> {
    let ((_, tc), (_, pf)) = spheres();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut tc_err: f64 = 0.0;
    let mut pf_err: f64 = 0.0;
    for i in 0..100 {
        let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / 100.0;
        let (td, _) = tc.angular(t, half_pi).unwrap();
        let reference = -1.0 / 16.0
            * numeric::sin(t)
            * (-6.0 * numeric::cos(2.0 * t) + 5.0 * numeric::cos(4.0 * t) + 5.0);
        tc_err = tc_err.max(numeric::fabs(td - reference));
        let (td, _) = pf.angular(t, half_pi).unwrap();
        let (s, c) = (numeric::sin(t), numeric::cos(t));
        let s2 = numeric::sin(2.0 * t);
        let reference = -(-3.0 * s2 * s2 + 8.0 * s * c.powi(4) + 4.0 * s * s * c * c)
            / (2.0 * (numeric::cos(2.0 * t) - 3.0));
        pf_err = pf_err.max(numeric::fabs(td - reference));
    }
    vec![
        check(
            "transcritical-equator-field",
            tc_err < 1e-6,
            format!("max |deviation| = {tc_err:.2e} over 100 angles (tolerance 1e-6)"),
        ),
        check(
            "pitchfork-equator-field",
            pf_err < 1e-6,
            format!("max |deviation| = {pf_err:.2e} over 100 angles (tolerance 1e-6)"),
        ),
    ]
}

fn transcritical_equilibria_check() -> Check {
    let ((cs, sf), _) = spheres();
    let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
    let a = 0.5_f64.atan();
    let pi = std::f64::consts::PI;
    let want = [
        0.0, pi, pi / 4.0, -pi / 4.0, 3.0 * pi / 4.0, -3.0 * pi / 4.0,
        a, -a, pi - a, -(pi - a),
    ];
    let mut worst: f64 = 0.0;
    for w in want {
        let best = eqs
            .iter()
            .map(|e| numeric::angle_distance(e.theta, w))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    let passed = eqs.len() == 10 && worst < 1e-9;
    check(
        "transcritical-equator-equilibria",
        passed,
        format!("{} equilibria, worst angle error {worst:.2e} (tolerance 1e-9)", eqs.len()),
    )
}

fn pitchfork_equilibria_check() -> Check {
    let (_, (cs, sf)) = spheres();
    let eqs = equator_equilibria(&sf, &cs.branches).unwrap();
    // bisection oracle on sin(t) = cos^2(t)
    let f = |t: f64| numeric::cos(t) * numeric::cos(t) - numeric::sin(t);
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::FRAC_PI_2);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ts = 0.5 * (lo + hi);
    let pi = std::f64::consts::PI;
    let want = [0.0, pi, pi / 2.0, -pi / 2.0, ts, pi - ts];
    let mut worst: f64 = 0.0;
    for w in want {
        let best = eqs
            .iter()
            .map(|e| numeric::angle_distance(e.theta, w))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    let golden = 0.5 * (1.0 + numeric::sqrt(5.0));
    let arctan_label = (1.0 / golden).atan();
    let passed = eqs.len() == 6 && worst < 1e-9;
    check(
        "pitchfork-equator-equilibria",
        passed,
        format!(
            "{} equilibria, worst error {worst:.2e}; interior angle {ts:.7} = arcsin(1/phi) \
             zeroes the equator field, while the commonly quoted label arctan(1/phi) = \
             {arctan_label:.7} does not (discrepancy reported, not resolved)",
            eqs.len()
        ),
    )
}

fn meridian_check() -> Check {
    let ((_, sf), _) = spheres();
    let theta = -std::f64::consts::PI + 0.5_f64.atan();
    let mut worst: f64 = 0.0;
    for j in 1..=50 {
        let phi = std::f64::consts::FRAC_PI_2 * j as f64 / 50.0;
        let (td, _) = sf.angular(theta, phi).unwrap();
        worst = worst.max(numeric::fabs(td));
    }
    check(
        "transcritical-invariant-meridian",
        worst < 1e-6,
        format!("max |theta_dot| = {worst:.2e} on 50 samples (tolerance 1e-6)"),
    )
}

fn connection_checks() -> Vec<Check> {
    let ((tc_cs, tc_sf), (pf_cs, pf_sf)) = spheres();
    let mut out = Vec::new();

    let eqs = equator_equilibria(&tc_sf, &tc_cs.branches).unwrap();
    let a = 0.5_f64.atan();
    let find = |eqs: &[canard_core::blowup::SphereEquilibrium], t: f64| {
        eqs.iter()
            .find(|e| numeric::angle_distance(e.theta, t) < 1e-6)
            .cloned()
            .unwrap()
    };
    let from = find(&eqs, -std::f64::consts::PI + a);
    let to = find(&eqs, a);
    let trace = connection_trace(&tc_sf, &from, &to);
    out.push(check(
        "transcritical-connection",
        trace.connected && trace.terminal_distance < 1e-2,
        format!(
            "attracting -pi+arctan(1/2) to repelling arctan(1/2): terminal distance {:.2e}",
            trace.terminal_distance
        ),
    ));

    let eqs = equator_equilibria(&pf_sf, &pf_cs.branches).unwrap();
    let golden = 0.5 * (1.0 + numeric::sqrt(5.0));
    let ts = (1.0 / golden).asin();
    let from = find(&eqs, ts);
    let to = find(&eqs, std::f64::consts::PI - ts);
    let trace = connection_trace(&pf_sf, &from, &to);
    out.push(check(
        "pitchfork-connection",
        trace.connected && trace.terminal_distance < 1e-2,
        format!(
            "attracting arcsin(1/phi) to repelling pi-arcsin(1/phi): terminal distance {:.2e}",
            trace.terminal_distance
        ),
    ));
    out
}

fn symmetry_check() -> Check {
    let (_, (_, sf)) = spheres();
    let s = symmetry_check_pitchfork(&sf).unwrap();
    check(
        "pitchfork-reflection-symmetry",
        s.holds && s.max_violation < 1e-6,
        format!("max violation {:.2e} on a 32x32 grid (tolerance 1e-6)", s.max_violation),
    )
}

fn circle_lemma_check() -> Check {
    let mut detail = Vec::new();
    let mut passed = true;
    for k in 1..=4 {
        let (sys, eqs) = circle_lemma(k, ForcingSign::Plus).unwrap();
        let dev = sys.max_form_deviation(1000);
        let ok = dev < 1e-12
            && eqs.len() == 3
            && eqs[0].stability == CircleStability::Stable
            && eqs[2].stability == CircleStability::Stable
            && eqs[1].stability == CircleStability::Source;
        passed &= ok;
        detail.push(format!("k={k}: psi*={:.6}, deviation {dev:.1e}", eqs[1].psi));
    }
    check("circle-lemma", passed, detail.join("; "))
}

fn chart_exactness_check() -> Check {
    let cases = [
        (transcritical_x0(), transcritical_x1(), Weights::new(1, 1, 4).unwrap()),
        (pitchfork_x0(), pitchfork_x1(), Weights::new(1, 2, 4).unwrap()),
    ];
    let mut passed = true;
    let mut points = 0usize;
    for (x0, x1, w) in cases {
        let xhat = extend_field(&x0, &x1).unwrap();
        for chart_id in ChartId::ALL {
            let chart = chart_field(&xhat, &w, chart_id).unwrap();
            passed &= chart.division_exponent == 3;
            let mut k: i64 = 1;
            for _ in 0..100 {
                let p = [rat(k.rem_euclid(47) + 1, 100), rat(7 * k % 23 - 11, 7), rat(5 * k % 19 - 9, 9)];
                let res = pushforward_residual(&chart, &xhat, &w, &p).unwrap();
                passed &= res.iter().all(|x| x.is_zero());
                points += 1;
                k += 1;
            }
        }
    }
    check(
        "chart-exactness",
        passed,
        format!("pushforward identity exact at {points} rational points, m = 3 in every chart"),
    )
}

/// Run the full reproduction suite.
pub fn run_all() -> Vec<Check> {
    let mut checks = vec![
        transcritical_wedge_check(&transcritical_x1()),
        pitchfork_wedge_check(),
    ];
    checks.extend(equator_field_check());
    checks.push(transcritical_equilibria_check());
    checks.push(pitchfork_equilibria_check());
    checks.push(meridian_check());
    checks.extend(connection_checks());
    checks.push(symmetry_check());
    checks.push(circle_lemma_check());
    checks.push(chart_exactness_check());
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_all();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(checks.len(), 12);
    }

    #[test]
    fn perturbed_transcritical_perturbation_fails_wedge_check() {
        // X1 = (1, 0.51): no branch tangent matches, the check must fail
        let x1 = planar("1", "51/100");
        let c = transcritical_wedge_check(&x1);
        assert!(!c.passed, "{}", c.detail);
    }
}
