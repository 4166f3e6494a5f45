//! Shared analysis pipeline behind `analyze`, `blowup` and `simulate`:
//! critical set, singular points, stratification counts, fast frame and
//! canard verdicts, with assumption violations collected as warnings and an
//! exit-code recommendation instead of hard failures wherever a partial
//! report is still useful.

use canard_core::canard::{detect_singular_canards, CanardError, CanardReport, FastFrame};
use canard_core::stratify::{
    build_critical_set, find_singular_points, relaxed_stratifications, whitney_stratify,
    CriticalSet, SingularPoint,
};
use canard_core::PolyVectorField;

use crate::system_file::SystemFile;

/// Exit codes: `0` success, `1` parse or IO error, `2` assumption violation.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;

pub struct Analysis {
    pub critical_set: Option<CriticalSet>,
    pub points: Vec<SingularPoint>,
    pub whitney_counts: Vec<usize>,
    pub relaxed_counts: Vec<usize>,
    pub reports: Vec<CanardReport>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

pub fn analyze_system(file: &SystemFile) -> Analysis {
    let mut warnings = Vec::new();
    let mut exit_code = EXIT_OK;
    let bx = &file.bounding_box;

    let cs = match build_critical_set(&file.x0) {
        Ok(cs) => cs,
        Err(e) => {
            warnings.push(format!("critical set: {e}"));
            return Analysis {
                critical_set: None,
                points: Vec::new(),
                whitney_counts: Vec::new(),
                relaxed_counts: Vec::new(),
                reports: Vec::new(),
                warnings,
                exit_code: EXIT_ASSUMPTION,
            };
        }
    };
    if !cs.singular {
        warnings.push(
            "perturbation is regular: X0 components have no common component \
             (critical set is at most a finite point set)"
                .to_string(),
        );
    }
    if cs.has_unsplit_parts {
        warnings.push(
            "some squarefree parts were kept unsplit (irreducible components of degree >= 3); \
             branch resolution may be coarser than the true decomposition"
                .to_string(),
        );
    }

    let points = match find_singular_points(&cs, bx) {
        Ok(p) => p,
        Err(e) => {
            warnings.push(format!("singular points: {e}"));
            return Analysis {
                critical_set: Some(cs),
                points: Vec::new(),
                whitney_counts: Vec::new(),
                relaxed_counts: Vec::new(),
                reports: Vec::new(),
                warnings,
                exit_code: EXIT_ASSUMPTION,
            };
        }
    };
    if points.len() > 1 {
        warnings.push(format!(
            "{} singular points in the box; the analysis assumes an isolated one \
             (shrink the box to separate them)",
            points.len()
        ));
    }

    let mut whitney_counts = Vec::new();
    let mut relaxed_counts = Vec::new();
    let mut reports = Vec::new();
    for p in &points {
        if !p.pairwise_transversal {
            warnings.push(format!(
                "singular point at ({}, {}) has a tangential branch pair {:?}: the intersection \
                 number exceeds one, the tangency condition does not apply there",
                p.location.to_f64()[0],
                p.location.to_f64()[1],
                p.tangential_pairs
                    .first()
                    .map(|(a, b)| (a.0, b.0))
                    .unwrap_or((0, 0)),
            ));
            exit_code = EXIT_ASSUMPTION;
            continue;
        }
        match whitney_stratify(&cs, p, bx) {
            Ok(ws) => {
                whitney_counts.push(ws.strata.len());
                relaxed_counts.push(relaxed_stratifications(&ws).len());
            }
            Err(e) => {
                warnings.push(format!("stratification: {e}"));
                exit_code = EXIT_ASSUMPTION;
                continue;
            }
        }
        let frame = match FastFrame::validated(&cs, p, bx) {
            Ok(f) => f,
            Err(e) => {
                warnings.push(format!("fast frame: {e}"));
                exit_code = EXIT_ASSUMPTION;
                continue;
            }
        };
        match detect_singular_canards(&file.x1, &cs, p, &frame, bx) {
            Ok(mut report) => {
                warnings.append(&mut report.warnings);
                reports.push(report);
            }
            Err(CanardError::PerturbationVanishes) => {
                warnings.push("|X1(p_s)| = O(1) violated: X1 vanishes at the singular point".into());
                exit_code = EXIT_ASSUMPTION;
            }
            Err(e) => {
                warnings.push(format!("canard detection: {e}"));
                exit_code = EXIT_ASSUMPTION;
            }
        }
    }

    Analysis {
        critical_set: Some(cs),
        points,
        whitney_counts,
        relaxed_counts,
        reports,
        warnings,
        exit_code,
    }
}

/// The perturbation rotated by an angle (for canard-metric comparisons).
pub fn rotated_perturbation(x1: &PolyVectorField, angle: f64) -> PolyVectorField {
    use canard_core::poly::{MultiPoly, Rational};
    let vars = x1.vars().clone();
    let (c, s) = (angle.cos(), angle.sin());
    let to_rat = |v: f64| Rational::from_float(v).unwrap();
    let a = x1.component(0);
    let b = x1.component(1);
    let new_a = a
        .scale(&to_rat(c))
        .sub(&b.scale(&to_rat(s)))
        .expect("same vars");
    let new_b = a
        .scale(&to_rat(s))
        .add(&b.scale(&to_rat(c)))
        .expect("same vars");
    let _ = MultiPoly::zero(&vars);
    PolyVectorField::planar(new_a, new_b).expect("same vars")
}
