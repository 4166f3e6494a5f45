//! JSON report structures. Serialisation is deterministic: the report is
//! converted to a `serde_json::Value` (BTreeMap-backed, so keys are sorted)
//! before printing, and exact rationals are carried as `p/q` strings.

use serde::{Deserialize, Serialize};

use canard_core::blowup::{BlownUpChart, ConnectionTrace, SphereEquilibrium, SymmetryCheck};
use canard_core::canard::{BranchVerdict, CanardReport, WedgeValue};
use canard_core::poly::{format_poly, format_rat};
use canard_core::stratify::{Coord2, CriticalSet, SingularPoint};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub system: SystemEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_set: Option<CriticalSetSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stratifications: Option<StratificationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canard: Option<Vec<CanardSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(system: SystemEcho) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            system,
            critical_set: None,
            stratifications: None,
            canard: None,
            blowup: None,
            simulation: None,
            warnings: Vec::new(),
        }
    }

    /// Deterministic JSON: sorted keys, canonical rational strings.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        let mut out = serde_json::to_string_pretty(&value).expect("value prints");
        out.push('\n');
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SystemEcho {
    pub x0: [String; 2],
    pub x1: [String; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<[u32; 3]>,
    pub bounding_box: [String; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchSummary {
    pub id: usize,
    pub poly: String,
    pub degree: u32,
    pub certified_irreducible: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SingularPointSummary {
    pub location: [String; 2],
    pub exact: bool,
    pub incident_branches: Vec<usize>,
    pub pairwise_transversal: bool,
    pub tangential_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CriticalSetSummary {
    pub standard_form: bool,
    pub singular: bool,
    pub common_poly: String,
    pub cofactor: [String; 2],
    pub rescaling: String,
    pub branches: Vec<BranchSummary>,
    pub singular_points: Vec<SingularPointSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StratificationSummary {
    /// One entry per singular point: number of Whitney strata (2N + 1).
    pub whitney_strata: Vec<usize>,
    /// One entry per singular point: number of relaxed stratifications (N).
    pub relaxed_count: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchVerdictSummary {
    pub branch: usize,
    pub poly: String,
    pub wedge: String,
    pub wedge_exact: bool,
    pub is_canard: bool,
    pub tangent: [String; 2],
    pub stability: [String; 2],
    pub orientation: String,
    pub reduced_flow_equilibria: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CanardSummary {
    pub singular_point: [String; 2],
    pub per_branch: Vec<BranchVerdictSummary>,
    pub canard_branches: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChartSummary {
    pub id: String,
    pub division_exponent: i64,
    pub rdot: String,
    pub udot: String,
    pub vdot: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    pub theta: f64,
    pub phi: f64,
    pub classification: String,
    pub label: String,
    pub eigenvalues: [[f64; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConnectionSummary {
    pub branch: Option<usize>,
    pub from_theta: f64,
    pub to_theta: f64,
    pub connected: bool,
    pub terminal_distance: f64,
    pub arclength: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SymmetrySummary {
    pub holds: bool,
    pub max_violation: f64,
    pub worst_point: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BlowupSummary {
    pub weights: [u32; 3],
    pub division_exponent: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charts: Option<Vec<ChartSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equator_equilibria: Option<Vec<EquilibriumSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connections: Option<Vec<ConnectionSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub initial: [f64; 2],
    pub t_end: f64,
    pub steps: usize,
    pub final_state: [f64; 2],
    pub events: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canard_metric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_ratio_aligned_rotated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_shadowing_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_exact_prefix: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_switched_to_float: Option<bool>,
}

pub fn coord_strings(c: &Coord2) -> ([String; 2], bool) {
    match c {
        Coord2::Exact(p) => ([format_rat(&p[0]), format_rat(&p[1])], true),
        Coord2::Approx(p) => ([format!("{:.17e}", p[0]), format!("{:.17e}", p[1])], false),
    }
}

pub fn critical_set_summary(cs: &CriticalSet, points: &[SingularPoint]) -> CriticalSetSummary {
    CriticalSetSummary {
        standard_form: cs.standard_form,
        singular: cs.singular,
        common_poly: format_poly(&cs.common_poly),
        cofactor: [
            format_poly(&cs.fast_cofactor[0]),
            format_poly(&cs.fast_cofactor[1]),
        ],
        rescaling: format_poly(&cs.rescaling),
        branches: cs
            .branches
            .iter()
            .map(|b| BranchSummary {
                id: b.id.0,
                poly: format_poly(&b.defining_poly),
                degree: b.defining_poly.total_degree(),
                certified_irreducible: b.certified_irreducible,
            })
            .collect(),
        singular_points: points
            .iter()
            .map(|p| {
                let (location, exact) = coord_strings(&p.location);
                SingularPointSummary {
                    location,
                    exact,
                    incident_branches: p.incident_branches.iter().map(|b| b.0).collect(),
                    pairwise_transversal: p.pairwise_transversal,
                    tangential_pairs: p
                        .tangential_pairs
                        .iter()
                        .map(|(a, b)| [a.0, b.0])
                        .collect(),
                }
            })
            .collect(),
    }
}

fn wedge_string(w: &WedgeValue) -> (String, bool) {
    match w {
        WedgeValue::Exact(r) => (format_rat(r), true),
        WedgeValue::Approx(v) => (format!("{v:.17e}"), false),
    }
}

fn verdict_summary(cs: &CriticalSet, v: &BranchVerdict) -> BranchVerdictSummary {
    let (wedge, wedge_exact) = wedge_string(&v.wedge);
    let tangent = match &v.tangent_at_ps {
        Some(t) => [format_rat(&t[0]), format_rat(&t[1])],
        None => [
            format!("{:.17e}", v.tangent_f64[0]),
            format!("{:.17e}", v.tangent_f64[1]),
        ],
    };
    BranchVerdictSummary {
        branch: v.branch.0,
        poly: format_poly(&cs.branch(v.branch).defining_poly),
        wedge,
        wedge_exact,
        is_canard: v.is_canard,
        tangent,
        stability: [v.stability[0].to_string(), v.stability[1].to_string()],
        orientation: v.orientation.to_string(),
        reduced_flow_equilibria: v.reduced_flow_equilibria.clone(),
    }
}

pub fn canard_summary(cs: &CriticalSet, report: &CanardReport) -> CanardSummary {
    let (singular_point, _) = coord_strings(&report.singular_point.location);
    CanardSummary {
        singular_point,
        per_branch: report
            .per_branch
            .iter()
            .map(|v| verdict_summary(cs, v))
            .collect(),
        canard_branches: report.canard_branches().iter().map(|b| b.0).collect(),
    }
}

pub fn chart_summary(c: &BlownUpChart) -> ChartSummary {
    ChartSummary {
        id: c.chart_id.to_string(),
        division_exponent: c.division_exponent,
        rdot: format_poly(c.field.component(0)),
        udot: format_poly(c.field.component(1)),
        vdot: format_poly(c.field.component(2)),
    }
}

pub fn equilibrium_summary(e: &SphereEquilibrium) -> EquilibriumSummary {
    EquilibriumSummary {
        theta: e.theta,
        phi: e.phi,
        classification: e.classification.to_string(),
        label: e.origin_label.to_string(),
        eigenvalues: [
            [e.eigenvalues[0].0, e.eigenvalues[0].1],
            [e.eigenvalues[1].0, e.eigenvalues[1].1],
        ],
    }
}

pub fn connection_summary(
    branch: Option<usize>,
    from: f64,
    to: f64,
    t: &ConnectionTrace,
) -> ConnectionSummary {
    ConnectionSummary {
        branch,
        from_theta: from,
        to_theta: to,
        connected: t.connected,
        terminal_distance: t.terminal_distance,
        arclength: t.arclength,
    }
}

pub fn symmetry_summary(s: &SymmetryCheck) -> SymmetrySummary {
    SymmetrySummary {
        holds: s.holds,
        max_violation: s.max_violation,
        worst_point: [s.worst_point.0, s.worst_point.1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trips_and_sorts_keys() {
        let report = Report::new(SystemEcho {
            x0: ["x".into(), "y".into()],
            x1: ["1".into(), "0".into()],
            weights: Some([1, 1, 4]),
            bounding_box: ["-1".into(), "1".into(), "-1".into(), "1".into()],
            epsilon: Some(1e-3),
            delta: None,
        });
        let json = report.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schema, SCHEMA_VERSION);
        assert_eq!(back.system.x0[0], "x");
        // keys appear in sorted order
        let schema_pos = json.find("\"schema\"").unwrap();
        let system_pos = json.find("\"system\"").unwrap();
        let warnings_pos = json.find("\"warnings\"").unwrap();
        assert!(schema_pos < system_pos && system_pos < warnings_pos);
        // byte-identical across serialisations
        assert_eq!(json, serde_json::from_str::<Report>(&json).unwrap().to_json());
    }
}
