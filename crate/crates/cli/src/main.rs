//! Command line for slow-fast canard analysis: critical sets and exact
//! tangency verdicts (`analyze`), weighted blow-up data (`blowup`),
//! trajectory and Euler-map evidence (`simulate`), the odd-power circle
//! dynamics (`circle-lemma`), and the built-in reproduction suite
//! (`verify-paper`).
//!
//! Exit codes: `0` success, `1` parse/IO/usage error, `2` assumption
//! violation (non-transversal intersection, vanishing perturbation at the
//! singular point, weights failing to desingularise, and similar).

mod analysis;
mod report;
mod svg;
mod system_file;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use canard_core::blowup::{
    chart_field, circle_lemma, connection_trace, equator_equilibria, extend_field, ChartId,
    ForcingSign, SphereField, Weights,
};
use canard_core::dynamics::{
    canard_metric, default_tube_radius, integrate_full, EulerMap, EventSpec, IntegratorConfig,
    Trajectory,
};
use canard_core::numeric;
use canard_core::poly::{format_rat, Rational};
use canard_core::stratify::AnalysisBox;
use canard_core::PolyVectorField;

use analysis::{analyze_system, EXIT_ASSUMPTION, EXIT_INPUT, EXIT_OK};
use report::*;
use system_file::{parse_system_file, SystemFile};

#[derive(Parser)]
#[command(
    name = "canard",
    about = "Singular-canard analysis for planar slow-fast systems with self-intersecting critical sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct CommonOut {
    /// Write the primary output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Critical set, stratifications and exact canard verdicts.
    Analyze {
        /// System file.
        file: PathBuf,
        /// Analysis box `xmin,xmax,ymin,ymax` (overrides the file).
        #[arg(long = "box")]
        bounding_box: Option<String>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Weighted blow-up: charts, equator equilibria, connections, symmetry.
    Blowup {
        file: PathBuf,
        /// Blow-up weights `a,b,c` (overrides the file).
        #[arg(long)]
        weights: Option<String>,
        /// Emit only the chart fields.
        #[arg(long)]
        charts: bool,
        /// Emit only the equator equilibrium table.
        #[arg(long)]
        equator: bool,
        /// Emit only connection traces.
        #[arg(long)]
        connect: bool,
        /// Emit only the reflection-symmetry check.
        #[arg(long)]
        sphere: bool,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Integrate the full system or iterate the Euler map; CSV trajectories.
    Simulate {
        file: PathBuf,
        /// Perturbation size (overrides the file).
        #[arg(long)]
        eps: Option<f64>,
        /// Euler step (overrides the file).
        #[arg(long)]
        delta: Option<f64>,
        /// Initial point `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        q0: Option<String>,
        /// Integration time.
        #[arg(long = "t-end", default_value_t = 10.0)]
        t_end: f64,
        /// Tube radius for event detection and the canard metric.
        #[arg(long)]
        tube: Option<f64>,
        /// Iterate the Euler map instead of integrating the flow.
        #[arg(long)]
        euler: bool,
        /// Run the comparison sweep: canard-metric ratio against a rotated
        /// perturbation, and the Euler shadowing ratio for delta and delta/2.
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Circle dynamics of the odd-power desingularisation.
    CircleLemma {
        /// Odd power exponent `k` in `x^(2k+1)`.
        #[arg(long)]
        k: u32,
        /// Sign of the constant forcing.
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Run the built-in reproduction checks; exit 0 iff all pass.
    VerifyPaper,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
    None,
}

impl From<SignArg> for ForcingSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => ForcingSign::Plus,
            SignArg::Minus => ForcingSign::Minus,
            SignArg::None => ForcingSign::None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze { file, bounding_box, out } => cmd_analyze(&file, bounding_box, &out),
        Command::Blowup { file, weights, charts, equator, connect, sphere, out } => {
            cmd_blowup(&file, weights, charts, equator, connect, sphere, &out)
        }
        Command::Simulate { file, eps, delta, q0, t_end, tube, euler, sweep, out } => {
            cmd_simulate(&file, eps, delta, q0, t_end, tube, euler, sweep, &out)
        }
        Command::CircleLemma { k, sign, out } => cmd_circle_lemma(k, sign.into(), &out),
        Command::VerifyPaper => cmd_verify_paper(),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn read_system(path: &PathBuf) -> Result<SystemFile, String> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_system_file(&src).map_err(|e| e.to_string())
}

fn parse_box(spec: &str) -> Result<AnalysisBox, String> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err("--box needs xmin,xmax,ymin,ymax".into());
    }
    let mut v = [0.0f64; 4];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.parse().map_err(|_| format!("bad box coordinate `{p}`"))?;
    }
    AnalysisBox::new(v[0], v[1], v[2], v[3]).ok_or_else(|| "box must have positive area".into())
}

fn parse_weights(spec: &str) -> Result<Weights, String> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("--weights needs a,b,c".into());
    }
    let mut w = [0u32; 3];
    for (i, p) in parts.iter().enumerate() {
        w[i] = p.parse().map_err(|_| format!("bad weight `{p}`"))?;
    }
    Weights::new(w[0], w[1], w[2]).map_err(|e| e.to_string())
}

fn parse_point(spec: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err("--q0 needs x,y".into());
    }
    Ok([
        parts[0].parse().map_err(|_| format!("bad coordinate `{}`", parts[0]))?,
        parts[1].parse().map_err(|_| format!("bad coordinate `{}`", parts[1]))?,
    ])
}

fn system_echo(file: &SystemFile) -> SystemEcho {
    SystemEcho {
        x0: file.x0_src.clone(),
        x1: file.x1_src.clone(),
        weights: file.weights.map(|w| [w.a_x, w.a_y, w.a_eps]),
        bounding_box: [
            format_rat(&file.bounding_box.x_min),
            format_rat(&file.bounding_box.x_max),
            format_rat(&file.bounding_box.y_min),
            format_rat(&file.bounding_box.y_max),
        ],
        epsilon: file.epsilon,
        delta: file.delta,
    }
}

fn emit(out: &CommonOut, content: &str) -> Result<(), String> {
    match &out.out {
        Some(path) => fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_analyze(
    path: &PathBuf,
    box_override: Option<String>,
    out: &CommonOut,
) -> Result<i32, String> {
    let mut file = read_system(path)?;
    if let Some(spec) = box_override {
        file.bounding_box = parse_box(&spec)?;
    }
    let analysis = analyze_system(&file);
    let mut rep = Report::new(system_echo(&file));
    rep.warnings = analysis.warnings.clone();
    if let Some(cs) = &analysis.critical_set {
        rep.critical_set = Some(critical_set_summary(cs, &analysis.points));
        rep.stratifications = Some(StratificationSummary {
            whitney_strata: analysis.whitney_counts.clone(),
            relaxed_count: analysis.relaxed_counts.clone(),
        });
        rep.canard = Some(
            analysis
                .reports
                .iter()
                .map(|r| canard_summary(cs, r))
                .collect(),
        );
    }
    match out.format {
        Format::Json | Format::Csv => emit(out, &rep.to_json())?,
        Format::Svg => {
            let svg = svg::phase_portrait(
                analysis.critical_set.as_ref(),
                analysis.reports.first(),
                &[],
                &file.bounding_box,
            );
            emit(out, &svg)?;
        }
    }
    Ok(analysis.exit_code)
}

#[allow(clippy::too_many_arguments)]
fn cmd_blowup(
    path: &PathBuf,
    weights_override: Option<String>,
    charts: bool,
    equator: bool,
    connect: bool,
    sphere: bool,
    out: &CommonOut,
) -> Result<i32, String> {
    let file = read_system(path)?;
    let weights = match weights_override {
        Some(spec) => parse_weights(&spec)?,
        None => file.weights.ok_or_else(|| {
            "no weights: add `weights = a,b,c` to the file or pass --weights".to_string()
        })?,
    };
    let all = !(charts || equator || connect || sphere);

    let xhat = extend_field(&file.x0, &file.x1).map_err(|e| e.to_string())?;
    let mut rep = Report::new(system_echo(&file));
    let sf = match SphereField::new(&xhat, weights) {
        Ok(sf) => sf,
        Err(e) => {
            rep.warnings.push(format!("blow-up: {e}"));
            emit(out, &rep.to_json())?;
            return Ok(EXIT_ASSUMPTION);
        }
    };

    let analysis = analyze_system(&file);
    let mut summary = BlowupSummary {
        weights: [weights.a_x, weights.a_y, weights.a_eps],
        division_exponent: sf.division_exponent,
        charts: None,
        equator_equilibria: None,
        connections: None,
        symmetry: None,
    };
    rep.warnings = analysis.warnings.clone();

    if all || charts {
        let mut list = Vec::new();
        for id in ChartId::ALL {
            let c = chart_field(&xhat, &weights, id).map_err(|e| e.to_string())?;
            list.push(chart_summary(&c));
        }
        summary.charts = Some(list);
    }

    let branches = analysis
        .critical_set
        .as_ref()
        .map(|cs| cs.branches.clone())
        .unwrap_or_default();
    let eqs = equator_equilibria(&sf, &branches).map_err(|e| e.to_string())?;
    if all || equator {
        summary.equator_equilibria = Some(eqs.iter().map(equilibrium_summary).collect());
    }

    let mut orbit_store: Vec<Vec<(f64, f64)>> = Vec::new();
    if all || connect {
        // attempt a connection for each canard branch having two equator
        // directions: start from the end whose normal flow enters the
        // hemisphere
        let mut connections = Vec::new();
        for creport in &analysis.reports {
            for v in creport.per_branch.iter().filter(|v| v.is_canard) {
                let angles: Vec<&canard_core::blowup::SphereEquilibrium> = eqs
                    .iter()
                    .filter(|e| {
                        e.origin_label == canard_core::blowup::OriginLabel::Branch(v.branch)
                    })
                    .collect();
                if angles.len() != 2 {
                    rep.warnings.push(format!(
                        "branch#{}: expected two equator directions for the connection, found {}",
                        v.branch.0,
                        angles.len()
                    ));
                    continue;
                }
                let rising = |theta: f64| -> bool {
                    sf.angular(theta, std::f64::consts::FRAC_PI_2 - 1e-3)
                        .map(|(_, pd)| pd < 0.0)
                        .unwrap_or(false)
                };
                let (from, to) = if rising(angles[0].theta) {
                    (angles[0], angles[1])
                } else {
                    (angles[1], angles[0])
                };
                let trace = connection_trace(&sf, from, to);
                connections.push(connection_summary(
                    Some(v.branch.0),
                    from.theta,
                    to.theta,
                    &trace,
                ));
                orbit_store.push(trace.orbit);
            }
        }
        summary.connections = Some(connections);
    }

    if all || sphere {
        let sym =
            canard_core::blowup::symmetry_check_pitchfork(&sf).map_err(|e| e.to_string())?;
        summary.symmetry = Some(symmetry_summary(&sym));
    }

    rep.blowup = Some(summary);
    match out.format {
        Format::Json | Format::Csv => emit(out, &rep.to_json())?,
        Format::Svg => {
            let canard_ids: Vec<usize> = analysis
                .reports
                .iter()
                .flat_map(|r| r.canard_branches())
                .map(|b| b.0)
                .collect();
            let marks: Vec<(f64, String, bool)> = eqs
                .iter()
                .map(|e| {
                    let highlighted = match &e.origin_label {
                        canard_core::blowup::OriginLabel::Branch(b) => canard_ids.contains(&b.0),
                        _ => false,
                    };
                    (e.theta, e.origin_label.to_string(), highlighted)
                })
                .collect();
            let orbit_refs: Vec<&[(f64, f64)]> =
                orbit_store.iter().map(|o| o.as_slice()).collect();
            emit(out, &svg::hemisphere(&marks, &orbit_refs))?;
        }
    }
    Ok(analysis.exit_code)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &PathBuf,
    eps: Option<f64>,
    delta: Option<f64>,
    q0: Option<String>,
    t_end: f64,
    tube: Option<f64>,
    euler: bool,
    sweep: bool,
    out: &CommonOut,
) -> Result<i32, String> {
    let file = read_system(path)?;
    let epsilon = eps.or(file.epsilon).unwrap_or(1e-3);
    let delta_v = delta.or(file.delta).unwrap_or(1e-3);
    let cfg = IntegratorConfig::new(epsilon).map_err(|e| e.to_string())?;
    let tube_radius = tube.unwrap_or_else(|| default_tube_radius(epsilon));

    let analysis = analyze_system(&file);
    let mut rep = Report::new(system_echo(&file));
    rep.warnings = analysis.warnings.clone();

    let q0 = match q0 {
        Some(spec) => parse_point(&spec)?,
        None => default_start(&analysis)
            .ok_or_else(|| "no --q0 given and no canard branch to start from".to_string())?,
    };

    let mut exit_override: Option<i32> = None;
    let ps = analysis.points.first().map(|p| p.location.to_f64());
    let canard_branch = analysis
        .reports
        .first()
        .and_then(|r| r.canard_branches().first().copied());

    let mut summary = SimulationSummary {
        epsilon,
        delta: Some(delta_v),
        initial: q0,
        t_end,
        steps: 0,
        final_state: q0,
        events: Vec::new(),
        diagnostic: None,
        canard_metric: None,
        metric_ratio_aligned_rotated: None,
        euler_shadowing_ratio: None,
        euler_exact_prefix: None,
        euler_switched_to_float: None,
    };

    let mut csv = String::from("t,x,y,event\n");
    let mut plotted: Option<Trajectory> = None;
    if euler {
        let map = EulerMap::new(
            file.x0.clone(),
            file.x1.clone(),
            Rational::from_float(delta_v).ok_or("bad delta")?,
            Rational::from_float(epsilon).ok_or("bad epsilon")?,
        )
        .map_err(|e| e.to_string())?;
        let n = (t_end / delta_v).round().max(0.0) as usize;
        let q0r = [
            Rational::from_float(q0[0]).ok_or("bad q0")?,
            Rational::from_float(q0[1]).ok_or("bad q0")?,
        ];
        let orbit = map.iterate(q0r, n).map_err(|e| e.to_string())?;
        for (k, q) in orbit.points.iter().enumerate() {
            csv.push_str(&format!(
                "{:.12e},{:.17e},{:.17e},\n",
                k as f64 * delta_v,
                q[0],
                q[1]
            ));
        }
        summary.steps = n;
        summary.final_state = *orbit.points.last().unwrap();
        summary.euler_exact_prefix = Some(orbit.exact_prefix);
        summary.euler_switched_to_float = Some(orbit.switched_to_float);
    } else {
        let spec_store;
        let events = match &analysis.critical_set {
            Some(cs) => {
                spec_store = EventSpec { critical_set: cs, singular_point: ps, tube_radius };
                Some(&spec_store)
            }
            None => None,
        };
        let result = integrate_full(&file.x0, &file.x1, &cfg, q0, t_end, events)
            .map_err(|e| e.to_string())?;
        let traj = result.trajectory;
        summary.steps = traj.states.len().saturating_sub(1);
        summary.final_state = traj.last_state().unwrap_or(q0);
        summary.diagnostic = result.diagnostic.as_ref().map(|d| format!("{d:?}"));
        summary.events = traj
            .events
            .iter()
            .map(|e| format!("t={:.6}: {}", e.time, e.kind))
            .collect();
        if let (Some(cs), Some(branch), Some(ps)) = (&analysis.critical_set, canard_branch, ps) {
            summary.canard_metric = Some(canard_metric(&traj, cs, branch, ps, tube_radius));
        }
        csv.push_str(&trajectory_csv(&traj));
        if let Some(d) = result.diagnostic {
            rep.warnings.push(format!("integration: {d:?}"));
            // only non-finite states make the run itself fail
            if matches!(d, canard_core::dynamics::IntegrationDiagnostic::NonFiniteState) {
                exit_override = Some(EXIT_ASSUMPTION);
            }
        }
        plotted = Some(traj);
    }

    if sweep {
        if let (Some(cs), Some(branch), Some(ps)) = (&analysis.critical_set, canard_branch, ps) {
            let run_metric = |x1: &PolyVectorField| -> Result<f64, String> {
                let res = integrate_full(&file.x0, x1, &cfg, q0, t_end, None)
                    .map_err(|e| e.to_string())?;
                Ok(canard_metric(&res.trajectory, cs, branch, ps, tube_radius))
            };
            let aligned = run_metric(&file.x1)?;
            let rotated = run_metric(&analysis::rotated_perturbation(&file.x1, 0.1))?;
            summary.metric_ratio_aligned_rotated =
                Some(if rotated > 0.0 { aligned / rotated } else { f64::INFINITY });
            summary.canard_metric = Some(aligned);
        }
        let horizon = t_end.min(1.0);
        if horizon > 0.0 {
            let tight = IntegratorConfig {
                rel_tol: 1e-12,
                abs_tol: 1e-13,
                max_step: 1e-3,
                max_steps: 10_000_000,
                epsilon,
            };
            let reference = integrate_full(&file.x0, &file.x1, &tight, q0, horizon, None)
                .map_err(|e| e.to_string())?
                .trajectory;
            let dev =
                |d: f64| -> f64 { euler_deviation(&file, epsilon, q0, horizon, d, &reference) };
            let (d1, d2) = (dev(delta_v), dev(delta_v / 2.0));
            summary.euler_shadowing_ratio = Some(d1 / d2);
        }
    }

    rep.simulation = Some(summary);
    match out.format {
        Format::Csv => emit(out, &csv)?,
        Format::Json => emit(out, &rep.to_json())?,
        Format::Svg => {
            let trajs: Vec<&Trajectory> = plotted.iter().collect();
            let svg = svg::phase_portrait(
                analysis.critical_set.as_ref(),
                analysis.reports.first(),
                &trajs,
                &file.bounding_box,
            );
            emit(out, &svg)?;
        }
    }
    Ok(exit_override.unwrap_or(analysis.exit_code))
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    for (i, (t, q)) in traj.times.iter().zip(&traj.states).enumerate() {
        let event = traj
            .events
            .iter()
            .find(|e| {
                let next_t = traj.times.get(i + 1).copied().unwrap_or(f64::INFINITY);
                e.time >= *t && e.time < next_t
            })
            .map(|e| e.kind.to_string())
            .unwrap_or_default();
        out.push_str(&format!("{:.12e},{:.17e},{:.17e},{}\n", t, q[0], q[1], event));
    }
    out
}

fn euler_deviation(
    file: &SystemFile,
    epsilon: f64,
    q0: [f64; 2],
    horizon: f64,
    delta: f64,
    reference: &Trajectory,
) -> f64 {
    let map = EulerMap::new(
        file.x0.clone(),
        file.x1.clone(),
        Rational::from_float(delta).unwrap(),
        Rational::from_float(epsilon).unwrap(),
    )
    .unwrap();
    let steps = (horizon / delta).round() as usize;
    let mut q = q0;
    let mut ri = 0usize;
    let mut max_dev: f64 = 0.0;
    for k in 0..=steps {
        let t = k as f64 * delta;
        while ri + 1 < reference.times.len() && reference.times[ri + 1] <= t {
            ri += 1;
        }
        let refq = if ri + 1 < reference.times.len() {
            let (t0, t1) = (reference.times[ri], reference.times[ri + 1]);
            let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            [
                reference.states[ri][0]
                    + s * (reference.states[ri + 1][0] - reference.states[ri][0]),
                reference.states[ri][1]
                    + s * (reference.states[ri + 1][1] - reference.states[ri][1]),
            ]
        } else {
            *reference.states.last().unwrap()
        };
        max_dev = max_dev.max(numeric::hypot(q[0] - refq[0], q[1] - refq[1]));
        q = map.step_f64(q);
    }
    max_dev
}

/// Default simulate start: a point near the attracting side of the first
/// canard branch, slightly off the critical set.
fn default_start(analysis: &analysis::Analysis) -> Option<[f64; 2]> {
    let cs = analysis.critical_set.as_ref()?;
    let report = analysis.reports.first()?;
    let branch = report.canard_branches().first().copied()?;
    let p = analysis.points.first()?.location.to_f64();
    let br = cs.branch(branch);
    let g = [br.gradient[0].eval_f64(&p), br.gradient[1].eval_f64(&p)];
    let t = [-g[1], g[0]];
    let n = numeric::hypot(t[0], t[1]).max(1e-30);
    for side in [-1.0, 1.0] {
        let q = [p[0] + side * 0.5 * t[0] / n, p[1] + side * 0.5 * t[1] / n];
        if cs.transverse_eigenvalue_f64(q) < 0.0 {
            let gq = br.gradient_f64(q);
            let gn = numeric::hypot(gq[0], gq[1]).max(1e-30);
            return Some([q[0] + 1e-4 * gq[0] / gn, q[1] + 1e-4 * gq[1] / gn]);
        }
    }
    None
}

fn cmd_circle_lemma(k: u32, sign: ForcingSign, out: &CommonOut) -> Result<i32, String> {
    let (sys, eqs) = circle_lemma(k, sign).map_err(|e| e.to_string())?;
    let dev = sys.max_form_deviation(1000);
    let value = serde_json::json!({
        "schema": report::SCHEMA_VERSION,
        "k": k,
        "sign": match sign {
            ForcingSign::Plus => "+eps",
            ForcingSign::Minus => "-eps",
            ForcingSign::None => "0",
        },
        "closed_form_vs_pushforward_max_deviation": dev,
        "equilibria": eqs.iter().map(|e| serde_json::json!({
            "psi": e.psi,
            "derivative": e.derivative,
            "stability": match e.stability {
                canard_core::blowup::CircleStability::Stable => "stable",
                canard_core::blowup::CircleStability::Source => "source",
                canard_core::blowup::CircleStability::Nonhyperbolic => "nonhyperbolic",
            },
        })).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&value).expect("json");
    text.push('\n');
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify_paper() -> Result<i32, String> {
    let checks = verify::run_all();
    let mut all = true;
    for c in &checks {
        all &= c.passed;
        println!(
            "{} {:38} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "{}/{} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok(if all { EXIT_OK } else { EXIT_ASSUMPTION })
}
