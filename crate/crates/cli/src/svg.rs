//! Deterministic SVG emission: the phase-plane view (branches, fast-foliation
//! arrows, trajectories, highlighted canard branches) and the blown-up
//! hemisphere disk (equator equilibria and connection orbits). Coordinates
//! are formatted with fixed precision so output is byte-identical across
//! runs.

use std::fmt::Write as _;

use canard_core::canard::CanardReport;
use canard_core::dynamics::Trajectory;
use canard_core::poly::rat_to_f64;
use canard_core::stratify::{AnalysisBox, CriticalSet};

const W: f64 = 640.0;
const H: f64 = 640.0;
const MARGIN: f64 = 40.0;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

struct Mapper {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Mapper {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let sx = (W - 2.0 * MARGIN) / (self.x_max - self.x_min);
        let sy = (H - 2.0 * MARGIN) / (self.y_max - self.y_min);
        (
            MARGIN + (p[0] - self.x_min) * sx,
            H - MARGIN - (p[1] - self.y_min) * sy,
        )
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
        fmt(a.0),
        fmt(a.1),
        fmt(b.0),
        fmt(b.1)
    );
}

fn circle(out: &mut String, c: (f64, f64), r: f64, fill: &str) {
    let _ = writeln!(
        out,
        "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{fill}\"/>",
        fmt(c.0),
        fmt(c.1)
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], stroke: &str, width: f64) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { " L" }, fmt(*x), fmt(*y));
    }
    let _ = writeln!(
        out,
        "<path d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
    );
}

/// Phase-plane picture: axes, critical-set branches (canard branches
/// highlighted), fast-foliation arrows on a coarse grid, and trajectories.
pub fn phase_portrait(
    cs: Option<&CriticalSet>,
    canard: Option<&CanardReport>,
    trajectories: &[&Trajectory],
    bx: &AnalysisBox,
) -> String {
    let m = Mapper {
        x_min: rat_to_f64(&bx.x_min),
        x_max: rat_to_f64(&bx.x_max),
        y_min: rat_to_f64(&bx.y_min),
        y_max: rat_to_f64(&bx.y_max),
    };
    let mut out = String::new();
    header(&mut out);
    line(&mut out, m.map([m.x_min, 0.0]), m.map([m.x_max, 0.0]), "#bbbbbb", 1.0);
    line(&mut out, m.map([0.0, m.y_min]), m.map([0.0, m.y_max]), "#bbbbbb", 1.0);

    if let Some(cs) = cs {
        let canard_ids: Vec<usize> = canard
            .map(|r| r.canard_branches().iter().map(|b| b.0).collect())
            .unwrap_or_default();
        for br in &cs.branches {
            let highlighted = canard_ids.contains(&br.id.0);
            let (stroke, width) = if highlighted { ("#d62728", 2.5) } else { ("#1f77b4", 1.5) };
            // sample the zero set column by column, splitting on jumps
            let cols = 240;
            let rows = 240;
            let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
            let mut current: Vec<(f64, f64)> = Vec::new();
            for c in 0..=cols {
                let x = m.x_min + (m.x_max - m.x_min) * c as f64 / cols as f64;
                let mut prev: Option<(f64, f64)> = None;
                let mut found: Vec<f64> = Vec::new();
                for row in 0..=rows {
                    let y = m.y_min + (m.y_max - m.y_min) * row as f64 / rows as f64;
                    let v = br.defining_poly.eval_f64(&[x, y]);
                    if let Some((py, pv)) = prev {
                        if pv == 0.0 {
                            found.push(py);
                        } else if pv * v < 0.0 {
                            found.push(py + (y - py) * pv / (pv - v));
                        }
                    }
                    prev = Some((y, v));
                }
                match (found.first(), current.last().copied()) {
                    (Some(&fy), Some((_, ly))) => {
                        let best = found
                            .iter()
                            .cloned()
                            .min_by(|a, b| {
                                let da = (m.map([x, *a]).1 - ly).abs();
                                let db = (m.map([x, *b]).1 - ly).abs();
                                da.partial_cmp(&db).unwrap()
                            })
                            .unwrap_or(fy);
                        let p = m.map([x, best]);
                        if (p.1 - ly).abs() > 40.0 {
                            segments.push(std::mem::take(&mut current));
                        }
                        current.push(p);
                    }
                    (Some(&fy), None) => current.push(m.map([x, fy])),
                    (None, _) => {
                        if !current.is_empty() {
                            segments.push(std::mem::take(&mut current));
                        }
                    }
                }
            }
            if !current.is_empty() {
                segments.push(current);
            }
            for seg in &segments {
                polyline(&mut out, seg, stroke, width);
            }
        }
        // fast-foliation direction marks on a coarse grid
        let grid = 9;
        for gx in 1..grid {
            for gy in 1..grid {
                let p = [
                    m.x_min + (m.x_max - m.x_min) * gx as f64 / grid as f64,
                    m.y_min + (m.y_max - m.y_min) * gy as f64 / grid as f64,
                ];
                let g = [
                    cs.fast_cofactor[0].eval_f64(&p),
                    cs.fast_cofactor[1].eval_f64(&p),
                ];
                let n = (g[0] * g[0] + g[1] * g[1]).sqrt();
                if n < 1e-12 {
                    continue;
                }
                let scale = 0.025 * (m.x_max - m.x_min) / n;
                let a = m.map([p[0] - g[0] * scale, p[1] - g[1] * scale]);
                let b = m.map([p[0] + g[0] * scale, p[1] + g[1] * scale]);
                line(&mut out, a, b, "#999999", 0.8);
                circle(&mut out, b, 1.6, "#999999");
            }
        }
    }

    for traj in trajectories {
        let pts: Vec<(f64, f64)> = traj
            .states
            .iter()
            .filter(|q| bx.contains_f64(**q))
            .map(|q| m.map(*q))
            .collect();
        polyline(&mut out, &pts, "#2ca02c", 1.6);
    }
    out.push_str("</svg>\n");
    out
}

/// Blown-up hemisphere seen from above: the equator rim, marked equilibria,
/// and connection orbits (orthographic projection of the upper hemisphere).
pub fn hemisphere(
    equilibria: &[(f64, String, bool)], // (theta, label, highlighted)
    orbits: &[&[(f64, f64)]],
) -> String {
    let mut out = String::new();
    header(&mut out);
    let cx = W / 2.0;
    let cy = H / 2.0;
    let r = W / 2.0 - MARGIN;
    let _ = writeln!(
        out,
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#f4f7fb\" stroke=\"#333333\" stroke-width=\"1.5\"/>",
        fmt(cx),
        fmt(cy),
        fmt(r)
    );
    let to_disk = |theta: f64, phi: f64| -> (f64, f64) {
        let rho = r * phi.sin();
        (cx + rho * theta.cos(), cy - rho * theta.sin())
    };
    for orbit in orbits {
        let pts: Vec<(f64, f64)> = orbit.iter().map(|(t, p)| to_disk(*t, *p)).collect();
        polyline(&mut out, &pts, "#d62728", 1.8);
    }
    for (theta, label, highlighted) in equilibria {
        let c = to_disk(*theta, std::f64::consts::FRAC_PI_2);
        let fill = if *highlighted { "#d62728" } else { "#1f77b4" };
        circle(&mut out, c, 5.0, fill);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\">{}</text>",
            fmt(c.0 + 7.0),
            fmt(c.1 - 5.0),
            xml_escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Minimal well-formedness check used by tests: tags balance and nothing
/// dangles after the root closes.
#[cfg(test)]
pub fn looks_well_formed(svg: &str) -> bool {
    let mut depth: i64 = 0;
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        let Some(end_rel) = rest[start..].find('>') else { return false };
        let tag = &rest[start + 1..start + end_rel];
        if tag.starts_with('/') {
            depth -= 1;
            if depth < 0 {
                return false;
            }
        } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
            depth += 1;
        }
        rest = &rest[start + end_rel + 1..];
    }
    depth == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_portrait_is_valid_svg() {
        let svg = phase_portrait(None, None, &[], &AnalysisBox::default());
        assert!(svg.starts_with("<svg"));
        assert!(looks_well_formed(&svg));
        assert_eq!(svg, phase_portrait(None, None, &[], &AnalysisBox::default()));
    }

    #[test]
    fn hemisphere_marks_points() {
        let eq = vec![(0.5, "branch#0".to_string(), true), (2.0, "fast".to_string(), false)];
        let svg = hemisphere(&eq, &[]);
        assert!(looks_well_formed(&svg));
        assert_eq!(svg.matches("<circle").count(), 3); // rim + 2 points
    }

    #[test]
    fn escape_handles_angle_brackets() {
        assert_eq!(xml_escape("a->b"), "a-&gt;b");
    }
}
