//! The line-oriented system-file format:
//!
//! ```text
//! # comment
//! X0 = <expr> ; <expr>
//! X1 = <expr> ; <expr>
//! weights = a,b,c          (optional)
//! box = xmin,xmax,ymin,ymax (optional, default [-1,1]^2)
//! epsilon = <float>         (optional)
//! delta = <float>           (optional)
//! ```

use std::fmt;

use canard_core::blowup::Weights;
use canard_core::poly::{parse_poly, Vars};
use canard_core::stratify::AnalysisBox;
use canard_core::PolyVectorField;

#[derive(Debug)]
pub struct SystemFile {
    pub x0_src: [String; 2],
    pub x1_src: [String; 2],
    pub x0: PolyVectorField,
    pub x1: PolyVectorField,
    pub weights: Option<Weights>,
    pub bounding_box: AnalysisBox,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug)]
pub struct SystemFileError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SystemFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "system file, line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for SystemFileError {}

fn err(line: usize, message: impl Into<String>) -> SystemFileError {
    SystemFileError { line, message: message.into() }
}

pub fn parse_system_file(src: &str) -> Result<SystemFile, SystemFileError> {
    let vars = Vars::xy();
    let mut x0: Option<([String; 2], PolyVectorField, usize)> = None;
    let mut x1: Option<([String; 2], PolyVectorField, usize)> = None;
    let mut weights = None;
    let mut bounding_box = None;
    let mut epsilon = None;
    let mut delta = None;

    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, format!("expected `key = value`, found `{line}`")));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "X0" | "X1" => {
                let Some((a, b)) = value.split_once(';') else {
                    return Err(err(lineno, format!("{key} needs two expressions separated by `;`")));
                };
                let (a, b) = (a.trim(), b.trim());
                let pa = parse_poly(a, &vars)
                    .map_err(|e| err(lineno, format!("{key} first component: {e}")))?;
                let pb = parse_poly(b, &vars)
                    .map_err(|e| err(lineno, format!("{key} second component: {e}")))?;
                let field = PolyVectorField::planar(pa, pb)
                    .map_err(|e| err(lineno, format!("{key}: {e}")))?;
                let entry = ([a.to_string(), b.to_string()], field, lineno);
                if key == "X0" {
                    x0 = Some(entry);
                } else {
                    x1 = Some(entry);
                }
            }
            "weights" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(err(lineno, "weights need three comma-separated positive integers"));
                }
                let mut w = [0u32; 3];
                for (i, p) in parts.iter().enumerate() {
                    w[i] = p
                        .parse()
                        .map_err(|_| err(lineno, format!("bad weight `{p}`")))?;
                }
                weights = Some(
                    Weights::new(w[0], w[1], w[2])
                        .map_err(|e| err(lineno, format!("{e}")))?,
                );
            }
            "box" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(err(lineno, "box needs xmin,xmax,ymin,ymax"));
                }
                let mut v = [0.0f64; 4];
                for (i, p) in parts.iter().enumerate() {
                    v[i] = p
                        .parse()
                        .map_err(|_| err(lineno, format!("bad box coordinate `{p}`")))?;
                }
                bounding_box = Some(
                    AnalysisBox::new(v[0], v[1], v[2], v[3])
                        .ok_or_else(|| err(lineno, "box must have positive area"))?,
                );
            }
            "epsilon" => {
                epsilon = Some(
                    value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad epsilon `{value}`")))?,
                );
            }
            "delta" => {
                delta = Some(
                    value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad delta `{value}`")))?,
                );
            }
            other => return Err(err(lineno, format!("unknown key `{other}`"))),
        }
    }

    let (x0_src, x0, _) = x0.ok_or_else(|| err(0, "missing X0"))?;
    let (x1_src, x1, _) = x1.ok_or_else(|| err(0, "missing X1"))?;
    Ok(SystemFile {
        x0_src,
        x1_src,
        x0,
        x1,
        weights,
        bounding_box: bounding_box.unwrap_or_default(),
        epsilon,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixture() {
        let sf = parse_system_file(include_str!("../fixtures/transcritical.system")).unwrap();
        assert_eq!(sf.weights.unwrap().a_eps, 4);
        assert_eq!(sf.epsilon, Some(1e-3));
        assert_eq!(sf.x1_src, ["1".to_string(), "1/2".to_string()]);
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_system_file("X0 = x ; y\nX1 = 1 +\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_system_file("X0 = x ; y\nbogus = 3\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown key"));
    }

    #[test]
    fn missing_components_rejected() {
        assert!(parse_system_file("X0 = x\nX1 = 1 ; 1").is_err());
        assert!(parse_system_file("X1 = 1 ; 1").is_err());
    }
}
