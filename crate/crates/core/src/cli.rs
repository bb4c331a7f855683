//! Command-line front end.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dual::harmonics::RealHarmonic;
use crate::dual::{self, BodyKind, DualConfig, RadialBody, SectionDual, SphereQuadrature};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::polytope::{self, Polytope, PolytopeFile};
use crate::sections;
use crate::symmetry::{self, TestConfig, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Convex hull of a point set, written as a polytope file with facets.
    Hull,
    /// Faces of dimension --k (all dimensions when omitted).
    Faces,
    /// Crossing points, perimeter, volume and slope of one section.
    Section,
    /// Section profile along --xi (perimeter for polytopes, W̃ for other bodies).
    Profile,
    /// Maximal-central-section test with structural audits.
    Symmetry,
    /// Dual quermassintegral section test for smooth bodies.
    DualTest,
    /// Face reflection and vertex-ray audits.
    ReflecAudit,
    /// Both sides of the limit identity for a harmonic of odd degree --m.
    IdentityCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Report,
}

/// Test polytopes for origin symmetry via their sections.
#[derive(Clone, Debug, Parser)]
#[command(name = "polysym", version, about)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Body file (.body, JSON).
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub directions: usize,
    /// Relative pass threshold.
    #[arg(long = "tol", default_value_t = symmetry::PASS_TOL)]
    pub tolerance: f64,
    /// Direction as comma-separated coordinates; normalised internally.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Section height.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Index of the dual quermassintegral.
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    /// Face dimension for `faces`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Harmonic degree for `identity-check`.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Harmonic order (`−m..=m`, negative for sine terms) for `identity-check`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub order: i32,
    /// Profile samples per piece (polytopes) or in total (smooth bodies).
    #[arg(long, default_value_t = symmetry::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Use the section volume instead of the perimeter.
    #[arg(long)]
    pub volume: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// How a command ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Consistent,
    Witness,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Consistent => 0,
            Status::Witness => 2,
        }
    }
}

fn status_of(v: Verdict) -> Status {
    match v {
        Verdict::Pass => Status::Consistent,
        Verdict::Fail | Verdict::Inconclusive => Status::Witness,
    }
}

pub fn parse_direction(s: &str) -> Result<Vector> {
    let coords = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad coordinate {c:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Vector::new(coords)
        .normalized()
        .ok_or_else(|| Error::InvalidArgument("direction must be non-zero".into()))
}

pub fn load_polytope(text: &str) -> Result<Polytope> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    match v.get("kind").and_then(|k| k.as_str()) {
        None => serde_json::from_value::<PolytopeFile>(v)?.build(),
        Some("polytope") => match RadialBody::from_json(text)?.kind() {
            BodyKind::Polytope(p) => Ok(p.clone()),
            _ => unreachable!(),
        },
        Some(k) => Err(Error::InvalidArgument(format!(
            "command needs a polytope, got a body of kind {k:?}"
        ))),
    }
}

/// Polytope files used as generic bodies are not required to contain the
/// origin until a radial function is needed.
fn load_any(text: &str) -> Result<Either> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    match v.get("kind").and_then(|k| k.as_str()) {
        None | Some("polytope") => Ok(Either::Polytope(load_polytope(text)?)),
        Some(_) => Ok(Either::Body(RadialBody::from_json(text)?)),
    }
}

enum Either {
    Polytope(Polytope),
    Body(RadialBody),
}

fn direction(cfg: &RunConfig, n: usize) -> Result<Vector> {
    let s = cfg
        .xi
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--xi is required for this command".into()))?;
    let xi = parse_direction(s)?;
    if xi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: xi.dim(),
        });
    }
    Ok(xi)
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn envelope(cfg: &RunConfig, result: impl Serialize) -> String {
    pretty(&json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "directions": cfg.directions,
        "tol": cfg.tolerance,
        "result": result,
    }))
}

fn per_direction_csv(rows: &[symmetry::DirectionResult]) -> String {
    let mut out = String::from("index,direction,max_location,max_value,central_value,margin,relative_margin,status\n");
    for r in rows {
        let d: Vec<String> = r.direction.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            d.join(" "),
            r.max_location,
            r.max_value,
            r.central_value,
            r.margin,
            r.relative_margin,
            r.status
        ));
    }
    out
}

/// Runs one command, returning the text to emit and the outcome.
pub fn execute(cfg: &RunConfig) -> Result<(String, Status)> {
    if !(cfg.tolerance > 0.0) {
        return Err(Error::InvalidArgument("--tol must be positive".into()));
    }
    if cfg.directions == 0 {
        return Err(Error::InvalidArgument("--directions must be at least 1".into()));
    }
    let text = fs::read_to_string(&cfg.input)?;
    let format = cfg.format;
    match cfg.command {
        Command::Hull => {
            let p = load_polytope(&text)?;
            Ok((p.to_json() + "\n", Status::Consistent))
        }
        Command::Faces => {
            let p = load_polytope(&text)?;
            let dims: Vec<usize> = match cfg.k {
                Some(k) if k < p.dim() => vec![k],
                Some(k) => return Err(Error::InvalidArgument(format!("face dimension {k} out of range"))),
                None => (0..p.dim()).collect(),
            };
            let faces: Vec<_> = dims
                .iter()
                .map(|&k| json!({"dim": k, "count": p.faces(k).len(), "faces": p.faces(k)}))
                .collect();
            Ok((pretty(&faces), Status::Consistent))
        }
        Command::Section => {
            let p = load_polytope(&text)?;
            let xi = direction(cfg, p.dim())?;
            let slice = sections::crossing_points(&p, &xi, cfg.t)?;
            let perimeter = sections::section_perimeter(&p, &xi, cfg.t)?;
            let volume = sections::section_volume(&p, &xi, cfg.t)?;
            let derivative = sections::perimeter_derivative_at(&p, &xi, cfg.t)?;
            let out = json!({
                "direction": xi,
                "t": cfg.t,
                "perimeter": perimeter,
                "volume": volume,
                "perimeter_derivative": derivative,
                "crossings": slice.crossings,
                "active_facets": slice.active_facets,
                "apexes": slice.apexes,
            });
            Ok((pretty(&out), Status::Consistent))
        }
        Command::Profile => match load_any(&text)? {
            Either::Polytope(p) => {
                let xi = direction(cfg, p.dim())?;
                let prof = if cfg.volume {
                    sections::volume_profile(&p, &xi, cfg.samples)?
                } else {
                    sections::perimeter_profile(&p, &xi, cfg.samples)?
                };
                let out = match format.unwrap_or(Format::Csv) {
                    Format::Csv => prof.to_csv(),
                    Format::Report => pretty(&prof),
                };
                Ok((out, Status::Consistent))
            }
            Either::Body(b) => {
                let xi = direction(cfg, b.dim())?;
                let sd = SectionDual::new(&b, &xi, cfg.l)?;
                let (lo, hi) = sd.support();
                let s = cfg.samples.max(2);
                let shrink = 1.0 - 1e-6;
                let samples: Vec<(f64, f64)> = (0..s)
                    .map(|i| {
                        let t = shrink * (lo + (hi - lo) * i as f64 / (s - 1) as f64);
                        (t, sd.eval(t))
                    })
                    .collect();
                let out = match format.unwrap_or(Format::Csv) {
                    Format::Csv => {
                        let d: Vec<String> = xi.iter().map(|x| x.to_string()).collect();
                        let mut o = format!("# xi={}; l={}; support={} {}\nt,wtilde\n", d.join(" "), cfg.l, lo, hi);
                        for (t, v) in &samples {
                            o.push_str(&format!("{t},{v}\n"));
                        }
                        o
                    }
                    Format::Report => pretty(&json!({
                        "direction": xi,
                        "l": cfg.l,
                        "support": [lo, hi],
                        "central_value": sd.eval(0.0),
                        "samples": samples,
                    })),
                };
                Ok((out, Status::Consistent))
            }
        },
        Command::Symmetry => {
            let p = load_polytope(&text)?;
            let tc = TestConfig {
                directions: cfg.directions,
                seed: cfg.seed,
                tol: cfg.tolerance,
                samples_per_piece: cfg.samples,
            };
            let report = if cfg.volume {
                symmetry::volume_section_test_with(&p, &tc)?
            } else {
                symmetry::symmetry_verdict(&p, &tc)?
            };
            let status = status_of(report.verdict);
            let out = match format.unwrap_or(Format::Report) {
                Format::Csv => per_direction_csv(&report.per_direction),
                Format::Report => envelope(cfg, &report),
            };
            Ok((out, status))
        }
        Command::DualTest => {
            let body = RadialBody::from_json(&text)?;
            let dc = DualConfig {
                directions: cfg.directions,
                seed: cfg.seed,
                tol: cfg.tolerance,
                ..DualConfig::default()
            };
            let report = dual::dual_symmetry_test_with(&body, cfg.l, &dc)?;
            let status = status_of(report.verdict);
            let out = match format.unwrap_or(Format::Report) {
                Format::Csv => per_direction_csv(&report.per_direction),
                Format::Report => envelope(cfg, &report),
            };
            Ok((out, status))
        }
        Command::ReflecAudit => {
            let p = load_polytope(&text)?;
            let reflec = polytope::reflec_face_audit(&p)?;
            let rays = polytope::vertex_ray_pairs(&p)?;
            let status = if reflec.passed && rays.passed {
                Status::Consistent
            } else {
                Status::Witness
            };
            Ok((pretty(&json!({"reflec": reflec, "vertex_rays": rays})), status))
        }
        Command::IdentityCheck => {
            let body = RadialBody::from_json(&text)?;
            let quad = SphereQuadrature::default_for(body.dim())?;
            if cfg.m % 2 == 0 {
                return Err(Error::InvalidArgument(format!("degree {} must be odd", cfg.m)));
            }
            let h = RealHarmonic::new(cfg.m, cfg.order)?;
            let id = dual::verify_limit_identity_for(&body, cfg.l, h, &quad)?;
            // both sides vanish when the harmonic misses the odd part
            let scale = id.lhs.abs().max(id.rhs.abs()).max(1e-8 * body.scale());
            let rel = (id.lhs - id.rhs).abs() / scale;
            Ok((
                pretty(&json!({"identity": id, "relative_difference": rel})),
                Status::Consistent,
            ))
        }
    }
}

/// Runs a command, writes its output and returns the process exit code:
/// 0 consistent, 2 asymmetry witness, 1 error.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = execute(cfg).and_then(|(text, status)| {
        match &cfg.out {
            Some(path) => fs::write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(status)
    });
    match result {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_parse_and_normalise() {
        let v = parse_direction("0, 3 ,4").unwrap();
        assert!(v.distance(&Vector::from([0.0, 0.6, 0.8])) < 1e-15);
        assert!(parse_direction("0,0").is_err());
        assert!(parse_direction("1,x").is_err());
    }

    #[test]
    fn flags_parse() {
        let c = RunConfig::try_parse_from([
            "polysym", "profile", "cube.body", "--xi", "-1,0.5,2", "--t", "-0.25", "--format", "report",
        ])
        .unwrap();
        assert_eq!(c.command, Command::Profile);
        assert_eq!(c.xi.as_deref(), Some("-1,0.5,2"));
        assert_eq!(c.t, -0.25);
        assert_eq!(c.format, Some(Format::Report));
        assert_eq!(c.directions, 200);
    }

    #[test]
    fn smooth_body_is_not_a_polytope() {
        assert!(load_polytope(r#"{"kind": "ball"}"#).is_err());
        assert!(load_polytope(r#"{"kind": "polytope", "vertices": [[1,1,1],[1,1,-1],[1,-1,1],[1,-1,-1],[-1,1,1],[-1,1,-1],[-1,-1,1],[-1,-1,-1]]}"#).is_ok());
    }
}
