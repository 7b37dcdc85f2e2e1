//! The TOML experiment file.
//!
//! ```toml
//! fixture = "fix-twin"          # optional starting point
//!
//! [geometry]
//! outer = { shape = "circle", radius = 4.0 }
//! hole1 = { shape = "ellipse", a = 0.8, b = 0.5, rotation = 0.4 }
//! hole2 = { shape = "circle", radius = 1.0 }
//! p1 = [-1.0, 0.0]
//! p2 = [1.0, 0.0]
//! delta1 = 0.5
//! delta2 = 0.9
//!
//! [data]
//! outer = { kind = "constant", value = 0.0 }
//! hole1 = { kind = "cosine", k = 2, amplitude = 0.5 }
//! hole2 = { kind = "expression", expr = "1 + 0.2 * math::sin(s)" }
//!
//! [experiment]
//! kind = "validate_representation"
//! eps = [[0.3, 0.5]]
//! nodes = 128
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use evalexpr::{build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Value};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fixtures, BoundaryData, Curve, Point, ProblemConfig, Shape};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub fixture: Option<String>,
    pub geometry: Option<GeometrySpec>,
    pub data: Option<DataSection>,
    pub experiment: Option<ExperimentSection>,
}

fn one() -> f64 {
    1.0
}

/// A reference curve with its placement `center + scale·R(rotation)·shape`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Star {
        r0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Fourier {
        x_cos: Vec<f64>,
        x_sin: Vec<f64>,
        y_cos: Vec<f64>,
        y_sin: Vec<f64>,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        let (shape, center, rotation, scale) = match self.clone() {
            CurveSpec::Circle { radius, center, rotation, scale } => {
                (Shape::Circle { radius }, center, rotation, scale)
            }
            CurveSpec::Ellipse { a, b, center, rotation, scale } => {
                (Shape::Ellipse { a, b }, center, rotation, scale)
            }
            CurveSpec::Star { r0, cos, sin, center, rotation, scale } => {
                (Shape::Star { r0, cos, sin }, center, rotation, scale)
            }
            CurveSpec::Fourier { x_cos, x_sin, y_cos, y_sin, center, rotation, scale } => {
                (Shape::Fourier { x_cos, x_sin, y_cos, y_sin }, center, rotation, scale)
            }
        };
        Curve::new(shape, Point::new(center[0], center[1]), rotation, scale)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub outer: Option<CurveSpec>,
    pub hole1: Option<CurveSpec>,
    pub hole2: Option<CurveSpec>,
    pub p1: Option<[f64; 2]>,
    pub p2: Option<[f64; 2]>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
}

/// Boundary datum as a function of the curve parameter `s`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Constant {
        value: f64,
    },
    Cosine {
        k: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Trig {
        #[serde(default)]
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// An expression in `s`, e.g. `"1 + 0.3 * math::cos(2 * s)"`.
    Expression {
        expr: String,
    },
}

impl DataSpec {
    pub fn build(&self, key: &str) -> Result<BoundaryData> {
        Ok(match self {
            DataSpec::Constant { value } => BoundaryData::Constant(*value),
            DataSpec::Cosine { k, amplitude } => BoundaryData::cosine(*k, *amplitude),
            DataSpec::Trig { a0, cos, sin } => BoundaryData::Trig {
                a0: *a0,
                cos: cos.clone(),
                sin: sin.clone(),
            },
            DataSpec::Expression { expr } => expression_data(key, expr)?,
        })
    }
}

fn expression_data(key: &str, expr: &str) -> Result<BoundaryData> {
    let bad = |msg: String| Error::Config(format!("data.{key}: expression {expr:?}: {msg}"));
    let node = build_operator_tree::<DefaultNumericTypes>(expr).map_err(|e| bad(e.to_string()))?;
    let eval = move |s: f64| -> std::result::Result<f64, String> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        ctx.set_value("s".into(), Value::Float(s)).map_err(|e| e.to_string())?;
        ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI)).map_err(|e| e.to_string())?;
        node.eval_number_with_context(&ctx).map_err(|e| e.to_string())
    };
    for probe in [0.0, 1.0, 2.5] {
        let v = eval(probe).map_err(&bad)?;
        if !v.is_finite() {
            return Err(bad(format!("non-finite value at s = {probe}")));
        }
    }
    Ok(BoundaryData::Function(Arc::new(move |s| eval(s).unwrap_or(f64::NAN))))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub outer: Option<DataSpec>,
    pub hole1: Option<DataSpec>,
    pub hole2: Option<DataSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    ValidateRepresentation,
    AsymptoticSweep,
    SymmetryCheck,
    ConvergenceStudy,
    BundleDump,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ValidateRepresentation => "validate_representation",
            ExperimentKind::AsymptoticSweep => "asymptotic_sweep",
            ExperimentKind::SymmetryCheck => "symmetry_check",
            ExperimentKind::ConvergenceStudy => "convergence_study",
            ExperimentKind::BundleDump => "bundle_dump",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaTable {
    pub t: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Option<ExperimentKind>,
    pub eps: Option<Vec<[f64; 2]>>,
    pub family: Option<String>,
    pub gamma_table: Option<GammaTable>,
    pub t_decades: Option<[u32; 2]>,
    pub gamma0: Option<f64>,
    pub nodes: Option<usize>,
    pub node_sweep: Option<Vec<usize>>,
    pub points: Option<Vec<[f64; 2]>>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The problem this file describes, starting from `fixture` (or the
    /// fixture named in the file, or FIX-TWIN) and overriding key by key.
    pub fn problem(&self, fixture: Option<&str>) -> Result<(String, ProblemConfig)> {
        let name = fixture
            .map(str::to_string)
            .or_else(|| self.fixture.clone())
            .unwrap_or_else(|| "fix-twin".to_string());
        let mut config = fixtures::by_name(&name).ok_or_else(|| {
            Error::Config(format!(
                "fixture: unknown name {name:?} (known: {})",
                fixtures::NAMES.join(", ")
            ))
        })?;
        if let Some(g) = &self.geometry {
            let curve = |key: &str, spec: &CurveSpec| {
                spec.build()
                    .map_err(|e| Error::Config(format!("geometry.{key}: {e}")))
            };
            if let Some(c) = &g.outer {
                config.outer = curve("outer", c)?;
            }
            if let Some(c) = &g.hole1 {
                config.hole1 = curve("hole1", c)?;
            }
            if let Some(c) = &g.hole2 {
                config.hole2 = curve("hole2", c)?;
            }
            if let Some(p) = g.p1 {
                config.p1 = Point::new(p[0], p[1]);
            }
            if let Some(p) = g.p2 {
                config.p2 = Point::new(p[0], p[1]);
            }
            if let Some(d) = g.delta1 {
                config.delta1 = d;
            }
            if let Some(d) = g.delta2 {
                config.delta2 = d;
            }
        }
        if let Some(d) = &self.data {
            if let Some(s) = &d.outer {
                config.f_outer = s.build("outer")?;
            }
            if let Some(s) = &d.hole1 {
                config.f_hole1 = s.build("hole1")?;
            }
            if let Some(s) = &d.hole2 {
                config.f_hole2 = s.build("hole2")?;
            }
        }
        Ok((name, config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file_round_trip() {
        let text = r#"
            fixture = "fix-twin"
            [geometry]
            hole1 = { shape = "ellipse", a = 0.8, b = 0.5, rotation = 0.4 }
            delta2 = 0.8
            [data]
            hole2 = { kind = "expression", expr = "1 + 0.5 * math::cos(s)" }
            [experiment]
            kind = "bundle_dump"
            eps = [[0.3, 0.5]]
        "#;
        let file = ConfigFile::parse(text, "test").unwrap();
        let (_, cfg) = file.problem(None).unwrap();
        assert_eq!(cfg.delta2, 0.8);
        assert!((cfg.f_hole2.eval(0.0) - 1.5).abs() < 1e-15);
        assert_eq!(file.experiment.unwrap().kind, Some(ExperimentKind::BundleDump));
    }

    #[test]
    fn malformed_curve_names_the_key() {
        let text = "[geometry]\nhole1 = { shape = \"circle\", radius = 1.0, wobble = 2 }\n";
        let err = ConfigFile::parse(text, "bad.toml").unwrap_err().to_string();
        assert!(err.contains("wobble"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn bad_expression_is_config_error() {
        let text = "[data]\nouter = { kind = \"expression\", expr = \"1 + * s\" }\n";
        let err = ConfigFile::parse(text, "x").unwrap().problem(None).unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("data.outer")));
    }
}
