//! Reference curves, the perforated domain Ω(ε₁,ε₂) and its rescalings.
//!
//! Every boundary component is a smooth 2π-periodic parametrization obtained
//! from a [`Shape`] through a similarity `x ↦ center + scale·R(rotation)·x`.
//! A negative `scale` is a point reflection composed with a dilation; in the
//! plane this is a rotation by π, so it keeps the counterclockwise sense of
//! the parametrization and the derivative-based normal stays outward.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Number of polygon vertices used by the sampled geometric predicates.
pub const SAMPLE_RESOLUTION: usize = 256;

/// Analytic reference shapes, all parametrized counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Radial function `r(s) = r0 + Σ_k cos[k-1]·cos(ks) + sin[k-1]·sin(ks)`.
    Star {
        r0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// Coordinate-wise Fourier table. `*_cos[k]` multiplies `cos(ks)` for
    /// `k ≥ 0`; `*_sin[k]` multiplies `sin((k+1)s)`.
    Fourier {
        x_cos: Vec<f64>,
        x_sin: Vec<f64>,
        y_cos: Vec<f64>,
        y_sin: Vec<f64>,
    },
}

impl Shape {
    /// Position, first and second derivative at parameter `s`.
    fn jet(&self, s: f64) -> [Point; 3] {
        match self {
            Shape::Circle { radius } => {
                let (sn, cs) = s.sin_cos();
                [
                    Point::new(radius * cs, radius * sn),
                    Point::new(-radius * sn, radius * cs),
                    Point::new(-radius * cs, -radius * sn),
                ]
            }
            Shape::Ellipse { a, b } => {
                let (sn, cs) = s.sin_cos();
                [
                    Point::new(a * cs, b * sn),
                    Point::new(-a * sn, b * cs),
                    Point::new(-a * cs, -b * sn),
                ]
            }
            Shape::Star { r0, cos, sin } => {
                let (mut r, mut dr, mut ddr) = (*r0, 0.0, 0.0);
                for (j, c) in cos.iter().enumerate() {
                    let k = (j + 1) as f64;
                    let (sn, cs) = (k * s).sin_cos();
                    r += c * cs;
                    dr -= c * k * sn;
                    ddr -= c * k * k * cs;
                }
                for (j, c) in sin.iter().enumerate() {
                    let k = (j + 1) as f64;
                    let (sn, cs) = (k * s).sin_cos();
                    r += c * sn;
                    dr += c * k * cs;
                    ddr -= c * k * k * sn;
                }
                let (sn, cs) = s.sin_cos();
                let e = Point::new(cs, sn);
                let de = Point::new(-sn, cs);
                [r * e, dr * e + r * de, (ddr - r) * e + 2.0 * dr * de]
            }
            Shape::Fourier {
                x_cos,
                x_sin,
                y_cos,
                y_sin,
            } => {
                let coord = |cc: &[f64], ss: &[f64]| {
                    let (mut v, mut d, mut dd) = (0.0, 0.0, 0.0);
                    for (k, c) in cc.iter().enumerate() {
                        let k = k as f64;
                        let (sn, cs) = (k * s).sin_cos();
                        v += c * cs;
                        d -= c * k * sn;
                        dd -= c * k * k * cs;
                    }
                    for (j, c) in ss.iter().enumerate() {
                        let k = (j + 1) as f64;
                        let (sn, cs) = (k * s).sin_cos();
                        v += c * sn;
                        d += c * k * cs;
                        dd -= c * k * k * sn;
                    }
                    (v, d, dd)
                };
                let (x, dx, ddx) = coord(x_cos, x_sin);
                let (y, dy, ddy) = coord(y_cos, y_sin);
                [Point::new(x, y), Point::new(dx, dy), Point::new(ddx, ddy)]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::Circle { radius } => radius.is_finite() && *radius > 0.0,
            Shape::Ellipse { a, b } => a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0,
            Shape::Star { r0, cos, sin } => {
                let amp: f64 = cos.iter().chain(sin).map(|c| c.abs()).sum();
                r0.is_finite() && *r0 > amp
            }
            Shape::Fourier { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid shape parameters {self:?}")))
        }
    }
}

/// Which side of the curve the normal points to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Normal points away from the enclosed bounded region.
    Positive,
    /// Normal points into the enclosed bounded region (inner boundary of a
    /// perforated domain).
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// A closed, simple, smooth, 2π-periodic boundary curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    shape: Shape,
    center: Point,
    rotation: f64,
    scale: f64,
    orientation: Orientation,
}

fn rotation_matrix(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

impl Curve {
    /// Build a positively oriented curve, checking that the shape
    /// parametrization is counterclockwise, regular and simple.
    pub fn new(shape: Shape, center: Point, rotation: f64, scale: f64) -> Result<Self> {
        shape.validate()?;
        if !(scale.is_finite() && scale != 0.0 && center.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "invalid placement: center {center:?}, scale {scale}"
            )));
        }
        let curve = Curve {
            shape,
            center,
            rotation,
            scale,
            orientation: Orientation::Positive,
        };
        let min_speed = (0..SAMPLE_RESOLUTION)
            .map(|k| curve.speed(TAU * k as f64 / SAMPLE_RESOLUTION as f64))
            .fold(f64::INFINITY, f64::min);
        if !(min_speed > 1e-12 * curve.diameter_estimate()) {
            return Err(Error::InvalidInput("curve derivative vanishes".into()));
        }
        if curve.signed_area() <= 0.0 {
            return Err(Error::InvalidInput(
                "curve parametrization must be counterclockwise".into(),
            ));
        }
        if !curve.is_simple(SAMPLE_RESOLUTION) {
            return Err(Error::InvalidInput("curve self-intersects".into()));
        }
        Ok(curve)
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        Self::new(Shape::Circle { radius }, center, 0.0, 1.0)
    }

    pub fn ellipse(center: Point, a: f64, b: f64, rotation: f64) -> Result<Self> {
        Self::new(Shape::Ellipse { a, b }, center, rotation, 1.0)
    }

    pub fn star(center: Point, r0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Star { r0, cos, sin }, center, 0.0, 1.0)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Curve {
            orientation,
            ..self.clone()
        }
    }

    /// The image of the curve under `x ↦ offset + factor·x`.
    pub fn similarity(&self, offset: Point, factor: f64) -> Self {
        Curve {
            center: offset + factor * self.center,
            scale: self.scale * factor,
            ..self.clone()
        }
    }

    /// The image of the curve under a rotation about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        Curve {
            center: rotation_matrix(angle) * self.center,
            rotation: self.rotation + angle,
            ..self.clone()
        }
    }

    fn map(&self) -> Matrix2<f64> {
        self.scale * rotation_matrix(self.rotation)
    }

    fn jet(&self, s: f64) -> [Point; 3] {
        let [x, d, dd] = self.shape.jet(s);
        let m = self.map();
        [self.center + m * x, m * d, m * dd]
    }

    pub fn position(&self, s: f64) -> Point {
        self.jet(s)[0]
    }

    pub fn derivative(&self, s: f64) -> Point {
        self.jet(s)[1]
    }

    pub fn second_derivative(&self, s: f64) -> Point {
        self.jet(s)[2]
    }

    pub fn speed(&self, s: f64) -> f64 {
        self.derivative(s).norm()
    }

    /// Unit normal; away from the enclosed region for positive orientation.
    pub fn normal(&self, s: f64) -> Point {
        let d = self.derivative(s);
        self.orientation.sign() * Point::new(d.y, -d.x) / d.norm()
    }

    /// Curvature signed with respect to [`Curve::normal`]: positive on a
    /// convex arc whose normal points away from the enclosed region.
    pub fn curvature(&self, s: f64) -> f64 {
        let [_, d, dd] = self.jet(s);
        self.orientation.sign() * (d.x * dd.y - d.y * dd.x) / d.norm().powi(3)
    }

    /// Area enclosed by the parametrization (positive when counterclockwise).
    pub fn signed_area(&self) -> f64 {
        let m = 2 * SAMPLE_RESOLUTION;
        let h = TAU / m as f64;
        (0..m)
            .map(|k| {
                let [x, d, _] = self.jet(h * k as f64);
                0.5 * (x.x * d.y - x.y * d.x) * h
            })
            .sum()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    fn diameter_estimate(&self) -> f64 {
        let pts = self.sample(64);
        let c = pts.iter().sum::<Point>() / pts.len() as f64;
        2.0 * pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
    }

    /// `m` equispaced parameter samples of the curve.
    pub fn sample(&self, m: usize) -> Vec<Point> {
        (0..m)
            .map(|k| self.position(TAU * k as f64 / m as f64))
            .collect()
    }

    /// Pairwise segment test on the sampled polygon.
    pub fn is_simple(&self, m: usize) -> bool {
        let pts = self.sample(m);
        for i in 0..m {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_intersect(a, b, pts[j], pts[(j + 1) % m]) {
                    return false;
                }
            }
        }
        true
    }

    /// Winding number of the sampled polygon around `x`.
    pub fn winding_number(&self, x: Point, m: usize) -> i32 {
        winding_number(&self.sample(m), x)
    }

    /// Whether `x` lies in the bounded region enclosed by the curve.
    pub fn contains(&self, x: Point) -> bool {
        self.winding_number(x, 4 * SAMPLE_RESOLUTION) != 0
    }

    /// Whether the origin lies in the enclosed region.
    pub fn center_contained(&self) -> bool {
        self.contains(Point::zeros())
    }

    /// Minimum distance between the sampled curves.
    pub fn min_distance(&self, other: &Curve, m: usize) -> (f64, Point) {
        let a = self.sample(m);
        let b = other.sample(m);
        let mut best = (f64::INFINITY, a[0]);
        for p in &a {
            for q in &b {
                let d = (p - q).norm();
                if d < best.0 {
                    best = (d, *p);
                }
            }
        }
        best
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Winding number of a closed polygon around `x`.
pub fn winding_number(polygon: &[Point], x: Point) -> i32 {
    let m = polygon.len();
    let mut total = 0.0;
    for i in 0..m {
        let a = polygon[i] - x;
        let b = polygon[(i + 1) % m] - x;
        total += cross(a, b).atan2(a.dot(&b));
    }
    (total / TAU).round() as i32
}

/// Boundary datum as a function of the curve parameter.
#[derive(Clone)]
pub enum BoundaryData {
    Constant(f64),
    /// `a0 + Σ_k cos[k-1]·cos(ks) + sin[k-1]·sin(ks)`.
    Trig {
        a0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Constant(c) => write!(f, "Constant({c})"),
            BoundaryData::Trig { a0, cos, sin } => write!(f, "Trig({a0}, {cos:?}, {sin:?})"),
            BoundaryData::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl BoundaryData {
    pub fn cosine(k: usize, amplitude: f64) -> Self {
        let mut cos = vec![0.0; k.max(1)];
        if k == 0 {
            return BoundaryData::Constant(amplitude);
        }
        cos[k - 1] = amplitude;
        BoundaryData::Trig {
            a0: 0.0,
            cos,
            sin: vec![],
        }
    }

    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryData::Function(Arc::new(f))
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            BoundaryData::Constant(c) => *c,
            BoundaryData::Trig { a0, cos, sin } => {
                let mut v = *a0;
                for (j, c) in cos.iter().enumerate() {
                    v += c * ((j + 1) as f64 * s).cos();
                }
                for (j, c) in sin.iter().enumerate() {
                    v += c * ((j + 1) as f64 * s).sin();
                }
                v
            }
            BoundaryData::Function(f) => f(s),
        }
    }

    /// The datum multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            BoundaryData::Constant(c) => BoundaryData::Constant(factor * c),
            BoundaryData::Trig { a0, cos, sin } => BoundaryData::Trig {
                a0: factor * a0,
                cos: cos.iter().map(|c| factor * c).collect(),
                sin: sin.iter().map(|c| factor * c).collect(),
            },
            BoundaryData::Function(f) => {
                let f = f.clone();
                BoundaryData::function(move |s| factor * f(s))
            }
        }
    }
}

/// Reference geometry and boundary data of the two-hole problem.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub outer: Curve,
    pub hole1: Curve,
    pub hole2: Curve,
    pub p1: Point,
    pub p2: Point,
    pub delta1: f64,
    pub delta2: f64,
    pub f_outer: BoundaryData,
    pub f_hole1: BoundaryData,
    pub f_hole2: BoundaryData,
}

impl ProblemConfig {
    pub fn hole(&self, i: usize) -> &Curve {
        match i {
            1 => &self.hole1,
            2 => &self.hole2,
            _ => panic!("hole index must be 1 or 2, got {i}"),
        }
    }

    pub fn p(&self, i: usize) -> Point {
        match i {
            1 => self.p1,
            2 => self.p2,
            _ => panic!("hole index must be 1 or 2, got {i}"),
        }
    }

    pub fn f_hole(&self, i: usize) -> &BoundaryData {
        match i {
            1 => &self.f_hole1,
            2 => &self.f_hole2,
            _ => panic!("hole index must be 1 or 2, got {i}"),
        }
    }

    /// Same geometry with new boundary data.
    pub fn with_data(&self, f_outer: BoundaryData, f1: BoundaryData, f2: BoundaryData) -> Self {
        ProblemConfig {
            f_outer,
            f_hole1: f1,
            f_hole2: f2,
            ..self.clone()
        }
    }
}

/// Which of ε₁, ε₂ vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    Eps2Zero,
    Eps1Zero,
    BothZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPair {
    pub eps1: f64,
    pub eps2: f64,
}

impl EpsilonPair {
    pub fn new(eps1: f64, eps2: f64) -> Self {
        EpsilonPair { eps1, eps2 }
    }

    pub fn regime(&self) -> Regime {
        match (self.eps1 == 0.0, self.eps2 == 0.0) {
            (false, false) => Regime::Generic,
            (false, true) => Regime::Eps2Zero,
            (true, false) => Regime::Eps1Zero,
            (true, true) => Regime::BothZero,
        }
    }

    pub fn product(&self) -> f64 {
        self.eps1 * self.eps2
    }

    /// `|ε₁| < δ₁` and `|ε₂| < δ₂`.
    pub fn check(&self, config: &ProblemConfig) -> Result<()> {
        if !(self.eps1.is_finite() && self.eps2.is_finite()) {
            return Err(Error::NotAdmissible(format!("non-finite {self:?}")));
        }
        if self.eps1.abs() >= config.delta1 || self.eps2.abs() >= config.delta2 {
            return Err(Error::NotAdmissible(format!(
                "{self:?} outside |ε₁|<{}, |ε₂|<{}",
                config.delta1, config.delta2
            )));
        }
        Ok(())
    }
}

/// The hole Ω_i(ε₁,ε₂) = ε₁pⁱ + ε₁ε₂Ω_i, normal pointing away from the hole.
pub fn scaled_hole(config: &ProblemConfig, i: usize, eps: EpsilonPair) -> Result<Curve> {
    if !(i == 1 || i == 2) {
        return Err(Error::InvalidInput(format!("hole index {i}")));
    }
    if eps.regime() != Regime::Generic {
        return Err(Error::DegenerateHole(format!(
            "Ω_{i}({}, {}) is a point",
            eps.eps1, eps.eps2
        )));
    }
    eps.check(config)?;
    Ok(config
        .hole(i)
        .similarity(eps.eps1 * config.p(i), eps.product()))
}

/// The pair pⁱ + ε₂Ω_i making up Ω̃(ε₂).
pub fn tilde_domain(config: &ProblemConfig, eps2: f64) -> Result<(Curve, Curve)> {
    if eps2 == 0.0 || !eps2.is_finite() {
        return Err(Error::DegenerateHole(format!("Ω̃({eps2}) needs ε₂ ≠ 0")));
    }
    let c1 = config.hole1.similarity(config.p1, eps2);
    let c2 = config.hole2.similarity(config.p2, eps2);
    check_disjoint(&c1, &c2)?;
    Ok((c1, c2))
}

fn check_disjoint(c1: &Curve, c2: &Curve) -> Result<()> {
    let (d, at) = c1.min_distance(c2, SAMPLE_RESOLUTION);
    let scale = c1.diameter_estimate().max(c2.diameter_estimate());
    if d <= 1e-9 * scale || c1.contains(c2.position(0.0)) || c2.contains(c1.position(0.0)) {
        return Err(Error::SeparationViolated(format!(
            "curves meet near ({:.6}, {:.6}); minimum sampled distance {d:.3e}",
            at.x, at.y
        )));
    }
    Ok(())
}

/// Outcome of one admissibility predicate.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    pub detail: String,
    pub offending: Option<[f64; 2]>,
}

impl CheckResult {
    fn pass(detail: impl Into<String>) -> Self {
        CheckResult {
            passed: true,
            detail: detail.into(),
            offending: None,
        }
    }

    fn fail(detail: impl Into<String>, at: Point) -> Self {
        CheckResult {
            passed: false,
            detail: detail.into(),
            offending: Some([at.x, at.y]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub distinct_points: CheckResult,
    pub separation: CheckResult,
    pub containment: CheckResult,
    pub product_bound: CheckResult,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.distinct_points.passed
            && self.separation.passed
            && self.containment.passed
            && self.product_bound.passed
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let failed: Vec<String> = [
            ("p1 ≠ p2", &self.distinct_points),
            ("separation", &self.separation),
            ("containment", &self.containment),
            ("δ₁δ₂ < 1", &self.product_bound),
        ]
        .iter()
        .filter(|(_, c)| !c.passed)
        .map(|(name, c)| format!("{name}: {}", c.detail))
        .collect();
        Err(Error::NotAdmissible(failed.join("; ")))
    }
}

const ADMISSIBILITY_FRACTIONS: [f64; 4] = [1.0, 0.75, 0.5, 0.25];

/// Sampled separation, containment and δ₁δ₂ < 1 checks.
pub fn admissibility_check(config: &ProblemConfig) -> AdmissibilityReport {
    let distinct_points = if (config.p1 - config.p2).norm() > 0.0 {
        CheckResult::pass("p1 and p2 are distinct")
    } else {
        CheckResult::fail("p1 = p2", config.p1)
    };

    let mut separation = CheckResult::pass("holes disjoint for all sampled |ε₂| ≤ δ₂");
    'sep: for frac in ADMISSIBILITY_FRACTIONS {
        for sign in [1.0, -1.0] {
            let e2 = sign * frac * config.delta2;
            let c1 = config.hole1.similarity(config.p1, e2);
            let c2 = config.hole2.similarity(config.p2, e2);
            if let Err(err) = check_disjoint(&c1, &c2) {
                let (_, at) = c1.min_distance(&c2, SAMPLE_RESOLUTION);
                separation = CheckResult::fail(format!("ε₂ = {e2}: {err}"), at);
                break 'sep;
            }
        }
    }

    let outer_poly = config.outer.sample(4 * SAMPLE_RESOLUTION);
    let mut containment = CheckResult::pass("scaled holes inside Ω° for all sampled (ε₁, ε₂)");
    'cont: for f1 in ADMISSIBILITY_FRACTIONS {
        for s1 in [1.0, -1.0] {
            let e1 = s1 * f1 * config.delta1;
            for f2 in ADMISSIBILITY_FRACTIONS.iter().chain(&[0.0]) {
                for s2 in [1.0, -1.0] {
                    let e2 = s2 * f2 * config.delta2;
                    for i in [1, 2] {
                        let pts = if e2 == 0.0 {
                            vec![e1 * config.p(i)]
                        } else {
                            config
                                .hole(i)
                                .similarity(e1 * config.p(i), e1 * e2)
                                .sample(SAMPLE_RESOLUTION)
                        };
                        if let Some(bad) = pts.iter().find(|x| winding_number(&outer_poly, **x) == 0) {
                            containment = CheckResult::fail(
                                format!("hole {i} at (ε₁, ε₂) = ({e1}, {e2}) leaves Ω°"),
                                *bad,
                            );
                            break 'cont;
                        }
                    }
                }
            }
        }
    }

    let product = config.delta1 * config.delta2;
    let product_bound = if product < 1.0 {
        CheckResult::pass(format!("δ₁δ₂ = {product}"))
    } else {
        CheckResult::fail(format!("δ₁δ₂ = {product} ≥ 1"), Point::new(config.delta1, config.delta2))
    };

    AdmissibilityReport {
        distinct_points,
        separation,
        containment,
        product_bound,
    }
}

/// Canonical fixtures shared by tests, examples and the CLI. These concrete
/// domains are a choice of this crate; any admissible configuration works.
pub mod fixtures {
    use super::*;

    /// Unit disk with a concentric circular hole of radius `inner`:
    /// returns (outer, inner) as reference curves, both positively oriented.
    pub fn fix_disk(inner: f64) -> (Curve, Curve) {
        (
            Curve::circle(Point::zeros(), 1.0).expect("unit circle"),
            Curve::circle(Point::zeros(), inner).expect("inner circle"),
        )
    }

    /// Radius-4 outer disk, unit-disk holes at p = (∓1, 0), δ₁ = 0.5,
    /// δ₂ = 0.9, data f° = 0, f₁ = f₂ = 1.
    pub fn fix_twin() -> ProblemConfig {
        let unit = Curve::circle(Point::zeros(), 1.0).expect("unit circle");
        ProblemConfig {
            outer: Curve::circle(Point::zeros(), 4.0).expect("outer circle"),
            hole1: unit.clone(),
            hole2: unit,
            p1: Point::new(-1.0, 0.0),
            p2: Point::new(1.0, 0.0),
            delta1: 0.5,
            delta2: 0.9,
            f_outer: BoundaryData::Constant(0.0),
            f_hole1: BoundaryData::Constant(1.0),
            f_hole2: BoundaryData::Constant(1.0),
        }
    }

    /// FIX-TWIN geometry with smooth non-symmetric data on every component.
    pub fn fix_twin_smooth() -> ProblemConfig {
        fix_twin().with_data(
            BoundaryData::Trig {
                a0: 0.2,
                cos: vec![0.5, 0.0, 0.1],
                sin: vec![0.3, -0.2],
            },
            BoundaryData::Trig {
                a0: 1.0,
                cos: vec![0.4],
                sin: vec![0.0, 0.25],
            },
            BoundaryData::Trig {
                a0: -0.5,
                cos: vec![0.0, 0.3],
                sin: vec![0.6],
            },
        )
    }

    /// FIX-TWIN with an off-centre rotated ellipse Ω₁, Ω₂ = −Ω₁ and
    /// f₂(x) = f₁(−x). Since Ω₂ is parametrized as s ↦ −Ω₁(s), the datum
    /// f₂ has the same expression in s as f₁.
    pub fn fix_sym() -> ProblemConfig {
        let hole1 = Curve::ellipse(Point::new(0.1, 0.05), 0.8, 0.5, 0.4).expect("ellipse");
        let hole2 = hole1.similarity(Point::zeros(), -1.0);
        let f1 = BoundaryData::Trig {
            a0: 1.0,
            cos: vec![0.5],
            sin: vec![0.0, 0.3],
        };
        ProblemConfig {
            outer: Curve::circle(Point::zeros(), 4.0).expect("outer circle"),
            hole1,
            hole2,
            p1: Point::new(-1.0, 0.0),
            p2: Point::new(1.0, 0.0),
            delta1: 0.5,
            delta2: 0.9,
            f_outer: BoundaryData::Trig {
                a0: 0.3,
                cos: vec![0.2],
                sin: vec![],
            },
            f_hole1: f1.clone(),
            f_hole2: f1,
        }
    }

    /// Look a fixture up by its CLI name.
    pub fn by_name(name: &str) -> Option<ProblemConfig> {
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "fix-twin" | "twin" => Some(fix_twin()),
            "fix-twin-smooth" | "twin-smooth" => Some(fix_twin_smooth()),
            "fix-sym" | "sym" => Some(fix_sym()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 3] = ["fix-twin", "fix-twin-smooth", "fix-sym"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_normal_and_curvature() {
        let c = Curve::circle(Point::new(1.0, 2.0), 0.5).unwrap();
        for k in 0..8 {
            let s = k as f64 * 0.7;
            let n = c.normal(s);
            let radial = (c.position(s) - c.center()) / 0.5;
            assert!((n - radial).norm() < 1e-14);
            assert!((c.curvature(s) - 2.0).abs() < 1e-12);
        }
        let inner = c.with_orientation(Orientation::Negative);
        assert!((inner.normal(0.3) + c.normal(0.3)).norm() < 1e-15);
        assert!((inner.curvature(0.3) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_scale_keeps_outward_normal() {
        let e = Curve::ellipse(Point::new(0.1, 0.0), 1.0, 0.4, 0.3).unwrap();
        let m = e.similarity(Point::new(2.0, 0.0), -0.5);
        assert!(m.signed_area() > 0.0);
        for k in 0..16 {
            let s = TAU * k as f64 / 16.0;
            let probe = m.position(s) + 1e-3 * m.normal(s);
            assert!(!m.contains(probe));
            assert!(m.curvature(s) > 0.0);
        }
    }

    #[test]
    fn star_derivatives_match_finite_differences() {
        let c = Curve::star(Point::zeros(), 1.0, vec![0.1, 0.0, 0.2], vec![0.05]).unwrap();
        let h = 1e-5;
        for s in [0.0, 1.1, 2.9, 5.0] {
            let fd = (c.position(s + h) - c.position(s - h)) / (2.0 * h);
            assert!((fd - c.derivative(s)).norm() < 1e-8);
            let fd2 = (c.derivative(s + h) - c.derivative(s - h)) / (2.0 * h);
            assert!((fd2 - c.second_derivative(s)).norm() < 1e-7);
        }
    }

    #[test]
    fn clockwise_fourier_table_rejected() {
        let cw = Shape::Fourier {
            x_cos: vec![0.0, 1.0],
            x_sin: vec![],
            y_cos: vec![],
            y_sin: vec![-1.0],
        };
        assert!(Curve::new(cw, Point::zeros(), 0.0, 1.0).is_err());
    }

    #[test]
    fn looped_limacon_is_not_simple() {
        let limacon = Shape::Fourier {
            x_cos: vec![0.5, 0.5, 0.5],
            x_sin: vec![],
            y_cos: vec![],
            y_sin: vec![0.5, 0.5],
        };
        let err = Curve::new(limacon, Point::zeros(), 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("self-intersects"), "{err}");
    }

    #[test]
    fn scaled_circle_hole() {
        let cfg = fixtures::fix_twin();
        let c = scaled_hole(&cfg, 1, EpsilonPair::new(0.1, 0.5)).unwrap();
        assert!((c.position(0.0) - Point::new(-0.05, 0.0)).norm() < 1e-15);
        assert!((c.area() - std::f64::consts::PI * 0.05 * 0.05).abs() < 1e-14);
    }

    #[test]
    fn degenerate_hole_rejected() {
        let cfg = fixtures::fix_twin();
        assert!(matches!(
            scaled_hole(&cfg, 2, EpsilonPair::new(0.0, 0.5)),
            Err(Error::DegenerateHole(_))
        ));
        assert!(tilde_domain(&cfg, 0.0).is_err());
    }

    #[test]
    fn touching_tilde_domain_rejected() {
        let cfg = fixtures::fix_twin();
        assert!(matches!(
            tilde_domain(&cfg, 1.0),
            Err(Error::SeparationViolated(_))
        ));
        let (a, b) = tilde_domain(&cfg, 0.5).unwrap();
        assert!((a.min_distance(&b, 512).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixtures_admissible() {
        for name in fixtures::NAMES {
            let report = admissibility_check(&fixtures::by_name(name).unwrap());
            assert!(report.passed(), "{name}: {report:?}");
        }
    }

    #[test]
    fn admissibility_failures_reported() {
        let mut cfg = fixtures::fix_twin();
        cfg.delta2 = 1.1;
        let r = admissibility_check(&cfg);
        assert!(!r.separation.passed);
        assert!(r.separation.offending.is_some());

        let mut cfg = fixtures::fix_twin();
        cfg.delta1 = 4.5;
        cfg.delta2 = 0.2;
        let r = admissibility_check(&cfg);
        assert!(!r.containment.passed);

        let mut cfg = fixtures::fix_twin();
        cfg.delta1 = 1.2;
        assert!(!admissibility_check(&cfg).product_bound.passed);
    }
}
