//! Representation ingredients U, V, F, R, Λ and the exact macroscopic and
//! microscopic formulas for the perforated solution.
//!
//! Logarithms of ε are never folded into the analytic parts. [`MicroV`]
//! carries the coefficients of `log|ε₁ε₂|` and `log|ε₁|` separately, and
//! they are combined only in [`StructureBundle::represent_micro`].

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::densities::{
    physical_data, sampled_data, solve_l, solve_m_pair, tilde_rho, NodeCounts, ReferenceGeometry,
    RhoTriple, ThetaTriple, TildeRho,
};
use crate::dirichlet::{
    h_exterior_constants, ExteriorPairSolution, ExteriorPairSolver, ExteriorSingleSolver,
    HConstants, HarmonicField, InteriorSolver,
};
use crate::error::{Error, Result};
use crate::geometry::{EpsilonPair, Point, ProblemConfig, Regime};
use crate::linalg::condition_number;
use crate::potentials::{
    double_layer_raw, grad_s, op_S, s_kernel, single_layer_raw, BoundarySystem, Discretization,
};

/// Solutions at the degenerate parameters that do not depend on ε:
/// u°, the exterior problems u_h, and the interior H-functions of Ω°.
pub struct LimitProblems {
    pub outer_solver: InteriorSolver,
    pub u_o: HarmonicField,
    pub hole_solvers: [ExteriorSingleSolver; 2],
    pub u_h: [HarmonicField; 2],
    pub u_h_limit: [f64; 2],
}

impl LimitProblems {
    pub fn new(config: &ProblemConfig, geom: &ReferenceGeometry) -> Result<Self> {
        let outer = BoundarySystem::new(vec![geom.outer.clone()])?;
        let outer_solver = InteriorSolver::new(&outer)?;
        let u_o = outer_solver.solve_values(&geom.outer.sample(&config.f_outer))?;
        let s1 = ExteriorSingleSolver::new(geom.hole(1))?;
        let s2 = ExteriorSingleSolver::new(geom.hole(2))?;
        let u1 = s1.solve_values(&geom.hole(1).sample(&config.f_hole1))?;
        let u2 = s2.solve_values(&geom.hole(2).sample(&config.f_hole2))?;
        let lim = |u: &HarmonicField| {
            u.limit_at_infinity()
                .ok_or_else(|| Error::Inconsistent("exterior field unbounded".into()))
        };
        let u_h_limit = [lim(&u1)?, lim(&u2)?];
        Ok(LimitProblems {
            outer_solver,
            u_o,
            hole_solvers: [s1, s2],
            u_h: [u1, u2],
            u_h_limit,
        })
    }

    pub fn u_o(&self, x: Point) -> Result<f64> {
        self.u_o.eval(x)
    }

    /// `H^{Ω°}_x(y)`.
    pub fn h_interior(&self, x: Point, y: Point) -> Result<f64> {
        self.outer_solver.h_function(x)?.eval(y)
    }

    /// `G(x, y) = S(x − y) − H^{Ω°}_x(y)`.
    pub fn green(&self, x: Point, y: Point) -> Result<f64> {
        self.outer_solver.green(x, y)
    }

    /// `lim_{|η|→∞} H^x_{Ω_h}(η)`.
    pub fn h_hole_limit(&self, h: usize, x: Point) -> Result<f64> {
        self.hole_solvers[h - 1]
            .h_function(x)?
            .limit_at_infinity()
            .ok_or_else(|| Error::Inconsistent("exterior H unbounded".into()))
    }
}

/// Exterior problems on Ω̃(ε₂): ũ, w̃, ρ̃ and the constants `H^{j,i}`.
pub struct TildeProblems {
    pub eps2: f64,
    pub solver: ExteriorPairSolver,
    pub rho: TildeRho,
    pub h: HConstants,
    pub u_tilde: ExteriorPairSolution,
    pub w_tilde: ExteriorPairSolution,
}

impl TildeProblems {
    pub fn new(config: &ProblemConfig, geom: &ReferenceGeometry, eps2: f64) -> Result<Self> {
        let rho = tilde_rho(config, eps2, geom.nodes.hole)?;
        let solver = ExteriorPairSolver::new(&rho.pair, rho.p)?;
        let h = h_exterior_constants(&rho.pair, rho.p, &rho.rho)?;
        let data = sampled_data(geom, config);
        let f_tilde: Vec<f64> = data[1].iter().chain(&data[2]).copied().collect();
        let u_tilde = solver.solve_values(&f_tilde)?;
        let mut w_data = Vec::with_capacity(f_tilde.len());
        for i in 1..=2 {
            let j = 3 - i;
            let c = (h.get(i, j) - h.get(i, i)) * u_tilde.flux[j - 1];
            w_data.extend(std::iter::repeat_n(c, geom.hole(i).n()));
        }
        let w_tilde = solver.solve_values(&w_data)?;
        Ok(TildeProblems {
            eps2,
            solver,
            rho,
            h,
            u_tilde,
            w_tilde,
        })
    }

    /// `ũ(y)`.
    pub fn u_tilde(&self, y: Point) -> Result<f64> {
        self.u_tilde.field.eval(y)
    }

    /// `w̃(y)`.
    pub fn w_tilde(&self, y: Point) -> Result<f64> {
        self.w_tilde.field.eval(y)
    }

    /// `∮_{∂Ω_i(1,ε₂)} ν·∇ũ dσ`.
    pub fn flux(&self, i: usize) -> f64 {
        self.u_tilde.flux[i - 1]
    }
}

/// Λ with both the explicit and the direct inverse and determinant.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaMatrix {
    pub lambda: Matrix2<f64>,
    /// The scalar 𝓡 that factors the determinant.
    pub curly_r: f64,
    pub det_direct: f64,
    pub det_formula: f64,
    pub inverse_explicit: Matrix2<f64>,
    pub inverse_direct: Matrix2<f64>,
    pub condition: f64,
}

/// Adjugate `A^{*t}` of a 2×2 matrix.
pub fn adjugate(a: &Matrix2<f64>) -> Matrix2<f64> {
    Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)])
}

/// `log|ε₁| / log|ε₁ε₂|`.
pub fn log_quotient(eps: EpsilonPair) -> f64 {
    eps.eps1.abs().ln() / eps.product().abs().ln()
}

/// The scalar 𝓡 built from R and the logarithms of ε.
pub fn curly_r(r: &Matrix2<f64>, eps: EpsilonPair) -> f64 {
    let l2 = eps.eps2.abs().ln();
    let q = log_quotient(eps);
    let a = eps.product().abs().ln();
    l2 + q * l2 - TAU * (r[(0, 1)] + r[(1, 0)]) * q
        + TAU * (r[(0, 0)] + r[(1, 1)])
        + 4.0 * PI * PI * r.determinant() / a
}

pub fn compute_lambda(r: &Matrix2<f64>, eps: EpsilonPair) -> Result<LambdaMatrix> {
    if eps.regime() != Regime::Generic {
        return Err(Error::Regime("Λ needs ε₁ ≠ 0 and ε₂ ≠ 0".into()));
    }
    let a = eps.product().abs().ln();
    if !(a < 0.0) {
        return Err(Error::NotAdmissible(format!(
            "|ε₁ε₂| = {} must be below 1",
            eps.product().abs()
        )));
    }
    let l1 = eps.eps1.abs().ln() / TAU;
    let l12 = a / TAU;
    let lambda = r + Matrix2::new(l12, l1, l1, l12);
    let det_direct = lambda.determinant();
    let scale = lambda.abs().max().powi(2);
    if !(det_direct.abs() > 1e-14 * scale) {
        return Err(Error::Singular("Λ numerically singular".into()));
    }
    let cr = curly_r(r, eps);
    if cr == 0.0 || !cr.is_finite() {
        return Err(Error::Singular(format!("𝓡 = {cr}")));
    }
    let det_formula = cr * a / (4.0 * PI * PI);
    let q = log_quotient(eps);
    let inverse_explicit =
        (Matrix2::new(1.0, -q, -q, 1.0) + adjugate(r) * (TAU / a)) * (TAU / cr);
    let inverse_direct = lambda
        .try_inverse()
        .ok_or_else(|| Error::Singular("Λ numerically singular".into()))?;
    let condition = condition_number(&nalgebra::DMatrix::from_column_slice(2, 2, lambda.as_slice()));
    Ok(LambdaMatrix {
        lambda,
        curly_r: cr,
        det_direct,
        det_formula,
        inverse_explicit,
        inverse_direct,
        condition,
    })
}

/// F_j = ∮ f°ρ°_j + Σ_h ∮ f_h ρ_{j,h}.
pub fn compute_f(config: &ProblemConfig, geom: &ReferenceGeometry, rho: &[RhoTriple; 2]) -> Vector2<f64> {
    let f = crate::densities::f_moments(&sampled_data(geom, config), rho);
    Vector2::new(f[0], f[1])
}

/// `V^m_{h,j}` without its log terms at the nodes of ∂Ω_h: the outer
/// single layer at the micro points, the on-curve single layer of
/// ρ_{j,h}, and the cross-hole term.
fn v_micro_on_boundary(geom: &ReferenceGeometry, rho: &RhoTriple, h: usize) -> Vec<f64> {
    let eps = rho.eps;
    let hole = geom.hole(h);
    let k = 3 - h;
    let sys = BoundarySystem::new(vec![hole.clone()]).expect("single curve");
    let self_part = op_S(&sys) * DVector::from_column_slice(&rho.hole(h).values);
    let z = geom.micro_points(h, eps);
    let shift = geom.p(h) - geom.p(k);
    let other = geom.hole(k);
    let ow = other.arc_weights();
    hole.points()
        .iter()
        .zip(&z)
        .zip(self_part.iter())
        .map(|((xi, zi), s)| {
            let cross: f64 = other
                .points()
                .iter()
                .zip(&ow)
                .zip(&rho.hole(k).values)
                .map(|((eta, w), r)| s_kernel(shift + eps.eps2 * (xi - eta)) * w * r)
                .sum();
            single_layer_raw(&geom.outer, &rho.rho_o.values, *zi) + s + cross
        })
        .collect()
}

/// `R_{i,j}` = mean over ∂Ω_j of `V^m_{j,i}`.
pub fn compute_r(geom: &ReferenceGeometry, rho: &[RhoTriple; 2]) -> Matrix2<f64> {
    let mut r = Matrix2::zeros();
    for i in 1..=2 {
        for j in 1..=2 {
            let vals = v_micro_on_boundary(geom, &rho[i - 1], j);
            let hole = geom.hole(j);
            r[(i - 1, j - 1)] = hole.integrate(&vals) / hole.length();
        }
    }
    r
}

/// `V^m_h(ξ)` with the log terms kept apart:
/// `V_j(ε₁pʰ + ε₁ε₂ξ) = analytic[j] + log_eps1eps2[j]·log|ε₁ε₂|/2π + log_eps1[j]·log|ε₁|/2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MicroV {
    pub analytic: [f64; 2],
    pub log_eps1eps2: [f64; 2],
    pub log_eps1: [f64; 2],
}

impl MicroV {
    /// Sum of the analytic part and the log terms at `eps`.
    pub fn combined(&self, eps: EpsilonPair) -> [f64; 2] {
        let a = eps.product().abs().ln() / TAU;
        let b = eps.eps1.abs().ln() / TAU;
        [0, 1].map(|j| self.analytic[j] + self.log_eps1eps2[j] * a + self.log_eps1[j] * b)
    }
}

/// Which restriction of the solution a point set samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// Physical points in Ω_M, away from the origin.
    Macro,
    /// Rescaled points ξ around reference hole `h`.
    Micro(usize),
}

/// A sample set in Ω_M or Ω_m.
#[derive(Clone, Debug, Serialize)]
pub struct EvaluationRegion {
    pub kind: RegionKind,
    pub inner: f64,
    pub outer: f64,
    pub points: Vec<Point>,
}

impl EvaluationRegion {
    /// `count` points spread over the annulus `inner ≤ |x| ≤ outer`.
    pub fn annulus(kind: RegionKind, inner: f64, outer: f64, count: usize) -> Self {
        let golden = PI * (3.0 - 5f64.sqrt());
        let points = (0..count)
            .map(|k| {
                let frac = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.5 };
                let rad = inner + (outer - inner) * frac;
                let ang = 0.3 + golden * k as f64;
                Point::new(rad * ang.cos(), rad * ang.sin())
            })
            .collect();
        EvaluationRegion {
            kind,
            inner,
            outer,
            points,
        }
    }

    /// Ω_M = {1.5 ≤ |x| ≤ 3.5}, ten points.
    pub fn default_macro() -> Self {
        Self::annulus(RegionKind::Macro, 1.5, 3.5, 10)
    }

    /// Ω_m = {1.5 ≤ |ξ| ≤ 3} around hole `h`, ten points.
    pub fn default_micro(h: usize) -> Self {
        Self::annulus(RegionKind::Micro(h), 1.5, 3.0, 10)
    }

    /// Keep the points the bundle can evaluate; return the rest separately.
    pub fn admissible(&self, bundle: &StructureBundle) -> (Vec<Point>, Vec<Point>) {
        self.points.iter().partition(|&&x| match self.kind {
            RegionKind::Macro => bundle.check_macro(x).is_ok(),
            RegionKind::Micro(h) => bundle.check_micro(h, x).is_ok(),
        })
    }
}

/// Serializable summary of a bundle.
#[derive(Clone, Debug, Serialize)]
pub struct BundleSummary {
    pub eps1: f64,
    pub eps2: f64,
    pub nodes: NodeCounts,
    pub f: [f64; 2],
    pub r: [[f64; 2]; 2],
    pub lambda: Option<[[f64; 2]; 2]>,
    pub curly_r: Option<f64>,
    pub det_direct: Option<f64>,
    pub det_formula: Option<f64>,
    pub lambda_condition: Option<f64>,
    pub rho_residual: f64,
    pub theta_residual: f64,
}

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// Everything needed to evaluate the representation at one (ε₁, ε₂).
pub struct StructureBundle {
    pub config: ProblemConfig,
    pub geom: ReferenceGeometry,
    pub limits: Arc<LimitProblems>,
    pub eps: EpsilonPair,
    pub rho: [RhoTriple; 2],
    pub theta: ThetaTriple,
    pub f: Vector2<f64>,
    pub r: Matrix2<f64>,
    /// Present in the generic regime only.
    pub lambda: Option<LambdaMatrix>,
}

impl StructureBundle {
    /// Builds the geometry and the degenerate solutions from scratch.
    pub fn new(config: &ProblemConfig, nodes: NodeCounts, eps: EpsilonPair) -> Result<Self> {
        let geom = ReferenceGeometry::new(config, nodes)?;
        let limits = Arc::new(LimitProblems::new(config, &geom)?);
        Self::with_parts(config, geom, limits, eps)
    }

    /// Reuses a discretization and its degenerate solutions.
    pub fn with_parts(
        config: &ProblemConfig,
        geom: ReferenceGeometry,
        limits: Arc<LimitProblems>,
        eps: EpsilonPair,
    ) -> Result<Self> {
        eps.check(config)?;
        let rho = solve_m_pair(config, &geom, eps)?;
        let theta = solve_l(config, &geom, &rho)?;
        let f = compute_f(config, &geom, &rho);
        let r = compute_r(&geom, &rho);
        let lambda = match eps.regime() {
            Regime::Generic => Some(compute_lambda(&r, eps)?),
            _ => None,
        };
        Ok(StructureBundle {
            config: config.clone(),
            geom,
            limits,
            eps,
            rho,
            theta,
            f,
            r,
            lambda,
        })
    }

    fn lambda(&self) -> Result<&LambdaMatrix> {
        self.lambda
            .as_ref()
            .ok_or_else(|| Error::Regime(format!("representation needs the generic regime, got {:?}", self.eps)))
    }

    pub fn summary(&self) -> BundleSummary {
        BundleSummary {
            eps1: self.eps.eps1,
            eps2: self.eps.eps2,
            nodes: self.geom.nodes,
            f: [self.f[0], self.f[1]],
            r: rows(&self.r),
            lambda: self.lambda.as_ref().map(|l| rows(&l.lambda)),
            curly_r: self.lambda.as_ref().map(|l| l.curly_r),
            det_direct: self.lambda.as_ref().map(|l| l.det_direct),
            det_formula: self.lambda.as_ref().map(|l| l.det_formula),
            lambda_condition: self.lambda.as_ref().map(|l| l.condition),
            rho_residual: self.rho[0].residual.max(self.rho[1].residual),
            theta_residual: self.theta.residual,
        }
    }

    /// `(x − ε₁pᵏ)/(ε₁ε₂)`, the reference coordinate of `x` seen from hole `k`.
    fn to_reference(&self, k: usize, x: Point) -> Option<Point> {
        let s = self.eps.product();
        (s != 0.0).then(|| (x - self.eps.eps1 * self.geom.p(k)) / s)
    }

    fn check_outside_ref(disc: &Discretization, xi: Point, x: Point) -> Result<()> {
        if disc.curve().contains(xi) {
            return Err(Error::OutsideDomain([x.x, x.y]));
        }
        disc.check_margin(xi).map_err(|e| match e {
            Error::NearSingular { distance, margin, .. } => Error::NearSingular {
                x: [x.x, x.y],
                distance,
                margin,
            },
            other => other,
        })
    }

    /// Margin and domain test for a physical point of Ω_M.
    pub fn check_macro(&self, x: Point) -> Result<()> {
        if !self.geom.outer.curve().contains(x) {
            return Err(Error::OutsideDomain([x.x, x.y]));
        }
        self.geom.outer.check_margin(x)?;
        for k in [1, 2] {
            match self.to_reference(k, x) {
                Some(xi) => Self::check_outside_ref(self.geom.hole(k), xi, x)?,
                None => {
                    if (x - self.eps.eps1 * self.geom.p(k)).norm() == 0.0 {
                        return Err(Error::OutsideDomain([x.x, x.y]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Margin and domain test for a rescaled point ξ near hole `h`.
    pub fn check_micro(&self, h: usize, xi: Point) -> Result<()> {
        Self::check_outside_ref(self.geom.hole(h), xi, xi)?;
        let k = 3 - h;
        let e2 = self.eps.eps2;
        if e2 != 0.0 {
            let eta = xi + (self.geom.p(h) - self.geom.p(k)) / e2;
            Self::check_outside_ref(self.geom.hole(k), eta, xi)?;
        }
        let x = self.eps.eps1 * self.geom.p(h) + self.eps.product() * xi;
        if !self.geom.outer.curve().contains(x) {
            return Err(Error::OutsideDomain([xi.x, xi.y]));
        }
        self.geom.outer.check_margin(x)
    }

    fn hole_dipole_sum(&self, k: usize, values: &[f64], arg: impl Fn(Point) -> Point) -> f64 {
        let hole = self.geom.hole(k);
        hole.points()
            .iter()
            .zip(hole.normals())
            .zip(hole.arc_weights())
            .zip(values)
            .map(|(((eta, nu), w), t)| nu.dot(&grad_s(arg(*eta))) * w * t)
            .sum()
    }

    fn hole_log_sum(&self, k: usize, values: &[f64], arg: impl Fn(Point) -> Point) -> f64 {
        let hole = self.geom.hole(k);
        hole.points()
            .iter()
            .zip(hole.arc_weights())
            .zip(values)
            .map(|((eta, w), r)| s_kernel(arg(*eta)) * w * r)
            .sum()
    }

    /// `U[ε](x) = u°(x) + ε₁ε₂U^M[ε](x)` at a point of Ω_M.
    pub fn u_macro(&self, x: Point) -> Result<f64> {
        self.check_macro(x)?;
        let (e1, s) = (self.eps.eps1, self.eps.product());
        let mut u = double_layer_raw(&self.geom.outer, &self.theta.theta_o.values, x);
        for k in [1, 2] {
            let c = x - e1 * self.geom.p(k);
            u += s * self.hole_dipole_sum(k, &self.theta.hole(k).values, |eta| c - s * eta);
        }
        Ok(u)
    }

    /// `(u°(x), U^M[ε](x))`. Needs ε₁ε₂ ≠ 0.
    pub fn u_macro_split(&self, x: Point) -> Result<(f64, f64)> {
        let s = self.eps.product();
        if s == 0.0 {
            return Err(Error::Regime("U^M split needs ε₁ε₂ ≠ 0".into()));
        }
        let u0 = self.limits.u_o(x)?;
        Ok((u0, (self.u_macro(x)? - u0) / s))
    }

    /// `V^M[ε](x)`.
    pub fn v_macro(&self, x: Point) -> Result<[f64; 2]> {
        self.check_macro(x)?;
        let (e1, s) = (self.eps.eps1, self.eps.product());
        Ok([0, 1].map(|j| {
            let rho = &self.rho[j];
            let mut v = single_layer_raw(&self.geom.outer, &rho.rho_o.values, x);
            for k in [1, 2] {
                let c = x - e1 * self.geom.p(k);
                v += self.hole_log_sum(k, &rho.hole(k).values, |eta| c - s * eta);
            }
            v
        }))
    }

    /// `U^m_h[ε](ξ)`.
    pub fn u_micro(&self, h: usize, xi: Point) -> Result<f64> {
        self.check_micro(h, xi)?;
        let k = 3 - h;
        let e2 = self.eps.eps2;
        let x = self.eps.eps1 * self.geom.p(h) + self.eps.product() * xi;
        let shift = self.geom.p(h) - self.geom.p(k);
        let mut u = double_layer_raw(&self.geom.outer, &self.theta.theta_o.values, x);
        u -= double_layer_raw(self.geom.hole(h), &self.theta.hole(h).values, xi);
        u += e2 * self.hole_dipole_sum(k, &self.theta.hole(k).values, |eta| shift + e2 * (xi - eta));
        Ok(u)
    }

    /// `V^m_h[ε](ξ)` with its log terms separated.
    pub fn v_micro(&self, h: usize, xi: Point) -> Result<MicroV> {
        self.check_micro(h, xi)?;
        let k = 3 - h;
        let e2 = self.eps.eps2;
        let x = self.eps.eps1 * self.geom.p(h) + self.eps.product() * xi;
        let shift = self.geom.p(h) - self.geom.p(k);
        let analytic = [0, 1].map(|j| {
            let rho = &self.rho[j];
            single_layer_raw(&self.geom.outer, &rho.rho_o.values, x)
                + single_layer_raw(self.geom.hole(h), &rho.hole(h).values, xi)
                + self.hole_log_sum(k, &rho.hole(k).values, |eta| shift + e2 * (xi - eta))
        });
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Ok(MicroV {
            analytic,
            log_eps1eps2: [delta(1, h), delta(2, h)],
            log_eps1: [delta(1, k), delta(2, k)],
        })
    }

    /// `𝒮_h(ε₁, ε₂)` as log coefficients.
    pub fn s_h(&self, h: usize) -> MicroV {
        let on = |j: usize| if j == h { 1.0 } else { 0.0 };
        MicroV {
            analytic: [0.0; 2],
            log_eps1eps2: [on(1), on(2)],
            log_eps1: [1.0 - on(1), 1.0 - on(2)],
        }
    }

    /// Weights `Λ⁻¹F` applied to V in both representation formulas.
    fn weights(&self) -> Result<Vector2<f64>> {
        Ok(self.lambda()?.inverse_explicit.transpose() * self.f)
    }

    /// `u_{ε₁,ε₂}(x) = u°(x) + ε₁ε₂U^M(x) + Fᵗ Λ⁻¹ V^M(x)`.
    pub fn represent_macro(&self, x: Point) -> Result<f64> {
        let w = self.weights()?;
        let v = self.v_macro(x)?;
        Ok(self.u_macro(x)? + w[0] * v[0] + w[1] * v[1])
    }

    /// `u_{ε₁,ε₂}(ε₁pʰ + ε₁ε₂ξ) = U^m_h(ξ) + Fᵗ Λ⁻¹ (V^m_h(ξ) + 𝒮_h)`.
    pub fn represent_micro(&self, h: usize, xi: Point) -> Result<f64> {
        let w = self.weights()?;
        let v = self.v_micro(h, xi)?;
        let sum = MicroV {
            analytic: v.analytic,
            ..self.s_h(h)
        }
        .combined(self.eps);
        Ok(self.u_micro(h, xi)? + w[0] * sum[0] + w[1] * sum[1])
    }

    /// Physical point `ε₁pʰ + ε₁ε₂ξ`.
    pub fn physical_point(&self, h: usize, xi: Point) -> Point {
        self.eps.eps1 * self.geom.p(h) + self.eps.product() * xi
    }

    /// Direct solve of the Dirichlet problem on the physical boundary.
    pub fn direct_solution(&self) -> Result<HarmonicField> {
        let sys = self.geom.physical_system(&self.config, self.eps)?;
        InteriorSolver::new(&sys)?.solve_values(&physical_data(&self.geom, &self.config))
    }

    /// Λ re-assembled from the τ-basis on the physical boundary.
    pub fn physical_lambda(&self) -> Result<Matrix2<f64>> {
        let sys = self.geom.physical_system(&self.config, self.eps)?;
        let basis = crate::dirichlet::tau_basis(&sys)?;
        let l = &basis.lambda_o;
        Ok(Matrix2::new(l[(0, 0)], l[(0, 1)], l[(1, 0)], l[(1, 1)]))
    }
}

/// A degenerate parameter at which closed forms are available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// (ε₁, 0).
    Eps2Zero { eps1: f64 },
    /// (0, ε₂).
    Eps1Zero { eps2: f64 },
}

impl Anchor {
    pub fn eps(self) -> EpsilonPair {
        match self {
            Anchor::Eps2Zero { eps1 } => EpsilonPair::new(eps1, 0.0),
            Anchor::Eps1Zero { eps2 } => EpsilonPair::new(0.0, eps2),
        }
    }
}

/// One identity evaluated from its definition and from its closed form.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub definition: f64,
    pub closed_form: f64,
    pub diff: f64,
}

impl IdentityCheck {
    fn new(identity: String, definition: f64, closed_form: f64) -> Self {
        IdentityCheck {
            identity,
            definition,
            closed_form,
            diff: (definition - closed_form).abs(),
        }
    }
}

/// Evaluates U, V, F and R on `bundle` from their definitions and
/// compares them with the closed forms at `anchor`. When the bundle sits
/// exactly at the anchor the differences measure discretization error;
/// otherwise they also measure the distance to the anchor. `tilde` must be
/// the exterior problems at the anchor's ε₂ when the anchor is
/// [`Anchor::Eps1Zero`].
pub fn degenerate_identities(
    bundle: &StructureBundle,
    anchor: Anchor,
    tilde: Option<&TildeProblems>,
) -> Result<Vec<IdentityCheck>> {
    let lim = &bundle.limits;
    let g = &bundle.geom;
    let macro_pts = EvaluationRegion::default_macro().points;
    let micro_pts = |h: usize| EvaluationRegion::default_micro(h).admissible(bundle).0;
    let mut out = Vec::new();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    match anchor {
        Anchor::Eps2Zero { eps1: a } => {
            for h in [1, 2] {
                let k = 3 - h;
                let base = lim.u_o(a * g.p(h))? - lim.u_h_limit[h - 1];
                for xi in micro_pts(h) {
                    let closed = base + lim.u_h[h - 1].eval(xi)?;
                    out.push(IdentityCheck::new(format!("micro_u_eps2_zero h={h} xi={xi:?}"), bundle.u_micro(h, xi)?, closed));
                    let v = bundle.v_micro(h, xi)?;
                    let lim_h = lim.h_hole_limit(h, xi)?;
                    for j in [1, 2] {
                        let closed = -lim.h_interior(a * g.p(h), a * g.p(j))?
                            + delta(j, h) * lim_h
                            + delta(j, k) * s_kernel(g.p(h) - g.p(k));
                        out.push(IdentityCheck::new(format!("micro_v_eps2_zero h={h} j={j} xi={xi:?}"), v.analytic[j - 1], closed));
                    }
                }
            }
            for x in &macro_pts {
                let v = bundle.v_macro(*x)?;
                for j in [1, 2] {
                    let closed = lim.green(*x, a * g.p(j))?;
                    out.push(IdentityCheck::new(format!("macro_v_eps2_zero j={j} x={x:?}"), v[j - 1], closed));
                }
            }
            for j in [1, 2] {
                let closed = -lim.u_o(a * g.p(j))? + lim.u_h_limit[j - 1];
                out.push(IdentityCheck::new(format!("f_eps2_zero j={j}"), bundle.f[j - 1], closed));
            }
            for i in [1, 2] {
                for j in [1, 2] {
                    let mut closed = -lim.h_interior(a * g.p(j), a * g.p(i))?;
                    closed += if i == j {
                        lim.h_hole_limit(i, Point::zeros())?
                    } else {
                        s_kernel(g.p(i) - g.p(j))
                    };
                    out.push(IdentityCheck::new(format!("r_eps2_zero i={i} j={j}"), bundle.r[(i - 1, j - 1)], closed));
                }
            }
        }
        Anchor::Eps1Zero { eps2: b } => {
            let t = tilde.ok_or_else(|| Error::InvalidInput("Ω̃ problems required".into()))?;
            if t.eps2 != b {
                return Err(Error::Regime(format!("Ω̃ built at ε₂ = {}, anchor at {b}", t.eps2)));
            }
            let u0 = lim.u_o(Point::zeros())?;
            let h00 = lim.h_interior(Point::zeros(), Point::zeros())?;
            let log_b = b.abs().ln() / TAU;
            for h in [1, 2] {
                let k = 3 - h;
                for xi in micro_pts(h) {
                    let y = g.p(h) + b * xi;
                    let closed = u0 + t.u_tilde(y)? + t.w_tilde(y)? - t.u_tilde.limit;
                    out.push(IdentityCheck::new(format!("micro_u_eps1_zero h={h} xi={xi:?}"), bundle.u_micro(h, xi)?, closed));
                    let v = bundle.v_micro(h, xi)?;
                    let hy = t.solver.h_function(y)?;
                    // The H difference pairs with the flux through the
                    // other hole, ∂Ω_k(1, ε₂).
                    for j in [1, 2] {
                        let closed = -h00
                            + hy.limit
                            + (t.h.get(j, k) - t.h.get(j, h)) * hy.flux[k - 1]
                            - log_b * delta(j, h);
                        out.push(IdentityCheck::new(format!("micro_v_eps1_zero h={h} j={j} xi={xi:?}"), v.analytic[j - 1], closed));
                    }
                }
            }
            for x in &macro_pts {
                let v = bundle.v_macro(*x)?;
                let closed = lim.green(*x, Point::zeros())?;
                for j in [1, 2] {
                    out.push(IdentityCheck::new(format!("macro_v_eps1_zero j={j} x={x:?}"), v[j - 1], closed));
                }
            }
            for j in [1, 2] {
                let closed = -u0 + t.u_tilde.limit + (t.h.get(j, 2) - t.h.get(j, 1)) * t.flux(2);
                out.push(IdentityCheck::new(format!("f_eps1_zero j={j}"), bundle.f[j - 1], closed));
            }
            for i in [1, 2] {
                for j in [1, 2] {
                    let closed = -h00 + t.h.get(i, j) - log_b * delta(i, j);
                    out.push(IdentityCheck::new(format!("r_eps1_zero i={i} j={j}"), bundle.r[(i - 1, j - 1)], closed));
                }
            }
        }
    }
    Ok(out)
}

/// Nodes used by default for a configuration.
pub fn default_nodes(config: &ProblemConfig) -> NodeCounts {
    NodeCounts::for_config(config, crate::potentials::DEFAULT_NODES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    fn bundle(cfg: &ProblemConfig, e1: f64, e2: f64, n: usize) -> StructureBundle {
        StructureBundle::new(cfg, NodeCounts::for_config(cfg, n), EpsilonPair::new(e1, e2)).unwrap()
    }

    #[test]
    fn lambda_inverse_and_determinant_identities() {
        let b = bundle(&fixtures::fix_twin_smooth(), 0.3, 0.5, 128);
        let l = b.lambda.as_ref().unwrap();
        assert!(((l.det_direct - l.det_formula) / l.det_direct).abs() < 1e-12);
        let diff = (l.inverse_explicit - l.inverse_direct).abs().max();
        assert!(diff < 1e-12 * l.inverse_direct.abs().max());
        assert!((l.lambda * l.inverse_explicit - Matrix2::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn macro_and_micro_match_direct_solve() {
        let cfg = fixtures::fix_twin_smooth();
        let b = bundle(&cfg, 0.3, 0.5, 128);
        let u = b.direct_solution().unwrap();
        for x in EvaluationRegion::default_macro().points {
            let d = (b.represent_macro(x).unwrap() - u.eval(x).unwrap()).abs();
            assert!(d < 1e-8, "macro {x:?}: {d:.2e}");
        }
        for h in [1, 2] {
            let region = EvaluationRegion::default_micro(h);
            let (pts, _) = region.admissible(&b);
            assert!(!pts.is_empty());
            for xi in pts {
                let x = b.physical_point(h, xi);
                let d = (b.represent_micro(h, xi).unwrap() - u.eval(x).unwrap()).abs();
                assert!(d < 1e-8, "micro {h} {xi:?}: {d:.2e}");
            }
        }
    }

    #[test]
    fn physical_lambda_matches() {
        let b = bundle(&fixtures::fix_twin_smooth(), 0.2, 0.7, 64);
        let d = (b.physical_lambda().unwrap() - b.lambda.as_ref().unwrap().lambda).abs().max();
        assert!(d < 1e-9, "{d:.2e}");
    }

    #[test]
    fn constants_reproduce_constant() {
        let cfg = crate::densities::constant_data(&fixtures::fix_twin(), 2.5);
        let b = bundle(&cfg, 0.3, 0.5, 128);
        for x in EvaluationRegion::default_macro().points {
            assert!((b.represent_macro(x).unwrap() - 2.5).abs() < 1e-9);
        }
        let (pts, _) = EvaluationRegion::default_micro(1).admissible(&b);
        for xi in pts {
            assert!((b.represent_micro(1, xi).unwrap() - 2.5).abs() < 1e-9);
        }
    }

    fn worst(checks: &[IdentityCheck]) -> (f64, String) {
        checks
            .iter()
            .map(|c| (c.diff, c.identity.clone()))
            .fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a })
    }

    #[test]
    fn eps2_zero_identities() {
        let cfg = fixtures::fix_sym();
        let b = bundle(&cfg, 0.2, 0.0, 128);
        let checks = degenerate_identities(&b, Anchor::Eps2Zero { eps1: 0.2 }, None).unwrap();
        let (d, name) = worst(&checks);
        assert!(d < 1e-7, "{name}: {d:.2e}");
    }

    #[test]
    fn eps1_zero_identities() {
        let cfg = fixtures::fix_sym();
        let b = bundle(&cfg, 0.0, 0.5, 128);
        let t = TildeProblems::new(&cfg, &b.geom, 0.5).unwrap();
        let checks = degenerate_identities(&b, Anchor::Eps1Zero { eps2: 0.5 }, Some(&t)).unwrap();
        let (d, name) = worst(&checks);
        assert!(d < 1e-7, "{name}: {d:.2e}");
    }
}
