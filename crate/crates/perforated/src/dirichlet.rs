//! Interior multi-hole and exterior Dirichlet solvers, the τ-basis, the
//! Green function and the auxiliary H-functions.
//!
//! In an interior [`BoundarySystem`] the outer curve is positively oriented
//! and every hole curve is negatively oriented, so all normals point away
//! from the domain. In an exterior system every curve is positively
//! oriented: normals point away from the holes, into the unbounded domain.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Orientation, Point};
use crate::linalg::{condition_number, residual, Factored};
use crate::potentials::{
    grad_s, op_S, op_W, op_Wstar, s_kernel, BoundarySystem, Density, Discretization,
    SystemDensity,
};

/// Normalized kernel basis of `½I + W*` on a multiply connected domain.
#[derive(Clone, Debug)]
pub struct TauBasis {
    pub system: BoundarySystem,
    /// Component indices of the hole boundaries ∂𝒪⁻_j, in order.
    pub holes: Vec<usize>,
    pub tau: Vec<SystemDensity>,
    /// `lambda_o[(i, j)]` is the mean of `v[τ_i]` over hole `j`.
    pub lambda_o: DMatrix<f64>,
    pub lambda_condition: f64,
    /// Largest `|(½I + W*)τ_i|` at the nodes.
    pub residual: f64,
}

impl TauBasis {
    pub fn k(&self) -> usize {
        self.holes.len()
    }
}

fn hole_components(system: &BoundarySystem) -> Vec<usize> {
    (0..system.num_components())
        .filter(|&i| system.disc(i).curve().orientation() == Orientation::Negative)
        .collect()
}

/// Append `k` constraint rows and `k` extra columns to `a`.
fn bordered(a: &DMatrix<f64>, rows: &[Vec<f64>], cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = a.nrows();
    let k = rows.len();
    let mut m = DMatrix::zeros(n + k, n + k);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    for (j, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m[(n + j, c)] = *v;
        }
    }
    for (j, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            m[(r, n + j)] = *v;
        }
    }
    m
}

/// Row computing the mean over component `comp` of a system vector.
fn mean_row(system: &BoundarySystem, comp: usize) -> Vec<f64> {
    let mut row = vec![0.0; system.len()];
    let len = system.disc(comp).length();
    for (r, w) in system.range(comp).zip(system.disc(comp).arc_weights()) {
        row[r] = w / len;
    }
    row
}

fn identity_plus(a: &mut DMatrix<f64>, c: f64) {
    for i in 0..a.nrows() {
        a[(i, i)] += c;
    }
}

/// Solve `(½I + W*)τ_i = 0` with unit mass on hole `i`, zero on the others.
pub fn tau_basis(system: &BoundarySystem) -> Result<TauBasis> {
    let holes = hole_components(system);
    if holes.is_empty() {
        return Err(Error::InvalidInput(
            "tau basis needs at least one hole component".into(),
        ));
    }
    let n = system.len();
    let mut a = op_Wstar(system);
    identity_plus(&mut a, 0.5);
    let rows: Vec<_> = holes.iter().map(|&h| mean_row(system, h)).collect();
    let cols: Vec<_> = holes.iter().map(|&h| system.indicator(h)).collect();
    let lu = Factored::new(bordered(&a, &rows, &cols), "tau basis failed")?;

    let mut tau = Vec::with_capacity(holes.len());
    let mut res: f64 = 0.0;
    for (i, &h) in holes.iter().enumerate() {
        let mut rhs = vec![0.0; n + holes.len()];
        rhs[n + i] = 1.0 / system.disc(h).length();
        let x = lu.solve(&rhs)?;
        let values = x[..n].to_vec();
        res = res.max(residual(&a, &values, &vec![0.0; n]));
        tau.push(SystemDensity::new(system.clone(), values)?);
    }

    let s = op_S(system);
    let k = holes.len();
    let mut lambda_o = DMatrix::zeros(k, k);
    for (i, t) in tau.iter().enumerate() {
        let v = &s * nalgebra::DVector::from_column_slice(&t.values);
        for (j, &h) in holes.iter().enumerate() {
            lambda_o[(i, j)] = system.disc(h).integrate(&v.as_slice()[system.range(h)])
                / system.disc(h).length();
        }
    }
    let lambda_condition = condition_number(&lambda_o);
    if !lambda_condition.is_finite() {
        return Err(Error::Singular("Λ_O is singular".into()));
    }
    Ok(TauBasis {
        system: system.clone(),
        holes,
        tau,
        lambda_o,
        lambda_condition,
        residual: res,
    })
}

/// Which side of the boundary a field lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Inside every positively oriented curve, outside every negative one.
    Interior,
    /// Outside every curve.
    Exterior,
}

#[derive(Clone, Debug)]
pub enum Representation {
    /// `u = w⁺[μ] + Σ_j coeffs[j]·v[τ_j]`.
    InteriorDoubleLayer {
        mu: SystemDensity,
        tau: Vec<SystemDensity>,
        coeffs: Vec<f64>,
    },
    /// `u = w⁻[μ] + constant + Σ c·S(x − p)`.
    ExteriorBounded {
        mu: SystemDensity,
        constant: f64,
        log_terms: Vec<(Point, f64)>,
    },
}

/// A solved harmonic function, evaluated through its layer representation.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    pub representation: Representation,
    pub region: Region,
}

impl HarmonicField {
    fn system(&self) -> &BoundarySystem {
        match &self.representation {
            Representation::InteriorDoubleLayer { mu, .. } => &mu.system,
            Representation::ExteriorBounded { mu, .. } => &mu.system,
        }
    }

    /// Whether `x` lies in the field's domain (margins not checked).
    pub fn in_domain(&self, x: Point) -> bool {
        let sys = self.system();
        sys.discs().iter().all(|d| {
            let inside = d.curve().contains(x);
            match (self.region, d.curve().orientation()) {
                (Region::Interior, Orientation::Positive) => inside,
                _ => !inside,
            }
        })
    }

    fn check(&self, x: Point) -> Result<()> {
        self.system().check_margin(x)?;
        if !self.in_domain(x) {
            return Err(Error::OutsideDomain([x.x, x.y]));
        }
        Ok(())
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        self.check(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain test; margins are still enforced.
    pub fn eval_unchecked(&self, x: Point) -> f64 {
        match &self.representation {
            Representation::InteriorDoubleLayer { mu, tau, coeffs } => {
                let mut u = mu.double_layer(x).unwrap_or(f64::NAN);
                for (t, c) in tau.iter().zip(coeffs) {
                    u += c * t.single_layer(x).unwrap_or(f64::NAN);
                }
                u
            }
            Representation::ExteriorBounded {
                mu,
                constant,
                log_terms,
            } => {
                let mut u = mu.double_layer(x).unwrap_or(f64::NAN) + constant;
                for (p, c) in log_terms {
                    u += c * s_kernel(x - p);
                }
                u
            }
        }
    }

    pub fn gradient(&self, x: Point) -> Result<Point> {
        self.check(x)?;
        match &self.representation {
            Representation::InteriorDoubleLayer { mu, tau, coeffs } => {
                let mut g = mu.grad_double_layer(x)?;
                for (t, c) in tau.iter().zip(coeffs) {
                    g += *c * t.grad_single_layer(x)?;
                }
                Ok(g)
            }
            Representation::ExteriorBounded { mu, log_terms, .. } => {
                let mut g = mu.grad_double_layer(x)?;
                for (p, c) in log_terms {
                    g += *c * grad_s(x - p);
                }
                Ok(g)
            }
        }
    }

    /// `lim_{|y|→∞} u(y)` for exterior fields.
    pub fn limit_at_infinity(&self) -> Option<f64> {
        match &self.representation {
            Representation::ExteriorBounded {
                constant,
                log_terms,
                ..
            } => {
                let total: f64 = log_terms.iter().map(|(_, c)| c).sum();
                (total.abs() < 1e-12 * (1.0 + constant.abs())).then_some(*constant)
            }
            _ => None,
        }
    }

    /// Boundary trace at the nodes of component `comp`, from the jump
    /// relations.
    pub fn boundary_trace(&self, comp: usize) -> Vec<f64> {
        let sys = self.system().clone();
        let (mu, sign) = match &self.representation {
            Representation::InteriorDoubleLayer { mu, .. } => (mu, 0.5),
            Representation::ExteriorBounded { mu, .. } => (mu, -0.5),
        };
        let w = op_W(&sys) * nalgebra::DVector::from_column_slice(&mu.values);
        let disc = sys.disc(comp);
        sys.range(comp)
            .enumerate()
            .map(|(k, r)| {
                let x = disc.points()[k];
                let mut u = sign * mu.values[r] + w[r];
                match &self.representation {
                    Representation::InteriorDoubleLayer { tau, coeffs, .. } => {
                        for (t, c) in tau.iter().zip(coeffs) {
                            u += c * t.single_layer_at_node(comp, k).unwrap_or(f64::NAN);
                        }
                    }
                    Representation::ExteriorBounded {
                        constant,
                        log_terms,
                        ..
                    } => {
                        u += constant;
                        for (p, c) in log_terms {
                            u += c * s_kernel(x - p);
                        }
                    }
                }
                u
            })
            .collect()
    }
}

/// Factored interior Dirichlet operator for repeated solves.
pub struct InteriorSolver {
    system: BoundarySystem,
    tau: Option<TauBasis>,
    lambda_inv: DMatrix<f64>,
    lu: Factored,
}

impl InteriorSolver {
    pub fn new(system: &BoundarySystem) -> Result<Self> {
        let positive = (0..system.num_components())
            .filter(|&i| system.disc(i).curve().orientation() == Orientation::Positive)
            .count();
        if positive != 1 {
            return Err(Error::InvalidInput(format!(
                "interior system needs exactly one outer component, found {positive}"
            )));
        }
        let holes = hole_components(system);
        let mut a = op_W(system);
        identity_plus(&mut a, 0.5);
        let (tau, lambda_inv, lu) = if holes.is_empty() {
            (None, DMatrix::zeros(0, 0), Factored::new(a, "interior Dirichlet")?)
        } else {
            let basis = tau_basis(system)?;
            let inv = basis
                .lambda_o
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Singular("Λ_O not invertible".into()))?;
            let rows: Vec<_> = holes.iter().map(|&h| mean_row(system, h)).collect();
            let cols: Vec<_> = holes.iter().map(|&h| system.indicator(h)).collect();
            let lu = Factored::new(bordered(&a, &rows, &cols), "interior Dirichlet")?;
            (Some(basis), inv, lu)
        };
        Ok(InteriorSolver {
            system: system.clone(),
            tau,
            lambda_inv,
            lu,
        })
    }

    pub fn system(&self) -> &BoundarySystem {
        &self.system
    }

    pub fn tau_basis(&self) -> Option<&TauBasis> {
        self.tau.as_ref()
    }

    /// Solve with data given as one system vector.
    pub fn solve_values(&self, g: &[f64]) -> Result<HarmonicField> {
        let n = self.system.len();
        if g.len() != n {
            return Err(Error::InvalidInput(format!(
                "data has {} values for {n} nodes",
                g.len()
            )));
        }
        let Some(basis) = &self.tau else {
            let mu = self.lu.solve(g)?;
            return Ok(HarmonicField {
                representation: Representation::InteriorDoubleLayer {
                    mu: SystemDensity::new(self.system.clone(), mu)?,
                    tau: vec![],
                    coeffs: vec![],
                },
                region: Region::Interior,
            });
        };
        let weights = self.system.arc_weights();
        let moments: Vec<f64> = basis
            .tau
            .iter()
            .map(|t| {
                t.values
                    .iter()
                    .zip(g)
                    .zip(&weights)
                    .map(|((a, b), w)| a * b * w)
                    .sum()
            })
            .collect();
        let mut rhs = g.to_vec();
        for (i, &h) in basis.holes.iter().enumerate() {
            for r in self.system.range(h) {
                rhs[r] -= moments[i];
            }
        }
        rhs.extend(std::iter::repeat_n(0.0, basis.k()));
        let x = self.lu.solve(&rhs)?;
        let k = basis.k();
        let coeffs: Vec<f64> = (0..k)
            .map(|j| (0..k).map(|i| moments[i] * self.lambda_inv[(i, j)]).sum())
            .collect();
        Ok(HarmonicField {
            representation: Representation::InteriorDoubleLayer {
                mu: SystemDensity::new(self.system.clone(), x[..n].to_vec())?,
                tau: basis.tau.clone(),
                coeffs,
            },
            region: Region::Interior,
        })
    }

    /// Solve with one density per component.
    pub fn solve(&self, g: &[Density]) -> Result<HarmonicField> {
        if g.len() != self.system.num_components() {
            return Err(Error::InvalidInput(format!(
                "{} data components for {} boundary components",
                g.len(),
                self.system.num_components()
            )));
        }
        let values: Vec<f64> = g.iter().flat_map(|d| d.values.iter().copied()).collect();
        self.solve_values(&values)
    }

    /// Solve with data given as a function of the boundary point.
    pub fn solve_fn(&self, g: impl Fn(Point) -> f64) -> Result<HarmonicField> {
        let values: Vec<f64> = self.system.points().into_iter().map(g).collect();
        self.solve_values(&values)
    }

    /// `H_x`: interior harmonic with boundary values `S(x − ·)`.
    pub fn h_function(&self, x: Point) -> Result<HarmonicField> {
        self.system.check_margin(x)?;
        let field_probe = HarmonicField {
            representation: Representation::InteriorDoubleLayer {
                mu: SystemDensity::new(self.system.clone(), vec![0.0; self.system.len()])?,
                tau: vec![],
                coeffs: vec![],
            },
            region: Region::Interior,
        };
        if !field_probe.in_domain(x) {
            return Err(Error::OutsideDomain([x.x, x.y]));
        }
        self.solve_fn(|y| s_kernel(x - y))
    }

    /// Dirichlet Green function `G(x, y) = S(x − y) − H_x(y)`.
    pub fn green(&self, x: Point, y: Point) -> Result<f64> {
        if (x - y).norm() == 0.0 {
            return Err(Error::InvalidInput("Green function at coincident points".into()));
        }
        Ok(s_kernel(x - y) - self.h_function(x)?.eval(y)?)
    }
}

/// Interior Dirichlet problem on a (possibly multiply connected) domain.
pub fn solve_interior_dirichlet(system: &BoundarySystem, g: &[Density]) -> Result<HarmonicField> {
    InteriorSolver::new(system)?.solve(g)
}

fn outer_only(outer: &BoundarySystem) -> Result<()> {
    if outer.num_components() != 1 {
        return Err(Error::InvalidInput(
            "expected a system made of the outer curve alone".into(),
        ));
    }
    Ok(())
}

/// `H^{Ω°}_x` for a domain given by its outer curve alone.
pub fn h_interior(outer: &BoundarySystem, x: Point) -> Result<HarmonicField> {
    outer_only(outer)?;
    InteriorSolver::new(outer)?.h_function(x)
}

/// `G(x, y) = S(x − y) − H^{Ω°}_x(y)`.
pub fn green_function(outer: &BoundarySystem, x: Point, y: Point) -> Result<f64> {
    outer_only(outer)?;
    InteriorSolver::new(outer)?.green(x, y)
}

/// Factored exterior Dirichlet operator for one positively oriented curve.
pub struct ExteriorSingleSolver {
    system: BoundarySystem,
    lu: Factored,
}

impl ExteriorSingleSolver {
    pub fn new(hole: &Arc<Discretization>) -> Result<Self> {
        if hole.curve().orientation() != Orientation::Positive {
            return Err(Error::InvalidInput(
                "exterior solves need the normal pointing away from the hole".into(),
            ));
        }
        let system = BoundarySystem::new(vec![hole.clone()])?;
        let mut a = op_W(&system);
        identity_plus(&mut a, -0.5);
        let m = bordered(&a, &[mean_row(&system, 0)], &[vec![1.0; system.len()]]);
        Ok(ExteriorSingleSolver {
            lu: Factored::new(m, "exterior Dirichlet")?,
            system,
        })
    }

    pub fn solve_values(&self, f: &[f64]) -> Result<HarmonicField> {
        let n = self.system.len();
        if f.len() != n {
            return Err(Error::InvalidInput("data length mismatch".into()));
        }
        let mut rhs = f.to_vec();
        rhs.push(0.0);
        let x = self.lu.solve(&rhs)?;
        Ok(HarmonicField {
            representation: Representation::ExteriorBounded {
                mu: SystemDensity::new(self.system.clone(), x[..n].to_vec())?,
                constant: x[n],
                log_terms: vec![],
            },
            region: Region::Exterior,
        })
    }

    pub fn solve_fn(&self, f: impl Fn(Point) -> f64) -> Result<HarmonicField> {
        let values: Vec<f64> = self.system.points().into_iter().map(f).collect();
        self.solve_values(&values)
    }

    /// `H^x_{Ω_h}`: bounded exterior harmonic with boundary values `S(x − ·)`.
    pub fn h_function(&self, x: Point) -> Result<HarmonicField> {
        self.solve_fn(|y| s_kernel(x - y))
    }
}

/// Bounded exterior harmonic `u = w⁻[μ] + c` with trace `f`.
pub fn solve_exterior_single(hole: &Arc<Discretization>, f: &Density) -> Result<HarmonicField> {
    ExteriorSingleSolver::new(hole)?.solve_values(&f.values)
}

/// Exterior solution on a two-curve geometry with its limit and fluxes.
#[derive(Clone, Debug)]
pub struct ExteriorPairSolution {
    pub field: HarmonicField,
    /// `lim_{|y|→∞} u(y)`.
    pub limit: f64,
    /// `∮_{curve i} ν·∇u dσ` with ν pointing away from curve `i`'s hole.
    pub flux: [f64; 2],
}

/// Factored completed double-layer operator on a pair of curves.
pub struct ExteriorPairSolver {
    system: BoundarySystem,
    p: [Point; 2],
    lu: Factored,
}

impl ExteriorPairSolver {
    /// `pair` must hold two positively oriented curves with `p[i]` inside
    /// curve `i`.
    pub fn new(pair: &BoundarySystem, p: [Point; 2]) -> Result<Self> {
        if pair.num_components() != 2 {
            return Err(Error::InvalidInput("exterior pair needs two curves".into()));
        }
        for i in 0..2 {
            let c = pair.disc(i).curve();
            if c.orientation() != Orientation::Positive {
                return Err(Error::InvalidInput(
                    "exterior solves need normals pointing away from the holes".into(),
                ));
            }
            if !c.contains(p[i]) {
                return Err(Error::InvalidInput(format!(
                    "point {:?} is not inside curve {i}",
                    p[i]
                )));
            }
        }
        let n = pair.len();
        let mut a = op_W(pair);
        identity_plus(&mut a, -0.5);
        let w = pair.arc_weights();
        let pts = pair.points();
        for r in 0..n {
            let log_diff = s_kernel(pts[r] - p[0]) - s_kernel(pts[r] - p[1]);
            for c in pair.range(0) {
                a[(r, c)] += w[c];
            }
            for c in pair.range(1) {
                a[(r, c)] += log_diff * w[c];
            }
        }
        Ok(ExteriorPairSolver {
            system: pair.clone(),
            p,
            lu: Factored::new(a, "completed double layer (must be an isomorphism)")?,
        })
    }

    pub fn system(&self) -> &BoundarySystem {
        &self.system
    }

    pub fn solve_values(&self, f: &[f64]) -> Result<ExteriorPairSolution> {
        if f.len() != self.system.len() {
            return Err(Error::InvalidInput("data length mismatch".into()));
        }
        let mu = SystemDensity::new(self.system.clone(), self.lu.solve(f)?)?;
        let m_h = mu.integral(0);
        let m_k = mu.integral(1);
        // The double layer carries no flux through either curve; the
        // log-difference term carries +1 through curve 0 and −1 through 1.
        let flux = [m_k, -m_k];
        Ok(ExteriorPairSolution {
            field: HarmonicField {
                representation: Representation::ExteriorBounded {
                    mu,
                    constant: m_h,
                    log_terms: vec![(self.p[0], m_k), (self.p[1], -m_k)],
                },
                region: Region::Exterior,
            },
            limit: m_h,
            flux,
        })
    }

    pub fn solve(&self, f: &[Density]) -> Result<ExteriorPairSolution> {
        if f.len() != 2 {
            return Err(Error::InvalidInput("exterior pair needs two data".into()));
        }
        let values: Vec<f64> = f.iter().flat_map(|d| d.values.iter().copied()).collect();
        self.solve_values(&values)
    }

    pub fn solve_fn(&self, f: impl Fn(Point) -> f64) -> Result<ExteriorPairSolution> {
        let values: Vec<f64> = self.system.points().into_iter().map(f).collect();
        self.solve_values(&values)
    }

    /// `H^x_{Ω̃}` with boundary values `S(x − ·)`.
    pub fn h_function(&self, x: Point) -> Result<ExteriorPairSolution> {
        self.solve_fn(|y| s_kernel(x - y))
    }
}

/// Bounded exterior harmonic on a two-curve geometry.
pub fn solve_exterior_pair(
    pair: &BoundarySystem,
    p: [Point; 2],
    f: &[Density],
) -> Result<ExteriorPairSolution> {
    ExteriorPairSolver::new(pair, p)?.solve(f)
}

/// The constants `H^{j,i} = v[ρ̃_j](pⁱ)` on a two-curve exterior geometry.
#[derive(Clone, Debug)]
pub struct HConstants {
    /// `h[(j, i)] = H^{j+1, i+1}`.
    pub h: Matrix2<f64>,
    /// Largest spread of `v[ρ̃_j]` over interior samples of a hole.
    pub spread: f64,
}

impl HConstants {
    /// `H^{j,i}` with 1-based indices.
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.h[(j - 1, i - 1)]
    }

    /// `c = H¹¹ − H¹² − H²¹ + H²²`.
    pub fn c(&self) -> f64 {
        self.h[(0, 0)] - self.h[(0, 1)] - self.h[(1, 0)] + self.h[(1, 1)]
    }

    /// `d = H¹¹ − H¹² + H²¹ − H²²`.
    pub fn d(&self) -> f64 {
        self.h[(0, 0)] - self.h[(0, 1)] + self.h[(1, 0)] - self.h[(1, 1)]
    }
}

/// Tolerance on the defining system of ρ̃ accepted by
/// [`h_exterior_constants`].
pub const RHO_TILDE_TOLERANCE: f64 = 1e-8;

pub fn h_exterior_constants(
    pair: &BoundarySystem,
    p: [Point; 2],
    rho_tilde: &[SystemDensity; 2],
) -> Result<HConstants> {
    let mut a = op_Wstar(pair);
    identity_plus(&mut a, -0.5);
    for (j, rho) in rho_tilde.iter().enumerate() {
        let scale = rho.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = residual(&a, &rho.values, &vec![0.0; pair.len()]);
        let mass_err = (0..2)
            .map(|h| (rho.integral(h) - if h == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if res > RHO_TILDE_TOLERANCE * scale.max(1.0) || mass_err > RHO_TILDE_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "ρ̃_{} violates its defining system (residual {res:.2e}, mass error {mass_err:.2e})",
                j + 1
            )));
        }
    }
    let mut h = Matrix2::zeros();
    let mut spread: f64 = 0.0;
    for (j, rho) in rho_tilde.iter().enumerate() {
        for i in 0..2 {
            h[(j, i)] = rho.single_layer(p[i])?;
            let disc = pair.disc(i);
            let n = disc.n();
            let samples: Vec<f64> = [0, n / 3, 2 * n / 3]
                .iter()
                .filter_map(|&k| rho.single_layer(p[i] + 0.3 * (disc.points()[k] - p[i])).ok())
                .collect();
            for v in samples {
                spread = spread.max((v - h[(j, i)]).abs());
            }
        }
    }
    Ok(HConstants { h, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Curve;
    use std::f64::consts::TAU;

    fn annulus(inner: f64, n: usize) -> BoundarySystem {
        let outer = Curve::circle(Point::zeros(), 1.0).unwrap();
        let hole = Curve::circle(Point::zeros(), inner)
            .unwrap()
            .with_orientation(Orientation::Negative);
        BoundarySystem::from_curves(&[outer, hole], n).unwrap()
    }

    #[test]
    fn tau_on_annulus_is_radial() {
        let sys = annulus(0.5, 64);
        let basis = tau_basis(&sys).unwrap();
        let tau = &basis.tau[0];
        assert!((tau.integral(1) - 1.0).abs() < 1e-12);
        assert!(basis.residual < 1e-12);
        let s = op_S(&sys) * nalgebra::DVector::from_column_slice(&tau.values);
        for comp in 0..2 {
            let vals = &s.as_slice()[sys.range(comp)];
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-12, "{spread}");
        }
    }

    #[test]
    fn annulus_log_solution() {
        let r = 0.25;
        let sys = annulus(r, 128);
        let solver = InteriorSolver::new(&sys).unwrap();
        let u = solver
            .solve_values(
                &sys.points()
                    .iter()
                    .map(|p| if p.norm() < 0.5 { 1.0 } else { 0.0 })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
        for rad in [0.4, 0.6, 0.8] {
            let x = Point::new(rad * 0.6, rad * 0.8);
            let exact = rad.ln() / r.ln();
            assert!((u.eval(x).unwrap() - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn disk_harmonic_polynomial() {
        let sys = BoundarySystem::from_curves(&[Curve::circle(Point::zeros(), 1.0).unwrap()], 64)
            .unwrap();
        let u = InteriorSolver::new(&sys).unwrap().solve_fn(|y| y.x).unwrap();
        for x in [Point::new(0.1, 0.2), Point::new(-0.5, 0.3)] {
            assert!((u.eval(x).unwrap() - x.x).abs() < 1e-12);
        }
        assert!(matches!(
            u.eval(Point::new(2.0, 0.0)),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn exterior_circle_modes() {
        let d = Discretization::shared(Curve::circle(Point::zeros(), 1.0).unwrap(), 64).unwrap();
        let solver = ExteriorSingleSolver::new(&d).unwrap();
        let one = solver.solve_values(&vec![1.0; 64]).unwrap();
        assert!((one.limit_at_infinity().unwrap() - 1.0).abs() < 1e-13);
        let cos = solver
            .solve_values(&d.params().iter().map(|s| s.cos()).collect::<Vec<_>>())
            .unwrap();
        assert!(cos.limit_at_infinity().unwrap().abs() < 1e-13);
        let x = Point::new(3.0 * 0.6, 3.0 * 0.8);
        assert!((cos.eval(x).unwrap() - 0.6 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn exterior_h_of_centred_circle() {
        let r = 0.7;
        let d = Discretization::shared(Curve::circle(Point::zeros(), r).unwrap(), 64).unwrap();
        let h = ExteriorSingleSolver::new(&d)
            .unwrap()
            .h_function(Point::zeros())
            .unwrap();
        assert!((h.limit_at_infinity().unwrap() - r.ln() / TAU).abs() < 1e-13);
    }

    #[test]
    fn disk_green_function_image_formula() {
        let sys = BoundarySystem::from_curves(&[Curve::circle(Point::zeros(), 1.0).unwrap()], 128)
            .unwrap();
        let solver = InteriorSolver::new(&sys).unwrap();
        let x = Point::new(0.5, 0.0);
        assert!(solver.h_function(x).unwrap().eval(Point::zeros()).unwrap().abs() < 1e-12);
        let g = solver.green(x, Point::zeros()).unwrap();
        assert!((g + 2f64.ln() / TAU).abs() < 1e-12);
        let y = Point::new(-0.2, 0.3);
        let image = x / x.norm_squared();
        let exact = (x.norm() * (y - image).norm()).ln() / TAU;
        assert!((solver.h_function(x).unwrap().eval(y).unwrap() - exact).abs() < 1e-10);
        assert!(solver.green(x, y).unwrap() < 0.0);
    }

    #[test]
    fn pair_with_unit_data() {
        let pair = BoundarySystem::from_curves(
            &[
                Curve::circle(Point::new(-1.0, 0.0), 0.5).unwrap(),
                Curve::circle(Point::new(1.0, 0.0), 0.5).unwrap(),
            ],
            64,
        )
        .unwrap();
        let sol = ExteriorPairSolver::new(&pair, [Point::new(-1.0, 0.0), Point::new(1.0, 0.0)])
            .unwrap()
            .solve_fn(|_| 1.0)
            .unwrap();
        assert!((sol.limit - 1.0).abs() < 1e-12);
        assert!(sol.flux[0].abs() < 1e-12 && sol.flux[1].abs() < 1e-12);
        assert!((sol.field.eval(Point::new(0.0, 2.0)).unwrap() - 1.0).abs() < 1e-12);
    }
}
