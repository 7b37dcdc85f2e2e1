//! Layer potentials and their Nyström discretization.
//!
//! Conventions, with `S(x) = log|x| / 2π`:
//!
//! * single layer `v[φ](x) = ∮ φ(y) S(x−y) dσ_y`,
//! * double layer `w[ψ](x) = −∮ ψ(y) ν(y)·∇S(x−y) dσ_y`, so `w[1] = 1`
//!   inside a positively oriented curve,
//! * `W` is the double layer with `x` on the boundary, and
//!   `W*[φ](x) = ν(x)·∮ φ(y) ∇S(x−y) dσ_y`.
//!
//! Smooth kernels use the periodic trapezoid rule. The weakly singular
//! single-layer self interaction uses Kress log-splitting. The double-layer
//! kernel is continuous on a smooth curve; its diagonal is the limit
//! `κ/(4π)` per unit arclength, with `κ` signed against the normal.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryData, Curve, Point};

pub const DEFAULT_NODES: usize = 128;

/// Evaluation points closer than this many local node spacings to a
/// boundary are refused.
pub const MARGIN_FACTOR: f64 = 4.0;

/// `S(x) = log|x| / 2π`.
pub fn fundamental_solution(x: Point) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::InvalidInput("S is singular at x = 0".into()));
    }
    Ok(r.ln() / TAU)
}

#[inline]
pub fn s_kernel(z: Point) -> f64 {
    z.norm().ln() / TAU
}

/// `∇S(z) = z / (2π|z|²)`.
#[inline]
pub fn grad_s(z: Point) -> Point {
    z / (TAU * z.norm_squared())
}

/// Gradient in `z` of `ν·∇S(z)`.
#[inline]
fn grad_dipole(nu: Point, z: Point) -> Point {
    let r2 = z.norm_squared();
    (nu - 2.0 * nu.dot(&z) / r2 * z) / (TAU * r2)
}

/// Quadrature nodes on one curve.
#[derive(Clone, Debug)]
pub struct Discretization {
    curve: Curve,
    n: usize,
    params: Vec<f64>,
    points: Vec<Point>,
    normals: Vec<Point>,
    speeds: Vec<f64>,
    curvatures: Vec<f64>,
}

impl Discretization {
    pub fn new(curve: Curve, n: usize) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "node count must be even and at least 16, got {n}"
            )));
        }
        let params: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        let points = params.iter().map(|&s| curve.position(s)).collect();
        let normals = params.iter().map(|&s| curve.normal(s)).collect();
        let speeds: Vec<f64> = params.iter().map(|&s| curve.speed(s)).collect();
        let curvatures = params.iter().map(|&s| curve.curvature(s)).collect();
        if speeds.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("vanishing speed at a node".into()));
        }
        Ok(Discretization {
            curve,
            n,
            params,
            points,
            normals,
            speeds,
            curvatures,
        })
    }

    pub fn shared(curve: Curve, n: usize) -> Result<Arc<Self>> {
        Self::new(curve, n).map(Arc::new)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    /// Parameter step 2π/n.
    pub fn weight(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Arclength quadrature weights (speed × 2π/n).
    pub fn arc_weights(&self) -> Vec<f64> {
        let h = self.weight();
        self.speeds.iter().map(|v| v * h).collect()
    }

    pub fn length(&self) -> f64 {
        self.speeds.iter().sum::<f64>() * self.weight()
    }

    /// `∮ values dσ`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        let h = self.weight();
        values.iter().zip(&self.speeds).map(|(f, v)| f * v * h).sum()
    }

    /// Nodal samples of a parametric datum.
    pub fn sample(&self, data: &BoundaryData) -> Vec<f64> {
        self.params.iter().map(|&s| data.eval(s)).collect()
    }

    /// Nodal samples of a function of the boundary point.
    pub fn sample_points(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.points.iter().map(|&p| f(p)).collect()
    }

    /// Distance from `x` to the nearest node and the margin that applies
    /// there.
    pub fn nearest(&self, x: Point) -> (f64, f64) {
        let h = self.weight();
        let mut best = (f64::INFINITY, 0.0);
        for (p, v) in self.points.iter().zip(&self.speeds) {
            let d = (p - x).norm();
            if d < best.0 {
                best = (d, MARGIN_FACTOR * v * h);
            }
        }
        best
    }

    /// Refuse points inside the close-evaluation band.
    pub fn check_margin(&self, x: Point) -> Result<()> {
        let (distance, margin) = self.nearest(x);
        if distance < margin || !distance.is_finite() {
            return Err(Error::NearSingular {
                x: [x.x, x.y],
                distance,
                margin,
            });
        }
        Ok(())
    }
}

/// Nodal values of a boundary function on one curve.
#[derive(Clone, Debug)]
pub struct Density {
    pub disc: Arc<Discretization>,
    pub values: Vec<f64>,
}

impl Density {
    pub fn new(disc: Arc<Discretization>, values: Vec<f64>) -> Result<Self> {
        if values.len() != disc.n() {
            return Err(Error::InvalidInput(format!(
                "density has {} values for {} nodes",
                values.len(),
                disc.n()
            )));
        }
        Ok(Density { disc, values })
    }

    pub fn zeros(disc: Arc<Discretization>) -> Self {
        let n = disc.n();
        Density {
            disc,
            values: vec![0.0; n],
        }
    }

    pub fn constant(disc: Arc<Discretization>, c: f64) -> Self {
        let n = disc.n();
        Density {
            disc,
            values: vec![c; n],
        }
    }

    pub fn from_data(disc: Arc<Discretization>, data: &BoundaryData) -> Self {
        let values = disc.sample(data);
        Density { disc, values }
    }

    pub fn integral(&self) -> f64 {
        self.disc.integrate(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.disc.length()
    }

    /// `∮ self · other dσ` on a shared discretization.
    pub fn inner(&self, other: &Density) -> f64 {
        debug_assert!(Arc::ptr_eq(&self.disc, &other.disc) || self.disc.n() == other.disc.n());
        let h = self.disc.weight();
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.disc.speeds())
            .map(|((a, b), v)| a * b * v * h)
            .sum()
    }
}

/// Where a single layer is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Location {
    OffBoundary(Point),
    /// The node with the given index on the density's own curve.
    OnBoundary(usize),
}

/// Kress weights `R_m` for the log kernel `log(4 sin²((t−s)/2))`, indexed by
/// the node offset `m = i − j mod n`.
pub fn kress_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|m| {
            let d = TAU * m as f64 / nf;
            let mut sum = 0.0;
            for k in 1..half {
                sum += (k as f64 * d).cos() / k as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            -4.0 * PI / nf * sum - 4.0 * PI / (nf * nf) * sign
        })
        .collect()
}

/// Kress-split single-layer self block on one curve.
fn single_layer_self_block(disc: &Discretization, kress: &[f64]) -> DMatrix<f64> {
    let n = disc.n();
    let h = disc.weight();
    let pts = disc.points();
    let sp = disc.speeds();
    DMatrix::from_fn(n, n, |i, j| {
        let m = (i + n - j) % n;
        let smooth = if i == j {
            sp[i].ln() / TAU
        } else {
            let d = 0.5 * (disc.params()[i] - disc.params()[j]);
            s_kernel(pts[i] - pts[j]) - (4.0 * d.sin().powi(2)).ln() / (2.0 * TAU)
        };
        (kress[m] / (2.0 * TAU) + h * smooth) * sp[j]
    })
}

/// `A_ij = ν_t(x_i)·∇S(x_i − y_j) w_j`.
pub fn target_normal_block(
    targets: &[Point],
    tnormals: &[Point],
    sources: &[Point],
    sweights: &[f64],
) -> DMatrix<f64> {
    DMatrix::from_fn(targets.len(), sources.len(), |i, j| {
        tnormals[i].dot(&grad_s(targets[i] - sources[j])) * sweights[j]
    })
}

/// `B_ij = ν_s(y_j)·∇S(x_i − y_j) w_j`.
pub fn source_normal_block(
    targets: &[Point],
    sources: &[Point],
    snormals: &[Point],
    sweights: &[f64],
) -> DMatrix<f64> {
    DMatrix::from_fn(targets.len(), sources.len(), |i, j| {
        snormals[j].dot(&grad_s(targets[i] - sources[j])) * sweights[j]
    })
}

/// `C_ij = S(x_i − y_j) w_j`.
pub fn single_layer_block(targets: &[Point], sources: &[Point], sweights: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(targets.len(), sources.len(), |i, j| {
        s_kernel(targets[i] - sources[j]) * sweights[j]
    })
}

/// Ordered boundary components of one domain. Normals of each component
/// must point away from the domain.
#[derive(Clone, Debug)]
pub struct BoundarySystem {
    discs: Vec<Arc<Discretization>>,
    offsets: Vec<usize>,
}

impl BoundarySystem {
    pub fn new(discs: Vec<Arc<Discretization>>) -> Result<Self> {
        if discs.is_empty() {
            return Err(Error::InvalidInput("empty boundary system".into()));
        }
        for i in 0..discs.len() {
            for j in (i + 1)..discs.len() {
                let (d, _) = discs[i]
                    .curve()
                    .min_distance(discs[j].curve(), crate::geometry::SAMPLE_RESOLUTION);
                if !(d > 0.0) {
                    return Err(Error::SeparationViolated(format!(
                        "components {i} and {j} intersect"
                    )));
                }
            }
        }
        let mut offsets = vec![0];
        for d in &discs {
            offsets.push(offsets.last().unwrap() + d.n());
        }
        Ok(BoundarySystem { discs, offsets })
    }

    pub fn from_curves(curves: &[Curve], n: usize) -> Result<Self> {
        let discs = curves
            .iter()
            .map(|c| Discretization::shared(c.clone(), n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(discs)
    }

    pub fn discs(&self) -> &[Arc<Discretization>] {
        &self.discs
    }

    pub fn disc(&self, i: usize) -> &Arc<Discretization> {
        &self.discs[i]
    }

    pub fn num_components(&self) -> usize {
        self.discs.len()
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn points(&self) -> Vec<Point> {
        self.discs.iter().flat_map(|d| d.points().to_vec()).collect()
    }

    pub fn normals(&self) -> Vec<Point> {
        self.discs.iter().flat_map(|d| d.normals().to_vec()).collect()
    }

    pub fn arc_weights(&self) -> Vec<f64> {
        self.discs.iter().flat_map(|d| d.arc_weights()).collect()
    }

    /// Refuse points in the close-evaluation band of any component.
    pub fn check_margin(&self, x: Point) -> Result<()> {
        self.discs.iter().try_for_each(|d| d.check_margin(x))
    }

    /// Split a system vector into per-component densities.
    pub fn split(&self, values: &[f64]) -> Vec<Density> {
        self.discs
            .iter()
            .enumerate()
            .map(|(i, d)| Density {
                disc: d.clone(),
                values: values[self.range(i)].to_vec(),
            })
            .collect()
    }

    /// `∮ values dσ` over component `i`.
    pub fn integrate_component(&self, i: usize, values: &[f64]) -> f64 {
        self.discs[i].integrate(&values[self.range(i)])
    }

    /// Indicator of component `i` as a system vector.
    pub fn indicator(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        v[self.range(i)].iter_mut().for_each(|x| *x = 1.0);
        v
    }
}

fn assemble_blocks(
    system: &BoundarySystem,
    mut block: impl FnMut(&Discretization, &Discretization, bool) -> DMatrix<f64>,
) -> DMatrix<f64> {
    let n = system.len();
    let mut a = DMatrix::zeros(n, n);
    for (i, ti) in system.discs().iter().enumerate() {
        for (j, sj) in system.discs().iter().enumerate() {
            let b = block(ti, sj, i == j);
            a.view_mut((system.range(i).start, system.range(j).start), b.shape())
                .copy_from(&b);
        }
    }
    a
}

/// Nyström matrix of `W`.
#[allow(non_snake_case)]
pub fn op_W(system: &BoundarySystem) -> DMatrix<f64> {
    assemble_blocks(system, |t, s, same| {
        let mut b = source_normal_block(t.points(), s.points(), s.normals(), &s.arc_weights());
        b.neg_mut();
        if same {
            let w = t.arc_weights();
            for k in 0..t.n() {
                b[(k, k)] = t.curvatures()[k] / (2.0 * TAU) * w[k];
            }
        }
        b
    })
}

/// Nyström matrix of `W*`.
#[allow(non_snake_case)]
pub fn op_Wstar(system: &BoundarySystem) -> DMatrix<f64> {
    assemble_blocks(system, |t, s, same| {
        let mut b = target_normal_block(t.points(), t.normals(), s.points(), &s.arc_weights());
        if same {
            let w = t.arc_weights();
            for k in 0..t.n() {
                b[(k, k)] = t.curvatures()[k] / (2.0 * TAU) * w[k];
            }
        }
        b
    })
}

/// Matrix of the single layer restricted to the boundary nodes.
#[allow(non_snake_case)]
pub fn op_S(system: &BoundarySystem) -> DMatrix<f64> {
    assemble_blocks(system, |t, s, same| {
        if same {
            single_layer_self_block(t, &kress_weights(t.n()))
        } else {
            single_layer_block(t.points(), s.points(), &s.arc_weights())
        }
    })
}

/// `W` matrix for a single curve.
#[allow(non_snake_case)]
pub fn op_W_single(disc: &Arc<Discretization>) -> DMatrix<f64> {
    op_W(&BoundarySystem::new(vec![disc.clone()]).expect("single component"))
}

/// `W*` matrix for a single curve.
#[allow(non_snake_case)]
pub fn op_Wstar_single(disc: &Arc<Discretization>) -> DMatrix<f64> {
    op_Wstar(&BoundarySystem::new(vec![disc.clone()]).expect("single component"))
}

/// Single layer `v[φ]` off the boundary or at a node of the density's curve.
pub fn eval_single_layer(density: &Density, location: Location) -> Result<f64> {
    let disc = &density.disc;
    let h = disc.weight();
    match location {
        Location::OffBoundary(x) => {
            disc.check_margin(x)?;
            Ok(single_layer_raw(disc, &density.values, x))
        }
        Location::OnBoundary(i) => {
            if i >= disc.n() {
                return Err(Error::InvalidInput(format!("node {i} out of range")));
            }
            let n = disc.n();
            let kress = kress_weights(n);
            let pts = disc.points();
            let sp = disc.speeds();
            let mut acc = 0.0;
            for j in 0..n {
                let m = (i + n - j) % n;
                let smooth = if i == j {
                    sp[i].ln() / TAU
                } else {
                    let d = 0.5 * (disc.params()[i] - disc.params()[j]);
                    s_kernel(pts[i] - pts[j]) - (4.0 * d.sin().powi(2)).ln() / (2.0 * TAU)
                };
                acc += (kress[m] / (2.0 * TAU) + h * smooth) * sp[j] * density.values[j];
            }
            Ok(acc)
        }
    }
}

pub fn single_layer_raw(disc: &Discretization, values: &[f64], x: Point) -> f64 {
    let h = disc.weight();
    disc.points()
        .iter()
        .zip(disc.speeds())
        .zip(values)
        .map(|((y, v), f)| s_kernel(x - y) * f * v * h)
        .sum()
}

pub fn double_layer_raw(disc: &Discretization, values: &[f64], x: Point) -> f64 {
    let h = disc.weight();
    -disc
        .points()
        .iter()
        .zip(disc.normals())
        .zip(disc.speeds())
        .zip(values)
        .map(|(((y, nu), v), f)| nu.dot(&grad_s(x - y)) * f * v * h)
        .sum::<f64>()
}

/// Double layer `w[ψ](x)` at a point off the boundary.
pub fn eval_double_layer(density: &Density, x: Point) -> Result<f64> {
    density.disc.check_margin(x)?;
    Ok(double_layer_raw(&density.disc, &density.values, x))
}

/// `∇v[φ](x)` off the boundary.
pub fn grad_single_layer(density: &Density, x: Point) -> Result<Point> {
    let disc = &density.disc;
    disc.check_margin(x)?;
    let h = disc.weight();
    Ok(disc
        .points()
        .iter()
        .zip(disc.speeds())
        .zip(&density.values)
        .map(|((y, v), f)| grad_s(x - y) * (f * v * h))
        .sum())
}

/// `∇w[ψ](x)` off the boundary.
pub fn grad_double_layer(density: &Density, x: Point) -> Result<Point> {
    let disc = &density.disc;
    disc.check_margin(x)?;
    let h = disc.weight();
    Ok(-disc
        .points()
        .iter()
        .zip(disc.normals())
        .zip(disc.speeds())
        .zip(&density.values)
        .map(|(((y, nu), v), f)| grad_dipole(*nu, x - y) * (f * v * h))
        .sum::<Point>())
}

/// Densities on every component of a [`BoundarySystem`].
#[derive(Clone, Debug)]
pub struct SystemDensity {
    pub system: BoundarySystem,
    pub values: Vec<f64>,
}

impl SystemDensity {
    pub fn new(system: BoundarySystem, values: Vec<f64>) -> Result<Self> {
        if values.len() != system.len() {
            return Err(Error::InvalidInput(format!(
                "system density has {} values for {} nodes",
                values.len(),
                system.len()
            )));
        }
        Ok(SystemDensity { system, values })
    }

    pub fn component(&self, i: usize) -> Density {
        Density {
            disc: self.system.disc(i).clone(),
            values: self.values[self.system.range(i)].to_vec(),
        }
    }

    pub fn integral(&self, i: usize) -> f64 {
        self.system.integrate_component(i, &self.values)
    }

    /// Single layer over all components; `x` must avoid every margin.
    pub fn single_layer(&self, x: Point) -> Result<f64> {
        self.system.check_margin(x)?;
        Ok(self.single_layer_unchecked(x))
    }

    fn single_layer_unchecked(&self, x: Point) -> f64 {
        (0..self.system.num_components())
            .map(|i| single_layer_raw(self.system.disc(i), &self.values[self.system.range(i)], x))
            .sum()
    }

    /// Single layer at node `node` of component `comp`.
    pub fn single_layer_at_node(&self, comp: usize, node: usize) -> Result<f64> {
        let x = self.system.disc(comp).points()[node];
        let mut acc = eval_single_layer(&self.component(comp), Location::OnBoundary(node))?;
        for i in (0..self.system.num_components()).filter(|&i| i != comp) {
            acc += single_layer_raw(self.system.disc(i), &self.values[self.system.range(i)], x);
        }
        Ok(acc)
    }

    pub fn double_layer(&self, x: Point) -> Result<f64> {
        self.system.check_margin(x)?;
        Ok((0..self.system.num_components())
            .map(|i| double_layer_raw(self.system.disc(i), &self.values[self.system.range(i)], x))
            .sum())
    }

    pub fn grad_single_layer(&self, x: Point) -> Result<Point> {
        (0..self.system.num_components())
            .map(|i| grad_single_layer(&self.component(i), x))
            .sum()
    }

    pub fn grad_double_layer(&self, x: Point) -> Result<Point> {
        (0..self.system.num_components())
            .map(|i| grad_double_layer(&self.component(i), x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;

    fn unit_circle(n: usize) -> Arc<Discretization> {
        Discretization::shared(Curve::circle(Point::zeros(), 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn fundamental_solution_values() {
        assert_eq!(fundamental_solution(Point::new(0.0, 1.0)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((fundamental_solution(Point::new(e, 0.0)).unwrap() - 1.0 / TAU).abs() < 1e-15);
        assert!(
            (fundamental_solution(Point::new(0.3, 0.4)).unwrap() + 2f64.ln() / TAU).abs() < 1e-15
        );
        assert!(fundamental_solution(Point::zeros()).is_err());
    }

    #[test]
    fn node_count_rules() {
        let c = Curve::circle(Point::zeros(), 1.0).unwrap();
        assert!(Discretization::new(c.clone(), 14).is_err());
        assert!(Discretization::new(c.clone(), 31).is_err());
        assert!(Discretization::new(c, 16).is_ok());
    }

    #[test]
    fn w_of_one_is_half_on_circle() {
        let w = op_W_single(&unit_circle(64));
        let ws = op_Wstar_single(&unit_circle(64));
        for i in 0..64 {
            let r: f64 = w.row(i).sum();
            let rs: f64 = ws.row(i).sum();
            assert!((r - 0.5).abs() < 1e-13, "{r}");
            assert!((rs - 0.5).abs() < 1e-13, "{rs}");
        }
    }

    #[test]
    fn w_of_one_on_inner_component_of_annulus() {
        let outer = Curve::circle(Point::zeros(), 1.0).unwrap();
        let inner = Curve::ellipse(Point::new(0.1, 0.0), 0.3, 0.2, 0.5)
            .unwrap()
            .with_orientation(Orientation::Negative);
        let sys = BoundarySystem::from_curves(&[outer, inner], 128).unwrap();
        let w = op_W(&sys);
        for i in 0..sys.len() {
            assert!((w.row(i).sum() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn single_layer_of_constant_on_small_circle() {
        let d = Discretization::shared(Curve::circle(Point::new(0.3, -0.2), 0.5).unwrap(), 64)
            .unwrap();
        let one = Density::constant(d, 1.0);
        for i in [0, 17, 40] {
            let v = eval_single_layer(&one, Location::OnBoundary(i)).unwrap();
            assert!((v - 0.5 * 0.5f64.ln()).abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn single_layer_mean_value_property() {
        let one = Density::constant(unit_circle(128), 1.0);
        let out = eval_single_layer(&one, Location::OffBoundary(Point::new(0.0, 2.0))).unwrap();
        assert!((out - 2f64.ln()).abs() < 1e-14);
        let inside = eval_single_layer(&one, Location::OffBoundary(Point::new(0.3, 0.0))).unwrap();
        assert!(inside.abs() < 1e-14);
    }

    #[test]
    fn near_boundary_evaluation_refused() {
        let one = Density::constant(unit_circle(128), 1.0);
        let err = eval_double_layer(&one, Point::new(0.99, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NearSingular { .. }));
        assert!(eval_single_layer(&one, Location::OffBoundary(Point::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn double_layer_gauss_identity() {
        let d = Discretization::shared(
            Curve::star(Point::zeros(), 1.0, vec![0.0, 0.15], vec![0.1]).unwrap(),
            128,
        )
        .unwrap();
        let one = Density::constant(d, 1.0);
        assert!((eval_double_layer(&one, Point::new(0.2, 0.1)).unwrap() - 1.0).abs() < 1e-12);
        assert!(eval_double_layer(&one, Point::new(2.0, 0.5)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn double_layer_of_cosine() {
        let d = unit_circle(64);
        let psi = Density::new(d.clone(), d.params().iter().map(|s| s.cos()).collect()).unwrap();
        let v = eval_double_layer(&psi, Point::new(0.5, 0.0)).unwrap();
        assert!((v - 0.25).abs() < 1e-13, "{v}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let d = Discretization::shared(Curve::ellipse(Point::zeros(), 1.0, 0.6, 0.2).unwrap(), 96)
            .unwrap();
        let f = Density::new(d.clone(), d.params().iter().map(|s| 1.0 + (2.0 * s).sin()).collect())
            .unwrap();
        let x = Point::new(0.2, -0.1);
        let h = 1e-5;
        let e = [Point::new(h, 0.0), Point::new(0.0, h)];
        let gs = grad_single_layer(&f, x).unwrap();
        let gd = grad_double_layer(&f, x).unwrap();
        for k in 0..2 {
            let fs = (eval_single_layer(&f, Location::OffBoundary(x + e[k])).unwrap()
                - eval_single_layer(&f, Location::OffBoundary(x - e[k])).unwrap())
                / (2.0 * h);
            let fd = (eval_double_layer(&f, x + e[k]).unwrap()
                - eval_double_layer(&f, x - e[k]).unwrap())
                / (2.0 * h);
            assert!((fs - gs[k]).abs() < 1e-8);
            assert!((fd - gd[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn kress_weights_sum() {
        // ∫ log(4 sin²(t/2)) dt = 0 over a period.
        for n in [16, 64, 128] {
            let s: f64 = kress_weights(n).iter().sum();
            assert!(s.abs() < 1e-12, "{n}: {s}");
        }
    }
}
