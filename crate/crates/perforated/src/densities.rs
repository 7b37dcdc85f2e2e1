//! The rescaled density systems on the reference curves.
//!
//! Unknowns are ordered `[∂Ω° | ∂Ω₁ | ∂Ω₂]`. Reference hole curves carry
//! their own outward normals. Kernels are written with the arguments
//! `x − ε₁pʰ − ε₁ε₂η` and `pʰ − pᵏ + ε₂(ξ − η)`, so the same assembly is
//! valid at ε₁ = 0 or ε₂ = 0. The degenerate regimes are nevertheless solved
//! through their own decoupled systems, which gives a second route to
//! compare against.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{
    scaled_hole, tilde_domain, BoundaryData, EpsilonPair, Orientation, Point, ProblemConfig,
    Regime,
};
use crate::linalg::{residual, Factored};
use crate::potentials::{
    grad_s, op_W_single, op_Wstar, op_Wstar_single, source_normal_block, target_normal_block,
    BoundarySystem, Density, Discretization, SystemDensity, DEFAULT_NODES,
};

/// Residual tolerance (relative) adopted as the uniqueness contract.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Tolerance on the orthogonality of the L right-hand side.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// Node counts for the outer curve and for each hole curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NodeCounts {
    pub outer: usize,
    pub hole: usize,
}

impl NodeCounts {
    pub fn uniform(n: usize) -> Self {
        NodeCounts { outer: n, hole: n }
    }

    /// `n` nodes per hole; the outer curve gets at least `n` nodes and no
    /// coarser spacing than `n` nodes on a circle of radius 2.
    pub fn for_config(config: &ProblemConfig, n: usize) -> Self {
        let perimeter = Discretization::new(config.outer.clone(), 64)
            .map(|d| d.length())
            .unwrap_or(TAU);
        let scaled = (n as f64 * perimeter / (2.0 * TAU)).ceil() as usize;
        let outer = scaled.max(n).div_ceil(2) * 2;
        NodeCounts { outer, hole: n }
    }
}

impl Default for NodeCounts {
    fn default() -> Self {
        NodeCounts::uniform(DEFAULT_NODES)
    }
}

/// Discretized reference curves ∂Ω°, ∂Ω₁, ∂Ω₂ and the points p¹, p².
#[derive(Clone, Debug)]
pub struct ReferenceGeometry {
    pub outer: Arc<Discretization>,
    pub holes: [Arc<Discretization>; 2],
    pub p: [Point; 2],
    pub nodes: NodeCounts,
}

impl ReferenceGeometry {
    pub fn new(config: &ProblemConfig, nodes: NodeCounts) -> Result<Self> {
        Ok(ReferenceGeometry {
            outer: Discretization::shared(config.outer.clone(), nodes.outer)?,
            holes: [
                Discretization::shared(config.hole1.clone(), nodes.hole)?,
                Discretization::shared(config.hole2.clone(), nodes.hole)?,
            ],
            p: [config.p1, config.p2],
            nodes,
        })
    }

    pub fn hole(&self, h: usize) -> &Arc<Discretization> {
        &self.holes[h - 1]
    }

    pub fn p(&self, h: usize) -> Point {
        self.p[h - 1]
    }

    /// Total unknowns `n° + n₁ + n₂`.
    pub fn size(&self) -> usize {
        self.outer.n() + self.holes[0].n() + self.holes[1].n()
    }

    /// Index range of component 0 (outer), 1 or 2 (holes).
    pub fn range(&self, comp: usize) -> std::ops::Range<usize> {
        let no = self.outer.n();
        let n1 = self.holes[0].n();
        match comp {
            0 => 0..no,
            1 => no..no + n1,
            2 => no + n1..self.size(),
            _ => panic!("component index {comp}"),
        }
    }

    /// `ε₁pʰ + ε₁ε₂ξ` at the nodes of reference hole `h`.
    pub fn micro_points(&self, h: usize, eps: EpsilonPair) -> Vec<Point> {
        let c = eps.eps1 * self.p(h);
        let s = eps.product();
        self.hole(h).points().iter().map(|xi| c + s * xi).collect()
    }

    /// `pʰ + ε₂ξ` at the nodes of reference hole `h`.
    pub fn tilde_points(&self, h: usize, eps2: f64) -> Vec<Point> {
        let p = self.p(h);
        self.hole(h).points().iter().map(|xi| p + eps2 * xi).collect()
    }

    /// Boundary of the physical domain Ω(ε₁,ε₂), with hole nodes at the
    /// images of the reference nodes.
    pub fn physical_system(&self, config: &ProblemConfig, eps: EpsilonPair) -> Result<BoundarySystem> {
        let mut discs = vec![self.outer.clone()];
        for h in [1, 2] {
            let curve = scaled_hole(config, h, eps)?.with_orientation(Orientation::Negative);
            discs.push(Discretization::shared(curve, self.hole(h).n())?);
        }
        BoundarySystem::new(discs)
    }

    fn sample_data(&self, config: &ProblemConfig) -> [Vec<f64>; 3] {
        [
            self.outer.sample(&config.f_outer),
            self.holes[0].sample(&config.f_hole1),
            self.holes[1].sample(&config.f_hole2),
        ]
    }
}

fn add_identity(a: &mut DMatrix<f64>, range: std::ops::Range<usize>, c: f64) {
    for i in range {
        a[(i, i)] += c;
    }
}

fn place(a: &mut DMatrix<f64>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, b: &DMatrix<f64>) {
    a.view_mut((rows.start, cols.start), (rows.len(), cols.len()))
        .copy_from(b);
}

fn bordered(a: &DMatrix<f64>, rows: &[Vec<f64>], cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = a.nrows();
    let k = rows.len();
    let mut m = DMatrix::zeros(n + k, n + k);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    for j in 0..k {
        for c in 0..n {
            m[(n + j, c)] = rows[j][c];
            m[(c, n + j)] = cols[j][c];
        }
    }
    m
}

fn mean_row(size: usize, range: std::ops::Range<usize>, disc: &Discretization) -> Vec<f64> {
    let mut row = vec![0.0; size];
    let len = disc.length();
    for (r, w) in range.zip(disc.arc_weights()) {
        row[r] = w / len;
    }
    row
}

fn indicator(size: usize, range: std::ops::Range<usize>) -> Vec<f64> {
    let mut v = vec![0.0; size];
    for r in range {
        v[r] = 1.0;
    }
    v
}

/// The operator part of M_i (identical for i = 1, 2), assembled from the
/// general formula at any (ε₁, ε₂).
pub fn assemble_m_operator(geom: &ReferenceGeometry, eps: EpsilonPair) -> DMatrix<f64> {
    let n = geom.size();
    let (e1, e2) = (eps.eps1, eps.eps2);
    let mut a = DMatrix::zeros(n, n);
    let out = &geom.outer;
    let ow = out.arc_weights();
    place(&mut a, geom.range(0), geom.range(0), &op_Wstar_single(out));
    add_identity(&mut a, geom.range(0), 0.5);
    for h in [1, 2] {
        let hole = geom.hole(h);
        let hw = hole.arc_weights();
        let z = geom.micro_points(h, eps);
        // ν°(x)·∇S(x − ε₁pʰ − ε₁ε₂η)
        place(
            &mut a,
            geom.range(0),
            geom.range(h),
            &target_normal_block(out.points(), out.normals(), &z, &hw),
        );
        place(&mut a, geom.range(h), geom.range(h), &op_Wstar_single(hole));
        add_identity(&mut a, geom.range(h), -0.5);
        // ε₂ νʰ(ξ)·∇S(pʰ − pᵏ + ε₂(ξ − η))
        let k = 3 - h;
        let b = target_normal_block(
            &geom.tilde_points(h, e2),
            hole.normals(),
            &geom.tilde_points(k, e2),
            &geom.hole(k).arc_weights(),
        ) * e2;
        place(&mut a, geom.range(h), geom.range(k), &b);
        // ε₁ε₂ νʰ(ξ)·∇S(ε₁pʰ + ε₁ε₂ξ − y)
        let c = target_normal_block(&z, hole.normals(), out.points(), &ow) * (e1 * e2);
        place(&mut a, geom.range(h), geom.range(0), &c);
    }
    a
}

/// The density triple (ρ°_i, ρ_{i,1}, ρ_{i,2}).
#[derive(Clone, Debug)]
pub struct RhoTriple {
    pub i: usize,
    pub rho_o: Density,
    pub rho_h: [Density; 2],
    pub eps: EpsilonPair,
    /// Largest residual of the defining equations, relative to the
    /// largest density value.
    pub residual: f64,
}

impl RhoTriple {
    /// ρ_{i,j} (1-based `j`).
    pub fn hole(&self, j: usize) -> &Density {
        &self.rho_h[j - 1]
    }

    /// `∮_{∂Ω_j} ρ_{i,j} dσ` by re-quadrature.
    pub fn mass(&self, j: usize) -> f64 {
        self.hole(j).integral()
    }

    pub fn as_vector(&self) -> Vec<f64> {
        let mut v = self.rho_o.values.clone();
        v.extend(&self.rho_h[0].values);
        v.extend(&self.rho_h[1].values);
        v
    }

    fn from_vector(geom: &ReferenceGeometry, i: usize, eps: EpsilonPair, v: &[f64]) -> Self {
        RhoTriple {
            i,
            rho_o: Density {
                disc: geom.outer.clone(),
                values: v[geom.range(0)].to_vec(),
            },
            rho_h: [
                Density {
                    disc: geom.holes[0].clone(),
                    values: v[geom.range(1)].to_vec(),
                },
                Density {
                    disc: geom.holes[1].clone(),
                    values: v[geom.range(2)].to_vec(),
                },
            ],
            eps,
            residual: f64::NAN,
        }
    }
}

fn rel_scale(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

/// Residual of the general M_i display, relative to the density size.
pub fn m_residual(geom: &ReferenceGeometry, rho: &RhoTriple) -> f64 {
    let a = assemble_m_operator(geom, rho.eps);
    let v = rho.as_vector();
    let res = residual(&a, &v, &vec![0.0; v.len()]);
    let mass = (1..=2)
        .map(|j| (rho.mass(j) - if j == rho.i { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    (res / rel_scale(&v)).max(mass)
}

/// Solves `(−½I + W*)ρ = 0` on a system of positively oriented curves,
/// with `∮_{curve j} ρ_i dσ = δ_ij`.
pub fn exterior_kernel_basis(system: &BoundarySystem) -> Result<Vec<SystemDensity>> {
    let n = system.len();
    let k = system.num_components();
    let mut a = op_Wstar(system);
    add_identity(&mut a, 0..n, -0.5);
    let rows: Vec<_> = (0..k)
        .map(|j| mean_row(n, system.range(j), system.disc(j)))
        .collect();
    let cols: Vec<_> = (0..k).map(|j| indicator(n, system.range(j))).collect();
    let lu = Factored::new(bordered(&a, &rows, &cols), "kernel of −½I + W*")?;
    (0..k)
        .map(|i| {
            let mut rhs = vec![0.0; n + k];
            rhs[n + i] = 1.0 / system.disc(i).length();
            let x = lu.solve(&rhs)?;
            SystemDensity::new(system.clone(), x[..n].to_vec())
        })
        .collect()
}

/// The densities ρ̃₁, ρ̃₂ on Ω̃(ε₂).
#[derive(Clone, Debug)]
pub struct TildeRho {
    pub eps2: f64,
    pub pair: BoundarySystem,
    pub p: [Point; 2],
    pub rho: [SystemDensity; 2],
}

/// Ω̃(ε₂) as an exterior boundary system with `n` nodes per curve.
pub fn tilde_system(config: &ProblemConfig, eps2: f64, n: usize) -> Result<BoundarySystem> {
    let (c1, c2) = tilde_domain(config, eps2)?;
    BoundarySystem::from_curves(&[c1, c2], n)
}

pub fn tilde_rho(config: &ProblemConfig, eps2: f64, n: usize) -> Result<TildeRho> {
    let pair = tilde_system(config, eps2, n)?;
    let mut basis = exterior_kernel_basis(&pair)?;
    let r2 = basis.pop().expect("two curves");
    let r1 = basis.pop().expect("two curves");
    Ok(TildeRho {
        eps2,
        pair,
        p: [config.p1, config.p2],
        rho: [r1, r2],
    })
}

/// Solves `(½I + W*)ρ° = −ν·∇S(· − c)` on the outer curve.
fn outer_rho(outer: &Arc<Discretization>, c: Point) -> Result<Vec<f64>> {
    let mut a = op_Wstar_single(outer);
    add_identity(&mut a, 0..outer.n(), 0.5);
    let rhs: Vec<f64> = outer
        .points()
        .iter()
        .zip(outer.normals())
        .map(|(x, nu)| -nu.dot(&grad_s(x - c)))
        .collect();
    Factored::new(a, "½I + W* on the outer curve")?.solve(&rhs)
}

/// Both triples ρ₁, ρ₂ at `eps`, dispatched on the regime.
pub fn solve_m_pair(
    config: &ProblemConfig,
    geom: &ReferenceGeometry,
    eps: EpsilonPair,
) -> Result<[RhoTriple; 2]> {
    let n = geom.size();
    let mut triples = match eps.regime() {
        Regime::Generic => {
            let a = assemble_m_operator(geom, eps);
            let rows: Vec<_> = (1..=2)
                .map(|j| mean_row(n, geom.range(j), geom.hole(j)))
                .collect();
            let cols: Vec<_> = (1..=2).map(|j| indicator(n, geom.range(j))).collect();
            let lu = Factored::new(bordered(&a, &rows, &cols), "M_i system")?;
            let mut out = Vec::new();
            for i in 1..=2 {
                let mut rhs = vec![0.0; n + 2];
                rhs[n + i - 1] = 1.0 / geom.hole(i).length();
                let x = lu.solve(&rhs)?;
                out.push(RhoTriple::from_vector(geom, i, eps, &x[..n]));
            }
            out
        }
        Regime::Eps2Zero | Regime::BothZero => {
            let mut hole_rho = Vec::new();
            for h in [1, 2] {
                let sys = BoundarySystem::new(vec![geom.hole(h).clone()])?;
                hole_rho.push(exterior_kernel_basis(&sys)?.remove(0).values);
            }
            let mut out = Vec::new();
            for i in 1..=2 {
                let mut v = outer_rho(&geom.outer, eps.eps1 * geom.p(i))?;
                for h in [1, 2] {
                    if h == i {
                        v.extend(&hole_rho[h - 1]);
                    } else {
                        v.extend(std::iter::repeat_n(0.0, geom.hole(h).n()));
                    }
                }
                out.push(RhoTriple::from_vector(geom, i, eps, &v));
            }
            out
        }
        Regime::Eps1Zero => {
            let tilde = tilde_rho(config, eps.eps2, geom.nodes.hole)?;
            let outer = outer_rho(&geom.outer, Point::zeros())?;
            let scale = eps.eps2.abs();
            let mut out = Vec::new();
            for i in 1..=2 {
                let mut v = outer.clone();
                v.extend(tilde.rho[i - 1].values.iter().map(|r| scale * r));
                out.push(RhoTriple::from_vector(geom, i, eps, &v));
            }
            out
        }
    };
    for t in triples.iter_mut() {
        t.residual = m_residual(geom, t);
        if !(t.residual < 1e3 * SOLVER_TOLERANCE) {
            return Err(Error::Singular(format!(
                "ρ_{} residual {:.2e} at {:?}",
                t.i, t.residual, eps
            )));
        }
    }
    let [a, b]: [RhoTriple; 2] = triples.try_into().expect("two triples");
    Ok([a, b])
}

/// The triple ρ_i at `eps`.
pub fn solve_m(config: &ProblemConfig, geom: &ReferenceGeometry, eps: EpsilonPair, i: usize) -> Result<RhoTriple> {
    if !(i == 1 || i == 2) {
        return Err(Error::InvalidInput(format!("M index {i}")));
    }
    let [a, b] = solve_m_pair(config, geom, eps)?;
    Ok(if i == 1 { a } else { b })
}

/// τ_i on the physical boundary: ρ°_i on ∂Ω°, ρ_{i,h}/|ε₁ε₂| on the holes.
pub fn pushforward_tau(rho: &RhoTriple) -> Vec<f64> {
    let s = rho.eps.product().abs();
    let mut v = rho.rho_o.values.clone();
    for h in 0..2 {
        v.extend(rho.rho_h[h].values.iter().map(|r| r / s));
    }
    v
}

/// The triple (θ°, θ₁, θ₂).
#[derive(Clone, Debug)]
pub struct ThetaTriple {
    pub theta_o: Density,
    pub theta_h: [Density; 2],
    pub eps: EpsilonPair,
    pub residual: f64,
}

impl ThetaTriple {
    pub fn hole(&self, h: usize) -> &Density {
        &self.theta_h[h - 1]
    }

    pub fn as_vector(&self) -> Vec<f64> {
        let mut v = self.theta_o.values.clone();
        v.extend(&self.theta_h[0].values);
        v.extend(&self.theta_h[1].values);
        v
    }

    pub fn from_vector(geom: &ReferenceGeometry, eps: EpsilonPair, v: &[f64]) -> Self {
        ThetaTriple {
            theta_o: Density {
                disc: geom.outer.clone(),
                values: v[geom.range(0)].to_vec(),
            },
            theta_h: [
                Density {
                    disc: geom.holes[0].clone(),
                    values: v[geom.range(1)].to_vec(),
                },
                Density {
                    disc: geom.holes[1].clone(),
                    values: v[geom.range(2)].to_vec(),
                },
            ],
            eps,
            residual: f64::NAN,
        }
    }
}

/// The θ-linear part of L, assembled from the general formula.
pub fn assemble_l_operator(geom: &ReferenceGeometry, eps: EpsilonPair) -> DMatrix<f64> {
    let n = geom.size();
    let (e1, e2) = (eps.eps1, eps.eps2);
    let mut a = DMatrix::zeros(n, n);
    let out = &geom.outer;
    let ow = out.arc_weights();
    place(&mut a, geom.range(0), geom.range(0), &op_W_single(out));
    add_identity(&mut a, geom.range(0), 0.5);
    for h in [1, 2] {
        let hole = geom.hole(h);
        let z = geom.micro_points(h, eps);
        // ε₁ε₂ ∮ νʰ(η)·∇S(x − ε₁pʰ − ε₁ε₂η) θ_h(η) dσ_η
        let b = source_normal_block(out.points(), &z, hole.normals(), &hole.arc_weights()) * (e1 * e2);
        place(&mut a, geom.range(0), geom.range(h), &b);
        place(&mut a, geom.range(h), geom.range(h), &op_W_single(hole));
        add_identity(&mut a, geom.range(h), -0.5);
        // −w_{Ω°}[θ°](ε₁pʰ + ε₁ε₂ξ)
        let c = source_normal_block(&z, out.points(), out.normals(), &ow);
        place(&mut a, geom.range(h), geom.range(0), &c);
        // −ε₂ ∮ νᵏ(η)·∇S(pʰ − pᵏ + ε₂(ξ − η)) θ_k(η) dσ_η
        let k = 3 - h;
        let d = source_normal_block(
            &geom.tilde_points(h, e2),
            &geom.tilde_points(k, e2),
            geom.hole(k).normals(),
            &geom.hole(k).arc_weights(),
        ) * (-e2);
        place(&mut a, geom.range(h), geom.range(k), &d);
    }
    a
}

/// F_j = ∮ f°ρ°_j + Σ_h ∮ f_h ρ_{j,h}.
pub fn f_moments(data: &[Vec<f64>; 3], rho: &[RhoTriple; 2]) -> [f64; 2] {
    let f = |j: usize| {
        let r = &rho[j];
        let inner = |d: &Density, v: &[f64]| d.disc.integrate(&d.values.iter().zip(v).map(|(a, b)| a * b).collect::<Vec<_>>());
        inner(&r.rho_o, &data[0]) + inner(&r.rho_h[0], &data[1]) + inner(&r.rho_h[1], &data[2])
    };
    [f(0), f(1)]
}

/// The data-dependent part of L: `L = A·θ − rhs`.
fn l_rhs(geom: &ReferenceGeometry, data: &[Vec<f64>; 3], big_f: [f64; 2]) -> Vec<f64> {
    let mut rhs = data[0].clone();
    for h in [1, 2] {
        rhs.extend(data[h].iter().map(|f| big_f[h - 1] - f));
    }
    debug_assert_eq!(rhs.len(), geom.size());
    rhs
}

/// Evaluate L[ε, θ] at the nodes.
pub fn l_map(
    geom: &ReferenceGeometry,
    config: &ProblemConfig,
    rho: &[RhoTriple; 2],
    theta: &ThetaTriple,
) -> Vec<f64> {
    let data = geom.sample_data(config);
    let big_f = f_moments(&data, rho);
    let a = assemble_l_operator(geom, theta.eps);
    let at = &a * DVector::from_column_slice(&theta.as_vector());
    let rhs = l_rhs(geom, &data, big_f);
    at.iter().zip(&rhs).map(|(l, r)| l - r).collect()
}

/// `∮ L°ρ°_h − Σ_k ∮ L_k ρ_{h,k}` for h = 1, 2.
pub fn l_orthogonality(geom: &ReferenceGeometry, rho: &[RhoTriple; 2], l: &[f64]) -> [f64; 2] {
    let g = |h: usize| {
        let r = &rho[h];
        let part = |comp: usize, d: &Density| {
            d.disc.integrate(
                &l[geom.range(comp)]
                    .iter()
                    .zip(&d.values)
                    .map(|(a, b)| a * b)
                    .collect::<Vec<_>>(),
            )
        };
        part(0, &r.rho_o) - part(1, &r.rho_h[0]) - part(2, &r.rho_h[1])
    };
    [g(0), g(1)]
}

fn solve_bordered_mean_zero(
    a: &DMatrix<f64>,
    rhs: &[f64],
    constrained: &[(std::ops::Range<usize>, &Discretization)],
    what: &str,
) -> Result<Vec<f64>> {
    let n = a.nrows();
    let rows: Vec<_> = constrained
        .iter()
        .map(|(r, d)| mean_row(n, r.clone(), d))
        .collect();
    let cols: Vec<_> = constrained.iter().map(|(r, _)| indicator(n, r.clone())).collect();
    let lu = Factored::new(bordered(a, &rows, &cols), what)?;
    let mut b = rhs.to_vec();
    b.extend(std::iter::repeat_n(0.0, constrained.len()));
    Ok(lu.solve(&b)?[..n].to_vec())
}

/// θ at `eps`, dispatched on the regime. `rho` must be at the same `eps`.
pub fn solve_l(
    config: &ProblemConfig,
    geom: &ReferenceGeometry,
    rho: &[RhoTriple; 2],
) -> Result<ThetaTriple> {
    let eps = rho[0].eps;
    if rho[1].eps != eps {
        return Err(Error::Regime("ρ triples at different ε".into()));
    }
    let data = geom.sample_data(config);
    let big_f = f_moments(&data, rho);
    let rhs = l_rhs(geom, &data, big_f);

    // The right-hand side must lie in the range of L's θ-part.
    let ortho = l_orthogonality(geom, rho, &rhs);
    let scale = rel_scale(&rhs);
    if ortho.iter().any(|g| g.abs() > ORTHOGONALITY_TOLERANCE * scale) {
        return Err(Error::Inconsistent(format!(
            "L right-hand side violates orthogonality: {ortho:?}"
        )));
    }

    let theta = match eps.regime() {
        Regime::Generic => {
            let a = assemble_l_operator(geom, eps);
            solve_bordered_mean_zero(
                &a,
                &rhs,
                &[(geom.range(1), geom.hole(1)), (geom.range(2), geom.hole(2))],
                "L system",
            )?
        }
        Regime::Eps2Zero | Regime::BothZero => {
            let mut a = op_W_single(&geom.outer);
            add_identity(&mut a, 0..geom.outer.n(), 0.5);
            let mut v = Factored::new(a, "½I + W on the outer curve")?.solve(&data[0])?;
            for h in [1, 2] {
                let hole = geom.hole(h);
                let mut a = op_W_single(hole);
                add_identity(&mut a, 0..hole.n(), -0.5);
                let moment = rho[h - 1].hole(h).inner(&Density {
                    disc: hole.clone(),
                    values: data[h].clone(),
                });
                let r: Vec<f64> = data[h].iter().map(|f| moment - f).collect();
                v.extend(solve_bordered_mean_zero(
                    &a,
                    &r,
                    &[(0..hole.n(), hole.as_ref())],
                    "−½I + W on a hole",
                )?);
            }
            v
        }
        Regime::Eps1Zero => {
            let mut a = op_W_single(&geom.outer);
            add_identity(&mut a, 0..geom.outer.n(), 0.5);
            let mut v = Factored::new(a, "½I + W on the outer curve")?.solve(&data[0])?;
            let tilde = tilde_rho(config, eps.eps2, geom.nodes.hole)?;
            let pair = &tilde.pair;
            let np = pair.len();
            let mut a = crate::potentials::op_W(pair);
            add_identity(&mut a, 0..np, -0.5);
            let f_tilde: Vec<f64> = data[1].iter().chain(&data[2]).copied().collect();
            let moments: Vec<f64> = tilde
                .rho
                .iter()
                .map(|r| {
                    let w = pair.arc_weights();
                    r.values.iter().zip(&f_tilde).zip(&w).map(|((a, b), c)| a * b * c).sum()
                })
                .collect();
            let mut r: Vec<f64> = f_tilde.iter().map(|f| -f).collect();
            for h in 0..2 {
                for idx in pair.range(h) {
                    r[idx] += moments[h];
                }
            }
            v.extend(solve_bordered_mean_zero(
                &a,
                &r,
                &[(pair.range(0), pair.disc(0).as_ref()), (pair.range(1), pair.disc(1).as_ref())],
                "Ω̃ double-layer system",
            )?);
            v
        }
    };
    let mut triple = ThetaTriple::from_vector(geom, eps, &theta);
    let l = l_map(geom, config, rho, &triple);
    let mean = (1..=2).map(|h| triple.hole(h).mean().abs()).fold(0.0, f64::max);
    triple.residual = (l.iter().fold(0.0f64, |m, v| m.max(v.abs())) / rel_scale(&theta)).max(mean);
    if !(triple.residual < 1e3 * SOLVER_TOLERANCE) {
        return Err(Error::Singular(format!(
            "θ residual {:.2e} at {eps:?}",
            triple.residual
        )));
    }
    Ok(triple)
}

/// Boundary data sampled on the reference curves.
pub fn sampled_data(geom: &ReferenceGeometry, config: &ProblemConfig) -> [Vec<f64>; 3] {
    geom.sample_data(config)
}

/// Datum on the physical boundary matching the reference-node layout.
pub fn physical_data(geom: &ReferenceGeometry, config: &ProblemConfig) -> Vec<f64> {
    let [a, b, c] = geom.sample_data(config);
    a.into_iter().chain(b).chain(c).collect()
}

/// Constant datum helper for tests and examples.
pub fn constant_data(config: &ProblemConfig, c: f64) -> ProblemConfig {
    config.with_data(
        BoundaryData::Constant(c),
        BoundaryData::Constant(c),
        BoundaryData::Constant(c),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    fn twin(n: usize) -> (ProblemConfig, ReferenceGeometry) {
        let cfg = fixtures::fix_twin_smooth();
        let geom = ReferenceGeometry::new(&cfg, NodeCounts::for_config(&cfg, n)).unwrap();
        (cfg, geom)
    }

    #[test]
    fn node_counts_scale_with_outer_perimeter() {
        let cfg = fixtures::fix_twin();
        assert_eq!(NodeCounts::for_config(&cfg, 128), NodeCounts { outer: 256, hole: 128 });
    }

    #[test]
    fn generic_rho_masses_and_residual() {
        let (cfg, geom) = twin(64);
        let rho = solve_m_pair(&cfg, &geom, EpsilonPair::new(0.3, 0.5)).unwrap();
        for (i, r) in rho.iter().enumerate() {
            for j in 1..=2 {
                let expect = if i + 1 == j { 1.0 } else { 0.0 };
                assert!((r.mass(j) - expect).abs() < 1e-12);
            }
            assert!(r.residual < 1e-12, "{}", r.residual);
        }
    }

    #[test]
    fn eps2_zero_rho_is_uniform_on_circles() {
        let (cfg, geom) = twin(64);
        let rho = solve_m_pair(&cfg, &geom, EpsilonPair::new(0.2, 0.0)).unwrap();
        for r in &rho {
            for v in &r.hole(r.i).values {
                assert!((v - 1.0 / TAU).abs() < 1e-12);
            }
            assert!(r.hole(3 - r.i).values.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn theta_generic_residual_and_zero_mean() {
        let (cfg, geom) = twin(64);
        let rho = solve_m_pair(&cfg, &geom, EpsilonPair::new(0.3, 0.5)).unwrap();
        let theta = solve_l(&cfg, &geom, &rho).unwrap();
        assert!(theta.residual < 1e-11, "{}", theta.residual);
    }

    #[test]
    fn degenerate_regimes_satisfy_general_formula() {
        let (cfg, geom) = twin(64);
        for eps in [EpsilonPair::new(0.2, 0.0), EpsilonPair::new(0.0, 0.5), EpsilonPair::new(0.0, 0.0)] {
            let rho = solve_m_pair(&cfg, &geom, eps).unwrap();
            let theta = solve_l(&cfg, &geom, &rho).unwrap();
            assert!(theta.residual < 1e-11, "{eps:?}: {}", theta.residual);
        }
    }

    #[test]
    fn pushforward_matches_physical_tau_basis() {
        let (cfg, geom) = twin(64);
        let eps = EpsilonPair::new(0.3, 0.5);
        let rho = solve_m_pair(&cfg, &geom, eps).unwrap();
        let sys = geom.physical_system(&cfg, eps).unwrap();
        let basis = crate::dirichlet::tau_basis(&sys).unwrap();
        for i in 0..2 {
            let tau = pushforward_tau(&rho[i]);
            let err = tau
                .iter()
                .zip(&basis.tau[i].values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9 * rel_scale(&tau), "τ_{}: {err:.2e}", i + 1);
        }
    }

    #[test]
    fn theta_matches_direct_double_layer_density() {
        let (cfg, geom) = twin(64);
        let eps = EpsilonPair::new(0.3, -0.5);
        let rho = solve_m_pair(&cfg, &geom, eps).unwrap();
        let theta = solve_l(&cfg, &geom, &rho).unwrap();
        let sys = geom.physical_system(&cfg, eps).unwrap();
        let field = crate::dirichlet::InteriorSolver::new(&sys)
            .unwrap()
            .solve_values(&physical_data(&geom, &cfg))
            .unwrap();
        let crate::dirichlet::Representation::InteriorDoubleLayer { mu, .. } = &field.representation
        else {
            panic!("interior field");
        };
        let err = theta
            .as_vector()
            .iter()
            .zip(&mu.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err:.2e}");
    }

    #[test]
    fn generic_solution_approaches_degenerate_regimes() {
        let (cfg, geom) = twin(64);
        for (near, at) in [
            (EpsilonPair::new(1e-7, 0.5), EpsilonPair::new(0.0, 0.5)),
            (EpsilonPair::new(0.3, 1e-7), EpsilonPair::new(0.3, 0.0)),
        ] {
            let a = solve_m_pair(&cfg, &geom, near).unwrap();
            let b = solve_m_pair(&cfg, &geom, at).unwrap();
            let ta = solve_l(&cfg, &geom, &a).unwrap().as_vector();
            let tb = solve_l(&cfg, &geom, &b).unwrap().as_vector();
            for i in 0..2 {
                let d = a[i]
                    .as_vector()
                    .iter()
                    .zip(b[i].as_vector())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(d < 1e-5, "ρ_{} at {near:?}: {d:.2e}", i + 1);
            }
            let d = ta.iter().zip(&tb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d < 1e-5, "θ at {near:?}: {d:.2e}");
        }
    }

    #[test]
    fn l_map_is_orthogonal_for_arbitrary_theta() {
        let (cfg, geom) = twin(64);
        let eps = EpsilonPair::new(0.4, 0.6);
        let rho = solve_m_pair(&cfg, &geom, eps).unwrap();
        let v: Vec<f64> = (0..geom.size()).map(|k| (k as f64 * 0.37).sin()).collect();
        let theta = ThetaTriple::from_vector(&geom, eps, &v);
        let l = l_map(&geom, &cfg, &rho, &theta);
        for g in l_orthogonality(&geom, &rho, &l) {
            assert!(g.abs() < 1e-10, "{g:.2e}");
        }
    }
}
