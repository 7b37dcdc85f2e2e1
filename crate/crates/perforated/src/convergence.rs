//! Closed-form oracle cases and error-versus-n tables.

use std::f64::consts::TAU;

use nalgebra::DVector;
use serde::Serialize;

use crate::dirichlet::{ExteriorSingleSolver, InteriorSolver};
use crate::error::Result;
use crate::geometry::{Curve, Orientation, Point};
use crate::potentials::{op_S, op_W, s_kernel, BoundarySystem, Discretization};

/// Oracle problems with exact solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleCase {
    /// Annulus 0.2 < |x| < 1 with data `log|x − z|`, `z` outside near the
    /// outer circle; the solution is `log|x − z|` itself.
    AnnulusSource,
    /// Annulus 0.25 < |x| < 1 with data 0 outside, 1 inside; the
    /// solution is `log|x| / log 0.25`.
    AnnulusRadial,
    /// On-boundary single layer of `1/(a − cos s)` on the unit circle,
    /// which equals `log|1 − r e^{is}| / √(a²−1)` with `r = a − √(a²−1)`.
    KressSingleLayer,
    /// Unit-disk Green function against the image formula at 10 pairs.
    DiskGreen,
    /// Limits at infinity of exterior solutions on an off-centre circle.
    ExteriorCircle,
    /// `W[1] = ½` on the unit circle.
    GaussIdentity,
}

impl OracleCase {
    pub const ALL: [OracleCase; 6] = [
        OracleCase::AnnulusSource,
        OracleCase::AnnulusRadial,
        OracleCase::KressSingleLayer,
        OracleCase::DiskGreen,
        OracleCase::ExteriorCircle,
        OracleCase::GaussIdentity,
    ];

    /// The cases whose errors must decay spectrally.
    pub const ANALYTIC: [OracleCase; 2] = [OracleCase::AnnulusSource, OracleCase::KressSingleLayer];

    pub fn name(self) -> &'static str {
        match self {
            OracleCase::AnnulusSource => "annulus_source",
            OracleCase::AnnulusRadial => "annulus_radial",
            OracleCase::KressSingleLayer => "kress_single_layer",
            OracleCase::DiskGreen => "disk_green",
            OracleCase::ExteriorCircle => "exterior_circle",
            OracleCase::GaussIdentity => "gauss_identity",
        }
    }

    /// Largest absolute error against the exact answer with `n` nodes per
    /// curve.
    pub fn error(self, n: usize) -> Result<f64> {
        match self {
            OracleCase::AnnulusSource => annulus_source(n),
            OracleCase::AnnulusRadial => annulus_radial(n),
            OracleCase::KressSingleLayer => kress_single_layer(n),
            OracleCase::DiskGreen => disk_green(n),
            OracleCase::ExteriorCircle => exterior_circle(n),
            OracleCase::GaussIdentity => gauss_identity(n),
        }
    }
}

fn annulus(inner: f64, n: usize) -> Result<BoundarySystem> {
    let outer = Curve::circle(Point::zeros(), 1.0)?;
    let hole = Curve::circle(Point::zeros(), inner)?.with_orientation(Orientation::Negative);
    BoundarySystem::from_curves(&[outer, hole], n)
}

fn ring(radius: f64, count: usize, phase: f64) -> impl Iterator<Item = Point> {
    (0..count).map(move |k| {
        let a = phase + TAU * k as f64 / count as f64;
        Point::new(radius * a.cos(), radius * a.sin())
    })
}

fn max_error(pairs: impl Iterator<Item = Result<(f64, f64)>>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in pairs {
        let (a, b) = p?;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// Source point of [`OracleCase::AnnulusSource`].
pub const ANNULUS_SOURCE: [f64; 2] = [1.2, 0.3];

fn annulus_source(n: usize) -> Result<f64> {
    let sys = annulus(0.2, n)?;
    let z = Point::new(ANNULUS_SOURCE[0], ANNULUS_SOURCE[1]);
    let exact = |x: Point| (x - z).norm().ln();
    let g: Vec<f64> = sys.points().iter().map(|&x| exact(x)).collect();
    let u = InteriorSolver::new(&sys)?.solve_values(&g)?;
    max_error(
        ring(0.6, 12, 0.1)
            .map(|x| Ok((u.eval(x)?, exact(x)))),
    )
}

fn annulus_radial(n: usize) -> Result<f64> {
    let r = 0.25;
    let sys = annulus(r, n)?;
    let g: Vec<f64> = sys
        .points()
        .iter()
        .map(|p| if p.norm() < 0.5 { 1.0 } else { 0.0 })
        .collect();
    let u = InteriorSolver::new(&sys)?.solve_values(&g)?;
    max_error(
        [0.4, 0.6]
            .into_iter()
            .flat_map(|rad| ring(rad, 4, 0.3))
            .map(|x| Ok((u.eval(x)?, x.norm().ln() / r.ln()))),
    )
}

/// Parameter `a` of [`OracleCase::KressSingleLayer`].
pub const KRESS_A: f64 = 1.06;

fn kress_single_layer(n: usize) -> Result<f64> {
    let sys = annulus_free_circle(n)?;
    let a = KRESS_A;
    let root = (a * a - 1.0).sqrt();
    let r = a - root;
    let d = sys.disc(0);
    let phi: Vec<f64> = d.params().iter().map(|s| 1.0 / (a - s.cos())).collect();
    let v = op_S(&sys) * DVector::from_column_slice(&phi);
    let scale = phi.iter().cloned().fold(0.0, f64::max);
    let err = d
        .params()
        .iter()
        .zip(v.iter())
        .map(|(s, v)| {
            let exact = (1.0 + r * r - 2.0 * r * s.cos()).sqrt().ln() / root;
            (v - exact).abs()
        })
        .fold(0.0, f64::max);
    Ok(err / scale)
}

fn annulus_free_circle(n: usize) -> Result<BoundarySystem> {
    BoundarySystem::from_curves(&[Curve::circle(Point::zeros(), 1.0)?], n)
}

fn disk_green(n: usize) -> Result<f64> {
    let solver = InteriorSolver::new(&annulus_free_circle(n)?)?;
    let xs: Vec<Point> = ring(0.3, 5, 0.2).chain(ring(0.5, 5, 1.0)).collect();
    let ys: Vec<Point> = ring(0.4, 5, 2.1).chain(ring(0.2, 5, -0.4)).collect();
    max_error(xs.iter().zip(&ys).map(|(&x, &y)| {
        let image = x / x.norm_squared();
        let exact = s_kernel(x - y) - (x.norm() * (y - image).norm()).ln() / TAU;
        Ok((solver.green(x, y)?, exact))
    }))
}

fn exterior_circle(n: usize) -> Result<f64> {
    let r = 0.7;
    let c = Point::new(0.3, -0.2);
    let d = Discretization::shared(Curve::circle(c, r)?, n)?;
    let solver = ExteriorSingleSolver::new(&d)?;
    let one = solver.solve_values(&vec![1.0; n])?.limit_at_infinity().unwrap_or(f64::NAN);
    let cos: Vec<f64> = d.params().iter().map(|s| s.cos()).collect();
    let mode = solver.solve_values(&cos)?.limit_at_infinity().unwrap_or(f64::NAN);
    let h = solver.h_function(c)?.limit_at_infinity().unwrap_or(f64::NAN);
    Ok((one - 1.0).abs().max(mode.abs()).max((h - r.ln() / TAU).abs()))
}

fn gauss_identity(n: usize) -> Result<f64> {
    let w = op_W(&annulus_free_circle(n)?);
    Ok((0..n).map(|i| (w.row(i).sum() - 0.5).abs()).fold(0.0, f64::max))
}

/// One row of an error-versus-n table.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub case: &'static str,
    pub n: usize,
    pub error: f64,
}

pub fn convergence_table(cases: &[OracleCase], ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &case in cases {
        for &n in ns {
            rows.push(ConvergenceRow {
                case: case.name(),
                n,
                error: case.error(n)?,
            });
        }
    }
    Ok(rows)
}

/// `error(coarse) / error(fine)`, with the fine error floored at 1e-16.
pub fn refinement_ratio(case: OracleCase, coarse: usize, fine: usize) -> Result<f64> {
    Ok(case.error(coarse)? / case.error(fine)?.max(1e-16))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_errors_by_n() {
        for case in OracleCase::ALL {
            let e: Vec<f64> = [64, 128, 256].iter().map(|&n| case.error(n).unwrap()).collect();
            eprintln!("{}: {:?}", case.name(), e.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
        }
        assert!(OracleCase::DiskGreen.error(128).unwrap() < 1e-8);
        assert!(OracleCase::AnnulusRadial.error(128).unwrap() < 1e-8);
        assert!(OracleCase::ExteriorCircle.error(128).unwrap() < 1e-10);
        assert!(OracleCase::GaussIdentity.error(48).unwrap() < 1e-12);
    }

    #[test]
    fn analytic_cases_converge_spectrally() {
        for case in OracleCase::ANALYTIC {
            let ratio = refinement_ratio(case, 64, 128).unwrap();
            assert!(ratio >= 1e3, "{}: {ratio:.2e}", case.name());
        }
    }
}
