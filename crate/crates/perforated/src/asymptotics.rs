//! Asymptotics along the path ε₁ = t, ε₂ = γ(t) as t → 0⁺.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::densities::{physical_data, NodeCounts, ReferenceGeometry};
use crate::dirichlet::InteriorSolver;
use crate::error::{Error, Result};
use crate::geometry::{EpsilonPair, Point, ProblemConfig};
use crate::structure::{adjugate, compute_lambda, LimitProblems, StructureBundle, TildeProblems};

/// Smallest `t` at which direct solves are trusted.
pub const SMALLEST_TRUSTED_T: f64 = 1e-6;

/// The scaling path `t ↦ γ(t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaFamily {
    /// `γ(t) = c·t^β` with `β ≥ 0`.
    Power { c: f64, beta: f64 },
    /// `γ(t) = γ₀ + slope·t`.
    Offset { gamma0: f64, slope: f64 },
    /// Values at given `t`, interpolated linearly in `log t`.
    Tabulated { t: Vec<f64>, gamma: Vec<f64> },
}

/// Numerical evidence that the limits γ₀ and λ₀ exist.
#[derive(Clone, Debug, Serialize)]
pub struct LimitEvidence {
    pub t: Vec<f64>,
    pub gamma: Vec<f64>,
    pub quotient: Vec<f64>,
    /// Richardson extrapolation of the quotient in `1/|log t|`.
    pub lambda0_extrapolated: f64,
    pub cauchy: bool,
}

impl GammaFamily {
    /// Parses `gamma=t`, `gamma=t^3`, `gamma=0.5+t`, `gamma=0.5+0.2*t`,
    /// `gamma=c*t^b`.
    pub fn parse(expr: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized γ family {expr:?}"));
        let body = expr.trim();
        let body = body
            .strip_prefix("gamma")
            .map(|r| r.trim_start().strip_prefix('=').unwrap_or(r))
            .unwrap_or(body)
            .replace(' ', "");
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let power = |s: &str| -> Result<(f64, f64)> {
            let (c, rest) = match s.split_once('*') {
                Some((c, rest)) => (num(c)?, rest),
                None => (1.0, s),
            };
            let beta = match rest.strip_prefix('t').ok_or_else(bad)? {
                "" => 1.0,
                e => num(e.strip_prefix('^').ok_or_else(bad)?)?,
            };
            Ok((c, beta))
        };
        let family = if let Some((g0, rest)) = body.split_once('+') {
            let (slope, beta) = power(rest)?;
            if beta != 1.0 {
                return Err(bad());
            }
            GammaFamily::Offset {
                gamma0: num(g0)?,
                slope,
            }
        } else {
            let (c, beta) = power(&body)?;
            GammaFamily::Power { c, beta }
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            GammaFamily::Power { c, beta } => *c > 0.0 && *beta >= 0.0 && c.is_finite() && beta.is_finite(),
            GammaFamily::Offset { gamma0, slope } => *gamma0 >= 0.0 && slope.is_finite() && (*gamma0 > 0.0 || *slope > 0.0),
            GammaFamily::Tabulated { t, gamma } => {
                t.len() == gamma.len() && t.len() >= 2 && t.iter().chain(gamma).all(|v| *v > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid γ family {self:?}")))
        }
    }

    pub fn gamma(&self, t: f64) -> f64 {
        match self {
            GammaFamily::Power { c, beta } => c * t.powf(*beta),
            GammaFamily::Offset { gamma0, slope } => gamma0 + slope * t,
            GammaFamily::Tabulated { t: ts, gamma } => {
                let lt = t.ln();
                let mut idx: Vec<usize> = (0..ts.len()).collect();
                idx.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
                let (mut lo, mut hi) = (idx[0], idx[1]);
                for w in idx.windows(2) {
                    lo = w[0];
                    hi = w[1];
                    if ts[hi] >= t {
                        break;
                    }
                }
                let s = (lt - ts[lo].ln()) / (ts[hi].ln() - ts[lo].ln());
                gamma[lo] + s * (gamma[hi] - gamma[lo])
            }
        }
    }

    /// `γ₀ = lim γ(t)`.
    pub fn gamma0(&self) -> f64 {
        match self {
            GammaFamily::Power { c, beta } => {
                if *beta > 0.0 {
                    0.0
                } else {
                    *c
                }
            }
            GammaFamily::Offset { gamma0, .. } => *gamma0,
            GammaFamily::Tabulated { .. } => {
                log::warn!("γ₀ of a tabulated family is estimated from its smallest t");
                self.gamma(self.smallest_t())
            }
        }
    }

    /// `λ₀ = lim log t / log(tγ(t))`.
    pub fn lambda0(&self) -> f64 {
        match self {
            GammaFamily::Power { beta, .. } => 1.0 / (1.0 + beta),
            GammaFamily::Offset { gamma0, .. } => {
                if *gamma0 > 0.0 {
                    1.0
                } else {
                    0.5
                }
            }
            GammaFamily::Tabulated { .. } => {
                log::warn!("λ₀ of a tabulated family is extrapolated numerically");
                let t = self.smallest_t();
                self.limit_evidence(&[t * 1e2, t * 1e1, t]).lambda0_extrapolated
            }
        }
    }

    fn smallest_t(&self) -> f64 {
        match self {
            GammaFamily::Tabulated { t, .. } => t.iter().cloned().fold(f64::INFINITY, f64::min),
            _ => SMALLEST_TRUSTED_T,
        }
    }

    /// `log t / log(tγ(t))`.
    pub fn quotient(&self, t: f64) -> f64 {
        t.ln() / (t * self.gamma(t)).ln()
    }

    /// Evaluates γ and the quotient on `ts` (decreasing), checks that
    /// successive differences shrink, and extrapolates the quotient in
    /// `1/|log t|` through the last three samples.
    pub fn limit_evidence(&self, ts: &[f64]) -> LimitEvidence {
        let gamma: Vec<f64> = ts.iter().map(|&t| self.gamma(t)).collect();
        let quotient: Vec<f64> = ts.iter().map(|&t| self.quotient(t)).collect();
        let diffs = |v: &[f64]| v.windows(2).map(|w| (w[1] - w[0]).abs()).collect::<Vec<_>>();
        let shrinking = |d: Vec<f64>| d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        let cauchy = shrinking(diffs(&gamma)) && shrinking(diffs(&quotient));
        let n = ts.len();
        let lambda0_extrapolated = if n >= 3 {
            let s: Vec<f64> = ts[n - 3..].iter().map(|t| 1.0 / t.ln().abs()).collect();
            neville_at_zero(&s, &quotient[n - 3..])
        } else {
            quotient[n - 1]
        };
        LimitEvidence {
            t: ts.to_vec(),
            gamma,
            quotient,
            lambda0_extrapolated,
            cauchy,
        }
    }
}

/// Value at 0 of the polynomial interpolating `(s_i, q_i)`.
fn neville_at_zero(s: &[f64], q: &[f64]) -> f64 {
    let mut p = q.to_vec();
    let n = s.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (s[i + m] * p[i] - s[i] * p[i + 1]) / (s[i + m] - s[i]);
        }
    }
    p[0]
}

/// `t = 10^{-a}, …, 10^{-b}`.
pub fn decades(a: u32, b: u32) -> Vec<f64> {
    (a..=b).map(|d| 10f64.powi(-(d as i32))).collect()
}

/// Explicit Λ⁻¹ and the scalar 𝓡.
pub fn lambda_inverse_explicit(r: &Matrix2<f64>, eps: EpsilonPair) -> Result<(Matrix2<f64>, f64)> {
    let l = compute_lambda(r, eps)?;
    Ok((l.inverse_explicit, l.curly_r))
}

/// The summands of the macroscopic expansion with the Green function
/// split out of V^M.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MacroSplit {
    pub u_o: f64,
    /// `ε₁ε₂U^M(x)`.
    pub u_correction: f64,
    /// `(2π/log|ε₁ε₂|)(log|ε₂|/𝓡)(F₁+F₂)G(x,0)`.
    pub green_term: f64,
    /// `2π(ε₁/𝓡) Fᵗ [[1,−q],[−q,1]] X^M(x)` with `q = log|ε₁|/log|ε₁ε₂|`.
    pub x_term: f64,
    /// `4π²/(log|ε₁ε₂|·𝓡) Fᵗ R^{*t} V^M(x)`.
    pub adjugate_term: f64,
    pub total: f64,
}

pub fn macro_split(bundle: &StructureBundle, x: Point) -> Result<MacroSplit> {
    let eps = bundle.eps;
    let cr = compute_lambda(&bundle.r, eps)?.curly_r;
    let (u_o, um) = bundle.u_macro_split(x)?;
    let u_correction = eps.product() * um;
    let g0 = bundle.limits.green(x, Point::zeros())?;
    let v = bundle.v_macro(x)?;
    let xm = [(v[0] - g0) / eps.eps1, (v[1] - g0) / eps.eps1];
    let a = eps.product().abs().ln();
    let q = eps.eps1.abs().ln() / a;
    let f = bundle.f;
    let green_term = TAU / a * eps.eps2.abs().ln() / cr * (f[0] + f[1]) * g0;
    let mx = [xm[0] - q * xm[1], -q * xm[0] + xm[1]];
    let x_term = TAU * eps.eps1 / cr * (f[0] * mx[0] + f[1] * mx[1]);
    let adj = adjugate(&bundle.r);
    let av = [adj[(0, 0)] * v[0] + adj[(0, 1)] * v[1], adj[(1, 0)] * v[0] + adj[(1, 1)] * v[1]];
    let adjugate_term = 4.0 * PI * PI / (a * cr) * (f[0] * av[0] + f[1] * av[1]);
    Ok(MacroSplit {
        u_o,
        u_correction,
        green_term,
        x_term,
        adjugate_term,
        total: u_o + u_correction + green_term + x_term + adjugate_term,
    })
}

/// Hole node count used for a direct solve at `t`.
pub fn hole_nodes_for(t: f64) -> usize {
    let decades = (1.0 / t).log10().ceil().max(0.0) as usize;
    let n = (32 * decades).max(128);
    n.div_ceil(2) * 2
}

/// Direct physical-domain solve at (t, γ) evaluated at `points`.
pub fn direct_values(
    config: &ProblemConfig,
    base: NodeCounts,
    eps: EpsilonPair,
    points: &[Point],
) -> Result<Vec<f64>> {
    eps.check(config)?;
    let nodes = NodeCounts {
        outer: base.outer,
        hole: base.hole.max(hole_nodes_for(eps.eps1.abs())),
    };
    let geom = ReferenceGeometry::new(config, nodes)?;
    let sys = geom.physical_system(config, eps)?;
    let u = InteriorSolver::new(&sys)?.solve_values(&physical_data(&geom, config))?;
    points.iter().map(|&x| u.eval(x)).collect()
}

/// Which of the two expansions a report follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// γ₀ = 0: the remainder is o(1/log(tγ(t))).
    GammaZero,
    /// γ₀ > 0: the remainder is o(1/log t).
    GammaPositive,
}

/// One row of the residual table, at the probe point (first sample point).
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub t: f64,
    pub gamma_t: f64,
    pub log_quotient: f64,
    pub u_direct: f64,
    pub u_leading: f64,
    pub residual: f64,
    pub normalized_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    /// Ratio of consecutive normalized residuals (earlier over later).
    pub decay_factors: Vec<f64>,
    pub monotone: bool,
    /// Smallest factor over the last two decades.
    pub last_two_min_factor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub schema_version: u32,
    pub kind: ExpansionKind,
    pub family: GammaFamily,
    pub gamma0: f64,
    pub lambda0: f64,
    pub limits: LimitEvidence,
    pub points: Vec<[f64; 2]>,
    /// The constant multiplying G(x,0)/log(·) in the leading term.
    pub coefficient: f64,
    /// `G(x,0)` at each point.
    pub green: Vec<f64>,
    pub u_o: Vec<f64>,
    pub rows: Vec<AsymptoticRow>,
    /// Largest normalized residual over all points, per row.
    pub sup_normalized_residual: Vec<f64>,
    pub verdict: Verdict,
    /// `c_{γ₀}` and `d_{γ₀}` for γ₀ > 0.
    pub c_gamma0: Option<f64>,
    pub d_gamma0: Option<f64>,
    /// `(H^{2,1} − H^{1,2})·∮_{∂Ω₁} ν·∇ũ` for γ₀ > 0.
    pub flux_term: Option<f64>,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl AsymptoticReport {
    pub fn csv_header() -> [&'static str; 7] {
        [
            "t",
            "gamma_t",
            "log_quotient",
            "u_direct",
            "u_leading",
            "residual",
            "normalized_residual",
        ]
    }
}

fn verdict(normalized: &[f64]) -> Verdict {
    let decay_factors: Vec<f64> = normalized.windows(2).map(|w| w[0] / w[1]).collect();
    let monotone = normalized.windows(2).all(|w| w[1] < w[0]);
    let last_two_min_factor = decay_factors
        .iter()
        .rev()
        .take(2)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Verdict {
        decay_factors,
        monotone,
        last_two_min_factor,
    }
}

/// Shared ingredients for both expansions.
pub struct AsymptoticSetup {
    pub config: ProblemConfig,
    pub geom: ReferenceGeometry,
    pub limits: Arc<LimitProblems>,
    pub points: Vec<Point>,
}

impl AsymptoticSetup {
    pub fn new(config: &ProblemConfig, nodes: NodeCounts, points: Vec<Point>) -> Result<Self> {
        if !(config.delta1 * config.delta2 < 1.0) {
            return Err(Error::NotAdmissible(
                "asymptotics need δ₁·δ₂ < 1".into(),
            ));
        }
        let geom = ReferenceGeometry::new(config, nodes)?;
        let limits = Arc::new(LimitProblems::new(config, &geom)?);
        Ok(AsymptoticSetup {
            config: config.clone(),
            geom,
            limits,
            points,
        })
    }

    fn sweep(
        &self,
        kind: ExpansionKind,
        family: &GammaFamily,
        ts: &[f64],
        coefficient: f64,
        extras: (Option<f64>, Option<f64>, Option<f64>),
    ) -> Result<AsymptoticReport> {
        let green: Vec<f64> = self
            .points
            .iter()
            .map(|&x| self.limits.green(x, Point::zeros()))
            .collect::<Result<_>>()?;
        let u_o: Vec<f64> = self.points.iter().map(|&x| self.limits.u_o(x)).collect::<Result<_>>()?;
        let results: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ts
                .iter()
                .map(|&t| {
                    let eps = EpsilonPair::new(t, family.gamma(t));
                    scope.spawn(move || direct_values(&self.config, self.geom.nodes, eps, &self.points))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep thread")).collect()
        });
        let mut rows = Vec::new();
        let mut sup = Vec::new();
        for (&t, direct) in ts.iter().zip(results) {
            let direct = direct?;
            let g = family.gamma(t);
            let log = match kind {
                ExpansionKind::GammaZero => (t * g).ln(),
                ExpansionKind::GammaPositive => t.ln(),
            };
            let leading: Vec<f64> = (0..self.points.len())
                .map(|p| u_o[p] + coefficient / log * green[p])
                .collect();
            let res: Vec<f64> = direct.iter().zip(&leading).map(|(d, l)| (d - l).abs()).collect();
            sup.push(res.iter().fold(0.0f64, |m, r| m.max(r * log.abs())));
            rows.push(AsymptoticRow {
                t,
                gamma_t: g,
                log_quotient: family.quotient(t),
                u_direct: direct[0],
                u_leading: leading[0],
                residual: res[0],
                normalized_residual: res[0] * log.abs(),
            });
        }
        let normalized: Vec<f64> = rows.iter().map(|r| r.normalized_residual).collect();
        Ok(AsymptoticReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind,
            family: family.clone(),
            gamma0: family.gamma0(),
            lambda0: family.lambda0(),
            limits: family.limit_evidence(&decades(2, 6)),
            points: self.points.iter().map(|p| [p.x, p.y]).collect(),
            coefficient,
            green,
            u_o,
            rows,
            sup_normalized_residual: sup,
            verdict: verdict(&normalized),
            c_gamma0: extras.0,
            d_gamma0: extras.1,
            flux_term: extras.2,
        })
    }

    /// `(2π/(1+λ₀))(lim u₁ + lim u₂ − 2u°(0))`.
    pub fn coefficient_gamma0_zero(&self, lambda0: f64) -> Result<f64> {
        let u00 = self.limits.u_o(Point::zeros())?;
        Ok(TAU / (1.0 + lambda0) * (self.limits.u_h_limit[0] + self.limits.u_h_limit[1] - 2.0 * u00))
    }

    /// γ₀ = 0 expansion, residuals measured against direct solves.
    pub fn expansion_gamma0_zero(&self, family: &GammaFamily, ts: &[f64]) -> Result<AsymptoticReport> {
        if family.gamma0() != 0.0 {
            return Err(Error::Regime(format!("family has γ₀ = {}", family.gamma0())));
        }
        let evidence = family.limit_evidence(&decades(2, 6));
        if !evidence.cauchy {
            return Err(Error::Inconsistent("γ family limits fail the Cauchy check".into()));
        }
        let c = self.coefficient_gamma0_zero(family.lambda0())?;
        self.sweep(ExpansionKind::GammaZero, family, ts, c, (None, None, None))
    }

    /// The Ω̃(γ₀) data behind the γ₀ > 0 coefficient.
    pub fn tilde(&self, gamma0: f64) -> Result<TildeProblems> {
        if !(gamma0 > 0.0 && gamma0 < self.config.delta2) {
            return Err(Error::NotAdmissible(format!("γ₀ = {gamma0} outside (0, δ₂)")));
        }
        TildeProblems::new(&self.config, &self.geom, gamma0)
    }

    /// `(2π)(lim ũ − u°(0) + (H^{2,1} − H^{1,2})·flux₁(ũ))` with its parts.
    pub fn coefficient_gamma0_pos(&self, gamma0: f64) -> Result<(f64, TildeProblems)> {
        let t = self.tilde(gamma0)?;
        let u00 = self.limits.u_o(Point::zeros())?;
        let flux_term = (t.h.get(2, 1) - t.h.get(1, 2)) * t.flux(1);
        Ok((TAU * (t.u_tilde.limit - u00 + flux_term), t))
    }

    /// γ₀ > 0 expansion, residuals measured against direct solves.
    pub fn expansion_gamma0_pos(&self, family: &GammaFamily, ts: &[f64]) -> Result<AsymptoticReport> {
        let g0 = family.gamma0();
        let (c, t) = self.coefficient_gamma0_pos(g0)?;
        let flux_term = (t.h.get(2, 1) - t.h.get(1, 2)) * t.flux(1);
        self.sweep(
            ExpansionKind::GammaPositive,
            family,
            ts,
            c,
            (Some(t.h.c()), Some(t.h.d()), Some(flux_term)),
        )
    }

    /// Dispatch on γ₀.
    pub fn expansion(&self, family: &GammaFamily, ts: &[f64]) -> Result<AsymptoticReport> {
        if family.gamma0() == 0.0 {
            self.expansion_gamma0_zero(family, ts)
        } else {
            self.expansion_gamma0_pos(family, ts)
        }
    }

    /// A bundle on this setup's discretization.
    pub fn bundle(&self, eps: EpsilonPair) -> Result<StructureBundle> {
        StructureBundle::with_parts(&self.config, self.geom.clone(), self.limits.clone(), eps)
    }
}

/// `c_{γ₀} = H^{1,1} − H^{1,2} − H^{2,1} + H^{2,2}` on Ω̃(γ₀).
pub fn c_gamma0(config: &ProblemConfig, hole_nodes: usize, gamma0: f64) -> Result<f64> {
    let rho = crate::densities::tilde_rho(config, gamma0, hole_nodes)?;
    Ok(crate::dirichlet::h_exterior_constants(&rho.pair, rho.p, &rho.rho)?.c())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    #[test]
    fn parse_families() {
        assert_eq!(GammaFamily::parse("gamma=t").unwrap(), GammaFamily::Power { c: 1.0, beta: 1.0 });
        assert_eq!(GammaFamily::parse("gamma=t^3").unwrap(), GammaFamily::Power { c: 1.0, beta: 3.0 });
        assert_eq!(
            GammaFamily::parse("gamma = 0.5+t").unwrap(),
            GammaFamily::Offset { gamma0: 0.5, slope: 1.0 }
        );
        assert_eq!(
            GammaFamily::parse("gamma=0.2*t^0.5").unwrap(),
            GammaFamily::Power { c: 0.2, beta: 0.5 }
        );
        assert!(GammaFamily::parse("gamma=sin(t)").is_err());
    }

    #[test]
    fn log_quotient_of_gamma_t_is_half() {
        let f = GammaFamily::Power { c: 1.0, beta: 1.0 };
        assert!((f.quotient(1e-3) - 0.5).abs() < 1e-15);
        assert_eq!(f.lambda0(), 0.5);
    }

    #[test]
    fn extrapolated_lambda0_for_offset_family() {
        let f = GammaFamily::Offset { gamma0: 0.5, slope: 1.0 };
        let ev = f.limit_evidence(&decades(2, 6));
        assert!(ev.cauchy);
        assert!((ev.lambda0_extrapolated - 1.0).abs() < 1e-3, "{}", ev.lambda0_extrapolated);
    }

    #[test]
    fn macro_split_resums() {
        let cfg = fixtures::fix_twin_smooth();
        let b = StructureBundle::new(&cfg, NodeCounts::for_config(&cfg, 128), EpsilonPair::new(0.3, 0.5)).unwrap();
        for x in crate::structure::EvaluationRegion::default_macro().points {
            let s = macro_split(&b, x).unwrap();
            let direct = b.represent_macro(x).unwrap();
            assert!((s.total - direct).abs() < 1e-10, "{} vs {direct}", s.total);
        }
    }
}
