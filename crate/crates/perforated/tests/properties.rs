use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;

use perforated::asymptotics::{macro_split, AsymptoticSetup, GammaFamily};
use perforated::densities::{constant_data, NodeCounts};
use perforated::dirichlet::InteriorSolver;
use perforated::geometry::{fixtures, BoundaryData, Curve, EpsilonPair, Orientation, Point};
use perforated::potentials::{op_W, op_Wstar, BoundarySystem};
use perforated::structure::StructureBundle;

fn weighted_dot(w: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    w.iter().zip(a.iter().zip(b.iter())).map(|(w, (a, b))| w * a * b).sum()
}

fn ellipse_with_hole(a: f64, b: f64, rot: f64, n: usize) -> BoundarySystem {
    let outer = Curve::ellipse(Point::zeros(), a, b, rot).unwrap();
    let hole = Curve::circle(Point::new(0.05, -0.03), 0.2)
        .unwrap()
        .with_orientation(Orientation::Negative);
    BoundarySystem::from_curves(&[outer, hole], n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_layer_and_adjoint_are_transposes(
        a in 0.7f64..1.5,
        b in 0.7f64..1.5,
        rot in 0.0f64..PI,
        phi in prop::collection::vec(-1.0f64..1.0, 96),
        psi in prop::collection::vec(-1.0f64..1.0, 96),
    ) {
        let sys = ellipse_with_hole(a, b, rot, 48);
        let w = sys.arc_weights();
        let phi = DVector::from_vec(phi);
        let psi = DVector::from_vec(psi);
        let lhs = weighted_dot(&w, &(op_W(&sys) * &psi), &phi);
        let rhs = weighted_dot(&w, &psi, &(op_Wstar(&sys) * &phi));
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn adjoint_halves_the_total_mass(
        r0 in 0.8f64..1.2,
        c2 in -0.1f64..0.1,
        s3 in -0.08f64..0.08,
        k in 1usize..6,
        a0 in -1.0f64..1.0,
    ) {
        let curve = Curve::star(Point::new(0.1, 0.2), r0, vec![0.0, c2], vec![0.0, 0.0, s3]).unwrap();
        let sys = BoundarySystem::from_curves(&[curve], 128).unwrap();
        let d = sys.disc(0);
        let phi: Vec<f64> = d.params().iter().map(|s| a0 + (k as f64 * s).cos()).collect();
        let wphi = op_Wstar(&sys) * DVector::from_column_slice(&phi);
        let lhs = d.integrate(wphi.as_slice());
        let rhs = 0.5 * d.integrate(&phi);
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn harmonic_polynomials_are_reproduced(
        a in 0.8f64..1.3,
        b in 0.8f64..1.3,
        rot in 0.0f64..PI,
        k in 0i32..4,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        // Re((re + i·im)·z^k) + log|x − z₀| with z₀ inside the hole.
        let z0 = Point::new(0.05, -0.03);
        let exact = move |x: Point| {
            let r = x.norm();
            let th = x.y.atan2(x.x);
            let rk = r.powi(k);
            re * rk * (k as f64 * th).cos() - im * rk * (k as f64 * th).sin() + (x - z0).norm().ln()
        };
        let sys = ellipse_with_hole(a, b, rot, 128);
        let u = InteriorSolver::new(&sys).unwrap().solve_fn(exact).unwrap();
        let m = a.min(b);
        for j in 0..8 {
            let th = j as f64 * PI / 4.0 + 0.1;
            let x = Point::new(0.55 * m * th.cos(), 0.55 * m * th.sin());
            let err = (u.eval(x).unwrap() - exact(x)).abs();
            prop_assert!(err < 1e-8, "error {err:.2e} at {x:?}");
        }
    }

    #[test]
    fn star_area_matches_its_fourier_coefficients(
        r0 in 0.8f64..1.2,
        c in prop::collection::vec(-0.1f64..0.1, 3),
        s in prop::collection::vec(-0.1f64..0.1, 3),
        scale in 0.3f64..2.0,
    ) {
        let curve = Curve::star(Point::new(0.3, -0.7), r0, c.clone(), s.clone())
            .unwrap()
            .similarity(Point::zeros(), scale);
        let sq: f64 = c.iter().chain(&s).map(|v| v * v).sum();
        let exact = scale * scale * PI * (r0 * r0 + 0.5 * sq);
        prop_assert!((curve.area() - exact).abs() < 1e-10 * exact, "{} vs {exact}", curve.area());
    }

    #[test]
    fn power_family_limits_are_recovered(c in 0.5f64..2.0, beta in 0.2f64..3.0) {
        let family = GammaFamily::Power { c, beta };
        let evidence = family.limit_evidence(&perforated::asymptotics::decades(2, 6));
        let expected = 1.0 / (1.0 + beta);
        prop_assert!((family.lambda0() - expected).abs() < 1e-15);
        prop_assert!((evidence.lambda0_extrapolated - expected).abs() < 1e-3,
            "{} vs {expected}", evidence.lambda0_extrapolated);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn leading_coefficient_is_linear_in_the_data(factor in -3.0f64..3.0) {
        let cfg = fixtures::fix_twin_smooth();
        let scaled = cfg.with_data(
            cfg.f_outer.scaled(factor),
            cfg.f_hole1.scaled(factor),
            cfg.f_hole2.scaled(factor),
        );
        let nodes = NodeCounts::for_config(&cfg, 64);
        let base = AsymptoticSetup::new(&cfg, nodes, vec![]).unwrap();
        let other = AsymptoticSetup::new(&scaled, nodes, vec![]).unwrap();
        let c0 = base.coefficient_gamma0_zero(0.5).unwrap();
        let c1 = other.coefficient_gamma0_zero(0.5).unwrap();
        prop_assert!((c1 - factor * c0).abs() < 1e-10 * (1.0 + c0.abs()), "{c1} vs {}", factor * c0);
    }
}

#[test]
fn coefficient_depends_on_lambda0_through_one_plus_lambda0() {
    let cfg = fixtures::fix_twin_smooth();
    let setup = AsymptoticSetup::new(&cfg, NodeCounts::for_config(&cfg, 64), vec![]).unwrap();
    let cubic = GammaFamily::parse("gamma=t^3").unwrap().lambda0();
    let linear = GammaFamily::parse("gamma=t").unwrap().lambda0();
    let ratio = setup.coefficient_gamma0_zero(cubic).unwrap() / setup.coefficient_gamma0_zero(linear).unwrap();
    assert!((ratio - 1.2).abs() < 1e-12, "ratio {ratio}");
}

#[test]
fn constant_data_cancels_the_logarithmic_term() {
    let cfg = constant_data(&fixtures::fix_twin_smooth(), 0.7);
    let x = Point::new(1.3, 0.9);
    let setup = AsymptoticSetup::new(&cfg, NodeCounts::for_config(&cfg, 64), vec![x]).unwrap();
    let coefficient = setup.coefficient_gamma0_zero(0.5).unwrap();
    assert!(coefficient.abs() < 1e-10, "coefficient {coefficient:.2e}");
    let report = setup
        .expansion(&GammaFamily::parse("gamma=t").unwrap(), &[1e-2, 1e-3])
        .unwrap();
    for row in &report.rows {
        assert!((row.u_direct - 0.7).abs() < 1e-10, "direct {}", row.u_direct);
        assert!(row.residual < 1e-10, "residual {:.2e}", row.residual);
    }
}

#[test]
fn macro_split_resums_and_x_term_scales_with_eps1() {
    let cfg = fixtures::fix_twin_smooth();
    let nodes = NodeCounts::for_config(&cfg, 96);
    let x = Point::new(1.2, -1.0);
    let mut x_terms = Vec::new();
    for eps1 in [1e-3, 1e-4] {
        let bundle = StructureBundle::new(&cfg, nodes, EpsilonPair::new(eps1, 0.5)).unwrap();
        let split = macro_split(&bundle, x).unwrap();
        let direct = bundle.represent_macro(x).unwrap();
        assert!((split.total - direct).abs() < 1e-10, "{} vs {direct}", split.total);
        x_terms.push(split.x_term.abs());
    }
    let ratio = x_terms[0] / x_terms[1];
    assert!((5.0..20.0).contains(&ratio), "x term ratio {ratio}");
}

#[test]
fn constant_datum_data_is_scaled_exactly() {
    let d = BoundaryData::Constant(2.0).scaled(-1.5);
    assert_eq!(d.eval(0.3), -3.0);
}
