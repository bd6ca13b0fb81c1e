use approx::assert_relative_eq;
use tubeaction_core::action::{interaction_interior, interaction_total, mass_term, tube_self_term};
use tubeaction_core::hypersurface::{surface_integral, ConeEnd};
use tubeaction_core::quadrature::AdaptiveOptions;
use tubeaction_core::{
    ExternalField, QuadratureScheme, SingularityField, SurfacePatch, TubeGeometry, Worldline,
};

fn scheme(polar: usize, azimuth: usize) -> QuadratureScheme {
    QuadratureScheme {
        polar_order: polar,
        azimuth_order: azimuth,
        ..Default::default()
    }
}

#[test]
fn tube_value_independent_of_panel_layout() {
    let w = Worldline::circular(1.5, 0.4).unwrap();
    let g = TubeGeometry::new(0.0, 0.8, -0.3, 1.4).unwrap();
    let mut values = Vec::new();
    for panels in [1, 3, 7] {
        let s = QuadratureScheme {
            adaptive: AdaptiveOptions {
                initial_panels: panels,
                ..Default::default()
            },
            ..Default::default()
        };
        values.push(tube_self_term(&w, 1.0, &g, &s).unwrap().numeric.value);
    }
    for v in &values {
        assert_relative_eq!(*v, values[0], max_relative = 1e-8);
    }
}

#[test]
fn angular_refinement_converges() {
    // cross term on a tilted tube: smooth but not exactly integrated by
    // low orders
    let w = Worldline::circular(1.5, 0.4).unwrap();
    let f = SingularityField::new(1.0, &w);
    let a = ExternalField::DistantCharge {
        charge: 1.0,
        position: [3.0, 1.0, 0.0],
    };
    let tube = SurfacePatch::tube(&w, 0.8, 0.0, 0.5).unwrap();
    let value = |n: usize| {
        let s = QuadratureScheme {
            estimate_angular_error: false,
            ..scheme(n, 2 * n)
        };
        surface_integral(&tube, |x| Ok(a.potential(x)), |x| f.field(x), &s)
            .unwrap()
            .value
            .re
    };
    let reference = value(40);
    let errors: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| (value(n) - reference).abs())
        .collect();
    assert!(errors[1] < 0.1 * errors[0], "{errors:?}");
    assert!(errors[2] < 0.1 * errors[1].max(1e-15), "{errors:?}");
}

#[test]
fn mass_total_independent_of_inner_radius() {
    let w = Worldline::hyperbolic(0.2, [0.0, 0.6, 0.8]).unwrap();
    let s = QuadratureScheme::default();
    let totals: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&xi1| {
            let g = TubeGeometry::new(xi1, 0.5, 0.0, 1.0).unwrap();
            mass_term(&w, 1.0, &g, &s).unwrap().total.numeric.value
        })
        .collect();
    for t in &totals {
        assert!((t - totals[0]).abs() < 1e-8, "{totals:?}");
        assert_relative_eq!(*t, -1.0, max_relative = 1e-10);
    }
}

#[test]
fn mass_term_universal_across_families() {
    let s = QuadratureScheme::default();
    let g = TubeGeometry::new(1e-3, 2.0, 0.0, 4.0).unwrap();
    for w in [
        Worldline::rest(),
        Worldline::uniform([0.2, -0.5, 0.1]).unwrap(),
        Worldline::hyperbolic(0.05, [1.0, 0.0, 0.0]).unwrap(),
        Worldline::circular(3.0, 0.2).unwrap(),
    ] {
        let m = mass_term(&w, 1.0, &g, &s).unwrap();
        assert!(
            m.total.abs_error() <= 10.0 * m.total.numeric.error.max(1e-15),
            "{}: {:?}",
            w.family().tag(),
            m.total
        );
        assert_relative_eq!(m.total.analytic, -1.0);
    }
}

#[test]
fn cone_self_value_depends_only_logarithmically_on_inner_radius() {
    let w = Worldline::uniform([0.4, 0.0, 0.3]).unwrap();
    let f = SingularityField::new(1.0, &w);
    let s = QuadratureScheme::default();
    let mut prev = None;
    for xi1 in [1e-2, 1e-3, 1e-4] {
        let c = SurfacePatch::cone(&w, 0.5, xi1, 1.0, ConeEnd::End).unwrap();
        let v = surface_integral(&c, |x| f.potential(x), |x| f.field(x), &s)
            .unwrap()
            .value
            .re
            / (8.0 * std::f64::consts::PI);
        if let Some(p) = prev {
            // each decade adds (1/2)·ln 10
            assert_relative_eq!(v - p, 0.5 * 10f64.ln(), max_relative = 1e-10);
        }
        prev = Some(v);
    }
}

#[test]
fn interaction_equals_usual_coupling_plus_interior_term() {
    let w = Worldline::hyperbolic(0.1, [1.0, 0.0, 0.0]).unwrap();
    let a = ExternalField::PolynomialSlow {
        amplitude: [1.0, 0.3, 0.0, 0.2],
        wavevector: [1.0, 0.5, 0.0, 0.2],
        epsilon: 1e-2,
    };
    let g = TubeGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let s = QuadratureScheme::default();
    let total = interaction_total(&w, 1.0, &a, &g, &s, None).unwrap();
    let interior = interaction_interior(&w, 1.0, &a, &g, &scheme(16, 24)).unwrap();
    assert_relative_eq!(
        total.numeric.value,
        total.usual + interior.value,
        epsilon = 1e-11
    );
}

#[test]
fn cone_interaction_vanishes_for_coincident_radii() {
    let w = Worldline::hyperbolic(0.1, [1.0, 0.0, 0.0]).unwrap();
    let a = ExternalField::Constant {
        potential: [1.0, 0.0, 0.0, 0.0],
    };
    let g = TubeGeometry::new(0.7, 0.7, 0.0, 1.0).unwrap();
    let c = tubeaction_core::action::interaction_cones(&w, 1.0, &a, &g, &scheme(8, 12)).unwrap();
    assert_eq!(c.numeric.value, 0.0);
    assert_eq!(c.analytic, 0.0);
    // hyperbolic, A = (1, 0): e(ξ₂ − ξ₁)(γ(τ₂) − γ(τ₁))
    let g = TubeGeometry::new(0.1, 0.7, 0.0, 1.0).unwrap();
    let c =
        tubeaction_core::action::interaction_cones(&w, 1.0, &a, &g, &QuadratureScheme::default())
            .unwrap();
    let expect = 0.6 * ((0.1f64).cosh() - 1.0);
    assert_relative_eq!(c.analytic, expect, max_relative = 1e-14);
    assert_relative_eq!(c.numeric.value, expect, max_relative = 1e-9);
}
