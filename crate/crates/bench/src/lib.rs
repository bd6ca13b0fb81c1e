//! Fixtures shared by the benchmarks.

use tubeaction_core::{ExternalField, QuadratureScheme, TubeGeometry, Worldline};

pub fn hyperbolic() -> Worldline {
    Worldline::hyperbolic(0.1, [1.0, 0.0, 0.0]).expect("valid worldline")
}

pub fn unit_tube() -> TubeGeometry {
    TubeGeometry::new(1e-2, 1.0, 0.0, 1.0).expect("valid geometry")
}

pub fn slow_field() -> ExternalField {
    ExternalField::PolynomialSlow {
        amplitude: [1.0, 0.3, 0.0, 0.2],
        wavevector: [1.0, 0.5, 0.0, 0.2],
        epsilon: 1e-2,
    }
}

/// Lower orders than the default so one iteration stays in the
/// millisecond range.
pub fn bench_scheme() -> QuadratureScheme {
    QuadratureScheme {
        polar_order: 12,
        azimuth_order: 24,
        estimate_angular_error: false,
        ..Default::default()
    }
}
