//! Inputs shared by the benchmarks.

use maprad_core::metric::{builtin, FiniteMetricSpace};
use maprad_core::{Rational, SignedMeasure};

pub fn space(spec: &str, k: usize) -> FiniteMetricSpace {
    builtin(spec)
        .and_then(|b| b.discretized(k))
        .expect("builtin spaces are valid")
}

/// `3μ₁ − 4μ₂ + 2μ₃ − 4μ₄ + 3μ₅` on five collinear points.
pub fn five_point_measure() -> (FiniteMetricSpace, SignedMeasure) {
    let x = space("line(0,1,2,3,4)", 1);
    let mu = SignedMeasure::from_pairs(
        [3, -4, 2, -4, 3]
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i, Rational::from_integer(c))),
    );
    (x, mu)
}
