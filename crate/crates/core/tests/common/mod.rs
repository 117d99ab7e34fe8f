//! Equations shared by the integration tests.
#![allow(dead_code)]

use qbessel::equation::{
    from_constant_coefficients, from_power_factors, DerivativeKind, QuasiBesselEquation, Term,
};
use qbessel::rational::Rational;

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn quasi_bessel(
    terms: &[(f64, f64, &str)],
    beta: &str,
    nu_squared: f64,
    kind: DerivativeKind,
) -> QuasiBesselEquation {
    QuasiBesselEquation::new(
        terms
            .iter()
            .map(|&(d, a, p)| Term::new(d, a, q(p)).unwrap())
            .collect(),
        q(beta),
        nu_squared,
        1.0,
        kind,
    )
    .unwrap()
}

/// `x^1.5 D^1.5 u − 1.2 x^1.9 D^1.1 u + 3 x D^0.5 u + (x² − ν²) u = 0`, Caputo.
pub fn bessel_caputo(nu: f64) -> QuasiBesselEquation {
    quasi_bessel(
        &[(1.5, 1.5, "0"), (-1.2, 1.1, "0.8"), (3.0, 0.5, "0.5")],
        "2",
        nu * nu,
        DerivativeKind::Caputo,
    )
}

/// `x u′ + x u = 0`.
pub fn exponential() -> QuasiBesselEquation {
    from_constant_coefficients(&[(1.0, q("1"))], 1.0, DerivativeKind::Caputo).unwrap()
}

/// `D^1.7 u − 2u = 0` (Riemann–Liouville), divided by −2.
pub fn two_root() -> QuasiBesselEquation {
    from_constant_coefficients(&[(-0.5, q("1.7"))], 1.0, DerivativeKind::RiemannLiouville).unwrap()
}

/// `D^0.5 u − λ x^0.7 u = 0` (Riemann–Liouville), divided by −λ.
pub fn kilbas_saigo_equation(lambda: f64) -> QuasiBesselEquation {
    from_power_factors(
        &[(-1.0 / lambda, q("0"), q("0.5"))],
        q("0.7"),
        1.0,
        DerivativeKind::RiemannLiouville,
    )
    .unwrap()
}

/// Constant-coefficient Riemann–Liouville equation with unit coefficients.
pub fn constant_rl(orders: &[&str]) -> QuasiBesselEquation {
    let terms: Vec<(f64, Rational)> = orders.iter().map(|a| (1.0, q(a))).collect();
    from_constant_coefficients(&terms, 1.0, DerivativeKind::RiemannLiouville).unwrap()
}

/// `x^1.5 D^1.5 u + x^0.7 D^0.5 u + x^1.2 u = 0` (Riemann–Liouville).
pub fn colliding_pair() -> QuasiBesselEquation {
    quasi_bessel(
        &[(1.0, 1.5, "0"), (1.0, 0.5, "0.2")],
        "1.2",
        0.0,
        DerivativeKind::RiemannLiouville,
    )
}

/// Leading term shifted by 0.4: `x^1.9 D^1.5 u + x^0.5 D^0.5 u + (x − 1) u = 0`.
/// Constructed without validation, since validation rejects it.
pub fn shifted_leading() -> QuasiBesselEquation {
    quasi_bessel(
        &[(1.0, 1.5, "0.4"), (1.0, 0.5, "0")],
        "1",
        1.0,
        DerivativeKind::RiemannLiouville,
    )
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
