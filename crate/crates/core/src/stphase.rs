//! Stationary-phase engines for integrals I(lambda) = int f(x) e^{i lambda phi(x)} dx.
//!
//! `standard_spa` is the isolated-point formula. The CFU (Chester-Friedman-Ursell)
//! functions handle two real stationary points x1 (maximum) and x2 (minimum)
//! that coalesce: phi is mapped to the cubic phi0 + tau^3/3 - xi tau and the
//! leading coefficients A0, B0 are fixed by matching the two-point expansion.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{precondition, Error, Result};
use crate::numerics::real_cbrt;
use crate::specfun::{ai, ai_prime};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Simple,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub location: Complex64,
    pub multiplicity: Multiplicity,
    /// Signed phi'' at a real point; zero at a double point.
    pub second_derivative: f64,
}

impl StationaryPoint {
    pub fn is_real(&self) -> bool {
        self.location.im == 0.0
    }
}

/// Unfolded parameters of the cubic normal form and the leading amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfuCoefficients {
    pub phi0: f64,
    pub xi: f64,
    pub a0: Complex64,
    pub b0: Complex64,
}

/// e^{i lambda phi + i mu pi/4} f sqrt(2 pi / (lambda |phi''|)), mu = sgn phi''.
pub fn standard_spa(f_at: Complex64, phi_at: f64, phi_xx: f64, lambda: f64) -> Result<Complex64> {
    if phi_xx == 0.0 || !phi_xx.is_finite() {
        return Err(Error::Degenerate(format!("phi'' = {phi_xx} at the stationary point; use the CFU formula")));
    }
    if !(lambda > 0.0) {
        return Err(precondition("lambda must be positive"));
    }
    let mu = phi_xx.signum();
    let m = (2.0 * PI / (lambda * phi_xx.abs())).sqrt();
    Ok(f_at * Complex64::from_polar(m, lambda * phi_at + mu * FRAC_PI_4))
}

/// Sum of `standard_spa` over isolated points given as (f, phi, phi'').
pub fn standard_spa_sum(points: &[(Complex64, f64, f64)], lambda: f64) -> Result<Complex64> {
    points.iter().map(|&(f, p, pxx)| standard_spa(f, p, pxx, lambda)).sum()
}

/// Solve the matching conditions phi0 +- (2/3) xi^{3/2} = phi_{1,2} and
/// A0 xi^{-1/4} -+ B0 xi^{1/4} = sqrt2 f_{1,2} / |phi''_{1,2}|^{1/2}.
pub fn cfu_match(
    phi_1: f64,
    phi_2: f64,
    f_1: Complex64,
    f_2: Complex64,
    phi_xx_1: f64,
    phi_xx_2: f64,
) -> Result<CfuCoefficients> {
    if !(phi_1 >= phi_2) {
        return Err(precondition(format!("phi(x1) = {phi_1} must not be below phi(x2) = {phi_2}")));
    }
    if !(phi_xx_1 < 0.0 && phi_xx_2 > 0.0) {
        return Err(precondition(format!("need phi''(x1) < 0 < phi''(x2), got {phi_xx_1}, {phi_xx_2}")));
    }
    let xi = (0.75 * (phi_1 - phi_2)).powf(2.0 / 3.0);
    if xi == 0.0 {
        return Err(Error::Coalescence);
    }
    let r1 = f_1 / phi_xx_1.abs().sqrt();
    let r2 = f_2 / phi_xx_2.sqrt();
    let q = xi.powf(0.25);
    Ok(CfuCoefficients { phi0: 0.5 * (phi_1 + phi_2), xi, a0: q * (r2 + r1) / SQRT_2, b0: (r2 - r1) / (q * SQRT_2) })
}

/// Leading uniform value e^{i lambda phi0} [2 pi A0 lambda^{-1/3} Ai(-lambda^{2/3} xi)
/// - 2 pi i B0 lambda^{-2/3} Ai'(-lambda^{2/3} xi)].
pub fn cfu_eval(c: &CfuCoefficients, lambda: f64) -> Complex64 {
    let z = -lambda.powf(2.0 / 3.0) * c.xi;
    let mut v = 2.0 * PI * c.a0 * lambda.powf(-1.0 / 3.0) * ai(z);
    if c.b0 != Complex64::new(0.0, 0.0) {
        v -= 2.0 * PI * I * c.b0 * lambda.powf(-2.0 / 3.0) * ai_prime(z);
    }
    Complex64::from_polar(1.0, lambda * c.phi0) * v
}

/// Large-xi form of `cfu_eval`, obtained from the oscillatory Airy asymptotics:
/// sqrt(pi/lambda) [(A0 xi^{-1/4} - B0 xi^{1/4}) e^{i(lambda phi1 - pi/4)}
/// + (A0 xi^{-1/4} + B0 xi^{1/4}) e^{i(lambda phi2 + pi/4)}].
pub fn cfu_far_field(c: &CfuCoefficients, lambda: f64) -> Result<Complex64> {
    if !(c.xi > 0.0) {
        return Err(precondition("far-field form needs xi > 0"));
    }
    let q = c.xi.powf(0.25);
    let zeta = 2.0 / 3.0 * c.xi.powf(1.5);
    let upper = (c.a0 / q - c.b0 * q) * Complex64::from_polar(1.0, lambda * (c.phi0 + zeta) - FRAC_PI_4);
    let lower = (c.a0 / q + c.b0 * q) * Complex64::from_polar(1.0, lambda * (c.phi0 - zeta) + FRAC_PI_4);
    Ok((PI / lambda).sqrt() * (upper + lower))
}

/// Small-alpha stationary points and unfolding parameter near a double point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAlpha {
    pub x1: Complex64,
    pub x2: Complex64,
    pub xi: f64,
    /// Set when -2 phi_xxx phi_xalpha alpha < 0 and the points form a conjugate pair.
    pub imaginary: bool,
}

pub fn cfu_small_alpha(phi_xxx: f64, phi_x_alpha: f64, alpha: f64) -> Result<SmallAlpha> {
    if phi_xxx == 0.0 || !phi_xxx.is_finite() {
        return Err(precondition("phi_xxx must be nonzero"));
    }
    let d = -2.0 * phi_xxx * phi_x_alpha * alpha;
    let root = if d >= 0.0 { Complex64::new(d.sqrt(), 0.0) } else { Complex64::new(0.0, (-d).sqrt()) };
    Ok(SmallAlpha {
        x1: -root / phi_xxx,
        x2: root / phi_xxx,
        xi: -2f64.cbrt() * phi_x_alpha * alpha / real_cbrt(phi_xxx),
        imaginary: d < 0.0,
    })
}
