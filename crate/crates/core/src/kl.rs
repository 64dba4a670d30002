//! Kravtsov-Ludwig uniformization of a two-branch field near a fold.
//!
//! Two WKB branches (S+, A+), (S-, A-) are replaced by the Airy ansatz
//!
//! u = sqrt(2 pi) eps^{-1/6} e^{i pi/4} e^{i phi/eps} (g0 Ai(-eps^{-2/3} rho) + i eps^{1/3} g1 Ai'(-eps^{-2/3} rho))
//!
//! with phi = (S+ + S-)/2, rho = (3/4 (S+ - S-))^{2/3}, which stays finite on the caustic rho = 0.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::numerics::{self, fd_step};
use crate::rays::{self, LinearLayerParams, RefractionProfile1D};
use crate::specfun::{ai, ai_prime};
use crate::wkb;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub type CheckedRealFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub type CheckedComplexFn = Arc<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;
pub type CheckedRealFn2 = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// Modified phases (phi, rho).
#[derive(Clone)]
pub struct KlCoordinates {
    pub phi: CheckedRealFn,
    pub rho: CheckedRealFn,
}

impl KlCoordinates {
    /// Wrap closed-form coordinates.
    pub fn new(
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { phi: Arc::new(move |x| Ok(phi(x))), rho: Arc::new(move |x| Ok(rho(x))) }
    }

    pub fn phi_at(&self, x: f64) -> Result<f64> {
        (self.phi)(x)
    }

    pub fn rho_at(&self, x: f64) -> Result<f64> {
        (self.rho)(x)
    }
}

/// Modified amplitudes (g0, g1).
#[derive(Clone)]
pub struct KlAmplitudes {
    pub g0: CheckedComplexFn,
    pub g1: CheckedComplexFn,
}

impl KlAmplitudes {
    pub fn new(
        g0: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        g1: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { g0: Arc::new(move |x| Ok(g0(x))), g1: Arc::new(move |x| Ok(g1(x))) }
    }
}

/// (3/4 d)^{2/3} on the real nonnegative branch. A difference that is negative
/// only by rounding is treated as the caustic.
fn rho_from_difference(d: f64, scale: f64) -> Result<f64> {
    if d >= 0.0 {
        Ok((0.75 * d).powf(2.0 / 3.0))
    } else if d >= -8.0 * f64::EPSILON * scale {
        Ok(0.0)
    } else {
        Err(domain(format!("S+ - S- = {d:e} is negative; the KL coordinate rho would be complex")))
    }
}

pub fn kl_coordinates(
    s_plus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    s_minus: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> KlCoordinates {
    let s_plus = Arc::new(s_plus);
    let s_minus = Arc::new(s_minus);
    let (sp, sm) = (s_plus.clone(), s_minus.clone());
    KlCoordinates {
        phi: Arc::new(move |x| Ok(0.5 * (s_plus(x) + s_minus(x)))),
        rho: Arc::new(move |x| {
            let (a, b) = (sp(x), sm(x));
            rho_from_difference(a - b, a.abs().max(b.abs()))
        }),
    }
}

fn cancels(a_plus: Complex64, a_minus: Complex64) -> bool {
    (a_plus + I * a_minus).norm() <= 4.0 * f64::EPSILON * (a_plus.norm() + a_minus.norm())
}

pub fn kl_amplitudes(
    a_plus: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    a_minus: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    rho: CheckedRealFn,
) -> KlAmplitudes {
    let a_plus = Arc::new(a_plus);
    let a_minus = Arc::new(a_minus);
    let (ap, am, r) = (a_plus.clone(), a_minus.clone(), rho.clone());
    KlAmplitudes {
        g0: Arc::new(move |x| {
            let rho = rho(x)?;
            if rho < 0.0 {
                return Err(domain(format!("rho({x}) = {rho} is negative")));
            }
            Ok(rho.powf(0.25) * FRAC_1_SQRT_2 * (a_plus(x) - I * a_minus(x)))
        }),
        g1: Arc::new(move |x| {
            let (p, m) = (ap(x), am(x));
            if cancels(p, m) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let rho = r(x)?;
            if !(rho > 0.0) {
                return Err(Error::SingularAmplitude(format!(
                    "rho({x}) = {rho} while A+ + iA- = {} does not vanish",
                    p + I * m
                )));
            }
            Ok(rho.powf(-0.25) * FRAC_1_SQRT_2 * (p + I * m))
        }),
    }
}

pub fn kl_field(coords: &KlCoordinates, amps: &KlAmplitudes, epsilon: f64, x: f64) -> Result<Complex64> {
    if !(epsilon > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    let phi = coords.phi_at(x)?;
    let rho = coords.rho_at(x)?;
    let z = -rho * epsilon.powf(-2.0 / 3.0);
    let g0 = (amps.g0)(x)?;
    let g1 = (amps.g1)(x)?;
    let mut bracket = g0 * ai(z);
    if g1 != Complex64::new(0.0, 0.0) {
        bracket += I * epsilon.cbrt() * g1 * ai_prime(z);
    }
    let pre = (2.0 * PI).sqrt() * epsilon.powf(-1.0 / 6.0);
    Ok(pre * Complex64::from_polar(1.0, FRAC_PI_4 + phi / epsilon) * bracket)
}

/// Coordinates and amplitudes built from the two WKB branches of the point-source problem.
pub fn airy_kl_from_branches(x0: f64) -> Result<(KlCoordinates, KlAmplitudes)> {
    let (p, m) = wkb::airy_wkb_branches(x0)?;
    let (pp, mp) = (p.clone(), m.clone());
    let coords = kl_coordinates(move |x| pp.phase_at(x), move |x| mp.phase_at(x));
    let amps = kl_amplitudes(move |x| p.amplitude_at(x), move |x| m.amplitude_at(x), coords.rho.clone());
    Ok((coords, amps))
}

/// Closed-form data for the point-source problem: phi = (2/3) x0^{3/2}, rho = x,
/// g0 = -e^{i pi/4} x0^{-1/4} / sqrt 2, g1 = 0. Valid on the whole line.
pub fn airy_kl_data(x0: f64) -> Result<(KlCoordinates, KlAmplitudes)> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(domain(format!("source position must be positive, got {x0}")));
    }
    let phi = 2.0 / 3.0 * x0 * x0.sqrt();
    let g0 = -Complex64::from_polar(FRAC_1_SQRT_2 * x0.powf(-0.25), FRAC_PI_4);
    Ok((KlCoordinates::new(move |_| phi, |x| x), KlAmplitudes::new(move |_| g0, |_| Complex64::new(0.0, 0.0))))
}

/// Pointwise (r1, r2) = ((phi')^2 + rho (rho')^2 - eta^2, phi' rho').
pub fn kl_phase_residual(coords: &KlCoordinates, profile: &RefractionProfile1D, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    xs.iter()
        .map(|&x| {
            let h = fd_step(x, 1e-3);
            for t in [x - 2.0 * h, x + 2.0 * h] {
                coords.phi_at(t)?;
                coords.rho_at(t)?;
            }
            let phi = |t: f64| coords.phi_at(t).unwrap_or(f64::NAN);
            let rho = |t: f64| coords.rho_at(t).unwrap_or(f64::NAN);
            let dphi = numerics::d1(&phi, x, h);
            let drho = numerics::d1(&rho, x, h);
            Ok((dphi * dphi + rho(x) * drho * drho - profile.eta2(x), dphi * drho))
        })
        .collect()
}

/// KL coordinates on the (y, z) plane.
#[derive(Clone)]
pub struct KlCoordinates2D {
    pub phi: CheckedRealFn2,
    pub rho: CheckedRealFn2,
}

/// Coordinates of the layer field computed from the two ray phases.
pub fn linear_layer_kl_coordinates(p: LinearLayerParams) -> Result<KlCoordinates2D> {
    p.validate()?;
    Ok(KlCoordinates2D {
        phi: Arc::new(move |y, z| {
            let (sp, sm) = wkb::linear_layer_phases(y, z, &p)?;
            Ok(0.5 * (sp + sm))
        }),
        rho: Arc::new(move |y, z| {
            let (sp, sm) = wkb::linear_layer_phases(y, z, &p)?;
            rho_from_difference(sp - sm, sp.abs().max(sm.abs()))
        }),
    })
}

/// Closed forms phi = 2 eta0^3 cos^3 psi / (3 mu1) + eta0 y sin psi and
/// rho = beta^2 / mu1^{2/3}. They agree with the ray construction when the
/// boundary data lie on the energy shell.
pub fn linear_layer_kl_closed(p: LinearLayerParams) -> Result<KlCoordinates2D> {
    p.validate()?;
    let c = p.eta0 * p.psi.cos();
    Ok(KlCoordinates2D {
        phi: Arc::new(move |y, _z| Ok(2.0 * c.powi(3) / (3.0 * p.mu1) + p.eta0 * y * p.psi.sin())),
        rho: Arc::new(move |_y, z| {
            let b = rays::linear_layer_beta(z, &p)?;
            Ok(b * b / p.mu1.powf(2.0 / 3.0))
        }),
    })
}

/// Constant layer amplitudes g0 = -i sqrt 2 (eta0 cos psi)^{1/2} mu1^{-1/6}, g1 = 0.
pub fn linear_layer_kl_amplitudes(p: &LinearLayerParams) -> Result<(Complex64, Complex64)> {
    p.validate()?;
    let g0 = -I * 2f64.sqrt() * (p.eta0 * p.psi.cos()).sqrt() * p.mu1.powf(-1.0 / 6.0);
    Ok((g0, Complex64::new(0.0, 0.0)))
}

/// Two-dimensional residual with gradients in (y, z) by central differences.
pub fn kl_phase_residual_2d(
    coords: &KlCoordinates2D,
    eta2: &dyn Fn(f64, f64) -> f64,
    points: &[(f64, f64)],
) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(y, z)| {
            let (hy, hz) = (fd_step(y, 1e-4), fd_step(z, 1e-4));
            let grad = |f: &CheckedRealFn2| -> Result<(f64, f64)> {
                let fy = (f(y + hy, z)? - f(y - hy, z)?) / (2.0 * hy);
                let fz = (f(y, z + hz)? - f(y, z - hz)?) / (2.0 * hz);
                Ok((fy, fz))
            };
            let gp = grad(&coords.phi)?;
            let gr = grad(&coords.rho)?;
            let rho = (coords.rho)(y, z)?;
            let r1 = gp.0 * gp.0 + gp.1 * gp.1 + rho * (gr.0 * gr.0 + gr.1 * gr.1) - eta2(y, z);
            Ok((r1, gp.0 * gr.0 + gp.1 * gr.1))
        })
        .collect()
}
