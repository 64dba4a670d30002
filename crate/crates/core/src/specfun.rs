//! Airy functions of the first and second kind with first derivatives, the
//! Airy-square integral identity and the half-line Fourier power integral.
//!
//! For `|z|` below the switch radius the Maclaurin series is summed in
//! double-double arithmetic, which absorbs the cancellation between the two
//! power series on either side of the origin. Beyond the radius the standard
//! exponential (z > 0) and oscillatory (z < 0) asymptotic expansions are used,
//! truncated at their smallest term.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::numerics::DoubleDouble as Dd;

const GAMMA_ONE_THIRD: Dd = Dd::new(2.678_938_534_707_747_5, 1.794_779_864_822_524_4e-16);
const GAMMA_TWO_THIRDS: Dd = Dd::new(1.354_117_939_426_400_5, -4.623_120_391_136_641_6e-17);
const CBRT_3: Dd = Dd::new(1.442_249_570_307_408_3, 8.054_912_676_113_687e-17);
const SQRT_3: Dd = Dd::new(1.732_050_807_568_877_2, 1.003_508_422_180_690_3e-16);
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Ai(0) to double precision.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// Ai'(0) to double precision.
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiryKind {
    Ai,
    Bi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiryOrder {
    Value,
    FirstDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryRequest {
    pub kind: AiryKind,
    pub order: AiryOrder,
    pub argument: f64,
}

impl AiryRequest {
    pub fn new(kind: AiryKind, order: AiryOrder, argument: f64) -> Self {
        Self { kind, order, argument }
    }
}

/// Target accuracy and the series/asymptotic switch radius.
///
/// `rel_tol` is the accuracy the evaluation promises; the series are always
/// summed to working precision and the asymptotic expansions are cut at their
/// smallest term.
/// The same record doubles as the step-control policy of the ray integrator,
/// where only `abs_tol` and `rel_tol` are read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub series_asymptotic_switch: f64,
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self { abs_tol: 1e-300, rel_tol: 1e-13, series_asymptotic_switch: 8.0 }
    }
}

impl AccuracyPolicy {
    /// Step control used for ray tracing: local error 1e-10 per unit parameter.
    pub fn ray_tracing() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, series_asymptotic_switch: 8.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        if !(self.series_asymptotic_switch > 0.0) {
            return Err(domain("switch radius must be positive"));
        }
        Ok(())
    }
}

/// All four Airy quantities at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

pub fn airy(req: AiryRequest) -> Result<f64> {
    airy_with_policy(req, &AccuracyPolicy::default())
}

pub fn airy_with_policy(req: AiryRequest, policy: &AccuracyPolicy) -> Result<f64> {
    policy.validate()?;
    let z = req.argument;
    if !z.is_finite() {
        return Err(domain(format!("Airy argument must be finite, got {z}")));
    }
    let v = if z.abs() < policy.series_asymptotic_switch {
        let s = maclaurin(z, req.order);
        combine(&s, req.kind)
    } else if z > 0.0 {
        exponential_asymptotic(z, req.kind, req.order, policy)
    } else {
        oscillatory_asymptotic(-z, req.kind, req.order, policy)
    };
    Ok(v)
}

/// Ai(z); NaN for non-finite input.
pub fn ai(z: f64) -> f64 {
    airy_fast(AiryKind::Ai, AiryOrder::Value, z)
}

/// Ai'(z); NaN for non-finite input.
pub fn ai_prime(z: f64) -> f64 {
    airy_fast(AiryKind::Ai, AiryOrder::FirstDerivative, z)
}

/// Bi(z); NaN for non-finite input.
pub fn bi(z: f64) -> f64 {
    airy_fast(AiryKind::Bi, AiryOrder::Value, z)
}

/// Bi'(z); NaN for non-finite input.
pub fn bi_prime(z: f64) -> f64 {
    airy_fast(AiryKind::Bi, AiryOrder::FirstDerivative, z)
}

pub fn airy_all(z: f64) -> AiryValues {
    AiryValues { ai: ai(z), ai_prime: ai_prime(z), bi: bi(z), bi_prime: bi_prime(z) }
}

fn airy_fast(kind: AiryKind, order: AiryOrder, z: f64) -> f64 {
    airy_with_policy(AiryRequest::new(kind, order, z), &AccuracyPolicy::default()).unwrap_or(f64::NAN)
}

/// Series pair (f, g) or (f', g') in double-double precision.
struct SeriesPair {
    f: Dd,
    g: Dd,
}

fn maclaurin(z: f64, order: AiryOrder) -> SeriesPair {
    let zz = Dd::from_f64(z);
    let z3 = zz * zz * zz;
    let small = |t: Dd, s: Dd| t.hi.abs() <= 1e-34 * s.hi.abs().max(1e-300);
    match order {
        AiryOrder::Value => {
            // f = sum t_k, t_{k+1} = t_k z^3 / ((3k+2)(3k+3))
            // g = sum u_k, u_{k+1} = u_k z^3 / ((3k+3)(3k+4))
            let (mut t, mut u) = (Dd::ONE, zz);
            let (mut f, mut g) = (t, u);
            for k in 0..200u32 {
                let k3 = 3.0 * k as f64;
                t = (t * z3).div_f64((k3 + 2.0) * (k3 + 3.0));
                u = (u * z3).div_f64((k3 + 3.0) * (k3 + 4.0));
                f = f + t;
                g = g + u;
                if small(t, f) && small(u, g) {
                    break;
                }
            }
            SeriesPair { f, g }
        }
        AiryOrder::FirstDerivative => {
            // f' = z^2/2 + ..., a_{k+1} = a_k z^3 / (3k (3k+2)) for k >= 1
            // g' = 1 + ...,     b_{k+1} = b_k z^3 / ((3k+1)(3k+3))
            let mut a = (zz * zz).div_f64(2.0);
            let mut b = Dd::ONE;
            let (mut f, mut g) = (a, b);
            b = z3.div_f64(3.0);
            g = g + b;
            for k in 1..200u32 {
                let k3 = 3.0 * k as f64;
                a = (a * z3).div_f64(k3 * (k3 + 2.0));
                b = (b * z3).div_f64((k3 + 1.0) * (k3 + 3.0));
                f = f + a;
                g = g + b;
                if small(a, f) && small(b, g) {
                    break;
                }
            }
            SeriesPair { f, g }
        }
    }
}

fn series_constants() -> (Dd, Dd) {
    // Ai(0) = 3^{-2/3} / Gamma(2/3), -Ai'(0) = 3^{-1/3} / Gamma(1/3)
    let c1 = Dd::ONE / (CBRT_3 * CBRT_3 * GAMMA_TWO_THIRDS);
    let c2 = Dd::ONE / (CBRT_3 * GAMMA_ONE_THIRD);
    (c1, c2)
}

fn combine(s: &SeriesPair, kind: AiryKind) -> f64 {
    let (c1, c2) = series_constants();
    match kind {
        AiryKind::Ai => (c1 * s.f - c2 * s.g).to_f64(),
        AiryKind::Bi => (SQRT_3 * (c1 * s.f + c2 * s.g)).to_f64(),
    }
}

/// Coefficients u_k (value) or v_k (derivative) of the Airy asymptotic series.
fn asymptotic_coefficients(order: AiryOrder, n: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n);
    let mut uk = 1.0;
    u.push(1.0);
    for k in 1..n {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
    }
    match order {
        AiryOrder::Value => u,
        AiryOrder::FirstDerivative => u
            .iter()
            .enumerate()
            .map(|(k, &uk)| {
                if k == 0 {
                    1.0
                } else {
                    let kf = k as f64;
                    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk
                }
            })
            .collect(),
    }
}

/// Sums `sum_k s_k c_k zeta^{-k}` with sign pattern `s_k`, truncating at the
/// smallest term or once terms drop below working precision.
fn asymptotic_sum(coef: &[f64], zeta: f64, sign: impl Fn(usize) -> f64, policy: &AccuracyPolicy) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut prev = f64::INFINITY;
    for (k, &c) in coef.iter().enumerate() {
        let term = sign(k) * c * pow;
        if term.abs() > prev {
            break;
        }
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() || term.abs() <= policy.abs_tol {
            break;
        }
        prev = term.abs();
        pow /= zeta;
    }
    sum
}

fn exponential_asymptotic(z: f64, kind: AiryKind, order: AiryOrder, policy: &AccuracyPolicy) -> f64 {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let n = (2.0 * zeta).ceil() as usize + 2;
    let coef = asymptotic_coefficients(order, n.min(120));
    let q = z.sqrt().sqrt();
    match (kind, order) {
        (AiryKind::Ai, AiryOrder::Value) => {
            let s = asymptotic_sum(&coef, zeta, |k| if k % 2 == 0 { 1.0 } else { -1.0 }, policy);
            0.5 * FRAC_1_SQRT_PI * (-zeta).exp() / q * s
        }
        (AiryKind::Ai, AiryOrder::FirstDerivative) => {
            let s = asymptotic_sum(&coef, zeta, |k| if k % 2 == 0 { 1.0 } else { -1.0 }, policy);
            -0.5 * FRAC_1_SQRT_PI * q * (-zeta).exp() * s
        }
        (AiryKind::Bi, AiryOrder::Value) => {
            let s = asymptotic_sum(&coef, zeta, |_| 1.0, policy);
            FRAC_1_SQRT_PI * zeta.exp() / q * s
        }
        (AiryKind::Bi, AiryOrder::FirstDerivative) => {
            let s = asymptotic_sum(&coef, zeta, |_| 1.0, policy);
            FRAC_1_SQRT_PI * q * zeta.exp() * s
        }
    }
}

fn oscillatory_asymptotic(w: f64, kind: AiryKind, order: AiryOrder, policy: &AccuracyPolicy) -> f64 {
    let zeta = 2.0 / 3.0 * w * w.sqrt();
    let n = (2.0 * zeta).ceil() as usize + 2;
    let coef = asymptotic_coefficients(order, n.min(240));
    let even: Vec<f64> = coef.iter().step_by(2).copied().collect();
    let odd: Vec<f64> = coef.iter().skip(1).step_by(2).copied().collect();
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let zeta2 = zeta * zeta;
    let pe = asymptotic_sum(&even, zeta2, alt, policy);
    let po = asymptotic_sum(&odd, zeta2, alt, policy) / zeta;
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = w.sqrt().sqrt();
    match (kind, order) {
        (AiryKind::Ai, AiryOrder::Value) => FRAC_1_SQRT_PI / q * (c * pe + s * po),
        (AiryKind::Ai, AiryOrder::FirstDerivative) => FRAC_1_SQRT_PI * q * (s * pe - c * po),
        (AiryKind::Bi, AiryOrder::Value) => FRAC_1_SQRT_PI / q * (-s * pe + c * po),
        (AiryKind::Bi, AiryOrder::FirstDerivative) => FRAC_1_SQRT_PI * q * (c * pe + s * po),
    }
}

/// Closed form of the integral of Ai(r1 k^2 + r2 k + r3) over the real k-line.
pub fn airy_square_integral(r1: f64, r2: f64, r3: f64) -> Result<f64> {
    if !(r1 > 0.0) || !r2.is_finite() || !r3.is_finite() {
        return Err(domain(format!("airy_square_integral requires r1 > 0 and finite inputs, got r1 = {r1}")));
    }
    let arg = -(r2 * r2 - 4.0 * r1 * r3) / (4f64.powf(4.0 / 3.0) * r1);
    let a = ai(arg);
    Ok(2.0 * PI / r1.sqrt() * 2f64.powf(-1.0 / 3.0) * a * a)
}

/// Half-line integral of t^gamma exp(i nu t^p) over (0, inf).
pub fn fourier_power_integral(gamma: f64, nu: f64, p: u32) -> Result<Complex64> {
    if !(gamma > -1.0) {
        return Err(domain(format!("gamma must exceed -1, got {gamma}")));
    }
    if nu == 0.0 || !nu.is_finite() {
        return Err(domain("nu must be finite and nonzero"));
    }
    if p == 0 {
        return Err(Error::Domain("power p must be a positive integer".into()));
    }
    let pf = p as f64;
    let s = (gamma + 1.0) / pf;
    let modulus = nu.abs().powf(-s) * statrs::function::gamma::gamma(s) / pf;
    let phase = PI * (gamma + 1.0) * nu.signum() / (2.0 * pf);
    Ok(Complex64::from_polar(modulus, phase))
}
