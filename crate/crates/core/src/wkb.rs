//! Geometric-optics fields: branch phases and amplitudes of the point-source
//! problem eps^2 u'' + x u = sigma delta(x - x0), the two-phase WKB field, the
//! exact fundamental solution and its inner (caustic-zone) approximation,
//! linear-layer phases, and finite-difference eikonal/transport residuals.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::numerics::{self, fd_step};
use crate::rays::{self, LinearLayerParams, RefractionProfile1D};
use crate::specfun::{ai, bi};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A real phase function with its first three derivatives.
///
/// Closures get fourth-order finite-difference derivatives for free.
pub trait Phase: Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64 {
        numerics::d1(&|t| self.value(t), x, fd_step(x, 1e-3))
    }
    fn d2(&self, x: f64) -> f64 {
        numerics::d2(&|t| self.value(t), x, fd_step(x, 1e-3))
    }
    fn d3(&self, x: f64) -> f64 {
        numerics::d3(&|t| self.value(t), x, fd_step(x, 1e-3))
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Phase for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    /// Ray reflected from the caustic.
    Plus,
    /// Ray travelling from the source toward the caustic.
    Minus,
    /// Ray travelling from the source away from the caustic (x > x0).
    Right,
}

/// Closed-form phases of the point-source problem in the medium eta^2 = x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPhase {
    pub label: BranchLabel,
    pub x0: f64,
}

impl AiryPhase {
    fn sign(&self) -> f64 {
        match self.label {
            BranchLabel::Minus => -1.0,
            _ => 1.0,
        }
    }
}

impl Phase for AiryPhase {
    fn value(&self, x: f64) -> f64 {
        let c = 2.0 / 3.0 * self.x0 * self.x0.sqrt();
        let v = 2.0 / 3.0 * x * x.sqrt();
        match self.label {
            BranchLabel::Plus => v + c,
            BranchLabel::Minus => c - v,
            BranchLabel::Right => v - c,
        }
    }
    fn d1(&self, x: f64) -> f64 {
        self.sign() * x.sqrt()
    }
    fn d2(&self, x: f64) -> f64 {
        self.sign() * 0.5 / x.sqrt()
    }
    fn d3(&self, x: f64) -> f64 {
        -self.sign() * 0.25 / (x * x.sqrt())
    }
}

pub type AmplitudeFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// One geometric-optics branch: phase, principal amplitude and Maslov index.
#[derive(Clone)]
pub struct BranchField {
    pub label: BranchLabel,
    pub phase: Arc<dyn Phase>,
    pub amplitude: AmplitudeFn,
    pub maslov_index: i32,
    /// Open interval on which the branch exists.
    pub domain: (f64, f64),
}

impl fmt::Debug for BranchField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BranchField")
            .field("label", &self.label)
            .field("maslov_index", &self.maslov_index)
            .field("domain", &self.domain)
            .finish()
    }
}

impl BranchField {
    pub fn phase_at(&self, x: f64) -> f64 {
        self.phase.value(x)
    }

    pub fn amplitude_at(&self, x: f64) -> Complex64 {
        (self.amplitude)(x)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.domain.0 && x < self.domain.1
    }
}

/// Source amplitude exp(-i pi/4) x0^{-1/2} / 2 of the point-source problem.
pub fn source_amplitude(x0: f64) -> Complex64 {
    Complex64::from_polar(0.5 / x0.sqrt(), -FRAC_PI_4)
}

/// Amplitude transported from the source: a_source / sqrt(J), where the root
/// of a negative Jacobian is |J|^{1/2} exp(i pi maslov / 2).
pub fn principal_amplitude(a_source: Complex64, jacobian: f64, maslov_index: i32) -> Complex64 {
    a_source / jacobian.abs().sqrt() * Complex64::from_polar(1.0, -FRAC_PI_2 * maslov_index as f64)
}

/// The reflected (+) and direct (-) branches on 0 < x < x0.
pub fn airy_wkb_branches(x0: f64) -> Result<(BranchField, BranchField)> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(domain(format!("source position must be positive, got {x0}")));
    }
    let a0 = source_amplitude(x0);
    let s0 = x0.sqrt();
    let plus = BranchField {
        label: BranchLabel::Plus,
        phase: Arc::new(AiryPhase { label: BranchLabel::Plus, x0 }),
        amplitude: Arc::new(move |x: f64| principal_amplitude(a0, -x.sqrt() / s0, 1)),
        maslov_index: 1,
        domain: (0.0, x0),
    };
    let minus = BranchField {
        label: BranchLabel::Minus,
        phase: Arc::new(AiryPhase { label: BranchLabel::Minus, x0 }),
        amplitude: Arc::new(move |x: f64| principal_amplitude(a0, x.sqrt() / s0, 0)),
        maslov_index: 0,
        domain: (0.0, x0),
    };
    Ok((plus, minus))
}

/// The outgoing branch on x > x0. Its source amplitude is not fixed by the
/// ray construction and is supplied by the caller.
pub fn airy_right_branch(x0: f64, a_source: Complex64) -> Result<BranchField> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(domain(format!("source position must be positive, got {x0}")));
    }
    let s0 = x0.sqrt();
    Ok(BranchField {
        label: BranchLabel::Right,
        phase: Arc::new(AiryPhase { label: BranchLabel::Right, x0 }),
        amplitude: Arc::new(move |x: f64| principal_amplitude(a_source, x.sqrt() / s0, 0)),
        maslov_index: 0,
        domain: (x0, f64::INFINITY),
    })
}

/// Multiphase field sum_j A_j exp(i S_j / eps) over the branches valid at x.
#[derive(Debug, Clone)]
pub struct WkbField {
    pub branches: Vec<BranchField>,
    pub epsilon: f64,
    pub alpha0: Complex64,
}

impl WkbField {
    pub fn airy(x0: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(domain("epsilon must be positive"));
        }
        let (p, m) = airy_wkb_branches(x0)?;
        Ok(Self { branches: vec![p, m], epsilon, alpha0: source_amplitude(x0) })
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.branches
            .iter()
            .filter(|b| b.contains(x))
            .map(|b| b.amplitude_at(x) * Complex64::from_polar(1.0, b.phase_at(x) / self.epsilon))
            .sum()
    }
}

/// A field value with the caustic-zone warning raised within 10 eps^{2/3} of x = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: Complex64,
    pub near_caustic: bool,
}

/// Two-phase WKB field of the point-source problem on 0 < x < x0.
pub fn airy_wkb_field(x: f64, epsilon: f64, x0: f64) -> Result<FieldValue> {
    if !(epsilon > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    if !(x > 0.0 && x < x0) {
        return Err(domain(format!("WKB field is two-phase only on 0 < x < x0 (x = {x}, x0 = {x0})")));
    }
    Ok(FieldValue { value: airy_wkb_value(x, epsilon, x0), near_caustic: x < 10.0 * epsilon.powf(2.0 / 3.0) })
}

/// Unchecked evaluation of the two-phase field; callers guarantee 0 < x < x0.
pub fn airy_wkb_value(x: f64, epsilon: f64, x0: f64) -> Complex64 {
    let a0 = source_amplitude(x0);
    let c = a0 * x0.powf(0.25) * x.powf(-0.25) * Complex64::from_polar(1.0, 2.0 / 3.0 * x0 * x0.sqrt() / epsilon);
    let th = 2.0 / 3.0 * x * x.sqrt() / epsilon;
    c * (-I * Complex64::from_polar(1.0, th) + Complex64::from_polar(1.0, -th))
}

/// Point-source strength -i exp(-i pi/4) eps, chosen so the field is O(1) as x -> +inf.
pub fn source_strength(epsilon: f64) -> Complex64 {
    -I * Complex64::from_polar(epsilon, -FRAC_PI_4)
}

/// Exact fundamental solution: Ai on the caustic side of the source, the
/// outgoing combination Ai - i Bi beyond it.
pub fn airy_greens(x: f64, x0: f64, epsilon: f64) -> Complex64 {
    let s = epsilon.powf(-2.0 / 3.0);
    let pre = I * source_strength(epsilon) * PI * epsilon.powf(-4.0 / 3.0);
    let (a0, b0) = (ai(-s * x0), bi(-s * x0));
    if x <= x0 {
        pre * Complex64::new(a0, -b0) * ai(-s * x)
    } else {
        pre * a0 * Complex64::new(ai(-s * x), -bi(-s * x))
    }
}

/// Small-eps form of the fundamental solution, valid on the whole line for x < x0.
pub fn airy_inner_approx(x: f64, x0: f64, epsilon: f64) -> Complex64 {
    let modulus = PI.sqrt() * x0.powf(-0.25) * epsilon.powf(-1.0 / 6.0) * ai(-x * epsilon.powf(-2.0 / 3.0));
    Complex64::from_polar(1.0, -FRAC_PI_2 + 2.0 / 3.0 * x0 * x0.sqrt() / epsilon) * modulus
}

/// (S'(x))^2 - eta^2(x) by fourth-order central differences.
pub fn eikonal_residual(s: &dyn Fn(f64) -> f64, profile: &RefractionProfile1D, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let d = numerics::d1(s, x, fd_step(x, 1e-3));
            d * d - profile.eta2(x)
        })
        .collect()
}

/// |2 S' A' + S'' A| by fourth-order central differences.
pub fn transport_residual(s: &dyn Fn(f64) -> f64, a: &dyn Fn(f64) -> Complex64, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let h = fd_step(x, 1e-3);
            let re = |t: f64| a(t).re;
            let im = |t: f64| a(t).im;
            let da = Complex64::new(numerics::d1(&re, x, h), numerics::d1(&im, x, h));
            let s1 = numerics::d1(s, x, h);
            let s2 = numerics::d2(s, x, h);
            (2.0 * s1 * da + s2 * a(x)).norm()
        })
        .collect()
}

/// Geometric phases (S_plus, S_minus) of the two layer rays through (y, z),
/// obtained by following each ray back to its launch point on z = h.
pub fn linear_layer_phases(y: f64, z: f64, p: &LinearLayerParams) -> Result<(f64, f64)> {
    p.validate()?;
    if z > p.h {
        return Err(domain(format!("z = {z} lies outside the layer (h = {})", p.h)));
    }
    let (tm, tp) = rays::linear_layer_arrival_times(z, p)?;
    let (xm, xp) = rays::linear_layer_launch_points(y, z, p)?;
    Ok((rays::linear_layer_phase_along(tp, xp, p), rays::linear_layer_phase_along(tm, xm, p)))
}

/// Principal amplitudes (A_plus, A_minus) of the layer rays at depth z.
pub fn linear_layer_amplitudes(z: f64, p: &LinearLayerParams) -> Result<(Complex64, Complex64)> {
    let b = rays::linear_layer_beta(z, p)?;
    let c = p.eta0 * p.psi.cos();
    let m = (c / b).sqrt();
    Ok((-I * m, Complex64::new(m, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_values_at_special_points() {
        let x0: f64 = 2.0;
        let (p, m) = airy_wkb_branches(x0).unwrap();
        let c = 2.0 / 3.0 * x0.powf(1.5);
        assert!((p.phase_at(x0) - 2.0 * c).abs() < 1e-14);
        assert!((p.phase_at(0.0) - c).abs() < 1e-15 && (m.phase_at(0.0) - c).abs() < 1e-15);
        assert!(m.phase_at(x0).abs() < 1e-15);
        assert_eq!(p.maslov_index, 1);
        assert_eq!(m.maslov_index, 0);
        assert!(airy_wkb_branches(0.0).is_err());
    }

    #[test]
    fn branch_ratio_is_minus_i() {
        let (p, m) = airy_wkb_branches(3.0).unwrap();
        for x in [0.1, 1.0, 2.9] {
            let r = p.amplitude_at(x) / m.amplitude_at(x);
            assert!((r + I).norm() < 1e-15);
        }
    }

    #[test]
    fn amplitude_jacobian_law() {
        let x0 = 2.5;
        let (p, m) = airy_wkb_branches(x0).unwrap();
        let a = rays::airy_arrivals(1.0, x0).unwrap();
        let ref_p = p.amplitude_at(1.0).norm_sqr() * a.j_plus.abs();
        let ref_m = m.amplitude_at(1.0).norm_sqr() * a.j_minus.abs();
        for x in [0.05, 0.4, 1.7, 2.4] {
            let a = rays::airy_arrivals(x, x0).unwrap();
            assert!((p.amplitude_at(x).norm_sqr() * a.j_plus.abs() / ref_p - 1.0).abs() < 1e-10);
            assert!((m.amplitude_at(x).norm_sqr() * a.j_minus.abs() / ref_m - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn field_matches_branch_sum_and_flags_caustic_zone() {
        let (x0, eps) = (2.0, 0.05);
        let f = WkbField::airy(x0, eps).unwrap();
        for x in [0.3, 1.0, 1.9] {
            let v = airy_wkb_field(x, eps, x0).unwrap();
            assert!((v.value - f.value(x)).norm() < 1e-13);
        }
        assert!(airy_wkb_field(0.5, eps, x0).unwrap().near_caustic);
        assert!(!airy_wkb_field(1.5, eps, x0).unwrap().near_caustic);
        assert!(airy_wkb_field(2.5, eps, x0).is_err());
        assert!(airy_wkb_field(0.0, eps, x0).is_err());
    }

    #[test]
    fn greens_is_continuous_with_source_jump() {
        let (x0, eps) = (2.0, 0.07);
        let below = airy_greens(x0, x0, eps);
        let above = airy_greens(x0 * (1.0 + 1e-15), x0, eps);
        assert!((below - above).norm() / below.norm() < 1e-10);
        let h = 1e-6;
        let d_left = (airy_greens(x0 - h, x0, eps) - airy_greens(x0 - 2.0 * h, x0, eps)) / h;
        let d_right = (airy_greens(x0 + 2.0 * h, x0, eps) - airy_greens(x0 + h, x0, eps)) / h;
        let jump = (d_right - d_left) * eps * eps;
        let sigma = source_strength(eps);
        assert!((jump + sigma).norm() / sigma.norm() < 1e-3, "{jump} vs {sigma}");
    }

    #[test]
    fn inner_approx_is_finite_on_caustic_and_small_in_shadow() {
        let (x0, eps) = (2.0, 0.05);
        let v = airy_inner_approx(0.0, x0, eps);
        let expect = PI.sqrt() * x0.powf(-0.25) * eps.powf(-1.0 / 6.0) * crate::specfun::AI_ZERO;
        assert!((v.norm() - expect).abs() < 1e-14);
        assert!(airy_inner_approx(-1.0, x0, eps).norm() < 1e-5 * v.norm());
        let r = airy_greens(1.0, x0, 0.005) / airy_inner_approx(1.0, x0, 0.005);
        assert!((r - 1.0).norm() < 1e-3);
    }

    #[test]
    fn eikonal_and_transport_residuals() {
        let x0 = 2.0;
        let prof = RefractionProfile1D::airy();
        let (p, m) = airy_wkb_branches(x0).unwrap();
        let xs = numerics::linspace(0.1, x0, 40);
        for b in [&p, &m] {
            let s = |x: f64| b.phase_at(x);
            let r = eikonal_residual(&s, &prof, &xs);
            assert!(r.iter().all(|v| v.abs() <= 1e-8));
        }
        let bad = eikonal_residual(&|x| x, &RefractionProfile1D::constant(2.0), &[0.3, 1.0]);
        assert!(bad.iter().all(|v| (v + 1.0).abs() < 1e-12));
        let xs = numerics::linspace(0.2, 0.9 * x0, 40);
        let s = |x: f64| m.phase_at(x);
        let a = |x: f64| m.amplitude_at(x);
        assert!(transport_residual(&s, &a, &xs).iter().all(|v| *v <= 1e-6));
        let r = transport_residual(&|x| 0.5 * x * x, &|_| Complex64::new(1.0, 0.0), &[0.5, 2.0]);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-8));
    }

    #[test]
    fn right_branch_solves_eikonal() {
        let x0 = 1.5;
        let r = airy_right_branch(x0, Complex64::new(1.0, 0.0)).unwrap();
        assert!(r.phase_at(x0).abs() < 1e-15);
        let s = |x: f64| r.phase_at(x);
        let res = eikonal_residual(&s, &RefractionProfile1D::airy(), &numerics::linspace(1.6, 6.0, 20));
        assert!(res.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn layer_phases_solve_eikonal() {
        let p = LinearLayerParams::on_shell(0.8, 1.0, 1.3, 0.6, 20.0).unwrap();
        let zc = rays::linear_layer_caustic_depth(&p);
        for &(y, z) in &[(0.3, 0.9), (-1.0, zc + 0.2), (2.0, 0.5 * (zc + p.h))] {
            let h = 1e-4;
            for idx in 0..2 {
                let s = |y: f64, z: f64| {
                    let v = linear_layer_phases(y, z, &p).unwrap();
                    if idx == 0 {
                        v.0
                    } else {
                        v.1
                    }
                };
                let sy = (s(y + h, z) - s(y - h, z)) / (2.0 * h);
                let sz = (s(y, z + h) - s(y, z - h)) / (2.0 * h);
                assert!((sy * sy + sz * sz - p.eta_squared(z)).abs() < 1e-6);
            }
            let (ap, am) = linear_layer_amplitudes(z, &p).unwrap();
            assert!((ap / am + I).norm() < 1e-14);
        }
        assert!(linear_layer_phases(0.0, zc - 0.1, &p).is_err());
    }
}
