//! Hamiltonian ray tracing for H(x, k) = (k^2 - eta^2(x)) / 2, numerical Jacobians
//! and caustic detection, plus closed forms for the linear profile eta^2 = x and
//! the two-dimensional linear layer.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, precondition, Result};
use crate::specfun::AccuracyPolicy;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Medium law eta^2(x) with its derivative, valid on `domain`.
#[derive(Clone)]
pub struct RefractionProfile1D {
    pub name: String,
    pub eta_squared: RealFn,
    pub eta_squared_prime: RealFn,
    pub domain: (f64, f64),
}

impl fmt::Debug for RefractionProfile1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RefractionProfile1D").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

impl RefractionProfile1D {
    pub fn new(
        name: impl Into<String>,
        eta_squared: impl Fn(f64) -> f64 + Send + Sync + 'static,
        eta_squared_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Self {
        Self {
            name: name.into(),
            eta_squared: Arc::new(eta_squared),
            eta_squared_prime: Arc::new(eta_squared_prime),
            domain,
        }
    }

    /// eta^2 = x, the semiclassical Airy medium.
    pub fn airy() -> Self {
        Self::new("airy", |x| x, |_| 1.0, (f64::NEG_INFINITY, f64::INFINITY))
    }

    pub fn constant(c2: f64) -> Self {
        Self::new("constant", move |_| c2, |_| 0.0, (f64::NEG_INFINITY, f64::INFINITY))
    }

    /// eta^2 = mu0 + mu1 x.
    pub fn linear(mu0: f64, mu1: f64) -> Self {
        Self::new("linear", move |x| mu0 + mu1 * x, move |_| mu1, (f64::NEG_INFINITY, f64::INFINITY))
    }

    /// eta^2 = a + b x + c x^2.
    pub fn quadratic(a: f64, b: f64, c: f64) -> Self {
        Self::new(
            "quadratic",
            move |x| a + b * x + c * x * x,
            move |x| b + 2.0 * c * x,
            (f64::NEG_INFINITY, f64::INFINITY),
        )
    }

    pub fn eta2(&self, x: f64) -> f64 {
        (self.eta_squared)(x)
    }

    pub fn eta2_prime(&self, x: f64) -> f64 {
        (self.eta_squared_prime)(x)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    pub fn hamiltonian(&self, x: f64, k: f64) -> f64 {
        0.5 * (k * k - self.eta2(x))
    }

    /// Largest relative mismatch between the supplied derivative and a central
    /// difference of eta^2 over `xs`.
    pub fn derivative_mismatch(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| {
                let h = 1e-5 * x.abs().max(1.0);
                let fd = (self.eta2(x + h) - self.eta2(x - h)) / (2.0 * h);
                let d = self.eta2_prime(x);
                (fd - d).abs() / d.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    pub t: f64,
    pub x: f64,
    pub k: f64,
    pub jacobian: f64,
    pub phase: f64,
}

#[derive(Debug, Clone)]
pub struct RayPath {
    pub samples: Vec<RaySample>,
    pub x0: f64,
    pub k0: f64,
    pub profile: String,
    /// The path left the profile domain before `t_end`.
    pub truncated: bool,
    bundle: Vec<[f64; STATE]>,
}

impl RayPath {
    pub fn max_energy_error(&self, profile: &RefractionProfile1D) -> f64 {
        self.samples.iter().map(|s| profile.hamiltonian(s.x, s.k).abs()).fold(0.0, f64::max)
    }

    /// Cubic Hermite interpolation of x(t) using k = dx/dt at the samples.
    pub fn x_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let i = s.partition_point(|p| p.t <= t).clamp(1, s.len() - 1);
        let (a, b) = (&s[i - 1], &s[i]);
        let h = b.t - a.t;
        if h == 0.0 {
            return Some(a.x);
        }
        let u = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        Some(h00 * a.x + h10 * h * a.k + h01 * b.x + h11 * h * b.k)
    }
}

// Bundle state: central ray (x, k, S), then rays launched at x0 -/+ dx0.
const STATE: usize = 7;

struct Bundle<'a> {
    profile: &'a RefractionProfile1D,
}

impl Bundle<'_> {
    fn rhs(&self, y: &[f64; STATE]) -> [f64; STATE] {
        let p = self.profile;
        [y[1], 0.5 * p.eta2_prime(y[0]), p.eta2(y[0]), y[4], 0.5 * p.eta2_prime(y[3]), y[6], 0.5 * p.eta2_prime(y[5])]
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
const MAX_STEP: f64 = 0.05;

impl Bundle<'_> {
    /// One Dormand-Prince step; returns (new state, error norm).
    fn step(&self, y: &[f64; STATE], h: f64, policy: &AccuracyPolicy) -> ([f64; STATE], f64) {
        let mut k = [[0.0; STATE]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    for i in 0..STATE {
                        ys[i] += h * A[s][j] * kj[i];
                    }
                }
            }
            k[s] = self.rhs(&ys);
        }
        let mut y5 = *y;
        let mut err: f64 = 0.0;
        for i in 0..STATE {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = policy.abs_tol + policy.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        (y5, err)
    }

    /// Adaptive integration from `t0` to `t1`, invoking `visit` after every
    /// accepted step. Returns false if the path left the profile domain.
    fn integrate(
        &self,
        t0: f64,
        y0: [f64; STATE],
        t1: f64,
        policy: &AccuracyPolicy,
        mut visit: impl FnMut(f64, &[f64; STATE]),
    ) -> bool {
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut h = dir * MAX_STEP.min((t1 - t0).abs()).max(1e-12);
        while dir * (t1 - t) > 1e-15 {
            if dir * (t + h - t1) > 0.0 {
                h = t1 - t;
            }
            let (yn, err) = self.step(&y, h, policy);
            if err <= 1.0 || h.abs() < 1e-14 {
                if !(self.profile.contains(yn[0]) && self.profile.contains(yn[3]) && self.profile.contains(yn[5])) {
                    return false;
                }
                t += h;
                y = yn;
                visit(t, &y);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = dir * (h.abs() * grow).min(MAX_STEP);
            } else {
                h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.5);
            }
        }
        true
    }
}

fn jacobian_step(x0: f64) -> f64 {
    1e-5 * x0.abs().max(1.0)
}

fn on_shell_momentum(profile: &RefractionProfile1D, x: f64, sign: f64) -> f64 {
    sign * profile.eta2(x).max(0.0).sqrt()
}

fn initial_bundle(profile: &RefractionProfile1D, x0: f64, k0: f64, s0: f64) -> [f64; STATE] {
    let dx = jacobian_step(x0);
    let sign = if k0 < 0.0 { -1.0 } else { 1.0 };
    [x0, k0, s0, x0 - dx, on_shell_momentum(profile, x0 - dx, sign), x0 + dx, on_shell_momentum(profile, x0 + dx, sign)]
}

fn sample_from(t: f64, y: &[f64; STATE], dx: f64) -> RaySample {
    RaySample { t, x: y[0], k: y[1], jacobian: (y[5] - y[3]) / (2.0 * dx), phase: y[2] }
}

/// Traces the bicharacteristic through (x0, k0) with zero initial phase.
pub fn integrate_hamiltonian(
    profile: &RefractionProfile1D,
    x0: f64,
    k0: f64,
    t_end: f64,
    policy: &AccuracyPolicy,
) -> Result<RayPath> {
    integrate_hamiltonian_with_phase(profile, x0, k0, 0.0, t_end, policy)
}

/// Traces the bicharacteristic through (x0, k0) accumulating S from `s0`.
///
/// The Jacobian dx/dx0 is the central difference of two neighbouring rays that
/// share the central ray's step sequence, so integrator noise cancels.
pub fn integrate_hamiltonian_with_phase(
    profile: &RefractionProfile1D,
    x0: f64,
    k0: f64,
    s0: f64,
    t_end: f64,
    policy: &AccuracyPolicy,
) -> Result<RayPath> {
    policy.validate()?;
    if !(x0.is_finite() && k0.is_finite() && t_end.is_finite()) {
        return Err(domain("ray initial data must be finite"));
    }
    let h0 = profile.hamiltonian(x0, k0);
    if h0.abs() > 1e-8 {
        return Err(precondition(format!("initial condition off the energy shell: H = {h0:e}")));
    }
    if !profile.contains(x0) {
        return Err(domain(format!("x0 = {x0} outside the profile domain")));
    }
    let dx = jacobian_step(x0);
    let y0 = initial_bundle(profile, x0, k0, s0);
    let mut samples = vec![RaySample { jacobian: 1.0, ..sample_from(0.0, &y0, dx) }];
    let mut bundle = vec![y0];
    let ok = Bundle { profile }.integrate(0.0, y0, t_end, policy, |t, y| {
        samples.push(sample_from(t, y, dx));
        bundle.push(*y);
    });
    Ok(RayPath { samples, x0, k0, profile: profile.name.clone(), truncated: !ok, bundle })
}

/// Traces a fan of rays in parallel.
pub fn trace_fan(
    profile: &RefractionProfile1D,
    launches: &[(f64, f64)],
    t_end: f64,
    policy: &AccuracyPolicy,
) -> Vec<Result<RayPath>> {
    launches.par_iter().map(|&(x0, k0)| integrate_hamiltonian(profile, x0, k0, t_end, policy)).collect()
}

/// Caustic crossings (t, x) along the ray through (x0, k0): sign changes of the
/// numerical Jacobian, bisected to 1e-8 in t. A crossing is accepted only if
/// |J| < 1e-6 at the final midpoint.
pub fn find_caustic(profile: &RefractionProfile1D, x0: f64, k0: f64, t_end: f64) -> Result<Vec<(f64, f64)>> {
    let policy = AccuracyPolicy::ray_tracing();
    let path = integrate_hamiltonian(profile, x0, k0, t_end, &policy)?;
    let dx = jacobian_step(x0);
    let bundle = Bundle { profile };
    let state_at = |i: usize, t: f64| -> [f64; STATE] {
        let t0 = path.samples[i].t;
        let mut last = path.bundle[i];
        if t != t0 {
            bundle.integrate(t0, path.bundle[i], t, &policy, |_, y| last = *y);
        }
        last
    };
    let jac = |y: &[f64; STATE]| (y[5] - y[3]) / (2.0 * dx);
    let mut out = Vec::new();
    for i in 1..path.samples.len() {
        let (ja, jb) = (path.samples[i - 1].jacobian, path.samples[i].jacobian);
        if ja == 0.0 {
            if jb != 0.0 || i == 1 {
                out.push((path.samples[i - 1].t, path.samples[i - 1].x));
            }
            continue;
        }
        if ja.signum() == jb.signum() || jb == 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (path.samples[i - 1].t, path.samples[i].t);
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if jac(&state_at(i - 1, mid)).signum() == ja.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        let mid_state = state_at(i - 1, mid);
        if jac(&mid_state).abs() < 1e-6 {
            out.push((mid, mid_state[0]));
        }
    }
    if let Some(last) = path.samples.last() {
        if last.jacobian == 0.0 && path.samples.len() > 1 {
            out.push((last.t, last.x));
        }
    }
    Ok(out)
}

/// Closed-form bicharacteristic of eta^2 = x: x = t^2/4 + k0 t + x0, k = t/2 + k0.
pub fn airy_ray_closed(t: f64, x0: f64, k0: f64) -> (f64, f64) {
    (0.25 * t * t + k0 * t + x0, 0.5 * t + k0)
}

/// Jacobian of the ray launched from the source toward the caustic.
pub fn airy_jacobian_left(t: f64, x0: f64) -> f64 {
    1.0 - t / (2.0 * x0.sqrt())
}

/// Jacobian of the ray launched from the source away from the caustic.
pub fn airy_jacobian_right(t: f64, x0: f64) -> f64 {
    1.0 + t / (2.0 * x0.sqrt())
}

/// Arrival parameters and Jacobians of the two rays reaching x in (0, x0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryArrivalData {
    pub t_minus: f64,
    pub t_plus: f64,
    pub j_minus: f64,
    pub j_plus: f64,
}

pub fn airy_arrivals(x: f64, x0: f64) -> Result<AiryArrivalData> {
    if !(x > 0.0 && x < x0) {
        return Err(domain(format!("two arrivals exist only for 0 < x < x0 (x = {x}, x0 = {x0})")));
    }
    let (sx, s0) = (x.sqrt(), x0.sqrt());
    Ok(AiryArrivalData { t_minus: 2.0 * (s0 - sx), t_plus: 2.0 * (s0 + sx), j_minus: sx / s0, j_plus: -sx / s0 })
}

/// Plane wave entering the layer eta^2(z) = mu0 + mu1 z at z = h with angle psi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearLayerParams {
    pub mu0: f64,
    pub mu1: f64,
    pub h: f64,
    pub eta0: f64,
    pub psi: f64,
    pub kappa0: f64,
}

impl LinearLayerParams {
    /// Parameters with mu0 chosen so the launch momentum lies on the energy
    /// shell, eta0^2 = mu0 + mu1 h.
    pub fn on_shell(mu1: f64, h: f64, eta0: f64, psi: f64, kappa0: f64) -> Result<Self> {
        let p = Self { mu0: eta0 * eta0 - mu1 * h, mu1, h, eta0, psi, kappa0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 > 0.0) {
            return Err(domain("mu1 must be positive"));
        }
        if !(self.psi > 0.0 && self.psi < std::f64::consts::FRAC_PI_2) {
            return Err(domain("incidence angle must lie in (0, pi/2)"));
        }
        if !(self.eta0 > 0.0) {
            return Err(domain("eta0 must be positive"));
        }
        Ok(())
    }

    /// eta0^2 - (mu0 + mu1 h); zero when the boundary data solve the eikonal equation.
    pub fn shell_mismatch(&self) -> f64 {
        self.eta0 * self.eta0 - (self.mu0 + self.mu1 * self.h)
    }

    pub fn eta_squared(&self, z: f64) -> f64 {
        self.mu0 + self.mu1 * z
    }

    /// Semiclassical parameter of the reduced Airy problem, (mu1 / kappa0)^2.
    pub fn semiclassical_epsilon(&self) -> f64 {
        (self.mu1 / self.kappa0).powi(2)
    }

    fn normal_momentum(&self) -> f64 {
        self.eta0 * self.psi.cos()
    }
}

/// Point (y, z) reached at parameter t by the ray launched from (xi, h).
pub fn linear_layer_ray(t: f64, xi: f64, p: &LinearLayerParams) -> (f64, f64) {
    let z = 0.25 * p.mu1 * t * t - p.normal_momentum() * t + p.h;
    let y = xi + p.eta0 * t * p.psi.sin();
    (y, z)
}

pub fn linear_layer_jacobian(t: f64, p: &LinearLayerParams) -> f64 {
    let c = p.normal_momentum();
    (-0.5 * p.mu1 * t + c) / c
}

pub fn linear_layer_caustic_time(p: &LinearLayerParams) -> f64 {
    2.0 * p.normal_momentum() / p.mu1
}

pub fn linear_layer_caustic_depth(p: &LinearLayerParams) -> f64 {
    let c = p.normal_momentum();
    p.h - c * c / p.mu1
}

/// sqrt(eta0^2 cos^2 psi + mu1 (z - h)); real above the caustic.
pub fn linear_layer_beta(z: f64, p: &LinearLayerParams) -> Result<f64> {
    let c = p.normal_momentum();
    let b2 = c * c + p.mu1 * (z - p.h);
    if b2 < 0.0 {
        if b2 > -1e-14 * c * c {
            return Ok(0.0);
        }
        return Err(domain(format!("z = {z} lies below the caustic depth {}", linear_layer_caustic_depth(p))));
    }
    Ok(b2.sqrt())
}

/// The two ray parameters (t_minus, t_plus) at which rays reach depth z.
pub fn linear_layer_arrival_times(z: f64, p: &LinearLayerParams) -> Result<(f64, f64)> {
    let b = linear_layer_beta(z, p)?;
    let c = p.normal_momentum();
    Ok((2.0 / p.mu1 * (c - b), 2.0 / p.mu1 * (c + b)))
}

/// Launch abscissae (xi_minus, xi_plus) of the two rays through (y, z).
pub fn linear_layer_launch_points(y: f64, z: f64, p: &LinearLayerParams) -> Result<(f64, f64)> {
    let b = linear_layer_beta(z, p)?;
    let c = p.normal_momentum();
    let s = 2.0 / p.mu1 * p.eta0 * p.psi.sin();
    Ok((y - s * (c - b), y - s * (c + b)))
}

/// Phase accumulated along the layer ray from (xi, h) up to parameter t.
pub fn linear_layer_phase_along(t: f64, xi: f64, p: &LinearLayerParams) -> f64 {
    let c = p.normal_momentum();
    p.mu1 * p.mu1 / 12.0 * t.powi(3) - 0.5 * p.mu1 * c * t * t + (p.mu0 + p.mu1 * p.h) * t + p.eta0 * xi * p.psi.sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_ray_matches_closed_form() {
        let prof = RefractionProfile1D::airy();
        let path = integrate_hamiltonian(&prof, 1.0, -1.0, 4.0, &AccuracyPolicy::ray_tracing()).unwrap();
        for s in &path.samples {
            let (x, k) = airy_ray_closed(s.t, 1.0, -1.0);
            assert!((s.x - x).abs() < 1e-9 && (s.k - k).abs() < 1e-9);
        }
        assert!(path.max_energy_error(&prof) <= 1e-9);
        assert_eq!(path.samples[0].jacobian, 1.0);
    }

    #[test]
    fn free_motion_in_constant_medium() {
        let prof = RefractionProfile1D::constant(4.0);
        let path = integrate_hamiltonian(&prof, 0.5, 2.0, 3.0, &AccuracyPolicy::ray_tracing()).unwrap();
        for s in &path.samples {
            assert!((s.x - (0.5 + 2.0 * s.t)).abs() < 1e-12);
            assert!((s.k - 2.0).abs() < 1e-14);
            assert!((s.phase - 4.0 * s.t).abs() < 1e-11);
        }
    }

    #[test]
    fn phase_starts_at_supplied_value() {
        let prof = RefractionProfile1D::airy();
        let p = integrate_hamiltonian_with_phase(&prof, 2.0, -(2f64.sqrt()), 0.7, 1.0, &AccuracyPolicy::ray_tracing())
            .unwrap();
        assert_eq!(p.samples[0].phase, 0.7);
    }

    #[test]
    fn off_shell_start_is_rejected() {
        let prof = RefractionProfile1D::airy();
        let r = integrate_hamiltonian(&prof, 1.0, 0.5, 1.0, &AccuracyPolicy::ray_tracing());
        assert!(matches!(r, Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn leaving_domain_truncates() {
        let mut prof = RefractionProfile1D::airy();
        prof.domain = (0.5, 10.0);
        let p = integrate_hamiltonian(&prof, 1.0, -1.0, 4.0, &AccuracyPolicy::ray_tracing()).unwrap();
        assert!(p.truncated);
        assert!(p.samples.last().unwrap().t < 4.0);
    }

    #[test]
    fn hermite_interpolation_of_path() {
        let prof = RefractionProfile1D::airy();
        let p = integrate_hamiltonian(&prof, 1.0, -1.0, 4.0, &AccuracyPolicy::ray_tracing()).unwrap();
        let x = p.x_at(1.2345).unwrap();
        assert!((x - airy_ray_closed(1.2345, 1.0, -1.0).0).abs() < 1e-12);
    }

    #[test]
    fn caustic_of_left_ray() {
        let prof = RefractionProfile1D::airy();
        let c = find_caustic(&prof, 1.0, -1.0, 4.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].0 - 2.0).abs() < 1e-6 && c[0].1.abs() < 1e-6);
        assert!(find_caustic(&prof, 1.0, 1.0, 4.0).unwrap().is_empty());
        assert!(find_caustic(&RefractionProfile1D::constant(1.0), 0.0, 1.0, 4.0).unwrap().is_empty());
    }

    #[test]
    fn arrivals_example() {
        let a = airy_arrivals(1.0, 4.0).unwrap();
        assert_eq!((a.t_minus, a.t_plus, a.j_minus, a.j_plus), (2.0, 6.0, 0.5, -0.5));
        assert!(airy_arrivals(5.0, 4.0).is_err());
        let near = airy_arrivals(4.0 - 1e-12, 4.0).unwrap();
        assert!(near.t_minus < 1e-6 && (near.j_minus - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_ray_touches_caustic() {
        assert_eq!(airy_ray_closed(0.0, 3.0, 0.2), (3.0, 0.2));
        assert_eq!(airy_ray_closed(2.0, 1.0, -1.0), (0.0, 0.0));
        let (x, k) = airy_ray_closed(1.7, 2.0, -(2f64.sqrt()));
        assert!((x - k * k).abs() < 1e-14);
    }

    #[test]
    fn layer_caustic_and_jacobian() {
        let p = LinearLayerParams::on_shell(0.5, 1.0, 1.2, 0.6, 40.0).unwrap();
        assert_eq!(linear_layer_ray(0.0, 0.3, &p), (0.3, 1.0));
        assert_eq!(linear_layer_jacobian(0.0, &p), 1.0);
        let tc = linear_layer_caustic_time(&p);
        assert_eq!(linear_layer_jacobian(tc, &p), 0.0);
        let (_, zc) = linear_layer_ray(tc, 0.0, &p);
        assert!((zc - linear_layer_caustic_depth(&p)).abs() < 1e-15);
        assert!(linear_layer_jacobian(tc - 0.1, &p) > 0.0 && linear_layer_jacobian(tc + 0.1, &p) < 0.0);
        let z = 0.5 * (p.h + zc);
        let (tm, tp) = linear_layer_arrival_times(z, &p).unwrap();
        assert!((linear_layer_ray(tm, 0.0, &p).1 - z).abs() < 1e-14);
        assert!((linear_layer_ray(tp, 0.0, &p).1 - z).abs() < 1e-14);
        assert!(linear_layer_arrival_times(zc - 0.1, &p).is_err());
    }

    #[test]
    fn layer_launch_points_reach_target() {
        let p = LinearLayerParams::on_shell(0.5, 1.0, 1.2, 0.6, 40.0).unwrap();
        let (y, z) = (0.4, 0.2);
        let (tm, tp) = linear_layer_arrival_times(z, &p).unwrap();
        let (xm, xp) = linear_layer_launch_points(y, z, &p).unwrap();
        assert!((linear_layer_ray(tm, xm, &p).0 - y).abs() < 1e-14);
        assert!((linear_layer_ray(tp, xp, &p).0 - y).abs() < 1e-14);
    }
}
