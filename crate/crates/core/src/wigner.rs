//! Scaled Wigner transforms
//!
//! W(x, k) = 1/(pi eps) int psi(x + s) conj(psi(x - s)) e^{-2 i k s / eps} ds,
//!
//! computed numerically, in closed form for the Airy fundamental solution, and
//! through Berry's chord construction.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{domain, precondition, Error, Result};
use crate::numerics::{self, real_cbrt, trapezoid};
use crate::specfun::ai;
use crate::stphase::{cfu_eval, cfu_match};
use crate::wkb::Phase;

/// A sampled wave function psi^eps.
///
/// Outside `support` the function is either undefined or negligible; the
/// quadrature window never reaches past it.
#[derive(Clone)]
pub struct WaveFunctionSampler {
    pub value: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub support: (f64, f64),
    pub epsilon: f64,
}

impl WaveFunctionSampler {
    pub fn new(value: impl Fn(f64) -> Complex64 + Send + Sync + 'static, support: (f64, f64), epsilon: f64) -> Self {
        Self { value: Arc::new(value), support, epsilon }
    }

    pub fn at(&self, x: f64) -> Complex64 {
        (self.value)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationRule {
    /// psi exists only on the support (a WKB field); the window stops a
    /// relative margin short of the nearest support endpoint.
    SupportLimited,
    /// psi is negligible outside the support; the window reaches the endpoint.
    DomainLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePolicy {
    /// Samples on the half-window 0 < s <= L.
    pub sigma_samples: usize,
    /// Fraction of the window covered by the raised-cosine taper, in (0, 0.5).
    pub taper_fraction: f64,
    pub truncation_rule: TruncationRule,
    /// Relative margin delta used by `SupportLimited`.
    pub support_margin: f64,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            sigma_samples: 1024,
            taper_fraction: 0.1,
            truncation_rule: TruncationRule::SupportLimited,
            support_margin: 0.05,
        }
    }
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_samples < 2 {
            return Err(precondition("sigma_samples must be at least 2"));
        }
        if !(self.taper_fraction > 0.0 && self.taper_fraction < 0.5) {
            return Err(precondition("taper_fraction must lie in (0, 0.5)"));
        }
        if !(0.0..1.0).contains(&self.support_margin) {
            return Err(precondition("support_margin must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Half-width L of the s-window at x.
    pub fn window(&self, x: f64, support: (f64, f64)) -> f64 {
        let l = (x - support.0).min(support.1 - x);
        match self.truncation_rule {
            TruncationRule::SupportLimited => (1.0 - self.support_margin) * l,
            TruncationRule::DomainLimited => l,
        }
    }

    fn taper(&self, s: f64, l: f64) -> f64 {
        let start = (1.0 - self.taper_fraction) * l;
        if s <= start {
            1.0
        } else if s >= l {
            0.0
        } else {
            0.5 * (1.0 + (PI * (s - start) / (self.taper_fraction * l)).cos())
        }
    }
}

/// Samples needed on a half-window of width l to resolve e^{-2 i k s / eps}
/// at two points per oscillation.
pub fn required_sigma_samples(k_max: f64, l: f64, epsilon: f64) -> usize {
    (2.0 * k_max * l / (PI * epsilon)).ceil() as usize
}

/// Real values on an x-by-k grid, stored row-major (one row per x).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub xs: Vec<f64>,
    pub ks: Vec<f64>,
    pub values: Vec<f64>,
    pub epsilon: f64,
}

impl PhaseSpaceGrid {
    /// Fill a grid from a pointwise function, rows in parallel.
    pub fn from_fn(xs: &[f64], ks: &[f64], epsilon: f64, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let values = xs.par_iter().flat_map_iter(|&x| ks.iter().map(move |&k| (x, k))).map(|(x, k)| f(x, k)).collect();
        Self { xs: xs.to_vec(), ks: ks.to_vec(), values, epsilon }
    }

    /// Fallible variant of `from_fn`; the first error aborts the fill.
    pub fn try_from_fn(
        xs: &[f64],
        ks: &[f64],
        epsilon: f64,
        f: impl Fn(f64, f64) -> Result<f64> + Sync,
    ) -> Result<Self> {
        let rows: Vec<Vec<f64>> =
            xs.par_iter().map(|&x| ks.iter().map(|&k| f(x, k)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        Ok(Self { xs: xs.to_vec(), ks: ks.to_vec(), values: rows.concat(), epsilon })
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nk(&self) -> usize {
        self.ks.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ks.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ks.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn uniform_spacing(ks: &[f64]) -> Option<f64> {
    if ks.len() < 2 {
        return None;
    }
    let dk = (ks[ks.len() - 1] - ks[0]) / (ks.len() - 1) as f64;
    if !(dk > 0.0) {
        return None;
    }
    let ok = ks.iter().enumerate().all(|(j, &k)| (k - (ks[0] + j as f64 * dk)).abs() <= 1e-9 * dk);
    ok.then_some(dk)
}

/// Numerical scaled Wigner transform on the grid xs by ks.
///
/// With a uniform k-grid the s-step is tied to the k-spacing, h = pi eps / (M dk)
/// with M a power of two, and each row is one FFT of length M. Otherwise the
/// sum is evaluated directly with h = L / sigma_samples.
pub fn wigner_numeric(
    psi: &WaveFunctionSampler,
    xs: &[f64],
    ks: &[f64],
    q: &QuadraturePolicy,
) -> Result<PhaseSpaceGrid> {
    q.validate()?;
    let eps = psi.epsilon;
    if !(eps > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    if ks.is_empty() || xs.is_empty() {
        return Err(precondition("empty grid"));
    }
    let k_max = ks.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    for &x in xs {
        let l = q.window(x, psi.support);
        if l > 0.0 {
            let required = required_sigma_samples(k_max, l, eps);
            if q.sigma_samples < required {
                return Err(Error::Undersampled { required, given: q.sigma_samples });
            }
        }
    }
    let dk = uniform_spacing(ks);
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            let l = q.window(x, psi.support);
            if !(l > 0.0) {
                return vec![0.0; ks.len()];
            }
            match dk {
                Some(dk) => fft_row(psi, x, l, ks[0], dk, ks.len(), q),
                None => direct_row(psi, x, l, ks, q),
            }
        })
        .collect();
    Ok(PhaseSpaceGrid { xs: xs.to_vec(), ks: ks.to_vec(), values: rows.concat(), epsilon: eps })
}

fn product(psi: &WaveFunctionSampler, x: f64, s: f64) -> Complex64 {
    psi.at(x + s) * psi.at(x - s).conj()
}

fn fft_row(psi: &WaveFunctionSampler, x: f64, l: f64, k0: f64, dk: f64, nk: usize, q: &QuadraturePolicy) -> Vec<f64> {
    let eps = psi.epsilon;
    let needed = (PI * eps * q.sigma_samples as f64 / (l * dk)).ceil() as usize;
    let m = needed.max(nk).next_power_of_two();
    let h = PI * eps / (m as f64 * dk);
    let n = (l / h).floor() as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    // Terms with n >= m alias onto n mod m since e^{-2 pi i j n / m} is m-periodic.
    for i in 1..=n {
        let s = i as f64 * h;
        let w = q.taper(s, l);
        if w == 0.0 {
            continue;
        }
        buf[i % m] += w * product(psi, x, s) * Complex64::from_polar(1.0, -2.0 * k0 * s / eps);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let p0 = psi.at(x).norm_sqr();
    let c = h / (PI * eps);
    buf[..nk].iter().map(|s| c * (p0 + 2.0 * s.re)).collect()
}

fn direct_row(psi: &WaveFunctionSampler, x: f64, l: f64, ks: &[f64], q: &QuadraturePolicy) -> Vec<f64> {
    let eps = psi.epsilon;
    let n = q.sigma_samples;
    let h = l / n as f64;
    let samples: Vec<(f64, Complex64)> = (1..=n)
        .map(|i| {
            let s = i as f64 * h;
            (s, q.taper(s, l) * product(psi, x, s))
        })
        .collect();
    let p0 = psi.at(x).norm_sqr();
    let c = h / (PI * eps);
    ks.iter()
        .map(|&k| {
            let sum: f64 = samples.iter().map(|&(s, p)| (p * Complex64::from_polar(1.0, -2.0 * k * s / eps)).re).sum();
            c * (p0 + 2.0 * sum)
        })
        .collect()
}

/// Closed-form Wigner transform of the Airy fundamental solution,
/// 2^{-1/3} eps^{-2/3} x0^{-1/2} Ai(2^{2/3} eps^{-2/3} (k^2 - x)).
pub fn wigner_exact_airy(x: f64, k: f64, epsilon: f64, x0: f64) -> f64 {
    let s = epsilon.powf(-2.0 / 3.0);
    2f64.powf(-1.0 / 3.0) * s / x0.sqrt() * ai(2f64.powf(2.0 / 3.0) * s * (k * k - x))
}

/// Positive half-length s0 of the chord with midpoint (x, k):
/// S'(x + s) + S'(x - s) = 2k, searched on `bracket`.
pub fn chord_points(s_prime: &dyn Fn(f64) -> f64, x: f64, k: f64, bracket: (f64, f64)) -> Option<f64> {
    let g = |s: f64| s_prime(x + s) + s_prime(x - s) - 2.0 * k;
    let (mut a, mut b) = bracket;
    let (mut ga, gb) = (g(a), g(b));
    if !(ga.is_finite() && gb.is_finite()) {
        return None;
    }
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() {
        return None;
    }
    while b - a > 1e-10 * (1.0 + a.abs().max(b.abs())) {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return Some(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let mut s = 0.5 * (a + b);
    let (lo, hi) = (a, b);
    for _ in 0..4 {
        let h = numerics::fd_step(s, 1e-5);
        let d = (g(s + h) - g(s - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = s - g(s) / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        let done = (next - s).abs() <= 1e-13;
        s = next;
        if done {
            break;
        }
    }
    Some(s)
}

/// One WKB branch as seen by Berry's formulas: phase, amplitude, and the
/// interval on which both are defined.
pub struct SemiclassicalBranch<'a> {
    pub phase: &'a dyn Phase,
    pub amplitude: &'a dyn Fn(f64) -> Complex64,
    pub domain: (f64, f64),
}

impl SemiclassicalBranch<'_> {
    fn d(&self, x: f64, s: f64) -> Complex64 {
        (self.amplitude)(x + s) * (self.amplitude)(x - s).conj()
    }

    fn bracket(&self, x: f64) -> (f64, f64) {
        (0.0, (x - self.domain.0).min(self.domain.1 - x))
    }
}

/// Where (x, k) sits with respect to the chord construction.
enum Chord {
    Found(f64),
    /// k beyond the manifold: no real chord, handled by the coalescence limit.
    Exterior,
}

fn locate_chord(b: &SemiclassicalBranch<'_>, x: f64, k: f64) -> Result<Chord> {
    let sp = |t: f64| b.phase.d1(t);
    if let Some(s) = chord_points(&sp, x, k, b.bracket(x)) {
        return Ok(Chord::Found(s));
    }
    // Sign of the chord equation at s = 0 against the curvature of the branch
    // decides which side of the manifold the point is on.
    let g0 = 2.0 * (b.phase.d1(x) - k);
    if g0 * b.phase.d3(x) > 0.0 {
        Ok(Chord::Exterior)
    } else {
        Err(Error::NoStationaryPoint { x, k })
    }
}

/// Berry's local approximation, valid near the manifold k = S'(x).
pub fn semiclassical_wigner_local(b: &SemiclassicalBranch<'_>, x: f64, k: f64, epsilon: f64) -> Result<f64> {
    let s3 = b.phase.d3(x);
    if s3 == 0.0 || !s3.is_finite() {
        return Err(Error::Degenerate(format!("S'''({x}) = {s3}")));
    }
    let s0 = match locate_chord(b, x, k)? {
        Chord::Found(s) => s,
        Chord::Exterior => 0.0,
    };
    let c = 2f64.powf(2.0 / 3.0) * epsilon.powf(-2.0 / 3.0);
    let pre = c * (2.0 / s3.abs()).cbrt() * b.d(x, s0).re;
    Ok(pre * ai(-c * real_cbrt(2.0 / s3) * (k - b.phase.d1(x))))
}

/// Chord half-lengths below this are treated as coalesced.
const COALESCENCE_CHORD: f64 = 1e-3;

/// Uniform approximation 2 A0 eps^{-2/3} Ai(-eps^{-2/3} xi) with (xi, A0) from
/// matching the stationary points +-s0 of S(x+s) - S(x-s) - 2ks.
pub fn semiclassical_wigner_uniform(b: &SemiclassicalBranch<'_>, x: f64, k: f64, epsilon: f64) -> Result<f64> {
    let s3 = b.phase.d3(x);
    if s3 == 0.0 || !s3.is_finite() {
        return Err(Error::Degenerate(format!("S'''({x}) = {s3}")));
    }
    let chord = locate_chord(b, x, k)?;
    let s0 = match chord {
        Chord::Found(s) if s > COALESCENCE_CHORD * x.abs().max(1.0) => s,
        _ => {
            let xi = 2.0 * real_cbrt(1.0 / s3) * (k - b.phase.d1(x));
            let a0 = b.d(x, 0.0).re / s3.abs().cbrt();
            return Ok(2.0 * a0 * epsilon.powf(-2.0 / 3.0) * ai(-epsilon.powf(-2.0 / 3.0) * xi));
        }
    };
    let f = |s: f64| b.phase.value(x + s) - b.phase.value(x - s) - 2.0 * k * s;
    let fxx = |s: f64| b.phase.d2(x + s) - b.phase.d2(x - s);
    // The maximum of the Wigner phase carries F'' < 0.
    let (s1, s2) = if fxx(s0) < 0.0 { (s0, -s0) } else { (-s0, s0) };
    let c = cfu_match(f(s1), f(s2), b.d(x, s1), b.d(x, s2), fxx(s1), fxx(s2))?;
    Ok((cfu_eval(&c, 1.0 / epsilon) / (PI * epsilon)).re)
}

/// k-moment of each row together with the boundary check.
#[derive(Debug, Clone, PartialEq)]
pub struct Moment {
    pub values: Vec<f64>,
    /// Set when the grid's k-boundary carries more than 1e-8 of the grid maximum.
    pub truncated: bool,
}

fn moment(g: &PhaseSpaceGrid, weight: impl Fn(f64) -> f64) -> Moment {
    let max = g.max_abs();
    let nk = g.nk();
    let truncated = (0..g.nx()).any(|i| g.get(i, 0).abs().max(g.get(i, nk - 1).abs()) > 1e-8 * max);
    let values = (0..g.nx())
        .map(|i| {
            let ys: Vec<f64> = g.row(i).iter().zip(&g.ks).map(|(w, &k)| w * weight(k)).collect();
            trapezoid(&g.ks, &ys)
        })
        .collect();
    Moment { values, truncated }
}

/// int W dk, the energy density |psi|^2.
pub fn wigner_moment0(g: &PhaseSpaceGrid) -> Moment {
    moment(g, |_| 1.0)
}

/// int k W dk, the energy flux eps Im(conj(psi) psi').
pub fn wigner_moment1(g: &PhaseSpaceGrid) -> Moment {
    moment(g, |k| k)
}

/// Wigner transform through the Fourier-dual formula
///
/// W(x, k) = (1/eps) int e^{i p x} F(-k/eps - p/2) conj(F(-k/eps + p/2)) dp,
///
/// with F(q) = (1/2 pi) int e^{i q z} psi(z) dz, by trapezoid on |p| <= p_max.
pub fn wigner_via_fourier(
    psi_hat: &dyn Fn(f64) -> Complex64,
    x: f64,
    k: f64,
    epsilon: f64,
    p_max: f64,
    samples: usize,
) -> Result<f64> {
    if !(epsilon > 0.0 && p_max > 0.0) || samples < 2 {
        return Err(precondition("need epsilon > 0, p_max > 0 and at least 2 samples"));
    }
    let kk = k / epsilon;
    let h = p_max / samples as f64;
    let term = |p: f64| (Complex64::from_polar(1.0, p * x) * psi_hat(-kk - p / 2.0) * psi_hat(-kk + p / 2.0).conj()).re;
    // The integrand is conjugate-symmetric in p, so the real part is even.
    let sum: f64 = (1..samples).map(|i| term(i as f64 * h)).sum::<f64>() + 0.5 * term(p_max);
    Ok(h * (term(0.0) + 2.0 * sum) / epsilon)
}

/// Trapezoid pairing int int Q(x, k) W(x, k) dx dk over the grid. The product
/// Q W must be negligible on the grid boundary.
pub fn weak_limit_pairing(g: &PhaseSpaceGrid, q: &dyn Fn(f64, f64) -> f64) -> Result<f64> {
    let (nx, nk) = (g.nx(), g.nk());
    if nx < 2 || nk < 2 {
        return Err(precondition("pairing needs at least a 2x2 grid"));
    }
    let qs: Vec<f64> = g.xs.iter().flat_map(|&x| g.ks.iter().map(move |&k| q(x, k))).collect();
    let qw: Vec<f64> = qs.iter().zip(&g.values).map(|(a, b)| (a * b).abs()).collect();
    let max = qw.iter().fold(0.0f64, |m, v| m.max(*v));
    let boundary = (0..nx)
        .flat_map(|i| [(i, 0), (i, nk - 1)])
        .chain((0..nk).flat_map(|j| [(0, j), (nx - 1, j)]))
        .fold(0.0f64, |m, (i, j)| m.max(qw[i * nk + j]));
    if boundary > 1e-8 * max {
        return Err(Error::SupportEscapesGrid);
    }
    let rows: Vec<f64> = (0..nx)
        .map(|i| {
            let ys: Vec<f64> = (0..nk).map(|j| qs[i * nk + j] * g.get(i, j)).collect();
            trapezoid(&g.ks, &ys)
        })
        .collect();
    Ok(trapezoid(&g.xs, &rows))
}
