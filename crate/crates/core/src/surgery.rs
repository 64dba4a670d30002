//! Wignerization of the two-phase WKB field of the point-source problem.
//!
//! The Wigner transform of u = u+ + u- splits into four integrals
//! W_j = 1/(pi eps) int D_j(s, x) e^{i F_j(s; x, k) / eps} ds with
//!
//! | j | F_j                              | D_j                          |
//! |---|----------------------------------|------------------------------|
//! | 1 | S+(x+s) - S+(x-s) - 2ks          | A+(x+s) conj A+(x-s)         |
//! | 2 | S-(x+s) - S-(x-s) - 2ks          | A-(x+s) conj A-(x-s)         |
//! | 3 | S+(x+s) - S-(x-s) - 2ks          | A+(x+s) conj A-(x-s)         |
//! | 4 | S-(x+s) - S+(x-s) - 2ks          | A-(x+s) conj A+(x-s)         |
//!
//! Unfolding parameter of the diagonal integrals: alpha = k - sqrt(x) for
//! j = 1 (k > 0) and alpha = k + sqrt(x) for j = 2 (k < 0). Off-diagonal
//! exterior contributions are fixed by the convention W3 = 0 = -W4.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::rays::RefractionProfile1D;
use crate::specfun::{ai, airy_square_integral};
use crate::stphase::{cfu_eval, standard_spa, CfuCoefficients, Multiplicity, StationaryPoint};
use crate::wigner::{wigner_exact_airy, PhaseSpaceGrid};

/// Relative width of the bands treated as lying on the two parabolas.
const CURVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// x < k^2
    Exterior,
    /// x = k^2
    OnManifold,
    /// k^2 < x < 2k^2
    Between,
    /// x = 2k^2
    OnConjugate,
    /// x > 2k^2
    Interior,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Exterior => "exterior",
            Self::OnManifold => "on_manifold",
            Self::Between => "between",
            Self::OnConjugate => "on_conjugate",
            Self::Interior => "interior",
        };
        f.write_str(s)
    }
}

pub fn classify_region(x: f64, k: f64) -> Result<RegionLabel> {
    if !(x > 0.0) || !k.is_finite() {
        return Err(domain(format!("regions are defined in the illuminated zone x > 0 (x = {x}, k = {k})")));
    }
    let k2 = k * k;
    let tol = CURVE_TOL * x.max(1.0);
    Ok(if (x - k2).abs() <= tol {
        RegionLabel::OnManifold
    } else if (x - 2.0 * k2).abs() <= tol {
        RegionLabel::OnConjugate
    } else if x < k2 {
        RegionLabel::Exterior
    } else if x < 2.0 * k2 {
        RegionLabel::Between
    } else {
        RegionLabel::Interior
    })
}

/// Half chord length 2|k| |x - k^2|^{1/2}; real or imaginary part of the stationary points.
pub fn sigma0(x: f64, k: f64) -> f64 {
    2.0 * k.abs() * (x - k * k).abs().sqrt()
}

/// One of the four Wigner integrals of the two-phase Airy field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerBranchIntegral {
    pub index: u8,
    pub x0: f64,
}

/// F and its first three s-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDerivatives {
    pub f: f64,
    pub f_s: f64,
    pub f_ss: f64,
    pub f_sss: f64,
}

impl WignerBranchIntegral {
    pub fn new(index: u8, x0: f64) -> Result<Self> {
        if !(1..=4).contains(&index) {
            return Err(domain(format!("Wigner integral index must be 1..=4, got {index}")));
        }
        if !(x0 > 0.0) {
            return Err(domain("source position must be positive"));
        }
        Ok(Self { index, x0 })
    }

    /// Signs (c+, c-) with F = c+ (2/3)(x+s)^{3/2} + c- (2/3)(x-s)^{3/2} - 2ks.
    fn signs(&self) -> (f64, f64) {
        match self.index {
            1 => (1.0, -1.0),
            2 => (-1.0, 1.0),
            3 => (1.0, 1.0),
            _ => (-1.0, -1.0),
        }
    }

    /// D_j(s, x) for |s| < x.
    pub fn amplitude(&self, s: f64, x: f64) -> Complex64 {
        let m = 0.25 / self.x0.sqrt() * ((x + s) * (x - s)).powf(-0.25);
        match self.index {
            1 | 2 => Complex64::new(m, 0.0),
            3 => Complex64::new(0.0, -m),
            _ => Complex64::new(0.0, m),
        }
    }

    pub fn phase(&self, s: f64, x: f64, k: f64) -> Result<PhaseDerivatives> {
        if !(s.abs() <= x) {
            return Err(Error::ComplexPhase { sigma: s, x });
        }
        let (cp, cm) = self.signs();
        let a = (x + s).sqrt();
        let b = (x - s).sqrt();
        Ok(PhaseDerivatives {
            f: 2.0 / 3.0 * (cp * a * a * a + cm * b * b * b) - 2.0 * k * s,
            f_s: cp * a - cm * b - 2.0 * k,
            f_ss: 0.5 * (cp / a + cm / b),
            f_sss: -0.25 * (cp / (a * a * a) - cm / (b * b * b)),
        })
    }
}

/// Values of F_j and its s-derivatives. The closed forms are used up to and
/// including |s| = x, where the conjugate-curve stationary points sit.
pub fn wigner_phase_eval(w: &WignerBranchIntegral, sigma: f64, x: f64, k: f64) -> Result<PhaseDerivatives> {
    w.phase(sigma, x, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPointReport {
    pub region: RegionLabel,
    pub points: Vec<StationaryPoint>,
    /// Row/column of the stationary-point table: phase index and the k-interval or curve.
    pub table_cell: String,
}

fn column(region: RegionLabel, k: f64) -> &'static str {
    use RegionLabel::*;
    match (region, k > 0.0) {
        (Exterior, false) => "k < -sqrt(x)",
        (OnManifold, false) => "k = -sqrt(x)",
        (Between, false) => "-sqrt(x) < k < -sqrt(x/2)",
        (OnConjugate, false) => "k = -sqrt(x/2)",
        (Interior, _) => "-sqrt(x/2) < k < sqrt(x/2)",
        (OnConjugate, true) => "k = sqrt(x/2)",
        (Between, true) => "sqrt(x/2) < k < sqrt(x)",
        (OnManifold, true) => "k = sqrt(x)",
        (Exterior, true) => "k > sqrt(x)",
    }
}

/// Closed-form stationary points of F_j at (x, k).
///
/// Imaginary points are the roots +-i s0 of the squared stationarity equation;
/// their `second_derivative` holds |F''| at the point.
pub fn stationary_points(w: &WignerBranchIntegral, x: f64, k: f64) -> Result<StationaryPointReport> {
    use RegionLabel::*;
    let region = classify_region(x, k)?;
    // x = 2k^2 makes s0 = x exactly; the rounded product can miss it by an ulp,
    // which costs sqrt(ulp) in F' because of the square-root branch point
    let s0 = if region == OnConjugate { x } else { sigma0(x, k) };
    let real = |s: f64| -> Result<StationaryPoint> {
        Ok(StationaryPoint {
            location: Complex64::new(s, 0.0),
            multiplicity: Multiplicity::Simple,
            second_derivative: w.phase(s, x, k)?.f_ss,
        })
    };
    // |F''(+-i s0)| = |2k^2 - x|^{-1} (k^2 - x)^{1/2} for every index.
    let imag_curv = (k * k - x).abs().sqrt() / (2.0 * k * k - x).abs();
    let imag = |sign: f64| StationaryPoint {
        location: Complex64::new(0.0, sign * s0),
        multiplicity: Multiplicity::Simple,
        second_derivative: imag_curv,
    };
    let positive = k > 0.0;
    let diagonal_owner = (w.index == 1 && positive) || (w.index == 2 && !positive);
    let points = match (region, w.index) {
        (Exterior, 1 | 2) if diagonal_owner => vec![imag(-1.0), imag(1.0)],
        (Exterior, 3 | 4) => vec![imag(-1.0), imag(1.0)],
        (OnManifold, 1 | 2) if diagonal_owner => vec![StationaryPoint {
            location: Complex64::new(0.0, 0.0),
            multiplicity: Multiplicity::Double,
            second_derivative: 0.0,
        }],
        (Between | OnConjugate, 1 | 2) if diagonal_owner => vec![real(-s0)?, real(s0)?],
        (OnConjugate | Interior, 3) => vec![real(if positive { s0 } else { -s0 })?],
        (OnConjugate | Interior, 4) => vec![real(if positive { -s0 } else { s0 })?],
        _ => Vec::new(),
    };
    Ok(StationaryPointReport { region, points, table_cell: format!("F{} | {}", w.index, column(region, k)) })
}

/// A regional asymptotic value and the reason it may be degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionalValue<T> {
    pub value: T,
    /// No stationary point of this integral contributes at (x, k).
    pub no_stationary_point: bool,
    /// Evaluated on the conjugate curve, where F'' of the off-diagonal phases diverges.
    pub singular_curvature: bool,
}

impl<T> RegionalValue<T> {
    fn plain(value: T) -> Self {
        Self { value, no_stationary_point: false, singular_curvature: false }
    }
}

/// CFU data of the diagonal integral owning (x, k): phi0 = 0, xi = +-2^{2/3}|x - k^2|,
/// and A0 from the matched amplitudes D / |F''|^{1/2} = x0^{-1/2} |x - k^2|^{-1/4} / 4.
fn diagonal_cfu(x: f64, k: f64, x0: f64, region: RegionLabel) -> CfuCoefficients {
    let d = (x - k * k).abs();
    if region == RegionLabel::OnManifold {
        return CfuCoefficients {
            phi0: 0.0,
            xi: 0.0,
            a0: Complex64::new(2f64.powf(-4.0 / 3.0) / x0.sqrt(), 0.0),
            b0: Complex64::new(0.0, 0.0),
        };
    }
    // Stationary values +-(4/3) d^{3/2}; for imaginary points these are the moduli.
    let delta_f = 8.0 / 3.0 * d * d.sqrt();
    let xi_abs = (0.75 * delta_f).powf(2.0 / 3.0);
    let ratio = 0.25 / x0.sqrt() * d.powf(-0.25);
    let a0 = xi_abs.powf(0.25) * 2.0 * ratio / 2f64.sqrt();
    let xi = if region == RegionLabel::Exterior { -xi_abs } else { xi_abs };
    CfuCoefficients { phi0: 0.0, xi, a0: Complex64::new(a0, 0.0), b0: Complex64::new(0.0, 0.0) }
}

/// Uniform asymptotics of W1 (index 1) or W2 (index 2).
pub fn diagonal_asymptotics(index: u8, x: f64, k: f64, epsilon: f64, x0: f64) -> Result<RegionalValue<f64>> {
    if !(index == 1 || index == 2) {
        return Err(domain(format!("diagonal integrals are 1 and 2, got {index}")));
    }
    if !(epsilon > 0.0 && x0 > 0.0) {
        return Err(domain("epsilon and x0 must be positive"));
    }
    let region = classify_region(x, k)?;
    let owns = (index == 1 && k > 0.0) || (index == 2 && k < 0.0);
    if !owns || region == RegionLabel::Interior {
        return Ok(RegionalValue { value: 0.0, no_stationary_point: true, singular_curvature: false });
    }
    let c = diagonal_cfu(x, k, x0, region);
    Ok(RegionalValue::plain((cfu_eval(&c, 1.0 / epsilon) / (PI * epsilon)).re))
}

/// Interior-limit value of W3 (or W4 by conjugation) at d = x - k^2 > 0.
fn offdiagonal_interior(d: f64, epsilon: f64, x0: f64) -> Complex64 {
    let m = 2f64.powf(-1.5) / (PI * epsilon * x0).sqrt() * d.powf(-0.25);
    Complex64::new(0.0, -m) * Complex64::from_polar(1.0, FRAC_PI_4 + 4.0 * d * d.sqrt() / (3.0 * epsilon))
}

/// Stationary-phase asymptotics of W3 (index 3) or W4 (index 4).
pub fn offdiagonal_asymptotics(index: u8, x: f64, k: f64, epsilon: f64, x0: f64) -> Result<RegionalValue<Complex64>> {
    if !(index == 3 || index == 4) {
        return Err(domain(format!("off-diagonal integrals are 3 and 4, got {index}")));
    }
    if !(epsilon > 0.0 && x0 > 0.0) {
        return Err(domain("epsilon and x0 must be positive"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let region = classify_region(x, k)?;
    let w = WignerBranchIntegral::new(index, x0)?;
    match region {
        RegionLabel::Between | RegionLabel::OnManifold => {
            Ok(RegionalValue { value: zero, no_stationary_point: true, singular_curvature: false })
        }
        // The exterior pair cancels; W3 = 0 and W4 = -W3.
        RegionLabel::Exterior => Ok(RegionalValue::plain(zero)),
        RegionLabel::OnConjugate => {
            let v = offdiagonal_interior(x - k * k, epsilon, x0);
            Ok(RegionalValue {
                value: if index == 3 { v } else { v.conj() },
                no_stationary_point: false,
                singular_curvature: true,
            })
        }
        RegionLabel::Interior => {
            let s = stationary_points(&w, x, k)?.points[0].location.re;
            let p = w.phase(s, x, k)?;
            let d = x - k * k;
            // closed forms at the point: F = +-(4/3) d^{3/2}, F'' = +-d^{1/2} / (x - 2k^2)
            let sign = if index == 3 { 1.0 } else { -1.0 };
            let f = sign * 4.0 / 3.0 * d * d.sqrt();
            let f_ss = sign * d.sqrt() / (x - 2.0 * k * k);
            debug_assert!((p.f - f).abs() <= 1e-8 * (1.0 + f.abs()));
            let v = standard_spa(w.amplitude(s, x), f, f_ss, 1.0 / epsilon)? / (PI * epsilon);
            Ok(RegionalValue::plain(v))
        }
    }
}

/// The regional pieces at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurgeryPieces {
    pub region: RegionLabel,
    pub w1: f64,
    pub w2: f64,
    pub w3: Complex64,
    pub w4: Complex64,
    pub combined: f64,
    pub on_conjugate: bool,
}

fn airy_closed_form(x: f64, k: f64, epsilon: f64, x0: f64) -> f64 {
    let c = (2.0 / epsilon).powf(2.0 / 3.0);
    0.5 / x0.sqrt() * c * ai(c * (k * k - x))
}

/// Regional asymptotics and their recombination. Where the off-diagonal
/// oscillations contribute (Interior, OnConjugate) the pair W3 + W4 is
/// replaced by the Airy form whose large-argument expansion it is.
pub fn surgery_pieces(x: f64, k: f64, epsilon: f64, x0: f64) -> Result<SurgeryPieces> {
    let w1 = diagonal_asymptotics(1, x, k, epsilon, x0)?;
    let w2 = diagonal_asymptotics(2, x, k, epsilon, x0)?;
    let w3 = offdiagonal_asymptotics(3, x, k, epsilon, x0)?;
    let w4 = offdiagonal_asymptotics(4, x, k, epsilon, x0)?;
    let region = classify_region(x, k)?;
    let combined = match region {
        RegionLabel::Interior | RegionLabel::OnConjugate => {
            if w1.no_stationary_point && w2.no_stationary_point {
                airy_closed_form(x, k, epsilon, x0)
            } else {
                // on the conjugate curve the diagonal pair already carries the Airy form
                w1.value + w2.value
            }
        }
        _ => w1.value + w2.value + (w3.value + w4.value).re,
    };
    Ok(SurgeryPieces {
        region,
        w1: w1.value,
        w2: w2.value,
        w3: w3.value,
        w4: w4.value,
        combined,
        on_conjugate: w3.singular_curvature,
    })
}

/// Recombined WKB Wigner function on the illuminated side x > 0.
pub fn combined_wkb_wigner(x: f64, k: f64, epsilon: f64, x0: f64) -> Result<f64> {
    Ok(surgery_pieces(x, k, epsilon, x0)?.combined)
}

/// The same closed form continued to the shadow zone x <= 0.
pub fn combined_wkb_wigner_extended(x: f64, k: f64, epsilon: f64, x0: f64) -> Result<f64> {
    if x > 0.0 {
        return combined_wkb_wigner(x, k, epsilon, x0);
    }
    if !(epsilon > 0.0 && x0 > 0.0) {
        return Err(domain("epsilon and x0 must be positive"));
    }
    Ok(airy_closed_form(x, k, epsilon, x0))
}

/// int W dk = pi x0^{-1/2} eps^{-1/3} Ai^2(-eps^{-2/3} x) on x > 0.
pub fn k_integral_amplitude(x: f64, epsilon: f64, x0: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("k_integral_amplitude is defined for x > 0; use the extended form"));
    }
    k_integral_amplitude_extended(x, epsilon, x0)
}

pub fn k_integral_amplitude_extended(x: f64, epsilon: f64, x0: f64) -> Result<f64> {
    if !(epsilon > 0.0 && x0 > 0.0) {
        return Err(domain("epsilon and x0 must be positive"));
    }
    let c = (2.0 / epsilon).powf(2.0 / 3.0);
    Ok(0.5 / x0.sqrt() * c * airy_square_integral(c, 0.0, -c * x)?)
}

/// int k W dk: zero, since W is even in k.
pub fn k_integral_flux(_x: f64, _epsilon: f64, _x0: f64) -> f64 {
    0.0
}

/// Trapezoid k-moments (int W dk, int k W dk) of the combined form on a
/// symmetric grid of n points over [-k_max, k_max].
pub fn k_moments_numeric(x: f64, epsilon: f64, x0: f64, k_max: f64, n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::GridTooCoarse("need at least 3 k-points".into()));
    }
    let h = 2.0 * k_max / (n - 1) as f64;
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    for j in 0..n {
        // build the grid from both ends so that it is exactly symmetric
        let k = if 2 * j < n - 1 { -k_max + h * j as f64 } else { k_max - h * (n - 1 - j) as f64 };
        let w = combined_wkb_wigner(x, k, epsilon, x0)?;
        let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        m0 += weight * w;
        m1 += weight * k * w;
    }
    Ok((h * m0, h * m1))
}

fn check_residual_grid(g: &PhaseSpaceGrid) -> Result<()> {
    if g.nx() < 3 || g.nk() < 3 {
        return Err(Error::GridTooCoarse(format!(
            "{} x {} grid; central differences need 3 points per axis",
            g.nx(),
            g.nk()
        )));
    }
    Ok(())
}

/// k f_x + c(x) f_k on interior grid points by central differences.
fn transport_residual(g: &PhaseSpaceGrid, c: impl Fn(f64) -> f64 + Sync) -> Result<PhaseSpaceGrid> {
    check_residual_grid(g)?;
    let (nx, nk) = (g.nx(), g.nk());
    let xs = g.xs[1..nx - 1].to_vec();
    let ks = g.ks[1..nk - 1].to_vec();
    let values = (1..nx - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            let c = &c;
            (1..nk - 1).map(move |j| {
                let fx = (g.get(i + 1, j) - g.get(i - 1, j)) / (g.xs[i + 1] - g.xs[i - 1]);
                let fk = (g.get(i, j + 1) - g.get(i, j - 1)) / (g.ks[j + 1] - g.ks[j - 1]);
                g.ks[j] * fx + c(g.xs[i]) * fk
            })
        })
        .collect();
    Ok(PhaseSpaceGrid { xs, ks, values, epsilon: g.epsilon })
}

/// k f_x + f_k / 2, the Liouville operator of the medium eta^2 = x.
pub fn liouville_residual(g: &PhaseSpaceGrid) -> Result<PhaseSpaceGrid> {
    transport_residual(g, |_| 0.5)
}

/// k f_x + (eta^2)'/2 f_k. The dispersive corrections of the stationary
/// Wigner equation vanish only when (eta^2)''' = 0; other profiles are refused.
pub fn stationary_wigner_residual(
    profile: &RefractionProfile1D,
    g: &PhaseSpaceGrid,
    epsilon: f64,
) -> Result<PhaseSpaceGrid> {
    if !(epsilon > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    check_residual_grid(g)?;
    for &x in &g.xs {
        let h = crate::numerics::fd_step(x, 1e-2);
        let third = crate::numerics::d2(&|t| profile.eta2_prime(t), x, h);
        let scale = profile.eta2_prime(x).abs().max(profile.eta2(x).abs()).max(1.0);
        if third.abs() > 1e-6 * scale {
            return Err(Error::UnsupportedProfile(format!(
                "profile '{}' has (eta^2)''' = {third:e} at x = {x}; dispersive terms are not modelled",
                profile.name
            )));
        }
    }
    transport_residual(g, |x| 0.5 * profile.eta2_prime(x))
}

/// Grid of `combined_wkb_wigner` minus `wigner_exact_airy`, for diagnostics.
pub fn surgery_difference_grid(xs: &[f64], ks: &[f64], epsilon: f64, x0: f64) -> Result<PhaseSpaceGrid> {
    PhaseSpaceGrid::try_from_fn(xs, ks, epsilon, |x, k| {
        Ok(combined_wkb_wigner(x, k, epsilon, x0)? - wigner_exact_airy(x, k, epsilon, x0))
    })
}
