//! Special functions for the annulus variance asymptotics.
//!
//! Complete elliptic integrals by AGM, the shape function
//! G(w) = 1 + w³ + (1−w²)K(w) − (1+w²)E(w), Bessel J₀/J₁, the conical
//! Legendre function P_{−1/2+it}(cosh ρ) through its Mehler–Dirichlet
//! representation, the Selberg–Harish-Chandra transform of an annulus
//! indicator (numeric and asymptotic), the spectral weight H(t), and the
//! closed-form Bessel main-term integral.

use crate::quad::{gl, gl_panels};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A hyperbolic annulus shape: inner radius `inner`, outer radius `outer`,
/// with 0 ≤ inner < outer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::Config(format!(
                "annulus radii must satisfy 0 <= r < R, got r={inner}, R={outer}"
            )));
        }
        Ok(AnnulusSpec { inner, outer })
    }

    /// Ball of radius `rad`.
    pub fn ball(rad: f64) -> Result<Self> {
        AnnulusSpec::new(0.0, rad)
    }

    /// Hyperbolic volume 4π(sinh²(R/2) − sinh²(r/2)).
    pub fn volume(&self) -> f64 {
        4.0 * PI * ((self.outer / 2.0).sinh().powi(2) - (self.inner / 2.0).sinh().powi(2))
    }

    /// Membership in u-coordinates: sinh²(r/2) ≤ u ≤ sinh²(R/2).
    pub fn contains_u(&self, u: f64) -> bool {
        let lo = (self.inner / 2.0).sinh().powi(2);
        let hi = (self.outer / 2.0).sinh().powi(2);
        u >= lo && u <= hi
    }

    /// Membership in distance coordinates.
    pub fn contains_dist(&self, d: f64) -> bool {
        d >= self.inner && d <= self.outer
    }
}

/// A evaluated sample of the G function.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GValue {
    pub w: f64,
    pub value: f64,
}

const AGM_EPS: f64 = 1e-16;

/// Complete elliptic integral of the first kind, modulus convention:
/// K(k) = ∫₀^{π/2} dθ/√(1 − k² sin²θ), for 0 ≤ k < 1. AGM evaluation.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic_k needs 0 <= k < 1, got {k}")));
    }
    let mut a = 1.0f64;
    // 1 - k² as (1-k)(1+k) keeps precision near k = 1
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..60 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
        if (a - b).abs() <= AGM_EPS * a {
            break;
        }
    }
    Ok(PI / (2.0 * a))
}

/// Complete elliptic integral of the second kind, modulus convention:
/// E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ, for 0 ≤ k ≤ 1.
pub fn elliptic_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic_e needs 0 <= k <= 1, got {k}")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0f64;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow2 = 1.0;
    for _ in 0..60 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow2 *= 2.0;
        sum += 0.5 * pow2 * c * c;
        a = an;
        b = bn;
        if c.abs() <= AGM_EPS * a {
            break;
        }
    }
    Ok(PI / (2.0 * a) * (1.0 - sum))
}

/// G(w) = 1 + w³ + (1−w²)K(w) − (1+w²)E(w) for 0 ≤ w < 1.
///
/// Evaluated in the regrouped form (1−E) + w²(w−E) + (1−w²)K, which keeps the
/// cancellation between the near-equal terms mild as w → 1.
pub fn g_function(w: f64) -> Result<GValue> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::Domain(format!("g_function needs 0 <= w < 1, got {w}")));
    }
    let k = elliptic_k(w)?;
    let e = elliptic_e(w)?;
    let value = (1.0 - e) + w * w * (w - e) + (1.0 - w) * (1.0 + w) * k;
    Ok(GValue { w, value })
}

/// G′(w) = 3w(w − E(w)) ≤ 0 on [0, 1).
pub fn g_prime(w: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::Domain(format!("g_prime needs 0 <= w < 1, got {w}")));
    }
    Ok(3.0 * w * (w - elliptic_e(w)?))
}

/// Leading asymptotic shape of G near w = 1: (3/4)(1−w)² log(2/(1−w)).
pub fn g_asymptotic_form(w: f64) -> f64 {
    0.75 * (1.0 - w).powi(2) * (2.0 / (1.0 - w)).ln()
}

// ---------------------------------------------------------------------------
// Bessel J0 / J1
// ---------------------------------------------------------------------------

const BESSEL_SERIES_CUTOFF: f64 = 6.0;
const BESSEL_ASYMPTOTIC_CUTOFF: f64 = 24.0;

fn bessel_j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn bessel_j1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..40 {
        term *= -q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Bessel integral representation J_n(x) = (1/π)∫₀^π cos(nτ − x sin τ) dτ,
/// by the trapezoid rule. The aliasing error is a tail of Bessel functions of
/// order ≥ 2N − n, negligible once N comfortably exceeds x.
fn bessel_trapezoid(n: u32, x: f64) -> f64 {
    let npts = 28 + (1.2 * x.abs()).ceil() as usize;
    let h = PI / npts as f64;
    let f = |tau: f64| (n as f64 * tau - x * tau.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for j in 1..npts {
        sum += f(j as f64 * h);
    }
    sum / npts as f64
}

/// Hankel asymptotic expansion for large |x|.
fn bessel_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0;
    for j in 1..=10u32 {
        let odd = (2 * j - 1) as f64;
        t *= (mu - odd * odd) / (j as f64 * 8.0 * x);
        match j % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
    }
    let chi = x - (2.0 * n as f64 + 1.0) * PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SERIES_CUTOFF {
        bessel_j0_series(ax)
    } else if ax <= BESSEL_ASYMPTOTIC_CUTOFF {
        bessel_trapezoid(0, ax)
    } else {
        bessel_hankel(0, ax)
    }
}

/// Bessel function of the first kind, order one (odd in x).
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_CUTOFF {
        bessel_j1_series(ax)
    } else if ax <= BESSEL_ASYMPTOTIC_CUTOFF {
        bessel_trapezoid(1, ax)
    } else {
        bessel_hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Order-dispatching wrapper; only orders 0 and 1 are supported.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    match order {
        0 => bessel_j0(x),
        1 => bessel_j1(x),
        _ => panic!("bessel_j supports orders 0 and 1, got {order}"),
    }
}

// ---------------------------------------------------------------------------
// Conical Legendre function and the Selberg--Harish-Chandra transform
// ---------------------------------------------------------------------------

/// P_{−1/2+it}(cosh ρ) through the Mehler–Dirichlet representation
/// (√2/π) ∫₀^ρ cos(ts)/√(cosh ρ − cosh s) ds.
///
/// The substitution s = ρ(1−v²) removes the inverse-square-root endpoint
/// singularity; cosh ρ − cosh s is expanded as 2 sinh((ρ+s)/2) sinh((ρ−s)/2)
/// with ρ − s = ρv² held exactly. Panel count grows with ρ|t| to track the
/// oscillation of cos(ts).
pub fn legendre_conical(t: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 1.0;
    }
    let integrand = |v: f64| {
        let rho_minus_s = rho * v * v;
        let rho_plus_s = rho * (2.0 - v * v);
        let depth = 2.0 * (0.5 * rho_plus_s).sinh() * (0.5 * rho_minus_s).sinh();
        2.0 * rho * v * (t * rho * (1.0 - v * v)).cos() / depth.sqrt()
    };
    let panels = 4 + (rho * t.abs() / 3.0).ceil() as usize;
    let val = gl_panels(integrand, 0.0, 1.0, 32, panels);
    std::f64::consts::SQRT_2 / PI * val
}

/// Selberg–Harish-Chandra transform of the annulus indicator,
/// h(t) = 2π ∫_r^R P_{−1/2+it}(cosh ρ) sinh ρ dρ, by adaptive-resolution
/// panel quadrature with a two-level convergence check.
pub fn shc_numeric(ann: &AnnulusSpec, t: f64) -> Result<f64> {
    let (r, radius) = (ann.inner, ann.outer);
    let integrand = |rho: f64| legendre_conical(t, rho) * rho.sinh();
    let base_panels = 6 + ((radius - r) * t.abs() / 2.0).ceil() as usize;
    let mut panels = base_panels;
    let mut prev = 2.0 * PI * gl_panels(integrand, r, radius, 16, panels);
    for _ in 0..4 {
        panels *= 2;
        let next = 2.0 * PI * gl_panels(integrand, r, radius, 16, panels);
        let scale = next.abs().max(1e-3 * ann.volume());
        if (next - prev).abs() <= 1e-8 * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "shc transform did not stabilize at r={r}, R={radius}, t={t} ({panels} panels)"
    )))
}

/// Main term of the transform for thick annuli (R − r comparable to R):
/// 2π(R·J₁(Rt) − r·J₁(rt))/t, with the analytic limit π(R² − r²) at t = 0.
pub fn shc_asymptotic(ann: &AnnulusSpec, t: f64) -> f64 {
    let (r, radius) = (ann.inner, ann.outer);
    if (t * radius).abs() < 1e-4 {
        // J₁(x)/x = 1/2 − x²/16 + O(x⁴)
        let r2 = radius * radius - r * r;
        let r4 = radius.powi(4) - r.powi(4);
        return 2.0 * PI * (0.5 * r2 - t * t * r4 / 16.0);
    }
    2.0 * PI * (radius * bessel_j1(radius * t) - r * bessel_j1(r * t)) / t
}

// ---------------------------------------------------------------------------
// Spectral weight H(t)
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published table digits
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Re(log Γ(zr + i·zi)) by the Lanczos approximation, valid for zr > 0.
fn re_ln_gamma_complex(zr: f64, zi: f64) -> f64 {
    let z = (zr - 1.0, zi);
    let mut sr = LANCZOS_COEFFS[0];
    let mut si = 0.0;
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        let dr = z.0 + k as f64;
        let den = dr * dr + z.1 * z.1;
        sr += c * dr / den;
        si += -c * z.1 / den;
    }
    let tr = z.0 + LANCZOS_G + 0.5;
    let ti = z.1;
    // Re[(z + 1/2) ln t − t + ln(√(2π) s)]
    let ln_t_re = 0.5 * (tr * tr + ti * ti).ln();
    let ln_t_im = ti.atan2(tr);
    let half = (z.0 + 0.5, z.1);
    0.5 * (2.0 * PI).ln() + half.0 * ln_t_re - half.1 * ln_t_im - tr
        + 0.5 * (sr * sr + si * si).ln()
}

/// Spectral weight H(t) = Γ(1/4+it/2)²Γ(1/4−it/2)² / (Γ(1/2+it)Γ(1/2−it)),
/// evaluated through real parts of complex log-gamma; exactly even in t.
pub fn weight_h(t: f64) -> f64 {
    let t = t.abs();
    let ln_h = 4.0 * re_ln_gamma_complex(0.25, 0.5 * t) - 2.0 * re_ln_gamma_complex(0.5, t);
    ln_h.exp()
}

// ---------------------------------------------------------------------------
// Bessel main-term integral
// ---------------------------------------------------------------------------

/// ∫₀^∞ ((R·J₁(Rt) − r·J₁(rt))/t)² dt, equal in closed form to
/// (4R³/3π)·G(r/R).
///
/// Rescaling t → τ/R reduces to R³·∫₀^∞ (J₁(τ) − w·J₁(wτ))²/τ² dτ with
/// w = r/R. The quadrature runs to a fixed large cutoff with half-period
/// panels, and the radiative tail is closed by its oscillation-averaged
/// value (1+w)/(2πT²).
pub fn bessel_main_integral(ann: &AnnulusSpec) -> Result<f64> {
    let w = ann.inner / ann.outer;
    let g = |tau: f64| {
        let val = (bessel_j1(tau) - w * bessel_j1(w * tau)) / tau;
        val * val
    };
    let cutoff = 6000.0;
    let head = gl(g, 1e-12, 1.0, 32);
    let panels = (2.0 * (cutoff - 1.0) / PI).ceil() as usize;
    let body = gl_panels(g, 1.0, cutoff, 8, panels);
    let tail = (1.0 + w) / (2.0 * PI * cutoff * cutoff);
    Ok(ann.outer.powi(3) * (head + body + tail))
}
