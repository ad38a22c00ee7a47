//! The quotient PSL₂(ℤ)\ℍ: reduction to the standard fundamental domain,
//! complete enumeration of lattice translates, automorphic kernel counts,
//! and the lattice density / minimum spacing quantities.
//!
//! Translate enumeration works through the bottom row (c, d) of a candidate
//! matrix: a point γw within distance `rad` of z forces
//! |cw + d|² ≤ Im(w)·e^{rad}/Im(z), so the coprime pairs in that disk are
//! enumerated exactly, each is completed to a matrix by the extended gcd,
//! and the finitely many left translations T^k whose horizontal shift can
//! land inside the radius are scanned. No group element can be missed.

use crate::hyperbolic::{dist, u_invariant, Isometry, PointH};
use crate::special::AnnulusSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Membership tolerance for the closed fundamental domain.
pub const F_TOL: f64 = 1e-9;

/// Default cap on enumeration hits, guarding runaway radii near the cusp.
pub const DEFAULT_HIT_CAP: usize = 1_000_000;

/// An element of PSL₂(ℤ) as an integer matrix with determinant one. The
/// representative has its first nonzero entry of (a, b, c, d) positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GammaMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        debug_assert_eq!(a * d - b * c, 1, "determinant must be one");
        let mut m = GammaMatrix { a, b, c, d };
        for e in [m.a, m.b, m.c, m.d] {
            if e != 0 {
                if e < 0 {
                    m = GammaMatrix { a: -m.a, b: -m.b, c: -m.c, d: -m.d };
                }
                break;
            }
        }
        m
    }

    pub fn identity() -> Self {
        GammaMatrix { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Generator S: z ↦ −1/z.
    pub fn s() -> Self {
        GammaMatrix::new(0, -1, 1, 0)
    }

    /// Generator T^n: z ↦ z + n.
    pub fn t_pow(n: i64) -> Self {
        GammaMatrix::new(1, n, 0, 1)
    }

    pub fn mul(&self, rhs: &GammaMatrix) -> GammaMatrix {
        GammaMatrix::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn inverse(&self) -> GammaMatrix {
        GammaMatrix::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(&self, z: PointH) -> PointH {
        self.to_isometry().apply(z)
    }

    pub fn to_isometry(&self) -> Isometry {
        Isometry::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

/// A point folded into the closed fundamental domain together with the group
/// element that put it there.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReducedPoint {
    pub point: PointH,
    pub reducer: GammaMatrix,
}

/// One lattice translate γw within the query radius.
#[derive(Debug, Clone, Copy)]
pub struct TranslateHit {
    pub gamma: GammaMatrix,
    pub image: PointH,
    pub distance: f64,
}

/// Membership in the closed fundamental domain |Re z| ≤ 1/2, |z| ≥ 1,
/// up to [`F_TOL`] on both inequalities.
pub fn in_fundamental_domain(z: PointH) -> bool {
    z.x.abs() <= 0.5 + F_TOL && z.x * z.x + z.y * z.y >= 1.0 - F_TOL
}

/// Membership in the truncated domain F_A = {z ∈ F : Im z ≤ A}.
pub fn in_f_a(z: PointH, a: f64) -> bool {
    in_fundamental_domain(z) && z.y <= a
}

/// Folds z into the closed fundamental domain by alternating x ↦ x − round(x)
/// and z ↦ −1/z, tracking the combined integer matrix. The iteration cap only
/// protects against pathological inputs; it cannot fire for y ≥ 1e−12.
pub fn reduce_point(z: PointH) -> Result<ReducedPoint> {
    let mut cur = z;
    let mut gamma = GammaMatrix::identity();
    for _ in 0..10_000 {
        // closure convention: boundary points are already reduced
        if in_fundamental_domain(cur) {
            let point = gamma.apply(z);
            return Ok(ReducedPoint { point, reducer: gamma });
        }
        let n = cur.x.round();
        if n != 0.0 {
            gamma = GammaMatrix::t_pow(-(n as i64)).mul(&gamma);
            cur = PointH::new(cur.x - n, cur.y);
            continue;
        }
        let norm = cur.x * cur.x + cur.y * cur.y;
        gamma = GammaMatrix::s().mul(&gamma);
        cur = PointH::new(-cur.x / norm, cur.y / norm);
    }
    Err(Error::ReductionStuck { x: z.x, y: z.y })
}

/// Reduces the base point of a tangent vector, acting on the whole frame.
pub fn reduce_tangent(t: crate::hyperbolic::Tangent) -> Result<crate::hyperbolic::Tangent> {
    let red = reduce_point(t.base)?;
    Ok(red.reducer.to_isometry().apply_tangent(t))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return (a.abs(), a.signum(), 0);
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// All γ ∈ Γ with dist(z, γw) ≤ rad, each listed once under the projective
/// sign convention. `w` is reduced internally; reported group elements refer
/// to the original `w`. Errors with [`Error::HitCap`] if more than `cap`
/// translates would be returned.
pub fn enumerate_translates_capped(
    z: PointH,
    w: PointH,
    rad: f64,
    cap: usize,
) -> Result<Vec<TranslateHit>> {
    assert!(rad > 0.0, "enumeration radius must be positive");
    let folded = reduce_point(w)?;
    let (w0, to_original) = (folded.point, folded.reducer);

    let mut hits = Vec::new();
    let q_max = w0.y * rad.exp() / z.y * (1.0 + 1e-9) + 1e-12;
    let sinh_half = (rad / 2.0).sinh();
    let u_max = sinh_half * sinh_half * (1.0 + 1e-9) + 1e-300;

    // the bottom rows live in the region |cw+d|² ≤ Q of area πQ/Im(w);
    // bound the candidate work by the same cap that bounds the hits
    let candidate_estimate = std::f64::consts::PI * q_max / w0.y;
    if candidate_estimate > 64.0 * cap as f64 {
        return Err(Error::HitCap { cap });
    }

    let c_max = (q_max.sqrt() / w0.y).floor() as i64;
    for c in 0..=c_max {
        // d-range from (c·x_w + d)² ≤ Q − (c·y_w)²
        let rem = q_max - (c as f64 * w0.y).powi(2);
        if rem < 0.0 {
            continue;
        }
        let half_width = rem.sqrt();
        let center = -(c as f64) * w0.x;
        let d_lo = (center - half_width).ceil() as i64;
        let d_hi = (center + half_width).floor() as i64;
        for d in d_lo..=d_hi {
            if c == 0 && d != 1 {
                // (0, ±1) is the only coprime bottom row with c = 0
                continue;
            }
            let (g, p, q) = ext_gcd(c, d);
            if g != 1 {
                continue;
            }
            // complete (c, d) to a determinant-one matrix: a·d − b·c = 1
            let (a0, b0) = (q, -p);
            debug_assert_eq!(a0 * d - b0 * c, 1);
            let den = (c as f64 * w0.x + d as f64).powi(2) + (c as f64 * w0.y).powi(2);
            let x0 = ((a0 as f64 * w0.x + b0 as f64) * (c as f64 * w0.x + d as f64)
                + a0 as f64 * c as f64 * w0.y * w0.y)
                / den;
            let y0 = w0.y / den;
            // left translations T^k shift the image horizontally by k
            let window = 4.0 * z.y * y0 * sinh_half * sinh_half * (1.0 + 1e-9)
                - (z.y - y0).powi(2);
            if window < 0.0 {
                continue;
            }
            let spread = window.sqrt();
            let k_lo = (z.x - x0 - spread - 1e-12).ceil() as i64;
            let k_hi = (z.x - x0 + spread + 1e-12).floor() as i64;
            for k in k_lo..=k_hi {
                let image = PointH::new(x0 + k as f64, y0);
                let du = u_invariant(z, image);
                if du <= u_max {
                    let gamma = GammaMatrix::new(a0 + k * c, b0 + k * d, c, d);
                    hits.push(TranslateHit {
                        gamma: gamma.mul(&to_original),
                        image,
                        distance: 2.0 * du.sqrt().asinh(),
                    });
                    if hits.len() > cap {
                        return Err(Error::HitCap { cap });
                    }
                }
            }
        }
    }
    Ok(hits)
}

/// [`enumerate_translates_capped`] with the default hit cap.
pub fn enumerate_translates(z: PointH, w: PointH, rad: f64) -> Result<Vec<TranslateHit>> {
    enumerate_translates_capped(z, w, rad, DEFAULT_HIT_CAP)
}

/// Automorphic kernel value K_{r,R}(z, w): the number of translates γw at
/// annular distance from z.
pub fn kernel_value(z: PointH, w: PointH, ann: &AnnulusSpec) -> Result<u64> {
    let hits = enumerate_translates(z, w, ann.outer * (1.0 + 1e-12) + 1e-12)?;
    Ok(hits
        .iter()
        .filter(|h| h.distance >= ann.inner - 1e-9 && h.distance <= ann.outer + 1e-9)
        .count() as u64)
}

/// |{γ ∈ Γ : u(z, γw) ≤ δ}|, the lattice density count.
pub fn count_lattice(z: PointH, w: PointH, delta: f64) -> Result<u64> {
    assert!(delta >= 0.0);
    if delta == 0.0 {
        // only exact coincidences z = γw count; probe a tiny radius
        let hits = enumerate_translates(z, w, 1e-9)?;
        return Ok(hits.iter().filter(|h| u_invariant(z, h.image) <= 1e-18).count() as u64);
    }
    let rad = 2.0 * delta.sqrt().asinh();
    let hits = enumerate_translates(z, w, rad * (1.0 + 1e-12) + 1e-12)?;
    Ok(hits.iter().filter(|h| u_invariant(z, h.image) <= delta * (1.0 + 1e-9)).count() as u64)
}

/// Minimum orbit spacing m(w) = min_{γ ≠ 1} ρ(w, γw). Zero exactly at the
/// elliptic fixed points. The search radius ρ(w, w+1) always contains the
/// translate by T, so the minimum exists.
pub fn min_spacing(w: PointH) -> Result<f64> {
    let folded = reduce_point(w)?;
    let w0 = folded.point;
    let upper = dist(w0, PointH::new(w0.x + 1.0, w0.y));
    let hits = enumerate_translates(w0, w0, upper * (1.0 + 1e-12) + 1e-12)?;
    let m = hits
        .iter()
        .filter(|h| !h.gamma.is_identity())
        .map(|h| h.distance)
        .fold(f64::INFINITY, f64::min);
    debug_assert!(m.is_finite());
    Ok(m)
}
