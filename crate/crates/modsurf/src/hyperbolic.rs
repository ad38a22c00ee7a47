//! Exact geometry of the upper half-plane ℍ = {x + iy : y > 0}.
//!
//! Distances, the u-invariant, Möbius actions of PSL₂(ℝ), the NAK
//! identification of unit tangent vectors with group elements, the geodesic
//! flow, and frames adapted to a geodesic. Everything here is a pure
//! function of its inputs.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::Mul;

/// A point of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH {
    pub x: f64,
    pub y: f64,
}

impl PointH {
    /// Panics if `y <= 0` or not finite.
    pub fn new(x: f64, y: f64) -> Self {
        assert!(y > 0.0 && y.is_finite() && x.is_finite(), "invalid point ({x}, {y})");
        PointH { x, y }
    }

    /// Euclidean modulus |z|.
    pub fn abs(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// A unit tangent vector: base point plus the angle with the upward
/// vertical, reduced to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: PointH,
    pub angle: f64,
}

impl Tangent {
    pub fn new(base: PointH, angle: f64) -> Self {
        Tangent { base, angle: reduce_angle(angle) }
    }
}

fn reduce_angle(a: f64) -> f64 {
    let mut a = a % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // -0.0 and exact 2π both collapse to 0.0
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// An element of PSL₂(ℝ): a real 2×2 matrix with determinant one, acting by
/// fractional linear transformations. The representative is canonicalized so
/// that the first nonzero entry of (a, b, c, d) is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    /// Builds from matrix entries; requires `ad - bc > 0`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        let m = Isometry { a, b, c, d };
        m.normalized()
    }

    pub fn identity() -> Self {
        Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Rescales to determinant one and canonicalizes the projective sign.
    /// Renormalizing after every product contains floating-point drift.
    pub fn normalized(self) -> Self {
        let det = self.a * self.d - self.b * self.c;
        assert!(det > 0.0, "isometry must have positive determinant, got {det}");
        let s = det.sqrt();
        let (mut a, mut b, mut c, mut d) = (self.a / s, self.b / s, self.c / s, self.d / s);
        for e in [a, b, c, d] {
            if e != 0.0 {
                if e < 0.0 {
                    a = -a;
                    b = -b;
                    c = -c;
                    d = -d;
                }
                break;
            }
        }
        Isometry { a, b, c, d }
    }

    pub fn inverse(self) -> Self {
        Isometry::new(self.d, -self.b, -self.c, self.a)
    }

    /// Fractional linear action on ℍ.
    pub fn apply(&self, z: PointH) -> PointH {
        let den = (self.c * z.x + self.d).powi(2) + (self.c * z.y).powi(2);
        let xw = ((self.a * z.x + self.b) * (self.c * z.x + self.d) + self.a * self.c * z.y * z.y)
            / den;
        let yw = z.y / den;
        PointH::new(xw, yw)
    }

    /// Derivative action on unit tangent vectors.
    pub fn apply_tangent(&self, t: Tangent) -> Tangent {
        isometry_to_tangent(*self * tangent_to_isometry(t))
    }

    /// Action on a boundary point (infinity allowed).
    pub fn apply_boundary(&self, p: f64) -> f64 {
        if p.is_infinite() {
            if self.c == 0.0 {
                f64::INFINITY
            } else {
                self.a / self.c
            }
        } else {
            let den = self.c * p + self.d;
            if den == 0.0 {
                f64::INFINITY
            } else {
                (self.a * p + self.b) / den
            }
        }
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        Isometry::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

/// A complete geodesic recorded through its boundary endpoints and oriented
/// from `endpoint_minus` to `endpoint_plus`. `f64::INFINITY` marks the cusp
/// endpoint of a vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicLine {
    pub endpoint_minus: f64,
    pub endpoint_plus: f64,
}

/// u(z, w) = |z − w|² / (4 Im z Im w) = sinh²(ρ/2), the point-pair invariant.
pub fn u_invariant(z: PointH, w: PointH) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * z.y * w.y)
}

/// Hyperbolic distance ρ(z, w) = 2 asinh √u(z, w).
pub fn dist(z: PointH, w: PointH) -> f64 {
    2.0 * u_invariant(z, w).sqrt().asinh()
}

/// The log-quotient form of the distance,
/// ρ = log((|z−w̄| + |z−w|)/(|z−w̄| − |z−w|)). Kept as an independent route
/// for cross-checks; `dist` is the better-conditioned evaluation.
pub fn dist_log_form(z: PointH, w: PointH) -> f64 {
    let num = ((z.x - w.x).powi(2) + (z.y + w.y).powi(2)).sqrt();
    let d = ((z.x - w.x).powi(2) + (z.y - w.y).powi(2)).sqrt();
    ((num + d) / (num - d)).ln()
}

/// NAK product for (z, θ): the unique g ∈ PSL₂(ℝ) with g·(i, up) = (z, θ).
///
/// The K factor rotates by the half-angle θ/2; the tangent (i, 0) maps to
/// the identity.
pub fn tangent_to_isometry(t: Tangent) -> Isometry {
    let sy = t.base.y.sqrt();
    let (s, c) = (t.angle / 2.0).sin_cos();
    // N(x) A(√y) K(θ/2)
    Isometry::new(
        sy * c - t.base.x / sy * s,
        sy * s + t.base.x / sy * c,
        -s / sy,
        c / sy,
    )
}

/// Inverse of [`tangent_to_isometry`].
pub fn isometry_to_tangent(g: Isometry) -> Tangent {
    let base = g.apply(PointH::new(0.0, 1.0));
    let sy = base.y.sqrt();
    let k11 = (g.a - base.x * g.c) / sy;
    let k21 = sy * g.c;
    let angle = 2.0 * (-k21).atan2(k11);
    Tangent::new(base, angle)
}

/// Geodesic flow for signed arc length `s`: right multiplication by
/// diag(e^{s/2}, e^{−s/2}).
pub fn geodesic_flow(t: Tangent, s: f64) -> Tangent {
    let g = tangent_to_isometry(t);
    let e = (s / 2.0).exp();
    let flowed = Isometry::new(g.a * e, g.b / e, g.c * e, g.d / e);
    isometry_to_tangent(flowed)
}

/// An isometry sending `endpoint_minus → 0` and `endpoint_plus → ∞`, so the
/// geodesic becomes the standard vertical axis with arc length s ↦ i·eˢ.
pub fn axis_frame(line: &GeodesicLine) -> Result<Isometry> {
    let (p, q) = (line.endpoint_minus, line.endpoint_plus);
    if p == q || (p.is_infinite() && q.is_infinite()) {
        return Err(Error::DegenerateGeodesic(p));
    }
    let m = if p.is_infinite() {
        // ∞ → 0, q → ∞
        Isometry::new(0.0, 1.0, -1.0, q)
    } else if q.is_infinite() {
        // p → 0, ∞ → ∞
        Isometry::new(1.0, -p, 0.0, 1.0)
    } else if p < q {
        let s = (q - p).sqrt();
        Isometry::new(1.0 / s, -p / s, -1.0 / s, q / s)
    } else {
        let s = (p - q).sqrt();
        Isometry::new(-1.0 / s, p / s, -1.0 / s, q / s)
    };
    Ok(m)
}

/// Position of `z` relative to the standard vertical axis: the arc-length
/// parameter `s` of the nearest axis point (0, eˢ) and the orthogonal
/// distance `d`, with s = log |z| and sinh d = |x|/y.
pub fn foot_and_offset(z: PointH) -> (f64, f64) {
    (z.abs().ln(), (z.x.abs() / z.y).asinh())
}
