//! Chord geometry of geodesics against hyperbolic annuli.
//!
//! Chords are computed analytically, never by sampling the flow: a segment
//! is mapped to the standard vertical axis, each annulus center lands at a
//! foot parameter and orthogonal distance, and the hyperbolic law of cosines
//! cosh ℓ = cosh(rad)/cosh(d) gives the intersection window. Long segments
//! on the modular surface are walked in renormalized steps, re-reducing the
//! running tangent so the translate enumeration stays desk-scale.

use crate::hyperbolic::{
    axis_frame, dist, foot_and_offset, geodesic_flow, isometry_to_tangent, tangent_to_isometry,
    GeodesicLine, Isometry, PointH, Tangent,
};
use crate::quad::adaptive;
use crate::special::{g_function, AnnulusSpec};
use crate::surface::{enumerate_translates, reduce_point, reduce_tangent};
use crate::Result;
use serde::{Deserialize, Serialize};

/// A geodesic segment in axis coordinates: `frame` maps the segment's
/// geodesic onto the vertical axis, where it occupies the arc-length window
/// [s_start, s_end]; frame⁻¹(i·eˢ) traces the segment.
#[derive(Debug, Clone, Copy)]
pub struct SegmentFrame {
    pub frame: Isometry,
    pub s_start: f64,
    pub s_end: f64,
}

/// A nonempty arc-length window of intersection with one annulus translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordWindow {
    pub s_lo: f64,
    pub s_hi: f64,
}

impl ChordWindow {
    pub fn len(&self) -> f64 {
        self.s_hi - self.s_lo
    }

    pub fn is_empty(&self) -> bool {
        self.s_hi <= self.s_lo
    }

    fn clip(&self, lo: f64, hi: f64) -> f64 {
        (self.s_hi.min(hi) - self.s_lo.max(lo)).max(0.0)
    }
}

/// Half-length ℓ of the chord a geodesic at orthogonal distance `d` cuts in
/// a ball of radius `rad`: cosh ℓ = cosh(rad)/cosh(d) when d ≤ rad, else 0.
pub fn chord_half_length(d: f64, rad: f64) -> f64 {
    if d >= rad {
        return 0.0;
    }
    // acosh of a near-one ratio without cancellation:
    // cosh(rad) − cosh(d) = 2 sinh((rad+d)/2) sinh((rad−d)/2)
    let eps = 2.0 * (0.5 * (rad + d)).sinh() * (0.5 * (rad - d)).sinh() / d.cosh();
    (eps + (eps * (2.0 + eps)).sqrt()).ln_1p()
}

/// Intersection windows of the full axis geodesic with the annulus centered
/// at foot parameter `foot_s` and orthogonal distance `d`: the ball window
/// minus the open inner window. Zero, one, or two windows.
pub fn annulus_chord(d: f64, foot_s: f64, ann: &AnnulusSpec) -> Vec<ChordWindow> {
    let l_outer = chord_half_length(d, ann.outer);
    if l_outer == 0.0 {
        return Vec::new();
    }
    let l_inner = chord_half_length(d, ann.inner);
    if l_inner > 0.0 {
        vec![
            ChordWindow { s_lo: foot_s - l_outer, s_hi: foot_s - l_inner },
            ChordWindow { s_lo: foot_s + l_inner, s_hi: foot_s + l_outer },
        ]
    } else {
        vec![ChordWindow { s_lo: foot_s - l_outer, s_hi: foot_s + l_outer }]
    }
}

/// Total length of the segment's intersection with all lattice translates of
/// the annulus around `w` (which must lie in the fundamental domain). The
/// window is clipped half-open so a walker never double-counts a chord.
pub fn segment_annulus_length(seg: &SegmentFrame, w: PointH, ann: &AnnulusSpec) -> Result<f64> {
    let half = 0.5 * (seg.s_end - seg.s_start);
    debug_assert!((0.0..50.0).contains(&half), "segment window too long: {half}");
    let mid = 0.5 * (seg.s_start + seg.s_end);
    let inv = seg.frame.inverse();
    let z_mid = inv.apply(PointH::new(0.0, mid.exp()));
    let reach = half + ann.outer + 0.1;
    let mut total = 0.0;
    for hit in enumerate_translates(z_mid, w, reach)? {
        let local = seg.frame.apply(hit.image);
        let (foot, d) = foot_and_offset(local);
        for window in annulus_chord(d, foot, ann) {
            total += window.clip(seg.s_start, seg.s_end);
        }
    }
    Ok(total)
}

/// The per-step frames of a walk of total length `len` starting at `g0`,
/// re-reduced to the fundamental domain after every window.
pub fn walk_frames(g0: Tangent, len: f64, step: f64) -> Result<Vec<SegmentFrame>> {
    assert!(len > 0.0 && step > 0.0 && step <= 1.0, "need len > 0 and step in (0, 1]");
    let mut frames = Vec::with_capacity((len / step).ceil() as usize);
    let mut g = reduce_tangent(g0)?;
    let mut done = 0.0;
    while done < len - 1e-12 {
        let delta = step.min(len - done);
        frames.push(SegmentFrame {
            frame: tangent_to_isometry(g).inverse(),
            s_start: 0.0,
            s_end: delta,
        });
        g = reduce_tangent(geodesic_flow(g, delta))?;
        done += delta;
    }
    Ok(frames)
}

/// Evaluates a precomputed walk against one annulus center `w ∈ F`.
pub fn walk_eval(frames: &[SegmentFrame], w: PointH, ann: &AnnulusSpec) -> Result<f64> {
    let mut total = 0.0;
    for seg in frames {
        total += segment_annulus_length(seg, w, ann)?;
    }
    Ok(total)
}

/// ∫₀^L Σ_γ k_{r,R}(u(path(t), γw)) dt for the geodesic segment of length
/// `len` starting at `g0`, by stepping and exact chord clipping. The result
/// is step-size independent.
pub fn walk_segment(g0: Tangent, len: f64, w: PointH, ann: &AnnulusSpec, step: f64) -> Result<f64> {
    let w_reduced = reduce_point(w)?.point;
    let frames = walk_frames(g0, len, step)?;
    walk_eval(&frames, w_reduced, ann)
}

/// Forward chord length of the single ray from `z` in direction `theta`
/// against the annulus centered at `w` (one center, no lattice sum).
fn ray_chord(z: PointH, theta: f64, w: PointH, ann: &AnnulusSpec) -> f64 {
    let frame = tangent_to_isometry(Tangent::new(z, theta)).inverse();
    let local = frame.apply(w);
    let (foot, d) = foot_and_offset(local);
    annulus_chord(d, foot, ann).iter().map(|win| win.clip(0.0, f64::INFINITY)).sum()
}

/// Initial direction at `z` of the geodesic toward `w` (assumes z ≠ w).
fn direction_toward(z: PointH, w: PointH) -> f64 {
    let line = if (z.x - w.x).abs() < 1e-14 * (1.0 + z.x.abs()) {
        if w.y > z.y {
            GeodesicLine { endpoint_minus: z.x, endpoint_plus: f64::INFINITY }
        } else {
            GeodesicLine { endpoint_minus: f64::INFINITY, endpoint_plus: z.x }
        }
    } else {
        let c = (z.abs().powi(2) - w.abs().powi(2)) / (2.0 * (z.x - w.x));
        let radius = (z.x - c).hypot(z.y);
        let (p, q) = (c - radius, c + radius);
        let frame = axis_frame(&GeodesicLine { endpoint_minus: p, endpoint_plus: q }).unwrap();
        if frame.apply(w).abs().ln() > frame.apply(z).abs().ln() {
            GeodesicLine { endpoint_minus: p, endpoint_plus: q }
        } else {
            GeodesicLine { endpoint_minus: q, endpoint_plus: p }
        }
    };
    let frame = axis_frame(&line).unwrap();
    let s_z = frame.apply(z).abs().ln();
    let vertical_here = tangent_to_isometry(Tangent::new(PointH::new(0.0, s_z.exp()), 0.0));
    isometry_to_tangent(frame.inverse() * vertical_here).angle
}

/// Θ_{r,R}(z, w): the length of intersection with the annulus around `w`,
/// integrated over all rays from `z`,
/// ∫₀^{2π} ∫₀^∞ k_{r,R}(u(path(z, θ; t), w)) dt dθ.
///
/// The integrand is symmetric about the direction toward `w`, so only angle
/// deviations β ∈ [0, π] are integrated (doubled), with panels split at the
/// tangency angles sin β = sinh(rad)/sinh(D) where the chord length kinks.
pub fn theta_average(z: PointH, w: PointH, ann: &AnnulusSpec) -> Result<f64> {
    let separation = dist(z, w);
    if separation < 1e-12 {
        // every ray crosses the annulus radially
        return Ok(2.0 * std::f64::consts::PI * (ann.outer - ann.inner));
    }
    let base_angle = direction_toward(z, w);
    let chord_at = |beta: f64| ray_chord(z, base_angle + beta, w, ann);

    // kink angles where the orthogonal distance crosses the annulus radii
    let mut cuts = vec![0.0, std::f64::consts::PI];
    for rad in [ann.inner, ann.outer] {
        if rad > 0.0 {
            let k = rad.sinh() / separation.sinh();
            if k < 1.0 {
                cuts.push(k.asin());
                cuts.push(std::f64::consts::PI - k.asin());
            }
        }
    }
    cuts.push(std::f64::consts::FRAC_PI_2);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let scale = (ann.outer - ann.inner) * (pair[1] - pair[0]);
        total += adaptive(&chord_at, pair[0], pair[1], 1e-9 * scale.max(1e-9), 28);
    }
    Ok(2.0 * total)
}

/// The one-dimensional main-term integral in the x = sinh D variables,
/// 8 ∫₀^{sinh R} (√(sinh²R − x²) − 1_{x ≤ sinh r}·√(sinh²r − x²))² dx,
/// equal to (16 sinh³R / 3)·G(sinh r / sinh R) as an exact identity. The
/// quadrature here is one route; the closed form is the other.
pub fn main_term_integral(ann: &AnnulusSpec) -> Result<f64> {
    let s_r = ann.inner.sinh();
    let s_big = ann.outer.sinh();
    // [0, sinh r]: substitute x = sinh r − v² so the half-power zero of
    // √(sinh²r − x²) at the top end becomes analytic
    let inner = if s_r > 0.0 {
        let f = |v: f64| {
            let x = s_r - v * v;
            let outer_leg = (s_big * s_big - x * x).sqrt();
            let inner_leg = v * (s_r + x).sqrt();
            let diff = outer_leg - inner_leg;
            diff * diff * 2.0 * v
        };
        adaptive(&f, 0.0, s_r.sqrt(), 1e-12 * s_big.powi(3).max(1e-9), 30)
    } else {
        0.0
    };
    // [sinh r, sinh R]: a plain polynomial
    let f = |x: f64| s_big * s_big - x * x;
    let outer = adaptive(&f, s_r, s_big, 1e-12 * s_big.powi(3).max(1e-9), 30);
    Ok(8.0 * (inner + outer))
}

/// The same main term in arc-length variables before the x = sinh D change,
/// 8 ∫₀^R (arccosh(cosh R/cosh D) − 1_{D≤r} arccosh(cosh r/cosh D))² cosh D dD.
/// Agrees with [`main_term_integral`] only to relative O(R²): the exact
/// identity with the closed form lives in the x variables.
pub fn main_term_integral_arc_length(ann: &AnnulusSpec) -> Result<f64> {
    let (r, radius) = (ann.inner, ann.outer);
    let a_len = |d: f64| chord_half_length(d, radius);
    let b_len = |d: f64| chord_half_length(d, r);

    // inner part [0, r]: substitute D = r − s² to absorb the √(r−D)
    // behavior of the inner arccosh at D → r⁻
    let inner = if r > 0.0 {
        let f = |s: f64| {
            let d = r - s * s;
            let diff = a_len(d) - b_len(d);
            diff * diff * d.cosh() * 2.0 * s
        };
        adaptive(&f, 0.0, r.sqrt(), 1e-12 * radius.powi(3).max(1e-9), 30)
    } else {
        0.0
    };
    // outer part [r, R]: the squared arccosh is analytic up to both ends
    let f = |d: f64| {
        let a = a_len(d);
        a * a * d.cosh()
    };
    let outer = adaptive(&f, r, radius, 1e-12 * radius.powi(3).max(1e-9), 30);
    Ok(8.0 * (inner + outer))
}

/// Closed form of [`main_term_integral`]: (16 sinh³R / 3)·G(sinh r / sinh R).
pub fn main_term_closed_form(ann: &AnnulusSpec) -> Result<f64> {
    let ratio = ann.inner.sinh() / ann.outer.sinh();
    Ok(16.0 * ann.outer.sinh().powi(3) / 3.0 * g_function(ratio)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{axis_of_form, fundamental_unit_plus, Discriminant, FormTriple};
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn assert_rel(a: f64, b: f64, tol: f64, msg: &str) {
        let denom = b.abs().max(1e-300);
        assert!(((a - b) / denom).abs() <= tol, "{msg}: {a} vs {b}");
    }

    use crate::quad::gl;

    /// Brute quadrature of the defining double integral of Θ in geodesic
    /// polar coordinates; independent of the analytic chord route.
    fn theta_average_polar_oracle(z: PointH, w: PointH, ann: &AnnulusSpec, panels: usize) -> f64 {
        let f = |theta: f64| {
            let t_max = dist(z, w) + ann.outer + 0.05;
            let steps = 4000;
            let h = t_max / steps as f64;
            let mut g = Tangent::new(z, theta);
            let mut acc = 0.0;
            for _ in 0..steps {
                let next = geodesic_flow(g, h);
                let mid_dist = dist(
                    PointH::new(0.5 * (g.base.x + next.base.x), (g.base.y * next.base.y).sqrt()),
                    w,
                );
                if ann.contains_dist(mid_dist) {
                    acc += h;
                }
                g = next;
            }
            acc
        };
        let mut total = 0.0;
        let n = panels.max(64);
        for k in 0..n {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            let b = std::f64::consts::TAU * (k + 1) as f64 / n as f64;
            total += gl(f, a, b, 8);
        }
        total
    }

    #[test]
    fn chord_half_length_basics() {
        assert_eq!(chord_half_length(0.0, 0.25), 0.25);
        assert_eq!(chord_half_length(0.3, 0.3), 0.0);
        assert_eq!(chord_half_length(0.5, 0.3), 0.0);
        let expected = (0.1f64.cosh() / 0.05f64.cosh()).acosh();
        assert_rel(chord_half_length(0.05, 0.1), expected, 1e-12, "law of cosines");
    }

    #[test]
    fn chord_half_length_vs_minimization_oracle() {
        // place a center at orthogonal distance d from the vertical axis and
        // scan the axis for the interval within distance rad
        let (d, rad) = (0.05f64, 0.1f64);
        let w = PointH::new(d.sinh() * 1.0, 1.0); // foot at s = ... solved below
        let (foot, dd) = foot_and_offset(w);
        assert_rel(dd, d, 1e-12, "constructed offset");
        let inside = |s: f64| dist(PointH::new(0.0, s.exp()), w) <= rad;
        // bisect the forward crossing
        let (mut lo, mut hi) = (foot, foot + rad);
        assert!(inside(lo) && !inside(hi));
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let scanned = lo - foot;
        assert_rel(chord_half_length(d, rad), scanned, 1e-8, "scan oracle");
        assert!((chord_half_length(d, rad) - 0.0865665025292334).abs() < 1e-12);
    }

    #[test]
    fn annulus_chord_cases() {
        let ann = AnnulusSpec::new(0.1, 0.3).unwrap();
        assert!(annulus_chord(0.4, 0.0, &ann).is_empty(), "outside");
        let ball = AnnulusSpec::ball(0.3).unwrap();
        let wins = annulus_chord(0.0, 1.7, &ball);
        assert_eq!(wins.len(), 1);
        assert_rel(wins[0].len(), 0.6, 1e-14, "diameter chord");
        assert_rel(wins[0].s_lo, 1.4, 1e-12, "centered at foot");

        // inside the inner disk: two symmetric windows of total 2(ℓR − ℓr)
        let wins = annulus_chord(0.05, 0.0, &ann);
        assert_eq!(wins.len(), 2);
        let total: f64 = wins.iter().map(ChordWindow::len).sum();
        let expected =
            2.0 * (chord_half_length(0.05, 0.3) - chord_half_length(0.05, 0.1));
        assert_rel(total, expected, 1e-13, "two-window total");
        assert_rel(wins[0].s_hi, -wins[1].s_lo, 1e-14, "symmetry");

        // between the radii: a single window of 2ℓR
        let wins = annulus_chord(0.2, 0.0, &ann);
        assert_eq!(wins.len(), 1);
        assert_rel(wins[0].len(), 2.0 * chord_half_length(0.2, 0.3), 1e-14, "single window");
    }

    #[test]
    fn segment_length_single_translate_geometry() {
        // vertical segment through i of length 1; center on the axis at e^{0.5}
        let g0 = Tangent::new(PointH::new(0.0, 1.0), 0.0);
        let w = PointH::new(0.0, 0.5f64.exp());
        let ann = AnnulusSpec::ball(0.2).unwrap();
        let got = walk_segment(g0, 1.0, w, &ann, 0.5).unwrap();
        // window [0.3, 0.7] fits inside [0, 1]
        assert_rel(got, 0.4, 1e-10, "centered chord");

        // annulus far from the segment
        let far = PointH::new(0.4, 40.0);
        let got = walk_segment(g0, 1.0, far, &ann, 0.5).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn walk_is_step_independent_and_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let ann = AnnulusSpec::new(0.03, 0.11).unwrap();
        for _ in 0..10 {
            let g0 = Tangent::new(
                PointH::new(rng.random_range(-0.5..0.5), rng.random_range(0.9..1.8)),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let w = reduce_point(PointH::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(0.9..2.0),
            ))
            .unwrap()
            .point;
            let len = 7.3;
            let coarse = walk_segment(g0, len, w, &ann, 1.0).unwrap();
            let fine = walk_segment(g0, len, w, &ann, len / 7.0 / 7.0).unwrap();
            assert!((coarse - fine).abs() < 1e-8, "step dependence: {coarse} vs {fine}");

            let first = walk_segment(g0, len / 2.0, w, &ann, 0.5).unwrap();
            let middle = reduce_tangent(geodesic_flow(g0, len / 2.0)).unwrap();
            let second = walk_segment(middle, len / 2.0, w, &ann, 0.5).unwrap();
            assert!(
                (coarse - first - second).abs() < 1e-8,
                "additivity: {coarse} vs {} + {}",
                first,
                second
            );
        }
    }

    #[test]
    fn closed_geodesic_walk_hits_itself() {
        // walking one period of the D = 5 axis and centering a ball on the
        // axis must pick up at least the diameter crossing each visit
        let d5 = Discriminant::new(5).unwrap();
        let form = FormTriple::new(1, 1, -1);
        let axis = axis_of_form(&form);
        let start = isometry_to_tangent(axis_frame(&axis).unwrap().inverse());
        let period = fundamental_unit_plus(d5).unwrap().geodesic_length;
        let on_axis = reduce_point(start.base).unwrap().point;
        let radius = 0.05;
        let ann = AnnulusSpec::ball(radius).unwrap();
        let got = walk_segment(start, period, on_axis, &ann, 0.5).unwrap();
        assert!(got >= 2.0 * radius, "diameter crossing missed: {got}");
    }

    #[test]
    fn theta_at_center_and_far() {
        let z = PointH::new(0.2, 1.4);
        let ball = AnnulusSpec::ball(0.17).unwrap();
        let at_center = theta_average(z, z, &ball).unwrap();
        assert_rel(at_center, std::f64::consts::TAU * 0.17, 1e-12, "2πR at center");

        // far centers decay like e^{−D}
        let w2 = geodesic_flow(Tangent::new(z, 1.0), 2.0).base;
        let w3 = geodesic_flow(Tangent::new(z, 1.0), 3.0).base;
        let t2 = theta_average(z, w2, &ball).unwrap();
        let t3 = theta_average(z, w3, &ball).unwrap();
        assert!(t2 > 0.0 && t3 > 0.0);
        let ratio = t3 / t2;
        assert!(
            (ratio - (-1.0f64).exp()).abs() < 0.15,
            "e^{{−D}} decay ratio off: {ratio}"
        );
    }

    #[test]
    fn theta_matches_polar_flow_oracle() {
        let z = PointH::new(0.0, 1.0);
        let ann = AnnulusSpec::new(0.05, 0.2).unwrap();
        for w in [PointH::new(0.1, 1.05), PointH::new(0.3, 1.4), PointH::new(0.0, 1.9)] {
            let fast = theta_average(z, w, &ann).unwrap();
            let slow = theta_average_polar_oracle(z, w, &ann, 256);
            assert!(
                (fast - slow).abs() < 3e-3 * fast.max(1e-4) + 2e-5,
                "Θ mismatch at w={w:?}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn theta_isometry_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let ann = AnnulusSpec::new(0.04, 0.15).unwrap();
        for _ in 0..15 {
            let z = PointH::new(rng.random_range(-1.0..1.0), rng.random_range(0.4..2.0));
            let w = PointH::new(rng.random_range(-1.0..1.0), rng.random_range(0.4..2.0));
            let g = Isometry::new(
                1.0,
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.4..0.4),
                1.0 + rng.random_range(0.0..0.5),
            );
            let plain = theta_average(z, w, &ann).unwrap();
            let moved = theta_average(g.apply(z), g.apply(w), &ann).unwrap();
            assert!(
                (plain - moved).abs() <= 1e-6 * plain.max(1e-6),
                "invariance: {plain} vs {moved}"
            );
        }
    }

    #[test]
    fn main_term_examples() {
        let ball = AnnulusSpec::ball(0.1).unwrap();
        let quad = main_term_integral(&ball).unwrap();
        let closed = main_term_closed_form(&ball).unwrap();
        assert_rel(closed, 16.0 / 3.0 * 0.1f64.sinh().powi(3), 1e-14, "G(0) = 1 case");
        assert!((closed - 5.3601e-3).abs() < 1e-6);
        assert_rel(quad, closed, 1e-6, "quadrature vs closed form");

        let ann = AnnulusSpec::new(0.05, 0.1).unwrap();
        assert_rel(
            main_term_integral(&ann).unwrap(),
            main_term_closed_form(&ann).unwrap(),
            1e-6,
            "annulus case",
        );

        // r → R: the integral collapses (the closed form puts it at ~4e−8)
        let thin = AnnulusSpec::new(0.0999, 0.1).unwrap();
        let quad = main_term_integral(&thin).unwrap();
        assert!(quad < 1e-7, "thin annulus must collapse, got {quad}");
        assert_rel(quad, main_term_closed_form(&thin).unwrap(), 1e-5, "thin identity");
    }

    #[test]
    fn main_term_arc_length_form_agrees_to_second_order() {
        // the pre-substitution integral carries a relative O(R²) offset
        for &radius in &[0.2, 0.1, 0.05, 0.025] {
            let ann = AnnulusSpec::new(0.25 * radius, radius).unwrap();
            let arc = main_term_integral_arc_length(&ann).unwrap();
            let exact = main_term_integral(&ann).unwrap();
            let gap = (arc / exact - 1.0).abs();
            assert!(gap < 1.2 * radius * radius, "O(R²) gap violated: {gap} at R={radius}");
            assert!(gap > 0.05 * radius * radius, "the two forms differ by Θ(R²): {gap}");
        }
    }
}
