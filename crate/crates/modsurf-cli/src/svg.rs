//! Static SVG renderings of closed geodesics folded into the fundamental
//! domain.
//!
//! Each closed geodesic is traversed for one period. Between wall crossings
//! the path is an exact Euclidean circular arc (geodesics are half-circles
//! orthogonal to the real axis); the crossing parameters with the walls
//! x = ±1/2 and |z| = 1 are solved in closed form, and the crossing applies
//! the identifying group element to the axis endpoints.

use modsurf::forms::{axis_of_form, cycle_data, Discriminant};
use modsurf::hyperbolic::PointH;
use modsurf::surface::reduce_point;
use modsurf::{Error, Result};

/// One circular-arc piece inside the fundamental domain.
#[derive(Debug, Clone, Copy)]
pub struct ArcPiece {
    pub start: (f64, f64),
    pub end: (f64, f64),
    /// Radius of the carrying Euclidean circle (center on the real axis).
    pub radius: f64,
    /// Whether the arc runs toward increasing x.
    pub rightward: bool,
}

/// The folded picture of one discriminant: one list of arcs per class.
pub struct FoldedGeodesics {
    pub disc: i64,
    pub classes: Vec<Vec<ArcPiece>>,
}

fn point_at(p: f64, q: f64, s: f64) -> (f64, f64) {
    let e = (2.0 * s).exp();
    ((p + q * e) / (1.0 + e), (q - p).abs() * s.exp() / (1.0 + e))
}

/// Arc-length parameter of `z` on the geodesic (p, q), via the axis frame.
fn param_of(p: f64, q: f64, z: PointH) -> f64 {
    let frame = modsurf::hyperbolic::axis_frame(&modsurf::hyperbolic::GeodesicLine {
        endpoint_minus: p,
        endpoint_plus: q,
    })
    .expect("endpoints distinct");
    frame.apply(z).abs().ln()
}

/// The smallest crossing parameter beyond `s_cur` where the geodesic (p, q)
/// leaves the closed fundamental domain.
fn next_exit(p: f64, q: f64, s_cur: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut consider = |e_val: f64| {
        if e_val > 0.0 {
            let s = 0.5 * e_val.ln();
            if s > s_cur + 1e-11 && best.is_none_or(|b| s < b) {
                best = Some(s);
            }
        }
    };
    // x(s) = ±1/2:  E = (±1/2 − p)/(q ∓ 1/2)
    for wall in [0.5, -0.5] {
        let den = q - wall;
        if den.abs() > 1e-300 {
            consider((wall - p) / den);
        }
    }
    // |z(s)| = 1: a quadratic in E = e^{2s}
    let a = q * q - 1.0;
    let b = 2.0 * p * q + (q - p) * (q - p) - 2.0;
    let c = p * p - 1.0;
    if a.abs() < 1e-300 {
        if b.abs() > 1e-300 {
            consider(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let root = disc.sqrt();
            consider((-b - root) / (2.0 * a));
            consider((-b + root) / (2.0 * a));
        }
    }
    best
}

/// Folds the closed geodesic of one class into the fundamental domain for a
/// single period, yielding exact arc pieces.
fn fold_one_class(
    form: &modsurf::forms::FormTriple,
    period: f64,
    piece_cap: usize,
    pieces_so_far: usize,
) -> Result<Vec<ArcPiece>> {
    let axis = axis_of_form(form);
    let (mut p, mut q) = (axis.endpoint_minus, axis.endpoint_plus);

    // start from an axis point that folds strictly inside the domain, so the
    // first wall crossing is unambiguous; generic offsets from the top of
    // the arc succeed immediately
    let mut s_cur = 0.0;
    let mut started = false;
    for k in 0..64 {
        let offset = 0.061_803_398_875 * (1 + k) as f64;
        let probe = point_at(p, q, offset);
        let fold = reduce_point(PointH::new(probe.0, probe.1))?;
        let interior = fold.point.x.abs() < 0.5 - 1e-7
            && fold.point.x * fold.point.x + fold.point.y * fold.point.y > 1.0 + 1e-7;
        if interior {
            let iso = fold.reducer.to_isometry();
            p = iso.apply_boundary(p);
            q = iso.apply_boundary(q);
            s_cur = param_of(p, q, fold.point);
            started = true;
            break;
        }
    }
    if !started {
        return Err(Error::Config(format!(
            "no interior starting point found on the axis of {form:?}"
        )));
    }

    let mut pieces = Vec::new();
    let mut traversed = 0.0;
    let mut stalls = 0;
    while traversed < period - 1e-9 {
        if pieces_so_far + pieces.len() >= piece_cap {
            return Err(Error::Config(format!(
                "piece cap {piece_cap} exceeded while folding D = {}",
                form.discriminant()
            )));
        }
        // a missing exit means the point straddles a wall within tolerance;
        // a zero-length hand-off below re-reduces and recovers
        let hand = match next_exit(p, q, s_cur) {
            Some(exit) => {
                let s_stop = exit.min(s_cur + (period - traversed));
                pieces.push(ArcPiece {
                    start: point_at(p, q, s_cur),
                    end: point_at(p, q, s_stop),
                    radius: (q - p).abs() / 2.0,
                    rightward: q > p,
                });
                traversed += s_stop - s_cur;
                if s_stop < exit {
                    break;
                }
                stalls = 0;
                exit
            }
            None => {
                stalls += 1;
                if stalls > 50 {
                    return Err(Error::Config(
                        "geodesic failed to exit the fundamental domain".into(),
                    ));
                }
                s_cur
            }
        };
        // step just past the wall and fold back into the domain
        let probe = point_at(p, q, hand + 1e-7);
        let fold = reduce_point(PointH::new(probe.0, probe.1))?;
        let iso = fold.reducer.to_isometry();
        p = iso.apply_boundary(p);
        q = iso.apply_boundary(q);
        s_cur = param_of(p, q, fold.point);
        traversed += 1e-7;
    }
    Ok(pieces)
}

/// Folds all classes of a discriminant.
pub fn fold_geodesics(disc: i64, piece_cap: usize) -> Result<FoldedGeodesics> {
    let d = Discriminant::new(disc)?;
    let data = cycle_data(d)?;
    let period = data.unit.geodesic_length;
    let mut classes = Vec::with_capacity(data.h_plus);
    let mut count = 0;
    for cycle in &data.cycles {
        let arcs = fold_one_class(&cycle.forms[0], period, piece_cap, count)?;
        count += arcs.len();
        classes.push(arcs);
    }
    Ok(FoldedGeodesics { disc, classes })
}

const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Renders the folded picture: the fundamental domain outline plus one
/// `<g>` path group per class.
pub fn render_svg(folded: &FoldedGeodesics) -> String {
    let scale = 600.0;
    let max_y = folded
        .classes
        .iter()
        .flatten()
        .flat_map(|a| [a.start.1, a.end.1])
        .fold(1.2, f64::max);
    let y_top = (max_y + 0.1).min(2.4);
    let width = 1.1 * scale;
    let height = y_top * scale;
    let fx = |x: f64| (x + 0.55) * scale;
    let fy = |y: f64| (y_top - y) * scale;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.2} {height:.2}\">\n<title>closed geodesics, D = {}</title>\n",
        folded.disc
    ));
    svg.push_str(&format!(
        "<rect width=\"{width:.2}\" height=\"{height:.2}\" fill=\"white\"/>\n"
    ));
    // fundamental domain: vertical walls and the unit-circle floor
    let root3half = 3.0f64.sqrt() / 2.0;
    svg.push_str(&format!(
        "<g stroke=\"black\" stroke-width=\"1.5\" fill=\"none\" id=\"domain\">\n\
         <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>\n\
         <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>\n\
         <path d=\"M {:.3} {:.3} A {:.3} {:.3} 0 0 1 {:.3} {:.3}\"/>\n</g>\n",
        fx(-0.5),
        fy(y_top),
        fx(-0.5),
        fy(root3half),
        fx(0.5),
        fy(y_top),
        fx(0.5),
        fy(root3half),
        fx(-0.5),
        fy(root3half),
        scale,
        scale,
        fx(0.5),
        fy(root3half),
    ));
    for (idx, class) in folded.classes.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        svg.push_str(&format!(
            "<g stroke=\"{color}\" stroke-width=\"0.9\" fill=\"none\" class=\"geodesic-class\">\n"
        ));
        for arc in class {
            let (x1, y1) = (fx(arc.start.0), fy(arc.start.1));
            let (x2, y2) = (fx(arc.end.0), fy(arc.end.1));
            let r = arc.radius * scale;
            if r > 5e4 {
                svg.push_str(&format!(
                    "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>\n"
                ));
            } else {
                let sweep = if arc.rightward { 1 } else { 0 };
                svg.push_str(&format!(
                    "<path d=\"M {x1:.3} {y1:.3} A {r:.3} {r:.3} 0 0 {sweep} {x2:.3} {y2:.3}\"/>\n"
                ));
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
