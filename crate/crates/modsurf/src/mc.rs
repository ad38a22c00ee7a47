//! Seeded Monte Carlo estimators for intersection variance.
//!
//! Determinism contract: every sample index owns its own counter-based RNG
//! stream (ChaCha with stream id = sample index over a fixed seed), samples
//! are processed in fixed-size batches, and the reduction folds batch sums
//! in index order. The result is bit-identical for any worker count.

use crate::forms::{axis_of_form, cycle_data, dirichlet_l1, CycleData, Discriminant};
use crate::hyperbolic::{axis_frame, geodesic_flow, isometry_to_tangent, PointH, Tangent};
use crate::intersect::{walk_eval, walk_frames, SegmentFrame};
use crate::special::{g_function, AnnulusSpec};
use crate::surface::{kernel_value, reduce_point};
use crate::{Error, Result, FUNDAMENTAL_DOMAIN_AREA};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

const BATCH: u64 = 512;

/// Configuration of a random-segment variance run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomSegmentConfig {
    pub ann: AnnulusSpec,
    /// Segment length L.
    pub segment_len: f64,
    /// Cusp truncation height A for the annulus centers.
    pub cusp_height: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub step: f64,
}

/// Configuration of a closed-geodesic variance run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedGeodesicConfig {
    pub ann: AnnulusSpec,
    pub disc: i64,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub step: f64,
    /// Optional record of the model cutoff; when set it must dominate √D/2.
    pub cusp_height: Option<f64>,
}

/// A Monte Carlo result with its seed provenance and the analytic prediction
/// it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub prediction: f64,
    pub z_score: f64,
}

impl Estimate {
    fn new(mean: f64, stderr: f64, n: u64, seed: u64, prediction: f64) -> Self {
        let z_score = if stderr > 0.0 { (mean - prediction) / stderr } else { 0.0 };
        Estimate { mean, stderr, n, seed, prediction, z_score }
    }
}

/// Deterministic parallel mean of `f` over `n` indexed samples: per-index
/// RNG streams, fixed batch boundaries, index-ordered reduction.
fn mc_mean<F>(n: u64, seed: u64, workers: usize, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {n}")));
    }
    let batches = n.div_ceil(BATCH);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let partials: Vec<Result<(f64, f64)>> = pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|batch| {
                let lo = batch * BATCH;
                let hi = ((batch + 1) * BATCH).min(n);
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                for idx in lo..hi {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(idx);
                    let v = f(&mut rng)?;
                    sum += v;
                    sum_sq += v * v;
                }
                Ok((sum, sum_sq))
            })
            .collect()
    });
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for p in partials {
        let (s, q) = p?;
        sum += s;
        sum_sq += q;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Draws a μ-uniform point of the truncated fundamental domain F_A:
/// x uniform on [−1/2, 1/2], y by inverse transform of the 1/y² density on
/// [√3/2, A], rejecting the cut below the unit circle.
pub fn sample_point_f(cusp_height: f64, rng: &mut ChaCha8Rng) -> PointH {
    let y_floor = 3.0f64.sqrt() / 2.0;
    let inv_floor = 1.0 / y_floor;
    let inv_cap = if cusp_height.is_finite() { 1.0 / cusp_height } else { 0.0 };
    loop {
        let x = rng.random_range(-0.5..0.5);
        let v: f64 = rng.random_range(0.0..1.0);
        let y = 1.0 / (inv_floor - v * (inv_floor - inv_cap));
        if x * x + y * y >= 1.0 {
            return PointH::new(x, y);
        }
    }
}

/// Draws a Liouville-uniform unit tangent vector over the fundamental
/// domain: base ~ μ on F (no cusp truncation needed, 1/y² is integrable),
/// angle uniform on [0, 2π).
pub fn sample_tangent(rng: &mut ChaCha8Rng) -> Tangent {
    let base = sample_point_f(f64::INFINITY, rng);
    let angle = rng.random_range(0.0..TAU);
    Tangent::new(base, angle)
}

/// The truncation-regime flag for [`var_random`]: the asymptotic theorem
/// wants log A · R · log(1/(R−r)) small.
pub fn regime_warning(cfg: &RandomSegmentConfig) -> Option<String> {
    let gap = cfg.ann.outer - cfg.ann.inner;
    let figure = cfg.cusp_height.ln() * cfg.ann.outer * (1.0 / gap).ln();
    if figure > 0.1 {
        Some(format!(
            "log A * R * log(1/(R-r)) = {figure:.3} exceeds 0.1; the asymptotic regime is strained"
        ))
    } else {
        None
    }
}

/// Prediction for the random-segment variance: 16 L R³/π · G(r/R).
pub fn random_prediction(ann: &AnnulusSpec, segment_len: f64) -> Result<f64> {
    let shape = g_function(ann.inner / ann.outer)?.value;
    Ok(16.0 * segment_len * ann.outer.powi(3) / PI * shape)
}

/// Monte Carlo estimate of the truncated variance Var_A(r, R; L) for random
/// geodesic segments: the mean of F(g, w)² over independent pairs, where
/// F(g, w) is the intersection length minus the exact centering constant
/// L·μ(A_{r,R})/μ(F).
pub fn var_random(cfg: &RandomSegmentConfig) -> Result<Estimate> {
    if cfg.segment_len <= 0.0 || cfg.cusp_height < 1.0 {
        return Err(Error::Config("need L > 0 and A >= 1".into()));
    }
    let centering = cfg.segment_len * cfg.ann.volume() / FUNDAMENTAL_DOMAIN_AREA;
    let ann = cfg.ann;
    let (len, step, height) = (cfg.segment_len, cfg.step, cfg.cusp_height);
    let (mean, stderr) = mc_mean(cfg.n_samples, cfg.seed, cfg.workers, move |rng| {
        let g = sample_tangent(rng);
        let w = sample_point_f(height, rng);
        let frames = walk_frames(g, len, step)?;
        let val = walk_eval(&frames, w, &ann)? - centering;
        Ok(val * val)
    })?;
    Ok(Estimate::new(mean, stderr, cfg.n_samples, cfg.seed, random_prediction(&ann, len)?))
}

/// Per-class walk frames for the closed geodesics of discriminant D, one
/// period 2 log ε⁺ each, oriented toward the attracting endpoint.
fn closed_geodesic_frames(data: &CycleData, step: f64) -> Result<Vec<Vec<SegmentFrame>>> {
    let period = data.unit.geodesic_length;
    data.cycles
        .iter()
        .map(|cycle| {
            let axis = axis_of_form(&cycle.forms[0]);
            let start = isometry_to_tangent(axis_frame(&axis)?.inverse());
            walk_frames(start, period, step)
        })
        .collect()
}

/// Conjectured prediction for the closed-geodesic variance:
/// 64 √D L(1, χ_D) R³/π · G(r/R).
pub fn closed_prediction(disc: Discriminant, ann: &AnnulusSpec) -> Result<f64> {
    let shape = g_function(ann.inner / ann.outer)?.value;
    Ok(64.0 * disc.sqrt() * dirichlet_l1(disc) * ann.outer.powi(3) / PI * shape)
}

/// Monte Carlo estimate of Var(r, R; Λ_D): w is μ-uniform on the whole
/// surface, each class contributes one period of its axis, and the centering
/// constant is the exact expected value μ(A)·Σℓ(C)/μ(X).
///
/// The returned prediction is the conjectured asymptotic; at desk-scale D it
/// is reported for the record, never asserted.
pub fn var_closed(cfg: &ClosedGeodesicConfig) -> Result<Estimate> {
    let disc = Discriminant::new(cfg.disc)?;
    if let Some(a) = cfg.cusp_height {
        if a < disc.sqrt() / 2.0 {
            return Err(Error::Config(format!(
                "cutoff A = {a} is below sqrt(D)/2 = {}; the closed geodesics reach that high",
                disc.sqrt() / 2.0
            )));
        }
    }
    let data = cycle_data(disc)?;
    let frames = Arc::new(closed_geodesic_frames(&data, cfg.step)?);
    let centering = cfg.ann.volume() * data.total_length() / FUNDAMENTAL_DOMAIN_AREA;
    let ann = cfg.ann;
    let (mean, stderr) = mc_mean(cfg.n_samples, cfg.seed, cfg.workers, {
        let frames = frames.clone();
        move |rng| {
            let w = sample_point_f(f64::INFINITY, rng);
            let mut total = 0.0;
            for class in frames.iter() {
                total += walk_eval(class, w, &ann)?;
            }
            let val = total - centering;
            Ok(val * val)
        }
    })?;
    Ok(Estimate::new(mean, stderr, cfg.n_samples, cfg.seed, closed_prediction(disc, &ann)?))
}

/// The exact expected-value identity: the mean over w of Σ_C ℓ(C ∩ A(w))
/// equals μ(A)·Σℓ(C)/μ(X) by unfolding. Returns the Monte Carlo mean with
/// that exact value as the prediction.
pub fn expectation_check(
    disc: i64,
    ann: &AnnulusSpec,
    n_samples: u64,
    seed: u64,
    workers: usize,
    step: f64,
) -> Result<Estimate> {
    let disc = Discriminant::new(disc)?;
    let data = cycle_data(disc)?;
    let frames = Arc::new(closed_geodesic_frames(&data, step)?);
    let prediction = ann.volume() * data.total_length() / FUNDAMENTAL_DOMAIN_AREA;
    let ann = *ann;
    let (mean, stderr) = mc_mean(n_samples, seed, workers, {
        let frames = frames.clone();
        move |rng| {
            let w = sample_point_f(f64::INFINITY, rng);
            let mut total = 0.0;
            for class in frames.iter() {
                total += walk_eval(class, w, &ann)?;
            }
            Ok(total)
        }
    })?;
    Ok(Estimate::new(mean, stderr, n_samples, seed, prediction))
}

/// A centered ball indicator observable on the surface.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BallObservable {
    pub center: PointH,
    pub radius: f64,
}

impl BallObservable {
    /// μ-volume of the ball.
    pub fn volume(&self) -> f64 {
        4.0 * PI * (self.radius / 2.0).sinh().powi(2)
    }

    /// L²(X) norm of the centered indicator.
    pub fn centered_norm(&self) -> f64 {
        (self.volume() * (1.0 - self.volume() / FUNDAMENTAL_DOMAIN_AREA)).max(0.0).sqrt()
    }
}

/// Result of a mixing-correlation probe: the correlation estimate plus the
/// exponential-decay envelope it is compared against.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MixingEstimate {
    pub estimate: Estimate,
    /// (|t|+1)·e^{−|t|/2}·‖φ‖‖ψ‖/μ(F), before the calibration constant.
    pub envelope: f64,
}

/// Estimates the flow correlation ∫ φ(π(g))·ψ(π(G_t g)) dν/ν for centered
/// ball indicators φ, ψ, together with its decay envelope.
pub fn mixing_correlation(
    phi: &BallObservable,
    psi: &BallObservable,
    t: f64,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MixingEstimate> {
    let phi_center = reduce_point(phi.center)?.point;
    let psi_center = reduce_point(psi.center)?.point;
    let phi_ball = AnnulusSpec::new(0.0, phi.radius)?;
    let psi_ball = AnnulusSpec::new(0.0, psi.radius)?;
    let phi_mean = phi.volume() / FUNDAMENTAL_DOMAIN_AREA;
    let psi_mean = psi.volume() / FUNDAMENTAL_DOMAIN_AREA;
    let (mean, stderr) = mc_mean(n_samples, seed, workers, move |rng| {
        let g = sample_tangent(rng);
        // the kernel is invariant under lattice moves of its first slot, so
        // fold the flowed endpoint back before enumerating
        let end = reduce_point(geodesic_flow(g, t).base)?.point;
        let phi_val = if kernel_value(g.base, phi_center, &phi_ball)? > 0 { 1.0 } else { 0.0 };
        let psi_val = if kernel_value(end, psi_center, &psi_ball)? > 0 { 1.0 } else { 0.0 };
        Ok((phi_val - phi_mean) * (psi_val - psi_mean))
    })?;
    let envelope = (t.abs() + 1.0) * (-t.abs() / 2.0).exp() * phi.centered_norm()
        * psi.centered_norm()
        / FUNDAMENTAL_DOMAIN_AREA;
    Ok(MixingEstimate {
        estimate: Estimate::new(mean, stderr, n_samples, seed, 0.0),
        envelope,
    })
}
