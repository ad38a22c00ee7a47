//! Calibration sweep for the frozen constants in `modsurf::calib` and a
//! feasibility dry run of the statistical acceptance bounds. Prints observed
//! extremes; the committed constants must dominate them with headroom.

use modsurf::hyperbolic::{dist, geodesic_flow, PointH, Tangent};
use modsurf::intersect::theta_average;
use modsurf::mc::{
    expectation_check, mixing_correlation, var_random, BallObservable, RandomSegmentConfig,
};
use modsurf::special::{
    bessel_j0, g_function, legendre_conical, shc_asymptotic, shc_numeric, AnnulusSpec,
};
use modsurf::surface::{count_lattice, min_spacing, reduce_point};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::time::Instant;

fn log_uniform_f_point(rng: &mut ChaCha8Rng, height: f64) -> PointH {
    loop {
        let x = rng.random_range(-0.5..0.5);
        let y0 = 3.0f64.sqrt() / 2.0;
        let y = y0 * (height / y0).powf(rng.random_range(0.0..1.0));
        if x * x + y * y >= 1.0 {
            return PointH::new(x, y);
        }
    }
}

fn main() {
    let t0 = Instant::now();

    // --- G lower bound kappa ---
    let mut kappa = f64::INFINITY;
    for i in 0..2000 {
        let w = i as f64 / 2000.0;
        let ratio = g_function(w).unwrap().value
            / ((1.0 - w).powi(2) * (2.0 / (1.0 - w)).ln());
        kappa = kappa.min(ratio);
    }
    println!("G lower-bound ratio min (kappa must sit below): {kappa:.4}");

    // --- Hilb constant ---
    let mut hilb = 0.0f64;
    for &rho in &[0.002, 0.005, 0.01, 0.03, 0.1, 0.3] {
        for &tfrac in &[0.0, 0.1, 0.3, 0.7, 1.0] {
            let t = tfrac / rho;
            let p = legendre_conical(t, rho);
            let approx = (rho / rho.sinh()).sqrt() * bessel_j0(rho * t);
            hilb = hilb.max((p - approx).abs() / (rho * rho));
        }
    }
    println!("Hilb |P - sqrt(rho/sinh rho) J0| / rho^2 max: {hilb:.4}");

    // --- SHC envelopes ---
    let mut shc_err = 0.0f64;
    let mut shc_size = 0.0f64;
    for &big_r in &[0.01, 0.03, 0.1] {
        for &r in &[0.0, big_r / 2.0] {
            let ann = AnnulusSpec::new(r, big_r).unwrap();
            for &tfrac in &[0.0, 0.2, 0.5, 1.0, 2.0, 5.0] {
                let t = tfrac / big_r;
                let num = shc_numeric(&ann, t).unwrap();
                let asym = shc_asymptotic(&ann, t);
                let err_allow = if t.abs() <= 1.0 / big_r {
                    big_r.powi(4)
                } else {
                    big_r.powf(3.5) / t.abs().sqrt()
                };
                shc_err = shc_err.max((num - asym).abs() / err_allow);
                let size_allow = if t.abs() <= 1.0 / big_r {
                    big_r * big_r
                } else {
                    big_r.sqrt() / t.abs().powf(1.5)
                };
                shc_size = shc_size.max(num.abs() / size_allow);
            }
        }
    }
    println!("SHC asymptotic-error ratio max: {shc_err:.4}");
    println!("SHC size ratio max: {shc_size:.4}");

    // --- density bound (criterion-10 sampling) ---
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut density = 0.0f64;
    for _ in 0..1000 {
        let z = log_uniform_f_point(&mut rng, 20.0);
        let w = log_uniform_f_point(&mut rng, 20.0);
        let delta = 4.0 * rng.random_range(0.0f64..1.0).powi(2);
        let count = count_lattice(z, w, delta).unwrap() as f64;
        density = density.max(count / ((delta * (delta + 1.0)).sqrt() * w.y + 1.0));
    }
    println!("density ratio max: {density:.4}");

    // --- min spacing ---
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut spacing = f64::INFINITY;
    let corners =
        [PointH::new(0.0, 1.0), PointH::new(0.5, 3.0f64.sqrt() / 2.0), PointH::new(-0.5, 3.0f64.sqrt() / 2.0)];
    for i in 0..1000 {
        let w = if i % 5 == 0 {
            // stress the elliptic-point branch
            let q = corners[i % 3];
            let eps = 10.0f64.powf(rng.random_range(-4.0..-1.0));
            reduce_point(PointH::new(q.x + eps, q.y + eps * 0.7)).unwrap().point
        } else {
            log_uniform_f_point(&mut rng, 20.0)
        };
        let m = min_spacing(w).unwrap();
        let floor = dist(w, corners[0])
            .min(dist(w, corners[1]))
            .min(dist(w, corners[2]))
            .min(1.0 / w.y);
        if floor > 1e-12 {
            spacing = spacing.min(m / floor);
        }
    }
    println!("min-spacing ratio min: {spacing:.4}");

    // --- theta three regimes ---
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let (mut near, mut mid, mut far) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let big_r = 0.01 * (30.0f64).powf(rng.random_range(0.0..1.0));
        let r = if i % 2 == 0 { 0.0 } else { rng.random_range(0.0..0.95) * big_r };
        let ann = AnnulusSpec::new(r, big_r).unwrap();
        let z = PointH::new(rng.random_range(-0.4..0.4), rng.random_range(0.9..1.6));
        let sep = match i % 3 {
            0 => rng.random_range(0.0..1.0) * 2.0 * big_r,
            1 => rng.random_range((2.0 * big_r).min(0.99)..1.0),
            _ => rng.random_range(1.0..4.0),
        };
        if sep < 1e-6 {
            continue;
        }
        let w = geodesic_flow(
            Tangent::new(z, rng.random_range(0.0..std::f64::consts::TAU)),
            sep,
        )
        .base;
        let theta = theta_average(z, w, &ann).unwrap();
        let gap = big_r - r;
        match i % 3 {
            0 => near = near.max(theta / (gap * (2.0 * big_r / gap).ln())),
            1 => mid = mid.max(theta / (big_r * gap / sep)),
            _ => far = far.max(theta / (big_r * gap * (-sep).exp())),
        }
    }
    println!("theta near/mid/far ratio max: {near:.4} {mid:.4} {far:.4}");

    // --- mixing envelope ---
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut mix_c = 0.0f64;
    for i in 0..1000 {
        let draw_ball = |rng: &mut ChaCha8Rng| loop {
            let center = PointH::new(rng.random_range(-0.45..0.45), rng.random_range(0.95..1.7));
            let center = reduce_point(center).unwrap().point;
            let spacing = min_spacing(center).unwrap();
            if spacing >= 0.15 {
                let radius = rng.random_range(0.05..(0.45 * spacing).min(0.4));
                return BallObservable { center, radius };
            }
        };
        let phi = draw_ball(&mut rng);
        let psi = draw_ball(&mut rng);
        let t = rng.random_range(0.0..8.0);
        let mix = mixing_correlation(&phi, &psi, t, 2000, 1004 + i, 4).unwrap();
        let slack = (mix.estimate.mean.abs() - 5.0 * mix.estimate.stderr).max(0.0);
        if mix.envelope > 0.0 {
            mix_c = mix_c.max(slack / mix.envelope);
        }
    }
    println!("mixing envelope ratio max: {mix_c:.4}");
    println!("[suites done in {:.1} s]", t0.elapsed().as_secs_f64());

    // --- criterion 7 feasibility ---
    for (r, big_r, tag) in [(0.0, 0.01, "ball"), (0.005, 0.01, "half"), (0.009, 0.01, "thin")] {
        let t1 = Instant::now();
        let cfg = RandomSegmentConfig {
            ann: AnnulusSpec::new(r, big_r).unwrap(),
            segment_len: 50.0,
            cusp_height: 10.0,
            n_samples: 100_000,
            seed: 42,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4),
            step: 0.5,
        };
        let est = var_random(&cfg).unwrap();
        println!(
            "var-random {tag}: mean={:.6e} pred={:.6e} stderr={:.2e} z={:+.2} [{:.1} s]",
            est.mean,
            est.prediction,
            est.stderr,
            est.z_score,
            t1.elapsed().as_secs_f64()
        );
    }

    // --- criterion 8 feasibility ---
    for (d, big_r) in [(5i64, 0.1), (89, 0.05)] {
        let t1 = Instant::now();
        let ann = AnnulusSpec::new(0.0, big_r).unwrap();
        let est = expectation_check(d, &ann, 20_000, 42, 8, 0.5).unwrap();
        println!(
            "expect D={d}: mean={:.6e} exact={:.6e} z={:+.2} [{:.1} s]",
            est.mean,
            est.prediction,
            est.z_score,
            t1.elapsed().as_secs_f64()
        );
    }

    // --- conjecture-side report (never asserted) ---
    let t1 = Instant::now();
    let cfg = modsurf::mc::ClosedGeodesicConfig {
        ann: AnnulusSpec::new(0.0, 0.02).unwrap(),
        disc: 1297,
        n_samples: 2000,
        seed: 42,
        workers: 8,
        step: 0.5,
        cusp_height: None,
    };
    let est = modsurf::mc::var_closed(&cfg).unwrap();
    println!(
        "var-closed D=1297 R=0.02: mean={:.4e} conj={:.4e} z={:+.2} [{:.1} s]",
        est.mean,
        est.prediction,
        est.z_score,
        t1.elapsed().as_secs_f64()
    );

    println!("[total {:.1} s]", t0.elapsed().as_secs_f64());
}
