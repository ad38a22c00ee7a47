//! Batch front end for the modsurf laboratory.
//!
//! Every command echoes its resolved configuration, writes a deterministic
//! artifact (JSON payload, CSV table, or SVG) to `--out` or stdout, and
//! appends a full run record to `results/ledger.jsonl`. All radii are
//! hyperbolic; Euclidean intuition misleads near the cusp.
//!
//! Exit codes: 0 success, 1 errors (including flag errors), 2 assertion-mode
//! failure of a statistical bound.

mod record;
mod svg;

use clap::{Args, Parser, Subcommand};
use modsurf::forms::{
    class_number_formula_check, cycle_data, dirichlet_l1, write_cycle_cache, Discriminant,
};
use modsurf::hyperbolic::PointH;
use modsurf::intersect::theta_average;
use modsurf::mc::{
    expectation_check, mixing_correlation, regime_warning, var_closed, var_random,
    BallObservable, ClosedGeodesicConfig, Estimate, RandomSegmentConfig,
};
use modsurf::special::{
    g_asymptotic_form, g_function, g_prime, shc_asymptotic, shc_numeric, AnnulusSpec,
};
use record::RunRecord;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "modsurf", version, about = "Geodesic statistics on the modular surface")]
struct Cli {
    /// Flat `key = value` file supplying defaults; explicit flags override.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the append-only run ledger; "none" disables it.
    #[arg(long, global = true, default_value = "results")]
    ledger_dir: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct McArgs {
    /// Inner radius r (hyperbolic).
    #[arg(long = "r")]
    inner: Option<f64>,
    /// Outer radius R (hyperbolic).
    #[arg(long = "R")]
    outer: Option<f64>,
    /// Sample count.
    #[arg(long = "n")]
    samples: Option<u64>,
    /// RNG seed; results are bit-reproducible per (seed, n).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; never affects results, only speed.
    #[arg(long)]
    workers: Option<usize>,
    /// Walker step length in (0, 1].
    #[arg(long)]
    step: Option<f64>,
    /// Path for the deterministic JSON payload.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Table of the shape function G, its derivative, and asymptotic ratio.
    Gfun {
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        w_max: Option<f64>,
        #[arg(long, value_parser = ["csv", "json"])]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced-form cycles, class number, unit, and L(1, χ_D) for one D.
    Forms {
        #[arg(long = "D")]
        disc: Option<i64>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long, value_parser = ["csv", "json"])]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the closed geodesics of discriminant D folded into F.
    PlotGeodesics {
        #[arg(long = "D")]
        disc: Option<i64>,
        #[arg(long)]
        piece_cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variance of annulus intersections for random geodesic segments.
    VarRandom {
        /// Segment length L.
        #[arg(long = "L")]
        length: Option<f64>,
        /// Cusp truncation height A for annulus centers.
        #[arg(long = "A")]
        height: Option<f64>,
        /// Exit 2 unless |z| <= 3 against the theorem prediction.
        #[arg(long = "assert")]
        assert_mode: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Variance of annulus intersections for the closed geodesics of D.
    /// The conjecture comparison is reported, never asserted.
    VarClosed {
        #[arg(long = "D")]
        disc: Option<i64>,
        /// Optional record of the model cutoff A (must exceed sqrt(D)/2).
        #[arg(long = "A")]
        height: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Exact expected-value identity for closed geodesics (Fubini check).
    Expect {
        #[arg(long = "D")]
        disc: Option<i64>,
        /// Exit 2 unless |z| <= 4 against the exact expectation.
        #[arg(long = "assert")]
        assert_mode: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Flow-correlation probe for two centered ball indicators.
    Mixing {
        #[arg(long = "t")]
        time: Option<f64>,
        #[arg(long)]
        cx1: Option<f64>,
        #[arg(long)]
        cy1: Option<f64>,
        #[arg(long)]
        rad1: Option<f64>,
        #[arg(long)]
        cx2: Option<f64>,
        #[arg(long)]
        cy2: Option<f64>,
        #[arg(long)]
        rad2: Option<f64>,
        #[arg(long = "n")]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Exit 2 unless the estimate sits inside the decay envelope.
        #[arg(long = "assert")]
        assert_mode: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Selberg–Harish-Chandra transform: numeric vs asymptotic.
    Shc {
        #[arg(long = "r")]
        inner: Option<f64>,
        #[arg(long = "R")]
        outer: Option<f64>,
        #[arg(long = "t")]
        time: Option<f64>,
        /// Exit 2 unless the numeric/asymptotic gap fits the envelope.
        #[arg(long = "assert")]
        assert_mode: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average geodesic/annulus intersection Θ(z, w).
    Theta {
        #[arg(long)]
        zx: Option<f64>,
        #[arg(long)]
        zy: Option<f64>,
        #[arg(long)]
        wx: Option<f64>,
        #[arg(long)]
        wy: Option<f64>,
        #[arg(long = "r")]
        inner: Option<f64>,
        #[arg(long = "R")]
        outer: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flat key = value config file; `#` starts a comment.
fn load_config(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not `key = value`", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Ctx {
    file: HashMap<String, String>,
    ledger_dir: Option<PathBuf>,
}

impl Ctx {
    fn lookup<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key `{key}` has unparsable value `{raw}`")),
        }
    }

    /// Flag wins, then the config file, then the error.
    fn need<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.lookup(key)?.ok_or_else(|| format!("missing required value `{key}`"))
    }

    fn or_default<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.lookup(key)?.unwrap_or(default))
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

struct Outcome {
    payload: Value,
    config: Value,
    /// Raw artifact written to --out in place of the payload JSON, if any.
    artifact: Option<String>,
    assert_failed: bool,
}

fn estimate_json(est: &Estimate) -> Value {
    json!({
        "mean": est.mean,
        "stderr": est.stderr,
        "n": est.n,
        "seed": est.seed,
        "prediction": est.prediction,
        "z_score": est.z_score,
    })
}

fn run_command(cmd: &Cmd, ctx: &Ctx) -> Result<(String, Outcome), String> {
    match cmd {
        Cmd::Gfun { points, w_max, format, out: _ } => {
            let points = ctx.or_default(*points, "points", 200)?;
            let w_max = ctx.or_default(*w_max, "w-max", 0.999)?;
            let format = ctx.or_default(format.clone(), "format", "csv".to_string())?;
            if points < 2 || !(0.0..1.0).contains(&w_max) {
                return Err("gfun needs points >= 2 and w-max in [0, 1)".into());
            }
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                let w = w_max * i as f64 / (points - 1) as f64;
                let g = g_function(w).map_err(|e| e.to_string())?.value;
                let gp = g_prime(w).map_err(|e| e.to_string())?;
                let ratio = g / g_asymptotic_form(w);
                rows.push((w, g, gp, ratio));
            }
            let artifact = if format == "csv" {
                let mut s = String::from("w,G,G_prime,asymptotic_ratio\n");
                for (w, g, gp, ratio) in &rows {
                    s.push_str(&format!("{w},{g},{gp},{ratio}\n"));
                }
                Some(s)
            } else {
                None
            };
            let payload = json!({
                "rows": rows
                    .iter()
                    .map(|(w, g, gp, ratio)| json!({"w": w, "G": g, "G_prime": gp, "asymptotic_ratio": ratio}))
                    .collect::<Vec<_>>(),
            });
            let config = json!({"points": points, "w_max": w_max, "format": format});
            Ok(("gfun".into(), Outcome { payload, config, artifact, assert_failed: false }))
        }

        Cmd::Forms { disc, cache_dir, format, out: _ } => {
            let disc_v = ctx.need(*disc, "D")?;
            let cache_dir =
                ctx.or_default(cache_dir.clone(), "cache-dir", PathBuf::from("cache"))?;
            let format = ctx.or_default(format.clone(), "format", "csv".to_string())?;
            let d = Discriminant::new(disc_v).map_err(|e| e.to_string())?;
            let data = cycle_data(d).map_err(|e| e.to_string())?;
            let l1 = dirichlet_l1(d);
            let residual = class_number_formula_check(d).map_err(|e| e.to_string())?;
            let cache_file = write_cycle_cache(&cache_dir, &data).map_err(|e| e.to_string())?;
            let payload = json!({
                "D": disc_v,
                "h_plus": data.h_plus,
                "squarefree": d.is_squarefree(),
                "t": data.unit.t.to_string(),
                "u": data.unit.u.to_string(),
                "geodesic_length": data.unit.geodesic_length,
                "total_length": data.total_length(),
                "l1_chi": l1,
                "cnf_residual": residual,
            });
            let artifact = if format == "csv" {
                Some(format!(
                    "D,h_plus,squarefree,t,u,geodesic_length,total_length,l1_chi,cnf_residual\n\
                     {},{},{},{},{},{},{},{},{}\n",
                    disc_v,
                    data.h_plus,
                    d.is_squarefree(),
                    data.unit.t,
                    data.unit.u,
                    data.unit.geodesic_length,
                    data.total_length(),
                    l1,
                    residual
                ))
            } else {
                None
            };
            let config = json!({
                "D": disc_v,
                "cache_dir": cache_dir.display().to_string(),
                "format": format,
                "cache_file": cache_file.display().to_string(),
            });
            Ok(("forms".into(), Outcome { payload, config, artifact, assert_failed: false }))
        }

        Cmd::PlotGeodesics { disc, piece_cap, out: _ } => {
            let disc_v = ctx.need(*disc, "D")?;
            let cap = ctx.or_default(*piece_cap, "piece-cap", 10_000)?;
            let folded = svg::fold_geodesics(disc_v, cap).map_err(|e| e.to_string())?;
            let rendered = svg::render_svg(&folded);
            let payload = json!({
                "D": disc_v,
                "classes": folded.classes.len(),
                "arc_pieces": folded.classes.iter().map(Vec::len).sum::<usize>(),
            });
            let config = json!({"D": disc_v, "piece_cap": cap});
            Ok((
                "plot-geodesics".into(),
                Outcome { payload, config, artifact: Some(rendered), assert_failed: false },
            ))
        }

        Cmd::VarRandom { length, height, assert_mode, mc } => {
            let cfg = RandomSegmentConfig {
                ann: annulus_from(ctx, mc)?,
                segment_len: ctx.need(*length, "L")?,
                cusp_height: ctx.or_default(*height, "A", 10.0)?,
                n_samples: ctx.need(mc.samples, "n")?,
                seed: ctx.or_default(mc.seed, "seed", 42)?,
                workers: ctx.or_default(mc.workers, "workers", default_workers())?,
                step: ctx.or_default(mc.step, "step", 0.5)?,
            };
            let warning = regime_warning(&cfg);
            if let Some(w) = &warning {
                eprintln!("warning: {w}");
            }
            let est = var_random(&cfg).map_err(|e| e.to_string())?;
            let assert_failed = *assert_mode && est.z_score.abs() > 3.0;
            let payload = json!({
                "estimate": estimate_json(&est),
                "regime_warning": warning,
            });
            let config = serde_json::to_value(&cfg).unwrap();
            Ok(("var-random".into(), Outcome { payload, config, artifact: None, assert_failed }))
        }

        Cmd::VarClosed { disc, height, mc } => {
            let cfg = ClosedGeodesicConfig {
                ann: annulus_from(ctx, mc)?,
                disc: ctx.need(*disc, "D")?,
                n_samples: ctx.need(mc.samples, "n")?,
                seed: ctx.or_default(mc.seed, "seed", 42)?,
                workers: ctx.or_default(mc.workers, "workers", default_workers())?,
                step: ctx.or_default(mc.step, "step", 0.5)?,
                cusp_height: *height,
            };
            let est = var_closed(&cfg).map_err(|e| e.to_string())?;
            let payload = json!({
                "estimate": estimate_json(&est),
                "conjecture_comparison_only": true,
            });
            let config = serde_json::to_value(&cfg).unwrap();
            Ok((
                "var-closed".into(),
                Outcome { payload, config, artifact: None, assert_failed: false },
            ))
        }

        Cmd::Expect { disc, assert_mode, mc } => {
            let ann = annulus_from(ctx, mc)?;
            let disc_v = ctx.need(*disc, "D")?;
            let n = ctx.need(mc.samples, "n")?;
            let seed = ctx.or_default(mc.seed, "seed", 42)?;
            let workers = ctx.or_default(mc.workers, "workers", default_workers())?;
            let step = ctx.or_default(mc.step, "step", 0.5)?;
            let est = expectation_check(disc_v, &ann, n, seed, workers, step)
                .map_err(|e| e.to_string())?;
            let assert_failed = *assert_mode && est.z_score.abs() > 4.0;
            let payload = json!({"estimate": estimate_json(&est)});
            let config = json!({
                "D": disc_v, "r": ann.inner, "R": ann.outer,
                "n": n, "seed": seed, "workers": workers, "step": step,
            });
            Ok(("expect".into(), Outcome { payload, config, artifact: None, assert_failed }))
        }

        Cmd::Mixing {
            time,
            cx1,
            cy1,
            rad1,
            cx2,
            cy2,
            rad2,
            samples,
            seed,
            workers,
            assert_mode,
            out: _,
        } => {
            let t = ctx.need(*time, "t")?;
            let phi = BallObservable {
                center: PointH::new(ctx.need(*cx1, "cx1")?, ctx.need(*cy1, "cy1")?),
                radius: ctx.need(*rad1, "rad1")?,
            };
            let psi = BallObservable {
                center: PointH::new(ctx.need(*cx2, "cx2")?, ctx.need(*cy2, "cy2")?),
                radius: ctx.need(*rad2, "rad2")?,
            };
            let n = ctx.need(*samples, "n")?;
            let seed = ctx.or_default(*seed, "seed", 42)?;
            let workers = ctx.or_default(*workers, "workers", default_workers())?;
            let mix =
                mixing_correlation(&phi, &psi, t, n, seed, workers).map_err(|e| e.to_string())?;
            let bound =
                modsurf::calib::MIXING_ENVELOPE_C * mix.envelope + 5.0 * mix.estimate.stderr;
            let assert_failed = *assert_mode && mix.estimate.mean.abs() > bound;
            let payload = json!({
                "estimate": estimate_json(&mix.estimate),
                "envelope": mix.envelope,
                "envelope_constant": modsurf::calib::MIXING_ENVELOPE_C,
                "bound": bound,
            });
            let config = json!({
                "t": t, "cx1": phi.center.x, "cy1": phi.center.y, "rad1": phi.radius,
                "cx2": psi.center.x, "cy2": psi.center.y, "rad2": psi.radius,
                "n": n, "seed": seed, "workers": workers,
            });
            Ok(("mixing".into(), Outcome { payload, config, artifact: None, assert_failed }))
        }

        Cmd::Shc { inner, outer, time, assert_mode, out: _ } => {
            let r = ctx.or_default(*inner, "r", 0.0)?;
            let big_r = ctx.need(*outer, "R")?;
            let t = ctx.need(*time, "t")?;
            let ann = AnnulusSpec::new(r, big_r).map_err(|e| e.to_string())?;
            let numeric = shc_numeric(&ann, t).map_err(|e| e.to_string())?;
            let asymptotic = shc_asymptotic(&ann, t);
            let allowance = if t.abs() <= 1.0 / big_r {
                modsurf::calib::SHC_ASYMP_ERR_C * big_r.powi(4)
            } else {
                modsurf::calib::SHC_ASYMP_ERR_C * big_r.powf(3.5) / t.abs().sqrt()
            };
            let assert_failed = *assert_mode && (numeric - asymptotic).abs() > allowance;
            let payload = json!({
                "r": r, "R": big_r, "t": t,
                "numeric": numeric,
                "asymptotic": asymptotic,
                "abs_diff": (numeric - asymptotic).abs(),
                "envelope_allowance": allowance,
            });
            let config = json!({"r": r, "R": big_r, "t": t});
            Ok(("shc".into(), Outcome { payload, config, artifact: None, assert_failed }))
        }

        Cmd::Theta { zx, zy, wx, wy, inner, outer, out: _ } => {
            let z = PointH::new(ctx.need(*zx, "zx")?, ctx.need(*zy, "zy")?);
            let w = PointH::new(ctx.need(*wx, "wx")?, ctx.need(*wy, "wy")?);
            let r = ctx.or_default(*inner, "r", 0.0)?;
            let big_r = ctx.need(*outer, "R")?;
            let ann = AnnulusSpec::new(r, big_r).map_err(|e| e.to_string())?;
            let value = theta_average(z, w, &ann).map_err(|e| e.to_string())?;
            let payload = json!({
                "theta": value,
                "dist": modsurf::hyperbolic::dist(z, w),
            });
            let config =
                json!({"zx": z.x, "zy": z.y, "wx": w.x, "wy": w.y, "r": r, "R": big_r});
            Ok(("theta".into(), Outcome { payload, config, artifact: None, assert_failed: false }))
        }
    }
}

fn annulus_from(ctx: &Ctx, mc: &McArgs) -> Result<AnnulusSpec, String> {
    let inner = ctx.or_default(mc.inner, "r", 0.0)?;
    let outer = ctx.need(mc.outer, "R")?;
    AnnulusSpec::new(inner, outer).map_err(|e| e.to_string())
}

fn out_path(cmd: &Cmd) -> Option<PathBuf> {
    match cmd {
        Cmd::Gfun { out, .. }
        | Cmd::Forms { out, .. }
        | Cmd::PlotGeodesics { out, .. }
        | Cmd::Mixing { out, .. }
        | Cmd::Shc { out, .. }
        | Cmd::Theta { out, .. } => out.clone(),
        Cmd::VarRandom { mc, .. } | Cmd::VarClosed { mc, .. } | Cmd::Expect { mc, .. } => {
            mc.out.clone()
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let ledger_dir = if cli.ledger_dir == "none" {
        None
    } else {
        Some(PathBuf::from(&cli.ledger_dir))
    };
    let ctx = Ctx { file, ledger_dir };

    let started = Instant::now();
    let (name, outcome) = run_command(&cli.cmd, &ctx)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let record = RunRecord::new(&name, outcome.config, outcome.payload, wall_ms);
    let deterministic = serde_json::to_string_pretty(&record.deterministic_json())
        .expect("record serializes");

    match (out_path(&cli.cmd), &outcome.artifact) {
        (Some(path), Some(artifact)) => {
            std::fs::write(&path, artifact)
                .map_err(|e| format!("write {}: {e}", path.display()))?;
            println!("wrote {}", path.display());
        }
        (Some(path), None) => {
            std::fs::write(&path, &deterministic)
                .map_err(|e| format!("write {}: {e}", path.display()))?;
            println!("wrote {}", path.display());
        }
        (None, Some(artifact)) => print!("{artifact}"),
        (None, None) => println!("{deterministic}"),
    }

    if let Some(dir) = &ctx.ledger_dir {
        record.append_to_ledger(dir).map_err(|e| format!("ledger append: {e}"))?;
    }
    if outcome.assert_failed {
        eprintln!("assertion mode: statistical bound violated");
    }
    Ok(outcome.assert_failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are not failures
            use clap::error::ErrorKind;
            let kind = err.kind();
            let _ = err.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
