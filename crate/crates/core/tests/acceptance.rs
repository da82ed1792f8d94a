//! Acceptance criteria 1-8. Built without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; any failure exits non-zero.

use std::panic;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use dyntarget::analysis::{matched_filter, spectral_angle, unmix};
use dyntarget::config::MissionConfig;
use dyntarget::executor::{plan_cycle, slew_time, CycleMode, CycleStatus, PhaseBudget, SpacecraftAgility};
use dyntarget::geometry::{lead_time, OrbitConfig};
use dyntarget::mission::{build_scene, simulate, MissionMetrics};
use dyntarget::rng::SimRng;
use dyntarget::scene::{EndmemberLibrary, SceneRaster};
use dyntarget::sensor::{capture, decimated_pixels, readout_time, CaptureRequest, ReadoutModel};
use dyntarget::targeting::{PointingCommand, Policy};

// Criterion 1
const PUBLISHED_LEAD_AT_45_S: f64 = 74.0;
const PUBLISHED_LEAD_BAND_S: (f64, f64) = (60.0, 90.0);
const GEOMETRY_REL_TOL: f64 = 0.15;
const GEOMETRY_MAX_RUNTIME_S: f64 = 1.0;

// Criterion 2
const ORACLE_INSTANCES: usize = 100;
const SAM_TOL: f64 = 1e-12;
const MATCHED_FILTER_TOL: f64 = 1e-9;
const GRID_STEP: f64 = 1e-3;
const GRID_OBJECTIVE_TOL: f64 = 1e-6;
const ORACLE_MAX_RUNTIME_S: f64 = 30.0;

// Criterion 3
const KKT_TOL: f64 = 1e-8;
const KKT_INSTANCES: usize = 2000;

// Criterion 4
const SCHEDULE_DRAWS: usize = 1000;
const CONTINUITY_TOL: f64 = 1e-9;
const SCHEDULE_MAX_RUNTIME_S: f64 = 10.0;

// Criterion 5
const MISSION_CYCLES: usize = 200;
const MISSION_SEEDS: u64 = 10;
const MISSION_COVERAGE: f64 = 0.5;
const MISSION_TILES: usize = 5;
const MIN_CLOUD_FREE_GAIN: f64 = 0.10;
const MIN_SEEDS_WITH_GAIN: usize = 8;
const MISSION_MAX_RUNTIME_S: f64 = 60.0;

// Criterion 6
const THERMAL_SEEDS: u64 = 10;
const THERMAL_CYCLES: usize = 100;

// Criterion 8
const DECIMATION: u64 = 4;
const FULL_FRAME_PX: u64 = 4096;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dtsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dtsim"))
}

fn within(value: f64, reference: f64, rel: f64) -> bool {
    (value - reference).abs() <= rel * reference
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let out = dtsim()
        .args(["geometry", "--altitude-km", "500", "--speed-km-s", "7.5"])
        .args(["--from-deg", "40", "--to-deg", "50", "--step-deg", "5", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    ensure(out.status.success(), || format!("geometry exited with {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mut leads = Vec::new();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        leads.push((
            v["look_angle_deg"].as_f64().unwrap(),
            v["lead_time_s"].as_f64().unwrap(),
        ));
    }
    let lead_at = |angle: f64| {
        leads
            .iter()
            .find(|(a, _)| *a == angle)
            .map(|&(_, t)| t)
            .ok_or_else(|| format!("no row for {angle} deg"))
    };
    let (l40, l45, l50) = (lead_at(40.0)?, lead_at(45.0)?, lead_at(50.0)?);
    ensure(within(l45, PUBLISHED_LEAD_AT_45_S, GEOMETRY_REL_TOL), || {
        format!("45 deg lead {l45:.3} s")
    })?;
    ensure(within(l40, PUBLISHED_LEAD_BAND_S.0, GEOMETRY_REL_TOL), || {
        format!("40 deg lead {l40:.3} s")
    })?;
    ensure(within(l50, PUBLISHED_LEAD_BAND_S.1, GEOMETRY_REL_TOL), || {
        format!("50 deg lead {l50:.3} s")
    })?;
    ensure(elapsed < GEOMETRY_MAX_RUNTIME_S, || format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "lead 40/45/50 deg = {l40:.2}/{l45:.2}/{l50:.2} s in {elapsed:.3} s"
    ))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_orthonormal_pair(rng: &mut SimRng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let u: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let v: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let nu = dot(&u, &u).sqrt();
        if nu < 1e-3 {
            continue;
        }
        let u: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let p = dot(&u, &v);
        let w: Vec<f64> = v.iter().zip(&u).map(|(v, u)| v - p * u).collect();
        let nw = dot(&w, &w).sqrt();
        if nw < 1e-3 {
            continue;
        }
        return (u, w.iter().map(|x| x / nw).collect());
    }
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot_row[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn matched_filter_oracle(pixels: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = pixels.len() as f64;
    let bands = target.len();
    let mean: Vec<f64> = (0..bands)
        .map(|b| pixels.iter().map(|p| p[b]).sum::<f64>() / n)
        .collect();
    let mut cov = vec![vec![0.0; bands]; bands];
    for p in pixels {
        for i in 0..bands {
            for j in 0..bands {
                cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]) / (n - 1.0);
            }
        }
    }
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += 1e-6;
    }
    let d: Vec<f64> = target.iter().zip(&mean).map(|(t, m)| t - m).collect();
    let w = dense_solve(cov, d.clone());
    let norm = dot(&d, &w);
    pixels
        .iter()
        .map(|p| {
            let c: Vec<f64> = p.iter().zip(&mean).map(|(x, m)| x - m).collect();
            dot(&c, &w) / norm
        })
        .collect()
}

fn objective(e: &[Vec<f64>], a: &[f64], x: &[f64]) -> f64 {
    (0..x.len())
        .map(|b| {
            let fit: f64 = e.iter().zip(a).map(|(col, ai)| col[b] * ai).sum();
            (fit - x[b]).powi(2)
        })
        .sum()
}

/// Brute-force search of `||E a - x||^2` over `a >= 0`: a grid on the first
/// two abundances (step [`GRID_STEP`], then two local passes at a tenth of
/// the step), with the third abundance, if any, minimized exactly. Each
/// coordinate is bounded by `2 |x| / |e_i|`, which no minimizer can exceed.
/// Returns (refined objective, objective at the coarse step).
fn grid_oracle(e: &[Vec<f64>], x: &[f64]) -> (f64, f64) {
    let k = e.len();
    let g = |i: usize, j: usize| dot(&e[i], &e[j]);
    let b: Vec<f64> = e.iter().map(|col| dot(col, x)).collect();
    let xx = dot(x, x);
    let eval = |a1: f64, a2: f64| -> (f64, f64) {
        let mut f =
            xx - 2.0 * (b[0] * a1 + b[1] * a2) + g(0, 0) * a1 * a1 + 2.0 * g(0, 1) * a1 * a2 + g(1, 1) * a2 * a2;
        let mut a3 = 0.0;
        if k == 3 {
            a3 = ((b[2] - g(2, 0) * a1 - g(2, 1) * a2) / g(2, 2)).max(0.0);
            f += -2.0 * b[2] * a3 + g(2, 2) * a3 * a3 + 2.0 * a3 * (g(2, 0) * a1 + g(2, 1) * a2);
        }
        (f, a3)
    };
    let bound = |i: usize| 2.0 * xx.sqrt() / g(i, i).sqrt();
    let search = |lo: (f64, f64), hi: (f64, f64), step: f64| {
        let n1 = ((hi.0 - lo.0) / step).ceil() as usize;
        let n2 = ((hi.1 - lo.1) / step).ceil() as usize;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=n1 {
            let a1 = lo.0 + i as f64 * step;
            for j in 0..=n2 {
                let a2 = lo.1 + j as f64 * step;
                let (f, _) = eval(a1, a2);
                if f < best.0 {
                    best = (f, a1, a2);
                }
            }
        }
        best
    };
    let exact = |a1: f64, a2: f64| {
        let (_, a3) = eval(a1, a2);
        let a = [a1, a2, a3];
        objective(e, &a[..k], x)
    };
    let mut best = search((0.0, 0.0), (bound(0), bound(1)), GRID_STEP);
    let coarse = exact(best.1, best.2);
    let mut step = GRID_STEP;
    for _ in 0..2 {
        let lo = ((best.1 - step).max(0.0), (best.2 - step).max(0.0));
        step /= 10.0;
        best = search(lo, (lo.0 + 20.0 * step, lo.1 + 20.0 * step), step);
    }
    (exact(best.1, best.2).min(coarse), coarse)
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut rng = SimRng::new(2024);

    let mut worst_sam = 0.0f64;
    for i in 0..ORACLE_INSTANCES {
        let (u, v) = random_orthonormal_pair(&mut rng);
        let theta = rng.uniform(0.01, std::f64::consts::PI - 0.01);
        let (sx, sr) = (rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0));
        let x: Vec<f64> = u
            .iter()
            .zip(&v)
            .map(|(u, v)| sx * (theta.cos() * u + theta.sin() * v))
            .collect();
        let r: Vec<f64> = u.iter().map(|u| sr * u).collect();
        let got = spectral_angle(&x, &r).map_err(|e| e.to_string())?;
        worst_sam = worst_sam.max((got - theta).abs());
        ensure((got - theta).abs() <= SAM_TOL, || {
            format!("SAM instance {i}: {got} vs {theta}")
        })?;
    }
    for (x, r, want) in [
        (vec![1.0, 1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0, 2.0], 0.0),
        (
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            std::f64::consts::FRAC_PI_2,
        ),
        (vec![1.0, 0.0], vec![1.0, 1.0], std::f64::consts::FRAC_PI_4),
    ] {
        let got = spectral_angle(&x, &r).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= SAM_TOL, || {
            format!("SAM analytic case {x:?} {r:?}: {got}")
        })?;
    }

    let mut worst_mf = 0.0f64;
    for i in 0..ORACLE_INSTANCES {
        let (w, h) = (12, 10);
        let values: Vec<f32> = (0..w * h * 4).map(|_| rng.next_f64() as f32).collect();
        let image = SceneRaster::new(w, h, 4, values).map_err(|e| e.to_string())?;
        let pixels: Vec<Vec<f64>> = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| image.pixel(r, c))
            .collect();
        let target: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
        let got = matched_filter(&image, &target, None).map_err(|e| e.to_string())?;
        let want = matched_filter_oracle(&pixels, &target);
        for (g, o) in got.scores.iter().zip(&want) {
            let err = (g - o).abs();
            worst_mf = worst_mf.max(err);
            ensure(err <= MATCHED_FILTER_TOL, || {
                format!("matched filter instance {i}: {g} vs {o}")
            })?;
        }
    }

    let mut worst_gap = 0.0f64;
    let mut worst_coarse_gap = 0.0f64;
    for i in 0..ORACLE_INSTANCES {
        let k = 2 + i % 2;
        let spectra: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..4).map(|_| rng.uniform(0.01, 1.0)).collect())
            .collect();
        let mut a: Vec<f64> = (0..k)
            .map(|_| if rng.next_f64() < 0.25 { 0.0 } else { rng.next_f64() })
            .collect();
        let s: f64 = a.iter().sum::<f64>().max(1e-9);
        a.iter_mut().for_each(|v| *v /= s);
        let x: Vec<f64> = (0..4)
            .map(|b| (0..k).map(|j| spectra[j][b] * a[j]).sum::<f64>() + 0.03 * rng.normal())
            .collect();
        let lib = EndmemberLibrary::from_spectra(spectra.clone()).map_err(|e| e.to_string())?;
        let u = unmix(&x, &lib).map_err(|e| e.to_string())?;
        let f_nnls = objective(&spectra, &u.abundances, &x);
        let (f_grid, f_coarse) = grid_oracle(&spectra, &x);
        ensure(f_nnls <= f_grid + 1e-12, || {
            format!("unmix instance {i}: nnls {f_nnls} above grid {f_grid}")
        })?;
        ensure(f_grid - f_nnls <= GRID_OBJECTIVE_TOL, || {
            format!("unmix instance {i}: grid {f_grid} vs nnls {f_nnls}")
        })?;
        ensure(f_coarse - f_nnls <= GRID_OBJECTIVE_TOL, || {
            format!("unmix instance {i}: step-{GRID_STEP} grid {f_coarse} vs nnls {f_nnls}")
        })?;
        worst_gap = worst_gap.max(f_grid - f_nnls);
        worst_coarse_gap = worst_coarse_gap.max(f_coarse - f_nnls);
    }
    let elapsed = started.elapsed().as_secs_f64();
    ensure(elapsed < ORACLE_MAX_RUNTIME_S, || format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "{ORACLE_INSTANCES} instances each; max |SAM err| {worst_sam:.1e}, max |MF err| {worst_mf:.1e}, \
         grid-nnls objective gap {worst_gap:.1e} (coarse step {worst_coarse_gap:.1e}) in {elapsed:.1} s"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = SimRng::new(303);
    let mut worst = 0.0f64;
    for i in 0..KKT_INSTANCES {
        let k = 1 + rng.below(6) as usize;
        let spectra: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..4).map(|_| rng.uniform(0.01, 1.0)).collect())
            .collect();
        let x: Vec<f64> = (0..4).map(|_| rng.uniform(-0.5, 1.5)).collect();
        let lib = EndmemberLibrary::from_spectra(spectra.clone()).map_err(|e| e.to_string())?;
        let a = unmix(&x, &lib).map_err(|e| e.to_string())?.abundances;
        let fit: Vec<f64> = (0..4).map(|b| (0..k).map(|j| spectra[j][b] * a[j]).sum()).collect();
        let resid: Vec<f64> = fit.iter().zip(&x).map(|(f, x)| f - x).collect();
        for j in 0..k {
            let g = dot(&spectra[j], &resid);
            ensure(a[j] >= 0.0, || format!("instance {i}: negative abundance {}", a[j]))?;
            if a[j] == 0.0 {
                worst = worst.max(-g);
                ensure(g >= -KKT_TOL, || format!("instance {i}: g[{j}] = {g} at a = 0"))?;
            } else {
                worst = worst.max(g.abs());
                ensure(g.abs() <= KKT_TOL, || {
                    format!("instance {i}: |g[{j}]| = {} at a > 0", g.abs())
                })?;
            }
        }
    }
    Ok(format!(
        "{KKT_INSTANCES} instances (1-6 endmembers), worst KKT violation {worst:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut rng = SimRng::new(404);
    let orbit = OrbitConfig::default();
    let mut max_excess = f64::NEG_INFINITY;
    for i in 0..SCHEDULE_DRAWS {
        let mut budgets = PhaseBudget::default();
        for v in [
            &mut budgets.acquire_s,
            &mut budgets.transfer_s,
            &mut budgets.analyze_s,
            &mut budgets.decide_s,
            &mut budgets.nadir_acquire_s,
            &mut budgets.nadir_analyze_s,
            &mut budgets.downlink_s,
        ] {
            *v = rng.uniform(0.0, 15.0);
        }
        let agility = SpacecraftAgility {
            max_rate_deg_s: rng.uniform(0.2, 5.0),
            max_accel_deg_s2: rng.uniform(0.05, 5.0),
            settle_time_s: rng.uniform(0.0, 5.0),
        };
        let angle = rng.uniform(40.0, 50.0);
        let geom = lead_time(&orbit, angle).map_err(|e| e.to_string())?;
        let command = PointingCommand {
            tile_index: Some(0),
            across_track_deg: rng.uniform(-20.0, 20.0),
            along_track_slew_deg: angle,
            fallback: false,
        };
        let margin = rng.uniform(0.0, 10.0);
        let serial = plan_cycle(&geom, &budgets, &agility, &command, false, margin);
        let overlap = plan_cycle(&geom, &budgets, &agility, &command, true, margin);
        max_excess = max_excess.max(overlap.critical_path_s - serial.critical_path_s);
        ensure(overlap.critical_path_s <= serial.critical_path_s + 1e-9, || {
            format!(
                "draw {i}: overlap {} > serial {}",
                overlap.critical_path_s, serial.critical_path_s
            )
        })?;
        for s in [&serial, &overlap] {
            let end = s
                .phases
                .iter()
                .filter(|p| p.phase.is_pre_nadir())
                .map(|p| p.end_s)
                .fold(0.0, f64::max);
            let deadline = geom.lead_time_s - margin;
            ensure(s.feasible == (end <= deadline), || {
                format!("draw {i}: feasible flag {} vs end {end}", s.feasible)
            })?;
            ensure(s.respects_precedence(), || format!("draw {i}: precedence violated"))?;
        }
        let mut spans: Vec<(f64, f64)> = serial.phases.iter().map(|p| (p.start_s, p.end_s)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        ensure(spans.windows(2).all(|w| w[0].1 <= w[1].0), || {
            format!("draw {i}: serial phases overlap")
        })?;

        let w = agility.max_rate_deg_s;
        let a = agility.max_accel_deg_s2;
        let boundary = w * w / a;
        let tri = 2.0 * (boundary / a).sqrt() + agility.settle_time_s;
        let trap = boundary / w + w / a + agility.settle_time_s;
        let at = slew_time(boundary, &agility);
        let below = slew_time(boundary * (1.0 - 1e-15), &agility);
        ensure(
            (at - tri).abs() <= CONTINUITY_TOL && (at - trap).abs() <= CONTINUITY_TOL,
            || format!("draw {i}: boundary {at} vs {tri}/{trap}"),
        )?;
        ensure((at - below).abs() <= CONTINUITY_TOL, || {
            format!("draw {i}: jump {at} vs {below}")
        })?;
    }
    let elapsed = started.elapsed().as_secs_f64();
    ensure(elapsed < SCHEDULE_MAX_RUNTIME_S, || format!("took {elapsed:.2} s"))?;
    Ok(format!(
        "{SCHEDULE_DRAWS} draws; max overlap-serial {max_excess:.2} s; flags and precedence consistent in {elapsed:.2} s"
    ))
}

fn mission_config(seed: u64, n_cycles: usize, policy: Policy) -> MissionConfig {
    let mut cfg = MissionConfig {
        seed,
        n_cycles,
        ..MissionConfig::default()
    };
    cfg.policy.name = policy;
    cfg
}

/// Truth cloud fraction of the nadir tile after pointing `across_deg`,
/// counting pixels whose centers fall inside the commanded footprint.
fn counted_cloud_fraction(cfg: &MissionConfig, seed: u64, across_deg: f64) -> f64 {
    let scene = build_scene(cfg, seed).expect("scene builds");
    let field = scene.cloud.as_ref().expect("cloud scene");
    let h = cfg.orbit.altitude_km;
    let half_fov = (0.5 * cfg.scene.tile_km() / h).atan();
    let theta = across_deg.to_radians();
    let (x0, x1) = (h * (theta - half_fov).tan(), h * (theta + half_fov).tan());
    let half_along = h * half_fov.tan() / theta.cos();
    let (origin_a, origin_x) = scene.raster.origin_km();
    let gsd = scene.raster.gsd_km();
    let (mut inside, mut cloudy) = (0usize, 0usize);
    for r in 0..scene.raster.height() {
        let ca = origin_a + (r as f64 + 0.5) * gsd;
        if ca < -half_along || ca >= half_along {
            continue;
        }
        for c in 0..scene.raster.width() {
            let cx = origin_x + (c as f64 + 0.5) * gsd;
            if cx >= x0 && cx < x1 {
                inside += 1;
                cloudy += field.is_cloudy(r, c) as usize;
            }
        }
    }
    cloudy as f64 / inside as f64
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let mut gains = Vec::new();
    for seed in 1..=MISSION_SEEDS {
        let mut cfg = mission_config(seed, MISSION_CYCLES, Policy::CloudAvoid);
        cfg.scene.coverage = MISSION_COVERAGE;
        cfg.tiles.count = MISSION_TILES;
        let records = simulate(&cfg).map_err(|e| e.to_string())?;
        ensure(records.iter().all(|r| r.status == CycleStatus::Ok), || {
            format!("seed {seed}: failed cycles")
        })?;
        let m = MissionMetrics::from_records(&records);
        ensure(m.cycles_feasible == m.cycles_total, || {
            format!("seed {seed}: {} infeasible", m.cycles_total - m.cycles_feasible)
        })?;
        if seed == 1 {
            for r in &records {
                let counted = counted_cloud_fraction(&cfg, r.seed, r.across_track_deg);
                ensure((counted - r.captured_cloud_fraction).abs() < 1e-12, || {
                    format!(
                        "cycle {} {:?}: logged {} counted {counted}",
                        r.cycle_id, r.mode, r.captured_cloud_fraction
                    )
                })?;
                ensure(r.cloud_free == (counted < cfg.policy.cloud_free_threshold), || {
                    "cloud_free flag".into()
                })?;
            }
            let dt_counted = records
                .iter()
                .filter(|r| r.mode == CycleMode::Dt && r.cloud_free)
                .count();
            ensure(
                dt_counted as f64 / MISSION_CYCLES as f64 == m.dt_cloud_free_fraction,
                || "dt fraction".into(),
            )?;
        }
        ensure(m.dt_cloud_free_fraction >= m.baseline_cloud_free_fraction, || {
            format!(
                "seed {seed}: dt {} < baseline {}",
                m.dt_cloud_free_fraction, m.baseline_cloud_free_fraction
            )
        })?;
        gains.push(m.dt_cloud_free_fraction - m.baseline_cloud_free_fraction);
    }
    let with_gain = gains.iter().filter(|&&g| g >= MIN_CLOUD_FREE_GAIN).count();
    let elapsed = started.elapsed().as_secs_f64();
    ensure(with_gain >= MIN_SEEDS_WITH_GAIN, || {
        format!("only {with_gain} seeds gain >= {MIN_CLOUD_FREE_GAIN}: {gains:?}")
    })?;
    ensure(elapsed < MISSION_MAX_RUNTIME_S, || format!("took {elapsed:.1} s"))?;
    let min = gains.iter().copied().fold(f64::INFINITY, f64::min);
    let max = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "{with_gain}/{MISSION_SEEDS} seeds gain >= {MIN_CLOUD_FREE_GAIN}; gain range [{min:.3}, {max:.3}]; \
         seed 1 matches counting oracle; {elapsed:.1} s"
    ))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for seed in 1..=THERMAL_SEEDS {
        let cfg = mission_config(seed, THERMAL_CYCLES, Policy::ThermalHunt);
        let m = MissionMetrics::from_records(&simulate(&cfg).map_err(|e| e.to_string())?);
        ensure(m.dt_hotspot_recall >= m.baseline_hotspot_recall, || {
            format!(
                "seed {seed}: dt {} < baseline {}",
                m.dt_hotspot_recall, m.baseline_hotspot_recall
            )
        })?;
        lines.push(format!("{:.2}/{:.2}", m.dt_hotspot_recall, m.baseline_hotspot_recall));
    }
    Ok(format!("dt/baseline recall per seed: {}", lines.join(" ")))
}

fn run_simulate(config: &Path, dir: &Path, tag: &str, workers: usize) -> Result<(Vec<u8>, Vec<u8>), String> {
    let log = dir.join(format!("{tag}.jsonl"));
    let metrics = dir.join(format!("{tag}.csv"));
    let status = dtsim()
        .arg("simulate")
        .arg("--config")
        .arg(config)
        .arg("--log")
        .arg(&log)
        .arg("--metrics")
        .arg(&metrics)
        .args(["--workers", &workers.to_string()])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    ensure(status.success(), || format!("simulate exited with {status}"))?;
    Ok((
        std::fs::read(&log).map_err(|e| e.to_string())?,
        std::fs::read(&metrics).map_err(|e| e.to_string())?,
    ))
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total = 0;
    for policy in ["cloud_avoid", "thermal_hunt"] {
        let config = dir.path().join(format!("{policy}.toml"));
        std::fs::write(
            &config,
            format!("seed = 77\nn_cycles = 40\n\n[policy]\nname = \"{policy}\"\n"),
        )
        .map_err(|e| e.to_string())?;
        let a = run_simulate(&config, dir.path(), &format!("{policy}_a"), 1)?;
        let b = run_simulate(&config, dir.path(), &format!("{policy}_b"), 1)?;
        let c = run_simulate(&config, dir.path(), &format!("{policy}_c"), 4)?;
        ensure(a == b, || format!("{policy}: repeat run differs"))?;
        ensure(a == c, || format!("{policy}: 1 vs 4 workers differ"))?;
        ensure(!a.0.is_empty(), || "empty log".into())?;
        total += a.0.len();
    }
    Ok(format!(
        "identical logs and metrics across repeats and 1/4 workers ({total} log bytes)"
    ))
}

fn criterion_8() -> Outcome {
    let model = ReadoutModel::default();
    let full_px = decimated_pixels(FULL_FRAME_PX, FULL_FRAME_PX, 1);
    let dec_px = decimated_pixels(FULL_FRAME_PX, FULL_FRAME_PX, DECIMATION);
    let (full_term, dec_term) = (model.pixel_term(full_px, 4), model.pixel_term(dec_px, 4));
    ensure(full_term == 16.0 * dec_term, || {
        format!("pixel term ratio {}", full_term / dec_term)
    })?;

    let scene = SceneRaster::filled(64, 48, 4, 0.3)
        .map_err(|e| e.to_string())?
        .with_geo(1.0, (0.0, 0.0))
        .unwrap();
    let fp = dyntarget::geometry::GroundFootprint {
        along_track_center_km: 24.0,
        across_track_center_km: 32.0,
        along_track_extent_km: 48.0,
        across_track_extent_km: 64.0,
    };
    let full = capture(&scene, &CaptureRequest::new(fp, 1, vec![0, 1, 2, 3])).map_err(|e| e.to_string())?;
    let dec =
        capture(&scene, &CaptureRequest::new(fp, DECIMATION as usize, vec![0, 1, 2, 3])).map_err(|e| e.to_string())?;
    ensure(full.pixels() == 16 * dec.pixels(), || {
        format!("captured {} vs {}", full.pixels(), dec.pixels())
    })?;

    let full_s = readout_time(full_px, 4, &model);
    let dec_s = readout_time(dec_px, 4, &model);
    let geom = lead_time(&OrbitConfig::default(), 45.0).map_err(|e| e.to_string())?;
    let command = PointingCommand::nadir_fallback(45.0);
    let plan = |transfer_s: f64| {
        let budgets = PhaseBudget {
            transfer_s,
            ..PhaseBudget::default()
        };
        plan_cycle(&geom, &budgets, &SpacecraftAgility::default(), &command, false, 5.0)
    };
    let (full_plan, dec_plan) = (plan(full_s), plan(dec_s));
    ensure(!full_plan.feasible, || {
        format!("full-frame serial cycle fits ({:.2} s)", full_plan.critical_path_s)
    })?;
    ensure(dec_plan.feasible, || {
        format!("decimated serial cycle misses ({:.2} s)", dec_plan.critical_path_s)
    })?;
    ensure(full_s > 10.0 && dec_s < 10.0, || {
        format!("transfer {full_s:.2} s vs {dec_s:.2} s")
    })?;
    Ok(format!(
        "pixel term ratio exactly 16; {FULL_FRAME_PX}^2 x 4 transfer {full_s:.2} s (serial cycle infeasible) \
         vs {dec_s:.2} s at decimation {DECIMATION} (feasible)"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "geometry vs published lead times", criterion_1),
        (2, "oracle equivalence", criterion_2),
        (3, "NNLS KKT", criterion_3),
        (4, "scheduling properties", criterion_4),
        (5, "cloud-avoid mission property", criterion_5),
        (6, "thermal-hunt recall", criterion_6),
        (7, "determinism", criterion_7),
        (8, "readout model", criterion_8),
    ];
    let mut failures = 0;
    for (n, name, run) in criteria {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("acceptance {n} [{name}]: PASS ({detail})"),
            Err(detail) => {
                failures += 1;
                println!("acceptance {n} [{name}]: FAIL ({detail})");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
