//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mdist::{cmd_compute, cmd_map, cmd_simulate, ComputeArgs, MapArgs, SimulateArgs, SummaryReport};
use motion_distortion::case_study::{self, HUSKY_SNOW_MEDIAN, HUSKY_TILE_MEDIAN};
use motion_distortion::ingest::{
    body_velocity_from_poses, read_commands, read_poses, read_velocities, write_commands, write_poses, write_velocities,
    FiniteDifference, PoseSample,
};
use motion_distortion::metrics::{mann_whitney, median_ratio, TestMethod};
use motion_distortion::{ideal_diff_drive, kinetic_energy, DistortionSeries, VehicleSpec, WheelCommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario(dir: &Path, name: &str, profile: &str, duration: f64, extra: &str) -> PathBuf {
    let text = format!(
        r#"name = "{name}"
terrain = "gravel"
profile = "{profile}"
duration = {duration:?}
dt = 0.05
seed = 11

[vehicle]
name = "husky"
wheel_radius = 0.165
track_width = 0.555
mass = 75.0
v_max = 1.0
{extra}
"#
    );
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, text).unwrap();
    path
}

fn simulate(dir: &Path, scenario: &Path, out: &str) -> PathBuf {
    let out = dir.join(out);
    cmd_simulate(&SimulateArgs { scenario: scenario.into(), out: out.clone(), seed: None }).unwrap();
    out
}

fn compute(dataset: &Path, out: &Path) -> mdist::ComputeOutput {
    cmd_compute(&ComputeArgs {
        dataset: dataset.into(),
        out: out.into(),
        grid_dt: 0.05,
        max_gap: 0.2,
        angular_weight: 1.0,
        stride: 1,
        from_poses: false,
        terrain_scale: None,
    })
    .unwrap()
}

fn series(path: &Path) -> DistortionSeries<f64> {
    DistortionSeries::read_csv("s", fs::File::open(path).unwrap()).unwrap()
}

fn simulated_median(dir: &Path, name: &str, profile: &str, duration: f64, extra: &str) -> SummaryReport {
    let sc = scenario(dir, name, profile, duration, extra);
    let ds = simulate(dir, &sc, name);
    compute(&ds, &dir.join("out")).report
}

fn kinetic_energy_constants() -> Outcome {
    let h = kinetic_energy(&case_study::husky());
    let w = kinetic_energy(&case_study::warthog());
    check(h == 37.5, || format!("Husky {h} J"))?;
    check(w == 5875.0, || format!("Warthog {w} J"))?;
    Ok(format!("Husky {h} J, Warthog {w} J"))
}

fn ratio_fixtures() -> Outcome {
    let ratio = median_ratio(HUSKY_TILE_MEDIAN, HUSKY_SNOW_MEDIAN).value().unwrap();
    check((ratio - 1.608).abs() <= 0.01, || format!("snow/tile ratio {ratio}"))?;
    check((ratio - case_study::SNOW_OVER_TILE).abs() <= 0.01, || format!("ratio {ratio} vs stated 1.6"))?;
    let ice = case_study::warthog_ice_median();
    let gravel = case_study::warthog_gravel_median();
    let f1 = ice / HUSKY_SNOW_MEDIAN;
    let f2 = ice / gravel;
    check((f1 - 3.6).abs() < 1e-12, || format!("ice/snow factor {f1}"))?;
    check((f2 - 0.95).abs() < 1e-12, || format!("ice/gravel factor {f2}"))?;
    let mass = case_study::WARTHOG_MASS / case_study::HUSKY_MASS;
    let speed = case_study::WARTHOG_V_MAX / case_study::HUSKY_V_MAX;
    check((mass - case_study::REPORTED_MASS_FACTOR).abs() < 0.1, || format!("mass factor {mass}"))?;
    check(speed == case_study::REPORTED_SPEED_FACTOR, || format!("speed factor {speed}"))?;
    Ok(format!(
        "snow/tile {ratio:.4}, ice/snow {f1}, ice/gravel {f2}, mass x{mass:.3}, speed x{speed} (consistency fixtures, not reproductions)"
    ))
}

fn identity_oracle(dir: &Path) -> Outcome {
    let start = Instant::now();
    let r = simulated_median(dir, "identity", "mixed", 60.0, "");
    let elapsed = start.elapsed();
    check(r.stats.median < 1e-9, || format!("median {:e}", r.stats.median))?;
    check(r.stats.n == 1200, || format!("{} steps", r.stats.n))?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("median {:e} over {} steps in {elapsed:.2?}", r.stats.median, r.stats.n))
}

fn known_slip_recovery(dir: &Path) -> Outcome {
    let start = Instant::now();
    let steady = "[profile_params]\nstep_time = 0.0\n";
    let mut medians = Vec::new();
    for s in [0.05, 0.1, 0.2, 0.4] {
        let extra = format!("{steady}[slip]\nlon_slip = {s:?}\n");
        let r = simulated_median(dir, &format!("slip_{s}"), "step", 30.0, &extra);
        medians.push((s, r.stats.median));
    }
    let m02 = medians[2].1;
    check((m02 - 0.2).abs() <= 1e-4, || format!("s=0.2 median {m02}"))?;
    check(medians.windows(2).all(|w| w[1].1 > w[0].1), || format!("not increasing: {medians:?}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    let list: Vec<String> = medians.iter().map(|(s, m)| format!("{s}->{m:.6}")).collect();
    Ok(format!("{} in {elapsed:.2?}", list.join(", ")))
}

fn matrix_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (r, b) = (rng.random_range(0.05..1.0), rng.random_range(0.2..3.0));
        let (wl, wr) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let spec = VehicleSpec::new("v", r, b, 1.0, 1.0).unwrap();
        let f = ideal_diff_drive(&WheelCommand::new(0.0, wl, wr).unwrap(), &spec);
        let m = [[r / 2.0, r / 2.0], [0.0, 0.0], [-r / b, r / b]];
        let o: Vec<f64> = m.iter().map(|row| row[0] * wl + row[1] * wr).collect();
        for (got, want) in [f.vx, f.vy, f.omega].iter().zip(&o) {
            worst = worst.max((got - want).abs());
        }
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 commands, max deviation {worst:e}"))
}

/// Two-sided p by enumerating every assignment of the pooled ranks.
fn brute_force_p(na: usize, nb: usize, observed_u: u32) -> f64 {
    let n = na + nb;
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        // U_a counts (a, b) pairs with the a element ranked higher
        let mut u = 0;
        let mut bs_below = 0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                u += bs_below;
            } else {
                bs_below += 1;
            }
        }
        total += 1;
        le += (u <= observed_u) as u64;
        ge += (u >= observed_u) as u64;
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

fn mann_whitney_exactness() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for na in 1..=5usize {
        for nb in 1..=5usize {
            let n = na + nb;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != na {
                    continue;
                }
                let a: Vec<f64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i as f64).collect();
                let b: Vec<f64> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| i as f64).collect();
                let r = mann_whitney(&a, &b).unwrap();
                let u = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum::<usize>() as u32;
                let want = brute_force_p(na, nb, u);
                check(r.u_statistic == u as f64, || format!("{a:?} vs {b:?}: U {} != {u}", r.u_statistic))?;
                check(r.method == TestMethod::Exact && r.p_value == want, || {
                    format!("{a:?} vs {b:?}: p {} != {want}", r.p_value)
                })?;
                cases += 1;
            }
        }
    }
    let r = mann_whitney(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]).unwrap();
    check(r.p_value == 0.1, || format!("[1,2,3] vs [10,11,12]: p {}", r.p_value))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} configurations exact, separated triples p = {}, {elapsed:.2?}", r.p_value))
}

fn circle(yaw0: f64, seconds: f64) -> Vec<PoseSample<f64>> {
    let (radius, w, dt) = (2.0, 0.5, 0.01);
    let n = (seconds / dt) as usize;
    (0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            let yaw = yaw0 + w * t;
            // centre chosen so the vehicle starts at the origin
            let (cx, cy) = (-radius * yaw0.sin(), radius * yaw0.cos());
            PoseSample::new(t, cx + radius * yaw.sin(), cy - radius * yaw.cos(), yaw).unwrap()
        })
        .collect()
}

fn finite_difference_accuracy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut crossed = false;
    for (yaw0, seconds) in [(0.0, 10.0), (2.9, 4.0), (-0.5, 20.0)] {
        let poses = circle(yaw0, seconds);
        crossed |= poses.windows(2).any(|w| (w[1].yaw - w[0].yaw).abs() > 6.0);
        for scheme in [FiniteDifference::Se2, FiniteDifference::Chord] {
            let v = body_velocity_from_poses(&poses, scheme).unwrap();
            for s in &v[1..v.len() - 1] {
                let e = (s.velocity.vx - 1.0).abs().max(s.velocity.vy.abs()).max((s.velocity.omega - 0.5).abs());
                worst = worst.max(e);
            }
        }
    }
    check(crossed, || "no run crossed the yaw seam".into())?;
    check(worst <= 1e-3, || format!("max error {worst:e}"))?;
    Ok(format!("max interior error {worst:e}, seam crossed"))
}

fn first_order_lag(dir: &Path) -> Outcome {
    let step = "[profile_params]\nstep_time = 0.0\n";
    let sc = scenario(dir, "lag", "step", 10.0, &format!("{step}[slip]\ntau = 1.0\n"));
    let ds = simulate(dir, &sc, "lag");
    let out = compute(&ds, &dir.join("out"));
    let s = series(&out.series);
    let worst = s
        .times()
        .iter()
        .zip(s.modulus())
        .map(|(t, m)| (m - (-t).exp()).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-3, || format!("step response off by {worst:e}"))?;

    // equal steady-state slip, very different transients
    let mut medians = Vec::new();
    for tau in [0.0, 2.0] {
        let extra = format!("{step}[slip]\nlon_slip = 0.2\ntau = {tau:?}\n");
        let r = simulated_median(dir, &format!("blind_{tau}"), "step", 60.0, &extra);
        let s = series(&dir.join("out").join(format!("blind_{tau}.distortion.csv")));
        let mut steady: Vec<f64> =
            s.times().iter().zip(s.modulus()).filter(|(t, _)| **t >= 20.0).map(|(_, m)| *m).collect();
        steady.sort_by(f64::total_cmp);
        medians.push((r.stats.median, steady[steady.len() / 2]));
    }
    let rel = |a: f64, b: f64| (b - a).abs() / a;
    let whole = rel(medians[0].0, medians[1].0);
    let steady = rel(medians[0].1, medians[1].1);
    check(steady <= 0.15 && whole <= 0.15, || format!("medians {medians:?} not within 15%"))?;
    Ok(format!(
        "e^-t within {worst:e}; run medians tau=0 {:.4}, tau=2 {:.4} ({:.2}% apart), steady segment {:.2}% apart",
        medians[0].0,
        medians[1].0,
        100.0 * whole,
        100.0 * steady
    ))
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn marker_ys(svg: &str) -> Vec<(String, f64)> {
    svg.split(r#"<g class="marker" transform="translate("#)
        .skip(1)
        .map(|chunk| {
            let coords = &chunk[..chunk.find(')').unwrap()];
            let y: f64 = coords.split(',').nth(1).unwrap().trim().parse().unwrap();
            let title = &chunk[chunk.find("<title>").unwrap() + 7..chunk.find("</title>").unwrap()];
            (title.to_string(), y)
        })
        .collect()
}

fn determinism_and_formats(dir: &Path) -> Outcome {
    let extra = "[slip]\nlon_slip = 0.1\nlat_coupling = 0.05\ntau = 0.5\nnoise_sigma = 0.02\n";
    let sc = scenario(dir, "det", "random_walk", 20.0, extra);
    let a = simulate(dir, &sc, "det_a");
    let b = simulate(dir, &sc, "det_b");
    check(files_in(&a) == files_in(&b), || "simulate outputs differ".into())?;
    let (oa, ob) = (dir.join("det_out_a"), dir.join("det_out_b"));
    compute(&a, &oa);
    compute(&b, &ob);
    check(files_in(&oa) == files_in(&ob), || "compute outputs differ".into())?;

    let bytes = |p: PathBuf| fs::read(p).unwrap();
    let cmds = bytes(a.join("commands.csv"));
    let mut again = Vec::new();
    write_commands(&mut again, &read_commands::<f64, _>(cmds.as_slice()).unwrap()).unwrap();
    check(again == cmds, || "commands.csv round trip changed bytes".into())?;
    let poses = bytes(a.join("poses.csv"));
    again.clear();
    write_poses(&mut again, &read_poses::<f64, _>(poses.as_slice()).unwrap()).unwrap();
    check(again == poses, || "poses.csv round trip changed bytes".into())?;
    let vels = bytes(a.join("velocities.csv"));
    again.clear();
    write_velocities(&mut again, &read_velocities::<f64, _>(vels.as_slice()).unwrap()).unwrap();
    check(again == vels, || "velocities.csv round trip changed bytes".into())?;
    let ser = bytes(oa.join("det.distortion.csv"));
    again.clear();
    DistortionSeries::<f64>::read_csv("det", ser.as_slice()).unwrap().write_csv(&mut again).unwrap();
    check(again == ser, || "series round trip changed bytes".into())?;

    let catalog = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/case_study_catalog.csv");
    let (ma, mb) = (dir.join("map_a"), dir.join("map_b"));
    for out in [&ma, &mb] {
        cmd_map(&MapArgs { catalog: catalog.clone(), terrain_scale: None, out: out.clone() }).unwrap();
    }
    check(files_in(&ma) == files_in(&mb), || "map outputs differ".into())?;
    let svg = fs::read_to_string(ma.join("map.svg")).unwrap();
    let ys = marker_ys(&svg);
    check(ys.len() == 4, || format!("{} markers", ys.len()))?;
    let ke = |label: &str| if label.starts_with("Warthog") { 5875.0 } else { 37.5 };
    for (la, ya) in &ys {
        for (lb, yb) in &ys {
            if ke(la) > ke(lb) {
                check(ya < yb, || format!("{la} (y={ya}) not above {lb} (y={yb})"))?;
            }
        }
    }
    Ok("simulate/compute/map byte-identical, 4 CSV round trips stable, Warthog markers above Husky".into())
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let criteria: Vec<Criterion> = vec![
        ("kinetic-energy constants", Box::new(kinetic_energy_constants)),
        ("case-study ratio fixtures", Box::new(ratio_fixtures)),
        ("identity oracle", Box::new(|| identity_oracle(dir))),
        ("known-slip recovery", Box::new(|| known_slip_recovery(dir))),
        ("matrix oracle equivalence", Box::new(matrix_oracle)),
        ("Mann-Whitney exactness", Box::new(mann_whitney_exactness)),
        ("finite-difference accuracy", Box::new(finite_difference_accuracy)),
        ("first-order lag response", Box::new(|| first_order_lag(dir))),
        ("determinism and formats", Box::new(|| determinism_and_formats(dir))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("acceptance {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
