use motion_distortion::ingest::{
    align, body_velocity_from_poses, AlignOptions, DatasetMeta, FiniteDifference, PoseSample, TimedVelocity,
};
use motion_distortion::mapping::default_terrain_scale;
use motion_distortion::{BodyVelocity, VehicleSpec, WheelCommand};
use proptest::prelude::*;

fn meta() -> DatasetMeta<f64> {
    DatasetMeta {
        name: "p".into(),
        vehicle: VehicleSpec::new("v", 0.2, 0.6, 40.0, 1.5).unwrap(),
        terrain: default_terrain_scale().lookup("grass").unwrap().clone(),
    }
}

/// Exact pose after driving a constant forward speed and yaw rate.
fn arc_pose(t: f64, v: f64, w: f64, x0: f64, y0: f64, yaw0: f64) -> PoseSample<f64> {
    let (x, y) = if w.abs() < 1e-12 {
        (x0 + v * t * yaw0.cos(), y0 + v * t * yaw0.sin())
    } else {
        let r = v / w;
        (
            x0 + r * ((yaw0 + w * t).sin() - yaw0.sin()),
            y0 - r * ((yaw0 + w * t).cos() - yaw0.cos()),
        )
    };
    PoseSample::new(t, x, y, yaw0 + w * t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_twist_recovered_exactly(v in -2.0..2.0f64, w in -2.0..2.0f64, yaw0 in -3.1..3.1f64,
                                        dt in 0.005..0.1f64, n in 3usize..300) {
        let poses: Vec<_> = (0..n).map(|i| arc_pose(i as f64 * dt, v, w, 1.0, -2.0, yaw0)).collect();
        for s in body_velocity_from_poses(&poses, FiniteDifference::Se2).unwrap() {
            prop_assert!((s.velocity.vx - v).abs() <= 1e-9, "{:?}", s);
            prop_assert!(s.velocity.vy.abs() <= 1e-9);
            prop_assert!((s.velocity.omega - w).abs() <= 1e-9);
        }
    }

    #[test]
    fn alignment_never_extrapolates(c0 in 0.0..5.0f64, c_len in 0.5..20.0f64, v0 in 0.0..5.0f64, v_len in 0.5..20.0f64,
                                    c_dt in 0.01..0.2f64, v_dt in 0.005..0.1f64, grid_dt in 0.01..0.2f64) {
        let cmds: Vec<_> = (0..=(c_len / c_dt) as usize)
            .map(|i| WheelCommand { t: c0 + i as f64 * c_dt, omega_l: i as f64, omega_r: -(i as f64) })
            .collect();
        let vels: Vec<_> = (0..=(v_len / v_dt) as usize)
            .map(|i| TimedVelocity { t: v0 + i as f64 * v_dt, velocity: BodyVelocity { vx: i as f64, vy: 0.0, omega: 1.0 } })
            .collect();
        let opts = AlignOptions { grid_dt, max_gap: grid_dt.max(c_dt).max(v_dt) };
        if let Ok(ds) = align(meta(), &cmds, &vels, opts) {
            prop_assert_eq!(ds.commands().len(), ds.velocities().len());
            for (c, v) in ds.commands().iter().zip(ds.velocities()) {
                prop_assert_eq!(c.t, v.t);
                prop_assert!(c.t >= cmds[0].t && c.t <= cmds.last().unwrap().t);
                prop_assert!(c.t >= vels[0].t && c.t <= vels.last().unwrap().t);
            }
        }
    }

    #[test]
    fn resampling_at_source_times_is_identity(vals in prop::collection::vec(-10.0..10.0f64, 2..60), dt in 0.01..0.5f64) {
        // both streams share the grid's own timestamps
        let cmds: Vec<_> = vals.iter().enumerate()
            .map(|(i, &x)| WheelCommand { t: i as f64 * dt, omega_l: x, omega_r: 2.0 * x })
            .collect();
        let vels: Vec<_> = vals.iter().enumerate()
            .map(|(i, &x)| TimedVelocity { t: i as f64 * dt, velocity: BodyVelocity { vx: x, vy: -x, omega: 0.5 * x } })
            .collect();
        let ds = align(meta(), &cmds, &vels, AlignOptions { grid_dt: dt, max_gap: dt }).unwrap();
        prop_assert_eq!(ds.len(), vals.len());
        for (k, (c, v)) in ds.pairs().enumerate() {
            prop_assert!((c.omega_l - vals[k]).abs() <= 1e-12);
            prop_assert!((c.omega_r - 2.0 * vals[k]).abs() <= 1e-12);
            prop_assert!((v.vx - vals[k]).abs() <= 1e-12);
        }
    }
}

#[test]
fn fine_resample_then_subsample_reproduces_originals() {
    let cmds: Vec<_> = (0..50)
        .map(|i| WheelCommand { t: i as f64 * 0.1, omega_l: (i as f64 * 0.37).sin(), omega_r: (i as f64).sqrt() })
        .collect();
    let vels: Vec<_> = (0..50)
        .map(|i| TimedVelocity { t: i as f64 * 0.1, velocity: BodyVelocity { vx: (i as f64 * 0.2).cos(), vy: 0.0, omega: 0.1 } })
        .collect();
    let ds = align(meta(), &cmds, &vels, AlignOptions { grid_dt: 0.02, max_gap: 0.1 }).unwrap();
    for c in &cmds {
        let hit = ds.commands().iter().find(|g| (g.t - c.t).abs() < 1e-9).unwrap();
        assert!((hit.omega_l - c.omega_l).abs() <= 1e-12);
        assert!((hit.omega_r - c.omega_r).abs() <= 1e-12);
    }
}
