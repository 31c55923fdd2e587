use motion_distortion::ingest::{align, body_velocity_from_poses, AlignOptions, DatasetMeta, FiniteDifference};
use motion_distortion::mapping::default_terrain_scale;
use motion_distortion::metrics::{distortion_series, summarize};
use motion_distortion::sim::{apply_slip, generate_commands, Profile, ProfileParams, SlipModel};
use motion_distortion::{AngularWeight, VehicleSpec};

fn spec() -> VehicleSpec<f64> {
    VehicleSpec::new("sim", 0.165, 0.555, 75.0, 1.0).unwrap()
}

fn median_for(model: &SlipModel<f64>, profile: Profile) -> f64 {
    let cmds = generate_commands(profile, &ProfileParams::default(), 30.0, 0.02, &spec(), 5).unwrap();
    let out = apply_slip(&cmds, &spec(), model, 6).unwrap();
    let meta = DatasetMeta {
        name: "s".into(),
        vehicle: spec(),
        terrain: default_terrain_scale().lookup("gravel").unwrap().clone(),
    };
    let ds = align(meta, &cmds, &out.velocities, AlignOptions::default()).unwrap();
    summarize(&distortion_series(&ds, AngularWeight::default()).unwrap()).unwrap().median
}

#[test]
fn median_grows_with_longitudinal_slip() {
    let mut last = -1.0;
    for s in [0.0, 0.05, 0.1, 0.2, 0.4, 0.8] {
        let m = median_for(&SlipModel { lon_slip: s, ..SlipModel::identity() }, Profile::Sine);
        assert!(m > last, "s={s}: {m} <= {last}");
        last = m;
    }
}

#[test]
fn median_grows_with_noise() {
    let mut last = -1.0;
    for sigma in [0.0, 0.01, 0.05, 0.2] {
        let m = median_for(&SlipModel { noise_sigma: sigma, ..SlipModel::identity() }, Profile::RandomWalk);
        assert!(m > last);
        last = m;
    }
}

#[test]
fn simulated_poses_recover_simulated_velocities() {
    let cmds = generate_commands(Profile::Sine, &ProfileParams::default(), 20.0, 0.01, &spec(), 1).unwrap();
    let model = SlipModel { lon_slip: 0.1, lat_coupling: 0.05, ..SlipModel::identity() };
    let out = apply_slip(&cmds, &spec(), &model, 2).unwrap();
    let est = body_velocity_from_poses(&out.poses, FiniteDifference::Se2).unwrap();
    // interior samples only, the endpoints are one-sided
    for (e, v) in est.iter().zip(&out.velocities).skip(1).take(est.len() - 2) {
        assert!((e.velocity.vx - v.velocity.vx).abs() < 5e-3);
        assert!((e.velocity.omega - v.velocity.omega).abs() < 5e-3);
    }
}

#[test]
fn generator_is_reproducible() {
    for p in [Profile::Ramp, Profile::Step, Profile::Sine, Profile::RandomWalk, Profile::Square, Profile::Mixed] {
        let a = generate_commands(p, &ProfileParams::default(), 10.0, 0.05, &spec(), 9).unwrap();
        let b = generate_commands(p, &ProfileParams::default(), 10.0, 0.05, &spec(), 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
        let m = SlipModel { noise_sigma: 0.1, ..SlipModel::identity() };
        assert_eq!(apply_slip(&a, &spec(), &m, 3).unwrap().poses, apply_slip(&b, &spec(), &m, 3).unwrap().poses);
    }
}
