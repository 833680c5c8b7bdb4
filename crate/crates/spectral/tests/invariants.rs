use gevrey_spectral::{
    evolve, radius_fit, read_trajectory, spectral_profile, write_trajectory, Grid, SolverConfig,
    SpectralField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

fn kp_run(nx: usize, ny: usize, t_end: f64) -> gevrey_spectral::Trajectory {
    let g = Grid::periodic(nx, ny).unwrap();
    let f = spectral_profile(1.0, 1.0, 1.0, g).unwrap();
    let c = SolverConfig {
        dt: 1e-4,
        t_end,
        snapshot_every: 100,
        ..SolverConfig::default()
    };
    evolve(&f, &c).unwrap()
}

#[test]
fn l2_is_conserved_and_mean_stays_zero() {
    let t = kp_run(128, 64, 0.1);
    let l2 = t.l2_series();
    let drift = l2
        .iter()
        .map(|v| (v - l2[0]).abs() / l2[0])
        .fold(0.0, f64::max);
    assert!(drift <= 1e-6, "relative L2 drift {drift:e}");
    assert!(
        t.max_mean_residual() <= 1e-12,
        "{:e}",
        t.max_mean_residual()
    );
    assert_eq!(t.times.len(), 11);
}

#[test]
fn radius_persists() {
    let t = kp_run(128, 64, 0.1);
    let d0 = radius_fit(&t.snapshots[0], 1.0).unwrap().delta_hat;
    assert!((d0 - 1.0).abs() < 1e-6);
    for s in &t.snapshots {
        let d = radius_fit(s, 1.0).unwrap().delta_hat;
        assert!(d > 0.5 * d0, "delta_hat {d}");
    }
}

#[test]
fn grid_refinement_moves_radius_little() {
    let coarse = kp_run(64, 64, 0.02);
    let fine = kp_run(128, 64, 0.02);
    let a = radius_fit(coarse.last(), 1.0).unwrap().delta_hat;
    let b = radius_fit(fine.last(), 1.0).unwrap().delta_hat;
    assert!((a - b).abs() <= 0.01 * b, "{a} vs {b}");
}

#[test]
fn linear_flow_is_reversible() {
    let g = Grid::periodic(64, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut f = SpectralField::from_fn(g, |kx, ky| {
        let decay = (-0.3 * (kx.abs() + ky.abs()) as f64).exp();
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay
    });
    f.enforce_hermitian();
    f.enforce_zero_mean();
    let fwd = SolverConfig {
        dt: 1e-3,
        t_end: 0.2,
        alpha_c: 0.7,
        nonlinear: false,
        snapshot_every: 1000,
        ..SolverConfig::default()
    };
    let there = evolve(&f, &fwd).unwrap();
    let back = SolverConfig { t_end: -0.2, ..fwd };
    let home = evolve(there.last(), &back).unwrap();
    let err = home
        .last()
        .modes()
        .iter()
        .zip(f.modes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err:e}");
    assert!((home.times.last().unwrap() + 0.2).abs() < 1e-12);
}

#[test]
fn trajectory_files_round_trip() {
    let t = kp_run(32, 16, 0.002);
    let dir = tempfile::tempdir().unwrap();
    let index = write_trajectory(dir.path(), "run", &t).unwrap();
    let back = read_trajectory(&index).unwrap();
    assert_eq!(back.times, t.times);
    assert_eq!(back.config, t.config);
    for (a, b) in t.snapshots.iter().zip(&back.snapshots) {
        let err = a
            .modes()
            .iter()
            .zip(b.modes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-7 * a.max_abs());
    }
    assert!(dir.path().join("run_00000.json").exists());
}
