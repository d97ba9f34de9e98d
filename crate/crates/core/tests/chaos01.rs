//! The 0-1 test on synthetic series with known character.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use scrollforge_core::analysis::chaos01::median;
use scrollforge_core::analysis::{chaos01_k, chaos01_series, translation_series, Chaos01Config};
use scrollforge_core::*;

fn k(phi: &[f64]) -> f64 {
    chaos01_series(phi, &Chaos01Config::seeded(42)).unwrap().0
}

fn periodic() -> Vec<f64> {
    (1..=2000)
        .map(|j| (2.0 * PI * j as f64 / 7.0).cos())
        .collect()
}

#[test]
fn white_noise_scores_near_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let k = k(&phi);
    assert!(k >= 0.95, "K = {k}");
}

#[test]
fn periodic_series_scores_near_zero() {
    let k = k(&periodic());
    assert!(k <= 0.2, "K = {k}");
}

#[test]
fn quasi_rotation_scores_near_zero() {
    // Two incommensurate frequencies: regular but not periodic.
    let phi: Vec<f64> = (1..=2000)
        .map(|j| {
            let t = j as f64 * 0.25;
            (10.0 * t).sin() + 0.5 * (2f64.sqrt() * t).cos()
        })
        .collect();
    let k = k(&phi);
    assert!(k <= 0.2, "K = {k}");
}

#[test]
fn single_frequency_translation_stays_bounded() {
    let omega = 0.9;
    let phi: Vec<f64> = (1..=20_000).map(|j| (j as f64 * omega).cos()).collect();
    let (p, q) = translation_series(&phi, 1.7);
    let peak = |n: usize| {
        p[..n]
            .iter()
            .chain(&q[..n])
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    // Growth far below linear: ten times the length, well under ten times the peak.
    assert!(peak(20_000) < 2.0 * peak(2_000));
    assert!(peak(20_000) < 5.0);
}

#[test]
fn chaotic_factories_are_separated_from_regular_control() {
    let control = k(&periodic());
    for f in [FactorySystem::Example1Triple, FactorySystem::Example2Triple] {
        let sys = f.build();
        let cfg = IntegrationConfig::new(Vec3::new(0.1, 0.1, 0.1), 500.0).with_sample_every(25);
        let traj = integrate(&sys, &cfg, &sys.region_scheme()).unwrap();
        let (kf, per_c) = chaos01_k(&traj, &Chaos01Config::seeded(42)).unwrap();
        assert_eq!(per_c.len(), 100);
        assert!(kf - control > 0.5, "{}: {kf} vs {control}", f.name());
    }
}

#[test]
fn median_is_robust_to_dropping_one_c() {
    let sys = build_example1_triple();
    let cfg = IntegrationConfig::new(Vec3::ZERO, 500.0).with_sample_every(25);
    let traj = integrate(&sys, &cfg, &sys.region_scheme()).unwrap();
    let (km, per_c) = chaos01_k(&traj, &Chaos01Config::seeded(42)).unwrap();
    let ks: Vec<f64> = per_c.iter().map(|&(_, k)| k).collect();
    assert_eq!(median(&ks), km);
    for i in 0..ks.len() {
        let mut rest = ks.clone();
        rest.remove(i);
        assert!((median(&rest) - km).abs() < 0.05);
    }
}

#[test]
fn per_c_values_are_sorted_and_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let phi: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let cfg = Chaos01Config::seeded(1);
    let mut reversed = cfg.clone();
    reversed.c_values.reverse();
    let a = chaos01_series(&phi, &cfg).unwrap();
    let b = chaos01_series(&phi, &reversed).unwrap();
    assert_eq!(a, b);
    assert!(a.1.windows(2).all(|w| w[0].0 <= w[1].0));
}
