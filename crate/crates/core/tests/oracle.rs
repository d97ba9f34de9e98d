//! Integrator against the closed-form subsystem solution.

use proptest::prelude::*;
use scrollforge_core::*;

fn rk4(sys: &PwlSystem, x0: Vec3, h: f64, t: f64) -> Vec3 {
    let steps = (t / h).round() as usize;
    let mut x = x0;
    for _ in 0..steps {
        x = rk4_step(sys, &x, h).unwrap();
    }
    x
}

fn params() -> impl Strategy<Value = SubsystemParams> {
    (
        -1.0..1.0f64,
        -20.0..20.0f64,
        -1.0..1.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -6.0..6.0f64,
    )
        .prop_map(|(m, n, eta, k1, k2, v)| SubsystemParams {
            m,
            n,
            eta,
            k1,
            k2,
            v,
        })
}

fn state() -> impl Strategy<Value = Vec3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_rk4_up_to_one_second(p in params(), x0 in state(), t in 0.05..1.0f64) {
        let t = (t * 1e4).round() / 1e4;
        let exact = subsystem_solution(&p, &x0, t);
        let num = rk4(&p.to_system(), x0, 1e-4, t);
        for i in 0..3 {
            prop_assert!((exact[i] - num[i]).abs() < 1e-5, "component {i}: {} vs {}", exact[i], num[i]);
        }
    }

    #[test]
    fn rotation_centre_stays_fixed(p in params(), x3 in -2.0..2.0f64, t in 0.0..5.0f64) {
        let p = SubsystemParams { eta: 0.0, ..p };
        let x = subsystem_solution(&p, &Vec3::new(-p.k1, -p.k2, x3), t);
        prop_assert!((x.x1() + p.k1).abs() < 1e-12);
        prop_assert!((x.x2() + p.k2).abs() < 1e-12);
        prop_assert!((x.x3() - (x3 + p.v * t)).abs() < 1e-12);
    }

    #[test]
    fn contracting_axis_approaches_limit_monotonically(
        eta in -1.0..-0.005f64,
        v in -6.0..-0.1f64,
        x3 in -1.0..3.0f64,
    ) {
        let p = SubsystemParams { m: 0.5, n: 10.0, eta, k1: 0.0, k2: 0.0, v };
        let limit = p.axial_limit().unwrap();
        prop_assert_eq!(limit, -v / eta);
        let mut prev = (x3 - limit).abs();
        for i in 1..=50 {
            let gap = (p.axial(x3, i as f64 * 0.5) - limit).abs();
            prop_assert!(gap < prev || gap == 0.0, "gap {gap} not below {prev}");
            prev = gap;
        }
    }
}

/// Recovers `(k1, k2, v)` of a spiral piece from its affine offset.
fn piece_params(piece: &AffinePiece) -> SubsystemParams {
    let a = piece.a_matrix;
    let (m, n, eta) = (a.get(0, 0), a.get(1, 0), a.get(2, 2));
    let b = piece.b_vector;
    // [[m, -n], [n, m]] (k1, k2) = (b1, b2)
    let det = m * m + n * n;
    let k1 = (m * b.x1() + n * b.x2()) / det;
    let k2 = (-n * b.x1() + m * b.x2()) / det;
    SubsystemParams {
        m,
        n,
        eta,
        k1,
        k2,
        v: b.x3(),
    }
}

#[test]
fn factory_pieces_match_closed_form_inside_one_region() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for f in FactorySystem::ALL {
        let sys = f.build();
        let mut checked = 0;
        while checked < 30 {
            let x0 = Vec3::new(
                rng.random_range(-1.5..3.5),
                rng.random_range(-1.5..1.5),
                rng.random_range(-0.5..4.5),
            );
            let piece = sys.piece_index_at(&x0).unwrap();
            let params = piece_params(&sys.pieces()[piece]);
            let h = 1e-4;
            let mut x = x0;
            let mut same = true;
            for i in 1..=1000 {
                x = rk4_step(&sys, &x, h).unwrap();
                let exact = subsystem_solution(&params, &x0, i as f64 * h);
                same &= sys.piece_index_at(&x) == Some(piece)
                    && sys.piece_index_at(&exact) == Some(piece);
            }
            if !same {
                continue;
            }
            let exact = subsystem_solution(&params, &x0, 0.1);
            assert!(
                (exact - x).max_abs() < 1e-6,
                "{} piece {piece}: {exact} vs {x}",
                f.name()
            );
            checked += 1;
        }
    }
}

#[test]
fn rk4_is_exact_on_constant_fields_and_fourth_order_on_linear() {
    let p = SubsystemParams {
        m: 0.5,
        n: 10.0,
        eta: 0.0,
        k1: 0.0,
        k2: 0.0,
        v: 5.0,
    };
    let sys = p.to_system();
    let x0 = Vec3::new(1.0, 0.0, 0.0);
    let err = |h: f64| (rk4(&sys, x0, h, 0.2) - subsystem_solution(&p, &x0, 0.2)).max_abs();
    let ratio = err(0.01) / err(0.005);
    assert!((14.0..18.0).contains(&ratio), "halving ratio {ratio}");
}
