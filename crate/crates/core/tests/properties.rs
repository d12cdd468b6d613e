use liemax::catalog::{self, GroupBundle};
use liemax::exec::Execution;
use liemax::flows::{fmt17, left_flow, right_flow, FlowConfig};
use liemax::lie::{momentum_maps, AlgebraVector, Covector, GroupPoint};
use liemax::maxwell::parse_p_grid;
use liemax::symmetry::{group_s, verify_candidate, Case, Direction, Verdict, VerifiedSymmetry};
use proptest::prelude::*;

const GROUPS: &[&str] = &["heisenberg3", "se2", "sh2", "so3", "engel4"];

fn bundle(i: usize) -> GroupBundle {
    catalog::builtin(GROUPS[i % GROUPS.len()]).unwrap()
}

fn vec4(r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, 4)
}

fn take(v: &[f64], n: usize) -> AlgebraVector {
    AlgebraVector::new(&v[..n])
}

fn verified(b: &GroupBundle, name: &str) -> VerifiedSymmetry {
    let c = b.symmetry(name).unwrap();
    match verify_candidate(b.algebra(), c, b.hamiltonian("sr").unwrap(), 100, 0).unwrap().0 {
        Verdict::Verified(v) => v,
        Verdict::Rejected => panic!("{name} rejected"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(gi in 0usize..5, x in vec4(2.0), y in vec4(2.0), z in vec4(2.0)) {
        let b = bundle(gi);
        let a = b.algebra();
        let n = a.dim();
        let (x, y, z) = (take(&x, n), take(&y, n), take(&z, n));
        let xy = a.bracket(&x, &y).unwrap();
        let yx = a.bracket(&y, &x).unwrap();
        prop_assert!((&xy + &yx).norm() < 1e-12);
        let j = &(&a.bracket(&x, &a.bracket(&y, &z).unwrap()).unwrap()
            + &a.bracket(&y, &a.bracket(&z, &x).unwrap()).unwrap())
            + &a.bracket(&z, &xy).unwrap();
        prop_assert!(j.norm() < 1e-11, "jacobi {}", j.norm());
    }

    #[test]
    fn ad_star_is_the_pairing_with_the_bracket(gi in 0usize..5, x in vec4(2.0), y in vec4(2.0), p in vec4(2.0)) {
        let b = bundle(gi);
        let a = b.algebra();
        let n = a.dim();
        let (x, y, p) = (take(&x, n), take(&y, n), Covector::new(&p[..n]));
        let lhs = a.ad_star(&x, &p).unwrap().pair(&y);
        let rhs = p.pair(&a.bracket(&x, &y).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn coadjoint_action_respects_products(gi in 0usize..5, x in vec4(0.8), y in vec4(0.8), p in vec4(2.0)) {
        let b = bundle(gi);
        let a = b.algebra();
        let n = a.dim();
        let g = a.group_exp(&take(&x, n)).unwrap();
        let h = a.group_exp(&take(&y, n)).unwrap();
        let p = Covector::new(&p[..n]);
        // Pullback convention: Ad*_{gh} = Ad*_h ∘ Ad*_g.
        let lhs = a.group_ad_star(&(&g * &h), &p).unwrap();
        let rhs = a.group_ad_star(&h, &a.group_ad_star(&g, &p).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-10, "{}", lhs.distance(&rhs));
    }

    #[test]
    fn se2_group_map_is_a_homomorphism_or_anti(si in 0usize..8, x in vec4(1.5), y in vec4(1.5)) {
        let b = catalog::builtin("se2").unwrap();
        let a = b.algebra();
        let names = ["identity", "sigma1", "sigma2", "sigma3", "eps_translation", "eps_central", "eps_line_y", "eps_line_x"];
        let v = verified(&b, names[si]);
        let g = a.group_exp(&take(&x, 3)).unwrap();
        let h = a.group_exp(&take(&y, 3)).unwrap();
        let s = |k: &GroupPoint| group_s(a, &v, k, Direction::Forward).unwrap();
        let lhs = s(&(&g * &h));
        let rhs = match v.case {
            Case::A => &s(&g) * &s(&h),
            Case::B => &s(&h) * &s(&g),
        };
        prop_assert!(lhs.distance(&rhs) < 1e-9, "{}", lhs.distance(&rhs));
        let back = group_s(a, &v, &s(&g), Direction::Inverse).unwrap();
        prop_assert!(back.distance(&g) < 1e-9);
    }

    #[test]
    fn exec_map_preserves_order(items in prop::collection::vec(any::<i32>(), 0..200), jobs in 1usize..9) {
        let out = Execution::with_jobs(jobs).map(&items, |x| i64::from(*x) * 3).unwrap();
        let expected: Vec<i64> = items.iter().map(|x| i64::from(*x) * 3).collect();
        prop_assert_eq!(out, expected);
    }

    #[test]
    fn fmt17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = fmt17(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn p_grid_is_a_cartesian_product(a in 1usize..6, b in 1usize..6, c in 1usize..6) {
        let spec = format!("-1:1:{a},0:2:{b},3:4:{c}");
        let ps = parse_p_grid(&spec, 3).unwrap();
        prop_assert_eq!(ps.len(), a * b * c);
        prop_assert_eq!(ps[0].as_slice()[0], -1.0);
        if c > 1 {
            prop_assert_eq!(ps[1].as_slice()[2], 3.0 + 1.0 / (c - 1) as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flows_conserve_energy_and_momentum(gi in 0usize..5, p in vec4(1.0), t in 0.2f64..3.0) {
        let b = bundle(gi);
        let a = b.algebra();
        let n = a.dim();
        let h = b.hamiltonian("sr").unwrap();
        let p0 = Covector::new(&p[..n]);
        let cfg = FlowConfig::default();

        let left = left_flow(a, h, &p0, t, &cfg).unwrap();
        let (jl, _) = momentum_maps(a, &left).unwrap();
        prop_assert!((h.value(left.covector()).unwrap() - h.value(&p0).unwrap()).abs() < 1e-8);
        prop_assert!(jl.distance(&p0) < 1e-8, "J_L drift {}", jl.distance(&p0));
        let transported = a.group_ad_star(left.g(), &p0).unwrap();
        prop_assert!(transported.distance(left.covector()) < 1e-8);

        let right = right_flow(a, h, &p0, t, &cfg).unwrap();
        let (_, jr) = momentum_maps(a, &right).unwrap();
        prop_assert!(jr.distance(&p0) < 1e-8, "J_R drift {}", jr.distance(&p0));
    }
}

#[test]
fn heisenberg_extremal_matches_closed_form() {
    let b = catalog::builtin("heisenberg3").unwrap();
    let a = b.algebra();
    let h = b.hamiltonian("sr").unwrap();
    let cfg = FlowConfig::default();
    for &t in &[0.5, 1.0, 2.0, 3.0, 6.0] {
        let g = left_flow(a, h, &Covector::new(&[1.0, 0.0, 1.0]), t, &cfg).unwrap();
        let m = g.g().matrix();
        let (x, y, z) = (t.sin(), 1.0 - t.cos(), 0.5 * t - 0.25 * (2.0 * t).sin());
        let err = (m[(0, 1)] - x).abs().max((m[(1, 2)] - y).abs()).max((m[(0, 2)] - z).abs());
        assert!(err < 1e-8, "t = {t}: {err}");
    }
}

#[test]
fn straight_line_is_the_one_parameter_subgroup() {
    let b = catalog::builtin("heisenberg3").unwrap();
    let a = b.algebra();
    let h = b.hamiltonian("sr").unwrap();
    let g = left_flow(a, h, &Covector::new(&[1.0, 0.0, 0.0]), 2.0, &FlowConfig::default()).unwrap();
    let expected = a.group_exp(&AlgebraVector::new(&[2.0, 0.0, 0.0])).unwrap();
    assert!(g.g().distance(&expected) < 1e-10);
}

#[test]
fn adaptive_and_fine_rk4_agree_on_so3() {
    let b = catalog::builtin("so3").unwrap();
    let a = b.algebra();
    let h = b.hamiltonian("sr").unwrap();
    let p = Covector::new(&[0.3, -0.7, 0.5]);
    let coarse = left_flow(a, h, &p, 4.0, &FlowConfig::default()).unwrap();
    let fine = left_flow(a, h, &p, 4.0, &FlowConfig::rk4(1e-3)).unwrap();
    assert!(coarse.g().distance(fine.g()) < 1e-8);
}
