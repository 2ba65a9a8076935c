use estimate_lab::linear::{linear_lhs, retarded_maximal, separable_forcing, retarded_ratio};
use estimate_lab::suite::{run_estimate, SuiteParams};
use estimate_lab::*;
use mixed_norms::{MixedSpec, RieszOp, RieszSpec};
use proptest::prelude::*;
use propagators::{PhaseKind, Propagator};
use spectral_core::{Complex64, Field, FieldPath, GridSpec, Rep};
use std::f64::consts::PI;

fn gaussians(grid: GridSpec, count: usize) -> Ensemble {
    Ensemble::new(7, count, Recipe::Gaussian { sigma: (0.8, 1.5), xi: (0.0, 1.5), shift: 2.0 }, grid)
}

#[test]
fn kato_constant_value() {
    // τ = ξ³ oracle: c² = 1/3
    assert_eq!(kato_constant(), 0.5773502691896257);
}

#[test]
fn kato_identity_on_a_packet() {
    let g = GridSpec::new(2, 64.0 * PI, 128).unwrap();
    let v = Ensemble::new(3, 1, Recipe::Packet { xi: (1.0, 1.5), eta: 1.0, envelope: 10.0 }, g).datum(0).unwrap();
    let m = kato_identity_2d(&v, KatoWindow { t0: 2.0, t_max: 16.0, drift_tol: 0.01 }).unwrap();
    assert!(m.converged);
    assert!((m.ratio / kato_constant() - 1.0).abs() < 0.02, "{}", m.ratio);
}

#[test]
fn energy_endpoint_is_unitary() {
    // p = ∞, q = 2: sup_t ‖U(t)v‖ = ‖v‖
    let g = GridSpec::new(2, 16.0 * PI, 64).unwrap();
    let est = StrichartzFamily::SymGain { p: f64::INFINITY }.build().unwrap();
    let r = run_linear(&est, &gaussians(g, 4), TimeWindow::new(0.5, 10).unwrap()).unwrap();
    for t in &r.trials {
        assert!((t.ratio - 1.0).abs() < 1e-12);
    }
}

#[test]
fn derivative_orders_and_rejections() {
    assert!((StrichartzFamily::Zk3dGain { p: 15.0 / 4.0 }.order().unwrap() - 0.1).abs() < 1e-15);
    let e = StrichartzFamily::Zk3dMixed { p: 4.0, q: 2.0 }.build().unwrap_err().to_string();
    assert!(e.contains("1/q ≤ 1/p") || e.contains("3/2"), "{e}");
    assert!(StrichartzFamily::SymSobolev { r: 5.0 }.build().is_err());
}

#[test]
fn retarded_impulse_is_free_evolution() {
    let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
    let f0 = gaussians(g, 1).datum(0).unwrap();
    let dt = 0.05;
    let j0 = 3;
    let path = FieldPath::new(dt, (0..=10).map(|j| if j == j0 { f0.clone() } else { Field::zeros(g, Rep::Space) }).collect()).unwrap();
    let big = retarded_maximal(&path, PhaseKind::Sym2d).unwrap();
    let prop = Propagator::new(PhaseKind::Sym2d, &g).unwrap();
    for m in 0..j0 {
        assert_eq!(big.snapshots()[m].l2_norm(), 0.0);
    }
    for m in j0 + 1..=10 {
        let want = prop.evolve(&f0, (m - j0) as f64 * dt).unwrap().scale(Complex64::new(dt, 0.0));
        assert!(big.snapshots()[m].sub(&want).unwrap().l2_norm() < 1e-10 * want.l2_norm());
    }
}

#[test]
fn retarded_scaling() {
    let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
    let win = TimeWindow::new(0.4, 8).unwrap();
    let f0 = gaussians(g, 1).datum(0).unwrap();
    let a = retarded_ratio(&separable_forcing(&f0, win).unwrap()).unwrap();
    let b = retarded_ratio(&separable_forcing(&f0.scale(Complex64::new(2.0, 0.0)), win).unwrap()).unwrap();
    assert!((b.lhs / a.lhs - 2.0).abs() < 1e-12 && (b.rhs / a.rhs - 2.0).abs() < 1e-12);
    assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
}

#[test]
fn duhamel_exact_for_linear_forcing() {
    // g(s) = s·g₀: ∫_0^t e^{iφ(t−s)} s ds = (e^{iφt} − 1 − iφt)/(iφ)²
    let g = GridSpec::new(2, 8.0, 16).unwrap();
    let g0 = Field::plane_wave(g, &[2, 1], Complex64::new(1.0, 0.5));
    let path = FieldPath::sample(0.9, 9, |s| g0.scale(Complex64::new(s, 0.0))).unwrap();
    let prop = Propagator::new(PhaseKind::Sym2d, &g).unwrap();
    let d = duhamel(&prop, Derivative::Identity, &path).unwrap();
    let slot = g.flatten(&[g.mode_slot(2).unwrap(), g.mode_slot(1).unwrap()]);
    let phi = prop.phase()[slot];
    let c = g0.to_frequency().values()[slot];
    let iphi = Complex64::new(0.0, phi);
    for j in 0..=9 {
        let t = d.time(j);
        let want = ((iphi * t).exp() - 1.0 - iphi * t) / (iphi * iphi) * c;
        assert!((d.snapshots()[j].values()[slot] - want).norm() < 1e-12 * c.norm());
    }
}

#[test]
fn kernel_oracles() {
    let q = Quadrature::default();
    let h = oscillatory_kernel(1.0, 0.0, 1e-6, &q).unwrap();
    assert!((h.norm() / (2.0 * PI).sqrt() - 1.0).abs() < 0.005);
    // |H(x, 0)| ~ √(2π)|x|^{-1/2}
    let h4 = oscillatory_kernel(4.0, 0.0, 1e-6, &q).unwrap();
    assert!((2.0 * h4.norm() / (2.0 * PI).sqrt() - 1.0).abs() < 0.005);
    let h01 = oscillatory_kernel(0.0, 1.0, 1e-3, &q).unwrap();
    assert!(h01.norm().is_finite() && h01.im.abs() <= 1e-10 * h01.norm());
}

#[test]
fn holder_tables_across_k() {
    for k in 3..=5 {
        for (n, cases) in [(2, vec![Case::One, Case::Two, Case::Three]), (3, vec![Case::One, Case::Two])] {
            for c in cases {
                let t = holder_exponent_table(n, k, c, 0.0).unwrap();
                assert!(t.valid(), "n={n} k={k} {c:?}");
                let t = holder_exponent_table(n, k, c, 0.01).unwrap();
                assert!(t.sum_p_is_one && t.sum_q_is_half && t.sum_r_is_half);
            }
        }
    }
}

#[test]
fn multilinear_infeasible_and_zero() {
    let g = GridSpec::new(2, 4.0 * PI, 32).unwrap();
    let cfg = MultilinearConfig { half_band: true, nodes: 8, t_max: 0.25, ..MultilinearConfig::new(2, 3, vec![2.0; 4], 2.0) };
    let r = multilinear_check(&cfg, 3, 3, g).unwrap();
    assert!(r.trials.iter().all(|t| t.lhs <= 1e-12));
}

#[test]
fn reports_are_deterministic() {
    let prm = SuiteParams { trials: Some(3), studies: false, m: Some(32), l: Some(8.0 * PI), dimension: Some(2), ..Default::default() };
    let a = run_estimate("maximal", &prm).unwrap();
    let b = run_estimate("maximal", &prm).unwrap();
    assert_eq!(a.csv(), b.csv());
    assert_eq!(a.summary(), b.summary());
}

#[test]
fn dyadic_duality_single_band() {
    let g = GridSpec::new(2, 4.0 * PI, 32).unwrap();
    let cfg = DyadicConfig { nodes: 16, t_max: 0.5, ..DyadicConfig::new(2, 3, 2.0, vec![2.0]) };
    let vs: Vec<Field> = (0..4).map(|j| Ensemble::new(j, 1, Recipe::Band { n: 2.0 }, g).datum(0).unwrap()).collect();
    let (a, b) = duality_cross_check(&cfg, &vs, 2.0).unwrap();
    assert!((a - b).abs() <= 0.1 * a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ratios_are_homogeneous(amp in 0.05f64..20.0, seed in 0u64..1000) {
        let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
        let v = Ensemble::new(seed, 1, Recipe::Gaussian { sigma: (0.8, 1.5), xi: (0.0, 1.5), shift: 2.0 }, g).datum(0).unwrap();
        let win = TimeWindow::new(0.3, 6).unwrap();
        for est in [MaximalFamily::Sym.build().unwrap(), StrichartzFamily::ZkGain { p: 4.0 }.build().unwrap()] {
            let a = linear_ratio(&est, &v, win).unwrap().ratio;
            let b = linear_ratio(&est, &v.scale(Complex64::new(amp, 0.0)), win).unwrap().ratio;
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn lhs_is_subadditive(seed in 0u64..1000) {
        let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
        let e = Ensemble::new(seed, 2, Recipe::Band { n: 2.0 }, g);
        let (u, v) = (e.datum(0).unwrap(), e.datum(1).unwrap());
        let est = LinearEstimate {
            id: "t".into(),
            kind: PhaseKind::Zk2d,
            lhs_weight: vec![RieszSpec::new(RieszOp::K, 0.125)],
            spec: MixedSpec::full(4.0).unwrap(),
            rhs_weight: vec![],
        };
        let win = TimeWindow::new(0.3, 6).unwrap();
        let s = linear_lhs(&est, &u.add(&v).unwrap(), win).unwrap();
        prop_assert!(s <= linear_lhs(&est, &u, win).unwrap() + linear_lhs(&est, &v, win).unwrap() + 1e-12);
    }

    #[test]
    fn holder_sums_exact_for_small_eps(k in 3i64..8, e in 0u32..20) {
        let eps = e as f64 / 2000.0;
        for c in [Case::One, Case::Two, Case::Three] {
            let t = holder_exponent_table(2, k, c, eps).unwrap();
            prop_assert!(t.sum_p_is_one && t.sum_q_is_half && t.sum_r_is_half);
        }
    }
}
