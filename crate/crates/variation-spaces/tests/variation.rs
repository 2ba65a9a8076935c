use littlewood_paley::BandLayout;
use propagators::{PhaseKind, Propagator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{Complex64, Field, FieldPath, GridSpec, Rep};
use variation_spaces::*;

fn random_sampled(rng: &mut ChaCha8Rng, len: usize, dim: usize) -> SampledPath {
    let times = (0..len).map(|i| i as f64 * 0.5).collect();
    let values = (0..len)
        .map(|_| (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    SampledPath::new(times, values, rng.random_range(0.5..2.0)).unwrap()
}

/// Exhaustive search over every subset of at least two sample indices.
fn brute_force(v: &SampledPath, p: f64) -> f64 {
    let n = v.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut s = 0.0;
        for w in idx.windows(2) {
            s += v.distance(w[0], w[1]).powf(p);
        }
        best = best.max(s);
    }
    best.powf(1.0 / p)
}

#[test]
fn dp_equals_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let len = rng.random_range(2..=13);
        let dim = if case % 2 == 0 { 1 } else { rng.random_range(2..5) };
        let v = random_sampled(&mut rng, len, dim);
        let p = [1.0, 1.5, 2.0, 3.0, rng.random_range(1.0..6.0)][case % 5];
        assert_eq!(p_variation(&v, p).unwrap(), brute_force(&v, p), "case {case}");
    }
}

#[test]
fn variation_nonincreasing_in_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let v = random_sampled(&mut rng, 10, 3);
        let ps = [1.0, 1.2, 2.0, 2.5, 4.0, 8.0, f64::INFINITY];
        let w: Vec<f64> = ps.iter().map(|&p| p_variation(&v, p).unwrap()).collect();
        for pair in w.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        let b = brute_force(&v, 1.7);
        assert!(brute_force(&v, 2.9) <= b * (1.0 + 1e-12));
    }
}

fn random_atom(rng: &mut ChaCha8Rng, p: f64, dim: usize) -> Atom {
    let k = rng.random_range(1..5);
    let mut times = vec![rng.random_range(0.0..1.0)];
    for _ in 0..k {
        let last = *times.last().unwrap();
        times.push(last + rng.random_range(0.1..1.0));
    }
    if rng.random_bool(0.2) {
        *times.last_mut().unwrap() = f64::INFINITY;
    }
    let psis = (0..k).map(|_| (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()).collect();
    make_atom(Partition::new(times).unwrap(), psis, 1.0, p).unwrap()
}

fn random_step(rng: &mut ChaCha8Rng, dim: usize) -> StepPath {
    let k = rng.random_range(1..7);
    let mut times = vec![rng.random_range(0.0..1.0)];
    for _ in 0..k {
        let last = *times.last().unwrap();
        times.push(last + rng.random_range(0.05..0.8));
    }
    let vals = (0..k).map(|_| (0..dim).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect()).collect();
    StepPath::new(Partition::new(times).unwrap(), vals, 1.0).unwrap()
}

#[test]
fn atoms_have_bounded_vp() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let p = rng.random_range(1.0..4.0);
        let a = random_atom(&mut rng, p, 2);
        let total: f64 = a.path.values().iter().map(|v| a.path.norm_of(v).powf(p)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(vp_norm(&a.path.to_sampled(), p).unwrap() <= 2.0 + 1e-12);
    }
}

#[test]
fn duality_inequality_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let p = [2.0, 1.5, 3.0][rng.random_range(0..3)];
        let dec: Vec<(f64, Atom)> = (0..3).map(|_| (rng.random_range(-2.0..2.0), random_atom(&mut rng, p, 2))).collect();
        let (upper, u) = up_norm_upper(&dec).unwrap();
        let tests: Vec<StepPath> = (0..4).map(|_| random_step(&mut rng, 2)).collect();
        for v in &tests {
            let b = duality_pair(&u, v).norm();
            let vp = vp_norm(&v.to_sampled(), conjugate(p)).unwrap();
            assert!(b <= upper * vp * (1.0 + 1e-12) + 1e-14);
        }
        let lower = up_norm_lower(&u, &tests, p).unwrap();
        assert!(lower <= upper * (1.0 + 1e-12));
    }
}

#[test]
fn pairing_matches_jump_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let u = random_step(&mut rng, 3);
        let v = random_step(&mut rng, 3);
        // jumps of v at its interior breakpoints, against the left limit of u
        let ts = v.partition().times();
        let mut oracle = Complex64::default();
        for k in 1..ts.len() - 1 {
            let tau = ts[k];
            let ut = u.partition().times();
            let left = if tau <= ut[0] || tau > *ut.last().unwrap() {
                vec![Complex64::default(); 3]
            } else {
                let piece = ut.iter().position(|&s| s >= tau).unwrap() - 1;
                u.values()[piece].clone()
            };
            for d in 0..3 {
                oracle += left[d].conj() * (v.values()[k][d] - v.values()[k - 1][d]);
            }
        }
        let got = duality_pair(&u, &v);
        assert!((got - oracle).norm() <= 1e-13 * (1.0 + oracle.norm()), "{got} {oracle}");
    }
}

fn random_field(g: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Field::new(g, v, Rep::Space).unwrap()
}

#[test]
fn free_solutions_have_no_variation() {
    let g = GridSpec::new(2, 10.0, 16).unwrap();
    let u0 = random_field(g, 3);
    let prop = Propagator::new(PhaseKind::Zk2d, &g).unwrap();
    let path = FieldPath::sample(0.9, 12, |t| prop.evolve(&u0, t).unwrap()).unwrap();
    for p in [1.0, 2.0, 4.0] {
        let v = phase_adapted_vp(&path, p, PhaseKind::Zk2d).unwrap();
        assert!((v - u0.l2_norm()).abs() <= 1e-12 * u0.l2_norm());
        let sub = phase_adapted_vp(&path.subsample(3).unwrap(), p, PhaseKind::Zk2d).unwrap();
        assert!((sub - v).abs() <= 1e-12 * v);
    }
    let zero = FieldPath::sample(1.0, 3, |_| Field::zeros(g, Rep::Frequency)).unwrap();
    assert_eq!(phase_adapted_vp(&zero, 2.0, PhaseKind::Zk2d).unwrap(), 0.0);
}

#[test]
fn one_jump_path() {
    let g = GridSpec::new(2, 10.0, 16).unwrap();
    let u0 = random_field(g, 4);
    let d = random_field(g, 5).scale(Complex64::new(0.1, 0.0));
    let prop = Propagator::new(PhaseKind::Sym2d, &g).unwrap();
    let jumped = u0.add(&d).unwrap();
    let path = FieldPath::sample(1.0, 10, |t| prop.evolve(if t < 0.45 { &u0 } else { &jumped }, t).unwrap()).unwrap();
    let pulled = pulled_back(&path, PhaseKind::Sym2d).unwrap();
    let delta = d.l2_norm();
    for p in [1.0, 2.0, 3.0] {
        assert!((p_variation(&pulled, p).unwrap() - delta).abs() <= 1e-12 * delta);
    }
    let v = phase_adapted_vp(&path, 2.0, PhaseKind::Sym2d).unwrap();
    assert!((v - u0.l2_norm().max(jumped.l2_norm()).max(delta)).abs() <= 1e-12 * v);
    // a reflection jump keeps the sup and makes the jump dominate
    let flip = u0.scale(Complex64::new(-1.0, 0.0));
    let path = FieldPath::sample(1.0, 10, |t| prop.evolve(if t < 0.45 { &u0 } else { &flip }, t).unwrap()).unwrap();
    let v = phase_adapted_vp(&path, 2.0, PhaseKind::Sym2d).unwrap();
    assert!((v - 2.0 * u0.l2_norm()).abs() <= 1e-12 * v);
}

#[test]
fn banded_norms_match_projections() {
    let g = GridSpec::new(2, 6.0, 16).unwrap();
    let path = FieldPath::new(0.1, (0..6).map(|s| random_field(g, 100 + s)).collect()).unwrap();
    let lay = BandLayout::new(&g);
    let sp = SampledPath::from_field_path(&path);
    let all = banded_vp_norms(&sp, &lay, 2.0).unwrap();
    for (b, band) in lay.bands().into_iter().enumerate() {
        let proj = path.map(|s| lay.project(s, band).unwrap()).unwrap();
        let direct = vp_norm(&SampledPath::from_field_path(&proj), 2.0).unwrap();
        assert!((all[b] - direct).abs() <= 1e-12 * direct.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_order(seed in any::<u64>(), p in 1.0f64..5.0, dq in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_sampled(&mut rng, 9, 2);
        prop_assert!(p_variation(&v, p + dq).unwrap() <= p_variation(&v, p).unwrap() * (1.0 + 1e-12));
        prop_assert!(vp_norm(&v, p + dq).unwrap() <= vp_norm(&v, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn pairing_is_bilinear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_step(&mut rng, 2);
        let v = random_step(&mut rng, 2);
        let scaled = StepPath::new(v.partition().clone(), v.values().iter().map(|x| x.iter().map(|y| y * a).collect()).collect(), 1.0).unwrap();
        let lhs = duality_pair(&u, &scaled);
        let rhs = duality_pair(&u, &v) * a;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}
