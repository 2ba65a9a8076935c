use littlewood_paley::{lq_norm, BandLayout, DyadicBand};
use mixed_norms::*;
use propagators::{PhaseKind, Propagator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{trapezoid_weights, Complex64, Field, FieldPath, GridSpec, Rep};
use std::f64::consts::PI;

fn random_path(g: GridSpec, steps: usize, dt: f64, seed: u64) -> FieldPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snaps = (0..=steps)
        .map(|_| {
            let v = (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            Field::new(g, v, Rep::Space).unwrap()
        })
        .collect();
    FieldPath::new(dt, snaps).unwrap()
}

/// Reduces the full (space..., t) tensor group by group, innermost first.
fn oracle(u: &FieldPath, spec: &MixedSpec) -> f64 {
    let g = u.grid();
    let n = g.dim();
    let m = g.points();
    let kk = u.steps() + 1;
    let tw = trapezoid_weights(u.steps(), u.dt());
    // axis sizes: n spatial axes then time
    let mut sizes: Vec<usize> = vec![m; n];
    sizes.push(kk);
    let mut data: Vec<f64> = Vec::new();
    let spaces: Vec<Field> = u.snapshots().iter().map(|s| s.to_space()).collect();
    let total: usize = sizes.iter().product();
    for flat in 0..total {
        let t = flat % kk;
        let sp = flat / kk;
        data.push(spaces[t].values()[sp].norm());
    }
    let mut axes: Vec<usize> = (0..=n).collect();
    for grp in spec.groups().iter().rev() {
        let member = |a: usize| if a == n { grp.t } else if a == 0 { grp.x } else { grp.y };
        let keep: Vec<usize> = axes.iter().copied().filter(|&a| !member(a)).collect();
        let out_len: usize = keep.iter().map(|&a| sizes[a]).product();
        let mut out = vec![0.0f64; out_len.max(1)];
        let cur_len: usize = axes.iter().map(|&a| sizes[a]).product();
        for flat in 0..cur_len {
            let mut rem = flat;
            let mut coords = vec![0usize; n + 1];
            for &a in axes.iter().rev() {
                coords[a] = rem % sizes[a];
                rem /= sizes[a];
            }
            let mut o = 0;
            for &a in &keep {
                o = o * sizes[a] + coords[a];
            }
            let mut w = 1.0;
            for &a in &axes {
                if member(a) {
                    w *= if a == n { tw[coords[a]] } else { g.spacing() };
                }
            }
            let v = data[flat];
            if grp.p.is_infinite() {
                out[o] = out[o].max(v);
            } else {
                out[o] += w * v.powf(grp.p);
            }
        }
        if grp.p.is_finite() {
            for v in out.iter_mut() {
                *v = v.powf(1.0 / grp.p);
            }
        }
        data = out;
        axes = keep;
    }
    data[0]
}

const PAPER_SPECS: [&str; 9] = [
    "(xyt:4)",
    "(xy:4)(t:6)",
    "(xy:4)(t:12)",
    "(xy:4)(t:inf)",
    "(x:inf)(yt:2)",
    "(y:inf)(xt:2)",
    "(t:4)(xy:4)",
    "(x:4)(y:2)(t:6)",
    "(xyt:15/4)",
];

#[test]
fn matches_reordering_oracle_on_tiny_grids() {
    for (n, seed) in [(2usize, 1u64), (3, 2)] {
        let g = GridSpec::new(n, 3.0, 8).unwrap();
        let u = random_path(g, 4, 0.3, seed);
        for s in PAPER_SPECS.iter().chain(["(t:3)(x:2)(y:5)", "(y:1)(t:inf)(x:3)"].iter()) {
            let spec: MixedSpec = s.parse().unwrap();
            let a = mixed_norm(&u, &spec);
            let b = oracle(&u, &spec);
            assert!((a - b).abs() <= 1e-12 * b, "{s}: {a} vs {b}");
        }
    }
}

#[test]
fn unit_plane_wave_constant_in_time() {
    let g = GridSpec::new(2, 5.0, 16).unwrap();
    let w = Field::plane_wave(g, &[1, 2], Complex64::new(1.0, 0.0));
    let t = 0.8;
    let u = FieldPath::sample(t, 8, |_| w.clone()).unwrap();
    let v = mixed_norm(&u, &"(xy:4)(t:6)".parse().unwrap());
    assert!((v - 5f64.sqrt() * t.powf(1.0 / 6.0)).abs() < 1e-12);
    let z = FieldPath::sample(t, 3, |_| Field::zeros(g, Rep::Space)).unwrap();
    for s in PAPER_SPECS {
        assert_eq!(mixed_norm(&z, &s.parse().unwrap()), 0.0);
    }
}

#[test]
fn two_snapshot_sup_over_x() {
    let g = GridSpec::new(2, 4.0, 8).unwrap();
    let u = random_path(g, 1, 0.5, 9);
    let spec: MixedSpec = "(x:inf)(yt:2)".parse().unwrap();
    // direct: max_x (Σ_y Σ_t h w_t |u|²)^{1/2}
    let s0 = u.snapshots()[0].values();
    let s1 = u.snapshots()[1].values();
    let h = g.spacing();
    let best = (0..8)
        .map(|x| (0..8).map(|y| h * 0.25 * (s0[x * 8 + y].norm_sqr() + s1[x * 8 + y].norm_sqr())).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    assert!((mixed_norm(&u, &spec) - best).abs() <= 1e-12 * best);
}

#[test]
fn riesz_examples_and_commutation() {
    let g = GridSpec::new(2, 2.0 * PI, 16).unwrap();
    let w = Field::plane_wave(g, &[2, 3], Complex64::new(1.0, 0.0));
    let ix = riesz_apply(&w, &[RieszSpec::new(RieszOp::Ix, 1.0)]).unwrap();
    assert!(ix.sub(&w.scale(Complex64::new(2.0, 0.0))).unwrap().l2_norm() < 1e-12);
    let w11 = Field::plane_wave(g, &[1, 1], Complex64::new(1.0, 0.0));
    let k = riesz_apply(&w11, &[RieszSpec::new(RieszOp::K, 0.25)]).unwrap();
    assert!((k.l2_norm() / w11.l2_norm() - 1.189207115002721).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
    let f = Field::new(g, v, Rep::Space).unwrap();
    let ops = [
        RieszSpec::new(RieszOp::Ix, 0.3),
        RieszSpec::new(RieszOp::Iy, -0.7),
        RieszSpec::new(RieszOp::K, 0.125),
        RieszSpec::new(RieszOp::Jy, 0.26),
        RieszSpec::new(RieszOp::I, 1.0),
        RieszSpec::new(RieszOp::IxIy, 0.125),
    ];
    let lay = BandLayout::new(&g);
    for a in &ops {
        for b in &ops {
            let ab = riesz_apply(&riesz_apply(&f, &[*a]).unwrap(), &[*b]).unwrap();
            let ba = riesz_apply(&riesz_apply(&f, &[*b]).unwrap(), &[*a]).unwrap();
            assert!(ab.sub(&ba).unwrap().l2_norm() <= 1e-13 * (1.0 + ab.l2_norm()));
        }
        let band = DyadicBand::new(2);
        let pa = lay.project(&riesz_apply(&f, &[*a]).unwrap(), band).unwrap();
        let ap = riesz_apply(&lay.project(&f, band).unwrap(), &[*a]).unwrap();
        assert!(pa.sub(&ap).unwrap().l2_norm() <= 1e-13 * (1.0 + pa.l2_norm()));
    }
}

fn band_datum(g: GridSpec, band: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_spectrum_fn(g, |k| {
        let r = (k.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if r > band / 2.0 && r <= band {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::default()
        }
    })
}

fn free_path(f: &Field, kind: PhaseKind, t: f64, steps: usize) -> FieldPath {
    let p = Propagator::new(kind, f.grid()).unwrap();
    FieldPath::sample(t, steps, |s| p.evolve(f, s).unwrap()).unwrap()
}

#[test]
fn aux_basic_properties() {
    let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
    let prm = AuxParams::new(2, 3, 2.0, 1.0).unwrap();
    let zero = FieldPath::sample(1.0, 4, |_| Field::zeros(g, Rep::Frequency)).unwrap();
    assert_eq!(aux_norm(&zero, &prm, AuxFlavor::Original).unwrap(), 0.0);
    assert_eq!(vanishing_window_check(&zero, &prm, AuxFlavor::Original, &[1.0, 0.5]).unwrap(), vec![0.0, 0.0]);

    let a = band_datum(g, 1.0, 1);
    let b = band_datum(g, 4.0, 2);
    let pa = free_path(&a, PhaseKind::Zk2d, 1.0, 16);
    let pb = free_path(&b, PhaseKind::Zk2d, 1.0, 16);
    let both = pa.add(&pb).unwrap();
    for q in [1.0, 2.0, 3.0, f64::INFINITY] {
        let prm = AuxParams { q, ..prm };
        let single = aux_band_quantity(&pa, DyadicBand::new(0), &prm, AuxFlavor::Original).unwrap().total();
        assert!((aux_norm(&pa, &prm, AuxFlavor::Original).unwrap() - single).abs() <= 1e-14 * single);
        let sb = aux_norm(&pb, &prm, AuxFlavor::Original).unwrap();
        let combined = aux_norm(&both, &prm, AuxFlavor::Original).unwrap();
        assert!((combined - lq_norm(&[single, sb], q)).abs() <= 1e-12 * combined);
    }
    let csv = aux_table_csv(&aux_table(&both, &prm, AuxFlavor::Symmetrized).unwrap());
    assert!(csv.starts_with("N, term1, term2, term3, total\n"));
    assert!(matches!(aux_norm(&pa, &AuxParams { t: 2.0, ..prm }, AuxFlavor::Original), Err(MixedError::BadWindow { .. })));
}

#[test]
fn aux_q_monotone_on_random_paths() {
    let g = GridSpec::new(2, 6.0, 16).unwrap();
    for seed in 0..5 {
        let u = random_path(g, 3, 0.25, seed);
        let mut last = f64::INFINITY;
        for q in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let v = aux_norm(&u, &AuxParams::new(2, 4, q, 0.75).unwrap(), AuxFlavor::Original).unwrap();
            assert!(v <= last * (1.0 + 1e-12));
            last = v;
        }
    }
}

#[test]
fn vanishing_window_free_evolution() {
    let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
    let f = band_datum(g, 2.0, 4);
    let u = free_path(&f, PhaseKind::Zk2d, 1.0, 32);
    let prm = AuxParams::new(2, 3, 2.0, 1.0).unwrap();
    let vals = vanishing_window_check(&u, &prm, AuxFlavor::Original, &[1.0, 0.5, 0.25, 0.125]).unwrap();
    for w in vals.windows(2) {
        assert!(w[1] < w[0], "{vals:?}");
    }
}

#[test]
fn constant_path_window_scaling() {
    let g = GridSpec::new(2, 8.0 * PI, 16).unwrap();
    let f = band_datum(g, 1.0, 8);
    let k = 3;
    let terms = |t: f64| {
        let u = FieldPath::sample(t, 4, |_| f.clone()).unwrap();
        aux_band_quantity(&u, DyadicBand::new(0), &AuxParams::new(2, k, 2.0, t).unwrap(), AuxFlavor::Original).unwrap()
    };
    let a = terms(1.0);
    let b = terms(2.0);
    assert!((b.term1 / a.term1 - 2f64.powf(0.25)).abs() < 1e-12);
    assert!((b.term2 / a.term2 - 2f64.powf(1.0 / 6.0)).abs() < 1e-12);
    assert!((b.term3 / a.term3 - 2f64.powf(1.0 / 12.0)).abs() < 1e-12);
    // large windows: the smallest time exponent dominates
    let big = terms(1e40);
    let bigger = terms(2e40);
    assert!((bigger.total() / big.total() / 2f64.powf(0.25) - 1.0).abs() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneous_and_monotone(seed in any::<u64>(), c in 0.01f64..10.0, which in 0usize..9) {
        let g = GridSpec::new(2, 3.0, 8).unwrap();
        let u = random_path(g, 3, 0.2, seed);
        let spec: MixedSpec = PAPER_SPECS[which].parse().unwrap();
        let a = mixed_norm(&u.scale(Complex64::new(0.0, c)), &spec);
        let b = c * mixed_norm(&u, &spec);
        prop_assert!((a - b).abs() <= 1e-12 * b);
        // pointwise domination: shrink one snapshot
        let shrunk = u.zip_with(&u, |s, _| Ok(s.scale(Complex64::new(0.5, 0.0)))).unwrap();
        prop_assert!(mixed_norm(&shrunk, &spec) <= mixed_norm(&u, &spec));
    }

    #[test]
    fn lyapunov_holds(seed in any::<u64>(), r in 1.0f64..10.0, da in 0.0f64..5.0, db in 0.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..3.0)).collect();
        let a = (r - da).max(1.0);
        let b = r + db;
        let (l, rr, th) = interpolate_bound(&vals, 0.1, r, a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&th));
        prop_assert!(l <= rr * (1.0 + 1e-12));
    }
}
