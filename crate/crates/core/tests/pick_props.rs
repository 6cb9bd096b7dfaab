mod common;

use std::collections::BTreeMap;

use cnp_core::kernels::{dk, normalize, EmbeddingMap, GramKernel, KernelSpec, PointSet};
use cnp_core::linalg::{is_psd, HermitianMatrix};
use cnp_core::pick::{
    extremal_value, min_multiplier_norm, min_multiplier_norm_with, pick_matrix, InterpolationProblem, PickOptions,
    Targets,
};
use cnp_core::Complex64;
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FINE: PickOptions = PickOptions { bracket_tol: 1e-12, psd_tol: 1e-12 };

fn szego_problem(zs: &[Complex64], ws: &[Complex64]) -> InterpolationProblem {
    InterpolationProblem::scalar(KernelSpec::Szego, PointSet::from_scalars(zs).unwrap(), ws.to_vec()).unwrap()
}

/// Two-point Schwarz–Pick value for {0 -> 0, x -> w}: the least t with
/// |w|/t <= |x|, together with the diagonal necessity t >= |w|.
fn schwarz_pick(x: Complex64, w: Complex64) -> f64 {
    (w.norm() / x.norm()).max(w.norm())
}

#[test]
fn schwarz_pick_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let x = Complex64::from_polar(rng.gen_range(0.1..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
        let w = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..std::f64::consts::TAU));
        let p = szego_problem(&[c(0.0, 0.0), x], &[c(0.0, 0.0), w]);
        let r = min_multiplier_norm(&p, 1e-9).unwrap();
        let want = schwarz_pick(x, w);
        assert!((r.min_norm - want).abs() <= 1e-8, "x={x} w={w}: {} vs {want}", r.min_norm);
        if w.norm() < x.norm() {
            assert!(r.min_norm <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn extremal_matches_closed_form_across_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..60 {
        let n = 5;
        let (spec, pts) = match trial % 3 {
            0 => {
                let zs: Vec<_> = (0..n).map(|_| rand_disk(&mut rng, 0.95)).collect();
                (KernelSpec::Szego, PointSet::from_scalars(&zs).unwrap())
            }
            1 => {
                let d = 1 + trial % 4;
                let vs: Vec<_> = (0..n).map(|_| rand_ball(&mut rng, d, 0.95)).collect();
                (KernelSpec::drury_arveson(d).unwrap(), PointSet::from_vectors(vs).unwrap())
            }
            _ => {
                let mut images = BTreeMap::new();
                images.insert("o".to_string(), c(0.0, 0.0));
                for i in 0..n - 1 {
                    images.insert(format!("q{i}"), rand_disk(&mut rng, 0.95));
                }
                let ids: Vec<String> = images.keys().cloned().collect();
                (KernelSpec::Embedding(EmbeddingMap::new(images, "o").unwrap()), PointSet::from_ids(ids).unwrap())
            }
        };
        let base = rng.gen_range(0..n);
        let x = (base + 1 + rng.gen_range(0..n - 1)) % n;
        let tol = 1e-9;
        let r = extremal_value(&spec, &pts, base, x, tol).unwrap();
        let kb = normalize(&spec, &pts, base).unwrap();
        let oracle = (1.0 - 1.0 / kb.get(x, x).re).sqrt();
        assert!((r.value - oracle).abs() <= 2.0 * tol, "{trial}: {} vs {oracle}", r.value);
        assert!(r.boundary_min_eigenvalue.abs() <= 10.0 * tol, "{trial}: {r:?} kxx={}", kb.get(x, x).re);
        // the extremal value is the metric itself
        assert!((r.value - dk(&spec, &pts, x, base).unwrap()).abs() <= 2.0 * tol);
    }
}

#[test]
fn extremal_on_raw_gram_is_reported() {
    let m = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0, 1.5], vec![1.0, 2.0, 1.2], vec![1.5, 1.2, 3.0]]).unwrap();
    let spec = KernelSpec::Gram(GramKernel::unlabelled(m).unwrap());
    let pts = PointSet::from_ids(["p0", "p1", "p2"]).unwrap();
    let r = extremal_value(&spec, &pts, 0, 2, 1e-9).unwrap();
    assert!(r.value > 0.0 && r.value < 1.0);
    assert!(r.closed_form > 0.0);
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let zs: Vec<_> = (0..n).map(|_| rand_disk(rng, 0.9)).collect();
    let ws: Vec<_> = (0..n).map(|_| rand_disk(rng, 1.0)).collect();
    (zs, ws)
}

#[test]
fn upward_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..7);
        let (zs, ws) = random_problem(&mut rng, n);
        let p = szego_problem(&zs, &ws);
        let t1 = rng.gen_range(0.0..3.0);
        let t2 = t1 + rng.gen_range(0.0..2.0);
        if is_psd(&pick_matrix(&p, t1).unwrap(), 1e-10).unwrap()
            && !is_psd(&pick_matrix(&p, t2).unwrap(), 1e-10).unwrap()
        {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn restriction_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let n = rng.gen_range(2..7);
        let (zs, ws) = random_problem(&mut rng, n);
        let full = szego_problem(&zs, &ws);
        let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if keep.is_empty() {
            continue;
        }
        let t_full = min_multiplier_norm_with(&full, FINE).unwrap().min_norm;
        let t_sub = min_multiplier_norm_with(&full.restrict(&keep), FINE).unwrap().min_norm;
        assert!(t_sub <= t_full + 1e-10, "{t_sub} > {t_full}");
    }
}

#[test]
fn diagonal_block_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let n = rng.gen_range(1..5);
        let (zs, ws) = random_problem(&mut rng, n);
        let vs: Vec<_> = (0..n).map(|_| rand_disk(&mut rng, 1.0)).collect();
        let blocks = (0..n).map(|i| DMatrix::from_row_slice(2, 2, &[ws[i], c(0.0, 0.0), c(0.0, 0.0), vs[i]])).collect();
        let block = InterpolationProblem::new(
            KernelSpec::Szego,
            PointSet::from_scalars(&zs).unwrap(),
            Targets::Block { order: 2, blocks },
        )
        .unwrap();
        let t = min_multiplier_norm_with(&block, FINE).unwrap().min_norm;
        let tw = min_multiplier_norm_with(&szego_problem(&zs, &ws), FINE).unwrap().min_norm;
        let tv = min_multiplier_norm_with(&szego_problem(&zs, &vs), FINE).unwrap().min_norm;
        assert!((t - tw.max(tv)).abs() <= 1e-10, "{t} vs max({tw}, {tv})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_norm_lower_bound(zs in distinct_disk_points(1..6, 0.9), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws: Vec<_> = zs.iter().map(|_| rand_disk(&mut rng, 1.5)).collect();
        let r = min_multiplier_norm(&szego_problem(&zs, &ws), 1e-9).unwrap();
        let seed_bound = ws.iter().map(|w| w.norm()).fold(0.0, f64::max);
        prop_assert!(r.min_norm >= seed_bound);
        if zs.len() == 1 {
            prop_assert_eq!(r.min_norm, seed_bound);
        }
        prop_assert_eq!(r.feasible, r.min_norm <= 1.0 + 1e-9);
    }

    #[test]
    fn min_norm_is_the_boundary(zs in distinct_disk_points(2..6, 0.9), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws: Vec<_> = zs.iter().map(|_| rand_disk(&mut rng, 1.0)).collect();
        let p = szego_problem(&zs, &ws);
        let r = min_multiplier_norm(&p, 1e-9).unwrap();
        prop_assert!(is_psd(&pick_matrix(&p, r.min_norm).unwrap(), 1e-9).unwrap());
        if r.min_norm > r.lower_seed {
            prop_assert!(!is_psd(&pick_matrix(&p, r.min_norm - 1e-4).unwrap(), 0.0).unwrap());
        }
    }

    #[test]
    fn blaschke_data_is_solvable(zs in distinct_disk_points(2..7, 0.9), a in disk_point(0.9)) {
        prop_assume!(a.norm() > 1e-3);
        let ws: Vec<_> = zs.iter().map(|&z| cnp_core::disk::blaschke_product(&[a], z).unwrap()).collect();
        let r = min_multiplier_norm(&szego_problem(&zs, &ws), 1e-9).unwrap();
        prop_assert!(r.feasible);
    }
}
