use fcs_core::linalg::{determinant, is_psd, permanent, s_pm, ComplexMatrix, StatisticsKind};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Random Gram matrix G = V V† with V of shape n x k.
fn random_gram(n: usize, k: usize, seed: u64) -> ComplexMatrix {
    let v = ComplexMatrix::from_fn(n, k, {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        move |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    v.mul(&v.adjoint()).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn parity(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

/// Σ_σ (±1)^p(σ) Π_i M_{iσ(i)} over all n! permutations.
fn naive_s_pm(m: &ComplexMatrix, sign: bool) -> Complex64 {
    permutations(m.rows())
        .iter()
        .map(|p| {
            let prod: Complex64 = p.iter().enumerate().map(|(i, &j)| m[(i, j)]).product();
            if sign { prod * parity(p) } else { prod }
        })
        .sum()
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    if n == 1 {
        return m[(0, 0)];
    }
    (0..n)
        .map(|col| {
            let minor = ComplexMatrix::from_fn(n - 1, n - 1, |i, j| m[(i + 1, if j < col { j } else { j + 1 })]);
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            m[(0, col)] * cofactor_det(&minor) * sign
        })
        .sum()
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn determinant_matches_cofactor_expansion() {
    // seed 6 for the 6x6 case
    let m = random_matrix(6, 6);
    assert!(rel_err(determinant(&m).unwrap(), cofactor_det(&m)) < 1e-12);
    for n in 1..=6 {
        for seed in 0..5 {
            let m = random_matrix(n, 100 + seed);
            assert!(rel_err(determinant(&m).unwrap(), cofactor_det(&m)) < 1e-12, "n={n} seed={seed}");
        }
    }
}

#[test]
fn permanent_matches_permutation_sum() {
    // seed 5 for the 5x5 case: 120 permutations
    let m = random_matrix(5, 5);
    assert!(rel_err(permanent(&m).unwrap(), naive_s_pm(&m, false)) < 1e-12);
    for n in 1..=6 {
        for seed in 0..5 {
            let m = random_matrix(n, 200 + seed);
            assert!(rel_err(permanent(&m).unwrap(), naive_s_pm(&m, false)) < 1e-12, "n={n} seed={seed}");
            assert!(rel_err(determinant(&m).unwrap(), naive_s_pm(&m, true)) < 1e-12, "n={n} seed={seed}");
        }
    }
}

#[test]
fn hadamard_bounds_on_gram_matrices() {
    for n in 2..=6 {
        for seed in 0..10 {
            let g = random_gram(n, n + 1, 300 + seed);
            assert!(is_psd(&g, 1e-10).unwrap());
            let diag = g.diagonal_product().re;
            let per = permanent(&g).unwrap().re;
            let det = determinant(&g).unwrap().re;
            assert!(per >= diag * (1.0 - 1e-12), "per {per} < diag {diag}");
            assert!(det <= diag * (1.0 + 1e-12), "det {det} > diag {diag}");
            assert!(det <= per);
        }
    }
}

#[test]
fn rank_deficient_gram_is_psd_with_zero_determinant() {
    let g = random_gram(4, 2, 9);
    assert!(is_psd(&g, 1e-10).unwrap());
    assert!(determinant(&g).unwrap().norm() < 1e-12);
}

proptest! {
    #[test]
    fn s_pm_is_multilinear_in_rows(
        seed in 0u64..10_000,
        n in 1usize..=6,
        row_pick in 0usize..6,
        a_re in -2.0f64..2.0, a_im in -2.0f64..2.0,
        b_re in -2.0f64..2.0, b_im in -2.0f64..2.0,
    ) {
        let row = row_pick % n;
        let base = random_matrix(n, seed);
        let u = random_matrix(n, seed.wrapping_add(1));
        let v = random_matrix(n, seed.wrapping_add(2));
        let (a, b) = (Complex64::new(a_re, a_im), Complex64::new(b_re, b_im));
        let mut mixed = base.clone();
        let mut with_u = base.clone();
        let mut with_v = base.clone();
        let combo: Vec<Complex64> = u.row(0).iter().zip(v.row(0)).map(|(x, y)| a * x + b * y).collect();
        mixed.set_row(row, &combo);
        with_u.set_row(row, u.row(0));
        with_v.set_row(row, v.row(0));
        for kind in [StatisticsKind::Boson, StatisticsKind::Fermion] {
            let lhs = s_pm(&mixed, kind).unwrap();
            let rhs = a * s_pm(&with_u, kind).unwrap() + b * s_pm(&with_v, kind).unwrap();
            let scale = 1.0 + lhs.norm().max(rhs.norm());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn transposition_invariance(seed in 0u64..10_000, n in 1usize..=7) {
        let m = random_matrix(n, seed);
        let t = ComplexMatrix::from_fn(n, n, |i, j| m[(j, i)]);
        let p = permanent(&m).unwrap();
        prop_assert!((p - permanent(&t).unwrap()).norm() <= 1e-12 * (1.0 + p.norm()));
        let d = determinant(&m).unwrap();
        prop_assert!((d - determinant(&t).unwrap()).norm() <= 1e-12 * (1.0 + d.norm()));
    }
}
