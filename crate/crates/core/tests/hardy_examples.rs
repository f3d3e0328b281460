//! Bidisk shift and corona-type triplets against hand-derived values.

use krange::dbr::{complement_defect, dbr_norm};
use krange::generators::{
    bidisk_expected_defect, bidisk_triplet, corona_triplet, poly_mul, toeplitz_analytic,
};
use krange::krein::check_lemma_bound;
use krange::localstruct::verify_norm_equality;
use krange::numerics::{basis_vector, gaussian_vector, norm, norm_sq, real_vector};
use krange::solver::{solve_complement_exact, solve_exact};
use krange::tuples::ttilde_properties;
use krange::{Matrix, Tuple, ValidityLevel, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Index of z^i w^j in the lexicographic basis of ℂⁿ⊗ℂⁿ.
fn e(n: usize, i: usize, j: usize) -> Vec<C64> {
    basis_vector(n * n, i * n + j)
}

#[test]
fn bidisk_defect_is_exact_up_to_sixteen() {
    for n in 1..=16 {
        let t: Tuple = bidisk_triplet(n).unwrap();
        let dev = (t.defect() - &bidisk_expected_defect(n)).frobenius_norm();
        assert!(dev <= 1e-13, "n={n}: {dev}");
    }
}

#[test]
fn bidisk_defect_sqrt_is_the_projection() {
    let t: Tuple = bidisk_triplet(2).unwrap();
    assert_eq!(t.level(), ValidityLevel::Full);
    let p = bidisk_expected_defect::<f64>(2);
    assert!((t.defect_sqrt() - &p).frobenius_norm() < 1e-14);
}

#[test]
fn bidisk_sharp_of_z() {
    let t: Tuple = bidisk_triplet(2).unwrap();
    let z = t.bt_sharp(&e(2, 1, 0)).unwrap();
    assert_eq!(z.block(0), e(2, 0, 0).as_slice());
    assert_eq!(norm_sq(z.block(1)), 0.0);
    assert_eq!(norm_sq(z.block(2)), 0.0);
}

#[test]
fn bidisk_exact_solve() {
    let t: Tuple = bidisk_triplet(2).unwrap();
    let r = solve_exact(&t, &e(2, 1, 0)).unwrap();
    assert!(r.residual < 1e-14);
    assert!((r.krein_norm_sq - 1.0).abs() < 1e-14);
    let z0 = r.z.block(0);
    assert!(norm(&krange::numerics::sub_vec(z0, &e(2, 0, 0))) < 1e-14);
    assert!(norm_sq(r.z.block(1)) < 1e-28 && norm_sq(r.z.block(2)) < 1e-28);
}

#[test]
fn bidisk_complement_constant_function() {
    for n in 2..6 {
        let t: Tuple = bidisk_triplet(n).unwrap();
        let s = complement_defect(t.defect_sqrt()).unwrap();
        let mut p0 = Matrix::zeros(n * n, n * n);
        p0[(0, 0)] = C64::new(1.0, 0.0);
        assert!((&s - &p0).frobenius_norm() < 1e-14);
        let r = solve_complement_exact(&t, &e(n, 0, 0)).unwrap();
        assert!(r.residual <= 1e-8);
        assert!((r.krein_norm_sq - 1.0).abs() <= 1e-10);
        assert!(solve_complement_exact(&t, &e(n, 1, 0)).is_err());
    }
}

#[test]
fn bidisk_lemma_and_norm_equality() {
    let t: Tuple = bidisk_triplet(2).unwrap();
    let lemma = check_lemma_bound(&t, 0.5).unwrap();
    assert!(lemma.passed && !lemma.vacuous);
    assert!((lemma.bound - 0.25 / 3.0).abs() < 1e-15);
    assert!(lemma.delta_star.unwrap() >= 0.25 / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = verify_norm_equality(&t, 0.5, 20, &mut rng).unwrap();
    assert!(r.passed && r.max_deviation <= 1e-7);
    let vac = check_lemma_bound(&t, 1.5).unwrap();
    assert!(vac.vacuous && vac.passed);
}

#[test]
fn bidisk_proposition_properties() {
    for n in 1..6 {
        let t: Tuple = bidisk_triplet(n).unwrap();
        let r = ttilde_properties(&t).unwrap();
        assert!(r.passed, "n={n}: {r:?}");
        assert_eq!(r.l_dim, n * n - 1);
    }
}

#[test]
fn corona_triplet_solves_exactly() {
    let h = 0.5f64.sqrt();
    let c = corona_triplet(
        &real_vector(&[0.0, h]),
        &real_vector(&[0.0, 0.0, h]),
        &real_vector(&[h]),
        &real_vector(&[h]),
        6,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let x: Vec<C64> = gaussian_vector(6, &mut rng);
        let u = c.tuple.defect_sqrt().mul_vec(&x).unwrap();
        let r = solve_exact(&c.tuple, &u).unwrap();
        let oracle = dbr_norm(c.tuple.defect_sqrt(), &u).unwrap();
        assert!(r.residual <= 1e-8 * norm(&u).max(1.0));
        assert!((r.krein_norm_sq - oracle * oracle).abs() <= 1e-8);
    }
}

/// P T_φ T_φ* P computed from a larger truncation agrees with the small
/// truncation's T_φ T_φ*.
#[test]
fn corona_compression_consistency() {
    let phi = real_vector::<f64>(&[0.3, -0.2, 0.4]);
    let psi = real_vector::<f64>(&[0.5, 0.1]);
    let prod = poly_mul(&phi, &psi);
    for n in 1..7 {
        for coeffs in [&phi, &psi, &prod] {
            let small = toeplitz_analytic(coeffs, n).gram_rows();
            let big = toeplitz_analytic(coeffs, n + coeffs.len()).gram_rows();
            let lead = big.submatrix(0, 0, n, n);
            assert!((&small - &lead).frobenius_norm() <= 1e-12);
        }
    }
}

#[test]
fn corona_constant_symbols() {
    let c = corona_triplet::<f64>(&real_vector(&[1.0]), &[], &real_vector(&[0.5]), &[], 4).unwrap();
    assert_eq!(c.tuple.level(), ValidityLevel::Full);
    let ev = c.tuple.spectrum().eigenvalues();
    assert!(ev.iter().all(|&l| (l - 0.75f64.sqrt()).abs() < 1e-14));
}

#[test]
fn single_precision_pipeline() {
    let t = krange::generators::random_tuple::<f32>(2, 1, 4, 9, 0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<num_complex::Complex<f32>> = gaussian_vector(4, &mut rng);
    let u = t.defect_sqrt().mul_vec(&x).unwrap();
    let tol = krange::Tolerances::default().relaxed(1e4);
    let t = krange::Tuple32::with_tolerances(t.ops().to_vec(), t.signature().clone(), tol).unwrap();
    let r = solve_exact(&t, &u).unwrap();
    assert!(
        r.residual <= 1e-3 * norm(&u).max(1.0),
        "residual {}",
        r.residual
    );
    assert!((r.krein_norm_sq - r.target_norm_sq).abs() <= 1e-3 * r.target_norm_sq.max(1.0));
}
