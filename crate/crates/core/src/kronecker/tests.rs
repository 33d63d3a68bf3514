use super::*;
use crate::blur::{blur_direct, blur_matrix_dense};
use crate::image::ImageGrid;
use crate::linalg::frobenius;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BCS: [BoundaryCondition; 2] = [BoundaryCondition::Zero, BoundaryCondition::Reflective];

fn random_psf(rng: &mut ChaCha8Rng, np: usize) -> Psf {
    let data = Array2::from_shape_fn((np, np), |_| rng.random_range(0.0..1.0));
    let c = (rng.random_range(1..=np), rng.random_range(1..=np));
    Psf::new(data, c).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.random_range(-1.0..1.0))
}

fn rel(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    frobenius(&(a - b)) / frobenius(b)
}

#[test]
fn truncation_error_values() {
    assert_eq!(truncation_error(&[3.0, 1.0], 1).unwrap(), 1.0);
    assert_eq!(truncation_error(&[3.0, 1.0], 2).unwrap(), 0.0);
    assert!(truncation_error(&[3.0, 1.0], 3).is_err());
}

#[test]
fn rank_one_psf_is_exact_with_one_term() {
    let u = [0.1, 0.2, 0.4, 0.2, 0.1];
    let v = [0.05, 0.25, 0.4, 0.3, 0.0];
    let psf = Psf::new(Array2::from_shape_fn((5, 5), |(i, j)| u[i] * v[j]), (3, 3)).unwrap();
    for bc in BCS {
        let dec = KronDecomposition::new(&psf, bc, (7, 7)).unwrap();
        let op = dec.operator(1).unwrap();
        assert!(op.eps_s() <= 1e-14 * dec.sigma()[0]);
        let a = blur_matrix_dense(dec.psf(), bc, 7, 7).unwrap();
        assert!(frobenius(&(op.to_dense().unwrap() - &a)) <= 1e-13);
        assert_eq!(dec.numerical_rank(), 1);
    }
}

#[test]
fn delta_psf_single_term_is_identity() {
    for bc in BCS {
        let op = decompose(&Psf::delta(3).unwrap(), bc, 1, (6, 6)).unwrap();
        let d = op.to_dense().unwrap();
        assert!(frobenius(&(d - Array2::<f64>::eye(36))) <= 1e-13);
    }
}

fn check_tail_identity(psf: &Psf, bc: BoundaryCondition, n: usize, s: usize) {
    let dec = KronDecomposition::new(psf, bc, (n, n)).unwrap();
    let op = dec.operator(s).unwrap();
    let a = blur_matrix_dense(dec.psf(), bc, n, n).unwrap();
    let err = frobenius(&(&a - &op.to_dense().unwrap()));
    let tail = dec.sigma()[s..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = dec.sigma()[0];
    assert!((err - tail).abs() <= 1e-12 * scale, "{err} vs {tail}");
    assert!((op.eps_s() - tail).abs() <= 1e-14 * scale);
}

#[test]
fn gaussian_8x8_s2_identity() {
    check_tail_identity(&Psf::gaussian(5, 1.0).unwrap(), BoundaryCondition::Zero, 8, 2);
}

#[test]
fn disk_tail_identity() {
    let psf = Psf::disk(5, 2.0).unwrap();
    for bc in BCS {
        for s in 1..=3 {
            check_tail_identity(&psf, bc, 8, s);
        }
    }
}

#[test]
fn frobenius_identity_random_psfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..12 {
        let np = rng.random_range(3..=9usize);
        let grid = np + rng.random_range(0..=3usize);
        let psf = random_psf(&mut rng, np);
        for bc in BCS {
            let dec = KronDecomposition::new(&psf, bc, (grid, grid)).unwrap();
            let a = blur_matrix_dense(dec.psf(), bc, grid, grid).unwrap();
            let a_norm = frobenius(&a);
            let mut prev = f64::INFINITY;
            for s in 1..=grid {
                let op = dec.operator(s).unwrap();
                let err = frobenius(&(&a - &op.to_dense().unwrap()));
                // recompute the SVD tail from P_bar directly
                let mut partial = Array2::<f64>::zeros((grid, grid));
                for i in 0..s {
                    let ui = dec.svd().u.column(i).insert_axis(ndarray::Axis(1)).to_owned();
                    let vi = dec.svd().v.column(i).insert_axis(ndarray::Axis(0)).to_owned();
                    partial = partial + ui.dot(&vi) * dec.sigma()[i];
                }
                let tail = frobenius(&(&dec.weighted().pbar - &partial));
                assert!((err - tail).abs() <= 1e-9 * a_norm, "bc={bc} s={s}: {err} vs {tail}");
                assert!((op.eps_s() - tail).abs() <= 1e-10 * a_norm);
                assert!(err <= prev + 1e-12 * a_norm);
                prev = err;
            }
        }
    }
}

#[test]
fn eps_non_increasing_and_zero_at_rank() {
    let dec = KronDecomposition::new(&Psf::shake(7, 25, 5).unwrap(), BoundaryCondition::Reflective, (9, 9)).unwrap();
    let eps: Vec<f64> = (1..=9).map(|s| truncation_error(dec.sigma(), s).unwrap()).collect();
    assert!(eps.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(eps[8], 0.0);
}

#[test]
fn untruncated_matches_direct_blur() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let psf = Psf::shake(5, 18, 9).unwrap();
    for bc in BCS {
        let dec = KronDecomposition::new(&psf, bc, (8, 8)).unwrap();
        let op = dec.full_operator().unwrap();
        for _ in 0..5 {
            let x = random_matrix(&mut rng, 8, 8);
            let direct = blur_direct(dec.psf(), &ImageGrid::new(x.clone()), bc);
            let kron = op.apply(x.view()).unwrap();
            assert!(rel(&kron, direct.data()) <= 1e-8);
        }
    }
}

#[test]
fn vec_and_adjoint_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let psf = random_psf(&mut rng, 5);
    for bc in BCS {
        let op = decompose(&psf, bc, 3, (7, 7)).unwrap();
        let dense = op.to_dense().unwrap();
        let x = random_matrix(&mut rng, 7, 7);
        let y = random_matrix(&mut rng, 7, 7);
        let ax = vec_of(&op.apply(x.view()).unwrap());
        assert!(crate::linalg::norm2((&ax - &dense.dot(&vec_of(&x))).view()) <= 1e-10 * crate::linalg::norm2(ax.view()));
        let aty = vec_of(&op.apply_adjoint(y.view()).unwrap());
        assert!(crate::linalg::norm2((&aty - &dense.t().dot(&vec_of(&y))).view()) <= 1e-10 * crate::linalg::norm2(aty.view()));
        let lhs = (&op.apply(x.view()).unwrap() * &y).sum();
        let rhs = (&x * &op.apply_adjoint(y.view()).unwrap()).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300));
    }
}

#[test]
fn identity_factors() {
    let e = |n: usize, j: usize| {
        let mut c = vec![0.0; n];
        c[j - 1] = 1.0;
        StructuredFactor::toep(&c, j).unwrap()
    };
    let op = KronOperator::from_terms(vec![(e(4, 2), e(5, 3))], BoundaryCondition::Zero).unwrap();
    let x = Array2::from_shape_fn((4, 5), |(i, j)| (i * 5 + j) as f64);
    assert_eq!(op.apply(x.view()).unwrap(), x);
    assert_eq!(op.apply_adjoint(x.view()).unwrap(), x);
    assert!(matches!(op.apply(Array2::zeros((5, 4)).view()), Err(Error::Argument(_))));
}

#[test]
fn kronecker_block_layout() {
    let h = StructuredFactor::toep(&[1.0, 2.0, 3.0], 2).unwrap();
    let k = StructuredFactor::hank(&[4.0, 5.0], 1).unwrap();
    let op = KronOperator::from_terms(vec![(h.clone(), k.clone())], BoundaryCondition::Zero).unwrap();
    let d = op.to_dense().unwrap();
    let (hd, kd) = (h.to_dense().unwrap(), k.to_dense().unwrap());
    for bi in 0..2 {
        for bj in 0..2 {
            let block = d.slice(ndarray::s![bi * 3..bi * 3 + 3, bj * 3..bj * 3 + 3]);
            assert_eq!(block, &hd * kd[[bi, bj]]);
        }
    }
}

#[test]
fn parallel_apply_is_bitwise_sequential() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let psf = random_psf(&mut rng, 9);
    let op = decompose(&psf, BoundaryCondition::Reflective, 6, (20, 20)).unwrap();
    let x = random_matrix(&mut rng, 20, 20);
    assert_eq!(op.apply(x.view()).unwrap(), op.apply_parallel(x.view()).unwrap());
    assert_eq!(op.apply_adjoint(x.view()).unwrap(), op.apply_adjoint_parallel(x.view()).unwrap());
}

#[test]
fn fft_and_dense_crossover_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let psf = random_psf(&mut rng, 7);
    let dec = KronDecomposition::new(&psf, BoundaryCondition::Reflective, (24, 24)).unwrap();
    let dense = dec.operator_with_crossover(4, usize::MAX).unwrap();
    let fft = dec.operator_with_crossover(4, 1).unwrap();
    let x = random_matrix(&mut rng, 24, 24);
    assert!(rel(&fft.apply(x.view()).unwrap(), &dense.apply(x.view()).unwrap()) <= 1e-12);
}

#[test]
fn argument_errors() {
    let psf = Psf::gaussian(5, 1.0).unwrap();
    assert!(matches!(decompose(&psf, BoundaryCondition::Zero, 0, (8, 8)), Err(Error::Argument(_))));
    assert!(matches!(decompose(&psf, BoundaryCondition::Zero, 9, (8, 8)), Err(Error::Argument(_))));
    assert!(matches!(decompose(&psf, BoundaryCondition::Zero, 1, (8, 9)), Err(Error::Argument(_))));
    assert!(matches!(decompose(&psf, BoundaryCondition::Zero, 1, (4, 4)), Err(Error::Argument(_))));
}

#[test]
fn report_lists_every_term() {
    let u = [0.2, 0.6, 0.2];
    let psf = Psf::new(Array2::from_shape_fn((3, 3), |(i, j)| u[i] * u[j]), (2, 2)).unwrap();
    let dec = KronDecomposition::new(&psf, BoundaryCondition::Zero, (3, 3)).unwrap();
    let rep = dec.report();
    let lines: Vec<&str> = rep.lines().collect();
    assert_eq!(lines.len(), 4);
    let eps1: f64 = lines[1].split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(eps1 < 1e-15);
}
