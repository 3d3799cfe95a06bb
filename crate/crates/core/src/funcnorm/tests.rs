use super::*;
use crate::halmos::HalmosModel;
use crate::lattice::{lattice_closure, Projection};
use crate::linalg::{approx_eq, diag, real_matrix, real_vector};
use crate::random::{random_unit_vector, random_unitary, random_vector};

type V = CVec<f64>;

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn nest2() -> AlgebraModel<f64> {
    let p = Projection::from_matrix(diag(&[1.0, 0.0]), &tol()).unwrap();
    AlgebraModel::csl(lattice_closure(2, &[p], 8, &tol()).unwrap(), &tol()).unwrap()
}

fn diagonal(n: usize) -> AlgebraModel<f64> {
    AlgebraModel::direct_sum((0..n).map(|_| AlgebraModel::full(1).unwrap()).collect()).unwrap()
}

fn value(t: &CMat<f64>, x: &V, y: &V) -> Complex<f64> {
    (y.adjoint() * t * x)[(0, 0)]
}

fn assert_valid(a: &AlgebraModel<f64>, x: &V, y: &V, r: &NormResult<f64>) {
    assert!(r.lower <= r.upper + 1e-7);
    assert!(a.membership(&r.witness, 1e-9).unwrap());
    assert!(op_norm(&r.witness) <= 1.0 + 1e-9);
    let v = value(&r.witness, x, y);
    assert!((v.re - r.lower).abs() < 1e-9 && v.im.abs() < 1e-9);
    assert!((trace_norm(&(outer(x, y) - &r.certificate)).unwrap() - r.upper).abs() < 1e-9);
    let mut rng = rng_from_seed(99);
    for _ in 0..5 {
        let t = a.random_member(&mut rng).unwrap();
        assert!((&t * &r.certificate).trace().norm() < 1e-8 * (1.0 + op_norm(&t)));
    }
}

#[test]
fn full_algebra_closed_form() {
    let mut rng = rng_from_seed(1);
    for n in 2..6 {
        let a = AlgebraModel::full(n).unwrap();
        let x: V = random_vector(&mut rng, n);
        let y: V = random_vector(&mut rng, n);
        let r = functional_norm(&a, &x, &y, &tol()).unwrap();
        let expect = vec_norm(&x) * vec_norm(&y);
        assert!(r.lower <= expect + 1e-12 && expect <= r.upper + 1e-12);
        assert!(r.width() <= 1e-7);
        assert_valid(&a, &x, &y, &r);
    }
}

#[test]
fn nest_functional_vanishes() {
    let x = real_vector(&[1.0, 0.0]);
    let y = real_vector(&[0.0, 1.0]);
    let r = functional_norm(&nest2(), &x, &y, &tol()).unwrap();
    assert!(r.upper < 1e-12);
}

#[test]
fn nest_generic_pair() {
    let a = nest2();
    let mut rng = rng_from_seed(2);
    for _ in 0..10 {
        let x: V = random_unit_vector(&mut rng, 2);
        let y: V = random_unit_vector(&mut rng, 2);
        let r = functional_norm(&a, &x, &y, &tol()).unwrap();
        assert_valid(&a, &x, &y, &r);
        let s = functional_norm_sampling(&a, &x, &y, 500, 3).unwrap();
        assert!(s <= r.upper + 1e-9);
    }
}

#[test]
fn two_subspace_closed_form() {
    let h = HalmosModel::new(diag(&[0.9, 0.5]), &tol()).unwrap();
    let a = AlgebraModel::two_subspace(h);
    let x = real_vector(&[1.0, 0.0, 0.0, 0.0]);
    let y = real_vector(&[0.0, 0.0, 0.0, 1.0]);
    let r = functional_norm(&a, &x, &y, &tol()).unwrap();
    assert!(r.lower <= 0.45 + 1e-9 && 0.45 <= r.upper + 1e-9);
    assert!(r.width() < 1e-6);
    assert_valid(&a, &x, &y, &r);
    assert!(functional_norm_sampling(&a, &x, &y, 2000, 4).unwrap() <= r.upper + 1e-9);
}

#[test]
fn diagonal_algebra() {
    let a = diagonal(2);
    let x = real_vector(&[1.0, 2.0]);
    let y = real_vector(&[2.0, 1.0]);
    let r = functional_norm(&a, &x, &y, &tol()).unwrap();
    assert!((r.lower - 4.0).abs() < 1e-6 && (r.upper - 4.0).abs() < 1e-6);
    let s = functional_norm_sampling(&a, &x, &y, 5000, 5).unwrap();
    assert!(s <= 4.0 + 1e-9 && s > 3.5);
}

#[test]
fn sampling_oracle_examples() {
    let a = AlgebraModel::full(2).unwrap();
    let x = real_vector(&[0.6, 0.8]);
    let s = functional_norm_sampling(&a, &x, &x, 5000, 6).unwrap();
    assert!((0.9..=1.0 + 1e-12).contains(&s));
    let e1 = real_vector(&[1.0, 0.0]);
    let e2 = real_vector(&[0.0, 1.0]);
    assert_eq!(functional_norm_sampling(&nest2(), &e1, &e2, 100, 7).unwrap(), 0.0);
    assert_eq!(
        functional_norm_sampling(&a, &x, &x, 50, 8).unwrap(),
        functional_norm_sampling(&a, &x, &x, 50, 8).unwrap()
    );
}

#[test]
fn scale_covariance() {
    let mut rng = rng_from_seed(9);
    let u = random_unitary::<f64>(&mut rng, 3);
    let p = Projection::from_matrix(&u * diag(&[1.0, 1.0, 0.0]) * u.adjoint(), &tol()).unwrap();
    let a = AlgebraModel::csl(lattice_closure(3, &[p], 8, &tol()).unwrap(), &tol()).unwrap();
    let x: V = random_unit_vector(&mut rng, 3);
    let y: V = random_unit_vector(&mut rng, 3);
    let base = functional_norm(&a, &x, &y, &tol()).unwrap();
    let scaled = functional_norm(&a, &(&x * cx(0.0, 3.0)), &(&y * cr(0.25)), &tol()).unwrap();
    assert!((scaled.lower - 0.75 * base.lower).abs() < 1e-6);
}

#[test]
fn dimension_mismatch() {
    let x = real_vector(&[1.0, 0.0, 0.0]);
    let y = real_vector(&[1.0, 0.0]);
    assert!(matches!(functional_norm(&nest2(), &x, &y, &tol()), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn interpolation_examples() {
    let t = tol();
    let x = real_vector(&[0.6, 0.8]);
    let y = real_vector(&[0.0, 1.0]);
    let full = AlgebraModel::full(2).unwrap();
    let s = interpolate(&full, &x, &y, &t).unwrap();
    let s = s.solution().unwrap();
    assert!(vec_norm(&(s * &x - &y)) < 1e-7 && op_norm(s) <= 1.0 + 1e-7);

    let e1 = real_vector(&[1.0, 0.0]);
    let e2 = real_vector(&[0.0, 1.0]);
    match interpolate(&nest2(), &e1, &e2, &t).unwrap() {
        InterpolationResult::Violation(l) => assert!(approx_eq(l.matrix(), &diag(&[1.0, 0.0]), 1e-12)),
        InterpolationResult::Solution(_) => panic!("expected a violation"),
    }
    let s = interpolate(&nest2(), &e2, &e1, &t).unwrap();
    let s = s.solution().unwrap();
    assert!(approx_eq(s, &real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]), 1e-6));
}

#[test]
fn interpolation_on_rotated_nest() {
    let t = tol();
    let mut rng = rng_from_seed(10);
    let u = random_unitary::<f64>(&mut rng, 4);
    let gens: Vec<_> = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 1.0, 1.0, 0.0]]
        .iter()
        .map(|b| Projection::from_matrix(&u * diag(b) * u.adjoint(), &t).unwrap())
        .collect();
    let a = AlgebraModel::csl(lattice_closure(4, &gens, 16, &t).unwrap(), &t).unwrap();
    let l = a.lattice(&t).unwrap().unwrap();
    let mut solved = 0;
    for _ in 0..20 {
        let x: V = random_unit_vector(&mut rng, 4);
        let y: V = random_unit_vector(&mut rng, 4) * cr(0.5);
        match interpolate(&a, &x, &y, &t).unwrap() {
            InterpolationResult::Solution(s) => {
                solved += 1;
                assert!(a.membership(&s, 1e-9).unwrap());
                assert!(op_norm(&s) <= 1.0 + 1e-6);
                assert!(vec_norm(&(&s * &x - &y)) <= 1e-6);
                for e in l.elements() {
                    let c = e.complement();
                    assert!(vec_norm(&(c.matrix() * &y)) <= vec_norm(&(c.matrix() * &x)) + 1e-9);
                }
            }
            InterpolationResult::Violation(p) => {
                let c = p.complement();
                assert!(vec_norm(&(c.matrix() * &y)) > vec_norm(&(c.matrix() * &x)) + 1e-9);
            }
        }
    }
    assert!(solved > 0);
}

#[test]
fn cauchy_schwarz_corner() {
    let t = tol();
    let a = nest2();
    let x = real_vector(&[0.0, 1.0]);
    let y = real_vector(&[0.6, 0.8]);
    let r = functional_norm(&a, &x, &y, &t).unwrap();
    assert!((r.upper - 1.0).abs() < 1e-6);
    let s = interpolate(&a, &x, &y, &t).unwrap();
    assert!(vec_norm(&(s.solution().unwrap() * &x - &y)) < 1e-6);
}
