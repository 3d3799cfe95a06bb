//! Seeded sampling of vectors and matrices. Every stream is ChaCha8 so that a
//! recorded seed replays bit-for-bit.

use nalgebra::ComplexField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{cr, cx, CMat, CVec};
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal, `E|z|^2 = 1`.
pub fn complex_normal<R: Real>(rng: &mut impl Rng) -> nalgebra::Complex<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    cx(R::lit(re * s), R::lit(im * s))
}

pub fn random_vector<R: Real>(rng: &mut impl Rng, n: usize) -> CVec<R> {
    CVec::from_fn(n, |_, _| complex_normal(rng))
}

/// Complex-normal entries, normalized.
pub fn random_unit_vector<R: Real>(rng: &mut impl Rng, n: usize) -> CVec<R> {
    loop {
        let v: CVec<R> = random_vector(rng, n);
        let norm = v.norm();
        if norm > R::lit(1e-6) {
            return v / cr(norm);
        }
    }
}

pub fn random_matrix<R: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat<R> {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_hermitian<R: Real>(rng: &mut impl Rng, n: usize) -> CMat<R> {
    let g: CMat<R> = random_matrix(rng, n, n);
    (&g + g.adjoint()) * cr(R::lit(0.5))
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Real>(rng: &mut impl Rng, n: usize) -> CMat<R> {
    let g: CMat<R> = random_matrix(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > R::zero() {
            let phase = d / cr(m);
            for i in 0..n {
                out[(i, j)] *= phase;
            }
        }
    }
    out
}

pub fn uniform<R: Real>(rng: &mut impl Rng, lo: f64, hi: f64) -> R {
    R::lit(rng.random_range(lo..hi))
}
