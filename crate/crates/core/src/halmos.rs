//! Two subspaces in generic position, `N = {(x, Bx)}` and `M = {(x, -Bx)}`, and
//! the algebra of operators leaving both invariant.

use crate::algebra::AlgebraModel;
use crate::error::{check_dim, Error, Result};
use crate::funcnorm::functional_norm_with;
use crate::lattice::{lat_distance_sq, Projection, SubspaceLattice};
use crate::linalg::{
    block2, block_diag, concat_vectors, cr, hermitian_eig, identity, op_norm, vec_norm, vec_norm_sq,
    zeros, CMat, CVec, HermitianEig, Tolerances,
};
use crate::random::{random_matrix, random_vector, rng_from_seed};
use crate::scalar::Real;

/// Smallest eigenvalue of `B` for which the angle between the subspaces counts as positive.
pub const ANGLE_THRESHOLD: f64 = 1e-8;

/// The operator `B` with everything derived from it.
#[derive(Debug, Clone)]
pub struct HalmosModel<R: Real> {
    h0_dim: usize,
    b: CMat<R>,
    eig: HermitianEig<R>,
    gamma: CMat<R>,
    p: Projection<R>,
    q: Projection<R>,
    similarity: Option<(CMat<R>, CMat<R>)>,
    lattice: SubspaceLattice<R>,
}

impl<R: Real> HalmosModel<R> {
    /// Strict construction: the spectrum of `B` must lie in `(rank_tol, 1 - rank_tol)`.
    pub fn new(b: CMat<R>, tol: &Tolerances<R>) -> Result<Self> {
        Self::build(b, tol, false)
    }

    /// Relaxed construction used by scans: any spectrum in `(0, 1 - rank_tol)` is
    /// accepted and the similarity is only built when the angle is positive.
    pub fn for_scan(b: CMat<R>, tol: &Tolerances<R>) -> Result<Self> {
        Self::build(b, tol, true)
    }

    pub fn from_spectrum(spectrum: &[R], tol: &Tolerances<R>) -> Result<Self> {
        Self::new(crate::linalg::diag(spectrum), tol)
    }

    fn build(b: CMat<R>, tol: &Tolerances<R>, scan: bool) -> Result<Self> {
        let eig = hermitian_eig(&b, tol)?;
        let h = b.nrows();
        if h == 0 {
            return Err(Error::InvalidArgument("B must be nonempty".into()));
        }
        for (index, &l) in eig.values.iter().enumerate() {
            let low = if scan { l <= R::zero() } else { l <= tol.rank_tol };
            if low || l >= R::one() - tol.rank_tol {
                return Err(Error::SpectrumOutOfRange { index, value: l.as_f64() });
            }
        }
        let id = identity::<R>(h);
        let g = eig.apply(|l| R::one() / (R::one() + l * l));
        let gamma = block_diag(&[&g, &g]);
        let b2 = &b * &b;
        let p = &gamma * block2(&id, &b, &b, &b2);
        let q = &gamma * block2(&id, &(-&b), &(-&b), &b2);
        let p = Projection::from_matrix(p, tol)?;
        let q = Projection::from_matrix(q, tol)?;
        let lambda_min = *eig.values.last().expect("nonempty spectrum");
        let similarity = (lambda_min >= R::lit(ANGLE_THRESHOLD)).then(|| {
            let a = cr(R::lit(std::f64::consts::FRAC_1_SQRT_2));
            let half = eig.apply(|l| l.sqrt());
            let inv_half = eig.apply(|l| R::one() / l.sqrt());
            let s = block2(&(&inv_half * a), &(&inv_half * -a), &(&half * a), &(&half * a));
            let s_inv = block2(&(&half * a), &(&inv_half * a), &(&half * -a), &(&inv_half * a));
            (s, s_inv)
        });
        let lattice = SubspaceLattice::from_elements(2 * h, vec![p.clone(), q.clone()], tol)?;
        Ok(HalmosModel { h0_dim: h, b, eig, gamma, p, q, similarity, lattice })
    }

    pub fn h0_dim(&self) -> usize {
        self.h0_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.h0_dim
    }

    pub fn b(&self) -> &CMat<R> {
        &self.b
    }

    /// Eigenvalues of `B`, descending.
    pub fn spectrum(&self) -> &[R] {
        &self.eig.values
    }

    pub fn gamma(&self) -> &CMat<R> {
        &self.gamma
    }

    pub fn p(&self) -> &Projection<R> {
        &self.p
    }

    pub fn q(&self) -> &Projection<R> {
        &self.q
    }

    /// `{0, P, Q, I}`.
    pub fn lattice(&self) -> &SubspaceLattice<R> {
        &self.lattice
    }

    pub fn angle_positive(&self) -> bool {
        self.similarity.is_some()
    }

    pub fn s(&self) -> Result<&CMat<R>> {
        self.similarity.as_ref().map(|(s, _)| s).ok_or(Error::AngleZero)
    }

    pub fn s_inv(&self) -> Result<&CMat<R>> {
        self.similarity.as_ref().map(|(_, s)| s).ok_or(Error::AngleZero)
    }

    fn power(&self, e: f64) -> CMat<R> {
        self.eig.apply(|l| l.powf(R::lit(e)))
    }

    fn split(&self, v: &CVec<R>) -> Result<(CVec<R>, CVec<R>)> {
        check_dim(self.dim(), v.len())?;
        let h = self.h0_dim;
        Ok((v.rows(0, h).into_owned(), v.rows(h, h).into_owned()))
    }

    /// `S (C ⊕ D) S⁻¹`, a member of the two-subspace algebra.
    pub fn conjugated_member(&self, c: &CMat<R>, d: &CMat<R>) -> Result<CMat<R>> {
        let (s, s_inv) = self.similarity.as_ref().ok_or(Error::AngleZero)?;
        check_dim(self.h0_dim, c.nrows())?;
        check_dim(self.h0_dim, c.ncols())?;
        check_dim(self.h0_dim, d.nrows())?;
        check_dim(self.h0_dim, d.ncols())?;
        Ok(s * block_diag(&[c, d]) * s_inv)
    }

    /// Split costs of `(S⁻¹x, S*y)` against the four projections of the block algebra.
    pub fn m_values(&self, x: &CVec<R>, y: &CVec<R>) -> Result<[R; 4]> {
        if !self.angle_positive() {
            return Err(Error::AngleZero);
        }
        let (x1, x2) = self.split(x)?;
        let (y1, y2) = self.split(y)?;
        let half = self.power(0.5);
        let inv_half = self.power(-0.5);
        let a2 = R::lit(0.5);
        let xp = vec_norm_sq(&(&half * &x1 + &inv_half * &x2)) * a2;
        let xm = vec_norm_sq(&(&half * &x1 - &inv_half * &x2)) * a2;
        let yp = vec_norm_sq(&(&inv_half * &y1 + &half * &y2)) * a2;
        let ym = vec_norm_sq(&(&inv_half * &y1 - &half * &y2)) * a2;
        Ok([xp + xm, xp + ym, yp + xm, yp + ym])
    }

    /// `a₁ = ‖x‖²`, `a₂ = ‖P⊥x‖² + ‖Py‖²`, `a₃ = ‖Q⊥x‖² + ‖Qy‖²`, `a₄ = ‖y‖²`.
    pub fn a_values(&self, x: &CVec<R>, y: &CVec<R>) -> Result<[R; 4]> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok([vec_norm_sq(x), self.p.split_cost(x, y), self.q.split_cost(x, y), vec_norm_sq(y)])
    }

    /// `(c₁, c₂, c₃, c₄, max)` with `aᵢ ≤ cᵢ m_{σ(i)}`, `σ = (1, 3, 2, 4)`.
    pub fn split_constants(&self) -> Result<SplitConstants<R>> {
        if !self.angle_positive() {
            return Err(Error::AngleZero);
        }
        let lmin = *self.eig.values.last().expect("nonempty");
        let lmax = self.eig.values[0];
        let inv_a2 = R::lit(2.0);
        let half = R::lit(0.5);
        let b_inv_sq = R::one() / (lmin * lmin);
        let gamma_sq = op_norm(&self.gamma).powi(2);
        let c = [
            half * b_inv_sq * lmax * inv_a2,
            R::lit(2.0) * gamma_sq * inv_a2,
            R::lit(2.0) * gamma_sq * inv_a2,
            half * b_inv_sq * inv_a2,
        ];
        let max = c.iter().copied().fold(R::zero(), |a, b| a.max(b));
        Ok(SplitConstants { c, max })
    }

    /// `‖S‖‖S⁻¹‖`.
    pub fn condition(&self) -> Result<R> {
        let (s, s_inv) = self.similarity.as_ref().ok_or(Error::AngleZero)?;
        Ok(op_norm(s) * op_norm(s_inv))
    }

    /// `‖Bx₁‖‖By₂‖` for `x = (x₁, 0)`, `y = (0, y₂)` and the antidiagonal member attaining it.
    pub fn closed_form_norm(&self, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<(R, CMat<R>)> {
        let (x1, x2) = self.split(x)?;
        let (y1, y2) = self.split(y)?;
        let scale = R::one().max(vec_norm(x)).max(vec_norm(y));
        if vec_norm(&x2) > tol.eq_tol * scale || vec_norm(&y1) > tol.eq_tol * scale {
            return Err(Error::StructureMismatch("closed form needs x = (x1, 0) and y = (0, y2)".into()));
        }
        let bx = &self.b * &x1;
        let by = &self.b * &y2;
        let value = vec_norm(&bx) * vec_norm(&by);
        let h = self.h0_dim;
        if value <= R::zero() {
            return Ok((R::zero(), zeros(2 * h, 2 * h)));
        }
        let d = &by * bx.adjoint() * cr(R::one() / value);
        let bdb = &self.b * &d * &self.b;
        let z = zeros(h, h);
        Ok((value, block2(&z, &d, &bdb, &z)))
    }

    /// Block-diagonal algebra `B(H₀) ⊕ B(H₀)` that `S` conjugates onto the two-subspace algebra.
    pub fn block_algebra(&self) -> Result<AlgebraModel<R>> {
        AlgebraModel::direct_sum(vec![AlgebraModel::full(self.h0_dim)?, AlgebraModel::full(self.h0_dim)?])
    }

    /// `(S⁻¹x, S*y)`.
    pub fn transfer_pair(&self, x: &CVec<R>, y: &CVec<R>) -> Result<(CVec<R>, CVec<R>)> {
        let (s, s_inv) = self.similarity.as_ref().ok_or(Error::AngleZero)?;
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok((s_inv * x, s.adjoint() * y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConstants<R> {
    pub c: [R; 4],
    pub max: R,
}

/// Pairing of coefficients with split costs: `a₁↔m₁`, `a₂↔m₃`, `a₃↔m₂`, `a₄↔m₄`.
pub const SPLIT_PAIRING: [usize; 4] = [0, 2, 1, 3];

/// One row of a divergence scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<R> {
    pub j: usize,
    pub k: usize,
    pub lambda_j: R,
    pub lambda_k: R,
    pub lhs: R,
    pub norm: R,
    pub ratio: R,
    pub growth_bound: R,
    /// `lhs ≥ ¼λ_k² - eq_tol` and `ratio ≥ bound - eq_tol`.
    pub assertions_hold: bool,
}

/// For each `(j, k)`, compares the lattice side and the closed-form norm on
/// `x = (e_j, 0)`, `y = (0, e_k)` with `B = diag(spectrum)`.
pub fn violation_scan<R: Real>(spectrum: &[R], pairs: &[(usize, usize)], tol: &Tolerances<R>) -> Result<Vec<ScanRow<R>>> {
    let model = HalmosModel::for_scan(crate::linalg::diag(spectrum), tol)?;
    let h = spectrum.len();
    let quarter = R::lit(0.25);
    pairs
        .iter()
        .map(|&(j, k)| {
            if j >= h || k >= h {
                return Err(Error::InvalidArgument(format!("pair ({j}, {k}) out of range for {h} eigenvalues")));
            }
            let x = crate::linalg::basis_vector::<R>(2 * h, j);
            let y = crate::linalg::basis_vector::<R>(2 * h, h + k);
            let lhs = lat_distance_sq(model.lattice(), &x, &y, tol)?.value;
            let (lj, lk) = (spectrum[j], spectrum[k]);
            let norm = lj * lk;
            let ratio = lhs / norm;
            let growth_bound = lk / (R::lit(4.0) * lj);
            let assertions_hold = lhs >= quarter * lk * lk - tol.eq_tol && ratio >= growth_bound - tol.eq_tol;
            Ok(ScanRow { j, k, lambda_j: lj, lambda_k: lk, lhs, norm, ratio, growth_bound, assertions_hold })
        })
        .collect()
}

/// Outcome of sampling the split-cost bounds on random pairs.
#[derive(Debug, Clone)]
pub struct SplitBoundCheck<R> {
    pub constants: SplitConstants<R>,
    pub condition: R,
    pub pairs: usize,
    /// Every pair had `min m ≤ block-algebra norm upper + tol`.
    pub split_bound_ok: bool,
    /// Every pair had `aᵢ ≤ cᵢ m_{σ(i)} + eq_tol` and `min a ≤ c min m + eq_tol`.
    pub paired_bound_ok: bool,
    /// Largest `min a / (c min m)` seen.
    pub worst_ratio: R,
}

/// Samples `pairs` random vector pairs (seeded) and checks both bounds.
pub fn check_split_bounds<R: Real>(model: &HalmosModel<R>, pairs: usize, seed: u64, tol: &Tolerances<R>) -> Result<SplitBoundCheck<R>> {
    let constants = model.split_constants()?;
    let block = model.block_algebra()?;
    let mut rng = rng_from_seed(seed);
    let n = model.dim();
    let mut split_bound_ok = true;
    let mut paired_bound_ok = true;
    let mut worst_ratio = R::zero();
    for _ in 0..pairs {
        let x: CVec<R> = random_vector(&mut rng, n);
        let y: CVec<R> = random_vector(&mut rng, n);
        let m = model.m_values(&x, &y)?;
        let a = model.a_values(&x, &y)?;
        let (u, v) = model.transfer_pair(&x, &y)?;
        let upper = functional_norm_with(&block, &u, &v, tol, crate::funcnorm::DEFAULT_MAX_ITER)?.upper;
        let min_m = m.iter().copied().fold(m[0], |a, b| a.min(b));
        let min_a = a.iter().copied().fold(a[0], |a, b| a.min(b));
        split_bound_ok &= min_m <= upper + tol.solver_tol * R::lit(10.0);
        for i in 0..4 {
            paired_bound_ok &= a[i] <= constants.c[i] * m[SPLIT_PAIRING[i]] + tol.eq_tol;
        }
        paired_bound_ok &= min_a <= constants.max * min_m + tol.eq_tol;
        if min_m > R::zero() {
            worst_ratio = worst_ratio.max(min_a / (constants.max * min_m));
        }
    }
    Ok(SplitBoundCheck { constants, condition: model.condition()?, pairs, split_bound_ok, paired_bound_ok, worst_ratio })
}

/// Random member of the two-subspace algebra via conjugation of a random block-diagonal operator.
pub fn random_conjugated_member<R: Real>(model: &HalmosModel<R>, rng: &mut impl rand::Rng) -> Result<CMat<R>> {
    let h = model.h0_dim();
    let c = random_matrix(rng, h, h);
    let d = random_matrix(rng, h, h);
    model.conjugated_member(&c, &d)
}

/// Concatenates `(v₁, v₂)` into a vector on `H₀ ⊕ H₀`.
pub fn pair_vector<R: Real>(v1: &CVec<R>, v2: &CVec<R>) -> CVec<R> {
    concat_vectors(&[v1, v2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{join, lattice_closure, meet};
    use crate::linalg::{approx_eq, basis_vector, diag, real_matrix, real_vector};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn one_dimensional_projection() {
        let h = HalmosModel::new(diag(&[0.5]), &tol()).unwrap();
        let expect = real_matrix::<f64>(2, 2, &[0.8, 0.4, 0.4, 0.2]);
        assert!(approx_eq(h.p().matrix(), &expect, 1e-12));
        let p = h.p().matrix();
        assert!(approx_eq(&(p * p), p, 1e-12));
    }

    #[test]
    fn generic_position() {
        let h = HalmosModel::new(diag(&[0.9, 0.5, 0.2]), &tol()).unwrap();
        let t = tol();
        assert_eq!(meet(h.p(), h.q(), &t).unwrap().rank(), 0);
        assert!(approx_eq(join(h.p(), h.q(), &t).unwrap().matrix(), &identity(6), 1e-8));
        assert_eq!(meet(&h.p().complement(), h.q(), &t).unwrap().rank(), 0);
        assert_eq!(meet(h.p(), &h.q().complement(), &t).unwrap().rank(), 0);
        // ran P = {(x, Bx)}
        for i in 0..3 {
            let e = basis_vector::<f64>(3, i);
            let v = pair_vector(&e, &(h.b() * &e));
            assert!(vec_norm(&(h.p().matrix() * &v - &v)) < 1e-12);
        }
    }

    #[test]
    fn closure_is_four_elements() {
        let h = HalmosModel::new(diag(&[0.9, 0.5]), &tol()).unwrap();
        let l = lattice_closure(4, &[h.p().clone(), h.q().clone()], 16, &tol()).unwrap();
        assert_eq!(l.len(), 4);
        assert!(!l.is_commutative());
    }

    #[test]
    fn spectrum_range_is_enforced() {
        assert!(matches!(HalmosModel::new(diag(&[0.5, 1.0]), &tol()), Err(Error::SpectrumOutOfRange { index: 0, .. })));
        assert!(matches!(HalmosModel::new(diag(&[0.5, 0.0]), &tol()), Err(Error::SpectrumOutOfRange { index: 1, .. })));
        let scan = HalmosModel::for_scan(diag(&[0.5, 1e-12]), &tol()).unwrap();
        assert!(!scan.angle_positive());
        assert_eq!(scan.s().unwrap_err(), Error::AngleZero);
    }

    #[test]
    fn conjugated_members() {
        let h = HalmosModel::new(diag(&[0.9, 0.6, 0.3]), &tol()).unwrap();
        let id = identity::<f64>(3);
        assert!(approx_eq(&h.conjugated_member(&id, &id).unwrap(), &identity(6), 1e-12));
        let s = h.s().unwrap();
        assert!(approx_eq(&(s * h.s_inv().unwrap()), &identity(6), 1e-12));

        let mut rng = rng_from_seed(11);
        let t = random_conjugated_member(&h, &mut rng).unwrap();
        let gens = [t];
        assert!(crate::lattice::check_invariant(h.p(), &gens, &tol()).unwrap());
        assert!(crate::lattice::check_invariant(h.q(), &gens, &tol()).unwrap());

        let e = h.conjugated_member(&id, &zeros(3, 3)).unwrap();
        assert!(approx_eq(&(&e * &e), &e, 1e-12));
        assert!(approx_eq(&(h.p().matrix() * &e), &e, 1e-12));
    }

    #[test]
    fn transfer_matches_display() {
        let h = HalmosModel::new(diag(&[0.9, 0.4]), &tol()).unwrap();
        let mut rng = rng_from_seed(12);
        let x: CVec<f64> = random_vector(&mut rng, 4);
        let y: CVec<f64> = random_vector(&mut rng, 4);
        let (u, v) = h.transfer_pair(&x, &y).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let (x1, x2) = (x.rows(0, 2).into_owned(), x.rows(2, 2).into_owned());
        let half = h.power(0.5);
        let inv_half = h.power(-0.5);
        let top = (&half * &x1 + &inv_half * &x2) * cr(a);
        assert!(vec_norm(&(u.rows(0, 2) - top)) < 1e-12);
        let m = h.m_values(&x, &y).unwrap();
        let (u1, u2) = (u.rows(0, 2), u.rows(2, 2));
        let (v1, v2) = (v.rows(0, 2), v.rows(2, 2));
        assert!((m[0] - u.norm_squared()).abs() < 1e-10);
        assert!((m[1] - (u1.norm_squared() + v2.norm_squared())).abs() < 1e-10);
        assert!((m[2] - (v1.norm_squared() + u2.norm_squared())).abs() < 1e-10);
        assert!((m[3] - v.norm_squared()).abs() < 1e-10);
    }

    #[test]
    fn m_and_a_examples() {
        let h = HalmosModel::new(diag(&[0.5]), &tol()).unwrap();
        let x = real_vector::<f64>(&[1.0, 0.0]);
        let zero = real_vector::<f64>(&[0.0, 0.0]);
        assert!((h.m_values(&x, &zero).unwrap()[0] - 0.5).abs() < 1e-12);
        assert_eq!(h.m_values(&zero, &zero).unwrap(), [0.0; 4]);
        assert_eq!(h.a_values(&zero, &zero).unwrap(), [0.0; 4]);

        let big = HalmosModel::new(diag(&[0.8, 0.3]), &tol()).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let x: CVec<f64> = random_vector(&mut rng, 4);
            let y: CVec<f64> = random_vector(&mut rng, 4);
            let a = big.a_values(&x, &y).unwrap();
            assert!((a[0] + a[3] - x.norm_squared() - y.norm_squared()).abs() < 1e-12);
            let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
            let d = lat_distance_sq(big.lattice(), &x, &y, &tol()).unwrap().value;
            assert!((min_a - d).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_closed_form() {
        let h = HalmosModel::new(diag(&[0.5]), &tol()).unwrap();
        let c = h.split_constants().unwrap();
        assert!((c.c[0] - 2.0).abs() < 1e-12);
        assert!((c.c[3] - 4.0).abs() < 1e-12);
        assert!((c.c[1] - 2.0 * 2.0 / 1.25f64.powi(2)).abs() < 1e-12);
        assert_eq!(c.max, c.c.iter().copied().fold(0.0, f64::max));
    }

    #[test]
    fn split_bounds_sampled() {
        let h = HalmosModel::new(diag(&[0.9, 0.6, 0.3]), &tol()).unwrap();
        let c = h.split_constants().unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let x: CVec<f64> = random_vector(&mut rng, 6);
            let y: CVec<f64> = random_vector(&mut rng, 6);
            let a = h.a_values(&x, &y).unwrap();
            let m = h.m_values(&x, &y).unwrap();
            for i in 0..4 {
                assert!(a[i] <= c.c[i] * m[SPLIT_PAIRING[i]] + 1e-9, "a{} vs m{}", i + 1, SPLIT_PAIRING[i] + 1);
            }
            let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
            let min_m = m.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min_a <= c.max * min_m + 1e-9);
        }
        let check = check_split_bounds(&h, 20, 6, &tol()).unwrap();
        assert!(check.split_bound_ok && check.paired_bound_ok);
    }

    #[test]
    fn closed_form_examples() {
        let h = HalmosModel::new(diag(&[0.9, 0.5]), &tol()).unwrap();
        let x = real_vector::<f64>(&[1.0, 0.0, 0.0, 0.0]);
        let y = real_vector::<f64>(&[0.0, 0.0, 0.0, 1.0]);
        let (v, w) = h.closed_form_norm(&x, &y, &tol()).unwrap();
        assert!((v - 0.45).abs() < 1e-12);
        let a = AlgebraModel::two_subspace(h.clone());
        assert!(a.membership(&w, 1e-9).unwrap());
        assert!(op_norm(&w) <= 1.0 + 1e-12);
        assert!(((y.adjoint() * &w * &x)[(0, 0)].re - 0.45).abs() < 1e-12);

        let zero = real_vector::<f64>(&[0.0; 4]);
        let (v, w) = h.closed_form_norm(&x, &zero, &tol()).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(op_norm(&w), 0.0);
        assert!(matches!(h.closed_form_norm(&y, &x, &tol()), Err(Error::StructureMismatch(_))));
    }

    #[test]
    fn scan_example_row() {
        let rows = violation_scan(&[0.9, 0.5, 1e-4], &[(2, 0)], &tol()).unwrap();
        let r = &rows[0];
        let lhs = 0.81 / 1.81 + 1e-8 / (1.0 + 1e-8);
        assert!((r.lhs - lhs).abs() < 1e-12);
        assert!((r.norm - 9e-5).abs() < 1e-18);
        assert!((r.ratio - lhs / 9e-5).abs() < 1e-6 * r.ratio);
        assert!((r.ratio - 4972.3).abs() < 0.5);
        assert!((r.growth_bound - 0.9 / 4e-4).abs() < 1e-9);
        assert!(r.assertions_hold);
    }
}
