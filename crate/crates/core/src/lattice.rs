//! Finite subspace lattices of orthogonal projections.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    hermitian_defect, hermitian_eig_unchecked, identity, op_norm, svd_unchecked, vec_norm_sq,
    zeros, CMat, CVec, Tolerances,
};
use crate::scalar::Real;

/// Orthogonal projection together with its rank.
#[derive(Debug, Clone)]
pub struct Projection<R: Real> {
    matrix: CMat<R>,
    rank: usize,
}

impl<R: Real> Projection<R> {
    /// Validates `P = P*` and `P² = P` within `eq_tol · dim`.
    pub fn from_matrix(m: CMat<R>, tol: &Tolerances<R>) -> Result<Self> {
        let n = crate::linalg::check_square(&m)?;
        crate::linalg::check_finite(&m)?;
        let bound = tol.eq_scaled(n);
        let sym = hermitian_defect(&m);
        let idem = op_norm(&(&m * &m - &m));
        if sym > bound || idem > bound {
            return Err(Error::NotProjection(sym.max(idem).as_f64()));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMat<R>) -> Self {
        let trace = m.trace().re;
        let rank = trace.round().to_usize().unwrap_or(0).min(m.nrows());
        Projection { matrix: m, rank }
    }

    pub fn zero(n: usize) -> Self {
        Projection { matrix: zeros(n, n), rank: 0 }
    }

    pub fn identity(n: usize) -> Self {
        Projection { matrix: identity(n), rank: n }
    }

    /// Projection onto the span of orthonormal columns.
    pub(crate) fn from_orthonormal_columns(n: usize, cols: &[CVec<R>]) -> Self {
        let mut p = zeros(n, n);
        for c in cols {
            p += c * c.adjoint();
        }
        Projection { matrix: p, rank: cols.len() }
    }

    pub fn matrix(&self) -> &CMat<R> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat<R> {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        Projection { matrix: identity::<R>(self.dim()) - &self.matrix, rank: self.dim() - self.rank }
    }

    /// Orthonormal basis of the range, as the columns of a `dim × rank` matrix.
    pub fn range_basis(&self) -> CMat<R> {
        let eig = hermitian_eig_unchecked(&self.matrix);
        let n = self.dim();
        CMat::from_fn(n, self.rank, |i, k| eig.vectors[(i, k)])
    }

    pub fn approx_eq(&self, other: &Projection<R>, tol: &Tolerances<R>) -> bool {
        self.rank == other.rank
            && op_norm(&(&self.matrix - &other.matrix)) <= tol.eq_scaled(self.dim())
    }

    pub fn commutes_with(&self, other: &Projection<R>, tol: &Tolerances<R>) -> bool {
        let pq = &self.matrix * &other.matrix;
        let qp = &other.matrix * &self.matrix;
        op_norm(&(pq - qp)) <= tol.eq_scaled(self.dim())
    }

    /// `‖(I - P)x‖² + ‖Py‖²`.
    pub fn split_cost(&self, x: &CVec<R>, y: &CVec<R>) -> R {
        let px = &self.matrix * x;
        vec_norm_sq(&(x - px)) + vec_norm_sq(&(&self.matrix * y))
    }
}

/// Orthogonal projection onto the span of `basis` in `C^dim`.
pub fn projection_from_columns<R: Real>(
    dim: usize,
    basis: &[CVec<R>],
    tol: &Tolerances<R>,
) -> Result<Projection<R>> {
    for v in basis {
        check_dim(dim, v.len())?;
        crate::linalg::check_finite_vec(v)?;
    }
    if basis.is_empty() {
        return Ok(Projection::zero(dim));
    }
    let a = CMat::from_fn(dim, basis.len(), |i, k| basis[k][i]);
    let f = svd_unchecked(&a);
    let top = f.singular_values.first().copied().unwrap_or_else(R::zero);
    let cutoff = tol.rank_tol * R::one().max(top);
    let cols: Vec<CVec<R>> = f
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(k, _)| f.u.column(k).into_owned())
        .collect();
    Ok(Projection::from_orthonormal_columns(dim, &cols))
}

/// Projection onto `ran P ∩ ran Q`: the eigenvalue-2 eigenspace of `P + Q`.
pub fn meet<R: Real>(p: &Projection<R>, q: &Projection<R>, tol: &Tolerances<R>) -> Result<Projection<R>> {
    check_dim(p.dim(), q.dim())?;
    let n = p.dim();
    let eig = hermitian_eig_unchecked(&(p.matrix() + q.matrix()));
    let cut = R::lit(2.0) - tol.rank_tol;
    let cols: Vec<CVec<R>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= cut)
        .map(|(k, _)| eig.vectors.column(k).into_owned())
        .collect();
    Ok(Projection::from_orthonormal_columns(n, &cols))
}

/// `(P⊥ ∧ Q⊥)⊥`.
pub fn join<R: Real>(p: &Projection<R>, q: &Projection<R>, tol: &Tolerances<R>) -> Result<Projection<R>> {
    Ok(meet(&p.complement(), &q.complement(), tol)?.complement())
}

/// Finite family of projections containing `0` and `I`.
#[derive(Debug, Clone)]
pub struct SubspaceLattice<R: Real> {
    dim: usize,
    elements: Vec<Projection<R>>,
    is_commutative: bool,
}

impl<R: Real> SubspaceLattice<R> {
    /// Wraps a family that the caller knows to be meet/join closed. Duplicates
    /// are removed and `0`, `I` are added when missing; closure is not recomputed.
    pub fn from_elements(dim: usize, elements: Vec<Projection<R>>, tol: &Tolerances<R>) -> Result<Self> {
        let mut out: Vec<Projection<R>> = vec![Projection::zero(dim)];
        for e in elements {
            check_dim(dim, e.dim())?;
            if !out.iter().any(|o| o.approx_eq(&e, tol)) {
                out.push(e);
            }
        }
        let id = Projection::identity(dim);
        if !out.iter().any(|o| o.approx_eq(&id, tol)) {
            out.push(id);
        }
        Ok(Self::with_flags(dim, out, tol))
    }

    fn with_flags(dim: usize, elements: Vec<Projection<R>>, tol: &Tolerances<R>) -> Self {
        let is_commutative = elements
            .iter()
            .enumerate()
            .all(|(i, p)| elements[i + 1..].iter().all(|q| p.commutes_with(q, tol)));
        SubspaceLattice { dim, elements, is_commutative }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Projection<R>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_commutative(&self) -> bool {
        self.is_commutative
    }

    pub fn contains(&self, p: &Projection<R>, tol: &Tolerances<R>) -> bool {
        self.elements.iter().any(|e| e.approx_eq(p, tol))
    }

    /// Pairwise meet/join closure check.
    pub fn is_closed(&self, tol: &Tolerances<R>) -> bool {
        for (i, p) in self.elements.iter().enumerate() {
            for q in &self.elements[i + 1..] {
                let ok = meet(p, q, tol).map(|m| self.contains(&m, tol)).unwrap_or(false)
                    && join(p, q, tol).map(|j| self.contains(&j, tol)).unwrap_or(false);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// The lattice `{L⊥ : L ∈ self}`; invariant subspaces of the adjoint algebra.
    pub fn complements(&self) -> Self {
        SubspaceLattice {
            dim: self.dim,
            elements: self.elements.iter().map(|e| e.complement()).collect(),
            is_commutative: self.is_commutative,
        }
    }
}

/// Smallest meet/join closed family containing `generators ∪ {0, I}`.
pub fn lattice_closure<R: Real>(
    dim: usize,
    generators: &[Projection<R>],
    max_size: usize,
    tol: &Tolerances<R>,
) -> Result<SubspaceLattice<R>> {
    if max_size < 2 {
        return Err(Error::InvalidArgument("max_size must be at least 2".into()));
    }
    let mut elements: Vec<Projection<R>> = vec![Projection::zero(dim), Projection::identity(dim)];
    let push = |elements: &mut Vec<Projection<R>>, p: Projection<R>| -> Result<bool> {
        if elements.iter().any(|e| e.approx_eq(&p, tol)) {
            return Ok(false);
        }
        if elements.len() >= max_size {
            return Err(Error::ClosureOverflow { max_size });
        }
        elements.push(p);
        Ok(true)
    };
    for g in generators {
        check_dim(dim, g.dim())?;
        push(&mut elements, g.clone())?;
    }
    // pairs (i, j) with j < done are already combined
    let mut done = 0;
    while done < elements.len() {
        let j = done;
        for i in 0..j {
            let m = meet(&elements[i], &elements[j], tol)?;
            push(&mut elements, m)?;
            let jn = join(&elements[i], &elements[j], tol)?;
            push(&mut elements, jn)?;
        }
        done += 1;
    }
    Ok(SubspaceLattice::with_flags(dim, elements, tol))
}

/// Whether `‖(I - L) T L‖ ≤ eq_tol` for every generator `T`.
pub fn check_invariant<R: Real>(l: &Projection<R>, generators: &[CMat<R>], tol: &Tolerances<R>) -> Result<bool> {
    let lp = l.complement();
    for t in generators {
        check_dim(l.dim(), t.nrows())?;
        check_dim(l.dim(), t.ncols())?;
        if op_norm(&(lp.matrix() * t * l.matrix())) > tol.eq_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum of `‖L⊥x‖² + ‖Ly‖²` over the lattice, i.e. `d((x, y), E_L)²`.
///
/// Ties go to the smallest rank, then to the earliest element.
#[derive(Debug, Clone)]
pub struct LatDistance<R: Real> {
    pub value: R,
    pub argmin: Projection<R>,
    pub index: usize,
}

pub fn lat_distance_sq<R: Real>(
    lattice: &SubspaceLattice<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
) -> Result<LatDistance<R>> {
    check_dim(lattice.dim(), x.len())?;
    check_dim(lattice.dim(), y.len())?;
    let scale = R::one().max(vec_norm_sq(x) + vec_norm_sq(y));
    let tie = tol.eq_tol * scale;
    let mut best: Option<(R, usize)> = None;
    for (k, e) in lattice.elements().iter().enumerate() {
        let v = e.split_cost(x, y);
        best = match best {
            None => Some((v, k)),
            Some((bv, bk)) => {
                let better = v < bv - tie
                    || (v <= bv + tie && e.rank() < lattice.elements()[bk].rank());
                if better {
                    Some((v, k))
                } else {
                    Some((bv, bk))
                }
            }
        };
    }
    let (_, index) = best.expect("lattice always holds 0 and I");
    // report the exact minimum; the tie window only steers the argmin choice
    let value = lattice
        .elements()
        .iter()
        .map(|e| e.split_cost(x, y))
        .fold(R::max_value().unwrap_or_else(R::one), |a, b| a.min(b));
    Ok(LatDistance { value, argmin: lattice.elements()[index].clone(), index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{approx_eq, basis_vector, diag, real_vector};
    use crate::random::{random_unit_vector, random_unitary, rng_from_seed};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn mask(bits: &[f64]) -> Projection<f64> {
        Projection::from_matrix(diag(bits), &tol()).unwrap()
    }

    #[test]
    fn projection_from_columns_examples() {
        let p = projection_from_columns(2, &[basis_vector::<f64>(2, 0)], &tol()).unwrap();
        assert!(approx_eq(p.matrix(), &diag(&[1.0, 0.0]), 1e-12));
        assert_eq!(p.rank(), 1);

        let p = projection_from_columns::<f64>(3, &[], &tol()).unwrap();
        assert_eq!(p.rank(), 0);
        assert!(approx_eq(p.matrix(), &zeros(3, 3), 1e-15));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cols = [real_vector::<f64>(&[s, s]), real_vector(&[s, -s])];
        let p = projection_from_columns(2, &cols, &tol()).unwrap();
        assert!(approx_eq(p.matrix(), &identity(2), 1e-12));
        assert_eq!(p.rank(), 2);

        let bad = [real_vector::<f64>(&[1.0, 0.0, 0.0])];
        assert!(matches!(projection_from_columns(2, &bad, &tol()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_non_projection() {
        assert!(matches!(Projection::from_matrix(diag(&[0.5, 1.0]), &tol()), Err(Error::NotProjection(_))));
    }

    #[test]
    fn meet_and_join_of_masks() {
        let p = mask(&[1.0, 1.0, 0.0]);
        let q = mask(&[0.0, 1.0, 1.0]);
        let m = meet(&p, &q, &tol()).unwrap();
        assert!(approx_eq(m.matrix(), &diag(&[0.0, 1.0, 0.0]), 1e-12));
        assert!(approx_eq(m.matrix(), &(p.matrix() * q.matrix()), 1e-12));
        assert!(meet(&p, &p, &tol()).unwrap().approx_eq(&p, &tol()));

        let j = join(&mask(&[1.0, 0.0, 0.0]), &mask(&[0.0, 1.0, 0.0]), &tol()).unwrap();
        assert!(approx_eq(j.matrix(), &diag(&[1.0, 1.0, 0.0]), 1e-12));
        assert!(join(&p, &Projection::zero(3), &tol()).unwrap().approx_eq(&p, &tol()));
    }

    #[test]
    fn distinct_lines_meet_zero_join_identity() {
        let a = projection_from_columns(2, &[real_vector::<f64>(&[1.0, 0.3])], &tol()).unwrap();
        let b = projection_from_columns(2, &[real_vector::<f64>(&[1.0, -0.3])], &tol()).unwrap();
        assert_eq!(meet(&a, &b, &tol()).unwrap().rank(), 0);
        let j = join(&a, &b, &tol()).unwrap();
        assert!(approx_eq(j.matrix(), &identity(2), 1e-9));
    }

    #[test]
    fn closure_examples() {
        let l = lattice_closure(2, &[mask(&[1.0, 0.0])], 16, &tol()).unwrap();
        assert_eq!(l.len(), 3);
        assert!(l.is_commutative());

        let l = lattice_closure(3, &[mask(&[1.0, 1.0, 0.0]), mask(&[0.0, 1.0, 1.0])], 16, &tol()).unwrap();
        assert_eq!(l.len(), 5);
        assert!(l.is_commutative());
        assert!(l.contains(&mask(&[0.0, 1.0, 0.0]), &tol()));
        assert!(l.is_closed(&tol()));
    }

    #[test]
    fn closure_overflow_is_an_error() {
        let gens = [mask(&[1.0, 0.0, 0.0, 0.0]), mask(&[0.0, 1.0, 0.0, 0.0]), mask(&[0.0, 0.0, 1.0, 0.0])];
        assert_eq!(lattice_closure(4, &gens, 6, &tol()).unwrap_err(), Error::ClosureOverflow { max_size: 6 });
        assert_eq!(lattice_closure(4, &gens, 16, &tol()).unwrap().len(), 9);
    }

    #[test]
    fn invariance_checks() {
        let upper = crate::linalg::real_matrix::<f64>(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        assert!(check_invariant(&mask(&[1.0, 0.0]), &[upper], &tol()).unwrap());
        let nil = crate::linalg::real_matrix::<f64>(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(!check_invariant(&mask(&[0.0, 1.0]), &[nil], &tol()).unwrap());
    }

    #[test]
    fn lat_distance_examples() {
        let trivial = lattice_closure::<f64>(2, &[], 4, &tol()).unwrap();
        let x = real_vector(&[0.6, 0.8]);
        let y = real_vector(&[0.0, 1.0]);
        assert!((lat_distance_sq(&trivial, &x, &y, &tol()).unwrap().value - 1.0).abs() < 1e-12);

        let nest = lattice_closure(2, &[mask(&[1.0, 0.0])], 8, &tol()).unwrap();
        let e1 = real_vector(&[1.0, 0.0]);
        let e2 = real_vector(&[0.0, 1.0]);
        let d = lat_distance_sq(&nest, &e1, &e2, &tol()).unwrap();
        assert!(d.value.abs() < 1e-14);
        assert!(d.argmin.approx_eq(&mask(&[1.0, 0.0]), &tol()));

        let d = lat_distance_sq(&nest, &e2, &e1, &tol()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-14);
        assert_eq!(d.argmin.rank(), 0);
    }

    #[test]
    fn lattice_laws_on_rotated_csl() {
        let mut rng = rng_from_seed(31);
        let u = random_unitary::<f64>(&mut rng, 4);
        let rot = |bits: &[f64]| Projection::from_matrix(&u * diag(bits) * u.adjoint(), &tol()).unwrap();
        let gens = [rot(&[1.0, 1.0, 0.0, 0.0]), rot(&[0.0, 1.0, 1.0, 0.0]), rot(&[1.0, 0.0, 0.0, 0.0])];
        let l = lattice_closure(4, &gens, 32, &tol()).unwrap();
        assert!(l.is_commutative());
        assert!(l.is_closed(&tol()));
        let t = tol();
        let els = l.elements();
        for a in els {
            let sum = a.matrix() + a.complement().matrix() - identity::<f64>(4);
            assert!(op_norm(&sum) <= 1e-12);
            for b in els {
                let m = meet(a, b, &t).unwrap();
                assert!(m.approx_eq(&meet(b, a, &t).unwrap(), &t));
                assert!(approx_eq(m.matrix(), &(a.matrix() * b.matrix()), 1e-9));
                assert!(meet(a, &join(a, b, &t).unwrap(), &t).unwrap().approx_eq(a, &t));
                assert!(join(a, &meet(a, b, &t).unwrap(), &t).unwrap().approx_eq(a, &t));
                for c in els {
                    let l1 = meet(&meet(a, b, &t).unwrap(), c, &t).unwrap();
                    let r1 = meet(a, &meet(b, c, &t).unwrap(), &t).unwrap();
                    assert!(l1.approx_eq(&r1, &t));
                }
            }
        }
        for _ in 0..50 {
            let x = random_unit_vector::<f64>(&mut rng, 4);
            let y = random_unit_vector::<f64>(&mut rng, 4);
            let d = lat_distance_sq(&l, &x, &y, &t).unwrap().value;
            assert!(d <= 1.0 + 1e-12);
            let coarse = lattice_closure(4, &gens[..1], 32, &t).unwrap();
            assert!(d <= lat_distance_sq(&coarse, &x, &y, &t).unwrap().value + 1e-12);
        }
    }
}
