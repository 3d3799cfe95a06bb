//! Dense complex linear algebra with explicit tolerances.
//!
//! Factorizations are delegated to `nalgebra`; this module normalizes their
//! output (descending order, finiteness checks) and adds the handful of norms
//! and matrix functions the rest of the crate is written against.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

pub use nalgebra::Complex;

/// Dense complex matrix, column-major storage.
pub type CMat<R> = DMatrix<Complex<R>>;
/// Dense complex column vector.
pub type CVec<R> = DVector<Complex<R>>;

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<R> {
    /// Operator-norm threshold for matrix equality (scaled by dimension where compared).
    pub eq_tol: R,
    /// Eigenvalue / singular value cutoff for range and kernel splits.
    pub rank_tol: R,
    /// Relative width target for norm brackets.
    pub solver_tol: R,
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        let eps = R::machine_eps();
        Tolerances {
            eq_tol: R::lit(1e-9).max(eps * R::lit(64.0)),
            rank_tol: R::lit(1e-10).max(eps * R::lit(64.0)),
            solver_tol: R::lit(1e-7).max(eps * R::lit(1024.0)),
        }
    }
}

impl<R: Real> Tolerances<R> {
    pub fn validate(&self) -> Result<()> {
        let eps = R::machine_eps();
        let ok = |v: R| v.is_finite() && v > R::zero();
        if !ok(self.eq_tol) || !ok(self.rank_tol) || !ok(self.solver_tol) {
            return Err(Error::InvalidArgument("tolerances must be positive and finite".into()));
        }
        if self.eq_tol < eps {
            return Err(Error::InvalidArgument("eq_tol below machine epsilon".into()));
        }
        Ok(())
    }

    /// Equality threshold for `dim`-dimensional operators.
    pub fn eq_scaled(&self, dim: usize) -> R {
        self.eq_tol * R::lit(dim.max(1) as f64)
    }
}

pub fn cx<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

pub fn cr<R: Real>(re: R) -> Complex<R> {
    Complex::new(re, R::zero())
}

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    CMat::identity(n, n)
}

pub fn zeros<R: Real>(rows: usize, cols: usize) -> CMat<R> {
    CMat::zeros(rows, cols)
}

/// Builds a real diagonal matrix.
pub fn diag<R: Real>(entries: &[R]) -> CMat<R> {
    let n = entries.len();
    CMat::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { Complex::new(R::zero(), R::zero()) })
}

/// Builds a real matrix from row-major data.
pub fn real_matrix<R: Real>(rows: usize, cols: usize, data: &[f64]) -> CMat<R> {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| cr(R::lit(data[i * cols + j])))
}

pub fn real_vector<R: Real>(data: &[f64]) -> CVec<R> {
    CVec::from_iterator(data.len(), data.iter().map(|&v| cr(R::lit(v))))
}

pub fn basis_vector<R: Real>(n: usize, k: usize) -> CVec<R> {
    let mut v = CVec::zeros(n);
    v[k] = cr(R::one());
    v
}

/// `x y*`.
pub fn outer<R: Real>(x: &CVec<R>, y: &CVec<R>) -> CMat<R> {
    x * y.adjoint()
}

/// Hilbert–Schmidt inner product `<a, b> = tr(b* a)`, linear in `a`.
pub fn hs_inner<R: Real>(a: &CMat<R>, b: &CMat<R>) -> Complex<R> {
    b.dotc(a)
}

pub fn hs_norm<R: Real>(m: &CMat<R>) -> R {
    m.norm()
}

pub fn vec_norm<R: Real>(v: &CVec<R>) -> R {
    v.norm()
}

pub fn vec_norm_sq<R: Real>(v: &CVec<R>) -> R {
    v.norm_squared()
}

/// `(a, b) = b* a`, linear in the first slot like the Hilbert space inner product.
pub fn inner<R: Real>(a: &CVec<R>, b: &CVec<R>) -> Complex<R> {
    b.dotc(a)
}

pub fn is_finite_matrix<R: Real>(m: &CMat<R>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn check_finite<R: Real>(m: &CMat<R>) -> Result<()> {
    if is_finite_matrix(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_finite_vec<R: Real>(v: &CVec<R>) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn check_square<R: Real>(m: &CMat<R>) -> Result<usize> {
    check_dim(m.nrows(), m.ncols())?;
    Ok(m.nrows())
}

/// Operator norm of `m - m*`.
pub fn hermitian_defect<R: Real>(m: &CMat<R>) -> R {
    op_norm(&(m - m.adjoint()))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig<R: Real> {
    /// Eigenvalues, descending.
    pub values: Vec<R>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: CMat<R>,
}

impl<R: Real> HermitianEig<R> {
    /// Projection onto the span of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projection(&self, keep: impl Fn(R) -> bool) -> CMat<R> {
        let n = self.vectors.nrows();
        let mut p = zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            if keep(lam) {
                let u = self.vectors.column(k);
                p += u * u.adjoint();
            }
        }
        p
    }

    /// `U f(Λ) U*`.
    pub fn apply(&self, f: impl Fn(R) -> R) -> CMat<R> {
        let scaled = CMat::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, k| {
            self.vectors[(i, k)] * cr(f(self.values[k]))
        });
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.
///
/// The input is symmetrized before factorization once the asymmetry check passes.
pub fn hermitian_eig<R: Real>(m: &CMat<R>, tol: &Tolerances<R>) -> Result<HermitianEig<R>> {
    let n = check_square(m)?;
    check_finite(m)?;
    let defect = hermitian_defect(m);
    if defect > tol.eq_scaled(n) * R::one().max(op_norm(m)) {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    Ok(hermitian_eig_unchecked(m))
}

pub(crate) fn hermitian_eig_unchecked<R: Real>(m: &CMat<R>) -> HermitianEig<R> {
    let n = m.nrows();
    if n == 0 {
        return HermitianEig { values: vec![], vectors: zeros(0, 0) };
    }
    let sym = (m + m.adjoint()) * cr(R::lit(0.5));
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the factorization's order within ties
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    HermitianEig { values, vectors }
}

/// Singular value decomposition `M = U diag(s) V*` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd<R: Real> {
    pub u: CMat<R>,
    pub singular_values: Vec<R>,
    pub v: CMat<R>,
}

impl<R: Real> Svd<R> {
    pub fn reconstruct(&self) -> CMat<R> {
        let scaled = CMat::from_fn(self.u.nrows(), self.u.ncols(), |i, k| {
            self.u[(i, k)] * cr(self.singular_values[k])
        });
        scaled * self.v.adjoint()
    }

    /// `U g(Σ) V*` for a map applied to each singular value.
    pub fn remap(&self, g: impl Fn(R) -> R) -> CMat<R> {
        let scaled = CMat::from_fn(self.u.nrows(), self.u.ncols(), |i, k| {
            self.u[(i, k)] * cr(g(self.singular_values[k]))
        });
        scaled * self.v.adjoint()
    }
}

/// Thin SVD; `u` is `rows × k`, `v` is `cols × k` with `k = min(rows, cols)`.
pub fn svd<R: Real>(m: &CMat<R>) -> Result<Svd<R>> {
    check_finite(m)?;
    Ok(svd_unchecked(m))
}

pub(crate) fn svd_unchecked<R: Real>(m: &CMat<R>) -> Svd<R> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd { u: zeros(r, 0), singular_values: vec![], v: zeros(c, 0) };
    }
    let f = m.clone().svd(true, true);
    let u = f.u.expect("left singular vectors requested");
    let v_t = f.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        f.singular_values[b]
            .partial_cmp(&f.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Svd {
        u: CMat::from_fn(r, k, |i, j| u[(i, order[j])]),
        singular_values: order.iter().map(|&j| f.singular_values[j]).collect(),
        v: CMat::from_fn(c, k, |i, j| v_t[(order[j], i)].conjugate()),
    }
}

pub fn singular_values<R: Real>(m: &CMat<R>) -> Vec<R> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<R> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Largest singular value.
pub fn op_norm<R: Real>(m: &CMat<R>) -> R {
    singular_values(m).first().copied().unwrap_or_else(R::zero)
}

/// Sum of singular values.
pub fn trace_norm<R: Real>(m: &CMat<R>) -> Result<R> {
    check_finite(m)?;
    Ok(singular_values(m).into_iter().fold(R::zero(), |acc, s| acc + s))
}

/// Hilbert–Schmidt nearest contraction, `U min(Σ, 1) V*`.
pub fn clip_to_contraction<R: Real>(m: &CMat<R>) -> Result<CMat<R>> {
    let f = svd(m)?;
    if f.singular_values.first().is_none_or(|&s| s <= R::one()) {
        return Ok(m.clone());
    }
    Ok(f.remap(|s| s.min(R::one())))
}

/// Partial isometry `U V*` over the singular values above `cutoff`; the
/// maximizer of `Re <W, m>` over contractions `W`.
pub fn polar_part<R: Real>(m: &CMat<R>, cutoff: R) -> CMat<R> {
    let f = svd_unchecked(m);
    f.remap(|s| if s > cutoff { R::one() } else { R::zero() })
}

/// Whether two operators agree within `tol · dim` in operator norm.
pub fn approx_eq<R: Real>(a: &CMat<R>, b: &CMat<R>, tol: R) -> bool {
    a.shape() == b.shape() && op_norm(&(a - b)) <= tol * R::lit(a.nrows().max(1) as f64)
}

/// Block-diagonal assembly.
pub fn block_diag<R: Real>(blocks: &[&CMat<R>]) -> CMat<R> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2<R: Real>(a: &CMat<R>, b: &CMat<R>, c: &CMat<R>, d: &CMat<R>) -> CMat<R> {
    let h = a.nrows();
    let mut out = zeros(2 * h, 2 * h);
    out.view_mut((0, 0), (h, h)).copy_from(a);
    out.view_mut((0, h), (h, h)).copy_from(b);
    out.view_mut((h, 0), (h, h)).copy_from(c);
    out.view_mut((h, h), (h, h)).copy_from(d);
    out
}

pub fn concat_vectors<R: Real>(parts: &[&CVec<R>]) -> CVec<R> {
    let n: usize = parts.iter().map(|p| p.len()).sum();
    CVec::from_iterator(n, parts.iter().flat_map(|p| p.iter().copied()))
}

/// Real-valued helper: `max |z|` over entries.
pub fn max_abs<R: Real>(m: &CMat<R>) -> R {
    m.iter().fold(R::zero(), |acc, z| acc.max(z.modulus()))
}
