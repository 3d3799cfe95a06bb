//! Finite-dimensional operator algebras: membership, Hilbert–Schmidt projection,
//! commutants and conditional expectations.
//!
//! Every model with a finite description carries a [`MemberFrame`]: invertible
//! `L`, `R` and groups of matrix cells such that the members are exactly
//! `L · (Σ c_k N_k) · R`, where `N_k` is the normalized indicator of group `k`.

use std::sync::{Arc, OnceLock};

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::halmos::HalmosModel;
use crate::lattice::{Projection, SubspaceLattice};
use crate::linalg::{
    block_diag, cr, cx, hermitian_eig_unchecked, hs_inner, identity, op_norm, zeros, CMat, CVec,
    Complex, Tolerances,
};
use crate::random::complex_normal;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct CellGroup<R: Real> {
    pub cells: Vec<(usize, usize)>,
    pub weight: R,
}

/// Coordinates for the linear span of an algebra.
#[derive(Debug)]
pub(crate) struct MemberFrame<R: Real> {
    n: usize,
    left: CMat<R>,
    right: CMat<R>,
    /// `left` unitary and `right = left*`; the group basis is then HS-orthonormal.
    unitary: bool,
    groups: Vec<CellGroup<R>>,
    ortho: OnceLock<CMat<R>>,
}

impl<R: Real> MemberFrame<R> {
    fn new(left: CMat<R>, right: CMat<R>, unitary: bool, groups: Vec<CellGroup<R>>) -> Self {
        MemberFrame { n: left.nrows(), left, right, unitary, groups, ortho: OnceLock::new() }
    }

    fn standard(n: usize, groups: Vec<CellGroup<R>>) -> Self {
        Self::new(identity(n), identity(n), true, groups)
    }

    fn singletons(cells: impl IntoIterator<Item = (usize, usize)>) -> Vec<CellGroup<R>> {
        cells.into_iter().map(|c| CellGroup { cells: vec![c], weight: R::one() }).collect()
    }

    pub fn groups(&self) -> &[CellGroup<R>] {
        &self.groups
    }

    /// Number of real coordinates.
    pub fn real_dim(&self) -> usize {
        2 * self.groups.len()
    }

    /// Inner matrix `Σ c_k N_k` from interleaved real coordinates.
    fn inner_matrix(&self, c: &DVector<R>) -> CMat<R> {
        let mut x = zeros(self.n, self.n);
        for (k, g) in self.groups.iter().enumerate() {
            let z = cx(c[2 * k], c[2 * k + 1]) * cr(g.weight);
            for &(i, j) in &g.cells {
                x[(i, j)] = z;
            }
        }
        x
    }

    pub fn member(&self, c: &DVector<R>) -> CMat<R> {
        &self.left * self.inner_matrix(c) * &self.right
    }

    /// `p_k = ⟨E_k, M⟩` for the frame basis `E_k = L N_k R`.
    pub fn pairing(&self, m: &CMat<R>) -> Vec<Complex<R>> {
        let y = self.left.adjoint() * m * self.right.adjoint();
        self.groups
            .iter()
            .map(|g| {
                g.cells.iter().fold(Complex::new(R::zero(), R::zero()), |acc, &(i, j)| acc + y[(i, j)].conjugate())
                    * cr(g.weight)
            })
            .collect()
    }

    /// Real gradient of `c ↦ Re⟨T(c), M⟩`.
    pub fn real_pairing(&self, m: &CMat<R>) -> DVector<R> {
        let p = self.pairing(m);
        DVector::from_fn(self.real_dim(), |r, _| if r % 2 == 0 { p[r / 2].re } else { -p[r / 2].im })
    }

    /// Real Hessian of `c ↦ -log det(I - T T*)` at `T`, given `rm = (I - T T*)⁻¹`.
    pub fn barrier_hessian(&self, t: &CMat<R>, rm: &CMat<R>) -> DMatrix<R> {
        let two = R::lit(2.0);
        let a = self.left.adjoint() * rm * &self.left;
        let mid = identity::<R>(self.n) + t.adjoint() * rm * t;
        let m = &self.right * mid * self.right.adjoint();
        let y = &self.right * t.adjoint() * rm * &self.left;
        let k = self.groups.len();
        let mut h = DMatrix::zeros(2 * k, 2 * k);
        for (j, gj) in self.groups.iter().enumerate() {
            for (l, gl) in self.groups.iter().enumerate().skip(j) {
                let mut alpha = Complex::new(R::zero(), R::zero());
                let mut beta = alpha;
                for &(ai, bi) in &gj.cells {
                    for &(ci, di) in &gl.cells {
                        alpha += a[(ai, ci)] * m[(di, bi)];
                        beta += y[(bi, ci)] * y[(di, ai)];
                    }
                }
                let w = gj.weight * gl.weight * two;
                alpha *= cr(w);
                beta *= cr(w);
                let rr = alpha.re + beta.re;
                let ri = -alpha.im - beta.im;
                let ir = alpha.im - beta.im;
                let ii = alpha.re - beta.re;
                h[(2 * j, 2 * l)] = rr;
                h[(2 * j, 2 * l + 1)] = ri;
                h[(2 * j + 1, 2 * l)] = ir;
                h[(2 * j + 1, 2 * l + 1)] = ii;
                if l != j {
                    h[(2 * l, 2 * j)] = rr;
                    h[(2 * l + 1, 2 * j)] = ri;
                    h[(2 * l, 2 * j + 1)] = ir;
                    h[(2 * l + 1, 2 * j + 1)] = ii;
                }
            }
        }
        h
    }

    /// Columns form an HS-orthonormal basis of the member span (as column-major vecs).
    fn ortho_basis(&self) -> &CMat<R> {
        self.ortho.get_or_init(|| {
            let n = self.n;
            let k = self.groups.len();
            let mut span = zeros(n * n, k);
            for (col, g) in self.groups.iter().enumerate() {
                let mut e = zeros(n, n);
                for &(i, j) in &g.cells {
                    e += self.left.column(i) * self.right.row(j) * cr(g.weight);
                }
                for (r, v) in e.iter().enumerate() {
                    span[(r, col)] = *v;
                }
            }
            if k == 0 {
                return span;
            }
            span.qr().q()
        })
    }

    pub fn project(&self, m: &CMat<R>) -> CMat<R> {
        let n = self.n;
        if self.unitary {
            let y = self.left.adjoint() * m * self.right.adjoint();
            let mut out = zeros(n, n);
            for g in &self.groups {
                let s = g.cells.iter().fold(Complex::new(R::zero(), R::zero()), |acc, &(i, j)| acc + y[(i, j)]);
                let v = s * cr(g.weight * g.weight);
                for &(i, j) in &g.cells {
                    out[(i, j)] = v;
                }
            }
            return &self.left * out * &self.right;
        }
        let q = self.ortho_basis();
        let v = CVec::from_iterator(n * n, m.iter().copied());
        let coeff = q.adjoint() * v;
        let p = q * coeff;
        CMat::from_iterator(n, n, p.iter().copied())
    }

    pub fn random_member(&self, rng: &mut impl Rng) -> CMat<R> {
        let c = DVector::from_fn(self.real_dim(), |_, _| {
            let z: Complex<R> = complex_normal(rng);
            z.re * R::lit(std::f64::consts::SQRT_2)
        });
        self.member(&c)
    }

    fn direct_sum(parts: &[&MemberFrame<R>]) -> Self {
        let lefts: Vec<&CMat<R>> = parts.iter().map(|f| &f.left).collect();
        let rights: Vec<&CMat<R>> = parts.iter().map(|f| &f.right).collect();
        let mut groups = Vec::new();
        let mut off = 0;
        for f in parts {
            for g in &f.groups {
                groups.push(CellGroup {
                    cells: g.cells.iter().map(|&(i, j)| (i + off, j + off)).collect(),
                    weight: g.weight,
                });
            }
            off += f.n;
        }
        let unitary = parts.iter().all(|f| f.unitary);
        Self::new(block_diag(&lefts), block_diag(&rights), unitary, groups)
    }
}

/// The kind-specific data of an [`AlgebraModel`].
#[derive(Debug, Clone)]
pub enum AlgebraKind<R: Real> {
    /// All of `B(C^n)`.
    Full,
    /// `Alg L` for a commutative lattice.
    Csl(SubspaceLattice<R>),
    /// Operators leaving the two Halmos subspaces invariant.
    TwoSubspace(Box<HalmosModel<R>>),
    /// `⊕ (M_size ⊗ I_mult)` for each `(size, mult)`.
    BlockVonNeumann(Vec<(usize, usize)>),
    DirectSum(Vec<AlgebraModel<R>>),
}

/// Concrete finite-dimensional algebra.
#[derive(Debug, Clone)]
pub struct AlgebraModel<R: Real> {
    dim: usize,
    kind: AlgebraKind<R>,
    frame: Option<Arc<MemberFrame<R>>>,
    /// Joint eigenbasis for CSL kinds.
    joint_basis: Option<CMat<R>>,
}

impl<R: Real> AlgebraModel<R> {
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let cells = (0..n).flat_map(|j| (0..n).map(move |i| (i, j)));
        let frame = MemberFrame::standard(n, MemberFrame::singletons(cells));
        Ok(AlgebraModel { dim: n, kind: AlgebraKind::Full, frame: Some(Arc::new(frame)), joint_basis: None })
    }

    /// `Alg L` for a commutative lattice; the lattice is not re-closed.
    pub fn csl(lattice: SubspaceLattice<R>, tol: &Tolerances<R>) -> Result<Self> {
        if !lattice.is_commutative() {
            return Err(Error::NotCommutative);
        }
        let n = lattice.dim();
        let u = joint_eigenbasis(&lattice, tol)?;
        let masks: Vec<Vec<bool>> = lattice
            .elements()
            .iter()
            .map(|p| {
                let d = u.adjoint() * p.matrix() * &u;
                (0..n).map(|i| d[(i, i)].re > R::lit(0.5)).collect()
            })
            .collect();
        let cells = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter(|&(i, j)| masks.iter().all(|m| !m[j] || m[i]));
        let frame = MemberFrame::new(u.clone(), u.adjoint(), true, MemberFrame::singletons(cells));
        Ok(AlgebraModel { dim: n, kind: AlgebraKind::Csl(lattice), frame: Some(Arc::new(frame)), joint_basis: Some(u) })
    }

    pub fn two_subspace(model: HalmosModel<R>) -> Self {
        let n = model.dim();
        let h = model.h0_dim();
        let frame = match (model.s(), model.s_inv()) {
            (Ok(s), Ok(si)) => {
                let cells = (0..n)
                    .flat_map(|j| (0..n).map(move |i| (i, j)))
                    .filter(|&(i, j)| (i < h) == (j < h));
                Some(Arc::new(MemberFrame::new(s.clone(), si.clone(), false, MemberFrame::singletons(cells))))
            }
            _ => None,
        };
        AlgebraModel { dim: n, kind: AlgebraKind::TwoSubspace(Box::new(model)), frame, joint_basis: None }
    }

    pub fn block_von_neumann(blocks: Vec<(usize, usize)>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|&(s, m)| s == 0 || m == 0) {
            return Err(Error::InvalidArgument("blocks must be nonempty with positive sizes".into()));
        }
        let n: usize = blocks.iter().map(|&(s, m)| s * m).sum();
        let mut groups = Vec::new();
        let mut off = 0;
        for &(s, m) in &blocks {
            let weight = R::one() / R::lit(m as f64).sqrt();
            for b in 0..s {
                for a in 0..s {
                    let cells = (0..m).map(|r| (off + a * m + r, off + b * m + r)).collect();
                    groups.push(CellGroup { cells, weight });
                }
            }
            off += s * m;
        }
        let frame = MemberFrame::standard(n, groups);
        Ok(AlgebraModel { dim: n, kind: AlgebraKind::BlockVonNeumann(blocks), frame: Some(Arc::new(frame)), joint_basis: None })
    }

    pub fn direct_sum(parts: Vec<AlgebraModel<R>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("direct sum needs at least one part".into()));
        }
        let n = parts.iter().map(|p| p.dim).sum();
        let frames: Option<Vec<&MemberFrame<R>>> = parts.iter().map(|p| p.frame.as_deref()).collect();
        let frame = frames.map(|f| Arc::new(MemberFrame::direct_sum(&f)));
        Ok(AlgebraModel { dim: n, kind: AlgebraKind::DirectSum(parts), frame, joint_basis: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &AlgebraKind<R> {
        &self.kind
    }

    /// Short human-readable description.
    pub fn summary(&self) -> String {
        match &self.kind {
            AlgebraKind::Full => format!("full({})", self.dim),
            AlgebraKind::Csl(l) => format!("csl(dim={}, elements={})", self.dim, l.len()),
            AlgebraKind::TwoSubspace(h) => format!("two_subspace(h0={})", h.h0_dim()),
            AlgebraKind::BlockVonNeumann(b) => {
                let parts: Vec<String> = b.iter().map(|(s, m)| format!("{s}x{m}")).collect();
                format!("block_von_neumann({})", parts.join(","))
            }
            AlgebraKind::DirectSum(p) => {
                let parts: Vec<String> = p.iter().map(|m| m.summary()).collect();
                format!("direct_sum({})", parts.join(" + "))
            }
        }
    }

    pub(crate) fn frame(&self) -> Result<&MemberFrame<R>> {
        self.frame.as_deref().ok_or(Error::AngleZero)
    }

    /// Dimension of the member span as a complex vector space.
    pub fn span_dim(&self) -> Result<usize> {
        Ok(self.frame()?.groups().len())
    }

    /// Joint eigenbasis of the lattice (CSL models only); members are masked there.
    pub fn joint_basis(&self) -> Option<&CMat<R>> {
        self.joint_basis.as_ref()
    }

    /// The invariant subspace lattice when it is finite and explicitly known.
    ///
    /// Direct sums enumerate the product lattice.
    pub fn lattice(&self, tol: &Tolerances<R>) -> Result<Option<SubspaceLattice<R>>> {
        match &self.kind {
            AlgebraKind::Full => SubspaceLattice::from_elements(self.dim, vec![], tol).map(Some),
            AlgebraKind::Csl(l) => Ok(Some(l.clone())),
            AlgebraKind::TwoSubspace(h) => Ok(Some(h.lattice().clone())),
            AlgebraKind::BlockVonNeumann(_) => Ok(None),
            AlgebraKind::DirectSum(parts) => {
                let mut acc: Vec<CMat<R>> = vec![zeros(0, 0)];
                for p in parts {
                    let Some(l) = p.lattice(tol)? else { return Ok(None) };
                    let mut next = Vec::with_capacity(acc.len() * l.len());
                    for a in &acc {
                        for e in l.elements() {
                            next.push(block_diag(&[a, e.matrix()]));
                        }
                    }
                    acc = next;
                }
                let elements = acc.into_iter().map(Projection::from_matrix_unchecked).collect();
                SubspaceLattice::from_elements(self.dim, elements, tol).map(Some)
            }
        }
    }

    /// Generators of the commutant `A′` (block von Neumann and full models).
    pub fn commutant_generators(&self) -> Option<Vec<CMat<R>>> {
        match &self.kind {
            AlgebraKind::Full => Some(vec![identity(self.dim)]),
            AlgebraKind::BlockVonNeumann(blocks) => Some(block_commutant_generators(blocks)),
            _ => None,
        }
    }

    pub fn membership(&self, t: &CMat<R>, tol: R) -> Result<bool> {
        check_dim(self.dim, t.nrows())?;
        check_dim(self.dim, t.ncols())?;
        let bound = tol * R::one().max(op_norm(t));
        Ok(match &self.kind {
            AlgebraKind::Full => true,
            AlgebraKind::Csl(l) => invariant_for_all(l, t, bound),
            AlgebraKind::TwoSubspace(h) => invariant_for_all(h.lattice(), t, bound),
            AlgebraKind::BlockVonNeumann(blocks) => block_commutant_generators::<R>(blocks)
                .iter()
                .all(|g| op_norm(&(t * g - g * t)) <= bound),
            AlgebraKind::DirectSum(parts) => {
                let mut off = 0;
                let mut ok = true;
                for p in parts {
                    let d = p.dim;
                    let mut rest = t.clone();
                    rest.view_mut((off, off), (d, d)).fill(cr(R::zero()));
                    let block = t.view((off, off), (d, d)).into_owned();
                    ok = ok
                        && p.membership(&block, tol)?
                        && rest.view((off, 0), (d, self.dim)).iter().all(|z| z.modulus() <= bound)
                        && rest.view((0, off), (self.dim, d)).iter().all(|z| z.modulus() <= bound);
                    off += d;
                }
                ok
            }
        })
    }

    /// HS-orthogonal projection onto the member span.
    pub fn hs_project(&self, m: &CMat<R>) -> Result<CMat<R>> {
        check_dim(self.dim, m.nrows())?;
        check_dim(self.dim, m.ncols())?;
        Ok(self.frame()?.project(m))
    }

    /// Random member with standard complex normal frame coordinates.
    pub fn random_member(&self, rng: &mut impl Rng) -> Result<CMat<R>> {
        Ok(self.frame()?.random_member(rng))
    }

    /// The adjoint algebra `A* = {T* : T ∈ A}` (CSL models and full algebras).
    pub fn adjoint_model(&self, tol: &Tolerances<R>) -> Result<Self> {
        match &self.kind {
            AlgebraKind::Full => Self::full(self.dim),
            AlgebraKind::Csl(l) => Self::csl(l.complements(), tol),
            AlgebraKind::DirectSum(parts) => {
                Self::direct_sum(parts.iter().map(|p| p.adjoint_model(tol)).collect::<Result<_>>()?)
            }
            _ => Err(Error::StructureMismatch("adjoint model needs a full or CSL algebra".into())),
        }
    }
}

fn invariant_for_all<R: Real>(l: &SubspaceLattice<R>, t: &CMat<R>, bound: R) -> bool {
    l.elements().iter().all(|p| {
        let pp = p.complement();
        op_norm(&(pp.matrix() * t * p.matrix())) <= bound
    })
}

fn block_commutant_generators<R: Real>(blocks: &[(usize, usize)]) -> Vec<CMat<R>> {
    let n: usize = blocks.iter().map(|&(s, m)| s * m).sum();
    let mut gens = Vec::new();
    let mut off = 0;
    for &(s, m) in blocks {
        let mut id = zeros(n, n);
        for i in 0..s * m {
            id[(off + i, off + i)] = cr(R::one());
        }
        gens.push(id);
        for r in 0..m.saturating_sub(1) {
            let mut up = zeros(n, n);
            let mut down = zeros(n, n);
            for a in 0..s {
                up[(off + a * m + r, off + a * m + r + 1)] = cr(R::one());
                down[(off + a * m + r + 1, off + a * m + r)] = cr(R::one());
            }
            gens.push(up);
            gens.push(down);
        }
        off += s * m;
    }
    gens
}

/// Orthonormal basis diagonalizing every element of a commutative lattice,
/// by successive splitting of each element's compression.
pub fn joint_eigenbasis<R: Real>(lattice: &SubspaceLattice<R>, tol: &Tolerances<R>) -> Result<CMat<R>> {
    let n = lattice.dim();
    let mut blocks: Vec<CMat<R>> = vec![identity(n)];
    let slack = tol.eq_scaled(n).max(R::lit(1e-6));
    for p in lattice.elements() {
        let mut next = Vec::with_capacity(blocks.len() + 1);
        for v in blocks {
            let c = v.adjoint() * p.matrix() * &v;
            let eig = hermitian_eig_unchecked(&c);
            let k = v.ncols();
            let hi: Vec<usize> = (0..k).filter(|&i| eig.values[i] > R::lit(0.5)).collect();
            let lo: Vec<usize> = (0..k).filter(|&i| eig.values[i] <= R::lit(0.5)).collect();
            if eig.values.iter().any(|&l| l.min((l - R::one()).abs()) > slack) {
                return Err(Error::NotCommutative);
            }
            for part in [hi, lo] {
                if !part.is_empty() {
                    let sub = CMat::from_fn(k, part.len(), |i, j| eig.vectors[(i, part[j])]);
                    next.push(&v * sub);
                }
            }
        }
        blocks = next;
    }
    let mut u = zeros(n, n);
    let mut col = 0;
    for b in &blocks {
        for j in 0..b.ncols() {
            u.set_column(col, &b.column(j));
            col += 1;
        }
    }
    Ok(u)
}

/// HS-orthogonal projection onto `{T : L⊥ T L = 0 for every L}` computed from the
/// vectorized constraint system.
pub fn constraint_projection<R: Real>(lattice: &SubspaceLattice<R>, m: &CMat<R>, tol: &Tolerances<R>) -> Result<CMat<R>> {
    let n = lattice.dim();
    check_dim(n, m.nrows())?;
    check_dim(n, m.ncols())?;
    let mut gram = zeros(n * n, n * n);
    for p in lattice.elements() {
        let op = p.matrix().transpose().kronecker(p.complement().matrix());
        gram += op.adjoint() * op;
    }
    let eig = hermitian_eig_unchecked(&gram);
    let scale = R::one().max(eig.values.first().copied().unwrap_or_else(R::zero));
    let null = eig.spectral_projection(|l| l <= tol.rank_tol * scale);
    let v = CVec::from_iterator(n * n, m.iter().copied());
    Ok(CMat::from_iterator(n, n, (null * v).iter().copied()))
}

/// HS-orthonormal basis of an operator subspace.
#[derive(Debug, Clone)]
pub struct OperatorSubspaceBasis<R: Real> {
    dim: usize,
    elements: Vec<CMat<R>>,
}

impl<R: Real> OperatorSubspaceBasis<R> {
    pub fn elements(&self) -> &[CMat<R>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `{X : XT = TX for all generators T}`.
pub fn commutant_basis<R: Real>(n: usize, generators: &[CMat<R>], tol: &Tolerances<R>) -> Result<OperatorSubspaceBasis<R>> {
    let id = identity::<R>(n);
    let mut gram = zeros(n * n, n * n);
    for g in generators {
        check_dim(n, g.nrows())?;
        check_dim(n, g.ncols())?;
        // vec(XG - GX) = (Gᵀ ⊗ I - I ⊗ G) vec(X)
        let op = g.transpose().kronecker(&id) - id.kronecker(g);
        gram += op.adjoint() * op;
    }
    let eig = hermitian_eig_unchecked(&gram);
    let scale = R::one().max(eig.values.first().copied().unwrap_or_else(R::zero));
    let elements = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= tol.rank_tol.sqrt() * scale)
        .map(|(k, _)| CMat::from_iterator(n, n, eig.vectors.column(k).iter().copied()))
        .collect();
    Ok(OperatorSubspaceBasis { dim: n, elements })
}

/// `Σ ⟨M, B_i⟩ B_i`.
pub fn conditional_expectation<R: Real>(basis: &OperatorSubspaceBasis<R>, m: &CMat<R>) -> Result<CMat<R>> {
    check_dim(basis.dim, m.nrows())?;
    check_dim(basis.dim, m.ncols())?;
    let mut out = zeros(basis.dim, basis.dim);
    for b in &basis.elements {
        out += b * hs_inner(m, b);
    }
    Ok(out)
}

/// Conditional expectation onto the commutant `⊕ (I_size ⊗ M_mult)` of a block
/// von Neumann algebra: partial average over the size factor in each block.
pub fn block_commutant_expectation<R: Real>(blocks: &[(usize, usize)], m: &CMat<R>) -> Result<CMat<R>> {
    let n: usize = blocks.iter().map(|&(s, m)| s * m).sum();
    check_dim(n, m.nrows())?;
    check_dim(n, m.ncols())?;
    let mut out = zeros(n, n);
    let mut off = 0;
    for &(s, mult) in blocks {
        let mut avg = zeros::<R>(mult, mult);
        for a in 0..s {
            for r in 0..mult {
                for q in 0..mult {
                    avg[(r, q)] += m[(off + a * mult + r, off + a * mult + q)];
                }
            }
        }
        avg *= cr(R::one() / R::lit(s as f64));
        for a in 0..s {
            for r in 0..mult {
                for q in 0..mult {
                    out[(off + a * mult + r, off + a * mult + q)] = avg[(r, q)];
                }
            }
        }
        off += s * mult;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lattice_closure;
    use crate::linalg::{approx_eq, diag, hs_norm, real_matrix};
    use crate::random::{random_matrix, random_unitary, rng_from_seed};

    type M = CMat<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn mask(bits: &[f64]) -> Projection<f64> {
        Projection::from_matrix(diag(bits), &tol()).unwrap()
    }

    fn nest2() -> AlgebraModel<f64> {
        let l = lattice_closure(2, &[mask(&[1.0, 0.0])], 8, &tol()).unwrap();
        AlgebraModel::csl(l, &tol()).unwrap()
    }

    fn rotated_csl(seed: u64) -> AlgebraModel<f64> {
        let mut rng = rng_from_seed(seed);
        let u = random_unitary::<f64>(&mut rng, 5);
        let rot = |bits: &[f64]| Projection::from_matrix(&u * diag(bits) * u.adjoint(), &tol()).unwrap();
        let gens = [rot(&[1.0, 1.0, 0.0, 0.0, 0.0]), rot(&[0.0, 1.0, 1.0, 1.0, 0.0]), rot(&[1.0, 0.0, 0.0, 0.0, 0.0])];
        AlgebraModel::csl(lattice_closure(5, &gens, 32, &tol()).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn nest_membership_and_projection() {
        let a = nest2();
        let upper = real_matrix::<f64>(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        assert!(a.membership(&upper, 1e-9).unwrap());
        let lower = real_matrix::<f64>(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(!a.membership(&lower, 1e-9).unwrap());
        let m = real_matrix::<f64>(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p = a.hs_project(&m).unwrap();
        assert!(approx_eq(&p, &real_matrix(2, 2, &[1.0, 2.0, 0.0, 4.0]), 1e-12));
        assert!(approx_eq(&a.hs_project(&p).unwrap(), &p, 1e-12));
    }

    #[test]
    fn hs_project_is_nearest_member() {
        let a = rotated_csl(21);
        let mut rng = rng_from_seed(22);
        let m: M = random_matrix(&mut rng, 5, 5);
        let p = a.hs_project(&m).unwrap();
        assert!(a.membership(&p, 1e-9).unwrap());
        let best = hs_norm(&(&m - &p));
        for _ in 0..2000 {
            let t = a.random_member(&mut rng).unwrap() * cr(0.5) + &p;
            assert!(hs_norm(&(&m - t)) >= best - 1e-12);
        }
    }

    #[test]
    fn hs_project_is_self_adjoint_and_matches_constraints() {
        let a = rotated_csl(23);
        let mut rng = rng_from_seed(24);
        let m: M = random_matrix(&mut rng, 5, 5);
        let n: M = random_matrix(&mut rng, 5, 5);
        let pm = a.hs_project(&m).unwrap();
        let pn = a.hs_project(&n).unwrap();
        assert!((hs_inner(&pm, &n) - hs_inner(&m, &pn)).norm() < 1e-10);
        let AlgebraKind::Csl(l) = a.kind() else { unreachable!() };
        let by_constraints = constraint_projection(l, &m, &tol()).unwrap();
        assert!(approx_eq(&pm, &by_constraints, 1e-9));
    }

    #[test]
    fn two_subspace_projection_is_orthogonal() {
        let h = HalmosModel::new(diag(&[0.9, 0.6, 0.3]), &tol()).unwrap();
        let a = AlgebraModel::two_subspace(h);
        let mut rng = rng_from_seed(25);
        let m: M = random_matrix(&mut rng, 6, 6);
        let p = a.hs_project(&m).unwrap();
        assert!(a.membership(&p, 1e-9).unwrap());
        assert!(approx_eq(&a.hs_project(&p).unwrap(), &p, 1e-10));
        for _ in 0..20 {
            let t = a.random_member(&mut rng).unwrap();
            assert!(hs_inner(&(&m - &p), &t).norm() < 1e-9);
        }
        let AlgebraKind::TwoSubspace(hm) = a.kind() else { unreachable!() };
        let by_constraints = constraint_projection(hm.lattice(), &m, &tol()).unwrap();
        assert!(approx_eq(&p, &by_constraints, 1e-8));
    }

    #[test]
    fn commutant_examples() {
        let t = tol();
        let units: Vec<M> = (0..3)
            .flat_map(|i| (0..3).map(move |j| {
                let mut e = zeros(3, 3);
                e[(i, j)] = cr(1.0);
                e
            }))
            .collect();
        let b = commutant_basis(3, &units, &t).unwrap();
        assert_eq!(b.len(), 1);
        assert!(approx_eq(&(&b.elements()[0] * b.elements()[0][(0, 0)].conj()), &(identity::<f64>(3) * cr(1.0 / 3.0)), 1e-9));

        let diag_units: Vec<M> = (0..3).map(|i| {
            let mut e = zeros(3, 3);
            e[(i, i)] = cr(1.0);
            e
        }).collect();
        assert_eq!(commutant_basis(3, &diag_units, &t).unwrap().len(), 3);

        let a = AlgebraModel::<f64>::block_von_neumann(vec![(2, 2)]).unwrap();
        let gens: Vec<M> = {
            let f = a.frame().unwrap();
            (0..f.groups().len()).map(|k| {
                let mut c = DVector::zeros(f.real_dim());
                c[2 * k] = 1.0;
                f.member(&c)
            }).collect()
        };
        let comm = commutant_basis(4, &gens, &t).unwrap();
        assert_eq!(comm.len(), 4);
        let double = commutant_basis(4, comm.elements(), &t).unwrap();
        assert_eq!(double.len(), a.span_dim().unwrap());
    }

    #[test]
    fn conditional_expectation_examples() {
        let t = tol();
        let mut rng = rng_from_seed(26);
        let m: M = random_matrix(&mut rng, 4, 4);
        let scalars = commutant_basis(4, &AlgebraModel::<f64>::full(4).unwrap().frame().unwrap().groups().iter().map(|g| {
            let mut e = zeros(4, 4);
            let (i, j) = g.cells[0];
            e[(i, j)] = cr(1.0);
            e
        }).collect::<Vec<_>>(), &t).unwrap();
        let e = conditional_expectation(&scalars, &m).unwrap();
        assert!(approx_eq(&e, &(identity::<f64>(4) * (m.trace() / cr(4.0))), 1e-9));

        let blocks = vec![(2, 2)];
        let a = AlgebraModel::<f64>::block_von_neumann(blocks.clone()).unwrap();
        let gens: Vec<M> = (0..a.span_dim().unwrap()).map(|k| {
            let f = a.frame().unwrap();
            let mut c = DVector::zeros(f.real_dim());
            c[2 * k] = 1.0;
            f.member(&c)
        }).collect();
        let comm = commutant_basis(4, &gens, &t).unwrap();
        let e = conditional_expectation(&comm, &m).unwrap();
        for b in comm.elements() {
            assert!(hs_inner(&(&m - &e), b).norm() < 1e-9);
        }
        assert!(approx_eq(&e, &block_commutant_expectation(&blocks, &m).unwrap(), 1e-9));
        let h = &m + m.adjoint();
        let eh = conditional_expectation(&comm, &h).unwrap();
        assert!(approx_eq(&eh, &eh.adjoint(), 1e-10));
        assert!((eh.trace() - h.trace()).norm() < 1e-9);
    }

    #[test]
    fn block_membership() {
        let a = AlgebraModel::<f64>::block_von_neumann(vec![(2, 2), (1, 1)]).unwrap();
        let mut rng = rng_from_seed(27);
        for _ in 0..10 {
            assert!(a.membership(&a.random_member(&mut rng).unwrap(), 1e-9).unwrap());
        }
        assert!(!a.membership(&random_matrix(&mut rng, 5, 5), 1e-9).unwrap());
    }

    #[test]
    fn direct_sum_examples() {
        let d = AlgebraModel::<f64>::direct_sum(vec![AlgebraModel::full(1).unwrap(), AlgebraModel::full(1).unwrap()]).unwrap();
        assert!(d.membership(&diag(&[2.0, -1.0]), 1e-9).unwrap());
        assert!(!d.membership(&real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-9).unwrap());

        let nn = AlgebraModel::direct_sum(vec![nest2(), nest2()]).unwrap();
        assert_eq!(nn.dim(), 4);
        assert_eq!(nn.lattice(&tol()).unwrap().unwrap().len(), 9);
        let t = real_matrix::<f64>(4, 4, &[1.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 4.0, 5.0, 0.0, 0.0, 0.0, 6.0]);
        assert!(nn.membership(&t, 1e-9).unwrap());

        let single = AlgebraModel::direct_sum(vec![nest2()]).unwrap();
        let m = real_matrix::<f64>(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(approx_eq(&single.hs_project(&m).unwrap(), &nest2().hs_project(&m).unwrap(), 1e-12));
    }

    #[test]
    fn non_commutative_lattice_rejected() {
        let h = HalmosModel::new(diag(&[0.9, 0.5]), &tol()).unwrap();
        let l = h.lattice().clone();
        assert_eq!(AlgebraModel::csl(l, &tol()).unwrap_err(), Error::NotCommutative);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mut rng = rng_from_seed(28);
        let h = HalmosModel::new(diag(&[0.8, 0.4]), &tol()).unwrap();
        for a in [rotated_csl(29), AlgebraModel::two_subspace(h), AlgebraModel::block_von_neumann(vec![(2, 2)]).unwrap()] {
            let f = a.frame().unwrap();
            let dimr = f.real_dim();
            let mut c = DVector::from_fn(dimr, |_, _| rng.random::<f64>() - 0.5);
            let t0 = f.member(&c);
            c /= 2.0 * op_norm(&t0);
            let phi = |c: &DVector<f64>| -> f64 {
                let t = f.member(c);
                let d = identity::<f64>(a.dim()) - &t * t.adjoint();
                -d.determinant().re.ln()
            };
            let grad = |c: &DVector<f64>| -> DVector<f64> {
                let t = f.member(c);
                let rm = (identity::<f64>(a.dim()) - &t * t.adjoint()).try_inverse().unwrap();
                f.real_pairing(&(rm * &t * cr(2.0)))
            };
            let t = f.member(&c);
            let rm = (identity::<f64>(a.dim()) - &t * t.adjoint()).try_inverse().unwrap();
            let h = f.barrier_hessian(&t, &rm);
            let g = grad(&c);
            let eps = 1e-6;
            for k in 0..dimr {
                let mut cp = c.clone();
                cp[k] += eps;
                let mut cm = c.clone();
                cm[k] -= eps;
                let fd = (phi(&cp) - phi(&cm)) / (2.0 * eps);
                assert!((fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()), "gradient {k}");
                let col = (grad(&cp) - grad(&cm)) / (2.0 * eps);
                for r in 0..dimr {
                    assert!((col[r] - h[(r, k)]).abs() < 1e-5 * (1.0 + h[(r, k)].abs()), "hessian {r},{k}");
                }
            }
        }
    }
}
