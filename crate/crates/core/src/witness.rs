//! Witness operators attaining the lattice distance for finite commutative
//! lattices, assembled from two interpolation problems on complementary summands.

use crate::algebra::AlgebraModel;
use crate::error::{check_dim, Error, Result};
use crate::funcnorm::{interpolate_with, InterpolationResult, DEFAULT_MAX_ITER};
use crate::lattice::{lat_distance_sq, Projection, SubspaceLattice};
use crate::linalg::{cr, vec_norm, vec_norm_sq, zeros, CMat, CVec, Tolerances};
use crate::scalar::Real;

/// Decomposition of `(x, y)` along a lattice element `P`.
#[derive(Debug, Clone)]
pub struct SplitData<R: Real> {
    pub p: Projection<R>,
    pub x1: CVec<R>,
    pub x2: CVec<R>,
    pub y1: CVec<R>,
    pub y2: CVec<R>,
    /// Isometry onto `ran P` (`n × rank P`).
    pub v1: CMat<R>,
    /// Isometry onto `ran P⊥`.
    pub v2: CMat<R>,
    /// The lattice compressed to `ran P`, in the basis `v1`.
    pub l1: SubspaceLattice<R>,
    pub l2: SubspaceLattice<R>,
}

impl<R: Real> SplitData<R> {
    /// Coordinates of `x₁`, `y₁` in the basis `v1`.
    pub fn first(&self) -> (CVec<R>, CVec<R>) {
        (self.v1.adjoint() * &self.x1, self.v1.adjoint() * &self.y1)
    }

    /// Coordinates of `x₂`, `y₂` in the basis `v2`.
    pub fn second(&self) -> (CVec<R>, CVec<R>) {
        (self.v2.adjoint() * &self.x2, self.v2.adjoint() * &self.y2)
    }
}

/// Splits along the lattice-distance minimizer.
pub fn split<R: Real>(lattice: &SubspaceLattice<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<SplitData<R>> {
    if !lattice.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let d = lat_distance_sq(lattice, x, y, tol)?;
    split_at(lattice, d.argmin, x, y, tol)
}

/// Splits along a given element, minimizer or not.
pub fn split_at<R: Real>(
    lattice: &SubspaceLattice<R>,
    p: Projection<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
) -> Result<SplitData<R>> {
    let n = lattice.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    check_dim(n, p.dim())?;
    if !lattice.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let v1 = p.range_basis();
    let v2 = p.complement().range_basis();
    let l1 = compress(lattice, &v1, tol)?;
    let l2 = compress(lattice, &v2, tol)?;
    let x1 = p.matrix() * x;
    let y1 = p.matrix() * y;
    Ok(SplitData { x2: x - &x1, y2: y - &y1, x1, y1, v1, v2, l1, l2, p })
}

fn compress<R: Real>(lattice: &SubspaceLattice<R>, v: &CMat<R>, tol: &Tolerances<R>) -> Result<SubspaceLattice<R>> {
    let elements = lattice
        .elements()
        .iter()
        .map(|e| {
            let c = v.adjoint() * e.matrix() * v;
            Projection::from_matrix_unchecked((&c + c.adjoint()) * cr(R::lit(0.5)))
        })
        .collect();
    SubspaceLattice::from_elements(v.ncols(), elements, tol)
}

/// `‖L⊥y₁‖² ≤ ‖L⊥x₁‖²` on the first summand and `‖Lx₂‖² ≤ ‖Ly₂‖²` on the second.
pub fn verify_split_inequalities<R: Real>(s: &SplitData<R>, tol: &Tolerances<R>) -> bool {
    let (x1, y1) = s.first();
    let (x2, y2) = s.second();
    let slack = tol.eq_tol * R::one().max(vec_norm_sq(&s.x1) + vec_norm_sq(&s.y1) + vec_norm_sq(&s.x2) + vec_norm_sq(&s.y2));
    let first = s.l1.elements().iter().all(|l| {
        let c = l.complement();
        vec_norm_sq(&(c.matrix() * &y1)) <= vec_norm_sq(&(c.matrix() * &x1)) + slack
    });
    let second = s
        .l2
        .elements()
        .iter()
        .all(|l| vec_norm_sq(&(l.matrix() * &x2)) <= vec_norm_sq(&(l.matrix() * &y2)) + slack);
    first && second
}

#[derive(Debug, Clone)]
pub struct Witness<R: Real> {
    pub t: CMat<R>,
    /// `Re (Tx, y)`.
    pub value: R,
    pub lat_distance: R,
    pub split: SplitData<R>,
}

/// Contraction in `Alg L` with `(Tx, y)` equal to the lattice distance.
pub fn build_witness<R: Real>(lattice: &SubspaceLattice<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<Witness<R>> {
    build_witness_with(lattice, x, y, tol, DEFAULT_MAX_ITER)
}

pub fn build_witness_with<R: Real>(
    lattice: &SubspaceLattice<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
    max_iter: usize,
) -> Result<Witness<R>> {
    let s = split(lattice, x, y, tol)?;
    let lat_distance = s.p.split_cost(x, y);
    let scale = R::one().max(vec_norm(x)).max(vec_norm(y));
    let (x1, y1) = s.first();
    let (x2, y2) = s.second();

    let t1 = solve_part(&s.l1, &x1, &y1, scale, tol, max_iter)?;
    let t2 = solve_part(&s.l2.complements(), &y2, &x2, scale, tol, max_iter)?;
    let t = &s.v1 * t1 * s.v1.adjoint() + &s.v2 * t2.adjoint() * s.v2.adjoint();
    let value = (y.adjoint() * &t * x)[(0, 0)].re;
    Ok(Witness { t, value, lat_distance, split: s })
}

/// Contraction in `Alg L` mapping `from` to `to` on one summand.
fn solve_part<R: Real>(
    lattice: &SubspaceLattice<R>,
    from: &CVec<R>,
    to: &CVec<R>,
    scale: R,
    tol: &Tolerances<R>,
    max_iter: usize,
) -> Result<CMat<R>> {
    let d = lattice.dim();
    if d == 0 || vec_norm(from) <= tol.eq_tol * scale || vec_norm(to) <= tol.eq_tol * scale {
        return Ok(zeros(d, d));
    }
    let model = AlgebraModel::csl(lattice.clone(), tol)?;
    match interpolate_with(&model, from, to, tol, max_iter)? {
        InterpolationResult::Solution(t) => Ok(t),
        InterpolationResult::Violation(_) => {
            Err(Error::StructureMismatch("restricted interpolation found a lattice violation".into()))
        }
    }
}
