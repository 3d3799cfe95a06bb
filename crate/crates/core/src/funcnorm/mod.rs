//! Norms of vector functionals `T ↦ (Tx, y)` restricted to an algebra, with a
//! primal witness and a trace-norm certificate, and the interpolation problem
//! `Tx = y` over the unit ball of the algebra.

mod barrier;

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::algebra::{AlgebraModel, MemberFrame};
use crate::error::{check_dim, Error, Result};
use crate::lattice::Projection;
use crate::linalg::{
    check_finite_vec, cr, cx, hs_inner, op_norm, outer, polar_part, trace_norm, vec_norm, zeros, CMat, CVec,
    Complex, Tolerances,
};
use crate::random::rng_from_seed;
use crate::scalar::Real;

use barrier::{BarrierProblem, Center};

/// Iteration cap (Newton steps) used when none is given.
pub const DEFAULT_MAX_ITER: usize = 50_000;

const PATH_FACTOR: f64 = 10.0;

/// Certified bracket `lower ≤ ‖ω_{x,y}|_A‖ ≤ upper`.
#[derive(Debug, Clone)]
pub struct NormResult<R: Real> {
    pub lower: R,
    pub upper: R,
    /// Member contraction with `(witness·x, y) = lower`.
    pub witness: CMat<R>,
    /// `Z` with `tr(T Z) = 0` for every member `T` and `upper = ‖xy* - Z‖₁`.
    pub certificate: CMat<R>,
    pub iterations: usize,
    pub converged: bool,
}

impl<R: Real> NormResult<R> {
    pub fn width(&self) -> R {
        self.upper - self.lower
    }

    fn zero(n: usize) -> Self {
        NormResult {
            lower: R::zero(),
            upper: R::zero(),
            witness: zeros(n, n),
            certificate: zeros(n, n),
            iterations: 0,
            converged: true,
        }
    }
}

fn check_pair<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>) -> Result<()> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), y.len())?;
    check_finite_vec(x)?;
    check_finite_vec(y)
}

/// Like [`functional_norm_with`] with the default budget, failing with
/// [`Error::NoConvergence`] when the bracket does not close.
pub fn functional_norm<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<NormResult<R>> {
    let r = functional_norm_with(a, x, y, tol, DEFAULT_MAX_ITER)?;
    if !r.converged {
        return Err(Error::NoConvergence { iterations: r.iterations, lower: r.lower.as_f64(), upper: r.upper.as_f64() });
    }
    Ok(r)
}

/// Best bracket found within `max_iter` Newton steps; `converged` reports whether
/// `upper - lower ≤ solver_tol · max(1, upper)`.
pub fn functional_norm_with<R: Real>(
    a: &AlgebraModel<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
    max_iter: usize,
) -> Result<NormResult<R>> {
    check_pair(a, x, y)?;
    tol.validate()?;
    let n = a.dim();
    let frame = a.frame()?;
    let (sx, sy) = (vec_norm(x), vec_norm(y));
    if sx == R::zero() || sy == R::zero() {
        return Ok(NormResult::zero(n));
    }
    let scale = sx * sy;
    let g = outer(&(y * cr(R::one() / sy)), &(x * cr(R::one() / sx)));
    let target = |upper: R| tol.solver_tol * R::one().max(upper * scale) / scale;

    let mut best = Bracket::new(frame, &g, tol)?;
    let mut iterations = 0;
    if best.width() > target(best.upper) && best.upper > R::zero() {
        let problem = BarrierProblem { frame, reduction: None, objective: frame.real_pairing(&g) };
        let t0 = R::lit(n as f64) / best.upper;
        let stats = problem.run(DVector::zeros(frame.real_dim()), t0, R::lit(PATH_FACTOR), max_iter, |c| {
            best.absorb(frame, &g, c);
            best.width() <= target(best.upper)
        });
        iterations = stats.iterations;
    }
    let converged = best.width() <= target(best.upper);
    Ok(NormResult {
        lower: best.lower * scale,
        upper: best.upper * scale,
        witness: best.witness,
        certificate: best.complement.adjoint() * cr(scale),
        iterations,
        converged,
    })
}

/// Running best primal/dual pair for the normalized functional `⟨·, G⟩`.
struct Bracket<R: Real> {
    lower: R,
    witness: CMat<R>,
    upper: R,
    /// Element of the HS-complement of the member span.
    complement: CMat<R>,
}

impl<R: Real> Bracket<R> {
    /// Exact for *-algebras: the polar part of the projected functional is a member.
    fn new(frame: &MemberFrame<R>, g: &CMat<R>, tol: &Tolerances<R>) -> Result<Self> {
        let pg = frame.project(g);
        let upper = trace_norm(&pg)?;
        let mut b = Bracket { lower: R::zero(), witness: zeros(g.nrows(), g.ncols()), upper, complement: g - &pg };
        if upper > R::zero() {
            let w = frame.project(&polar_part(&pg, tol.rank_tol * op_norm(&pg)));
            let w = &w * cr(R::one() / R::one().max(op_norm(&w)));
            b.offer_witness(w, g);
        }
        // Z = 0 certifies the Cauchy–Schwarz bound
        let trivial = trace_norm(g)?;
        if trivial < b.upper {
            b.upper = trivial;
            b.complement = zeros(g.nrows(), g.ncols());
        }
        Ok(b)
    }

    fn width(&self) -> R {
        self.upper - self.lower
    }

    fn offer_witness(&mut self, t: CMat<R>, g: &CMat<R>) {
        let v = hs_inner(&t, g);
        let m = v.modulus();
        if m > self.lower {
            self.lower = m;
            self.witness = t * (v.conjugate() * cr(R::one() / m));
        }
    }

    fn absorb(&mut self, frame: &MemberFrame<R>, g: &CMat<R>, c: &Center<R>) {
        self.offer_witness(c.member.clone(), g);
        let w = g - &c.resolvent * &c.member * cr(R::lit(2.0) / c.t);
        let z = &w - frame.project(&w);
        if let Ok(u) = trace_norm(&(g - &z)) {
            if u < self.upper {
                self.upper = u;
                self.complement = z;
            }
        }
    }
}

/// Largest `|(Tx, y)|` over `samples` random members scaled to unit operator norm.
pub fn functional_norm_sampling<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, samples: usize, seed: u64) -> Result<R> {
    check_pair(a, x, y)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut best = R::zero();
    for _ in 0..samples {
        let t = a.random_member(&mut rng)?;
        let norm = op_norm(&t);
        if norm > R::zero() {
            let v = (y.adjoint() * &t * x)[(0, 0)].modulus() / norm;
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Either a member contraction mapping `x` to `y` or a lattice element ruling one out.
#[derive(Debug, Clone)]
pub enum InterpolationResult<R: Real> {
    Solution(CMat<R>),
    /// `‖L⊥y‖ > ‖L⊥x‖ + eq_tol`.
    Violation(Projection<R>),
}

impl<R: Real> InterpolationResult<R> {
    pub fn solution(&self) -> Option<&CMat<R>> {
        match self {
            InterpolationResult::Solution(t) => Some(t),
            InterpolationResult::Violation(_) => None,
        }
    }
}

pub fn interpolate<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<InterpolationResult<R>> {
    interpolate_with(a, x, y, tol, DEFAULT_MAX_ITER)
}

/// Checks `‖L⊥y‖ ≤ ‖L⊥x‖` on the lattice, then maximizes `Re τ` subject to
/// `T x = τ y`, `‖T‖ < 1`; a value `τ ≈ 1` yields the solution `T / τ`.
pub fn interpolate_with<R: Real>(
    a: &AlgebraModel<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
    max_iter: usize,
) -> Result<InterpolationResult<R>> {
    check_pair(a, x, y)?;
    tol.validate()?;
    let n = a.dim();
    let lattice = a
        .lattice(tol)?
        .ok_or_else(|| Error::StructureMismatch("interpolation needs an explicit finite lattice".into()))?;
    let mut worst: Option<(R, &Projection<R>)> = None;
    for l in lattice.elements() {
        let lp = l.complement();
        let excess = vec_norm(&(lp.matrix() * y)) - vec_norm(&(lp.matrix() * x));
        if worst.as_ref().is_none_or(|(w, _)| excess > *w) {
            worst = Some((excess, l));
        }
    }
    if let Some((excess, l)) = worst {
        if excess > tol.eq_tol {
            return Ok(InterpolationResult::Violation(l.clone()));
        }
    }
    if vec_norm(y) <= tol.eq_tol {
        return Ok(InterpolationResult::Solution(zeros(n, n)));
    }
    let sx = vec_norm(x);
    let xh = x * cr(R::one() / sx);
    let yh = y * cr(R::one() / sx);
    let frame = a.frame()?;
    let k = frame.real_dim();

    // columns: member directions applied to x̂, then -ŷ and -iŷ for τ
    let mut cons = DMatrix::<R>::zeros(2 * n, k + 2);
    let mut put = |col: usize, v: &CVec<R>| {
        for i in 0..n {
            cons[(2 * i, col)] = v[i].re;
            cons[(2 * i + 1, col)] = v[i].im;
        }
    };
    for r in 0..k {
        let mut e = DVector::zeros(k);
        e[r] = R::one();
        put(r, &(frame.member(&e) * &xh));
    }
    put(k, &(-&yh));
    put(k + 1, &(&yh * cx(R::zero(), -R::one())));
    let null = null_space(&cons, tol.rank_tol);
    if null.ncols() == 0 {
        return Err(Error::NoConvergence { iterations: 0, lower: 0.0, upper: 0.0 });
    }
    let reduction = null.rows(0, k).into_owned();
    let objective = null.row(k).transpose();
    let tau_of = |z: &DVector<R>| -> Complex<R> { cx((null.row(k) * z)[0], (null.row(k + 1) * z)[0]) };

    let goal = R::one() / (R::one() + tol.solver_tol);
    let nu = R::lit(n as f64);
    let mut solution: Option<CMat<R>> = None;
    let mut best_tau = R::zero();
    let mut bound = R::max_value().unwrap_or_else(R::one);
    let problem = BarrierProblem { frame, reduction: Some(&reduction), objective };
    let stats = problem.run(DVector::zeros(null.ncols()), R::one(), R::lit(PATH_FACTOR), max_iter, |c| {
        let tau = tau_of(&c.z);
        best_tau = best_tau.max(tau.re);
        bound = bound.min(tau.re + R::lit(2.0) * nu / c.t);
        if tau.re >= goal {
            solution = Some(&c.member * (cr(R::one()) / tau));
            return true;
        }
        bound < goal
    });
    match solution {
        Some(t) => Ok(InterpolationResult::Solution(t)),
        None => Err(Error::NoConvergence { iterations: stats.iterations, lower: best_tau.as_f64(), upper: bound.as_f64() }),
    }
}

/// Orthonormal basis of `ker A` (columns).
fn null_space<R: Real>(a: &DMatrix<R>, rank_tol: R) -> DMatrix<R> {
    let p = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().copied().fold(R::zero(), |m, s| m.max(s));
    let cut = rank_tol * R::one().max(top);
    let mut proj = DMatrix::<R>::identity(p, p);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let r = v_t.row(i);
            proj -= r.transpose() * r;
        }
    }
    let eig = ((&proj + proj.transpose()) * R::lit(0.5)).symmetric_eigen();
    let keep: Vec<usize> = (0..p).filter(|&i| eig.eigenvalues[i] > R::lit(0.5)).collect();
    DMatrix::from_fn(p, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

#[cfg(test)]
mod tests;
