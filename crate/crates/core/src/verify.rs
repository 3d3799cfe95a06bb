//! Experiments comparing the lattice minimax with the functional norm.

use std::fmt;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::algebra::{block_commutant_expectation, AlgebraKind, AlgebraModel};
use crate::error::{check_dim, Error, Result};
use crate::funcnorm::{functional_norm_with, DEFAULT_MAX_ITER};
use crate::lattice::{lat_distance_sq, Projection, SubspaceLattice};
use crate::linalg::{block_diag, check_finite_vec, hermitian_eig_unchecked, outer, vec_norm_sq, CMat, CVec, Tolerances};
use crate::random::{random_unit_vector, rng_from_seed};
use crate::scalar::Real;

/// Environment variable capping the worker threads used by batch estimates.
pub const THREADS_ENV: &str = "VFNORM_THREADS";

/// `min ‖L⊥x‖² + ‖Ly‖²` over `Lat A` with a minimizing projection.
#[derive(Debug, Clone)]
pub struct LatticeMinimax<R: Real> {
    pub value: R,
    pub argmin: Projection<R>,
}

/// Lattice side of the comparison for any model.
///
/// Explicit lattices are enumerated, block von Neumann models use the commutant
/// closed form, and direct sums add their parts.
pub fn lattice_minimax<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<LatticeMinimax<R>> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), y.len())?;
    match a.kind() {
        AlgebraKind::BlockVonNeumann(blocks) => lat_inf_blocks(blocks, x, y, tol),
        AlgebraKind::DirectSum(parts) => {
            let mut value = R::zero();
            let mut argmins = Vec::with_capacity(parts.len());
            for (p, (xp, yp)) in parts.iter().zip(split_parts(parts, x, y)) {
                let m = lattice_minimax(p, &xp, &yp, tol)?;
                value += m.value;
                argmins.push(m.argmin.into_matrix());
            }
            let refs: Vec<&CMat<R>> = argmins.iter().collect();
            Ok(LatticeMinimax { value, argmin: Projection::from_matrix_unchecked(block_diag(&refs)) })
        }
        _ => {
            let lattice = a.lattice(tol)?.ok_or_else(|| Error::StructureMismatch("lattice is not explicit".into()))?;
            let d = lat_distance_sq(&lattice, x, y, tol)?;
            Ok(LatticeMinimax { value: d.value, argmin: d.argmin })
        }
    }
}

/// Minimax over the projections of the commutant of a full or block von Neumann model.
pub fn lat_inf_vn<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<(R, Projection<R>)> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), y.len())?;
    let blocks = match a.kind() {
        AlgebraKind::Full => vec![(a.dim(), 1)],
        AlgebraKind::BlockVonNeumann(b) => b.clone(),
        _ => return Err(Error::StructureMismatch("commutant closed form needs a von Neumann model".into())),
    };
    let m = lat_inf_blocks(&blocks, x, y, tol)?;
    Ok((m.value, m.argmin))
}

fn lat_inf_blocks<R: Real>(blocks: &[(usize, usize)], x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<LatticeMinimax<R>> {
    check_finite_vec(x)?;
    check_finite_vec(y)?;
    let diff = outer(y, y) - outer(x, x);
    let e = block_commutant_expectation(blocks, &diff)?;
    let e = (&e + e.adjoint()) * crate::linalg::cr(R::lit(0.5));
    let eig = hermitian_eig_unchecked(&e);
    let cut = tol.rank_tol * R::one().max(vec_norm_sq(x) + vec_norm_sq(y));
    let negative: R = eig.values.iter().copied().filter(|&v| v < -cut).fold(R::zero(), |a, b| a + b);
    let argmin = Projection::from_matrix_unchecked(eig.spectral_projection(|v| v < -cut));
    Ok(LatticeMinimax { value: vec_norm_sq(x) + negative, argmin })
}

/// Restrictions of `x` and `y` to the summands of a direct sum.
fn split_parts<R: Real>(parts: &[AlgebraModel<R>], x: &CVec<R>, y: &CVec<R>) -> Vec<(CVec<R>, CVec<R>)> {
    let mut off = 0;
    parts
        .iter()
        .map(|p| {
            let d = p.dim();
            let out = (x.rows(off, d).into_owned(), y.rows(off, d).into_owned());
            off += d;
            out
        })
        .collect()
}

/// Norm bracket without the convergence requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBracket<R> {
    pub lower: R,
    pub upper: R,
    pub converged: bool,
    pub iterations: usize,
}

/// Bracket for `‖ω_{x,y}|_A‖`; direct sums add their parts and two-subspace
/// models use the closed form on structured pairs.
pub fn norm_bracket<R: Real>(
    a: &AlgebraModel<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
    max_iter: usize,
) -> Result<NormBracket<R>> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), y.len())?;
    match a.kind() {
        AlgebraKind::DirectSum(parts) => {
            let mut acc = NormBracket { lower: R::zero(), upper: R::zero(), converged: true, iterations: 0 };
            for (p, (xp, yp)) in parts.iter().zip(split_parts(parts, x, y)) {
                let b = norm_bracket(p, &xp, &yp, tol, max_iter)?;
                acc.lower += b.lower;
                acc.upper += b.upper;
                acc.converged &= b.converged;
                acc.iterations += b.iterations;
            }
            Ok(acc)
        }
        AlgebraKind::TwoSubspace(h) => match h.closed_form_norm(x, y, tol) {
            Ok((v, _)) => Ok(NormBracket { lower: v, upper: v, converged: true, iterations: 0 }),
            Err(Error::StructureMismatch(_)) => solver_bracket(a, x, y, tol, max_iter),
            Err(e) => Err(e),
        },
        _ => solver_bracket(a, x, y, tol, max_iter),
    }
}

fn solver_bracket<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>, max_iter: usize) -> Result<NormBracket<R>> {
    let r = functional_norm_with(a, x, y, tol, max_iter)?;
    Ok(NormBracket { lower: r.lower, upper: r.upper, converged: r.converged, iterations: r.iterations })
}

/// Outcome of comparing the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    /// The lattice side exceeds the certified upper bound by more than `10·solver_tol`.
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VGapReport<R: Real> {
    pub lhs: R,
    pub lhs_argmin: Projection<R>,
    pub norm_lower: R,
    pub norm_upper: R,
    /// `norm_lower - lhs`.
    pub margin: R,
    /// `lhs ≤ norm_upper + solver_tol · max(1, norm_upper)`.
    pub satisfied: bool,
    pub verdict: Verdict,
    pub converged: bool,
    pub model: String,
    pub pair_hash: String,
    pub seed: Option<u64>,
}

pub fn vgap<R: Real>(a: &AlgebraModel<R>, x: &CVec<R>, y: &CVec<R>, tol: &Tolerances<R>) -> Result<VGapReport<R>> {
    vgap_with(a, x, y, tol, DEFAULT_MAX_ITER, None)
}

pub fn vgap_with<R: Real>(
    a: &AlgebraModel<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
    max_iter: usize,
    seed: Option<u64>,
) -> Result<VGapReport<R>> {
    let lat = lattice_minimax(a, x, y, tol)?;
    let nb = norm_bracket(a, x, y, tol, max_iter)?;
    let slack = tol.solver_tol * R::one().max(nb.upper);
    let satisfied = lat.value <= nb.upper + slack;
    let verdict = if satisfied {
        Verdict::Satisfied
    } else if lat.value > nb.upper + slack * R::lit(10.0) {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(VGapReport {
        lhs: lat.value,
        lhs_argmin: lat.argmin,
        norm_lower: nb.lower,
        norm_upper: nb.upper,
        margin: nb.lower - lat.value,
        satisfied,
        verdict,
        converged: nb.converged,
        model: a.summary(),
        pair_hash: pair_hash(x, y),
        seed,
    })
}

/// First 16 hex digits of SHA-256 over the little-endian entries of `x` then `y`.
pub fn pair_hash<R: Real>(x: &CVec<R>, y: &CVec<R>) -> String {
    let mut h = Sha256::new();
    for z in x.iter().chain(y.iter()) {
        h.update(z.re.as_f64().to_le_bytes());
        h.update(z.im.as_f64().to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Both sides computed per part and on the assembled sum.
#[derive(Debug, Clone)]
pub struct DirectSumReport<R> {
    pub lhs_parts: R,
    pub lhs_assembled: R,
    pub norm_parts: (R, R),
    pub norm_assembled: (R, R),
    /// The assembled lattice side was computed independently of the parts.
    pub lhs_independent: bool,
    pub lhs_defect: R,
    pub norm_defect: R,
    pub holds: bool,
}

/// Checks additivity of the lattice minimax and of the functional norm over
/// `⊕ parts` for the pair obtained by concatenating `pairs`.
pub fn direct_sum_check<R: Real>(
    parts: &[AlgebraModel<R>],
    pairs: &[(CVec<R>, CVec<R>)],
    tol: &Tolerances<R>,
) -> Result<DirectSumReport<R>> {
    if parts.len() < 2 {
        return Err(Error::InvalidArgument("direct sum check needs at least two parts".into()));
    }
    if parts.len() != pairs.len() {
        return Err(Error::InvalidArgument("one vector pair per part required".into()));
    }
    let mut lhs_parts = R::zero();
    let (mut lo, mut up) = (R::zero(), R::zero());
    for (p, (x, y)) in parts.iter().zip(pairs) {
        lhs_parts += lattice_minimax(p, x, y, tol)?.value;
        let b = norm_bracket(p, x, y, tol, DEFAULT_MAX_ITER)?;
        lo += b.lower;
        up += b.upper;
    }
    let xs: Vec<&CVec<R>> = pairs.iter().map(|p| &p.0).collect();
    let ys: Vec<&CVec<R>> = pairs.iter().map(|p| &p.1).collect();
    let x = crate::linalg::concat_vectors(&xs);
    let y = crate::linalg::concat_vectors(&ys);
    let sum = AlgebraModel::direct_sum(parts.to_vec())?;

    let (lhs_assembled, lhs_independent) = match assembled_lattice_side(parts, &sum, &x, &y, tol)? {
        Some(v) => (v, true),
        None => (lhs_parts, false),
    };
    let whole = functional_norm_with(&sum, &x, &y, tol, DEFAULT_MAX_ITER)?;
    let lhs_defect = (lhs_parts - lhs_assembled).abs();
    let norm_defect = (lo - whole.lower).abs().max((up - whole.upper).abs());
    let bound = tol.solver_tol * R::lit(2.0) * R::one().max(up);
    Ok(DirectSumReport {
        lhs_parts,
        lhs_assembled,
        norm_parts: (lo, up),
        norm_assembled: (whole.lower, whole.upper),
        lhs_independent,
        lhs_defect,
        norm_defect,
        holds: lhs_defect <= bound && norm_defect <= bound,
    })
}

/// Lattice side of the sum without splitting into parts: the product lattice
/// when every part is explicit, the merged commutant when every part is von Neumann.
fn assembled_lattice_side<R: Real>(
    parts: &[AlgebraModel<R>],
    sum: &AlgebraModel<R>,
    x: &CVec<R>,
    y: &CVec<R>,
    tol: &Tolerances<R>,
) -> Result<Option<R>> {
    let blocks: Option<Vec<(usize, usize)>> = parts
        .iter()
        .map(|p| match p.kind() {
            AlgebraKind::Full => Some(vec![(p.dim(), 1)]),
            AlgebraKind::BlockVonNeumann(b) => Some(b.clone()),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(|v| v.concat());
    if let Some(b) = blocks {
        return Ok(Some(lat_inf_blocks(&b, x, y, tol)?.value));
    }
    let lattice: Option<SubspaceLattice<R>> = sum.lattice(tol)?;
    match lattice {
        Some(l) => Ok(Some(lat_distance_sq(&l, x, y, tol)?.value)),
        None => Ok(None),
    }
}

/// Largest observed `lhs / norm` over sampled unit pairs.
#[derive(Debug, Clone)]
pub struct VPrimeEstimate<R: Real> {
    /// `+∞` when some pair has a vanishing norm but a positive lattice side.
    pub c_hat: R,
    pub worst_index: usize,
    pub worst_pair: (CVec<R>, CVec<R>),
    /// Every evaluated ratio, in sampling order.
    pub ratios: Vec<R>,
}

/// Samples `trials` unit pairs (preceded, for two-subspace models, by every
/// structured pair `(e_j, 0)`, `(0, e_k)`) and reports the largest ratio.
///
/// The ratio uses the certified upper bound of the norm, so `c_hat` never
/// exceeds the true supremum over the sampled pairs by more than rounding.
pub fn vprime_estimate<R: Real>(a: &AlgebraModel<R>, trials: usize, seed: u64, tol: &Tolerances<R>) -> Result<VPrimeEstimate<R>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = a.dim();
    let mut pairs: Vec<(CVec<R>, CVec<R>)> = Vec::new();
    if let AlgebraKind::TwoSubspace(h) = a.kind() {
        let h0 = h.h0_dim();
        for j in 0..h0 {
            for k in 0..h0 {
                pairs.push((crate::linalg::basis_vector(n, j), crate::linalg::basis_vector(n, h0 + k)));
            }
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let x = random_unit_vector(&mut rng, n);
        let y = random_unit_vector(&mut rng, n);
        pairs.push((x, y));
    }
    let ratios: Vec<R> = with_thread_cap(|| {
        pairs
            .par_iter()
            .map(|(x, y)| {
                let lhs = lattice_minimax(a, x, y, tol)?.value;
                let b = norm_bracket(a, x, y, tol, DEFAULT_MAX_ITER)?;
                Ok(if b.upper <= tol.eq_tol {
                    if lhs > tol.eq_tol {
                        R::max_value().unwrap_or_else(R::one)
                    } else {
                        R::zero()
                    }
                } else {
                    lhs / b.upper
                })
            })
            .collect::<Result<Vec<R>>>()
    })?;
    let mut worst_index = 0;
    for (i, r) in ratios.iter().enumerate() {
        if *r > ratios[worst_index] {
            worst_index = i;
        }
    }
    let c_hat = ratios[worst_index];
    let c_hat = if Some(c_hat) == R::max_value() { R::lit(f64::INFINITY) } else { c_hat };
    Ok(VPrimeEstimate { c_hat, worst_index, worst_pair: pairs[worst_index].clone(), ratios })
}

/// Runs `f` in a pool limited by [`THREADS_ENV`] when it is set to a positive integer.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&c| c > 0);
    match cap.and_then(|c| rayon::ThreadPoolBuilder::new().num_threads(c).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
