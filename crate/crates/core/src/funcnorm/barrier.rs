//! Path-following interior point method for linear objectives over
//! `{T in the member span : ‖T‖ < 1}` with barrier `-log det(I - T T*)`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::MemberFrame;
use crate::linalg::{cr, identity, CMat};
use crate::scalar::Real;

/// Feasible point on (or near) the central path.
pub(crate) struct Center<R: Real> {
    pub z: DVector<R>,
    pub member: CMat<R>,
    /// `(I - T T*)⁻¹`.
    pub resolvent: CMat<R>,
    pub t: R,
}

/// Maximize `objective · z` where frame coordinates are `c = reduction · z`.
pub(crate) struct BarrierProblem<'a, R: Real> {
    pub frame: &'a MemberFrame<R>,
    pub reduction: Option<&'a DMatrix<R>>,
    pub objective: DVector<R>,
}

pub(crate) struct RunStats {
    pub iterations: usize,
}

const CENTER_DECREMENT: f64 = 1e-5;
const MAX_NEWTON_PER_CENTER: usize = 60;
const T_MAX: f64 = 1e15;

struct Eval<R: Real> {
    member: CMat<R>,
    resolvent: CMat<R>,
}

impl<'a, R: Real> BarrierProblem<'a, R> {
    fn coords(&self, z: &DVector<R>) -> DVector<R> {
        match self.reduction {
            Some(n) => n * z,
            None => z.clone(),
        }
    }

    fn evaluate(&self, z: &DVector<R>) -> Option<Eval<R>> {
        let member = self.frame.member(&self.coords(z));
        let n = member.nrows();
        let d = identity::<R>(n) - &member * member.adjoint();
        let d = (&d + d.adjoint()) * cr(R::lit(0.5));
        let chol = d.cholesky()?;
        let resolvent = chol.inverse();
        if !resolvent.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return None;
        }
        Some(Eval { member, resolvent })
    }

    fn reduce_vec(&self, g: DVector<R>) -> DVector<R> {
        match self.reduction {
            Some(n) => n.transpose() * g,
            None => g,
        }
    }

    fn reduce_mat(&self, h: DMatrix<R>) -> DMatrix<R> {
        match self.reduction {
            Some(n) => n.transpose() * h * n,
            None => h,
        }
    }

    /// Follows the central path from `z0` (strictly feasible), multiplying `t` by
    /// `mu` after each centering and calling `at_center` there.
    pub fn run(
        &self,
        z0: DVector<R>,
        t0: R,
        mu: R,
        max_iter: usize,
        mut at_center: impl FnMut(&Center<R>) -> bool,
    ) -> RunStats {
        let two = R::lit(2.0);
        let mut z = z0;
        let mut t = t0;
        let mut iterations = 0;
        let Some(mut cur) = self.evaluate(&z) else {
            return RunStats { iterations };
        };
        loop {
            for _ in 0..MAX_NEWTON_PER_CENTER {
                if iterations >= max_iter {
                    return RunStats { iterations };
                }
                let grad_c = self.frame.real_pairing(&(&cur.resolvent * &cur.member * cr(two)));
                let grad = self.reduce_vec(grad_c) - &self.objective * t;
                let hess = self.reduce_mat(self.frame.barrier_hessian(&cur.member, &cur.resolvent));
                let Some(step) = newton_direction(&hess, &grad) else {
                    return RunStats { iterations };
                };
                let dec_sq = -grad.dot(&step);
                iterations += 1;
                if !dec_sq.is_finite() || dec_sq < R::zero() {
                    break;
                }
                let dec = dec_sq.sqrt();
                let mut alpha = if dec > R::lit(0.25) { R::one() / (R::one() + dec) } else { R::one() };
                let mut moved = false;
                for _ in 0..30 {
                    let trial = &z + &step * alpha;
                    if let Some(e) = self.evaluate(&trial) {
                        z = trial;
                        cur = e;
                        moved = true;
                        break;
                    }
                    alpha *= R::lit(0.5);
                }
                if !moved || dec < R::lit(CENTER_DECREMENT) {
                    break;
                }
            }
            let center = Center { z: z.clone(), member: cur.member.clone(), resolvent: cur.resolvent.clone(), t };
            if at_center(&center) {
                return RunStats { iterations };
            }
            t *= mu;
            if t > R::lit(T_MAX) {
                return RunStats { iterations };
            }
        }
    }
}

/// Solves `H d = -g` by Cholesky, regularizing if `H` is numerically indefinite.
fn newton_direction<R: Real>(h: &DMatrix<R>, g: &DVector<R>) -> Option<DVector<R>> {
    if let Some(ch) = h.clone().cholesky() {
        let d = ch.solve(&-g);
        if d.iter().all(|v| v.is_finite()) {
            return Some(d);
        }
    }
    let scale = (0..h.nrows()).map(|i| h[(i, i)].abs()).fold(R::zero(), |a, b| a.max(b)).max(R::machine_eps());
    let mut reg = scale * R::lit(1e-14);
    for _ in 0..12 {
        let mut hr = h.clone();
        for i in 0..h.nrows() {
            hr[(i, i)] += reg;
        }
        if let Some(ch) = hr.cholesky() {
            return Some(ch.solve(&-g));
        }
        reg *= R::lit(100.0);
    }
    None
}
