//! Competitor optimizers for min-max games.
//!
//! **S-Adam** updates both players simultaneously with bias-corrected Adam
//! applied to the gradient field at the current iterate:
//!
//! ```text
//! m_k = β₁ m_{k-1} + (1 - β₁) ĝ_k          m̂_k = m_k / (1 - β₁^k)
//! v_k = β₂ v_{k-1} + (1 - β₂) ĝ_k ⊙ ĝ_k    v̂_k = v_k / (1 - β₂^k)
//! x_k = x_{k-1} - η m̂_k / (sqrt(v̂_k) + ε)
//! ```
//!
//! β₁ is held at `beta1_1` (the κ schedule is not used).
//!
//! **OAdagrad** is optimistic AdaGrad: the step extrapolates with the
//! previous gradient and scales by the accumulated squared gradients:
//!
//! ```text
//! a_k = a_{k-1} + ĝ_k ⊙ ĝ_k
//! x_k = x_{k-1} - η (2ĝ_k - ĝ_{k-1}) / sqrt(a_k + ε)
//! ```
//!
//! The β parameters are ignored by OAdagrad.

use serde::{Deserialize, Serialize};

use crate::optim::Stepper;
use crate::{vecops, Error, HyperParams, Point, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAdamState<T> {
    pub x: Point<T>,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub k: u64,
}

impl<T: Scalar> SAdamState<T> {
    pub fn init_at(x0: Point<T>, hp: &HyperParams<T>) -> Result<Self> {
        hp.validate()?;
        let zeros = vec![T::zero(); x0.dim()];
        Ok(Self { x: x0, m: zeros.clone(), v: zeros, k: 0 })
    }

    pub fn step<F>(&self, hp: &HyperParams<T>, mut grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        let k = self.k + 1;
        let dim = self.x.dim();
        let g = grad_at(&self.x);
        if g.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
        }
        let one = T::one();
        let (b1, b2) = (hp.beta1_1, hp.beta2);
        let exp = i32::try_from(k).unwrap_or(i32::MAX);
        let bc1 = one - b1.powi(exp);
        let bc2 = one - b2.powi(exp);

        let mut m = Vec::with_capacity(dim);
        let mut v = Vec::with_capacity(dim);
        let mut dir = Vec::with_capacity(dim);
        for r in 0..dim {
            let mr = b1 * self.m[r] + (one - b1) * g[r];
            let vr = b2 * self.v[r] + (one - b2) * g[r] * g[r];
            let m_hat = mr / bc1;
            let v_hat = vr / bc2;
            let denom = v_hat.sqrt() + hp.eps_guard;
            // 0/0 only when this coordinate has seen nothing but zero gradients
            dir.push(if mr == T::zero() { T::zero() } else { m_hat / denom });
            m.push(mr);
            v.push(vr);
        }
        let x = self.x.step_along(hp.eta, &dir);
        Ok(Self { x, m, v, k })
    }
}

impl<T: Scalar> Stepper<T> for SAdamState<T> {
    fn step<F>(&self, hp: &HyperParams<T>, grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        SAdamState::step(self, hp, grad_at)
    }

    fn query_point(&self) -> &Point<T> {
        &self.x
    }

    fn iteration(&self) -> u64 {
        self.k
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && vecops::all_finite(&self.m) && vecops::all_finite(&self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OAdagradState<T> {
    pub x: Point<T>,
    pub g_prev: Vec<T>,
    pub accum: Vec<T>,
    pub k: u64,
}

impl<T: Scalar> OAdagradState<T> {
    pub fn init_at(x0: Point<T>, hp: &HyperParams<T>) -> Result<Self> {
        hp.validate()?;
        let zeros = vec![T::zero(); x0.dim()];
        Ok(Self { x: x0, g_prev: zeros.clone(), accum: zeros, k: 0 })
    }

    pub fn step<F>(&self, hp: &HyperParams<T>, mut grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        let k = self.k + 1;
        let dim = self.x.dim();
        let g = grad_at(&self.x);
        if g.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
        }
        let two = T::lit(2.0);
        let mut accum = Vec::with_capacity(dim);
        let mut dir = Vec::with_capacity(dim);
        for r in 0..dim {
            let a = self.accum[r] + g[r] * g[r];
            let num = two * g[r] - self.g_prev[r];
            dir.push(if num == T::zero() { T::zero() } else { num / (a + hp.eps_guard).sqrt() });
            accum.push(a);
        }
        let x = self.x.step_along(hp.eta, &dir);
        Ok(Self { x, g_prev: g, accum, k })
    }
}

impl<T: Scalar> Stepper<T> for OAdagradState<T> {
    fn step<F>(&self, hp: &HyperParams<T>, grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        OAdagradState::step(self, hp, grad_at)
    }

    fn query_point(&self) -> &Point<T> {
        &self.x
    }

    fn iteration(&self) -> u64 {
        self.k
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && vecops::all_finite(&self.accum) && vecops::all_finite(&self.g_prev)
    }
}
