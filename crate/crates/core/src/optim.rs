//! The ADAM³ transition function.
//!
//! One step maps `(x, z, m, v, ṽ, d, k)` to its successor:
//!
//! ```text
//! z_k = x_{k-1} - η d_{k-1}
//! ĝ_k = minibatch gradient field at z_k
//! m_k = β₁,ₖ m_{k-1} + (1 - β₁,ₖ) ĝ_k
//! v_k = β₂ v_{k-1} + (1 - β₂) ĝ_k ⊙ ĝ_k + ε
//! ṽ_k = β₃ ṽ_{k-1} + (1 - β₃) max(ṽ_{k-1}, v_k)
//! d_k = m_k / sqrt(ṽ_k)
//! x_k = x_{k-1} - η d_k
//! ```
//!
//! The ṽ update is additionally floored at ṽ_{k-1} so that rounding in the
//! convex combination can never make it decrease. In exact arithmetic the
//! floor is inactive.

use serde::{Deserialize, Serialize};

use crate::{vecops, Error, HyperParams, Point, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState<T> {
    /// Anchor sequence x_k.
    pub x: Point<T>,
    /// Extrapolated point z_k where the gradient was sampled.
    pub z: Point<T>,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub v_tilde: Vec<T>,
    pub d: Vec<T>,
    /// Gradient field sampled in the most recent step (zero before the first).
    pub g_hat: Vec<T>,
    /// Running max of ‖ĝ‖∞ over all steps taken so far.
    pub g_inf_seen: T,
    pub k: u64,
}

/// Minimal interface shared by ADAM³ and the baseline optimizers.
pub trait Stepper<T: Scalar>: Sized + Clone {
    fn step<F>(&self, hp: &HyperParams<T>, grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>;

    /// Point at which the most recent gradient was taken (z_k for
    /// extragradient methods, x_k otherwise).
    fn query_point(&self) -> &Point<T>;

    fn iteration(&self) -> u64;

    fn is_finite(&self) -> bool;
}

impl<T: Scalar> OptimizerState<T> {
    /// All-zero start with ṽ₀ uniformly `hp.v0_init`.
    pub fn init(dim: usize, split: usize, hp: &HyperParams<T>) -> Result<Self> {
        Self::init_at(Point::zeros(dim, split)?, hp)
    }

    /// Start from `x0 = z0`, with zero moments.
    pub fn init_at(x0: Point<T>, hp: &HyperParams<T>) -> Result<Self> {
        hp.validate()?;
        let dim = x0.dim();
        let zeros = vec![T::zero(); dim];
        Ok(Self {
            z: x0.clone(),
            x: x0,
            m: zeros.clone(),
            v: zeros.clone(),
            v_tilde: vec![hp.v0_init; dim],
            d: zeros.clone(),
            g_hat: zeros,
            g_inf_seen: T::zero(),
            k: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn step<F>(&self, hp: &HyperParams<T>, mut grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        let k = self.k + 1;
        let dim = self.dim();

        let z = self.x.step_along(hp.eta, &self.d);
        let g = grad_at(&z);
        if g.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
        }

        let b1 = hp.beta1_at(k);
        let b2 = hp.beta2;
        let b3 = hp.beta3;
        let one = T::one();

        let mut m = Vec::with_capacity(dim);
        let mut v = Vec::with_capacity(dim);
        let mut v_tilde = Vec::with_capacity(dim);
        let mut d = Vec::with_capacity(dim);
        for r in 0..dim {
            let gr = g[r];
            let mr = b1 * self.m[r] + (one - b1) * gr;
            let vr = b2 * self.v[r] + (one - b2) * gr * gr + hp.eps_guard;
            let prev = self.v_tilde[r];
            let vt = (b3 * prev + (one - b3) * prev.max(vr)).max(prev);
            if vt == T::zero() {
                return Err(Error::DegenerateScaling { iteration: k, coordinate: r });
            }
            m.push(mr);
            v.push(vr);
            v_tilde.push(vt);
            d.push(mr / vt.sqrt());
        }
        let x = self.x.step_along(hp.eta, &d);
        let g_inf_seen = self.g_inf_seen.max(vecops::norm_inf(&g));

        Ok(Self { x, z, m, v, v_tilde, d, g_hat: g, g_inf_seen, k })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.z.is_finite()
            && [&self.m, &self.v, &self.v_tilde, &self.d]
                .iter()
                .all(|v| vecops::all_finite(v))
    }
}

impl<T: Scalar> Stepper<T> for OptimizerState<T> {
    fn step<F>(&self, hp: &HyperParams<T>, grad_at: F) -> Result<Self>
    where
        F: FnMut(&Point<T>) -> Vec<T>,
    {
        OptimizerState::step(self, hp, grad_at)
    }

    fn query_point(&self) -> &Point<T> {
        &self.z
    }

    fn iteration(&self) -> u64 {
        self.k
    }

    fn is_finite(&self) -> bool {
        OptimizerState::is_finite(self)
    }
}
