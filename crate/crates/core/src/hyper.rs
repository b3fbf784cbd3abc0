use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Hyperparameters shared by ADAM³ and the baseline optimizers.
///
/// The momentum weight follows the schedule `β₁,ₖ = β₁,₁ · κ^(k−1)`; `κ = 1`
/// keeps it constant. `eps_guard` is added to `v_k` (not to ṽ_k), and every
/// entry of ṽ₀ starts at `v0_init`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct HyperParams<T> {
    pub eta: T,
    pub beta1_1: T,
    pub kappa: T,
    pub beta2: T,
    pub beta3: T,
    pub batch_m: usize,
    pub n_iters: u64,
    pub eps_guard: T,
    pub v0_init: T,
}

impl<T: Scalar> Default for HyperParams<T> {
    /// The synthetic-experiment settings for c = 1010.
    fn default() -> Self {
        Self::synthetic(T::lit(1010.0))
    }
}

impl<T: Scalar> HyperParams<T> {
    /// Settings of the synthetic quadratic-game experiment for linear
    /// coefficient `c`: η = 1e-2, β₁ = 0, β₂ = 1/(1+c²), β₃ = 0.1, N = 10⁷.
    pub fn synthetic(c: T) -> Self {
        Self {
            eta: T::lit(1e-2),
            beta1_1: T::zero(),
            kappa: T::one(),
            beta2: T::one() / (T::one() + c * c),
            beta3: T::lit(0.1),
            batch_m: 1,
            n_iters: 10_000_000,
            eps_guard: T::lit(1e-8),
            v0_init: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: T| -> Result<()> {
            if x >= T::zero() && x < T::one() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must lie in [0, 1), got {x}")))
            }
        };
        if !(self.eta > T::zero() && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        unit("beta1_1", self.beta1_1)?;
        unit("beta2", self.beta2)?;
        unit("beta3", self.beta3)?;
        if !(self.kappa > T::zero() && self.kappa <= T::one()) {
            return Err(Error::InvalidConfig(format!(
                "kappa must lie in (0, 1], got {}",
                self.kappa
            )));
        }
        if self.batch_m == 0 {
            return Err(Error::InvalidConfig("batch_m must be positive".into()));
        }
        if self.n_iters == 0 {
            return Err(Error::InvalidConfig("n_iters must be positive".into()));
        }
        if !(self.eps_guard >= T::zero() && self.eps_guard.is_finite()) {
            return Err(Error::InvalidConfig("eps_guard must be nonnegative".into()));
        }
        if !(self.v0_init >= T::zero() && self.v0_init.is_finite()) {
            return Err(Error::InvalidConfig("v0_init must be nonnegative".into()));
        }
        Ok(())
    }

    /// β₁,ₖ for iteration `k ≥ 1`.
    pub fn beta1_at(&self, k: u64) -> T {
        if self.kappa == T::one() || k <= 1 {
            return self.beta1_1;
        }
        let exp = i32::try_from(k - 1).unwrap_or(i32::MAX);
        self.beta1_1 * self.kappa.powi(exp)
    }

    /// γ = β₁,₁ / β₂. Taken as zero when both are zero.
    pub fn gamma(&self) -> T {
        if self.beta1_1 == T::zero() {
            T::zero()
        } else {
            self.beta1_1 / self.beta2
        }
    }
}
