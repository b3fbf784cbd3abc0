//! Stochastic min-max games.
//!
//! Every game reports its *gradient field* `[∇θ F, −∇α F]`: the
//! maximizing block is sign-flipped so that all optimizers descend along
//! the field. Zeros of the field are first-order Nash equilibria.

use rand::{Rng, RngCore};

use crate::{Error, Point, Result, Scalar};

/// A stochastic min-max game `min_θ max_α F(θ, α) = E[f(θ, α; ξ)]`.
pub trait Game<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of minimization coordinates p₁.
    fn split(&self) -> usize;

    /// Minibatch-averaged stochastic gradient field at `z` using `batch`
    /// draws from `rng`.
    fn sample_field(&self, z: &Point<T>, batch: usize, rng: &mut dyn RngCore) -> Vec<T>;

    /// Expected gradient field ∇F, when known in closed form.
    fn exact_field(&self, _z: &Point<T>) -> Option<Vec<T>> {
        None
    }

    /// Expected objective F, when known in closed form.
    fn exact_value(&self, _z: &Point<T>) -> Option<T> {
        None
    }

    fn known_fne(&self) -> Option<Point<T>> {
        None
    }
}

/// Concatenates `grad_theta` with the negation of `grad_alpha`.
pub fn assemble_field<T: Scalar>(grad_theta: &[T], grad_alpha: &[T]) -> Vec<T> {
    grad_theta
        .iter()
        .copied()
        .chain(grad_alpha.iter().map(|&g| -g))
        .collect()
}

/// Like [`assemble_field`] but checks the block lengths against `(p1, p2)`.
pub fn assemble_field_checked<T: Scalar>(
    grad_theta: &[T],
    grad_alpha: &[T],
    p1: usize,
    p2: usize,
) -> Result<Vec<T>> {
    if grad_theta.len() != p1 {
        return Err(Error::DimensionMismatch { expected: p1, got: grad_theta.len() });
    }
    if grad_alpha.len() != p2 {
        return Err(Error::DimensionMismatch { expected: p2, got: grad_alpha.len() });
    }
    Ok(assemble_field(grad_theta, grad_alpha))
}

/// Parameters of the two-branch quadratic game
///
/// ```text
/// f(θ, α; ξ) = a_ξ (θ − α) + (θ² − α²) + k θ α,   a_ξ = c w.p. 1/3, 1 w.p. 2/3
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticGameParams<T> {
    pub c: T,
    pub k_coupling: T,
}

impl<T: Scalar> QuadraticGameParams<T> {
    pub fn new(c: T, k_coupling: T) -> Result<Self> {
        let p = Self { c, k_coupling };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > T::one() && self.c.is_finite()) {
            return Err(Error::InvalidConfig(format!("quadratic game needs c > 1, got {}", self.c)));
        }
        if !(self.k_coupling >= T::zero() && self.k_coupling.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "quadratic game needs k >= 0, got {}",
                self.k_coupling
            )));
        }
        Ok(())
    }

    /// E[a_ξ] = (c + 2) / 3.
    pub fn mean_coefficient(&self) -> T {
        (self.c + T::lit(2.0)) / T::lit(3.0)
    }

    /// Var[a_ξ] = (2/9)(c − 1)², the per-coordinate variance of a
    /// single-sample field.
    pub fn coefficient_variance(&self) -> T {
        let d = self.c - T::one();
        T::lit(2.0) / T::lit(9.0) * d * d
    }
}

/// Closed-form equilibrium `−(c+2)/(3k²+12) · (2−k, 2+k)`.
pub fn quadratic_fne<T: Scalar>(params: &QuadraticGameParams<T>) -> Point<T> {
    let two = T::lit(2.0);
    let k = params.k_coupling;
    let scale = (params.c + two) / (T::lit(3.0) * k * k + T::lit(12.0));
    Point::from_raw(vec![-scale * (two - k), -scale * (two + k)], 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticGame<T> {
    params: QuadraticGameParams<T>,
}

impl<T: Scalar> QuadraticGame<T> {
    pub fn new(params: QuadraticGameParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &QuadraticGameParams<T> {
        &self.params
    }

    /// Field for a given linear coefficient `a`.
    fn field_with(&self, a: T, z: &Point<T>) -> Vec<T> {
        let (th, al) = (z.values()[0], z.values()[1]);
        let k = self.params.k_coupling;
        let two = T::lit(2.0);
        vec![a + two * th + k * al, a + two * al - k * th]
    }

    /// One draw of the linear coefficient: `c` when `u < 1/3`, else 1.
    pub fn draw_coefficient(&self, rng: &mut dyn RngCore) -> T {
        let u: f64 = rng.gen();
        if u < 1.0 / 3.0 {
            self.params.c
        } else {
            T::one()
        }
    }
}

impl<T: Scalar> Game<T> for QuadraticGame<T> {
    fn dim(&self) -> usize {
        2
    }

    fn split(&self) -> usize {
        1
    }

    /// The field is affine in the coefficient, so averaging `batch`
    /// single-sample fields equals the field at the averaged coefficient.
    fn sample_field(&self, z: &Point<T>, batch: usize, rng: &mut dyn RngCore) -> Vec<T> {
        let batch = batch.max(1);
        let mut sum = T::zero();
        for _ in 0..batch {
            sum += self.draw_coefficient(rng);
        }
        let a = sum / T::from_usize(batch).expect("batch size fits scalar");
        self.field_with(a, z)
    }

    fn exact_field(&self, z: &Point<T>) -> Option<Vec<T>> {
        Some(self.field_with(self.params.mean_coefficient(), z))
    }

    fn exact_value(&self, z: &Point<T>) -> Option<T> {
        let (th, al) = (z.values()[0], z.values()[1]);
        let a = self.params.mean_coefficient();
        Some(a * (th - al) + (th * th - al * al) + self.params.k_coupling * th * al)
    }

    fn known_fne(&self) -> Option<Point<T>> {
        Some(quadratic_fne(&self.params))
    }
}

/// Deterministic `F(θ, α) = s·θα` with field `(s·α, −s·θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearGame<T> {
    scale: T,
}

impl<T: Scalar> BilinearGame<T> {
    pub fn new(scale: T) -> Result<Self> {
        if scale == T::zero() || !scale.is_finite() {
            return Err(Error::InvalidConfig(format!("bilinear scale must be nonzero, got {scale}")));
        }
        Ok(Self { scale })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    fn field(&self, z: &Point<T>) -> Vec<T> {
        let (th, al) = (z.values()[0], z.values()[1]);
        assemble_field(&[self.scale * al], &[self.scale * th])
    }
}

impl<T: Scalar> Game<T> for BilinearGame<T> {
    fn dim(&self) -> usize {
        2
    }

    fn split(&self) -> usize {
        1
    }

    fn sample_field(&self, z: &Point<T>, _batch: usize, _rng: &mut dyn RngCore) -> Vec<T> {
        self.field(z)
    }

    fn exact_field(&self, z: &Point<T>) -> Option<Vec<T>> {
        Some(self.field(z))
    }

    fn exact_value(&self, z: &Point<T>) -> Option<T> {
        Some(self.scale * z.values()[0] * z.values()[1])
    }

    fn known_fne(&self) -> Option<Point<T>> {
        Some(Point::from_raw(vec![T::zero(); 2], 1))
    }
}

type SampleFn<T> = dyn Fn(&Point<T>, usize, &mut dyn RngCore) -> Vec<T> + Send + Sync;
type FieldFn<T> = dyn Fn(&Point<T>) -> Vec<T> + Send + Sync;
type ValueFn<T> = dyn Fn(&Point<T>) -> T + Send + Sync;

/// A game assembled from closures, for wrapping external models.
pub struct FnGame<T> {
    dim: usize,
    split: usize,
    sample: Box<SampleFn<T>>,
    exact_field: Option<Box<FieldFn<T>>>,
    exact_value: Option<Box<ValueFn<T>>>,
    fne: Option<Point<T>>,
}

impl<T: Scalar> FnGame<T> {
    pub fn new<S>(dim: usize, split: usize, sample: S) -> Result<Self>
    where
        S: Fn(&Point<T>, usize, &mut dyn RngCore) -> Vec<T> + Send + Sync + 'static,
    {
        if dim == 0 || split > dim {
            return Err(Error::InvalidConfig(format!("bad game shape dim={dim} split={split}")));
        }
        Ok(Self {
            dim,
            split,
            sample: Box::new(sample),
            exact_field: None,
            exact_value: None,
            fne: None,
        })
    }

    /// Deterministic game whose samples are the exact field.
    pub fn deterministic<G>(dim: usize, split: usize, field: G) -> Result<Self>
    where
        G: Fn(&Point<T>) -> Vec<T> + Send + Sync + Clone + 'static,
    {
        let f2 = field.clone();
        Ok(Self::new(dim, split, move |z, _, _| field(z))?.with_exact_field(f2))
    }

    pub fn with_exact_field<G>(mut self, f: G) -> Self
    where
        G: Fn(&Point<T>) -> Vec<T> + Send + Sync + 'static,
    {
        self.exact_field = Some(Box::new(f));
        self
    }

    pub fn with_exact_value<G>(mut self, f: G) -> Self
    where
        G: Fn(&Point<T>) -> T + Send + Sync + 'static,
    {
        self.exact_value = Some(Box::new(f));
        self
    }

    pub fn with_fne(mut self, fne: Point<T>) -> Self {
        self.fne = Some(fne);
        self
    }
}

impl<T: Scalar> Game<T> for FnGame<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn split(&self) -> usize {
        self.split
    }

    fn sample_field(&self, z: &Point<T>, batch: usize, rng: &mut dyn RngCore) -> Vec<T> {
        (self.sample)(z, batch, rng)
    }

    fn exact_field(&self, z: &Point<T>) -> Option<Vec<T>> {
        self.exact_field.as_ref().map(|f| f(z))
    }

    fn exact_value(&self, z: &Point<T>) -> Option<T> {
        self.exact_value.as_ref().map(|f| f(z))
    }

    fn known_fne(&self) -> Option<Point<T>> {
        self.fne.clone()
    }
}
