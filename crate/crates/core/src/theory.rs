//! Admissibility bounds for ADAM³ and ε-SFNE certification.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{vecops, Error, Game, HyperParams, Point, Result, Scalar};

/// Constants appearing in the convergence assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants<T> {
    /// Sup-norm bound on stochastic gradients.
    pub g_inf: T,
    /// Floor constant with `G₀² ≤ ‖ṽ₀‖∞`.
    pub g0: T,
    /// Lipschitz constant of the field.
    pub l: T,
    /// Gradient noise variance.
    pub sigma2: T,
    /// Iterate-norm bound: ‖x_k‖ ≤ D/2.
    pub d_bound: Option<T>,
}

impl<T: Scalar> AssumptionConstants<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, x: T| {
            if x > T::zero() && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {x}")))
            }
        };
        pos("G_inf", self.g_inf)?;
        pos("G0", self.g0)?;
        pos("L", self.l)?;
        if let Some(d) = self.d_bound {
            pos("D", d)?;
        }
        if !(self.sigma2 >= T::zero()) {
            return Err(Error::InvalidConfig("sigma2 must be nonnegative".into()));
        }
        if self.g0 > self.g_inf {
            return Err(Error::Infeasible(format!(
                "G0 = {} exceeds G_inf = {}: the ṽ₀ floor and the gradient bound cannot both hold",
                self.g0, self.g_inf
            )));
        }
        Ok(())
    }
}

/// `u_c = (1−β₃)(1−β₁,₁)(1−β₂)(1−γ)` with γ = β₁,₁/β₂; requires γ < 1.
pub fn compute_uc<T: Scalar>(hp: &HyperParams<T>) -> Result<T> {
    let gamma = hp.gamma();
    if !(gamma < T::one()) {
        return Err(Error::Infeasible(format!(
            "gamma = beta1_1 / beta2 = {gamma} must be < 1"
        )));
    }
    let one = T::one();
    Ok((one - hp.beta3) * (one - hp.beta1_1) * (one - hp.beta2) * (one - gamma))
}

/// Largest admissible step size `sqrt(G₀³ / (56 L² G∞))`.
pub fn compute_eta_max<T: Scalar>(ac: &AssumptionConstants<T>) -> Result<T> {
    ac.validate()?;
    Ok((ac.g0.powi(3) / (T::lit(56.0) * ac.l * ac.l * ac.g_inf)).sqrt())
}

/// Returns `(C, β₁,₁ cap)` with
/// `C = (1+κ)κ²G₀³ / (168(1−κ)G∞³)` and cap `√C/(√C+1)`.
pub fn compute_beta1_cap<T: Scalar>(ac: &AssumptionConstants<T>, kappa: T) -> Result<(T, T)> {
    ac.validate()?;
    if !(kappa > T::zero() && kappa < T::one()) {
        return Err(Error::InvalidConfig(format!("kappa must lie in (0, 1), got {kappa}")));
    }
    let one = T::one();
    let c = (one + kappa) * kappa * kappa * ac.g0.powi(3)
        / (T::lit(168.0) * (one - kappa) * ac.g_inf.powi(3));
    let root = c.sqrt();
    Ok((c, root / (root + one)))
}

/// Iteration count and batch size sufficient for an ε-SFNE iterate:
/// `N ≥ 3C₁/ε²`, `m ≥ 3C₂σ²/ε²`, rounded up.
pub fn corollary1_sizing<T: Scalar>(c1: T, c2: T, sigma2: T, eps: T) -> Result<(u64, u64)> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if !(c1 > T::zero() && c2 > T::zero()) {
        return Err(Error::InvalidConfig("C1 and C2 must be positive".into()));
    }
    if !(sigma2 >= T::zero()) {
        return Err(Error::InvalidConfig("sigma2 must be nonnegative".into()));
    }
    let three = T::lit(3.0);
    let eps2 = eps * eps;
    Ok((ceil_count(three * c1 / eps2)?, ceil_count(three * c2 * sigma2 / eps2)?))
}

/// Ceiling that ignores relative rounding noise below 1e-12, so that e.g.
/// `3 / 0.1²` yields 300 rather than 301.
fn ceil_count<T: Scalar>(x: T) -> Result<u64> {
    let x = x.to_f64_lossy();
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(Error::Infeasible(format!("sample size {x} is not representable")));
    }
    let nearest = x.round();
    let snapped = if (x - nearest).abs() <= 1e-12 * nearest.abs().max(1.0) { nearest } else { x.ceil() };
    Ok(snapped.max(0.0) as u64)
}

/// Constants B₀, B₁, B₂ from the convergence proof, for which
/// `B₀ · (1/N)Σ E‖∇F(z_k)‖² ≤ B₁/N + B₂σ²/m`. Informational only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofConstants<T> {
    pub b0: T,
    pub b1: T,
    pub b2: T,
}

pub fn proof_constants<T: Scalar>(
    hp: &HyperParams<T>,
    ac: &AssumptionConstants<T>,
    dim: usize,
) -> Result<ProofConstants<T>> {
    ac.validate()?;
    let kappa = hp.kappa;
    if !(kappa < T::one()) {
        return Err(Error::InvalidConfig("proof constants need kappa < 1".into()));
    }
    let d_bound = ac
        .d_bound
        .ok_or_else(|| Error::InvalidConfig("proof constants need the iterate bound D".into()))?;
    let uc = compute_uc(hp)?;
    let one = T::one();
    let lit = T::lit;
    let d = T::from_usize(dim).expect("dimension fits scalar");
    let (eta, b11, gi, g0) = (hp.eta, hp.beta1_1, ac.g_inf, ac.g0);
    let eta2 = eta * eta;

    let b0 = eta2 * (one - b11).powi(2) / (gi * gi)
        - lit(84.0) * (one - kappa) * b11 * b11 * eta2 * gi / (g0.powi(3) * kappa * kappa * (one + kappa));
    let one_m_k2 = one - kappa * kappa;
    let b1 = lit(6.0) * eta2 * d * b11 * b11 / (uc * one_m_k2)
        + lit(18.0) * d_bound * d_bound * d * gi / g0
        + lit(168.0) * eta2 * d * b11 * b11 * gi / (uc * one_m_k2 * g0)
        + lit(84.0) * eta2 * d * gi.powi(3) / g0.powi(3)
        + lit(12.0) * eta * d_bound / g0
            * (b11 * gi / (one - kappa) * (d / uc).sqrt() + gi * gi * d / g0);
    let b2 = lit(6.0) * eta2 / (g0 * g0) + lit(168.0) * eta2 * gi / g0.powi(3);
    Ok(ProofConstants { b0, b1, b2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SfneVerdict {
    Holds,
    Fails,
    /// The Monte-Carlo error bar straddles ε².
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SfneReport<T> {
    /// Smallest (estimated) ‖∇F‖² over the candidate points.
    pub min_norm_sq: T,
    pub argmin: usize,
    pub point: Point<T>,
    /// Standard error of `min_norm_sq` (Monte-Carlo certificates only).
    pub std_err: Option<T>,
    pub verdict: SfneVerdict,
}

/// Certifies that some point among `points` is an ε-SFNE using the exact
/// field: holds iff `min ‖∇F(z)‖² ≤ ε²`.
pub fn sfne_certificate<T: Scalar>(
    game: &dyn Game<T>,
    points: &[Point<T>],
    eps: T,
) -> Result<SfneReport<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("candidate points"));
    }
    if !(eps > T::zero()) {
        return Err(Error::InvalidConfig("eps must be positive".into()));
    }
    let mut best: Option<(usize, T)> = None;
    for (i, p) in points.iter().enumerate() {
        let f = game.exact_field(p).ok_or(Error::MissingOracle("an exact gradient field"))?;
        let n = vecops::norm2_sq(&f);
        if best.is_none_or(|(_, b)| n < b) {
            best = Some((i, n));
        }
    }
    let (argmin, min_norm_sq) = best.expect("nonempty");
    let verdict = if min_norm_sq <= eps * eps { SfneVerdict::Holds } else { SfneVerdict::Fails };
    Ok(SfneReport { min_norm_sq, argmin, point: points[argmin].clone(), std_err: None, verdict })
}

/// Monte-Carlo certificate for games without a closed-form field.
///
/// The field at each point is estimated from `samples` single draws. The
/// squared-norm estimate is bracketed by ±3 standard errors per coordinate;
/// the verdict is `Holds` if some bracket lies entirely below ε², `Fails` if
/// every bracket lies above, and `Inconclusive` otherwise.
pub fn sfne_certificate_mc<T: Scalar>(
    game: &dyn Game<T>,
    points: &[Point<T>],
    eps: T,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<SfneReport<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("candidate points"));
    }
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least 2 Monte-Carlo samples".into()));
    }
    let eps2 = eps * eps;
    let n = T::from_usize(samples).expect("sample count fits scalar");
    let three = T::lit(3.0);
    let mut best: Option<(usize, T, T)> = None;
    let mut any_holds = false;
    let mut all_fail = true;

    for (i, p) in points.iter().enumerate() {
        let dim = game.dim();
        let mut mean = vec![T::zero(); dim];
        let mut m2 = vec![T::zero(); dim];
        for s in 0..samples {
            let g = game.sample_field(p, 1, rng);
            let cnt = T::from_usize(s + 1).expect("count fits scalar");
            for r in 0..dim {
                let delta = g[r] - mean[r];
                mean[r] += delta / cnt;
                m2[r] += delta * (g[r] - mean[r]);
            }
        }
        let se: Vec<T> = m2.iter().map(|&q| (q / (n - T::one()) / n).sqrt()).collect();
        let est = vecops::norm2_sq(&mean);
        let (mut lo, mut hi) = (T::zero(), T::zero());
        for r in 0..dim {
            let a = mean[r].abs();
            let l = (a - three * se[r]).max(T::zero());
            let h = a + three * se[r];
            lo += l * l;
            hi += h * h;
        }
        any_holds |= hi <= eps2;
        all_fail &= lo > eps2;
        // Standard error of ‖μ̂‖² by the delta method.
        let se_norm = T::lit(2.0)
            * mean
                .iter()
                .zip(&se)
                .fold(T::zero(), |acc, (&m, &s)| acc + m * m * s * s)
                .sqrt();
        if best.is_none_or(|(_, b, _)| est < b) {
            best = Some((i, est, se_norm));
        }
    }
    let (argmin, min_norm_sq, se) = best.expect("nonempty");
    let verdict = if any_holds {
        SfneVerdict::Holds
    } else if all_fail {
        SfneVerdict::Fails
    } else {
        SfneVerdict::Inconclusive
    };
    Ok(SfneReport { min_norm_sq, argmin, point: points[argmin].clone(), std_err: Some(se), verdict })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::{QuadraticGame, QuadraticGameParams};

    fn unit() -> AssumptionConstants<f64> {
        AssumptionConstants { g_inf: 1.0, g0: 1.0, l: 1.0, sigma2: 1.0, d_bound: None }
    }

    fn hp(b11: f64, b2: f64, b3: f64) -> HyperParams<f64> {
        HyperParams { beta1_1: b11, beta2: b2, beta3: b3, ..HyperParams::synthetic(4.0) }
    }

    #[test]
    fn uc_examples() {
        assert_relative_eq!(compute_uc(&hp(0.0, 0.5, 0.1)).unwrap(), 0.45, max_relative = 1e-14);
        assert_relative_eq!(compute_uc(&hp(0.45, 0.9, 0.0)).unwrap(), 0.0275, max_relative = 1e-12);
        let near = compute_uc(&hp(0.0, 1.0 - 1e-12, 0.0)).unwrap();
        assert!(near > 0.0 && near < 1e-11);
    }

    #[test]
    fn uc_rejects_gamma_at_least_one() {
        assert!(matches!(compute_uc(&hp(0.9, 0.9, 0.0)), Err(Error::Infeasible(_))));
        assert!(matches!(compute_uc(&hp(0.5, 0.0, 0.0)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn eta_max_examples() {
        approx::assert_abs_diff_eq!(compute_eta_max(&unit()).unwrap(), 0.133631, epsilon = 5e-7);
        let half_g0 = AssumptionConstants { g0: 0.5, ..unit() };
        approx::assert_abs_diff_eq!(compute_eta_max(&half_g0).unwrap(), 0.047246, epsilon = 5e-7);
        let two_l = AssumptionConstants { l: 2.0, ..unit() };
        assert_relative_eq!(
            compute_eta_max(&two_l).unwrap(),
            compute_eta_max(&unit()).unwrap() / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn beta1_cap_examples() {
        let (c, cap) = compute_beta1_cap(&unit(), 0.5).unwrap();
        assert_relative_eq!(c, 0.375 / 84.0, max_relative = 1e-14);
        assert_relative_eq!(c, 0.00446429, max_relative = 1e-6);
        assert_relative_eq!(cap, 0.062631, max_relative = 1e-5);
        let (_, near_one) = compute_beta1_cap(&unit(), 0.999_999).unwrap();
        assert!(near_one > 0.9);
        let tiny = AssumptionConstants { g0: 1e-6, ..unit() };
        assert!(compute_beta1_cap(&tiny, 0.5).unwrap().1 < 1e-8);
        assert!(compute_beta1_cap(&unit(), 1.0).is_err());
        assert!(compute_beta1_cap(&unit(), 0.0).is_err());
    }

    #[test]
    fn infeasible_g0_above_g_inf() {
        let bad = AssumptionConstants { g0: 2.0, ..unit() };
        assert!(matches!(compute_eta_max(&bad), Err(Error::Infeasible(_))));
    }

    #[test]
    fn sizing_examples() {
        assert_eq!(corollary1_sizing(1.0, 1.0, 1.0, 0.1).unwrap(), (300, 300));
        assert_eq!(corollary1_sizing(1.0, 5.0, 0.0, 0.1).unwrap().1, 0);
        let (n1, m1) = corollary1_sizing(2.0, 3.0, 1.0, 0.2).unwrap();
        let (n2, m2) = corollary1_sizing(2.0, 3.0, 1.0, 0.1).unwrap();
        assert_eq!((n2, m2), (4 * n1, 4 * m1));
        assert!(corollary1_sizing(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn proof_constants_b2() {
        let ac = AssumptionConstants { d_bound: Some(2.0), ..unit() };
        let h = HyperParams { eta: 0.01, beta1_1: 0.05, kappa: 0.5, beta2: 0.9, beta3: 0.1, ..hp(0.0, 0.5, 0.0) };
        let pc = proof_constants(&h, &ac, 2).unwrap();
        assert_relative_eq!(pc.b2, 174.0 * 1e-4, max_relative = 1e-12);
        assert!(pc.b1 > 0.0);
    }

    fn quad(c: f64, k: f64) -> QuadraticGame<f64> {
        QuadraticGame::new(QuadraticGameParams::new(c, k).unwrap()).unwrap()
    }

    #[test]
    fn certificate_examples() {
        let g = quad(4.0, 2.0);
        let origin = Point::new(vec![0.0, 0.0], 1).unwrap();
        let rep = sfne_certificate(&g, std::slice::from_ref(&origin), 2.0).unwrap();
        assert_eq!(rep.min_norm_sq, 8.0);
        assert_eq!(rep.verdict, SfneVerdict::Fails);
        assert_eq!(sfne_certificate(&g, std::slice::from_ref(&origin), 8f64.sqrt()).unwrap().verdict, SfneVerdict::Holds);

        let fne = g.known_fne().unwrap();
        let rep = sfne_certificate(&g, &[origin, fne], 1e-12).unwrap();
        assert_eq!(rep.argmin, 1);
        assert_eq!(rep.verdict, SfneVerdict::Holds);
        assert!(sfne_certificate(&g, &[], 1.0).is_err());
    }

    #[test]
    fn mc_certificate() {
        let g = quad(4.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let origin = Point::new(vec![0.0, 0.0], 1).unwrap();
        let far = Point::new(vec![30.0, 30.0], 1).unwrap();
        let rep = sfne_certificate_mc(&g, &[origin.clone(), far.clone()], 1.0, 20_000, &mut rng).unwrap();
        assert_eq!(rep.verdict, SfneVerdict::Fails);
        assert_eq!(rep.argmin, 0);
        let rep = sfne_certificate_mc(&g, &[far, origin], 100.0, 20_000, &mut rng).unwrap();
        assert_eq!(rep.verdict, SfneVerdict::Holds);
        // ε² = 8 sits right on the true value
        let rep = sfne_certificate_mc(&g, &[Point::new(vec![0.0, 0.0], 1).unwrap()], 8f64.sqrt(), 1000, &mut rng).unwrap();
        assert_eq!(rep.verdict, SfneVerdict::Inconclusive);
    }

    proptest! {
        #[test]
        fn uc_in_unit_interval(b2 in 0.01f64..0.99, frac in 0.0f64..0.99, b3 in 0.0f64..0.99) {
            let h = hp(frac * b2, b2, b3);
            let u = compute_uc(&h).unwrap();
            prop_assert!(u > 0.0 && u < 1.0);
        }

        #[test]
        fn eta_max_homogeneous_in_g0(g0 in 0.01f64..1.0, s in 0.1f64..1.0, l in 0.1f64..10.0) {
            let a = AssumptionConstants { g0, l, ..unit() };
            let b = AssumptionConstants { g0: s * g0, l, ..unit() };
            let ratio = compute_eta_max(&b).unwrap() / compute_eta_max(&a).unwrap();
            prop_assert!((ratio - s.powf(1.5)).abs() < 1e-12);
        }

        #[test]
        fn certificate_monotone_in_eps(a in -5.0f64..5.0, b in -5.0f64..5.0, eps in 0.01f64..50.0, extra in 0.0f64..10.0) {
            let g = quad(4.0, 2.0);
            let p = Point::new(vec![a, b], 1).unwrap();
            let r1 = sfne_certificate(&g, std::slice::from_ref(&p), eps).unwrap();
            let r2 = sfne_certificate(&g, &[p], eps + extra).unwrap();
            if r1.verdict == SfneVerdict::Holds {
                prop_assert_eq!(r2.verdict, SfneVerdict::Holds);
            }
        }
    }
}
