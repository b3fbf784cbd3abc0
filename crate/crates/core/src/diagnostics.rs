//! Performance metrics and runtime verification.
//!
//! `e_k = ‖z_k − z*‖ / ‖z*‖` measures distance to a known equilibrium and
//! `R_k = (1/k) Σ_{i≤k} ‖∇F(z_i)‖²` is the running mean squared field norm.
//! [`audit_trace`] replays recorded optimizer states against the momentum,
//! scaler and direction bounds that hold along every ADAM³ trajectory.

use serde::{Deserialize, Serialize};

use crate::theory::compute_uc;
use crate::{vecops, AssumptionConstants, Error, Game, HyperParams, OptimizerState, Point, Result, Scalar};

/// One recorded iteration.
///
/// `e_k` is absent when the game has no known equilibrium (or it sits at the
/// origin); `grad_norm_sq` and `r_k` are absent without an exact field. The
/// lemma flags are `None` for methods or settings where the check does not
/// apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord<T> {
    pub k: u64,
    pub z: Point<T>,
    pub e_k: Option<T>,
    pub grad_norm_sq: Option<T>,
    pub r_k: Option<T>,
    pub lemma1_ok: Option<bool>,
    pub lemma2_ok: Option<bool>,
    pub monotone_ok: Option<bool>,
}

pub fn relative_error<T: Scalar>(z: &Point<T>, z_star: &Point<T>) -> Result<T> {
    if z.dim() != z_star.dim() {
        return Err(Error::DimensionMismatch { expected: z_star.dim(), got: z.dim() });
    }
    let denom = z_star.norm();
    if denom == T::zero() {
        return Err(Error::ZeroReference);
    }
    Ok(z.distance(z_star) / denom)
}

/// Prefix means of `history`.
pub fn running_avg_grad_norm<T: Scalar>(history: &[T]) -> Result<Vec<T>> {
    if history.is_empty() {
        return Err(Error::EmptyInput("gradient-norm history"));
    }
    let mut sum = T::zero();
    Ok(history
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            sum += x;
            sum / T::from_usize(i + 1).expect("count fits scalar")
        })
        .collect())
}

/// Compares `field` against central differences of `value` (α-block
/// negated). Returns the largest per-coordinate deviation, measured
/// relative to `max(|field_r|, 1)`.
pub fn finite_diff_deviation<T, V, F>(value: V, field: F, point: &Point<T>, h: T) -> Result<T>
where
    T: Scalar,
    V: Fn(&Point<T>) -> T,
    F: Fn(&Point<T>) -> Vec<T>,
{
    if !(h > T::zero()) {
        return Err(Error::InvalidConfig(format!("step h must be positive, got {h}")));
    }
    let exact = field(point);
    if exact.len() != point.dim() {
        return Err(Error::DimensionMismatch { expected: point.dim(), got: exact.len() });
    }
    let two = T::lit(2.0);
    let mut worst = T::zero();
    let mut buf = point.values().to_vec();
    for r in 0..point.dim() {
        let orig = buf[r];
        buf[r] = orig + h;
        let fp = value(&Point::from_raw(buf.clone(), point.split()));
        buf[r] = orig - h;
        let fm = value(&Point::from_raw(buf.clone(), point.split()));
        buf[r] = orig;
        let mut fd = (fp - fm) / (two * h);
        if r >= point.split() {
            fd = -fd;
        }
        let dev = (fd - exact[r]).abs() / exact[r].abs().max(T::one());
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// [`finite_diff_deviation`] on a game's closed-form objective and field.
pub fn finite_diff_check<T: Scalar>(game: &dyn Game<T>, point: &Point<T>, h: T) -> Result<T> {
    if game.exact_value(point).is_none() {
        return Err(Error::MissingOracle("an exact objective value"));
    }
    if game.exact_field(point).is_none() {
        return Err(Error::MissingOracle("an exact gradient field"));
    }
    finite_diff_deviation(
        |p| game.exact_value(p).expect("checked above"),
        |p| game.exact_field(p).expect("checked above"),
        point,
        h,
    )
}

fn rounding_slack<T: Scalar>() -> T {
    T::one() + T::epsilon() * T::lit(16.0)
}

/// Upper bound on ‖ṽ_k‖∞ given a gradient sup-norm `g_inf`:
/// `max(ṽ₀, G∞² + ε/(1−β₂))`. Reduces to G∞² when ε = 0 and ṽ₀ = 0.
pub fn scaler_bound<T: Scalar>(hp: &HyperParams<T>, g_inf: T) -> T {
    hp.v0_init.max(g_inf * g_inf + hp.eps_guard / (T::one() - hp.beta2))
}

/// ‖m_k‖∞ ≤ G∞ and ‖ṽ_k‖∞ ≤ [`scaler_bound`], up to rounding.
pub fn lemma1_holds<T: Scalar>(state: &OptimizerState<T>, hp: &HyperParams<T>, g_inf: T) -> (bool, bool) {
    let slack = rounding_slack::<T>();
    let m_ok = vecops::norm_inf(&state.m) <= g_inf * slack;
    let v_ok = vecops::norm_inf(&state.v_tilde) <= scaler_bound(hp, g_inf) * slack;
    (m_ok, v_ok)
}

/// Lemma-2 bound `sqrt(d / u_c)`, or `None` when γ > 1 (not applicable).
/// γ = 1 gives an infinite bound.
pub fn lemma2_bound<T: Scalar>(hp: &HyperParams<T>, dim: usize) -> Option<T> {
    let gamma = hp.gamma();
    if gamma > T::one() || gamma.is_nan() {
        return None;
    }
    if gamma == T::one() {
        return Some(T::infinity());
    }
    let uc = compute_uc(hp).ok()?;
    Some((T::from_usize(dim).expect("dim fits scalar") / uc).sqrt())
}

/// ‖ṽ_k^{-1/2} ⊙ m_{k-1}‖ for consecutive states.
pub fn lemma2_statistic<T: Scalar>(prev: &OptimizerState<T>, cur: &OptimizerState<T>) -> T {
    prev.m
        .iter()
        .zip(&cur.v_tilde)
        .fold(T::zero(), |acc, (&m, &vt)| {
            let term = if m == T::zero() { T::zero() } else { m / vt.sqrt() };
            acc + term * term
        })
        .sqrt()
}

/// ṽ_k ≥ ṽ_{k−1} and ṽ_k ≥ (1−β₃) v_k elementwise, exactly.
pub fn monotone_holds<T: Scalar>(prev: &OptimizerState<T>, cur: &OptimizerState<T>, hp: &HyperParams<T>) -> bool {
    let floor = T::one() - hp.beta3;
    cur.v_tilde
        .iter()
        .zip(&prev.v_tilde)
        .zip(&cur.v)
        .all(|((&vt, &vt_prev), &v)| vt >= vt_prev && vt >= floor * v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail { first_iteration: u64, detail: String },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    #[serde(flatten)]
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    /// Either "empirical-G∞" (running max of observed ‖ĝ‖∞) or "given-G∞".
    pub g_inf_source: &'static str,
    pub checks: Vec<CheckResult>,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| matches!(c.status, CheckStatus::Fail { .. }))
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn status_of(&self, name: &str) -> Option<&CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.status)
    }
}

#[derive(Default)]
struct Tracker {
    first_fail: Option<(u64, String)>,
}

impl Tracker {
    fn record(&mut self, ok: bool, k: u64, detail: impl FnOnce() -> String) {
        if !ok && self.first_fail.is_none() {
            self.first_fail = Some((k, detail()));
        }
    }

    fn finish(self, name: &'static str) -> CheckResult {
        let status = match self.first_fail {
            None => CheckStatus::Pass,
            Some((first_iteration, detail)) => CheckStatus::Fail { first_iteration, detail },
        };
        CheckResult { name, status }
    }
}

/// Bounds used by [`audit_trace`]. A missing `g_inf` means the running max
/// of observed ‖ĝ‖∞ stored in each state; a missing `d_bound` skips the
/// iterate-norm check.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AuditBounds<T> {
    pub g_inf: Option<T>,
    pub d_bound: Option<T>,
}

impl<T: Scalar> From<&AssumptionConstants<T>> for AuditBounds<T> {
    fn from(ac: &AssumptionConstants<T>) -> Self {
        Self { g_inf: Some(ac.g_inf), d_bound: ac.d_bound }
    }
}

/// Audits recorded ADAM³ states.
///
/// `trace` and `states` must be aligned record-for-record; the pairwise
/// checks (direction bound, monotonicity, extragradient structure,
/// telescoping) only see consecutive iterations, so record every iteration
/// for a complete audit.
pub fn audit_trace<T: Scalar>(
    trace: &[TraceRecord<T>],
    states: &[OptimizerState<T>],
    hp: &HyperParams<T>,
    bounds: &AuditBounds<T>,
) -> Result<AuditReport> {
    if trace.len() != states.len() {
        return Err(Error::TraceMismatch { trace: trace.len(), states: states.len() });
    }
    let g_inf_source = if bounds.g_inf.is_some() { "given-G∞" } else { "empirical-G∞" };
    if states.is_empty() {
        return Ok(AuditReport { g_inf_source, checks: Vec::new() });
    }
    if let Some((rec, st)) = trace.iter().zip(states).find(|(r, s)| r.k != s.k) {
        return Err(Error::InvalidConfig(format!(
            "trace record k={} does not match state k={}",
            rec.k, st.k
        )));
    }
    let dim = states[0].dim();

    let mut momentum = Tracker::default();
    let mut scaler = Tracker::default();
    let mut direction = Tracker::default();
    let mut monotone = Tracker::default();
    let mut extragrad = Tracker::default();
    let mut iterate = Tracker::default();

    let l2_bound = lemma2_bound(hp, dim);
    let (mut vdiff_sum, mut contiguous) = (T::zero(), true);

    for (i, st) in states.iter().enumerate() {
        let g_inf = bounds.g_inf.unwrap_or(st.g_inf_seen);
        let (m_ok, v_ok) = lemma1_holds(st, hp, g_inf);
        momentum.record(m_ok, st.k, || {
            format!("‖m‖∞ = {} > G∞ = {}", vecops::norm_inf(&st.m), g_inf)
        });
        scaler.record(v_ok, st.k, || {
            format!("‖ṽ‖∞ = {} > {}", vecops::norm_inf(&st.v_tilde), scaler_bound(hp, g_inf))
        });
        if let Some(d) = bounds.d_bound {
            let n = st.x.norm();
            iterate.record(n <= d / T::lit(2.0), st.k, || format!("‖x‖ = {n} > D/2 = {}", d / T::lit(2.0)));
        }

        if i == 0 {
            continue;
        }
        let prev = &states[i - 1];
        if st.k != prev.k + 1 {
            contiguous = false;
            continue;
        }
        if let Some(bound) = l2_bound {
            let stat = lemma2_statistic(prev, st);
            direction.record(stat <= bound * rounding_slack::<T>(), st.k, || {
                format!("‖ṽ^(-1/2) ⊙ m_prev‖ = {stat} > sqrt(d/u_c) = {bound}")
            });
        }
        monotone.record(monotone_holds(prev, st, hp), st.k, || "ṽ decreased or fell below (1−β₃)v".into());
        let expected_z = prev.x.step_along(hp.eta, &prev.d);
        extragrad.record(expected_z == st.z, st.k, || "z_k ≠ x_{k−1} − η d_{k−1}".into());
        vdiff_sum += st
            .v_tilde
            .iter()
            .zip(&prev.v_tilde)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
    }

    let mut checks = vec![
        momentum.finish("lemma1_momentum"),
        scaler.finish("lemma1_scaler"),
    ];
    checks.push(match l2_bound {
        Some(_) => direction.finish("lemma2_direction"),
        None => CheckResult {
            name: "lemma2_direction",
            status: CheckStatus::NotApplicable { reason: "gamma = beta1_1 / beta2 > 1".into() },
        },
    });
    checks.push(monotone.finish("v_tilde_monotone"));
    checks.push(extragrad.finish("extragradient_structure"));

    let vdiff = if contiguous {
        let first = &states[0].v_tilde;
        let last = &states[states.len() - 1].v_tilde;
        let telescoped = last.iter().zip(first).fold(T::zero(), |acc, (&a, &b)| acc + (a - b));
        let cap = last.iter().zip(first).fold(T::zero(), |acc, (&a, &b)| acc + a.max(b));
        let tol = T::lit(1e-9) * telescoped.abs().max(T::min_positive_value());
        let mut t = Tracker::default();
        t.record(
            (vdiff_sum - telescoped).abs() <= tol && vdiff_sum <= cap * rounding_slack::<T>(),
            states[states.len() - 1].k,
            || format!("Σ‖Δṽ‖₁ = {vdiff_sum}, telescoped = {telescoped}, cap = {cap}"),
        );
        t.finish("v_diff_telescoping")
    } else {
        CheckResult {
            name: "v_diff_telescoping",
            status: CheckStatus::NotApplicable { reason: "states are not contiguous".into() },
        }
    };
    checks.push(vdiff);

    if bounds.d_bound.is_some() {
        checks.push(iterate.finish("assumption4_iterate_bound"));
    }
    Ok(AuditReport { g_inf_source, checks })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::{BilinearGame, FnGame, QuadraticGame, QuadraticGameParams};

    fn pt(a: f64, b: f64) -> Point<f64> {
        Point::new(vec![a, b], 1).unwrap()
    }

    #[test]
    fn relative_error_examples() {
        let zs = pt(0.0, 5.0);
        assert_eq!(relative_error(&zs, &zs).unwrap(), 0.0);
        assert_eq!(relative_error(&pt(0.0, 10.0), &zs).unwrap(), 1.0);
        assert_abs_diff_eq!(relative_error(&pt(3.0, 4.0), &zs).unwrap(), 0.632456, epsilon = 1e-6);
        assert_eq!(relative_error(&zs, &pt(0.0, 0.0)), Err(Error::ZeroReference));
    }

    #[test]
    fn running_avg_examples() {
        assert_eq!(running_avg_grad_norm(&[4.0]).unwrap(), vec![4.0]);
        assert_eq!(running_avg_grad_norm(&[4.0, 0.0]).unwrap(), vec![4.0, 2.0]);
        assert_eq!(running_avg_grad_norm(&[1.5; 6]).unwrap(), vec![1.5; 6]);
        assert!(running_avg_grad_norm::<f64>(&[]).is_err());
    }

    #[test]
    fn finite_diff_quadratic_and_bilinear() {
        let q = QuadraticGame::new(QuadraticGameParams::new(1010.0, 0.01).unwrap()).unwrap();
        assert!(finite_diff_check(&q, &pt(1.0, 1.0), 1e-5).unwrap() < 1e-6);
        let b = BilinearGame::new(2.5).unwrap();
        for p in [pt(0.0, 0.0), pt(1.0, -3.0), pt(17.0, 4.5)] {
            assert!(finite_diff_check(&b, &p, 1e-3).unwrap() < 1e-9);
        }
    }

    #[test]
    fn finite_diff_ignores_constant_offset() {
        let field = |p: &Point<f64>| vec![3.0 * p.values()[0].powi(2), -(2.0 * p.values()[1])];
        let v0 = |p: &Point<f64>| p.values()[0].powi(3) + p.values()[1].powi(2);
        let v1 = |p: &Point<f64>| p.values()[0].powi(3) + p.values()[1].powi(2) + 7.0;
        let p = pt(0.5, 0.5);
        let a = finite_diff_deviation(v0, field, &p, 1e-3).unwrap();
        let b = finite_diff_deviation(v1, field, &p, 1e-3).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn finite_diff_needs_exact_value() {
        let g = FnGame::<f64>::deterministic(2, 1, |p| p.values().to_vec()).unwrap();
        assert_eq!(
            finite_diff_check(&g, &pt(0.0, 0.0), 1e-4),
            Err(Error::MissingOracle("an exact objective value"))
        );
    }

    #[test]
    fn finite_diff_detects_wrong_sign() {
        // Field that forgets to negate the α block.
        let value = |p: &Point<f64>| p.values()[0] * p.values()[1];
        let wrong = |p: &Point<f64>| vec![p.values()[1], p.values()[0]];
        assert!(finite_diff_deviation(value, wrong, &pt(1.0, 2.0), 1e-4).unwrap() > 0.5);
    }

    #[test]
    fn empty_audit() {
        let hp = HyperParams::<f64>::synthetic(4.0);
        let rep = audit_trace(&[], &[], &hp, &AuditBounds::default()).unwrap();
        assert!(rep.checks.is_empty());
        assert!(rep.all_passed());
    }

    proptest! {
        #[test]
        fn running_avg_last_is_mean(mut xs in prop::collection::vec(0.0f64..100.0, 1..50)) {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let r = running_avg_grad_norm(&xs).unwrap();
            prop_assert!((r[r.len() - 1] - mean).abs() <= 1e-10 * mean.max(1.0));
            xs.reverse();
            let r = running_avg_grad_norm(&xs).unwrap();
            prop_assert!((r[r.len() - 1] - mean).abs() <= 1e-10 * mean.max(1.0));
        }
    }
}
