//! Seeded experiment driver.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, lemma1_holds, lemma2_bound, lemma2_statistic, monotone_holds, TraceRecord};
use crate::optim::Stepper;
use crate::rng::iteration_stream;
use crate::{vecops, Error, Game, HyperParams, OAdagradState, OptimizerState, Point, Result, SAdamState, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Adam3,
    SAdam,
    OAdagrad,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Adam3 => "adam3",
            Method::SAdam => "sadam",
            Method::OAdagrad => "oadagrad",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adam3" => Ok(Method::Adam3),
            "sadam" | "s-adam" => Ok(Method::SAdam),
            "oadagrad" => Ok(Method::OAdagrad),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Which ADAM³ states to keep alongside the trace. States are retained only
/// at recorded iterations, so they stay aligned with the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateRetention {
    None,
    /// The last `n` recorded states.
    Window(usize),
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions<T> {
    pub trace_stride: u64,
    pub retention: StateRetention,
    /// Starting point; the origin when `None`.
    pub x0: Option<Point<T>>,
}

impl<T> Default for RunOptions<T> {
    fn default() -> Self {
        Self { trace_stride: 1, retention: StateRetention::Window(1000), x0: None }
    }
}

impl<T> RunOptions<T> {
    pub fn with_stride(trace_stride: u64) -> Self {
        Self { trace_stride, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub trace: Vec<TraceRecord<T>>,
    /// Retained ADAM³ states (empty for baselines).
    pub states: Vec<OptimizerState<T>>,
    /// Final query point (z_N for ADAM³, x_N otherwise).
    pub final_point: Point<T>,
    /// Σ_k ‖ṽ_k − ṽ_{k−1}‖₁ over the whole run (ADAM³ only).
    pub vdiff_l1_sum: Option<T>,
    /// Max observed ‖ĝ‖∞.
    pub g_inf_seen: T,
}

/// A run that stopped early. `trace` holds every record made before the
/// failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure<T> {
    pub error: Error,
    pub trace: Vec<TraceRecord<T>>,
}

impl<T> From<Error> for RunFailure<T> {
    fn from(error: Error) -> Self {
        Self { error, trace: Vec::new() }
    }
}

impl<T> fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} trace records kept)", self.error, self.trace.len())
    }
}

impl<T: fmt::Debug> std::error::Error for RunFailure<T> {}

#[derive(Default, Clone, Copy)]
struct Flags {
    lemma1: Option<bool>,
    lemma2: Option<bool>,
    monotone: Option<bool>,
}

/// Runs `hp.n_iters` iterations of `method` on `game`.
///
/// Iteration `k` samples its minibatch from [`iteration_stream`]`(seed, k)`,
/// so all methods see the same noise for a given seed. Every
/// `trace_stride`-th iteration is recorded. The lemma flags in ADAM³
/// records are cumulative: `Some(true)` means no violation at any
/// iteration up to and including that record, with G∞ taken as the running
/// max of observed ‖ĝ‖∞.
pub fn run_optimizer<T: Scalar>(
    game: &dyn Game<T>,
    hp: &HyperParams<T>,
    method: Method,
    seed: u64,
    opts: &RunOptions<T>,
) -> std::result::Result<RunOutput<T>, RunFailure<T>> {
    hp.validate()?;
    if opts.trace_stride == 0 {
        return Err(Error::InvalidConfig("trace_stride must be positive".into()).into());
    }
    let (dim, split) = (game.dim(), game.split());
    let x0 = match &opts.x0 {
        Some(p) if p.dim() != dim => {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() }.into())
        }
        Some(p) => p.clone(),
        None => Point::zeros(dim, split)?,
    };
    warn_about_regime(hp, method);

    match method {
        Method::Adam3 => {
            let init = OptimizerState::init_at(x0, hp)?;
            let l2 = lemma2_bound(hp, dim);
            let (mut l1_ok, mut l2_ok, mut mono_ok) = (true, true, true);
            let mut vdiff = T::zero();
            let mut retained: VecDeque<OptimizerState<T>> = VecDeque::new();
            let mut out = drive(game, hp, seed, opts, init, |prev, cur, recorded| {
                let (m_ok, v_ok) = lemma1_holds(cur, hp, cur.g_inf_seen);
                l1_ok &= m_ok && v_ok;
                if let Some(bound) = l2 {
                    l2_ok &= lemma2_statistic(prev, cur) <= bound * (T::one() + T::epsilon() * T::lit(16.0));
                }
                mono_ok &= monotone_holds(prev, cur, hp);
                vdiff += cur
                    .v_tilde
                    .iter()
                    .zip(&prev.v_tilde)
                    .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
                if recorded {
                    match opts.retention {
                        StateRetention::None => {}
                        StateRetention::Window(n) => {
                            if n > 0 {
                                if retained.len() == n {
                                    retained.pop_front();
                                }
                                retained.push_back(cur.clone());
                            }
                        }
                        StateRetention::Full => retained.push_back(cur.clone()),
                    }
                }
                Flags { lemma1: Some(l1_ok), lemma2: l2.map(|_| l2_ok), monotone: Some(mono_ok) }
            })?;
            out.states = retained.into();
            out.vdiff_l1_sum = Some(vdiff);
            Ok(out)
        }
        Method::SAdam => {
            let init = SAdamState::init_at(x0, hp)?;
            drive(game, hp, seed, opts, init, |_, _, _| Flags::default())
        }
        Method::OAdagrad => {
            let init = OAdagradState::init_at(x0, hp)?;
            drive(game, hp, seed, opts, init, |_, _, _| Flags::default())
        }
    }
}

fn warn_about_regime<T: Scalar>(hp: &HyperParams<T>, method: Method) {
    match method {
        Method::Adam3 => {
            if hp.kappa >= T::one() && hp.beta1_1 > T::zero() {
                log::warn!("kappa = 1 with beta1_1 > 0: the convergence bounds assume a decaying schedule (kappa < 1)");
            }
        }
        Method::SAdam => {
            if hp.beta3 != T::zero() || hp.kappa != T::one() || hp.v0_init != T::zero() {
                log::warn!("sadam ignores beta3, kappa and v0_init");
            }
        }
        Method::OAdagrad => {
            log::warn!("oadagrad ignores beta1_1, beta2, beta3, kappa and v0_init");
        }
    }
}

fn drive<T, S, H>(
    game: &dyn Game<T>,
    hp: &HyperParams<T>,
    seed: u64,
    opts: &RunOptions<T>,
    init: S,
    mut hook: H,
) -> std::result::Result<RunOutput<T>, RunFailure<T>>
where
    T: Scalar,
    S: Stepper<T>,
    H: FnMut(&S, &S, bool) -> Flags,
{
    let fne = game.known_fne().filter(|p| p.norm() > T::zero());
    let mut trace = Vec::with_capacity((hp.n_iters / opts.trace_stride).min(1 << 20) as usize);
    let mut state = init;
    let mut norm_sum = T::zero();
    let mut have_field = true;
    let mut g_inf_seen = T::zero();

    for k in 1..=hp.n_iters {
        let mut rng = iteration_stream(seed, k);
        let next = state.step(hp, |z| {
            let g = game.sample_field(z, hp.batch_m, &mut rng);
            g_inf_seen = g_inf_seen.max(vecops::norm_inf(&g));
            g
        });
        let next = match next {
            Ok(s) => s,
            Err(error) => return Err(RunFailure { error, trace }),
        };
        if !next.is_finite() {
            return Err(RunFailure { error: Error::Divergence { iteration: k }, trace });
        }

        let z = next.query_point();
        let grad_norm_sq = if have_field {
            match game.exact_field(z) {
                Some(f) => Some(vecops::norm2_sq(&f)),
                None => {
                    have_field = false;
                    None
                }
            }
        } else {
            None
        };
        if let Some(n) = grad_norm_sq {
            norm_sum += n;
        }

        let recorded = k % opts.trace_stride == 0;
        let flags = hook(&state, &next, recorded);
        if recorded {
            let count = T::from_u64(k).expect("iteration count fits scalar");
            let e_k = match &fne {
                Some(star) => Some(diagnostics::relative_error(z, star).map_err(|error| RunFailure {
                    error,
                    trace: trace.clone(),
                })?),
                None => None,
            };
            trace.push(TraceRecord {
                k,
                z: z.clone(),
                e_k,
                grad_norm_sq,
                r_k: grad_norm_sq.map(|_| norm_sum / count),
                lemma1_ok: flags.lemma1,
                lemma2_ok: flags.lemma2,
                monotone_ok: flags.monotone,
            });
        }
        state = next;
    }

    Ok(RunOutput {
        trace,
        states: Vec::new(),
        final_point: state.query_point().clone(),
        vdiff_l1_sum: None,
        g_inf_seen,
    })
}
