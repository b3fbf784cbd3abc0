use std::fmt::Write as _;

use adam3_core::theory::{compute_beta1_cap, compute_eta_max, compute_uc, corollary1_sizing};
use adam3_core::{AssumptionConstants64, HyperParams64};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInputs {
    pub g0: f64,
    pub l: f64,
    pub g_inf: f64,
    pub sigma2: f64,
    pub kappa: f64,
    pub eps: f64,
    pub c1: f64,
    pub c2: f64,
    pub beta1_1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl Default for TheoryInputs {
    fn default() -> Self {
        Self {
            g0: 1.0,
            l: 1.0,
            g_inf: 1.0,
            sigma2: 1.0,
            kappa: 0.5,
            eps: 0.1,
            c1: 1.0,
            c2: 1.0,
            beta1_1: 0.0,
            beta2: 0.9,
            beta3: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub u_c: f64,
    pub eta_max: f64,
    pub c_const: f64,
    pub beta1_1_max: f64,
    pub n_min: u64,
    pub m_min: u64,
    pub beta1_1_within_cap: bool,
    pub warnings: Vec<String>,
}

pub fn theory_report(inp: &TheoryInputs) -> Result<TheoryReport, CliError> {
    let hp = HyperParams64 {
        beta1_1: inp.beta1_1,
        beta2: inp.beta2,
        beta3: inp.beta3,
        kappa: inp.kappa.min(1.0),
        ..HyperParams64::default()
    };
    hp.validate()?;
    let ac = AssumptionConstants64 { g_inf: inp.g_inf, g0: inp.g0, l: inp.l, sigma2: inp.sigma2, d_bound: None };
    let u_c = compute_uc(&hp)?;
    let eta_max = compute_eta_max(&ac)?;
    let (c_const, beta1_1_max) = compute_beta1_cap(&ac, inp.kappa)?;
    let (n_min, m_min) = corollary1_sizing(inp.c1, inp.c2, inp.sigma2, inp.eps)?;

    let mut warnings = Vec::new();
    if inp.kappa >= 0.99 {
        warnings.push(format!(
            "kappa = {} is close to 1: the momentum cap approaches 1 and the schedule barely decays",
            inp.kappa
        ));
    }
    if inp.beta1_1 > beta1_1_max {
        warnings.push(format!("beta1_1 = {} exceeds the admissible cap {beta1_1_max}", inp.beta1_1));
    }
    Ok(TheoryReport {
        u_c,
        eta_max,
        c_const,
        beta1_1_max,
        n_min,
        m_min,
        beta1_1_within_cap: inp.beta1_1 <= beta1_1_max,
        warnings,
    })
}

impl TheoryReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "u_c          {:.6e}", self.u_c);
        let _ = writeln!(s, "eta_max      {:.6}", self.eta_max);
        let _ = writeln!(s, "C            {:.6e}", self.c_const);
        let _ = writeln!(s, "beta1_1 cap  {:.6}", self.beta1_1_max);
        let _ = writeln!(s, "N_min        {}", self.n_min);
        let _ = writeln!(s, "m_min        {}", self.m_min);
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}
