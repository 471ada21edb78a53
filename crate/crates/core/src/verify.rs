//! Named numerical checks tying the integrator, the closed forms and the
//! decomposition bookkeeping together. Used by the `verify` command.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    decomposition_weights, default_residual_step, eq2_residual, hk_expanded_solution,
    kominis_claimed_state, kominis_decomposition, qm_expanded_solution, reconstruct_from_weights,
    unrecombined_state,
};
use crate::error::{Error, Result};
use crate::integrate::{propagate, IntegratorConfig, Trajectory};
use crate::models::{ModelKind, RateParams};
use crate::spinsys::{renormalize, restrict_pst_to_rp, InitialState, Projectors, SpinBasis};

const SEED: u64 = 0x5eed_2011;
const RANDOM_SAMPLES: usize = 1000;
const RESIDUAL_TIMES: [f64; 4] = [0.2, 0.7, 1.5, 3.0];
const ORDER_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass iff `measured <= threshold`.
    AtMost,
    /// Pass iff `measured >= threshold`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            out.push_str(&format!(
                "[{}] {:<28} {:>12.4e} {op} {:<10.3e} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold,
                c.description
            ));
        }
        out.push_str(if self.passed {
            "overall: PASS\n"
        } else {
            "overall: FAIL\n"
        });
        out
    }
}

struct CheckDef {
    name: &'static str,
    description: &'static str,
    threshold: f64,
    bound: Bound,
    measure: fn() -> Result<f64>,
}

const CHECKS: &[CheckDef] = &[
    CheckDef {
        name: "qm_pst_vs_closed_form",
        description: "QM expanded propagation vs closed form, t in [0, 5]",
        threshold: 1e-9,
        bound: Bound::AtMost,
        measure: qm_pst_deviation,
    },
    CheckDef {
        name: "hk_pst_vs_closed_form",
        description: "Haberkorn expanded propagation vs closed form, t in [0, 5]",
        threshold: 1e-9,
        bound: Bound::AtMost,
        measure: hk_pst_deviation,
    },
    CheckDef {
        name: "coherence_ratio",
        description: "|rho_ST| QM/HK minus e^{-k t/2}",
        threshold: 1e-8,
        bound: Bound::AtMost,
        measure: coherence_ratio_deviation,
    },
    CheckDef {
        name: "normalized_vs_renormalized",
        description: "renormalized-model propagation vs renormalized restricted closed form",
        threshold: 1e-8,
        bound: Bound::AtMost,
        measure: normalized_deviation,
    },
    CheckDef {
        name: "normalized_trace_drift",
        description: "max |trace - 1| under the renormalized model",
        threshold: 1e-9,
        bound: Bound::AtMost,
        measure: normalized_trace_drift,
    },
    CheckDef {
        name: "eq2_corrected",
        description: "max residual of the three-weight unrecombined state",
        threshold: 1e-6,
        bound: Bound::AtMost,
        measure: corrected_residual,
    },
    CheckDef {
        name: "eq2_claimed",
        description: "min residual of the two-weight claimed state",
        threshold: 1e-3,
        bound: Bound::AtLeast,
        measure: claimed_residual,
    },
    CheckDef {
        name: "weight_sum",
        description: "max |w_0 + w_T + w_P - 1| over random samples",
        threshold: 1e-12,
        bound: Bound::AtMost,
        measure: weight_sum_deviation,
    },
    CheckDef {
        name: "weight_reconstruction",
        description: "weights reconstruct the QM expanded state",
        threshold: 1e-12,
        bound: Bound::AtMost,
        measure: reconstruction_deviation,
    },
    CheckDef {
        name: "split_exactness",
        description: "unrecombined + product split sums to the QM expanded state",
        threshold: 1e-15,
        bound: Bound::AtMost,
        measure: split_deviation,
    },
    CheckDef {
        name: "pst_trace_drift",
        description: "max |trace - 1| in the expanded basis over t in [0, 10]",
        threshold: 1e-10,
        bound: Bound::AtMost,
        measure: pst_trace_drift,
    },
    CheckDef {
        name: "st_trace_decay",
        description: "ST trace vs |alpha|^2 e^{-k t} + |beta|^2",
        threshold: 1e-8,
        bound: Bound::AtMost,
        measure: st_trace_deviation,
    },
    CheckDef {
        name: "min_eigenvalue",
        description: "smallest eigenvalue of any normalized state",
        threshold: -1e-10,
        bound: Bound::AtLeast,
        measure: min_normalized_eigenvalue,
    },
    CheckDef {
        name: "hk_purity",
        description: "max |purity - 1| of Haberkorn normalized pair states",
        threshold: 1e-10,
        bound: Bound::AtMost,
        measure: hk_purity_deviation,
    },
    CheckDef {
        name: "qm_purity",
        description: "max purity of QM unrecombined states, k t in [0.1, 5]",
        threshold: 1.0 - 1e-6,
        bound: Bound::AtMost,
        measure: qm_max_purity,
    },
    CheckDef {
        name: "rk4_order_min",
        description: "smallest error ratio per step halving",
        threshold: 8.0,
        bound: Bound::AtLeast,
        measure: min_order_ratio,
    },
    CheckDef {
        name: "rk4_order_max",
        description: "largest error ratio per step halving",
        threshold: 24.0,
        bound: Bound::AtMost,
        measure: max_order_ratio,
    },
];

/// Names of all checks, in report order.
pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

/// Runs every check. `overrides` replaces thresholds by check name.
pub fn run_checks(overrides: &BTreeMap<String, f64>) -> Result<VerifyReport> {
    if let Some(unknown) = overrides
        .keys()
        .find(|k| !CHECKS.iter().any(|c| c.name == *k))
    {
        return Err(Error::UnknownCheck(unknown.clone()));
    }
    let checks = std::thread::scope(|scope| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|def| scope.spawn(move || (def.measure)()))
            .collect();
        CHECKS
            .iter()
            .zip(handles)
            .map(|(def, handle)| {
                let measured = handle.join().expect("check panicked")?;
                let threshold = overrides.get(def.name).copied().unwrap_or(def.threshold);
                let passed = match def.bound {
                    Bound::AtMost => measured <= threshold,
                    Bound::AtLeast => measured >= threshold,
                };
                Ok(Check {
                    name: def.name.to_string(),
                    description: def.description.to_string(),
                    measured,
                    threshold,
                    bound: def.bound,
                    passed,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { checks, passed })
}

fn standard_state() -> InitialState {
    InitialState::equal_superposition()
}

fn standard_params() -> RateParams {
    RateParams::new(1.0).expect("positive rate")
}

fn run(kind: ModelKind, basis: SpinBasis, step: f64, t_end: f64) -> Result<Trajectory> {
    propagate(
        kind,
        &standard_state(),
        &standard_params(),
        basis,
        &IntegratorConfig::new(step, t_end),
    )
}

fn max_deviation(
    traj: &Trajectory,
    oracle: impl Fn(f64) -> Result<crate::DensityMatrix>,
) -> Result<f64> {
    traj.records.iter().try_fold(0.0_f64, |acc, r| {
        let exact = oracle(r.t)?;
        Ok(acc.max(r.state.mat().max_abs_diff(exact.mat())?))
    })
}

fn qm_pst_deviation() -> Result<f64> {
    let traj = run(ModelKind::QuantumMeasurement, SpinBasis::Pst, 1e-3, 5.0)?;
    max_deviation(&traj, |t| qm_expanded_solution(&standard_state(), 1.0, t))
}

fn hk_pst_deviation() -> Result<f64> {
    let traj = run(ModelKind::Haberkorn, SpinBasis::Pst, 1e-3, 5.0)?;
    max_deviation(&traj, |t| hk_expanded_solution(&standard_state(), 1.0, t))
}

fn coherence_ratio_deviation() -> Result<f64> {
    let qm = run(ModelKind::QuantumMeasurement, SpinBasis::Pst, 1e-3, 5.0)?;
    let hk = run(ModelKind::Haberkorn, SpinBasis::Pst, 1e-3, 5.0)?;
    Ok(qm
        .records
        .iter()
        .zip(&hk.records)
        .map(|(a, b)| (a.obs.coherence_abs / b.obs.coherence_abs - (-0.5 * a.t).exp()).abs())
        .fold(0.0, f64::max))
}

fn normalized_deviation() -> Result<f64> {
    let traj = run(ModelKind::NormalizedQM, SpinBasis::St, 1e-3, 5.0)?;
    max_deviation(&traj, |t| {
        renormalize(&restrict_pst_to_rp(&qm_expanded_solution(
            &standard_state(),
            1.0,
            t,
        )?)?)
    })
}

fn normalized_trace_drift() -> Result<f64> {
    let traj = run(ModelKind::NormalizedQM, SpinBasis::St, 1e-3, 5.0)?;
    Ok(traj
        .records
        .iter()
        .map(|r| (r.obs.trace - 1.0).abs())
        .fold(0.0, f64::max))
}

fn residuals(
    state: fn(&InitialState, f64, f64) -> Result<crate::DensityMatrix>,
) -> Result<Vec<f64>> {
    let proj = Projectors::new(SpinBasis::St);
    let s = standard_state();
    let h = default_residual_step(1.0);
    RESIDUAL_TIMES
        .iter()
        .map(|&t| eq2_residual(|t| state(&s, 1.0, t), 1.0, &proj, t, h))
        .collect()
}

fn corrected_residual() -> Result<f64> {
    Ok(residuals(unrecombined_state)?
        .into_iter()
        .fold(0.0, f64::max))
}

fn claimed_residual() -> Result<f64> {
    Ok(residuals(kominis_claimed_state)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Random `(state, k_S, t)` with `k_S` in `[0.1, 10]` and `t` in `[0, 5 / k_S]`.
pub fn random_samples(n: usize, seed: u64) -> Vec<(InitialState, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..0.5 * PI);
            let alpha = Complex64::from_polar(theta.cos(), rng.gen_range(0.0..2.0 * PI));
            let beta = Complex64::from_polar(theta.sin(), rng.gen_range(0.0..2.0 * PI));
            let s = InitialState::new(alpha, beta).expect("unit amplitudes");
            let k = rng.gen_range(0.1..10.0);
            let t = rng.gen_range(0.0..5.0 / k);
            (s, k, t)
        })
        .collect()
}

fn weight_sum_deviation() -> Result<f64> {
    random_samples(RANDOM_SAMPLES, SEED)
        .iter()
        .try_fold(0.0_f64, |acc, (s, k, t)| {
            Ok(acc.max((decomposition_weights(s, *k, *t)?.sum() - 1.0).abs()))
        })
}

fn reconstruction_deviation() -> Result<f64> {
    random_samples(RANDOM_SAMPLES, SEED)
        .iter()
        .try_fold(0.0_f64, |acc, (s, k, t)| {
            let w = decomposition_weights(s, *k, *t)?;
            let rebuilt = reconstruct_from_weights(s, &w)?;
            let exact = qm_expanded_solution(s, *k, *t)?;
            Ok(acc.max(rebuilt.mat().max_abs_diff(exact.mat())?))
        })
}

fn split_deviation() -> Result<f64> {
    random_samples(RANDOM_SAMPLES, SEED)
        .iter()
        .try_fold(0.0_f64, |acc, (s, k, t)| {
            let split = kominis_decomposition(s, *k, *t)?;
            let exact = qm_expanded_solution(s, *k, *t)?;
            Ok(acc.max(split.total().max_abs_diff(exact.mat())?))
        })
}

fn pst_trace_drift() -> Result<f64> {
    let mut worst = 0.0_f64;
    for kind in [ModelKind::QuantumMeasurement, ModelKind::Haberkorn] {
        let traj = run(kind, SpinBasis::Pst, 1e-3, 10.0)?;
        for r in &traj.records {
            worst = worst.max((r.obs.trace - 1.0).abs());
        }
    }
    Ok(worst)
}

fn st_trace_deviation() -> Result<f64> {
    let traj = run(ModelKind::QuantumMeasurement, SpinBasis::St, 1e-3, 5.0)?;
    let s = standard_state();
    Ok(traj
        .records
        .iter()
        .map(|r| {
            let expected = s.singlet_weight() * (-r.t).exp() + s.triplet_weight();
            (r.obs.trace - expected).abs()
        })
        .fold(0.0, f64::max))
}

fn normalized_states() -> Result<Vec<crate::DensityMatrix>> {
    let mut states = Vec::new();
    for (s, k, t) in random_samples(200, SEED ^ 1) {
        states.push(unrecombined_state(&s, k, t)?);
        states.push(kominis_claimed_state(&s, k, t)?);
        states.push(renormalize(&restrict_pst_to_rp(&hk_expanded_solution(
            &s, k, t,
        )?)?)?);
    }
    states.extend(
        run(ModelKind::NormalizedQM, SpinBasis::St, 1e-3, 5.0)?
            .records
            .into_iter()
            .map(|r| r.state),
    );
    Ok(states)
}

fn min_normalized_eigenvalue() -> Result<f64> {
    Ok(normalized_states()?
        .iter()
        .flat_map(|rho| rho.eigenvalues())
        .fold(f64::INFINITY, f64::min))
}

fn purity_samples() -> Vec<(InitialState, f64, f64)> {
    // k t spans [0.1, 5] with alpha beta != 0.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    (0..RANDOM_SAMPLES)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.05..0.5 * PI - 0.05);
            let alpha = Complex64::from_polar(theta.cos(), rng.gen_range(0.0..2.0 * PI));
            let beta = Complex64::from_polar(theta.sin(), rng.gen_range(0.0..2.0 * PI));
            let s = InitialState::new(alpha, beta).expect("unit amplitudes");
            let k = rng.gen_range(0.1..10.0);
            let kt = rng.gen_range(0.1..5.0);
            (s, k, kt / k)
        })
        .chain([(standard_state(), 1.0, 0.1), (standard_state(), 1.0, 5.0)])
        .collect()
}

fn hk_purity_deviation() -> Result<f64> {
    let mut worst = 0.0_f64;
    for (s, k, t) in purity_samples() {
        let rho = renormalize(&restrict_pst_to_rp(&hk_expanded_solution(&s, k, t)?)?)?;
        worst = worst.max((rho.purity() - 1.0).abs());
    }
    let traj = run(ModelKind::Haberkorn, SpinBasis::St, 1e-3, 5.0)?;
    for r in &traj.records {
        worst = worst.max((renormalize(&r.state)?.purity() - 1.0).abs());
    }
    Ok(worst)
}

fn qm_max_purity() -> Result<f64> {
    purity_samples()
        .into_iter()
        .try_fold(f64::NEG_INFINITY, |acc, (s, k, t)| {
            Ok(acc.max(unrecombined_state(&s, k, t)?.purity()))
        })
}

/// Max deviation of QM expanded propagation from the closed form over
/// `t` in `[0, 5]`, for each step size.
pub fn order_errors(steps: &[f64]) -> Result<Vec<f64>> {
    steps
        .iter()
        .map(|&h| {
            let traj = run(ModelKind::QuantumMeasurement, SpinBasis::Pst, h, 5.0)?;
            max_deviation(&traj, |t| qm_expanded_solution(&standard_state(), 1.0, t))
        })
        .collect()
}

fn order_ratios() -> Result<Vec<f64>> {
    let errors = order_errors(&ORDER_STEPS)?;
    Ok(errors.windows(2).map(|w| w[0] / w[1]).collect())
}

fn min_order_ratio() -> Result<f64> {
    Ok(order_ratios()?.into_iter().fold(f64::INFINITY, f64::min))
}

fn max_order_ratio() -> Result<f64> {
    Ok(order_ratios()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}
