//! Fixed-step classical Runge-Kutta propagation of the model generators.

use serde::{Deserialize, Serialize};

use crate::densmat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::models::{Generator, ModelKind, RateParams};
use crate::spinsys::{
    initial_density, observables, DensityMatrix, InitialState, Observables, SpinBasis,
};

/// Above this value of `step * k_S` a warning is logged.
pub const STEP_RATE_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Largest step. The actual step is `t_end / n` for the smallest `n`
    /// that keeps it at or below this value, so the grid ends on `t_end`.
    pub step: f64,
    pub t_end: f64,
    /// Record every Nth step (the final step is always recorded).
    pub record_stride: usize,
    /// Track the step-doubling local error estimate.
    pub error_check: bool,
}

impl IntegratorConfig {
    pub fn new(step: f64, t_end: f64) -> Self {
        Self {
            step,
            t_end,
            record_stride: 1,
            error_check: false,
        }
    }

    /// Step `1e-3 / k_S`, capped at `t_end`.
    pub fn for_rate(k_s: f64, t_end: f64) -> Self {
        let step = if k_s > 0.0 { 1e-3 / k_s } else { 1e-3 };
        Self::new(step.min(t_end), t_end)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_error_check(mut self, on: bool) -> Self {
        self.error_check = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain {
                name: "t_end",
                value: self.t_end,
                reason: "must be positive and finite",
            });
        }
        if !(self.step > 0.0 && self.step <= self.t_end) {
            return Err(Error::Domain {
                name: "step",
                value: self.step,
                reason: "must be positive and no larger than t_end",
            });
        }
        if self.record_stride == 0 {
            return Err(Error::Domain {
                name: "record_stride",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end / self.step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn effective_step(&self) -> f64 {
        self.t_end / self.n_steps() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: DensityMatrix,
    pub obs: Observables,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub model: ModelKind,
    pub params: RateParams,
    pub basis: SpinBasis,
    /// Largest step-doubling estimate seen, when error checking was on.
    pub max_step_error: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &Record {
        self.records
            .last()
            .expect("trajectories hold at least the initial record")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.t)
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<F>(rhs: F, rho: &ComplexMatrix, h: f64) -> Result<ComplexMatrix>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let k1 = rhs(rho)?;
    let k2 = rhs(&(rho + &k1.scale_real(0.5 * h)))?;
    let k3 = rhs(&(rho + &k2.scale_real(0.5 * h)))?;
    let k4 = rhs(&(rho + &k3.scale_real(h)))?;
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    Ok(rho + &incr.scale_real(h / 6.0))
}

/// Max entrywise difference between one step of `h` and two of `h / 2`.
pub fn step_doubling_error<F>(rhs: F, rho: &ComplexMatrix, h: f64) -> Result<f64>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let full = rk4_step(&rhs, rho, h)?;
    let half = rk4_step(&rhs, rho, 0.5 * h)?;
    let halves = rk4_step(&rhs, &half, 0.5 * h)?;
    full.max_abs_diff(&halves)
}

pub fn propagate(
    kind: ModelKind,
    s: &InitialState,
    params: &RateParams,
    basis: SpinBasis,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let generator = Generator::new(kind, basis, params)?;
    let rhs = |m: &ComplexMatrix| Ok(generator.apply(m));

    let n = cfg.n_steps();
    let h = cfg.effective_step();
    if h * params.k_s() > STEP_RATE_WARN {
        log::warn!(
            "step {h} with k_s {} gives k_s * step = {} > {STEP_RATE_WARN}",
            params.k_s(),
            h * params.k_s()
        );
    }

    let initial = initial_density(s, basis);
    let mut records = Vec::with_capacity(n / cfg.record_stride + 2);
    records.push(Record {
        t: 0.0,
        obs: observables(&initial),
        state: initial.clone(),
    });

    let mut rho = initial.into_mat();
    let mut max_step_error: Option<f64> = None;
    for i in 1..=n {
        let t = if i == n { cfg.t_end } else { i as f64 * h };
        if cfg.error_check {
            let e = step_doubling_error(rhs, &rho, h)?;
            max_step_error = Some(max_step_error.map_or(e, |m| m.max(e)));
        }
        let next = rk4_step(rhs, &rho, h)?.hermitize();
        let state = DensityMatrix::new(next, basis).map_err(|e| Error::InvariantViolation {
            t,
            source: Box::new(e),
        })?;
        if i % cfg.record_stride == 0 || i == n {
            records.push(Record {
                t,
                obs: observables(&state),
                state: state.clone(),
            });
        }
        rho = state.into_mat();
    }

    Ok(Trajectory {
        records,
        model: kind,
        params: params.clone(),
        basis,
        max_step_error,
    })
}
