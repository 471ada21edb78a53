use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use radpair_core::analytic::{decomposition_weights, kominis_claimed_state, unrecombined_state};
use radpair_core::integrate::propagate;
use radpair_core::verify::{run_checks, VerifyReport};
use radpair_core::{ModelKind, Record, SpinBasis, Trajectory};

use crate::config::{resolve, RunArgs, RunConfig};
use crate::error::CliError;
use crate::table::Table;

pub const PST_COLUMNS: [&str; 11] = [
    "pp_re",
    "ss_re",
    "st_re",
    "st_im",
    "tt_re",
    "trace",
    "p_p",
    "p_s",
    "p_t",
    "coherence_abs",
    "purity",
];

pub const ST_COLUMNS: [&str; 9] = [
    "ss_re",
    "st_re",
    "st_im",
    "tt_re",
    "trace",
    "p_s",
    "p_t",
    "coherence_abs",
    "purity",
];

pub const COMPARE_COLUMNS: [&str; 7] = [
    "d_trace",
    "d_p_p",
    "d_p_s",
    "d_p_t",
    "d_coherence_abs",
    "d_purity",
    "coherence_ratio",
];

pub const DECOMPOSE_COLUMNS: [&str; 5] = ["w_0", "w_t", "w_p", "w_sum", "claimed_distance"];

fn time_column(cfg: &RunConfig) -> &'static str {
    if cfg.dimensionless {
        "ks_t"
    } else {
        "t"
    }
}

fn time_value(cfg: &RunConfig, t: f64) -> f64 {
    if cfg.dimensionless {
        cfg.k_s() * t
    } else {
        t
    }
}

fn with_time<'a>(cfg: &RunConfig, rest: &[&'a str]) -> Vec<&'a str> {
    let mut cols = vec![time_column(cfg)];
    cols.extend_from_slice(rest);
    cols
}

fn state_row(basis: SpinBasis, r: &Record) -> Vec<f64> {
    let m = r.state.mat();
    let (s, t) = (basis.singlet(), basis.triplet());
    let o = &r.obs;
    let mut row = Vec::with_capacity(PST_COLUMNS.len());
    if let Some(p) = basis.product() {
        row.push(m.get(p, p).re);
    }
    row.extend([
        m.get(s, s).re,
        m.get(s, t).re,
        m.get(s, t).im,
        m.get(t, t).re,
        o.trace,
    ]);
    if basis.product().is_some() {
        row.push(o.p_p);
    }
    row.extend([o.p_s, o.p_t, o.coherence_abs, o.purity]);
    row
}

pub fn trajectory_table(cfg: &RunConfig, traj: &Trajectory) -> Table {
    let columns: &[&str] = match traj.basis {
        SpinBasis::Pst => &PST_COLUMNS,
        SpinBasis::St => &ST_COLUMNS,
    };
    let mut table = Table::new(with_time(cfg, columns));
    for r in &traj.records {
        let mut row = vec![time_value(cfg, r.t)];
        row.extend(state_row(traj.basis, r));
        table.push(row);
    }
    table
}

fn run_model(cfg: &RunConfig, model: ModelKind) -> Result<Trajectory, CliError> {
    Ok(propagate(
        model,
        &cfg.state,
        &cfg.params,
        cfg.basis,
        &cfg.integrator,
    )?)
}

pub fn simulate_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let traj = run_model(cfg, cfg.model)?;
    Ok(trajectory_table(cfg, &traj))
}

pub fn cmd_simulate(args: &RunArgs, model: Option<&str>) -> Result<(), CliError> {
    let cfg = resolve(args, model)?;
    let table = simulate_table(&cfg)?;
    table.write_to(cfg.format, cfg.output.as_deref())
}

/// Per-time differences `A - B` of the observables, plus `|rho_ST|_A / |rho_ST|_B`.
pub fn compare_table(cfg: &RunConfig, a: ModelKind, b: ModelKind) -> Result<Table, CliError> {
    for m in [a, b] {
        if !m.supports(cfg.basis) {
            return Err(CliError::Config(format!(
                "model/basis: model {m} cannot run in the {} basis",
                cfg.basis
            )));
        }
    }
    let ta = run_model(cfg, a)?;
    let tb = run_model(cfg, b)?;
    let mut table = Table::new(with_time(cfg, &COMPARE_COLUMNS));
    for (ra, rb) in ta.records.iter().zip(&tb.records) {
        let (oa, ob) = (&ra.obs, &rb.obs);
        table.push(vec![
            time_value(cfg, ra.t),
            oa.trace - ob.trace,
            oa.p_p - ob.p_p,
            oa.p_s - ob.p_s,
            oa.p_t - ob.p_t,
            oa.coherence_abs - ob.coherence_abs,
            oa.purity - ob.purity,
            oa.coherence_abs / ob.coherence_abs,
        ]);
    }
    Ok(table)
}

pub fn cmd_compare(args: &RunArgs, a: &str, b: &str) -> Result<(), CliError> {
    let parse = |name: &str, s: &str| {
        s.parse::<ModelKind>()
            .map_err(|e| CliError::Config(format!("{name}: {e}")))
    };
    let (a, b) = (parse("model-a", a)?, parse("model-b", b)?);
    let cfg = resolve(args, Some(a.short_name()))?;
    let table = compare_table(&cfg, a, b)?;
    table.write_to(cfg.format, cfg.output.as_deref())
}

/// Decomposition weights on the integration grid, plus the Frobenius
/// distance between the two-weight claimed state and the correctly
/// normalized unrecombined state (`NaN` once no pairs remain).
pub fn decompose_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let k = cfg.k_s();
    let n = cfg.integrator.n_steps();
    let h = cfg.integrator.effective_step();
    let stride = cfg.integrator.record_stride;
    let mut table = Table::new(with_time(cfg, &DECOMPOSE_COLUMNS));
    for i in (0..=n).filter(|i| i % stride == 0 || *i == n) {
        let t = if i == n {
            cfg.integrator.t_end
        } else {
            i as f64 * h
        };
        let w = decomposition_weights(&cfg.state, k, t)?;
        let claimed = kominis_claimed_state(&cfg.state, k, t)?;
        let distance = match unrecombined_state(&cfg.state, k, t) {
            Ok(u) => claimed.mat().frobenius_distance(u.mat())?,
            Err(radpair_core::Error::VanishingTrace { .. }) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            time_value(cfg, t),
            w.w_0,
            w.w_t,
            w.w_p,
            w.sum(),
            distance,
        ]);
    }
    Ok(table)
}

pub fn cmd_decompose(args: &RunArgs) -> Result<(), CliError> {
    let cfg = resolve(args, None)?;
    let table = decompose_table(&cfg)?;
    table.write_to(cfg.format, cfg.output.as_deref())
}

pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("'{value}' is not a number"))?;
    Ok((name.trim().to_string(), value))
}

pub fn cmd_verify(
    tolerances: &[(String, f64)],
    report: Option<&Path>,
) -> Result<VerifyReport, CliError> {
    let overrides: BTreeMap<String, f64> = tolerances.iter().cloned().collect();
    let result = run_checks(&overrides).map_err(|e| CliError::Config(format!("tolerance: {e}")))?;
    print!("{}", result.to_text());
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&result)
            .map_err(|e| CliError::Config(format!("encoding report: {e}")))?;
        fs::write(path, json + "\n")
            .map_err(CliError::io(format!("writing {}", path.display())))?;
    }
    if result.passed {
        Ok(result)
    } else {
        let failed: Vec<_> = result.failures().map(|c| c.name.clone()).collect();
        Err(CliError::VerifyFailed(failed.join(", ")))
    }
}
