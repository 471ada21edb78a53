//! Right-hand sides `d rho / dt` of the reaction models.
//!
//! With no spin Hamiltonian and no triplet reaction, the three models are
//!
//! * quantum measurement: `-k_S (rho - Q_T rho Q_T)`
//! * Haberkorn: `-(k_S / 2) {Q_S, rho}`
//! * renormalized quantum measurement: `-k_S (Tr[Q_T rho Q_T] rho - Q_T rho Q_T)`
//!
//! The last one is the trace-preserving nonlinear equation obeyed by the
//! radical-pair density matrix after dividing out its trace. It is written
//! without the division by `Tr[Q_T rho Q_T]`, which would be `0 / 0` at the
//! pure singlet.
//!
//! In the expanded `{P, S, T}` basis the singlet population lost from the
//! radical pair is added to the product level, so the derivative is
//! trace-free and the state stays proper.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densmat::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::spinsys::{embed_block, DensityMatrix, Projectors, SpinBasis};

/// Tolerance on the unit-trace precondition of [`normalized_rhs`].
pub const UNIT_TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "qm")]
    QuantumMeasurement,
    #[serde(rename = "hk")]
    Haberkorn,
    #[serde(rename = "nqm")]
    NormalizedQM,
}

impl ModelKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::QuantumMeasurement => "qm",
            ModelKind::Haberkorn => "hk",
            ModelKind::NormalizedQM => "nqm",
        }
    }

    pub fn supports(self, basis: SpinBasis) -> bool {
        !(self == ModelKind::NormalizedQM && basis == SpinBasis::Pst)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qm" | "quantum-measurement" => Ok(ModelKind::QuantumMeasurement),
            "hk" | "haberkorn" => Ok(ModelKind::Haberkorn),
            "nqm" | "normalized-qm" | "normalized" => Ok(ModelKind::NormalizedQM),
            other => Err(format!("unknown model '{other}' (expected qm, hk or nqm)")),
        }
    }
}

/// Reaction rates and the optional coherent term.
#[derive(Debug, Clone, PartialEq)]
pub struct RateParams {
    k_s: f64,
    k_t: f64,
    hamiltonian: Option<ComplexMatrix>,
}

impl RateParams {
    pub fn new(k_s: f64) -> Result<Self> {
        if !(k_s >= 0.0 && k_s.is_finite()) {
            return Err(Error::Domain {
                name: "k_s",
                value: k_s,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            k_s,
            k_t: 0.0,
            hamiltonian: None,
        })
    }

    /// Only `k_t = 0` is modelled.
    pub fn with_k_t(self, k_t: f64) -> Result<Self> {
        if k_t != 0.0 {
            return Err(Error::Domain {
                name: "k_t",
                value: k_t,
                reason: "triplet recombination is not modelled; k_t must be 0",
            });
        }
        Ok(self)
    }

    /// Experimental: adds `-i[H, rho]` to every generator. `H` acts on the
    /// `{S, T}` radical-pair space and is embedded as needed.
    pub fn with_hamiltonian(mut self, h: ComplexMatrix) -> Result<Self> {
        if h.dim() != SpinBasis::St.dim() {
            return Err(Error::Dimension {
                expected: SpinBasis::St.dim(),
                found: h.dim(),
            });
        }
        let deviation = h.hermitian_deviation();
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian {
                deviation,
                tol: HERMITIAN_TOL,
            });
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }

    pub fn k_s(&self) -> f64 {
        self.k_s
    }

    pub fn k_t(&self) -> f64 {
        self.k_t
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        self.hamiltonian.as_ref()
    }
}

/// A model right-hand side bound to a basis and parameters, applicable to
/// raw matrices (such as Runge-Kutta stages) without state validation.
#[derive(Debug, Clone)]
pub struct Generator {
    kind: ModelKind,
    k_s: f64,
    proj: Projectors,
    hamiltonian: Option<ComplexMatrix>,
}

impl Generator {
    pub fn new(kind: ModelKind, basis: SpinBasis, params: &RateParams) -> Result<Self> {
        if !kind.supports(basis) {
            return Err(Error::UnsupportedModel {
                model: kind.short_name(),
                reason: "the renormalized model evolves the {S, T} state only",
            });
        }
        let hamiltonian = params.hamiltonian().map(|h| match basis {
            SpinBasis::St => h.clone(),
            SpinBasis::Pst => embed_block(h),
        });
        Ok(Self {
            kind,
            k_s: params.k_s(),
            proj: Projectors::new(basis),
            hamiltonian,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn basis(&self) -> SpinBasis {
        self.proj.basis
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let reaction = match (self.kind, self.proj.basis) {
            (ModelKind::QuantumMeasurement, SpinBasis::St) => qm_term(rho, self.k_s, &self.proj),
            (ModelKind::Haberkorn, SpinBasis::St) => haberkorn_term(rho, self.k_s, &self.proj),
            (ModelKind::NormalizedQM, _) => normalized_term(rho, self.k_s, &self.proj),
            (kind, SpinBasis::Pst) => expanded_term(kind, rho, self.k_s, &self.proj),
        };
        match &self.hamiltonian {
            Some(h) => &reaction + &coherent_term(h, rho),
            None => reaction,
        }
    }
}

fn sandwich(q: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    &(q * rho) * q
}

fn coherent_term(h: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    h.commutator(rho)
        .expect("Hamiltonian dimension checked at construction")
        .scale(Complex64::new(0.0, -1.0))
}

fn qm_term(rho: &ComplexMatrix, k_s: f64, proj: &Projectors) -> ComplexMatrix {
    -k_s * &(rho - &sandwich(&proj.qt, rho))
}

fn haberkorn_term(rho: &ComplexMatrix, k_s: f64, proj: &Projectors) -> ComplexMatrix {
    let anti = proj.qs.anticommutator(rho).expect("dimensions checked");
    (-0.5 * k_s) * &anti
}

fn normalized_term(rho: &ComplexMatrix, k_s: f64, proj: &Projectors) -> ComplexMatrix {
    let projected = sandwich(&proj.qt, rho);
    let p_t = projected.trace().re;
    -k_s * &(&(p_t * rho) - &projected)
}

fn expanded_term(
    kind: ModelKind,
    rho: &ComplexMatrix,
    k_s: f64,
    proj: &Projectors,
) -> ComplexMatrix {
    let pair = &proj.qs + &proj.qt;
    let rp = sandwich(&pair, rho);
    let block = match kind {
        ModelKind::QuantumMeasurement => qm_term(&rp, k_s, proj),
        ModelKind::Haberkorn => haberkorn_term(&rp, k_s, proj),
        ModelKind::NormalizedQM => unreachable!("rejected by Generator::new"),
    };
    let p = proj
        .basis
        .product()
        .expect("expanded basis has a product level");
    let inflow = k_s * (&proj.qs * rho).trace().re;
    block.with_entry(p, p, block.get(p, p) + inflow)
}

fn check_st(rho: &DensityMatrix, proj: &Projectors) -> Result<()> {
    rho.expect_basis(SpinBasis::St)?;
    proj.basis.expect(SpinBasis::St)
}

fn with_hamiltonian(
    reaction: ComplexMatrix,
    params: &RateParams,
    basis: SpinBasis,
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    match params.hamiltonian() {
        None => reaction,
        Some(h) => {
            let h = match basis {
                SpinBasis::St => h.clone(),
                SpinBasis::Pst => embed_block(h),
            };
            &reaction + &coherent_term(&h, rho)
        }
    }
}

/// Quantum-measurement model on the trace-deficient radical-pair state.
pub fn qm_rhs(
    rho_rp: &DensityMatrix,
    params: &RateParams,
    proj: &Projectors,
) -> Result<ComplexMatrix> {
    check_st(rho_rp, proj)?;
    let reaction = qm_term(rho_rp.mat(), params.k_s(), proj);
    Ok(with_hamiltonian(
        reaction,
        params,
        SpinBasis::St,
        rho_rp.mat(),
    ))
}

/// Renormalized quantum-measurement model; `rho` must have unit trace.
pub fn normalized_rhs(
    rho: &DensityMatrix,
    params: &RateParams,
    proj: &Projectors,
) -> Result<ComplexMatrix> {
    check_st(rho, proj)?;
    let trace = rho.trace();
    if !((trace - 1.0).abs() <= UNIT_TRACE_TOL) {
        return Err(Error::ImproperState { trace });
    }
    let reaction = normalized_term(rho.mat(), params.k_s(), proj);
    Ok(with_hamiltonian(reaction, params, SpinBasis::St, rho.mat()))
}

/// Haberkorn model: singlet population decays at `k_S`, the S-T coherence
/// at `k_S / 2`.
pub fn haberkorn_rhs(
    rho_rp: &DensityMatrix,
    params: &RateParams,
    proj: &Projectors,
) -> Result<ComplexMatrix> {
    check_st(rho_rp, proj)?;
    let reaction = haberkorn_term(rho_rp.mat(), params.k_s(), proj);
    Ok(with_hamiltonian(
        reaction,
        params,
        SpinBasis::St,
        rho_rp.mat(),
    ))
}

/// Trace-preserving generator in the `{P, S, T}` basis.
pub fn expanded_rhs(
    kind: ModelKind,
    rho: &DensityMatrix,
    params: &RateParams,
    proj: &Projectors,
) -> Result<ComplexMatrix> {
    rho.expect_basis(SpinBasis::Pst)?;
    proj.basis.expect(SpinBasis::Pst)?;
    if kind == ModelKind::NormalizedQM {
        return Err(Error::UnsupportedModel {
            model: kind.short_name(),
            reason: "the renormalized model evolves the {S, T} state only",
        });
    }
    let reaction = expanded_term(kind, rho.mat(), params.k_s(), proj);
    Ok(with_hamiltonian(
        reaction,
        params,
        SpinBasis::Pst,
        rho.mat(),
    ))
}
