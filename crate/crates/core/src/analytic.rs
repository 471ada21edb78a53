//! Closed-form solutions and decompositions for a pure initial state
//! `alpha|S> + beta|T>` with no spin Hamiltonian and no triplet reaction.
//!
//! Everything here takes `(state, k_S, t)` directly, so these functions can
//! serve as oracles for the numerical integrator.
//!
//! Under the quantum-measurement model the expanded state splits into three
//! constant proper states with time-varying weights:
//!
//! ```text
//! rho(t) = w_0 rho_0 + w_T |T><T| + w_P |P><P|
//! w_0 = e^{-k t},  w_T = (1 - e^{-k t}) |beta|^2,  w_P = (1 - e^{-k t}) |alpha|^2
//! ```
//!
//! The unrecombined pairs are the first two terms renormalized by
//! `w_0 + w_T`. Normalizing by `w_0 + (1 - w_0)` instead, i.e. pretending
//! `w_P = 0`, gives [`kominis_claimed_state`], which does not satisfy the
//! renormalized equation of motion; [`eq2_residual`] measures this.
//!
//! Decompositions of a mixed state are not unique, so no physical meaning
//! attaches to the individual terms of a split such as [`KominisSplit`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densmat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::models::{normalized_rhs, RateParams};
use crate::spinsys::{
    initial_density, level_state, DensityMatrix, InitialState, Projectors, SpinBasis,
    VANISHING_TRACE,
};

/// Tolerance on `w_0 + w_T + w_P = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

fn check_time_and_rate(k_s: f64, t: f64) -> Result<()> {
    if !(k_s >= 0.0 && k_s.is_finite()) {
        return Err(Error::Domain {
            name: "k_s",
            value: k_s,
            reason: "must be finite and non-negative",
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Expanded `{P, S, T}` state with a given S-T coherence decay factor.
fn expanded_state(s: &InitialState, survival: f64, coherence_decay: f64) -> DensityMatrix {
    let reacted = 1.0 - survival;
    let (aa, bb) = (s.singlet_weight(), s.triplet_weight());
    let st = s.coherence() * coherence_decay;
    let entries = vec![
        real(aa * reacted),
        zero(),
        zero(),
        zero(),
        real(aa * survival),
        st,
        zero(),
        st.conj(),
        real(bb),
    ];
    DensityMatrix::from_parts(
        ComplexMatrix::new(3, entries).expect("3x3 entries"),
        SpinBasis::Pst,
    )
}

/// Quantum-measurement model in the expanded basis: the singlet population
/// and the S-T coherence both decay as `e^{-k t}`.
pub fn qm_expanded_solution(s: &InitialState, k_s: f64, t: f64) -> Result<DensityMatrix> {
    check_time_and_rate(k_s, t)?;
    let survival = (-k_s * t).exp();
    Ok(expanded_state(s, survival, survival))
}

/// Haberkorn model in the expanded basis: as the quantum-measurement
/// solution but with the S-T coherence decaying as `e^{-k t / 2}`.
pub fn hk_expanded_solution(s: &InitialState, k_s: f64, t: f64) -> Result<DensityMatrix> {
    check_time_and_rate(k_s, t)?;
    let survival = (-k_s * t).exp();
    Ok(expanded_state(s, survival, (-0.5 * k_s * t).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionWeights {
    /// Unreacted weight.
    pub w_0: f64,
    /// Reacted without recombination, projected onto the triplet.
    pub w_t: f64,
    /// Recombined into product.
    pub w_p: f64,
}

impl DecompositionWeights {
    pub fn new(w_0: f64, w_t: f64, w_p: f64) -> Result<Self> {
        let w = Self { w_0, w_t, w_p };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.w_0, self.w_t, self.w_p];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Weight(format!(
                "negative or non-finite weight in {all:?}"
            )));
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Weight(format!("weights sum to {sum}, not 1")));
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.w_0 + self.w_t + self.w_p
    }

    /// Weight of the unreacted term, `w_u = w_0`.
    pub fn unreacted(&self) -> f64 {
        self.w_0
    }

    /// Weight of the reacted term, `w_r = w_T + w_P`.
    pub fn reacted(&self) -> f64 {
        self.w_t + self.w_p
    }
}

pub fn decomposition_weights(s: &InitialState, k_s: f64, t: f64) -> Result<DecompositionWeights> {
    check_time_and_rate(k_s, t)?;
    let w_0 = (-k_s * t).exp();
    let reacted = 1.0 - w_0;
    Ok(DecompositionWeights {
        w_0,
        w_t: reacted * s.triplet_weight(),
        w_p: reacted * s.singlet_weight(),
    })
}

/// `w_0 rho_0 + w_T |T><T| + w_P |P><P|` in the expanded basis.
pub fn reconstruct_from_weights(
    s: &InitialState,
    w: &DecompositionWeights,
) -> Result<DensityMatrix> {
    w.validate()?;
    let basis = SpinBasis::Pst;
    let rho0 = initial_density(s, basis);
    let triplet = level_state(basis, basis.triplet());
    let product = level_state(basis, basis.product().expect("expanded basis"));
    let m = &(&rho0.mat().scale_real(w.w_0) + &triplet.mat().scale_real(w.w_t))
        + &product.mat().scale_real(w.w_p);
    Ok(DensityMatrix::from_parts(m, basis))
}

/// Split of the expanded quantum-measurement state into the unrecombined
/// radical pairs (trace not constant) and the recombined product.
#[derive(Debug, Clone, PartialEq)]
pub struct KominisSplit {
    pub unrecombined: ComplexMatrix,
    pub product: ComplexMatrix,
}

impl KominisSplit {
    pub fn total(&self) -> ComplexMatrix {
        &self.unrecombined + &self.product
    }
}

pub fn kominis_decomposition(s: &InitialState, k_s: f64, t: f64) -> Result<KominisSplit> {
    let full = qm_expanded_solution(s, k_s, t)?;
    let m = full.mat();
    let p = SpinBasis::Pst.product().expect("expanded basis");
    let unrecombined = m.with_entry(p, p, zero());
    let product = ComplexMatrix::zeros(3).with_entry(p, p, m.get(p, p));
    Ok(KominisSplit {
        unrecombined,
        product,
    })
}

/// Normalized state of the unrecombined pairs,
/// `(w_0 rho_0 + w_T |T><T|) / (w_0 + w_T)`, in the `{S, T}` basis.
pub fn unrecombined_state(s: &InitialState, k_s: f64, t: f64) -> Result<DensityMatrix> {
    let w = decomposition_weights(s, k_s, t)?;
    let denom = w.w_0 + w.w_t;
    if !(denom > VANISHING_TRACE) {
        return Err(Error::VanishingTrace { trace: denom });
    }
    let rho0 = initial_density(s, SpinBasis::St);
    let triplet = level_state(SpinBasis::St, SpinBasis::St.triplet());
    let m = &rho0.mat().scale_real(w.w_0 / denom) + &triplet.mat().scale_real(w.w_t / denom);
    Ok(DensityMatrix::from_parts(m, SpinBasis::St))
}

/// `e^{-k t} rho_0 + (1 - e^{-k t}) |T><T|`: the two-weight normalization
/// that omits the product weight. Unit trace, but not a solution of the
/// renormalized equation of motion.
pub fn kominis_claimed_state(s: &InitialState, k_s: f64, t: f64) -> Result<DensityMatrix> {
    check_time_and_rate(k_s, t)?;
    let w_0 = (-k_s * t).exp();
    let rho0 = initial_density(s, SpinBasis::St);
    let triplet = level_state(SpinBasis::St, SpinBasis::St.triplet());
    let m = &rho0.mat().scale_real(w_0) + &triplet.mat().scale_real(1.0 - w_0);
    Ok(DensityMatrix::from_parts(m, SpinBasis::St))
}

/// Finite-difference step used by [`eq2_residual`] when none is given.
pub fn default_residual_step(k_s: f64) -> f64 {
    1e-6 / k_s.max(1.0)
}

/// Frobenius norm of `d rho / dt - normalized_rhs(rho)` at `t`, with the
/// time derivative of `state_fn` taken by second-order finite differences
/// (central, or one-sided forward when `t < h`).
pub fn eq2_residual<F>(state_fn: F, k_s: f64, proj: &Projectors, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            reason: "finite-difference step must be positive",
        });
    }
    let params = RateParams::new(k_s)?;
    let here = state_fn(t)?;
    let derivative = if t - h >= 0.0 {
        let ahead = state_fn(t + h)?;
        let behind = state_fn(t - h)?;
        (ahead.mat() - behind.mat()).scale_real(0.5 / h)
    } else {
        let one = state_fn(t + h)?;
        let two = state_fn(t + 2.0 * h)?;
        let num = &(&one.mat().scale_real(4.0) - &here.mat().scale_real(3.0)) - two.mat();
        num.scale_real(0.5 / h)
    };
    let rhs = normalized_rhs(&here, &params, proj)?;
    Ok((&derivative - &rhs).frobenius_norm())
}
