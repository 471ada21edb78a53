//! Spin bases, projectors and radical-pair states.
//!
//! Two bases are used throughout. The radical-pair basis `{S, T}` carries
//! only the unreacted electron-spin states; its density matrices lose trace
//! as pairs recombine. The expanded basis `{P, S, T}` adds a product level at
//! index 0 so the full description keeps unit trace. Coherences between the
//! product and the radical-pair levels are structurally zero.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densmat::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Tolerance accepted by [`InitialState::new`] on `|alpha|^2 + |beta|^2`.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Most negative eigenvalue a density matrix may have.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Largest allowed magnitude of a product/radical-pair coherence.
pub const PRODUCT_COHERENCE_TOL: f64 = 1e-12;
/// Traces at or below this value cannot be renormalized.
pub const VANISHING_TRACE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinBasis {
    /// `{S, T}`: the radical pair alone.
    St,
    /// `{P, S, T}`: product level plus the radical pair.
    Pst,
}

impl SpinBasis {
    pub fn dim(self) -> usize {
        match self {
            SpinBasis::St => 2,
            SpinBasis::Pst => 3,
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            SpinBasis::St => &["S", "T"],
            SpinBasis::Pst => &["P", "S", "T"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpinBasis::St => "ST",
            SpinBasis::Pst => "PST",
        }
    }

    pub fn singlet(self) -> usize {
        match self {
            SpinBasis::St => 0,
            SpinBasis::Pst => 1,
        }
    }

    pub fn triplet(self) -> usize {
        self.singlet() + 1
    }

    pub fn product(self) -> Option<usize> {
        match self {
            SpinBasis::St => None,
            SpinBasis::Pst => Some(0),
        }
    }

    pub(crate) fn expect(self, expected: SpinBasis) -> Result<()> {
        if self == expected {
            Ok(())
        } else {
            Err(Error::Basis {
                expected: expected.name(),
                found: self.name(),
            })
        }
    }
}

impl fmt::Display for SpinBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn make_basis(kind: SpinBasis) -> SpinBasis {
    kind
}

/// Singlet and triplet projection operators in a given basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projectors {
    pub qs: ComplexMatrix,
    pub qt: ComplexMatrix,
    pub basis: SpinBasis,
}

impl Projectors {
    pub fn new(basis: SpinBasis) -> Self {
        let n = basis.dim();
        let mut s = vec![0.0; n];
        let mut t = vec![0.0; n];
        s[basis.singlet()] = 1.0;
        t[basis.triplet()] = 1.0;
        Self {
            qs: ComplexMatrix::from_diag(&s),
            qt: ComplexMatrix::from_diag(&t),
            basis,
        }
    }
}

pub fn make_projectors(basis: SpinBasis) -> Projectors {
    Projectors::new(basis)
}

/// Pure initial spin state `alpha|S> + beta|T>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    alpha: Complex64,
    beta: Complex64,
}

impl InitialState {
    /// Accepts amplitudes whose squared norm is within [`NORMALIZATION_TOL`]
    /// of one and rescales them to unit norm.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::with_tolerance(alpha, beta, NORMALIZATION_TOL)
    }

    pub fn with_tolerance(alpha: Complex64, beta: Complex64, tol: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || !((norm - 1.0).abs() <= tol) {
            return Err(Error::Normalization { norm });
        }
        let r = norm.sqrt();
        Ok(Self {
            alpha: alpha / r,
            beta: beta / r,
        })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    pub fn singlet() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn triplet() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// `(|S> + |T>) / sqrt(2)`
    pub fn equal_superposition() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: a, beta: a }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `|alpha|^2`
    pub fn singlet_weight(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `|beta|^2`
    pub fn triplet_weight(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// `alpha beta*`, the S-T coherence of the initial density matrix.
    pub fn coherence(&self) -> Complex64 {
        self.alpha * self.beta.conj()
    }
}

/// A Hermitian, positive semidefinite matrix tagged with its basis.
///
/// The trace may be below one: trace-deficient (improper) states are
/// what the radical-pair basis produces under recombination.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    basis: SpinBasis,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, basis: SpinBasis) -> Result<Self> {
        validate_state(&mat, basis)?;
        Ok(Self { mat, basis })
    }

    /// Skips validation. Used for closed-form states whose invariants hold
    /// by construction.
    pub(crate) fn from_parts(mat: ComplexMatrix, basis: SpinBasis) -> Self {
        debug_assert_eq!(mat.dim(), basis.dim());
        Self { mat, basis }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.mat.purity()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat
            .hermitian_eigenvalues(HERMITIAN_TOL)
            .expect("density matrices are Hermitian")
    }

    pub fn expect_basis(&self, basis: SpinBasis) -> Result<()> {
        self.basis.expect(basis)
    }
}

fn validate_state(mat: &ComplexMatrix, basis: SpinBasis) -> Result<()> {
    if mat.dim() != basis.dim() {
        return Err(Error::Dimension {
            expected: basis.dim(),
            found: mat.dim(),
        });
    }
    if mat
        .entries()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let eigenvalues = mat.hermitian_eigenvalues(HERMITIAN_TOL)?;
    let trace = mat.trace();
    if trace.im.abs() > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!(
            "trace has imaginary part {:e}",
            trace.im
        )));
    }
    if !(trace.re > 0.0 && trace.re <= 1.0 + HERMITIAN_TOL) {
        return Err(Error::InvalidState(format!(
            "trace {} outside (0, 1]",
            trace.re
        )));
    }
    if let Some(&min) = eigenvalues.first() {
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
    }
    if let Some(p) = basis.product() {
        for k in 0..basis.dim() {
            if k != p && mat.get(p, k).norm() > PRODUCT_COHERENCE_TOL {
                return Err(Error::InvalidState(format!(
                    "product coherence with level {} is {:e}",
                    basis.labels()[k],
                    mat.get(p, k).norm()
                )));
            }
        }
    }
    Ok(())
}

/// `|psi><psi|` for the initial state, in either basis.
pub fn initial_density(s: &InitialState, basis: SpinBasis) -> DensityMatrix {
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
    psi[basis.singlet()] = s.alpha();
    psi[basis.triplet()] = s.beta();
    DensityMatrix::from_parts(ComplexMatrix::outer(&psi), basis)
}

/// Projector onto a single basis level, as a state.
pub fn level_state(basis: SpinBasis, index: usize) -> DensityMatrix {
    let mut d = vec![0.0; basis.dim()];
    d[index] = 1.0;
    DensityMatrix::from_parts(ComplexMatrix::from_diag(&d), basis)
}

/// Places an `{S, T}` block into the expanded basis with an empty product level.
pub fn embed_st_in_pst(rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.expect_basis(SpinBasis::St)?;
    Ok(DensityMatrix::from_parts(
        embed_block(rho.mat()),
        SpinBasis::Pst,
    ))
}

/// Drops the product row and column, leaving the (generally improper)
/// radical-pair density matrix.
pub fn restrict_pst_to_rp(rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.expect_basis(SpinBasis::Pst)?;
    Ok(DensityMatrix::from_parts(
        restrict_block(rho.mat()),
        SpinBasis::St,
    ))
}

pub(crate) fn embed_block(m: &ComplexMatrix) -> ComplexMatrix {
    debug_assert_eq!(m.dim(), 2);
    ComplexMatrix::from_fn(3, |i, j| {
        if i == 0 || j == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            m.get(i - 1, j - 1)
        }
    })
}

pub(crate) fn restrict_block(m: &ComplexMatrix) -> ComplexMatrix {
    debug_assert_eq!(m.dim(), 3);
    ComplexMatrix::from_fn(2, |i, j| m.get(i + 1, j + 1))
}

/// Divides by the trace.
pub fn renormalize(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let trace = rho.mat().trace();
    if trace.im.abs() > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!(
            "trace has imaginary part {:e}",
            trace.im
        )));
    }
    if !(trace.re > VANISHING_TRACE) {
        return Err(Error::VanishingTrace { trace: trace.re });
    }
    Ok(DensityMatrix::from_parts(
        rho.mat().scale_real(1.0 / trace.re),
        rho.basis(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub trace: f64,
    /// Singlet population `Tr[Q_S rho]`.
    pub p_s: f64,
    /// Triplet population `Tr[Q_T rho]`.
    pub p_t: f64,
    /// Product population; zero in the `{S, T}` basis.
    pub p_p: f64,
    /// `|rho_ST|`
    pub coherence_abs: f64,
    pub purity: f64,
}

pub fn observables(rho: &DensityMatrix) -> Observables {
    let b = rho.basis();
    let m = rho.mat();
    let (s, t) = (b.singlet(), b.triplet());
    Observables {
        trace: m.trace().re,
        p_s: m.get(s, s).re,
        p_t: m.get(t, t).re,
        p_p: b.product().map_or(0.0, |p| m.get(p, p).re),
        coherence_abs: m.get(s, t).norm(),
        purity: m.purity(),
    }
}
