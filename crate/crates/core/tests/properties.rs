//! Property tests for the matrix algebra, the generators and the closed forms.

use std::f64::consts::PI;

use proptest::prelude::*;
use radpair_core::analytic::{
    decomposition_weights, default_residual_step, eq2_residual, hk_expanded_solution,
    kominis_claimed_state, kominis_decomposition, qm_expanded_solution, reconstruct_from_weights,
    unrecombined_state,
};
use radpair_core::integrate::propagate;
use radpair_core::models::{expanded_rhs, haberkorn_rhs, normalized_rhs, qm_rhs};
use radpair_core::spinsys::{
    embed_st_in_pst, initial_density, observables, renormalize, restrict_pst_to_rp,
};
use radpair_core::*;

// =============================================================================
// Strategies
// =============================================================================

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..=range, -range..=range).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(1.0), dim * dim)
        .prop_map(move |e| ComplexMatrix::new(dim, e).unwrap())
}

fn hermitian(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim)
        .prop_flat_map(matrix)
        .prop_map(|m| m.hermitize())
}

/// Unit-trace positive `{S, T}` state `A A^H / Tr(A A^H)`.
fn st_state() -> impl Strategy<Value = DensityMatrix> {
    matrix(2)
        .prop_filter("non-degenerate", |a| a.frobenius_norm() > 1e-3)
        .prop_map(|a| {
            let m = &a * &a.adjoint();
            let m = m.scale_real(1.0 / m.trace().re).hermitize();
            DensityMatrix::new(m, SpinBasis::St).unwrap()
        })
}

/// Positive `{S, T}` state with trace in `(0, 1]`.
fn improper_st_state() -> impl Strategy<Value = DensityMatrix> {
    (st_state(), 0.05..=1.0_f64).prop_map(|(rho, scale)| {
        DensityMatrix::new(rho.mat().scale_real(scale), SpinBasis::St).unwrap()
    })
}

fn initial_state() -> impl Strategy<Value = InitialState> {
    (0.0..=0.5 * PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(theta, pa, pb)| {
        InitialState::new(
            Complex64::from_polar(theta.cos(), pa),
            Complex64::from_polar(theta.sin(), pb),
        )
        .unwrap()
    })
}

/// Initial state with both amplitudes bounded away from zero.
fn mixed_initial_state() -> impl Strategy<Value = InitialState> {
    (0.1..=0.5 * PI - 0.1, 0.0..2.0 * PI).prop_map(|(theta, phase)| {
        InitialState::new(
            Complex64::new(theta.cos(), 0.0),
            Complex64::from_polar(theta.sin(), phase),
        )
        .unwrap()
    })
}

/// `(k_S, t)` with `k_S` in `[0.1, 10]` and `t` in `[0, 5 / k_S]`.
fn rate_and_time() -> impl Strategy<Value = (f64, f64)> {
    (0.1..=10.0_f64, 0.0..=5.0_f64).prop_map(|(k, kt)| (k, kt / k))
}

fn rates(k: f64) -> RateParams {
    RateParams::new(k).unwrap()
}

// =============================================================================
// Matrix algebra
// =============================================================================

proptest! {
    #[test]
    fn prop_eigenvalues_match_trace_and_purity(m in hermitian(8)) {
        let ev = m.hermitian_eigenvalues(1e-10).unwrap();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = ev.iter().sum();
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        prop_assert!((sum - m.trace().re).abs() <= 1e-10, "{sum} vs {}", m.trace().re);
        prop_assert!((sq - m.purity()).abs() <= 1e-10, "{sq} vs {}", m.purity());
    }

    #[test]
    fn prop_eigenvalues_annihilate_characteristic_matrix(m in hermitian(4)) {
        // m - lambda I is singular, so (m - lambda I)(m - lambda I)^H has a
        // zero eigenvalue.
        let ev = m.hermitian_eigenvalues(1e-10).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        for &lambda in &ev {
            let shifted = m.sub(&ComplexMatrix::identity(m.dim()).scale_real(lambda)).unwrap();
            let sq = &shifted * &shifted.adjoint();
            let min = sq.hermitian_eigenvalues(1e-9).unwrap()[0];
            prop_assert!(min.abs() <= 1e-10 * scale * scale, "{min:e}");
        }
    }

    #[test]
    fn prop_adjoint_is_an_involution(m in (1usize..=6).prop_flat_map(matrix)) {
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn prop_matmul_is_associative(
        (a, b, c) in (1usize..=8).prop_flat_map(|n| (matrix(n), matrix(n), matrix(n)))
    ) {
        let left = (&a * &b).matmul(&c).unwrap();
        let right = a.matmul(&(&b * &c)).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12);
    }

    #[test]
    fn prop_projector_eigenvalues_are_zero_or_one(v in prop::collection::vec(complex(1.0), 1..=6)) {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let unit: Vec<_> = v.iter().map(|z| z / norm).collect();
        let q = ComplexMatrix::outer(&unit);
        for ev in q.hermitian_eigenvalues(1e-10).unwrap() {
            prop_assert!(ev.abs() <= 1e-12 || (ev - 1.0).abs() <= 1e-12, "{ev}");
        }
    }
}

// =============================================================================
// Spin system
// =============================================================================

proptest! {
    #[test]
    fn prop_initial_density_is_pure(s in initial_state()) {
        for basis in [SpinBasis::St, SpinBasis::Pst] {
            let rho = initial_density(&s, basis);
            prop_assert!((rho.purity() - 1.0).abs() <= 1e-12);
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
            prop_assert!(DensityMatrix::new(rho.mat().clone(), basis).is_ok());
        }
    }

    #[test]
    fn prop_restrict_embed_round_trip(rho in improper_st_state()) {
        let back = restrict_pst_to_rp(&embed_st_in_pst(&rho).unwrap()).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn prop_expanded_trace_splits_into_product_and_pair(s in initial_state(), (k, t) in rate_and_time()) {
        for rho in [qm_expanded_solution(&s, k, t).unwrap(), hk_expanded_solution(&s, k, t).unwrap()] {
            let o = observables(&rho);
            let rp = restrict_pst_to_rp(&rho).unwrap();
            prop_assert!((o.trace - (o.p_p + rp.trace())).abs() <= 1e-12);
            prop_assert!((o.p_p + o.p_s + o.p_t - 1.0).abs() <= 1e-10);
        }
    }
}

// =============================================================================
// Generators
// =============================================================================

/// The renormalized equation exactly as written, with the division.
fn literal_normalized_rhs(rho: &ComplexMatrix, k: f64) -> ComplexMatrix {
    let qt = ComplexMatrix::from_diag(&[0.0, 1.0]);
    let projected = &(&qt * rho) * &qt;
    let p_t = projected.trace().re;
    let bracket = rho - &projected.scale_real(1.0 / p_t);
    bracket.scale_real(-k * p_t)
}

proptest! {
    #[test]
    fn prop_qm_trace_bleeds_singlet_population(rho in improper_st_state(), k in 0.0..=10.0_f64) {
        let proj = Projectors::new(SpinBasis::St);
        let d = qm_rhs(&rho, &rates(k), &proj).unwrap();
        let p_s = (&proj.qs * rho.mat()).trace().re;
        prop_assert!((d.trace().re + k * p_s).abs() <= 1e-12);
    }

    #[test]
    fn prop_expanded_generators_preserve_trace(rho in improper_st_state(), k in 0.0..=10.0_f64) {
        let proj = Projectors::new(SpinBasis::Pst);
        let pst = embed_st_in_pst(&rho).unwrap();
        // Put the missing population on the product level.
        let pst = DensityMatrix::new(
            pst.mat().with_entry(0, 0, Complex64::new(1.0 - rho.trace(), 0.0)),
            SpinBasis::Pst,
        ).unwrap();
        for kind in [ModelKind::QuantumMeasurement, ModelKind::Haberkorn] {
            let d = expanded_rhs(kind, &pst, &rates(k), &proj).unwrap();
            prop_assert!(d.trace().norm() <= 1e-14, "{:e}", d.trace().norm());
            prop_assert!(d.is_hermitian(1e-12));
        }
    }

    #[test]
    fn prop_normalized_rhs_conserves_trace(rho in st_state(), k in 0.0..=10.0_f64) {
        let proj = Projectors::new(SpinBasis::St);
        let d = normalized_rhs(&rho, &rates(k), &proj).unwrap();
        prop_assert!(d.trace().norm() <= 1e-12);
    }

    #[test]
    fn prop_rhs_outputs_are_hermitian(rho in st_state(), k in 0.0..=10.0_f64) {
        let proj = Projectors::new(SpinBasis::St);
        let p = rates(k);
        prop_assert!(qm_rhs(&rho, &p, &proj).unwrap().is_hermitian(1e-12));
        prop_assert!(haberkorn_rhs(&rho, &p, &proj).unwrap().is_hermitian(1e-12));
        prop_assert!(normalized_rhs(&rho, &p, &proj).unwrap().is_hermitian(1e-12));
    }

    #[test]
    fn prop_division_free_form_matches_literal(rho in st_state(), k in 0.1..=10.0_f64) {
        prop_assume!(rho.mat().get(1, 1).re >= 1e-6);
        let proj = Projectors::new(SpinBasis::St);
        let d = normalized_rhs(&rho, &rates(k), &proj).unwrap();
        let literal = literal_normalized_rhs(rho.mat(), k);
        prop_assert!(d.max_abs_diff(&literal).unwrap() <= 1e-10);
    }

    #[test]
    fn prop_normalized_rhs_is_quotient_rule_of_qm_rhs(s in initial_state(), k in 0.0..=10.0_f64) {
        let proj = Projectors::new(SpinBasis::St);
        let rho = initial_density(&s, SpinBasis::St);
        let p = rates(k);
        let qm = qm_rhs(&rho, &p, &proj).unwrap();
        let expected = &qm - &rho.mat().scale(qm.trace());
        let d = normalized_rhs(&rho, &p, &proj).unwrap();
        prop_assert!(d.max_abs_diff(&expected).unwrap() <= 1e-12);
    }
}

// =============================================================================
// Closed forms
// =============================================================================

proptest! {
    #[test]
    fn prop_weights_reconstruct_qm_solution(s in initial_state(), (k, t) in rate_and_time()) {
        let w = decomposition_weights(&s, k, t).unwrap();
        prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.w_0 >= 0.0 && w.w_t >= 0.0 && w.w_p >= 0.0);
        let rebuilt = reconstruct_from_weights(&s, &w).unwrap();
        let exact = qm_expanded_solution(&s, k, t).unwrap();
        prop_assert!(rebuilt.mat().max_abs_diff(exact.mat()).unwrap() <= 1e-12);
    }

    #[test]
    fn prop_split_is_an_exact_rearrangement(s in initial_state(), (k, t) in rate_and_time()) {
        let split = kominis_decomposition(&s, k, t).unwrap();
        let exact = qm_expanded_solution(&s, k, t).unwrap();
        prop_assert!(split.total().max_abs_diff(exact.mat()).unwrap() <= 1e-15);
        for (i, z) in split.product.entries().iter().enumerate() {
            prop_assert!(i == 0 || *z == Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn prop_unrecombined_state_is_renormalized_restriction(s in initial_state(), (k, t) in rate_and_time()) {
        let u = unrecombined_state(&s, k, t).unwrap();
        let r = renormalize(&restrict_pst_to_rp(&qm_expanded_solution(&s, k, t).unwrap()).unwrap()).unwrap();
        prop_assert!(u.mat().max_abs_diff(r.mat()).unwrap() <= 1e-12);
        prop_assert!(u.eigenvalues()[0] >= -1e-12);
    }

    #[test]
    fn prop_haberkorn_stays_pure_while_qm_decoheres(
        s in mixed_initial_state(), k in 0.1..=10.0_f64, kt in 0.1..=5.0_f64,
    ) {
        let t = kt / k;
        let hk = renormalize(&restrict_pst_to_rp(&hk_expanded_solution(&s, k, t).unwrap()).unwrap()).unwrap();
        prop_assert!((hk.purity() - 1.0).abs() <= 1e-10);
        let qm = unrecombined_state(&s, k, t).unwrap();
        prop_assert!(qm.purity() < 1.0 - 1e-6, "{}", qm.purity());
    }

    #[test]
    fn prop_coherence_decay_contrast(s in initial_state(), (k, t) in rate_and_time()) {
        let qm = observables(&qm_expanded_solution(&s, k, t).unwrap()).coherence_abs;
        let hk = observables(&hk_expanded_solution(&s, k, t).unwrap()).coherence_abs;
        let c0 = s.coherence().norm();
        prop_assert!((qm - c0 * (-k * t).exp()).abs() <= 1e-12);
        prop_assert!((hk - c0 * (-0.5 * k * t).exp()).abs() <= 1e-12);
        if c0 > 1e-3 {
            prop_assert!((qm / hk - (-0.5 * k * t).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn prop_residual_contrast(kt in 0.1..=3.0_f64) {
        let s = InitialState::equal_superposition();
        let proj = Projectors::new(SpinBasis::St);
        let h = default_residual_step(1.0);
        let good = eq2_residual(|t| unrecombined_state(&s, 1.0, t), 1.0, &proj, kt, h).unwrap();
        let bad = eq2_residual(|t| kominis_claimed_state(&s, 1.0, t), 1.0, &proj, kt, h).unwrap();
        prop_assert!(good < 1e-6, "{good:e}");
        prop_assert!(bad > 1e-3, "{bad:e}");
    }
}

// =============================================================================
// Propagation
// =============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prop_restriction_commutes_with_propagation(s in initial_state(), k in 0.2..=5.0_f64) {
        let cfg = IntegratorConfig::for_rate(k, 3.0 / k).with_stride(50);
        let p = rates(k);
        for kind in [ModelKind::QuantumMeasurement, ModelKind::Haberkorn] {
            let full = propagate(kind, &s, &p, SpinBasis::Pst, &cfg).unwrap();
            let pair = propagate(kind, &s, &p, SpinBasis::St, &cfg).unwrap();
            prop_assert_eq!(full.records.len(), pair.records.len());
            for (a, b) in full.records.iter().zip(&pair.records) {
                prop_assert_eq!(a.t, b.t);
                let restricted = restrict_pst_to_rp(&a.state).unwrap();
                prop_assert!(restricted.mat().max_abs_diff(b.state.mat()).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn prop_trace_laws_hold_along_trajectories(s in initial_state(), k in 0.2..=5.0_f64) {
        let p = rates(k);
        let long = IntegratorConfig::for_rate(k, 10.0 / k).with_stride(100);
        let pst = propagate(ModelKind::QuantumMeasurement, &s, &p, SpinBasis::Pst, &long).unwrap();
        for r in &pst.records {
            prop_assert!((r.obs.trace - 1.0).abs() <= 1e-10);
        }
        let st = propagate(ModelKind::QuantumMeasurement, &s, &p, SpinBasis::St, &long).unwrap();
        for r in &st.records {
            let expected = s.singlet_weight() * (-k * r.t).exp() + s.triplet_weight();
            prop_assert!((r.obs.trace - expected).abs() <= 1e-8);
        }
        let nqm = propagate(ModelKind::NormalizedQM, &s, &p, SpinBasis::St, &long).unwrap();
        for r in &nqm.records {
            prop_assert!((r.obs.trace - 1.0).abs() <= 1e-9);
        }
    }
}
