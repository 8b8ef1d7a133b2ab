//! Cross-module property checks: operator algebra on truncated spaces,
//! Gaussian-model consistency against Fock-space oracles, sampling laws,
//! and the discrete transform's two independent evaluation paths.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcst_core::discrete::{
    acd_matrix, discrete_qcst_amplitudes, fock_oracle_amplitudes, make_window, WindowKind,
};
use qcst_core::fock::{
    canonical_matrices, displacement_matrix, make_coherent, squeeze_matrix, two_mode_sum_gate,
    FockState, Quadrature,
};
use qcst_core::gaussian::{gaussian_q_eval, squeezed_coherent_model, SqueezeParams};
use qcst_core::linalg::{default_edge, exp_i_hermitian, max_abs_diff, unitarity_error, CMat, CVec};
use qcst_core::qcst::{husimi_q_pure, sample_husimi, tomography_test_state, HusimiEvaluator};
use qcst_core::tomography::{fidelity, mle_fit, negative_log_likelihood, MleConfig};

const PI: f64 = std::f64::consts::PI;

fn complex_in_disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..2.0 * PI).prop_map(move |(u, phi)| {
        Complex64::from_polar(radius * u.sqrt(), phi)
    })
}

fn interior_diff(a: &CMat, b: &CMat, edge: usize) -> f64 {
    let keep = a.nrows() - edge;
    let av = a.view((0, 0), (keep, keep));
    let bv = b.view((0, 0), (keep, keep));
    let mut max = 0.0f64;
    for i in 0..keep {
        for j in 0..keep {
            max = max.max((av[(i, j)] - bv[(i, j)]).norm());
        }
    }
    max
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displacement_composition_law(a in complex_in_disk(1.0), b in complex_in_disk(1.0)) {
        let dim = 64;
        // The composed product needs a deeper truncation margin than single
        // gates: entries near level n are only converged once the Poisson
        // tail e^{-margin²/(2n|α|²)} is negligible, which at |a+b| ≤ 2
        // means excluding the top 3d/8 levels.
        let edge = 3 * dim / 8;
        let da = displacement_matrix(a, dim).unwrap();
        let db = displacement_matrix(b, dim).unwrap();
        let dab = displacement_matrix(a + b, dim).unwrap();
        let phase = ((a * b.conj() - a.conj() * b) / 2.0).exp();
        let composed = &da * &db;
        let reference = dab * phase;
        prop_assert!(interior_diff(&composed, &reference, edge) < 1e-7);
    }

    #[test]
    fn coherent_overlap_closed_form(a in complex_in_disk(2.0), b in complex_in_disk(2.0)) {
        let dim = 64;
        let ca = make_coherent(a, dim).unwrap();
        let cb = make_coherent(b, dim).unwrap();
        let got = ca.overlap(&cb).norm_sqr();
        let want = (-(a - b).norm_sqr()).exp();
        prop_assert!((got - want).abs() < 1e-6);
    }

    #[test]
    fn gate_unitarity(g in -2.0..2.0f64, xi in complex_in_disk(1.0)) {
        let dim = 48;
        let edge = default_edge(dim);
        let d = displacement_matrix(xi, dim).unwrap();
        prop_assert!(unitarity_error(&d, edge) < 1e-7);
        let s = squeeze_matrix(xi, dim).unwrap();
        prop_assert!(unitarity_error(&s, edge) < 1e-7);
        let dim2 = 16;
        let u = two_mode_sum_gate(g, Quadrature::Q, Quadrature::P, dim2, dim2).unwrap();
        prop_assert!(unitarity_error(&u, dim2 * default_edge(dim2)) < 1e-7);
    }

    #[test]
    fn beam_splitter_round_trip(
        theta in 1e-3..(PI - 1e-3),
        phi in 0.0..2.0 * PI,
        a in complex_in_disk(2.0),
        b in complex_in_disk(2.0),
    ) {
        prop_assume!(a.norm() > 0.2 && b.norm() > 0.2);
        let params = qcst_core::calibration::BeamSplitterParams::new(theta, phi).unwrap();
        let (ap, bp) = qcst_core::calibration::beam_splitter_output(a, b, &params);
        prop_assert!(((ap.norm_sqr() + bp.norm_sqr()) - (a.norm_sqr() + b.norm_sqr())).abs() < 1e-12);
        let est = qcst_core::calibration::calibrate_beam_splitter(a, b, ap, bp).unwrap();
        prop_assert!((est.params.theta - params.theta).abs() < 1e-9);
        prop_assert!((est.params.phi - params.phi).rem_euclid(2.0 * PI).min(
            2.0 * PI - (est.params.phi - params.phi).rem_euclid(2.0 * PI)) < 1e-9);
    }
}

/// Analytic squeezed-coherent Gaussian model vs a Fock-space oracle.
///
/// The oracle never builds the large displaced state: S(ξ)D(α0)|0⟩ =
/// D(α0 cosh r − α0 e^{iθ} sinh r) S(ξ)|0⟩, and displacing a state shifts
/// its Q function rigidly, so Q(α) = Q_{S(ξ)|0⟩}(α − shift) with the
/// squeezed vacuum at a modest truncation.
#[test]
fn gaussian_model_matches_fock_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let dim = 96;
    for _ in 0..50 {
        let r = rng.gen::<f64>();
        let theta = rng.gen::<f64>() * 2.0 * PI;
        let alpha0 = 1.0 + 7.0 * rng.gen::<f64>();
        let xi = Complex64::from_polar(r, theta);
        let model = squeezed_coherent_model(&SqueezeParams::new(xi, alpha0).unwrap());

        let shift = alpha0 * (r.cosh() - Complex64::from_polar(r.sinh(), theta));
        let sq = squeeze_matrix(xi, dim).unwrap();
        let sq_vac = FockState::vacuum(dim).unwrap().apply(&sq).unwrap();

        let mu = Complex64::new(model.mu[0], model.mu[1]);
        // Probe within two standard deviations of the center.
        for k in 0..6 {
            let ang = k as f64 * PI / 3.0;
            let probe = mu + Complex64::from_polar(0.8 * (1.0 + (k % 3) as f64 * 0.5), ang);
            let q_model = gaussian_q_eval(&model, probe).unwrap();
            let q_oracle = husimi_q_pure(&sq_vac, probe - shift);
            let rel = (q_model - q_oracle).abs() / q_model.max(1e-12);
            assert!(
                rel < 1e-3,
                "relative error {rel} at xi {xi}, alpha0 {alpha0}, probe {probe}"
            );
        }
    }
}

#[test]
fn estimated_moments_match_fock_operators() {
    // Sample means/covariances of HQS draws converge to the anti-normal
    // moments ⟨a⟩ and Cov derived from operator expectations.
    let psi = tomography_test_state(8).unwrap();
    let dim = psi.dim();
    let ops = canonical_matrices(dim).unwrap();
    let v = psi.coeffs().clone();
    let av = &ops.a * &v;
    let mean_a = v.dotc(&av);
    // E_Q[α ᾱ] = ⟨a a†⟩, E_Q[α²] = ⟨a²⟩.
    let a_dag_a = av.dotc(&av).re;
    let e_abs2 = a_dag_a + 1.0;
    let e_a2 = v.dotc(&(&ops.a * &av));

    let set = sample_husimi(&psi, 200_000, 99).unwrap();
    let m = set.len() as f64;
    let s_mean: Complex64 = set.samples.iter().sum::<Complex64>() / m;
    let s_abs2: f64 = set.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / m;
    let s_a2: Complex64 = set.samples.iter().map(|z| z * z).sum::<Complex64>() / m;

    assert!((s_mean - mean_a).norm() < 0.02, "mean {s_mean} vs {mean_a}");
    assert!((s_abs2 - e_abs2).abs() < 0.05, "abs2 {s_abs2} vs {e_abs2}");
    assert!((s_a2 - e_a2).norm() < 0.06, "a2 {s_a2} vs {e_a2}");
}

/// One-sample Kolmogorov-Smirnov check of both marginals of the sampler
/// against quadrature marginals of Q, at the 1e-3 level (critical value
/// 1.949/√M).
#[test]
fn sampling_law_ks_marginals() {
    let psi = tomography_test_state(8).unwrap();
    let m = 10_000usize;
    let set = sample_husimi(&psi, m, 1234).unwrap();
    let eval = HusimiEvaluator::new(&psi);

    let r = 6.0;
    let n_grid = 600;
    let h = 2.0 * r / n_grid as f64;
    // Marginal densities of Re α and Im α on a grid.
    let mut marg_re = vec![0.0; n_grid];
    let mut marg_im = vec![0.0; n_grid];
    for i in 0..n_grid {
        let x = -r + (i as f64 + 0.5) * h;
        for j in 0..n_grid {
            let y = -r + (j as f64 + 0.5) * h;
            let q = eval.eval(Complex64::new(x, y));
            marg_re[i] += q * h;
            marg_im[j] += q * h;
        }
    }
    let cdf = |marg: &[f64], x: f64| -> f64 {
        let pos = ((x + r) / h).clamp(0.0, n_grid as f64);
        let full = pos.floor() as usize;
        let mut acc = 0.0;
        for (i, &d) in marg.iter().enumerate().take(full.min(n_grid)) {
            let _ = i;
            acc += d * h;
        }
        if full < n_grid {
            acc += marg[full] * h * (pos - full as f64);
        }
        acc
    };
    let ks = |values: &mut Vec<f64>, marg: &[f64]| -> f64 {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut worst = 0.0f64;
        for (i, &x) in values.iter().enumerate() {
            let f = cdf(marg, x);
            let lo = i as f64 / m as f64;
            let hi = (i + 1) as f64 / m as f64;
            worst = worst.max((f - lo).abs()).max((f - hi).abs());
        }
        worst
    };
    let critical = 1.949 / (m as f64).sqrt();
    let mut re: Vec<f64> = set.samples.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = set.samples.iter().map(|z| z.im).collect();
    let d_re = ks(&mut re, &marg_re);
    let d_im = ks(&mut im, &marg_im);
    assert!(d_re < critical, "KS(Re) = {d_re} >= {critical}");
    assert!(d_im < critical, "KS(Im) = {d_im} >= {critical}");
}

#[test]
fn discrete_paths_agree_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..4 {
        let coeffs = CVec::from_fn(4, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let psi = FockState::new(coeffs).unwrap();
        let kind = if trial % 2 == 0 { WindowKind::Unf } else { WindowKind::Sin };
        let lambda = 0.3 + 0.2 * trial as f64;
        let w = make_window(kind, 4, lambda).unwrap();
        let analytic = discrete_qcst_amplitudes(&psi, &w).unwrap();
        let oracle = fock_oracle_amplitudes(&psi, &w, 72).unwrap();
        let max_dev: f64 = analytic
            .amps
            .iter()
            .zip(&oracle.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-6, "trial {trial}: max deviation {max_dev}");
    }
}

/// The conditional-displacement form of the register-controlled gate
/// matches the two-mode sum exponential evaluated on the window's position
/// grid: the block of ACD(step = iλ) at index j is D(i q_j) = e^{i√2 q_j q̂}.
#[test]
fn dv_map_matches_sum_gate_on_grid() {
    let n = 4;
    let osc_dim = 48;
    let lambda = 0.6;
    let w = make_window(WindowKind::Sin, n, lambda).unwrap();
    let acd = acd_matrix(n, Complex64::new(0.0, lambda), osc_dim, false).unwrap();
    let ops = canonical_matrices(osc_dim).unwrap();
    for j in 0..n {
        let qj = w.q(j);
        let block: CMat = acd.view((j * osc_dim, j * osc_dim), (osc_dim, osc_dim)).into();
        let sum_gate = exp_i_hermitian(&ops.q, 2f64.sqrt() * qj);
        assert!(
            max_abs_diff(&block, &sum_gate) < 1e-6,
            "block {j} deviates by {}",
            max_abs_diff(&block, &sum_gate)
        );
    }
}

#[test]
fn mle_objective_gauge_invariant_and_monotone() {
    let psi = tomography_test_state(6).unwrap();
    let samples = sample_husimi(&psi, 800, 31).unwrap().samples;

    let rotated = FockState::new(psi.coeffs() * Complex64::from_polar(1.0, 1.234)).unwrap();
    let f0 = negative_log_likelihood(&samples, &psi).unwrap();
    let f1 = negative_log_likelihood(&samples, &rotated).unwrap();
    assert!((f0 - f1).abs() < 1e-10);
    assert!((fidelity(&psi, &rotated).unwrap() - 1.0).abs() < 1e-10);

    let cfg = MleConfig { gamma: 6, restarts: 2, seed: 8, ..Default::default() };
    let report = mle_fit(&samples, &cfg).unwrap();
    // The optimum can only improve on the true-state likelihood estimate's
    // starting candidates; it must at least beat the vacuum.
    let vac_nll = negative_log_likelihood(&samples, &FockState::vacuum(6).unwrap()).unwrap();
    assert!(report.neg_log_likelihood <= vac_nll);
    assert!(report.neg_log_likelihood <= f0 + 1e-9);
}

#[test]
fn sample_covariance_passes_through_unmodified() {
    // Tiny-M covariance estimates may be non-physical; they are reported
    // as-is and only flagged.
    use qcst_core::gaussian::estimate_moments;
    use qcst_core::sample::{PhaseSampleSet, SampleSource};
    let samples = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1e-6, 0.0),
        Complex64::new(0.0, 1e-6),
    ];
    let set = PhaseSampleSet::new(samples, 0, SampleSource::ExternalFile).unwrap();
    let model = estimate_moments(&set).unwrap();
    assert!(!model.is_physical());
    let expected = Matrix2::from_diagonal(&Vector2::new(0.25e-12, 0.25e-12)) * 1.0;
    assert!((model.sigma - expected).norm() < 1e-12);
}
