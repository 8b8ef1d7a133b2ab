//! Single-shot gate calibration: beam splitters, phase rotations, and
//! displacements, using one heterodyne-style readout per probe port.

use nalgebra::Vector2;
use num_complex::Complex64;
use serde::Serialize;

use crate::discrete::{window_phase_distribution, wrap_index, WindowRegister};
use crate::error::{QcstError, Result};
use crate::fock::{canonical_matrices, coherent_with_deficit};
use crate::gaussian::{sample_gaussian, GaussianModel};
use crate::linalg::kron;

const PI: f64 = std::f64::consts::PI;

/// Beam splitter with mixing angle θ and relative phase φ:
/// α' = α cos(θ/2) + i β sin(θ/2) e^{iφ},
/// β' = β cos(θ/2) + i α sin(θ/2) e^{−iφ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamSplitterParams {
    pub theta: f64,
    pub phi: f64,
}

impl BeamSplitterParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(QcstError::NonFinite("beam splitter parameters".into()));
        }
        Ok(Self { theta: wrap_angle(theta), phi: wrap_angle(phi) })
    }
}

/// Wraps an angle into [0, 2π).
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y >= 2.0 * PI {
        0.0
    } else {
        y
    }
}

pub fn beam_splitter_output(
    alpha: Complex64,
    beta: Complex64,
    params: &BeamSplitterParams,
) -> (Complex64, Complex64) {
    let c = (params.theta / 2.0).cos();
    let s = (params.theta / 2.0).sin();
    let i = Complex64::new(0.0, 1.0);
    let e_plus = Complex64::from_polar(1.0, params.phi);
    let e_minus = Complex64::from_polar(1.0, -params.phi);
    (
        alpha * c + i * beta * s * e_plus,
        beta * c + i * alpha * s * e_minus,
    )
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BsEstimate {
    pub params: BeamSplitterParams,
    /// False when |s| is within 3 standard errors of zero, in which case
    /// the φ estimate is dominated by readout noise.
    pub phi_identifiable: bool,
}

/// Recovers (θ, φ) from known probe amplitudes and one measured output
/// amplitude per port. With P = |α|² + |β|²,
/// c = (α̂'α* + ββ̂'*)/P estimates cos(θ/2) and
/// s = i(αβ̂'* − α̂'β*)/P estimates sin(θ/2) e^{−iφ} conjugated into φ.
pub fn calibrate_beam_splitter(
    alpha: Complex64,
    beta: Complex64,
    alpha_out: Complex64,
    beta_out: Complex64,
) -> Result<BsEstimate> {
    let power = alpha.norm_sqr() + beta.norm_sqr();
    if power < 1e-12 {
        return Err(QcstError::InvalidArgument(
            "both probe amplitudes are zero".into(),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let c = (alpha_out * alpha.conj() + beta * beta_out.conj()) / power;
    let s = i * (alpha * beta_out.conj() - alpha_out * beta.conj()) / power;
    let theta = wrap_angle(2.0 * s.norm().atan2(c.re));
    let phi = wrap_angle(s.arg());
    // Single-shot readout noise gives s a standard error ~ 1/√P.
    let phi_identifiable = s.norm() >= 3.0 / power.sqrt();
    Ok(BsEstimate {
        params: BeamSplitterParams { theta, phi },
        phi_identifiable,
    })
}

/// Recovers the rotation angle of a'= e^{−iθ} α from a measured output
/// amplitude, wrapped to [0, 2π).
pub fn calibrate_rotation(alpha: Complex64, alpha_out: Complex64) -> Result<f64> {
    if alpha.norm_sqr() < 1e-12 {
        return Err(QcstError::InvalidArgument("probe amplitude is zero".into()));
    }
    Ok(wrap_angle(-(alpha_out / alpha).arg()))
}

/// One heterodyne-style readout of a coherent amplitude: the outcome law
/// is the Husimi Q of |α⟩, a complex Gaussian centered at α with
/// per-quadrature variance 1/2. Exact for any |α|.
pub fn single_shot_coherent_readout(alpha: Complex64, seed: u64) -> Result<Complex64> {
    let set = sample_gaussian(&GaussianModel::coherent(alpha), 1, seed)?;
    Ok(set.samples[0])
}

/// Simulates one beam splitter calibration trial: probes (α, β), one
/// readout per output port, then the (θ, φ) estimator.
pub fn bs_calibration_trial(
    alpha: Complex64,
    beta: Complex64,
    params: &BeamSplitterParams,
    seed: u64,
) -> Result<BsEstimate> {
    let (a_out, b_out) = beam_splitter_output(alpha, beta, params);
    let a_hat = single_shot_coherent_readout(a_out, seed)?;
    let b_hat = single_shot_coherent_readout(b_out, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    calibrate_beam_splitter(alpha, beta, a_hat, b_hat)
}

/// Simulates one rotation calibration trial.
pub fn rotation_calibration_trial(alpha: Complex64, theta: f64, seed: u64) -> Result<f64> {
    let out = alpha * Complex64::from_polar(1.0, -theta);
    let a_hat = single_shot_coherent_readout(out, seed)?;
    calibrate_rotation(alpha, a_hat)
}

/// Mean and variance of H = ½(e^{iφ} a†b + e^{−iφ} a b†) on |α⟩|α⟩,
/// computed from truncated two-mode matrices. Errors if the truncation
/// leaves more than 1e-8 of either coherent state outside the cutoff.
pub fn heisenberg_moments(alpha: Complex64, phi: f64, dim: usize) -> Result<(f64, f64)> {
    let (state, deficit) = coherent_with_deficit(alpha, dim)?;
    if deficit > 1e-8 {
        return Err(QcstError::InvalidDimension(format!(
            "truncation deficit {deficit:.3e} at dim {dim}; increase dim for |alpha| = {}",
            alpha.norm()
        )));
    }
    let ops = canonical_matrices(dim)?;
    let id = crate::linalg::CMat::identity(dim, dim);
    let a = kron(&ops.a, &id);
    let b = kron(&id, &ops.a);
    let e = Complex64::from_polar(1.0, phi);
    let h = (a.adjoint() * &b * e + &a * b.adjoint() * e.conj()) * Complex64::new(0.5, 0.0);

    let v = kron_vec(state.coeffs(), state.coeffs());
    let hv = &h * &v;
    let mean = v.dotc(&hv).re;
    let second = hv.dotc(&hv).re;
    Ok((mean, second - mean * mean))
}

fn kron_vec(a: &crate::linalg::CVec, b: &crate::linalg::CVec) -> crate::linalg::CVec {
    let mut out = crate::linalg::CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// CV displacement calibration: two homodyne momentum readouts after the
/// two-mode sum couplings, distributed as
/// p̃₁ ~ N(−√2 λ Im α, 1/2) and p̃₂ ~ N(−√2 λ Re α, 1/2), inverted by
/// α̃ = −(p̃₂ + i p̃₁)/(√2 λ).
pub fn displacement_cv_calibration(
    alpha: Complex64,
    lambda: f64,
    seed: u64,
) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(QcstError::InvalidArgument(format!(
            "coupling strength must be positive, got {lambda}"
        )));
    }
    let root2 = 2f64.sqrt();
    let model = GaussianModel::new(
        Vector2::new(-root2 * lambda * alpha.im, -root2 * lambda * alpha.re),
        nalgebra::Matrix2::from_diagonal_element(0.5),
    )?;
    let set = sample_gaussian(&model, 1, seed)?;
    let p1 = set.samples[0].re;
    let p2 = set.samples[0].im;
    Ok(-Complex64::new(p2, p1) / (root2 * lambda))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DvDisplacementEstimate {
    pub alpha: Complex64,
    /// True when either quadrature phase 2λx left (−π, π], so the readout
    /// aliased and the estimate wrapped around the grid.
    pub wrapped: bool,
}

/// DV displacement calibration: each register accumulates phase 2λx per
/// index (x = Im α on the first register, Re α on the second), is read out
/// through the window QPE distribution, and the winning bin maps back to
/// x̂ = π·wrap(j)/(N λ).
pub fn displacement_dv_calibration(
    alpha: Complex64,
    w: &WindowRegister,
    lambda: f64,
    seed: u64,
) -> Result<DvDisplacementEstimate> {
    if !(lambda > 0.0) {
        return Err(QcstError::InvalidArgument(format!(
            "coupling strength must be positive, got {lambda}"
        )));
    }
    let n = w.size() as f64;
    let phase_im = 2.0 * lambda * alpha.im;
    let phase_re = 2.0 * lambda * alpha.re;
    let wrapped = phase_im.abs() > PI || phase_re.abs() > PI;

    let j_im = sample_index(&window_phase_distribution(w, phase_im), seed)?;
    let j_re = sample_index(&window_phase_distribution(w, phase_re), seed ^ 0x2545_f491_4f6c_dd1d)?;
    let x_im = PI * wrap_index(j_im, w.size()) as f64 / (n * lambda);
    let x_re = PI * wrap_index(j_re, w.size()) as f64 / (n * lambda);
    Ok(DvDisplacementEstimate { alpha: Complex64::new(x_re, x_im), wrapped })
}

fn sample_index(pr: &[f64], seed: u64) -> Result<usize> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = pr.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(QcstError::Sampling(format!(
            "degenerate index distribution with total mass {total}"
        )));
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (j, &p) in pr.iter().enumerate() {
        acc += p;
        if u <= acc {
            return Ok(j);
        }
    }
    Ok(pr.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::discrete::{make_window, WindowKind};

    #[test]
    fn beam_splitter_preserves_power() {
        let params = BeamSplitterParams::new(1.1, 0.7).unwrap();
        let a = Complex64::new(1.3, -0.4);
        let b = Complex64::new(-0.2, 2.1);
        let (ap, bp) = beam_splitter_output(a, b, &params);
        assert_abs_diff_eq!(
            ap.norm_sqr() + bp.norm_sqr(),
            a.norm_sqr() + b.norm_sqr(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn noiseless_round_trip() {
        for &(theta, phi) in &[(0.3, 1.2), (2.0, 5.9), (1.5707, 0.01), (3.0, 3.1)] {
            let params = BeamSplitterParams::new(theta, phi).unwrap();
            let a = Complex64::new(2.0, 0.5);
            let b = Complex64::new(-1.0, 1.5);
            let (ap, bp) = beam_splitter_output(a, b, &params);
            let est = calibrate_beam_splitter(a, b, ap, bp).unwrap();
            assert_abs_diff_eq!(est.params.theta, params.theta, epsilon = 1e-9);
            assert_abs_diff_eq!(est.params.phi, params.phi, epsilon = 1e-9);
        }
    }

    #[test]
    fn rotation_round_trip() {
        let a = Complex64::new(1.0, 2.0);
        for &theta in &[0.0, 0.4, 3.0, 6.0] {
            let out = a * Complex64::from_polar(1.0, -theta);
            let est = calibrate_rotation(a, out).unwrap();
            assert_abs_diff_eq!(est, wrap_angle(theta), epsilon = 1e-10);
        }
    }

    #[test]
    fn phi_flagged_near_zero_theta() {
        let params = BeamSplitterParams::new(1e-4, 1.0).unwrap();
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.0, 1.0);
        let est = bs_calibration_trial(a, b, &params, 7).unwrap();
        assert!(!est.phi_identifiable);
    }

    #[test]
    fn readout_statistics() {
        let alpha = Complex64::new(3.0, -2.0);
        let m = 20_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut var_re = 0.0;
        for t in 0..m {
            let z = single_shot_coherent_readout(alpha, 1000 + t).unwrap();
            sum += z;
            var_re += (z.re - alpha.re).powi(2);
        }
        let mean = sum / m as f64;
        assert!((mean - alpha).norm() < 0.02);
        assert!((var_re / m as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn heisenberg_moments_match_closed_form() {
        for &(alpha, phi) in &[
            (Complex64::new(1.0, 0.0), 0.0),
            (Complex64::new(0.8, 0.5), 1.3),
            (Complex64::new(-0.6, 0.9), 4.0),
        ] {
            let dim = 26;
            let (mean, var) = heisenberg_moments(alpha, phi, dim).unwrap();
            let a2 = alpha.norm_sqr();
            assert_abs_diff_eq!(mean, a2 * phi.cos(), epsilon = 1e-4);
            assert_abs_diff_eq!(var, a2 / 2.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn heisenberg_rejects_starved_truncation() {
        assert!(heisenberg_moments(Complex64::new(4.0, 0.0), 0.0, 8).is_err());
    }

    #[test]
    fn cv_displacement_unbiased() {
        let alpha = Complex64::new(0.7, -0.3);
        let lambda = 2.0;
        let m = 20_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut var = 0.0;
        for t in 0..m {
            let est = displacement_cv_calibration(alpha, lambda, 50_000 + t).unwrap();
            sum += est;
            var += (est - alpha).norm_sqr();
        }
        let mean = sum / m as f64;
        // Per-quadrature variance is 1/(4λ²+4λ²)… total (est − α) second
        // moment is 2 × (1/2)/(2λ²) = 1/(2λ²).
        assert!((mean - alpha).norm() < 0.01);
        let want = 1.0 / (2.0 * lambda * lambda);
        assert!((var / m as f64 - want).abs() / want < 0.05);
    }

    #[test]
    fn dv_displacement_recovers_grid_values() {
        let n = 16;
        let lambda = 1.0;
        let w = make_window(WindowKind::Unf, n, lambda).unwrap();
        // Phases exactly on the grid are recovered deterministically.
        for wrapped_j in [-3i64, 0, 5] {
            let x = PI * wrapped_j as f64 / (n as f64 * lambda);
            let alpha = Complex64::new(x, -x);
            let est = displacement_dv_calibration(alpha, &w, lambda, 3).unwrap();
            assert_abs_diff_eq!(est.alpha.re, x, epsilon = 1e-12);
            assert_abs_diff_eq!(est.alpha.im, -x, epsilon = 1e-12);
            assert!(!est.wrapped);
        }
    }

    #[test]
    fn dv_displacement_flags_aliasing() {
        let w = make_window(WindowKind::Unf, 8, 1.0).unwrap();
        let est = displacement_dv_calibration(Complex64::new(2.0, 0.0), &w, 1.0, 11).unwrap();
        assert!(est.wrapped);
    }
}
