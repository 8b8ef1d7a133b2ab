//! Analytic Gaussian fast path: Gaussian Husimi Q-functions, direct
//! sampling, moment estimation and the squeezed-coherent parametrization
//! with its squeezing-parameter fit.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{QcstError, Result};
use crate::optimize::nelder_mead_2d;
use crate::sample::{PhaseSampleSet, SampleSource};

/// Mean and covariance of the Husimi Q distribution in (Re α, Im α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub mu: Vector2<f64>,
    pub sigma: Matrix2<f64>,
}

impl GaussianModel {
    /// Builds a model, requiring sigma symmetric within 1e-12.
    pub fn new(mu: Vector2<f64>, sigma: Matrix2<f64>) -> Result<Self> {
        if !mu.iter().chain(sigma.iter()).all(|x| x.is_finite()) {
            return Err(QcstError::NonFinite("Gaussian model parameters".into()));
        }
        if (sigma[(0, 1)] - sigma[(1, 0)]).abs() > 1e-12 {
            return Err(QcstError::InvalidArgument(format!(
                "sigma not symmetric: off-diagonals {} vs {}",
                sigma[(0, 1)],
                sigma[(1, 0)]
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn vacuum() -> Self {
        Self { mu: Vector2::zeros(), sigma: Matrix2::identity() * 0.5 }
    }

    pub fn coherent(beta: Complex64) -> Self {
        Self { mu: Vector2::new(beta.re, beta.im), sigma: Matrix2::identity() * 0.5 }
    }

    fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.sigma.trace();
        let det = self.sigma.determinant();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }

    /// Whether both covariance eigenvalues respect the vacuum bound 1/4.
    /// Sample estimates may legitimately fail this; they are flagged, not
    /// rejected.
    pub fn is_physical(&self) -> bool {
        self.eigenvalues().0 >= 0.25 - 1e-9
    }
}

/// Squeezed-coherent parametrization ξ = r e^{iθ} applied to |α0⟩, α0 ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub xi: Complex64,
    pub alpha0: f64,
}

impl SqueezeParams {
    pub fn new(xi: Complex64, alpha0: f64) -> Result<Self> {
        if !xi.re.is_finite() || !xi.im.is_finite() || !alpha0.is_finite() {
            return Err(QcstError::NonFinite("squeeze parameters".into()));
        }
        if alpha0 < 0.0 {
            return Err(QcstError::InvalidArgument("alpha0 must be >= 0".into()));
        }
        Ok(Self { xi, alpha0 })
    }
}

/// Evaluates the bivariate normal density of (Re α, Im α).
pub fn gaussian_q_eval(model: &GaussianModel, alpha: Complex64) -> Result<f64> {
    let det = model.sigma.determinant();
    let (lo, hi) = model.eigenvalues();
    if det <= 0.0 || lo <= 0.0 {
        return Err(QcstError::Singular(format!(
            "sigma eigenvalues ({lo:.3e}, {hi:.3e}) are not positive"
        )));
    }
    let inv = model
        .sigma
        .try_inverse()
        .ok_or_else(|| QcstError::Singular("sigma not invertible".into()))?;
    let d = Vector2::new(alpha.re, alpha.im) - model.mu;
    let quad = d.dot(&(inv * d));
    Ok((-(quad / 2.0)).exp() / (2.0 * std::f64::consts::PI * det.sqrt()))
}

fn half_rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = (theta / 2.0).sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Husimi Q model of S(ξ)|α0⟩:
/// μ = R_θ [α0 e^{−r} cos(θ/2); −α0 e^{r} sin(θ/2)],
/// Σ = R_θ diag((1+e^{−2r})/4, (1+e^{2r})/4) R_θ⁻¹.
pub fn squeezed_coherent_model(params: &SqueezeParams) -> GaussianModel {
    let r = params.xi.norm();
    let theta = if r == 0.0 { 0.0 } else { params.xi.arg() };
    let rot = half_rotation(theta);
    let (st, ct) = (theta / 2.0).sin_cos();
    let mu = rot * Vector2::new(params.alpha0 * (-r).exp() * ct, -params.alpha0 * r.exp() * st);
    let diag = Matrix2::new((1.0 + (-2.0 * r).exp()) / 4.0, 0.0, 0.0, (1.0 + (2.0 * r).exp()) / 4.0);
    let sigma = rot * diag * rot.transpose();
    GaussianModel { mu, sigma }
}

/// M i.i.d. draws through the Cholesky factor of sigma. Deterministic for a
/// fixed seed.
pub fn sample_gaussian(model: &GaussianModel, m: usize, seed: u64) -> Result<PhaseSampleSet> {
    let chol = nalgebra::Cholesky::new(model.sigma)
        .ok_or_else(|| QcstError::Singular("sigma is not positive definite".into()))?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(m);
    for _ in 0..m {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let v = model.mu + l * Vector2::new(z1, z2);
        samples.push(Complex64::new(v[0], v[1]));
    }
    PhaseSampleSet::new(samples, seed, SampleSource::AnalyticGaussian)
}

/// Sample mean and unbiased (1/(M−1)) covariance of a sample set.
pub fn estimate_moments(samples: &PhaseSampleSet) -> Result<GaussianModel> {
    let m = samples.len();
    if m < 2 {
        return Err(QcstError::InvalidArgument(format!(
            "covariance needs at least 2 samples, got {m}"
        )));
    }
    let mut mu = Vector2::zeros();
    for z in &samples.samples {
        mu += Vector2::new(z.re, z.im);
    }
    mu /= m as f64;
    let mut sigma = Matrix2::zeros();
    for z in &samples.samples {
        let d = Vector2::new(z.re, z.im) - mu;
        sigma += d * d.transpose();
    }
    sigma /= (m - 1) as f64;
    GaussianModel::new(mu, sigma)
}

/// Result of a squeezing-parameter fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SqueezeFit {
    pub xi: Complex64,
    pub loss: f64,
}

/// Loss ‖μ(ξ)−μ̃‖ + ‖Σ(ξ)−Σ̃‖_F at fixed α0.
pub fn squeeze_fit_loss(xi: Complex64, alpha0: f64, mu_t: &Vector2<f64>, sigma_t: &Matrix2<f64>) -> f64 {
    let model = squeezed_coherent_model(&SqueezeParams { xi, alpha0 });
    (model.mu - mu_t).norm() + (model.sigma - sigma_t).norm()
}

/// Minimizes the squeezing loss over the closed disk |ξ| ≤ 1: 64×64 polar
/// grid followed by Nelder–Mead refinement in cartesian (Re ξ, Im ξ).
/// Degenerate grid minima are tie-broken toward smaller θ by scan order.
pub fn fit_squeezing(mu_t: &Vector2<f64>, sigma_t: &Matrix2<f64>, alpha0: f64) -> Result<SqueezeFit> {
    if !mu_t.iter().chain(sigma_t.iter()).all(|x| x.is_finite()) || !alpha0.is_finite() {
        return Err(QcstError::NonFinite("squeezing fit inputs".into()));
    }
    if alpha0 <= 0.0 {
        return Err(QcstError::InvalidArgument("alpha0 must be > 0".into()));
    }
    let loss = |x: f64, y: f64| {
        let xi = Complex64::new(x, y);
        let r = xi.norm();
        if r > 1.0 {
            // project onto the disk, with a penalty to keep the search inside
            squeeze_fit_loss(xi / r, alpha0, mu_t, sigma_t) + (r - 1.0) * 10.0
        } else {
            squeeze_fit_loss(xi, alpha0, mu_t, sigma_t)
        }
    };

    let mut best = (0.0f64, 0.0f64);
    let mut best_val = f64::INFINITY;
    for i in 0..64 {
        let r = i as f64 / 63.0;
        for j in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
            let (x, y) = (r * theta.cos(), r * theta.sin());
            let v = loss(x, y);
            if v < best_val {
                best_val = v;
                best = (x, y);
            }
        }
        if r == 0.0 {
            continue;
        }
    }

    let ((x, y), v) = nelder_mead_2d(loss, best, 0.02, 400, 1e-14);
    let mut xi = Complex64::new(x, y);
    if xi.norm() > 1.0 {
        xi /= xi.norm();
    }
    Ok(SqueezeFit { xi, loss: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn q_eval_peaks() {
        let vac = GaussianModel::vacuum();
        let q = gaussian_q_eval(&vac, Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(q, 1.0 / std::f64::consts::PI, epsilon = 1e-12);

        let beta = Complex64::new(2.3, 0.0);
        let coh = GaussianModel::coherent(beta);
        let qb = gaussian_q_eval(&coh, beta).unwrap();
        assert_abs_diff_eq!(qb, 1.0 / std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn q_eval_normalizes() {
        let model = squeezed_coherent_model(
            &SqueezeParams::new(Complex64::new(0.2, 0.3), 1.0).unwrap(),
        );
        let step = 0.05;
        let mut total = 0.0;
        let n = (12.0 / step) as usize;
        for i in 0..n {
            for j in 0..n {
                let a = Complex64::new(
                    -6.0 + (i as f64 + 0.5) * step,
                    -6.0 + (j as f64 + 0.5) * step,
                );
                total += gaussian_q_eval(&model, a).unwrap() * step * step;
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn q_eval_rejects_singular() {
        let bad = GaussianModel { mu: Vector2::zeros(), sigma: Matrix2::zeros() };
        assert!(gaussian_q_eval(&bad, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn squeezed_model_limits() {
        let flat = squeezed_coherent_model(&SqueezeParams::new(Complex64::new(0.0, 0.0), 3.0).unwrap());
        assert_abs_diff_eq!(flat.mu[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(flat.mu[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((flat.sigma - Matrix2::identity() * 0.5).norm(), 0.0, epsilon = 1e-14);

        let r = 0.4;
        let real = squeezed_coherent_model(
            &SqueezeParams::new(Complex64::new(r, 0.0), 2.0).unwrap(),
        );
        assert_abs_diff_eq!(real.mu[0], 2.0 * (-r).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(real.mu[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(real.sigma[(0, 0)], (1.0 + (-2.0 * r).exp()) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(real.sigma[(1, 1)], (1.0 + (2.0 * r).exp()) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezed_model_det_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r: f64 = rng.gen::<f64>();
            let th: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let a0: f64 = 1.0 + 7.0 * rng.gen::<f64>();
            let xi = Complex64::from_polar(r, th);
            let m = squeezed_coherent_model(&SqueezeParams::new(xi, a0).unwrap());
            assert!(m.sigma.determinant() >= 0.25 - 1e-9);
            assert!(m.is_physical());
        }
    }

    #[test]
    fn sampling_deterministic_and_consistent() {
        let model = GaussianModel {
            mu: Vector2::new(2.0, 1.0),
            sigma: Matrix2::identity() * 0.5,
        };
        let empty = sample_gaussian(&model, 0, 5).unwrap();
        assert!(empty.is_empty());

        let a = sample_gaussian(&model, 1000, 5).unwrap();
        let b = sample_gaussian(&model, 1000, 5).unwrap();
        assert_eq!(a.samples, b.samples);

        let big = sample_gaussian(&model, 100_000, 5).unwrap();
        let est = estimate_moments(&big).unwrap();
        let bound = 4.0 * (0.5f64).sqrt() / (big.len() as f64).sqrt();
        assert!((est.mu[0] - 2.0).abs() < bound);
        assert!((est.mu[1] - 1.0).abs() < bound);
    }

    #[test]
    fn moments_hand_examples() {
        let two = PhaseSampleSet::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)],
            0,
            SampleSource::ExternalFile,
        )
        .unwrap();
        let est = estimate_moments(&two).unwrap();
        assert_abs_diff_eq!(est.mu[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(est.sigma[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(est.sigma[(1, 1)], 0.0, epsilon = 1e-14);

        let repeated = PhaseSampleSet::new(
            vec![Complex64::new(0.7, -0.4); 50],
            0,
            SampleSource::ExternalFile,
        )
        .unwrap();
        let flat = estimate_moments(&repeated).unwrap();
        assert_abs_diff_eq!(flat.sigma.norm(), 0.0, epsilon = 1e-14);

        let one = PhaseSampleSet::new(vec![Complex64::new(0.0, 0.0)], 0, SampleSource::ExternalFile)
            .unwrap();
        assert!(estimate_moments(&one).is_err());
    }

    #[test]
    fn covariance_error_scales() {
        let model = squeezed_coherent_model(
            &SqueezeParams::new(Complex64::new(0.3, 0.2), 2.0).unwrap(),
        );
        let m = 10_000;
        let s = sample_gaussian(&model, m, 99).unwrap();
        let est = estimate_moments(&s).unwrap();
        let err = (est.sigma - model.sigma).norm();
        assert!(err <= 10.0 * model.sigma.norm() / (m as f64).sqrt(), "err {err}");
    }

    #[test]
    fn fit_recovers_noiseless() {
        let xi = Complex64::new(0.3, 0.0);
        let model = squeezed_coherent_model(&SqueezeParams::new(xi, 4.0).unwrap());
        let fit = fit_squeezing(&model.mu, &model.sigma, 4.0).unwrap();
        assert!((fit.xi - xi).norm() < 1e-4, "got {}", fit.xi);
        assert!(fit.loss < 1e-8);

        let flat = squeezed_coherent_model(&SqueezeParams::new(Complex64::new(0.0, 0.0), 4.0).unwrap());
        let fit0 = fit_squeezing(&flat.mu, &flat.sigma, 4.0).unwrap();
        assert!(fit0.xi.norm() < 1e-4);
    }

    #[test]
    fn fit_recovers_complex_noiseless() {
        let xi = Complex64::from_polar(0.6, 2.1);
        let model = squeezed_coherent_model(&SqueezeParams::new(xi, 5.0).unwrap());
        let fit = fit_squeezing(&model.mu, &model.sigma, 5.0).unwrap();
        assert!((fit.xi - xi).norm() < 1e-4, "got {} want {}", fit.xi, xi);
        assert!(fit.loss < 1e-8);
    }
}
