//! Q-function tomography: maximum-likelihood reconstruction of a pure
//! state from heterodyne samples, and a pointwise interpolation baseline
//! on Padua nodes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{QcstError, Result};
use crate::fock::FockState;
use crate::linalg::{CVec, C_ZERO};
use crate::qcst::HusimiEvaluator;

const PI: f64 = std::f64::consts::PI;
/// Per-sample likelihood floor; samples below it are clamped and counted.
const LIKELIHOOD_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Serialize)]
pub struct MleConfig {
    /// Fock support of the reconstruction.
    pub gamma: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Number of random restarts besides the moment-informed start.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self { gamma: 32, max_iters: 2000, grad_tol: 1e-7, restarts: 8, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub psi_hat: FockState,
    /// −(1/M) Σ log Q(α_j) at the returned state.
    pub neg_log_likelihood: f64,
    /// Samples whose likelihood hit the floor at the returned state.
    pub floor_hits: usize,
    pub iterations: usize,
}

/// −(1/M) Σ_j log Q(α_j; ψ) with the same likelihood floor the optimizer
/// uses.
pub fn negative_log_likelihood(samples: &[Complex64], psi: &FockState) -> Result<f64> {
    if samples.is_empty() {
        return Err(QcstError::InvalidArgument("no samples".into()));
    }
    let eval = HusimiEvaluator::new(psi);
    let m_inv = 1.0 / samples.len() as f64;
    Ok(samples
        .iter()
        .map(|&a| -m_inv * eval.eval(a).max(LIKELIHOOD_FLOOR).ln())
        .sum())
}

/// |⟨a|b⟩|² after zero-padding to a common support.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    let dim = a.dim().max(b.dim());
    let a = a.resized(dim)?;
    let b = b.resized(dim)?;
    Ok(a.overlap(&b).norm_sqr())
}

struct DesignMatrix {
    /// a_jk = α_j^k/√k!, row-major M×Γ.
    a: Vec<Complex64>,
    /// e^{−|α_j|²} factors.
    envelope: Vec<f64>,
    m: usize,
    gamma: usize,
}

impl DesignMatrix {
    fn build(samples: &[Complex64], gamma: usize) -> Self {
        let m = samples.len();
        let mut a = Vec::with_capacity(m * gamma);
        let mut envelope = Vec::with_capacity(m);
        for &alpha in samples {
            envelope.push((-alpha.norm_sqr()).exp());
            let mut val = Complex64::new(1.0, 0.0);
            for k in 0..gamma {
                if k > 0 {
                    val = val * alpha / Complex64::new((k as f64).sqrt(), 0.0);
                }
                a.push(val);
            }
        }
        Self { a, envelope, m, gamma }
    }

    /// Negative mean log-likelihood and its Wirtinger gradient
    /// g_k = ∂f/∂ψ̄_k = −(1/M) Σ_j a_jk s̄_j/|s_j|², with
    /// s_j = Σ_k ψ̄_k a_jk. Returns (f, gradient wrt ψ̄, floor hits).
    fn objective(&self, psi: &CVec) -> (f64, CVec, usize) {
        let m_inv = 1.0 / self.m as f64;
        let mut f = 0.0;
        let mut grad = CVec::zeros(self.gamma);
        let mut floor_hits = 0;
        for j in 0..self.m {
            let row = &self.a[j * self.gamma..(j + 1) * self.gamma];
            let mut s = C_ZERO;
            for k in 0..self.gamma {
                s += psi[k].conj() * row[k];
            }
            let q = (s.norm_sqr() * self.envelope[j] / PI).max(LIKELIHOOD_FLOOR);
            if q <= LIKELIHOOD_FLOOR {
                floor_hits += 1;
            }
            f -= m_inv * q.ln();
            let denom = s.norm_sqr().max(LIKELIHOOD_FLOOR);
            let scale = s.conj() * (m_inv / denom);
            for k in 0..self.gamma {
                grad[k] -= row[k] * scale;
            }
        }
        (f, grad, floor_hits)
    }
}

fn gauge_fix(mut psi: CVec) -> CVec {
    let mut best = 0;
    for k in 1..psi.len() {
        if psi[k].norm_sqr() > psi[best].norm_sqr() {
            best = k;
        }
    }
    let phase = psi[best].arg();
    let rot = Complex64::from_polar(1.0, -phase);
    for k in 0..psi.len() {
        psi[k] *= rot;
    }
    psi
}

fn descend(design: &DesignMatrix, start: CVec, cfg: &MleConfig) -> (CVec, f64, usize, usize) {
    let mut psi = start.normalize();
    let (mut f, mut grad, mut floors) = design.objective(&psi);
    let mut step = 0.1;
    let mut iters = 0;
    for _ in 0..cfg.max_iters {
        iters += 1;
        // The real-coordinate gradient at ψ_k is 2·∂f/∂ψ̄_k viewed as a
        // complex number; descend along it, projected onto the tangent
        // space of the unit sphere (the radial and global phase components
        // are killed by the renormalization and would stall the search).
        let radial = psi.dotc(&grad);
        let dir = &grad - &psi * radial;
        let gnorm = dir.norm();
        if gnorm < cfg.grad_tol {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let trial = (&psi - &dir * Complex64::new(step, 0.0)).normalize();
            let (f_t, g_t, fl_t) = design.objective(&trial);
            if f_t < f {
                psi = trial;
                f = f_t;
                grad = g_t;
                floors = fl_t;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (psi, f, floors, iters)
}

/// Maximum-likelihood pure-state reconstruction from heterodyne samples.
/// Runs a moment-informed start (coherent at the sample mean) plus
/// `restarts` random starts and keeps the best final likelihood; the
/// result is gauge-fixed so its largest component is real nonnegative.
pub fn mle_fit(samples: &[Complex64], cfg: &MleConfig) -> Result<ReconstructionReport> {
    if samples.is_empty() {
        return Err(QcstError::InvalidArgument("no samples".into()));
    }
    if cfg.gamma == 0 {
        return Err(QcstError::InvalidDimension("support must be positive".into()));
    }
    if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QcstError::NonFinite("tomography samples".into()));
    }
    let design = DesignMatrix::build(samples, cfg.gamma);

    let mean: Complex64 = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let mut starts: Vec<CVec> = Vec::with_capacity(cfg.restarts + 1);
    // Truncate the coherent seed without a deficit check: it is only a
    // starting point.
    let mut seed_vec = CVec::zeros(cfg.gamma);
    let mut val = Complex64::new(1.0, 0.0);
    for k in 0..cfg.gamma {
        if k > 0 {
            val = val * mean / Complex64::new((k as f64).sqrt(), 0.0);
        }
        seed_vec[k] = val;
    }
    if seed_vec.norm() > 0.0 {
        starts.push(seed_vec);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let v = CVec::from_fn(cfg.gamma, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        starts.push(v);
    }

    let mut best: Option<(CVec, f64, usize, usize)> = None;
    for start in starts {
        let out = descend(&design, start, cfg);
        if best.as_ref().map_or(true, |b| out.1 < b.1) {
            best = Some(out);
        }
    }
    let (psi, f, floors, iters) = best.unwrap();
    Ok(ReconstructionReport {
        psi_hat: FockState::new(gauge_fix(psi))?,
        neg_log_likelihood: f,
        floor_hits: floors,
        iterations: iters,
    })
}

/// Padua nodes of degree n on [−1, 1]²: (cos(jπ/n), cos(kπ/(n+1))) with
/// j + k even, paired with their cubature weights for the product
/// Chebyshev measure.
pub fn padua_nodes(n: usize) -> Vec<(f64, f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for j in 0..=n {
        for k in 0..=(n + 1) {
            if (j + k) % 2 != 0 {
                continue;
            }
            let x = (j as f64 * PI / n as f64).cos();
            let y = (k as f64 * PI / (n as f64 + 1.0)).cos();
            let on_x_edge = j == 0 || j == n;
            let on_y_edge = k == 0 || k == n + 1;
            let class = match (on_x_edge, on_y_edge) {
                (true, true) => 0.5,
                (false, false) => 2.0,
                _ => 1.0,
            };
            out.push((x, y, class / (n as f64 * (n as f64 + 1.0))));
        }
    }
    out
}

/// Degree-n interpolant through values on the Padua nodes, stored as
/// Chebyshev coefficients c_{kl}, k + l ≤ n.
#[derive(Debug, Clone)]
pub struct PaduaInterpolant {
    n: usize,
    /// Row-major over k in 0..=n, l in 0..=n−k.
    coeffs: Vec<f64>,
}

fn cheb_norm(k: usize, x: f64) -> f64 {
    // Normalized T̂_0 = 1, T̂_k = √2 cos(k arccos x).
    let t = (k as f64 * x.clamp(-1.0, 1.0).acos()).cos();
    if k == 0 {
        t
    } else {
        2f64.sqrt() * t
    }
}

/// Fits the Padua interpolant from node values ordered as `padua_nodes(n)`.
pub fn padua_fit(n: usize, values: &[f64]) -> Result<PaduaInterpolant> {
    let nodes = padua_nodes(n);
    if values.len() != nodes.len() {
        return Err(QcstError::DimensionMismatch(format!(
            "expected {} node values, got {}",
            nodes.len(),
            values.len()
        )));
    }
    let mut coeffs = Vec::new();
    for k in 0..=n {
        for l in 0..=(n - k) {
            let mut c = 0.0;
            for ((x, y, w), &v) in nodes.iter().zip(values) {
                c += w * v * cheb_norm(k, *x) * cheb_norm(l, *y);
            }
            // The top-degree coefficient in the first coordinate is halved.
            if k == n {
                c *= 0.5;
            }
            coeffs.push(c);
        }
    }
    Ok(PaduaInterpolant { n, coeffs })
}

impl PaduaInterpolant {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut idx = 0;
        let mut out = 0.0;
        for k in 0..=self.n {
            let tx = cheb_norm(k, x);
            for l in 0..=(self.n - k) {
                out += self.coeffs[idx] * tx * cheb_norm(l, y);
                idx += 1;
            }
        }
        out
    }
}

/// Frequency estimate of π·Q(α) from repeated projective checks against
/// |α⟩: Binomial(shots, |⟨α|ψ⟩|²)/shots, divided back by π.
pub fn pointwise_q_estimate(
    psi: &FockState,
    alpha: Complex64,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if shots == 0 {
        return Err(QcstError::InvalidArgument("shots must be positive".into()));
    }
    let p = (PI * crate::qcst::husimi_q_pure(psi, alpha)).clamp(0.0, 1.0);
    let hits = Binomial::new(shots, p)
        .map_err(|e| QcstError::Sampling(e.to_string()))?
        .sample(rng);
    Ok(hits as f64 / shots as f64 / PI)
}

#[derive(Debug, Clone, Serialize)]
pub struct PaduaBaselineReport {
    pub degree: usize,
    pub radius: f64,
    pub nodes: usize,
    pub shots_per_node: u64,
    pub l1_error: f64,
}

/// Pointwise-tomography baseline: estimate Q on Padua nodes scaled to
/// [−R, R]², interpolate, and measure the L1 distance to the true Q with
/// the interpolant clamped at zero.
pub fn padua_q_baseline(
    psi: &FockState,
    degree: usize,
    radius: f64,
    shots_per_node: u64,
    seed: u64,
) -> Result<PaduaBaselineReport> {
    let nodes = padua_nodes(degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(nodes.len());
    for (x, y, _) in &nodes {
        let alpha = Complex64::new(radius * x, radius * y);
        values.push(pointwise_q_estimate(psi, alpha, shots_per_node, &mut rng)?);
    }
    let interp = padua_fit(degree, &values)?;
    let truth = HusimiEvaluator::new(psi);
    let l1 = q_l1_distance(
        |alpha| truth.eval(alpha),
        |alpha| interp.eval(alpha.re / radius, alpha.im / radius).max(0.0),
        radius,
        0.02,
    );
    Ok(PaduaBaselineReport {
        degree,
        radius,
        nodes: nodes.len(),
        shots_per_node,
        l1_error: l1,
    })
}

/// Midpoint-rule ∫_{[−R,R]²} |f − g| d²α.
pub fn q_l1_distance<F, G>(f: F, g: G, radius: f64, step: f64) -> f64
where
    F: Fn(Complex64) -> f64,
    G: Fn(Complex64) -> f64,
{
    let count = (2.0 * radius / step).ceil() as usize;
    let h = 2.0 * radius / count as f64;
    let mut total = 0.0;
    for i in 0..count {
        let x = -radius + (i as f64 + 0.5) * h;
        for j in 0..count {
            let y = -radius + (j as f64 + 0.5) * h;
            let alpha = Complex64::new(x, y);
            total += (f(alpha) - g(alpha)).abs();
        }
    }
    total * h * h
}

/// L1 distance between the Q functions of a reconstruction and a target.
pub fn q_l1_between_states(psi: &FockState, phi: &FockState, radius: f64) -> f64 {
    let a = HusimiEvaluator::new(psi);
    let b = HusimiEvaluator::new(phi);
    q_l1_distance(|z| a.eval(z), |z| b.eval(z), radius, 0.02)
}
