//! Analytic QCST/QGT, exact Husimi Q evaluation for Fock-expanded pure
//! states, rejection sampling of Q, and brute-force three-mode circuit
//! verification of the transform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QcstError, Result};
use crate::fock::{
    apply_to_modes, hermite_functions, make_coherent, project_mode, squeeze_matrix,
    two_mode_sum_gate, FockState, MultiModeState, Quadrature,
};
use crate::gaussian::{gaussian_q_eval, GaussianModel};
use crate::linalg::{CVec, C_I, C_ONE};
use crate::sample::{PhaseSampleSet, SampleSource};

const PI: f64 = std::f64::consts::PI;

/// Precomputed Horner coefficients t_k = ψ_k*/√k! for fast Q evaluation.
pub struct HusimiEvaluator {
    t: Vec<Complex64>,
}

impl HusimiEvaluator {
    pub fn new(psi: &FockState) -> Self {
        let mut inv_sqrt_fact = 1.0f64;
        let t = psi
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    inv_sqrt_fact /= (k as f64).sqrt();
                }
                c.conj() * Complex64::new(inv_sqrt_fact, 0.0)
            })
            .collect();
        Self { t }
    }

    /// ⟨α|ψ⟩ without the e^{−|α|²/2} envelope: Σ_k ψ_k* α^k/√k!.
    pub fn polynomial(&self, alpha: Complex64) -> Complex64 {
        let mut s = *self.t.last().unwrap();
        for k in (0..self.t.len() - 1).rev() {
            s = s * alpha + self.t[k];
        }
        s
    }

    pub fn eval(&self, alpha: Complex64) -> f64 {
        let s = self.polynomial(alpha);
        (-alpha.norm_sqr()).exp() * s.norm_sqr() / PI
    }

    /// ln Q(α), safe against envelope underflow.
    pub fn log_eval(&self, alpha: Complex64) -> f64 {
        let s = self.polynomial(alpha);
        -alpha.norm_sqr() + s.norm_sqr().max(f64::MIN_POSITIVE).ln() - PI.ln()
    }
}

/// Q(α) = (1/π) e^{−|α|²} |Σ_k ψ_k* α^k/√k!|².
pub fn husimi_q_pure(psi: &FockState, alpha: Complex64) -> f64 {
    HusimiEvaluator::new(psi).eval(alpha)
}

/// A Husimi Q density: either a truncated Fock expansion or a Gaussian.
#[derive(Debug, Clone)]
pub enum QFunction {
    PureFock(FockState),
    Gaussian(GaussianModel),
}

impl QFunction {
    pub fn eval(&self, alpha: Complex64) -> Result<f64> {
        match self {
            QFunction::PureFock(psi) => Ok(husimi_q_pure(psi, alpha)),
            QFunction::Gaussian(model) => gaussian_q_eval(model, alpha),
        }
    }
}

/// Rejection-samples M draws with density Q(α) on the square [−R, R]²,
/// R = √(2⟨n̂⟩+1) + 4, using the exact global envelope Q ≤ 1/π.
pub fn sample_husimi(psi: &FockState, m: usize, seed: u64) -> Result<PhaseSampleSet> {
    let mean_n = psi.mean_photon_number();
    let r = (2.0 * mean_n + 1.0).sqrt() + 4.0;
    // Markov bound on the mass outside the square: E_Q|α|² = ⟨n̂⟩+1.
    log::debug!(
        "sample_husimi: R = {r:.2}, leaked mass <= {:.2e}",
        (mean_n + 1.0) / (r * r)
    );
    let eval = HusimiEvaluator::new(psi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(m);
    let mut proposals: u64 = 0;
    while samples.len() < m {
        proposals += 1;
        if proposals > 500_000 && (samples.len() as f64) < 1e-4 * proposals as f64 {
            return Err(QcstError::Sampling(format!(
                "acceptance rate below 1e-4 after {proposals} proposals; \
                 the envelope square (R = {r:.1}) is likely far larger than the \
                 state's support — check the state normalization/truncation"
            )));
        }
        let a = Complex64::new(
            (rng.gen::<f64>() * 2.0 - 1.0) * r,
            (rng.gen::<f64>() * 2.0 - 1.0) * r,
        );
        let accept = PI * eval.eval(a);
        if rng.gen::<f64>() < accept {
            samples.push(a);
        }
    }
    PhaseSampleSet::new(samples, seed, SampleSource::Rejection)
}

/// Momentum-density amplitude of the analytic QCST:
/// (1/(2√π))⟨α|ψ⟩ with α = (p1 + i p2)/2. Its squared modulus integrates
/// to 1 over (p1, p2).
pub fn qcst_analytic_amplitude(psi: &FockState, p1: f64, p2: f64) -> Complex64 {
    let alpha = Complex64::new(p1 / 2.0, p2 / 2.0);
    let s = HusimiEvaluator::new(psi).polynomial(alpha);
    // ⟨α|ψ⟩ = e^{−|α|²/2} Σ ψ_n (α*)^n/√n! = e^{−|α|²/2} conj(poly(ᾱ*))…
    // poly(α) computes Σ ψ_k* α^k/√k!, so ⟨α|ψ⟩ = e^{−|α|²/2} conj(poly(α)).
    let overlap = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0) * s.conj();
    overlap / Complex64::new(2.0 * PI.sqrt(), 0.0)
}

/// Outcome of a circuit-vs-analytic comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QcstVerificationReport {
    pub grid: Vec<(f64, f64)>,
    pub max_amp_error: f64,
    pub ancilla_reset_fidelity: f64,
    pub per_mode_dim: usize,
    /// False when the ancilla reset fidelity fell below 0.9, indicating the
    /// truncation dims were too small for the comparison to mean anything.
    pub reliable: bool,
}

struct GateSpec {
    g: f64,
    quad_first: Quadrature,
    quad_third: Quadrature,
    /// Which ancilla mode (0 or 1) the gate couples to mode 2.
    ancilla: usize,
}

fn run_circuit(
    psi: &FockState,
    per_mode_dim: usize,
    gates: &[GateSpec],
) -> Result<MultiModeState> {
    let vac = FockState::vacuum(per_mode_dim)?;
    let signal = psi.resized(per_mode_dim)?;
    let mut state = MultiModeState::product(&[&vac, &vac, &signal])?;
    for spec in gates {
        let u = two_mode_sum_gate(
            spec.g,
            spec.quad_first,
            spec.quad_third,
            per_mode_dim,
            per_mode_dim,
        )?;
        state = apply_to_modes(&u, &state, &[spec.ancilla, 2])?;
    }
    Ok(state)
}

/// Joint momentum wavefunction Ψ(p1, p2) of a two-mode state.
fn joint_momentum_amplitude(two_mode: &MultiModeState, p1: f64, p2: f64) -> Complex64 {
    let d0 = two_mode.mode_dims()[0];
    let d1 = two_mode.mode_dims()[1];
    let phi1 = hermite_functions(p1, d0);
    let phi2 = hermite_functions(p2, d1);
    let mut phases = Vec::with_capacity(d0.max(d1));
    let mut ph = C_ONE;
    for _ in 0..d0.max(d1) {
        phases.push(ph);
        ph *= -C_I;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n1 in 0..d0 {
        for n2 in 0..d1 {
            acc += two_mode.coeffs()[n1 * d1 + n2]
                * phases[n1]
                * phases[n2]
                * Complex64::new(phi1[n1] * phi2[n2], 0.0);
        }
    }
    acc
}

fn compare_on_grid(
    two_mode: &MultiModeState,
    p_grid: &[f64],
    analytic: impl Fn(f64, f64) -> Complex64,
) -> (Vec<(f64, f64)>, f64) {
    let mut grid = Vec::new();
    let mut circuit = Vec::new();
    let mut reference = Vec::new();
    for &p1 in p_grid {
        for &p2 in p_grid {
            grid.push((p1, p2));
            circuit.push(joint_momentum_amplitude(two_mode, p1, p2));
            reference.push(analytic(p1, p2));
        }
    }
    // Fix the global phase gauge at the largest-|reference| grid point.
    let (k_max, _) = reference
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(ki, kv), (i, v)| {
            if v.norm() > kv {
                (i, v.norm())
            } else {
                (ki, kv)
            }
        });
    let phase = if circuit[k_max].norm() > 0.0 {
        let ratio = reference[k_max] / circuit[k_max];
        ratio / Complex64::new(ratio.norm(), 0.0)
    } else {
        C_ONE
    };
    let max_err = circuit
        .iter()
        .zip(&reference)
        .map(|(c, r)| (c * phase - r).norm())
        .fold(0.0, f64::max);
    (grid, max_err)
}

/// Simulates the full six-gate QCST circuit at truncation `per_mode_dim`,
/// projects the third mode onto vacuum, and compares the joint momentum
/// amplitude of the two ancilla modes against the analytic transform.
pub fn qcst_circuit_verify(
    psi: &FockState,
    per_mode_dim: usize,
    p_grid: &[f64],
) -> Result<QcstVerificationReport> {
    if per_mode_dim < 8 {
        return Err(QcstError::InvalidDimension(
            "QCST verification needs per-mode dim >= 8".into(),
        ));
    }
    let s2 = 2f64.sqrt();
    let gates = [
        GateSpec { g: 1.0 / s2, quad_first: Quadrature::Q, quad_third: Quadrature::Q, ancilla: 0 },
        GateSpec { g: s2, quad_first: Quadrature::Q, quad_third: Quadrature::P, ancilla: 1 },
        GateSpec { g: 1.0 / s2, quad_first: Quadrature::Q, quad_third: Quadrature::Q, ancilla: 0 },
        GateSpec { g: 1.0 / (2.0 * s2), quad_first: Quadrature::P, quad_third: Quadrature::P, ancilla: 0 },
        GateSpec { g: -1.0 / s2, quad_first: Quadrature::P, quad_third: Quadrature::Q, ancilla: 1 },
        GateSpec { g: 1.0 / (2.0 * s2), quad_first: Quadrature::P, quad_third: Quadrature::P, ancilla: 0 },
    ];
    let final_state = run_circuit(psi, per_mode_dim, &gates)?;
    let vac = FockState::vacuum(per_mode_dim)?;
    let (projected, fidelity) = project_mode(&final_state, 2, &vac)?;
    let normalized = normalize_branch(projected, fidelity)?;
    let psi_eval = psi.clone();
    let (grid, max_err) = compare_on_grid(&normalized, p_grid, |p1, p2| {
        qcst_analytic_amplitude(&psi_eval, p1, p2)
    });
    Ok(QcstVerificationReport {
        grid,
        max_amp_error: max_err,
        ancilla_reset_fidelity: fidelity,
        per_mode_dim,
        reliable: fidelity >= 0.9,
    })
}

fn normalize_branch(state: MultiModeState, weight: f64) -> Result<MultiModeState> {
    if weight <= 0.0 {
        return Err(QcstError::Degenerate("zero-weight projection branch".into()));
    }
    let scale = Complex64::new(1.0 / weight.sqrt(), 0.0);
    MultiModeState::from_raw(state.mode_dims().to_vec(), state.coeffs() * scale)
}

/// As `qcst_circuit_verify` but with the r-scaled gate coefficients of the
/// Gaussian-transform circuit; the ancilla reset is checked against the
/// squeezed vacuum |0, r⟩ and the amplitudes against (1/(2√π))⟨α, r|ψ⟩.
pub fn qgt_circuit_verify(
    psi: &FockState,
    r: f64,
    per_mode_dim: usize,
    p_grid: &[f64],
) -> Result<QcstVerificationReport> {
    if per_mode_dim < 16 {
        return Err(QcstError::InvalidDimension(
            "QGT verification needs per-mode dim >= 16".into(),
        ));
    }
    if r.abs() > 0.7 {
        return Err(QcstError::InvalidArgument(format!(
            "|r| = {} exceeds the truncation-safe envelope 0.7",
            r.abs()
        )));
    }
    let s2 = 2f64.sqrt();
    let (ep, em) = (r.exp(), (-r).exp());
    let gates = [
        GateSpec { g: ep / s2, quad_first: Quadrature::Q, quad_third: Quadrature::Q, ancilla: 0 },
        GateSpec { g: s2 * em, quad_first: Quadrature::Q, quad_third: Quadrature::P, ancilla: 1 },
        GateSpec { g: ep / s2, quad_first: Quadrature::Q, quad_third: Quadrature::Q, ancilla: 0 },
        GateSpec { g: em / (2.0 * s2), quad_first: Quadrature::P, quad_third: Quadrature::P, ancilla: 0 },
        GateSpec { g: -ep / s2, quad_first: Quadrature::P, quad_third: Quadrature::Q, ancilla: 1 },
        GateSpec { g: em / (2.0 * s2), quad_first: Quadrature::P, quad_third: Quadrature::P, ancilla: 0 },
    ];
    let final_state = run_circuit(psi, per_mode_dim, &gates)?;
    let sq = squeeze_matrix(Complex64::new(r, 0.0), per_mode_dim)?;
    let squeezed_vac = FockState::vacuum(per_mode_dim)?.apply(&sq)?;
    let (projected, fidelity) = project_mode(&final_state, 2, &squeezed_vac)?;
    let normalized = normalize_branch(projected, fidelity)?;

    // Reference amplitudes at a larger truncation so the squeezed coherent
    // bra is well represented.
    let ref_dim = (3 * per_mode_dim).max(96);
    let sq_ref = squeeze_matrix(Complex64::new(r, 0.0), ref_dim)?;
    let psi_ref = psi.resized(ref_dim)?;
    let (grid, max_err) = compare_on_grid(&normalized, p_grid, |p1, p2| {
        let alpha = Complex64::new(p1 / 2.0, p2 / 2.0);
        let coh = make_coherent(alpha, ref_dim).expect("reference coherent state");
        let bra = coh.apply(&sq_ref).expect("reference squeezed state");
        bra.overlap(&psi_ref) / Complex64::new(2.0 * PI.sqrt(), 0.0)
    });
    Ok(QcstVerificationReport {
        grid,
        max_amp_error: max_err,
        ancilla_reset_fidelity: fidelity,
        per_mode_dim,
        reliable: fidelity >= 0.9,
    })
}

/// Uniform grid from -extent to extent inclusive with the given step.
pub fn symmetric_grid(extent: f64, step: f64) -> Vec<f64> {
    let n = (2.0 * extent / step).round() as usize;
    (0..=n).map(|k| -extent + k as f64 * step).collect()
}

/// The non-Gaussian test state (|0⟩ + |4⟩)/2 + (i/√2)|2⟩ used throughout
/// the tomography experiments.
pub fn tomography_test_state(dim: usize) -> Result<FockState> {
    if dim < 5 {
        return Err(QcstError::InvalidDimension("test state needs dim >= 5".into()));
    }
    let mut c = CVec::zeros(dim);
    c[0] = Complex64::new(0.5, 0.0);
    c[2] = Complex64::new(0.0, 1.0 / 2f64.sqrt());
    c[4] = Complex64::new(0.5, 0.0);
    FockState::new(c)
}
