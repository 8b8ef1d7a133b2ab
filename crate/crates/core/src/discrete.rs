//! DV-ancilla machinery: window registers, the momentum-eigenbasis
//! measurement distribution, array-controlled-displacement (ACD) gate
//! algebra, the discrete QCST amplitude grid and its transfer error.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcstError, Result};
use crate::fock::{displacement_matrix, momentum_wavefunction, FockState};
use crate::linalg::{CMat, C_ONE, C_ZERO};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Unf,
    Sin,
    Custom,
}

/// DV register of size N (a power of two) with grid spacing λ and window
/// coefficients {c_j}, Σ|c_j|² = 1.
#[derive(Debug, Clone)]
pub struct WindowRegister {
    n: usize,
    lambda: f64,
    c: Vec<Complex64>,
    kind: WindowKind,
}

impl WindowRegister {
    pub fn custom(c: Vec<Complex64>, lambda: f64) -> Result<Self> {
        check_size(c.len())?;
        check_lambda(lambda)?;
        let norm_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(QcstError::InvalidArgument(format!(
                "window coefficients have squared norm {norm_sq}, expected 1"
            )));
        }
        Ok(Self { n: c.len(), lambda, c, kind: WindowKind::Custom })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.c
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// Position grid value q_j = (j − (N−1)/2) λ.
    pub fn q(&self, j: usize) -> f64 {
        (j as f64 - (self.n as f64 - 1.0) / 2.0) * self.lambda
    }

    /// Momentum grid value p_j = (π/(Nλ))[((j + N/2) mod N) − N/2].
    pub fn p(&self, j: usize) -> f64 {
        PI / (self.n as f64 * self.lambda) * wrap_index(j, self.n) as f64
    }

    /// Momentum value a readout outcome j maps back to: the phase kernel
    /// peaks where λp ≡ 2πj/N, so p̂_j = (2π/(Nλ))·wrapped(j), twice the
    /// displacement grid value `p(j)`.
    pub fn p_estimate(&self, j: usize) -> f64 {
        2.0 * PI / (self.n as f64 * self.lambda) * wrap_index(j, self.n) as f64
    }
}

/// Maps j to the signed wrapped index ((j + N/2) mod N) − N/2.
pub fn wrap_index(j: usize, n: usize) -> i64 {
    ((j + n / 2) % n) as i64 - (n / 2) as i64
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(QcstError::InvalidDimension(format!(
            "window size must be a power of two >= 2, got {n}"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(QcstError::InvalidArgument(format!(
            "grid spacing must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Builds the uniform (c_j = 1/√N) or sine
/// (c_j = √(2/(N+1)) sin((j+1)π/(N+1))) window.
pub fn make_window(kind: WindowKind, n: usize, lambda: f64) -> Result<WindowRegister> {
    check_size(n)?;
    check_lambda(lambda)?;
    let c: Vec<Complex64> = match kind {
        WindowKind::Unf => {
            let v = 1.0 / (n as f64).sqrt();
            vec![Complex64::new(v, 0.0); n]
        }
        WindowKind::Sin => {
            let norm = (2.0 / (n as f64 + 1.0)).sqrt();
            (0..n)
                .map(|j| {
                    Complex64::new(norm * ((j as f64 + 1.0) * PI / (n as f64 + 1.0)).sin(), 0.0)
                })
                .collect()
        }
        WindowKind::Custom => {
            return Err(QcstError::InvalidArgument(
                "use WindowRegister::custom for custom coefficients".into(),
            ))
        }
    };
    // Renormalize against rounding in the sine formula.
    let norm_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let scale = Complex64::new(1.0 / norm_sq.sqrt(), 0.0);
    let c = c.into_iter().map(|z| z * scale).collect();
    Ok(WindowRegister { n, lambda, c, kind })
}

/// The spectral kernel (1/N)|Σ_{j'} c_{j'} e^{−2πi j' Δp}|².
pub fn window_spectrum(w: &WindowRegister, dp: f64) -> f64 {
    let s: Complex64 = w
        .c
        .iter()
        .enumerate()
        .map(|(j, c)| c * Complex64::from_polar(1.0, -2.0 * PI * j as f64 * dp))
        .sum();
    s.norm_sqr() / w.n as f64
}

/// Measurement distribution of a QPE readout with a pointlike phase kick:
/// Pr(j) = (1/N)|Σ_{j'} c_{j'} e^{i j'(φ − 2πj/N)}|².
pub fn window_phase_distribution(w: &WindowRegister, phase_per_index: f64) -> Vec<f64> {
    let n = w.n;
    (0..n)
        .map(|j| {
            let arg = phase_per_index - 2.0 * PI * j as f64 / n as f64;
            let s: Complex64 = w
                .c
                .iter()
                .enumerate()
                .map(|(jp, c)| c * Complex64::from_polar(1.0, jp as f64 * arg))
                .sum();
            s.norm_sqr() / n as f64
        })
        .collect()
}

/// Measurement distribution of the ACD + inverse-QFT momentum readout:
/// Pr(j) = (1/N)∫|Σ_{j'} c_{j'} e^{i j'(λp − 2πj/N)}|² |ψ(p)|² dp,
/// by quadrature on [−P, P] with P = max(8, 4√(2⟨n̂⟩+1)).
pub fn momentum_measure_distribution(psi: &FockState, w: &WindowRegister) -> Result<Vec<f64>> {
    let p_max = 8.0f64.max(4.0 * (2.0 * psi.mean_photon_number() + 1.0).sqrt());
    let step = 0.005;
    let count = (2.0 * p_max / step).ceil() as usize;
    let grid: Vec<f64> = (0..=count).map(|k| -p_max + k as f64 * step).collect();
    let wave = momentum_wavefunction(psi, &grid)?;
    let tail = wave.first().unwrap().norm_sqr().max(wave.last().unwrap().norm_sqr());
    if tail > 1e-10 {
        return Err(QcstError::InvalidArgument(format!(
            "quadrature window [-{p_max}, {p_max}] too small: |psi(±P)|² = {tail:.3e}"
        )));
    }
    let n = w.n;
    let mut pr = vec![0.0; n];
    for (k, &p) in grid.iter().enumerate() {
        let weight = if k == 0 || k == count { 0.5 } else { 1.0 };
        let density = wave[k].norm_sqr() * weight * step;
        if density == 0.0 {
            continue;
        }
        let kernel = window_phase_distribution(w, w.lambda * p);
        for j in 0..n {
            pr[j] += kernel[j] * density;
        }
    }
    Ok(pr)
}

/// Array controlled displacement Σ_j |j⟩⟨j| ⊗ D(step·g(j)) on the
/// N·osc_dim product space, with g(j) = j − (N−1)/2 (plain) or the
/// wrapped index (starred).
pub fn acd_matrix(
    n: usize,
    alpha_step: Complex64,
    osc_dim: usize,
    starred: bool,
) -> Result<CMat> {
    if n < 1 || !n.is_power_of_two() {
        return Err(QcstError::InvalidDimension(format!(
            "ACD register size must be a power of two, got {n}"
        )));
    }
    let total = n * osc_dim;
    let mut out = CMat::zeros(total, total);
    for j in 0..n {
        let g = if starred {
            wrap_index(j, n) as f64
        } else {
            j as f64 - (n as f64 - 1.0) / 2.0
        };
        let d = displacement_matrix(alpha_step * g, osc_dim)?;
        out.view_mut((j * osc_dim, j * osc_dim), (osc_dim, osc_dim)).copy_from(&d);
    }
    Ok(out)
}

/// Builds the plain ACD from per-qubit conditional displacements
/// D_c(α) = e^{−σ_z(α a† − α* a)} with binary scales 2^{n−2}α … 2^0 α,
/// 2^{−1}α, and returns the max entrywise deviation from `acd_matrix`.
pub fn acd_decompose_verify(n: usize, alpha_step: Complex64, osc_dim: usize) -> Result<f64> {
    if !matches!(n, 2 | 4 | 8) {
        return Err(QcstError::InvalidDimension(format!(
            "decomposition check supports N in {{2, 4, 8}}, got {n}"
        )));
    }
    let n_qubits = n.trailing_zeros() as usize;
    let total = n * osc_dim;
    let mut product = CMat::identity(total, total);
    for qubit in 0..n_qubits {
        // Scale 2^{n_qubits-2-qubit}; the last qubit carries 2^{-1}.
        let scale = 2f64.powi(n_qubits as i32 - 2 - qubit as i32);
        let d_plus = displacement_matrix(alpha_step * scale, osc_dim)?;
        let d_minus = displacement_matrix(-alpha_step * scale, osc_dim)?;
        let mut gate = CMat::zeros(total, total);
        for j in 0..n {
            // Bit `qubit` of j in MSB-first order; σ_z = +1 on |0⟩ gives D(−α).
            let bit = (j >> (n_qubits - 1 - qubit)) & 1;
            let block = if bit == 1 { &d_plus } else { &d_minus };
            gate.view_mut((j * osc_dim, j * osc_dim), (osc_dim, osc_dim)).copy_from(block);
        }
        product = &gate * &product;
    }
    let reference = acd_matrix(n, alpha_step, osc_dim, false)?;
    Ok(crate::linalg::max_abs_diff(&product, &reference))
}

/// Discrete QCST coefficient grid A(j,k).
#[derive(Debug, Clone)]
pub struct AmplitudeGrid {
    pub n: usize,
    pub lambda: f64,
    /// Row-major over (j, k) in circuit index order; display remapping of
    /// the upper half to negative indices is an output-layer concern.
    pub amps: Vec<Complex64>,
}

impl AmplitudeGrid {
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.amps[j * self.n + k]
    }

    /// Σ|A|² by pairwise summation (reproducible independent of threading).
    pub fn total_weight(&self) -> f64 {
        fn pairwise(v: &[f64]) -> f64 {
            match v.len() {
                0 => 0.0,
                1 => v[0],
                len => {
                    let (a, b) = v.split_at(len / 2);
                    pairwise(a) + pairwise(b)
                }
            }
        }
        let sq: Vec<f64> = self.amps.iter().map(|z| z.norm_sqr()).collect();
        pairwise(&sq)
    }

    /// CSV rows `j,k,p_j,p_k,re,im,abs2`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["j", "k", "p_j", "p_k", "re", "im", "abs2"])?;
        let w = WindowRegister {
            n: self.n,
            lambda: self.lambda,
            c: vec![C_ZERO; self.n],
            kind: WindowKind::Custom,
        };
        for j in 0..self.n {
            for k in 0..self.n {
                let a = self.at(j, k);
                wtr.write_record([
                    j.to_string(),
                    k.to_string(),
                    format!("{}", w.p(j)),
                    format!("{}", w.p(k)),
                    format!("{}", a.re),
                    format!("{}", a.im),
                    format!("{}", a.norm_sqr()),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// ⟨0|D(c)|ψ⟩ = e^{−|c|²/2} Σ_n ψ_n (−c*)^n/√n!, truncation-free.
fn vacuum_displaced_overlap(psi: &[Complex64], c: Complex64) -> Complex64 {
    let envelope = (-c.norm_sqr() / 2.0).exp();
    let base = -c.conj();
    let mut power = C_ONE;
    let mut acc = C_ZERO;
    let mut inv_sqrt_fact = 1.0;
    for (n, amp) in psi.iter().enumerate() {
        if n > 0 {
            power *= base;
            inv_sqrt_fact /= (n as f64).sqrt();
        }
        acc += amp * power * Complex64::new(inv_sqrt_fact, 0.0);
    }
    acc * Complex64::new(envelope, 0.0)
}

/// Analytic discrete QCST amplitudes
/// A(j,k) = (1/N)Σ_{j',k'} c_{j'} c_{k'} ⟨0|D(q_{j'}+iq_{k'}) D(p_j+ip_k)|ψ⟩,
/// evaluated through the displacement composition law so no Fock truncation
/// enters. O(N⁴·Γ) with the support Γ of ψ.
pub fn discrete_qcst_amplitudes(psi: &FockState, w: &WindowRegister) -> Result<AmplitudeGrid> {
    let support = psi.coeffs().len();
    if support > 64 {
        return Err(QcstError::InvalidDimension(format!(
            "analytic path supports Fock support <= 64, got {support}"
        )));
    }
    let coeffs: Vec<Complex64> = psi.coeffs().iter().copied().collect();
    let n = w.size();
    let q: Vec<f64> = (0..n).map(|j| w.q(j)).collect();
    let p: Vec<f64> = (0..n).map(|j| w.p(j)).collect();
    let inv_n = 1.0 / n as f64;

    let mut amps = vec![C_ZERO; n * n];
    for j in 0..n {
        for k in 0..n {
            let b = Complex64::new(p[j], p[k]);
            let mut acc = C_ZERO;
            for jp in 0..n {
                for kp in 0..n {
                    let a = Complex64::new(q[jp], q[kp]);
                    // D(a)D(b) = e^{i Im(a b̄)} D(a+b)
                    let phase = q[kp] * p[j] - q[jp] * p[k];
                    let f = vacuum_displaced_overlap(&coeffs, a + b);
                    acc += w.c[jp] * w.c[kp] * Complex64::from_polar(1.0, phase) * f;
                }
            }
            // The centered position grid q_j = (j − (N−1)/2)λ shifts the
            // register QFT phases by e^{iλ(N−1)p_j} per outcome index;
            // include it so this path matches the circuit exactly.
            let grid_phase = Complex64::from_polar(1.0, w.lambda * (n as f64 - 1.0) * (p[j] + p[k]));
            amps[j * n + k] = acc * grid_phase * inv_n;
        }
    }
    Ok(AmplitudeGrid { n, lambda: w.lambda(), amps })
}

/// Transfer error ε = 1 − Σ_{j,k}|A(j,k)|².
pub fn discrete_qcst_error(psi: &FockState, w: &WindowRegister) -> Result<f64> {
    let grid = discrete_qcst_amplitudes(psi, w)?;
    Ok((1.0 - grid.total_weight()).clamp(0.0, 1.0))
}

/// Brute-force Fock-matrix oracle for the discrete QCST: simulates the
/// DV⊗DV⊗CV circuit (block displacements, QFT on both registers, block
/// displacements, vacuum projection) with truncated displacement matrices.
/// Small N only; this is the independent reference for the analytic path.
pub fn fock_oracle_amplitudes(
    psi: &FockState,
    w: &WindowRegister,
    osc_dim: usize,
) -> Result<AmplitudeGrid> {
    let n = w.size();
    if n > 8 {
        return Err(QcstError::InvalidDimension(format!(
            "oracle limited to N <= 8, got {n}"
        )));
    }
    let signal = psi.resized(osc_dim)?;

    // Block (j,k) holds an oscillator vector; start at c_j c_k |ψ⟩ and
    // apply D(−q_k + i q_j) blockwise (first three ACD gates).
    let mut blocks: Vec<crate::linalg::CVec> = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let d = displacement_matrix(Complex64::new(-w.q(k), w.q(j)), osc_dim)?;
            blocks.push(&d * signal.coeffs() * (w.c[j] * w.c[k]));
        }
    }

    // QFT on both registers: out(j,k) = (1/N) Σ_{j',k'} e^{2πi(jj'+kk')/N} in(j',k').
    let omega = |a: usize, b: usize| {
        Complex64::from_polar(1.0, 2.0 * PI * (a * b % n) as f64 / n as f64)
    };
    let mut transformed: Vec<crate::linalg::CVec> = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = crate::linalg::CVec::zeros(osc_dim);
            for jp in 0..n {
                for kp in 0..n {
                    acc += &blocks[jp * n + kp] * (omega(j, jp) * omega(k, kp));
                }
            }
            transformed.push(acc / Complex64::new(n as f64, 0.0));
        }
    }

    // Final three (starred) ACD gates: D(p_j + i p_k) per block, then
    // project the oscillator on vacuum.
    let mut amps = vec![C_ZERO; n * n];
    for j in 0..n {
        for k in 0..n {
            let d = displacement_matrix(Complex64::new(w.p(j), w.p(k)), osc_dim)?;
            let v = &d * &transformed[j * n + k];
            amps[j * n + k] = v[0];
        }
    }
    Ok(AmplitudeGrid { n, lambda: w.lambda(), amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::linalg::default_edge;

    #[test]
    fn window_construction() {
        let unf = make_window(WindowKind::Unf, 4, 0.5).unwrap();
        for c in unf.coefficients() {
            assert_abs_diff_eq!(c.re, 0.5, epsilon = 1e-15);
        }
        let sin = make_window(WindowKind::Sin, 8, 0.5).unwrap();
        let total: f64 = sin.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);

        assert!(make_window(WindowKind::Unf, 3, 0.5).is_err());
        assert!(make_window(WindowKind::Unf, 4, 0.0).is_err());
        assert!(make_window(WindowKind::Unf, 4, -1.0).is_err());
    }

    #[test]
    fn spectrum_peak_and_period() {
        let unf = make_window(WindowKind::Unf, 8, 0.5).unwrap();
        assert_abs_diff_eq!(window_spectrum(&unf, 0.0), 1.0, epsilon = 1e-12);
        for &dp in &[0.13, -0.4, 0.77] {
            assert_abs_diff_eq!(
                window_spectrum(&unf, dp),
                window_spectrum(&unf, dp + 1.0),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn spectrum_mass_identity() {
        // N × ∫ over one period = Σ|c|² = 1 for any window.
        for kind in [WindowKind::Unf, WindowKind::Sin] {
            let w = make_window(kind, 8, 0.5).unwrap();
            let steps = 20_000;
            let mut integral = 0.0;
            for k in 0..steps {
                let dp = (k as f64 + 0.5) / steps as f64;
                integral += window_spectrum(&w, dp) / steps as f64;
            }
            assert_abs_diff_eq!(integral * w.size() as f64, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn phase_distribution_exact_bins() {
        let unf = make_window(WindowKind::Unf, 8, 0.5).unwrap();
        let pr0 = window_phase_distribution(&unf, 0.0);
        assert_abs_diff_eq!(pr0[0], 1.0, epsilon = 1e-12);
        for j in 1..8 {
            assert!(pr0[j] < 1e-12);
        }
        let pr3 = window_phase_distribution(&unf, 2.0 * PI * 3.0 / 8.0);
        assert_abs_diff_eq!(pr3[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_distribution_normalized() {
        for kind in [WindowKind::Unf, WindowKind::Sin] {
            let w = make_window(kind, 16, 0.3).unwrap();
            for &phase in &[0.0, 0.37, 2.5, -1.1] {
                let pr = window_phase_distribution(&w, phase);
                let total: f64 = pr.iter().sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
                assert!(pr.iter().all(|&x| x >= -1e-12));
            }
        }
    }

    #[test]
    fn phase_distribution_parseval() {
        // The distribution is the N-point discrete Fourier power of the window.
        let w = make_window(WindowKind::Sin, 16, 0.3).unwrap();
        let pr = window_phase_distribution(&w, 0.0);
        let total: f64 = pr.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn momentum_distribution_vacuum() {
        let psi = FockState::vacuum(16).unwrap();
        let w = make_window(WindowKind::Sin, 64, 0.25).unwrap();
        let pr = momentum_measure_distribution(&psi, &w).unwrap();
        let total: f64 = pr.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-4);

        // Mapped estimates concentrate near p = 0 with std ≈ 1/√2.
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        for (j, &prob) in pr.iter().enumerate() {
            let p = w.p_estimate(j);
            mean += p * prob;
            mean_sq += p * p * prob;
        }
        let std = (mean_sq - mean * mean).sqrt();
        let want = 1.0 / 2f64.sqrt();
        assert!((std - want).abs() / want < 0.15, "std {std}");
    }

    #[test]
    fn unf_tail_heavier_than_sin() {
        let psi = FockState::vacuum(16).unwrap();
        let unf = make_window(WindowKind::Unf, 8, 0.25).unwrap();
        let sin = make_window(WindowKind::Sin, 8, 0.25).unwrap();
        let pr_unf = momentum_measure_distribution(&psi, &unf).unwrap();
        let pr_sin = momentum_measure_distribution(&psi, &sin).unwrap();
        // Outer half of the bins by |wrapped index|.
        let outer_mass = |pr: &[f64]| -> f64 {
            pr.iter()
                .enumerate()
                .filter(|(j, _)| wrap_index(*j, 8).unsigned_abs() as usize >= 2)
                .map(|(_, &x)| x)
                .sum()
        };
        assert!(outer_mass(&pr_unf) > outer_mass(&pr_sin));
    }

    #[test]
    fn acd_small_cases() {
        let id = acd_matrix(1, Complex64::new(0.3, 0.1), 8, false).unwrap();
        assert!(crate::linalg::max_abs_diff(&id, &CMat::identity(8, 8)) < 1e-12);

        let s = Complex64::new(0.4, -0.2);
        let two = acd_matrix(2, s, 32, false).unwrap();
        let d_minus = displacement_matrix(-s * 0.5, 32).unwrap();
        let d_plus = displacement_matrix(s * 0.5, 32).unwrap();
        assert!(
            crate::linalg::max_abs_diff(&two.view((0, 0), (32, 32)).into(), &d_minus) < 1e-12
        );
        assert!(
            crate::linalg::max_abs_diff(&two.view((32, 32), (32, 32)).into(), &d_plus) < 1e-12
        );

        assert!(acd_matrix(3, s, 8, false).is_err());
        let u = acd_matrix(4, Complex64::new(0.2, 0.0), 32, false).unwrap();
        assert!(crate::linalg::unitarity_error(&u, 4 * default_edge(32)) < 1e-7);
    }

    #[test]
    fn acd_decomposition_matches() {
        let s = Complex64::new(0.21, -0.13);
        assert!(acd_decompose_verify(2, s, 32).unwrap() < 1e-10);
        assert!(acd_decompose_verify(4, s, 32).unwrap() < 1e-8);
        assert!(acd_decompose_verify(8, s, 48).unwrap() < 1e-8);
    }

    #[test]
    fn discrete_amplitudes_subnormalized() {
        let psi = crate::qcst::tomography_test_state(5).unwrap();
        let w = make_window(WindowKind::Sin, 8, 0.4).unwrap();
        let grid = discrete_qcst_amplitudes(&psi, &w).unwrap();
        let total = grid.total_weight();
        assert!(total <= 1.0 + 1e-9, "total {total}");
        let eps = discrete_qcst_error(&psi, &w).unwrap();
        assert_abs_diff_eq!(eps, 1.0 - total, epsilon = 1e-12);
    }

    #[test]
    fn analytic_matches_fock_oracle_vacuum() {
        let psi = FockState::vacuum(4).unwrap();
        let w = make_window(WindowKind::Sin, 8, 0.4).unwrap();
        let analytic = discrete_qcst_amplitudes(&psi, &w).unwrap();
        let oracle = fock_oracle_amplitudes(&psi, &w, 64).unwrap();
        let max_dev: f64 = analytic
            .amps
            .iter()
            .zip(&oracle.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-6, "max deviation {max_dev}");
    }
}
