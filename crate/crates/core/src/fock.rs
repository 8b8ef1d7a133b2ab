//! Truncated Fock-space states, canonical operators and gates.
//!
//! All states are dense complex coefficient vectors over the number basis
//! |0⟩..|d-1⟩. Everything here is a pure function of its inputs; values are
//! immutable after construction and safe to share across threads.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcstError, Result};
use crate::linalg::{exp_i_hermitian, expm, CMat, CVec, C_I, C_ONE, C_ZERO};

/// Normalized pure state in a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    coeffs: CVec,
}

impl FockState {
    /// Builds a state from raw coefficients, normalizing them.
    pub fn new(coeffs: CVec) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(QcstError::InvalidDimension("state dimension must be >= 1".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(QcstError::NonFinite("state coefficients".into()));
        }
        let norm = coeffs.norm();
        if norm == 0.0 {
            return Err(QcstError::Degenerate("zero state vector".into()));
        }
        Ok(Self { coeffs: coeffs / Complex64::new(norm, 0.0) })
    }

    pub fn from_components(coeffs: &[Complex64]) -> Result<Self> {
        Self::new(CVec::from_row_slice(coeffs))
    }

    /// Number state |n⟩ at truncation `dim`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if dim == 0 || n >= dim {
            return Err(QcstError::InvalidDimension(format!(
                "|{n}> does not fit in dimension {dim}"
            )));
        }
        let mut c = CVec::zeros(dim);
        c[n] = C_ONE;
        Ok(Self { coeffs: c })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    /// ⟨self|other⟩, truncating the longer state if dims differ.
    pub fn overlap(&self, other: &FockState) -> Complex64 {
        let n = self.dim().min(other.dim());
        (0..n).map(|k| self.coeffs[k].conj() * other.coeffs[k]).sum()
    }

    /// ⟨n̂⟩.
    pub fn mean_photon_number(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Applies a d×d operator, renormalizing the result.
    pub fn apply(&self, op: &CMat) -> Result<Self> {
        if op.ncols() != self.dim() {
            return Err(QcstError::DimensionMismatch(format!(
                "operator is {}x{}, state dim {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Self::new(op * &self.coeffs)
    }

    /// Pads or truncates to `dim` and renormalizes.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let mut c = CVec::zeros(dim);
        for k in 0..dim.min(self.dim()) {
            c[k] = self.coeffs[k];
        }
        Self::new(c)
    }
}

/// Product-space state over several modes, row-major with mode 0 slowest.
///
/// The Fig.-1-style three-mode register is laid out top-to-bottom as modes
/// 0, 1, 2, with the signal state on mode 2. Post-projection states are
/// deliberately left unnormalized; `norm_sqr` gives the branch weight.
#[derive(Debug, Clone)]
pub struct MultiModeState {
    mode_dims: Vec<usize>,
    coeffs: CVec,
}

impl MultiModeState {
    pub fn product(modes: &[&FockState]) -> Result<Self> {
        if modes.is_empty() {
            return Err(QcstError::InvalidDimension("need at least one mode".into()));
        }
        let mut coeffs = CVec::from_element(1, C_ONE);
        let mut dims = Vec::with_capacity(modes.len());
        for m in modes {
            let mut next = CVec::zeros(coeffs.len() * m.dim());
            for (i, a) in coeffs.iter().enumerate() {
                for (j, b) in m.coeffs().iter().enumerate() {
                    next[i * m.dim() + j] = a * b;
                }
            }
            coeffs = next;
            dims.push(m.dim());
        }
        Ok(Self { mode_dims: dims, coeffs })
    }

    /// Wraps raw coefficients without normalizing.
    pub fn from_raw(mode_dims: Vec<usize>, coeffs: CVec) -> Result<Self> {
        let prod: usize = mode_dims.iter().product();
        if prod != coeffs.len() || mode_dims.is_empty() {
            return Err(QcstError::DimensionMismatch(format!(
                "mode dims {:?} do not match {} coefficients",
                mode_dims,
                coeffs.len()
            )));
        }
        Ok(Self { mode_dims, coeffs })
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn num_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.mode_dims.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.mode_dims[i + 1];
        }
        s
    }
}

/// Annihilation, position, momentum and number operators at truncation `dim`,
/// with â = (q̂ + i p̂)/√2.
pub struct CanonicalOps {
    pub a: CMat,
    pub q: CMat,
    pub p: CMat,
    pub n: CMat,
}

pub fn canonical_matrices(dim: usize) -> Result<CanonicalOps> {
    if dim < 2 {
        return Err(QcstError::InvalidDimension(format!(
            "canonical operators need dim >= 2, got {dim}"
        )));
    }
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let sqrt2 = Complex64::new(2f64.sqrt(), 0.0);
    let q = (&a + &adag) / sqrt2;
    let p = (&a - &adag) / (C_I * sqrt2);
    let n = &adag * &a;
    Ok(CanonicalOps { a, q, p, n })
}

/// Truncated coherent state c_n = e^{-|α|²/2} α^n/√n!, renormalized; also
/// returns the pre-normalization truncated-weight deficit.
pub fn coherent_with_deficit(alpha: Complex64, dim: usize) -> Result<(FockState, f64)> {
    if dim == 0 {
        return Err(QcstError::InvalidDimension("coherent state needs dim >= 1".into()));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(QcstError::NonFinite("coherent amplitude".into()));
    }
    if alpha.norm_sqr() > dim as f64 / 4.0 {
        log::warn!(
            "coherent(|alpha|^2 = {:.2}) at dim {} may be badly truncated",
            alpha.norm_sqr(),
            dim
        );
    }
    let mut c = CVec::zeros(dim);
    let pre = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut term = pre;
    c[0] = term;
    for n in 1..dim {
        term *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        c[n] = term;
    }
    let captured = c.norm_squared();
    let deficit = (1.0 - captured).max(0.0);
    Ok((FockState::new(c)?, deficit))
}

pub fn make_coherent(alpha: Complex64, dim: usize) -> Result<FockState> {
    coherent_with_deficit(alpha, dim).map(|(s, _)| s)
}

/// Displacement operator D(α) = exp(α a† − α* a).
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> Result<CMat> {
    if dim < 2 {
        return Err(QcstError::InvalidDimension(format!(
            "displacement needs dim >= 2, got {dim}"
        )));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(QcstError::NonFinite("displacement amplitude".into()));
    }
    let ops = canonical_matrices(dim)?;
    let gen = ops.a.adjoint() * alpha - &ops.a * alpha.conj();
    Ok(expm(&gen))
}

/// Squeezing operator S(ξ) = exp(½(ξ* a² − ξ a†²)).
pub fn squeeze_matrix(xi: Complex64, dim: usize) -> Result<CMat> {
    if dim < 4 {
        return Err(QcstError::InvalidDimension(format!(
            "squeeze needs dim >= 4, got {dim}"
        )));
    }
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(QcstError::NonFinite("squeeze parameter".into()));
    }
    if xi.norm() > 1.5 {
        log::warn!("squeeze |xi| = {:.2} beyond the documented envelope", xi.norm());
    }
    if xi == C_ZERO {
        return Ok(CMat::identity(dim, dim));
    }
    let ops = canonical_matrices(dim)?;
    let a2 = &ops.a * &ops.a;
    let half = Complex64::new(0.5, 0.0);
    let gen = (&a2 * xi.conj() - a2.adjoint() * xi) * half;
    Ok(expm(&gen))
}

/// Quadrature selector for SUM-type gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    Q,
    P,
}

/// Two-mode SUM-type gate exp(i g Quad_a ⊗ Quad_b) on the product space
/// (mode a slowest). Built by diagonalizing each quadrature, so the result
/// is unitary up to eigensolver accuracy even for large |g|·dim.
pub fn two_mode_sum_gate(
    g: f64,
    quad_a: Quadrature,
    quad_b: Quadrature,
    dim_a: usize,
    dim_b: usize,
) -> Result<CMat> {
    if dim_a < 2 || dim_b < 2 {
        return Err(QcstError::InvalidDimension(format!(
            "sum gate needs dims >= 2, got {dim_a}x{dim_b}"
        )));
    }
    if !g.is_finite() {
        return Err(QcstError::NonFinite("sum gate coefficient".into()));
    }
    let pick = |quad: Quadrature, dim: usize| -> Result<CMat> {
        let ops = canonical_matrices(dim)?;
        Ok(match quad {
            Quadrature::Q => ops.q,
            Quadrature::P => ops.p,
        })
    };
    let qa = pick(quad_a, dim_a)?;
    let qb = pick(quad_b, dim_b)?;
    let ea = qa.symmetric_eigen();
    let eb = qb.symmetric_eigen();
    let va_vb = ea.eigenvectors.kronecker(&eb.eigenvectors);
    let mut d = CVec::zeros(dim_a * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            let phase = g * ea.eigenvalues[i] * eb.eigenvalues[j];
            d[i * dim_b + j] = (C_I * Complex64::new(phase, 0.0)).exp();
        }
    }
    // U = (Va ⊗ Vb) diag(e^{i g λλ'}) (Va ⊗ Vb)†
    let mut right = va_vb.adjoint();
    for (k, mut row) in right.row_iter_mut().enumerate() {
        row *= d[k];
    }
    Ok(va_vb * right)
}

/// Applies a unitary on one or two target modes of a multimode state.
pub fn apply_to_modes(u: &CMat, state: &MultiModeState, modes: &[usize]) -> Result<MultiModeState> {
    if modes.is_empty() || modes.len() > 2 {
        return Err(QcstError::InvalidArgument(
            "apply_to_modes supports one or two target modes".into(),
        ));
    }
    let nm = state.num_modes();
    for &m in modes {
        if m >= nm {
            return Err(QcstError::ModeOutOfRange { index: m, modes: nm });
        }
    }
    if modes.len() == 2 && modes[0] == modes[1] {
        return Err(QcstError::InvalidArgument("duplicate target mode".into()));
    }
    let target_dim: usize = modes.iter().map(|&m| state.mode_dims[m]).product();
    if u.nrows() != target_dim || u.ncols() != target_dim {
        return Err(QcstError::DimensionMismatch(format!(
            "gate is {}x{}, target product dim {}",
            u.nrows(),
            u.ncols(),
            target_dim
        )));
    }

    let strides = state.strides();
    let spectators: Vec<usize> = (0..nm).filter(|m| !modes.contains(m)).collect();
    let spec_count: usize = spectators.iter().map(|&m| state.mode_dims[m]).product();

    // Enumerate all target-mode index combinations once.
    let mut target_offsets = Vec::with_capacity(target_dim);
    match modes {
        [m] => {
            for i in 0..state.mode_dims[*m] {
                target_offsets.push(i * strides[*m]);
            }
        }
        [m0, m1] => {
            for i in 0..state.mode_dims[*m0] {
                for j in 0..state.mode_dims[*m1] {
                    target_offsets.push(i * strides[*m0] + j * strides[*m1]);
                }
            }
        }
        _ => unreachable!(),
    }

    let mut out = state.coeffs.clone();
    let mut gathered = CVec::zeros(target_dim);
    for s in 0..spec_count {
        // Decompose spectator linear index into a base offset.
        let mut rem = s;
        let mut base = 0usize;
        for &m in spectators.iter().rev() {
            let d = state.mode_dims[m];
            base += (rem % d) * strides[m];
            rem /= d;
        }
        for (t, &off) in target_offsets.iter().enumerate() {
            gathered[t] = state.coeffs[base + off];
        }
        let transformed = u * &gathered;
        for (t, &off) in target_offsets.iter().enumerate() {
            out[base + off] = transformed[t];
        }
    }
    MultiModeState::from_raw(state.mode_dims.clone(), out)
}

/// Projects one mode onto ⟨bra|, returning the unnormalized state on the
/// remaining modes and the squared-norm branch weight.
///
/// Projecting the only mode returns a single-entry state on a trivial
/// 1-dimensional mode holding the scalar overlap; the weight carries the
/// probability either way.
pub fn project_mode(
    state: &MultiModeState,
    mode: usize,
    bra: &FockState,
) -> Result<(MultiModeState, f64)> {
    let nm = state.num_modes();
    if mode >= nm {
        return Err(QcstError::ModeOutOfRange { index: mode, modes: nm });
    }
    if bra.dim() != state.mode_dims[mode] {
        return Err(QcstError::DimensionMismatch(format!(
            "bra dim {} vs mode dim {}",
            bra.dim(),
            state.mode_dims[mode]
        )));
    }
    let strides = state.strides();
    let rest_dims: Vec<usize> = if nm == 1 {
        vec![1]
    } else {
        (0..nm).filter(|&m| m != mode).map(|m| state.mode_dims[m]).collect()
    };
    let rest_count: usize = rest_dims.iter().product();
    let mut out = CVec::zeros(rest_count);
    let rest_modes: Vec<usize> = (0..nm).filter(|&m| m != mode).collect();
    for r in 0..rest_count {
        let mut rem = r;
        let mut base = 0usize;
        for &m in rest_modes.iter().rev() {
            let d = state.mode_dims[m];
            base += (rem % d) * strides[m];
            rem /= d;
        }
        let mut acc = C_ZERO;
        for n in 0..bra.dim() {
            acc += bra.coeffs()[n].conj() * state.coeffs[base + n * strides[mode]];
        }
        out[r] = acc;
    }
    let weight = out.norm_squared();
    Ok((MultiModeState::from_raw(rest_dims, out)?, weight))
}

/// Hermite functions φ_0..φ_{nmax-1} at point x, by the stable recurrence
/// φ_n = √(2/n) x φ_{n-1} − √((n−1)/n) φ_{n-2}, φ_0 = π^{-1/4} e^{-x²/2}.
pub fn hermite_functions(x: f64, nmax: usize) -> Vec<f64> {
    let mut phi = vec![0.0; nmax];
    if nmax == 0 {
        return phi;
    }
    phi[0] = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if nmax > 1 {
        phi[1] = 2f64.sqrt() * x * phi[0];
    }
    for n in 2..nmax {
        let nf = n as f64;
        phi[n] = (2.0 / nf).sqrt() * x * phi[n - 1] - ((nf - 1.0) / nf).sqrt() * phi[n - 2];
    }
    phi
}

/// Momentum-basis wavefunction ψ(p) = Σ_n c_n (−i)^n φ_n(p) on a grid.
///
/// The (−i)^n phase makes the vacuum π^{-1/4} e^{-p²/2} and matches the
/// Fourier transform of the position wavefunction (checked in tests rather
/// than assumed).
pub fn momentum_wavefunction(state: &FockState, p_grid: &[f64]) -> Result<Vec<Complex64>> {
    if p_grid.is_empty() {
        return Err(QcstError::InvalidArgument("empty momentum grid".into()));
    }
    if p_grid.iter().any(|p| !p.is_finite()) {
        return Err(QcstError::NonFinite("momentum grid".into()));
    }
    let d = state.dim();
    let phases: Vec<Complex64> = (0..d)
        .scan(C_ONE, |acc, _| {
            let out = *acc;
            *acc *= -C_I;
            Some(out)
        })
        .collect();
    Ok(p_grid
        .iter()
        .map(|&p| {
            let phi = hermite_functions(p, d);
            (0..d)
                .map(|n| state.coeffs()[n] * phases[n] * Complex64::new(phi[n], 0.0))
                .sum()
        })
        .collect())
}

/// Builds exp(i g H) for a hermitian operator, used where the generator is
/// known hermitian and eigendecomposition is cheaper or more stable.
pub fn unitary_from_hermitian(h: &CMat, g: f64) -> CMat {
    exp_i_hermitian(h, g)
}
