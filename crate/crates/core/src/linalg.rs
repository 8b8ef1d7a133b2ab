//! Dense complex linear algebra helpers: matrix exponential, hermitian
//! exponentials via eigendecomposition, Kronecker products and tolerance
//! checks with truncation-edge exclusion.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// 1-norm (max column sum of absolute values).
fn one_norm(a: &CMat) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        if s > max {
            max = s;
        }
    }
    max
}

fn pade_uv(a: &CMat, coeffs: &[f64]) -> (CMat, CMat) {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let a2 = a * a;
    // Even/odd split: U = A * sum b_{2k+1} A^{2k}, V = sum b_{2k} A^{2k}.
    let mut even = &id * Complex64::new(coeffs[0], 0.0);
    let mut odd = &id * Complex64::new(coeffs[1], 0.0);
    let mut pow = id.clone();
    let mut k = 2;
    while k < coeffs.len() {
        pow = &pow * &a2;
        even += &pow * Complex64::new(coeffs[k], 0.0);
        if k + 1 < coeffs.len() {
            odd += &pow * Complex64::new(coeffs[k + 1], 0.0);
        }
        k += 2;
    }
    (a * odd, even)
}

/// Matrix exponential by Padé approximation with scaling and squaring
/// (Higham 2005). Deterministic: no iterative refinement.
pub fn expm(a: &CMat) -> CMat {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.nrows();
    let norm = one_norm(a);

    const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
    const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
    const B7: [f64; 8] = [
        17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1512.0, 56.0, 1.0,
    ];
    const B9: [f64; 10] = [
        17_643_225_600.0,
        8_821_612_800.0,
        2_075_673_600.0,
        302_702_400.0,
        30_270_240.0,
        2_162_160.0,
        110_880.0,
        3960.0,
        90.0,
        1.0,
    ];
    const B13: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    const THETA: [(f64, usize); 4] = [
        (1.495_585_217_958_292e-2, 3),
        (2.539_398_330_063_23e-1, 5),
        (9.504_178_996_162_932e-1, 7),
        (2.097_847_961_257_068, 9),
    ];
    const THETA13: f64 = 5.371_920_351_148_152;

    for &(theta, deg) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_uv(a, coeffs);
            return solve_pade(u, v);
        }
    }

    let s = ((norm / THETA13).log2().ceil().max(0.0)) as u32;
    let scaled = a * Complex64::new(2f64.powi(-(s as i32)), 0.0);
    let (u, v) = pade_uv(&scaled, &B13);
    let mut r = solve_pade(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    debug_assert_eq!(r.nrows(), n);
    r
}

fn solve_pade(u: CMat, v: CMat) -> CMat {
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Pade denominator is singular")
}

/// exp(i * g * H) for hermitian H, via eigendecomposition. Exact unitarity
/// up to the eigensolver's accuracy, preferable to Pade for large ‖gH‖.
pub fn exp_i_hermitian(h: &CMat, g: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut d = CMat::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = (C_I * Complex64::new(g * eig.eigenvalues[k], 0.0)).exp();
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// max |a_ij - b_ij|.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// ‖U†U − I‖_max restricted to the sub-block excluding the top `edge` levels.
pub fn unitarity_error(u: &CMat, edge: usize) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let keep = n.saturating_sub(edge);
    let mut max = 0.0f64;
    for i in 0..keep {
        for j in 0..keep {
            let target = if i == j { C_ONE } else { C_ZERO };
            let d = (g[(i, j)] - target).norm();
            if d > max {
                max = d;
            }
        }
    }
    max
}

/// Default edge-block exclusion: the top ⌈d/8⌉ truncation levels.
pub fn default_edge(dim: usize) -> usize {
    dim.div_ceil(8)
}
