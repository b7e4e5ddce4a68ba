//! Small dense linear-algebra helpers shared by the model modules.

use nalgebra::DMatrix;

/// Companion matrix of the AR polynomial `z^p - phi_1 z^{p-1} - ... - phi_p`.
///
/// Its eigenvalues are the characteristic roots of the recursion
/// `X_n = sum_i phi_i X_{n-i}`.
pub(crate) fn companion(phi: &[f64]) -> DMatrix<f64> {
    let p = phi.len();
    let mut m = DMatrix::zeros(p, p);
    for (i, &c) in phi.iter().enumerate() {
        m[(0, i)] = c;
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    m
}

/// Largest modulus among the AR characteristic roots (0 when `phi` is empty).
pub(crate) fn max_root_modulus(phi: &[f64]) -> f64 {
    if phi.is_empty() {
        return 0.0;
    }
    companion(phi)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Solves the discrete Lyapunov equation `P = T P T' + Q` by vectorization.
///
/// Valid when the spectral radius of `T` is strictly below one.
pub(crate) fn discrete_lyapunov(t: &DMatrix<f64>, q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let m = t.nrows();
    let n = m * m;
    // (I - T (x) T) vec(P) = vec(Q), with vec stacking columns.
    let mut a = DMatrix::zeros(n, n);
    for col_j in 0..m {
        for row_i in 0..m {
            let r = col_j * m + row_i;
            for col_l in 0..m {
                for row_k in 0..m {
                    let c = col_l * m + row_k;
                    let kron = t[(row_i, row_k)] * t[(col_j, col_l)];
                    a[(r, c)] = if r == c { 1.0 - kron } else { -kron };
                }
            }
        }
    }
    let b = DMatrix::from_fn(n, 1, |r, _| q[(r % m, r / m)]);
    let sol = a.lu().solve(&b)?;
    Some(DMatrix::from_fn(m, m, |i, j| sol[(j * m + i, 0)]))
}

/// Truncated Cauchy product of two power series, keeping orders `0..=k_max`.
pub(crate) fn series_mul(a: &[f64], b: &[f64], k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    for (i, &ai) in a.iter().enumerate().take(k_max + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(k_max + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Full product of two polynomials given by their coefficient lists.
pub(crate) fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}
