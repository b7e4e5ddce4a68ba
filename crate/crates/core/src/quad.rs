//! Adaptive Gauss-Kronrod quadrature for smooth matrix-valued integrands.

// node/weight tables carry their full published digits
#![allow(clippy::excessive_precision)]

use nalgebra::Matrix2;

// Kronrod 15-point nodes on [0, 1] half-axis with their weights, plus the
// embedded Gauss 7-point weights on the shared nodes (odd indices).
const XK: [f64; 8] = [
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const WK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

fn kronrod_pair<F: Fn(f64) -> Matrix2<f64>>(f: &F, a: f64, b: f64) -> (Matrix2<f64>, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut k = Matrix2::zeros();
    let mut g = Matrix2::zeros();
    let f_mid = f(mid);
    k += WK[0] * f_mid;
    g += WG[0] * f_mid;
    for i in 1..8 {
        let dx = half * XK[i];
        let pair = f(mid - dx) + f(mid + dx);
        k += WK[i] * pair;
        if i % 2 == 0 {
            g += WG[i / 2] * pair;
        }
    }
    k *= half;
    g *= half;
    let err = (k - g).abs().max();
    (k, err)
}

/// Integrates a smooth `Matrix2`-valued function over `[a, b]` to absolute
/// tolerance `tol` by bisecting wherever the embedded Gauss estimate
/// disagrees with the Kronrod one.
pub(crate) fn integrate_matrix<F: Fn(f64) -> Matrix2<f64>>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Matrix2<f64> {
    fn recurse<F: Fn(f64) -> Matrix2<f64>>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Matrix2<f64> {
        let (value, err) = kronrod_pair(f, a, b);
        if err <= tol || depth >= 30 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1) + recurse(f, mid, b, 0.5 * tol, depth + 1)
    }
    recurse(f, a, b, tol, 0)
}
