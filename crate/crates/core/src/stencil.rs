//! Finite-difference and cell-quadrature rules on log-uniform grids.
//!
//! With `t = ln r` the radial Laplacian in `R^n` reads
//! `Δw = r^{-2} (w_tt + (n - 2) w_t)`.

/// Fourth-order central differences `(w_t, w_tt)` at interior node `j`
/// (needs `2 <= j < len - 2`).
pub fn log_derivatives(values: &[f64], h: f64, j: usize) -> (f64, f64) {
    let (a, b, c, d, e) = (values[j - 2], values[j - 1], values[j], values[j + 1], values[j + 2]);
    let wt = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
    let wtt = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
    (wt, wtt)
}

/// Radial Laplacian at every node with a full stencil; `None` within two
/// nodes of either end.
pub fn radial_laplacian(values: &[f64], radii: &[f64], h: f64, n: u32) -> Vec<Option<f64>> {
    let len = values.len();
    let dim = f64::from(n);
    (0..len)
        .map(|j| {
            if j < 2 || j + 2 >= len {
                return None;
            }
            let (wt, wtt) = log_derivatives(values, h, j);
            Some((wtt + (dim - 2.0) * wt) / (radii[j] * radii[j]))
        })
        .collect()
}

/// Integrals of a smooth function over each grid cell `[t_j, t_{j+1}]`
/// from its node values, by four-point rules (exact for cubics).
pub fn cell_integrals(g: &[f64], h: f64) -> Vec<f64> {
    let len = g.len();
    assert!(len >= 4, "cell_integrals needs at least four nodes");
    let c = h / 24.0;
    let mut out = Vec::with_capacity(len - 1);
    out.push(c * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]));
    for j in 1..len - 2 {
        out.push(c * (-g[j - 1] + 13.0 * g[j] + 13.0 * g[j + 1] - g[j + 2]));
    }
    out.push(c * (g[len - 4] - 5.0 * g[len - 3] + 19.0 * g[len - 2] + 9.0 * g[len - 1]));
    out
}
