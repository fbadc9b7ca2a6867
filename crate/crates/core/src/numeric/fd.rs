//! Finite-difference weights on arbitrary grids (Fornberg's recursion).

/// Weights `w[m][j]` such that `sum_j w[m][j] f(nodes[j])` approximates the
/// `m`-th derivative of `f` at `x0`, for `m = 0..=order`.
pub fn weights(x0: f64, nodes: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivatives `0..=order` of sampled data at `x0`.
pub fn derivatives(x0: f64, nodes: &[f64], values: &[f64], order: usize) -> Vec<f64> {
    weights(x0, nodes, order)
        .iter()
        .map(|w| w.iter().zip(values).map(|(a, b)| a * b).sum())
        .collect()
}
