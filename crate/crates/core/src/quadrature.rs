//! Gauss-Hermite rules.

use alloc::vec::Vec;

use nalgebra::DMatrix;

/// Nodes and weights of an `n`-point Gauss-Hermite rule.
///
/// Besides the usual weights `w_i` (for `int e^{-x^2} g(x) dx`) the rule also
/// stores `w_i e^{x_i^2}`, which is what an integrand that already contains its
/// own Gaussian envelope needs. Those are computed from normalized Hermite
/// functions so they neither overflow nor underflow for large `n`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_weights: Vec<f64>,
}

// phi_n(x) and phi_{n-1}(x), the normalized Hermite functions.
fn hermite_functions(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = core::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

impl GaussHermite {
    /// Nodes from the eigenvalues of the Jacobi matrix, polished by Newton steps
    /// on the Hermite functions, weights from `1 / (n phi_{n-1}(x)^2)`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Hermite rule needs at least one node");
        let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (0.5 * i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.total_cmp(b));
        let nf = n as f64;
        let mut total = Vec::with_capacity(n);
        for z in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, q) = hermite_functions(n, *z);
                if q == 0.0 {
                    break;
                }
                // H_n / H_n' expressed through the Hermite functions
                *z -= p / ((2.0 * nf).sqrt() * q);
            }
            let (_, q) = hermite_functions(n, *z);
            total.push(1.0 / (nf * q * q));
        }
        // exact symmetry
        for i in 0..n / 2 {
            let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            let t = 0.5 * (total[i] + total[n - 1 - i]);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            total[i] = t;
            total[n - 1 - i] = t;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussHermite {
            weights: nodes.iter().zip(&total).map(|(x, t)| t * (-x * x).exp()).collect(),
            nodes,
            total_weights: total,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
