//! Least squares by Householder QR with column pivoting.

use ndarray::{Array1, Array2};

/// Columns whose residual norm falls below this fraction of their original
/// norm are treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    /// Solution in the original column order; dropped columns are zero.
    pub coefficients: Array1<f64>,
    pub rank: usize,
    /// Original indices of columns dropped as dependent, ascending.
    pub dropped: Vec<usize>,
}

/// Minimises `‖a·x − b‖₂`.
///
/// Columns are pivoted by largest remaining norm; elimination stops once
/// every remaining column is numerically in the span of those already
/// chosen. The result is deterministic for fixed input.
pub fn solve(a: &Array2<f64>, b: &Array1<f64>) -> LeastSquares {
    let (m, n) = a.dim();
    assert_eq!(b.len(), m, "right-hand side length must match rows");
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j).to_vec()).collect();
    let mut rhs = b.to_vec();
    let original: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;

    for k in 0..m.min(n) {
        let mut pivot = None;
        let mut best = 0.0;
        for j in k..n {
            let rest = norm(&cols[j][k..]);
            if rest > RANK_TOLERANCE * original[perm[j]] && rest > best {
                best = rest;
                pivot = Some(j);
            }
        }
        let Some(p) = pivot else { break };
        cols.swap(k, p);
        perm.swap(k, p);

        // Householder reflector zeroing cols[k][k+1..]
        let alpha = if cols[k][k] >= 0.0 { -best } else { best };
        let mut v = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(k + 1) {
                reflect(&v, vnorm2, &mut col[k..]);
            }
            reflect(&v, vnorm2, &mut rhs[k..]);
        }
        cols[k][k] = alpha;
        for x in &mut cols[k][k + 1..] {
            *x = 0.0;
        }
        rank += 1;
    }

    // back substitution on the leading rank × rank block of R
    let mut z = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut acc = rhs[i];
        for (j, zj) in z.iter().enumerate().skip(i + 1) {
            acc -= cols[j][i] * zj;
        }
        z[i] = acc / cols[i][i];
    }
    let mut coefficients = Array1::zeros(n);
    for (k, &value) in z.iter().enumerate() {
        coefficients[perm[k]] = value;
    }
    let mut dropped = perm[rank..].to_vec();
    dropped.sort_unstable();
    LeastSquares {
        coefficients,
        rank,
        dropped,
    }
}

fn norm(x: &[f64]) -> f64 {
    // scaled to avoid overflow on large panels
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}
