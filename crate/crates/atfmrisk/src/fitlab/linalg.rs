//! Minimal dense matrix helpers for the small normal-equation systems that
//! the regressions produce (at most a few dozen columns).

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub struct SquareMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting.
    ///
    /// Returns `None` when a pivot falls below `1e-12` times the largest
    /// input entry, i.e. the matrix is (numerically) singular.
    pub fn inverse(&self) -> Option<SquareMatrix> {
        let n = self.n;
        let amax = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if amax == 0.0 {
            return None;
        }
        let tol = 1e-12 * amax;

        // Augmented [A | I], reduced in place.
        let mut a = self.clone();
        let mut inv = SquareMatrix::zeros(n);
        for i in 0..n {
            inv.set(i, i, 1.0);
        }

        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    a.get(r1, col)
                        .abs()
                        .partial_cmp(&a.get(r2, col).abs())
                        .unwrap()
                })
                .unwrap();
            let pivot = a.get(pivot_row, col);
            if pivot.abs() < tol {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let inv_pivot = 1.0 / a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) * inv_pivot);
                inv.set(col, j, inv.get(col, j) * inv_pivot);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, a.get(row, j) - factor * a.get(col, j));
                    inv.set(row, j, inv.get(row, j) - factor * inv.get(col, j));
                }
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_a_known_matrix() {
        let mut m = SquareMatrix::zeros(2);
        m.set(0, 0, 4.0);
        m.set(0, 1, 7.0);
        m.set(1, 0, 2.0);
        m.set(1, 1, 6.0);
        let inv = m.inverse().unwrap();
        // inverse = [0.6, -0.7; -0.2, 0.4]
        assert!((inv.get(0, 0) - 0.6).abs() < 1e-12);
        assert!((inv.get(0, 1) + 0.7).abs() < 1e-12);
        assert!((inv.get(1, 0) + 0.2).abs() < 1e-12);
        assert!((inv.get(1, 1) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_returns_none() {
        let mut m = SquareMatrix::zeros(2);
        m.set(0, 0, 1.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 2.0);
        m.set(1, 1, 4.0);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut m = SquareMatrix::zeros(3);
        let vals = [[2.0, 1.0, 0.3], [1.0, 3.0, 0.5], [0.3, 0.5, 1.7]];
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, vals[i][j]);
            }
        }
        let inv = m.inverse().unwrap();
        for i in 0..3 {
            let e: Vec<f64> = (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
            let col = inv.mul_vec(&[vals[0][i], vals[1][i], vals[2][i]]);
            for j in 0..3 {
                assert!((col[j] - e[j]).abs() < 1e-12);
            }
        }
    }
}
