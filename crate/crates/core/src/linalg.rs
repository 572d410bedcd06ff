//! Small dense vectors and orthogonal matrices for low-rank root systems.
//!
//! Ranks in practice are 1–4, so points live in a `SmallVec` that stays on the
//! stack and matrices are row-major buffers. Nothing here is clever; it only
//! has to be allocation-free in the stepping loops.

use smallvec::SmallVec;

/// A point of the ambient Euclidean space.
pub type Point = SmallVec<[f64; 4]>;

pub fn point_from(xs: &[f64]) -> Point {
    SmallVec::from_slice(xs)
}

pub fn zeros(n: usize) -> Point {
    smallvec::smallvec![0.0; n]
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// y += c * x
pub fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

pub fn scaled(x: &[f64], c: f64) -> Point {
    x.iter().map(|v| c * v).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: SmallVec<[f64; 16]>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data: SmallVec<[f64; 16]> = smallvec::smallvec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    /// Householder reflection through the hyperplane orthogonal to `alpha`.
    pub fn reflection(alpha: &[f64]) -> Self {
        let n = alpha.len();
        let a2 = norm2(alpha);
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] -= 2.0 * alpha[i] * alpha[j] / a2;
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, x: &[f64]) -> Point {
        let n = self.n;
        (0..n)
            .map(|i| dot(&self.data[i * n..(i + 1) * n], x))
            .collect()
    }

    /// For orthogonal matrices the transpose is the inverse.
    pub fn apply_transpose(&self, x: &[f64]) -> Point {
        let n = self.n;
        let mut out = zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[j] += self.data[i * n + j] * x[i];
            }
        }
        out
    }

    /// self * other
    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.data[i * n + j] = s;
            }
        }
        out
    }

    /// Max-abs deviation of `self^T self` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.get(k, i) * self.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reflection_is_involutive_and_orthogonal() {
        let alpha = [1.0, 1.0, -0.5];
        let r = Matrix::reflection(&alpha);
        assert!(r.orthogonality_defect() < 1e-14);
        let x = [0.3, -1.2, 2.0];
        let rx = r.apply(&x);
        let rrx = r.apply(&rx);
        for (a, b) in x.iter().zip(&rrx) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn transpose_apply_inverts_orthogonal() {
        let r = Matrix::reflection(&[2.0, -1.0]);
        let x = [0.7, 0.4];
        let y = r.apply(&x);
        let back = r.apply_transpose(&y);
        assert_relative_eq!(back[0], x[0], epsilon = 1e-14);
        assert_relative_eq!(back[1], x[1], epsilon = 1e-14);
    }
}
