//! Tridiagonal operators and a complex Thomas solver.

use num_complex::Complex64;

/// Real tridiagonal matrix stored by diagonals; `lower[0]` and
/// `upper[n-1]` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = A x`.
    pub fn apply<T>(&self, x: &[T], out: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let n = self.len();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc = acc + x[i - 1] * self.lower[i];
            }
            if i + 1 < n {
                acc = acc + x[i + 1] * self.upper[i];
            }
            out[i] = acc;
        }
    }
}

/// LU factorisation of `I + i·α·A` for a real tridiagonal `A`, the implicit
/// half of a Crank–Nicolson step.
#[derive(Debug, Clone)]
pub struct ShiftedFactor {
    alpha: f64,
    lower: Vec<Complex64>,
    upper_mod: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
}

impl ShiftedFactor {
    pub fn new(a: &Tridiagonal, alpha: f64) -> Self {
        let n = a.len();
        let i = Complex64::i();
        let lower: Vec<Complex64> = a.lower.iter().map(|&l| i * alpha * l).collect();
        let upper: Vec<Complex64> = a.upper.iter().map(|&u| i * alpha * u).collect();
        let diag: Vec<Complex64> = a
            .diag
            .iter()
            .map(|&d| Complex64::new(1.0, alpha * d))
            .collect();
        let mut upper_mod = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let pivot = if k == 0 {
                diag[0]
            } else {
                diag[k] - lower[k] * prev
            };
            inv_pivot[k] = pivot.inv();
            prev = upper[k] * inv_pivot[k];
            upper_mod[k] = prev;
        }
        Self {
            alpha,
            lower,
            upper_mod,
            inv_pivot,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Overwrites `rhs` with the solution of `(I + iαA) x = rhs`.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        assert_eq!(n, self.inv_pivot.len());
        rhs[0] *= self.inv_pivot[0];
        for k in 1..n {
            let v = rhs[k] - self.lower[k] * rhs[k - 1];
            rhs[k] = v * self.inv_pivot[k];
        }
        for k in (0..n.saturating_sub(1)).rev() {
            let v = rhs[k + 1];
            rhs[k] -= self.upper_mod[k] * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tridiagonal {
        Tridiagonal {
            lower: vec![0.0, 1.0, 2.0, 0.5],
            diag: vec![-2.0, -3.0, -4.0, -1.5],
            upper: vec![1.5, 1.0, 2.0, 0.0],
        }
    }

    #[test]
    fn solve_inverts_shifted_operator() {
        let a = sample();
        let alpha = 0.7;
        let f = ShiftedFactor::new(&a, alpha);
        let x: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(k as f64 - 1.0, 0.3 * k as f64))
            .collect();
        let mut ax = vec![Complex64::new(0.0, 0.0); 4];
        a.apply(&x, &mut ax);
        let mut b: Vec<Complex64> = x
            .iter()
            .zip(&ax)
            .map(|(xi, ai)| xi + Complex64::i() * alpha * ai)
            .collect();
        f.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-14);
        }
    }
}
