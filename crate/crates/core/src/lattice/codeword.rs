use nalgebra::{DMatrix, DVector};

use super::C64;
use crate::error::{Error, Result};

/// An `n_t x T` space-time codeword and its column-stacked vectorization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeCodeword {
    matrix: DMatrix<C64>,
    vector: DVector<C64>,
}

impl SpaceTimeCodeword {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        // nalgebra storage is column-major, so this is vec(X)
        let vector = DVector::from_column_slice(matrix.as_slice());
        SpaceTimeCodeword { matrix, vector }
    }

    pub fn from_vector(vector: DVector<C64>, n_t: usize, t: usize) -> Result<Self> {
        if vector.len() != n_t * t {
            return Err(Error::DimensionMismatch {
                expected: n_t * t,
                got: vector.len(),
            });
        }
        let matrix = DMatrix::from_column_slice(n_t, t, vector.as_slice());
        Ok(SpaceTimeCodeword { matrix, vector })
    }

    /// `X = [[x1, x2], [-conj(x2), conj(x1)]]`.
    pub fn alamouti(x1: C64, x2: C64) -> Self {
        let m = DMatrix::from_row_slice(2, 2, &[x1, x2, -x2.conj(), x1.conj()]);
        Self::new(m)
    }

    /// Alamouti codeword of the real 4-vector `(Re x1, Im x1, Re x2, Im x2)`.
    pub fn alamouti_from_real(x: &[f64]) -> Self {
        assert_eq!(x.len(), 4, "Alamouti symbols need 4 real coordinates");
        Self::alamouti(C64::new(x[0], x[1]), C64::new(x[2], x[3]))
    }

    pub fn zero(n_t: usize, t: usize) -> Self {
        Self::new(DMatrix::zeros(n_t, t))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.vector
    }

    pub fn n_t(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn t(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn gram(&self) -> DMatrix<C64> {
        &self.matrix * self.matrix.adjoint()
    }

    /// `det(X X^*)`, real and nonnegative up to rounding.
    pub fn det_xx_star(&self) -> f64 {
        self.gram().determinant().re
    }

    /// `det(I + gamma X X^*)`.
    pub fn det_shifted(&self, gamma: f64) -> f64 {
        let n = self.n_t();
        let m = DMatrix::<C64>::identity(n, n) + self.gram() * C64::new(gamma, 0.0);
        m.determinant().re
    }

    /// `||X||_F^2`, equal to `||vec(X)||^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared norms of the rows (per transmit antenna).
    pub fn row_norms_sq(&self) -> Vec<f64> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_codeword() {
        let x = SpaceTimeCodeword::alamouti(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(x.matrix(), &DMatrix::<C64>::identity(2, 2));
        assert!((x.det_xx_star() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alamouti_determinants() {
        let x = SpaceTimeCodeword::alamouti(c(1.0, 0.0), c(0.0, 1.0));
        assert!((x.det_xx_star() - 4.0).abs() < 1e-14);
        let x = SpaceTimeCodeword::alamouti(c(1.0, 1.0), c(2.0, 0.0));
        assert!((x.det_xx_star() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let x = SpaceTimeCodeword::alamouti(c(1.0, 2.0), c(3.0, 4.0));
        let v = x.vector();
        assert_eq!(v[0], c(1.0, 2.0));
        assert_eq!(v[1], c(-3.0, 4.0));
        assert_eq!(v[2], c(3.0, 4.0));
        assert_eq!(v[3], c(1.0, -2.0));
        let back = SpaceTimeCodeword::from_vector(v.clone(), 2, 2).unwrap();
        assert_eq!(back, x);
        assert!(SpaceTimeCodeword::from_vector(v.clone(), 3, 2).is_err());
    }

    #[test]
    fn det_over_gaussian_integer_grid() {
        for a in -2..=2 {
            for b in -2..=2 {
                for (p, q) in [(0, 1), (1, -1), (2, 2), (-1, 0)] {
                    let (x1, x2) = (c(a as f64, b as f64), c(p as f64, q as f64));
                    let x = SpaceTimeCodeword::alamouti(x1, x2);
                    let n2 = x1.norm_sqr() + x2.norm_sqr();
                    let expect = n2 * n2;
                    assert!((x.det_xx_star() - expect).abs() <= 1e-12 * expect.max(1.0));
                    // vec(X) carries every symbol twice
                    assert!((x.frobenius_sq() - 2.0 * n2).abs() < 1e-12);
                }
            }
        }
    }
}
