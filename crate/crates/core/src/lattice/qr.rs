use nalgebra::{DMatrix, DVector};

use super::{Lattice, C64};
use crate::error::{Error, Result};

/// `M = Q [R'; 0]` with `Q` unitary (`n x n`) and `R'` upper triangular
/// (`m x m`) with a real positive diagonal.
#[derive(Debug, Clone)]
pub struct QrReduction {
    pub reduced: DMatrix<C64>,
    pub rotation: DMatrix<C64>,
}

impl QrReduction {
    /// First `m` entries of `Q^* y`; the rest carry no lattice information.
    pub fn project(&self, y: &DVector<C64>) -> DVector<C64> {
        let m = self.reduced.nrows();
        let full = self.rotation.adjoint() * y;
        full.rows(0, m).into_owned()
    }

    /// The reduced problem as a lattice of the same scalar kind.
    pub fn reduced_lattice(&self, template: &Lattice) -> Result<Lattice> {
        let label = format!("{}(reduced)", template.label());
        match template.scalar_kind() {
            super::ScalarKind::Real => Lattice::real(self.reduced.map(|z| z.re), label),
            super::ScalarKind::Complex => Lattice::complex(self.reduced.clone(), label),
        }
    }
}

/// Householder QR of the complex generator.
pub fn qr_reduce(lattice: &Lattice) -> Result<QrReduction> {
    let mut a = lattice.generator().clone();
    let (n, m) = a.shape();
    let mut q = DMatrix::<C64>::identity(n, n);
    for k in 0..m {
        let below: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let x0 = a[(k, k)];
        let norm = (below + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = DVector::<C64>::zeros(n);
        v[k] = x0 - alpha;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        // H = I - 2 v v^* / (v^* v), applied on the left of A and right of Q
        let two = C64::new(2.0 / vv, 0.0);
        let w = a.adjoint() * &v;
        a -= &v * w.adjoint() * two;
        let qv = &q * &v;
        q -= qv * v.adjoint() * two;
    }
    let mut reduced = a.rows(0, m).into_owned();
    for k in 0..m {
        let d = reduced[(k, k)];
        if d.norm() < 1e-12 * reduced.norm() {
            return Err(Error::RankDeficient {
                rank: k,
                columns: m,
            });
        }
        let phase = d / d.norm();
        // R' <- D^* R', Q <- Q D keeps Q R' unchanged
        for j in 0..m {
            reduced[(k, j)] *= phase.conj();
        }
        for i in 0..n {
            q[(i, k)] *= phase;
        }
        reduced[(k, k)] = C64::new(reduced[(k, k)].re, 0.0);
        for i in k + 1..m {
            reduced[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    Ok(QrReduction {
        reduced,
        rotation: q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    #[test]
    fn square_generator_preserves_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = DMatrix::from_fn(3, 3, |_, _| rand_c(&mut rng));
        let lat = Lattice::complex(g.clone(), "g").unwrap();
        let qr = qr_reduce(&lat).unwrap();
        let d1 = g.determinant().norm();
        let d2 = qr.reduced.determinant().norm();
        assert!((d1 - d2).abs() < 1e-12 * d1);
        let back = &qr.rotation * &qr.reduced;
        assert!((back - g).norm() < 1e-12);
        let qq = qr.rotation.adjoint() * &qr.rotation;
        assert!((qq - DMatrix::<C64>::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn upper_triangular_is_fixed() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, -1.0, 0.0, 1.5, 0.5, 0.0, 0.0, 3.0]);
        let lat = Lattice::real(g.clone(), "u").unwrap();
        let qr = qr_reduce(&lat).unwrap();
        assert!((qr.reduced.map(|z| z.re) - g).norm() < 1e-15);
        assert!((qr.rotation.clone() - DMatrix::<C64>::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn tall_generator_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = DMatrix::from_fn(4, 2, |_, _| rand_c(&mut rng));
        let lat = Lattice::complex(g.clone(), "tall").unwrap();
        let qr = qr_reduce(&lat).unwrap();
        assert_eq!(qr.reduced.shape(), (2, 2));
        assert_eq!(qr.rotation.shape(), (4, 4));
        let mut stacked = DMatrix::<C64>::zeros(4, 2);
        stacked.view_mut((0, 0), (2, 2)).copy_from(&qr.reduced);
        assert!((&qr.rotation * stacked - g).norm() < 1e-12);
        assert!(qr.reduced[(1, 0)].norm() == 0.0);
    }
}
