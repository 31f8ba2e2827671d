//! Lattices given by a generator matrix, their volumes, shell enumeration,
//! nested pairs for coset coding, space-time codewords and QR reduction.
//!
//! A lattice is `{ M u }` with `u` ranging over `Z^m` (real lattices) or
//! `Z[i]^m` (complex lattices). Every lattice keeps a realified basis: a
//! complex entry `z` of the ambient space becomes the pair `(Re z, Im z)` and
//! a Gaussian-integer coefficient `a + bi` contributes the two real columns
//! `M_j` and `i M_j`. All geometry (norms, enumeration, closest points) runs on
//! that real basis.

mod codeword;
mod enumerate;
mod nested;
mod qr;

pub use codeword::SpaceTimeCodeword;
pub use enumerate::{
    closest_point, enumerate_shells, enumerate_shells_with_budget, points_within, ClosestPoint,
    Shell, ShellTable, DEFAULT_POINT_BUDGET,
};
pub use nested::NestedLatticePair;
pub use qr::{qr_reduce, QrReduction};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Lattices whose theta series is known in closed form (up to scaling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    Z4,
    D4,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Z4 => "Z4",
            Family::D4 => "D4",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lattice {
    generator: DMatrix<C64>,
    kind: ScalarKind,
    label: String,
    basis: DMatrix<f64>,
    // upper-triangular Cholesky factor of the real Gram matrix
    chol: DMatrix<f64>,
    // (B^T B)^{-1} B^T, maps ambient points to real coefficients
    pinv: DMatrix<f64>,
    family: Option<(Family, f64)>,
}

impl Lattice {
    pub fn real(generator: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        let generator = generator.map(|v| C64::new(v, 0.0));
        Self::build(generator, ScalarKind::Real, label.into(), None)
    }

    pub fn complex(generator: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        Self::build(generator, ScalarKind::Complex, label.into(), None)
    }

    fn build(
        generator: DMatrix<C64>,
        kind: ScalarKind,
        label: String,
        family: Option<(Family, f64)>,
    ) -> Result<Self> {
        let (n, m) = generator.shape();
        if n == 0 || m == 0 {
            return Err(Error::InvalidLattice("empty generator".into()));
        }
        if m > n {
            return Err(Error::InvalidLattice(format!(
                "{m} generator columns exceed ambient dimension {n}"
            )));
        }
        if generator
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidLattice("non-finite generator entry".into()));
        }
        let basis = match kind {
            ScalarKind::Real => {
                if generator.iter().any(|z| z.im != 0.0) {
                    return Err(Error::InvalidLattice(
                        "real lattice with complex generator entries".into(),
                    ));
                }
                generator.map(|z| z.re)
            }
            ScalarKind::Complex => realify(&generator),
        };
        let gram = basis.transpose() * &basis;
        let cols = basis.ncols();
        let scale: f64 = (0..cols).map(|j| gram[(j, j)]).product();
        let det = gram.determinant();
        if !(det > 1e-12 * scale) {
            let rank = basis.clone().svd(false, false).rank(1e-9 * basis.norm());
            return Err(Error::RankDeficient {
                rank,
                columns: cols,
            });
        }
        let chol = gram
            .clone()
            .cholesky()
            .ok_or(Error::RankDeficient {
                rank: cols - 1,
                columns: cols,
            })?
            .l()
            .transpose();
        let gram_inv = gram.try_inverse().ok_or(Error::RankDeficient {
            rank: cols - 1,
            columns: cols,
        })?;
        let pinv = gram_inv * basis.transpose();
        Ok(Lattice {
            generator,
            kind,
            label,
            basis,
            chol,
            pinv,
            family,
        })
    }

    /// `Z^n` with the identity generator.
    pub fn integer(n: usize) -> Self {
        let family = (n == 4).then_some((Family::Z4, 1.0));
        Self::build(
            DMatrix::identity(n, n).map(|v: f64| C64::new(v, 0.0)),
            ScalarKind::Real,
            format!("Z{n}"),
            family,
        )
        .expect("identity generator is full rank")
    }

    /// `Z[i]^n` as a complex lattice; realifies to `Z^{2n}`.
    pub fn gaussian_integers(n: usize) -> Self {
        let family = (n == 2).then_some((Family::Z4, 1.0));
        Self::build(
            DMatrix::identity(n, n),
            ScalarKind::Complex,
            format!("Z[i]^{n}"),
            family,
        )
        .expect("identity generator is full rank")
    }

    /// The checkerboard lattice: integer 4-vectors with even coordinate sum.
    pub fn d4() -> Self {
        #[rustfmt::skip]
        let g = DMatrix::from_column_slice(4, 4, &[
            2.0, 0.0, 0.0, 0.0,
            1.0, 1.0, 0.0, 0.0,
            1.0, 0.0, 1.0, 0.0,
            1.0, 0.0, 0.0, 1.0,
        ]);
        Self::build(
            g.map(|v| C64::new(v, 0.0)),
            ScalarKind::Real,
            "D4".into(),
            Some((Family::D4, 1.0)),
        )
        .expect("D4 generator is full rank")
    }

    /// D4 as the Z[i]-lattice `{(x1, x2) : x1 = x2 mod (1+i)}`, i.e.
    /// `(1+i) Z[i]^2` plus the cosets of the length-2 repetition code.
    pub fn d4_complex() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let g = DMatrix::from_column_slice(2, 2, &[one, one, zero, C64::new(1.0, 1.0)]);
        Self::build(
            g,
            ScalarKind::Complex,
            "D4c".into(),
            Some((Family::D4, 1.0)),
        )
        .expect("complex D4 generator is full rank")
    }

    /// The lattice `mu * self`.
    pub fn scaled(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive, got {mu}")));
        }
        let label = format!("{}*{}", fmt_scale(mu), self.label);
        Self::build(
            self.generator.map(|z| z * mu),
            self.kind,
            label,
            self.family.map(|(f, s)| (f, s * mu)),
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn generator(&self) -> &DMatrix<C64> {
        &self.generator
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Known theta-series family and the scale factor relative to it.
    pub fn family(&self) -> Option<(Family, f64)> {
        self.family
    }

    /// Realified basis (columns are the real generators).
    pub fn real_basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Number of real generators.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Real dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub(crate) fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// `|det(M^T M)|^{1/2}` for real lattices and `det(M^* M)` for complex ones.
    ///
    /// Both agree with the square root of the Gram determinant of the
    /// realified basis, which is what is computed here.
    pub fn volume(&self) -> f64 {
        self.chol.diagonal().iter().product::<f64>().abs()
    }

    /// Ambient point for real coefficients `u` (realified indexing).
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.rank(), "coefficient length");
        let mut x = vec![0.0; self.ambient_dim()];
        for (j, &u) in coeffs.iter().enumerate() {
            if u == 0 {
                continue;
            }
            let u = u as f64;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += self.basis[(i, j)] * u;
            }
        }
        x
    }

    /// Real coefficients of the orthogonal projection of `x` onto the span.
    pub fn coefficients(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok((0..self.rank())
            .map(|j| (0..x.len()).map(|i| self.pinv[(j, i)] * x[i]).sum())
            .collect())
    }

    /// Integer coefficients of `x` if `x` lies on the lattice (within `tol`).
    pub fn integer_coefficients(&self, x: &[f64], tol: f64) -> Result<Option<Vec<i64>>> {
        let c = self.coefficients(x)?;
        if c.iter().any(|v| (v - v.round()).abs() > tol) {
            return Ok(None);
        }
        let u: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
        let p = self.point(&u);
        let scale = 1.0 + p.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if p.iter().zip(x).any(|(a, b)| (a - b).abs() > tol * scale) {
            return Ok(None);
        }
        Ok(Some(u))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.integer_coefficients(x, 1e-8)?.is_some())
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got,
            });
        }
        Ok(())
    }

    /// Half the sum of basis column lengths; bounds the covering radius.
    pub(crate) fn covering_radius_bound(&self) -> f64 {
        0.5 * (0..self.rank())
            .map(|j| self.basis.column(j).norm())
            .sum::<f64>()
    }
}

fn realify(g: &DMatrix<C64>) -> DMatrix<f64> {
    let (n, m) = g.shape();
    let mut b = DMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            let z = g[(i, j)];
            b[(2 * i, 2 * j)] = z.re;
            b[(2 * i + 1, 2 * j)] = z.im;
            // column for the imaginary part of the coefficient: i * z
            b[(2 * i, 2 * j + 1)] = -z.im;
            b[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    b
}

fn fmt_scale(mu: f64) -> String {
    let s = format!("{mu:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_volumes() {
        assert!((Lattice::integer(4).volume() - 1.0).abs() < 1e-15);
        assert!((Lattice::d4().volume() - 2.0).abs() < 1e-14);
        assert!((Lattice::d4_complex().volume() - 2.0).abs() < 1e-14);
        let mu = 2f64.powf(-0.25);
        assert!((Lattice::d4().scaled(mu).unwrap().volume() - 1.0).abs() < 1e-14);
        assert!((Lattice::integer(4).scaled(0.5).unwrap().volume() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn complex_volume_is_det_mm_star() {
        let g = DMatrix::from_column_slice(
            2,
            2,
            &[
                C64::new(1.0, 2.0),
                C64::new(0.5, -1.0),
                C64::new(0.0, 1.0),
                C64::new(3.0, 0.0),
            ],
        );
        let lat = Lattice::complex(g.clone(), "t").unwrap();
        let det = (&g * g.adjoint()).determinant();
        assert!(det.im.abs() < 1e-12);
        assert!((lat.volume() - det.re).abs() < 1e-12 * det.re);
    }

    #[test]
    fn rank_deficient_generator_rejected() {
        let g = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        match Lattice::real(g, "bad") {
            Err(Error::RankDeficient { rank, columns }) => {
                assert_eq!(rank, 1);
                assert_eq!(columns, 2);
            }
            other => panic!("expected rank error, got {other:?}"),
        }
    }

    #[test]
    fn too_many_columns_rejected() {
        let g = DMatrix::from_column_slice(1, 2, &[1.0, 2.0]);
        assert!(matches!(
            Lattice::real(g, "wide"),
            Err(Error::InvalidLattice(_))
        ));
    }

    #[test]
    fn d4_points_have_even_sum() {
        let d4 = Lattice::d4();
        for u in [[1, 0, 0, 0], [0, 1, 0, 0], [1, -1, 2, 3], [-2, 5, 1, 1]] {
            let x = d4.point(&u);
            let s: f64 = x.iter().sum();
            assert_eq!(s.rem_euclid(2.0), 0.0);
        }
        assert!(d4.contains(&[1.0, 1.0, 0.0, 0.0]).unwrap());
        assert!(!d4.contains(&[1.0, 0.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn scaling_tracks_family() {
        let l = Lattice::d4().scaled(0.5).unwrap().scaled(3.0).unwrap();
        let (f, s) = l.family().unwrap();
        assert_eq!(f, Family::D4);
        assert!((s - 1.5).abs() < 1e-15);
        assert!(Lattice::integer(3).family().is_none());
    }
}
