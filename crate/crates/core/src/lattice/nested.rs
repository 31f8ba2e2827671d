use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{closest_point, Lattice};
use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-8;
const FRAC_SNAP: f64 = 1e-9;

/// A fine lattice and a coarse sublattice, with one representative per coset.
///
/// Representatives are the fine-lattice points in the half-open fundamental
/// parallelotope of the coarse basis, ordered lexicographically by their
/// integer coordinates in the fine basis. Message `k` is the `k`-th of them.
#[derive(Debug, Clone)]
pub struct NestedLatticePair {
    fine: Lattice,
    coarse: Lattice,
    // coarse basis expressed in fine coordinates (integer matrix)
    transfer: DMatrix<f64>,
    transfer_inv: DMatrix<f64>,
    rep_coeffs: Vec<Vec<i64>>,
    coset_reps: Vec<Vec<f64>>,
    index_of: HashMap<Vec<i64>, usize>,
}

impl NestedLatticePair {
    pub fn new(fine: Lattice, coarse: Lattice) -> Result<Self> {
        if fine.ambient_dim() != coarse.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: fine.ambient_dim(),
                got: coarse.ambient_dim(),
            });
        }
        if fine.rank() != coarse.rank() {
            return Err(Error::NotSublattice(format!(
                "ranks differ ({} vs {})",
                fine.rank(),
                coarse.rank()
            )));
        }
        let m = fine.rank();
        let mut transfer = DMatrix::zeros(m, m);
        for j in 0..m {
            let col: Vec<f64> = coarse.real_basis().column(j).iter().copied().collect();
            let u = fine.integer_coefficients(&col, INT_TOL)?.ok_or_else(|| {
                Error::NotSublattice(format!("coarse generator {j} is not a fine-lattice point"))
            })?;
            for (i, v) in u.into_iter().enumerate() {
                transfer[(i, j)] = v as f64;
            }
        }
        let det = transfer.determinant().abs();
        let index = det.round();
        if index < 1.0 || (det - index).abs() > 1e-6 {
            return Err(Error::NotSublattice(format!(
                "index {det} is not a positive integer"
            )));
        }
        let vol_ratio = coarse.volume() / fine.volume();
        if (vol_ratio - index).abs() > 1e-6 * index {
            return Err(Error::NotSublattice(format!(
                "volume ratio {vol_ratio} disagrees with index {index}"
            )));
        }
        let transfer_inv = transfer
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotSublattice("singular transfer matrix".into()))?;

        let (lo, hi): (Vec<i64>, Vec<i64>) = (0..m)
            .map(|i| {
                let row = transfer.row(i);
                let lo: f64 = row.iter().map(|v| v.min(0.0)).sum();
                let hi: f64 = row.iter().map(|v| v.max(0.0)).sum();
                (lo.floor() as i64, hi.ceil() as i64)
            })
            .unzip();
        let box_size: u128 = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l + 1) as u128)
            .product();
        if box_size > 10_000_000 {
            return Err(Error::BudgetExceeded { budget: 10_000_000 });
        }

        let mut rep_coeffs = Vec::new();
        let mut u = lo.clone();
        loop {
            let f = mat_vec(&transfer_inv, &u);
            if f.iter().all(|v| (-FRAC_SNAP..1.0 - FRAC_SNAP).contains(v)) {
                rep_coeffs.push(u.clone());
            }
            // odometer over the box
            let mut k = 0;
            loop {
                if k == m {
                    break;
                }
                if u[k] < hi[k] {
                    u[k] += 1;
                    break;
                }
                u[k] = lo[k];
                k += 1;
            }
            if k == m {
                break;
            }
        }
        rep_coeffs.sort();
        if rep_coeffs.len() != index as usize {
            return Err(Error::NotSublattice(format!(
                "found {} coset representatives, expected {index}",
                rep_coeffs.len()
            )));
        }
        let coset_reps = rep_coeffs.iter().map(|u| fine.point(u)).collect();
        let index_of = rep_coeffs
            .iter()
            .enumerate()
            .map(|(k, u)| (u.clone(), k))
            .collect();
        Ok(NestedLatticePair {
            fine,
            coarse,
            transfer,
            transfer_inv,
            rep_coeffs,
            coset_reps,
            index_of,
        })
    }

    /// `1/2 Z^4` over `Z^4`.
    pub fn half_z4() -> Self {
        let z4 = Lattice::integer(4);
        let fine = z4.scaled(0.5).expect("positive scale").with_label("halfZ4");
        Self::new(fine, z4).expect("Z4 is a sublattice of 1/2 Z4")
    }

    /// `1/2 D4` over `D4`.
    pub fn half_d4() -> Self {
        let d4 = Lattice::d4();
        let fine = d4.scaled(0.5).expect("positive scale").with_label("halfD4");
        Self::new(fine, d4).expect("D4 is a sublattice of 1/2 D4")
    }

    pub fn fine(&self) -> &Lattice {
        &self.fine
    }

    pub fn coarse(&self) -> &Lattice {
        &self.coarse
    }

    pub fn num_cosets(&self) -> usize {
        self.coset_reps.len()
    }

    pub fn coset_reps(&self) -> &[Vec<f64>] {
        &self.coset_reps
    }

    pub fn coset_rep_coeffs(&self) -> &[Vec<i64>] {
        &self.rep_coeffs
    }

    /// Coarse basis in fine coordinates.
    pub fn transfer(&self) -> &DMatrix<f64> {
        &self.transfer
    }

    /// `x = r + c_k`, with `r` checked to lie on the coarse lattice.
    pub fn coset_encode(&self, message_index: usize, randomizer: &[f64]) -> Result<Vec<f64>> {
        if message_index >= self.num_cosets() {
            return Err(Error::MessageOutOfRange {
                index: message_index,
                cosets: self.num_cosets(),
            });
        }
        if !self.coarse.contains(randomizer)? {
            return Err(Error::RandomizerNotInLattice);
        }
        Ok(self.coset_reps[message_index]
            .iter()
            .zip(randomizer)
            .map(|(c, r)| c + r)
            .collect())
    }

    /// Nearest fine-lattice point, reduced modulo the coarse lattice.
    pub fn coset_decode(&self, point: &[f64]) -> Result<usize> {
        let cp = closest_point(&self.fine, point)?;
        Ok(self.coset_of_fine_coeffs(&cp.coeffs))
    }

    /// Coset index of the fine-lattice point with integer coordinates `u`.
    pub fn coset_of_fine_coeffs(&self, u: &[i64]) -> usize {
        let f = mat_vec(&self.transfer_inv, u);
        let frac: Vec<f64> = f.iter().map(|v| v - (v + FRAC_SNAP).floor()).collect();
        let rep: Vec<i64> = (0..frac.len())
            .map(|i| {
                (0..frac.len())
                    .map(|j| self.transfer[(i, j)] * frac[j])
                    .sum::<f64>()
                    .round() as i64
            })
            .collect();
        *self
            .index_of
            .get(&rep)
            .expect("reduced coordinates land on a coset representative")
    }

    /// Coset index of an exact fine-lattice point given in ambient coordinates.
    pub fn coset_of_point(&self, x: &[f64]) -> Result<usize> {
        let u = self
            .fine
            .integer_coefficients(x, 1e-6)?
            .ok_or_else(|| Error::Domain("point is not on the fine lattice".into()))?;
        Ok(self.coset_of_fine_coeffs(&u))
    }
}

fn mat_vec(a: &DMatrix<f64>, u: &[i64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * u[j] as f64).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_is_sixteen() {
        assert_eq!(NestedLatticePair::half_z4().num_cosets(), 16);
        assert_eq!(NestedLatticePair::half_d4().num_cosets(), 16);
    }

    #[test]
    fn zero_randomizer_returns_representative() {
        let pair = NestedLatticePair::half_z4();
        for k in 0..16 {
            let x = pair.coset_encode(k, &[0.0; 4]).unwrap();
            assert_eq!(x, pair.coset_reps()[k]);
        }
    }

    #[test]
    fn first_coset_is_the_coarse_lattice() {
        let pair = NestedLatticePair::half_z4();
        assert_eq!(pair.coset_reps()[0], vec![0.0; 4]);
        let x = pair.coset_encode(0, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn representatives_are_distinct_cosets() {
        for pair in [NestedLatticePair::half_z4(), NestedLatticePair::half_d4()] {
            let reps = pair.coset_reps();
            for i in 0..reps.len() {
                assert!(pair.fine().contains(&reps[i]).unwrap());
                for j in i + 1..reps.len() {
                    let diff: Vec<f64> = reps[i].iter().zip(&reps[j]).map(|(a, b)| a - b).collect();
                    assert!(!pair.coarse().contains(&diff).unwrap(), "{i} ~ {j}");
                }
            }
        }
    }

    #[test]
    fn roundtrip_with_random_randomizers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for pair in [NestedLatticePair::half_z4(), NestedLatticePair::half_d4()] {
            for k in 0..pair.num_cosets() {
                for _ in 0..100 {
                    let u: Vec<i64> = (0..4).map(|_| rng.random_range(-5..=5)).collect();
                    let r = pair.coarse().point(&u);
                    let x = pair.coset_encode(k, &r).unwrap();
                    assert_eq!(pair.coset_decode(&x).unwrap(), k);
                }
            }
        }
    }

    #[test]
    fn small_noise_is_corrected() {
        // half minimum distance of 1/2 Z4 is 0.25
        let pair = NestedLatticePair::half_z4();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..16 {
            for _ in 0..50 {
                let mut dir: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                dir.iter_mut().for_each(|v| *v *= 0.2 / n);
                let y: Vec<f64> = pair.coset_reps()[k]
                    .iter()
                    .zip(&dir)
                    .map(|(a, b)| a + b)
                    .collect();
                assert_eq!(pair.coset_decode(&y).unwrap(), k);
            }
        }
    }

    #[test]
    fn encode_errors() {
        let pair = NestedLatticePair::half_z4();
        assert_eq!(
            pair.coset_encode(16, &[0.0; 4]).unwrap_err(),
            Error::MessageOutOfRange {
                index: 16,
                cosets: 16
            }
        );
        assert_eq!(
            pair.coset_encode(0, &[0.5, 0.0, 0.0, 0.0]).unwrap_err(),
            Error::RandomizerNotInLattice
        );
        assert!(matches!(
            pair.coset_decode(&[0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_sublattice_rejected() {
        let fine = Lattice::integer(4);
        let coarse = Lattice::integer(4).scaled(0.5).unwrap();
        assert!(matches!(
            NestedLatticePair::new(fine, coarse),
            Err(Error::NotSublattice(_))
        ));
    }
}
