use crate::error::Result;
use crate::lattice::{closest_point, Family, Lattice};

/// Wagner decoding of the (4,3) single-parity-check code.
///
/// A positive soft value favours bit 0. Takes hard decisions and, when the
/// parity is odd, flips the least reliable position.
pub fn wagner_decode_parity(soft_values: &[f64; 4]) -> [u8; 4] {
    let mut bits = soft_values.map(|v| u8::from(v < 0.0));
    if bits.iter().fold(0, |p, b| p ^ b) == 1 {
        let weakest = (0..4)
            .min_by(|&i, &j| soft_values[i].abs().total_cmp(&soft_values[j].abs()))
            .expect("four positions");
        bits[weakest] ^= 1;
    }
    bits
}

/// Nearest point of `D4` (even coordinate sum) to `y`, in integer coordinates.
///
/// Each coordinate is rounded; the soft value `+-(1 - 2|error|)` carries the
/// parity of the rounded integer, and the Wagner decision tells which
/// coordinates move to their second-nearest integer.
pub fn nearest_d4(y: &[f64; 4]) -> [i64; 4] {
    let mut f = [0i64; 4];
    let mut soft = [0.0; 4];
    for i in 0..4 {
        f[i] = y[i].round() as i64;
        let e = y[i] - f[i] as f64;
        let reliability = 1.0 - 2.0 * e.abs();
        soft[i] = if f[i].rem_euclid(2) == 0 {
            reliability
        } else {
            -reliability
        };
    }
    let bits = wagner_decode_parity(&soft);
    for i in 0..4 {
        if u8::from(f[i].rem_euclid(2) == 1) != bits[i] {
            let e = y[i] - f[i] as f64;
            f[i] += if e >= 0.0 { 1 } else { -1 };
        }
    }
    f
}

/// Closest-point decoder for the fine lattice, with fast paths for scaled
/// `Z^4` and `D4` in their standard coordinates.
#[derive(Debug, Clone)]
pub(crate) enum FineDecoder {
    Cubic(f64),
    Checkerboard(f64),
    General(Lattice),
}

impl FineDecoder {
    pub(crate) fn for_lattice(fine: &Lattice) -> Self {
        if let Some((family, mu)) = fine.family() {
            let standard = match family {
                Family::Z4 => Lattice::integer(4),
                Family::D4 => Lattice::d4(),
            };
            if let Ok(reference) = standard.scaled(mu) {
                let same = reference.real_basis().shape() == fine.real_basis().shape()
                    && (reference.real_basis() - fine.real_basis()).amax() < 1e-12 * mu;
                if same {
                    return match family {
                        Family::Z4 => FineDecoder::Cubic(mu),
                        Family::D4 => FineDecoder::Checkerboard(mu),
                    };
                }
            }
        }
        FineDecoder::General(fine.clone())
    }

    /// Nearest fine-lattice point in ambient coordinates.
    pub(crate) fn decode(&self, y: &[f64; 4]) -> Result<[f64; 4]> {
        Ok(match self {
            FineDecoder::Cubic(mu) => y.map(|v| (v / mu).round() * mu),
            FineDecoder::Checkerboard(mu) => {
                let f = nearest_d4(&y.map(|v| v / mu));
                f.map(|k| k as f64 * mu)
            }
            FineDecoder::General(lat) => {
                let cp = closest_point(lat, y)?;
                [cp.point[0], cp.point[1], cp.point[2], cp.point[3]]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exhaustive(soft: &[f64; 4]) -> [u8; 4] {
        let mut best = ([0u8; 4], f64::NEG_INFINITY);
        for w in 0u8..16 {
            if w.count_ones() % 2 == 1 {
                continue;
            }
            let bits = [w & 1, (w >> 1) & 1, (w >> 2) & 1, (w >> 3) & 1];
            let corr: f64 = (0..4)
                .map(|i| if bits[i] == 0 { soft[i] } else { -soft[i] })
                .sum();
            if corr > best.1 {
                best = (bits, corr);
            }
        }
        best.0
    }

    #[test]
    fn wagner_examples() {
        assert_eq!(wagner_decode_parity(&[1.0, 2.0, 3.0, 4.0]), [0, 0, 0, 0]);
        assert_eq!(wagner_decode_parity(&[3.0, 2.0, -1.0, 4.0]), [0, 0, 0, 0]);
        assert_eq!(wagner_decode_parity(&[-3.0, 2.0, -1.0, 4.0]), [1, 0, 1, 0]);
        assert_eq!(wagner_decode_parity(&[-3.0, 2.0, -1.0, -4.0]), [1, 0, 0, 1]);
    }

    #[test]
    fn wagner_is_ml_on_sign_patterns() {
        let mags = [0.3, 1.1, 2.5, 0.7];
        for pattern in 0u8..16 {
            let soft: [f64; 4] = std::array::from_fn(|i| {
                if pattern >> i & 1 == 1 {
                    -mags[i]
                } else {
                    mags[i]
                }
            });
            let out = wagner_decode_parity(&soft);
            assert_eq!(out.iter().fold(0, |p, b| p ^ b), 0);
            assert_eq!(out, exhaustive(&soft));
        }
    }

    #[test]
    fn nearest_d4_matches_search() {
        let d4 = Lattice::d4();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let y: [f64; 4] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let f = nearest_d4(&y);
            assert_eq!(f.iter().sum::<i64>().rem_euclid(2), 0);
            let dist = |p: &[f64]| p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            let cp = closest_point(&d4, &y).unwrap();
            let fp = f.map(|v| v as f64);
            assert!((dist(&fp) - cp.dist_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_paths_are_selected() {
        let half = Lattice::integer(4).scaled(0.5).unwrap();
        assert!(matches!(
            FineDecoder::for_lattice(&half),
            FineDecoder::Cubic(_)
        ));
        let hd4 = Lattice::d4().scaled(0.5).unwrap();
        assert!(matches!(
            FineDecoder::for_lattice(&hd4),
            FineDecoder::Checkerboard(_)
        ));
        let y = [0.3, -0.6, 0.1, 0.9];
        let general = FineDecoder::General(hd4.clone()).decode(&y).unwrap();
        let fast = FineDecoder::for_lattice(&hd4).decode(&y).unwrap();
        let dist = |p: &[f64; 4]| p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        assert!((dist(&general) - dist(&fast)).abs() < 1e-12);
    }
}
