//! Riemann zeta, divisor sums and the representation numbers of `Z^4` and `D4`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

// B_2, B_4, ..., B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const EM_OFFSET: u64 = 20;

/// `sum_{n >= m} n^{-s}` by a short direct sum and an Euler-Maclaurin tail.
fn zeta_from(m: u64, s: f64) -> f64 {
    let n_cut = m + EM_OFFSET;
    // add small terms first
    let mut head = 0.0;
    for n in (m..n_cut).rev() {
        head += (n as f64).powf(-s);
    }
    let n = n_cut as f64;
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // running factor s(s+1)...(s+2k-2) / (2k)! * N^{-s-2k+1}
    let mut factor = s * n.powf(-s - 1.0) / 2.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        tail += b * factor;
        let j = 2 * k as u64 + 2;
        factor *=
            (s + j as f64 - 1.0) * (s + j as f64) / ((j + 1) as f64 * (j + 2) as f64) / (n * n);
    }
    head + tail
}

/// Riemann zeta for real `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("riemann_zeta needs s > 1, got {s}")));
    }
    Ok(1.0 + zeta_from(2, s))
}

/// `zeta(s) - 1`, accurate to full relative precision for large `s`.
pub fn zeta_minus_one(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "zeta_minus_one needs s > 1, got {s}"
        )));
    }
    Ok(zeta_from(2, s))
}

/// Sum of the divisors of `n`.
pub fn divisor_sigma(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("divisor_sigma(0) is undefined".into()));
    }
    let mut total = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += d;
            if d * d != n {
                total += n / d;
            }
        }
        d += 1;
    }
    Ok(total)
}

/// Number of `k in Z^4` with `|k|^2 = n`, via Jacobi's four-square formula.
/// `r4(0) = 1` (the origin).
pub fn r4(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let sigma = |m: u64| divisor_sigma(m).expect("m >= 1");
    let quarter = if n.is_multiple_of(4) { sigma(n / 4) } else { 0 };
    8 * sigma(n) - 32 * quarter
}

/// Coefficient of `q^n` in the theta series of `D4`.
pub fn theta_d4_coeff(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        r4(n)
    } else {
        0
    }
}

pub(crate) const REP_TABLE_LEN: usize = 4001;

/// `r4(n)` for `0 <= n < REP_TABLE_LEN`, computed once with a divisor sieve.
pub(crate) fn r4_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut sigma = vec![0u64; REP_TABLE_LEN];
        for d in 1..REP_TABLE_LEN {
            for m in (d..REP_TABLE_LEN).step_by(d) {
                sigma[m] += d as u64;
            }
        }
        (0..REP_TABLE_LEN)
            .map(|n| match n {
                0 => 1,
                _ if n % 4 == 0 => 8 * sigma[n] - 32 * sigma[n / 4],
                _ => 8 * sigma[n],
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn classical_values() {
        assert!(rel(riemann_zeta(2.0).unwrap(), PI * PI / 6.0) < 1e-14);
        assert!(rel(riemann_zeta(4.0).unwrap(), PI.powi(4) / 90.0) < 1e-14);
        assert!(rel(riemann_zeta(8.0).unwrap(), PI.powi(8) / 9450.0) < 1e-14);
        assert!((riemann_zeta(7.0).unwrap() - 1.00835).abs() < 1e-5);
        assert!(rel(riemann_zeta(7.0).unwrap(), 1.008349277381923) < 1e-13);
        assert!(rel(riemann_zeta(1.5).unwrap(), 2.612375348685488) < 1e-13);
    }

    #[test]
    fn zeta_minus_one_keeps_precision() {
        // zeta(40) - 1 = 2^-40 (1 + 2^-40 3^... ) to leading order
        let v = zeta_minus_one(40.0).unwrap();
        let lead = 2f64.powi(-40) + 3f64.powi(-40) + 4f64.powi(-40);
        assert!(rel(v, lead) < 1e-12);
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(f64::NAN).is_err());
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(divisor_sigma(1).unwrap(), 1);
        assert_eq!(divisor_sigma(4).unwrap(), 7);
        assert_eq!(divisor_sigma(6).unwrap(), 12);
        assert_eq!(divisor_sigma(97).unwrap(), 98);
        assert!(divisor_sigma(0).is_err());
    }

    #[test]
    fn four_square_counts() {
        assert_eq!(r4(1), 8);
        assert_eq!(r4(2), 24);
        assert_eq!(r4(3), 32);
        assert_eq!(r4(4), 24);
        for n in 0..REP_TABLE_LEN as u64 {
            assert_eq!(r4_table()[n as usize], r4(n));
        }
    }

    #[test]
    fn d4_theta() {
        assert_eq!(theta_d4_coeff(0), 1);
        assert_eq!(theta_d4_coeff(1), 0);
        assert_eq!(theta_d4_coeff(2), 24);
        assert_eq!(theta_d4_coeff(3), 0);
        assert_eq!(theta_d4_coeff(4), 24);
    }
}
