//! Upper bounds on Eve's average probability of correct decoding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_shells, Family, Lattice, SpaceTimeCodeword, C64};
use crate::zeta::{shifted_zeta_d4_closed, shifted_zeta_z4_closed, ClosedRange, ZetaMode};

/// Antenna counts, coherence time, Eve's SNR and the fine-lattice volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MimoScenario {
    pub n_t: usize,
    pub n_e: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub gamma_e: f64,
    pub vol_b: f64,
}

impl MimoScenario {
    pub fn new(n_t: usize, n_e: usize, t: usize, gamma_e: f64, vol_b: f64) -> Result<Self> {
        let sc = MimoScenario {
            n_t,
            n_e,
            t,
            gamma_e,
            vol_b,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// The 2x2 Alamouti setting over two channel uses.
    pub fn alamouti(n_e: usize, gamma_e: f64, vol_b: f64) -> Result<Self> {
        Self::new(2, n_e, 2, gamma_e, vol_b)
    }

    pub fn with_gamma(self, gamma_e: f64) -> Result<Self> {
        Self::new(self.n_t, self.n_e, self.t, gamma_e, self.vol_b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.n_e < self.n_t {
            return Err(Error::Config(format!(
                "need n_e >= n_t >= 1, got n_t={} n_e={}",
                self.n_t, self.n_e
            )));
        }
        if self.t == 0 {
            return Err(Error::Config("coherence time T must be at least 1".into()));
        }
        if !(self.gamma_e > 0.0) || !self.gamma_e.is_finite() {
            return Err(Error::Domain(format!(
                "gamma_e must be positive, got {}",
                self.gamma_e
            )));
        }
        if !(self.vol_b > 0.0) || !self.vol_b.is_finite() {
            return Err(Error::Domain(format!(
                "vol_b must be positive, got {}",
                self.vol_b
            )));
        }
        Ok(())
    }
}

/// Complex multivariate gamma `Gamma_p(n) = pi^{p(p-1)/2} prod_{k=1}^p Gamma(n-k+1)`.
pub fn multivariate_gamma(p: usize, n: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("multivariate gamma needs p >= 1".into()));
    }
    if !(n - p as f64 + 1.0 > 0.0) {
        return Err(Error::Domain(format!("Gamma_{p}({n}) hits a pole")));
    }
    let pf = p as f64;
    Ok(
        PI.powf(pf * (pf - 1.0) / 2.0)
            * (1..=p).map(|k| gamma(n - k as f64 + 1.0)).product::<f64>(),
    )
}

/// `C_MIMO = vol(L_b) Gamma_{n_t}(n_e + T) / (pi^{n_t T} Gamma_{n_t}(n_e))`.
pub fn c_mimo(sc: &MimoScenario) -> Result<f64> {
    sc.validate()?;
    let num = multivariate_gamma(sc.n_t, (sc.n_e + sc.t) as f64)?;
    let den = multivariate_gamma(sc.n_t, sc.n_e as f64)?;
    Ok(sc.vol_b * num / (PI.powi((sc.n_t * sc.t) as i32) * den))
}

/// `C_BF = (T!)^n vol(L_b) / pi^{nT}`.
pub fn c_bf(n: usize, t: usize, vol_b: f64) -> f64 {
    let t_fact: f64 = (1..=t).map(|k| k as f64).product();
    t_fact.powi(n as i32) * vol_b / PI.powi((n * t) as i32)
}

/// `C_FF = vol(L_b) / pi^n`.
pub fn c_ff(n: usize, vol_b: f64) -> f64 {
    vol_b / PI.powi(n as i32)
}

/// A bound evaluated over a finite codeword set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBound {
    pub value: f64,
    /// `value` divided by the channel constant.
    pub normalized: f64,
    /// Largest squared norm present in the codeword set.
    pub truncation_norm: f64,
}

/// `C_MIMO gamma^{T n_t} sum_X det(I + gamma X X^*)^{-n_e-T}` over the given
/// codewords; include the zero codeword to get its `det(I) = 1` term.
pub fn pce_mimo_bound(
    codewords: &[SpaceTimeCodeword],
    sc: &MimoScenario,
) -> Result<TruncatedBound> {
    if codewords.is_empty() {
        return Err(Error::EmptyCodewordSet);
    }
    let c = c_mimo(sc)?;
    let g = sc.gamma_e;
    let expo = -((sc.n_e + sc.t) as f64);
    let mut sum = 0.0;
    let mut trunc = 0.0f64;
    for (i, x) in codewords.iter().enumerate() {
        if x.n_t() != sc.n_t || x.t() != sc.t {
            return Err(Error::DimensionMismatch {
                expected: sc.n_t * sc.t,
                got: x.n_t() * x.t(),
            });
        }
        let d = x.det_shifted(g);
        if !(d > 0.0) {
            return Err(Error::RankViolation { index: i, det: d });
        }
        sum += d.powf(expo);
        trunc = trunc.max(x.frobenius_sq());
    }
    let normalized = g.powi((sc.t * sc.n_t) as i32) * sum;
    Ok(TruncatedBound {
        value: c * normalized,
        normalized,
        truncation_norm: trunc,
    })
}

/// High-SNR form `C_MIMO [gamma^{T n_t} + gamma^{-n_e n_t} criterion]`.
pub fn pce_mimo_highsnr(criterion_value: f64, sc: &MimoScenario) -> Result<f64> {
    Ok(c_mimo(sc)? * mimo_highsnr_normalized(criterion_value, sc))
}

pub(crate) fn mimo_highsnr_normalized(criterion_value: f64, sc: &MimoScenario) -> f64 {
    let g = sc.gamma_e;
    g.powi((sc.t * sc.n_t) as i32) + g.powi(-((sc.n_e * sc.n_t) as i32)) * criterion_value
}

/// Minimiser of the high-SNR bound: `((n_e/T) criterion)^{1/(n_t(n_e+T))}`.
pub fn gamma_e_min_mimo(criterion_value: f64, sc: &MimoScenario) -> Result<f64> {
    if !(criterion_value > 0.0) {
        return Err(Error::Domain(format!(
            "criterion must be positive, got {criterion_value}"
        )));
    }
    let e = 1.0 / (sc.n_t * (sc.n_e + sc.t)) as f64;
    Ok((sc.n_e as f64 / sc.t as f64 * criterion_value).powf(e))
}

// sum over codewords of prod_i (1 + gamma r_i)^{-expo}
fn product_sum(norms: &[Vec<f64>], n: usize, gamma: f64, expo: i32) -> Result<(f64, f64)> {
    if norms.is_empty() {
        return Err(Error::EmptyCodewordSet);
    }
    let mut sum = 0.0;
    let mut trunc = 0.0f64;
    for row in norms {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        sum += row
            .iter()
            .map(|r| (1.0 + gamma * r).powi(-expo))
            .product::<f64>();
        trunc = trunc.max(row.iter().sum());
    }
    Ok((sum, trunc))
}

/// Block fading: `C_BF gamma^{nT} sum_x prod_i (1 + gamma |x_i|^2)^{-1-T}`,
/// where each entry of `row_norms` lists the `n` per-antenna squared norms.
pub fn pce_blockfading_bound(
    row_norms: &[Vec<f64>],
    n: usize,
    t: usize,
    gamma_e: f64,
    vol_b: f64,
) -> Result<TruncatedBound> {
    check_gamma(gamma_e)?;
    let (sum, trunc) = product_sum(row_norms, n, gamma_e, 1 + t as i32)?;
    let normalized = gamma_e.powi((n * t) as i32) * sum;
    Ok(TruncatedBound {
        value: c_bf(n, t, vol_b) * normalized,
        normalized,
        truncation_norm: trunc,
    })
}

/// High-SNR block-fading form `C_BF [gamma^{nT} + gamma^{-n} criterion]`.
pub fn pce_blockfading_highsnr(
    product_criterion: f64,
    n: usize,
    t: usize,
    gamma_e: f64,
    vol_b: f64,
) -> f64 {
    c_bf(n, t, vol_b)
        * (gamma_e.powi((n * t) as i32) + gamma_e.powi(-(n as i32)) * product_criterion)
}

/// Fast fading: `C_FF gamma^n sum_x prod_i (1 + gamma |x_i|^2)^{-2}`.
pub fn pce_fastfading_bound(
    codewords: &[Vec<C64>],
    gamma_e: f64,
    vol_b: f64,
) -> Result<TruncatedBound> {
    check_gamma(gamma_e)?;
    let n = codewords.first().map_or(0, |c| c.len());
    let norms: Vec<Vec<f64>> = codewords
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    let (sum, trunc) = product_sum(&norms, n, gamma_e, 2)?;
    let normalized = gamma_e.powi(n as i32) * sum;
    Ok(TruncatedBound {
        value: c_ff(n, vol_b) * normalized,
        normalized,
        truncation_norm: trunc,
    })
}

/// `(criterion / T)^{1/(n(1+T))}`.
pub fn gamma_e_min_bf(product_criterion: f64, n: usize, t: usize) -> Result<f64> {
    if !(product_criterion > 0.0) {
        return Err(Error::Domain(format!(
            "criterion must be positive, got {product_criterion}"
        )));
    }
    Ok((product_criterion / t as f64).powf(1.0 / (n * (1 + t)) as f64))
}

fn check_gamma(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("gamma_e must be positive, got {g}")));
    }
    Ok(())
}

/// Gaussian wiretap bound `vol(L_b)/(2 pi sigma^2)^m sum_{|r| <= radius} exp(-|r|^2 / 2 sigma^2)`.
pub fn pce_gaussian_bound(
    lattice_e: &Lattice,
    sigma_e: f64,
    vol_b: f64,
    m: usize,
    radius: f64,
) -> Result<f64> {
    if m != lattice_e.rank() {
        return Err(Error::DimensionMismatch {
            expected: lattice_e.rank(),
            got: m,
        });
    }
    if !(sigma_e > 0.0) || !(vol_b > 0.0) || !(radius >= 0.0) {
        return Err(Error::Domain(
            "sigma_e, vol_b must be positive and radius nonnegative".into(),
        ));
    }
    let two_var = 2.0 * sigma_e * sigma_e;
    let table = enumerate_shells(lattice_e, radius * radius)?;
    let sum: f64 = table
        .entries
        .iter()
        .rev()
        .map(|sh| sh.count as f64 * (-sh.norm / two_var).exp())
        .sum::<f64>()
        + 1.0;
    Ok(vol_b / (PI * two_var).powi(m as i32) * sum)
}

/// `phi(gamma) = gamma^{-2 n_e} zeta(2(n_e+2), 1/gamma)`, so that the tight
/// Alamouti bound is `C_MIMO phi`.
pub fn alamouti_phi<F>(zeta_shifted: F, gamma_e: f64, n_e: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_gamma(gamma_e)?;
    let s = 2.0 * (n_e as f64 + 2.0);
    let z = zeta_shifted(s, 1.0 / gamma_e).map_err(|e| match e {
        Error::SeriesDivergent { q, .. } => Error::OutOfRegime {
            gamma: gamma_e,
            regime: format!("gamma_e > {}", 1.0 / q),
        },
        other => other,
    })?;
    Ok(gamma_e.powi(-2 * n_e as i32) * z)
}

fn tight(
    family: Family,
    gamma_e: f64,
    n_e: usize,
    mode: ZetaMode,
    range: ClosedRange,
) -> Result<f64> {
    if n_e < 2 {
        return Err(Error::Domain(format!("n_e must be at least 2, got {n_e}")));
    }
    let floor = 1.0 / range.shell_cut();
    if !(gamma_e > floor) {
        return Err(Error::OutOfRegime {
            gamma: gamma_e,
            regime: format!("gamma_e > {floor}"),
        });
    }
    alamouti_phi(
        |s, a| match family {
            Family::Z4 => shifted_zeta_z4_closed(s, a, range, mode),
            Family::D4 => shifted_zeta_d4_closed(s, a, range, mode),
        },
        gamma_e,
        n_e,
    )
}

/// Tight Alamouti bound divided by `C_MIMO`, for `gamma_e > 1/2`.
pub fn alamouti_tight_bound(
    family: Family,
    gamma_e: f64,
    n_e: usize,
    mode: ZetaMode,
) -> Result<f64> {
    tight(family, gamma_e, n_e, mode, ClosedRange::Narrow)
}

/// As [`alamouti_tight_bound`] but using the forms valid for `gamma_e > 1/4`.
pub fn alamouti_tight_bound_extended(
    family: Family,
    gamma_e: f64,
    n_e: usize,
    mode: ZetaMode,
) -> Result<f64> {
    tight(family, gamma_e, n_e, mode, ClosedRange::Wide)
}

/// Absolute tight bound `C_MIMO phi` with the 2x2 Alamouti constant.
pub fn alamouti_tight_bound_absolute(
    family: Family,
    gamma_e: f64,
    n_e: usize,
    mode: ZetaMode,
    vol_b: f64,
) -> Result<f64> {
    let sc = MimoScenario::alamouti(n_e, gamma_e, vol_b)?;
    Ok(c_mimo(&sc)? * alamouti_tight_bound(family, gamma_e, n_e, mode)?)
}

/// `sigma_{D4} = (2^{2 n_e + 3} + 1) / (3 * 2^{n_e + 1})`, as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyGain {
    pub numerator: u128,
    pub denominator: u128,
    pub value: f64,
    /// `n_e >= 2`, the setting the gain was derived for.
    pub in_regime: bool,
}

pub fn secrecy_gain_d4(n_e: u32) -> Result<SecrecyGain> {
    if n_e > 60 {
        return Err(Error::Domain(format!(
            "n_e = {n_e} overflows the exact fraction"
        )));
    }
    let mut num: u128 = (1u128 << (2 * n_e + 3)) + 1;
    let mut den: u128 = 3 * (1u128 << (n_e + 1));
    let g = gcd(num, den);
    num /= g;
    den /= g;
    Ok(SecrecyGain {
        numerator: num,
        denominator: den,
        value: num as f64 / den as f64,
        in_regime: n_e >= 2,
    })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Which bound a curve shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Finite-set bound over a truncated Alamouti codebook.
    MimoLoose,
    MimoHighsnr,
    AlamoutiTight,
    BlockFading,
    FastFading,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::MimoLoose,
        BoundKind::MimoHighsnr,
        BoundKind::AlamoutiTight,
        BoundKind::BlockFading,
        BoundKind::FastFading,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::MimoLoose => "mimo_loose",
            BoundKind::MimoHighsnr => "mimo_highsnr",
            BoundKind::AlamoutiTight => "alamouti_tight",
            BoundKind::BlockFading => "block_fading",
            BoundKind::FastFading => "fast_fading",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown bound kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub lattice: String,
    pub kind: BoundKind,
}

/// A bound sampled on an increasing SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub gamma_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Values divided by the channel constant.
    pub normalized: Vec<f64>,
    pub meta: CurveMeta,
}

impl BoundCurve {
    pub fn new(
        gamma_grid: Vec<f64>,
        values: Vec<f64>,
        normalized: Vec<f64>,
        meta: CurveMeta,
    ) -> Result<Self> {
        if gamma_grid.len() != values.len() || values.len() != normalized.len() {
            return Err(Error::DimensionMismatch {
                expected: gamma_grid.len(),
                got: values.len(),
            });
        }
        if gamma_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config(
                "gamma grid must be strictly increasing".into(),
            ));
        }
        if values
            .iter()
            .chain(&normalized)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::Domain(
                "bound values must be finite and positive".into(),
            ));
        }
        Ok(BoundCurve {
            gamma_grid,
            values,
            normalized,
            meta,
        })
    }
}
