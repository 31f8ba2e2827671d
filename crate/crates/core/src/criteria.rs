//! Design criteria: the sums a coarse lattice should minimise, and rankings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{points_within, Lattice, SpaceTimeCodeword, C64};
use crate::zeta::epstein_zeta_closed;

/// Default truncation `|x|^2 <= 50` for finite criterion sums.
pub const DEFAULT_TRUNCATION_NORM: f64 = 50.0;

const SINGULAR_TOL: f64 = 1e-12;

/// `sum_{X != 0} det(X X^*)^{-(n_e + T)}`.
pub fn criterion_mimo(codewords: &[SpaceTimeCodeword], n_e: usize, t: usize) -> Result<f64> {
    if codewords.is_empty() {
        return Err(Error::EmptyCodewordSet);
    }
    let expo = -((n_e + t) as f64);
    let mut sum = 0.0;
    for (i, x) in codewords.iter().enumerate() {
        let d = x.det_xx_star();
        let scale = x.frobenius_sq().max(1.0).powi(x.n_t() as i32);
        if !(d > SINGULAR_TOL * scale) {
            return Err(Error::RankViolation { index: i, det: d });
        }
        sum += d.powf(expo);
    }
    Ok(sum)
}

fn product_criterion(norms: &[Vec<f64>], n: usize, expo: i32) -> Result<f64> {
    if norms.is_empty() {
        return Err(Error::EmptyCodewordSet);
    }
    let mut sum = 0.0;
    for (i, row) in norms.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if row.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::ProductDistanceViolation { index: i });
        }
        sum += row.iter().product::<f64>().powi(-expo);
    }
    Ok(sum)
}

/// `sum_{x != 0} (prod_i |x_i|^2)^{-(1+T)}` over per-antenna squared row norms.
pub fn criterion_blockfading(row_norms: &[Vec<f64>], n: usize, t: usize) -> Result<f64> {
    product_criterion(row_norms, n, 1 + t as i32)
}

/// `sum_{x != 0} (prod_i |x_i|^2)^{-2}`.
pub fn criterion_fastfading(codewords: &[Vec<C64>], n: usize) -> Result<f64> {
    let norms: Vec<Vec<f64>> = codewords
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    product_criterion(&norms, n, 2)
}

/// The Alamouti criterion in closed form: `zeta_L(2(n_e + 2))`.
pub fn criterion_alamouti_closed(lattice: &Lattice, n_e: usize) -> Result<f64> {
    if n_e < 2 {
        return Err(Error::Domain(format!("n_e must be at least 2, got {n_e}")));
    }
    epstein_zeta_closed(lattice, 2.0 * (n_e as f64 + 2.0))
}

/// Alamouti codewords of all nonzero points of a rank-4 real lattice with
/// `|x|^2 <= max_norm`, in order of increasing norm.
pub fn alamouti_codebook(lattice: &Lattice, max_norm: f64) -> Result<Vec<SpaceTimeCodeword>> {
    if lattice.ambient_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: lattice.ambient_dim(),
        });
    }
    Ok(points_within(lattice, max_norm)?
        .into_iter()
        .skip(1)
        .map(|(_, p)| SpaceTimeCodeword::alamouti_from_real(&p))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Mimo,
    BlockFading,
    FastFading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMethod {
    DirectSum,
    ZetaClosedForm,
}

impl FromStr for CriterionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct_sum" | "direct" => Ok(CriterionMethod::DirectSum),
            "zeta_closed_form" | "closed" => Ok(CriterionMethod::ZetaClosedForm),
            other => Err(Error::Config(format!("unknown criterion method {other:?}"))),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Mimo => "mimo",
            ChannelKind::BlockFading => "block_fading",
            ChannelKind::FastFading => "fast_fading",
        })
    }
}

impl fmt::Display for CriterionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriterionMethod::DirectSum => "direct_sum",
            CriterionMethod::ZetaClosedForm => "zeta_closed_form",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub lattice_label: String,
    pub channel_kind: ChannelKind,
    pub value: f64,
    /// Squared-norm truncation; `None` for closed forms over the whole lattice.
    pub truncation_norm: Option<f64>,
    pub method: CriterionMethod,
    /// Fundamental volume of the lattice the criterion was evaluated on.
    pub volume: f64,
}

impl CriterionReport {
    /// Alamouti criterion from the zeta closed form.
    pub fn alamouti_closed(lattice: &Lattice, n_e: usize) -> Result<Self> {
        Ok(CriterionReport {
            lattice_label: lattice.label().to_string(),
            channel_kind: ChannelKind::Mimo,
            value: criterion_alamouti_closed(lattice, n_e)?,
            truncation_norm: None,
            method: CriterionMethod::ZetaClosedForm,
            volume: lattice.volume(),
        })
    }

    /// Alamouti criterion summed over the codebook `|x|^2 <= max_norm`.
    pub fn alamouti_direct(lattice: &Lattice, n_e: usize, max_norm: f64) -> Result<Self> {
        let book = alamouti_codebook(lattice, max_norm)?;
        Ok(CriterionReport {
            lattice_label: lattice.label().to_string(),
            channel_kind: ChannelKind::Mimo,
            value: criterion_mimo(&book, n_e, 2)?,
            truncation_norm: Some(max_norm),
            method: CriterionMethod::DirectSum,
            volume: lattice.volume(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGain {
    pub better: String,
    pub worse: String,
    /// `worse.value / better.value`
    pub gain: f64,
}

/// Reports sorted best (smallest) first, with the gain of every pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<CriterionReport>,
    pub pairwise: Vec<PairGain>,
}

/// Ranks reports of one channel kind over lattices of equal volume.
pub fn compare_lattices(reports: &[CriterionReport]) -> Result<Ranking> {
    let first = reports
        .first()
        .ok_or_else(|| Error::IncomparableReports("no reports to compare".into()))?;
    for r in reports {
        if r.channel_kind != first.channel_kind {
            return Err(Error::IncomparableReports(format!(
                "mixed channel kinds {} and {}",
                first.channel_kind, r.channel_kind
            )));
        }
        if ((r.volume - first.volume) / first.volume).abs() > 1e-9 {
            return Err(Error::IncomparableReports(format!(
                "volumes differ: {} has {}, {} has {}",
                first.lattice_label, first.volume, r.lattice_label, r.volume
            )));
        }
        if !(r.value > 0.0) {
            return Err(Error::IncomparableReports(format!(
                "{} has nonpositive criterion {}",
                r.lattice_label, r.value
            )));
        }
    }
    let mut order = reports.to_vec();
    order.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.lattice_label.cmp(&b.lattice_label))
    });
    let mut pairwise = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            pairwise.push(PairGain {
                better: order[i].lattice_label.clone(),
                worse: order[j].lattice_label.clone(),
                gain: order[j].value / order[i].value,
            });
        }
    }
    Ok(Ranking { order, pairwise })
}
