use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::special::{r4_table, REP_TABLE_LEN};
use super::{SeriesControl, ZetaMode};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_shells, Family, Lattice};

/// Result of the shifted-zeta series together with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Contribution of the shells with norm below the shell cut (origin included).
    pub near: f64,
    /// The summed Mellin series over the far shells.
    pub series: f64,
    pub terms: usize,
    /// Bound on the omitted series terms.
    pub truncation_bound: f64,
}

fn rep_count(family: Family, n: usize) -> f64 {
    match family {
        Family::Z4 => r4_table()[n] as f64,
        Family::D4 if n.is_multiple_of(2) => r4_table()[n] as f64,
        Family::D4 => 0.0,
    }
}

/// Closed form of the Epstein zeta with `zeta(s) zeta(s-1)` set to one.
fn approx_family_zeta(family: Family, sigma: f64) -> f64 {
    match family {
        Family::Z4 => 8.0 * (1.0 - 4f64.powf(1.0 - sigma)),
        Family::D4 => 3.0 * 4f64.powf(2.0 - sigma) * (2f64.powf(sigma - 1.0) - 1.0),
    }
}

/// Source of the tail values `sum_{|x|^2 >= q} |x|^{-2 sigma}`.
enum Tail {
    Family {
        family: Family,
        mu2: f64,
        first: usize,
        mode: ZetaMode,
        ln_n: Vec<f64>,
    },
    Shells(Vec<(f64, f64)>),
}

impl Tail {
    fn value(&self, sigma: f64) -> f64 {
        match self {
            Tail::Family {
                family,
                mu2,
                first,
                mode: ZetaMode::Validated,
                ln_n,
            } => {
                // norms of mu * L are mu^2 n; sum small terms first
                let mut acc = 0.0;
                let weight = match family {
                    Family::Z4 => 1.0,
                    Family::D4 => 0.5,
                };
                // average growth r(n) ~ pi^2 n w beyond the table
                let last = (REP_TABLE_LEN - 1) as f64;
                acc += PI * PI * weight * last.powf(2.0 - sigma) / (sigma - 2.0);
                for n in (*first..REP_TABLE_LEN).rev() {
                    let c = rep_count(*family, n);
                    if c > 0.0 {
                        acc += c * (-sigma * ln_n[n]).exp();
                    }
                }
                acc * mu2.powf(-sigma)
            }
            Tail::Family {
                family,
                mu2,
                first,
                mode: ZetaMode::Approximate,
                ..
            } => {
                let near: f64 = (1..*first)
                    .map(|n| rep_count(*family, n) * (n as f64).powf(-sigma))
                    .sum();
                (approx_family_zeta(*family, sigma) - near) * mu2.powf(-sigma)
            }
            Tail::Shells(shells) => shells.iter().rev().map(|(n, c)| c * n.powf(-sigma)).sum(),
        }
    }
}

/// `zeta_L(s, a) = sum_{x in L} (a + |x|^2)^{-s}`: shells with norm `< q`
/// are summed exactly, the rest through the Mellin expansion
/// `sum_k (-a)^k Gamma(s+k) / (k! Gamma(s)) * zeta_tail(s + k)`.
///
/// Lattices tagged with a family (`Z^4`, `D4` and their scalings) get exact
/// tail values from the theta series; other lattices use their enumerated
/// shells up to `R^2` and support only [`ZetaMode::Validated`].
pub fn shifted_zeta_series(
    lattice: &Lattice,
    s: f64,
    a: f64,
    ctrl: &SeriesControl,
    mode: ZetaMode,
) -> Result<SeriesValue> {
    ctrl.validate()?;
    let q = ctrl.shell_cut;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("shift must be positive, got {a}")));
    }
    if a >= q {
        return Err(Error::SeriesDivergent { a, q });
    }
    if !(s > lattice.rank() as f64 / 2.0) {
        return Err(Error::Domain(format!(
            "shifted zeta needs s > rank/2, got {s}"
        )));
    }

    let (near, tail) = match lattice.family() {
        Some((family, mu)) => {
            let mu2 = mu * mu;
            // first n with mu^2 n >= q
            let first = ((q / mu2) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            if first >= REP_TABLE_LEN / 2 {
                return Err(Error::Domain(format!(
                    "shell cut {q} too large for scale {mu}"
                )));
            }
            if s <= 2.0 {
                return Err(Error::Domain(format!(
                    "shifted zeta series needs s > 2, got {s}"
                )));
            }
            let near: f64 = (0..first)
                .rev()
                .map(|n| rep_count(family, n) * (a + mu2 * n as f64).powf(-s))
                .sum();
            let ln_n = (0..REP_TABLE_LEN).map(|n| (n.max(1) as f64).ln()).collect();
            (
                near,
                Tail::Family {
                    family,
                    mu2,
                    first,
                    mode,
                    ln_n,
                },
            )
        }
        None => {
            if mode == ZetaMode::Approximate {
                return Err(Error::Domain(format!(
                    "no approximate closed form for lattice {}",
                    lattice.label()
                )));
            }
            let table = enumerate_shells(lattice, ctrl.sum_radius_sq)?;
            let mut near = a.powf(-s);
            let mut far = Vec::new();
            for sh in &table.entries {
                if sh.norm < q {
                    near += sh.count as f64 * (a + sh.norm).powf(-s);
                } else {
                    far.push((sh.norm, sh.count as f64));
                }
            }
            (near, Tail::Shells(far))
        }
    };

    let mut sum = 0.0;
    let mut coef = 1.0;
    let mut term = tail.value(s);
    for k in 0..ctrl.max_terms {
        sum += term;
        let kf = k as f64;
        coef *= -a * (s + kf) / (kf + 1.0);
        let next = coef * tail.value(s + kf + 1.0);
        let big_k = kf + 1.0;
        let factor = 1.0 - a * (s + big_k) / (q * (big_k + 1.0));
        let value = near + sum;
        if factor > 0.0 {
            let bound = next.abs() / factor;
            if bound < ctrl.rel_tol * value.abs() || next == 0.0 {
                return Ok(SeriesValue {
                    value,
                    near,
                    series: sum,
                    terms: k + 1,
                    truncation_bound: bound,
                });
            }
        }
        term = next;
    }
    Err(Error::SeriesNotConverged {
        max_terms: ctrl.max_terms,
        rel_tol: ctrl.rel_tol,
    })
}

/// Shifted zeta of `mu * family` with the family's default controls.
pub fn shifted_zeta_family(family: Family, mu: f64, s: f64, a: f64, mode: ZetaMode) -> Result<f64> {
    let base = match family {
        Family::Z4 => Lattice::integer(4),
        Family::D4 => Lattice::d4(),
    };
    let lattice = if mu == 1.0 { base } else { base.scaled(mu)? };
    let ctrl = SeriesControl::for_family(family);
    Ok(shifted_zeta_series(&lattice, s, a, &ctrl, mode)?.value)
}

/// The two candidate sums for `sum_k C(s+k-1, k) (-x)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resummation {
    /// `(1 - x)^s`
    OneMinusPower,
    /// `(1 + x)^{-s}`, the negative-binomial series.
    NegativeBinomial,
}

impl Resummation {
    pub fn eval(self, s: f64, x: f64) -> f64 {
        match self {
            Resummation::OneMinusPower => (1.0 - x).powf(s),
            Resummation::NegativeBinomial => (1.0 + x).powf(-s),
        }
    }
}

/// Both candidates measured against the explicitly summed series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResummationCheck {
    pub selected: Resummation,
    pub series: f64,
    pub one_minus_power_error: f64,
    pub negative_binomial_error: f64,
}

/// Sums `sum_k Gamma(s+k)/(k! Gamma(s)) (-x)^k` term by term and keeps the
/// candidate closed form that reproduces it.
pub fn select_resummation(s: f64, x: f64) -> Result<ResummationCheck> {
    if !(x > 0.0 && x < 1.0) || !(s > 0.0) {
        return Err(Error::Domain(format!(
            "resummation check needs 0 < x < 1 and s > 0, got s={s}, x={x}"
        )));
    }
    let mut sum = 0.0f64;
    let mut term = 1.0f64;
    let mut k = 0.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) || k < s {
        sum += term;
        term *= -x * (s + k) / (k + 1.0);
        k += 1.0;
        if k > 1e6 {
            return Err(Error::SeriesNotConverged {
                max_terms: 1_000_000,
                rel_tol: 1e-18,
            });
        }
    }
    let err = |r: Resummation| ((r.eval(s, x) - sum) / sum).abs();
    let (e1, e2) = (
        err(Resummation::OneMinusPower),
        err(Resummation::NegativeBinomial),
    );
    Ok(ResummationCheck {
        selected: if e2 <= e1 {
            Resummation::NegativeBinomial
        } else {
            Resummation::OneMinusPower
        },
        series: sum,
        one_minus_power_error: e1,
        negative_binomial_error: e2,
    })
}

/// Which closed form: the one valid for `0 < a < 2` or the one for `0 < a < 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedRange {
    Narrow,
    Wide,
}

impl ClosedRange {
    pub fn shell_cut(self) -> f64 {
        match self {
            ClosedRange::Narrow => 2.0,
            ClosedRange::Wide => 4.0,
        }
    }
}

fn check_shift(a: f64, range: ClosedRange) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("shift must be positive, got {a}")));
    }
    if a >= range.shell_cut() {
        return Err(Error::SeriesDivergent {
            a,
            q: range.shell_cut(),
        });
    }
    Ok(())
}

fn validated(family: Family, s: f64, a: f64, range: ClosedRange) -> Result<f64> {
    let lattice = match family {
        Family::Z4 => Lattice::integer(4),
        Family::D4 => Lattice::d4(),
    };
    let ctrl = SeriesControl::default().with_shell_cut(range.shell_cut());
    Ok(shifted_zeta_series(&lattice, s, a, &ctrl, ZetaMode::Validated)?.value)
}

/// `zeta_{Z^4}(s, a)` in closed form.
///
/// [`ZetaMode::Approximate`] returns
/// `a^-s + 8 (1+a)^-s - 8 * 4^{1-s} (1 - a/4)^s` on the narrow range and
/// `sum_{j<=3} r4(j) (a+j)^-s - 8 * 4^{1-s} (1-a/4)^s - 4^-s (r4(2)+r4(3)) (1-a/4)^s`
/// (stated as an upper bound) on the wide range. [`ZetaMode::Validated`]
/// evaluates the series with exact tails.
pub fn shifted_zeta_z4_closed(s: f64, a: f64, range: ClosedRange, mode: ZetaMode) -> Result<f64> {
    check_shift(a, range)?;
    match mode {
        ZetaMode::Validated => validated(Family::Z4, s, a, range),
        ZetaMode::Approximate => Ok(z4_resummed(s, a, range, Resummation::OneMinusPower)),
    }
}

/// `zeta_{D4}(s, a)` in closed form: `a^-s - 3 * 4^{2-s} (1-a/4)^s` on the
/// narrow range, plus `24 (a+2)^-s` on the wide range.
pub fn shifted_zeta_d4_closed(s: f64, a: f64, range: ClosedRange, mode: ZetaMode) -> Result<f64> {
    check_shift(a, range)?;
    match mode {
        ZetaMode::Validated => validated(Family::D4, s, a, range),
        ZetaMode::Approximate => Ok(d4_resummed(s, a, range, Resummation::OneMinusPower)),
    }
}

pub(crate) fn z4_resummed(s: f64, a: f64, range: ClosedRange, r: Resummation) -> f64 {
    let x = a / 4.0;
    match range {
        ClosedRange::Narrow => {
            a.powf(-s) + 8.0 * (1.0 + a).powf(-s) - 8.0 * 4f64.powf(1.0 - s) * r.eval(s, x)
        }
        ClosedRange::Wide => {
            let near: f64 = (0..=3u64)
                .rev()
                .map(|j| super::r4(j) as f64 * (a + j as f64).powf(-s))
                .sum();
            near - 8.0 * 4f64.powf(1.0 - s) * r.eval(s, x)
                - 4f64.powf(-s) * (super::r4(2) + super::r4(3)) as f64 * r.eval(s, x)
        }
    }
}

pub(crate) fn d4_resummed(s: f64, a: f64, range: ClosedRange, r: Resummation) -> f64 {
    let lead = a.powf(-s) - 3.0 * 4f64.powf(2.0 - s) * r.eval(s, a / 4.0);
    match range {
        ClosedRange::Narrow => lead,
        ClosedRange::Wide => lead + 24.0 * (a + 2.0).powf(-s),
    }
}
