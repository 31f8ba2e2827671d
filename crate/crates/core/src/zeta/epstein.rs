use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::special::riemann_zeta;
use super::SeriesControl;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_shells, Family, Lattice, ShellTable};

/// A truncated lattice sum with a rigorous over-estimate of the omitted tail:
/// the exact value lies in `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracketed {
    pub value: f64,
    pub tail_bound: f64,
}

impl Bracketed {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.value - slack && x <= self.upper() + slack
    }
}

/// Volume of the unit ball in `R^d`.
fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / statrs::function::gamma::gamma(d as f64 / 2.0 + 1.0)
}

/// Bound on `sum_{|x| > R} (|x|^2)^{-s}` from the point count
/// `N(r) <= C_d (r + rho)^d / V`, integrated by parts.
pub(crate) fn lattice_tail_bound(lattice: &Lattice, s: f64, radius_sq: f64) -> f64 {
    let d = lattice.rank() as f64;
    let r = radius_sq.sqrt();
    let rho = lattice.covering_radius_bound();
    2.0 * s * unit_ball_volume(lattice.rank()) * (1.0 + rho / r).powf(d) / lattice.volume()
        * r.powf(d - 2.0 * s)
        / (2.0 * s - d)
}

fn check_abscissa(lattice: &Lattice, s: f64) -> Result<()> {
    let half_rank = lattice.rank() as f64 / 2.0;
    if !(s > half_rank) {
        return Err(Error::Domain(format!(
            "Epstein zeta of a rank-{} lattice needs s > {half_rank}, got {s}",
            lattice.rank()
        )));
    }
    Ok(())
}

/// Shell-ordered sum of `f(norm)` over all nonzero shells.
fn sum_shells(table: &ShellTable, f: impl Fn(f64) -> f64) -> f64 {
    // shells are stored in increasing norm; add from the smallest terms up
    table
        .entries
        .iter()
        .rev()
        .map(|sh| sh.count as f64 * f(sh.norm))
        .sum()
}

/// `sum_{0 < |x|^2 <= R^2} |x|^{-2s}` plus a tail over-estimate.
pub fn epstein_zeta_direct(lattice: &Lattice, s: f64, ctrl: &SeriesControl) -> Result<Bracketed> {
    check_abscissa(lattice, s)?;
    let table = enumerate_shells(lattice, ctrl.sum_radius_sq)?;
    Ok(Bracketed {
        value: sum_shells(&table, |n| n.powf(-s)),
        tail_bound: lattice_tail_bound(lattice, s, ctrl.sum_radius_sq),
    })
}

/// `sum_{|x|^2 <= R^2} (a + |x|^2)^{-s}`, origin included, plus a tail over-estimate.
pub fn shifted_zeta_direct(
    lattice: &Lattice,
    s: f64,
    a: f64,
    ctrl: &SeriesControl,
) -> Result<Bracketed> {
    check_abscissa(lattice, s)?;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("shift must be positive, got {a}")));
    }
    let table = enumerate_shells(lattice, ctrl.sum_radius_sq)?;
    Ok(Bracketed {
        value: sum_shells(&table, |n| (a + n).powf(-s)) + a.powf(-s),
        // (a + n)^{-s} < n^{-s}
        tail_bound: lattice_tail_bound(lattice, s, ctrl.sum_radius_sq),
    })
}

fn check_closed(s: f64) -> Result<()> {
    if !(s > 2.0) {
        return Err(Error::Domain(format!("closed form needs s > 2, got {s}")));
    }
    Ok(())
}

/// `zeta_{Z^4}(s) = 8 (1 - 4^{1-s}) zeta(s) zeta(s-1)`.
pub fn epstein_zeta_z4(s: f64) -> Result<f64> {
    check_closed(s)?;
    Ok(8.0 * (1.0 - 4f64.powf(1.0 - s)) * riemann_zeta(s)? * riemann_zeta(s - 1.0)?)
}

/// `zeta_{D4}(s) = 3 * 4^{2-s} (2^{s-1} - 1) zeta(s) zeta(s-1)`.
pub fn epstein_zeta_d4(s: f64) -> Result<f64> {
    check_closed(s)?;
    Ok(3.0
        * 4f64.powf(2.0 - s)
        * (2f64.powf(s - 1.0) - 1.0)
        * riemann_zeta(s)?
        * riemann_zeta(s - 1.0)?)
}

/// `zeta_{mu L}(s) = mu^{-2s} zeta_L(s)`.
pub fn epstein_zeta_scaled(zeta_of_base: f64, mu: f64, s: f64) -> f64 {
    mu.powf(-2.0 * s) * zeta_of_base
}

/// Closed-form Epstein zeta of `mu * family`.
pub fn epstein_zeta_family(family: Family, mu: f64, s: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {mu}")));
    }
    let base = match family {
        Family::Z4 => epstein_zeta_z4(s)?,
        Family::D4 => epstein_zeta_d4(s)?,
    };
    Ok(epstein_zeta_scaled(base, mu, s))
}

/// Closed-form Epstein zeta for any lattice that carries a known family tag.
pub fn epstein_zeta_closed(lattice: &Lattice, s: f64) -> Result<f64> {
    let (family, mu) = lattice.family().ok_or_else(|| {
        Error::Domain(format!(
            "no closed form known for lattice {}",
            lattice.label()
        ))
    })?;
    epstein_zeta_family(family, mu, s)
}
