//! Sphere enumeration (Fincke-Pohst with Schnorr-Euchner ordering) over the
//! Cholesky factor of the Gram matrix. Used for shell counting and for exact
//! closest-point search.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::Lattice;
use crate::error::{Error, Result};

/// Default cap on enumeration tree nodes.
pub const DEFAULT_POINT_BUDGET: u64 = 100_000_000;

const REL_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Shell {
    pub norm: f64,
    pub count: u64,
}

/// Counts of nonzero lattice vectors per squared norm, ascending in norm.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShellTable {
    pub entries: Vec<Shell>,
    pub max_norm: f64,
}

impl ShellTable {
    /// Count of vectors with squared norm `norm` (0 when absent).
    pub fn count_at(&self, norm: f64) -> u64 {
        self.entries
            .iter()
            .find(|s| (s.norm - norm).abs() <= 1e-9 * norm.max(1.0))
            .map_or(0, |s| s.count)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|s| s.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_norm(&self) -> Option<f64> {
        self.entries.first().map(|s| s.norm)
    }
}

/// Walks every integer vector `u` with `|R (u - center)|^2 <= radius_sq`.
///
/// `visit` receives the coefficients and the squared distance and returns
/// the (possibly reduced) radius to continue with.
fn enumerate_ball<F>(
    r: &DMatrix<f64>,
    center: &[f64],
    radius_sq: f64,
    budget: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[i64], f64) -> f64,
{
    let m = r.ncols();
    let mut radius_sq = radius_sq;
    let mut u = vec![0i64; m];
    // partial[i] = squared distance contributed by levels i..m
    let mut partial = vec![0.0f64; m + 1];
    let mut centers = vec![0.0f64; m];
    let mut start = vec![0i64; m];
    let mut step = vec![0u64; m];
    let mut sign = vec![1i64; m];
    let mut nodes: u64 = 0;

    let level_center = |i: usize, u: &[i64]| -> f64 {
        let mut c = center[i];
        for j in i + 1..m {
            c -= r[(i, j)] * (u[j] as f64 - center[j]) / r[(i, i)];
        }
        c
    };

    let mut i = m - 1;
    centers[i] = level_center(i, &u);
    start[i] = centers[i].round() as i64;
    sign[i] = if centers[i] >= start[i] as f64 { 1 } else { -1 };
    step[i] = 0;

    loop {
        u[i] = start[i] + zigzag(step[i], sign[i]);
        let d = r[(i, i)] * (u[i] as f64 - centers[i]);
        let dist = partial[i + 1] + d * d;
        nodes += 1;
        if nodes > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        if dist <= radius_sq * (1.0 + REL_SLACK) + 1e-12 {
            if i == 0 {
                radius_sq = visit(&u, dist);
                step[0] += 1;
            } else {
                partial[i] = dist;
                i -= 1;
                centers[i] = level_center(i, &u);
                start[i] = centers[i].round() as i64;
                sign[i] = if centers[i] >= start[i] as f64 { 1 } else { -1 };
                step[i] = 0;
            }
            continue;
        }
        // zigzag visits values in nondecreasing distance from the level
        // center, so the rest of this level is outside the ball too
        if i == m - 1 {
            return Ok(());
        }
        i += 1;
        step[i] += 1;
    }
}

fn zigzag(step: u64, sign: i64) -> i64 {
    if step == 0 {
        0
    } else if step % 2 == 1 {
        sign * step.div_ceil(2) as i64
    } else {
        -sign * (step / 2) as i64
    }
}

/// Exact shell counts of `lattice` for `0 < |x|^2 <= max_norm`.
pub fn enumerate_shells(lattice: &Lattice, max_norm: f64) -> Result<ShellTable> {
    enumerate_shells_with_budget(lattice, max_norm, DEFAULT_POINT_BUDGET)
}

pub fn enumerate_shells_with_budget(
    lattice: &Lattice,
    max_norm: f64,
    budget: u64,
) -> Result<ShellTable> {
    if !(max_norm >= 0.0 && max_norm.is_finite()) {
        return Err(Error::Domain(format!(
            "max_norm must be finite and >= 0, got {max_norm}"
        )));
    }
    let basis = lattice.real_basis();
    let center = vec![0.0; lattice.rank()];
    // quantized norm -> (representative norm, count)
    let mut buckets: HashMap<i64, (f64, u64)> = HashMap::new();
    let cut = max_norm * (1.0 + 1e-12) + 1e-12;
    enumerate_ball(lattice.chol(), &center, max_norm, budget, |u, _| {
        if u.iter().all(|&v| v == 0) {
            return max_norm;
        }
        let norm = exact_norm(basis, u);
        if norm <= cut {
            let key = (norm * 1e8).round() as i64;
            buckets.entry(key).or_insert((norm, 0)).1 += 1;
        }
        max_norm
    })?;
    let mut raw: Vec<(f64, u64)> = buckets.into_values().collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut entries: Vec<Shell> = Vec::with_capacity(raw.len());
    for (norm, count) in raw {
        match entries.last_mut() {
            Some(last) if (norm - last.norm).abs() <= 1e-9 * norm.max(1.0) => last.count += count,
            _ => entries.push(Shell { norm, count }),
        }
    }
    Ok(ShellTable { entries, max_norm })
}

/// All lattice points with `|x|^2 <= max_norm` (the zero vector included),
/// as `(coefficients, point)` in enumeration order sorted by norm then
/// coefficients.
pub fn points_within(lattice: &Lattice, max_norm: f64) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    let basis = lattice.real_basis();
    let center = vec![0.0; lattice.rank()];
    let mut out = Vec::new();
    let cut = max_norm * (1.0 + 1e-12) + 1e-12;
    enumerate_ball(
        lattice.chol(),
        &center,
        max_norm,
        DEFAULT_POINT_BUDGET,
        |u, _| {
            if exact_norm(basis, u) <= cut {
                out.push(u.to_vec());
            }
            max_norm
        },
    )?;
    let mut pts: Vec<(f64, Vec<i64>, Vec<f64>)> = out
        .into_iter()
        .map(|u| {
            let x = lattice.point(&u);
            (x.iter().map(|v| v * v).sum(), u, x)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(pts.into_iter().map(|(_, u, x)| (u, x)).collect())
}

fn exact_norm(basis: &DMatrix<f64>, u: &[i64]) -> f64 {
    let mut s = 0.0;
    for i in 0..basis.nrows() {
        let mut xi = 0.0;
        for (j, &uj) in u.iter().enumerate() {
            xi += basis[(i, j)] * uj as f64;
        }
        s += xi * xi;
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPoint {
    pub coeffs: Vec<i64>,
    pub point: Vec<f64>,
    pub dist_sq: f64,
}

/// Exact nearest lattice point to `target`.
///
/// A rounding (Babai) candidate fixes the initial search radius; the sphere
/// search then shrinks it to the true minimum. Ties keep the first point found.
pub fn closest_point(lattice: &Lattice, target: &[f64]) -> Result<ClosestPoint> {
    let c = lattice.coefficients(target)?;
    let r = lattice.chol();
    let m = c.len();
    let babai: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
    let coeff_dist = |u: &[i64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            let mut d = 0.0;
            for j in i..m {
                d += r[(i, j)] * (u[j] as f64 - c[j]);
            }
            s += d * d;
        }
        s
    };
    let mut best = babai.clone();
    let mut best_d = coeff_dist(&babai);
    enumerate_ball(r, &c, best_d, DEFAULT_POINT_BUDGET, |u, d| {
        if d < best_d * (1.0 - 1e-12) {
            best_d = d;
            best.copy_from_slice(u);
        }
        best_d
    })?;
    let point = lattice.point(&best);
    let dist_sq = point
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(ClosestPoint {
        coeffs: best,
        point,
        dist_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn z4_first_shells() {
        let t = enumerate_shells(&Lattice::integer(4), 4.0).unwrap();
        let counts: Vec<(f64, u64)> = t.entries.iter().map(|s| (s.norm, s.count)).collect();
        assert_eq!(counts, vec![(1.0, 8), (2.0, 24), (3.0, 32), (4.0, 24)]);
        assert_eq!(
            enumerate_shells(&Lattice::integer(4), 1.0)
                .unwrap()
                .count_at(1.0),
            8
        );
    }

    #[test]
    fn d4_first_shells() {
        let t = enumerate_shells(&Lattice::d4(), 3.0).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.count_at(2.0), 24);
        assert_eq!(t.count_at(1.0), 0);
        assert_eq!(t.count_at(3.0), 0);
    }

    #[test]
    fn complex_and_real_d4_agree() {
        let a = enumerate_shells(&Lattice::d4(), 40.0).unwrap();
        let b = enumerate_shells(&Lattice::d4_complex(), 40.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_table_below_minimum() {
        let t = enumerate_shells(&Lattice::d4(), 1.5).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn brute_force_box_matches() {
        let z4 = Lattice::integer(4);
        let t = enumerate_shells(&z4, 12.0).unwrap();
        let mut counts = [0u64; 13];
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    for d in -4i64..=4 {
                        let n = (a * a + b * b + c * c + d * d) as usize;
                        if n > 0 && n <= 12 {
                            counts[n] += 1;
                        }
                    }
                }
            }
        }
        for (n, &c) in counts.iter().enumerate().skip(1) {
            assert_eq!(t.count_at(n as f64), c, "norm {n}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_shells_with_budget(&Lattice::integer(4), 400.0, 1000).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { budget: 1000 });
    }

    #[test]
    fn closest_point_on_skewed_basis() {
        let g = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.95, 0.1]);
        let lat = Lattice::real(g, "skew").unwrap();
        let target = [0.4, 0.33];
        let cp = closest_point(&lat, &target).unwrap();
        let mut best = (f64::INFINITY, vec![]);
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let x = lat.point(&[a, b]);
                let d = (x[0] - target[0]).powi(2) + (x[1] - target[1]).powi(2);
                if d < best.0 {
                    best = (d, vec![a, b]);
                }
            }
        }
        assert_eq!(cp.coeffs, best.1);
        assert!((cp.dist_sq - best.0).abs() < 1e-12);
    }

    #[test]
    fn points_within_includes_origin() {
        let pts = points_within(&Lattice::integer(4), 1.0).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].0, vec![0, 0, 0, 0]);
    }
}
