//! Monte Carlo simulation of coset-coded Alamouti transmission to Eve.
//!
//! Every trial draws from its own ChaCha8 stream, selected by the grid index
//! and the trial index, and per-point results are integer success counts, so
//! the output does not depend on how rayon schedules the work.

mod decode;
mod stats;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{points_within, Family, NestedLatticePair, C64};

pub use decode::{nearest_d4, wagner_decode_parity};
pub use stats::{CiMethod, Proportion, WILSON_THRESHOLD};

use decode::FineDecoder;

/// Minimum trials per point for the normal-approximation interval.
pub const MIN_TRIALS: u64 = 1000;

const CONFIDENCE: f64 = 0.95;
// stream domain for the legitimate receiver
const BOB_DOMAIN: u64 = 1 << 63;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub pair: NestedLatticePair,
    pub n_e: usize,
    pub t: usize,
    pub gamma_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub seed: u64,
    /// Randomizers are the coarse-lattice points with every coordinate in
    /// `[-constellation_box, constellation_box]`.
    pub constellation_box: i64,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    /// `1/2 L` over `L` for `L` = `Z^4` or `D4`, with the default box `[-2, 2]^4`.
    pub fn for_family(
        family: Family,
        n_e: usize,
        gamma_grid: Vec<f64>,
        trials: u64,
        seed: u64,
    ) -> Self {
        let pair = match family {
            Family::Z4 => NestedLatticePair::half_z4(),
            Family::D4 => NestedLatticePair::half_d4(),
        };
        SimConfig {
            pair,
            n_e,
            t: 2,
            gamma_grid,
            trials_per_point: trials,
            seed,
            constellation_box: 2,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t != 2 {
            return Err(Error::Config(format!(
                "Alamouti transmission needs T = 2, got {}",
                self.t
            )));
        }
        if self.n_e < 2 {
            return Err(Error::Config(format!(
                "need n_e >= n_t = 2, got {}",
                self.n_e
            )));
        }
        if self.pair.fine().ambient_dim() != 4 || self.pair.fine().rank() != 4 {
            return Err(Error::Config(
                "Alamouti symbols need a rank-4 lattice in R^4".into(),
            ));
        }
        if self.trials_per_point < MIN_TRIALS {
            return Err(Error::Config(format!(
                "at least {MIN_TRIALS} trials per point are needed, got {}",
                self.trials_per_point
            )));
        }
        if self.gamma_grid.is_empty()
            || self.gamma_grid.iter().any(|g| !(*g > 0.0 && g.is_finite()))
            || self.gamma_grid.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::Config(
                "gamma grid must be positive and strictly increasing".into(),
            ));
        }
        if self.constellation_box < 0 {
            return Err(Error::Config(
                "constellation box must be nonnegative".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        Ok(())
    }
}

/// `n_e x n_t` matrix of i.i.d. `CN(0, sigma_h^2)` entries: real and
/// imaginary parts each have variance `sigma_h^2 / 2`.
pub fn sample_eve_channel<R: Rng + ?Sized>(
    n_e: usize,
    n_t: usize,
    sigma_h: f64,
    rng: &mut R,
) -> DMatrix<C64> {
    DMatrix::from_fn(n_e, n_t, |_, _| complex_gaussian(sigma_h * sigma_h, rng))
}

fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Precomputed pieces shared by all trials of a configuration.
#[derive(Debug, Clone)]
pub struct TrialContext {
    randomizers: Vec<[f64; 4]>,
    decoder: FineDecoder,
}

impl TrialContext {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let b = cfg.constellation_box as f64;
        let randomizers: Vec<[f64; 4]> = points_within(cfg.pair.coarse(), 4.0 * b * b + 1e-9)?
            .into_iter()
            .map(|(_, p)| [p[0], p[1], p[2], p[3]])
            .filter(|p| p.iter().all(|v| v.abs() <= b + 1e-9))
            .collect();
        Ok(TrialContext {
            randomizers,
            decoder: FineDecoder::for_lattice(cfg.pair.fine()),
        })
    }

    pub fn num_randomizers(&self) -> usize {
        self.randomizers.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub correct: bool,
    pub decoded: usize,
}

/// One coset transmission at SNR `gamma_e` (unit channel variance, noise
/// variance `1/gamma_e` per complex entry) followed by Alamouti combining,
/// nearest fine-lattice point decoding and reduction modulo the coarse lattice.
pub fn simulate_trial<R: Rng + ?Sized>(
    cfg: &SimConfig,
    ctx: &TrialContext,
    gamma_e: f64,
    message_index: usize,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let r = ctx.randomizers[rng.random_range(0..ctx.randomizers.len())];
    let x = cfg.pair.coset_encode(message_index, &r)?;
    let x1 = C64::new(x[0], x[1]);
    let x2 = C64::new(x[2], x[3]);

    let h = sample_eve_channel(cfg.n_e, 2, 1.0, rng);
    let noise_var = 1.0 / gamma_e;
    let mut num1 = C64::new(0.0, 0.0);
    let mut num2 = C64::new(0.0, 0.0);
    let mut gain = 0.0;
    for j in 0..cfg.n_e {
        let (h1, h2) = (h[(j, 0)], h[(j, 1)]);
        // columns of X = [[x1, x2], [-x2*, x1*]] are the two channel uses
        let z1 = h1 * x1 - h2 * x2.conj() + complex_gaussian(noise_var, rng);
        let z2 = h1 * x2 + h2 * x1.conj() + complex_gaussian(noise_var, rng);
        num1 += h1.conj() * z1 + h2 * z2.conj();
        num2 += h1.conj() * z2 - h2 * z1.conj();
        gain += h1.norm_sqr() + h2.norm_sqr();
    }
    let est1 = num1 / gain;
    let est2 = num2 / gain;
    let y = [est1.re, est1.im, est2.re, est2.im];
    let p = ctx.decoder.decode(&y)?;
    let decoded = cfg.pair.coset_of_point(&p)?;
    Ok(TrialOutcome {
        correct: decoded == message_index,
        decoded,
    })
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub gamma: f64,
    pub correct: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub fine: String,
    pub coarse: String,
    pub seed: u64,
    pub randomizers: usize,
    pub points: Vec<SimPoint>,
}

fn run_point(cfg: &SimConfig, ctx: &TrialContext, gamma: f64, domain: u64) -> Result<Proportion> {
    let cosets = cfg.pair.num_cosets();
    let successes = (0..cfg.trials_per_point)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut rng = trial_rng(cfg.seed, domain | i);
            let message = rng.random_range(0..cosets);
            Ok(u64::from(
                simulate_trial(cfg, ctx, gamma, message, &mut rng)?.correct,
            ))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Proportion::new(successes, cfg.trials_per_point, CONFIDENCE))
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

fn run(cfg: &SimConfig, grid: &[f64], domain_base: u64) -> Result<SimResult> {
    let ctx = TrialContext::new(cfg)?;
    let points = with_pool(cfg.threads, || {
        grid.iter()
            .enumerate()
            .map(|(g, &gamma)| {
                let domain = domain_base | ((g as u64) << 32);
                Ok(SimPoint {
                    gamma,
                    correct: run_point(cfg, &ctx, gamma, domain)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SimResult {
        fine: cfg.pair.fine().label().to_string(),
        coarse: cfg.pair.coarse().label().to_string(),
        seed: cfg.seed,
        randomizers: ctx.num_randomizers(),
        points,
    })
}

/// Eve's probability of decoding the right coset at every grid SNR.
pub fn estimate_pce(cfg: &SimConfig) -> Result<SimResult> {
    run(cfg, &cfg.gamma_grid, 0)
}

/// The legitimate receiver's rate at SNR `gamma_b`, through an independent
/// channel realisation of the same model.
pub fn estimate_pcb(cfg: &SimConfig, gamma_b: f64) -> Result<SimResult> {
    if !(gamma_b > 0.0 && gamma_b.is_finite()) {
        return Err(Error::Domain(format!(
            "gamma_b must be positive, got {gamma_b}"
        )));
    }
    run(cfg, &[gamma_b], BOB_DOMAIN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: Family, grid: Vec<f64>, trials: u64) -> SimConfig {
        SimConfig::for_family(family, 2, grid, trials, 2024)
    }

    #[test]
    fn channel_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let (mut mean, mut second) = (C64::new(0.0, 0.0), 0.0);
        for _ in 0..n {
            let h = sample_eve_channel(1, 1, 1.5, &mut rng)[(0, 0)];
            mean += h;
            second += h.norm_sqr();
        }
        mean /= n as f64;
        second /= n as f64;
        assert!(mean.norm() < 4.0 * 1.5 / (n as f64).sqrt());
        assert!((second / 2.25 - 1.0).abs() < 0.01);
    }

    #[test]
    fn randomizer_box() {
        let z = TrialContext::new(&cfg(Family::Z4, vec![1.0], 1000)).unwrap();
        assert_eq!(z.num_randomizers(), 625);
        let d = TrialContext::new(&cfg(Family::D4, vec![1.0], 1000)).unwrap();
        // even-sum vectors in {-2..2}^4
        assert_eq!(d.num_randomizers(), 313);
    }

    #[test]
    fn noiseless_and_deterministic() {
        let c = cfg(Family::D4, vec![1e9], 1000);
        let ctx = TrialContext::new(&c).unwrap();
        for k in 0..16 {
            let mut rng = trial_rng(5, k as u64);
            assert!(simulate_trial(&c, &ctx, 1e9, k, &mut rng).unwrap().correct);
        }
        let a = simulate_trial(&c, &ctx, 0.3, 3, &mut trial_rng(5, 77)).unwrap();
        let b = simulate_trial(&c, &ctx, 0.3, 3, &mut trial_rng(5, 77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn floor_and_ceiling() {
        for fam in [Family::Z4, Family::D4] {
            let r = estimate_pce(&cfg(fam, vec![1e-3, 1e4], 4000)).unwrap();
            let lo = &r.points[0].correct;
            assert!(
                (lo.estimate - 0.0625).abs() < 3.0 * lo.half_width,
                "{fam:?} {lo:?}"
            );
            assert!(r.points[1].correct.estimate > 0.99);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut c = cfg(Family::Z4, vec![0.5, 2.0], 2000);
        c.threads = Some(1);
        let one = estimate_pce(&c).unwrap();
        c.threads = Some(3);
        let three = estimate_pce(&c).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn bob_reference() {
        let c = cfg(Family::Z4, vec![1.0], 2000);
        let b = estimate_pcb(&c, 1e9).unwrap();
        assert_eq!(b.points[0].correct.successes, 2000);
        let hi = estimate_pcb(&c, 100.0).unwrap();
        assert!(hi.points[0].correct.estimate >= 0.99, "{:?}", hi.points[0]);
        assert!(estimate_pcb(&c, 0.0).is_err());
    }

    #[test]
    fn config_checks() {
        assert!(cfg(Family::Z4, vec![1.0], 10).validate().is_err());
        assert!(cfg(Family::Z4, vec![2.0, 1.0], 1000).validate().is_err());
        let mut c = cfg(Family::Z4, vec![1.0], 1000);
        c.t = 3;
        assert!(c.validate().is_err());
    }
}
