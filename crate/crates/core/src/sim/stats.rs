use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Counts below this on either side switch the interval to Wilson's.
pub const WILSON_THRESHOLD: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    Normal,
    Wilson,
}

/// A binomial proportion with a two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub half_width: f64,
    pub low: f64,
    pub high: f64,
    pub method: CiMethod,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64, level: f64) -> Self {
        assert!(
            trials > 0 && successes <= trials,
            "invalid counts {successes}/{trials}"
        );
        let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
        let n = trials as f64;
        let p = successes as f64 / n;
        if successes < WILSON_THRESHOLD || trials - successes < WILSON_THRESHOLD {
            let denom = 1.0 + z * z / n;
            let center = (p + z * z / (2.0 * n)) / denom;
            let hw = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
            Proportion {
                successes,
                trials,
                estimate: p,
                half_width: hw,
                low: (center - hw).max(0.0),
                high: (center + hw).min(1.0),
                method: CiMethod::Wilson,
            }
        } else {
            let hw = z * (p * (1.0 - p) / n).sqrt();
            Proportion {
                successes,
                trials,
                estimate: p,
                half_width: hw,
                low: (p - hw).max(0.0),
                high: (p + hw).min(1.0),
                method: CiMethod::Normal,
            }
        }
    }
}
