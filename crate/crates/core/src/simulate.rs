//! Monte Carlo runs of the parity-sorting protocol.
//!
//! Every `(trial, hypothesis)` pair draws from its own ChaCha8 stream keyed by
//! the master seed, so results are identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_separation, ScenarioKind};
use crate::sliver::{decide, mode_probabilities, protocol_error, Hypothesis, ModeProbabilities};

/// Trials per hypothesis used when none is given.
pub const DEFAULT_TRIALS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub kind: ScenarioKind,
    pub k: f64,
    /// Shots per decision.
    pub m: u32,
    /// Decisions per hypothesis.
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        check_separation(self.k)?;
        if self.m == 0 {
            return Err(Error::Domain("m must be ≥ 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub wrong_h1: u64,
    pub wrong_h2: u64,
    /// Wrong decisions over all decisions, both hypotheses equally often.
    pub p_hat: f64,
    /// Binomial standard error of `p_hat` over `2 * trials` decisions.
    pub stderr: f64,
    pub p_theory: f64,
}

/// Random stream for one decision.
pub fn trial_stream(seed: u64, hypothesis: Hypothesis, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(hypothesis, trial));
    rng
}

fn stream_id(hypothesis: Hypothesis, trial: u64) -> u64 {
    let h = match hypothesis {
        Hypothesis::H1 => 0,
        Hypothesis::H2 => 1,
    };
    (trial << 1) | h
}

fn draw<R: Rng + ?Sized>(probs: &ModeProbabilities, hypothesis: Hypothesis, rng: &mut R) -> Outcome {
    if rng.random_bool(probs.odd(hypothesis)) {
        Outcome::Odd
    } else {
        Outcome::Even
    }
}

/// One detection under `hypothesis`.
pub fn sample_shot<R: Rng + ?Sized>(
    hypothesis: Hypothesis,
    kind: ScenarioKind,
    k: f64,
    rng: &mut R,
) -> Result<Outcome> {
    Ok(draw(&mode_probabilities(kind, k)?, hypothesis, rng))
}

pub fn run_experiment(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let probs = mode_probabilities(config.kind, config.k)?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let m = config.m;

    let wrong = |hypothesis: Hypothesis| -> Result<u64> {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = base.clone();
                rng.set_stream(stream_id(hypothesis, trial));
                let shots = (0..m).map(|_| draw(&probs, hypothesis, &mut rng) == Outcome::Odd);
                Ok(u64::from(decide(shots)? != hypothesis))
            })
            .sum()
    };
    let wrong_h1 = wrong(Hypothesis::H1)?;
    let wrong_h2 = wrong(Hypothesis::H2)?;

    let decisions = 2.0 * config.trials as f64;
    let p_hat = (wrong_h1 + wrong_h2) as f64 / decisions;
    Ok(SimReport {
        config: *config,
        wrong_h1,
        wrong_h2,
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / decisions).sqrt(),
        p_theory: protocol_error(config.kind, config.k, m)?.p_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ScenarioKind::*;

    fn cfg(kind: ScenarioKind, k: f64, m: u32, trials: u64, seed: u64) -> SimConfig {
        SimConfig { kind, k, m, trials, seed }
    }

    #[test]
    fn h1_and_coincident_h2_are_always_even() {
        let mut rng = trial_stream(7, Hypothesis::H1, 0);
        for _ in 0..10_000 {
            assert_eq!(sample_shot(Hypothesis::H1, Symmetric, 2.0, &mut rng).unwrap(), Outcome::Even);
            assert_eq!(sample_shot(Hypothesis::H2, Asymmetric, 0.0, &mut rng).unwrap(), Outcome::Even);
        }
    }

    #[test]
    fn odd_fraction_concentrates() {
        let n = 1_000_000u64;
        let mut rng = trial_stream(2024, Hypothesis::H2, 0);
        let odd = (0..n)
            .filter(|_| sample_shot(Hypothesis::H2, Symmetric, 2.0, &mut rng).unwrap() == Outcome::Odd)
            .count() as f64;
        let p = (1.0 - (-0.5f64).exp()) / 2.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((odd / n as f64 - p).abs() < 4.0 * sigma);
    }

    #[test]
    fn one_shot_symmetric_matches_theory() {
        let r = run_experiment(&cfg(Symmetric, 1.0, 1, 1000, 11)).unwrap();
        assert_eq!(r.wrong_h1, 0);
        assert!((r.p_theory - 0.4706).abs() < 1e-4);
        assert!((r.p_hat - r.p_theory).abs() < 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn fifty_shot_symmetric_matches_theory() {
        let r = run_experiment(&cfg(Symmetric, 2.0, 50, 100_000, 5)).unwrap();
        let expect = 0.5 * ((1.0 + (-0.5f64).exp()) / 2.0).powi(50);
        assert!((r.p_theory - expect).abs() < 1e-15);
        assert!((r.p_hat - r.p_theory).abs() < 3.0 * r.stderr.max(1e-300), "{r:?}");
    }

    #[test]
    fn deterministic_for_seed() {
        let c = cfg(Asymmetric, 0.8, 5, 5000, 99);
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
        let other = run_experiment(&SimConfig { seed: 100, ..c }).unwrap();
        assert_ne!(other.wrong_h2, run_experiment(&c).unwrap().wrong_h2);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let c = cfg(Symmetric, 1.3, 7, 20_000, 3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_experiment(&c)).unwrap();
        let b = four.install(|| run_experiment(&c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_experiment(&cfg(Symmetric, 1.0, 0, 10, 1)).is_err());
        assert!(run_experiment(&cfg(Symmetric, 1.0, 1, 0, 1)).is_err());
        assert!(run_experiment(&cfg(Symmetric, -1.0, 1, 10, 1)).is_err());
    }
}
