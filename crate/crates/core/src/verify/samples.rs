use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, UrnState};
use crate::simulate::{run_trials, Simulator};

/// Trials `first_stream .. first_stream + count` of `seed`; trial `i` uses
/// the generator `(seed, first_stream + i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub seed: u64,
    pub first_stream: u64,
    pub count: u64,
}

impl SeedRange {
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.first_stream..self.first_stream + self.count).map(move |s| (self.seed, s))
    }
}

/// Per-trial observations of the urn at a fixed time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub params: ModelParams,
    pub t: f64,
    /// `W(t)` per trial.
    pub values: Vec<f64>,
    /// Paired `(W(t), B(t))` counts per trial. Empty for synthetic sets.
    pub records: Vec<(u64, u64)>,
    pub seeds: Option<SeedRange>,
}

impl SampleSet {
    /// A sample set not produced by the simulator (controls, external data).
    pub fn from_values(params: ModelParams, t: f64, values: Vec<f64>) -> Self {
        Self {
            params,
            t,
            values,
            records: Vec::new(),
            seeds: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `W(t)/t` per trial.
    pub fn scaled(&self) -> Vec<f64> {
        self.values.iter().map(|w| w / self.t).collect()
    }

    /// `B(t)/t` per trial.
    pub fn scaled_blue(&self) -> Vec<f64> {
        self.records.iter().map(|&(_, b)| b as f64 / self.t).collect()
    }
}

/// Simulates `trials` independent urns to time `t` and records `W(t)` and
/// `B(t)`. Trial `i` runs on stream `i` of `seed`.
pub fn collect_samples(params: &ModelParams, t: f64, trials: usize, seed: u64) -> Result<SampleSet> {
    if trials == 0 {
        return Err(Error::TooFewTrials { got: 0, need: 1 });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidHorizon(t));
    }
    let states: Vec<UrnState> = run_trials(trials, seed, 0, |rng| {
        Simulator::new(*params, rng).advance_to(t, |_| {})
    })?;
    Ok(SampleSet {
        params: *params,
        t,
        values: states.iter().map(|s| s.white as f64).collect(),
        records: states.iter().map(|s| (s.white, s.blue)).collect(),
        seeds: Some(SeedRange {
            seed,
            first_stream: 0,
            count: trials as u64,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::mean_w;
    use crate::verify::stats::Summary;

    #[test]
    fn zero_time_sample_is_initial() {
        let p = ModelParams::new(2, 1, 6).unwrap();
        let s = collect_samples(&p, 0.0, 1, 9).unwrap();
        assert_eq!(s.values, vec![6.0]);
        assert_eq!(s.records, vec![(6, 7)]);
    }

    #[test]
    fn samples_respect_mod_a_reachability() {
        let p = ModelParams::new(3, 2, 3).unwrap();
        let s = collect_samples(&p, 4.0, 500, 1).unwrap();
        assert!(s.records.iter().all(|&(w, b)| w % 3 == 0 && b == w + 2));
    }

    #[test]
    fn samples_are_reproducible() {
        let p = ModelParams::new(1, 2, 0).unwrap();
        let a = collect_samples(&p, 2.0, 200, 77).unwrap();
        let b = collect_samples(&p, 2.0, 200, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seeds.unwrap().pairs().nth(5), Some((77, 5)));
    }

    #[test]
    fn sample_mean_matches_closed_form() {
        let p = ModelParams::new(1, 1, 0).unwrap();
        let s = collect_samples(&p, 10.0, 100_000, 2024).unwrap();
        let sum = Summary::of(&s.values);
        let target = mean_w(&p, 10.0);
        assert!((sum.mean - target).abs() <= 4.0 * sum.se_mean(), "{} vs {target}", sum.mean);
    }

    #[test]
    fn zero_trials_rejected() {
        let p = ModelParams::new(1, 1, 0).unwrap();
        assert!(matches!(collect_samples(&p, 1.0, 0, 0), Err(Error::TooFewTrials { .. })));
    }
}
