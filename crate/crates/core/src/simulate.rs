//! Exact event-driven simulation of the poissonized urn.
//!
//! Every ball carries an independent `Exp(1)` clock. The minimum of `n` such
//! clocks is `Exp(n)` and the ball that rings is uniform among the `n`, so a
//! single exponential wait at rate `W + B` followed by a count-proportional
//! color draw reproduces the per-ball construction exactly with O(1) work
//! per epoch.
//!
//! # Random numbers
//!
//! Each trajectory owns a [`RandomSource`]: a ChaCha8 generator
//! (`rand_chacha` 0.3) seeded with `seed_from_u64(seed)` and switched to
//! stream `stream_id`. Waiting times use inverse-transform sampling,
//! `-ln(U) / rate` with `U` uniform on the open interval `(0, 1)`; colors use
//! an unbiased integer draw in `0..W+B`. Identical `(seed, stream_id)` pairs
//! give bit-identical trajectories on every platform.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Color, ModelParams, UrnState};

/// A seeded, stream-addressable generator. One per trajectory.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `(0, 1)`.
    pub fn open_unit(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }

    /// Inverse-transform exponential variate with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.open_unit().ln() / rate
    }
}

/// Samples the time to the next epoch and the color of the ringing ball.
///
/// The wait is `Exp(W + B)`; the color is white with probability
/// `W / (W + B)`, independently of the wait.
pub fn next_epoch(state: &UrnState, rng: &mut RandomSource) -> Result<(f64, Color)> {
    let total = state.total_balls();
    if total == 0 {
        return Err(Error::EmptyUrn);
    }
    let wait = rng.exponential(total as f64);
    let color = if rng.below(total) < state.white {
        Color::White
    } else {
        Color::Blue
    };
    Ok((wait, color))
}

/// One ring of the superposed clock and the state it produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochEvent {
    pub epoch_time: f64,
    pub color: Color,
    pub state_after: UrnState,
}

/// A fully recorded path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub initial: UrnState,
    pub events: Vec<EpochEvent>,
    pub horizon: f64,
}

impl Trajectory {
    /// State at time `t`: the state after the last epoch at or before `t`.
    pub fn state_at(&self, t: f64) -> Result<UrnState> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::OutOfHorizon {
                t,
                horizon: self.horizon,
            });
        }
        let idx = self.events.partition_point(|e| e.epoch_time <= t);
        let mut state = match idx {
            0 => self.initial,
            k => self.events[k - 1].state_after,
        };
        state.time = t;
        Ok(state)
    }

    pub fn final_state(&self) -> UrnState {
        let mut state = self
            .events
            .last()
            .map_or(self.initial, |e| e.state_after);
        state.time = self.horizon;
        state
    }
}

/// Free-function form of [`Trajectory::state_at`].
pub fn state_at(traj: &Trajectory, t: f64) -> Result<UrnState> {
    traj.state_at(t)
}

/// Incremental simulator. Advancing in several steps consumes the random
/// stream exactly as one long run would: a wait that overshoots a stop time
/// is kept pending, not redrawn.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: ModelParams,
    state: UrnState,
    rng: RandomSource,
    pending: Option<(f64, Color)>,
}

impl Simulator {
    pub fn new(params: ModelParams, rng: RandomSource) -> Self {
        Self::from_state(params, params.initial_state(), rng)
    }

    /// Starts from an arbitrary state, e.g. a realized `X(s)` to branch from.
    pub fn from_state(params: ModelParams, state: UrnState, rng: RandomSource) -> Self {
        Self {
            params,
            state,
            rng,
            pending: None,
        }
    }

    pub fn state(&self) -> UrnState {
        self.state
    }

    /// Runs every epoch with time `≤ t_end`, calling `on_event` after each.
    /// Leaves the state stamped with `t_end`.
    pub fn advance_to<F>(&mut self, t_end: f64, mut on_event: F) -> Result<UrnState>
    where
        F: FnMut(&EpochEvent),
    {
        if !t_end.is_finite() || t_end < self.state.time {
            return Err(Error::InvalidHorizon(t_end));
        }
        let a = self.params.a();
        loop {
            let (epoch_time, color) = match self.pending.take() {
                Some(p) => p,
                None => {
                    let (wait, color) = next_epoch(&self.state, &mut self.rng)?;
                    (self.state.time + wait, color)
                }
            };
            if epoch_time > t_end {
                self.pending = Some((epoch_time, color));
                self.state.time = t_end;
                return Ok(self.state);
            }
            let mut next = self.state.apply_draw(color, a)?;
            next.time = epoch_time;
            self.state = next;
            on_event(&EpochEvent {
                epoch_time,
                color,
                state_after: next,
            });
        }
    }
}

/// Simulates on `[0, t_end]` and records every epoch.
pub fn simulate_until(
    params: &ModelParams,
    t_end: f64,
    rng: RandomSource,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidHorizon(t_end));
    }
    let mut events = Vec::new();
    let mut sim = Simulator::new(*params, rng);
    sim.advance_to(t_end, |e| events.push(*e))?;
    Ok(Trajectory {
        params: *params,
        initial: params.initial_state(),
        events,
        horizon: t_end,
    })
}

/// Snapshot-only simulation: the states at each of `times` (nondecreasing,
/// nonnegative). Memory stays O(len(times)) regardless of the epoch count.
pub fn snapshots(params: &ModelParams, times: &[f64], rng: RandomSource) -> Result<Vec<UrnState>> {
    check_snapshot_times(times)?;
    let mut sim = Simulator::new(*params, rng);
    times
        .iter()
        .map(|&t| sim.advance_to(t, |_| {}))
        .collect()
}

pub(crate) fn check_snapshot_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(Error::Config(format!(
                "snapshot times must be finite, nonnegative and nondecreasing (got {t} after {prev})"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// The embedded discrete-time chain: `n_draws` successive draws with color
/// probabilities proportional to counts. Returned states carry `time = 0`;
/// index `k` is the urn after `k` draws.
pub fn simulate_discrete(
    params: &ModelParams,
    n_draws: usize,
    mut rng: RandomSource,
) -> Result<Vec<UrnState>> {
    let a = params.a();
    let mut state = params.initial_state();
    let mut path = Vec::with_capacity(n_draws + 1);
    path.push(state);
    for _ in 0..n_draws {
        let total = state.total_balls();
        if total == 0 {
            return Err(Error::EmptyUrn);
        }
        let color = if rng.below(total) < state.white {
            Color::White
        } else {
            Color::Blue
        };
        state = state.apply_draw(color, a)?;
        path.push(state);
    }
    Ok(path)
}

/// Runs `trials` independent jobs, job `i` on stream `first_stream + i` of
/// `seed`. Results come back in trial order whatever the thread schedule.
pub fn run_trials<T, F>(trials: usize, seed: u64, first_stream: u64, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RandomSource) -> Result<T> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| job(RandomSource::new(seed, first_stream + i)))
        .collect()
}
