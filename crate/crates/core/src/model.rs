//! Process parameters, urn state and the replacement rule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ball color. Rows and columns of the replacement matrix are indexed
/// white first, then blue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Blue,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::White => "white",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks the tenability conditions for `(a, delta, w0)`.
///
/// `a ≥ 1` and `delta ≥ 1` are required, and `w0` must be a multiple of `a`
/// so that a white draw can only happen when at least `a` white balls are
/// present. Under these conditions every stochastic path can be continued
/// forever.
pub fn validate(a: u64, delta: u64, w0: u64) -> Result<()> {
    if a < 1 {
        return Err(Error::NonPositiveAddition(a));
    }
    if delta < 1 {
        return Err(Error::NonPositiveDifferential(delta));
    }
    if !w0.is_multiple_of(a) {
        return Err(Error::IndivisibleInitialWhite { w0, a });
    }
    // b0 = w0 + delta must be representable.
    w0.checked_add(delta).ok_or(Error::OverflowAbort)?;
    Ok(())
}

/// One process instance: addition amount `a`, differential index `delta`
/// and initial white count `w0`. The initial blue count is `w0 + delta`.
///
/// Construction goes through [`validate`], so every value of this type is
/// tenable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    a: u64,
    delta: u64,
    w0: u64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    a: u64,
    delta: u64,
    w0: u64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.a, raw.delta, raw.w0)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            a: p.a,
            delta: p.delta,
            w0: p.w0,
        }
    }
}

impl ModelParams {
    pub fn new(a: u64, delta: u64, w0: u64) -> Result<Self> {
        validate(a, delta, w0)?;
        Ok(Self { a, delta, w0 })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn w0(&self) -> u64 {
        self.w0
    }

    /// Initial blue count, `w0 + delta`.
    pub fn b0(&self) -> u64 {
        self.w0 + self.delta
    }

    pub fn replacement_matrix(&self) -> ReplacementMatrix {
        ReplacementMatrix::new(self.a)
    }

    /// The urn at time zero.
    pub fn initial_state(&self) -> UrnState {
        UrnState {
            white: self.w0,
            blue: self.b0(),
            time: 0.0,
        }
    }

    /// `a`, `delta`, `w0` as floats, for the analytic formulas.
    pub(crate) fn as_f64(&self) -> (f64, f64, f64) {
        (self.a as f64, self.delta as f64, self.w0 as f64)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, delta={}, w0={})", self.a, self.delta, self.w0)
    }
}

/// The 2×2 replacement matrix `[[-a, -a], [a, a]]`.
///
/// Row = color drawn, column = color added.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplacementMatrix {
    entries: [[i64; 2]; 2],
}

impl ReplacementMatrix {
    pub fn new(a: u64) -> Self {
        let a = a as i64;
        Self {
            entries: [[-a, -a], [a, a]],
        }
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn row(&self, drawn: Color) -> [i64; 2] {
        match drawn {
            Color::White => self.entries[0],
            Color::Blue => self.entries[1],
        }
    }

    pub fn transpose(&self) -> [[i64; 2]; 2] {
        let e = self.entries;
        [[e[0][0], e[1][0]], [e[0][1], e[1][1]]]
    }
}

/// Counts of white and blue balls at process time `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UrnState {
    pub white: u64,
    pub blue: u64,
    pub time: f64,
}

impl UrnState {
    pub fn new(white: u64, blue: u64, time: f64) -> Self {
        Self { white, blue, time }
    }

    /// `τ = W + B`.
    pub fn total_balls(&self) -> u64 {
        self.white + self.blue
    }

    /// `B − W` as a signed integer.
    pub fn differential(&self) -> i64 {
        self.blue as i64 - self.white as i64
    }

    /// Executes the replacement rule for a drawn ball of `color`.
    ///
    /// Time is left untouched; advancing the clock is the simulator's job.
    pub fn apply_draw(&self, color: Color, a: u64) -> Result<UrnState> {
        match color {
            Color::White => {
                if self.white < a || self.blue < a {
                    return Err(Error::UntenableDraw {
                        white: self.white,
                        blue: self.blue,
                        a,
                    });
                }
                Ok(UrnState {
                    white: self.white - a,
                    blue: self.blue - a,
                    time: self.time,
                })
            }
            Color::Blue => {
                let white = self.white.checked_add(a).ok_or(Error::OverflowAbort)?;
                let blue = self.blue.checked_add(a).ok_or(Error::OverflowAbort)?;
                // The total must also fit, since it drives the clock rate.
                white.checked_add(blue).ok_or(Error::OverflowAbort)?;
                Ok(UrnState {
                    white,
                    blue,
                    time: self.time,
                })
            }
        }
    }

    /// True when this state satisfies every exact invariant of `params`:
    /// constant differential, `W ≡ w0 (mod a)`, and a nonempty urn.
    pub fn is_consistent_with(&self, params: &ModelParams) -> bool {
        self.differential() == params.delta() as i64
            && self.white % params.a() == params.w0() % params.a()
            && self.total_balls() >= params.delta()
    }
}

/// Free-function form of [`UrnState::total_balls`].
pub fn total_balls(state: &UrnState) -> u64 {
    state.total_balls()
}

/// Free-function form of [`UrnState::apply_draw`].
pub fn apply_draw(state: &UrnState, color: Color, a: u64) -> Result<UrnState> {
    state.apply_draw(color, a)
}
