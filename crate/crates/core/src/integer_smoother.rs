//! Integer-only double exponential smoothing.
//!
//! With `n_α = ⌊1/α⌋` every weight becomes a ratio of small integers, and
//! each statistic is a single truncating division:
//!
//! ```text
//! startup (n < n_α):  n += 1
//!                     S  = (x + (n - 1) S) / n
//!                     S² = S,  F = S
//! ongoing:            S  = (x + (n_α - 1) S) / n_α
//!                     S² = (S + (n_α - 1) S²) / n_α
//!                     F  = 2S - S² + (S - S²) / (n_α - 1)      (F = S when n_α = 1)
//! ```
//!
//! Division truncates toward zero, as C does for signed integers, so the
//! slope term of a falling series rounds up rather than down. Observations
//! are clamped to `[i32::MIN / n_α, i32::MAX / n_α]`, which keeps every
//! intermediate in 32 bits.
//!
//! When more than `reset_interval` whole seconds pass between updates, the
//! observation count drops back to zero and the next observation restarts
//! the recursive mean.

use std::sync::atomic::{AtomicI64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

/// Source of whole-second timestamps.
pub trait Clock {
    fn now_seconds(&self) -> i64;
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now_seconds(&self) -> i64 {
        (**self).now_seconds()
    }
}

/// Wall-clock seconds since the Unix epoch.
#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_seconds(&self) -> i64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0)
    }
}

/// A clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock {
    now: AtomicI64,
}

impl ManualClock {
    pub fn new(start: i64) -> Self {
        Self {
            now: AtomicI64::new(start),
        }
    }

    pub fn set(&self, now: i64) {
        self.now.store(now, Ordering::Relaxed);
    }

    pub fn advance(&self, seconds: i64) {
        self.now.fetch_add(seconds, Ordering::Relaxed);
    }
}

impl Clock for ManualClock {
    fn now_seconds(&self) -> i64 {
        self.now.load(Ordering::Relaxed)
    }
}

/// Limit `x` so that `x + (n_alpha - 1) * s` cannot overflow for any `s`
/// inside the same range.
pub fn clamp_observation(x: i32, n_alpha: i32) -> i32 {
    debug_assert!(n_alpha >= 1);
    x.clamp(i32::MIN / n_alpha, i32::MAX / n_alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntSmootherConfig {
    n_alpha: i32,
    reset_interval: i64,
}

impl IntSmootherConfig {
    pub const DEFAULT_N_ALPHA: i32 = 10;
    pub const DEFAULT_RESET_INTERVAL: i64 = 5;

    pub fn new(n_alpha: i32, reset_interval: i64) -> Result<Self> {
        if n_alpha < 1 {
            return Err(Error::InvalidNAlpha(n_alpha.into()));
        }
        if reset_interval < 0 {
            return Err(Error::InvalidResetInterval(reset_interval));
        }
        Ok(Self {
            n_alpha,
            reset_interval,
        })
    }

    /// `⌊1/α⌋`.
    pub fn n_alpha(&self) -> i32 {
        self.n_alpha
    }

    /// Longest gap, in seconds, that does not reset the smoother.
    pub fn reset_interval(&self) -> i64 {
        self.reset_interval
    }
}

impl Default for IntSmootherConfig {
    fn default() -> Self {
        Self {
            n_alpha: Self::DEFAULT_N_ALPHA,
            reset_interval: Self::DEFAULT_RESET_INTERVAL,
        }
    }
}

/// Everything the smoother keeps between observations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntSmootherState {
    n: i32,
    s1: i32,
    s2: i32,
    ft: i32,
    last_update: Option<i64>,
}

impl IntSmootherState {
    /// Observation sequence number since the last (re)start, capped at `n_α`.
    pub fn n(&self) -> i32 {
        self.n
    }

    /// First smoothed statistic.
    pub fn s1(&self) -> i32 {
        self.s1
    }

    /// Second smoothed statistic.
    pub fn s2(&self) -> i32 {
        self.s2
    }

    /// Timestamp of the most recent update.
    pub fn last_update(&self) -> Option<i64> {
        self.last_update
    }

    pub fn is_primed(&self) -> bool {
        self.last_update.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntSmoother {
    config: IntSmootherConfig,
    state: IntSmootherState,
}

impl IntSmoother {
    pub fn new(config: IntSmootherConfig) -> Self {
        Self {
            config,
            state: IntSmootherState::default(),
        }
    }

    pub fn config(&self) -> &IntSmootherConfig {
        &self.config
    }

    pub fn state(&self) -> &IntSmootherState {
        &self.state
    }

    /// Feed one observation, reading the time from `clock`.
    pub fn update<C: Clock + ?Sized>(&mut self, x: i32, clock: &C) -> i32 {
        self.update_at(x, clock.now_seconds())
    }

    /// Feed one observation taken at `now` (whole seconds).
    pub fn update_at(&mut self, x: i32, now: i64) -> i32 {
        let n_alpha = self.config.n_alpha;
        let x = clamp_observation(x, n_alpha);
        let st = &mut self.state;

        if let Some(last) = st.last_update {
            if now.saturating_sub(last) > self.config.reset_interval {
                st.n = 0;
            }
        }
        st.last_update = Some(now);

        if st.n >= n_alpha {
            st.s1 = (x + (n_alpha - 1) * st.s1) / n_alpha;
            st.s2 = (st.s1 + (n_alpha - 1) * st.s2) / n_alpha;
            st.ft = if n_alpha > 1 {
                2 * st.s1 - st.s2 + (st.s1 - st.s2) / (n_alpha - 1)
            } else {
                st.s1
            };
        } else {
            st.n += 1;
            st.s1 = (x + (st.n - 1) * st.s1) / st.n;
            st.s2 = st.s1;
            st.ft = st.s1;
        }
        st.ft
    }

    /// Forecast from the most recent update.
    pub fn current_forecast(&self) -> Result<i32> {
        if self.state.is_primed() {
            Ok(self.state.ft)
        } else {
            Err(Error::Unprimed)
        }
    }

    /// Level term `a_t = 2S - S²`, or `S` when `n_α = 1`.
    pub fn level(&self) -> Result<i32> {
        self.current_forecast()?;
        let st = &self.state;
        Ok(if self.config.n_alpha > 1 {
            2 * st.s1 - st.s2
        } else {
            st.s1
        })
    }

    /// Slope term `b_t = (S - S²) / (n_α - 1)`, zero when `n_α = 1`.
    pub fn slope(&self) -> Result<i32> {
        self.current_forecast()?;
        let n_alpha = self.config.n_alpha;
        Ok(if n_alpha > 1 {
            (self.state.s1 - self.state.s2) / (n_alpha - 1)
        } else {
            0
        })
    }
}
