//! Floating-point reference models.
//!
//! ```text
//! single:   S_t  = α x_t + (1 - α) S_{t-1}
//! startup:  S_t  = x_t / n + (1 - 1/n) S_{t-1}            for n <= ⌊1/α⌋
//! double:   S²_t = α S_t + (1 - α) S²_{t-1}
//!           a_t  = 2 S_t - S²_t
//!           b_t  = α / (1 - α) · (S_t - S²_t)
//!           F_t  = a_t + b_t · L,  L = 1
//! ```
//!
//! [`FloatSmootherState::update`] is the combined production path: the
//! recursive mean runs for the first `⌊1/α⌋` observations, the second
//! statistic is seeded from the first on the last startup step, and double
//! smoothing takes over afterwards. The individual steps are exposed so each
//! can be driven on its own.

use std::collections::VecDeque;

use crate::error::{Error, Result};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// `⌊1/α⌋`, tolerant of the representation error in values like `1.0 / 7.0`.
pub fn inverse_alpha(alpha: f64) -> u64 {
    let inv = 1.0 / alpha;
    let nearest = inv.round();
    if (inv - nearest).abs() <= 1e-9 * nearest {
        nearest as u64
    } else {
        inv.floor() as u64
    }
}

/// Level/slope decomposition of a double-smoothed forecast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendForecast {
    pub level: f64,
    pub slope: f64,
    pub horizon: u32,
}

impl TrendForecast {
    pub fn value(&self) -> f64 {
        self.level + self.slope * f64::from(self.horizon)
    }
}

/// State of the floating-point smoother: `α`, the observation count and the
/// first and second smoothed statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatSmootherState {
    alpha: f64,
    n: u64,
    s1: f64,
    s2: f64,
    primed: bool,
    trend_active: bool,
}

impl FloatSmootherState {
    /// An empty smoother. No forecast is readable until the first update.
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            n: 0,
            s1: 0.0,
            s2: 0.0,
            primed: false,
            trend_active: false,
        })
    }

    /// A smoother whose statistics both start at `s0`.
    ///
    /// The seed only matters to [`single_smooth_update`](Self::single_smooth_update)
    /// and [`double_smooth_update`](Self::double_smooth_update); the combined
    /// [`update`](Self::update) starts with the recursive mean, which
    /// overwrites the seed on its first step.
    pub fn seeded(alpha: f64, s0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !s0.is_finite() {
            return Err(Error::NonFinite(s0));
        }
        Ok(Self {
            alpha,
            n: 0,
            s1: s0,
            s2: s0,
            primed: true,
            trend_active: false,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of recursive-mean steps, `⌊1/α⌋`.
    pub fn startup_len(&self) -> u64 {
        inverse_alpha(self.alpha)
    }

    pub fn s1(&self) -> Option<f64> {
        self.primed.then_some(self.s1)
    }

    pub fn s2(&self) -> Option<f64> {
        self.primed.then_some(self.s2)
    }

    /// Level/slope pair implied by the current statistics.
    pub fn trend(&self) -> Option<TrendForecast> {
        self.primed.then(|| self.trend_unchecked())
    }

    fn trend_unchecked(&self) -> TrendForecast {
        TrendForecast {
            level: 2.0 * self.s1 - self.s2,
            slope: self.alpha / (1.0 - self.alpha) * (self.s1 - self.s2),
            horizon: 1,
        }
    }

    /// Forecast produced by the most recent update: the trend forecast after
    /// a double-smoothing step, the first statistic otherwise.
    pub fn forecast(&self) -> Option<f64> {
        if !self.primed {
            None
        } else if self.trend_active {
            Some(self.trend_unchecked().value())
        } else {
            Some(self.s1)
        }
    }

    fn seed_if_unprimed(&mut self, x: f64) {
        if !self.primed {
            self.s1 = x;
            self.s2 = x;
            self.primed = true;
        }
    }

    /// One step of single exponential smoothing. An unprimed state takes `x`
    /// as its initial estimate.
    ///
    /// Panics on a non-finite observation.
    pub fn single_smooth_update(&mut self, x: f64) -> f64 {
        assert!(x.is_finite(), "non-finite observation {x}");
        self.seed_if_unprimed(x);
        self.n = self.n.saturating_add(1);
        self.trend_active = false;
        self.s1 = self.alpha * x + (1.0 - self.alpha) * self.s1;
        self.s1
    }

    /// One recursive-mean step with weight `1/n` on the new observation. The
    /// second statistic follows the first so the hand-over to double
    /// smoothing starts from `S² = S`.
    ///
    /// Panics on a non-finite observation.
    pub fn startup_update(&mut self, x: f64) -> f64 {
        assert!(x.is_finite(), "non-finite observation {x}");
        self.n = self.n.saturating_add(1);
        let inv_n = 1.0 / self.n as f64;
        self.s1 = inv_n * x + (1.0 - inv_n) * self.s1;
        self.s2 = self.s1;
        self.primed = true;
        self.trend_active = false;
        self.s1
    }

    /// One step of double exponential smoothing. An unprimed state takes `x`
    /// as the initial estimate of both statistics.
    ///
    /// Panics on a non-finite observation.
    pub fn double_smooth_update(&mut self, x: f64) -> TrendForecast {
        assert!(x.is_finite(), "non-finite observation {x}");
        self.seed_if_unprimed(x);
        self.n = self.n.saturating_add(1);
        self.s1 = self.alpha * x + (1.0 - self.alpha) * self.s1;
        self.s2 = self.alpha * self.s1 + (1.0 - self.alpha) * self.s2;
        self.trend_active = true;
        self.trend_unchecked()
    }

    /// Combined update: recursive mean while `n < ⌊1/α⌋`, double smoothing
    /// after. Returns the new forecast.
    pub fn update(&mut self, x: f64) -> f64 {
        if self.n < self.startup_len() {
            self.startup_update(x)
        } else {
            self.double_smooth_update(x).value()
        }
    }

    /// Drop all observations, keeping `α`.
    pub fn reset(&mut self) {
        *self = Self::new(self.alpha).expect("alpha was validated at construction");
    }
}

/// Mean of the most recent `window` observations. Before the window fills,
/// the mean of whatever has arrived.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingAverageState {
    window: usize,
    buffer: VecDeque<f64>,
}

impl MovingAverageState {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidWindow);
        }
        Ok(Self {
            window,
            buffer: VecDeque::with_capacity(window),
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn update(&mut self, x: f64) -> f64 {
        assert!(x.is_finite(), "non-finite observation {x}");
        if self.buffer.len() == self.window {
            self.buffer.pop_front();
        }
        self.buffer.push_back(x);
        self.mean()
    }

    pub fn forecast(&self) -> Option<f64> {
        (!self.buffer.is_empty()).then(|| self.mean())
    }

    // Summed fresh each time; N is small and a running sum drifts.
    fn mean(&self) -> f64 {
        self.buffer.iter().sum::<f64>() / self.buffer.len() as f64
    }
}

/// Weight of each of the last `k` observations in a single-smoothed value,
/// newest first: `α, α(1-α), ..., α(1-α)^(k-1)`.
pub fn es_weight_schedule(alpha: f64, k: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    Ok((0..k)
        .map(|i| alpha * (1.0 - alpha).powi(i as i32))
        .collect())
}

/// One row of the data-weight vs initial-estimate-weight table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialEstimateRow {
    pub i: usize,
    /// Weight of the `i`-th most recent observation, `α(1-α)^(i-1)`.
    pub observation_weight: f64,
    /// Combined weight of the `i` observations, `1 - (1-α)^i`.
    pub data_weight: f64,
    /// Weight left on the initial estimate `S_0`, `(1-α)^i`.
    pub initial_weight: f64,
}

impl InitialEstimateRow {
    pub fn at(alpha: f64, i: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let initial_weight = (1.0 - alpha).powi(i as i32);
        let observation_weight = if i == 0 {
            0.0
        } else {
            alpha * (1.0 - alpha).powi(i as i32 - 1)
        };
        Ok(Self {
            i,
            observation_weight,
            data_weight: 1.0 - initial_weight,
            initial_weight,
        })
    }
}

/// Rows `1..=k` of the data-weight vs initial-estimate-weight table.
pub fn initial_estimate_weights(alpha: f64, k: usize) -> Result<Vec<InitialEstimateRow>> {
    (1..=k).map(|i| InitialEstimateRow::at(alpha, i)).collect()
}

/// Weight carried by the first observation after `i` updates of the combined
/// model, for `i = 1..=k`: `1/i` through the startup region, then geometric
/// decay from `1/⌊1/α⌋`.
pub fn startup_weight_schedule(alpha: f64, k: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let n_alpha = inverse_alpha(alpha);
    Ok((1..=k as u64)
        .map(|i| {
            if i <= n_alpha {
                1.0 / i as f64
            } else {
                (1.0 - alpha).powi((i - n_alpha) as i32) / n_alpha as f64
            }
        })
        .collect())
}
