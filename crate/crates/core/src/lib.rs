//! Response-time forecasting with double exponential smoothing.
//!
//! The crate has four parts:
//!
//! * [`forecast_core`]: floating-point single/double exponential smoothing,
//!   the recursive-mean startup, a moving-average comparator and the
//!   analytical weight schedules of both models.
//! * [`integer_smoother`]: the integer-only production smoother with input
//!   clamping and an elapsed-time reset driven by an injectable [`Clock`].
//! * [`congestion_gate`]: a threshold admission gate that denies or delays
//!   new sessions while the forecast is above an overload threshold.
//! * [`workload_sim`]: scenario generators and a closed-loop runner that
//!   records per-step traces.

pub mod congestion_gate;
pub mod error;
pub mod forecast_core;
pub mod integer_smoother;
pub mod workload_sim;

pub use congestion_gate::{
    decide, CongestionGate, GateDecision, GateMode, GatePolicy, GateStats, RequestKind, Verdict,
};
pub use error::{Error, Result};
pub use forecast_core::{
    es_weight_schedule, initial_estimate_weights, startup_weight_schedule, FloatSmootherState,
    InitialEstimateRow, MovingAverageState, TrendForecast,
};
pub use integer_smoother::{
    clamp_observation, Clock, IntSmoother, IntSmootherConfig, IntSmootherState, ManualClock,
    SystemClock,
};
pub use workload_sim::{Event, Generator, Jitter, Pause, Scenario, SimTrace, TraceRow};
