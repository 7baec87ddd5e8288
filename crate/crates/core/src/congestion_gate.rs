//! Threshold admission control on the smoothed response-time forecast.
//!
//! New sessions are turned away (or told to retry later) while the forecast
//! is strictly above the overload threshold. Requests belonging to a
//! transaction already under way are always admitted so that started work
//! can finish.

use crate::error::{Error, Result};
use crate::integer_smoother::{Clock, IntSmoother};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequestKind {
    NewSession,
    InProgress,
}

/// What happens to a new session when the gate is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateMode {
    Deny,
    /// Ask the caller to re-offer the request after `amount` time units.
    Delay {
        amount: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GatePolicy {
    threshold: i32,
    mode: GateMode,
}

impl GatePolicy {
    /// `threshold` shares units with the observations and must be positive.
    pub fn new(threshold: i32, mode: GateMode) -> Result<Self> {
        if threshold <= 0 {
            return Err(Error::InvalidThreshold(threshold.into()));
        }
        Ok(Self { threshold, mode })
    }

    pub fn deny_above(threshold: i32) -> Result<Self> {
        Self::new(threshold, GateMode::Deny)
    }

    pub fn threshold(&self) -> i32 {
        self.threshold
    }

    pub fn mode(&self) -> GateMode {
        self.mode
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Admit,
    Deny,
    Delay { amount: u64 },
}

impl Verdict {
    pub fn is_admit(&self) -> bool {
        matches!(self, Verdict::Admit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateDecision {
    pub verdict: Verdict,
    pub forecast_at_decision: i32,
    pub request_kind: RequestKind,
}

/// Decide a single request. Pure in its arguments.
pub fn decide(policy: &GatePolicy, forecast: i32, request_kind: RequestKind) -> GateDecision {
    let verdict = match request_kind {
        RequestKind::InProgress => Verdict::Admit,
        RequestKind::NewSession if forecast > policy.threshold => match policy.mode {
            GateMode::Deny => Verdict::Deny,
            GateMode::Delay { amount } => Verdict::Delay { amount },
        },
        RequestKind::NewSession => Verdict::Admit,
    };
    GateDecision {
        verdict,
        forecast_at_decision: forecast,
        request_kind,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateStats {
    pub admitted: u64,
    pub denied: u64,
    pub delayed: u64,
    pub decisions: u64,
}

impl GateStats {
    pub fn record(&mut self, verdict: Verdict) {
        match verdict {
            Verdict::Admit => self.admitted += 1,
            Verdict::Deny => self.denied += 1,
            Verdict::Delay { .. } => self.delayed += 1,
        }
        self.decisions += 1;
    }
}

/// A policy plus running tallies of what it decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongestionGate {
    policy: GatePolicy,
    stats: GateStats,
}

impl CongestionGate {
    pub fn new(policy: GatePolicy) -> Self {
        Self {
            policy,
            stats: GateStats::default(),
        }
    }

    pub fn policy(&self) -> &GatePolicy {
        &self.policy
    }

    pub fn stats(&self) -> GateStats {
        self.stats
    }

    /// Decide against an already computed forecast and count the verdict.
    pub fn decide(&mut self, forecast: i32, request_kind: RequestKind) -> GateDecision {
        let decision = decide(&self.policy, forecast, request_kind);
        self.stats.record(decision.verdict);
        decision
    }

    /// Fold the observation into `smoother`, then decide against the fresh
    /// forecast.
    pub fn observe_and_decide<C: Clock + ?Sized>(
        &mut self,
        smoother: &mut IntSmoother,
        x: i32,
        request_kind: RequestKind,
        clock: &C,
    ) -> (GateDecision, i32) {
        let forecast = smoother.update(x, clock);
        (self.decide(forecast, request_kind), forecast)
    }
}
