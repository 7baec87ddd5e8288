//! Observation-stream generators and a closed-loop runner.
//!
//! A [`Scenario`] describes a latency series (constant, step, ramp, burst or
//! a replayed list), when each sample arrives on a simulated clock, and an
//! optional pause that opens a gap in arrivals. [`Scenario::run`] feeds the
//! samples through an [`IntSmoother`] in order and, given a policy, asks a
//! [`CongestionGate`] about one request per sample.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::congestion_gate::{
    CongestionGate, GateDecision, GatePolicy, GateStats, RequestKind, Verdict,
};
use crate::error::{Error, Result};
use crate::integer_smoother::{IntSmoother, IntSmootherConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Constant {
        value: i32,
    },
    /// `before` until sample `switch_at` (1-based), `after` from then on.
    Step {
        before: i32,
        after: i32,
        switch_at: usize,
    },
    /// `intercept + slope * (t - 1)`.
    Ramp {
        intercept: i32,
        slope: i32,
    },
    /// `overload` for samples `start..start + len`, `base` elsewhere.
    Burst {
        base: i32,
        overload: i32,
        start: usize,
        len: usize,
    },
    Replay {
        values: Vec<i32>,
    },
}

impl Generator {
    fn value_at(&self, t: usize) -> i64 {
        match *self {
            Generator::Constant { value } => value.into(),
            Generator::Step {
                before,
                after,
                switch_at,
            } => if t < switch_at { before } else { after }.into(),
            Generator::Ramp { intercept, slope } => {
                i64::from(intercept) + i64::from(slope) * (t as i64 - 1)
            }
            Generator::Burst {
                base,
                overload,
                start,
                len,
            } => if t >= start && t < start.saturating_add(len) {
                overload
            } else {
                base
            }
            .into(),
            Generator::Replay { ref values } => values[t - 1].into(),
        }
    }

    fn is_synthetic(&self) -> bool {
        !matches!(self, Generator::Replay { .. })
    }
}

/// Additive latency noise, drawn from a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jitter {
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: u32 },
    /// Exponential with the given mean, always non-negative.
    Exponential { mean: f64 },
}

/// A gap of `gap_seconds` between sample `after_count` and the next one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pause {
    pub after_count: usize,
    pub gap_seconds: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub time: i64,
    pub x: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub generator: Generator,
    pub length: usize,
    pub pause: Option<Pause>,
    /// Seconds between consecutive samples outside the pause.
    pub spacing_seconds: i64,
    pub start_time: i64,
    pub jitter: Option<Jitter>,
    pub seed: u64,
    /// Fraction of gate requests that belong to sessions already in progress.
    pub in_progress_share: f64,
}

impl Scenario {
    pub fn new(generator: Generator, length: usize) -> Self {
        Self {
            generator,
            length,
            pause: None,
            spacing_seconds: 1,
            start_time: 0,
            jitter: None,
            seed: 0,
            in_progress_share: 0.0,
        }
    }

    /// Replay `values` one per sample.
    pub fn replay(values: Vec<i32>) -> Self {
        let length = values.len();
        Self::new(Generator::Replay { values }, length)
    }

    pub fn with_pause(mut self, after_count: usize, gap_seconds: i64) -> Self {
        self.pause = Some(Pause {
            after_count,
            gap_seconds,
        });
        self
    }

    pub fn with_spacing(mut self, seconds: i64) -> Self {
        self.spacing_seconds = seconds;
        self
    }

    pub fn with_jitter(mut self, jitter: Jitter, seed: u64) -> Self {
        self.jitter = Some(jitter);
        self.seed = seed;
        self
    }

    pub fn with_in_progress_share(mut self, share: f64, seed: u64) -> Self {
        self.in_progress_share = share;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.length == 0 {
            return bad("length must be at least 1".into());
        }
        if let Some(p) = self.pause {
            if p.after_count == 0 || p.after_count >= self.length {
                return bad(format!(
                    "pause after sample {} must fall inside 1..{}",
                    p.after_count, self.length
                ));
            }
            if p.gap_seconds < 0 {
                return bad(format!("negative pause gap {}", p.gap_seconds));
            }
        }
        if self.spacing_seconds < 0 {
            return bad(format!("negative spacing {}", self.spacing_seconds));
        }
        if !(0.0..=1.0).contains(&self.in_progress_share) {
            return bad(format!(
                "in-progress share {} outside [0, 1]",
                self.in_progress_share
            ));
        }
        match self.jitter {
            Some(Jitter::Exponential { mean }) if !(mean.is_finite() && mean > 0.0) => {
                return bad(format!("exponential jitter mean {mean} must be positive"));
            }
            _ => {}
        }
        match &self.generator {
            Generator::Step { switch_at, .. } if *switch_at == 0 => {
                return bad("step switch sample is 1-based".into());
            }
            Generator::Burst { start, .. } if *start == 0 => {
                return bad("burst start sample is 1-based".into());
            }
            Generator::Replay { values } if values.len() < self.length => {
                return bad(format!(
                    "replay has {} values, scenario wants {}",
                    values.len(),
                    self.length
                ));
            }
            _ => {}
        }
        for t in 1..=self.length {
            let v = self.generator.value_at(t);
            if i32::try_from(v).is_err() {
                return bad(format!("sample {t} value {v} overflows 32 bits"));
            }
            if self.generator.is_synthetic() && v < 0 {
                return bad(format!("sample {t} would be a negative latency {v}"));
            }
        }
        Ok(())
    }

    fn event_time(&self, t: usize) -> i64 {
        let mut time = self.start_time + (t as i64 - 1) * self.spacing_seconds;
        if let Some(p) = self.pause {
            if t > p.after_count {
                time += p.gap_seconds - self.spacing_seconds;
            }
        }
        time
    }

    /// Timestamped samples, deterministic for a fixed seed.
    pub fn generate(&self) -> Result<Vec<Event>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let exp = match self.jitter {
            Some(Jitter::Exponential { mean }) => {
                Some(Exp::new(1.0 / mean).map_err(|e| Error::InvalidScenario(e.to_string()))?)
            }
            _ => None,
        };
        Ok((1..=self.length)
            .map(|t| {
                let base = self.generator.value_at(t);
                let x = match (self.jitter, &exp) {
                    (None, _) => base,
                    (Some(Jitter::Uniform { half_width }), _) => {
                        let h = i64::from(half_width);
                        (base + rng.random_range(-h..=h)).max(0)
                    }
                    (Some(Jitter::Exponential { .. }), Some(exp)) => {
                        base + exp.sample(&mut rng).round() as i64
                    }
                    (Some(Jitter::Exponential { .. }), None) => unreachable!(),
                };
                Event {
                    time: self.event_time(t),
                    x: x.clamp(i32::MIN.into(), i32::MAX.into()) as i32,
                }
            })
            .collect())
    }

    /// Drive a fresh smoother (and gate, if `policy` is given) through the
    /// scenario.
    pub fn run(&self, config: IntSmootherConfig, policy: Option<GatePolicy>) -> Result<SimTrace> {
        let events = self.generate()?;
        // Separate stream so request kinds do not perturb the jitter draws.
        let mut kinds = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut smoother = IntSmoother::new(config);
        let mut gate = policy.map(CongestionGate::new);
        let rows = events
            .iter()
            .enumerate()
            .map(|(i, ev)| {
                let forecast = smoother.update_at(ev.x, ev.time);
                let decision = gate.as_mut().map(|g| {
                    let kind = if self.in_progress_share > 0.0
                        && kinds.random_bool(self.in_progress_share)
                    {
                        RequestKind::InProgress
                    } else {
                        RequestKind::NewSession
                    };
                    g.decide(forecast, kind)
                });
                let st = smoother.state();
                TraceRow {
                    t: i + 1,
                    time: ev.time,
                    observe: ev.x,
                    forecast,
                    n: st.n(),
                    s1: st.s1(),
                    s2: st.s2(),
                    level: smoother.level().expect("primed by update"),
                    slope: smoother.slope().expect("primed by update"),
                    decision,
                }
            })
            .collect();
        Ok(SimTrace {
            config,
            rows,
            stats: gate.map(|g| g.stats()),
        })
    }
}

/// Convenience wrapper for [`Scenario::run`].
pub fn run(
    scenario: &Scenario,
    config: IntSmootherConfig,
    policy: Option<GatePolicy>,
) -> Result<SimTrace> {
    scenario.run(config, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub t: usize,
    /// Simulated clock at this sample, in seconds.
    pub time: i64,
    pub observe: i32,
    pub forecast: i32,
    pub n: i32,
    pub s1: i32,
    pub s2: i32,
    pub level: i32,
    pub slope: i32,
    pub decision: Option<GateDecision>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub config: IntSmootherConfig,
    pub rows: Vec<TraceRow>,
    pub stats: Option<GateStats>,
}

fn verdict_label(v: Verdict) -> String {
    match v {
        Verdict::Admit => "admit".into(),
        Verdict::Deny => "deny".into(),
        Verdict::Delay { amount } => format!("delay:{amount}"),
    }
}

impl SimTrace {
    pub const BASE_HEADER: &'static str = "count,observe,forecast,diff,diffsum,n,stx1,stx2";

    /// Write the trace as CSV. The first eight columns match the verbose
    /// output of the `smooth` command; `extended` appends `a_t,b_t,clock`,
    /// and gated runs append `request,decision`.
    pub fn write_csv<W: Write>(&self, mut w: W, extended: bool) -> io::Result<()> {
        let gated = self.stats.is_some();
        write!(w, "{}", Self::BASE_HEADER)?;
        if extended {
            write!(w, ",a_t,b_t,clock")?;
        }
        if gated {
            write!(w, ",request,decision")?;
        }
        writeln!(w)?;
        let mut diffsum: i64 = 0;
        for r in &self.rows {
            let diff = i64::from(r.observe) - i64::from(r.forecast);
            diffsum += diff;
            write!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.t, r.observe, r.forecast, diff, diffsum, r.n, r.s1, r.s2
            )?;
            if extended {
                write!(w, ",{},{},{}", r.level, r.slope, r.time)?;
            }
            if let Some(d) = r.decision {
                let kind = match d.request_kind {
                    RequestKind::NewSession => "new_session",
                    RequestKind::InProgress => "in_progress",
                };
                write!(w, ",{},{}", kind, verdict_label(d.verdict))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, extended: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, extended)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn forecasts(&self) -> Vec<i32> {
        self.rows.iter().map(|r| r.forecast).collect()
    }
}
