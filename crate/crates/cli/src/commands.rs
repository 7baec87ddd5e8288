//! `weights`, `trace` and `simulate` subcommands.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use expsmooth::forecast_core::inverse_alpha;
use expsmooth::{
    initial_estimate_weights, startup_weight_schedule, FloatSmootherState, GateMode, GatePolicy,
    Generator, IntSmootherConfig, Jitter, MovingAverageState, Scenario,
};
use serde::Deserialize;

use crate::input::read_records;

#[derive(Debug, Parser)]
#[command(name = "tssmooth", about = "Exponential smoothing forecaster tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print weight tables for single smoothing and the recursive-mean startup.
    Weights(WeightsArgs),
    /// Run a floating-point model over a generated series.
    Trace(TraceArgs),
    /// Run a scenario through the integer smoother and admission gate.
    Simulate(Box<SimulateArgs>),
}

pub const SUBCOMMANDS: [&str; 3] = ["weights", "trace", "simulate"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightTable {
    /// Per-observation, cumulative and initial-estimate weights.
    Data,
    /// Initial estimate vs first observation under the startup rule.
    Startup,
    All,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = WeightTable::All)]
    pub table: WeightTable,
}

pub fn weights<W: Write>(args: &WeightsArgs, out: &mut W) -> Result<()> {
    if args.k == 0 {
        bail!("k must be at least 1");
    }
    let rows = initial_estimate_weights(args.alpha, args.k)?;
    let startup = startup_weight_schedule(args.alpha, args.k)?;
    if matches!(args.table, WeightTable::Data | WeightTable::All) {
        writeln!(out, "i,weight,cumulative_weight,initial_estimate_weight")?;
        for r in &rows {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6}",
                r.i, r.observation_weight, r.data_weight, r.initial_weight
            )?;
        }
    }
    if args.table == WeightTable::All {
        writeln!(out)?;
    }
    if matches!(args.table, WeightTable::Startup | WeightTable::All) {
        writeln!(out, "i,initial_estimate_weight,first_observation_weight")?;
        for (r, w) in rows.iter().zip(&startup) {
            writeln!(out, "{},{:.6},{:.6}", r.i, r.initial_weight, w)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FloatModel {
    /// Single smoothing seeded with the first observation.
    Single,
    /// Double smoothing seeded with the first observation.
    Double,
    /// Recursive mean, then double smoothing.
    Startup,
    /// Moving average over `--window` points.
    Ma,
    /// Single smoothing on a step and a ramp, with the ramp bias and a double
    /// smoothing column, side by side.
    Panel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesShape {
    Step,
    Ramp,
    Constant,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, value_enum)]
    pub model: FloatModel,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum, default_value_t = SeriesShape::Ramp)]
    pub generator: SeriesShape,
    #[arg(long, default_value_t = 20)]
    pub length: usize,
    #[arg(long, default_value_t = 100.0)]
    pub from: f64,
    #[arg(long, default_value_t = 200.0)]
    pub to: f64,
    #[arg(long, default_value_t = 3)]
    pub switch_at: usize,
    #[arg(long, default_value_t = 0.0)]
    pub intercept: f64,
    #[arg(long, default_value_t = 10.0)]
    pub slope: f64,
    #[arg(long, default_value_t = 100.0)]
    pub value: f64,
}

impl TraceArgs {
    fn series(&self, shape: SeriesShape) -> Vec<f64> {
        (1..=self.length)
            .map(|t| match shape {
                SeriesShape::Step if t < self.switch_at => self.from,
                SeriesShape::Step => self.to,
                SeriesShape::Ramp => self.intercept + self.slope * (t - 1) as f64,
                SeriesShape::Constant => self.value,
            })
            .collect()
    }

    fn ramp_bias_limit(&self) -> f64 {
        (1.0 - self.alpha) / self.alpha * self.slope
    }
}

/// Two decimals, without a `-0.00`.
fn fixed2(v: f64) -> String {
    if v.abs() < 0.005 {
        "0.00".into()
    } else {
        format!("{v:.2}")
    }
}

pub fn trace<W: Write>(args: &TraceArgs, out: &mut W) -> Result<()> {
    if args.length == 0 {
        bail!("length must be at least 1");
    }
    if !args.alpha.is_finite() || args.alpha <= 0.0 || args.alpha >= 1.0 {
        bail!("alpha must satisfy 0 < alpha < 1, got {}", args.alpha);
    }
    match args.model {
        FloatModel::Panel => {
            let step = args.series(SeriesShape::Step);
            let ramp = args.series(SeriesShape::Ramp);
            let mut step_single = FloatSmootherState::seeded(args.alpha, step[0])?;
            let mut ramp_single = FloatSmootherState::seeded(args.alpha, ramp[0])?;
            let mut ramp_double = FloatSmootherState::seeded(args.alpha, ramp[0])?;
            writeln!(
                out,
                "t,step_x,step_single,ramp_x,ramp_single,ramp_single_bias,ramp_double"
            )?;
            for (i, (&xs, &xr)) in step.iter().zip(&ramp).enumerate() {
                let s = step_single.single_smooth_update(xs);
                let r = ramp_single.single_smooth_update(xr);
                let d = ramp_double.double_smooth_update(xr).value();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    i + 1,
                    fixed2(xs),
                    fixed2(s),
                    fixed2(xr),
                    fixed2(r),
                    fixed2(xr - r),
                    fixed2(d)
                )?;
            }
            writeln!(out, "bias_limit,{}", fixed2(args.ramp_bias_limit()))?;
        }
        model => {
            let xs = args.series(args.generator);
            let forecasts: Vec<f64> = match model {
                FloatModel::Single => {
                    let mut s = FloatSmootherState::seeded(args.alpha, xs[0])?;
                    xs.iter().map(|&x| s.single_smooth_update(x)).collect()
                }
                FloatModel::Double => {
                    let mut s = FloatSmootherState::seeded(args.alpha, xs[0])?;
                    xs.iter()
                        .map(|&x| s.double_smooth_update(x).value())
                        .collect()
                }
                FloatModel::Startup => {
                    let mut s = FloatSmootherState::new(args.alpha)?;
                    xs.iter().map(|&x| s.update(x)).collect()
                }
                FloatModel::Ma => {
                    let window = args
                        .window
                        .unwrap_or_else(|| inverse_alpha(args.alpha) as usize);
                    let mut m = MovingAverageState::new(window)?;
                    xs.iter().map(|&x| m.update(x)).collect()
                }
                FloatModel::Panel => unreachable!(),
            };
            writeln!(out, "t,x,forecast,bias")?;
            for (i, (&x, &f)) in xs.iter().zip(&forecasts).enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    i + 1,
                    fixed2(x),
                    fixed2(f),
                    fixed2(x - f)
                )?;
            }
            if model == FloatModel::Single && args.generator == SeriesShape::Ramp {
                writeln!(out, "bias_limit,{}", fixed2(args.ramp_bias_limit()))?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Constant,
    Step,
    Ramp,
    Burst,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Deny,
    Delay,
}

/// Scenario and gate settings. Every field can come from the command line
/// or from a TOML file given with `--config`; command-line values win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScenarioSettings {
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorKind>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub value: Option<i32>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    #[arg(long)]
    pub switch_at: Option<usize>,
    #[arg(long)]
    pub intercept: Option<i32>,
    #[arg(long)]
    pub slope: Option<i32>,
    #[arg(long)]
    pub base: Option<i32>,
    #[arg(long)]
    pub overload: Option<i32>,
    #[arg(long)]
    pub burst_start: Option<usize>,
    #[arg(long)]
    pub burst_len: Option<usize>,
    /// Observation file (`<count> <value>` pairs) for the replay generator.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n_alpha: Option<i32>,
    #[arg(long)]
    pub reset_interval: Option<i64>,
    #[arg(long)]
    pub pause_after: Option<usize>,
    /// Defaults to the reset interval plus one second.
    #[arg(long)]
    pub pause_gap: Option<i64>,
    #[arg(long)]
    pub spacing: Option<i64>,
    /// `uniform:<half-width>` or `exp:<mean>`.
    #[arg(long)]
    pub jitter: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub in_progress_share: Option<f64>,
    #[arg(long)]
    pub threshold: Option<i32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeKind>,
    #[arg(long)]
    pub delay_amount: Option<u64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl ScenarioSettings {
    /// Fill unset fields from `fallback`.
    pub fn or(mut self, fallback: ScenarioSettings) -> Self {
        overlay!(self, fallback;
            generator, length, value, from, to, switch_at, intercept, slope, base, overload,
            burst_start, burst_len, input, n_alpha, reset_interval, pause_after, pause_gap,
            spacing, jitter, seed, in_progress_share, threshold, mode, delay_amount,
        );
        self
    }

    pub fn config(&self) -> Result<IntSmootherConfig> {
        Ok(IntSmootherConfig::new(
            self.n_alpha.unwrap_or(IntSmootherConfig::DEFAULT_N_ALPHA),
            self.reset_interval
                .unwrap_or(IntSmootherConfig::DEFAULT_RESET_INTERVAL),
        )?)
    }

    pub fn policy(&self) -> Result<Option<GatePolicy>> {
        let Some(threshold) = self.threshold else {
            if self.mode.is_some() || self.delay_amount.is_some() {
                bail!("--mode/--delay-amount need --threshold");
            }
            return Ok(None);
        };
        let mode = match self.mode.unwrap_or(ModeKind::Deny) {
            ModeKind::Deny => GateMode::Deny,
            ModeKind::Delay => GateMode::Delay {
                amount: self.delay_amount.unwrap_or(1),
            },
        };
        Ok(Some(GatePolicy::new(threshold, mode)?))
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let kind = self.generator.context("a generator is required")?;
        let generator = match kind {
            GeneratorKind::Constant => Generator::Constant {
                value: self.value.context("constant generator needs --value")?,
            },
            GeneratorKind::Step => Generator::Step {
                before: self.from.context("step generator needs --from")?,
                after: self.to.context("step generator needs --to")?,
                switch_at: self.switch_at.context("step generator needs --switch-at")?,
            },
            GeneratorKind::Ramp => Generator::Ramp {
                intercept: self.intercept.unwrap_or(0),
                slope: self.slope.context("ramp generator needs --slope")?,
            },
            GeneratorKind::Burst => Generator::Burst {
                base: self.base.context("burst generator needs --base")?,
                overload: self.overload.context("burst generator needs --overload")?,
                start: self
                    .burst_start
                    .context("burst generator needs --burst-start")?,
                len: self
                    .burst_len
                    .context("burst generator needs --burst-len")?,
            },
            GeneratorKind::Replay => {
                let path = self
                    .input
                    .as_ref()
                    .context("replay generator needs --input")?;
                let values = read_records(path)
                    .with_context(|| format!("reading {}", path.display()))?
                    .into_iter()
                    .map(|r| r.value)
                    .collect();
                Generator::Replay { values }
            }
        };
        let length = match (&generator, self.length) {
            (_, Some(len)) => len,
            (Generator::Replay { values }, None) => values.len(),
            (_, None) => bail!("--length is required"),
        };
        let mut scenario = Scenario::new(generator, length);
        if let Some(spacing) = self.spacing {
            scenario = scenario.with_spacing(spacing);
        }
        if let Some(after) = self.pause_after {
            let gap = match self.pause_gap {
                Some(gap) => gap,
                None => self.config()?.reset_interval() + 1,
            };
            scenario = scenario.with_pause(after, gap);
        } else if self.pause_gap.is_some() {
            bail!("--pause-gap needs --pause-after");
        }
        let seed = self.seed.unwrap_or(0);
        scenario.seed = seed;
        if let Some(spec) = &self.jitter {
            scenario = scenario.with_jitter(parse_jitter(spec)?, seed);
        }
        if let Some(share) = self.in_progress_share {
            scenario = scenario.with_in_progress_share(share, seed);
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

fn parse_jitter(spec: &str) -> Result<Jitter> {
    let (kind, amount) = spec
        .split_once(':')
        .with_context(|| format!("jitter `{spec}` is not <kind>:<amount>"))?;
    match kind {
        "uniform" => Ok(Jitter::Uniform {
            half_width: amount
                .parse()
                .with_context(|| format!("bad half-width `{amount}`"))?,
        }),
        "exp" => Ok(Jitter::Exponential {
            mean: amount
                .parse()
                .with_context(|| format!("bad mean `{amount}`"))?,
        }),
        other => bail!("unknown jitter kind `{other}`"),
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with scenario settings (keys as the long flags, kebab-case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: ScenarioSettings,
    /// Append a_t, b_t and the simulated clock to each row.
    #[arg(long)]
    pub extended: bool,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Returns the trace CSV and the one-line summary.
pub fn simulate_to_strings(args: &SimulateArgs) -> Result<(String, String)> {
    let settings = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: ScenarioSettings =
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            args.settings.clone().or(file)
        }
        None => args.settings.clone(),
    };
    let config = settings.config()?;
    let policy = settings.policy()?;
    let scenario = settings.scenario()?;
    let trace = scenario.run(config, policy)?;
    let summary = match trace.stats {
        Some(s) => format!(
            "admitted={} denied={} delayed={} decisions={}",
            s.admitted, s.denied, s.delayed, s.decisions
        ),
        None => format!("events={} gate=none", trace.rows.len()),
    };
    Ok((trace.to_csv_string(args.extended), summary))
}

/// Trace goes to `--output` (summary on stdout) or to stdout (summary on
/// stderr). Nothing is written unless the whole run succeeds.
pub fn simulate<O: Write, E: Write>(args: &SimulateArgs, out: &mut O, err: &mut E) -> Result<()> {
    let (csv, summary) = simulate_to_strings(args)?;
    match &args.output {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_weights(alpha: f64, k: usize, table: WeightTable) -> String {
        let mut out = Vec::new();
        weights(&WeightsArgs { alpha, k, table }, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    fn parse_trace(list: &[&str]) -> TraceArgs {
        let cli = Cli::try_parse_from(["tssmooth", "trace"].iter().chain(list)).unwrap();
        match cli.command {
            Command::Trace(t) => t,
            _ => unreachable!(),
        }
    }

    fn run_trace(list: &[&str]) -> String {
        let mut out = Vec::new();
        trace(&parse_trace(list), &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn weights_tables() {
        let text = run_weights(0.1, 20, WeightTable::All);
        assert!(text.contains("\n20,0.013509,0.878423,0.121577\n"));
        assert!(text.contains("\n7,0.053144,0.521703,0.478297\n"));
        assert!(text.contains("\n11,0.313811,0.090000\n"));
        assert!(text.contains("\n10,0.348678,0.100000\n"));
    }

    #[test]
    fn weights_single_row() {
        let text = run_weights(0.1, 1, WeightTable::Startup);
        assert_eq!(
            text,
            "i,initial_estimate_weight,first_observation_weight\n1,0.900000,1.000000\n"
        );
    }

    #[test]
    fn weights_reject_bad_input() {
        let mut out = Vec::new();
        let bad = WeightsArgs {
            alpha: 1.2,
            k: 3,
            table: WeightTable::All,
        };
        assert!(weights(&bad, &mut out).is_err());
        let bad = WeightsArgs {
            alpha: 0.1,
            k: 0,
            table: WeightTable::All,
        };
        assert!(weights(&bad, &mut out).is_err());
    }

    #[test]
    fn trace_models() {
        let text = run_trace(&["--model", "double", "--generator", "ramp"]);
        assert!(text.contains("\n8,70.00,63.22,"), "{text}");
        let text = run_trace(&["--model", "single", "--generator", "step"]);
        assert!(text.contains("\n20,200.00,198.20,"), "{text}");
        let text = run_trace(&["--model", "single", "--generator", "ramp"]);
        assert!(text.ends_with("bias_limit,40.00\n"));
        let text = run_trace(&[
            "--model",
            "ma",
            "--window",
            "5",
            "--generator",
            "ramp",
            "--length",
            "10",
        ]);
        assert!(text.contains("\n10,90.00,70.00,20.00\n"), "{text}");
        let text = run_trace(&[
            "--model",
            "startup",
            "--generator",
            "constant",
            "--value",
            "7",
            "--length",
            "12",
        ]);
        assert!(text.lines().skip(1).all(|l| l.contains(",7.00,7.00,0.00")));
    }

    #[test]
    fn trace_rejects_bad_alpha() {
        let mut out = Vec::new();
        assert!(trace(
            &parse_trace(&["--model", "single", "--alpha", "0"]),
            &mut out
        )
        .is_err());
        assert!(trace(&parse_trace(&["--model", "ma", "--window", "0"]), &mut out).is_err());
    }

    #[test]
    fn config_file_and_flags_merge() {
        let file: ScenarioSettings = toml::from_str(
            "generator = \"ramp\"\nslope = 10\nlength = 25\nn-alpha = 5\npause-after = 11\n",
        )
        .unwrap();
        let flags = ScenarioSettings {
            length: Some(12),
            ..Default::default()
        };
        let merged = flags.or(file);
        let scenario = merged.scenario().unwrap();
        assert_eq!(scenario.length, 12);
        assert_eq!(scenario.pause.unwrap().gap_seconds, 6);
        assert_eq!(merged.config().unwrap().n_alpha(), 5);
        assert!(toml::from_str::<ScenarioSettings>("bogus = 1").is_err());
    }

    #[test]
    fn settings_fail_fast() {
        let s = ScenarioSettings {
            generator: Some(GeneratorKind::Ramp),
            length: Some(5),
            ..Default::default()
        };
        assert!(s.scenario().is_err());
        let s = ScenarioSettings {
            threshold: Some(0),
            ..Default::default()
        };
        assert!(s.policy().is_err());
        assert!(parse_jitter("gauss:3").is_err());
        assert_eq!(
            parse_jitter("exp:2.5").unwrap(),
            Jitter::Exponential { mean: 2.5 }
        );
    }
}
