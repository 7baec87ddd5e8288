//! The classic `time_series_smooth` interface.
//!
//! ```text
//! tssmooth [-h] [-n n_alpha] [-r reset_count] [-t reset_seconds] [-w csv] input
//! ```
//!
//! Options are scanned like POSIX `getopt("hn:r:t:w:")`, numeric values are
//! read like `strtol(s, 0, 0)`, and the stdout table and verbose CSV keep the
//! original byte layout. `-r R` waits `reset_seconds + 1` seconds after the
//! record whose count is `R`; the hidden `--sim-clock` flag advances a
//! virtual clock instead of sleeping.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::thread;
use std::time::Duration;

use expsmooth::{Clock, IntSmoother, IntSmootherConfig, ManualClock, SystemClock};

use crate::input::{read_records, InputRecord};

pub const SIM_CLOCK_FLAG: &str = "--sim-clock";

pub const HELP_TEXT: &str = "\n*****\n\
* Args:\n\
* input file name\n\
*\n\
* Options:\n\
* -h = help\n\
* -n = n_alpha - integer value of [1/alpha] default is 10\n\
* -r = reset smoother at count value plus one\n\
* -t = reset smoother time interval default is 5 seconds\n\
* -w = write verbose output to comma delimited file\n\
*****\n";

pub const TITLE: &str = "-----Time Series Smoothing Algorithm-----";
pub const COLUMN_HEADER: &str = "     count     observe     forecast     diff     diffsum";
pub const CSV_TITLE: &str = "Time Series Smoothing Algorithm";
pub const CSV_HEADER: &str = "count,observe,forecast,diff,diffsum,n,stx1,stx2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothOptions {
    pub n_alpha: i32,
    pub reset_time: i32,
    /// Zero when `-r` was not given.
    pub reset_count: i32,
    pub csv_path: Option<PathBuf>,
    pub sim_clock: bool,
    pub input: PathBuf,
}

/// `strtol(s, NULL, 0)` narrowed to `int`: optional sign, `0x`/`0` radix
/// prefixes, longest valid digit prefix, zero when nothing parses.
pub fn c_strtol(s: &str) -> i32 {
    let s = s.trim_start();
    let (neg, rest) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (radix, digits) = if let Some(hex) = rest
        .strip_prefix("0x")
        .or_else(|| rest.strip_prefix("0X"))
        .filter(|h| h.starts_with(|c: char| c.is_ascii_hexdigit()))
    {
        (16, hex)
    } else if rest.starts_with('0') {
        (8, rest)
    } else {
        (10, rest)
    };
    let mut value: i64 = 0;
    for c in digits.chars() {
        match c.to_digit(radix) {
            Some(d) => value = value.saturating_mul(radix.into()).saturating_add(d.into()),
            None => break,
        }
    }
    let value = if neg { -value } else { value };
    // Out-of-range values wrap on the narrowing to int.
    value as i32
}

enum ParseOutcome {
    Run(SmoothOptions),
    Exit(i32),
}

fn parse_args<O: Write, E: Write>(
    args: &[String],
    out: &mut O,
    err: &mut E,
) -> io::Result<ParseOutcome> {
    let prog = args.first().map(String::as_str).unwrap_or("tssmooth");
    let mut opts = SmoothOptions {
        n_alpha: IntSmootherConfig::DEFAULT_N_ALPHA,
        reset_time: IntSmootherConfig::DEFAULT_RESET_INTERVAL as i32,
        reset_count: 0,
        csv_path: None,
        sim_clock: false,
        input: PathBuf::new(),
    };
    let mut error_flag = false;
    let mut operands: Vec<&str> = Vec::new();

    let mut i = 1;
    while i < args.len() {
        let arg = args[i].as_str();
        i += 1;
        if arg == "--" {
            operands.extend(args[i..].iter().map(String::as_str));
            break;
        }
        if arg == SIM_CLOCK_FLAG {
            opts.sim_clock = true;
            continue;
        }
        if !arg.starts_with('-') || arg == "-" {
            operands.push(arg);
            continue;
        }
        let cluster = &arg[1..];
        for (pos, opt) in cluster.char_indices() {
            let takes_value = matches!(opt, 'n' | 'r' | 't' | 'w');
            if !takes_value {
                if opt == 'h' {
                    out.write_all(HELP_TEXT.as_bytes())?;
                    error_flag = true;
                } else {
                    writeln!(err, "{prog}: invalid option -- '{opt}'")?;
                }
                continue;
            }
            let attached = &cluster[pos + opt.len_utf8()..];
            let value = if !attached.is_empty() {
                attached.to_string()
            } else if i < args.len() {
                i += 1;
                args[i - 1].clone()
            } else {
                writeln!(err, "{prog}: option requires an argument -- '{opt}'")?;
                break;
            };
            match opt {
                'n' => error_flag |= check_positive(err, "n_alpha", &value, &mut opts.n_alpha)?,
                'r' => {
                    error_flag |= check_positive(err, "reset_count", &value, &mut opts.reset_count)?
                }
                't' => {
                    error_flag |= check_positive(err, "reset_time", &value, &mut opts.reset_time)?
                }
                _ => opts.csv_path = Some(PathBuf::from(value)),
            }
            break;
        }
    }

    if error_flag {
        return Ok(ParseOutcome::Exit(1));
    }
    match operands.last() {
        Some(path) => opts.input = PathBuf::from(path),
        None => {
            writeln!(err, "usage: {prog} [opt-hn:r:t:w:] file name")?;
            return Ok(ParseOutcome::Exit(1));
        }
    }
    Ok(ParseOutcome::Run(opts))
}

/// Store the parsed value and report whether it is invalid.
fn check_positive<E: Write>(
    err: &mut E,
    name: &str,
    raw: &str,
    slot: &mut i32,
) -> io::Result<bool> {
    *slot = c_strtol(raw);
    let mut bad = false;
    if *slot == 0 {
        writeln!(err, "Invalid {name} = {raw}")?;
        bad = true;
    }
    if *slot < 0 {
        writeln!(err, "Invalid {name} = {slot}")?;
        bad = true;
    }
    Ok(bad)
}

enum Timer {
    Wall,
    Simulated(ManualClock),
}

impl Timer {
    fn now(&self) -> i64 {
        match self {
            Timer::Wall => SystemClock.now_seconds(),
            Timer::Simulated(c) => c.now_seconds(),
        }
    }

    fn pause(&self, seconds: i64) {
        match self {
            Timer::Wall => thread::sleep(Duration::from_secs(seconds.max(0) as u64)),
            Timer::Simulated(c) => c.advance(seconds),
        }
    }
}

/// One output row, before formatting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportRow {
    pub count: i32,
    pub observe: i32,
    pub forecast: i32,
    pub diff: i32,
    pub diffsum: i32,
    pub n: i32,
    pub stx1: i32,
    pub stx2: i32,
}

impl ReportRow {
    pub fn table_line(&self) -> String {
        format!(
            "{:10}{:10}{:10}{:10}{:10}",
            self.count, self.observe, self.forecast, self.diff, self.diffsum
        )
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.count,
            self.observe,
            self.forecast,
            self.diff,
            self.diffsum,
            self.n,
            self.stx1,
            self.stx2
        )
    }
}

/// Smooth `records`, calling `after_each` with every row. `pause` is invoked
/// after the row whose count equals `reset_count`.
fn smooth_records(
    records: &[InputRecord],
    opts: &SmoothOptions,
    timer: &Timer,
    mut after_each: impl FnMut(&ReportRow) -> io::Result<()>,
) -> io::Result<()> {
    let config = IntSmootherConfig::new(opts.n_alpha, opts.reset_time.into())
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let mut smoother = IntSmoother::new(config);
    let mut diffsum: i32 = 0;
    for rec in records {
        let forecast = smoother.update_at(rec.value, timer.now());
        let diff = rec.value.wrapping_sub(forecast);
        diffsum = diffsum.wrapping_add(diff);
        let st = smoother.state();
        after_each(&ReportRow {
            count: rec.count,
            observe: rec.value,
            forecast,
            diff,
            diffsum,
            n: st.n(),
            stx1: st.s1(),
            stx2: st.s2(),
        })?;
        if opts.reset_count != 0 && opts.reset_count == rec.count {
            timer.pause(i64::from(opts.reset_time) + 1);
        }
    }
    Ok(())
}

/// Run the classic interface. Returns the process exit status.
pub fn smooth_command<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    match smooth_command_inner(args, out, err) {
        Ok(code) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => 1,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            1
        }
    }
}

fn smooth_command_inner<O: Write, E: Write>(
    args: &[String],
    out: &mut O,
    err: &mut E,
) -> io::Result<i32> {
    let opts = match parse_args(args, out, err)? {
        ParseOutcome::Run(opts) => opts,
        ParseOutcome::Exit(code) => return Ok(code),
    };
    let records = match read_records(&opts.input) {
        Ok(r) => r,
        Err(_) => {
            writeln!(err, "Error opening input file = {}", opts.input.display())?;
            return Ok(1);
        }
    };

    writeln!(out)?;
    writeln!(out, "{TITLE}")?;
    write!(
        out,
        "n_alpha = {}  reset_time = {}",
        opts.n_alpha, opts.reset_time
    )?;
    if opts.reset_count != 0 {
        write!(out, " reset_count = {}", opts.reset_count)?;
    }
    writeln!(out)?;
    writeln!(out, "{COLUMN_HEADER}")?;

    let mut csv = match &opts.csv_path {
        None => None,
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                writeln!(w, "{CSV_TITLE}")?;
                write!(
                    w,
                    "n_alpha = {},,reset_t = {}",
                    opts.n_alpha, opts.reset_time
                )?;
                if opts.reset_count != 0 {
                    write!(w, ",,reset_c = {}", opts.reset_count)?;
                }
                writeln!(w)?;
                writeln!(w, "{CSV_HEADER}")?;
                Some(w)
            }
            Err(_) => {
                writeln!(err, "Error opening output file = {}", path.display())?;
                return Ok(1);
            }
        },
    };

    let timer = if opts.sim_clock {
        Timer::Simulated(ManualClock::new(0))
    } else {
        Timer::Wall
    };
    smooth_records(&records, &opts, &timer, |row| {
        writeln!(out, "{}", row.table_line())?;
        if let Some(w) = csv.as_mut() {
            writeln!(w, "{}", row.csv_line())?;
        }
        Ok(())
    })?;
    if let Some(mut w) = csv {
        w.flush()?;
    }
    out.flush()?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        std::iter::once("tssmooth")
            .chain(list.iter().copied())
            .map(String::from)
            .collect()
    }

    fn parse(list: &[&str]) -> (Result<SmoothOptions, i32>, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let r = match parse_args(&args(list), &mut out, &mut err).unwrap() {
            ParseOutcome::Run(o) => Ok(o),
            ParseOutcome::Exit(c) => Err(c),
        };
        (
            r,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn strtol_behaviour() {
        assert_eq!(c_strtol("10"), 10);
        assert_eq!(c_strtol("  -7"), -7);
        assert_eq!(c_strtol("0x1f"), 31);
        assert_eq!(c_strtol("010"), 8);
        assert_eq!(c_strtol("09"), 0);
        assert_eq!(c_strtol("5abc"), 5);
        assert_eq!(c_strtol("abc"), 0);
        assert_eq!(c_strtol(""), 0);
        assert_eq!(c_strtol("4294967301"), 5);
    }

    #[test]
    fn defaults_and_flags() {
        let (o, _, _) = parse(&["in.txt"]);
        let o = o.unwrap();
        assert_eq!((o.n_alpha, o.reset_time, o.reset_count), (10, 5, 0));
        assert_eq!(o.input, PathBuf::from("in.txt"));

        let (o, _, _) = parse(&[
            "-n",
            "5",
            "-r11",
            "-t",
            "3",
            "-w",
            "o.csv",
            "--sim-clock",
            "in.txt",
        ]);
        let o = o.unwrap();
        assert_eq!((o.n_alpha, o.reset_time, o.reset_count), (5, 3, 11));
        assert_eq!(o.csv_path, Some(PathBuf::from("o.csv")));
        assert!(o.sim_clock);
    }

    #[test]
    fn operands_may_precede_options() {
        let (o, _, _) = parse(&["in.txt", "-n", "4"]);
        let o = o.unwrap();
        assert_eq!((o.n_alpha, o.input), (4, PathBuf::from("in.txt")));
    }

    #[test]
    fn invalid_values_are_reported() {
        let (o, _, err) = parse(&["-n", "abc", "in.txt"]);
        assert_eq!(o, Err(1));
        assert_eq!(err, "Invalid n_alpha = abc\n");
        let (o, _, err) = parse(&["-t", "-2", "-r", "0", "in.txt"]);
        assert_eq!(o, Err(1));
        assert_eq!(err, "Invalid reset_time = -2\nInvalid reset_count = 0\n");
    }

    #[test]
    fn help_prints_options_and_fails() {
        let (o, out, _) = parse(&["-h"]);
        assert_eq!(o, Err(1));
        for flag in ["-h =", "-n =", "-r =", "-t =", "-w ="] {
            assert!(out.contains(flag), "{flag}");
        }
    }

    #[test]
    fn missing_operand_prints_usage() {
        let (o, _, err) = parse(&["-n", "3"]);
        assert_eq!(o, Err(1));
        assert_eq!(err, "usage: tssmooth [opt-hn:r:t:w:] file name\n");
    }

    #[test]
    fn unknown_option_is_ignored_like_getopt() {
        let (o, _, err) = parse(&["-x", "in.txt"]);
        assert!(o.is_ok());
        assert!(err.contains("invalid option -- 'x'"));
        let (o, _, err) = parse(&["in.txt", "-n"]);
        assert!(o.is_ok());
        assert!(err.contains("requires an argument"));
    }

    #[test]
    fn row_formatting() {
        let row = ReportRow {
            count: 25,
            observe: 594,
            forecast: 609,
            diff: -15,
            diffsum: 65,
            n: 10,
            stx1: 597,
            stx2: 586,
        };
        assert_eq!(
            row.table_line(),
            "        25       594       609       -15        65"
        );
        assert_eq!(row.csv_line(), "25,594,609,-15,65,10,597,586");
    }
}
