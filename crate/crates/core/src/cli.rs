//! Command-line front end. Every command writes a fixed-schema table (CSV by
//! default, or a JSON records array with the same keys in the same order).

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::asymptotics::{chernoff_analytic, chernoff_for};
use crate::discrimination::{
    advantage_sweep, certify_no_forbidden_symmetric, helstrom_m_shot, helstrom_one_shot, minimal_m,
    Advantage, BoundReport,
};
use crate::error::Error;
use crate::grid::{self, Axis, GridAxis};
use crate::model::{ScenarioKind, ScenarioParams};
use crate::simulate::{run_experiment, SimConfig, DEFAULT_TRIALS};
use crate::sliver::{mode_probabilities, protocol_error};
use crate::table::{Cell, Table};

pub const DEFAULT_M_CAP: u32 = 100;

pub const ADVANTAGE_COLUMNS: &[&str] =
    &["scenario", "q", "k", "p1", "e_guess", "e_min", "advantage_pct", "forbidden"];
pub const MINIMAL_M_COLUMNS: &[&str] = &["scenario", "q", "k", "p1", "m_min"];
pub const CHERNOFF_COLUMNS: &[&str] =
    &["scenario", "q", "k", "xi_numeric", "xi_analytic", "s_star", "xi_sliver"];
pub const SLIVER_COLUMNS: &[&str] = &[
    "scenario",
    "k",
    "pr_even_h2",
    "pr_odd_h2",
    "p_err_1shot",
    "e_min_1shot",
    "saturation",
    "xi_sliver",
    "xi_q",
];
pub const SIMULATE_COLUMNS: &[&str] = &[
    "scenario", "k", "m", "trials", "seed", "wrong_h1", "wrong_h2", "p_hat", "stderr", "p_theory",
];
pub const BOUND_FIELDS: &[&str] = &[
    "scenario",
    "k",
    "q",
    "p1",
    "m",
    "e_min",
    "e_guess",
    "advantage",
    "advantage_pct",
    "forbidden",
    "trace_norm",
    "min_eigenvalue",
];
pub const CERTIFY_FIELDS: &[&str] = &[
    "points",
    "max_det",
    "argmax_k",
    "argmax_q",
    "argmax_p1",
    "positive_definite",
    "negative_definite",
    "negative_leading_pair",
    "eigen_forbidden",
    "certified",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Optimal error bounds for telling one faint point source from two.
#[derive(Debug, Parser)]
#[command(name = "twosource", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// asymmetric | symmetric
    #[arg(long, global = true)]
    pub scenario: Option<ScenarioKind>,
    /// Separation in PSF widths.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Brightness fraction of the first source [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Prior of the one-source hypothesis [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p1: Option<f64>,
    /// Detections per decision [default: 1]
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Largest m tried by minimal-m [default: 100]
    #[arg(long = "m-cap", global = true)]
    pub m_cap: Option<u32>,
    /// Grid axis name:min:max:count (k, q, p1 or m); repeatable, first varies slowest.
    #[arg(long = "axis", global = true)]
    pub axes: Vec<String>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Master seed for simulate [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Decisions per hypothesis for simulate [default: 1000]
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true, env = "TWOSOURCE_WORKERS")]
    pub workers: Option<usize>,
    /// JSON file supplying defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Optimal and guessing error at one point (key,value record).
    Bound,
    /// Advantage of the optimal measurement over guessing on a grid.
    Advantage,
    /// Smallest number of detections that beats guessing, on a grid (-1: none up to --m-cap).
    MinimalM,
    /// Quantum Chernoff exponents on a k/q grid.
    Chernoff,
    /// Parity-sorting protocol probabilities, errors and exponents on a k grid.
    Sliver,
    /// Monte Carlo runs of the parity-sorting protocol on a k/m grid.
    Simulate,
    /// Check that no symmetric grid point (k, q, p1 axes) is forbidden.
    Certify,
}

/// Config-file mirror of the flags; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    scenario: Option<ScenarioKind>,
    k: Option<f64>,
    q: Option<f64>,
    p1: Option<f64>,
    m: Option<u32>,
    m_cap: Option<u32>,
    axis: Option<Vec<String>>,
    format: Option<Format>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<u64>,
    workers: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Toolkit(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Toolkit(Error::Domain(_) | Error::Empty(_)) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Flags merged with the config file and defaults.
#[derive(Debug, Clone)]
struct Settings {
    scenario: Option<ScenarioKind>,
    k: Option<f64>,
    q: f64,
    p1: f64,
    m: u32,
    m_cap: u32,
    axes: Vec<GridAxis>,
    format: Format,
    output: Option<PathBuf>,
    seed: u64,
    trials: u64,
    workers: Option<usize>,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let axis_text = if cli.axes.is_empty() { file.axis.unwrap_or_default() } else { cli.axes.clone() };
        let axes = axis_text
            .iter()
            .map(|s| s.parse::<GridAxis>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            scenario: cli.scenario.or(file.scenario),
            k: cli.k.or(file.k),
            q: cli.q.or(file.q).unwrap_or(0.5),
            p1: cli.p1.or(file.p1).unwrap_or(0.5),
            m: cli.m.or(file.m).unwrap_or(1),
            m_cap: cli.m_cap.or(file.m_cap).unwrap_or(DEFAULT_M_CAP),
            axes,
            format: cli.format.or(file.format).unwrap_or(Format::Csv),
            output: cli.output.clone().or(file.output),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            trials: cli.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            workers: cli.workers.or(file.workers),
        })
    }

    fn scenario(&self) -> Result<ScenarioKind, CliError> {
        self.scenario
            .ok_or_else(|| CliError::Usage("--scenario is required (asymmetric or symmetric)".into()))
    }

    fn has_axis(&self, axis: Axis) -> bool {
        self.axes.iter().any(|a| a.axis == axis)
    }

    /// Fixed parameters; `k` may be omitted when an axis supplies it.
    fn base(&self) -> Result<ScenarioParams, CliError> {
        let k = match self.k {
            Some(k) => k,
            None if self.has_axis(Axis::K) => 0.0,
            None => return Err(CliError::Usage("--k is required".into())),
        };
        Ok(ScenarioParams::new(self.scenario()?, k, self.q, self.p1)?)
    }

    /// Grid points for a sweep command, restricted to `allowed` axes.
    fn sweep(&self, command: &str, allowed: &[Axis]) -> Result<Vec<grid::GridPoint>, CliError> {
        if self.axes.is_empty() {
            return Err(CliError::Usage(format!("{command} needs at least one --axis")));
        }
        if let Some(a) = self.axes.iter().find(|a| !allowed.contains(&a.axis)) {
            let names: Vec<&str> = allowed.iter().map(|a| a.as_str()).collect();
            return Err(CliError::Usage(format!(
                "{command} does not take a {} axis (allowed: {})",
                a.axis,
                names.join(", ")
            )));
        }
        Ok(grid::points(&self.axes)?)
    }
}

fn coordinate(point: &[(Axis, f64)], axis: Axis, fallback: f64) -> f64 {
    point.iter().find(|(a, _)| *a == axis).map_or(fallback, |&(_, v)| v)
}

fn advantage_pct(report: &BoundReport) -> Cell {
    match report.advantage {
        Advantage::Infinite => Cell::Str("inf".into()),
        a => Cell::Float(a.percent()),
    }
}

fn cmd_bound(s: &Settings) -> Result<Table, CliError> {
    let params = s.base()?;
    let r = if s.m == 1 { helstrom_one_shot(&params)? } else { helstrom_m_shot(&params, s.m)? };
    let advantage = match r.advantage {
        Advantage::Infinite => Cell::Str("inf".into()),
        Advantage::Finite(a) => Cell::Float(a),
    };
    let mut t = Table::new(BOUND_FIELDS);
    t.push(vec![
        params.kind.as_str().into(),
        params.k.into(),
        params.q.into(),
        params.p1.into(),
        r.m.into(),
        r.e_min.into(),
        r.e_guess.into(),
        advantage,
        advantage_pct(&r),
        r.forbidden.into(),
        r.trace_norm().into(),
        r.min_eigenvalue().into(),
    ]);
    Ok(t)
}

fn cmd_advantage(s: &Settings) -> Result<Table, CliError> {
    s.sweep("advantage", &[Axis::K, Axis::Q, Axis::P1])?;
    let rows = advantage_sweep(&s.base()?, &s.axes)?;
    let mut t = Table::new(ADVANTAGE_COLUMNS);
    for r in &rows {
        let p = &r.params;
        t.push(vec![
            p.kind.as_str().into(),
            p.q.into(),
            p.k.into(),
            p.p1.into(),
            r.e_guess.into(),
            r.e_min.into(),
            advantage_pct(r),
            r.forbidden.into(),
        ]);
    }
    Ok(t)
}

fn cmd_minimal_m(s: &Settings) -> Result<Table, CliError> {
    let points = s.sweep("minimal-m", &[Axis::K, Axis::Q, Axis::P1])?;
    let base = s.base()?;
    let params = points
        .iter()
        .map(|p| grid::apply(&base, p))
        .collect::<Result<Vec<_>, _>>()?;
    let found = params
        .par_iter()
        .map(|p| minimal_m(p, s.m_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(MINIMAL_M_COLUMNS);
    for (p, r) in params.iter().zip(found) {
        t.push(vec![
            p.kind.as_str().into(),
            p.q.into(),
            p.k.into(),
            p.p1.into(),
            r.m_min.as_i64().into(),
        ]);
    }
    Ok(t)
}

fn cmd_chernoff(s: &Settings) -> Result<Table, CliError> {
    let points = s.sweep("chernoff", &[Axis::K, Axis::Q])?;
    let kind = s.scenario()?;
    if s.k.is_none() && !s.has_axis(Axis::K) {
        return Err(CliError::Usage("--k is required".into()));
    }
    let k0 = s.k.unwrap_or(0.0);
    let rows = points
        .par_iter()
        .map(|p| {
            let k = coordinate(p, Axis::K, k0);
            let q = coordinate(p, Axis::Q, s.q);
            let numeric = chernoff_for(kind, k, q)?;
            let analytic = chernoff_analytic(kind, k, q)?;
            let sliver = protocol_error(kind, k, 1)?.exponent;
            Ok(vec![
                kind.as_str().into(),
                q.into(),
                k.into(),
                numeric.xi.into(),
                analytic.into(),
                numeric.s_star.into(),
                sliver.into(),
            ])
        })
        .collect::<Result<Vec<Vec<Cell>>, Error>>()?;
    let mut t = Table::new(CHERNOFF_COLUMNS);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn cmd_sliver(s: &Settings) -> Result<Table, CliError> {
    let points = s.sweep("sliver", &[Axis::K])?;
    let kind = s.scenario()?;
    let rows = points
        .par_iter()
        .map(|p| {
            let k = coordinate(p, Axis::K, 0.0);
            let probs = mode_probabilities(kind, k)?;
            let protocol = protocol_error(kind, k, 1)?;
            let optimal = helstrom_one_shot(&ScenarioParams::new(kind, k, 0.5, 0.5)?)?;
            Ok(vec![
                kind.as_str().into(),
                k.into(),
                probs.pr_even_h2.into(),
                probs.pr_odd_h2.into(),
                protocol.p_err.into(),
                optimal.e_min.into(),
                protocol.saturation.into(),
                protocol.exponent.into(),
                chernoff_analytic(kind, k, 0.5)?.into(),
            ])
        })
        .collect::<Result<Vec<Vec<Cell>>, Error>>()?;
    let mut t = Table::new(SLIVER_COLUMNS);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn cmd_simulate(s: &Settings) -> Result<Table, CliError> {
    let points = s.sweep("simulate", &[Axis::K, Axis::M])?;
    let kind = s.scenario()?;
    if s.k.is_none() && !s.has_axis(Axis::K) {
        return Err(CliError::Usage("--k is required".into()));
    }
    let mut t = Table::new(SIMULATE_COLUMNS);
    for p in &points {
        let config = SimConfig {
            kind,
            k: coordinate(p, Axis::K, s.k.unwrap_or(0.0)),
            m: grid::shots(p).unwrap_or(s.m),
            trials: s.trials,
            seed: s.seed,
        };
        let r = run_experiment(&config)?;
        t.push(vec![
            kind.as_str().into(),
            config.k.into(),
            config.m.into(),
            config.trials.into(),
            config.seed.into(),
            r.wrong_h1.into(),
            r.wrong_h2.into(),
            r.p_hat.into(),
            r.stderr.into(),
            r.p_theory.into(),
        ]);
    }
    Ok(t)
}

fn cmd_certify(s: &Settings) -> Result<Table, CliError> {
    s.sweep("certify", &[Axis::K, Axis::Q, Axis::P1])?;
    let values = |axis: Axis| -> Result<Vec<f64>, CliError> {
        s.axes
            .iter()
            .find(|a| a.axis == axis)
            .map(GridAxis::values)
            .ok_or_else(|| CliError::Usage(format!("certify needs a {axis} axis")))
    };
    let cert = certify_no_forbidden_symmetric(&values(Axis::K)?, &values(Axis::Q)?, &values(Axis::P1)?)?;
    let mut t = Table::new(CERTIFY_FIELDS);
    t.push(vec![
        (cert.points as u64).into(),
        cert.max_det.into(),
        cert.argmax.0.into(),
        cert.argmax.1.into(),
        cert.argmax.2.into(),
        (cert.positive_definite as u64).into(),
        (cert.negative_definite as u64).into(),
        (cert.negative_leading_pair as u64).into(),
        (cert.eigen_forbidden as u64).into(),
        cert.certified().into(),
    ]);
    Ok(t)
}

/// Runs a parsed command line and returns the rendered output.
pub fn render(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let s = Settings::resolve(cli)?;
    let table = match cli.command {
        Command::Bound => cmd_bound(&s)?,
        Command::Advantage => cmd_advantage(&s)?,
        Command::MinimalM => cmd_minimal_m(&s)?,
        Command::Chernoff => cmd_chernoff(&s)?,
        Command::Sliver => cmd_sliver(&s)?,
        Command::Simulate => cmd_simulate(&s)?,
        Command::Certify => cmd_certify(&s)?,
    };
    let record = matches!(cli.command, Command::Bound | Command::Certify);
    let text = match (s.format, record) {
        (Format::Csv, false) => table.to_csv(),
        (Format::Json, false) => table.to_json(),
        (Format::Csv, true) => table.to_key_value(),
        (Format::Json, true) => table.to_json_object(),
    };
    Ok((text, s.output))
}

fn configure_workers(cli: &Cli) -> Result<(), CliError> {
    let s = Settings::resolve(cli)?;
    if let Some(n) = s.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be ≥ 1".into()));
        }
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    configure_workers(cli)?;
    let (text, output) = render(cli)?;
    match output {
        Some(path) => fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("twosource").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        render(&cli).map(|(t, _)| t)
    }

    #[test]
    fn bound_record() {
        let text = out(&["bound", "--scenario", "symmetric", "--k", "0", "--p1", "0.3"]).unwrap();
        assert!(text.contains("e_min,0.3\n"), "{text}");
        assert!(text.contains("forbidden,true\n"));
        assert!(text.contains("advantage_pct,0\n"));
    }

    #[test]
    fn negative_k_rejected() {
        let err = out(&["bound", "--scenario", "asymmetric", "--k", "-1"]).unwrap_err();
        assert!(err.to_string().contains("k must be ≥ 0"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sweep_requires_axis_and_scenario() {
        assert!(matches!(out(&["advantage", "--scenario", "symmetric", "--k", "1"]), Err(CliError::Usage(_))));
        assert!(matches!(out(&["sliver", "--axis", "k:0:1:3"]), Err(CliError::Usage(_))));
        assert!(matches!(
            out(&["sliver", "--scenario", "symmetric", "--axis", "p1:0:1:3"]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn advantage_header_and_rows() {
        let text = out(&["advantage", "--scenario", "asymmetric", "--axis", "k:1:1:1", "--axis", "p1:0.2:0.5:2"]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ADVANTAGE_COLUMNS.join(","));
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(",0,true"), "{}", lines[1]);
        assert!(lines[2].ends_with(",false"));
    }

    #[test]
    fn minimal_m_sentinel() {
        let text = out(&[
            "minimal-m", "--scenario", "asymmetric", "--q", "0.5", "--k", "1", "--axis", "p1:0.25:0.4:2", "--m-cap", "1",
        ])
        .unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].ends_with(",-1"), "{text}");
        assert!(lines[2].ends_with(",1"), "{text}");
    }
}
