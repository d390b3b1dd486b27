//! The `expfun` command line.
//!
//! Exit status: 0 on a verdict, 1 on usage or configuration errors, 2 on
//! an inconclusive moment or a failed reproduction.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{error::ErrorKind, Args, Parser, Subcommand};

pub use commands::{cmd_finiteness, cmd_moment, cmd_reproduce, cmd_simulate, resolve_seed, SEED_ENV};
pub use config::{CommandKind, Example, Format, ModelSpec, OutputSpec, QuerySpec, RunConfig, SimSpec, Time};
pub use report::{CsvRow, Report};

#[derive(Debug, Parser)]
#[command(name = "expfun", version, about = "Moments of exponential functionals of additive processes")]
pub struct Cli {
    /// TOML file with [model], [query], [sim] and [output] tables; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here (JSON unless the extension is .csv).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moment of order n of the functional on [s, t].
    Moment {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        s: Option<f64>,
        /// End time, or `inf`.
        #[arg(long)]
        t: Option<Time>,
        /// recursive, product-formula, closed-form or auto.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Integral test for orders 1..=max-n, alongside the closed-form critical order.
    Finiteness {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        max_n: Option<u32>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Monte Carlo estimate, compared with the engine when the order is an integer.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Moment order; need not be an integer.
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        t: Option<Time>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Reruns a worked example through every path and reports pass/fail.
    Reproduce {
        #[arg(value_enum)]
        example: Option<Example>,
        /// Skip the Monte Carlo rows.
        #[arg(long)]
        no_mc: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// brownian-drift, deterministic-drift, bessel-first-hit, gbm-first-hit or time-changed-brownian.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub power: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct QuadArgs {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct SimArgs {
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Defaults to $EXPFUN_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub streams: Option<usize>,
    #[arg(long)]
    pub grid_step: Option<f64>,
}

impl ModelArgs {
    fn apply(self, m: &mut ModelSpec) {
        m.name = self.model;
        m.mu = self.mu;
        m.sigma = self.sigma;
        m.delta = self.delta;
        m.v = self.v;
        m.power = self.power;
    }
}

impl QuadArgs {
    fn apply(self, q: &mut QuerySpec) {
        q.abs_tol = self.abs_tol;
        q.rel_tol = self.rel_tol;
        q.max_subdivisions = self.max_subdivisions;
    }
}

impl SimArgs {
    fn apply(self, s: &mut SimSpec) {
        *s = SimSpec {
            paths: self.paths,
            dt: self.dt,
            horizon: self.horizon,
            seed: self.seed,
            streams: self.streams,
            grid_step: self.grid_step,
        };
    }
}

impl Cli {
    /// Flags as a config overlay, plus the config file path.
    pub fn into_run_config(self) -> (RunConfig, Option<PathBuf>) {
        let mut cfg = RunConfig { verbosity: self.verbose, ..RunConfig::default() };
        cfg.output = OutputSpec { path: self.output, format: self.format };
        match self.command {
            Some(Command::Moment { model, n, s, t, method, quad }) => {
                cfg.command = Some(CommandKind::Moment);
                model.apply(&mut cfg.model);
                quad.apply(&mut cfg.query);
                cfg.query.n = n.map(f64::from);
                cfg.query.s = s;
                cfg.query.t = t;
                cfg.query.method = method;
            }
            Some(Command::Finiteness { model, max_n, quad }) => {
                cfg.command = Some(CommandKind::Finiteness);
                model.apply(&mut cfg.model);
                quad.apply(&mut cfg.query);
                cfg.query.max_n = max_n;
            }
            Some(Command::Simulate { model, n, t, sim }) => {
                cfg.command = Some(CommandKind::Simulate);
                model.apply(&mut cfg.model);
                sim.apply(&mut cfg.sim);
                cfg.query.n = n;
                cfg.query.t = t;
            }
            Some(Command::Reproduce { example, no_mc, sim }) => {
                cfg.command = Some(CommandKind::Reproduce);
                sim.apply(&mut cfg.sim);
                cfg.query.example = example;
                cfg.query.no_mc = no_mc.then_some(true);
            }
            None => {}
        }
        (cfg, self.config)
    }
}

/// Runs one command and returns its report.
pub fn execute(cfg: &RunConfig) -> crate::Result<Report> {
    match cfg.command {
        Some(CommandKind::Moment) => cmd_moment(cfg),
        Some(CommandKind::Finiteness) => cmd_finiteness(cfg),
        Some(CommandKind::Simulate) => cmd_simulate(cfg),
        Some(CommandKind::Reproduce) => cmd_reproduce(cfg),
        None => Err(crate::Error::InvalidQuery("no command given (moment, finiteness, simulate or reproduce)".into())),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let (top, path) = cli.into_run_config();
    let cfg = match path {
        Some(p) => match RunConfig::load(&p) {
            Ok(base) => top.or(&base),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
        },
        None => top,
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    if let Err(e) = report.emit(cfg.format(), cfg.output.path.as_deref(), out) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    report.exit
}
