use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlsw_ewi::harness::{
    open_cache, run_oracle_check, run_single, run_spatial_study, run_temporal_study, write_csv, StudyConfig,
    StudyKind, StudyRow, StudySummary,
};
use nlsw_ewi::Result;

/// Convergence studies for the EWI-FP solver.
#[derive(Parser)]
#[command(name = "nlsw-study", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spatial errors over M at tau = ref_tau.
    Spatial(Opts),
    /// Temporal errors over tau at M = ref_M, with order fits and eps ratios.
    Temporal(Opts),
    /// One run with full diagnostics.
    Single(Opts),
    /// Fine EWI reference against RK4.
    OracleCheck(Opts),
}

#[derive(Args)]
struct Opts {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated list; fractions such as 1/16 are accepted.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long = "ref-M")]
    ref_m: Option<String>,
    #[arg(long = "ref-tau")]
    ref_tau: Option<String>,
    /// Final time of a `single` run.
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// Conserved-quantity series every N steps (`single`).
    #[arg(long = "series-every")]
    series_every: Option<String>,
    /// CSV path; the JSON summary goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference cache directory.
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl Opts {
    fn into_config(self, kind: StudyKind) -> Result<StudyConfig> {
        let mut cfg = match &self.config {
            Some(path) => StudyConfig::from_file(kind, path)?,
            None => StudyConfig::new(kind),
        };
        cfg.kind = kind;
        let pairs = [
            ("alpha", self.alpha),
            ("eps", self.eps),
            ("beta", self.beta),
            ("p", self.p),
            ("M", self.m),
            ("tau", self.tau),
            ("T", self.horizon),
            ("ref_M", self.ref_m),
            ("ref_tau", self.ref_tau),
            ("t_final", self.t_final),
            ("series_every", self.series_every),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.cache.is_some() {
            cfg.cache = self.cache;
        }
        Ok(cfg)
    }
}

fn emit(cfg: &StudyConfig, rows: &[StudyRow], summary: &StudySummary) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            write_csv(rows, BufWriter::new(File::create(path)?))?;
            let json = path.with_extension("json");
            serde_json::to_writer_pretty(BufWriter::new(File::create(&json)?), summary)?;
        }
        None => write_csv(rows, io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    for c in &summary.checks {
        writeln!(err, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    for r in &summary.diverged {
        writeln!(err, "DIVERGED beta={} eps={} M={} tau={} at step {:?}", r.beta, r.eps, r.m, r.tau, r.diverged_at)?;
    }
    Ok(())
}

fn write_series(path: &Path, series: &[nlsw_ewi::ConservedQuantities]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,mass,energy")?;
    for q in series {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", q.t, q.mass, q.energy)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let (kind, opts) = match cli.command {
        Command::Spatial(o) => (StudyKind::Spatial, o),
        Command::Temporal(o) => (StudyKind::Temporal, o),
        Command::Single(o) => (StudyKind::Single, o),
        Command::OracleCheck(o) => (StudyKind::OracleCheck, o),
    };
    let cfg = opts.into_config(kind)?;
    cfg.validate()?;
    let cache = open_cache(&cfg)?;
    match kind {
        StudyKind::Spatial => {
            let rows = run_spatial_study(&cfg, &cache)?;
            emit(&cfg, &rows, &StudySummary::spatial(&cfg, &rows))?;
        }
        StudyKind::Temporal => {
            let study = run_temporal_study(&cfg, &cache)?;
            emit(&cfg, &study.rows, &StudySummary::temporal(&study))?;
        }
        StudyKind::Single => {
            let single = run_single(&cfg, &cache)?;
            emit(&cfg, std::slice::from_ref(&single.row), &StudySummary::single(&single.row))?;
            if let (Some(out), false) = (&cfg.out, single.series.is_empty()) {
                write_series(&out.with_extension("series.csv"), &single.series)?;
            }
        }
        StudyKind::OracleCheck => {
            let report = run_oracle_check(&cfg, &cache)?;
            emit(&cfg, &[], &StudySummary::oracle(&report))?;
            report.ensure()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
