//! Grid runner: a flat key-value config expands into protocol x (n, m, f)
//! cells, each simulated independently with a seed derived from the cell
//! key, so the grid can be extended without perturbing existing rows.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use fracsim::frac::{exact_bias, mc_bias_sequential, BiasReport};
use fracsim::{Error, Result};

use crate::build::{attach_bounds, build_protocol, parse_function, ProtocolKind};
use crate::{emit, Mode};

#[derive(Args)]
pub struct SweepArgs {
    /// flat key-value config; repeated keys form lists
    #[arg(long)]
    config: PathBuf,
    /// concurrent cells; defaults to $FRACSIM_JOBS, then all cores
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct SweepConfig {
    protocols: Vec<ProtocolKind>,
    functions: Vec<String>,
    ns: Vec<usize>,
    ms: Vec<String>,
    mode: Mode,
    trials: u64,
    seed: u64,
    eta: f64,
    radius: usize,
    target: f64,
    slack: f64,
}

fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig {
        protocols: Vec::new(),
        functions: Vec::new(),
        ns: Vec::new(),
        ms: Vec::new(),
        mode: Mode::Mc,
        trials: 100_000,
        seed: 0,
        eta: fracsim::bounds::DEFAULT_ETA,
        radius: 1,
        target: 0.55,
        slack: 0.25,
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}: {value}", lineno + 1));
        match key {
            "protocol" => cfg.protocols.push(ProtocolKind::parse(value)?),
            "f" => cfg.functions.push(value.to_string()),
            "grid.n" => cfg.ns.push(value.parse().map_err(|_| bad("grid.n"))?),
            "grid.m" => cfg.ms.push(value.to_string()),
            "mode" => {
                cfg.mode = match value {
                    "exact" => Mode::Exact,
                    "mc" => Mode::Mc,
                    _ => return Err(bad("mode")),
                }
            }
            "trials" => cfg.trials = value.parse().map_err(|_| bad("trials"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
            "eta" => cfg.eta = value.parse().map_err(|_| bad("eta"))?,
            "radius" => cfg.radius = value.parse().map_err(|_| bad("radius"))?,
            "target" => cfg.target = value.parse().map_err(|_| bad("target"))?,
            "slack" => cfg.slack = value.parse().map_err(|_| bad("slack"))?,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key {other}",
                    lineno + 1
                )))
            }
        }
    }
    if cfg.protocols.is_empty()
        || cfg.functions.is_empty()
        || cfg.ns.is_empty()
        || cfg.ms.is_empty()
    {
        return Err(Error::Parse(
            "config needs at least one protocol, f, grid.n and grid.m".into(),
        ));
    }
    Ok(cfg)
}

/// grid.m entries are integers or fractions of n: "n", "n/2", "n/4", ...
fn resolve_m(spec: &str, n: usize) -> Result<usize> {
    if let Ok(v) = spec.parse::<usize>() {
        return Ok(v);
    }
    if spec == "n" {
        return Ok(n);
    }
    if let Some(d) = spec.strip_prefix("n/") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid.m: {spec}")))?;
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::Divisibility {
                divisor: d,
                value: n,
            });
        }
        return Ok(n / d);
    }
    Err(Error::Parse(format!("bad grid.m: {spec}")))
}

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Clone)]
struct Cell {
    protocol: ProtocolKind,
    f_spec: String,
    n: usize,
    m: usize,
}

impl Cell {
    fn key(&self) -> String {
        format!(
            "{}|{}|{}|{}",
            self.protocol.name(),
            self.f_spec,
            self.n,
            self.m
        )
    }
}

fn run_cell(cell: &Cell, cfg: &SweepConfig) -> Result<BiasReport> {
    let (f, label) = parse_function(&cell.f_spec, None)?;
    let l = cell.m.max(1);
    let seed = cfg.seed ^ fnv1a64(&cell.key());
    let built = build_protocol(
        cell.protocol,
        cell.n,
        cell.m,
        l,
        &f,
        cfg.radius,
        cfg.target,
        cfg.slack,
        seed,
    )?;
    // cells already run concurrently; trials stay sequential inside each
    let mut report = match cfg.mode {
        Mode::Exact => exact_bias(built.protocol.as_ref(), &label)?,
        Mode::Mc => mc_bias_sequential(built.protocol.as_ref(), &label, cfg.trials, seed)?,
    };
    report.m = built.m.or(Some(cell.m));
    report.l = built.l;
    let m_eff = built.m.unwrap_or(cell.m);
    attach_bounds(&mut report, cell.protocol, &f, cell.n, m_eff, l, cfg.eta);
    Ok(report)
}

pub fn run(args: &SweepArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = parse_config(&text)?;
    let jobs = args.jobs.or_else(|| {
        std::env::var("FRACSIM_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let mut cells = Vec::new();
    for &protocol in &cfg.protocols {
        for f_spec in &cfg.functions {
            for &n in &cfg.ns {
                for m_spec in &cfg.ms {
                    let m = resolve_m(m_spec, n)?;
                    cells.push(Cell {
                        protocol,
                        f_spec: f_spec.clone(),
                        n,
                        m,
                    });
                }
            }
        }
    }
    cells.sort_by_key(Cell::key);
    let worker = |cell: &Cell| (cell.key(), run_cell(cell, &cfg));
    let results: Vec<(String, Result<BiasReport>)> = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(|| cells.par_iter().map(worker).collect()),
        None => cells.par_iter().map(worker).collect(),
    };
    let mut out = String::new();
    out.push_str(BiasReport::csv_header());
    out.push_str(",ratio,error\n");
    for (key, result) in results {
        match result {
            Ok(report) => {
                let ratio = report
                    .thm44_upper
                    .filter(|&u| u > 0.0)
                    .map(|u| format!("{:.11e}", report.bias_avg / u))
                    .unwrap_or_default();
                out.push_str(&format!("{},{},\n", report.csv_row(), ratio));
            }
            Err(e) => {
                // per-cell failures stay in the table, sweep continues
                let (protocol, rest) = key.split_once('|').unwrap_or((key.as_str(), ""));
                let mut parts = rest.split('|');
                let f = parts.next().unwrap_or("");
                let n = parts.next().unwrap_or("");
                let m = parts.next().unwrap_or("");
                let msg = e.to_string().replace(',', ";");
                out.push_str(&format!("{protocol},{n},{m},,{f},,,,,,,,,{msg}\n"));
            }
        }
    }
    emit(&args.output, &out)?;
    Ok(0)
}
