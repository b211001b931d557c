//! One function per subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nsumkit::design::{min_sample_size, sample_size_grid};
use nsumkit::estimator::estimate;
use nsumkit::montecarlo::{run_deviation_sweep, run_factorial, run_retrospective, SweepConfig};
use nsumkit::{DegreeSample, PopulationSpec, RngStream, SimConfig, SimResult, StudyDesign, ZConvention};
use serde::Serialize;

use crate::config::{self, GridConfig, RetroConfig};
use crate::output::{csv_text, opt_int, opt_sig6, sig6, RunOutput};

/// Error from the command line rather than the data.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn z_convention(z2: bool) -> ZConvention {
    if z2 {
        ZConvention::Two
    } else {
        ZConvention::Exact
    }
}

pub struct SampleSizeArgs {
    pub epsilon: f64,
    pub alpha: f64,
    pub prevalence: f64,
    pub mean_degree: f64,
    pub population: u64,
    pub deff: f64,
    pub z2: bool,
}

pub fn samplesize(a: &SampleSizeArgs) -> Result<String> {
    let design = StudyDesign::new(a.epsilon, a.alpha)?.with_design_effect(a.deff)?.with_z(z_convention(a.z2));
    let pop = PopulationSpec::new(a.population, a.prevalence, a.mean_degree)?;
    let s = min_sample_size(&design, &pop)?;
    let text = csv_text(&["n", "raw", "truncated"], &[vec![s.n.to_string(), sig6(s.raw), s.truncated.to_string()]])?;
    Ok(String::from_utf8(text)?)
}

/// Reads a headerless two-column CSV of non-negative integers `d,d_u`.
pub fn read_degrees(path: &Path) -> Result<DegreeSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut pairs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        if record.len() != 2 {
            bail!(Usage(format!("{} line {}: expected 2 columns, found {}", path.display(), line + 1, record.len())));
        }
        let field = |i: usize| -> Result<u64> {
            record[i].parse::<u64>().map_err(|_| {
                Usage(format!("{} line {}: `{}` is not a non-negative integer", path.display(), line + 1, &record[i])).into()
            })
        };
        let (d, du) = (field(0)?, field(1)?);
        if du > d {
            bail!(Usage(format!("{} line {}: d_u = {du} exceeds d = {d}", path.display(), line + 1)));
        }
        pairs.push((d, du));
    }
    if pairs.is_empty() {
        bail!(Usage(format!("{} contains no degree reports", path.display())));
    }
    Ok(DegreeSample::from_pairs(pairs)?)
}

pub fn estimate_cmd(input: &Path, population: u64, alpha: f64, z2: bool) -> Result<String> {
    let sample = read_degrees(input)?;
    if let Some(&d) = sample.d().iter().find(|&&d| d > population) {
        bail!(Usage(format!("reported degree {d} exceeds the population size {population}")));
    }
    let e = estimate(&sample, population, alpha, z_convention(z2))?;
    let text = csv_text(
        &["n_hat", "variance", "ci_lo", "ci_hi", "n", "alpha"],
        &[vec![sig6(e.n_hat), sig6(e.variance), sig6(e.ci_lo), sig6(e.ci_hi), e.n.to_string(), sig6(e.alpha)]],
    )?;
    Ok(String::from_utf8(text)?)
}

pub const SIMULATE_HEADER: [&str; 12] = [
    "model", "M", "q", "alpha", "epsilon", "n_used", "mean_rel_err", "sd_rel_err", "coverage", "replicates",
    "degenerate", "infeasible",
];

fn sim_row(r: &SimResult) -> Vec<String> {
    vec![
        r.model.clone(),
        r.m.to_string(),
        sig6(r.q),
        sig6(r.alpha),
        sig6(r.epsilon),
        opt_int(r.n_used),
        opt_sig6(r.mean_rel_err),
        opt_sig6(r.sd_rel_err),
        opt_sig6(r.coverage),
        r.replicates.to_string(),
        r.degenerate.to_string(),
        r.infeasible.to_string(),
    ]
}

/// Per-row figures that do not fit the fixed table layout.
#[derive(Serialize)]
struct RowDiagnostics {
    model: String,
    m: u64,
    q: f64,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    truncated: u64,
    mean_density: Option<f64>,
}

fn diagnostics(rows: &[SimResult]) -> Vec<RowDiagnostics> {
    rows.iter()
        .map(|r| RowDiagnostics {
            model: r.model.clone(),
            m: r.m,
            q: r.q,
            alpha: r.alpha,
            delta: r.delta,
            truncated: r.truncated,
            mean_density: r.mean_density,
        })
        .collect()
}

pub struct BatchArgs {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub replicates: Option<u64>,
}

pub fn simulate(args: &BatchArgs, full_grid: bool) -> Result<()> {
    let mut cfg: SimConfig = match (&args.config, full_grid) {
        (Some(p), false) => config::load(p)?,
        (None, true) => SimConfig::full_grid(0),
        (Some(_), true) => bail!(Usage("--config and --full-grid are mutually exclusive".into())),
        (None, false) => bail!(Usage("simulate needs --config or --full-grid".into())),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    let rows = run_factorial(&cfg)?;
    let table: Vec<Vec<String>> = rows.iter().map(sim_row).collect();
    let csv = csv_text(&SIMULATE_HEADER, &table)?;
    RunOutput { dir: args.out.clone(), command: "simulate" }.write(&csv, &cfg, cfg.seed, Some(diagnostics(&rows)))
}

pub fn sweep(args: &BatchArgs) -> Result<()> {
    let mut cfg: SweepConfig = match &args.config {
        Some(p) => config::load(p)?,
        None => SweepConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    let rows = run_deviation_sweep(&cfg)?;
    let mut header = SIMULATE_HEADER.to_vec();
    header.extend(["delta", "mean_density"]);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = sim_row(r);
            row.push(opt_sig6(r.delta));
            row.push(opt_sig6(r.mean_density));
            row
        })
        .collect();
    let csv = csv_text(&header, &table)?;
    RunOutput { dir: args.out.clone(), command: "sweep" }.write(&csv, &cfg, cfg.seed, Some(diagnostics(&rows)))
}

#[derive(Serialize)]
struct RetroDiagnostics {
    name: String,
    se: f64,
    bias: f64,
    degenerate: u64,
}

pub fn retro(args: &BatchArgs) -> Result<()> {
    let mut cfg = RetroConfig::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if cfg.cases.is_empty() {
        bail!(Usage("no case studies configured".into()));
    }
    let root = RngStream::new(cfg.seed);
    let mut table = Vec::new();
    let mut notes = Vec::new();
    for (i, case) in cfg.cases.iter().enumerate() {
        let r = run_retrospective(case, cfg.epsilon, cfg.alpha, cfg.replicates, cfg.sampling, &root.child(i as u64))?;
        table.push(vec![
            case.name.clone(),
            case.n_study.to_string(),
            case.m.to_string(),
            case.n_hat.to_string(),
            sig6(case.d_bar),
            sig6(case.d_bar_u),
            sig6(r.rel_err),
            r.n_min.to_string(),
        ]);
        notes.push(RetroDiagnostics { name: r.name, se: r.se, bias: r.bias, degenerate: r.degenerate });
    }
    let csv = csv_text(&["name", "n_study", "M", "N_hat", "d_bar", "d_bar_u", "rel_err", "n_min"], &table)?;
    RunOutput { dir: args.out.clone(), command: "retro" }.write(&csv, &cfg, cfg.seed, Some(notes))
}

pub fn grid(config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: GridConfig = match config {
        Some(p) => config::load(p)?,
        None => GridConfig::default(),
    };
    let design = StudyDesign::new(cfg.epsilon, cfg.alpha)?.with_design_effect(cfg.design_effect)?.with_z(cfg.z);
    let g = sample_size_grid(&design, cfg.m, &cfg.q, &cfg.d_bar)?;
    let table: Vec<Vec<String>> = g.long_rows().map(|(q, d, n)| vec![sig6(q), sig6(d), n.to_string()]).collect();
    let csv = csv_text(&["q", "d_bar", "n"], &table)?;
    RunOutput { dir: out.to_path_buf(), command: "grid" }.write(&csv, &cfg, 0, None::<()>)
}

/// Used by `--config` loaders that expect an existing file.
pub fn require_file(p: &Path) -> Result<()> {
    if !fs::metadata(p).map(|m| m.is_file()).unwrap_or(false) {
        bail!(Usage(format!("{} is not a readable file", p.display())));
    }
    Ok(())
}
