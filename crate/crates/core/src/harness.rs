//! Type I error experiments over (scenario, n, method) grids.
//!
//! Replicate `r` of cell `(scenario, n)` draws its sample from
//! `derive_stream(master_seed, scenario.stream_code(), n, r)`, so a cell's
//! result does not depend on which other cells share the grid, on the order of
//! the lists, or on the number of worker threads. Every method of a cell sees
//! the same replicate samples, and the two permutation tests share the same
//! shuffles.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::RankPairing;
use crate::error::{Error, Result};
use crate::hypothesis::{run_on_pairing, Alternative, Method, PValueConvention, TestConfig};
use crate::rng::{derive_stream, permutation_seed};
use crate::scenario::{sample_scenario, ScenarioSpec};

pub const CSV_HEADER: [&str; 9] = [
    "scenario",
    "n",
    "method",
    "alpha",
    "reps",
    "B",
    "rejection_rate",
    "mc_se",
    "seed",
];

/// Replication budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 10,000 replicates, 1,000 permutations.
    Paper,
    /// 2,000 replicates, 500 permutations; for quick checks.
    Desk,
}

impl Preset {
    pub fn reps(&self) -> u32 {
        match self {
            Preset::Paper => 10_000,
            Preset::Desk => 2_000,
        }
    }

    pub fn permutations(&self) -> u64 {
        match self {
            Preset::Paper => 1_000,
            Preset::Desk => 500,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::invalid(format!("unknown preset '{other}'"))),
        }
    }
}

/// The sample sizes of the reference table.
pub const TABLE_SAMPLE_SIZES: [usize; 5] = [10, 20, 50, 100, 200];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub scenarios: Vec<ScenarioSpec>,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub alpha: f64,
    pub reps: u32,
    pub permutations: u64,
    pub master_seed: u64,
    pub alternative: Alternative,
    pub convention: PValueConvention,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl GridConfig {
    /// Full grid: canonical scenarios x table sample sizes x all six methods,
    /// one-sided `greater` at `alpha = 0.05`.
    pub fn table(preset: Preset, master_seed: u64) -> Self {
        Self {
            scenarios: ScenarioSpec::canonical(),
            sample_sizes: TABLE_SAMPLE_SIZES.to_vec(),
            methods: Method::ALL.to_vec(),
            alpha: 0.05,
            reps: preset.reps(),
            permutations: preset.permutations(),
            master_seed,
            alternative: Alternative::Greater,
            convention: PValueConvention::Plain,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.reps < 1 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if self.permutations < 1 {
            return Err(Error::invalid("number of permutations must be at least 1"));
        }
        if self.scenarios.is_empty() || self.sample_sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid(
                "grid needs at least one scenario, sample size and method",
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        for spec in &self.scenarios {
            spec.validate()?;
        }
        for &n in &self.sample_sizes {
            if n > usize::from(u16::MAX) {
                return Err(Error::invalid(format!("sample size {n} exceeds {}", u16::MAX)));
            }
            for m in &self.methods {
                if n < m.min_n() {
                    return Err(Error::invalid(format!(
                        "{} needs n >= {}, grid has n = {n}",
                        m.id(),
                        m.min_n()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub scenario: String,
    pub n: usize,
    pub method: Method,
    pub alpha: f64,
    pub reps: u32,
    #[serde(rename = "B")]
    pub permutations: u64,
    pub rejection_rate: f64,
    pub mc_se: f64,
    pub seed: u64,
    pub rejections: u32,
    /// Replicates whose sample was degenerate (a constant margin); counted as
    /// non-rejections.
    pub degenerate: u32,
}

impl SimulationSummary {
    fn new(
        scenario: &ScenarioSpec,
        n: usize,
        method: Method,
        cfg: &GridConfig,
        rejections: u32,
        degenerate: u32,
    ) -> Self {
        let rate = f64::from(rejections) / f64::from(cfg.reps);
        Self {
            scenario: scenario.id(),
            n,
            method,
            alpha: cfg.alpha,
            reps: cfg.reps,
            permutations: cfg.permutations,
            rejection_rate: rate,
            mc_se: (rate * (1.0 - rate) / f64::from(cfg.reps)).sqrt(),
            seed: cfg.master_seed,
            rejections,
            degenerate,
        }
    }
}

/// Per-method tallies for one cell.
#[derive(Clone)]
struct Tally {
    rejections: Vec<u32>,
    degenerate: Vec<u32>,
}

impl Tally {
    fn zero(m: usize) -> Self {
        Self {
            rejections: vec![0; m],
            degenerate: vec![0; m],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.rejections.iter_mut().zip(other.rejections) {
            *a += b;
        }
        for (a, b) in self.degenerate.iter_mut().zip(other.degenerate) {
            *a += b;
        }
        self
    }
}

fn run_replicate(spec: &ScenarioSpec, n: usize, rep: u32, cfg: &GridConfig, tally: &mut Tally) -> Result<()> {
    let state = derive_stream(cfg.master_seed, spec.stream_code(), n as u16, rep);
    let sample = sample_scenario(spec, n, state)?;
    let pairing = match RankPairing::new(&sample) {
        Ok(p) => p,
        Err(Error::DegenerateSample(_)) => {
            tally.degenerate.iter_mut().for_each(|d| *d += 1);
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let test_cfg = TestConfig {
        permutations: cfg.permutations,
        seed: permutation_seed(state),
        convention: cfg.convention,
    };
    for (i, &method) in cfg.methods.iter().enumerate() {
        match run_on_pairing(method, &pairing, cfg.alternative, &test_cfg, false) {
            Ok(res) if res.p_value < cfg.alpha => tally.rejections[i] += 1,
            Ok(_) => {}
            Err(Error::DegenerateSample(_)) => tally.degenerate[i] += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn run_cell(spec: &ScenarioSpec, n: usize, cfg: &GridConfig) -> Result<Vec<SimulationSummary>> {
    let m = cfg.methods.len();
    let tally = (0..cfg.reps)
        .into_par_iter()
        .try_fold(
            || Tally::zero(m),
            |mut t, rep| run_replicate(spec, n, rep, cfg, &mut t).map(|_| t),
        )
        .try_reduce(|| Tally::zero(m), |a, b| Ok(a.merge(b)))?;
    Ok(cfg
        .methods
        .iter()
        .enumerate()
        .map(|(i, &method)| SimulationSummary::new(spec, n, method, cfg, tally.rejections[i], tally.degenerate[i]))
        .collect())
}

/// One summary per (scenario, n, method), in scenario-major, then n, then
/// method order as listed in the config.
pub fn run_grid(config: &GridConfig) -> Result<Vec<SimulationSummary>> {
    config.validate()?;
    let run = || -> Result<Vec<SimulationSummary>> {
        let mut out = Vec::with_capacity(config.scenarios.len() * config.sample_sizes.len() * config.methods.len());
        for spec in &config.scenarios {
            for &n in &config.sample_sizes {
                out.extend(run_cell(spec, n, config)?);
            }
        }
        Ok(out)
    };
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {w} workers: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Rejection rate of one test at one cell under the default one-sided
/// `greater` alternative.
pub fn estimate_type1_error(
    spec: ScenarioSpec,
    n: usize,
    method: Method,
    alpha: f64,
    reps: u32,
    permutations: u64,
    master_seed: u64,
) -> Result<SimulationSummary> {
    let cfg = GridConfig {
        scenarios: vec![spec],
        sample_sizes: vec![n],
        methods: vec![method],
        alpha,
        reps,
        permutations,
        master_seed,
        alternative: Alternative::Greater,
        convention: PValueConvention::Plain,
        workers: None,
    };
    Ok(run_grid(&cfg)?.remove(0))
}

pub fn write_csv<W: Write>(summaries: &[SimulationSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in summaries {
        w.write_record([
            s.scenario.clone(),
            s.n.to_string(),
            s.method.id().to_string(),
            s.alpha.to_string(),
            s.reps.to_string(),
            s.permutations.to_string(),
            s.rejection_rate.to_string(),
            s.mc_se.to_string(),
            s.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(summaries: &[SimulationSummary], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, summaries)?;
    writeln!(out)?;
    Ok(())
}

/// Reads summaries back from the CSV layout written by [`write_csv`].
/// Rejection counts are reconstructed from the rate; degenerate counts are
/// not part of the CSV and read as zero.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SimulationSummary>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            row: 0,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let field = |j: usize| -> Result<&str> {
            rec.get(j).ok_or_else(|| Error::Parse {
                row,
                message: format!("missing column {}", CSV_HEADER[j]),
            })
        };
        fn num<T: std::str::FromStr>(s: &str, row: usize, col: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                row,
                message: format!("bad {col} value '{s}'"),
            })
        }
        let reps: u32 = num(field(4)?, row, "reps")?;
        let rate: f64 = num(field(6)?, row, "rejection_rate")?;
        out.push(SimulationSummary {
            scenario: field(0)?.to_string(),
            n: num(field(1)?, row, "n")?,
            method: field(2)?.parse().map_err(|_| Error::Parse {
                row,
                message: "bad method".into(),
            })?,
            alpha: num(field(3)?, row, "alpha")?,
            reps,
            permutations: num(field(5)?, row, "B")?,
            rejection_rate: rate,
            mc_se: num(field(7)?, row, "mc_se")?,
            seed: num(field(8)?, row, "seed")?,
            rejections: (rate * f64::from(reps)).round() as u32,
            degenerate: 0,
        });
    }
    Ok(out)
}

/// One method's rejection rate as a function of n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub method: Method,
    pub x: Vec<usize>,
    pub y: Vec<f64>,
}

/// Plot data for one scenario panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPanel {
    pub scenario: String,
    pub alpha: f64,
    pub series: Vec<Series>,
}

/// Groups summaries into one panel per scenario with one series per method,
/// points sorted by n. Panels and series keep first-appearance order.
pub fn plot_panels(summaries: &[SimulationSummary]) -> Vec<PlotPanel> {
    let mut panels: Vec<PlotPanel> = Vec::new();
    for s in summaries {
        let idx = match panels.iter().position(|p| p.scenario == s.scenario) {
            Some(i) => i,
            None => {
                panels.push(PlotPanel {
                    scenario: s.scenario.clone(),
                    alpha: s.alpha,
                    series: Vec::new(),
                });
                panels.len() - 1
            }
        };
        let panel = &mut panels[idx];
        let series = match panel.series.iter().position(|sr| sr.method == s.method) {
            Some(i) => &mut panel.series[i],
            None => {
                panel.series.push(Series {
                    method: s.method,
                    x: Vec::new(),
                    y: Vec::new(),
                });
                panel.series.last_mut().expect("just pushed")
            }
        };
        series.x.push(s.n);
        series.y.push(s.rejection_rate);
    }
    for panel in &mut panels {
        for series in &mut panel.series {
            let mut pts: Vec<(usize, f64)> = series.x.iter().copied().zip(series.y.iter().copied()).collect();
            pts.sort_by_key(|p| p.0);
            (series.x, series.y) = pts.into_iter().unzip();
        }
    }
    panels
}

/// Wide table, one row per (scenario, n) and one column per method, in the
/// layout of the reference table.
pub fn write_wide_table<W: Write>(summaries: &[SimulationSummary], out: W) -> Result<()> {
    let mut methods: Vec<Method> = Vec::new();
    for s in summaries {
        if !methods.contains(&s.method) {
            methods.push(s.method);
        }
    }
    let mut keys: Vec<(String, usize)> = Vec::new();
    for s in summaries {
        let key = (s.scenario.clone(), s.n);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scenario".to_string(), "n".to_string()];
    header.extend(methods.iter().map(|m| m.id().to_string()));
    w.write_record(&header)?;
    for (scenario, n) in keys {
        let mut row = vec![scenario.clone(), n.to_string()];
        for m in &methods {
            let cell = summaries
                .iter()
                .find(|s| s.scenario == scenario && s.n == n && s.method == *m)
                .map(|s| format!("{:.4}", s.rejection_rate))
                .unwrap_or_default();
            row.push(cell);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
