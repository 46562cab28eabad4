//! Monte Carlo size/power harness.
//!
//! Every replication draws its sample from a stream derived purely from
//! `(master_seed, family index, n, replication index)`, so results are
//! bit-identical for any worker count and all methods inside one
//! replication see the same sample (paired comparison). SCR and the three
//! competitor statistics are calibrated once per sample size against
//! `calibration_null` and the region is shared across replications;
//! JEL/AJEL use the χ²₁ quantile.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::competitors::statistic_for;
use crate::distributions::special::chi2_quantile_1df;
use crate::distributions::{DistributionSpec, RandomStream};
use crate::estimator::{delta_hat, SortedSample};
use crate::jel::{pseudo_values, solve_lambda, Method};
use crate::scr_bootstrap::{null_statistic_region, CriticalRegion};
use crate::{Error, Result};

/// How replications whose JEL multiplier does not exist enter the tally.
///
/// `RejectOnHullViolation` counts them as rejections whenever the jackknife
/// estimate is nonzero (an empty feasible set is unbounded evidence against
/// the constraint); `SkipOnHullViolation` counts them as non-rejections.
/// Either way they are reported in the `inconclusive` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullPolicy {
    RejectOnHullViolation,
    SkipOnHullViolation,
}

/// Full description of one simulation study.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub families: Vec<DistributionSpec>,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub alpha: f64,
    pub master_seed: u64,
    /// Replicates behind each null-simulated critical region.
    pub scr_b: usize,
    pub calibration_null: DistributionSpec,
    pub hull_policy: HullPolicy,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::Domain("at least one family is required".into()));
        }
        if self.families.len() > 200 {
            return Err(Error::Domain("at most 200 families per study".into()));
        }
        for f in &self.families {
            f.validate()?;
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Domain("at least one sample size is required".into()));
        }
        for &n in &self.sample_sizes {
            if n < 5 {
                return Err(Error::Domain(format!("sample sizes must be >= 5, got {n}")));
            }
            if n >= 1 << 24 {
                return Err(Error::Domain(format!(
                    "sample size {n} too large for stream packing"
                )));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::Domain("at least one method is required".into()));
        }
        if self.reps < 100 {
            return Err(Error::Domain(format!(
                "reps must be >= 100, got {}",
                self.reps
            )));
        }
        if self.reps >= 1 << 32 {
            return Err(Error::Domain("reps too large for stream packing".into()));
        }
        crate::jel::check_alpha(self.alpha)?;
        if self.scr_b < 1000 {
            return Err(Error::Domain(format!(
                "scr_b must be >= 1000, got {}",
                self.scr_b
            )));
        }
        self.calibration_null.validate()?;
        if !self.calibration_null.is_symmetric() {
            return Err(Error::Domain(format!(
                "calibration null must be symmetric, got {}",
                self.calibration_null
            )));
        }
        Ok(())
    }
}

/// One `(family, n, method)` cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultRow {
    pub family: String,
    pub n: usize,
    pub method: Method,
    #[serde(rename = "rate")]
    pub rejection_rate: f64,
    #[serde(rename = "stderr")]
    pub mc_stderr: f64,
    pub inconclusive: usize,
}

/// Grid of rejection rates; `failures` records cells that could not be
/// evaluated (the grid keeps going past them).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<String>,
}

// stream-id packing: slot(8) | n(24) | replication(32).
// Family cells use slot = family index (< 200); calibration streams use
// slot = 0xF0 + method index.
fn pack_stream_id(slot: u64, n: usize, rep: u64) -> u64 {
    (slot << 56) | ((n as u64 & 0xFF_FFFF) << 32) | (rep & 0xFFFF_FFFF)
}

fn method_slot(method: Method) -> u64 {
    0xF0 + match method {
        Method::Scr => 0,
        Method::Sgn => 1,
        Method::Cm => 2,
        Method::Mgg => 3,
        Method::Jel => 4,
        Method::Ajel => 5,
    }
}

/// The sample that replication `rep` of cell `(family_index, n)` sees.
pub fn replication_sample(
    master_seed: u64,
    family_index: usize,
    n: usize,
    rep: u64,
    spec: &DistributionSpec,
) -> Result<Vec<f64>> {
    let mut stream = RandomStream::new(master_seed, pack_stream_id(family_index as u64, n, rep));
    spec.sample(&mut stream, n)
}

// Null-simulated region for SCR or a competitor statistic; pure function of
// (master_seed, method, n, calibration_null, scr_b, alpha).
fn calibration_region(
    config: &SimulationConfig,
    method: Method,
    n: usize,
) -> Result<Option<CriticalRegion>> {
    let stat: fn(&SortedSample) -> Result<f64> = match method {
        Method::Scr => |s| Ok(delta_hat(s)),
        Method::Sgn | Method::Cm | Method::Mgg => statistic_for(method),
        Method::Jel | Method::Ajel => return Ok(None),
    };
    let stream = RandomStream::new(
        config.master_seed,
        pack_stream_id(method_slot(method), n, 0),
    );
    null_statistic_region(
        &stat,
        &config.calibration_null,
        n,
        config.scr_b,
        config.alpha,
        &stream,
    )
    .map(Some)
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    rejects: u64,
    inconclusive: u64,
}

fn merge(mut a: Vec<Tally>, b: Vec<Tally>) -> Vec<Tally> {
    for (x, y) in a.iter_mut().zip(b) {
        x.rejects += y.rejects;
        x.inconclusive += y.inconclusive;
    }
    a
}

// Evaluate every requested method on one sample. Per-replication
// degeneracies (hull violations, zero-spread statistics) count as
// inconclusive instead of failing the cell.
fn evaluate_replication(
    values: Vec<f64>,
    methods: &[Method],
    regions: &HashMap<Method, CriticalRegion>,
    chi2_critical: f64,
    hull_policy: HullPolicy,
) -> Result<Vec<Tally>> {
    let sample = SortedSample::new(values)?;
    let needs_pv = methods
        .iter()
        .any(|m| matches!(m, Method::Jel | Method::Ajel));
    let pv = if needs_pv {
        Some(pseudo_values(&sample)?)
    } else {
        None
    };

    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        let mut tally = Tally::default();
        match method {
            Method::Jel => {
                let pv = pv.as_ref().expect("pseudo-values computed above");
                match solve_lambda(pv.v()) {
                    Ok(sol) => tally.rejects = (sol.neg2_log_ratio > chi2_critical) as u64,
                    Err(Error::HullViolation { .. }) => {
                        tally.inconclusive = 1;
                        if hull_policy == HullPolicy::RejectOnHullViolation && pv.mean() != 0.0 {
                            tally.rejects = 1;
                        }
                    }
                    Err(Error::Numeric(_)) => tally.inconclusive = 1,
                    Err(e) => return Err(e),
                }
            }
            Method::Ajel => {
                let pv = pv.as_ref().expect("pseudo-values computed above");
                if pv.mean() == 0.0 {
                    // statistic is exactly zero
                } else {
                    let mut w = pv.v().to_vec();
                    w.push(-(1.0f64).max(0.5 * (pv.n() as f64).ln()) * pv.mean());
                    match solve_lambda(&w) {
                        Ok(sol) => tally.rejects = (sol.neg2_log_ratio > chi2_critical) as u64,
                        Err(Error::Numeric(_)) | Err(Error::HullViolation { .. }) => {
                            tally.inconclusive = 1
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Method::Scr => {
                let region = &regions[&Method::Scr];
                tally.rejects = region.rejects(delta_hat(&sample)) as u64;
            }
            Method::Sgn | Method::Cm | Method::Mgg => {
                let region = &regions[&method];
                match statistic_for(method)(&sample) {
                    Ok(stat) => tally.rejects = region.rejects(stat) as u64,
                    Err(Error::DegenerateSample(_)) => tally.inconclusive = 1,
                    Err(e) => return Err(e),
                }
            }
        }
        out.push(tally);
    }
    Ok(out)
}

fn cell_tallies(
    config: &SimulationConfig,
    family_index: usize,
    spec: &DistributionSpec,
    n: usize,
    regions: &HashMap<Method, CriticalRegion>,
) -> Result<Vec<Tally>> {
    let chi2_critical = chi2_quantile_1df(1.0 - config.alpha)?;
    (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let values = replication_sample(config.master_seed, family_index, n, rep, spec)?;
            evaluate_replication(
                values,
                &config.methods,
                regions,
                chi2_critical,
                config.hull_policy,
            )
        })
        .try_reduce(
            || vec![Tally::default(); config.methods.len()],
            |a, b| Ok(merge(a, b)),
        )
}

/// Empirical rejection rate of one `(family, n, method)` cell:
/// `(rate, Monte Carlo standard error, inconclusive count)`.
pub fn estimate_rejection_rate(
    spec: &DistributionSpec,
    n: usize,
    method: Method,
    config: &SimulationConfig,
) -> Result<(f64, f64, usize)> {
    config.validate()?;
    if n < 5 {
        return Err(Error::Domain(format!("sample sizes must be >= 5, got {n}")));
    }
    let family_index = config.families.iter().position(|s| s == spec).unwrap_or(0);
    let mut regions = HashMap::new();
    if let Some(region) = calibration_region(config, method, n)? {
        regions.insert(method, region);
    }
    let single = SimulationConfig {
        methods: vec![method],
        ..config.clone()
    };
    let tallies = cell_tallies(&single, family_index, spec, n, &regions)?;
    let t = tallies[0];
    let rate = t.rejects as f64 / config.reps as f64;
    let stderr = (rate * (1.0 - rate) / config.reps as f64).sqrt();
    Ok((rate, stderr, t.inconclusive as usize))
}

/// Evaluate the full `families × sample_sizes × methods` grid.
///
/// Deterministic for a given `master_seed` regardless of how many workers
/// execute the replications; failed cells are recorded in
/// [`ResultTable::failures`] and do not abort the rest of the grid.
pub fn run_study(config: &SimulationConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut table = ResultTable::default();

    // one shared calibration per (method, n)
    let mut calibrations: HashMap<(Method, usize), CriticalRegion> = HashMap::new();
    for &n in &config.sample_sizes {
        for &method in &config.methods {
            match calibration_region(config, method, n) {
                Ok(Some(region)) => {
                    calibrations.insert((method, n), region);
                }
                Ok(None) => {}
                Err(e) => table
                    .failures
                    .push(format!("calibration {method} n={n}: {e}")),
            }
        }
    }

    for (family_index, spec) in config.families.iter().enumerate() {
        let family = spec.label();
        for &n in &config.sample_sizes {
            let mut regions = HashMap::new();
            let mut missing = false;
            for &method in &config.methods {
                if matches!(method, Method::Scr | Method::Sgn | Method::Cm | Method::Mgg) {
                    match calibrations.get(&(method, n)) {
                        Some(r) => {
                            regions.insert(method, *r);
                        }
                        None => missing = true,
                    }
                }
            }
            if missing {
                table
                    .failures
                    .push(format!("{family} n={n}: calibration unavailable"));
                continue;
            }
            match cell_tallies(config, family_index, spec, n, &regions) {
                Ok(tallies) => {
                    for (&method, tally) in config.methods.iter().zip(&tallies) {
                        let rate = tally.rejects as f64 / config.reps as f64;
                        table.rows.push(ResultRow {
                            family: family.clone(),
                            n,
                            method,
                            rejection_rate: rate,
                            mc_stderr: (rate * (1.0 - rate) / config.reps as f64).sqrt(),
                            inconclusive: tally.inconclusive as usize,
                        });
                    }
                }
                Err(e) => table.failures.push(format!("{family} n={n}: {e}")),
            }
        }
    }
    Ok(table)
}

/// Output format for [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

/// Render a table. CSV columns are
/// `family,n,method,rate,stderr,inconclusive`; markdown pivots methods into
/// columns; JSON is an array of row objects with the same fields.
pub fn emit_table(table: &ResultTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["family", "n", "method", "rate", "stderr", "inconclusive"])
                .expect("write to Vec");
            for r in &table.rows {
                w.write_record([
                    r.family.as_str(),
                    &r.n.to_string(),
                    r.method.as_str(),
                    &r.rejection_rate.to_string(),
                    &r.mc_stderr.to_string(),
                    &r.inconclusive.to_string(),
                ])
                .expect("write to Vec");
            }
            String::from_utf8(w.into_inner().expect("flush to Vec")).expect("csv is utf-8")
        }
        TableFormat::Json => serde_json::to_string_pretty(&table.rows).expect("rows serialize"),
        TableFormat::Markdown => {
            let mut methods: Vec<Method> = Vec::new();
            for r in &table.rows {
                if !methods.contains(&r.method) {
                    methods.push(r.method);
                }
            }
            let mut blocks: Vec<(String, usize)> = Vec::new();
            for r in &table.rows {
                if !blocks.iter().any(|(f, n)| *f == r.family && *n == r.n) {
                    blocks.push((r.family.clone(), r.n));
                }
            }
            let mut out = String::from("| family | n |");
            for m in &methods {
                out.push_str(&format!(" {m} |"));
            }
            out.push_str("\n|---|---|");
            out.push_str(&"---|".repeat(methods.len()));
            out.push('\n');
            let mut last_family = String::new();
            for (family, n) in blocks {
                let shown = if family == last_family {
                    ""
                } else {
                    family.as_str()
                };
                out.push_str(&format!("| {shown} | {n} |"));
                for &m in &methods {
                    let cell = table
                        .rows
                        .iter()
                        .find(|r| r.family == family && r.n == n && r.method == m)
                        .map(|r| {
                            if r.inconclusive > 0 {
                                format!("{:.3} ({} inc)", r.rejection_rate, r.inconclusive)
                            } else {
                                format!("{:.3}", r.rejection_rate)
                            }
                        })
                        .unwrap_or_default();
                    out.push_str(&format!(" {cell} |"));
                }
                out.push('\n');
                last_family = family;
            }
            out
        }
    }
}

/// Parse a table previously produced by [`emit_table`] with
/// [`TableFormat::Csv`].
pub fn parse_table_csv(text: &str) -> Result<ResultTable> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Domain(format!("csv parse: {e}")))?;
        if record.len() != 6 {
            return Err(Error::Domain(format!(
                "csv parse: expected 6 fields, got {}",
                record.len()
            )));
        }
        let field = |i: usize| record.get(i).unwrap_or_default();
        rows.push(ResultRow {
            family: field(0).to_string(),
            n: field(1)
                .parse()
                .map_err(|e| Error::Domain(format!("csv n: {e}")))?,
            method: field(2).parse()?,
            rejection_rate: field(3)
                .parse()
                .map_err(|e| Error::Domain(format!("csv rate: {e}")))?,
            mc_stderr: field(4)
                .parse()
                .map_err(|e| Error::Domain(format!("csv stderr: {e}")))?,
            inconclusive: field(5)
                .parse()
                .map_err(|e| Error::Domain(format!("csv inconclusive: {e}")))?,
        });
    }
    Ok(ResultTable {
        rows,
        failures: Vec::new(),
    })
}
