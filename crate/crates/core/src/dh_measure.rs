//! Monte-Carlo estimate of the Duistermaat-Heckman density: the pushforward
//! of Liouville measure along the moment map.
//!
//! Points are drawn uniformly from the chart box `[0,1)^4 × [A,B) × [0,1)`
//! and binned by their `t` coordinate with weight equal to the Liouville
//! density (the top coefficient of `omega^3`) at the full 6-dimensional
//! point. Nothing here assumes that weight depends on `t` alone.
//!
//! # Reproducibility
//!
//! Samples are grouped in fixed blocks of [`BLOCK_SIZE`]. Block `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(k)`. Blocks may be
//! processed on any number of threads; their partial histograms are merged in
//! block order with compensated summation, so the result is bit-identical for
//! every thread count.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::construction::{self, CutWindow, DIM, T};
use crate::exterior::{rational_to_f64, CompiledPoly, ExteriorError, Poly};

/// Samples per independently seeded block.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Recorded in output metadata.
pub const GENERATOR: &str =
    "ChaCha8Rng(rand_chacha 0.9) seed_from_u64(seed), set_stream(block), 65536 samples/block";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DhError {
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate window: {0}")]
    Degenerate(String),
    #[error("histogram carries no weight")]
    EmptyMeasure,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub sample_count: u64,
    pub bins: usize,
    pub window: CutWindow,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(
        sample_count: u64,
        bins: usize,
        window: CutWindow,
        seed: u64,
    ) -> Result<Self, DhError> {
        if bins < 2 {
            return Err(DhError::InvalidConfig(format!(
                "need at least 2 bins, got {bins}"
            )));
        }
        if sample_count < bins as u64 {
            return Err(DhError::InvalidConfig(format!(
                "sample count {sample_count} is below the bin count {bins}"
            )));
        }
        Ok(SamplerConfig {
            sample_count,
            bins,
            window,
            seed,
        })
    }

    pub fn bin_width(&self) -> f64 {
        self.window.width() / self.bins as f64
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Weighted counts of moment-map values per bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub weight_sums: Vec<f64>,
    pub weight_sq_sums: Vec<f64>,
    pub total_weight: f64,
    pub sample_count: u64,
    /// Volume of the sampling box, so `box_volume * weight_sums / sample_count`
    /// estimates the Liouville mass of each bin.
    pub box_volume: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.weight_sums.len()
    }

    /// Builds a histogram from per-bin sums; `total_weight` is their
    /// compensated sum.
    pub fn from_sums(
        window: &CutWindow,
        weight_sums: Vec<f64>,
        weight_sq_sums: Vec<f64>,
        sample_count: u64,
        box_volume: f64,
    ) -> Self {
        assert_eq!(weight_sums.len(), weight_sq_sums.len());
        let mut total = CompensatedSum::default();
        weight_sums.iter().for_each(|&w| total.add(w));
        Histogram {
            bin_edges: uniform_edges(window, weight_sums.len()),
            weight_sums,
            weight_sq_sums,
            total_weight: total.value(),
            sample_count,
            box_volume,
        }
    }
}

pub fn uniform_edges(window: &CutWindow, bins: usize) -> Vec<f64> {
    let w = window.width() / bins as f64;
    (0..=bins)
        .map(|i| {
            if i == bins {
                window.b
            } else {
                window.a + w * i as f64
            }
        })
        .collect()
}

/// Bin of `t`; bins are half-open except the last, which is closed.
#[inline]
pub fn bin_index(t: f64, window: &CutWindow, bins: usize) -> Option<usize> {
    if !(t >= window.a && t <= window.b) {
        return None;
    }
    let k = ((t - window.a) / window.width() * bins as f64).floor() as usize;
    Some(k.min(bins - 1))
}

/// Liouville density at a chart point.
pub fn liouville_weight(top_poly: &Poly, point: &[f64]) -> Result<f64, ExteriorError> {
    top_poly.eval(point)
}

/// Uniform sampling box of the canonical chart for a window.
pub fn canonical_domain(window: &CutWindow) -> [(f64, f64); DIM] {
    let mut d = [(0.0, 1.0); DIM];
    d[T] = (window.a, window.b);
    d
}

/// Pushforward histogram on the canonical chart, using the global rayon pool.
pub fn sample_pushforward(top_poly: &Poly, cfg: &SamplerConfig) -> Result<Histogram, DhError> {
    sample_pushforward_on(top_poly, &canonical_domain(&cfg.window), cfg, None)
}

/// Same as [`sample_pushforward`] on a dedicated pool of `threads` workers.
pub fn sample_pushforward_threads(
    top_poly: &Poly,
    cfg: &SamplerConfig,
    threads: usize,
) -> Result<Histogram, DhError> {
    sample_pushforward_on(top_poly, &canonical_domain(&cfg.window), cfg, Some(threads))
}

/// Pushforward over an arbitrary sampling box whose `t` range must equal the
/// window.
pub fn sample_pushforward_on(
    top_poly: &Poly,
    domain: &[(f64, f64); DIM],
    cfg: &SamplerConfig,
    threads: Option<usize>,
) -> Result<Histogram, DhError> {
    if top_poly.nvars() != DIM {
        return Err(ExteriorError::DimensionMismatch {
            expected: DIM,
            got: top_poly.nvars(),
        }
        .into());
    }
    if cfg.sample_count == 0 || cfg.bins < 2 {
        return Err(DhError::InvalidConfig("empty sample or bin count".into()));
    }
    if domain[T] != (cfg.window.a, cfg.window.b) {
        return Err(DhError::InvalidConfig(
            "sampling box t-range differs from the window".into(),
        ));
    }
    if domain.iter().any(|&(lo, hi)| !(lo < hi)) {
        return Err(DhError::InvalidConfig("empty sampling box".into()));
    }
    if top_poly.support_vars().iter().all(|&v| v == T) {
        construction::positive_on_window(top_poly, &cfg.window).map_err(DhError::Degenerate)?;
    }

    let compiled = top_poly.compile();
    let blocks = cfg.sample_count.div_ceil(BLOCK_SIZE);
    let run = || -> Vec<BlockHist> {
        (0..blocks)
            .into_par_iter()
            .map(|k| {
                let n = BLOCK_SIZE.min(cfg.sample_count - k * BLOCK_SIZE);
                sample_block(&compiled, domain, cfg, k, n)
            })
            .collect()
    };
    let parts = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| DhError::ThreadPool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut sums = vec![CompensatedSum::default(); cfg.bins];
    let mut sq = vec![CompensatedSum::default(); cfg.bins];
    for part in &parts {
        if part.negative {
            return Err(DhError::Degenerate(
                "Liouville weight is negative somewhere in the box".into(),
            ));
        }
        for b in 0..cfg.bins {
            sums[b].add(part.sums[b].value());
            sq[b].add(part.sq[b].value());
        }
    }
    let volume: f64 = domain.iter().map(|(lo, hi)| hi - lo).product();
    Ok(Histogram::from_sums(
        &cfg.window,
        sums.iter().map(CompensatedSum::value).collect(),
        sq.iter().map(CompensatedSum::value).collect(),
        cfg.sample_count,
        volume,
    ))
}

struct BlockHist {
    sums: Vec<CompensatedSum>,
    sq: Vec<CompensatedSum>,
    negative: bool,
}

fn sample_block(
    top: &CompiledPoly,
    domain: &[(f64, f64); DIM],
    cfg: &SamplerConfig,
    block: u64,
    n: u64,
) -> BlockHist {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block);
    let mut out = BlockHist {
        sums: vec![CompensatedSum::default(); cfg.bins],
        sq: vec![CompensatedSum::default(); cfg.bins],
        negative: false,
    };
    let mut point = [0.0; DIM];
    for _ in 0..n {
        for (x, &(lo, hi)) in point.iter_mut().zip(domain) {
            *x = lo + (hi - lo) * rng.random::<f64>();
        }
        let w = top.eval(&point);
        if w < 0.0 {
            out.negative = true;
        }
        if let Some(b) = bin_index(point[T], &cfg.window, cfg.bins) {
            out.sums[b].add(w);
            out.sq[b].add(w * w);
        }
    }
    out
}

/// Normalized density per bin with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub bin_edges: Vec<f64>,
    pub bin_centers: Vec<f64>,
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl DensityEstimate {
    pub fn bin_width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    /// Estimate whose density is given directly, e.g. exact values.
    pub fn from_values(window: &CutWindow, density: Vec<f64>, stderr: Vec<f64>) -> Self {
        let edges = uniform_edges(window, density.len());
        DensityEstimate {
            bin_centers: centers(&edges),
            bin_edges: edges,
            density,
            stderr,
        }
    }

    pub fn mass(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for i in 0..self.density.len() {
            s.add(self.density[i] * self.bin_width(i));
        }
        s.value()
    }
}

fn centers(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Normalizes a histogram to unit mass on the window.
///
/// The standard error of bin `i` treats `w·1[bin i]` as an i.i.d. sample
/// over all `N` draws; the normalizing total is taken as exact.
pub fn normalize(h: &Histogram) -> Result<DensityEstimate, DhError> {
    if !(h.total_weight > 0.0) {
        return Err(DhError::EmptyMeasure);
    }
    let n = h.sample_count as f64;
    let centers = centers(&h.bin_edges);
    let mut density = Vec::with_capacity(h.bins());
    let mut stderr = Vec::with_capacity(h.bins());
    for i in 0..h.bins() {
        let width = h.bin_edges[i + 1] - h.bin_edges[i];
        density.push(h.weight_sums[i] / (h.total_weight * width));
        let mean = h.weight_sums[i] / n;
        let var = (h.weight_sq_sums[i] / n - mean * mean).max(0.0) / n;
        stderr.push(var.sqrt() * n / (h.total_weight * width));
    }
    Ok(DensityEstimate {
        bin_edges: h.bin_edges.clone(),
        bin_centers: centers,
        density,
        stderr,
    })
}

/// Agreement between a Monte-Carlo estimate and the analytic density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub max_rel_error: f64,
    pub per_bin_z: Vec<f64>,
    /// Bin with the largest `|z|`.
    pub worst_bin: usize,
    /// Normalized analytic density at each bin center.
    pub analytic: Vec<f64>,
}

impl ComparisonReport {
    pub fn bins_beyond(&self, z: f64) -> usize {
        self.per_bin_z.iter().filter(|v| v.abs() > z).count()
    }
}

/// Compares against `analytic / ∫_A^B analytic`, normalized exactly.
pub fn compare(
    est: &DensityEstimate,
    analytic: &Poly,
    window: &CutWindow,
) -> Result<ComparisonReport, DhError> {
    let mass = rational_to_f64(&construction::exact_mass(analytic, window));
    if !(mass > 0.0) {
        return Err(DhError::Degenerate(
            "analytic density has no positive mass".into(),
        ));
    }
    let compiled = analytic.compile();
    let mut point = vec![0.0; analytic.nvars()];
    let mut max_rel_error = 0.0;
    let mut worst_bin = 0;
    let mut per_bin_z = Vec::with_capacity(est.density.len());
    let mut values = Vec::with_capacity(est.density.len());
    for (i, (&c, &d)) in est.bin_centers.iter().zip(&est.density).enumerate() {
        point[T] = c;
        let a = compiled.eval(&point) / mass;
        max_rel_error = f64::max(max_rel_error, (d - a).abs() / a);
        let se = est.stderr[i];
        let z = if se > 0.0 {
            (d - a) / se
        } else if d == a {
            0.0
        } else {
            f64::INFINITY.copysign(d - a)
        };
        if z.abs() > per_bin_z.get(worst_bin).map_or(-1.0, |w: &f64| w.abs()) {
            worst_bin = i;
        }
        per_bin_z.push(z);
        values.push(a);
    }
    Ok(ComparisonReport {
        max_rel_error,
        per_bin_z,
        worst_bin,
        analytic: values,
    })
}

/// Run metadata written as CSV comment lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub samples: u64,
    pub bins: usize,
    pub window: CutWindow,
    pub params: String,
    pub generator: &'static str,
    pub mode: &'static str,
}

impl Provenance {
    pub fn new(cfg: &SamplerConfig, params: String, mode: &'static str) -> Self {
        Provenance {
            seed: cfg.seed,
            samples: cfg.sample_count,
            bins: cfg.bins,
            window: cfg.window,
            params,
            generator: GENERATOR,
            mode,
        }
    }
}

/// Writes `bin_center,analytic_density,mc_density,stderr,z_score` rows
/// after a `#` header carrying the provenance.
pub fn write_density_csv<W: Write>(
    out: W,
    est: &DensityEstimate,
    cmp: &ComparisonReport,
    prov: &Provenance,
) -> Result<(), csv::Error> {
    let mut out = out;
    writeln!(out, "# generator: {}", prov.generator)?;
    writeln!(out, "# seed: {}", prov.seed)?;
    writeln!(out, "# samples: {}", prov.samples)?;
    writeln!(out, "# bins: {}", prov.bins)?;
    writeln!(out, "# window: {} {}", prov.window.a, prov.window.b)?;
    writeln!(out, "# params: {}", prov.params)?;
    writeln!(out, "# mode: {}", prov.mode)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "bin_center",
        "analytic_density",
        "mc_density",
        "stderr",
        "z_score",
    ])?;
    for i in 0..est.density.len() {
        w.write_record(&[
            format!("{:.6}", est.bin_centers[i]),
            format!("{:.12e}", cmp.analytic[i]),
            format!("{:.12e}", est.density[i]),
            format!("{:.12e}", est.stderr[i]),
            format!("{:.6}", cmp.per_bin_z[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
