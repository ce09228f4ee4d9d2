//! RGB encoding driver: strategies, reports and comparison tables.
//!
//! This layer is concrete `f64`; everything below it is generic.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Percent, Region};
use crate::compress::CompressionOptions;
use crate::encoder::{encode_plane_classical, encode_plane_exact, encode_plane_with, PlaneEncoding};
use crate::error::{Error, Result};
use crate::fsl::{fsl_counts, FslLayout};
use crate::image_io::{crop_and_merge, required_log_side, to_planes, zero_pad, Grid, ImagePlane, PadRecord, RgbImage};
use crate::partition::{aggregate_metrics, reassemble, split, EmptyBlockFidelity, PartitionPlan};
use crate::spectrum::{check_order, TruncationMode};

pub const CHANNELS: [&str; 3] = ["r", "g", "b"];

/// Default whole-image truncation order.
pub const DEFAULT_M: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "faqpie")]
    Faqpie,
    #[serde(rename = "faqpie+cucr")]
    FaqpieCucr,
    #[serde(rename = "faqpie+ip")]
    FaqpieIp,
    #[serde(rename = "faqpie+cucr+ip")]
    FaqpieCucrIp,
    #[serde(rename = "exact-qpie")]
    ExactQpie,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Faqpie => "faqpie",
            StrategyKind::FaqpieCucr => "faqpie+cucr",
            StrategyKind::FaqpieIp => "faqpie+ip",
            StrategyKind::FaqpieCucrIp => "faqpie+cucr+ip",
            StrategyKind::ExactQpie => "exact-qpie",
        }
    }

    pub fn compressed(self) -> bool {
        matches!(self, StrategyKind::FaqpieCucr | StrategyKind::FaqpieCucrIp)
    }

    pub fn partitioned(self) -> bool {
        matches!(self, StrategyKind::FaqpieIp | StrategyKind::FaqpieCucrIp)
    }

    fn from_parts(cucr: bool, ip: bool) -> Self {
        match (cucr, ip) {
            (false, false) => StrategyKind::Faqpie,
            (true, false) => StrategyKind::FaqpieCucr,
            (false, true) => StrategyKind::FaqpieIp,
            (true, true) => StrategyKind::FaqpieCucrIp,
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "exact-qpie" || s == "qpie" {
            return Ok(StrategyKind::ExactQpie);
        }
        let mut parts = s.split('+');
        if parts.next() != Some("faqpie") {
            return Err(Error::InvalidArgument(format!("unknown strategy '{s}'")));
        }
        let (mut cucr, mut ip) = (false, false);
        for p in parts {
            let flag = match p {
                "cucr" => &mut cucr,
                "ip" => &mut ip,
                _ => return Err(Error::InvalidArgument(format!("unknown strategy option '{p}' in '{s}'"))),
            };
            if *flag {
                return Err(Error::InvalidArgument(format!("'{p}' repeated in '{s}'")));
            }
            *flag = true;
        }
        Ok(Self::from_parts(cucr, ip))
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized encoding strategy.
///
/// Textual form: `name[:key=value,...]` with keys `m`, `n0`, `m0`, `prune`,
/// `prune_abs` and `parity` (`on`/`off`), e.g. `faqpie+cucr+ip:m0=5,prune=0.3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Whole-image order. For partitioned runs it is only the reference.
    pub m: u32,
    /// Block log-side; `None` means `n - 1`.
    pub n0: Option<u32>,
    /// Block order; `None` means `m - 1`.
    pub m0: Option<u32>,
    pub compression: CompressionOptions,
    pub mode: TruncationMode,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            m: DEFAULT_M,
            n0: None,
            m0: None,
            compression: CompressionOptions::default(),
            mode: TruncationMode::Centered,
        }
    }

    /// Turns compression and partitioning on or off, keeping parameters.
    pub fn with_flags(mut self, cucr: bool, ip: bool) -> Self {
        if self.kind != StrategyKind::ExactQpie {
            self.kind = StrategyKind::from_parts(cucr, ip);
        }
        self
    }

    /// `(n0, m0)` for an image of log side `n`, if partitioned.
    pub fn block_params(&self, n: u32) -> Option<(u32, u32)> {
        if !self.kind.partitioned() {
            return None;
        }
        let n0 = self.n0.unwrap_or(n.saturating_sub(1));
        let m0 = self.m0.unwrap_or(self.m.saturating_sub(1));
        Some((n0, m0))
    }

    fn compression_opts(&self) -> Option<&CompressionOptions> {
        self.kind.compressed().then_some(&self.compression)
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let mut st = Strategy::new(name.parse()?);
        for kv in params.into_iter().flat_map(|p| p.split(',')).filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{kv}'")))?;
            let bad = |e: &dyn fmt::Display| Error::InvalidArgument(format!("bad value for {k}: {e}"));
            let v = v.trim();
            match k.trim() {
                "m" => st.m = v.parse().map_err(|e| bad(&e))?,
                "n0" => st.n0 = Some(v.parse().map_err(|e| bad(&e))?),
                "m0" => st.m0 = Some(v.parse().map_err(|e| bad(&e))?),
                "prune" => st.compression.prune_fraction = v.parse().map_err(|e| bad(&e))?,
                "prune_abs" => st.compression.prune_abs = Some(v.parse().map_err(|e| bad(&e))?),
                "parity" => {
                    st.compression.parity_cancel = match v {
                        "on" | "true" => true,
                        "off" | "false" => false,
                        _ => return Err(bad(&"expected on or off")),
                    }
                }
                "mode" => st.mode = v.parse()?,
                other => return Err(Error::InvalidArgument(format!("unknown strategy key '{other}'"))),
            }
        }
        st.compression.validate()?;
        Ok(st)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        // exact QPIE only uses m for its default baseline
        if self.kind == StrategyKind::ExactQpie {
            if self.m != DEFAULT_M {
                write!(f, ":m={}", self.m)?;
            }
            return Ok(());
        }
        write!(f, ":m={}", self.m)?;
        if self.kind.partitioned() {
            if let Some(n0) = self.n0 {
                write!(f, ",n0={n0}")?;
            }
            if let Some(m0) = self.m0 {
                write!(f, ",m0={m0}")?;
            }
        }
        if self.kind.compressed() {
            write!(f, ",prune={}", self.compression.prune_fraction)?;
            if let Some(a) = self.compression.prune_abs {
                write!(f, ",prune_abs={a}")?;
            }
            if !self.compression.parity_cancel {
                f.write_str(",parity=off")?;
            }
        }
        if self.mode == TruncationMode::NonNegative {
            f.write_str(",mode=nonneg")?;
        }
        Ok(())
    }
}

/// Options for one run of [`encode_image`].
#[derive(Debug, Clone, Default)]
pub struct EncodeConfig {
    /// Order of the uncompressed whole-image baseline; `None` uses `strategy.m`
    /// (capped at `n - 2` for exact QPIE, which has no order of its own).
    pub ref_m: Option<u32>,
    pub empty_blocks: EmptyBlockFidelity,
    /// Write each circuit here as soon as it is built.
    pub dump_dir: Option<PathBuf>,
    /// Run the generic simulator instead of the FSL fast path.
    pub full_simulation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub width: usize,
    pub height: usize,
    /// Log2 of the padded side.
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub m: u32,
    pub rotations: usize,
    pub cnots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub channel: String,
    pub block: usize,
    pub qubits: usize,
    pub rotations: usize,
    pub cnots: usize,
    pub total_gates: usize,
    pub rotations_removed: Option<usize>,
    pub cnots_removed: Option<usize>,
    pub fidelity: f64,
    pub fidelity_simulated: Option<f64>,
    pub fidelity_oracle: f64,
    pub retained_energy_ratio: f64,
    pub oracle_deviation: Option<f64>,
    pub preprocess_ms: f64,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub channel: String,
    pub index: usize,
    pub block_row: usize,
    pub block_col: usize,
    pub block_norm: f64,
    pub weight: f64,
}

/// One row of the strategy comparison, plus per-circuit detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub strategy: StrategyKind,
    pub strategy_spec: String,
    pub mode: String,
    pub image: ImageInfo,
    pub qubits: usize,
    pub circuit_count: usize,
    /// Truncation order of the emitted circuits; `None` for exact encoding.
    pub m: Option<u32>,
    pub n0: Option<u32>,
    pub fidelity_r: f64,
    pub fidelity_g: f64,
    pub fidelity_b: f64,
    pub rotations_max: usize,
    pub cnots_max: usize,
    pub baseline: Baseline,
    /// Truncated to two decimals; see `rot_reduction` for other roundings.
    pub rot_reduction_pct: Option<f64>,
    pub cnot_reduction_pct: Option<f64>,
    pub rot_reduction: Option<Percent>,
    pub cnot_reduction: Option<Percent>,
    pub preprocess_ms: f64,
    pub timing_reproducible: bool,
    pub classical_only: bool,
    /// Largest `|fidelity - retained energy ratio|`; only for uncompressed circuits.
    pub fidelity_identity_max_deviation: Option<f64>,
    /// Largest per-circuit oracle deviation; only for uncompressed circuits.
    pub oracle_max_deviation: Option<f64>,
    pub empty_blocks: String,
    pub compression: Option<CompressionOptions>,
    pub circuits: Vec<CircuitReport>,
    pub blocks: Vec<BlockReport>,
}

impl EncodingReport {
    pub fn fidelities(&self) -> [f64; 3] {
        [self.fidelity_r, self.fidelity_g, self.fidelity_b]
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(format!("report serialization: {e}")))
    }

    /// Copy with timing fields zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.preprocess_ms = 0.0;
        for c in &mut r.circuits {
            c.preprocess_ms = 0.0;
        }
        r
    }
}

pub struct EncodeOutput {
    pub report: EncodingReport,
    pub image: RgbImage,
}

struct Job<'a> {
    channel: usize,
    block: usize,
    plane: &'a ImagePlane<f64>,
}

fn millis(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn dump_circuit(dir: &Path, channel: usize, block: usize, c: &Circuit<f64>) -> Result<()> {
    let path = dir.join(format!("{}-{block}.circuit", CHANNELS[channel]));
    fs::write(&path, c.dump()).map_err(|e| Error::io(path, e))
}

/// Ensures the strategy is feasible for a `2^n` image before any work.
fn check_strategy(st: &Strategy, n: u32, ref_m: u32) -> Result<()> {
    check_order(n, ref_m)?;
    match st.kind {
        StrategyKind::ExactQpie => Ok(()),
        _ if st.mode == TruncationMode::NonNegative && st.kind != StrategyKind::Faqpie => Err(Error::WrongMode(
            "the nonneg mode is classical only and cannot be combined with compression or partition",
        )),
        k if k.partitioned() => {
            let (n0, m0) = st.block_params(n).expect("partitioned");
            if n0 >= n {
                return Err(Error::Partition(format!("block log-size n0 = {n0} must be below n = {n}")));
            }
            check_order(n0, m0)
        }
        _ => check_order(n, st.m),
    }
}

/// Full pipeline on an RGB image: pad, split, encode, reassemble, report.
pub fn encode_image(img: &RgbImage, st: &Strategy, cfg: &EncodeConfig) -> Result<EncodeOutput> {
    let n = required_log_side(img.height(), img.width());
    let ref_m = cfg.ref_m.unwrap_or(match st.kind {
        StrategyKind::ExactQpie => st.m.min(n.saturating_sub(2)),
        _ => st.m,
    });
    check_strategy(st, n, ref_m)?;
    if let Some(dir) = &cfg.dump_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let mut planes = Vec::with_capacity(3);
    let mut pad = None;
    for g in to_planes::<f64>(img) {
        let (p, rec) = zero_pad(&g, n)?;
        planes.push(p);
        pad = Some(rec);
    }
    let pad = pad.expect("three channels");

    let block_params = st.block_params(n);
    let mut plans: Vec<Option<PartitionPlan<f64>>> = Vec::with_capacity(3);
    let mut tiles: Vec<Vec<ImagePlane<f64>>> = Vec::with_capacity(3);
    for p in &planes {
        match block_params {
            Some((n0, _)) => {
                let (plan, t) = split(p, n0)?;
                plans.push(Some(plan));
                tiles.push(t);
            }
            None => {
                plans.push(None);
                tiles.push(vec![p.clone()]);
            }
        }
    }
    let jobs: Vec<Job> = tiles
        .iter()
        .enumerate()
        .flat_map(|(channel, ts)| ts.iter().enumerate().map(move |(block, plane)| Job { channel, block, plane }))
        .collect();

    let order = block_params.map_or(st.m, |(_, m0)| m0);
    let run_job = |job: &Job| -> Result<PlaneEncoding<f64>> {
        let mut enc = match st.kind {
            StrategyKind::ExactQpie => encode_plane_exact(job.plane)?,
            _ if st.mode == TruncationMode::NonNegative => encode_plane_classical(job.plane, order, st.mode)?,
            _ => encode_plane_with(job.plane, order, st.compression_opts(), cfg.full_simulation, None)?,
        };
        if let (Some(dir), Some(c)) = (&cfg.dump_dir, &enc.circuit) {
            dump_circuit(dir, job.channel, job.block, c)?;
        }
        // circuits can be large; keep only what the report needs
        enc.circuit = None;
        Ok(enc)
    };
    let encodings: Vec<PlaneEncoding<f64>> = if st.kind == StrategyKind::ExactQpie {
        jobs.iter().map(run_job).collect::<Result<_>>()?
    } else {
        jobs.par_iter().map(run_job).collect::<Result<_>>()?
    };

    assemble(img, st, cfg, n, ref_m, pad, &planes, &plans, &jobs, encodings)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    img: &RgbImage,
    st: &Strategy,
    cfg: &EncodeConfig,
    n: u32,
    ref_m: u32,
    pad: PadRecord,
    planes: &[ImagePlane<f64>],
    plans: &[Option<PartitionPlan<f64>>],
    jobs: &[Job],
    encodings: Vec<PlaneEncoding<f64>>,
) -> Result<EncodeOutput> {
    let classical_only = st.kind != StrategyKind::ExactQpie && st.mode == TruncationMode::NonNegative;
    let block_params = st.block_params(n);
    let mut per_channel: [Vec<&PlaneEncoding<f64>>; 3] = Default::default();
    for (job, enc) in jobs.iter().zip(&encodings) {
        per_channel[job.channel].push(enc);
    }

    let mut fidelities = [0.0; 3];
    let mut display: Vec<ImagePlane<f64>> = Vec::with_capacity(3);
    let mut blocks = Vec::new();
    for (c, encs) in per_channel.iter().enumerate() {
        let metrics: Vec<_> = encs.iter().map(|e| e.metrics.clone()).collect();
        fidelities[c] = aggregate_metrics(&metrics, cfg.empty_blocks)?.avg_fidelity.value();
        let scaled: Vec<Grid<f64>> = encs.iter().map(|e| e.image.clone()).collect();
        match &plans[c] {
            Some(plan) => {
                let norms: Vec<f64> = encs.iter().map(|e| e.metrics.reconstruction_norm).collect();
                display.push(reassemble(&scaled, &plan.with_norms(&norms)?)?);
                blocks.extend(plan.blocks().iter().map(|b| BlockReport {
                    channel: CHANNELS[c].into(),
                    index: b.index,
                    block_row: b.block_row,
                    block_col: b.block_col,
                    block_norm: b.block_norm,
                    weight: b.weight,
                }));
            }
            None => {
                let e = encs[0];
                let norm = e.metrics.reconstruction_norm;
                let g = Grid::from_vec(e.image.rows(), e.image.cols(), e.image.data().iter().map(|v| v * norm).collect())?;
                display.push(ImagePlane::signed(g)?);
                let plane_norm = planes[c].frobenius_norm();
                blocks.push(BlockReport {
                    channel: CHANNELS[c].into(),
                    index: 0,
                    block_row: 0,
                    block_col: 0,
                    block_norm: plane_norm,
                    weight: if plane_norm > 0.0 { 1.0 } else { 0.0 },
                });
            }
        }
    }
    let display: [ImagePlane<f64>; 3] = display.try_into().map_err(|_| Error::Structure("channel count".into()))?;
    let image = crop_and_merge(&display, pad)?;

    let circuits: Vec<CircuitReport> = jobs
        .iter()
        .zip(&encodings)
        .map(|(job, e)| {
            let m = &e.metrics;
            CircuitReport {
                channel: CHANNELS[job.channel].into(),
                block: job.block,
                qubits: m.qubits,
                rotations: m.counts.rotations_ucr,
                cnots: m.counts.cnots_ucr,
                total_gates: m.counts.total(),
                rotations_removed: m.compression.as_ref().map(|s| s.rotations_removed),
                cnots_removed: m.compression.as_ref().map(|s| s.cnots_removed),
                fidelity: m.fidelity().value(),
                fidelity_simulated: m.fidelity_simulated.map(|f| f.value()),
                fidelity_oracle: m.fidelity_oracle.value(),
                retained_energy_ratio: m.retained_energy_ratio,
                oracle_deviation: m.oracle_deviation,
                preprocess_ms: millis(m.preprocess),
                empty: m.empty,
            }
        })
        .collect();

    let live = || encodings.iter().filter(|e| !e.metrics.empty).map(|e| &e.metrics);
    let rotations_max = live().map(|m| m.counts.rotations_ucr).max().unwrap_or(0);
    let cnots_max = live().map(|m| m.counts.cnots_ucr).max().unwrap_or(0);
    let base = fsl_counts(n, ref_m)?;
    let baseline = Baseline { m: ref_m, rotations: base.rotations_ucr, cnots: base.cnots_ucr };
    let (rot_reduction, cnot_reduction) = if classical_only {
        (None, None)
    } else {
        (
            Some(Percent::reduction(baseline.rotations, rotations_max)?),
            Some(Percent::reduction(baseline.cnots, cnots_max)?),
        )
    };

    let uncompressed = !st.kind.compressed();
    let simulated = || encodings.iter().map(|e| &e.metrics).filter(|m| m.fidelity_simulated.is_some());
    let identity = simulated()
        .map(|m| (m.fidelity().value() - m.retained_energy_ratio).abs())
        .reduce(f64::max)
        .filter(|_| uncompressed && st.kind != StrategyKind::ExactQpie);
    let oracle_max = simulated().filter_map(|m| m.oracle_deviation).reduce(f64::max).filter(|_| uncompressed);

    let qubits = match block_params {
        _ if classical_only => 0,
        Some((n0, _)) => 2 * n0 as usize,
        None => 2 * n as usize,
    };

    let report = EncodingReport {
        strategy: st.kind,
        strategy_spec: st.to_string(),
        mode: st.mode.to_string(),
        image: ImageInfo { width: img.width(), height: img.height(), n },
        qubits,
        circuit_count: if classical_only { 0 } else { jobs.len() },
        m: (st.kind != StrategyKind::ExactQpie).then_some(block_params.map_or(st.m, |(_, m0)| m0)),
        n0: block_params.map(|(n0, _)| n0),
        fidelity_r: fidelities[0],
        fidelity_g: fidelities[1],
        fidelity_b: fidelities[2],
        rotations_max,
        cnots_max,
        baseline,
        rot_reduction_pct: rot_reduction.map(|p| p.truncated),
        cnot_reduction_pct: cnot_reduction.map(|p| p.truncated),
        rot_reduction,
        cnot_reduction,
        preprocess_ms: encodings.iter().map(|e| millis(e.metrics.preprocess)).sum(),
        timing_reproducible: false,
        classical_only,
        fidelity_identity_max_deviation: identity,
        oracle_max_deviation: oracle_max,
        empty_blocks: match cfg.empty_blocks {
            EmptyBlockFidelity::IncludeAsOne => "include-as-one".into(),
            EmptyBlockFidelity::Exclude => "exclude".into(),
        },
        compression: st.compression_opts().copied(),
        circuits,
        blocks,
    };
    Ok(EncodeOutput { report, image })
}

/// Runs every strategy on the same image, in order, against one shared baseline.
pub fn compare(img: &RgbImage, strategies: &[Strategy], cfg: &EncodeConfig) -> Result<Vec<EncodingReport>> {
    if strategies.len() < 2 {
        return Err(Error::InvalidArgument("compare needs at least two strategies".into()));
    }
    // one baseline for the whole table
    let mut cfg = cfg.clone();
    if cfg.ref_m.is_none() {
        cfg.ref_m = strategies.iter().find(|s| s.kind != StrategyKind::ExactQpie).map(|s| s.m);
    }
    strategies.iter().map(|s| encode_image(img, s, &cfg).map(|o| o.report)).collect()
}

/// Column order of the comparison table.
pub const TABLE_COLUMNS: [&str; 12] = [
    "strategy",
    "qubits",
    "circuit_count",
    "m",
    "fidelity_r",
    "fidelity_g",
    "fidelity_b",
    "preprocess_ms",
    "rotations_max",
    "cnots_max",
    "rot_reduction_pct",
    "cnot_reduction_pct",
];

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

fn table_row(r: &EncodingReport) -> [String; 12] {
    [
        r.strategy_spec.clone(),
        r.qubits.to_string(),
        r.circuit_count.to_string(),
        opt(r.m),
        format!("{:.4}", r.fidelity_r),
        format!("{:.4}", r.fidelity_g),
        format!("{:.4}", r.fidelity_b),
        format!("{:.2}", r.preprocess_ms),
        r.rotations_max.to_string(),
        r.cnots_max.to_string(),
        pct(r.rot_reduction_pct),
        pct(r.cnot_reduction_pct),
    ]
}

/// Side-by-side text table: one line per field, one column per strategy.
pub fn compare_table_text(reports: &[EncodingReport]) -> String {
    let rows: Vec<[String; 12]> = reports.iter().map(table_row).collect();
    let label_w = TABLE_COLUMNS.iter().map(|c| c.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = rows.iter().map(|r| r.iter().map(|c| c.len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, label) in TABLE_COLUMNS.iter().enumerate() {
        out.push_str(&format!("{label:<label_w$}"));
        for (r, w) in rows.iter().zip(&col_w) {
            out.push_str(&format!(" | {:>w$}", r[i]));
        }
        out.push('\n');
    }
    if let Some(r) = reports.first() {
        out.push_str(&format!(
            "baseline: uncompressed whole-image m={} ({} rotations, {} CNOTs); timing is not reproducible\n",
            r.baseline.m, r.baseline.rotations, r.baseline.cnots
        ));
    }
    out
}

/// One CSV row per strategy, columns in [`TABLE_COLUMNS`] order.
pub fn write_compare_csv<W: Write>(w: W, reports: &[EncodingReport]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(TABLE_COLUMNS).map_err(csv_err)?;
    for r in reports {
        wr.write_record(table_row(r)).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Result of [`verify_image`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    /// Per channel: largest deviation between the state and the oracle.
    pub channel_deviation: [f64; 3],
    /// Largest gap between the fast path and full simulation.
    pub fast_path_gap: f64,
    pub tolerance: f64,
}

impl VerifyOutcome {
    pub fn max_deviation(&self) -> f64 {
        self.channel_deviation.iter().copied().fold(self.fast_path_gap, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

/// Widest circuit [`verify_image`] simulates gate by gate.
pub const VERIFY_WIDTH_LIMIT: usize = 16;

/// Simulates each channel's uncompressed circuit gate by gate and checks it
/// against the classical reconstruction. `corrupt` adds `π/2` to the UCR
/// rotation at that index first (negative control).
pub fn verify_image(img: &RgbImage, m: u32, tolerance: f64, corrupt: Option<usize>) -> Result<VerifyOutcome> {
    let n = required_log_side(img.height(), img.width());
    let layout = FslLayout::new(n, m)?;
    if layout.width() > VERIFY_WIDTH_LIMIT {
        return Err(Error::WidthGuard { width: layout.width(), limit: VERIFY_WIDTH_LIMIT });
    }
    if let Some(idx) = corrupt {
        let rotations = fsl_counts(n, m)?.rotations_ucr;
        if idx >= rotations {
            return Err(Error::InvalidArgument(format!("rotation index {idx} out of range ({rotations} rotations)")));
        }
    }
    let hook = move |c: &mut Circuit<f64>| {
        if let Some(idx) = corrupt {
            let mut gates = c.gates().to_vec();
            if let Some(g) =
                gates.iter_mut().filter(|g| g.region == Region::Ucr && g.kind.is_rotation()).nth(idx)
            {
                g.angle = Some(g.angle_or_zero() + std::f64::consts::FRAC_PI_2);
            }
            *c = Circuit::from_gates(c.width(), gates).expect("angle edit keeps the circuit valid");
        }
    };
    let mut channel_deviation = [0.0; 3];
    let mut fast_path_gap: f64 = 0.0;
    for (c, g) in to_planes::<f64>(img).iter().enumerate() {
        let (plane, _) = zero_pad(g, n)?;
        let full = encode_plane_with(&plane, m, None, true, Some(&hook))?;
        let fast = encode_plane_with(&plane, m, None, false, Some(&hook))?;
        channel_deviation[c] = full.metrics.oracle_deviation.unwrap_or(0.0);
        let gap = full.image.data().iter().zip(fast.image.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        fast_path_gap = fast_path_gap.max(gap);
    }
    Ok(VerifyOutcome { channel_deviation, fast_path_gap, tolerance })
}

/// Kind of synthetic test image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pattern {
    /// Low-frequency blobs plus mild noise.
    #[default]
    Smooth,
    /// Independent uniform pixels.
    Random,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Pattern::Smooth),
            "random" => Ok(Pattern::Random),
            _ => Err(Error::InvalidArgument(format!("unknown pattern '{s}' (smooth or random)"))),
        }
    }
}

/// Deterministic synthetic RGB image.
pub fn synthetic_image(width: usize, height: usize, seed: u64, pattern: Pattern) -> Result<RgbImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .ok_or(Error::DimensionOverflow { width, height })?;
    let data = match pattern {
        Pattern::Random => (0..len).map(|_| rng.gen()).collect(),
        Pattern::Smooth => {
            // a few Gaussian blobs per channel over a gradient
            let blobs: Vec<[f64; 5]> = (0..9)
                .map(|_| [rng.gen(), rng.gen(), rng.gen_range(0.05..0.3), rng.gen_range(40.0..140.0), rng.gen()])
                .collect();
            let (w, h) = (width.max(1) as f64, height.max(1) as f64);
            let mut data = Vec::with_capacity(len);
            for r in 0..height {
                for c in 0..width {
                    let (y, x) = (r as f64 / h, c as f64 / w);
                    for ch in 0..3 {
                        let mut v = 40.0 + 50.0 * (x + y) / 2.0 + 20.0 * ch as f64;
                        for b in blobs.iter().skip(ch).step_by(3) {
                            let d2 = (x - b[0]).powi(2) + (y - b[1]).powi(2);
                            v += b[3] * (-d2 / (2.0 * b[2] * b[2])).exp();
                        }
                        v += rng.gen_range(-4.0..4.0);
                        data.push(v.clamp(0.0, 255.0).round() as u8);
                    }
                }
            }
            data
        }
    };
    RgbImage::new(width, height, data)
}
