use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use faqpie::compress::CompressionOptions;
use faqpie::image_io::{load_image, save_image};
use faqpie::partition::EmptyBlockFidelity;
use faqpie::pipeline::{
    compare, compare_table_text, encode_image, synthetic_image, verify_image, write_compare_csv, EncodeConfig,
    Pattern, Strategy, StrategyKind,
};
use faqpie::spectrum::TruncationMode;
use faqpie::Error;

/// Fourier-truncated approximate quantum image encoding.
#[derive(Parser)]
#[command(name = "faqpie", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode an image and write the reconstruction and a JSON report.
    Encode(EncodeArgs),
    /// Run several strategies on one image and print a comparison table.
    Compare(CompareArgs),
    /// Check full simulation against the classical oracle on a small image.
    Verify(VerifyArgs),
    /// Write a deterministic synthetic test image.
    GenImage(GenArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Order of the uncompressed whole-image baseline (defaults to the strategy's m).
    #[arg(long)]
    ref_m: Option<u32>,
    /// Leave all-zero blocks out of the averaged fidelity.
    #[arg(long)]
    exclude_empty_blocks: bool,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out_image: Option<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// Base strategy; the flags below adjust it.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<TruncationMode>,
    /// Partition into tiles of side 2^n0, given as `n0=<int>`.
    #[arg(long, value_name = "n0=INT", value_parser = parse_partition)]
    partition: Option<u32>,
    #[arg(long)]
    m0: Option<u32>,
    /// Turns on rotation pruning and CNOT cancellation.
    #[arg(long)]
    prune_fraction: Option<f64>,
    /// Turns on compression with an absolute angle threshold.
    #[arg(long)]
    prune_abs: Option<f64>,
    #[arg(long)]
    no_parity_cancel: bool,
    /// Write every circuit as a text dump into this directory.
    #[arg(long, value_name = "DIR")]
    dump_circuits: Option<PathBuf>,
    /// Simulate gate by gate instead of the FSL fast path.
    #[arg(long)]
    full_simulation: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Strategy spec such as `faqpie+cucr+ip:m=6,m0=5`; repeat for each column.
    #[arg(long = "strategy", value_parser = parse_strategy, required = true)]
    strategies: Vec<Strategy>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, hide = true)]
    corrupt_angle: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value = "smooth", value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long)]
    out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<TruncationMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_partition(s: &str) -> Result<u32, String> {
    let v = s.strip_prefix("n0=").ok_or_else(|| format!("expected n0=<int>, got '{s}'"))?;
    v.parse().map_err(|e| format!("bad n0: {e}"))
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. }
        | Error::UnsupportedFormat(_)
        | Error::Malformed(_)
        | Error::ShortRead { .. }
        | Error::DimensionOverflow { .. }
        | Error::Parse { .. } => 4,
        Error::TruncationOrder { .. }
        | Error::WrongMode(_)
        | Error::Partition(_)
        | Error::WidthGuard { .. }
        | Error::PlaneTooLarge { .. }
        | Error::InvalidArgument(_) => 3,
        _ => 1,
    }
}

fn config(c: &Common, dump: Option<PathBuf>, full: bool) -> EncodeConfig {
    EncodeConfig {
        ref_m: c.ref_m,
        empty_blocks: if c.exclude_empty_blocks { EmptyBlockFidelity::Exclude } else { EmptyBlockFidelity::IncludeAsOne },
        dump_dir: dump,
        full_simulation: full,
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn encode(a: EncodeArgs) -> Result<(), Failure> {
    let mut st = a.strategy.unwrap_or_else(|| Strategy::new(StrategyKind::Faqpie));
    if let Some(m) = a.m {
        st.m = m;
    }
    if let Some(mode) = a.mode {
        st.mode = mode;
    }
    let cucr = st.kind.compressed() || a.prune_fraction.is_some() || a.prune_abs.is_some();
    let ip = st.kind.partitioned() || a.partition.is_some() || a.m0.is_some();
    st = st.with_flags(cucr, ip);
    if a.partition.is_some() {
        st.n0 = a.partition;
    }
    if a.m0.is_some() {
        st.m0 = a.m0;
    }
    if let Some(f) = a.prune_fraction {
        st.compression.prune_fraction = f;
    }
    if a.prune_abs.is_some() {
        st.compression.prune_abs = a.prune_abs;
        if a.prune_fraction.is_none() && !a.strategy.is_some_and(|s| s.kind.compressed()) {
            st.compression.prune_fraction = 0.0;
        }
    }
    if a.no_parity_cancel {
        st.compression.parity_cancel = false;
    }
    CompressionOptions::validate(&st.compression)?;

    let img = load_image(&a.common.input)?;
    let out = encode_image(&img, &st, &config(&a.common, a.dump_circuits, a.full_simulation))?;
    let r = &out.report;
    if let Some(p) = &a.out_image {
        save_image(p, &out.image)?;
    }
    if let Some(p) = &a.out_report {
        write_text(p, &r.to_json()?)?;
    }
    println!(
        "{}: qubits={} circuits={} rotations_max={} cnots_max={} fidelity(r,g,b)=({:.4}, {:.4}, {:.4})",
        r.strategy_spec, r.qubits, r.circuit_count, r.rotations_max, r.cnots_max, r.fidelity_r, r.fidelity_g, r.fidelity_b
    );
    Ok(())
}

fn compare_cmd(a: CompareArgs) -> Result<(), Failure> {
    if a.strategies.len() < 2 {
        return Err(Error::InvalidArgument("compare needs at least two --strategy values".into()).into());
    }
    let img = load_image(&a.common.input)?;
    let reports = compare(&img, &a.strategies, &config(&a.common, None, false))?;
    print!("{}", compare_table_text(&reports));
    if let Some(p) = &a.out_csv {
        let f = fs::File::create(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
        write_compare_csv(f, &reports)?;
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let img = load_image(&a.input)?;
    let v = verify_image(&img, a.m, a.tol, a.corrupt_angle)?;
    println!("max deviation: {:e}", v.max_deviation());
    if v.passed() {
        println!("PASS (tolerance {:e})", a.tol);
        Ok(())
    } else {
        Err(Failure::Verify(format!("deviation {:e} exceeds tolerance {:e}", v.max_deviation(), a.tol)))
    }
}

fn gen_image(a: GenArgs) -> Result<(), Failure> {
    let img = synthetic_image(a.width, a.height, a.seed, a.pattern)?;
    save_image(&a.out, &img)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Encode(a) => encode(a),
        Cmd::Compare(a) => compare_cmd(a),
        Cmd::Verify(a) => verify(a),
        Cmd::GenImage(a) => gen_image(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(5)
        }
    }
}
