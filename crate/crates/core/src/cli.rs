//! `qwk` command-line front end.
//!
//! Every run is described by a [`RunConfig`]; `--print-config` emits it as
//! JSON and `--config FILE` replays it.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bpsk::{bpsk_cq_state, closed_form_i_alpha_with, energy_split, BpskParams, Precision};
use crate::error::Error;
use crate::fmt::{round9, sig9};
use crate::opalg::{DensityOperator, MatrixJson};
use crate::renyi::{
    alpha_mutual_information, petz_renyi, quantum_relative_entropy, sandwiched_renyi, Alpha, SigmaOptimizerConfig,
};
use crate::secbound::{dvb_rate_table, tradeoff_report, AlphaGrid, Rate, RateTable, TradeoffInputs};
use crate::verify::{run_suite, Suite, VerifyOptions};
use crate::wiretap::{outer_code_by_name, outer_code_for_length, BitVec, Frame, ToeplitzSeed, WiretapCode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Relative entropy, Petz and sandwiched Rényi divergences for state pairs.
    Metrics(MetricsArgs),
    /// Closed-form α-mutual information of the BPSK channel over an α grid.
    BpskSweep(SweepArgs),
    /// Secrecy exponent curve, leakage bound and secure-rate verdicts.
    Bound(BoundArgs),
    /// Encode a message into a wiretap frame.
    CodecEncode(EncodeArgs),
    /// Decode a wiretap frame back to the message.
    CodecDecode(DecodeArgs),
    /// Run the invariant checks.
    Verify(VerifyArgs),
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Metrics(_) | Command::BpskSweep(_) | Command::Bound(_) => Format::Csv,
            Command::CodecEncode(_) | Command::CodecDecode(_) | Command::Verify(_) => Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct MetricsArgs {
    /// JSON file `{"pairs": [{"rho": M, "sigma": M}, ...]}`.
    #[arg(long)]
    pub states: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.5, 2.0])]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// Mean photon numbers |β|² at Eve.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1])]
    pub n_photon: Vec<f64>,
    /// Transmit amplitude β′; with --gamma and --eta adds |β|² = γη|β′|².
    #[arg(long, requires_all = ["gamma", "eta"])]
    pub beta_prime: Option<f64>,
    #[arg(long, requires = "beta_prime")]
    pub gamma: Option<f64>,
    #[arg(long, requires = "beta_prime")]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 10)]
    pub alpha_steps: usize,
    /// Add the Bloch-ball minimisation as a fourth column.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 200)]
    pub grid_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 0.1)]
    pub n_photon: f64,
    #[arg(long, default_value_t = 0.631)]
    pub rho_sac: f64,
    #[arg(long, default_value_t = 16200)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub alpha_steps: usize,
    /// `bpsk`, `full`, or explicit rates such as `1/2,0.75`.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["bpsk".to_string()])]
    pub rates: Vec<String>,
    #[arg(long)]
    pub eps_n: Option<f64>,
    /// Where to write the summary JSON when the curve goes to CSV (default: stderr).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EncodeArgs {
    #[arg(long)]
    pub k1: usize,
    #[arg(long)]
    pub k2: usize,
    /// `identity` or `rep3`.
    #[arg(long, default_value = "identity")]
    pub outer: String,
    /// Message, hex.
    #[arg(long)]
    pub m: String,
    /// Randomiser, hex; drawn from --seed when absent.
    #[arg(long)]
    pub l: Option<String>,
    /// Toeplitz seed, hex; drawn from --seed when absent.
    #[arg(long)]
    pub seed_hex: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DecodeArgs {
    /// Frame JSON `{k1, k2, n, seed_hex, payload_hex}`.
    #[arg(long, conflicts_with_all = ["k1", "k2", "n", "seed_hex", "payload_hex"])]
    pub frame: Option<PathBuf>,
    #[arg(long, requires_all = ["k2", "seed_hex", "payload_hex"])]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    /// Codeword length; defaults to k1 + k2.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed_hex: Option<String>,
    #[arg(long)]
    pub payload_hex: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: Suite,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub grid_steps: usize,
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qwk", version, about = "Rényi-order secrecy bounds for BPSK coherent-state wiretap links")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Replay a RunConfig JSON file instead of a subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved RunConfig and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

/// Failure of a run, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    VerificationFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match resolve(cli) {
        Ok(Some(cfg)) => cfg,
        Ok(None) => return EXIT_OK,
        Err(e) => return report(e),
    };
    match execute(&cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> i32 {
    match e {
        CliError::Input(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
        CliError::VerificationFailed => EXIT_VERIFY_FAILED,
    }
}

/// `None` when the config was printed instead of run.
fn resolve(cli: Cli) -> CliResult<Option<RunConfig>> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(input("config: pass either --config or a subcommand, not both")),
        (None, None) => return Err(input("command: a subcommand or --config is required")),
        (Some(path), None) => {
            let text = fs::read_to_string(&path).map_err(|e| input(format!("config: {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| input(format!("config: {}: {e}", path.display())))?
        }
        (None, Some(command)) => RunConfig {
            format: command.default_format(),
            command,
            out: None,
        },
    };
    if let Some(out) = cli.out {
        cfg.out = Some(out);
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(None);
    }
    Ok(Some(cfg))
}

/// Runs a resolved configuration, writing its output.
pub fn execute(cfg: &RunConfig) -> CliResult<()> {
    let (body, verified) = match &cfg.command {
        Command::Metrics(a) => (cmd_metrics(a, cfg.format)?, true),
        Command::BpskSweep(a) => (cmd_bpsk_sweep(a, cfg.format)?, true),
        Command::Bound(a) => (cmd_bound(a, cfg.format)?, true),
        Command::CodecEncode(a) => (cmd_codec_encode(a, cfg.format)?, true),
        Command::CodecDecode(a) => (cmd_codec_decode(a, cfg.format)?, true),
        Command::Verify(a) => cmd_verify(a, cfg.format)?,
    };
    emit(cfg.out.as_deref(), &body)?;
    if verified {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn emit(out: Option<&Path>, body: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| input(format!("out: {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(input(format!("out: stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn num(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(round9(x))
    } else {
        json!(x.to_string())
    }
}

fn precision() -> CliResult<Precision> {
    Ok(Precision::from_env()?)
}

#[derive(Deserialize)]
struct StatesFile {
    pairs: Vec<StatePair>,
}

#[derive(Deserialize)]
struct StatePair {
    rho: MatrixJson,
    sigma: MatrixJson,
}

fn cmd_metrics(a: &MetricsArgs, format: Format) -> CliResult<String> {
    let text = fs::read_to_string(&a.states).map_err(|e| input(format!("states: {}: {e}", a.states.display())))?;
    let file: StatesFile =
        serde_json::from_str(&text).map_err(|e| input(format!("states: {}: {e}", a.states.display())))?;
    if a.alphas.is_empty() {
        return Err(input("alphas: at least one order is required"));
    }
    let alphas = a
        .alphas
        .iter()
        .map(|&v| Alpha::new(v).map_err(|e| input(format!("alphas: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, pair) in file.pairs.iter().enumerate() {
        let rho = DensityOperator::from_json(&pair.rho).map_err(|e| input(format!("pairs[{i}].rho: {e}")))?;
        let sigma = DensityOperator::from_json(&pair.sigma).map_err(|e| input(format!("pairs[{i}].sigma: {e}")))?;
        if rho.dim() != sigma.dim() {
            return Err(input(format!(
                "pairs[{i}].sigma: dimension {} does not match rho dimension {}",
                sigma.dim(),
                rho.dim()
            )));
        }
        let field = |e: Error| input(format!("pairs[{i}]: {e}"));
        let d = quantum_relative_entropy(&rho, sigma.matrix()).map_err(field)?.value;
        for &alpha in &alphas {
            let petz = petz_renyi(&rho, sigma.matrix(), alpha).map_err(field)?.value;
            let sand = sandwiched_renyi(&rho, sigma.matrix(), alpha).map_err(field)?.value;
            rows.push((i, alpha.value(), d, petz, sand));
        }
    }
    Ok(match format {
        Format::Csv => csv_text(
            &["pair", "alpha", "relative_entropy_bits", "petz_bits", "sandwiched_bits"],
            &rows
                .iter()
                .map(|&(i, al, d, p, s)| vec![i.to_string(), sig9(al), sig9(d), sig9(p), sig9(s)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_text(&json!({
            "rows": rows.iter().map(|&(i, al, d, p, s)| json!({
                "pair": i,
                "alpha": num(al),
                "relative_entropy_bits": num(d),
                "petz_bits": num(p),
                "sandwiched_bits": num(s),
            })).collect::<Vec<_>>(),
        })),
    })
}

fn cmd_bpsk_sweep(a: &SweepArgs, format: Format) -> CliResult<String> {
    let mut energies = a.n_photon.clone();
    if let (Some(bp), Some(g), Some(e)) = (a.beta_prime, a.gamma, a.eta) {
        energies.push(BpskParams::new(bp, g, e)?.n_photon());
    }
    for &x in &energies {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(input(format!("n_photon: {x} must be a finite non-negative number")));
        }
    }
    let grid = AlphaGrid::new(a.alpha_min, a.alpha_max, a.alpha_steps)?;
    let precision = precision()?;
    let oracle_cfg = SigmaOptimizerConfig::default().with_grid_steps(a.grid_steps);
    if a.oracle {
        oracle_cfg.validate()?;
    }

    let jobs: Vec<(f64, f64)> = energies
        .iter()
        .flat_map(|&x| grid.points().into_iter().map(move |al| (x, al)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(x, al)| {
            let split = energy_split(x)?;
            let alpha = Alpha::in_bound_range(al)?;
            let closed = closed_form_i_alpha_with(&split, alpha, precision)?;
            let oracle = if a.oracle {
                Some(alpha_mutual_information(&bpsk_cq_state(&split, [0.5, 0.5])?, alpha, &oracle_cfg)?.value)
            } else {
                None
            };
            Ok((x, al, closed, oracle))
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let max_gap = rows
        .iter()
        .filter_map(|&(_, _, c, o)| o.map(|o| (o - c).abs()))
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |m| m.max(g))));

    Ok(match format {
        Format::Csv => {
            let mut header = vec!["n_photon", "alpha", "i_alpha_bits"];
            if a.oracle {
                header.push("i_alpha_oracle_bits");
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|&(x, al, c, o)| {
                    let mut r = vec![sig9(x), sig9(al), sig9(c)];
                    r.extend(o.map(sig9));
                    r
                })
                .collect();
            if let Some(g) = max_gap {
                eprintln!("max_abs_gap {}", sig9(g));
            }
            csv_text(&header, &table)
        }
        Format::Json => {
            let mut v = json!({
                "rows": rows.iter().map(|&(x, al, c, o)| {
                    let mut r = json!({"n_photon": num(x), "alpha": num(al), "i_alpha_bits": num(c)});
                    if let Some(o) = o {
                        r["i_alpha_oracle_bits"] = num(o);
                    }
                    r
                }).collect::<Vec<_>>(),
            });
            if let Some(g) = max_gap {
                v["max_abs_gap"] = num(g);
            }
            json_text(&v)
        }
    })
}

fn parse_rates(items: &[String]) -> CliResult<Vec<Rate>> {
    let mut rates = Vec::new();
    for item in items {
        match item.trim() {
            "bpsk" => rates.extend(dvb_rate_table(RateTable::Bpsk)),
            "full" => rates.extend(dvb_rate_table(RateTable::Full)),
            other => rates.push(other.parse()?),
        }
    }
    Ok(rates)
}

fn cmd_bound(a: &BoundArgs, format: Format) -> CliResult<String> {
    if !(a.n_photon >= 0.0) || !a.n_photon.is_finite() {
        return Err(input(format!("n_photon: {} must be a finite non-negative number", a.n_photon)));
    }
    let mut inputs = TradeoffInputs::new(a.n_photon, a.rho_sac, a.n);
    inputs.grid = AlphaGrid::new(a.alpha_min, a.alpha_max, a.alpha_steps)?;
    inputs.rates = parse_rates(&a.rates)?;
    inputs.eps_n = a.eps_n;
    inputs.precision = precision()?;
    let report = tradeoff_report(&inputs)?;
    let summary = report.summary_json();
    Ok(match format {
        Format::Csv => {
            let text = json_text(&summary);
            match &a.summary {
                Some(p) => fs::write(p, text).map_err(|e| input(format!("summary: {}: {e}", p.display())))?,
                None => eprint!("{text}"),
            }
            report.to_csv()
        }
        Format::Json => {
            let mut v = summary;
            v["curve"] = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "alpha": num(r.alpha),
                        "i_alpha_bits": num(r.i_alpha_bits),
                        "exponent": num(r.exponent),
                        "log2_delta_bound": num(r.log2_delta_bound),
                    })
                })
                .collect();
            json_text(&v)
        }
    })
}

fn hex_arg(field: &str, hex: &str, len: usize) -> CliResult<BitVec> {
    BitVec::from_hex(hex, len).map_err(|e| input(format!("{field}: {e}")))
}

fn random_bits(len: usize, rng: &mut ChaCha8Rng) -> BitVec {
    BitVec::from_bools(&(0..len).map(|_| rng.random::<bool>()).collect::<Vec<_>>())
}

fn cmd_codec_encode(a: &EncodeArgs, format: Format) -> CliResult<String> {
    let outer = outer_code_by_name(&a.outer, a.k1 + a.k2)?;
    let code = WiretapCode::new(a.k1, a.k2, outer)?;
    // seed bits first, then randomiser bits, from one stream
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let seed_bits = random_bits(a.k1 + a.k2 - 1, &mut rng);
    let l_bits = random_bits(a.k2, &mut rng);
    let seed_bits = match &a.seed_hex {
        Some(h) => hex_arg("seed_hex", h, a.k1 + a.k2 - 1)?,
        None => seed_bits,
    };
    let seed = ToeplitzSeed::new(a.k1, a.k2, seed_bits)?;
    let m = hex_arg("m", &a.m, a.k1)?;
    let l = match &a.l {
        Some(h) => hex_arg("l", h, a.k2)?,
        None => l_bits,
    };
    let y = code.encode(&m, &l, &seed)?;
    let frame = Frame {
        k1: a.k1,
        k2: a.k2,
        n: code.n(),
        seed_hex: seed.bits().to_hex(),
        payload_hex: y.to_hex(),
    };
    Ok(match format {
        Format::Json => json_text(&serde_json::to_value(&frame).expect("frame serializes")),
        Format::Csv => csv_text(
            &["k1", "k2", "n", "seed_hex", "payload_hex"],
            &[vec![
                frame.k1.to_string(),
                frame.k2.to_string(),
                frame.n.to_string(),
                frame.seed_hex,
                frame.payload_hex,
            ]],
        ),
    })
}

fn cmd_codec_decode(a: &DecodeArgs, format: Format) -> CliResult<String> {
    let frame = match &a.frame {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| input(format!("frame: {}: {e}", path.display())))?;
            serde_json::from_str::<Frame>(&text).map_err(|e| input(format!("frame: {}: {e}", path.display())))?
        }
        None => {
            let (Some(k1), Some(k2), Some(seed_hex), Some(payload_hex)) =
                (a.k1, a.k2, a.seed_hex.clone(), a.payload_hex.clone())
            else {
                return Err(input("frame: pass --frame or all of --k1, --k2, --seed-hex, --payload-hex"));
            };
            Frame {
                k1,
                k2,
                n: a.n.unwrap_or(k1 + k2),
                seed_hex,
                payload_hex,
            }
        }
    };
    let seed_len = (frame.k1 + frame.k2).saturating_sub(1);
    let seed = ToeplitzSeed::new(frame.k1, frame.k2, hex_arg("seed_hex", &frame.seed_hex, seed_len)?)?;
    let payload = hex_arg("payload_hex", &frame.payload_hex, frame.n)?;
    let code = WiretapCode::new(frame.k1, frame.k2, outer_code_for_length(frame.k1 + frame.k2, frame.n)?)?;
    let m = code.decode(&payload, &seed)?;
    Ok(match format {
        Format::Json => json_text(&json!({ "k1": frame.k1, "m_hex": m.to_hex() })),
        Format::Csv => csv_text(&["k1", "m_hex"], &[vec![frame.k1.to_string(), m.to_hex()]]),
    })
}

fn cmd_verify(a: &VerifyArgs, format: Format) -> CliResult<(String, bool)> {
    let opts = VerifyOptions {
        tolerance_scale: a.tolerance_scale,
        seed: a.seed,
        grid_steps: a.grid_steps,
        pairs: a.pairs,
    };
    let report = run_suite(a.suite, &opts)?;
    for c in report.failures() {
        eprintln!(
            "FAIL {}: measured {} > tolerance {} (slack {})",
            c.name,
            sig9(c.measured),
            sig9(c.tolerance),
            sig9(c.slack)
        );
    }
    let body = match format {
        Format::Json => json_text(&report.to_json()),
        Format::Csv => report.to_csv(),
    };
    Ok((body, report.passed()))
}
