use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use vfap::construction::{peg_construct, ConstructionSpec};
use vfap::cycles::{census, CycleCensus, DEFAULT_CAP};
use vfap::decoder::{Decoder, DecoderConfig, Variant, DEFAULT_LLR_CLAMP, DEFAULT_MAX_ITERATIONS};
use vfap::sim::{run_sweep, write_csv, StopRule, SweepConfig, Transmission, DEFAULT_MIN_FRAME_ERRORS};
use vfap::{DegreeProfile, ParityCheckMatrix};

#[derive(Parser, Debug)]
#[command(name = "vfap", version, about = "LDPC construction, cycle census and reweighted BP decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a parity-check matrix by progressive edge growth and write it as alist.
    Generate(GenerateArgs),
    /// Report the girth and per-check cycle counts at the girth.
    Census(CensusArgs),
    /// Decode one received vector.
    Decode(DecodeArgs),
    /// Monte Carlo BER/FER sweep, written as CSV.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Block length.
    #[arg(long)]
    n: usize,
    /// Number of check nodes.
    #[arg(long)]
    m: usize,
    /// Variable degree of a regular code.
    #[arg(long, default_value_t = 3, conflicts_with = "lambda")]
    dv: usize,
    /// Edge-perspective variable degree distribution, coefficients of x^0, x^1, ...
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output alist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    alist: PathBuf,
    /// Longest cycle length searched.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Also write per-check counts (check_index,s_i) to this CSV file.
    #[arg(long)]
    per_node: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecoderFlags {
    /// Maximum decoding iterations.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
    /// Magnitude limit for every LLR message.
    #[arg(long, default_value_t = DEFAULT_LLR_CLAMP)]
    clamp: f64,
    /// Uniform reweighting factor for urw_bp [default: 2 / mean variable degree].
    #[arg(long)]
    rho_u: Option<f64>,
    /// Factor for cycle-heavy checks in vfap_bp [default: 2 / mean variable degree].
    #[arg(long)]
    rho_v: Option<f64>,
    /// Cycle search cap used to assign reweighting factors.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

impl DecoderFlags {
    fn config(&self, variant: Variant) -> DecoderConfig {
        DecoderConfig {
            variant,
            max_iterations: self.max_iter,
            llr_clamp: self.clamp,
            rho_uniform: self.rho_u,
            rho_v_override: self.rho_v,
        }
    }
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    alist: PathBuf,
    /// Received values, separated by commas or whitespace.
    #[arg(long, conflicts_with = "y_file", required_unless_present = "y_file", allow_hyphen_values = true)]
    y: Option<String>,
    /// File holding whitespace-separated received values.
    #[arg(long)]
    y_file: Option<PathBuf>,
    /// Noise variance.
    #[arg(long)]
    sigma2: f64,
    /// standard_bp, urw_bp or vfap_bp.
    #[arg(long, default_value = "vfap_bp", value_parser = parse_variant)]
    variant: Variant,
    #[command(flatten)]
    decoder: DecoderFlags,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    alist: PathBuf,
    /// Decoders to compare, in output order.
    #[arg(long, value_delimiter = ',', default_value = "standard_bp,urw_bp,vfap_bp", value_parser = parse_variant)]
    decoders: Vec<Variant>,
    /// E_b/N_0 points in dB.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    snr: Vec<f64>,
    /// Frames per point (upper bound when stopping on frame errors).
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Stop a point after this many frame errors; 0 runs exactly --trials frames.
    #[arg(long, default_value_t = DEFAULT_MIN_FRAME_ERRORS)]
    min_frame_errors: u64,
    /// Seed for every noise stream.
    #[arg(long)]
    seed: u64,
    /// Send encoded random messages instead of the all-zero codeword.
    #[arg(long)]
    random_messages: bool,
    /// Label for the code_id column [default: alist file stem].
    #[arg(long)]
    code_id: Option<String>,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    decoder: DecoderFlags,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: vfap::decoder::DecodeError| e.to_string())
}

/// Bad flag values, reported with exit status 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn check_cap(cap: usize) -> anyhow::Result<()> {
    if cap < 4 || cap % 2 == 1 {
        return Err(config_err(format!("--cap must be even and at least 4, got {cap}")));
    }
    Ok(())
}

fn check_decoder_flags(f: &DecoderFlags, variant: Variant) -> anyhow::Result<()> {
    check_cap(f.cap)?;
    f.config(variant).validate().map_err(|e| config_err(e.to_string()))
}

fn read_code(path: &Path) -> anyhow::Result<ParityCheckMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ParityCheckMatrix::read_alist(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes through a temporary file in the destination directory, so a
/// failed run leaves no partial output behind.
fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn generate(a: &GenerateArgs) -> anyhow::Result<()> {
    if a.m == 0 || a.n <= a.m {
        return Err(config_err(format!("need --n > --m >= 1, got n={} m={}", a.n, a.m)));
    }
    let spec = match &a.lambda {
        Some(lambda) => {
            // check-side distribution only fixes the rate, which PEG takes from n and m
            let profile = DegreeProfile::new(lambda.clone(), vec![1.0], 1.0 - a.m as f64 / a.n as f64)
                .map_err(|e| config_err(e.to_string()))?;
            ConstructionSpec::from_profile(&profile, a.n, a.m, a.seed)
        }
        None => {
            if a.dv == 0 || a.dv > a.m {
                return Err(config_err(format!("--dv must lie in 1..={}", a.m)));
            }
            ConstructionSpec::regular(a.n, a.m, a.dv, a.seed)
        }
    };
    let h = peg_construct(&spec)?;
    write_atomic(&a.out, |w| Ok(w.write_all(h.write_alist().as_bytes())?))?;
    info!("wrote {} x {} code with {} edges to {}", h.m(), h.n(), h.num_edges(), a.out.display());
    Ok(())
}

fn census_summary(c: &CycleCensus) -> String {
    let Some(g) = c.girth else {
        return format!("girth=none (acyclic up to {})\ntotal=0\n", c.cap);
    };
    let mut hist = std::collections::BTreeMap::new();
    for &s in &c.per_check {
        *hist.entry(s).or_insert(0usize) += 1;
    }
    let hist: Vec<String> = hist.iter().map(|(s, k)| format!("{s}:{k}")).collect();
    format!(
        "girth={g}\ntotal={}\nmu={}\ns_min={}\ns_max={}\nhistogram={}\n",
        c.total,
        c.mu_g,
        c.per_check.iter().min().unwrap_or(&0),
        c.per_check.iter().max().unwrap_or(&0),
        hist.join(" ")
    )
}

fn run_census(a: &CensusArgs) -> anyhow::Result<()> {
    check_cap(a.cap)?;
    let h = read_code(&a.alist)?;
    let c = census(&h, a.cap)?;
    if let Some(path) = &a.per_node {
        write_atomic(path, |w| {
            writeln!(w, "check_index,s_i")?;
            for (i, s) in c.per_check.iter().enumerate() {
                writeln!(w, "{i},{s}")?;
            }
            Ok(())
        })?;
    }
    print!("{}", census_summary(&c));
    Ok(())
}

fn parse_reals(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| anyhow!("`{t}` is not a number")))
        .collect()
}

fn decode(a: &DecodeArgs) -> anyhow::Result<()> {
    check_decoder_flags(&a.decoder, a.variant)?;
    if !(a.sigma2 > 0.0 && a.sigma2.is_finite()) {
        return Err(config_err(format!("--sigma2 must be positive, got {}", a.sigma2)));
    }
    let y = match (&a.y, &a.y_file) {
        (Some(text), _) => parse_reals(text).map_err(|e| config_err(format!("--y: {e}")))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_reals(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => unreachable!("clap requires one of --y and --y-file"),
    };
    let h = read_code(&a.alist)?;
    if y.len() != h.n() {
        bail!("received vector has {} values but the code length is {}", y.len(), h.n());
    }
    let c = census(&h, a.decoder.cap)?;
    let d = Decoder::for_variant(&h, &c, a.decoder.config(a.variant))?;
    let r = d.decode(&y, a.sigma2)?;
    let bits: String = r.codeword.iter().map(|b| char::from(b'0' + b)).collect();
    println!("codeword={bits}\nconverged={}\niterations={}", r.converged, r.iterations_used);
    Ok(())
}

fn simulate(a: &SimulateArgs) -> anyhow::Result<()> {
    for &v in &a.decoders {
        check_decoder_flags(&a.decoder, v)?;
    }
    if a.trials == 0 {
        return Err(config_err("--trials must be at least 1"));
    }
    if let Some(s) = a.snr.iter().find(|s| !s.is_finite()) {
        return Err(config_err(format!("--snr value {s} is not finite")));
    }
    let h = read_code(&a.alist)?;
    let c = census(&h, a.decoder.cap)?;
    let stop_rule = match a.min_frame_errors {
        0 => StopRule::Trials(a.trials),
        min_errors => StopRule::FrameErrors { min_errors, max_trials: a.trials },
    };
    let code_id = a.code_id.clone().unwrap_or_else(|| {
        a.alist.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let cfg = SweepConfig {
        seed: a.seed,
        stop_rule,
        transmission: if a.random_messages { Transmission::RandomMessages } else { Transmission::AllZero },
        code_id,
    };
    let variants: Vec<DecoderConfig> = a.decoders.iter().map(|&v| a.decoder.config(v)).collect();
    let records = run_sweep(&h, &c, &variants, &a.snr, &cfg)?;
    match &a.out {
        Some(path) => write_atomic(path, |w| Ok(write_csv(&records, w)?)),
        None => Ok(write_csv(&records, std::io::stdout().lock())?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first} (see --help)");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Census(a) => run_census(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
