use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};

use cipherlab::channel::{
    eavesdrop_and_attack, evaluate_nl_layer, inject_replays, read_frames, run_session, AttackSuite,
    ChannelProfile, EvalOptions,
};
use cipherlab::cipher::{CharMap, Ciphertext, UnmappedPolicy};
use cipherlab::cryptanalysis::replay::replay_report;
use cipherlab::cryptanalysis::stats::chi_squared_text;
use cipherlab::cryptanalysis::{
    berlekamp_massey, break_monoalphabetic, detect_replay, index_of_coincidence,
    keystream_reuse_attack, letter_frequency, payload_digest, AttackReport, AttackStatus,
    CorrelationInput, CorrelationOptions, HillClimbBudget,
};
use cipherlab::data::{self, sentences, DataSet, GEFFE_DEMO, SPANGLISH};
use cipherlab::demo::run_demo;
use cipherlab::keystream::{GeneratorSpec, KeyStream, LfsrConfig};
use cipherlab::nl::{nl_decrypt_traced, nl_encrypt_traced, MixLexicon, NlError, PipelineConfig};

/// Seed used by every subcommand when `--seed` is not given.
const DEFAULT_SEED: u64 = 7;

/// RC4 key ("Key") of the pipeline `simulate` uses when none is given.
const DEFAULT_SIM_KEY_HEX: &str = "4b6579";

#[derive(Parser)]
#[command(name = "cipherlab", version, about = "Stream-cipher laboratory")]
struct Cli {
    /// Data directory; overrides CIPHERLAB_DATA. Files not found there fall
    /// back to the bundled copies.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Add wall-clock timings to reports (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print keystream digits from a generator
    Keystream(KeystreamArgs),
    /// Encrypt a UTF-8 file through a pipeline
    Encrypt(CryptArgs),
    /// Decrypt a file through a pipeline
    Decrypt(CryptArgs),
    /// Run an attack and print a JSON report
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Simulate a channel session and write the frame trace
    Simulate(SimulateArgs),
    /// Compare substitution attacks on plain and mixed-language text
    Evaluate(EvaluateArgs),
    /// Re-run the worked examples and compare with the expected strings
    Demo {
        #[arg(long)]
        json: bool,
    },
    /// Manage data files
    #[command(subcommand)]
    Data(DataCommand),
}

#[derive(Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["rc4", "lfsr", "config"])))]
struct KeystreamArgs {
    #[arg(long, requires = "key_hex")]
    rc4: bool,
    #[arg(long)]
    key_hex: Option<String>,
    /// RC4 output bytes to discard first
    #[arg(long, default_value_t = 0)]
    drop: usize,
    #[arg(long, requires_all = ["length", "taps", "seed"])]
    lfsr: bool,
    #[arg(long)]
    length: Option<usize>,
    /// Tap positions, comma separated
    #[arg(long, value_delimiter = ',')]
    taps: Vec<usize>,
    /// Initial fill, position L first
    #[arg(long)]
    seed: Option<String>,
    /// Generator spec JSON file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of digits (bits for LFSR/Geffe, bytes for RC4)
    #[arg(long)]
    n: usize,
    /// Emit packed octets as hex even for bit generators
    #[arg(long)]
    bytes: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CryptArgs {
    /// Pipeline JSON file, or the name of a data file
    #[arg(long)]
    pipeline: String,
    /// Input file; stdin when omitted
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file (raw bytes); hex on stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input is hex text rather than raw bytes
    #[arg(long)]
    hex: bool,
    /// Print each stage's intermediate value to stderr as JSON
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct ReportOut {
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Letter frequencies, index of coincidence and chi-squared
    Freq {
        /// Text file; the bundled English corpus when omitted
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Break a mono-alphabetic substitution
    BreakMono {
        #[arg(long = "in")]
        input: PathBuf,
        /// Known plaintext, for scoring only
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = HillClimbBudget::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = HillClimbBudget::default().max_stale)]
        max_stale: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Crib-drag two ciphertexts suspected of sharing a keystream
    Reuse {
        #[arg(long)]
        c1: PathBuf,
        #[arg(long)]
        c2: PathBuf,
        #[arg(long)]
        crib: String,
        /// Ciphertext files hold hex text
        #[arg(long)]
        hex: bool,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Recover Geffe seeds from an observed keystream
    Correlation {
        /// Challenge JSON; the bundled demo challenge when omitted
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = CorrelationOptions::default().threshold)]
        threshold: f64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Linear complexity of a bit sequence
    #[command(group(ArgGroup::new("source").required(true).args(["bits", "input"])))]
    Bm {
        #[arg(long)]
        bits: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Flag replayed frames in a trace
    Replay {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        out: ReportOut,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// fresh, reused or weak-wep
    #[arg(long)]
    profile: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Pipeline file or data-file name; RC4 only when omitted
    #[arg(long)]
    pipeline: Option<String>,
    /// One message per line; held-out sentences when omitted
    #[arg(long)]
    messages: Option<PathBuf>,
    /// Number of held-out sentences to send
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// IV space of the weak-wep profile
    #[arg(long)]
    iv_space: Option<u32>,
    /// Per-byte probability of a single bit flip
    #[arg(long, default_value_t = 0.0)]
    corruption: f64,
    /// Copies of earlier frames to re-inject
    #[arg(long, default_value_t = 0)]
    replays: usize,
    /// Frame trace (JSON lines); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full session record including sender ground truth
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Run the eavesdropper and write its results here
    #[arg(long)]
    attack_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Lexicon file or data-file name
    #[arg(long, default_value = SPANGLISH)]
    lexicon: String,
    #[arg(long)]
    charmap: Option<String>,
    #[arg(long, default_value_t = EvalOptions::default().trials)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = EvalOptions::default().letters_per_trial)]
    letters: usize,
    #[arg(long, default_value_t = EvalOptions::default().budget.restarts)]
    restarts: usize,
    #[arg(long, default_value_t = EvalOptions::default().budget.max_stale)]
    max_stale: usize,
    /// Text to sample from; the held-out English text when omitted
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DataCommand {
    /// Rebuild the derived files from the corpus files
    Regen {
        /// Target directory; CIPHERLAB_DATA or the source tree when omitted
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Write every data file to a directory
    Export {
        #[arg(long)]
        dir: PathBuf,
    },
    /// List data file names
    List,
}

enum CliError {
    /// Bad arguments, missing or malformed files.
    Config(String),
    /// Data did not decrypt under the given configuration.
    Mismatch(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Mismatch(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<NlError> for CliError {
    fn from(e: NlError) -> Self {
        if e.is_crypto_mismatch() {
            CliError::Mismatch(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

type CliResult<T = ()> = Result<T, CliError>;

fn read_bytes(path: Option<&Path>) -> CliResult<Vec<u8>> {
    match path {
        Some(p) => std::fs::read(p).map_err(|e| config(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::Runtime(format!("stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    let result = match path {
        Some(p) => std::fs::write(p, bytes),
        // A reader that closed the pipe early (`| head`) is not an error.
        None => match io::stdout().write_all(bytes) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        },
    };
    result.map_err(|e| CliError::Runtime(format!("write failed: {e}")))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult {
    let mut out = text.to_string();
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

/// A file argument that names either an existing path or a data file.
fn data_file(data: &DataSet, arg: &str) -> CliResult<String> {
    let path = Path::new(arg);
    if path.exists() {
        return read_text(path);
    }
    data.get(arg)
        .map(str::to_string)
        .map_err(|_| config(format!("{arg}: no such file or data file")))
}

fn load_pipeline(data: &DataSet, arg: &str) -> CliResult<PipelineConfig> {
    let path = Path::new(arg);
    if path.exists() {
        Ok(PipelineConfig::load(path)?)
    } else if data.get(arg).is_ok() {
        Ok(data.pipeline(arg)?)
    } else {
        Err(config(format!("{arg}: no such pipeline file or data file")))
    }
}

struct Context {
    data: DataSet,
    timing: bool,
}

impl Context {
    fn finish(&self, mut report: AttackReport, started: Instant) -> AttackReport {
        if self.timing {
            report = report.timed(started);
        }
        report
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let data = match &cli.data {
        Some(dir) => DataSet::load_dir(dir),
        None => DataSet::from_env(),
    };
    let result = data.map_err(config).and_then(|data| {
        let ctx = Context {
            data,
            timing: cli.timing,
        };
        dispatch(&ctx, cli.command)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(ctx: &Context, command: Command) -> CliResult {
    match command {
        Command::Keystream(args) => cmd_keystream(args),
        Command::Encrypt(args) => cmd_encrypt(ctx, args),
        Command::Decrypt(args) => cmd_decrypt(ctx, args),
        Command::Attack(cmd) => cmd_attack(ctx, cmd),
        Command::Simulate(args) => cmd_simulate(ctx, args),
        Command::Evaluate(args) => cmd_evaluate(ctx, args),
        Command::Demo { json } => cmd_demo(ctx, json),
        Command::Data(cmd) => cmd_data(ctx, cmd),
    }
}

fn cmd_keystream(args: KeystreamArgs) -> CliResult {
    let spec = if args.rc4 {
        GeneratorSpec::Rc4 {
            key_hex: args.key_hex.unwrap_or_default(),
            drop: args.drop,
        }
    } else if args.lfsr {
        GeneratorSpec::Lfsr(LfsrConfig {
            length: args.length.unwrap_or_default(),
            taps: args.taps,
            seed: args.seed.unwrap_or_default(),
        })
    } else {
        let path = args.config.expect("clap enforces one generator");
        serde_json::from_str(&read_text(&path)?)
            .map_err(|e| config(format!("{}: {e}", path.display())))?
    };
    let generator = spec.build().map_err(config)?;
    if args.n == 0 {
        return write_bytes(args.out.as_deref(), b"");
    }
    let text = if args.bytes {
        hex::encode_upper(generator.keystream_bytes(args.n).0)
    } else {
        generator.digits(args.n).0.render()
    };
    emit(args.out.as_deref(), &text)
}

fn trace_to_stderr(trace: &impl serde::Serialize) {
    eprintln!("{}", serde_json::to_string_pretty(trace).expect("serializable"));
}

fn input_bytes(args: &CryptArgs) -> CliResult<Vec<u8>> {
    let raw = read_bytes(args.input.as_deref())?;
    if !args.hex {
        return Ok(raw);
    }
    let text = String::from_utf8(raw).map_err(|_| config("hex input is not text"))?;
    let compact: String = text.split_whitespace().collect();
    hex::decode(compact).map_err(|e| config(format!("hex input: {e}")))
}

fn output_bytes(args: &CryptArgs, bytes: &[u8]) -> CliResult {
    match &args.out {
        Some(p) => write_bytes(Some(p), bytes),
        None => emit(None, &hex::encode_upper(bytes)),
    }
}

fn cmd_encrypt(ctx: &Context, args: CryptArgs) -> CliResult {
    let cfg = load_pipeline(&ctx.data, &args.pipeline)?;
    let plaintext = String::from_utf8(input_bytes(&args)?)
        .map_err(|e| config(format!("plaintext is not UTF-8: {e}")))?;
    let (ct, trace) = nl_encrypt_traced(&plaintext, &cfg)?;
    if args.trace {
        trace_to_stderr(&trace);
    }
    output_bytes(&args, ct.as_bytes())
}

fn cmd_decrypt(ctx: &Context, args: CryptArgs) -> CliResult {
    let cfg = load_pipeline(&ctx.data, &args.pipeline)?;
    let ct = Ciphertext(input_bytes(&args)?);
    let (text, trace) = nl_decrypt_traced(&ct, &cfg)?;
    if args.trace {
        trace_to_stderr(&trace);
    }
    write_bytes(args.out.as_deref(), text.as_bytes())
}

fn cmd_attack(ctx: &Context, cmd: AttackCommand) -> CliResult {
    let started = Instant::now();
    let (report, out) = match cmd {
        AttackCommand::Freq { input, out } => (attack_freq(ctx, input.as_deref())?, out),
        AttackCommand::BreakMono {
            input,
            truth,
            restarts,
            max_stale,
            seed,
            out,
        } => {
            let ct = read_text(&input)?;
            let truth = truth.as_deref().map(read_text).transpose()?;
            let model = ctx.data.language_model().map_err(config)?;
            let budget = HillClimbBudget { restarts, max_stale };
            let found = break_monoalphabetic(&ct, &model.profile, &model.quadgrams, budget, seed);
            let report = found
                .report(truth.as_deref())
                .detail("dict_hit_rate", model.dictionary_hit_rate(&found.plaintext));
            (report, out)
        }
        AttackCommand::Reuse {
            c1,
            c2,
            crib,
            hex,
            out,
        } => {
            let load = |p: &Path| -> CliResult<Vec<u8>> {
                let raw = read_bytes(Some(p))?;
                if !hex {
                    return Ok(raw);
                }
                let text: String = String::from_utf8_lossy(&raw).split_whitespace().collect();
                hex::decode(text).map_err(|e| config(format!("{}: {e}", p.display())))
            };
            let model = ctx.data.language_model().map_err(config)?;
            let outcome = keystream_reuse_attack(
                &load(&c1)?,
                &load(&c2)?,
                crib.as_bytes(),
                &model.profile,
                &model.quadgrams,
            )
            .map_err(config)?;
            (outcome.report(), out)
        }
        AttackCommand::Correlation {
            input,
            threshold,
            out,
        } => {
            let doc = match &input {
                Some(p) => read_text(p)?,
                None => ctx.data.get(GEFFE_DEMO).map_err(config)?.to_string(),
            };
            let challenge: CorrelationInput = serde_json::from_str(&doc).map_err(config)?;
            let outcome = challenge
                .run(CorrelationOptions { threshold })
                .map_err(config)?;
            (outcome.report(), out)
        }
        AttackCommand::Bm { bits, input, out } => {
            let text = match (bits, input) {
                (Some(b), _) => b,
                (None, Some(p)) => read_text(&p)?,
                (None, None) => unreachable!("clap enforces one source"),
            };
            let ks = KeyStream::parse_bits(&text)
                .ok_or_else(|| config("bits must be a string of 0 and 1"))?;
            if ks.is_empty() {
                return Err(config("bit sequence is empty"));
            }
            (berlekamp_massey(ks.digits()).report(ks.len()), out)
        }
        AttackCommand::Replay { trace, out } => {
            let file = std::fs::File::open(&trace)
                .map_err(|e| config(format!("cannot read {}: {e}", trace.display())))?;
            let frames = read_frames(BufReader::new(file)).map_err(config)?;
            let ids: Vec<_> = frames.iter().map(|f| (f.seq, payload_digest(&f.payload))).collect();
            (replay_report(frames.len(), &detect_replay(&ids)), out)
        }
    };
    let report = ctx.finish(report, started);
    emit(out.out.as_deref(), &report.to_json())
}

fn attack_freq(ctx: &Context, input: Option<&Path>) -> CliResult<AttackReport> {
    let text = match input {
        Some(p) => read_text(p)?,
        None => ctx.data.corpus().to_string(),
    };
    let model = ctx.data.language_model().map_err(config)?;
    let profile = match letter_frequency(&text) {
        Ok(p) => p,
        Err(e) => return Ok(AttackReport::failed("freq", e.to_string())),
    };
    let mut report = AttackReport::new("freq", AttackStatus::Ok);
    report.candidate = Some(profile.argmax().to_string());
    let chi = chi_squared_text(&text, &model.profile).ok();
    report.score = chi;
    let ioc = index_of_coincidence(&text).ok();
    Ok(report
        .detail("top_letter", profile.argmax().to_string())
        .detail("letters", cipherlab::cryptanalysis::stats::count_letters(&text))
        .detail("ioc", ioc)
        .detail("chi_squared", chi)
        .detail("frequencies", profile))
}

fn default_sim_pipeline() -> PipelineConfig {
    PipelineConfig::new(
        None,
        None,
        UnmappedPolicy::Passthrough,
        None,
        GeneratorSpec::Rc4 {
            key_hex: DEFAULT_SIM_KEY_HEX.into(),
            drop: 0,
        },
    )
    .expect("generator-only pipeline is valid")
}

fn cmd_simulate(ctx: &Context, args: SimulateArgs) -> CliResult {
    let pipeline = match &args.pipeline {
        Some(p) => load_pipeline(&ctx.data, p)?,
        None => default_sim_pipeline(),
    };
    let profile = ChannelProfile::named(&args.profile, pipeline, args.iv_space)
        .and_then(|p| p.with_corruption(args.corruption))
        .map_err(config)?;
    let messages: Vec<String> = match &args.messages {
        Some(p) => read_text(p)?.lines().map(str::to_string).collect(),
        None => sentences(ctx.data.heldout()).into_iter().take(args.count).collect(),
    };
    let mut trace = run_session(&profile, &messages, args.seed).map_err(config)?;
    if args.replays > 0 {
        inject_replays(&mut trace, args.replays, args.seed);
    }
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    let mut frames = Vec::new();
    trace.write_jsonl(&mut frames).expect("write to memory");
    write_bytes(args.out.as_deref(), &frames)?;
    if let Some(p) = &args.truth {
        emit(Some(p), &serde_json::to_string_pretty(&trace).expect("serializable"))?;
    }
    if let Some(p) = &args.attack_out {
        let model = ctx.data.language_model().map_err(config)?;
        let suite = AttackSuite {
            seed: args.seed,
            timing: ctx.timing,
            ..Default::default()
        };
        let results = eavesdrop_and_attack(&profile, &trace, &model, &suite);
        emit(Some(p), &serde_json::to_string_pretty(&results).expect("serializable"))?;
    }
    Ok(())
}

fn cmd_evaluate(ctx: &Context, args: EvaluateArgs) -> CliResult {
    let lexicon = MixLexicon::from_json(&data_file(&ctx.data, &args.lexicon)?)
        .map_err(|e| config(format!("{}: {e}", args.lexicon)))?;
    let charmap = match &args.charmap {
        Some(name) => Some(
            CharMap::from_json(&data_file(&ctx.data, name)?)
                .map_err(|e| config(format!("{name}: {e}")))?,
        ),
        None => None,
    };
    let text = match &args.corpus {
        Some(p) => read_text(p)?,
        None => ctx.data.heldout().to_string(),
    };
    let model = ctx.data.language_model().map_err(config)?;
    let opts = EvalOptions {
        trials: args.trials,
        seed: args.seed,
        letters_per_trial: args.letters,
        budget: HillClimbBudget {
            restarts: args.restarts,
            max_stale: args.max_stale,
        },
        lexicon_label: args.lexicon.clone(),
        charmap_label: args.charmap.clone(),
    };
    let started = Instant::now();
    let report = evaluate_nl_layer(&sentences(&text), &lexicon, charmap.as_ref(), &model, &opts)
        .map_err(config)?;
    let json = report.to_json();
    if let Some(p) = &args.out {
        emit(Some(p), &json)?;
    }
    if args.json {
        emit(None, &json)?;
    } else {
        emit(None, &report.render_table())?;
    }
    if ctx.timing {
        eprintln!("wall time: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(())
}

fn cmd_demo(ctx: &Context, json: bool) -> CliResult {
    let cases = run_demo(&ctx.data);
    if json {
        emit(None, &serde_json::to_string_pretty(&cases).expect("serializable"))?;
    } else {
        let mut out = String::new();
        for c in &cases {
            if c.passed {
                out.push_str(&format!("PASS  {}: {}\n", c.name, c.actual));
            } else {
                out.push_str(&format!(
                    "FAIL  {}: expected {:?}, got {:?}\n",
                    c.name, c.expected, c.actual
                ));
            }
        }
        let passed = cases.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{passed}/{} examples reproduced\n", cases.len()));
        emit(None, &out)?;
    }
    if cases.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(CliError::Mismatch("some examples were not reproduced".into()))
    }
}

fn cmd_data(ctx: &Context, cmd: DataCommand) -> CliResult {
    match cmd {
        DataCommand::Regen { dir } => {
            let dir = dir
                .or_else(|| ctx.data.origin().map(Path::to_path_buf))
                .unwrap_or_else(data::source_dir);
            let written = data::regenerate_dir(&dir).map_err(config)?;
            emit(None, &path_lines(&written))
        }
        DataCommand::Export { dir } => {
            let written = ctx.data.export(&dir).map_err(config)?;
            emit(None, &path_lines(&written))
        }
        DataCommand::List => {
            let names: Vec<&str> = ctx.data.names().collect();
            emit(None, &names.join("\n"))
        }
    }
}

fn path_lines(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join("\n")
}
