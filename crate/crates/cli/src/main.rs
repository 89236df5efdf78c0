use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sha256_dc::boolean::{
    activity_csv, approximate_local_cost, boolean_diff_table, derive_activity,
    exact_local_collision_probability, monte_carlo_local_collision, msb_disturbance, total_cost,
};
use sha256_dc::codeword::{
    build_generator, extend_codeword, format_word_file, parse_word_file, resolve_layout,
    single_bit_census, verify_codeword,
};
use sha256_dc::disturbance::{
    derive_corrections, find_collision_add_linear, single_disturbance_table,
};
use sha256_dc::isd::{low_weight_search, Algorithm, SearchParams};
use sha256_dc::primitives::{digest_bytes, pad_single_block};
use sha256_dc::ring::{
    disturbance_conditions, hex_words, kernel_to_json, solve_disturbance_kernel_with,
};
use sha256_dc::sweep::{fig2_sweep, horizon_at_weight, sweep_csv, SweepConfig};
use sha256_dc::{
    compress, BackwardWindow, ExpansionKind, MessageBlock, RegisterState, VariantName,
};

/// Known digests of the standard hash.
const FIPS_VECTORS: [(&str, &str); 2] = [
    (
        "abc",
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    ),
    (
        "",
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
    ),
];

#[derive(Parser)]
#[command(
    name = "sha256-dc",
    version,
    about = "Differential and coding-theoretic analysis of SHA-256 variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
enum Seed {
    Fixed(u64),
    Random,
}

impl Seed {
    fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(s) => s,
            Seed::Random => rand::thread_rng().gen(),
        }
    }
}

impl FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(Seed::Random);
        }
        s.parse()
            .map(Seed::Fixed)
            .map_err(|_| format!("expected an integer or `random`, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Window {
    Near,
    Far,
}

impl From<Window> for BackwardWindow {
    fn from(w: Window) -> Self {
        match w {
            Window::Near => BackwardWindow::Near,
            Window::Far => BackwardWindow::Far,
        }
    }
}

#[derive(Args, Clone, Debug)]
struct SeedArgs {
    /// Integer seed, or `random` for an entropy seed.
    #[arg(long, default_value = "0")]
    seed: Seed,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Clone, Debug)]
struct SearchArgs {
    #[arg(long, default_value = "canteaut-chabaud")]
    algorithm: Algorithm,
    /// Iteration cap per worker.
    #[arg(long)]
    iterations: Option<u64>,
    /// Wall-clock budget per search.
    #[arg(long, default_value_t = 60.0)]
    budget_secs: f64,
    /// Columns per subset on each side of the join.
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Collision window width in bits.
    #[arg(long, default_value_t = 10)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    swaps: usize,
    /// Stop once a word of at most this weight is found.
    #[arg(long)]
    target: Option<u32>,
    #[command(flatten)]
    seed: SeedArgs,
}

impl SearchArgs {
    fn params(&self, seed: u64) -> SearchParams {
        SearchParams {
            algorithm: self.algorithm,
            iterations: self.iterations.unwrap_or(u64::MAX),
            time_budget: (self.budget_secs > 0.0)
                .then(|| Duration::from_secs_f64(self.budget_secs)),
            p: self.p,
            l: self.l,
            swaps: self.swaps,
            seed,
            workers: self.seed.workers,
            target_weight: self.target,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Hash the reference test messages under a variant.
    Vectors {
        #[arg(long, default_value = "standard")]
        variant: VariantName,
    },
    /// Compress one block under a variant.
    VariantRun {
        #[arg(long, default_value = "standard")]
        variant: VariantName,
        #[arg(long)]
        steps: Option<usize>,
        /// Sixteen hex words; a seeded random block when absent.
        #[arg(long, value_delimiter = ',')]
        message: Option<Vec<String>>,
        #[arg(long)]
        no_feed_forward: bool,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Solve the disturbance kernel of the ADD-linear variant.
    SolveDisturbance {
        #[arg(long, value_enum, default_value = "near")]
        window: Window,
    },
    /// Produce ADD-linear collisions from random messages.
    Collide {
        #[arg(long, default_value_t = 1)]
        multiple: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Correction of a single disturbance in the ADD-linear variant.
    Table1 {
        /// Disturbance word in hex; seeded random when absent.
        #[arg(long)]
        delta: Option<String>,
        /// Step at which the disturbance is introduced.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Output-difference behaviour of Ch and Maj.
    Table2,
    /// Boolean-function activity of the bit-31 characteristic.
    Table3 {
        /// Generator whose bit-31 image is used.
        #[arg(long, value_enum, default_value = "far")]
        window: Window,
        /// Write the activity CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate for one isolated bit-31 local collision.
    LocalCollisionMc {
        #[arg(long, default_value_t = 20)]
        start: usize,
        #[arg(long, default_value_t = 1 << 20)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Weight range of the expansions of all single-bit messages.
    Census {
        #[arg(long, default_value = "sha256-xor")]
        kind: ExpansionKind,
        #[arg(long, default_value_t = 40)]
        steps: usize,
    },
    /// Low-weight codeword search in the XOR-linearised expansion code.
    Search {
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value = "sha256-xor")]
        kind: ExpansionKind,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the best word here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a word file is a valid expanded word.
    VerifyWord {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "sha256-xor")]
        kind: ExpansionKind,
    },
    /// Expand a valid word forward.
    ExtendWord {
        #[arg(long)]
        file: PathBuf,
        /// Target length.
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value = "sha256-xor")]
        kind: ExpansionKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best weight against step count.
    Fig2 {
        #[arg(long, default_value_t = 16)]
        from: usize,
        #[arg(long, default_value_t = 64)]
        to: usize,
        /// Largest step count searched directly.
        #[arg(long, default_value_t = 42)]
        horizon: usize,
        #[arg(long, default_value = "sha256-xor")]
        kind: ExpansionKind,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the sweep CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Vectors { .. } => "vectors",
            Command::VariantRun { .. } => "variant-run",
            Command::SolveDisturbance { .. } => "solve-disturbance",
            Command::Collide { .. } => "collide",
            Command::Table1 { .. } => "table1",
            Command::Table2 => "table2",
            Command::Table3 { .. } => "table3",
            Command::LocalCollisionMc { .. } => "local-collision-mc",
            Command::Census { .. } => "census",
            Command::Search { .. } => "search",
            Command::VerifyWord { .. } => "verify-word",
            Command::ExtendWord { .. } => "extend-word",
            Command::Fig2 { .. } => "fig2",
        }
    }
}

/// Outcome of one subcommand: the JSON payload, whether its checks held,
/// and a one-line summary.
struct Report {
    parameters: Value,
    seed: Option<u64>,
    result: Value,
    verified: bool,
    summary: String,
}

type CmdResult = Result<Report, sha256_dc::Error>;

fn hex(w: u32) -> String {
    format!("{w:08x}")
}

fn parse_hex(s: &str) -> Result<u32, sha256_dc::Error> {
    u32::from_str_radix(s.trim().trim_start_matches("0x"), 16)
        .map_err(|e| sha256_dc::Error::InvalidParams(format!("bad hex word `{s}`: {e}")))
}

fn write_out(path: &Path, text: &str) -> Result<(), sha256_dc::Error> {
    std::fs::write(path, text).map_err(|e| {
        sha256_dc::Error::InvalidParams(format!("cannot write {}: {e}", path.display()))
    })
}

fn read_words(
    path: &Path,
    kind: ExpansionKind,
) -> Result<(Vec<u32>, Option<String>), sha256_dc::Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        sha256_dc::Error::InvalidParams(format!("cannot read {}: {e}", path.display()))
    })?;
    let file = parse_word_file(&text)?;
    match file.grid_cols {
        Some(cols) => match resolve_layout(&file.words, cols, kind) {
            Some((layout, words)) => Ok((words, Some(layout.to_string()))),
            None => Ok((file.words, None)),
        },
        None => Ok((file.words, None)),
    }
}

fn random_block(rng: &mut ChaCha8Rng) -> MessageBlock {
    MessageBlock(std::array::from_fn(|_| rng.gen()))
}

fn vectors(variant: VariantName) -> CmdResult {
    let config = variant.config();
    let mut rows = Vec::new();
    let mut verified = true;
    for (msg, expected) in FIPS_VECTORS {
        let m = pad_single_block(msg.as_bytes())?;
        let digest: String = digest_bytes(&compress(RegisterState::iv(), &m, &config))
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let matches = (variant == VariantName::Standard).then_some(digest == expected);
        verified &= matches.unwrap_or(true);
        rows.push(json!({ "message": msg, "digest": digest, "matches_reference": matches }));
    }
    Ok(Report {
        parameters: json!({ "variant": variant.as_str() }),
        seed: None,
        summary: format!("{} vectors under {variant}", rows.len()),
        result: json!({ "vectors": rows }),
        verified,
    })
}

fn variant_run(
    variant: VariantName,
    steps: Option<usize>,
    message: Option<Vec<String>>,
    no_feed_forward: bool,
    seed: u64,
) -> CmdResult {
    let mut config = variant.config();
    if let Some(n) = steps {
        config = config.with_steps(n)?;
    }
    config.feed_forward = !no_feed_forward;
    let m = match message {
        Some(words) => {
            let words = words
                .iter()
                .map(|w| parse_hex(w))
                .collect::<Result<Vec<_>, _>>()?;
            let words: [u32; 16] =
                words
                    .try_into()
                    .map_err(|w: Vec<u32>| sha256_dc::Error::LengthMismatch {
                        expected: 16,
                        actual: w.len(),
                    })?;
            MessageBlock(words)
        }
        None => random_block(&mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let out = compress(RegisterState::iv(), &m, &config);
    Ok(Report {
        parameters: json!({ "variant": variant.as_str(), "config": config }),
        seed: Some(seed),
        summary: format!("{} steps of {variant}", config.steps),
        result: json!({ "message": hex_words(&m.0), "output": hex_words(&out.to_array()) }),
        verified: true,
    })
}

fn solve(window: Window) -> CmdResult {
    let gens = solve_disturbance_kernel_with::<u32>(window.into());
    let conditions = disturbance_conditions::<u32>(window.into());
    let zero = gens.iter().all(|g| {
        conditions
            .mul_vec(g)
            .is_ok_and(|r| r.iter().all(|&x| x == 0))
    });
    let orders: Vec<u64> = gens
        .iter()
        .map(|g| {
            let tz = g
                .iter()
                .filter(|&&x| x != 0)
                .map(|x| x.trailing_zeros())
                .min()
                .unwrap_or(32);
            1u64 << (32 - tz)
        })
        .collect();
    Ok(Report {
        parameters: json!({ "window": format!("{window:?}").to_lowercase() }),
        seed: None,
        summary: format!("{} generator(s), additive orders {orders:?}", gens.len()),
        result: json!({ "generators": kernel_to_json(&gens), "orders": orders, "conditions_zero": zero }),
        verified: zero,
    })
}

fn collide(multiple: u32, count: usize, seed: u64) -> CmdResult {
    if !(1..=15).contains(&multiple) {
        return Err(sha256_dc::Error::InvalidParams(format!(
            "multiple {multiple} outside 1..=15"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let (mut collisions, mut distinct) = (0, 0);
    for _ in 0..count {
        let m = random_block(&mut rng);
        match find_collision_add_linear(&m, multiple) {
            Ok(p) => {
                collisions += 1;
                distinct += p.is_distinct() as usize;
                let mut j = p.to_json();
                j["distinct"] = json!(p.is_distinct());
                pairs.push(j);
            }
            Err(sha256_dc::Error::CollisionFailed { .. }) => {
                pairs.push(json!({ "message": hex_words(&m.0), "collision": false }))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Report {
        parameters: json!({ "multiple": multiple, "count": count }),
        seed: Some(seed),
        summary: format!("{collisions}/{count} collisions, {distinct} with distinct messages"),
        result: json!({ "collisions": collisions, "distinct": distinct, "pairs": pairs }),
        verified: collisions == count && distinct == count,
    })
}

fn table1(delta: Option<String>, start: usize, seed: u64) -> CmdResult {
    let d = match delta {
        Some(s) => parse_hex(&s)?,
        None => ChaCha8Rng::seed_from_u64(seed).gen_range(1..=u32::MAX),
    };
    let (corr, symbolic) = derive_corrections();
    let rows = single_disturbance_table(d, start)?;
    let rows: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(k, (s, w))| json!({ "step": start + k, "registers": hex_words(&s.to_array()), "dw": hex(*w) }))
        .collect();
    Ok(Report {
        parameters: json!({ "delta": hex(d), "start": start }),
        seed: Some(seed),
        summary: format!("disturbance {d:08x} at step {start}, corrections {corr:?}"),
        result: json!({ "corrections": corr, "symbolic": symbolic, "rows": rows }),
        verified: true,
    })
}

fn table2() -> CmdResult {
    let rows: Vec<Value> = boolean_diff_table()
        .iter()
        .map(|e| {
            json!({
                "function": format!("{:?}", e.func).to_lowercase(),
                "input_diff": e.input_diff.map(u8::from),
                "condition": e.condition.map(|c| c.to_string()),
                "probability": e.probability_label(),
            })
        })
        .collect();
    Ok(Report {
        parameters: json!({}),
        seed: None,
        summary: format!("{} rows", rows.len()),
        result: json!({ "rows": rows }),
        verified: true,
    })
}

fn table3(window: Window, out: Option<PathBuf>) -> CmdResult {
    let g = &solve_disturbance_kernel_with::<u32>(window.into())[0];
    let d = msb_disturbance(g)?;
    let rows = derive_activity(&d.bits);
    let (total, first16) = (total_cost(&rows, 0..64), total_cost(&rows, 0..16));
    if let Some(path) = &out {
        write_out(path, &activity_csv(&rows))?;
    }
    Ok(Report {
        parameters: json!({ "window": format!("{window:?}").to_lowercase(), "scale": d.scale }),
        seed: None,
        summary: format!(
            "weight {}, sum e {total}, steps 0..15 {first16}",
            d.weight()
        ),
        result: json!({
            "bits": d.bit_string(),
            "weight": d.weight(),
            "total_e": total,
            "first16_e": first16,
            "rows": rows,
        }),
        verified: true,
    })
}

fn local_mc(start: usize, trials: u64, seed: u64, workers: usize) -> CmdResult {
    let r = monte_carlo_local_collision(start, trials, seed, workers)?;
    let exact = exact_local_collision_probability();
    let z = r.z_score(exact);
    Ok(Report {
        parameters: json!({ "start": start, "trials": trials, "workers": workers }),
        seed: Some(seed),
        summary: format!("rate {:.6}, exact {exact:.6}, z {z:.2}", r.rate),
        result: json!({
            "estimate": r,
            "exact": exact,
            "approximate_cost": approximate_local_cost(),
            "z": z,
        }),
        verified: true,
    })
}

fn census(kind: ExpansionKind, steps: usize) -> CmdResult {
    let c = single_bit_census(kind, steps)?;
    Ok(Report {
        parameters: json!({ "kind": kind.name(), "steps": steps }),
        seed: None,
        summary: format!("{kind} at {steps} steps: min {} max {}", c.min, c.max),
        result: json!({ "min": c.min, "max": c.max }),
        verified: true,
    })
}

fn search(steps: usize, kind: ExpansionKind, args: &SearchArgs, out: Option<PathBuf>) -> CmdResult {
    let seed = args.seed.seed.resolve();
    let params = args.params(seed);
    let g = build_generator(kind, steps)?;
    let r = low_weight_search(&g, &params)?;
    let (valid, weight) = verify_codeword(&r.best.words, kind, steps)?;
    if let Some(path) = &out {
        write_out(path, &format_word_file(&r.best.words))?;
    }
    Ok(Report {
        parameters: json!({
            "steps": steps,
            "kind": kind.name(),
            "algorithm": params.algorithm,
            "p": params.p,
            "l": params.l,
            "swaps": params.swaps,
            "workers": params.workers,
            "iterations": args.iterations,
            "budget_secs": args.budget_secs,
            "target": params.target_weight,
        }),
        seed: Some(seed),
        summary: format!("weight {weight} after {} iterations", r.iterations),
        result: json!({
            "weight": weight,
            "valid": valid,
            "words": hex_words(&r.best.words),
            "iterations": r.iterations,
            "trace": r.trace,
        }),
        verified: valid,
    })
}

fn verify_word(file: &Path, steps: usize, kind: ExpansionKind) -> CmdResult {
    let (words, layout) = read_words(file, kind)?;
    let (valid, weight) = verify_codeword(&words, kind, steps)?;
    Ok(Report {
        parameters: json!({ "file": file, "steps": steps, "kind": kind.name() }),
        seed: None,
        summary: format!("valid {valid}, weight {weight}"),
        result: json!({ "valid": valid, "weight": weight, "layout": layout, "words": hex_words(&words) }),
        verified: valid,
    })
}

fn extend_word(file: &Path, steps: usize, kind: ExpansionKind, out: Option<PathBuf>) -> CmdResult {
    let (words, layout) = read_words(file, kind)?;
    let (valid, weight) = verify_codeword(&words, kind, words.len())?;
    if !valid {
        return Ok(Report {
            parameters: json!({ "file": file, "steps": steps, "kind": kind.name() }),
            seed: None,
            summary: format!("input of {} words is not a valid word", words.len()),
            result: json!({ "valid": false, "weight": weight }),
            verified: false,
        });
    }
    let ext = extend_codeword(&words, kind, steps)?;
    let (_, ext_weight) = verify_codeword(&ext, kind, steps)?;
    if let Some(path) = &out {
        write_out(path, &format_word_file(&ext))?;
    }
    Ok(Report {
        parameters: json!({ "file": file, "steps": steps, "kind": kind.name() }),
        seed: None,
        summary: format!(
            "{} words of weight {weight} extend to {steps} words of weight {ext_weight}",
            words.len()
        ),
        result: json!({
            "input_steps": words.len(),
            "input_weight": weight,
            "layout": layout,
            "weight": ext_weight,
            "words": hex_words(&ext),
        }),
        verified: true,
    })
}

fn fig2(
    from: usize,
    to: usize,
    horizon: usize,
    kind: ExpansionKind,
    args: &SearchArgs,
    out: Option<PathBuf>,
) -> CmdResult {
    let seed = args.seed.seed.resolve();
    let cfg = SweepConfig {
        steps: from..=to,
        horizon,
        kind,
        params: args.params(seed),
    };
    let rows = fig2_sweep(&cfg)?;
    if let Some(path) = &out {
        write_out(path, &sweep_csv(&rows))?;
    }
    let valid = rows
        .iter()
        .all(|r| verify_codeword(&r.word.words, kind, r.steps).is_ok_and(|v| v.0));
    let low = horizon_at_weight(&rows, 3);
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "steps": r.steps,
                "weight": r.weight,
                "method": r.method,
                "seed": r.seed,
                "iterations": r.iterations,
                "words": hex_words(&r.word.words),
            })
        })
        .collect();
    Ok(Report {
        parameters: json!({
            "from": from,
            "to": to,
            "horizon": horizon,
            "kind": kind.name(),
            "algorithm": cfg.params.algorithm,
            "budget_secs": args.budget_secs,
            "iterations": args.iterations,
        }),
        seed: Some(seed),
        summary: format!(
            "{} rows, largest step count with weight <= 3: {low:?}",
            rows.len()
        ),
        result: json!({ "rows": json_rows, "weight3_horizon": low, "all_valid": valid }),
        verified: valid,
    })
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Vectors { variant } => vectors(variant),
        Command::VariantRun {
            variant,
            steps,
            message,
            no_feed_forward,
            seed,
        } => variant_run(
            variant,
            steps,
            message,
            no_feed_forward,
            seed.seed.resolve(),
        ),
        Command::SolveDisturbance { window } => solve(window),
        Command::Collide {
            multiple,
            count,
            seed,
        } => collide(multiple, count, seed.seed.resolve()),
        Command::Table1 { delta, start, seed } => table1(delta, start, seed.seed.resolve()),
        Command::Table2 => table2(),
        Command::Table3 { window, out } => table3(window, out),
        Command::LocalCollisionMc {
            start,
            trials,
            seed,
        } => local_mc(start, trials, seed.seed.resolve(), seed.workers),
        Command::Census { kind, steps } => census(kind, steps),
        Command::Search {
            steps,
            kind,
            search: args,
            out,
        } => search(steps, kind, &args, out),
        Command::VerifyWord { file, steps, kind } => verify_word(&file, steps, kind),
        Command::ExtendWord {
            file,
            steps,
            kind,
            out,
        } => extend_word(&file, steps, kind, out),
        Command::Fig2 {
            from,
            to,
            horizon,
            kind,
            search: args,
            out,
        } => fig2(from, to, horizon, kind, &args, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let start = Instant::now();
    match run(cli.command) {
        Ok(report) => {
            let doc = json!({
                "command": name,
                "parameters": report.parameters,
                "seed": report.seed,
                "elapsed_secs": start.elapsed().as_secs_f64(),
                "result": report.result,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report serializes")
            );
            eprintln!("{name}: {}", report.summary);
            if report.verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("{name}: verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            ExitCode::from(2)
        }
    }
}
