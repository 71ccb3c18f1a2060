//! `glyphforge` command line.
//!
//! Exit codes: 0 success or match, 1 operational error, 2 usage error,
//! 3 best candidate below threshold, 4 nothing scorable in the knowledge base.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::grid::{digitize, BinaryGrid, DigitizeParams, GridDims, DEFAULT_COVERAGE};
use crate::knowledge::{KnowledgeBase, Label, WeightMatrix};
use crate::recognition::{classify, Decision, DecisionKind, Quotient};
use crate::service::{self, DecisionBody, Session};
use crate::store;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_UNKNOWN: u8 = 3;
pub const EXIT_EMPTY_KB: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "glyphforge",
    version,
    about = "Teach and recognise glyphs with per-label weight matrices"
)]
pub struct Cli {
    /// Knowledge-base profile file
    #[arg(long, global = true, env = "GLYPHFORGE_KB")]
    kb: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Teach one or more patterns under a label
    Teach(TeachArgs),
    /// Classify a glyph or PBM/PGM image
    Classify(ClassifyArgs),
    /// Classify a labeled corpus (one subdirectory per label) and report accuracy
    Eval(EvalArgs),
    /// Print a label's weight matrix
    Inspect(InspectArgs),
    /// Digitize a PBM/PGM image into a glyph file
    Digitize(DigitizeArgs),
    /// Run the HTTP teaching service
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SamplingArgs {
    /// Luminance at or below which a pixel counts as ink
    #[arg(long, default_value_t = crate::grid::DEFAULT_INK_THRESHOLD)]
    ink_threshold: u8,
    /// Ink fraction needed to blacken a cell, in (0, 1]
    #[arg(long, default_value_t = DEFAULT_COVERAGE)]
    coverage: f64,
}

impl SamplingArgs {
    fn params(&self) -> DigitizeParams {
        DigitizeParams {
            ink_threshold: self.ink_threshold,
            coverage: self.coverage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct TeachArgs {
    #[arg(long)]
    label: String,
    /// Grid size used when the profile does not exist yet
    #[arg(long, value_name = "WxH")]
    grid: Option<GridDims>,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(required = true, value_name = "PATTERN")]
    patterns: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Minimum quotient for a match, as a decimal or a/b fraction
    #[arg(long, default_value = "0.5", value_parser = parse_threshold)]
    threshold: Quotient,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    #[command(flatten)]
    sampling: SamplingArgs,
    input: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_threshold)]
    threshold: Quotient,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    #[command(flatten)]
    sampling: SamplingArgs,
    corpus: PathBuf,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    label: String,
    /// Also draw a character heat map
    #[arg(long)]
    heat: bool,
}

#[derive(Debug, Args)]
struct DigitizeArgs {
    #[arg(long, value_name = "WxH", default_value = "32x32")]
    grid: GridDims,
    #[command(flatten)]
    sampling: SamplingArgs,
    input: PathBuf,
    /// Glyph file to write; stdout when omitted
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Grid size used when the profile does not exist yet
    #[arg(long, value_name = "WxH")]
    grid: Option<GridDims>,
    /// Directory of teach-pad assets to serve at `/`
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<Quotient, String> {
    Quotient::parse(s).ok_or_else(|| format!("invalid threshold {s:?}"))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

/// Parses the process arguments and runs the chosen command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

pub fn run(cli: Cli) -> u8 {
    let kb = cli.kb;
    let result = match cli.command {
        Command::Teach(a) => require_kb(kb).and_then(|kb| cmd_teach(&kb, a)),
        Command::Classify(a) => require_kb(kb).and_then(|kb| cmd_classify(&kb, a)),
        Command::Eval(a) => require_kb(kb).and_then(|kb| cmd_eval(&kb, a)),
        Command::Inspect(a) => require_kb(kb).and_then(|kb| cmd_inspect(&kb, a)),
        Command::Digitize(a) => cmd_digitize(a),
        Command::Serve(a) => require_kb(kb).and_then(|kb| cmd_serve(kb, a)),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("glyphforge: {}", f.message);
            f.code
        }
    }
}

fn require_kb(kb: Option<PathBuf>) -> Result<PathBuf, Failure> {
    kb.ok_or_else(|| usage("no knowledge base given (use --kb or GLYPHFORGE_KB)"))
}

fn parse_label(s: &str) -> Result<Label, Failure> {
    Label::new(s).map_err(|e| usage(e.to_string()))
}

fn cmd_teach(kb_path: &Path, args: TeachArgs) -> CmdResult {
    let label = parse_label(&args.label)?;
    let mut kb = if kb_path.exists() {
        let kb = store::load_kb(kb_path)?;
        if let Some(g) = args.grid.filter(|&g| g != kb.dims()) {
            return Err(Error::DimsMismatch {
                expected: kb.dims(),
                found: g,
            }
            .into());
        }
        kb
    } else {
        KnowledgeBase::new(args.grid.unwrap_or_default())
    };

    let params = args.sampling.params();
    let mut patterns = Vec::with_capacity(args.patterns.len());
    for path in &args.patterns {
        let grid = store::load_pattern(path, kb.dims(), params)
            .map_err(|e| Failure::from(e).context(path))?;
        patterns.push((path, grid));
    }
    let mut lines = String::new();
    for (path, grid) in &patterns {
        let w = kb
            .teach(&label, grid)
            .map_err(|e| Failure::from(e).context(path))?;
        let _ = writeln!(
            lines,
            "taught {label} from {} (teach_count {})",
            path.display(),
            w.teach_count()
        );
    }
    store::save_kb(&kb, kb_path)?;
    print!("{lines}");
    let count = kb.weights(&label)?.teach_count();
    println!("{label}: teach_count {count}");
    Ok(EXIT_OK)
}

impl Failure {
    fn context(mut self, path: &Path) -> Self {
        if !self.message.starts_with(&*path.to_string_lossy()) {
            self.message = format!("{}: {}", path.display(), self.message);
        }
        self
    }
}

fn decision_exit(d: &Decision) -> u8 {
    match d.kind {
        DecisionKind::Match => EXIT_OK,
        DecisionKind::Unknown => EXIT_UNKNOWN,
        DecisionKind::EmptyKb => EXIT_EMPTY_KB,
    }
}

/// Text rendering of a decision: a ranked score table and a verdict line.
pub fn render_decision(d: &Decision) -> String {
    let mut out = String::new();
    if !d.scores.is_empty() {
        let width = d
            .scores
            .iter()
            .map(|s| s.label.as_str().chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>8}  {:>6}  exact",
            "label", "psi", "mu", "q"
        );
        for s in &d.scores {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>8}  {:>6}  {}",
                s.label.as_str(),
                s.psi,
                s.mu,
                s.q_display(),
                s.q
            );
        }
    }
    for l in &d.unscorable {
        let _ = writeln!(out, "skipped {l}: no positive weights");
    }
    match (d.kind, d.best()) {
        (DecisionKind::Match, Some(b)) => {
            let _ = writeln!(out, "MATCH {} q={}", b.label, b.q_display());
        }
        (DecisionKind::Unknown, Some(b)) => {
            let _ = writeln!(out, "UNKNOWN (best {} q={})", b.label, b.q_display());
            let _ = writeln!(
                out,
                "hint: below threshold {}; teach this pattern under its label or treat it as not known",
                d.threshold.to_decimal(2)
            );
        }
        _ => {
            let _ = writeln!(out, "EMPTY (no scorable labels in the knowledge base)");
        }
    }
    out
}

fn cmd_classify(kb_path: &Path, args: ClassifyArgs) -> CmdResult {
    let kb = store::load_kb(kb_path)?;
    let input = store::load_pattern(&args.input, kb.dims(), args.sampling.params())
        .map_err(|e| Failure::from(e).context(&args.input))?;
    let decision = classify(&kb, &input, args.threshold)?;
    match args.output {
        OutputFormat::Text => print!("{}", render_decision(&decision)),
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&DecisionBody::from(&decision)).expect("serializable")
        ),
    }
    Ok(decision_exit(&decision))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub taught: u32,
    pub tested: usize,
    pub correct: usize,
    pub unknown: usize,
    pub misclassified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub expected: String,
    pub predicted: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QStats {
    pub min: String,
    pub median: String,
    pub max: String,
}

/// Aggregate of a corpus run. `accuracy` is `None` when nothing was tested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub per_label: BTreeMap<String, LabelCounts>,
    pub tested: usize,
    pub correct: usize,
    pub accuracy: Option<String>,
    pub confusion: Vec<Confusion>,
    /// Winning quotients; median is the lower middle value.
    pub winning_q: Option<QStats>,
}

/// Classifies each `(expected, pattern)` sample against `kb`.
pub fn evaluate(
    kb: &KnowledgeBase,
    samples: &[(Label, BinaryGrid)],
    threshold: Quotient,
) -> crate::Result<EvalReport> {
    let mut per_label: BTreeMap<String, LabelCounts> = kb
        .entries()
        .map(|(l, w)| {
            (
                l.to_string(),
                LabelCounts {
                    taught: w.teach_count(),
                    ..Default::default()
                },
            )
        })
        .collect();
    let mut confusion: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut winners = Vec::new();
    let mut correct = 0;
    for (expected, grid) in samples {
        let d = classify(kb, grid, threshold)?;
        let counts = per_label.entry(expected.to_string()).or_default();
        counts.tested += 1;
        if let Some(b) = d.best() {
            winners.push(b.q);
        }
        match (d.kind, d.best()) {
            (DecisionKind::Match, Some(b)) if b.label == *expected => {
                counts.correct += 1;
                correct += 1;
            }
            (DecisionKind::Match, Some(b)) => {
                counts.misclassified += 1;
                *confusion
                    .entry((expected.to_string(), b.label.to_string()))
                    .or_default() += 1;
            }
            _ => counts.unknown += 1,
        }
    }
    winners.sort();
    let winning_q = (!winners.is_empty()).then(|| QStats {
        min: winners[0].to_string(),
        median: winners[(winners.len() - 1) / 2].to_string(),
        max: winners[winners.len() - 1].to_string(),
    });
    let tested = samples.len();
    Ok(EvalReport {
        per_label,
        tested,
        correct,
        accuracy: Quotient::new(correct as i64, tested as u64).map(|q| q.to_decimal(4)),
        confusion: confusion
            .into_iter()
            .map(|((expected, predicted), count)| Confusion {
                expected,
                predicted,
                count,
            })
            .collect(),
        winning_q,
    })
}

fn render_eval(r: &EvalReport) -> String {
    let mut out = String::new();
    let width = r
        .per_label
        .keys()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        .max(5);
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>7}  {:>7}  {:>13}",
        "label", "taught", "tested", "correct", "unknown", "misclassified"
    );
    for (l, c) in &r.per_label {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>7}  {:>7}  {:>13}",
            l, c.taught, c.tested, c.correct, c.unknown, c.misclassified
        );
    }
    let _ = writeln!(
        out,
        "accuracy: {} ({}/{})",
        r.accuracy.as_deref().unwrap_or("n/a"),
        r.correct,
        r.tested
    );
    for c in &r.confusion {
        let _ = writeln!(
            out,
            "confused {} -> {}: {}",
            c.expected, c.predicted, c.count
        );
    }
    if let Some(q) = &r.winning_q {
        let _ = writeln!(
            out,
            "winning q: min {} median {} max {}",
            q.min, q.median, q.max
        );
    }
    out
}

fn sorted_entries(dir: &Path) -> crate::Result<Vec<PathBuf>> {
    let mut paths = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<crate::Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

fn cmd_eval(kb_path: &Path, args: EvalArgs) -> CmdResult {
    let kb = store::load_kb(kb_path)?;
    let params = args.sampling.params();
    let mut samples = Vec::new();
    for entry in sorted_entries(&args.corpus)? {
        if !entry.is_dir() {
            eprintln!(
                "warning: ignoring {} (not a label directory)",
                entry.display()
            );
            continue;
        }
        let name = entry.file_name().unwrap_or_default().to_string_lossy();
        let Ok(label) = Label::new(name.as_ref()) else {
            eprintln!("warning: ignoring {} (not a valid label)", entry.display());
            continue;
        };
        for file in sorted_entries(&entry)? {
            if !file.is_file() {
                eprintln!("warning: ignoring {}", file.display());
                continue;
            }
            let grid = store::load_pattern(&file, kb.dims(), params)
                .map_err(|e| Failure::from(e).context(&file))?;
            samples.push((label.clone(), grid));
        }
    }
    let report = evaluate(&kb, &samples, args.threshold)?;
    match args.output {
        OutputFormat::Text => print!("{}", render_eval(&report)),
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        ),
    }
    Ok(EXIT_OK)
}

/// Weight rows in printed-matrix layout, one line per row.
pub fn render_weights(w: &WeightMatrix) -> String {
    let mut out = String::new();
    for row in w.rows() {
        let line: Vec<String> = row.iter().map(i32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Character ramp: `-` strongly negative, `~` weakly negative, `·` zero,
/// `+` weakly positive, `#` strongly positive (relative to the largest magnitude).
pub fn render_heat(w: &WeightMatrix) -> String {
    let peak = i64::from(w.max_abs());
    let mut out = String::new();
    for row in w.rows() {
        for &v in row {
            let v = i64::from(v);
            out.push(match v {
                0 => '·',
                v if v > 0 && 2 * v > peak => '#',
                v if v > 0 => '+',
                v if -2 * v > peak => '-',
                _ => '~',
            });
        }
        out.push('\n');
    }
    out
}

fn cmd_inspect(kb_path: &Path, args: InspectArgs) -> CmdResult {
    let kb = store::load_kb(kb_path)?;
    let label =
        Label::new(args.label.as_str()).map_err(|_| Error::UnknownLabel(args.label.clone()))?;
    let w = kb.weights(&label)?;
    println!("label {label} teach_count {}", w.teach_count());
    print!("{}", render_weights(w));
    if args.heat {
        println!();
        print!("{}", render_heat(w));
    }
    Ok(EXIT_OK)
}

fn cmd_digitize(args: DigitizeArgs) -> CmdResult {
    let raster =
        store::load_raster(&args.input).map_err(|e| Failure::from(e).context(&args.input))?;
    let grid = digitize(&raster, args.grid, args.sampling.params())?;
    match &args.output {
        Some(path) => store::save_glyph(&grid, path)?,
        None => print!("{}", store::format_glyph(&grid)),
    }
    Ok(EXIT_OK)
}

fn cmd_serve(kb_path: PathBuf, args: ServeArgs) -> CmdResult {
    let session = Session::open(&kb_path, args.grid)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure {
        code: EXIT_ERROR,
        message: format!("cannot start runtime: {e}"),
    })?;
    runtime
        .block_on(async {
            let listener = tokio::net::TcpListener::bind(args.bind).await?;
            eprintln!(
                "glyphforge: serving {} on http://{}",
                kb_path.display(),
                listener.local_addr()?
            );
            service::serve_on(listener, session, args.static_dir, async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
        })
        .map_err(|e| Failure {
            code: EXIT_ERROR,
            message: format!("serve on {}: {e}", args.bind),
        })?;
    Ok(EXIT_OK)
}
