//! `autq build | verify | eval | words`.
//!
//! Artifacts directory: `spec.txt` (canonical spec), `words.txt`, `generators.txt`,
//! `manifest.json`, `report.json`. Timings go to stderr only.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::construction2::{main_pipeline, word_2letter, TwoLetterResult};
use crate::construction8::{assemble_8letter, word_8letter, EightLetterResult};
use crate::engine::{set_default_fuel, Automorphism};
use crate::error::{Error, Result};
use crate::order::rational::{fmt_rational, parse_rational, Rational};
use crate::order::Point;
use crate::report::VerificationReport;
use crate::sampling::{grid, sample_rationals};
use crate::spec::SequenceSpec;
use crate::word::{evaluate, Assignment, Word, TwoLetterCode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "autq", about = "Universal sequences for order-automorphisms of Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct Overrides {
    #[arg(long, value_parser = ["2", "8"])]
    pub letters: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "n-max")]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub fuel: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build generators and words for a spec file and verify them.
    Build {
        spec: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        over: Overrides,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Re-run the sampled checks on an artifacts directory.
    Verify {
        dir: PathBuf,
        #[command(flatten)]
        over: Overrides,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate a word of the emitted alphabet at a rational.
    Eval {
        dir: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Use the letters before the final taming conjugation.
        #[arg(long)]
        tamed: bool,
    },
    /// Print the universal words and their statistics; no targets needed.
    Words {
        #[arg(long, value_parser = ["2", "8"], default_value = "2")]
        letters: String,
        #[arg(long = "n-max", default_value_t = 1)]
        n_max: u64,
        /// Also print the word text.
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// A finished construction of either size.
pub enum Built {
    Two(TwoLetterResult),
    Eight(EightLetterResult),
}

impl Built {
    pub fn assignment(&self, tamed: bool) -> &Assignment {
        match (self, tamed) {
            (Built::Two(r), false) => &r.assignment,
            (Built::Two(r), true) => &r.tamed_assignment,
            (Built::Eight(r), false) => &r.assignment,
            (Built::Eight(r), true) => &r.tamed_assignment,
        }
    }

    /// Words against targets at the given points.
    pub fn verify(&self, pts: &[Rational], seed: u64) -> Result<VerificationReport> {
        match self {
            Built::Two(r) => r.verify(pts, seed),
            Built::Eight(r) => r.verify(pts, seed),
        }
    }
}

pub fn universal_word(letters: u8, n: u64) -> Word {
    if letters == 8 {
        word_8letter(n)
    } else {
        word_2letter(&TwoLetterCode::default(), n)
    }
}

fn apply_overrides(spec: &mut SequenceSpec, over: &Overrides) {
    let o = &mut spec.options;
    if let Some(l) = &over.letters {
        o.letters = l.parse().expect("validated by clap");
    }
    if let Some(s) = over.samples {
        o.samples = s;
    }
    if let Some(s) = over.seed {
        o.seed = s;
    }
    if over.n_max.is_some() {
        o.n_max = over.n_max;
    }
    if over.fuel.is_some() {
        o.fuel = over.fuel;
    }
}

/// Points used by the construction's own certificates; independent of the seed so the
/// generators only depend on the targets.
fn cert_points(spec: &SequenceSpec) -> Vec<Rational> {
    let mut pts = spec.breakpoints();
    pts.extend(sample_rationals(0x5eed, 60, -20, 20));
    pts.sort();
    pts.dedup();
    pts
}

/// Breakpoints of the inputs, then `samples` seeded rationals in `[-20, 20]`.
pub fn sample_points(spec: &SequenceSpec) -> Vec<Rational> {
    let mut pts = spec.breakpoints();
    for x in sample_rationals(spec.options.seed, spec.options.samples, -20, 20) {
        if !pts.contains(&x) {
            pts.push(x);
        }
    }
    pts
}

/// Points of the generator value table.
fn table_points() -> Vec<Rational> {
    grid(-6, 6, 2)
}

pub fn build(spec: &SequenceSpec) -> Result<Built> {
    if let Some(f) = spec.options.fuel {
        set_default_fuel(f);
    }
    let gs = spec.automorphisms();
    let cert = cert_points(spec);
    Ok(match spec.options.letters {
        8 => Built::Eight(assemble_8letter(&gs, &cert)?),
        _ => Built::Two(main_pipeline(&gs, &cert)?),
    })
}

fn word_count(spec: &SequenceSpec) -> u64 {
    spec.options.n_max.unwrap_or(0).max(spec.targets.len() as u64)
}

fn words_text(spec: &SequenceSpec) -> String {
    let mut s = String::new();
    for n in 1..=word_count(spec) {
        let w = universal_word(spec.options.letters, n);
        let st = w.stats();
        s.push_str(&format!("word {n} length {} nodes {} depth {}\n{}\n", st.length, st.distinct_nodes, st.depth, w));
    }
    s
}

fn generators_text(built: &Built) -> Result<String> {
    let asg = built.assignment(false);
    let mut s = String::new();
    for (l, g) in asg.letters() {
        s.push_str(&format!("letter {l} {}\n", g.describe()));
        for x in table_points() {
            let y = g.forward(&Point::Q(x.clone()))?;
            s.push_str(&format!("  at {} -> {}\n", fmt_rational(&x), y));
        }
    }
    Ok(s)
}

/// Checks the recorded generator table against freshly built letters.
fn check_generators(text: &str, built: &Built, report: &mut VerificationReport) -> Result<()> {
    let asg = built.assignment(false);
    let mut current: Option<(String, Automorphism)> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("letter ") {
            let l = rest.split_whitespace().next().unwrap_or("");
            let g = asg.get(l).ok_or_else(|| Error::parse(k + 1, format!("unknown letter `{l}`")))?;
            current = Some((l.to_string(), g.clone()));
        } else if let Some(rest) = line.strip_prefix("at ") {
            let (x, y) = rest.split_once("->").ok_or_else(|| Error::parse(k + 1, "expected `at x -> y`"))?;
            let (l, g) = current.as_ref().ok_or_else(|| Error::parse(k + 1, "value before any letter"))?;
            let x = Point::Q(parse_rational(x).map_err(|_| Error::parse(k + 1, format!("bad point `{}`", x.trim())))?);
            let got = g.forward(&x);
            let want = y.trim().to_string();
            let ok = matches!(&got, Ok(p) if p.to_string() == want);
            report.note(&format!("generator {l}"), &x, format!("computed {}, recorded {want}", got.map(|p| p.to_string()).unwrap_or_else(|e| e.to_string())), ok);
        } else if !line.is_empty() {
            return Err(Error::parse(k + 1, format!("unexpected `{line}`")));
        }
    }
    Ok(())
}

fn manifest(spec: &SequenceSpec, built: &Built) -> serde_json::Value {
    let (reduction, extra) = match built {
        Built::Two(r) => (
            &r.reduction,
            json!({
                "construction": "two-letter",
                "window": r.reduction.m,
                "support_certificates": r.bundle.certificates.iter().map(|c| json!({
                    "region": c.region, "samples": c.samples,
                })).collect::<Vec<_>>(),
            }),
        ),
        Built::Eight(r) => (&r.reduction, json!({ "construction": "eight-letter", "window": r.reduction.m })),
    };
    let words: Vec<_> = (1..=word_count(spec))
        .map(|n| {
            let st = universal_word(spec.options.letters, n).stats();
            json!({ "n": n, "length": st.length.to_string(), "distinct_nodes": st.distinct_nodes, "depth": st.depth, "letters": st.letters })
        })
        .collect();
    json!({
        "letters": spec.options.letters,
        "targets": spec.targets.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
        "stages": ["taming", "factorization", "splitting", "transport", "letters", "words", "verification"],
        "taming": {
            "direction": format!("{:?}", reduction.taming.direction),
            "bounds": reduction.taming.certificates.iter().map(|c| json!({
                "subject": c.subject, "radius": c.radius, "samples": c.samples,
            })).collect::<Vec<_>>(),
        },
        "factor_chains": reduction.chains.iter().map(|c| c.factors.len()).collect::<Vec<_>>(),
        "reduction_certificates": reduction.certificates,
        "construction": extra,
        "words": words,
    })
}

fn emit(report: &VerificationReport, format: Format) {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
}

fn load_spec(path: &Path) -> Result<SequenceSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    SequenceSpec::parse(&text)
}

fn cmd_build(spec_path: &Path, out: &Path, over: &Overrides, format: Format) -> Result<i32> {
    let mut spec = load_spec(spec_path)?;
    apply_overrides(&mut spec, over);
    let t = Instant::now();
    let built = build(&spec).map_err(|e| Error::Construction(e.to_string()))?;
    eprintln!("build {:.2?}", t.elapsed());
    fs::create_dir_all(out)?;
    fs::write(out.join("spec.txt"), spec.to_text())?;
    fs::write(out.join("words.txt"), words_text(&spec))?;
    fs::write(out.join("generators.txt"), generators_text(&built)?)?;
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest(&spec, &built)).expect("json"))?;
    let t = Instant::now();
    let report = built.verify(&sample_points(&spec), spec.options.seed)?;
    eprintln!("verify {:.2?}", t.elapsed());
    fs::write(out.join("report.json"), report.to_json())?;
    emit(&report, format);
    Ok(if report.verdict { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_verify(dir: &Path, over: &Overrides, format: Format) -> Result<i32> {
    let mut spec = load_spec(&dir.join("spec.txt"))?;
    apply_overrides(&mut spec, over);
    let generators = fs::read_to_string(dir.join("generators.txt")).map_err(|e| Error::Io(format!("generators.txt: {e}")))?;
    let words = fs::read_to_string(dir.join("words.txt")).map_err(|e| Error::Io(format!("words.txt: {e}")))?;
    let built = build(&spec).map_err(|e| Error::Construction(e.to_string()))?;
    let mut report = VerificationReport::new(spec.options.seed, spec.options.samples);
    check_generators(&generators, &built, &mut report)?;
    let mut stored = spec.clone();
    stored.options.n_max = Some(words.lines().filter(|l| l.starts_with("word ")).count() as u64);
    report.note("words", &Point::Q(Rational::from_integer(0.into())), "words.txt matches the universal words".into(), words == words_text(&stored));
    report.merge(built.verify(&sample_points(&spec), spec.options.seed)?);
    emit(&report, format);
    Ok(if report.verdict { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_eval(dir: &Path, word: &str, point: &str, tamed: bool) -> Result<i32> {
    let spec = load_spec(&dir.join("spec.txt"))?;
    let w = Word::parse(word)?;
    if w.is_empty() {
        return Err(Error::parse(1, "the empty word is not a semigroup element"));
    }
    let x = parse_rational(point)?;
    let built = build(&spec).map_err(|e| Error::Construction(e.to_string()))?;
    let asg = built.assignment(tamed);
    let y = evaluate(&w, asg)?.apply_q(&x)?;
    println!("{}", fmt_rational(&y));
    Ok(EXIT_OK)
}

fn cmd_words(letters: u8, n_max: u64, full: bool, format: Format) -> i32 {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let w = universal_word(letters, n);
        let st = w.stats();
        match format {
            Format::Text => {
                println!("word {n} length {} nodes {} depth {} letters {}", st.length, st.distinct_nodes, st.depth, st.letters);
                if full {
                    println!("{w}");
                }
            }
            Format::Json => {
                let mut row = json!({ "n": n, "length": st.length.to_string(), "distinct_nodes": st.distinct_nodes, "depth": st.depth });
                if full {
                    row["word"] = json!(w.to_string());
                }
                rows.push(row);
            }
        }
    }
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("json"));
    }
    EXIT_OK
}

fn is_input_error(e: &Error) -> bool {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::Unassigned(_) | Error::Invalid(_) => true,
        Error::Stage { source, .. } => is_input_error(source),
        _ => false,
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = match &cli.command {
        Command::Build { spec, out, over, format } => cmd_build(spec, out, over, *format),
        Command::Verify { dir, over, format } => cmd_verify(dir, over, *format),
        Command::Eval { dir, word, point, tamed } => cmd_eval(dir, word, point, *tamed),
        Command::Words { letters, n_max, full, format } => Ok(cmd_words(letters.parse().expect("validated"), *n_max, *full, *format)),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if is_input_error(&e) {
                EXIT_INPUT
            } else {
                EXIT_FAILED
            }
        }
    }
}
