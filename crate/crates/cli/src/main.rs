//! Command-line front end: decompose matrices over Z_m into tripotent plus
//! nilpotent with machine-checkable certificates, verify certificates, and
//! run the ring classifiers and packaged self-checks.
//!
//! Exit codes are the process-level contract:
//!   0 success / verified
//!   1 verification or self-check failure
//!   2 inadmissible modulus (not of the form 2^k * 3^l)
//!   3 parse or argument error
//!   4 randomized fallback budget exhausted

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use trinil::engine::{
    decompose_with_budget, verify, EngineError, TrinilCertificate, DEFAULT_FALLBACK_BUDGET,
};
use trinil::lab::{
    admissibility_sweep, classify_zm, nondecomposable_scalar_witness,
    strongly2_matrix_refutation, CLASSIFY_CAP,
};
use trinil::matkit::MatZ;
use trinil::zmod::Modulus;

#[derive(Parser)]
#[command(
    name = "trinil",
    version,
    about = "Exact tripotent-plus-nilpotent matrix decomposition over Z_m, m = 2^k * 3^l"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a matrix and emit a verified certificate.
    Decompose(DecomposeArgs),
    /// Re-check a certificate from scratch.
    Verify(VerifyArgs),
    /// Classify Z_m (or a whole range) by exhaustive sweeps.
    Classify(ClassifyArgs),
    /// Run the packaged self-checks and report pass/fail per item.
    Checks(ChecksArgs),
}

#[derive(clap::Args)]
struct DecomposeArgs {
    /// Matrix file (JSON or text); stdin when omitted or "-".
    input: Option<PathBuf>,
    /// Override the modulus from the input document.
    #[arg(long = "mod", value_name = "M")]
    modulus: Option<u64>,
    /// Seed for the randomized GF(2) fallback (default: $TRINIL_SEED or 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on random bases sampled by the fallback (default: 100000).
    #[arg(long)]
    budget: Option<u64>,
    /// Certificate output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Certificate file (JSON); stdin when omitted or "-".
    input: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ClassifyArgs {
    /// Classify a single modulus.
    #[arg(long = "mod", value_name = "M")]
    modulus: Option<u64>,
    /// Classify every m in 2..=LIMIT and tabulate against the 2^a * 3^b law.
    #[arg(long, value_name = "LIMIT")]
    sweep: Option<u64>,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct ChecksArgs {
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Deliberately corrupt one check to exercise the failure path.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    Verification(String), // exit 1
    Inadmissible(String), // exit 2
    Parse(String),        // exit 3
    Budget(String),       // exit 4
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Inadmissible(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Budget(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(msg)
            | Failure::Inadmissible(msg)
            | Failure::Parse(msg)
            | Failure::Budget(msg) => msg,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Checks(args) => cmd_checks(args),
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Parse(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

/// Parse either the JSON document {"m":..,"n":..,"entries":[..]} or the text
/// format: a header line `mod <m> n <n>` followed by n rows of n entries.
fn parse_matrix(text: &str) -> Result<MatZ, Failure> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text)
            .map_err(|e| Failure::Parse(format!("bad matrix document: {e}")));
    }
    let mut tokens = text.split_whitespace();
    let expect_word = |tok: Option<&str>, want: &str| -> Result<(), Failure> {
        match tok {
            Some(w) if w == want => Ok(()),
            other => Err(Failure::Parse(format!(
                "expected `{want}` in header, found {other:?}"
            ))),
        }
    };
    expect_word(tokens.next(), "mod")?;
    let m: u64 = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Failure::Parse("expected a modulus after `mod`".into()))?;
    expect_word(tokens.next(), "n")?;
    let n: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Failure::Parse("expected a dimension after `n`".into()))?;

    let modulus = Modulus::new(m).map_err(|e| Failure::Inadmissible(e.to_string()))?;
    let mut entries = Vec::with_capacity(n * n);
    for tok in tokens.by_ref() {
        let v: i64 = tok
            .parse()
            .map_err(|_| Failure::Parse(format!("bad matrix entry `{tok}`")))?;
        entries.push(v);
    }
    if entries.len() != n * n {
        return Err(Failure::Parse(format!(
            "expected {} entries for a {n}x{n} matrix, found {}",
            n * n,
            entries.len()
        )));
    }
    MatZ::new(modulus, n, entries).map_err(|e| Failure::Parse(e.to_string()))
}

fn engine_failure(err: EngineError) -> Failure {
    match err {
        EngineError::InadmissibleModulus { .. } => Failure::Inadmissible(err.to_string()),
        EngineError::FallbackBudgetExhausted { .. } => Failure::Budget(err.to_string()),
        EngineError::InternalVerificationFailure { .. } => Failure::Verification(err.to_string()),
    }
}

fn cmd_decompose(args: DecomposeArgs) -> Result<(), Failure> {
    let text = read_input(args.input.as_deref())?;
    let mut a = parse_matrix(&text)?;
    if let Some(m) = args.modulus {
        let modulus = Modulus::new(m).map_err(|e| Failure::Inadmissible(e.to_string()))?;
        let entries = a.entries().iter().map(|&v| v as i64).collect();
        a = MatZ::new(modulus, a.size(), entries).expect("entry count unchanged");
    }
    let seed = args.seed.unwrap_or_else(env_seed);
    let budget = args.budget.unwrap_or(DEFAULT_FALLBACK_BUDGET);

    let cert = decompose_with_budget(&a, seed, budget).map_err(engine_failure)?;
    match args.format {
        Format::Json => {
            let doc = serde_json::to_string(&cert)
                .expect("certificates always serialize");
            println!("{doc}");
        }
        Format::Text => print!("{}", render_text_certificate(&cert)),
    }
    Ok(())
}

fn env_seed() -> u64 {
    std::env::var("TRINIL_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn render_matrix(out: &mut String, label: &str, mat: &MatZ) {
    let _ = writeln!(out, "{label}:");
    let n = mat.size();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| mat.get(i, j).to_string()).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
}

fn render_text_certificate(cert: &TrinilCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modulus {}", cert.a.modulus().m());
    let _ = writeln!(out, "n {}", cert.a.size());
    let _ = writeln!(out, "seed {}", cert.seed);
    let _ = writeln!(out, "nilpotency-exponent {}", cert.nilpotency_exponent);
    let _ = writeln!(
        out,
        "checks sum={} tripotent={} nilpotent={} residue={}",
        cert.checks.sum_ok, cert.checks.tripotent_ok, cert.checks.nilpotent_ok,
        cert.checks.residue_ok
    );
    render_matrix(&mut out, "A", &cert.a);
    render_matrix(&mut out, "E", &cert.e);
    render_matrix(&mut out, "W", &cert.w);
    for (label, side) in [
        ("mod 2", cert.provenance.two_adic.as_ref()),
        ("mod 3", cert.provenance.three_adic.as_ref()),
    ] {
        if let Some(side) = side {
            let blocks: Vec<String> = side
                .blocks
                .iter()
                .map(|b| format!("size={} poly={:?} route={:?}", b.size, b.poly, b.provenance))
                .collect();
            let _ = writeln!(out, "provenance {label}: {}", blocks.join("; "));
        }
    }
    out
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let text = read_input(args.input.as_deref())?;
    let cert: TrinilCertificate = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("bad certificate document: {e}")))?;
    let outcome = verify(&cert);
    if outcome.ok {
        println!("certificate ok: sum, tripotent, nilpotent, residue checks all passed");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "certificate rejected: first failing check is {}",
            outcome.first_failure().expect("not ok implies a failure")
        )))
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), Failure> {
    match (args.modulus, args.sweep) {
        (Some(m), None) => {
            if !(2..=CLASSIFY_CAP).contains(&m) {
                return Err(Failure::Parse(format!(
                    "--mod must be in 2..={CLASSIFY_CAP}, got {m}"
                )));
            }
            let report = classify_zm(m);
            if args.json {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                println!(
                    "Z_{}: trinil_clean={} strongly_2_nil_clean={} tripotent_ring={} \
                     two_boolean={} bounded_index_exponent={} witness={}",
                    report.m,
                    report.is_trinil_clean,
                    report.is_strongly_2_nil_clean,
                    report.is_tripotent_ring,
                    report.is_2_boolean,
                    report
                        .bounded_index_exponent
                        .map_or("none".to_string(), |e| e.to_string()),
                    report.witness.map_or("none".to_string(), |w| w.to_string()),
                );
            }
            Ok(())
        }
        (None, Some(limit)) => {
            if !(2..=10_000).contains(&limit) {
                return Err(Failure::Parse(format!(
                    "--sweep must be in 2..=10000, got {limit}"
                )));
            }
            let rows = admissibility_sweep(limit);
            if args.json {
                println!("{}", serde_json::to_string(&rows).expect("rows serialize"));
            } else {
                println!("m\ttrinil_clean\tadmissible(2^a*3^b)");
                for row in &rows {
                    println!("{}\t{}\t{}", row.m, row.trinil_clean, row.admissible);
                }
            }
            Ok(())
        }
        _ => Err(Failure::Parse(
            "classify needs exactly one of --mod <M> or --sweep <LIMIT>".into(),
        )),
    }
}

#[derive(Serialize)]
struct CheckItem {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct ChecksReport {
    items: Vec<CheckItem>,
    all_pass: bool,
}

fn cmd_checks(args: ChecksArgs) -> Result<(), Failure> {
    let mut items = Vec::new();

    // 1. The matrix-ring refutation: A^3 - A has an exactly invertible
    //    corner, so no matrix ring over Z_m is strongly 2-nil-clean.
    {
        let mut pass = true;
        for (m, n) in [(6u64, 2usize), (12, 3)] {
            let modulus = Modulus::new(m).expect("fixed admissible modulus");
            let ev = strongly2_matrix_refutation(modulus, n);
            let mut inverse = ev.inverse_corner.clone();
            if args.inject_fault {
                let flipped = -(inverse.get(0, 0) as i64);
                inverse.set(0, 0, flipped);
            }
            if ev.defect_corner.mul(&inverse) != MatZ::identity(modulus, 2) {
                pass = false;
            }
        }
        items.push(CheckItem {
            name: "matrix-refutation",
            pass,
            detail: "(A^3 - A) * [[1,-1],[-1,2]] = I for the corner embedding over Z_6 (n=2) \
                     and Z_12 (n=3)"
                .into(),
        });
    }

    // 2. The scalar converse at p = 5: 2*I_2 has no decomposition.
    {
        let witness = nondecomposable_scalar_witness(5, 2);
        items.push(CheckItem {
            name: "scalar-converse",
            pass: witness == Ok(Some(2)),
            detail: "exhaustive oracle over all 625 candidates finds no tripotent E with \
                     2*I_2 - E nilpotent over GF(5)"
                .into(),
        });
    }

    // 3. The modulus law up to 100.
    {
        let rows = admissibility_sweep(100);
        let pass = rows.iter().all(|r| r.trinil_clean == r.admissible);
        items.push(CheckItem {
            name: "admissibility-sweep",
            pass,
            detail: "for 2 <= m <= 100, Z_m is trinil clean iff m = 2^a * 3^b".into(),
        });
    }

    let all_pass = items.iter().all(|i| i.pass);
    if args.json {
        let report = ChecksReport { items, all_pass };
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    } else {
        for item in &items {
            println!(
                "{}: {} - {}",
                item.name,
                if item.pass { "PASS" } else { "FAIL" },
                item.detail
            );
        }
        println!("{}", if all_pass { "all checks passed" } else { "SOME CHECKS FAILED" });
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification("one or more self-checks failed".into()))
    }
}
