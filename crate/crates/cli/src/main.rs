//! Command-line front door: build the scheme artifacts, certify every
//! identity, and run sigma-fusions, with machine-readable outputs.
//!
//! Heavy outputs go to files under the output directory; summaries go to
//! standard output and diagnostics to standard error. Exit codes: 0 on
//! success, 1 when a mathematical check fails, 2 on usage or configuration
//! errors, 3 on internal invariant violations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ghscheme::construct::BuildOptions;
use ghscheme::field::{parse_permutation, FieldSpec};
use ghscheme::latin::Symbol;
use ghscheme::pipeline::{
    certify, export_artifacts, run_fusions, sample_sigmas, scheme_summary, CertifyArtifacts, Tier,
    BASIS_CONVENTION,
};
use ghscheme::Error;

const SCHEMA_VERSION: u32 = 1;
/// Orders above this would need tens of gigabytes for dense classes.
const MAX_CLI_M: u32 = 4;

#[derive(Parser)]
#[command(
    name = "ghscheme",
    version,
    about = "Build, certify and fuse symmetric association schemes from GF(2^m) Hadamard matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the Latin square and class matrices and write them out.
    Build(CommonArgs),
    /// Run the certification pipeline and write the verification report.
    Certify(CertifyArgs),
    /// Build sigma-fusions and compare their eigenrows with the tables.
    Fuse(FuseArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Field exponent; the field is GF(2^m).
    #[arg(long)]
    m: u32,
    /// Override the irreducible polynomial, as a decimal or 0b-prefixed
    /// bit-vector (highest degree first), e.g. 7 or 0b111 for x^2+x+1.
    #[arg(long)]
    irr: Option<String>,
    /// Permute the Latin-square round labels: comma-separated symbols over
    /// the field element indices and the letter y, one per round.
    #[arg(long)]
    latin_relabel: Option<String>,
    /// Output directory for file artifacts.
    #[arg(long, default_value = "ghscheme-out")]
    out: PathBuf,
    /// Standard-output style; file formats are fixed.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap the worker thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Verification tier; defaults to full for m <= 3 and spot for m = 4.
    #[arg(long, value_enum)]
    tier: Option<TierArg>,
    /// Allow the full tier at m >= 4 despite its cost.
    #[arg(long)]
    force_full: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TierArg {
    Full,
    Spot,
}

#[derive(Args)]
struct FuseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which permutations to fuse: an image list like "0,2,1,3", the word
    /// "all" (m <= 2 only), or "sample:N".
    #[arg(long)]
    sigma: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => cmd_build(&args),
        Command::Certify(args) => cmd_certify(&args),
        Command::Fuse(args) => cmd_fuse(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant { .. } | Error::Overflow(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn parse_irr(text: &str) -> Result<u32, Error> {
    let parsed = if let Some(bits) = text.strip_prefix("0b") {
        u32::from_str_radix(bits, 2)
    } else {
        text.parse()
    };
    parsed.map_err(|_| Error::InvalidInput(format!("cannot parse polynomial '{text}'")))
}

fn build_spec(args: &CommonArgs) -> Result<FieldSpec, Error> {
    if args.m == 0 || args.m > MAX_CLI_M {
        return Err(Error::InvalidInput(format!(
            "m must be in 1..={MAX_CLI_M}: the dense class matrices at m=5 would already \
             need tens of gigabytes",
        )));
    }
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(Error::InvalidInput("--threads must be positive".into()));
        }
        // Ignore the error if a pool already exists (e.g. in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &args.irr {
        Some(text) => FieldSpec::with_irreducible(args.m, parse_irr(text)?),
        None => FieldSpec::new(args.m),
    }
}

fn build_options(args: &CommonArgs, spec: &FieldSpec) -> Result<BuildOptions, Error> {
    let Some(text) = &args.latin_relabel else {
        return Ok(BuildOptions::default());
    };
    let q = spec.q();
    let symbols: Vec<Symbol> = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok.eq_ignore_ascii_case("y") {
                Ok(Symbol::Y)
            } else {
                let value: u32 = tok
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad relabel symbol '{tok}'")))?;
                if (value as usize) < q {
                    Ok(Symbol::Field(value))
                } else {
                    Err(Error::InvalidInput(format!(
                        "relabel symbol {value} out of range for q={q}"
                    )))
                }
            }
        })
        .collect::<Result<_, Error>>()?;
    Ok(BuildOptions {
        latin_relabel: Some(symbols),
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn cmd_build(args: &CommonArgs) -> Result<ExitCode, Error> {
    let spec = build_spec(args)?;
    let opts = build_options(args, &spec)?;
    let classes_dir = args.out.join("classes");
    fs::create_dir_all(&classes_dir)?;

    let summary = export_artifacts(&spec, &opts, |name, text| {
        let path = if name == "latin.txt" {
            args.out.join(name)
        } else {
            classes_dir.join(name)
        };
        fs::write(path, text)?;
        Ok(())
    })?;

    let summary_value = json!({
        "schema_version": SCHEMA_VERSION,
        "m": summary.m,
        "q": summary.q,
        "irreducible": summary.irreducible,
        "basis": summary.basis,
        "v": summary.v,
        "class_count": summary.class_count,
        "labels": summary.labels,
        "valencies": summary.valencies,
    });
    write_json(&args.out.join("summary.json"), &summary_value)?;

    match args.format {
        Format::Json => println!("{summary_value}"),
        Format::Text => println!(
            "m={} q={} v={} classes={} written to {}",
            summary.m,
            summary.q,
            summary.v,
            summary.class_count,
            args.out.display()
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn resolve_tier(args: &CertifyArgs) -> Result<Tier, Error> {
    match (args.tier, args.common.m) {
        (Some(TierArg::Full), m) if m >= 4 && !args.force_full => Err(Error::InvalidInput(
            "the full tier at m >= 4 multiplies dense matrices of order 4608 for every \
             class pair and idempotent pair; pass --force-full to run it anyway"
                .into(),
        )),
        (Some(TierArg::Full), _) => Ok(Tier::Full),
        (Some(TierArg::Spot), _) => Ok(Tier::Spot),
        (None, m) if m >= 4 => Ok(Tier::Spot),
        (None, _) => Ok(Tier::Full),
    }
}

fn export_certification(
    args: &CertifyArgs,
    tier: Tier,
    arts: &CertifyArtifacts,
) -> Result<(), Error> {
    let out = &args.common.out;
    fs::create_dir_all(out)?;

    let report_value = json!({
        "schema_version": SCHEMA_VERSION,
        "m": arts.summary.m,
        "q": arts.summary.q,
        "irreducible": arts.summary.irreducible,
        "basis": arts.summary.basis,
        "tier": tier,
        "checks": arts.report.checks,
    });
    write_json(&out.join("report.json"), &report_value)?;

    if let Some(tensor) = &arts.tensor {
        write_json(
            &out.join("p_tensor.json"),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "labels": tensor.labels,
                "valencies": tensor.valencies,
                "p": tensor.p,
            }),
        )?;
    }
    if let Some(sd) = &arts.spectral {
        let class_labels = &arts.summary.labels;
        if let Some(p) = &sd.p_matrix {
            let rows: Vec<Vec<i64>> = (0..p.rows())
                .map(|r| (0..p.cols()).map(|c| p.at(r, c)).collect())
                .collect();
            write_json(
                &out.join("P.json"),
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "row_labels": sd.labels,
                    "col_labels": class_labels,
                    "entries": rows,
                }),
            )?;
        }
        if let Some(q) = &sd.q_matrix {
            let rows: Vec<Vec<i64>> = (0..q.rows())
                .map(|r| (0..q.cols()).map(|c| q.at(r, c)).collect())
                .collect();
            write_json(
                &out.join("Q.json"),
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "row_labels": class_labels,
                    "col_labels": sd.labels,
                    "entries": rows,
                }),
            )?;
        }
    }
    if let Some(kt) = &arts.krein {
        write_json(
            &out.join("krein.json"),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "convention": "E_i o E_j = (1/v) sum_k q[i][j][k] E_k",
                "basis": BASIS_CONVENTION,
                "labels": kt.labels,
                "multiplicities": kt.multiplicities,
                "q": kt.q,
            }),
        )?;
    }
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> Result<ExitCode, Error> {
    let spec = build_spec(&args.common)?;
    let opts = build_options(&args.common, &spec)?;
    let tier = resolve_tier(args)?;
    if tier == Tier::Spot && args.tier.is_none() && args.common.m >= 4 {
        eprintln!("note: m={} runs the spot tier by default", args.common.m);
    }

    let arts = certify(&spec, tier, &opts)?;
    export_certification(args, tier, &arts)?;

    match args.common.format {
        Format::Json => {
            let passed = arts.report.all_passed();
            println!(
                "{}",
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "passed": passed,
                    "checks": arts.report.checks.len(),
                    "out": args.common.out.display().to_string(),
                })
            );
        }
        Format::Text => {
            for check in &arts.report.checks {
                match &check.witness {
                    Some(w) => println!("FAIL {} ({w})", check.check),
                    None => println!("PASS {}", check.check),
                }
            }
        }
    }
    if arts.report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn parse_sigmas(spec: &FieldSpec, text: &str) -> Result<Vec<Vec<usize>>, Error> {
    let q = spec.q();
    if text == "all" {
        if spec.m() > 2 {
            return Err(Error::InvalidInput(format!(
                "'all' enumerates q! = {}! permutations; allowed only for m <= 2 \
                 (use sample:N instead)",
                q
            )));
        }
        let mut sigmas = vec![vec![]];
        for _ in 0..q {
            let mut next = Vec::new();
            for p in sigmas {
                for x in 0..q {
                    if !p.contains(&x) {
                        let mut p2: Vec<usize> = p.clone();
                        p2.push(x);
                        next.push(p2);
                    }
                }
            }
            sigmas = next;
        }
        return Ok(sigmas);
    }
    if let Some(n) = text.strip_prefix("sample:") {
        let count: usize = n
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad sample count '{n}'")))?;
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        return Ok(sample_sigmas(q, count));
    }
    Ok(vec![parse_permutation(text, q)?])
}

fn cmd_fuse(args: &FuseArgs) -> Result<ExitCode, Error> {
    let spec = build_spec(&args.common)?;
    let opts = build_options(&args.common, &spec)?;
    let sigmas = parse_sigmas(&spec, &args.sigma)?;

    let outcomes = run_fusions(&spec, &opts, &sigmas)?;
    fs::create_dir_all(&args.common.out)?;
    let summary = scheme_summary(&spec);
    write_json(
        &args.common.out.join("fusions.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "m": summary.m,
            "q": summary.q,
            "irreducible": summary.irreducible,
            "basis": summary.basis,
            "results": outcomes
                .iter()
                .map(|o| {
                    json!({
                        "sigma": o.sigma,
                        "case": o.case,
                        "tau": o.tau,
                        "eigenrows": o.eigenrows,
                        "matches_table": o.matches_table,
                    })
                })
                .collect::<Vec<_>>(),
        }),
    )?;

    let mut all_match = true;
    let paut_count = outcomes
        .iter()
        .filter(|o| o.case == ghscheme::fusion::SigmaCase::Paut)
        .count();
    for o in &outcomes {
        all_match &= o.matches_table;
        if args.common.format == Format::Text {
            println!(
                "sigma={:?} case={} rows={} matches_table={}",
                o.sigma,
                match o.case {
                    ghscheme::fusion::SigmaCase::Paut => "paut",
                    ghscheme::fusion::SigmaCase::NonPaut => "non-paut",
                },
                o.eigenrows.len(),
                o.matches_table
            );
        }
    }
    match args.common.format {
        Format::Json => println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "sigmas": outcomes.len(),
                "paut": paut_count,
                "all_match": all_match,
                "out": args.common.out.display().to_string(),
            })
        ),
        Format::Text => println!(
            "{} sigmas, {} with a PAut partner, all_match={}",
            outcomes.len(),
            paut_count,
            all_match
        ),
    }
    if all_match {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
