//! Terminal front end for the verification toolkit.
//!
//! Every subcommand prints exact integer results as JSON (reports) or plain
//! text (summaries); failures print a machine-readable JSON object on
//! stderr.  Exit codes: 0 on success, 1 when a verified identity fails, 2
//! for unusable input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use niho_core::campaign::{self, CampaignConfig};
use niho_core::error::{Error, Result};
use niho_core::field::{self, build_field, build_field_opts, FieldCtx, FieldElem};
use niho_core::{keypoly, orbits, sequences, spectra, symfun};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "niho",
    version,
    about = "Exact crosscorrelation spectra of power decimations, verified two ways"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the normalized spectrum containment over GF(4^m) for each m
    VerifyNiho(VerifyNihoArgs),
    /// Emit or re-derive the 218-row symmetric-function expansion table
    Symfun(SymfunArgs),
    /// Locate all seven roots of the key polynomial for one input
    Keyroots(KeyrootsArgs),
    /// Walk the conjugate-reciprocal orbit of one element
    Orbits(OrbitsArgs),
    /// Cross-check sequence correlations against the character-sum spectrum
    Sequences(SequencesArgs),
    /// Run the twelve-claim verification campaign
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Field descriptor, e.g. 2^8 or 3^2
    #[arg(long, value_name = "P^N")]
    field: String,
    /// Irreducible modulus as constant-first coefficients, e.g. 1,1,0,0,1
    #[arg(long, value_delimiter = ',', value_name = "C0,C1,..")]
    modulus: Option<Vec<u64>>,
}

impl FieldArgs {
    fn build(&self) -> Result<Arc<FieldCtx>> {
        let (p, n) = match self.field.split_once('^') {
            Some((p, n)) => {
                let p = p.trim().parse::<u64>().map_err(|_| bad_field(&self.field))?;
                let n = n.trim().parse::<u32>().map_err(|_| bad_field(&self.field))?;
                (p, n)
            }
            None => {
                let p = self.field.trim().parse::<u64>().map_err(|_| bad_field(&self.field))?;
                (p, 1)
            }
        };
        build_field_opts(p, n, self.modulus.as_deref(), field::DEFAULT_TABLE_CUTOFF_BITS)
    }
}

fn bad_field(spec: &str) -> Error {
    Error::InvalidParameter(format!("field descriptor '{}' is not of the form P^N", spec))
}

/// Accepts alpha^K, alpha, a single base-field digit, or a constant-first
/// coefficient list c0,c1,..
fn parse_element(ctx: &Arc<FieldCtx>, spec: &str) -> Result<FieldElem> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("alpha") {
        let rest = rest.trim();
        if rest.is_empty() {
            return ctx.alpha();
        }
        let k = rest
            .strip_prefix('^')
            .and_then(|k| k.trim().parse::<u64>().ok())
            .ok_or_else(|| {
                Error::InvalidParameter(format!("element '{}' is not alpha or alpha^K", spec))
            })?;
        return Ok(ctx.pow(ctx.alpha()?, k as u128));
    }
    let digits: Vec<u64> = spec
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            Error::InvalidParameter(format!(
                "element '{}' is neither alpha^K nor a coefficient list",
                spec
            ))
        })?;
    ctx.elem_from_coeffs(&digits)
}

// ---------------------------------------------------------------------------
// verify-niho
// ---------------------------------------------------------------------------

#[derive(Args)]
struct VerifyNihoArgs {
    /// Half-degrees to check: the field is GF(4^m)
    #[arg(long, short, value_delimiter = ',', required = true, value_name = "M,..")]
    m: Vec<u32>,
    /// Exponent family parameter; the theorem containments apply to s = 4
    #[arg(long, default_value_t = 4)]
    s: u64,
    /// Largest field order to verify by full enumeration
    #[arg(long, default_value_t = 1 << 12, value_name = "INT")]
    direct_cap: u64,
    /// Beyond the cap, count polynomial roots instead of refusing
    #[arg(long)]
    root_count_only: bool,
    /// Directory for one JSON report per m (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// The normalized values the s = 4 theorem allows, by parity of m.
fn theorem_values(m: u32) -> &'static [i64] {
    if m % 2 == 1 {
        &[-1, 0, 1, 2, 3, 4]
    } else {
        &[-1, 0, 1, 2, 4]
    }
}

fn cmd_verify_niho(args: &VerifyNihoArgs) -> Result<bool> {
    let mut all_ok = true;
    for &m in &args.m {
        if m == 0 || m > 16 {
            return Err(Error::InvalidParameter(format!(
                "m must be between 1 and 16, got {}",
                m
            )));
        }
        let ctx = build_field(2, 2 * m)?;
        let exp = spectra::niho_exponent(&ctx, args.s)?;
        let degenerate = spectra::is_degenerate(&ctx, exp.d);
        let sqrt = 1u64 << m;

        let mut ok = exp.valid;
        let report;
        if ctx.order() <= args.direct_cap as u128 {
            let identity = keypoly::verify_root_count_identity(&ctx, args.s)?;
            let normalized = identity.spectrum.scaled_values(sqrt);
            if args.s == 4 {
                match &normalized {
                    Some(vals) => {
                        ok &= vals.iter().all(|v| theorem_values(m).contains(v));
                    }
                    None => ok = false,
                }
            }
            report = json!({
                "m": m,
                "field": ctx.descriptor(),
                "d": exp.d,
                "degenerate": degenerate,
                "route": "enumeration",
                "normalized_values": normalized,
                "containment_checked": args.s == 4,
                "ok": ok,
                "identity": identity,
            });
        } else if args.root_count_only {
            // Z - 1 is the normalized value, so the containment carries over.
            let allowed: Vec<u32> =
                theorem_values(m).iter().map(|v| (v + 1) as u32).collect();
            let multiset = if args.s == 4 {
                campaign::root_count_multiset(&ctx, args.s, &allowed)?
            } else {
                let any: Vec<u32> = (0..2 * args.s as u32).collect();
                campaign::root_count_multiset(&ctx, args.s, &any)?
            };
            report = json!({
                "m": m,
                "field": ctx.descriptor(),
                "d": exp.d,
                "degenerate": degenerate,
                "route": "root-counting",
                "root_count_multiset": multiset,
                "containment_checked": args.s == 4,
                "ok": ok,
            });
        } else {
            return Err(Error::InvalidParameter(format!(
                "field order {} exceeds the enumeration cap {}; pass --root-count-only",
                ctx.order(),
                args.direct_cap
            )));
        }

        all_ok &= ok;
        match &args.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("verify_m{}.json", m));
                std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
                println!(
                    "m = {:>2}  {}  d = {:<6} {}  -> {}",
                    m,
                    ctx.descriptor(),
                    exp.d,
                    if ok { "ok" } else { "FAILED" },
                    path.display()
                );
            }
            None => println!("{}", serde_json::to_string_pretty(&report)?),
        }
    }
    Ok(all_ok)
}

// ---------------------------------------------------------------------------
// symfun
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SymfunArgs {
    /// Re-derive the expansion from scratch and diff it against the table
    /// (the shipped one, or --table); takes about half a minute
    #[arg(long)]
    verify: bool,
    /// Write the shipped 218-row table as CSV to this path
    #[arg(long, value_name = "PATH")]
    emit_table: Option<PathBuf>,
    /// Compare against this CSV instead of the shipped table
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,
}

fn cmd_symfun(args: &SymfunArgs) -> Result<bool> {
    if !args.verify && args.emit_table.is_none() {
        return Err(Error::InvalidParameter(
            "nothing to do: pass --verify and/or --emit-table PATH".into(),
        ));
    }
    if let Some(path) = &args.emit_table {
        std::fs::write(path, symfun::shipped_expansion_csv())?;
        println!("wrote {} rows to {}", symfun::shipped_expansion().len(), path.display());
    }
    if !args.verify {
        return Ok(true);
    }

    let reference = match &args.table {
        Some(path) => symfun::ElemExpansion::from_csv(&std::fs::read_to_string(path)?)?,
        None => symfun::shipped_expansion().clone(),
    };
    let computed = symfun::decompose_elementary(&symfun::pair_sum_numerator(7)?)?;

    let comp: std::collections::BTreeSet<&Vec<u8>> = computed.rows().iter().collect();
    let refr: std::collections::BTreeSet<&Vec<u8>> = reference.rows().iter().collect();
    let missing: Vec<_> = comp.difference(&refr).collect();
    let spurious: Vec<_> = refr.difference(&comp).collect();
    let diffs = missing.len() + spurious.len();
    println!("{} terms, {} diffs", computed.len(), diffs);
    for row in missing.iter().take(5) {
        println!("  derived but not in table: {:?}", row);
    }
    for row in spurious.iter().take(5) {
        println!("  in table but not derived: {:?}", row);
    }
    Ok(diffs == 0)
}

// ---------------------------------------------------------------------------
// keyroots / orbits / sequences
// ---------------------------------------------------------------------------

#[derive(Args)]
struct KeyrootsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// The input a, e.g. alpha^3 or 1,0,1,1
    #[arg(long, value_name = "ELEM")]
    a: String,
}

fn cmd_keyroots(args: &KeyrootsArgs) -> Result<bool> {
    let ctx = args.field.build()?;
    let a = parse_element(&ctx, &args.a)?;
    if a.is_zero() {
        return Err(Error::InvalidParameter(
            "a = 0 has no key polynomial; pick a nonzero element".into(),
        ));
    }
    let profile = if field::on_unit_circle(&ctx, &ctx, a)? {
        keypoly::classify_inseparable(&ctx, a)?
    } else {
        keypoly::root_field_profile(&ctx, a)?
    };
    println!("{}", serde_json::to_string_pretty(&profile)?);
    Ok(true)
}

#[derive(Args)]
struct OrbitsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// The element to walk, e.g. alpha^3 or 1,0,1,1
    #[arg(long, value_name = "ELEM")]
    element: String,
}

fn cmd_orbits(args: &OrbitsArgs) -> Result<bool> {
    let ctx = args.field.build()?;
    let r = parse_element(&ctx, &args.element)?;
    let report = orbits::pi_orbit(&ctx, &ctx, r)?;
    let rendered = json!({
        "base": report.base,
        "host": report.host,
        "element": ctx.coeffs(r),
        "element_degree": report.element_degree,
        "on_unit_circle": report.on_own_circle,
        "size": report.size,
        "elements": report.elements.iter().map(|&e| ctx.coeffs(e)).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&rendered)?);
    Ok(true)
}

#[derive(Args)]
struct SequencesArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Decimation exponent
    #[arg(long, value_name = "INT")]
    d: u64,
}

fn cmd_sequences(args: &SequencesArgs) -> Result<bool> {
    let ctx = args.field.build()?;
    let report = sequences::spectrum_equivalence_check(&ctx, args.d)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}

// ---------------------------------------------------------------------------
// campaign
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct CampaignArgs {
    /// Seed for every randomized ingredient
    #[arg(long, default_value_t = campaign::DEFAULT_SEED)]
    seed: u64,
    /// Run only these claim ids (1-12)
    #[arg(long, value_delimiter = ',', value_name = "ID,..")]
    only: Option<Vec<u32>>,
    /// Largest field order to verify by full enumeration
    #[arg(long, default_value_t = 1 << 12, value_name = "INT")]
    direct_cap: u64,
    /// Directory for per-claim report files (append-only) and the summary
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CliFormat::Json)]
    format: CliFormat,
}

fn cmd_campaign(args: &CampaignArgs) -> Result<bool> {
    let cfg = CampaignConfig {
        seed: args.seed,
        direct_cap: args.direct_cap,
        only: args.only.clone(),
        out_dir: args.out.clone(),
        format: match args.format {
            CliFormat::Json => campaign::ReportFormat::Json,
            CliFormat::Csv => campaign::ReportFormat::Csv,
        },
    };
    let summary = campaign::run_campaign(&cfg)?;
    for o in &summary.outcomes {
        println!(
            "claim {:>2}  {:<32} {}  {:>7} ms  {}",
            o.id,
            o.name,
            if o.passed { "pass" } else { "FAIL" },
            o.millis,
            o.detail
        );
    }
    let passed = summary.outcomes.iter().filter(|o| o.passed).count();
    println!("{} of {} claims passed (seed {})", passed, summary.outcomes.len(), args.seed);
    Ok(summary.all_passed)
}

// ---------------------------------------------------------------------------
// Entry
// ---------------------------------------------------------------------------

/// Input-shaped errors exit 2; failed verifications and I/O exit 1.
fn exit_class(e: &Error) -> u8 {
    match e {
        Error::NotPrime(_)
        | Error::UnsupportedField(_)
        | Error::BadModulus(_)
        | Error::InvalidParameter(_)
        | Error::NoEmbedding { .. }
        | Error::ForeignElement { .. }
        | Error::OddCharacteristic(_)
        | Error::OddDegree(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyNiho(args) => cmd_verify_niho(args),
        Command::Symfun(args) => cmd_symfun(args),
        Command::Keyroots(args) => cmd_keyroots(args),
        Command::Orbits(args) => cmd_orbits(args),
        Command::Sequences(args) => cmd_sequences(args),
        Command::Campaign(args) => cmd_campaign(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(exit_class(&e))
        }
    }
}
