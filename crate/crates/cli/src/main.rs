use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cycov_core::census::{census, CensusParams};
use cycov_core::cover::{cyclic_cover, deck_transform};
use cycov_core::equiv::{
    equivalent_bruteforce, equivalent_structured, invariants, EquivConfig, Verdict, DEFAULT_MATRIX_CAP,
};
use cycov_core::galois::{enumerate_galois, structure_normalize};
use cycov_core::hypersurface::{DEFAULT_K_MAX, DEFAULT_POINT_CAP};
use cycov_core::poly::infer_nvars;
use cycov_core::recovery::recover_branch;
use cycov_core::{Error, Field, Hypersurface, ProjectivePoint};
use serde_json::{json, Value};

/// Exact cyclic covers, outer Galois points and branch recovery over finite
/// fields.
///
/// Every command prints one JSON document on stdout and a short summary on
/// stderr. Exit status: 0 when all checked properties held, 2 when a
/// property was falsified, 1 on any other error.
#[derive(Parser)]
#[command(name = "cycov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Machine mode: compact JSON and no summary on stderr.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args)]
struct FieldArg {
    /// Field: `p:<prime>`, `ext:<prime>^<k>` or `Q`.
    #[arg(long, default_value = "p:7")]
    field: String,
}

#[derive(Args)]
struct PolyArg {
    /// Polynomial text, e.g. "x0^3+x1^3+x2^3".
    #[arg(long, conflicts_with = "poly_file", required_unless_present = "poly_file")]
    poly: Option<String>,
    /// Read the polynomial from a file.
    #[arg(long)]
    poly_file: Option<PathBuf>,
    /// Number of variables (default: one more than the largest index used).
    #[arg(long)]
    nvars: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// Largest extension degree searched for points.
    #[arg(long, default_value_t = 1)]
    ext_max: u32,
    /// Cap on the number of points enumerated per extension.
    #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
    cap: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Brute,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a polynomial and report its canonical form and smoothness.
    Parse {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        poly: PolyArg,
        /// Extension bound for the smoothness certificate.
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        cap: u128,
    },
    /// Build the cyclic cover x_new^d - F and its deck transformation.
    Cover {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Enumerate outer Galois points.
    Galois {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Fermat-block normal form from the rational Galois points.
    Normalize {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        cap: u128,
    },
    /// Recover the branch hypersurface of a cyclic cover.
    Recover {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Galois point to use, comma separated, e.g. "0,0,0,1".
        #[arg(long)]
        hint: Option<String>,
    },
    /// Decide projective equivalence of two hypersurfaces.
    Equiv {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        poly1: String,
        #[arg(long)]
        poly2: String,
        #[arg(long)]
        nvars: Option<usize>,
        #[arg(long, value_enum, default_value = "structured")]
        mode: Mode,
        /// Cap on the number of matrices scanned.
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        cap: u128,
    },
    /// Random round-trip census: cover, recover, compare.
    Census {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 3)]
        d: u32,
        /// Hypersurfaces live in P^{n+1}.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        search: SearchArgs,
        /// Extension bound for the smoothness filter.
        #[arg(long, default_value_t = 1)]
        smooth_k_max: u32,
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        matrix_cap: u128,
    },
}

/// Result of a command: the JSON document, a one-line summary and whether a
/// property was falsified.
struct Outcome {
    doc: Value,
    summary: String,
    falsified: bool,
}

impl Outcome {
    fn ok(doc: Value, summary: String) -> Outcome {
        Outcome { doc, summary, falsified: false }
    }
}

fn field(arg: &FieldArg) -> anyhow::Result<Field> {
    Ok(arg.field.parse()?)
}

fn hypersurface(f: &Field, arg: &PolyArg) -> anyhow::Result<Hypersurface> {
    let text = match (&arg.poly, &arg.poly_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, None) => bail!("one of --poly or --poly-file is required"),
    };
    let text = text.trim();
    let nvars = arg.nvars.unwrap_or_else(|| infer_nvars(text));
    Ok(Hypersurface::parse(f, text, nvars)?)
}

fn run(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Parse { field: fa, poly, k_max, cap } => {
            let f = field(&fa)?;
            let x = hypersurface(&f, &poly)?;
            let cert = if f.is_finite() {
                Some(x.smoothness_certificate(k_max, cap)?)
            } else {
                None
            };
            let smooth = cert.as_ref().map(|c| c.is_clean());
            let summary = format!(
                "degree {} in {} variables over {f}{}",
                x.degree(),
                x.nvars(),
                match smooth {
                    Some(true) => format!(", smooth over F_(p^k) for k <= {k_max}"),
                    Some(false) => ", singular".to_string(),
                    None => String::new(),
                }
            );
            Ok(Outcome::ok(
                json!({
                    "field": f.to_string(),
                    "nvars": x.nvars(),
                    "degree": x.degree(),
                    "terms": x.equation().num_terms(),
                    "canonical": x.to_text(),
                    "smoothness": cert,
                }),
                summary,
            ))
        }
        Command::Cover { field: fa, poly } => {
            let f = field(&fa)?;
            let y = hypersurface(&f, &poly)?;
            let c = cyclic_cover(&y)?;
            let deck = match deck_transform(&c, y.degree()) {
                Ok(t) => json!(t.to_strings()),
                Err(e @ Error::NoRootOfUnity { .. }) => json!({ "unavailable_reason": e.to_string() }),
                Err(e) => return Err(e.into()),
            };
            Ok(Outcome::ok(
                json!({
                    "cover_poly": c.to_text(),
                    "new_var": format!("x{}", y.nvars()),
                    "deck": deck,
                }),
                format!("cover of degree {} in {} variables", c.degree(), c.nvars()),
            ))
        }
        Command::Galois { field: fa, poly, search } => {
            let f = field(&fa)?;
            let x = hypersurface(&f, &poly)?;
            let report = enumerate_galois(&x, search.ext_max, search.cap)?;
            let summary = format!(
                "{} outer Galois point(s) over extensions of degree <= {}, {} rational (bound {})",
                report.points.len(),
                report.search_extension_max,
                report.rational_count(),
                report.bound
            );
            Ok(Outcome {
                falsified: report.bound_violated(),
                doc: serde_json::to_value(&report)?,
                summary,
            })
        }
        Command::Normalize { field: fa, poly, cap } => {
            let f = field(&fa)?;
            let x = hypersurface(&f, &poly)?;
            let points = enumerate_galois(&x, 1, cap)?.rational_points();
            if points.is_empty() {
                return Err(Error::NoGaloisPointFound { ext_max: 1 }.into());
            }
            let form = structure_normalize(&x, &points)?;
            Ok(Outcome::ok(
                json!({
                    "matrix": form.transform.to_strings(),
                    "r": form.r,
                    "G": form.tail.to_text(),
                    "fermat_coefficients": form.fermat_coefficients.iter().map(|c| f.format(c)).collect::<Vec<_>>(),
                    "normalized": form.normalized.to_text(),
                    "galois_points": points.iter().map(|p| p.to_strings(&f)).collect::<Vec<_>>(),
                }),
                format!("Fermat block of size {}, r = {}", form.r + 1, form.r),
            ))
        }
        Command::Recover { field: fa, poly, search, hint } => {
            let f = field(&fa)?;
            let h = hypersurface(&f, &poly)?;
            let hint = hint.map(|t| ProjectivePoint::parse(&f, &t)).transpose()?;
            let rec = recover_branch(&h, hint.as_ref(), search.ext_max, search.cap)?;
            let k = rec.field().clone();
            Ok(Outcome::ok(
                json!({
                    "field": k.to_string(),
                    "base_poly": rec.base_poly.to_text(),
                    "witness_matrix": rec.witness.to_strings(),
                    "galois_point_used": rec.galois_point.to_strings(&k),
                }),
                format!("branch recovered over {k}: {}", rec.base_poly.to_text()),
            ))
        }
        Command::Equiv { field: fa, poly1, poly2, nvars, mode, cap } => {
            let f = field(&fa)?;
            let nvars = nvars.unwrap_or_else(|| infer_nvars(&poly1).max(infer_nvars(&poly2)));
            let x1 = Hypersurface::parse(&f, &poly1, nvars)?;
            let x2 = Hypersurface::parse(&f, &poly2, nvars)?;
            let cfg = EquivConfig { matrix_cap: cap, ..EquivConfig::default() };
            let (verdict, witness, reason, inv, scanned) = match mode {
                Mode::Brute => {
                    let r = equivalent_bruteforce(&x1, &x2, cap)?;
                    let inv = (invariants(&x1, &cfg)?.0, invariants(&x2, &cfg)?.0);
                    let verdict = if r.witness.is_some() { "equivalent" } else { "inequivalent" };
                    (verdict, r.witness, None, Some(inv), r.scanned)
                }
                Mode::Structured => {
                    let out = equivalent_structured(&x1, &x2, &cfg)?;
                    let label = out.verdict.label();
                    let (w, reason) = match out.verdict {
                        Verdict::Equivalent(t) => (Some(t), None),
                        Verdict::Inequivalent(r) | Verdict::Inconclusive(r) => (None, Some(r)),
                    };
                    (label, w, reason, out.invariants, out.scanned)
                }
            };
            let summary = match &reason {
                Some(r) => format!("{verdict}: {r}"),
                None => format!("{verdict} ({scanned} matrices scanned)"),
            };
            Ok(Outcome::ok(
                json!({
                    "verdict": verdict,
                    "witness": witness.map(|t| t.to_strings()),
                    "reason": reason,
                    "invariants": inv.map(|(a, b)| json!([a, b])),
                    "scanned": scanned,
                }),
                summary,
            ))
        }
        Command::Census { field: fa, d, n, trials, seed, search, smooth_k_max, matrix_cap } => {
            let mut params = CensusParams::new(&fa.field, d, n, trials, seed);
            params.ext_max = search.ext_max;
            params.smooth_k_max = smooth_k_max;
            params.point_cap = search.cap;
            params.matrix_cap = matrix_cap;
            let report = census(&params)?;
            let summary = format!(
                "{} trials, {} retained, {} round trips passed, {} bound violation(s), delta histogram {:?}",
                report.trials_run,
                report.retained,
                report.round_trip_pass,
                report.bound_violations,
                report.delta_histogram
            );
            Ok(Outcome {
                falsified: report.falsified(),
                doc: serde_json::to_value(&report)?,
                summary,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.json;
    match run(cli.command) {
        Ok(out) => {
            let text = if quiet {
                serde_json::to_string(&out.doc)
            } else {
                serde_json::to_string_pretty(&out.doc)
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", text.expect("serializable"));
            if !quiet {
                eprintln!("{}", out.summary);
            }
            if out.falsified {
                if !quiet {
                    eprintln!("FALSIFIED: see the failures in the report");
                }
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let _ = writeln!(std::io::stdout(), "{}", json!({ "error": format!("{e:#}") }));
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
