//! `waveset`: construct, verify and interpolate one-dimensional wavelet sets.
//!
//! Exit codes: 0 when the requested property holds, 1 when the input is valid
//! but the property fails, 2 on malformed input.

mod input;

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use waveset::coefficient::{CoefficientFamily, UnitarityReport};
use waveset::congruence::is_wavelet_set;
use waveset::families::{d_dilation_set, journe, journe_beta, shannon, shannon_alpha, subset_through};
use waveset::interpolation::{build_sigma, classify, torsion_bound_from_env, InterpolationMap, MapClassification};
use waveset::spectral::{gram_check_with, msf_wavelet, parseval_check, time_samples, ModulatedPiecewise};
use waveset::{IntervalSet, WaveletSetCertificate};

use input::{
    load_function, parse_angle, parse_factor, parse_grid, parse_multipliers, parse_scalar, parse_set, unit_indicator,
    CliError, CliResult,
};

#[derive(Parser)]
#[command(name = "waveset", version, about = "Exact wavelet-set construction and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a set is a wavelet set and print the certificate.
    Verify {
        /// Set as `[a,b)u[c,d)` with endpoints like `-3pi/2`, JSON, or `@file`.
        #[arg(allow_hyphen_values = true)]
        set: String,
        #[arg(long, default_value = "2")]
        dilation: String,
        #[arg(long)]
        json: bool,
    },
    /// Build a member of a named family (JSON interval set on stdout).
    Make {
        #[command(subcommand)]
        family: Family,
        /// Print the shorthand form instead of JSON.
        #[arg(long, global = true)]
        text: bool,
    },
    /// Build the interpolation map from E to F.
    Sigma {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "2")]
        dilation: String,
        /// Evaluate the map at a point (repeatable).
        #[arg(long = "eval", allow_hyphen_values = true)]
        points: Vec<String>,
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether (E, F) is an interpolation pair.
    CheckPair(CheckPair),
    /// Evaluate the coefficient criterion and optionally synthesize the wavelet.
    Coeff {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// JSON array of multipliers, or `@file`.
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value = "2")]
        dilation: String,
        #[arg(long)]
        synthesize: bool,
        /// Synthesize even when the criterion fails.
        #[arg(long, requires = "synthesize")]
        force: bool,
        /// Write the synthesized function here instead of stdout.
        #[arg(long)]
        output: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Truncated orthonormality check of the dilates and translates.
    Gram {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 3)]
        nmax: i64,
        #[arg(long, default_value_t = 8)]
        lmax: i64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Include the slice entries in JSON output.
        #[arg(long)]
        entries: bool,
        #[arg(long)]
        json: bool,
    },
    /// Truncated Parseval sums against unit-norm indicator test functions.
    Parseval {
        #[command(flatten)]
        src: Source,
        /// Test set (repeatable); the test function is its normalized indicator.
        #[arg(long = "test", required = true, allow_hyphen_values = true)]
        tests: Vec<String>,
        #[arg(long, default_value_t = 4)]
        nmax: i64,
        #[arg(long, default_value_t = 64)]
        lmax: i64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Inverse Fourier transform sampled on a grid.
    Samples {
        #[command(flatten)]
        src: Source,
        /// `a:b:n`, n points from a to b inclusive.
        #[arg(long, allow_hyphen_values = true)]
        t_range: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum Family {
    Shannon,
    Journe,
    ShannonAlpha {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    JourneBeta {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    Through {
        #[arg(long, allow_hyphen_values = true)]
        subset: String,
    },
    Ddil {
        #[arg(long)]
        d: String,
    },
}

#[derive(Args)]
struct CheckPair {
    #[arg(allow_hyphen_values = true, required_unless_present = "family", requires = "f")]
    e: Option<String>,
    #[arg(allow_hyphen_values = true)]
    f: Option<String>,
    /// Take E and F from a one-parameter family; `--b1`/`--b2` are multiples
    /// of π unless they contain `pi`.
    #[arg(long, value_enum, conflicts_with = "e", requires_all = ["b1", "b2"])]
    family: Option<PairFamily>,
    #[arg(long, allow_hyphen_values = true)]
    b1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b2: Option<String>,
    #[arg(long, default_value = "2")]
    dilation: String,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairFamily {
    JourneBeta,
    ShannonAlpha,
}

/// Either a set (its MSF wavelet) or a function file.
#[derive(Args)]
struct Source {
    #[arg(allow_hyphen_values = true, required_unless_present = "function")]
    set: Option<String>,
    /// JSON modulated piecewise function, e.g. from `coeff --synthesize`.
    #[arg(long, conflicts_with = "set")]
    function: Option<String>,
    #[arg(long, default_value = "2")]
    dilation: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Source {
    fn load(&self) -> CliResult<(ModulatedPiecewise, BigRational)> {
        let d = parse_factor(&self.dilation)?;
        let f = match (&self.set, &self.function) {
            (_, Some(path)) => load_function(path)?,
            (Some(set), None) => msf_wavelet(&parse_set(set)?),
            (None, None) => return Err(CliError::Usage("a set or --function is required".into())),
        };
        Ok((f, d))
    }
}

/// What a subcommand prints and whether the property held.
struct Outcome {
    text: String,
    holds: bool,
}

fn ok(text: String) -> CliResult<Outcome> {
    Ok(Outcome { text, holds: true })
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_or_print(output: &Option<String>, body: String) -> CliResult<String> {
    match output {
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))?;
            Ok(String::new())
        }
        None => Ok(body),
    }
}

fn render_certificate(c: &WaveletSetCertificate) -> String {
    let mut out = format!("wavelet set for dilation {}\n  set: {}\n", c.dilation_factor, c.set);
    out.push_str("  translation witness (piece moves by 2π·k):\n");
    for p in &c.translation.pieces {
        let _ = writeln!(out, "    {}  k = {}", p.piece, p.shift_multiple);
    }
    let _ = writeln!(out, "  dilation witness (piece scales by d^n onto {}):", c.dilation.target());
    for p in &c.dilation.pieces {
        let _ = writeln!(out, "    {}  n = {}", p.piece, p.power);
    }
    out
}

fn verify(set: &str, dilation: &str, as_json: bool) -> CliResult<Outcome> {
    let set = parse_set(set)?;
    let d = parse_factor(dilation)?;
    match is_wavelet_set(&set, &d) {
        Ok(cert) => ok(if as_json { pretty(&cert) } else { render_certificate(&cert) }),
        Err(fail) => Ok(Outcome {
            text: if as_json {
                pretty(&json!({ "failure": fail.to_string(), "details": fail }))
            } else {
                format!("not a wavelet set: {fail}\n")
            },
            holds: false,
        }),
    }
}

fn make(family: &Family, text: bool) -> CliResult<Outcome> {
    let set = match family {
        Family::Shannon => shannon(),
        Family::Journe => journe(),
        Family::ShannonAlpha { alpha } => shannon_alpha(&parse_angle(alpha)?)?,
        Family::JourneBeta { beta } => journe_beta(&parse_angle(beta)?)?,
        Family::Through { subset } => subset_through(&parse_set(subset)?)?,
        Family::Ddil { d } => d_dilation_set(&parse_factor(d)?)?,
    };
    ok(if text { format!("{}\n", set.to_ascii()) } else { pretty(&set) })
}

fn render_map(s: &InterpolationMap) -> String {
    let mut out = format!(
        "σ: {} → {} (dilation {})\n  base pieces (s ↦ s + 2π·k):\n",
        s.source(),
        s.target(),
        s.dilation_factor()
    );
    for p in s.base_pieces() {
        let _ = writeln!(out, "    {}  k = {}", p.piece, p.shift);
    }
    out
}

fn render_class(c: &MapClassification) -> String {
    let order = match c.torsion_order {
        Some(k) => k.to_string(),
        None => format!("none up to {}", c.max_order),
    };
    format!(
        "  involution: {}\n  torsion order: {}\n  powers are 2π-congruences onto wavelet sets: {}\n",
        yes_no(c.is_involution),
        order,
        yes_no(c.congruence_powers_ok)
    )
}

fn pair_verdict(c: &MapClassification) -> String {
    if c.is_interpolation_pair() {
        "interpolation pair (involution)".to_string()
    } else if !c.congruence_powers_ok {
        "not an interpolation pair (powers are not 2π-congruences)".to_string()
    } else {
        match c.torsion_order {
            Some(k) => format!("not an interpolation pair (torsion order {k})"),
            None => "not an interpolation pair (no torsion found)".to_string(),
        }
    }
}

fn sigma(e: &str, f: &str, dilation: &str, points: &[String], want_class: bool, as_json: bool) -> CliResult<Outcome> {
    let (e, f, d) = (parse_set(e)?, parse_set(f)?, parse_factor(dilation)?);
    let points = points.iter().map(|p| parse_scalar(p)).collect::<CliResult<Vec<_>>>()?;
    let s = build_sigma(&e, &f, &d)?;
    let values = points.iter().map(|p| s.evaluate(p)).collect::<Result<Vec<_>, _>>()?;
    let class = if want_class { Some(classify(&s, torsion_bound_from_env())?) } else { None };
    if as_json {
        let evals: Vec<_> = points.iter().zip(&values).map(|(p, v)| json!({ "s": p, "value": v })).collect();
        return ok(pretty(&json!({
            "map": s.table(),
            "evaluations": evals,
            "classification": class,
        })));
    }
    let mut out = render_map(&s);
    for (p, v) in points.iter().zip(&values) {
        let _ = writeln!(out, "σ({p}) = {v}");
    }
    if let Some(c) = &class {
        out.push_str("classification:\n");
        out.push_str(&render_class(c));
        let _ = writeln!(out, "{}", pair_verdict(c));
    }
    ok(out)
}

fn check_pair(args: &CheckPair) -> CliResult<Outcome> {
    let d = parse_factor(&args.dilation)?;
    let (e, f) = match args.family {
        Some(fam) => {
            let build = |b: &Option<String>| -> CliResult<IntervalSet> {
                let b = parse_angle(b.as_deref().unwrap_or_default())?;
                Ok(match fam {
                    PairFamily::JourneBeta => journe_beta(&b)?,
                    PairFamily::ShannonAlpha => shannon_alpha(&b)?,
                })
            };
            (build(&args.b1)?, build(&args.b2)?)
        }
        None => {
            let missing = || CliError::Usage("give E and F, or --family with --b1 and --b2".into());
            (
                parse_set(args.e.as_deref().ok_or_else(missing)?)?,
                parse_set(args.f.as_deref().ok_or_else(missing)?)?,
            )
        }
    };
    for (name, set) in [("E", &e), ("F", &f)] {
        if let Err(fail) = is_wavelet_set(set, &d) {
            return Ok(Outcome {
                text: format!("{name} = {set} is not a wavelet set: {fail}\n"),
                holds: false,
            });
        }
    }
    let class = classify(&build_sigma(&e, &f, &d)?, torsion_bound_from_env())?;
    let verdict = pair_verdict(&class);
    let text = if args.json {
        pretty(&json!({ "e": e, "f": f, "classification": class, "verdict": verdict }))
    } else {
        format!("E = {e}\nF = {f}\n{}{verdict}\n", render_class(&class))
    };
    Ok(Outcome {
        text,
        holds: class.is_interpolation_pair(),
    })
}

#[allow(clippy::too_many_arguments)]
fn coeff(
    set: &str,
    target: &str,
    coeffs: &str,
    dilation: &str,
    synth: bool,
    force: bool,
    output: &Option<String>,
    as_json: bool,
) -> CliResult<Outcome> {
    let (e, f, d) = (parse_set(set)?, parse_set(target)?, parse_factor(dilation)?);
    let h = parse_multipliers(coeffs, &d)?;
    let family = CoefficientFamily::new(build_sigma(&e, &f, &d)?, h, torsion_bound_from_env())?;
    let report: UnitarityReport = family.is_unitary_ae()?;
    let function = if synth && (report.unitary || force) {
        Some(family.synthesize(force)?)
    } else {
        None
    };
    let verdict = match &report.violation {
        None => "coefficient criterion holds".to_string(),
        Some(v) => format!("coefficient criterion fails (matrix not unitary on {v})"),
    };
    let mut text = if as_json {
        let body = pretty(&json!({
            "order": family.order(),
            "report": report,
            "verdict": verdict,
            "function": if output.is_none() { function.as_ref() } else { None },
        }));
        format!("{body}\n")
    } else {
        format!(
            "torsion order: {}\ncells checked: {} ({})\n{verdict}\n",
            family.order(),
            report.pieces_checked,
            if report.exact { "exact" } else { "floating point" }
        )
    };
    if let Some(func) = &function {
        if let Some(path) = output {
            write_or_print(output, pretty(func))?;
            if !as_json {
                let _ = writeln!(text, "synthesized function written to {path}");
            }
        } else if !as_json {
            text.push_str(&pretty(func));
        }
    }
    Ok(Outcome {
        text,
        holds: report.unitary,
    })
}

fn gram(src: &Source, nmax: i64, lmax: i64, tol: f64, entries: bool, as_json: bool) -> CliResult<Outcome> {
    let (f, d) = src.load()?;
    let r = gram_check_with(&f, &d, nmax, lmax, entries)?;
    let holds = r.passes(tol);
    let text = if as_json {
        pretty(&json!({ "report": r, "tolerance": tol, "orthonormal": holds }))
    } else {
        format!(
            "|n| ≤ {nmax}, |l| ≤ {lmax}, {} mixed pairs\nmax off-diagonal: {:.3e}\nmax diagonal deviation: {:.3e}\n{} (tolerance {tol:e})\n",
            r.mixed_pairs,
            r.max_off_diagonal,
            r.max_diagonal_deviation,
            if holds { "orthonormal" } else { "not orthonormal" }
        )
    };
    Ok(Outcome { text, holds })
}

fn parseval(src: &Source, tests: &[String], nmax: i64, lmax: i64, tol: f64, as_json: bool) -> CliResult<Outcome> {
    let (f, d) = src.load()?;
    if d != BigRational::from_integer(2.into()) {
        return Err(CliError::Usage("parseval supports dilation 2 only".into()));
    }
    let sets = tests.iter().map(|t| parse_set(t)).collect::<CliResult<Vec<_>>>()?;
    let gs = sets.iter().map(unit_indicator).collect::<CliResult<Vec<_>>>()?;
    let r = parseval_check(&f, &gs, nmax, lmax)?;
    // a deficiency is only conclusive when the l-tail bound covers it
    let exceeds: Vec<bool> = r
        .entries
        .iter()
        .map(|e| e.l_tail_bound.is_some_and(|b| e.deficiency > b + tol))
        .collect();
    let holds = !exceeds.contains(&true);
    if as_json {
        return Ok(Outcome {
            text: pretty(&json!({ "report": r, "tolerance": tol, "deficient": !holds })),
            holds,
        });
    }
    let mut text = format!("|n| ≤ {nmax}, |l| ≤ {lmax}\n");
    for ((set, e), bad) in sets.iter().zip(&r.entries).zip(&exceeds) {
        let bound = e.l_tail_bound.map_or("n/a".to_string(), |b| format!("{b:.3e}"));
        let _ = writeln!(
            text,
            "{set}: captured {:.12} of {:.12}, deficiency {:.3e}, l-tail bound {bound}{}",
            e.captured,
            e.norm_sqr,
            e.deficiency,
            if *bad { "  DEFICIENT" } else { "" }
        );
    }
    text.push_str(if holds {
        "no deficiency beyond the truncation bound\n"
    } else {
        "deficiency exceeds the truncation bound\n"
    });
    Ok(Outcome { text, holds })
}

fn samples(src: &Source, range: &str, out: Format, output: &Option<String>) -> CliResult<Outcome> {
    let (f, _) = src.load()?;
    let ts = parse_grid(range)?;
    let vs = time_samples(&f, &ts);
    let body = match out {
        Format::Csv => {
            let mut s = String::from("t,re,im\n");
            for (t, v) in ts.iter().zip(&vs) {
                let _ = writeln!(s, "{t},{},{}", v.re, v.im);
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = ts.iter().zip(&vs).map(|(t, v)| json!({ "t": t, "re": v.re, "im": v.im })).collect();
            pretty(&rows)
        }
    };
    ok(write_or_print(output, body)?)
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Verify { set, dilation, json } => verify(set, dilation, *json),
        Command::Make { family, text } => make(family, *text),
        Command::Sigma {
            e,
            f,
            dilation,
            points,
            classify,
            json,
        } => sigma(e, f, dilation, points, *classify, *json),
        Command::CheckPair(args) => check_pair(args),
        Command::Coeff {
            set,
            target,
            coeffs,
            dilation,
            synthesize,
            force,
            output,
            json,
        } => coeff(set, target, coeffs, dilation, *synthesize, *force, output, *json),
        Command::Gram {
            src,
            nmax,
            lmax,
            tol,
            entries,
            json,
        } => gram(src, *nmax, *lmax, *tol, *entries, *json),
        Command::Parseval {
            src,
            tests,
            nmax,
            lmax,
            tol,
            json,
        } => parseval(src, tests, *nmax, *lmax, *tol, *json),
        Command::Samples {
            src,
            t_range,
            out,
            output,
        } => samples(src, t_range, *out, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            print!("{}", o.text);
            if !o.text.is_empty() && !o.text.ends_with('\n') {
                println!();
            }
            ExitCode::from(if o.holds { 0 } else { 1 })
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
