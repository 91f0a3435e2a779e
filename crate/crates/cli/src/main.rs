//! Command-line surface for the curve constructions.
//!
//! Every subcommand prints a single JSON envelope on stdout —
//! `{command, inputs, seed, timing_ms, result}` with all big integers as
//! decimal strings — and keeps diagnostics on stderr.  Exit codes: 0 ok,
//! 1 invalid input, 2 search exhausted, 3 certificate invalid.
//! Identical inputs and seed give identical output up to `timing_ms`.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use cmcurve::classpoly::{
    cache_append, cache_lookup, gamma2_class_poly, hilbert_class_poly, ClassPolynomial, PolyKind,
};
use cmcurve::construct::{
    check_certificate, fixed_order_curve, fixed_size_curve, Construction, FixedOrderResult,
    FixedSizeResult, ScanMode, SearchPolicy,
};
use cmcurve::ec::{naive_point_count, Curve, OrderCertificate, Point};
use cmcurve::arith::{is_probable_prime, sqrt_mod_prime};
use cmcurve::quadratic::cornacchia;
use cmcurve::Error;

const EXIT_INVALID_INPUT: i32 = 1;
const EXIT_SEARCH_EXHAUSTED: i32 = 2;
const EXIT_CERTIFICATE_INVALID: i32 = 3;

#[derive(Parser)]
#[command(
    name = "cmcurve",
    version,
    about = "Construct elliptic curves of prescribed prime order over prime fields"
)]
struct Cli {
    /// Seed for every randomized internal (Miller-Rabin bases, square roots,
    /// certificate point draws, random prime scans).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the parallel search stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InvariantArg {
    /// Hilbert class polynomial (j-invariant).
    J,
    /// Weber gamma2 polynomial: same degree, about a third of the digits.
    Gamma2,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a curve with exactly N points, N a prime larger than 5.
    FixedOrder {
        /// The prescribed prime order, in decimal.
        n: String,
        /// Reject discriminants whose class number is below this.
        #[arg(long = "min-h", default_value_t = 0)]
        min_h: usize,
        /// Basis/bound widening rounds before giving up.
        #[arg(long, default_value_t = 32)]
        max_rounds: u32,
        /// Class invariant for the final polynomial step.
        #[arg(long, value_enum, default_value_t = InvariantArg::Gamma2)]
        invariant: InvariantArg,
    },
    /// Construct a curve whose order is a k-digit prime, with CM by a
    /// fixed discriminant.
    FixedSize {
        /// Decimal digit count for the group order (at least 3).
        k: u32,
        /// CM discriminant: negative, congruent to 5 modulo 8.
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        /// Walk consecutive primes from this start instead of drawing
        /// seeded random candidates.
        #[arg(long)]
        scan_from: Option<String>,
    },
    /// Compute a class polynomial and print its coefficients.
    Classpoly {
        /// Discriminant: negative, congruent to 0 or 1 modulo 4.
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(long, value_enum, default_value_t = InvariantArg::J)]
        invariant: InvariantArg,
        /// Polynomial cache file: looked up before computing, appended after.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Solve x^2 - D y^2 = 4N for a prime N.
    Cornacchia {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        /// Odd prime, in decimal.
        n: String,
    },
    /// Re-check a construction record produced by fixed-order or fixed-size.
    Verify {
        /// Path to the JSON record (the full envelope or just its result).
        record: PathBuf,
    },
    /// Count points of Y^2 = X^3 + AX + B over F_p naively (small p only).
    Count {
        p: String,
        a: String,
        b: String,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {e}");
            std::process::exit(EXIT_INVALID_INPUT);
        }
    }
    std::process::exit(run(cli.command, cli.seed));
}

fn run(command: Command, seed: u64) -> i32 {
    let t0 = Instant::now();
    let (name, inputs, outcome) = dispatch(command, seed);
    match outcome {
        Ok(result) => {
            emit(&name, inputs, seed, t0, result);
            0
        }
        Err((code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}

type Failure = (i32, String);
type Outcome = Result<Value, Failure>;

fn dispatch(command: Command, seed: u64) -> (&'static str, Value, Outcome) {
    match command {
        Command::FixedOrder { n, min_h, max_rounds, invariant } => {
            let inputs = json!({
                "n": n,
                "min_h": min_h,
                "max_rounds": max_rounds,
                "invariant": invariant_name(invariant),
            });
            ("fixed-order", inputs, run_fixed_order(&n, min_h, max_rounds, invariant, seed))
        }
        Command::FixedSize { k, disc, scan_from } => {
            let inputs = json!({ "k": k, "disc": disc, "scan_from": scan_from });
            ("fixed-size", inputs, run_fixed_size(k, disc, scan_from.as_deref(), seed))
        }
        Command::Classpoly { d, invariant, cache } => {
            let inputs = json!({
                "d": d,
                "invariant": invariant_name(invariant),
                "cache": cache.as_ref().map(|p| p.display().to_string()),
            });
            ("classpoly", inputs, run_classpoly(d, invariant, cache.as_deref()))
        }
        Command::Cornacchia { d, n } => {
            let inputs = json!({ "d": d, "n": n });
            ("cornacchia", inputs, run_cornacchia(d, &n, seed))
        }
        Command::Verify { record } => {
            let inputs = json!({ "record": record.display().to_string() });
            ("verify", inputs, run_verify(&record))
        }
        Command::Count { p, a, b } => {
            let inputs = json!({ "p": p, "a": a, "b": b });
            ("count", inputs, run_count(&p, &a, &b))
        }
    }
}

fn emit(command: &str, inputs: Value, seed: u64, t0: Instant, result: Value) {
    let envelope = json!({
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "timing_ms": t0.elapsed().as_millis() as u64,
        "result": result,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&envelope).expect("a Value always serializes")
    );
}

fn invariant_name(inv: InvariantArg) -> &'static str {
    match inv {
        InvariantArg::J => "j",
        InvariantArg::Gamma2 => "gamma2",
    }
}

fn lib_failure(e: Error) -> Failure {
    let code = match e {
        Error::SearchExhausted(_) => EXIT_SEARCH_EXHAUSTED,
        _ => EXIT_INVALID_INPUT,
    };
    (code, e.to_string())
}

fn parse_biguint(s: &str, what: &str) -> Result<BigUint, Failure> {
    BigUint::from_str(s.trim())
        .map_err(|_| (EXIT_INVALID_INPUT, format!("{what} must be a decimal integer, got {s:?}")))
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn run_fixed_order(
    n: &str,
    min_h: usize,
    max_rounds: u32,
    invariant: InvariantArg,
    seed: u64,
) -> Outcome {
    let n = parse_biguint(n, "N")?;
    let policy = SearchPolicy {
        min_class_number: min_h,
        max_rounds,
        seed,
        force_j: invariant == InvariantArg::J,
        ..SearchPolicy::default()
    };
    let result = fixed_order_curve(&n, &policy).map_err(lib_failure)?;
    if let Err(issue) = check_certificate(&Construction::FixedOrder(result.clone())) {
        return Err((EXIT_CERTIFICATE_INVALID, format!("self-check failed: {issue}")));
    }
    Ok(fixed_order_json(&result))
}

fn run_fixed_size(k: u32, disc: i64, scan_from: Option<&str>, seed: u64) -> Outcome {
    let scan = match scan_from {
        Some(start) => ScanMode::SequentialFrom(parse_biguint(start, "--scan-from")?),
        None => ScanMode::Random,
    };
    let policy = SearchPolicy { scan, seed, ..SearchPolicy::default() };
    let result = fixed_size_curve(k, disc, &policy).map_err(lib_failure)?;
    if let Err(issue) = check_certificate(&Construction::FixedSize(result.clone())) {
        return Err((EXIT_CERTIFICATE_INVALID, format!("self-check failed: {issue}")));
    }
    Ok(fixed_size_json(&result))
}

fn run_classpoly(d: i64, invariant: InvariantArg, cache: Option<&std::path::Path>) -> Outcome {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err((
            EXIT_INVALID_INPUT,
            "D must be negative and congruent to 0 or 1 modulo 4".into(),
        ));
    }
    let kind = match invariant {
        InvariantArg::J => PolyKind::J,
        InvariantArg::Gamma2 => PolyKind::Gamma2,
    };
    if let Some(path) = cache {
        if let Some(poly) = cache_lookup(path, d, kind)
            .map_err(|e| (EXIT_INVALID_INPUT, format!("cache read failed: {e}")))?
        {
            return Ok(classpoly_json(&poly, true));
        }
    }
    let poly = match invariant {
        InvariantArg::J => hilbert_class_poly(d),
        InvariantArg::Gamma2 => gamma2_class_poly(d),
    }
    .map_err(lib_failure)?;
    if let Some(path) = cache {
        cache_append(path, &poly)
            .map_err(|e| (EXIT_INVALID_INPUT, format!("cache write failed: {e}")))?;
    }
    Ok(classpoly_json(&poly, false))
}

fn run_cornacchia(d: i64, n: &str, seed: u64) -> Outcome {
    let n = parse_biguint(n, "N")?;
    if d >= 0 || d.rem_euclid(8) != 5 {
        return Err((
            EXIT_INVALID_INPUT,
            "D must be negative and congruent to 5 modulo 8".into(),
        ));
    }
    if n.bits() < 2 || !n.bit(0) || !is_probable_prime(&n, 32, seed) {
        return Err((EXIT_INVALID_INPUT, "N must be an odd prime".into()));
    }
    let n_int = num_bigint::BigInt::from(n.clone());
    let dm = num_bigint::BigInt::from(d);
    let kron = cmcurve::arith::kronecker(&dm, &n_int);
    if kron != 1 {
        return Ok(json!("none"));
    }
    let residue = num_integer::Integer::mod_floor(&dm, &n_int)
        .to_biguint()
        .expect("floor residue is nonnegative");
    let sq = sqrt_mod_prime(&residue, &n, seed).map_err(lib_failure)?;
    match cornacchia(d, &n, &sq).map_err(lib_failure)? {
        Some(sol) => Ok(json!({ "x": sol.x.to_string(), "y": sol.y.to_string() })),
        None => Ok(json!("none")),
    }
}

fn run_verify(record: &std::path::Path) -> Outcome {
    let text = std::fs::read_to_string(record)
        .map_err(|e| (EXIT_INVALID_INPUT, format!("cannot read {}: {e}", record.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| (EXIT_INVALID_INPUT, format!("not valid JSON: {e}")))?;
    let result = value.get("result").unwrap_or(&value);
    let construction = record_to_construction(result)
        .map_err(|msg| (EXIT_INVALID_INPUT, format!("not a construction record: {msg}")))?;
    match check_certificate(&construction) {
        Ok(()) => Ok(json!({ "valid": true })),
        Err(issue) => Err((EXIT_CERTIFICATE_INVALID, format!("certificate invalid: {issue}"))),
    }
}

fn run_count(p: &str, a: &str, b: &str) -> Outcome {
    let p = parse_biguint(p, "p")?;
    let a = parse_biguint(a, "A")?;
    let b = parse_biguint(b, "B")?;
    let curve = Curve::new(p, a, b).map_err(lib_failure)?;
    let count = naive_point_count(&curve).map_err(lib_failure)?;
    Ok(json!({ "points": count.to_string() }))
}

// ---------------------------------------------------------------------------
// JSON shapes
// ---------------------------------------------------------------------------

fn curve_json(c: &Curve) -> Value {
    json!({ "p": c.p.to_string(), "a": c.a.to_string(), "b": c.b.to_string() })
}

fn certificate_json(cert: &OrderCertificate) -> Value {
    let witness = match &cert.witness {
        Point::Affine { x, y } => json!({ "x": x.to_string(), "y": y.to_string() }),
        Point::Infinity => json!("infinity"),
    };
    json!({
        "n": cert.n.to_string(),
        "curve": curve_json(&cert.curve),
        "witness": witness,
    })
}

fn fixed_order_json(r: &FixedOrderResult) -> Value {
    json!({
        "kind": "fixed-order",
        "n": r.n.to_string(),
        "p": r.p.to_string(),
        "d": r.d,
        "rounds_used": r.rounds_used,
        "basis_primes": r.basis_primes,
        "class_poly_digits": r.class_poly_digits,
        "curve": curve_json(&r.curve),
        "certificate": certificate_json(&r.certificate),
    })
}

fn fixed_size_json(r: &FixedSizeResult) -> Value {
    json!({
        "kind": "fixed-size",
        "k": r.k,
        "d": r.d,
        "p": r.p.to_string(),
        "q": r.q.to_string(),
        "unit_index": r.unit_index,
        "curve": curve_json(&r.curve),
        "certificate": certificate_json(&r.certificate),
    })
}

fn classpoly_json(poly: &ClassPolynomial, from_cache: bool) -> Value {
    let kind = match poly.kind {
        PolyKind::J => "j",
        PolyKind::Gamma2 => "gamma2",
        PolyKind::External => "external",
    };
    json!({
        "d": poly.d,
        "kind": kind,
        "degree": poly.degree(),
        // Ascending degree, constant term first, leading 1 last — the same
        // order the cache file stores.
        "coefficients": poly.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "max_coefficient_digits": poly.max_coefficient_decimal_digits(),
        "from_cache": from_cache,
    })
}

// ---------------------------------------------------------------------------
// Record parsing for `verify`
// ---------------------------------------------------------------------------
//
// Tampered records must reach check_certificate rather than die in parsing,
// so curves and points are rebuilt field-by-field without any validation.

fn record_to_construction(v: &Value) -> Result<Construction, String> {
    match v.get("kind").and_then(Value::as_str) {
        Some("fixed-order") => Ok(Construction::FixedOrder(FixedOrderResult {
            n: big_field(v, "n")?,
            p: big_field(v, "p")?,
            d: int_field(v, "d")?,
            rounds_used: uint_field(v, "rounds_used")? as u32,
            basis_primes: basis_field(v)?,
            class_poly_digits: uint_field(v, "class_poly_digits")? as usize,
            curve: curve_field(v, "curve")?,
            certificate: certificate_field(v)?,
        })),
        Some("fixed-size") => Ok(Construction::FixedSize(FixedSizeResult {
            k: uint_field(v, "k")? as u32,
            d: int_field(v, "d")?,
            p: big_field(v, "p")?,
            q: big_field(v, "q")?,
            unit_index: uint_field(v, "unit_index")? as u32,
            curve: curve_field(v, "curve")?,
            certificate: certificate_field(v)?,
        })),
        Some(other) => Err(format!("unknown record kind {other:?}")),
        None => Err("missing \"kind\" field".into()),
    }
}

fn big_field(v: &Value, key: &str) -> Result<BigUint, String> {
    let s = v
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| format!("missing or non-string field {key:?}"))?;
    BigUint::from_str(s).map_err(|_| format!("field {key:?} is not a decimal integer"))
}

fn int_field(v: &Value, key: &str) -> Result<i64, String> {
    v.get(key)
        .and_then(Value::as_i64)
        .ok_or_else(|| format!("missing or non-integer field {key:?}"))
}

fn uint_field(v: &Value, key: &str) -> Result<u64, String> {
    v.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| format!("missing or non-integer field {key:?}"))
}

fn basis_field(v: &Value) -> Result<Vec<u64>, String> {
    v.get("basis_primes")
        .and_then(Value::as_array)
        .ok_or_else(|| "missing or non-array field \"basis_primes\"".to_string())?
        .iter()
        .map(|e| e.as_u64().ok_or_else(|| "basis_primes entry is not an integer".to_string()))
        .collect()
}

fn curve_field(v: &Value, key: &str) -> Result<Curve, String> {
    let c = v.get(key).ok_or_else(|| format!("missing field {key:?}"))?;
    Ok(Curve {
        p: big_field(c, "p")?,
        a: big_field(c, "a")?,
        b: big_field(c, "b")?,
    })
}

fn certificate_field(v: &Value) -> Result<OrderCertificate, String> {
    let c = v.get("certificate").ok_or("missing field \"certificate\"")?;
    let witness = match c.get("witness") {
        Some(Value::String(s)) if s == "infinity" => Point::Infinity,
        Some(w) => Point::Affine { x: big_field(w, "x")?, y: big_field(w, "y")? },
        None => return Err("missing field \"witness\"".into()),
    };
    Ok(OrderCertificate {
        n: big_field(c, "n")?,
        curve: curve_field(c, "curve")?,
        witness,
    })
}
