//! polyvol: exact volumes of convex polytopes, polynomial integrals over
//! them, and hypercube slice volumes, from the command line.
//!
//! Every command emits one JSON document on stdout. Exact values appear as
//! rational strings (plus an integer radicand where a √ factor is part of
//! the answer); the "float" field is display-only. Exit status: 0 on
//! success, 1 on any input or computation error, 2 when `--method all`
//! finds disagreement between routes.

use clap::{Parser, Subcommand, ValueEnum};
use polyvol_cli::{input, output};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use polyvol::exact::{format_rat, rat_to_f64, Rat, RadicalValue};
use polyvol::{
    box_moment_check, classify_point, eval_T_explicit, eval_T_recurrence, eval_box_spline,
    good_check, hrep_direction_system, integrate_polynomial_hrep, mc_integrate, mc_volume,
    sample_generic_c, slice_volume, volume_report, DirectionMatrix, GenericVector, HPolytope,
    PointClassification, Polynomial, SliceSpec, VolumeMethod,
};

/// Used when neither --seed nor POLYVOL_SEED is given.
const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(
    name = "polyvol",
    version,
    about = "Exact polytope volumes, polynomial integrals, and cube-slice volumes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Explicit,
    Recurrence,
    Lasserre,
    Brion,
    Oracle,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Volume of {x : Ax <= b} (optionally intersected with x >= 0)
    Volume {
        /// JSON file {"A": [[..]], "b": [..], "nonneg": bool}
        #[arg(long)]
        hrep: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long)]
        seed: Option<u64>,
        /// Generic vector for the explicit route, e.g. "1,1,1,1,1/2";
        /// rejected unless it certifies against every column subset
        #[arg(long)]
        c_override: Option<String>,
        /// Monte Carlo sample count (oracle route only)
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Integral of a monomial or polynomial over an H-polytope
    Integrate {
        #[arg(long)]
        hrep: PathBuf,
        /// Monomial exponents, e.g. "1 2" for x*y^2
        #[arg(long)]
        exponents: Option<String>,
        /// JSON file: array of {"coeff": "p/q", "exponents": [..]}
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Explicit)]
        method: Method,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Volume of the unit-cube slice {u in [0,1]^n : Mu = t}
    Slice {
        /// Rows separated by ';', entries by spaces or commas
        #[arg(long)]
        directions: Option<String>,
        /// JSON file {"M": [[..]], "x": [..]} (x optional if --point given)
        #[arg(long)]
        file: Option<PathBuf>,
        /// Slice point t, one rational per row of M
        #[arg(long)]
        point: Option<String>,
    },
    /// Central-section lower bound check for weighted cube sections
    GoodCheck {
        /// Positive weights, e.g. "1" or "1,2,3/2"
        #[arg(long)]
        weights: String,
    },
    /// Truncated power T(x|M) at a point
    Tpower {
        #[arg(long)]
        directions: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        c_override: Option<String>,
    },
    /// Box spline B(x|M) at a point
    Boxspline {
        #[arg(long)]
        directions: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        point: Option<String>,
    },
    /// Quadrature check of the slice-profile moment identities
    Moments {
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("POLYVOL_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("POLYVOL_SEED is not an unsigned integer: {v:?}")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cmd: Cmd) -> Result<bool, String> {
    match cmd {
        Cmd::Volume {
            hrep,
            method,
            seed,
            c_override,
            samples,
        } => cmd_volume(&hrep, method, seed, c_override.as_deref(), samples),
        Cmd::Integrate {
            hrep,
            exponents,
            poly,
            method,
            seed,
            samples,
        } => cmd_integrate(
            &hrep,
            exponents.as_deref(),
            poly.as_deref(),
            method,
            seed,
            samples,
        ),
        Cmd::Slice {
            directions,
            file,
            point,
        } => cmd_slice(directions.as_deref(), file.as_deref(), point.as_deref()),
        Cmd::GoodCheck { weights } => cmd_good_check(&weights),
        Cmd::Tpower {
            directions,
            file,
            point,
            method,
            seed,
            c_override,
        } => cmd_tpower(
            directions.as_deref(),
            file.as_deref(),
            point.as_deref(),
            method,
            seed,
            c_override.as_deref(),
        ),
        Cmd::Boxspline {
            directions,
            file,
            point,
        } => cmd_boxspline(directions.as_deref(), file.as_deref(), point.as_deref()),
        Cmd::Moments { weights, grid } => cmd_moments(&weights, grid),
    }
}

/// Explicit-route volume with a user-supplied generic vector; the vector
/// must certify or the job fails before any evaluation.
fn volume_with_override(h: &HPolytope, c_text: &str) -> Result<(RadicalValue, Vec<String>), String> {
    let (m, b) = hrep_direction_system(h).map_err(|e| e.to_string())?;
    let entries = input::parse_inline_rats(c_text, "c-override")?;
    let c = GenericVector::certified(&m, entries).map_err(|e| e.to_string())?;
    let value = eval_T_explicit(&m, &b, &c).map_err(|e| e.to_string())?;
    let diags = vec!["generic vector supplied and certified".to_string()];
    Ok((RadicalValue::rational(value), diags))
}

fn exact_volume_entry(
    h: &HPolytope,
    method: VolumeMethod,
    seed: u64,
    c_override: Option<&str>,
) -> Result<(RadicalValue, Value), String> {
    let (value, name, diags) = if method == VolumeMethod::Explicit && c_override.is_some() {
        let (v, d) = volume_with_override(h, c_override.unwrap())?;
        (v, "explicit", d)
    } else {
        let r = volume_report(h, method, seed).map_err(|e| e.to_string())?;
        (r.value, r.method, r.diagnostics)
    };
    let doc = output::entry(name, output::radical_json(&value), value.to_f64(), &diags);
    Ok((value, doc))
}

fn oracle_volume_entry(h: &HPolytope, samples: u64, seed: u64) -> Result<(f64, f64, Value), String> {
    let est = mc_volume(h, samples, seed).map_err(|e| e.to_string())?;
    let diags = vec![
        format!("samples {}", est.samples),
        format!("std_error {:e}", est.std_error),
        format!("seed {}", est.seed),
    ];
    let doc = output::entry("oracle", Value::Null, est.mean, &diags);
    Ok((est.mean, est.std_error, doc))
}

fn cmd_volume(
    hrep: &std::path::Path,
    method: Method,
    seed_flag: Option<u64>,
    c_override: Option<&str>,
    samples: u64,
) -> Result<bool, String> {
    let h = input::parse_hrep(&input::load_json(hrep)?)?;
    let seed = resolve_seed(seed_flag)?;
    if c_override.is_some() && !matches!(method, Method::Explicit | Method::All) {
        return Err("--c-override applies only to the explicit method".into());
    }
    match method {
        Method::Oracle => {
            let (_, _, doc) = oracle_volume_entry(&h, samples, seed)?;
            output::print_doc(&doc);
            Ok(true)
        }
        Method::All => {
            let mut entries = Vec::new();
            let mut exact_values = Vec::new();
            for vm in [
                VolumeMethod::Explicit,
                VolumeMethod::Recurrence,
                VolumeMethod::Lasserre,
                VolumeMethod::Brion,
            ] {
                let (value, doc) = exact_volume_entry(&h, vm, seed, c_override)?;
                exact_values.push(value);
                entries.push(doc);
            }
            let (mean, se, doc) = oracle_volume_entry(&h, samples, seed)?;
            entries.push(doc);
            let exact_agree = exact_values.windows(2).all(|w| w[0] == w[1]);
            let target = exact_values[0].to_f64();
            let oracle_agrees = (mean - target).abs() <= 3.0 * se;
            let agreement = exact_agree && oracle_agrees;
            output::print_doc(&json!({
                "agreement": agreement,
                "entries": entries,
            }));
            Ok(agreement)
        }
        Method::Explicit | Method::Recurrence | Method::Lasserre | Method::Brion => {
            let vm = match method {
                Method::Explicit => VolumeMethod::Explicit,
                Method::Recurrence => VolumeMethod::Recurrence,
                Method::Lasserre => VolumeMethod::Lasserre,
                _ => VolumeMethod::Brion,
            };
            let (_, doc) = exact_volume_entry(&h, vm, seed, c_override)?;
            output::print_doc(&doc);
            Ok(true)
        }
    }
}

fn cmd_integrate(
    hrep: &std::path::Path,
    exponents: Option<&str>,
    poly: Option<&std::path::Path>,
    method: Method,
    seed_flag: Option<u64>,
    samples: u64,
) -> Result<bool, String> {
    let h = input::parse_hrep(&input::load_json(hrep)?)?;
    let seed = resolve_seed(seed_flag)?;
    let poly = match (exponents, poly) {
        (Some(_), Some(_)) => return Err("give either --exponents or --poly, not both".into()),
        (Some(e), None) => {
            let k = input::parse_inline_exponents(e)?;
            Polynomial::new(k.len(), vec![(Rat::from_integer(1.into()), k)])
                .map_err(|e| e.to_string())?
        }
        (None, Some(p)) => input::parse_polynomial(&input::load_json(p)?, h.dim())?,
        (None, None) => return Err("one of --exponents or --poly is required".into()),
    };
    let exact = || -> Result<Rat, String> {
        integrate_polynomial_hrep(&h, &poly).map_err(|e| e.to_string())
    };
    let oracle = |seed: u64| -> Result<(f64, f64, Value), String> {
        let est = mc_integrate(&h, &poly, samples, seed).map_err(|e| e.to_string())?;
        let diags = vec![
            format!("samples {}", est.samples),
            format!("std_error {:e}", est.std_error),
            format!("seed {}", est.seed),
        ];
        Ok((
            est.mean,
            est.std_error,
            output::entry("oracle", Value::Null, est.mean, &diags),
        ))
    };
    match method {
        Method::Explicit => {
            let v = exact()?;
            let doc = output::entry("explicit", output::rat_json(&v), rat_to_f64(&v), &[]);
            output::print_doc(&doc);
            Ok(true)
        }
        Method::Oracle => {
            let (_, _, doc) = oracle(seed)?;
            output::print_doc(&doc);
            Ok(true)
        }
        Method::All => {
            let v = exact()?;
            let target = rat_to_f64(&v);
            let exact_doc = output::entry("explicit", output::rat_json(&v), target, &[]);
            let (mean, se, oracle_doc) = oracle(seed)?;
            let agreement = (mean - target).abs() <= 3.0 * se;
            output::print_doc(&json!({
                "agreement": agreement,
                "entries": [exact_doc, oracle_doc],
            }));
            Ok(agreement)
        }
        _ => Err("integrate supports --method explicit, oracle, or all".into()),
    }
}

/// Matrix and point from --directions/--point and/or a JSON file.
fn directions_and_point(
    directions: Option<&str>,
    file: Option<&std::path::Path>,
    point: Option<&str>,
    point_required: bool,
) -> Result<(polyvol::exact::RatMatrix, Option<Vec<Rat>>), String> {
    let (matrix, file_point) = match (directions, file) {
        (Some(_), Some(_)) => return Err("give either --directions or --file, not both".into()),
        (Some(d), None) => (input::parse_inline_matrix(d, "directions")?, None),
        (None, Some(f)) => {
            let v = input::load_json(f)?;
            let (dm, x) = input::parse_direction_system(&v)?;
            (dm.matrix().clone(), x)
        }
        (None, None) => return Err("one of --directions or --file is required".into()),
    };
    let pt = match point {
        Some(p) => Some(input::parse_inline_rats(p, "point")?),
        None => file_point,
    };
    if point_required && pt.is_none() {
        return Err("a point is required (--point or \"x\" in the file)".into());
    }
    Ok((matrix, pt))
}

fn cmd_slice(
    directions: Option<&str>,
    file: Option<&std::path::Path>,
    point: Option<&str>,
) -> Result<bool, String> {
    let (matrix, pt) = directions_and_point(directions, file, point, true)?;
    let spec = SliceSpec::new(matrix).map_err(|e| e.to_string())?;
    let t = pt.expect("checked above");
    let value = slice_volume(&spec, &t).map_err(|e| e.to_string())?;
    let mut diags = Vec::new();
    if spec.dropped_columns() > 0 {
        diags.push(format!(
            "{} zero column(s) dropped (the slice is a prism along those axes)",
            spec.dropped_columns()
        ));
    }
    diags.push(format!("codimension {}", spec.codim()));
    let doc = output::entry("explicit", output::radical_json(&value), value.to_f64(), &diags);
    output::print_doc(&doc);
    Ok(true)
}

fn cmd_good_check(weights: &str) -> Result<bool, String> {
    let a = input::parse_inline_rats(weights, "weights")?;
    let r = good_check(&a).map_err(|e| e.to_string())?;
    let doc = json!({
        "center_value": output::rat_json(&r.center_value),
        "equality": r.equality,
        "float": output::display_float(r.section_volume.to_f64()),
        "holds": r.holds,
        "method": "exact",
        "value": output::radical_json(&r.section_volume),
        "weights": r.weights.iter().map(format_rat).collect::<Vec<_>>(),
    });
    output::print_doc(&doc);
    Ok(true)
}

fn tpower_point_diag(m: &DirectionMatrix, x: &[Rat]) -> Result<Vec<String>, String> {
    let mut diags = Vec::new();
    match classify_point(m, x).map_err(|e| e.to_string())? {
        PointClassification::Boundary => diags.push(
            "point lies on a chamber wall; the value is the fixed one-sided limit".to_string(),
        ),
        PointClassification::Outside => {
            diags.push("point lies outside the cone of the directions".to_string())
        }
        PointClassification::Interior => {}
    }
    Ok(diags)
}

fn cmd_tpower(
    directions: Option<&str>,
    file: Option<&std::path::Path>,
    point: Option<&str>,
    method: Method,
    seed_flag: Option<u64>,
    c_override: Option<&str>,
) -> Result<bool, String> {
    let (matrix, pt) = directions_and_point(directions, file, point, true)?;
    let dm = DirectionMatrix::new(matrix).map_err(|e| e.to_string())?;
    let x = pt.expect("checked above");
    let seed = resolve_seed(seed_flag)?;
    let diags = tpower_point_diag(&dm, &x)?;
    let explicit = |diags: &[String]| -> Result<(Rat, Value), String> {
        let c = match c_override {
            Some(text) => {
                GenericVector::certified(&dm, input::parse_inline_rats(text, "c-override")?)
                    .map_err(|e| e.to_string())?
            }
            None => sample_generic_c(&dm, seed).map_err(|e| e.to_string())?,
        };
        let v = eval_T_explicit(&dm, &x, &c).map_err(|e| e.to_string())?;
        let doc = output::entry("explicit", output::rat_json(&v), rat_to_f64(&v), diags);
        Ok((v, doc))
    };
    let recurrence = |diags: &[String]| -> Result<(Rat, Value), String> {
        let v = eval_T_recurrence(&dm, &x).map_err(|e| e.to_string())?;
        let doc = output::entry("recurrence", output::rat_json(&v), rat_to_f64(&v), diags);
        Ok((v, doc))
    };
    match method {
        Method::Explicit => {
            let (_, doc) = explicit(&diags)?;
            output::print_doc(&doc);
            Ok(true)
        }
        Method::Recurrence => {
            if c_override.is_some() {
                return Err("--c-override applies only to the explicit method".into());
            }
            let (_, doc) = recurrence(&diags)?;
            output::print_doc(&doc);
            Ok(true)
        }
        Method::All => {
            let (ve, doc_e) = explicit(&diags)?;
            let (vr, doc_r) = recurrence(&diags)?;
            let agreement = ve == vr;
            output::print_doc(&json!({
                "agreement": agreement,
                "entries": [doc_e, doc_r],
            }));
            Ok(agreement)
        }
        _ => Err("tpower supports --method explicit, recurrence, or all".into()),
    }
}

fn cmd_boxspline(
    directions: Option<&str>,
    file: Option<&std::path::Path>,
    point: Option<&str>,
) -> Result<bool, String> {
    let (matrix, pt) = directions_and_point(directions, file, point, true)?;
    let dm = DirectionMatrix::new(matrix).map_err(|e| e.to_string())?;
    let x = pt.expect("checked above");
    let v = eval_box_spline(&dm, &x).map_err(|e| e.to_string())?;
    let doc = output::entry("explicit", output::rat_json(&v), rat_to_f64(&v), &[]);
    output::print_doc(&doc);
    Ok(true)
}

fn cmd_moments(weights: &str, grid: usize) -> Result<bool, String> {
    let a = input::parse_inline_rats(weights, "weights")?;
    let r = box_moment_check(&a, grid).map_err(|e| e.to_string())?;
    let doc = json!({
        "grid": r.grid,
        "half_mass": output::rat_json(&r.half_mass),
        "mass": output::rat_json(&r.mass),
        "max_relative_deviation": output::display_float(r.max_relative_deviation),
        "method": "quadrature",
        "second_moment": output::rat_json(&r.second_moment),
        "second_moment_target": output::rat_json(&r.second_moment_target),
        "weights": a.iter().map(format_rat).collect::<Vec<_>>(),
    });
    output::print_doc(&doc);
    Ok(true)
}
