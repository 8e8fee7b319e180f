use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::json;

use pushtrack::bounds::{
    dilatation_bounds, least_dilatation_bounds, power_curve_bounds, PowerClass,
};
use pushtrack::families::{
    fixed_family, fixed_row_sum_report, winding_family, winding_row_sum_report, RowSumReport,
};
use pushtrack::verify::run_criteria;
use pushtrack::{analyze, parse_curve, CurveDiagram, PfOptions, SurfaceSig};

/// Invariant pretracks and dilatation bounds for point-pushing maps.
#[derive(Parser)]
#[command(name = "pushtrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the faces of a curve diagram.
    Faces { file: PathBuf },
    /// Run the full pipeline on a curve file.
    Analyze {
        file: PathBuf,
        /// Enclosure width, as a decimal or `p/q`.
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Generate and check one of the explicit families.
    Family {
        #[command(subcommand)]
        kind: FamilyKind,
    },
    /// Evaluate the closed-form dilatation bounds.
    Bounds {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        punctures: usize,
        #[arg(long)]
        selfint: Option<u64>,
        /// Treat the curve as this power of a primitive curve with `--selfint` crossings.
        #[arg(long)]
        power: Option<u64>,
        #[arg(long, default_value = "primitive")]
        power_class: String,
    },
    /// Run the self-verification suite.
    Verify {
        /// Criterion number, name or group (incidence, pretrack, families, spectral, bounds).
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Subcommand)]
enum FamilyKind {
    Fixed {
        #[arg(long)]
        genus: usize,
        /// Write the lifted curve to this file.
        #[arg(long)]
        emit_curve: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    Winding {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        winding: u64,
        #[arg(long)]
        json: bool,
    },
}

const INPUT_ERROR: u8 = 2;

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn load(path: &Path) -> Result<CurveDiagram, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_curve(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_tol(s: &str) -> Option<BigRational> {
    let r = if let Some((p, q)) = s.split_once('/') {
        let (p, q): (BigInt, BigInt) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
        if q == BigInt::from(0) {
            return None;
        }
        BigRational::new(p, q)
    } else {
        BigRational::from_float(s.trim().parse::<f64>().ok()?)?
    };
    r.is_positive().then_some(r)
}

fn faces(file: &Path) -> ExitCode {
    let d = match load(file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    println!("{} on {}: {} faces", d.name(), d.surface(), d.faces().len());
    for f in d.faces() {
        let corners: Vec<String> = f.corners.iter().map(ToString::to_string).collect();
        println!(
            "{}\t{} corners\t{} punctures\t{}",
            f.label,
            f.corners.len(),
            f.punctures,
            corners.join(" ")
        );
    }
    ExitCode::SUCCESS
}

fn analyze_cmd(file: &Path, tol: Option<&str>, as_json: bool) -> ExitCode {
    let d = match load(file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let mut opts = PfOptions::from_env();
    if let Some(t) = tol {
        match parse_tol(t) {
            Some(r) => opts = opts.with_tol(r),
            None => return input_error(format!("bad tolerance {t:?}")),
        }
    }
    let report = analyze(&d, &opts);
    if as_json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn print_family(title: &str, dim: usize, r: &RowSumReport, as_json: bool) -> ExitCode {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "family": title, "dim": dim, "row_sums": r }))
                .expect("serializes")
        );
    } else {
        println!("{title}: {dim}x{dim} incidence matrix");
        println!(
            "  first-row sum  {} (formula {})",
            r.first_row_sum, r.formula_value
        );
        println!("  max row sum    {}", r.max_row_sum);
        println!("  below {}  {}", r.bound, r.below_bound);
        println!("  primitive      {}", r.primitive);
    }
    let ok = r.formula_matches && r.below_bound && r.primitive;
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn family(kind: FamilyKind) -> ExitCode {
    match kind {
        FamilyKind::Fixed {
            genus,
            emit_curve,
            json,
        } => {
            let (m, curve) = match fixed_family(genus) {
                Ok(x) => x,
                Err(e) => return input_error(e),
            };
            if let Some(path) = emit_curve {
                let text = serde_json::to_string_pretty(&curve.to_file()).expect("serializes");
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    return input_error(format!("{}: {e}", path.display()));
                }
            }
            let report = fixed_row_sum_report(genus).expect("genus already checked");
            print_family(
                &format!("fixed family, genus {genus}"),
                m.dim(),
                &report,
                json,
            )
        }
        FamilyKind::Winding {
            genus,
            winding,
            json,
        } => {
            let m = match winding_family(genus, winding) {
                Ok(m) => m,
                Err(e) => return input_error(e),
            };
            let report =
                winding_row_sum_report(genus, winding).expect("parameters already checked");
            print_family(
                &format!("winding family, genus {genus}, winding {winding}"),
                m.dim(),
                &report,
                json,
            )
        }
    }
}

fn bounds(
    genus: usize,
    punctures: usize,
    selfint: Option<u64>,
    power: Option<u64>,
    class: &str,
) -> ExitCode {
    let surface = SurfaceSig::new(genus, punctures);
    let class: PowerClass = match class.parse() {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let out = match (selfint, power) {
        (None, None) => least_dilatation_bounds(surface, None).map(|b| json!(b)),
        (Some(i), None) => dilatation_bounds(i, surface, class).map(|b| json!(b)),
        (Some(i), Some(m)) => dilatation_bounds(i, surface, class).and_then(|b| {
            power_curve_bounds(i, m, b.log_lower).map(|p| json!({ "primitive": b, "power": p }))
        }),
        (None, Some(_)) => return input_error("--power needs --selfint"),
    };
    match out {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => input_error(e),
    }
}

fn verify(filter: Option<&str>) -> ExitCode {
    let results = run_criteria(filter);
    if results.is_empty() {
        return input_error(format!("no criterion matches {:?}", filter.unwrap_or("")));
    }
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Faces { file } => faces(&file),
        Command::Analyze { file, tol, json } => analyze_cmd(&file, tol.as_deref(), json),
        Command::Family { kind } => family(kind),
        Command::Bounds {
            genus,
            punctures,
            selfint,
            power,
            power_class,
        } => bounds(genus, punctures, selfint, power, &power_class),
        Command::Verify { filter } => verify(filter.as_deref()),
    }
}
