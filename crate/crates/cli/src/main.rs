//! anticonc command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 resource cap
//! (enumeration too large without --mc), 4 contract violation (V not
//! dominated by G).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use anticonc::bounds::{ReportOptions, VChoice, Which, CSV_HEADER};
use anticonc::charfn::QuadratureSpec;
use anticonc::error::Error;
use anticonc::exact::{q_monte_carlo, sample_weighted_sum, weighted_sum_dist};
use anticonc::scenario::{RawDist, Scenario};
use anticonc::verify::{
    constants_csv, generate_family, run_cf_suite, run_constants_suite, run_holder_suite,
    run_jensen_suite, FamilySpec, SuiteOutcome,
};
use anticonc::{build_report, q_exact_1d, q_exact_2d, q_h};

const EXIT_VERIFY_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_CONTRACT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "anticonc",
    version,
    about = "Concentration functions of weighted i.i.d. sums: exact values, comparison bounds, verification suites"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Concentration value Q(F_a, tau) of a scenario, exact or Monte Carlo
    Q {
        /// Scenario JSON file
        scenario: PathBuf,
        /// Force the Monte Carlo path
        #[arg(long)]
        mc: bool,
        /// Monte Carlo sample count
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Monte Carlo seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bound report for a scenario (JSON or CSV)
    Bound {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = WhichArg::All)]
        which: WhichArg,
        /// Comparison-measure choice for the theorem bound
        #[arg(long, value_enum, default_value_t = VArg::Tail)]
        v: VArg,
        /// Measure JSON ({"atoms": [...], "masses": [...]}) for --v file
        #[arg(long)]
        v_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Scenario id echoed into the report
        #[arg(long, default_value_t = 0)]
        id: u64,
        /// Monte Carlo sample count for the reference Q fallback
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run verification suites and write report files
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for report.json / constants.csv
        #[arg(long, default_value = "anticonc-verify")]
        out: PathBuf,
    },
    /// Evaluate a sweep file and stream CSV rows to stdout
    Sweep {
        /// Sweep JSON file
        sweep: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    All,
    Esseen,
    Thm1,
    Cor1,
    Cor2,
}

#[derive(Clone, Copy, ValueEnum)]
enum VArg {
    Tail,
    Floor,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Holder,
    Jensen,
    Cf,
    Constants,
    All,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::ResourceCap(_) => EXIT_RESOURCE,
        Error::Contract(_) => EXIT_CONTRACT,
        _ => EXIT_INPUT,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_for(e))
}

/// ANTICONC_QUAD_NODES and ANTICONC_QUAD_REL_TOL override the quadrature
/// configuration; the result is re-validated.
fn apply_env_overrides(spec: &mut QuadratureSpec) -> Result<(), Error> {
    if let Ok(v) = std::env::var("ANTICONC_QUAD_NODES") {
        spec.nodes_per_axis = v
            .parse()
            .map_err(|_| Error::InvalidInput(format!("ANTICONC_QUAD_NODES={v} is not an integer")))?;
    }
    if let Ok(v) = std::env::var("ANTICONC_QUAD_REL_TOL") {
        spec.rel_tol = v
            .parse()
            .map_err(|_| Error::InvalidInput(format!("ANTICONC_QUAD_REL_TOL={v} is not a number")))?;
    }
    spec.validate()
}

fn load_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut s = Scenario::from_json_str(&text)?;
    apply_env_overrides(&mut s.quadrature)?;
    Ok(s)
}

fn cmd_q(path: &Path, mc: bool, samples: usize, seed: u64) -> Result<(), Error> {
    let s = load_scenario(path)?;
    if mc {
        let batch = sample_weighted_sum(&s.weights, &s.law_x, samples, seed)?;
        let est = q_monte_carlo(&batch, s.tau)?;
        println!(
            "q = {} stderr = {} method=monte-carlo seed={seed} samples={samples}",
            est.estimate, est.stderr
        );
        return Ok(());
    }
    let fa = weighted_sum_dist(&s.weights, &s.law_x, s.enumeration_cap).map_err(|e| match e {
        Error::ResourceCap(msg) => Error::ResourceCap(format!("{msg} (pass --mc)")),
        other => other,
    })?;
    let q = match s.dim() {
        1 => q_exact_1d(&fa.to_1d()?, s.tau)?,
        2 => q_exact_2d(&fa, s.tau)?,
        d => {
            return Err(Error::UnsupportedDimension {
                d,
                why: "exact concentration is implemented for d <= 2",
            })
        }
    };
    println!("q = {q} method=enumeration");
    Ok(())
}

fn cmd_bound(
    path: &Path,
    which: WhichArg,
    v: VArg,
    v_file: Option<&Path>,
    format: FormatArg,
    id: u64,
    samples: usize,
    seed: u64,
) -> Result<(), Error> {
    let s = load_scenario(path)?;
    let v_choice = match v {
        VArg::Tail => VChoice::Tail,
        VArg::Floor => VChoice::FloorWeighted,
        VArg::File => {
            let path = v_file.ok_or_else(|| {
                Error::InvalidInput("--v file needs --v-file <path>".to_string())
            })?;
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            let raw: RawDist = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("malformed measure JSON: {e}")))?;
            VChoice::Custom(raw.to_sub_probability()?)
        }
    };
    let opts = ReportOptions {
        id,
        which: match which {
            WhichArg::All => Which::All,
            WhichArg::Esseen => Which::Esseen,
            WhichArg::Thm1 => Which::Thm1,
            WhichArg::Cor1 => Which::Cor1,
            WhichArg::Cor2 => Which::Cor2,
        },
        v_choice,
        mc_samples: samples,
        mc_seed: seed,
    };
    let report = build_report(&s, &opts)?;
    match format {
        FormatArg::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialization")
        ),
        FormatArg::Csv => {
            println!("{CSV_HEADER}");
            println!("{}", report.to_csv_row());
        }
    }
    Ok(())
}

fn cmd_verify(suite: SuiteArg, seed: u64, out: &Path) -> Result<bool, Error> {
    let mut base = QuadratureSpec::default();
    apply_env_overrides(&mut base)?;
    fs::create_dir_all(out)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", out.display())))?;

    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    let run_all = matches!(suite, SuiteArg::All);
    if run_all || matches!(suite, SuiteArg::Holder) {
        outcomes.push(run_holder_suite(seed, 200, &base));
    }
    if run_all || matches!(suite, SuiteArg::Jensen) {
        outcomes.push(run_jensen_suite(seed, 100, &base));
    }
    if run_all || matches!(suite, SuiteArg::Cf) {
        outcomes.push(run_cf_suite(seed, 50, 1000));
    }
    if run_all || matches!(suite, SuiteArg::Constants) {
        let (estimates, outcome) = run_constants_suite(seed, &base);
        let csv = constants_csv(&estimates);
        let path = out.join("constants.csv");
        fs::write(&path, csv)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        outcomes.push(outcome);
    }

    let mut all_passed = true;
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let stat = o
            .statistic
            .map(|s| format!(" statistic={s}"))
            .unwrap_or_default();
        println!(
            "{status} suite={} total={} vacuous={} failures={}{stat}",
            o.name,
            o.total,
            o.vacuous,
            o.failures.len()
        );
        for f in &o.failures {
            println!("  {f}");
        }
        all_passed &= o.passed();
    }

    let report = serde_json::json!({
        "seed": seed,
        "passed": all_passed,
        "suites": outcomes,
    });
    let path = out.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(&report).expect("report"))
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    Ok(all_passed)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct RawSweep {
    base: serde_json::Value,
    axis: String,
    values: Vec<f64>,
    #[serde(default)]
    family: Option<FamilySpec>,
}

fn cmd_sweep(path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawSweep = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed sweep JSON: {e}")))?;
    if raw.values.is_empty() {
        return Err(Error::InvalidInput("sweep values must be nonempty".to_string()));
    }
    if raw.values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("sweep values must be sorted".to_string()));
    }
    let mut base = Scenario::from_json_str(&raw.base.to_string())?;
    apply_env_overrides(&mut base.quadrature)?;
    if let Some(f) = &raw.family {
        base = Scenario::new(
            generate_family(f)?,
            base.law_x.clone(),
            base.tau,
            base.epsilon,
            base.quadrature.clone(),
            base.enumeration_cap,
        )?;
    }
    match raw.axis.as_str() {
        "tau" | "epsilon" | "n" | "lambda_exp" => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown sweep axis \"{other}\" (expected tau, epsilon, lambda_exp, or n)"
            )))
        }
    }
    if raw.axis == "n" && raw.family.is_none() {
        return Err(Error::InvalidInput(
            "axis \"n\" needs a weight family to regenerate from".to_string(),
        ));
    }

    println!("{CSV_HEADER}");

    // The comparison exponent is not a scenario field, so a lambda_exp sweep
    // evaluates Q(H_1^lambda, epsilon) per value and reports it in the flags
    // column of otherwise identical rows.
    if raw.axis == "lambda_exp" {
        let opts = ReportOptions::default();
        let template = build_report(&base, &opts)?;
        for (i, &lambda) in raw.values.iter().enumerate() {
            let mut row = template.clone();
            row.id = i as u64;
            match q_h(&base.weights, lambda, base.epsilon, &base.quadrature) {
                Ok(qh) => row.flags.push(format!(
                    "lambda_exp={lambda};qh={};qh_raw={}",
                    qh.value, qh.raw
                )),
                Err(e) => row.flags.push(format!("error:lambda_exp={lambda}:{e}")),
            }
            println!("{}", row.to_csv_row());
        }
        return Ok(());
    }

    let rows: Vec<String> = raw
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let built = (|| -> Result<String, Error> {
                let mut s = base.clone();
                match raw.axis.as_str() {
                    "tau" => {
                        if value < 0.0 {
                            return Err(Error::InvalidInput(format!("tau {value} < 0")));
                        }
                        s.tau = value;
                    }
                    "epsilon" => {
                        if !(value > 0.0) {
                            return Err(Error::InvalidInput(format!("epsilon {value} <= 0")));
                        }
                        s.epsilon = value;
                    }
                    "n" => {
                        let n = value as usize;
                        if n == 0 || n as f64 != value {
                            return Err(Error::InvalidInput(format!(
                                "n sweep value {value} is not a positive integer"
                            )));
                        }
                        let family = raw.family.as_ref().expect("checked above").with_n(n);
                        s = Scenario::new(
                            generate_family(&family)?,
                            s.law_x.clone(),
                            s.tau,
                            s.epsilon,
                            s.quadrature.clone(),
                            s.enumeration_cap,
                        )?;
                    }
                    _ => unreachable!(),
                }
                let opts = ReportOptions {
                    id: i as u64,
                    ..ReportOptions::default()
                };
                Ok(build_report(&s, &opts)?.to_csv_row())
            })();
            built.unwrap_or_else(|e| {
                // per-row failures become a flagged row, never an abort
                format!("{i},,,,,,,,,,,,,,error:{e}")
            })
        })
        .collect();
    for row in rows {
        println!("{row}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Q {
            scenario,
            mc,
            samples,
            seed,
        } => match cmd_q(&scenario, mc, samples, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Cmd::Bound {
            scenario,
            which,
            v,
            v_file,
            format,
            id,
            samples,
            seed,
        } => match cmd_bound(&scenario, which, v, v_file.as_deref(), format, id, samples, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Cmd::Verify { suite, seed, out } => match cmd_verify(suite, seed, &out) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_VERIFY_FAILURE),
            Err(e) => fail(&e),
        },
        Cmd::Sweep { sweep } => match cmd_sweep(&sweep) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
    }
}
