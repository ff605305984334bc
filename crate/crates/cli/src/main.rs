use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use jfield_core::derivations::{
    corresponding_system, delta, essential_candidate_check, main_inequality_report, schanuel_report, Analysis,
    DerivationError, EssentialOutcome, JclOracle, DEFAULT_SEED,
};
use jfield_core::evaluator::{evaluate_jet, evaluate_jet_dd};
use jfield_core::exactnum::parse::{identifiers, parse_rational_function};
use jfield_core::exactnum::vars_of;
use jfield_core::jfield::{check_axioms, fragment_from_evaluator, AxiomConfig, JFieldFragment, Status};
use jfield_core::modpoly::{build_modular_polynomial, verify_modular_polynomial, DEFAULT_MAX_LEVEL};
use jfield_core::moebius::{
    orbit_decide_exact, orbit_decide_numeric, reduce_to_fundamental_domain, ExactOrbitDecision, MatrixRecord,
    NumericOrbitDecision, RatMatrix2,
};
use jfield_core::numeric::{Real, DD};
use jfield_core::pregeom::{gcl_dimension, pregeometry_property_suite, GclConfig, GclOracle, PointSpec};
use jfield_core::qseries::verify_modular_ode;
use num_complex::{Complex, Complex64};

const PRECISION_ENV: &str = "JFIELD_PRECISION";
const DEFAULT_PRECISION: i64 = 50;

/// Exact and numeric tools for the modular j-function.
#[derive(Parser, Debug)]
#[command(name = "jfield", version, about)]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the classical modular polynomial Φ_N, or verify it as a series identity.
    #[command(args_conflicts_with_subcommands = true)]
    Modpoly {
        #[command(subcommand)]
        action: Option<ModpolyAction>,
        /// Level N.
        n: Option<u32>,
    },
    /// Check that ℸ(j, θj, θ²j, θ³j) vanishes as an exact q-series.
    VerifyOde {
        /// Number of q-coefficients to check (default from JFIELD_PRECISION, else 50).
        #[arg(long)]
        precision: Option<i64>,
    },
    /// Evaluate j and its derivatives at a point of the upper or lower half plane.
    Eval {
        /// The point as "re,im".
        tau: String,
        /// Highest derivative to report (0 to 3).
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(0..=3))]
        derivs: u8,
        /// Number of q-series terms.
        #[arg(long)]
        terms: Option<usize>,
        /// Evaluate in double-double arithmetic.
        #[arg(long)]
        dd: bool,
    },
    /// Reduce a point into the standard fundamental domain of SL2(Z).
    Reduce {
        /// The point as "re,im".
        tau: String,
    },
    /// Decide whether x = g·y for some g in GL2(Q); the witness is that g.
    Orbit {
        /// A rational function such as "(t+1)/(t-1)", or a complex point "re,im".
        x: String,
        y: String,
        /// Height bound for numeric searches.
        #[arg(long, default_value_t = 5)]
        height: u32,
        /// Tolerance for numeric searches.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Geodesic-closure dimensions and pregeometry property suites.
    Pregeom {
        #[command(subcommand)]
        action: PregeomAction,
    },
    /// Predimension δ(z̄/C) of a presentation.
    Delta {
        #[command(flatten)]
        p: PresentationArgs,
        /// The points z̄ (generators with declared j-points).
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        over: Vec<String>,
    },
    /// dim Ω(K/C) and dim Ξ(K/C), with an optional corresponding system for τ̄.
    XiDim {
        #[command(flatten)]
        p: PresentationArgs,
        /// The set C (defaults to the declared constants).
        #[arg(long, value_delimiter = ',')]
        over: Option<Vec<String>>,
        /// Build a Kronecker-normalized system of j-derivations for these generators.
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<String>>,
    },
    /// Decide a ∈ jcl(C).
    JclMember {
        #[command(flatten)]
        p: PresentationArgs,
        #[arg(long)]
        element: String,
        #[arg(long, value_delimiter = ',')]
        over: Vec<String>,
    },
    /// Compare t.d. with 3 dim^g + dim^j for the points z̄.
    SchanuelReport {
        #[command(flatten)]
        p: PresentationArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        /// The set C (defaults to the declared constants).
        #[arg(long, value_delimiter = ',')]
        over: Option<Vec<String>>,
    },
    /// Check the hypotheses of the main inequality and compare with 3nm and 4nm.
    MainReport {
        #[command(flatten)]
        p: PresentationArgs,
        #[arg(long, value_delimiter = ',')]
        tau: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        /// A matrix "a,b,c,d" with entries in Q(τ̄); repeat for each g.
        #[arg(long = "g")]
        gs: Vec<String>,
    },
    /// Search for a tuple that witnesses that z̄ is not essential.
    EssentialCheck {
        #[command(flatten)]
        p: PresentationArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        /// Height bound on the orbit matrices followed.
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// Build j-field fragments and check the j-field axioms on them.
    Axioms {
        #[command(subcommand)]
        action: AxiomsAction,
    },
}

#[derive(Subcommand, Debug)]
enum ModpolyAction {
    /// Check Φ_N(j(q^N), j(q)) = 0 through the given precision.
    Verify {
        n: u32,
        /// Number of q-coefficients (default from JFIELD_PRECISION, else 50).
        #[arg(long)]
        precision: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum PregeomAction {
    /// dim^g of a list of points over a base list.
    Dim {
        /// GclConfig JSON: {base, height, tol, universe}.
        #[arg(long)]
        config: PathBuf,
        /// JSON list of points.
        #[arg(long)]
        points: PathBuf,
        /// JSON list of base points.
        #[arg(long)]
        over: Option<PathBuf>,
    },
    /// Run the five closure axioms on every small subset of a sample universe.
    Props {
        /// GclConfig JSON whose universe is tested with gcl.
        #[arg(long, conflicts_with = "presentation", required_unless_present = "presentation")]
        config: Option<PathBuf>,
        /// Presentation JSON whose generators are tested with jcl.
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Largest subset size.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AxiomsAction {
    /// Check axioms 1-6 on a fragment.
    Check {
        fragment: PathBuf,
        /// Height bound of the witness searches for axioms 5 and 6.
        #[arg(long, default_value_t = 3)]
        height: u32,
        /// Override the fragment's tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build a fragment from numeric evaluation.
    Build {
        /// A point "re,im"; repeat for more points.
        #[arg(long = "tau", required = true)]
        taus: Vec<String>,
        /// A matrix "a,b,c,d"; each is applied to every point.
        #[arg(long = "g")]
        gs: Vec<String>,
        #[arg(long)]
        terms: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct PresentationArgs {
    /// Presentation JSON file.
    #[arg(long)]
    presentation: PathBuf,
    /// Seed for the F_p sample points.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn derivation_failure(e: DerivationError) -> Failure {
    match e {
        DerivationError::Parse(_)
        | DerivationError::UnknownGenerator(_)
        | DerivationError::DuplicateGenerator(_)
        | DerivationError::InvalidJPoint(_)
        | DerivationError::InvalidOrbit(_) => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

struct Outcome {
    status: Status,
    report: Value,
}

fn outcome(status: Status, report: impl Serialize) -> Result<Outcome, Failure> {
    Ok(Outcome {
        status,
        report: serde_json::to_value(report)?,
    })
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("expected \"re,im\", got {s:?}")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number {t:?}")));
    Ok(Complex64::new(num(re)?, num(im)?))
}

fn parse_matrix(s: &str) -> Result<[String; 4], Failure> {
    let parts: Vec<String> = s.split(',').map(|e| e.trim().to_string()).collect();
    parts
        .try_into()
        .map_err(|_| usage(format!("expected four entries \"a,b,c,d\", got {s:?}")))
}

fn parse_rat_matrix(s: &str) -> Result<RatMatrix2, Failure> {
    let e = parse_matrix(s)?;
    let q = |t: &String| t.parse().map_err(|_| usage(format!("bad rational {t:?}")));
    let g = RatMatrix2::new(q(&e[0])?, q(&e[1])?, q(&e[2])?, q(&e[3])?);
    if g.det().is_zero() {
        return Err(usage(format!("matrix {s:?} is singular")));
    }
    Ok(g)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Reads a fragment, either bare or inside the report envelope written by
/// `axioms build`.
fn read_fragment(path: &Path) -> Result<JFieldFragment, Failure> {
    let text = read_text(path)?;
    let parsed = JFieldFragment::from_json(&text);
    if parsed.is_ok() {
        return parsed.map_err(|e| usage(e.to_string()));
    }
    let inner = serde_json::from_str::<Value>(&text)
        .ok()
        .and_then(|v| v.get("report").filter(|r| r.get("points").is_some()).cloned());
    match inner {
        Some(r) => JFieldFragment::from_json(&r.to_string()).map_err(|e| usage(e.to_string())),
        None => parsed.map_err(|e| usage(e.to_string())),
    }
}

fn load(p: &PresentationArgs) -> Result<Analysis, Failure> {
    Analysis::from_json(&read_text(&p.presentation)?, p.seed).map_err(derivation_failure)
}

fn indices(a: &Analysis, names: &[String]) -> Result<Vec<usize>, Failure> {
    a.presentation.indices(names).map_err(derivation_failure)
}

fn resolve_precision(flag: Option<i64>, env: Option<i64>) -> i64 {
    flag.or(env).unwrap_or(DEFAULT_PRECISION)
}

fn run(command: Command, env_precision: Option<i64>) -> Result<Outcome, Failure> {
    match command {
        Command::Modpoly { action, n } => match (action, n) {
            (Some(ModpolyAction::Verify { n, precision }), _) => {
                let m = resolve_precision(precision, env_precision);
                let phi = build_modular_polynomial(n)?;
                let residual = verify_modular_polynomial(&phi, m);
                let first = residual.first_nonzero().map(|(k, c)| json!({"exponent": k, "coefficient": c}));
                outcome(
                    pass_if(residual.is_zero()),
                    json!({"N": n, "precision": m, "first_nonzero": first}),
                )
            }
            (None, Some(n)) => {
                if n == 0 || n > DEFAULT_MAX_LEVEL {
                    return Err(usage(format!("N must lie in 1..={DEFAULT_MAX_LEVEL}")));
                }
                let phi = build_modular_polynomial(n)?;
                let text = if n == 1 { Some("X - Y") } else { None };
                let mut report = serde_json::to_value(phi.to_record())?;
                report["polynomial"] = json!(text.map(str::to_string).unwrap_or_else(|| phi.poly.to_string()));
                outcome(Status::Pass, report)
            }
            (None, None) => Err(usage("modpoly needs a level N or `verify N`")),
        },
        Command::VerifyOde { precision } => {
            let m = resolve_precision(precision, env_precision);
            let residual = verify_modular_ode(m)?;
            let first = residual.first_nonzero().map(|(k, c)| json!({"exponent": k, "coefficient": c}));
            outcome(
                pass_if(residual.is_zero()),
                json!({"precision": m, "residual_zero": residual.is_zero(), "first_nonzero": first}),
            )
        }
        Command::Eval { tau, derivs, terms, dd } => {
            let z = parse_complex(&tau)?;
            let record = if dd {
                let zz = Complex::new(DD::from_f64(z.re), DD::from_f64(z.im));
                evaluate_jet_dd(zz, terms)?.to_record(derivs as usize)
            } else {
                evaluate_jet(z, terms)?.to_record(derivs as usize)
            };
            let mut report = serde_json::to_value(record)?;
            report["arithmetic"] = json!(if dd { "double-double" } else { "f64" });
            outcome(Status::Pass, report)
        }
        Command::Reduce { tau } => {
            let z = parse_complex(&tau)?;
            let r = reduce_to_fundamental_domain(z)?;
            outcome(
                Status::Pass,
                json!({
                    "tau": {"re": z.re, "im": z.im},
                    "tau0": {"re": r.tau0.re, "im": r.tau0.im},
                    "g": MatrixRecord::from(&r.g.to_rat()),
                    "word": r.word,
                }),
            )
        }
        Command::Orbit { x, y, height, tol } => {
            if let (Ok(zx), Ok(zy)) = (parse_complex(&x), parse_complex(&y)) {
                return match orbit_decide_numeric(zy, zx, height, tol) {
                    NumericOrbitDecision::Dependent(g) => outcome(
                        Status::Pass,
                        json!({"mode": "numeric", "dependent": true, "witness": MatrixRecord::from(&g), "height": height}),
                    ),
                    NumericOrbitDecision::IndependentUpTo(h) => outcome(
                        Status::Unverified,
                        json!({"mode": "numeric", "dependent": null, "independent_up_to_height": h}),
                    ),
                };
            }
            let mut names = identifiers(&x)?;
            names.extend(identifiers(&y)?);
            names.sort();
            names.dedup();
            let vars = vars_of(&names);
            let fx = parse_rational_function(&x, &vars).map_err(|e| usage(e.to_string()))?;
            let fy = parse_rational_function(&y, &vars).map_err(|e| usage(e.to_string()))?;
            let report = match orbit_decide_exact(&fx, &fy)? {
                ExactOrbitDecision::Dependent(g) => {
                    json!({"mode": "exact", "dependent": true, "witness": MatrixRecord::from(&g)})
                }
                ExactOrbitDecision::Independent => json!({"mode": "exact", "dependent": false, "witness": null}),
            };
            outcome(Status::Pass, report)
        }
        Command::Pregeom { action } => match action {
            PregeomAction::Dim { config, points, over } => {
                let cfg: GclConfig = read_json(&config)?;
                let pts: Vec<PointSpec> = read_json(&points)?;
                let base: Vec<PointSpec> = match over {
                    Some(p) => read_json(&p)?,
                    None => Vec::new(),
                };
                outcome(Status::Pass, gcl_dimension(&pts, &base, &cfg)?)
            }
            PregeomAction::Props {
                config,
                presentation,
                seed,
                max_size,
            } => {
                let report = if let Some(path) = presentation {
                    let a = Analysis::from_json(&read_text(&path)?, seed).map_err(derivation_failure)?;
                    let r = pregeometry_property_suite(&JclOracle::all(&a), max_size);
                    let mut v = serde_json::to_value(&r)?;
                    v["oracle"] = json!("jcl");
                    v["seed"] = json!(seed);
                    (r.all_passed(), v)
                } else {
                    let cfg: GclConfig = read_json(&config.expect("clap requires one source"))?;
                    let oracle = GclOracle::from_config(&cfg)?;
                    let r = pregeometry_property_suite(&oracle, max_size);
                    let mut v = serde_json::to_value(&r)?;
                    v["oracle"] = json!("gcl");
                    v["caveat"] = serde_json::to_value(oracle.caveat())?;
                    (r.all_passed(), v)
                };
                outcome(pass_if(report.0), report.1)
            }
        },
        Command::Delta { p, z, over } => {
            let a = load(&p)?;
            let r = delta(&a, &indices(&a, &z)?, &indices(&a, &over)?).map_err(derivation_failure)?;
            outcome(Status::Pass, r)
        }
        Command::XiDim { p, over, tau } => {
            let a = load(&p)?;
            let c = match over {
                Some(names) => indices(&a, &names)?,
                None => a.presentation.constants.clone(),
            };
            let system = match tau {
                Some(names) => Some(corresponding_system(&a, &indices(&a, &names)?, &c).map_err(derivation_failure)?),
                None => None,
            };
            let names: Vec<&str> = c.iter().map(|&i| a.presentation.name(i)).collect();
            outcome(
                Status::Pass,
                json!({
                    "generators": a.presentation.vars.as_slice(),
                    "over": names,
                    "omega_dimension": a.omega_dimension(&c),
                    "xi_dimension": a.xi_dimension(&c),
                    "jacobian_rank": a.jacobian_rank(),
                    "system": system,
                    "seed": a.seed,
                }),
            )
        }
        Command::JclMember { p, element, over } => {
            let a = load(&p)?;
            let x = a.presentation.index(&element).map_err(derivation_failure)?;
            let c = indices(&a, &over)?;
            let support = a
                .finite_support(x, &c)
                .map(|s| s.iter().map(|&i| a.presentation.name(i).to_string()).collect::<Vec<_>>());
            outcome(
                Status::Pass,
                json!({
                    "element": element,
                    "over": over,
                    "member": support.is_some(),
                    "finite_support": support,
                    "seed": a.seed,
                }),
            )
        }
        Command::SchanuelReport { p, z, over } => {
            let a = load(&p)?;
            let c = match over {
                Some(names) => indices(&a, &names)?,
                None => a.presentation.constants.clone(),
            };
            let r = schanuel_report(&a, &indices(&a, &z)?, &c).map_err(derivation_failure)?;
            outcome(pass_if(r.holds), r)
        }
        Command::MainReport { p, tau, z, gs } => {
            let a = load(&p)?;
            let gs: Vec<[String; 4]> = gs.iter().map(|g| parse_matrix(g)).collect::<Result<_, _>>()?;
            match main_inequality_report(&a, &indices(&a, &tau)?, &indices(&a, &z)?, &gs) {
                Ok(r) => outcome(pass_if(r.holds_3nm), r),
                Err(DerivationError::HypothesisUncertified(why)) => outcome(
                    Status::Unverified,
                    json!({"hypothesis": null, "uncertified": why, "seed": a.seed}),
                ),
                Err(e) => Err(derivation_failure(e)),
            }
        }
        Command::EssentialCheck { p, z, bound } => {
            let a = load(&p)?;
            let r = essential_candidate_check(&a, &indices(&a, &z)?, bound).map_err(derivation_failure)?;
            let status = match r {
                EssentialOutcome::NotEssential { .. } => Status::Pass,
                EssentialOutcome::CandidateUpTo { .. } => Status::Unverified,
            };
            let mut v = serde_json::to_value(&r)?;
            v["seed"] = json!(a.seed);
            outcome(status, v)
        }
        Command::Axioms { action } => match action {
            AxiomsAction::Check { fragment, height, tol } => {
                let f = read_fragment(&fragment)?;
                let cfg = AxiomConfig {
                    height,
                    tolerance: tol,
                    ..AxiomConfig::default()
                };
                let r = check_axioms(&f, &cfg);
                outcome(r.overall(), r)
            }
            AxiomsAction::Build { taus, gs, terms } => {
                let taus: Vec<Complex64> = taus.iter().map(|t| parse_complex(t)).collect::<Result<_, _>>()?;
                let gs: Vec<RatMatrix2> = gs.iter().map(|g| parse_rat_matrix(g)).collect::<Result<_, _>>()?;
                outcome(Status::Pass, fragment_from_evaluator(&taus, &gs, terms)?)
            }
        },
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Unverified => "UNVERIFIED",
    }
}

fn exit_code(s: Status) -> u8 {
    match s {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Unverified => 3,
    }
}

fn main() -> ExitCode {
    let raw_env = std::env::var(PRECISION_ENV).ok();
    let cli = Cli::parse();
    let env_precision = match raw_env.as_deref().map(str::parse::<i64>) {
        None => None,
        Some(Ok(m)) => Some(m),
        Some(Err(_)) => {
            eprintln!("error: {PRECISION_ENV} must be an integer");
            return ExitCode::from(2);
        }
    };
    let result = run(cli.command, env_precision);
    let (status, report) = match result {
        Ok(o) => (o.status, o.report),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            (Status::Fail, json!({"error": msg}))
        }
    };
    let doc = json!({
        "status": status_name(status),
        "env": {PRECISION_ENV: raw_env},
        "report": report,
    });
    let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(exit_code(status))
}
