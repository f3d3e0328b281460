use std::path::{Path, PathBuf};

use krange::dbr::{shmulyan_gamma_with, ShmulyanVerdict};
use krange::generators::{
    bidisk_triplet, corona_screen, corona_triplet, poly_add, poly_mul, random_tuple,
    toeplitz_analytic,
};
use krange::krein::check_lemma_bound;
use krange::localstruct::{restricted_operator_norm, verify_norm_equality};
use krange::numerics::norm;
use krange::solver::{convergence_sweep, geometric_schedule, solve_eps, solve_exact};
use krange::tuples::{isometry_check, ttilde_properties, validate_with};
use krange::{Error, Report, Signature, Tolerances, Tuple, ValidationReport, ValidityLevel, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::format::{
    emit, format_float, pairs, read_tuple_file, read_vector, to_json_bytes, Pair, TupleFile,
};
use crate::tol::TolView;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Probes used by the Shmul'yan witness attached to range failures.
const WITNESS_PROBES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Failed
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Serialize)]
struct Header<'a> {
    version: &'static str,
    command: &'static str,
    tolerances: TolView<'a>,
}

fn header<'a>(command: &'static str, tol: &'a Tolerances) -> Header<'a> {
    Header {
        version: VERSION,
        command,
        tolerances: TolView(tol),
    }
}

#[derive(Serialize)]
struct Failure<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    status: &'static str,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    witnesses: Vec<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessView>,
}

#[derive(Serialize)]
struct WitnessView {
    seed: u64,
    y: Vec<Pair>,
    inner_with_target: f64,
    adjoint_norm: f64,
    ratios: Vec<(f64, f64)>,
}

fn fail(out: Option<&Path>, failure: &Failure) -> Result<Status, CliError> {
    emit(out, &to_json_bytes(failure))?;
    Ok(Status::Failed)
}

fn plain_failure<'a>(command: &'static str, tol: &'a Tolerances, err: &Error) -> Failure<'a> {
    Failure {
        header: header(command, tol),
        status: "error",
        error: err.to_string(),
        level: None,
        witnesses: Vec::new(),
        witness: None,
    }
}

/// Loads a tuple file. Parse problems are `Err`; a tuple that fails
/// validation is `Ok(Err(report))` so the caller can emit a witness.
fn load_tuple(
    path: &Path,
    tol: &Tolerances,
) -> Result<std::result::Result<Tuple, ValidationReport<f64>>, CliError> {
    let file = read_tuple_file(path)?;
    let (ops, signature) = file.to_parts()?;
    let report = validate_with(&ops, &signature, tol)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if report.level == ValidityLevel::Invalid {
        return Ok(Err(report));
    }
    Tuple::with_tolerances(ops, signature, *tol)
        .map(Ok)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn invalid_failure<'a>(
    command: &'static str,
    tol: &'a Tolerances,
    report: &ValidationReport<f64>,
) -> Failure<'a> {
    Failure {
        header: header(command, tol),
        status: "invalid_tuple",
        error: format!("defect has eigenvalue {} below zero", report.min_eig_d),
        level: Some(report.level.as_str()),
        witnesses: report.witnesses.iter().map(|w| pairs(w)).collect(),
        witness: None,
    }
}

/// Failure report for targets outside ran T, carrying the Shmul'yan witness.
fn range_failure<'a>(
    command: &'static str,
    tol: &'a Tolerances,
    t: &Tuple,
    u: &[C64],
    err: &Error,
    seed: u64,
) -> Failure<'a> {
    let witness = match shmulyan_gamma_with(t.defect_sqrt(), u, WITNESS_PROBES, &mut rng(seed), tol)
    {
        Ok(ShmulyanVerdict::NotInRange(w)) => Some(WitnessView {
            seed,
            y: pairs(&w.y),
            inner_with_target: w.inner_with_target,
            adjoint_norm: w.adjoint_norm,
            ratios: w.ratios,
        }),
        _ => None,
    };
    Failure {
        header: header(command, tol),
        status: "not_in_range",
        error: err.to_string(),
        level: None,
        witnesses: Vec::new(),
        witness,
    }
}

fn is_range_error(e: &Error) -> bool {
    matches!(e, Error::NotInRange { .. } | Error::ZeroDefect)
}

fn require_positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{name} must be a positive finite number, got {x}"
        )))
    }
}

// ---------------------------------------------------------------- check

pub struct CheckArgs {
    pub tuple: PathBuf,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    seed: u64,
    samples: usize,
    dim: usize,
    signature: Vec<i64>,
    level: &'static str,
    min_eig_d: f64,
    max_eig_d: f64,
    witnesses: Vec<Vec<Pair>>,
    isometry_max_deviation: f64,
    isometry_ok: bool,
    range_structure: RangeStructure,
    passed: bool,
}

#[derive(Serialize)]
struct RangeStructure {
    l_dim: usize,
    injective: bool,
    image_rank: usize,
    range_residual: f64,
    extension_gap: f64,
    vacuous: bool,
    passed: bool,
}

pub fn check(args: &CheckArgs, tol: &Tolerances) -> Result<Status, CliError> {
    let out = args.out.as_deref();
    let t = match load_tuple(&args.tuple, tol)? {
        Ok(t) => t,
        Err(report) => return fail(out, &invalid_failure("check", tol, &report)),
    };
    let iso = isometry_check(&t, args.samples, &mut rng(args.seed));
    let props = match ttilde_properties(&t) {
        Ok(p) => p,
        Err(e) => return fail(out, &plain_failure("check", tol, &e)),
    };
    let v = t.validation();
    let isometry_ok = iso <= tol.isometry;
    let passed = isometry_ok && props.passed;
    let report = CheckReport {
        header: header("check", tol),
        seed: args.seed,
        samples: args.samples,
        dim: t.dim(),
        signature: t.signature().as_ints(),
        level: v.level.as_str(),
        min_eig_d: v.min_eig_d,
        max_eig_d: v.max_eig_d,
        witnesses: v.witnesses.iter().map(|w| pairs(w)).collect(),
        isometry_max_deviation: iso,
        isometry_ok,
        range_structure: RangeStructure {
            l_dim: props.l_dim,
            injective: props.injective,
            image_rank: props.image_rank,
            range_residual: props.range_residual,
            extension_gap: props.extension_gap,
            vacuous: props.vacuous,
            passed: props.passed,
        },
        passed,
    };
    emit(out, &to_json_bytes(&report))?;
    Ok(Status::from_bool(passed))
}

// ---------------------------------------------------------------- solve

pub struct SolveArgs {
    pub tuple: PathBuf,
    pub u: PathBuf,
    pub eps: Option<f64>,
    pub exact: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct KreinView {
    signature: Vec<i64>,
    blocks: Vec<Vec<Pair>>,
}

#[derive(Serialize)]
struct SolveView<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    mode: &'static str,
    eps: f64,
    residual: f64,
    krein_norm_sq: f64,
    target_norm_sq: f64,
    x_eps_norm_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    equality_ok: Option<bool>,
    z: KreinView,
    x_eps: Vec<Pair>,
}

pub fn solve(args: &SolveArgs, tol: &Tolerances) -> Result<Status, CliError> {
    let out = args.out.as_deref();
    let t = match load_tuple(&args.tuple, tol)? {
        Ok(t) => t,
        Err(report) => return fail(out, &invalid_failure("solve", tol, &report)),
    };
    let u = read_vector(&args.u, t.dim())?;
    let result = match (args.exact, args.eps) {
        (true, None) => solve_exact(&t, &u),
        (false, Some(eps)) => {
            require_positive("--eps", eps)?;
            solve_eps(&t, &u, eps)
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --eps and --exact is required".into(),
            ))
        }
    };
    let r: Report = match result {
        Ok(r) => r,
        Err(e) if is_range_error(&e) => {
            return fail(out, &range_failure("solve", tol, &t, &u, &e, args.seed))
        }
        Err(e) => return fail(out, &plain_failure("solve", tol, &e)),
    };
    let equality_ok = args.exact.then(|| {
        r.residual <= tol.residual * norm(&u).max(1.0)
            && (r.krein_norm_sq - r.target_norm_sq).abs() <= tol.norm
    });
    let view = SolveView {
        header: header("solve", tol),
        mode: if args.exact { "exact" } else { "eps" },
        eps: r.eps,
        residual: r.residual,
        krein_norm_sq: r.krein_norm_sq,
        target_norm_sq: r.target_norm_sq,
        x_eps_norm_sq: r.x_eps_norm_sq,
        equality_ok,
        z: KreinView {
            signature: r.z.signature().as_ints(),
            blocks: r.z.blocks().iter().map(|b| pairs(b)).collect(),
        },
        x_eps: pairs(&r.x_eps),
    };
    emit(out, &to_json_bytes(&view))?;
    Ok(Status::from_bool(equality_ok.unwrap_or(true)))
}

// ---------------------------------------------------------------- sweep

pub struct SweepArgs {
    pub tuple: PathBuf,
    pub u: PathBuf,
    pub eps_grid: String,
    pub seed: u64,
    pub csv: Option<PathBuf>,
}

/// `geometric:start,ratio,count` or `list:e1,e2,...`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("--eps-grid `{spec}`: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected kind:values"))?;
    let numbers = |s: &str| -> Result<Vec<f64>, CliError> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("`{x}` is not a number")))
            })
            .collect()
    };
    let grid = match kind {
        "geometric" => {
            let parts: Vec<&str> = rest.split(',').collect();
            let [start, ratio, count] = parts.as_slice() else {
                return Err(bad("geometric grids take start,ratio,count"));
            };
            let start: f64 = start
                .trim()
                .parse()
                .map_err(|_| bad("start is not a number"))?;
            let ratio: f64 = ratio
                .trim()
                .parse()
                .map_err(|_| bad("ratio is not a number"))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| bad("count is not an integer"))?;
            if !(start.is_finite() && start > 0.0) {
                return Err(bad("start must be positive"));
            }
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(bad("ratio must lie in (0, 1)"));
            }
            if count == 0 {
                return Err(bad("count must be at least 1"));
            }
            geometric_schedule(start, ratio, count)
        }
        "list" => numbers(rest)?,
        _ => return Err(bad("unknown grid kind")),
    };
    if grid.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(bad("every eps must be positive"));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(bad("eps values must be strictly decreasing"));
    }
    Ok(grid)
}

pub const CSV_HEADER: &str = "eps,residual,krein_norm_sq,target_norm_sq,monotone_ok";

pub fn sweep_csv(reports: &[Report], flags: &[bool]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (r, ok) in reports.iter().zip(flags) {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float(r.eps),
            format_float(r.residual),
            format_float(r.krein_norm_sq),
            format_float(r.target_norm_sq),
            ok
        ));
    }
    s
}

pub fn sweep(args: &SweepArgs, tol: &Tolerances) -> Result<Status, CliError> {
    let grid = parse_grid(&args.eps_grid)?;
    let t = match load_tuple(&args.tuple, tol)? {
        Ok(t) => t,
        Err(report) => return fail(None, &invalid_failure("sweep", tol, &report)),
    };
    let u = read_vector(&args.u, t.dim())?;
    let s = match convergence_sweep(&t, &u, &grid) {
        Ok(s) => s,
        Err(e) if is_range_error(&e) => {
            return fail(None, &range_failure("sweep", tol, &t, &u, &e, args.seed))
        }
        Err(e) => return fail(None, &plain_failure("sweep", tol, &e)),
    };
    let flags = s.monotone_flags(tol.monotone);
    emit(
        args.csv.as_deref(),
        sweep_csv(&s.reports, &flags).as_bytes(),
    )?;
    Ok(Status::from_bool(s.monotone_ok && s.final_equality_ok))
}

// ---------------------------------------------------------------- generate

pub enum GenerateKind {
    Bidisk {
        n: usize,
    },
    Corona {
        phi1: Vec<C64>,
        phi2: Vec<C64>,
        psi1: Vec<C64>,
        psi2: Vec<C64>,
        n: usize,
    },
    Random {
        positives: usize,
        negatives: usize,
        dim: usize,
        seed: u64,
        margin: f64,
    },
}

/// Comma-separated coefficients, each `re` or `re:im`. Empty means the zero symbol.
pub fn parse_coeffs(text: &str) -> Result<Vec<C64>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (re, im) = item.split_once(':').unwrap_or((item, "0"));
            match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Ok(C64::new(a, b)),
                _ => Err(CliError::Usage(format!("bad coefficient `{item}`"))),
            }
        })
        .collect()
}

pub fn generate(
    kind: &GenerateKind,
    out: Option<&Path>,
    tol: &Tolerances,
) -> Result<Status, CliError> {
    let bad = |e: Error| CliError::Usage(e.to_string());
    let (tuple, meta) = match *kind {
        GenerateKind::Bidisk { n } => {
            let t = bidisk_triplet::<f64>(n).map_err(bad)?;
            (t, json!({"kind": "bidisk", "n": n, "version": VERSION}))
        }
        GenerateKind::Random {
            positives,
            negatives,
            dim,
            seed,
            margin,
        } => {
            let t = random_tuple::<f64>(positives, negatives, dim, seed, margin).map_err(bad)?;
            let meta = json!({
                "kind": "random",
                "positives": positives,
                "negatives": negatives,
                "dim": dim,
                "seed": seed,
                "margin": margin,
                "version": VERSION,
            });
            (t, meta)
        }
        GenerateKind::Corona {
            ref phi1,
            ref phi2,
            ref psi1,
            ref psi2,
            n,
        } => {
            if n == 0 {
                return Err(CliError::Usage("truncation size must be at least 1".into()));
            }
            for w in corona_screen(phi1, phi2, psi1, psi2).warnings {
                eprintln!("warning: {w}");
            }
            let meta = json!({
                "kind": "corona",
                "n": n,
                "phi1": pairs(phi1),
                "phi2": pairs(phi2),
                "psi1": pairs(psi1),
                "psi2": pairs(psi2),
                "version": VERSION,
            });
            match corona_triplet(phi1, phi2, psi1, psi2, n) {
                Ok(c) => (c.tuple, meta),
                Err(e @ Error::InvalidTuple { .. }) => {
                    let phi3 = poly_add(&poly_mul(phi1, psi1), &poly_mul(phi2, psi2));
                    let ops = vec![
                        toeplitz_analytic(phi1, n),
                        toeplitz_analytic(phi2, n),
                        toeplitz_analytic(&phi3, n),
                    ];
                    let mut failure = plain_failure("generate", tol, &e);
                    failure.status = "invalid_tuple";
                    if let Ok(report) = validate_with(&ops, &Signature::triplet(), tol) {
                        failure.level = Some(report.level.as_str());
                        failure.witnesses = report.witnesses.iter().map(|w| pairs(w)).collect();
                    }
                    eprintln!("error: {e}");
                    emit(None, &to_json_bytes(&failure))?;
                    return Ok(Status::Failed);
                }
                Err(e) => return Err(bad(e)),
            }
        }
    };
    emit(
        out,
        &to_json_bytes(&TupleFile::from_tuple(&tuple, Some(meta))),
    )?;
    Ok(Status::Ok)
}

// ---------------------------------------------------------------- verify

pub struct VerifyArgs {
    pub tuple: PathBuf,
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct NormEqualityView {
    max_deviation: f64,
    embedding_ok: bool,
    reverse_ok: bool,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    seed: u64,
    samples: usize,
    eps: f64,
    vacuous: bool,
    subspace_dim: usize,
    delta_star: Option<f64>,
    lemma_bound: f64,
    lemma_ok: bool,
    restricted_operator_norm: Option<f64>,
    norm_equality: Option<NormEqualityView>,
    passed: bool,
}

pub fn verify(args: &VerifyArgs, tol: &Tolerances) -> Result<Status, CliError> {
    let out = args.out.as_deref();
    require_positive("--eps", args.eps)?;
    let t = match load_tuple(&args.tuple, tol)? {
        Ok(t) => t,
        Err(report) => return fail(out, &invalid_failure("verify", tol, &report)),
    };
    let lemma = match check_lemma_bound(&t, args.eps) {
        Ok(l) => l,
        Err(e) => return fail(out, &plain_failure("verify", tol, &e)),
    };
    let (op_norm, equality) = if lemma.vacuous {
        (None, None)
    } else {
        let op = match restricted_operator_norm(&t, args.eps) {
            Ok(x) => x,
            Err(e) => return fail(out, &plain_failure("verify", tol, &e)),
        };
        let eq = match verify_norm_equality(&t, args.eps, args.samples, &mut rng(args.seed)) {
            Ok(r) => r,
            Err(e) => return fail(out, &plain_failure("verify", tol, &e)),
        };
        (
            Some(op),
            Some(NormEqualityView {
                max_deviation: eq.max_deviation,
                embedding_ok: eq.embedding_ok,
                reverse_ok: eq.reverse_ok,
                passed: eq.passed,
            }),
        )
    };
    let passed = lemma.passed && equality.as_ref().is_none_or(|e| e.passed);
    let report = VerifyReport {
        header: header("verify", tol),
        seed: args.seed,
        samples: args.samples,
        eps: args.eps,
        vacuous: lemma.vacuous,
        subspace_dim: lemma.subspace_dim,
        delta_star: lemma.delta_star,
        lemma_bound: lemma.bound,
        lemma_ok: lemma.passed,
        restricted_operator_norm: op_norm,
        norm_equality: equality,
        passed,
    };
    emit(out, &to_json_bytes(&report))?;
    Ok(Status::from_bool(passed))
}
