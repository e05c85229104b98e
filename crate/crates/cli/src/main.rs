//! Command-line harness over the verification library.
//!
//! Every command renders to CSV or structured text, writes to stdout or a
//! file, and is deterministic: identical flags produce byte-identical
//! output. Exit status: 0 all checks passed, 1 at least one check failed,
//! 2 usage or parameter or I/O error, 3 numerical non-convergence.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psibound::bounds::{self, BoundParams, BoundReport, OrderSummary, VerifyOptions};
use psibound::psi_core::{self, PsiSpec};
use psibound::tol;
use psibound::Error as CoreError;
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "psibound",
    version,
    about = "Weight characteristics, truncated kernels, extremal profiles, and two-sided approximation-bound verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Half-value point, gap, and ratio per index, with family thresholds
    Characteristics(CharacteristicsArgs),
    /// Sampled shape classification of the weight (informational, exits 0)
    Classify(ClassifyArgs),
    /// Scaled kernel norm (1/pi)*L_p with its certified truncation degree
    KernelNorm(KernelNormArgs),
    /// Extremal profile samples (or coefficients) for external plotting
    Extremal(ExtremalArgs),
    /// Uniform-error sandwich per (n, p, beta)
    VerifyThm1(VerifyThm1Args),
    /// Integral-error sandwich per (n, s, beta)
    VerifyThm2(VerifyThm2Args),
    /// Family-threshold uniform sweep with an order-band summary
    VerifyCor1(VerifyCor1Args),
    /// Family-threshold integral sweep with an order-band summary
    VerifyCor2(VerifyCor2Args),
    /// Hypothesis lemma reports per (n, beta)
    VerifyLemmas(VerifyLemmasArgs),
    /// Full per-index surface: lemmas, both sandwiches, duality, sup check
    Sweep(SweepArgs),
}

#[derive(Args)]
struct FamilyOpts {
    /// Exponential-family coefficient; the literal `ln2` is exact
    #[arg(long, default_value = "ln2")]
    alpha: String,
    /// Exponential-family power, in (0, 1)
    #[arg(long, default_value = "0.5")]
    r: String,
}

#[derive(Args)]
struct EmitOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ToleranceOpts {
    /// Relative slack for bound comparisons
    #[arg(long, default_value_t = tol::SLACK)]
    slack: f64,
    /// Relative kernel truncation tolerance
    #[arg(long, default_value_t = tol::KERNEL_TOL_REL)]
    kernel_tol: f64,
}

#[derive(Args)]
struct JobOpts {
    /// Worker threads for sweeps; defaults to PSIBOUND_JOBS, then all cores
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct CharacteristicsArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list: `25`, `21..49`, `21,25,30`
    #[arg(long)]
    n: String,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Upper end of the sampling grid
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    /// Sample count (at least 8)
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct KernelNormArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Norm indices; accepts `inf` and fractions like `4/3`
    #[arg(long, default_value = "inf")]
    p: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    jobs: JobOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct ExtremalArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Norm indices setting the scale factor; accepts `inf`
    #[arg(long, default_value = "1")]
    p: String,
    /// Sample count on [-pi, pi); 0 emits coefficients instead
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct VerifyThm1Args {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Uniform-norm exponents, 1 <= p < inf
    #[arg(long, default_value = "1")]
    p: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    /// Use the family-wide thresholds instead of per-index hypotheses
    #[arg(long)]
    uniform_ab: bool,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    jobs: JobOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct VerifyThm2Args {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Integral-norm exponents, 1 < s <= inf
    #[arg(long, default_value = "2")]
    s: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    /// Use the family-wide thresholds instead of per-index hypotheses
    #[arg(long)]
    uniform_ab: bool,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    jobs: JobOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct VerifyCor1Args {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list (clipped below the family n_min)
    #[arg(long)]
    n: String,
    /// Uniform-norm exponents, 1 <= p < inf
    #[arg(long, default_value = "1")]
    p: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct VerifyCor2Args {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list (clipped below the family n_min)
    #[arg(long)]
    n: String,
    /// Integral-norm exponents, 1 < s <= inf
    #[arg(long, default_value = "2")]
    s: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct VerifyLemmasArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    /// Use the family-wide thresholds instead of per-index hypotheses
    #[arg(long)]
    uniform_ab: bool,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    jobs: JobOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Index, inclusive range, or list
    #[arg(long)]
    n: String,
    /// Uniform-norm exponents, 1 <= p < inf
    #[arg(long, default_value = "1")]
    p: String,
    /// Integral-norm exponents, 1 < s <= inf
    #[arg(long, default_value = "2")]
    s: String,
    /// Phase list
    #[arg(long, default_value = "0")]
    beta: String,
    /// Use the family-wide thresholds instead of per-index hypotheses
    #[arg(long)]
    uniform_ab: bool,
    #[command(flatten)]
    tolerances: ToleranceOpts,
    #[command(flatten)]
    jobs: JobOpts,
    #[command(flatten)]
    emit: EmitOpts,
}

enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Core(CoreError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => 2,
            CliError::Core(CoreError::Convergence(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

fn bad(field: &str, token: &str) -> CliError {
    CliError::Usage(format!("{field}: cannot parse {token:?}"))
}

/// Scalar token: plain float, `ln2`, `inf`, or a fraction `num/den`.
fn parse_scalar(field: &str, token: &str) -> Result<f64, CliError> {
    let t = token.trim();
    let v = match t {
        "ln2" => LN_2,
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => {
            if let Some((num, den)) = t.split_once('/') {
                let n: f64 = num.trim().parse().map_err(|_| bad(field, token))?;
                let d: f64 = den.trim().parse().map_err(|_| bad(field, token))?;
                n / d
            } else {
                t.parse().map_err(|_| bad(field, token))?
            }
        }
    };
    if v.is_nan() {
        return Err(bad(field, token));
    }
    Ok(v)
}

fn parse_list(field: &str, tokens: &str) -> Result<Vec<f64>, CliError> {
    let vals: Vec<f64> = tokens
        .split(',')
        .map(|t| parse_scalar(field, t))
        .collect::<Result<_, _>>()?;
    if vals.is_empty() {
        return Err(CliError::Usage(format!("{field}: empty list")));
    }
    Ok(vals)
}

/// Index set: `25`, an inclusive range `21..49` (or `21..=49`), or a comma
/// list `21,25,30`.
fn parse_ns(field: &str, tokens: &str) -> Result<Vec<u32>, CliError> {
    let t = tokens.trim();
    let ns: Vec<u32> = if let Some((lo, hi)) = t.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u32 = lo.trim().parse().map_err(|_| bad(field, tokens))?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad(field, tokens))?;
        if lo > hi {
            return Err(CliError::Usage(format!("{field}: empty range {lo}..{hi}")));
        }
        (lo..=hi).collect()
    } else {
        t.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad(field, tokens)))
            .collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Usage(format!(
            "{field}: indices must be nonempty and start at 1"
        )));
    }
    Ok(ns)
}

impl FamilyOpts {
    fn parse(&self) -> Result<(f64, f64, PsiSpec), CliError> {
        let alpha = parse_scalar("--alpha", &self.alpha)?;
        let r = parse_scalar("--r", &self.r)?;
        let spec = PsiSpec::exponential(alpha, r)?;
        Ok((alpha, r, spec))
    }
}

impl ToleranceOpts {
    fn options(&self) -> Result<VerifyOptions, CliError> {
        if !(self.slack > 0.0 && self.slack.is_finite()) {
            return Err(CliError::Usage(format!(
                "--slack: must be a positive finite number, got {}",
                self.slack
            )));
        }
        if !(self.kernel_tol > 0.0 && self.kernel_tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--kernel-tol: must be a positive finite number, got {}",
                self.kernel_tol
            )));
        }
        Ok(VerifyOptions {
            slack: self.slack,
            kernel_tol_rel: self.kernel_tol,
        })
    }
}

impl JobOpts {
    /// Runs `f` inside a dedicated thread pool sized by --jobs, then the
    /// PSIBOUND_JOBS environment variable, then the core count.
    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
        let n = self
            .jobs
            .or_else(|| {
                std::env::var("PSIBOUND_JOBS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
        Ok(pool.install(f))
    }
}

impl EmitOpts {
    fn write(&self, body: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(path.clone(), e)),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

fn fmt(x: f64) -> String {
    bounds::fmt_float(x)
}

/// Parameter constructors: per-index hypotheses by default, family-wide
/// thresholds under --uniform-ab.
fn thm1_params(
    spec: &PsiSpec,
    alpha: f64,
    r: f64,
    n: u32,
    beta: f64,
    p: f64,
    uniform_ab: bool,
) -> Result<BoundParams, CoreError> {
    if uniform_ab {
        let th = psi_core::exp_family_thresholds(alpha, r)?;
        BoundParams::with_hypotheses(spec.clone(), n, beta, p, th.a, th.b)
    } else {
        BoundParams::theorem1(spec.clone(), n, beta, p)
    }
}

fn thm2_params(
    spec: &PsiSpec,
    alpha: f64,
    r: f64,
    n: u32,
    beta: f64,
    s: f64,
    uniform_ab: bool,
) -> Result<BoundParams, CoreError> {
    if uniform_ab {
        let th = psi_core::exp_family_thresholds(alpha, r)?;
        BoundParams::with_hypotheses(spec.clone(), n, beta, s, th.a, th.b)
    } else {
        BoundParams::theorem2(spec.clone(), n, beta, s)
    }
}

fn sup_params(
    spec: &PsiSpec,
    alpha: f64,
    r: f64,
    n: u32,
    beta: f64,
    uniform_ab: bool,
) -> Result<BoundParams, CoreError> {
    if uniform_ab {
        let th = psi_core::exp_family_thresholds(alpha, r)?;
        BoundParams::with_hypotheses(spec.clone(), n, beta, f64::INFINITY, th.a, th.b)
    } else {
        BoundParams::uniform_extension(spec.clone(), n, beta)
    }
}

fn render_reports(format: Format, rows: &[BoundReport]) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from(BoundReport::csv_header());
            s.push('\n');
            for r in rows {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        Format::Text => rows
            .iter()
            .map(BoundReport::text_block)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn all_passed(rows: &[BoundReport]) -> bool {
    rows.iter().all(|r| r.passed)
}

fn run_characteristics(args: &CharacteristicsArgs) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let th = psi_core::exp_family_thresholds(alpha, r)?;
    let mut body = String::new();
    if args.emit.format == Format::Csv {
        body.push_str("alpha,r,n,eta,gap,mu,a,b,n_min\n");
    }
    for &n in &ns {
        let ch = spec.characteristics(f64::from(n))?;
        match args.emit.format {
            Format::Csv => {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{},{},{}",
                    fmt(alpha),
                    fmt(r),
                    n,
                    fmt(ch.eta),
                    fmt(ch.eta_minus_t),
                    fmt(ch.mu),
                    fmt(th.a),
                    fmt(th.b),
                    th.n_min
                );
            }
            Format::Text => {
                let _ = writeln!(
                    body,
                    "n = {n}: eta = {}, gap = {}, mu = {} (a = {}, b = {}, n_min = {})",
                    ch.eta, ch.eta_minus_t, ch.mu, th.a, th.b, th.n_min
                );
            }
        }
    }
    args.emit.write(&body)?;
    Ok(true)
}

fn run_classify(args: &ClassifyArgs) -> Result<bool, CliError> {
    let (_, _, spec) = args.family.parse()?;
    if !(args.t_max > 1.0 && args.t_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t-max: must be a finite number above 1, got {}",
            args.t_max
        )));
    }
    if args.samples < 8 {
        return Err(CliError::Usage(format!(
            "--samples: need at least 8, got {}",
            args.samples
        )));
    }
    let m = args.samples;
    let grid: Vec<f64> = (0..m)
        .map(|i| (args.t_max.ln() * i as f64 / (m - 1) as f64).exp())
        .collect();
    let rep = spec.classify(&grid)?;
    let checks = [
        ("membership", rep.in_m),
        ("ratio-increasing", rep.mu_increasing),
        ("gap-bounded-above", rep.gap_bounded_above),
        ("gap-bounded-below", rep.gap_bounded_below),
    ];
    let mut body = String::new();
    match args.emit.format {
        Format::Csv => {
            body.push_str("record,holds,detail\n");
            for (name, ok) in checks {
                let _ = writeln!(body, "{name},{ok},");
            }
            for w in &rep.witnesses {
                let _ = writeln!(body, "witness,,{}", w.replace(',', ";"));
            }
        }
        Format::Text => {
            for (name, ok) in checks {
                let _ = writeln!(body, "{name}: {}", if ok { "holds" } else { "fails" });
            }
            for w in &rep.witnesses {
                let _ = writeln!(body, "  witness: {w}");
            }
        }
    }
    args.emit.write(&body)?;
    // sampled heuristics carry witnesses, not verdicts
    Ok(true)
}

fn run_kernel_norm(args: &KernelNormArgs) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ps = parse_list("--p", &args.p)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    let mut cases = Vec::new();
    for &n in &ns {
        for &beta in &betas {
            for &p in &ps {
                cases.push((n, beta, p));
            }
        }
    }
    let rows: Vec<(u32, f64, f64, f64, usize)> = args.jobs.run(|| {
        cases
            .par_iter()
            .map(|&(n, beta, p)| {
                let params = BoundParams::uniform_extension(spec.clone(), n, beta)?;
                let (norm, deg) = bounds::kernel_norm_over_pi(&params, p, &opts)?;
                Ok((n, beta, p, norm, deg))
            })
            .collect::<Result<_, CoreError>>()
    })??;
    let mut body = String::new();
    if args.emit.format == Format::Csv {
        body.push_str("alpha,r,n,beta,index,norm_over_pi,truncation_degree\n");
    }
    for (n, beta, p, norm, deg) in rows {
        match args.emit.format {
            Format::Csv => {
                let _ = writeln!(
                    body,
                    "{},{},{n},{},{},{},{deg}",
                    fmt(alpha),
                    fmt(r),
                    fmt(beta),
                    fmt(p),
                    fmt(norm)
                );
            }
            Format::Text => {
                let _ = writeln!(
                    body,
                    "kernel n = {n}, beta = {beta}, index = {p}: norm/pi = {}, truncated at degree {deg}",
                    fmt(norm)
                );
            }
        }
    }
    args.emit.write(&body)?;
    Ok(true)
}

fn run_extremal(args: &ExtremalArgs) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ps = parse_list("--p", &args.p)?;
    let mut body = String::new();
    if args.emit.format == Format::Csv {
        if args.samples > 0 {
            body.push_str("alpha,r,n,p,t,value\n");
        } else {
            body.push_str("alpha,r,n,p,k,cos_coeff,sin_coeff\n");
        }
    }
    for &n in &ns {
        for &p in &ps {
            let params = if p.is_infinite() {
                BoundParams::uniform_extension(spec.clone(), n, 0.0)?
            } else {
                BoundParams::theorem1(spec.clone(), n, 0.0, p)?
            };
            let f = bounds::build_extremal(&params)?;
            if args.samples > 0 {
                let m = args.samples;
                for j in 0..m {
                    let t =
                        -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    match args.emit.format {
                        Format::Csv => {
                            let _ = writeln!(
                                body,
                                "{},{},{n},{},{},{}",
                                fmt(alpha),
                                fmt(r),
                                fmt(p),
                                fmt(t),
                                fmt(f.eval(t))
                            );
                        }
                        Format::Text => {
                            let _ = writeln!(body, "n = {n}, p = {p}, t = {t}: {}", f.eval(t));
                        }
                    }
                }
            } else {
                for k in 0..=f.degree() {
                    let (ck, sk) = if k == 0 {
                        (f.a0_half(), 0.0)
                    } else {
                        f.coeff(k)
                    };
                    match args.emit.format {
                        Format::Csv => {
                            let _ = writeln!(
                                body,
                                "{},{},{n},{},{k},{},{}",
                                fmt(alpha),
                                fmt(r),
                                fmt(p),
                                fmt(ck),
                                fmt(sk)
                            );
                        }
                        Format::Text => {
                            let _ =
                                writeln!(body, "n = {n}, p = {p}, k = {k}: cos = {ck}, sin = {sk}");
                        }
                    }
                }
            }
        }
    }
    args.emit.write(&body)?;
    Ok(true)
}

fn run_verify_thm1(args: &VerifyThm1Args) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ps = parse_list("--p", &args.p)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    for &p in &ps {
        if p.is_infinite() {
            return Err(CliError::Usage(
                "--p: the uniform sandwich needs 1 <= p < inf (the sup-norm lower check runs under `sweep`)"
                    .into(),
            ));
        }
    }
    let mut cases = Vec::new();
    for &n in &ns {
        for &p in &ps {
            for &beta in &betas {
                cases.push((n, p, beta));
            }
        }
    }
    let rows: Vec<BoundReport> = args.jobs.run(|| {
        cases
            .par_iter()
            .map(|&(n, p, beta)| {
                let params = thm1_params(&spec, alpha, r, n, beta, p, args.uniform_ab)?;
                bounds::verify_theorem1(&params, &opts)
            })
            .collect::<Result<_, CoreError>>()
    })??;
    let ok = all_passed(&rows);
    args.emit.write(&render_reports(args.emit.format, &rows))?;
    Ok(ok)
}

fn run_verify_thm2(args: &VerifyThm2Args) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ss = parse_list("--s", &args.s)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    let mut cases = Vec::new();
    for &n in &ns {
        for &s in &ss {
            for &beta in &betas {
                cases.push((n, s, beta));
            }
        }
    }
    let rows: Vec<BoundReport> = args.jobs.run(|| {
        cases
            .par_iter()
            .map(|&(n, s, beta)| {
                let params = thm2_params(&spec, alpha, r, n, beta, s, args.uniform_ab)?;
                bounds::verify_theorem2(&params, &opts)
            })
            .collect::<Result<_, CoreError>>()
    })??;
    let ok = all_passed(&rows);
    args.emit.write(&render_reports(args.emit.format, &rows))?;
    Ok(ok)
}

fn summary_line(format: Format, label: &str, exponent: f64, beta: f64, s: &OrderSummary) -> String {
    match format {
        Format::Csv => format!(
            "# {label} exponent = {}, beta = {}: min_ratio = {}, max_ratio = {}, band = {}\n",
            fmt(exponent),
            fmt(beta),
            fmt(s.min_ratio),
            fmt(s.max_ratio),
            fmt(s.band)
        ),
        Format::Text => format!(
            "{label} order band [exponent = {}, beta = {}]\n  min ratio = {}\n  max ratio = {}\n  band      = {}\n",
            exponent,
            beta,
            fmt(s.min_ratio),
            fmt(s.max_ratio),
            fmt(s.band)
        ),
    }
}

fn run_verify_cor1(args: &VerifyCor1Args) -> Result<bool, CliError> {
    let (alpha, r, _) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ps = parse_list("--p", &args.p)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    let mut body = String::new();
    if args.emit.format == Format::Csv {
        body.push_str(BoundReport::csv_header());
        body.push('\n');
    }
    let mut ok = true;
    for &p in &ps {
        for &beta in &betas {
            let (rows, summary) = bounds::verify_corollary1(alpha, r, p, &ns, beta, &opts)?;
            ok &= all_passed(&rows);
            match args.emit.format {
                Format::Csv => {
                    for row in &rows {
                        body.push_str(&row.csv_row());
                        body.push('\n');
                    }
                }
                Format::Text => {
                    for row in &rows {
                        body.push_str(&row.text_block());
                        body.push('\n');
                    }
                }
            }
            body.push_str(&summary_line(
                args.emit.format,
                "corollary1",
                p,
                beta,
                &summary,
            ));
        }
    }
    args.emit.write(&body)?;
    Ok(ok)
}

fn run_verify_cor2(args: &VerifyCor2Args) -> Result<bool, CliError> {
    let (alpha, r, _) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ss = parse_list("--s", &args.s)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    let mut body = String::new();
    if args.emit.format == Format::Csv {
        body.push_str(BoundReport::csv_header());
        body.push('\n');
    }
    let mut ok = true;
    for &s in &ss {
        for &beta in &betas {
            let (rows, summary) = bounds::verify_corollary2(alpha, r, s, &ns, beta, &opts)?;
            ok &= all_passed(&rows);
            match args.emit.format {
                Format::Csv => {
                    for row in &rows {
                        body.push_str(&row.csv_row());
                        body.push('\n');
                    }
                }
                Format::Text => {
                    for row in &rows {
                        body.push_str(&row.text_block());
                        body.push('\n');
                    }
                }
            }
            body.push_str(&summary_line(
                args.emit.format,
                "corollary2",
                s,
                beta,
                &summary,
            ));
        }
    }
    args.emit.write(&body)?;
    Ok(ok)
}

fn run_verify_lemmas(args: &VerifyLemmasArgs) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    let mut cases = Vec::new();
    for &n in &ns {
        for &beta in &betas {
            cases.push((n, beta));
        }
    }
    let blocks: Vec<Vec<BoundReport>> = args.jobs.run(|| {
        cases
            .par_iter()
            .map(|&(n, beta)| {
                let params = sup_params(&spec, alpha, r, n, beta, args.uniform_ab)?;
                bounds::verify_lemmas(&params, &opts)
            })
            .collect::<Result<_, CoreError>>()
    })??;
    let rows: Vec<BoundReport> = blocks.into_iter().flatten().collect();
    let ok = all_passed(&rows);
    args.emit.write(&render_reports(args.emit.format, &rows))?;
    Ok(ok)
}

fn run_sweep(args: &SweepArgs) -> Result<bool, CliError> {
    let (alpha, r, spec) = args.family.parse()?;
    let ns = parse_ns("--n", &args.n)?;
    let ps = parse_list("--p", &args.p)?;
    let ss = parse_list("--s", &args.s)?;
    let betas = parse_list("--beta", &args.beta)?;
    let opts = args.tolerances.options()?;
    for &p in &ps {
        if p.is_infinite() {
            return Err(CliError::Usage(
                "--p: the uniform sandwich needs 1 <= p < inf; the sup-norm lower check is included automatically"
                    .into(),
            ));
        }
    }
    let blocks: Vec<Vec<BoundReport>> = args.jobs.run(|| {
        ns.par_iter()
            .map(|&n| {
                let mut rows = Vec::new();
                for &beta in &betas {
                    let base = sup_params(&spec, alpha, r, n, beta, args.uniform_ab)?;
                    rows.extend(bounds::verify_lemmas(&base, &opts)?);
                    for &p in &ps {
                        let params = thm1_params(&spec, alpha, r, n, beta, p, args.uniform_ab)?;
                        rows.push(bounds::verify_theorem1(&params, &opts)?);
                        rows.push(bounds::verify_duality_chain(&params, &opts)?);
                    }
                    rows.push(bounds::verify_sup_lower_extra(&base, &opts)?);
                    for &s in &ss {
                        let params = thm2_params(&spec, alpha, r, n, beta, s, args.uniform_ab)?;
                        rows.push(bounds::verify_theorem2(&params, &opts)?);
                    }
                }
                Ok(rows)
            })
            .collect::<Result<_, CoreError>>()
    })??;
    let rows: Vec<BoundReport> = blocks.into_iter().flatten().collect();
    let ok = all_passed(&rows);
    args.emit.write(&render_reports(args.emit.format, &rows))?;
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Cmd::Characteristics(a) => run_characteristics(a),
        Cmd::Classify(a) => run_classify(a),
        Cmd::KernelNorm(a) => run_kernel_norm(a),
        Cmd::Extremal(a) => run_extremal(a),
        Cmd::VerifyThm1(a) => run_verify_thm1(a),
        Cmd::VerifyThm2(a) => run_verify_thm2(a),
        Cmd::VerifyCor1(a) => run_verify_cor1(a),
        Cmd::VerifyCor2(a) => run_verify_cor2(a),
        Cmd::VerifyLemmas(a) => run_verify_lemmas(a),
        Cmd::Sweep(a) => run_sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
