use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use falsetate::charelem::{evaluate, lemma_closed_form, LocalModuleSpec, ModuleKind};
use falsetate::classify::{classify_primes, count_points_weight2};
use falsetate::euler::{euler_factor, euler_ratio_product, TwistConvention};
use falsetate::group::decomposition_data;
use falsetate::padic::{PadicCtx, PadicScalar, DEFAULT_PRECISION};
use falsetate::reps::{enumerate_irreps, ArtinRep, RepContext};
use falsetate::verify::{emit_report, ingest_form, verify_functional_equation, ReportFormat, VerifyOptions};
use falsetate::{Error, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    PaperDisplay,
    PaperText,
}

impl From<Convention> for TwistConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::PaperDisplay => TwistConvention::PaperDisplay,
            Convention::PaperText => TwistConvention::PaperText,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    N,
    M,
}

/// Verify the evaluated functional equation of characteristic elements over
/// a false Tate curve extension, up to p-adic units.
#[derive(Parser, Debug)]
#[command(name = "verify-fe", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    verify: VerifyArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Form description (JSON).
    #[arg(long)]
    form: Option<PathBuf>,
    /// Kummer base a.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    /// Odd prime p.
    #[arg(long)]
    p: Option<u64>,
    /// Finite level n of the tower.
    #[arg(long)]
    level: Option<u32>,
    /// Absolute p-adic digits carried.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long, value_enum, default_value = "paper-display")]
    twist_convention: Convention,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also compare every representation after inflation to level n + 1.
    #[arg(long)]
    check_inflation: bool,
    /// Use Frob_q = (q, c) instead of (q, 0).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    frobenius_shift: i64,
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    level: u32,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the closed forms ψ(Frob) - x and ψ(Frob) - q x with the
    /// determinant evaluation.
    LemmaCheck {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        q: u64,
        /// Rational number such as 6 or 1/11.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// `all`, `trivial`, `psi:i:j` or `theta:m:i:j`.
        #[arg(long = "char", default_value = "all")]
        character: String,
    },
    /// Euler factors and η / η* ratios at one prime.
    Euler {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long = "char", default_value = "all")]
        character: String,
    },
    /// Classify the primes dividing a.
    Classify {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        form: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, value_enum, default_value = "paper-display")]
        twist_convention: Convention,
    },
    /// Evaluate a rank-one characteristic element at representations.
    EvalCharelem {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "char", default_value = "all")]
        character: String,
    },
    /// List the irreducible representations of G_n.
    Irreps {
        #[command(flatten)]
        g: GroupArgs,
    },
    /// a_q = q + 1 - #E(F_q) for a Weierstrass curve [a1,a2,a3,a4,a6].
    CountPoints {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 5)]
        curve: Vec<i64>,
        #[arg(long)]
        q: u64,
    },
}

fn parse_rational(ctx: &Arc<PadicCtx>, s: &str) -> Result<PadicScalar> {
    let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as a rational number"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            PadicScalar::from_ratio(ctx, n, d)
        }
        None => Ok(PadicScalar::from_int(ctx, s.trim().parse::<i64>().map_err(|_| bad())?)),
    }
}

fn select_reps(rc: &Arc<RepContext>, spec: &str) -> Result<Vec<ArtinRep>> {
    let nums = |parts: &[&str]| -> Result<Vec<u64>> {
        parts
            .iter()
            .map(|x| x.parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad representation spec {spec:?}"))))
            .collect()
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["all"] => enumerate_irreps(rc),
        ["trivial"] => Ok(vec![rc.trivial()]),
        ["psi", rest @ ..] if rest.len() == 2 => {
            let v = nums(rest)?;
            Ok(vec![rc.psi(v[0] as u32, v[1])?])
        }
        ["theta", rest @ ..] if rest.len() == 3 => {
            let v = nums(rest)?;
            Ok(vec![rc.theta(v[0] as u32, v[1] as u32, v[2])?])
        }
        _ => Err(Error::InvalidArgument(format!("bad representation spec {spec:?}"))),
    }
}

fn setup(g: &GroupArgs) -> Result<(Arc<PadicCtx>, Arc<RepContext>)> {
    let ctx = PadicCtx::new(g.p, g.precision)?;
    let rc = RepContext::new(&ctx, g.level)?;
    Ok((ctx, rc))
}

fn run_verify(v: &VerifyArgs) -> Result<i32> {
    let missing = |name: &str| Error::InvalidArgument(format!("--{name} is required"));
    let form = v.form.as_ref().ok_or_else(|| missing("form"))?;
    let a = v.a.ok_or_else(|| missing("a"))?;
    let p = v.p.ok_or_else(|| missing("p"))?;
    let level = v.level.ok_or_else(|| missing("level"))?;
    let f = ingest_form(form)?;
    let opts = VerifyOptions {
        precision: v.precision,
        convention: v.twist_convention.into(),
        frobenius_shift: v.frobenius_shift,
        check_inflation: v.check_inflation,
    };
    let report = verify_functional_equation(&f, a, p, level, &opts)?;
    if let Some(w) = &report.header.classification.override_warning {
        eprintln!("warning: {w}");
    }
    let format = match v.format {
        Format::Json => ReportFormat::Json,
        Format::Text => ReportFormat::Text,
    };
    emit_report(&report, format, v.report.as_deref())?;
    for r in report.records.iter().filter(|r| !r.unit_ratio_ok) {
        eprintln!("not verified: {} ({:?})", r.label, r.status);
    }
    Ok(report.exit_code())
}

fn run(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::LemmaCheck { g, q, x, character } => {
            let (ctx, rc) = setup(g)?;
            let dd = decomposition_data(*q, g.p, g.level)?;
            let x = parse_rational(&ctx, x)?;
            let mut ok = true;
            for eta in select_reps(&rc, character)? {
                let n = evaluate(&LocalModuleSpec::rank_one(dd.clone(), x.clone(), ModuleKind::N)?, &eta)?;
                let m = evaluate(&LocalModuleSpec::rank_one(dd.clone(), x.clone(), ModuleKind::M)?, &eta)?;
                let show = |r: &falsetate::EvalResult| r.value().map_or("indeterminate".to_string(), |v| v.to_string());
                println!("{}", eta.label());
                if eta.is_one_dimensional() {
                    let psi = eta.psi_at(*q);
                    for (kind, r) in [(ModuleKind::N, &n), (ModuleKind::M, &m)] {
                        let closed = lemma_closed_form(kind, &psi, *q, &x);
                        let diff = r.value().map(|v| v.clone() - closed.clone());
                        let good =
                            diff.as_ref().is_some_and(|d| d.is_zero()) || (r.is_indeterminate() && closed.is_zero());
                        ok &= good;
                        println!(
                            "  {kind}: closed {closed} | oracle {} | difference {}",
                            show(r),
                            diff.map_or("-".to_string(), |d| d.to_string())
                        );
                    }
                } else {
                    let equal = match (n.value(), m.value()) {
                        (Some(a), Some(b)) => a.same_value(b),
                        (None, None) => true,
                        _ => false,
                    };
                    ok &= equal;
                    println!("  N: oracle {}\n  M: oracle {}\n  ratio is 1: {equal}", show(&n), show(&m));
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Euler { g, form, q, character } => {
            let (_, rc) = setup(g)?;
            let f = ingest_form(form)?;
            for eta in select_reps(&rc, character)? {
                let e = euler_factor(&f, &eta, *q)?;
                let r = euler_ratio_product(&f, &eta, &[*q])?;
                println!(
                    "{}: P_q = {} (degree {}, valuation {}), ratio against dual = {} (valuation {})",
                    eta.label(),
                    e.value,
                    e.degree,
                    e.value.valuation()?,
                    r,
                    r.valuation()?
                );
            }
            Ok(0)
        }
        Command::Classify { g, form, a, twist_convention } => {
            let ctx = PadicCtx::new(g.p, g.precision)?;
            let f = ingest_form(form)?;
            let c = classify_primes(&f, *a, g.p, g.level, &ctx, (*twist_convention).into())?;
            if let Some(w) = &c.override_warning {
                eprintln!("warning: {w}");
            }
            println!("{}", serde_json::to_string_pretty(&c).map_err(|e| Error::Io(e.to_string()))?);
            Ok(0)
        }
        Command::EvalCharelem { g, q, x, kind, character } => {
            let (ctx, rc) = setup(g)?;
            let dd = decomposition_data(*q, g.p, g.level)?;
            let kind = match kind {
                Kind::N => ModuleKind::N,
                Kind::M => ModuleKind::M,
            };
            let spec = LocalModuleSpec::rank_one(dd, parse_rational(&ctx, x)?, kind)?;
            for eta in select_reps(&rc, character)? {
                let r = evaluate(&spec, &eta)?;
                match (r.value(), &r.valuation) {
                    (Some(v), Some(val)) => println!("{}: {v} (valuation {val})", eta.label()),
                    _ => println!("{}: indeterminate", eta.label()),
                }
            }
            Ok(0)
        }
        Command::Irreps { g } => {
            let (_, rc) = setup(g)?;
            let reps = enumerate_irreps(&rc)?;
            for eta in &reps {
                let (plus, minus) = eta.complex_conjugation_signs()?;
                println!("{} dim {} d+ {} d- {}", eta.label(), eta.dimension(), plus, minus);
            }
            let total: usize = reps.iter().map(|r| r.dimension().pow(2)).sum();
            println!(
                "{} irreducibles, sum of squared dimensions {} = |G_{}| = {}",
                reps.len(),
                total,
                g.level,
                rc.group().order()
            );
            Ok(0)
        }
        Command::CountPoints { curve, q } => {
            let c: [i64; 5] = curve
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidArgument("--curve needs five coefficients".into()))?;
            println!("{}", count_points_weight2(&c, *q)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Some(cmd) => run(cmd),
        None => run_verify(&cli.verify),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
