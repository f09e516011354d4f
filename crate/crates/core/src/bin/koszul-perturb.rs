use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use koszul_perturb::connection::CurvatureInput;
use koszul_perturb::todd::{q_sigma, todd_det, todd_exp};
use koszul_perturb::verify::{run_suite, SuiteOptions, SUITES};
use koszul_perturb::{Error, GradedElement, ModelConfig};

/// Exact Koszul perturbation engine: verification suites, Todd classes and q_σ.
#[derive(Parser)]
#[command(name = "koszul-perturb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable output (default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Human-readable output.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Compute the generalized Todd class of a curvature input.
    Todd(ToddArgs),
    /// Compute q_σ(η) and compare it with Td ⌟ η.
    Qsigma(QsigmaArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// One of koszul, hom, perturbation, connection, todd, combinatorics, all.
    suite: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    e: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Highest connection order for the connection suite.
    #[arg(long)]
    max_order: Option<usize>,
    /// Include elapsed_ms in the report (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Exp,
    Det,
    Both,
}

#[derive(Args)]
struct ToddArgs {
    /// Curvature input JSON.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Route::Both)]
    route: Route,
}

#[derive(Args)]
struct QsigmaArgs {
    /// Curvature input JSON.
    #[arg(long)]
    input: PathBuf,
    /// η as a JSON list of terms.
    #[arg(long)]
    eta: PathBuf,
    /// Symmetric truncation degree; defaults to max(4, d + 1).
    #[arg(long)]
    m: Option<usize>,
}

enum Outcome {
    Pass(String),
    Fail(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("KOSZUL_PERTURB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Verify(a) => verify(a, cli.text),
        Command::Todd(a) => todd(a, cli.text),
        Command::Qsigma(a) => qsigma(a, cli.text),
    };
    let (body, code) = match result {
        Ok(Outcome::Pass(s)) => (s, 0),
        Ok(Outcome::Fail(s)) => (s, 1),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(code)
}

fn verify(a: &VerifyArgs, text: bool) -> Result<Outcome, Error> {
    if !SUITES.contains(&a.suite.as_str()) {
        return Err(Error::UnknownSuite(a.suite.clone()));
    }
    let config = ModelConfig::with_seed(a.d, a.e, a.m, a.seed)?;
    let opts = SuiteOptions { max_order: a.max_order, timings: a.timings };
    let report = run_suite(&a.suite, config, &opts)?;
    let body = if text { report.to_text() } else { report.to_json() + "\n" };
    Ok(if report.overall { Outcome::Pass(body) } else { Outcome::Fail(body) })
}

fn read_curvature(path: &PathBuf) -> Result<CurvatureInput, Error> {
    let r = CurvatureInput::from_json(&fs::read_to_string(path)?)?;
    if r.d() > 3 || r.e() > 6 {
        return Err(Error::InvalidConfig(format!("supported range is d ≤ 3, e ≤ 6 (got d={}, e={})", r.d(), r.e())));
    }
    Ok(r)
}

fn todd(a: &ToddArgs, text: bool) -> Result<Outcome, Error> {
    let r = read_curvature(&a.input)?;
    let config = ModelConfig::new(r.d(), r.e(), 1)?;
    let (class, agree) = match a.route {
        Route::Exp => (todd_exp(&r, config)?, None),
        Route::Det => (todd_det(&r, config)?, None),
        Route::Both => {
            let e = todd_exp(&r, config)?;
            let d = todd_det(&r, config)?;
            let agree = e == d;
            (d, Some(agree))
        }
    };
    let body = if text {
        let mut s = format!("Td = {:?}\n", class.value());
        if let Some(ok) = agree {
            s.push_str(&format!("routes agree: {ok}\n"));
        }
        s
    } else {
        let mut v = json!({ "terms": class.value().to_records() });
        if let Some(ok) = agree {
            v["routes_agree"] = json!(ok);
        }
        serde_json::to_string_pretty(&v)? + "\n"
    };
    Ok(if agree == Some(false) { Outcome::Fail(body) } else { Outcome::Pass(body) })
}

fn qsigma(a: &QsigmaArgs, text: bool) -> Result<Outcome, Error> {
    let r = read_curvature(&a.input)?;
    let m = a.m.unwrap_or((r.d() + 1).max(4));
    let config = ModelConfig::new(r.d(), r.e(), m)?;
    let eta = GradedElement::from_json(config, &fs::read_to_string(&a.eta)?)?;
    let q = q_sigma(&r, config, &eta)?;
    let td = todd_det(&r, config)?.contract(&eta)?;
    let equal = q == td;
    let top = config.top_mask();
    let asserted = eta.terms().all(|(m, _)| m.b == top);
    let body = if text {
        format!(
            "q(η) = {:?}\nTd ⌟ η = {:?}\nequal: {equal}\nasserted: {asserted}\n",
            q, td
        )
    } else {
        let v = json!({
            "q_of_eta": q.to_records(),
            "todd_contract_eta": td.to_records(),
            "equal": equal,
            "asserted": asserted,
        });
        serde_json::to_string_pretty(&v)? + "\n"
    };
    Ok(if asserted && !equal { Outcome::Fail(body) } else { Outcome::Pass(body) })
}
