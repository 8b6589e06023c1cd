//! Command-line front end.
//!
//! [`run`] parses arguments, executes one command and returns the process exit
//! code: 0 when every requested check passes, 1 when one fails, 2 on a usage
//! error (bad flags, out-of-budget requests).

mod report;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{gamma_k, gamma_k_binomial, kernel_goe, kernel_sine};
use crate::dual::{dual_correlator, DualIntegralRequest, DualMethod};
use crate::ensembles::{mc_correlator, wick_oracle, EnsembleKind, EnsembleSpec, LambdaPoints};
use crate::error::{Error, Result};
use crate::value::{CorrelatorValue, Provenance};

pub use report::{Cell, ResultRow, RunManifest};
pub use verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "charpoly", version, about = "Characteristic-polynomial correlators of GOE/GUE matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for Monte Carlo and the dual sums. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Monte Carlo estimate of the correlator.
    Mc(McArgs),
    /// Exact dual-integral evaluation.
    Dual(DualArgs),
    /// Table of the universal moment constants γ_k.
    Gamma(GammaArgs),
    /// Scaling-limit kernels on an x grid.
    Kernel(KernelArgs),
    /// Named verification suites.
    Verify(VerifyArgs),
    /// All applicable methods side by side with pairwise deviations.
    Compare(CompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mc(_) => "mc",
            Command::Dual(_) => "dual",
            Command::Gamma(_) => "gamma",
            Command::Kernel(_) => "kernel",
            Command::Verify(_) => "verify",
            Command::Compare(_) => "compare",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Mc(a) => Some(a.seed),
            Command::Verify(a) => Some(a.seed),
            Command::Compare(a) => Some(a.seed),
            _ => None,
        }
    }
}

fn parse_kind(s: &str) -> Result<EnsembleKind> {
    s.parse()
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// goe or gue.
    #[arg(long, value_parser = parse_kind)]
    pub ensemble: EnsembleKind,
    /// Matrix dimension N.
    #[arg(long)]
    pub dim: usize,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub lambdas: Vec<f64>,
    /// Number of factors; must equal the number of λ values when given.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated source eigenvalues, N of them.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub source: Option<Vec<f64>>,
}

impl Target {
    fn resolve(&self) -> Result<(EnsembleSpec, LambdaPoints)> {
        if let Some(k) = self.k {
            if k != self.lambdas.len() {
                return Err(Error::invalid(format!("--k {k} but {} λ values given", self.lambdas.len())));
            }
        }
        let spec = EnsembleSpec::with_source(self.ensemble, self.dim, self.source.clone())?;
        Ok((spec, LambdaPoints::new(self.lambdas.clone())?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Monomial,
    Quadrature,
    Mc,
    Oracle,
    All,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualArgs {
    #[command(flatten)]
    pub target: Target,
    /// monomial or quadrature.
    #[arg(long, value_enum, default_value_t = Method::Monomial)]
    pub method: Method,
    /// Quadrature nodes per axis (default: the exact count).
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaArgs {
    /// Restrict to one ensemble.
    #[arg(long, value_parser = parse_kind)]
    pub ensemble: Option<EnsembleKind>,
    /// Largest k in the table.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Comma-separated suites, or `all`.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub suite: Vec<Suite>,
    /// Overrides each suite's documented tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Haar samples per point for group-mc.
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = Method::All)]
    pub method: Method,
    /// Monte Carlo samples; 0 skips Monte Carlo.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Relative tolerance between exact methods (default 1e-10, 1e-8 for k ≥ 4).
    /// Monte Carlo must lie within 3 standard errors.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Parses `args` (including the program name), runs, writes the report and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.output.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::invalid(format!("cannot build a pool of {t} threads: {e}"))),
        },
        None => execute(&cli.command),
    };
    match outcome {
        Ok(manifest) => {
            let text = match cli.output.format {
                Format::Json => manifest.to_json(),
                Format::Csv => manifest.to_csv(),
            };
            match text.and_then(|t| emit(&t, cli.output.out.as_deref())) {
                Ok(()) if manifest.passed => 0,
                Ok(()) => 1,
                Err(e) => report_error(&e),
            }
        }
        Err(e) => report_error(&e),
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<()> {
    let text = text.trim_end();
    let io = |e: std::io::Error| Error::invalid(format!("cannot write report: {e}"));
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(io),
        None => writeln!(std::io::stdout().lock(), "{text}").map_err(io),
    }
}

fn report_error(e: &Error) -> i32 {
    let body = serde_json::json!({ "error": e, "message": e.to_string() });
    println!("{}", serde_json::to_string_pretty(&body).unwrap_or_else(|_| e.to_string()));
    eprintln!("error: {e}");
    match e {
        Error::Numerical(_) => 1,
        _ => 2,
    }
}

/// Runs one command without touching stdout.
pub fn execute(cmd: &Command) -> Result<RunManifest> {
    let start = Instant::now();
    let results = match cmd {
        Command::Mc(a) => cmd_mc(a)?,
        Command::Dual(a) => cmd_dual(a)?,
        Command::Gamma(a) => cmd_gamma(a)?,
        Command::Kernel(a) => cmd_kernel(a)?,
        Command::Verify(a) => verify::cmd_verify(a)?,
        Command::Compare(a) => cmd_compare(a)?,
    };
    Ok(RunManifest {
        command: cmd.name().to_string(),
        params: cmd.clone(),
        seed: cmd.seed(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        passed: results.iter().all(|r| r.pass != Some(false)),
        results,
    })
}

fn cmd_mc(a: &McArgs) -> Result<Vec<ResultRow>> {
    let (spec, lambdas) = a.target.resolve()?;
    let est = mc_correlator(&spec, &lambdas, a.samples, a.seed)?;
    Ok(vec![ResultRow::new("mc").value(&est.into()).real("stderr", est.stderr)])
}

fn dual_method(m: Method) -> Result<DualMethod> {
    match m {
        Method::Monomial => Ok(DualMethod::MonomialExact),
        Method::Quadrature => Ok(DualMethod::Quadrature),
        other => Err(Error::invalid(format!("dual takes --method monomial or quadrature, not {other:?}"))),
    }
}

fn cmd_dual(a: &DualArgs) -> Result<Vec<ResultRow>> {
    let (spec, lambdas) = a.target.resolve()?;
    let mut req = DualIntegralRequest::new(spec, lambdas).with_method(dual_method(a.method)?);
    req.nodes = a.nodes;
    Ok(vec![ResultRow::new("dual").value(&dual_correlator(&req)?)])
}

fn cmd_gamma(a: &GammaArgs) -> Result<Vec<ResultRow>> {
    let kinds = match a.ensemble {
        Some(k) => vec![k],
        None => vec![EnsembleKind::Goe, EnsembleKind::Gue],
    };
    let mut rows = Vec::new();
    for kind in kinds {
        for k in 1..=a.k {
            let g = gamma_k(kind, k)?;
            let agrees = gamma_k_binomial(kind, k)?.value == g.value;
            rows.push(
                ResultRow::new(format!("{} k={k}", kind.name()))
                    .real("k", k as f64)
                    .real("value", g.to_f64())
                    .text("rational", g.value.to_string())
                    .cell("forms_agree", Cell::Flag(agrees))
                    .provenance(Provenance::ClosedForm {
                        formula: format!("gamma-{}", kind.name()),
                    })
                    .check(agrees),
            );
        }
    }
    Ok(rows)
}

fn cmd_kernel(a: &KernelArgs) -> Result<Vec<ResultRow>> {
    if a.points < 2 || !(a.to > a.from) || !a.from.is_finite() || !a.to.is_finite() {
        return Err(Error::invalid("kernel grid needs --to > --from and at least 2 points"));
    }
    Error::check_budget("kernel grid points", a.points, 1_000_000)?;
    let step = (a.to - a.from) / (a.points - 1) as f64;
    Ok((0..a.points)
        .map(|i| {
            let x = a.from + step * i as f64;
            ResultRow::new(format!("{i}"))
                .real("x", x)
                .real("goe", kernel_goe(x))
                .real("sine", kernel_sine(x))
                .provenance(Provenance::ClosedForm { formula: "kernels".into() })
        })
        .collect())
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub(crate) fn relative_deviation(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn cmd_compare(a: &CompareArgs) -> Result<Vec<ResultRow>> {
    let (spec, lambdas) = a.target.resolve()?;
    let tol = a.tol.unwrap_or(if lambdas.k() >= 4 { 1e-8 } else { 1e-10 });
    let wanted = |m: Method| a.method == m || a.method == Method::All;
    let mut rows = Vec::new();
    let mut exact: Vec<(&str, CorrelatorValue)> = Vec::new();
    let skip = |rows: &mut Vec<ResultRow>, name: &str, e: Error| -> Result<()> {
        if a.method == Method::All {
            rows.push(ResultRow::new(name).text("skipped", e.to_string()));
            Ok(())
        } else {
            Err(e)
        }
    };
    for (name, m) in [("monomial", Method::Monomial), ("quadrature", Method::Quadrature)] {
        if !wanted(m) {
            continue;
        }
        let mut req = DualIntegralRequest::new(spec.clone(), lambdas.clone()).with_method(dual_method(m)?);
        req.nodes = a.nodes;
        match dual_correlator(&req) {
            Ok(v) => exact.push((name, v)),
            Err(e) => skip(&mut rows, name, e)?,
        }
    }
    if wanted(Method::Oracle) {
        match wick_oracle(&spec, &lambdas) {
            Ok(v) => exact.push(("oracle", CorrelatorValue::oracle(v))),
            Err(e) => skip(&mut rows, "oracle", e)?,
        }
    }
    let mc = if wanted(Method::Mc) && a.samples > 0 {
        Some(mc_correlator(&spec, &lambdas, a.samples, a.seed)?)
    } else {
        None
    };
    for (name, v) in &exact {
        rows.push(ResultRow::new(*name).value(v));
    }
    if let Some(est) = &mc {
        rows.push(ResultRow::new("mc").value(&(*est).into()).real("stderr", est.stderr));
    }
    for i in 0..exact.len() {
        for j in i + 1..exact.len() {
            let d = relative_deviation(exact[i].1.value, exact[j].1.value);
            rows.push(
                ResultRow::new(format!("{} vs {}", exact[i].0, exact[j].0))
                    .real("relative_deviation", d)
                    .real("tolerance", tol)
                    .check(d <= tol),
            );
        }
    }
    if let Some(est) = &mc {
        for (name, v) in &exact {
            let z = est.z_score(v.value);
            rows.push(
                ResultRow::new(format!("mc vs {name}"))
                    .real("z", z)
                    .real("tolerance", 3.0)
                    .check(z <= 3.0),
            );
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("charpoly").chain(args.iter().copied()))
    }

    #[test]
    fn negative_lambdas_parse() {
        let cli = parse(&["dual", "--ensemble", "gue", "--dim", "2", "--lambdas", "-0.5,1.25"]).unwrap();
        match cli.command {
            Command::Dual(d) => assert_eq!(d.target.lambdas, vec![-0.5, 1.25]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_flags_are_errors() {
        assert!(parse(&["dual", "--ensemble", "goe", "--dim", "1", "--lambdas", "0", "--bogus"]).is_err());
        assert!(parse(&["mc", "--ensemble", "xoe", "--dim", "1", "--lambdas", "0"]).is_err());
    }

    #[test]
    fn k_must_match_lambdas() {
        let cli = parse(&["dual", "--ensemble", "goe", "--dim", "1", "--k", "3", "--lambdas", "0,0"]).unwrap();
        assert!(matches!(execute(&cli.command), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn n1_goe_pair_at_origin() {
        let cli = parse(&["dual", "--ensemble", "goe", "--dim", "1", "--k", "2", "--lambdas", "0,0"]).unwrap();
        let m = execute(&cli.command).unwrap();
        assert_eq!(m.results[0].cells["value"], Cell::Complex(num_complex::Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn dual_rejects_mc_method() {
        let cli = parse(&["dual", "--ensemble", "goe", "--dim", "1", "--lambdas", "0", "--method", "mc"]).unwrap();
        assert!(execute(&cli.command).is_err());
    }
}
