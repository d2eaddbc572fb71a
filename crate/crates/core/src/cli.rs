//! Command-line front end: `table`, `verify` and `mc`.
//!
//! Settings are layered: command-line flags, then `DEGSHEF_*` environment
//! variables, then a `key=value` config file, then built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::{parse_rational, Poly, Rational, Var};
use crate::families::{stirling1, Families, FamilyId};
use crate::fps::DEFAULT_ORDER;
use crate::identities::{self, Registry, Report, VerifyConfig};
use crate::randvar::{mc_estimate, McEstimate, McTarget, MomentProvider, ShefferY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const JSON_VERSION: u32 = 1;

pub const DEFAULT_TABLE_N: usize = 10;
pub const DEFAULT_MC_N: usize = 2;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Latex,
    Plain,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <OutputFormat as ValueEnum>::from_str(s, true)
            .map_err(|_| Error::BadParams(format!("unknown format {s:?}")))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "degsheffer",
    version,
    about = "Degenerate Bernoulli, Euler and Sheffer-type polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the first polynomials (or numbers) of a family.
    Table {
        /// falling-lambda, deg-bernoulli, deg-euler, higher-bernoulli, higher-euler,
        /// sheffer-t, sheffer-y or stirling1
        family: String,
    },
    /// Check registered identities exactly.
    Verify {
        /// Identity id or glob; all identities when omitted.
        filter: Option<String>,
    },
    /// Monte-Carlo check of an expectation identity.
    Mc {
        /// thm3.1, thm3.7 or moment
        identity: String,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Largest index n.
    #[arg(long, global = true, env = "DEGSHEF_N")]
    n: Option<String>,
    /// Truncation order of the power series.
    #[arg(long, global = true, env = "DEGSHEF_ORDER")]
    order: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_FORMAT")]
    format: Option<String>,
    #[arg(
        long,
        global = true,
        env = "DEGSHEF_LAMBDA",
        allow_hyphen_values = true
    )]
    lambda: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_X", allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_P", allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_A", allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_B", allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_M")]
    m: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_L")]
    l: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_SAMPLES")]
    samples: Option<String>,
    #[arg(long, global = true, env = "DEGSHEF_SEED")]
    seed: Option<String>,
    /// Random variable: uniform01, zero, ber:<p>, ber:p or iid:<m>:<spec>.
    #[arg(long, global = true, env = "DEGSHEF_PROVIDER")]
    provider: Option<String>,
    /// File of key=value lines supplying defaults for the flags above.
    #[arg(long, global = true, env = "DEGSHEF_CONFIG")]
    config: Option<String>,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<String>,
}

const CONFIG_KEYS: &[&str] = &[
    "n", "order", "format", "lambda", "x", "p", "a", "b", "m", "l", "samples", "seed", "provider",
];

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub order: usize,
    /// `None` means the command's own default.
    pub n: Option<usize>,
    pub format: OutputFormat,
    pub lambda: Option<String>,
    pub x: Option<String>,
    pub p: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub m: Option<usize>,
    pub l: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub provider: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            order: DEFAULT_ORDER,
            n: None,
            format: OutputFormat::Plain,
            lambda: None,
            x: None,
            p: None,
            a: None,
            b: None,
            m: None,
            l: None,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            provider: None,
        }
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::BadParams(format!("config line {}: expected key=value", i + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::BadParams(format!(
                "config line {}: unknown key {key:?}",
                i + 1
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::BadParams(format!(
            "{key}: expected a non-negative integer, got {value:?}"
        ))
    })
}

impl RunConfig {
    fn resolve(flags: &Flags) -> Result<RunConfig> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::BadParams(format!("cannot read config {path}: {e}")))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let pick =
            |key: &str, flag: &Option<String>| flag.clone().or_else(|| file.get(key).cloned());
        let mut cfg = RunConfig::default();
        if let Some(v) = pick("order", &flags.order) {
            cfg.order = parse_num("order", &v)?;
        }
        if let Some(v) = pick("n", &flags.n) {
            cfg.n = Some(parse_num("n", &v)?);
        }
        if let Some(v) = pick("format", &flags.format) {
            cfg.format = v.parse()?;
        }
        cfg.lambda = pick("lambda", &flags.lambda);
        cfg.x = pick("x", &flags.x);
        cfg.p = pick("p", &flags.p);
        cfg.a = pick("a", &flags.a);
        cfg.b = pick("b", &flags.b);
        if let Some(v) = pick("m", &flags.m) {
            cfg.m = Some(parse_num("m", &v)?);
        }
        if let Some(v) = pick("l", &flags.l) {
            cfg.l = Some(parse_num("l", &v)?);
        }
        if let Some(v) = pick("samples", &flags.samples) {
            cfg.samples = parse_num("samples", &v)?;
        }
        if let Some(v) = pick("seed", &flags.seed) {
            cfg.seed = parse_num("seed", &v)?;
        }
        cfg.provider = pick("provider", &flags.provider);
        Ok(cfg)
    }

    /// Pins from `--lambda`, `--x`, `--p`, `--a`, `--b`; each must be a rational.
    fn rational_pins(&self) -> Result<BTreeMap<Var, Rational>> {
        let mut pins = BTreeMap::new();
        for (var, value) in self.named_values() {
            if let Some(v) = value {
                pins.insert(var, parse_rational(v)?);
            }
        }
        Ok(pins)
    }

    /// Substitutions from the same flags, which may also be polynomials such as `x+1`.
    fn substitutions(&self, skip: &[Var]) -> Result<BTreeMap<Var, Poly>> {
        let mut subs = BTreeMap::new();
        for (var, value) in self.named_values() {
            if let Some(v) = value {
                if !skip.contains(&var) {
                    subs.insert(var, v.parse::<Poly>()?);
                }
            }
        }
        Ok(subs)
    }

    fn named_values(&self) -> [(Var, Option<&String>); 5] {
        [
            (Var::Lambda, self.lambda.as_ref()),
            (Var::X, self.x.as_ref()),
            (Var::P, self.p.as_ref()),
            (Var::A, self.a.as_ref()),
            (Var::B, self.b.as_ref()),
        ]
    }

    fn provider(&self) -> Result<MomentProvider> {
        MomentProvider::parse_spec(self.provider.as_deref().unwrap_or("uniform01"))
    }
}

/// Runs the CLI against the standard identity registry.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_registry(args, Registry::standard(), out, err)
}

pub fn run_with_registry<I, S>(
    args: I,
    registry: Registry,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, registry) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BadParams(_)
                | Error::Parse(_)
                | Error::UnknownIdentity(_)
                | Error::OrderExceeded { .. }
                | Error::UnsamplableProvider(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli, registry: Registry) -> Result<(String, i32)> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Table { family } => Ok((cmd_table(family.parse()?, &cfg)?, EXIT_OK)),
        Command::Verify { filter } => {
            let registry = match &cli.flags.inject_fault {
                Some(id) => registry.with_fault(id)?,
                None => registry,
            };
            let reports = run_verify(&registry, filter.as_deref(), &cfg)?;
            let code = if reports.iter().all(|r| r.equal) {
                EXIT_OK
            } else {
                EXIT_FAILURE
            };
            Ok((render_reports(&reports, cfg.format), code))
        }
        Command::Mc { identity } => {
            let est = run_mc(&identity, &cfg)?;
            let code = if est.pass() { EXIT_OK } else { EXIT_FAILURE };
            Ok((render_mc(&identity, &cfg, &est), code))
        }
    }
}

// ---------------------------------------------------------------------------
// table

struct Row {
    n: usize,
    k: Option<usize>,
    value: Poly,
}

/// Renders a table of `family` for `n = 0..=n_max`.
///
/// `x` defaults to 0 (the numbers) except for `falling-lambda`, where it stays
/// symbolic. Orders `a` and `b` stay symbolic unless given.
pub fn cmd_table(family: FamilyId, cfg: &RunConfig) -> Result<String> {
    let n_max = cfg.n.unwrap_or(DEFAULT_TABLE_N);
    if n_max > cfg.order {
        return Err(Error::BadParams(format!(
            "--n {n_max} exceeds the truncation order {}; raise --order",
            cfg.order
        )));
    }
    let x_default = if family == FamilyId::FallingLambda {
        Poly::var(Var::X)
    } else {
        Poly::zero()
    };
    let at = match &cfg.x {
        Some(v) => v.parse::<Poly>()?,
        None => x_default,
    };
    let subs = cfg.substitutions(&[Var::X])?;
    let a = Poly::var(Var::A).substitute(&subs);
    let b = Poly::var(Var::B).substitute(&subs);
    let fam = Families::new(n_max);
    let seq = |values: Vec<Poly>| -> Vec<Row> {
        values
            .into_iter()
            .take(n_max + 1)
            .enumerate()
            .map(|(n, p)| Row {
                n,
                k: None,
                value: p.substitute(&subs),
            })
            .collect()
    };
    let rows = match family {
        FamilyId::FallingLambda => seq(fam.falling_seq(&at)),
        FamilyId::DegBernoulli => seq(fam.bernoulli_seq(&at)),
        FamilyId::DegEuler => seq(fam.euler_seq(&at)),
        FamilyId::HigherBernoulli => seq(fam.bernoulli_higher_seq(&a, &at)?),
        FamilyId::HigherEuler => seq(fam.euler_higher_seq(&b, &at)?),
        FamilyId::ShefferT => seq(fam.sheffer_t_seq(&a, &b, &at)?),
        FamilyId::ShefferY => {
            let provider = cfg.provider()?;
            seq(ShefferY::new(provider, n_max)?.sheffer_seq(&at))
        }
        FamilyId::Stirling1 => {
            let mut rows = Vec::new();
            for n in 0..=n_max {
                for k in 0..=n {
                    rows.push(Row {
                        n,
                        k: Some(k),
                        value: Poly::constant(Rational::from_integer(stirling1(n, k)?)),
                    });
                }
            }
            rows
        }
    };
    Ok(render_table(family, &rows, cfg.format))
}

fn latex_symbol(family: FamilyId, n: usize, k: Option<usize>) -> String {
    match family {
        FamilyId::FallingLambda => format!("(x)_{{{n},\\lambda}}"),
        FamilyId::DegBernoulli => format!("\\beta_{{{n},\\lambda}}"),
        FamilyId::DegEuler => format!("\\mathcal{{E}}_{{{n},\\lambda}}"),
        FamilyId::HigherBernoulli => format!("\\beta^{{(a)}}_{{{n},\\lambda}}"),
        FamilyId::HigherEuler => format!("\\mathcal{{E}}^{{(b)}}_{{{n},\\lambda}}"),
        FamilyId::ShefferT => format!("T^{{(a,b)}}_{{{n},\\lambda}}"),
        FamilyId::ShefferY => format!("S^{{Y}}_{{{n},\\lambda}}"),
        FamilyId::Stirling1 => format!("S_1({n},{})", k.unwrap_or(0)),
    }
}

fn render_table(family: FamilyId, rows: &[Row], format: OutputFormat) -> String {
    let mut s = String::new();
    let pairs = family == FamilyId::Stirling1;
    match format {
        OutputFormat::Plain => {
            for r in rows {
                match r.k {
                    Some(k) => writeln!(s, "{} {} {}", r.n, k, r.value),
                    None => writeln!(s, "{} {}", r.n, r.value),
                }
                .unwrap();
            }
        }
        OutputFormat::Csv => {
            s.push_str(if pairs { "n,k,value\n" } else { "n,value\n" });
            for r in rows {
                let quoted = format!("\"{}\"", r.value.to_string().replace('"', "\"\""));
                match r.k {
                    Some(k) => writeln!(s, "{},{},{}", r.n, k, quoted),
                    None => writeln!(s, "{},{}", r.n, quoted),
                }
                .unwrap();
            }
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| match r.k {
                    Some(k) => json!({"n": r.n, "k": k, "value": r.value.to_string()}),
                    None => json!({"n": r.n, "value": r.value.to_string()}),
                })
                .collect();
            let doc = json!({"version": JSON_VERSION, "family": family.name(), "rows": rows});
            s = serde_json::to_string_pretty(&doc).unwrap();
            s.push('\n');
        }
        OutputFormat::Latex => {
            s.push_str("\\begin{align*}\n");
            for (i, r) in rows.iter().enumerate() {
                let end = if i + 1 < rows.len() { " \\\\" } else { "" };
                writeln!(
                    s,
                    "{} &= {}{}",
                    latex_symbol(family, r.n, r.k),
                    r.value.to_latex(),
                    end
                )
                .unwrap();
            }
            s.push_str("\\end{align*}\n");
        }
    }
    s
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(registry: &Registry, filter: Option<&str>, cfg: &RunConfig) -> Result<Vec<Report>> {
    let max_n = cfg.n.unwrap_or(identities::DEFAULT_MAX_N);
    let config = VerifyConfig {
        order: cfg.order,
        pins: cfg.rational_pins()?,
    };
    if max_n + identities::SHIFT_MARGIN > cfg.order {
        return Err(Error::OrderExceeded {
            requested: max_n + identities::SHIFT_MARGIN,
            order: cfg.order,
        });
    }
    identities::verify_all(registry, Some(filter.unwrap_or("*")), max_n, &config)
}

fn render_reports(reports: &[Report], format: OutputFormat) -> String {
    let mut s = String::new();
    let passed = reports.iter().filter(|r| r.equal).count();
    match format {
        OutputFormat::Plain => {
            for r in reports {
                let symbols: Vec<String> = r.symbols.iter().map(|v| v.to_string()).collect();
                let symbols = if symbols.is_empty() {
                    "none".to_string()
                } else {
                    symbols.join(", ")
                };
                let status = if r.equal { "PASS" } else { "FAIL" };
                writeln!(
                    s,
                    "{status} {} (maxN={}, symbolic: {symbols})",
                    r.id, r.max_n
                )
                .unwrap();
                if let Some(m) = &r.first_mismatch {
                    writeln!(s, "  variant {}: first mismatch at n={}", m.variant, m.n).unwrap();
                    writeln!(s, "  lhs  = {}", m.lhs).unwrap();
                    writeln!(s, "  rhs  = {}", m.rhs).unwrap();
                    writeln!(s, "  diff = {}", m.diff).unwrap();
                }
                if let Some(e) = &r.error {
                    writeln!(s, "  error: {e}").unwrap();
                }
            }
            writeln!(s, "{passed}/{} identities verified", reports.len()).unwrap();
        }
        OutputFormat::Csv => {
            s.push_str("id,maxN,equal,n,diff\n");
            for r in reports {
                let (n, diff) = match &r.first_mismatch {
                    Some(m) => (m.n.to_string(), format!("\"{}\"", m.diff)),
                    None => (String::new(), String::new()),
                };
                writeln!(s, "{},{},{},{},{}", r.id, r.max_n, r.equal, n, diff).unwrap();
            }
        }
        OutputFormat::Json => {
            let cases: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let mismatch = match &r.first_mismatch {
                        Some(m) => json!({"n": m.n, "diff": m.diff.to_string()}),
                        None => Value::Null,
                    };
                    json!({"id": r.id, "maxN": r.max_n, "equal": r.equal, "mismatch": mismatch})
                })
                .collect();
            s = serde_json::to_string_pretty(&json!({"version": JSON_VERSION, "cases": cases}))
                .unwrap();
            s.push('\n');
        }
        OutputFormat::Latex => {
            s.push_str("\\begin{tabular}{llll}\n\\hline\nid & $N$ & equal & first mismatch \\\\\n\\hline\n");
            for r in reports {
                let mismatch = match &r.first_mismatch {
                    Some(m) => format!("$n={}$: ${}$", m.n, m.diff.to_latex()),
                    None => "--".to_string(),
                };
                let equal = if r.equal { "yes" } else { "no" };
                writeln!(
                    s,
                    "\\texttt{{{}}} & {} & {equal} & {mismatch} \\\\",
                    r.id, r.max_n
                )
                .unwrap();
            }
            s.push_str("\\hline\n\\end{tabular}\n");
        }
    }
    s
}

// ---------------------------------------------------------------------------
// mc

fn run_mc(identity: &str, cfg: &RunConfig) -> Result<McEstimate> {
    let target = match identity {
        "thm3.1" => McTarget::Thm31,
        "thm3.7" => McTarget::Thm37 {
            m: cfg.m.unwrap_or(2),
            l: cfg.l.unwrap_or(1),
        },
        "moment" => McTarget::FallingMoment,
        other => {
            return Err(Error::BadParams(format!(
                "unknown mc identity {other:?}; expected thm3.1, thm3.7 or moment"
            )))
        }
    };
    let n = cfg.n.unwrap_or(DEFAULT_MC_N);
    let default_provider = if identity == "thm3.7" {
        "ber:1/2"
    } else {
        "uniform01"
    };
    let mut provider =
        MomentProvider::parse_spec(cfg.provider.as_deref().unwrap_or(default_provider))?;
    if let Some(p) = &cfg.p {
        provider = pin_p(provider, &parse_rational(p)?);
    }
    let lambda = parse_rational(cfg.lambda.as_deref().unwrap_or("0"))?;
    let x = parse_rational(cfg.x.as_deref().unwrap_or("0"))?;
    mc_estimate(&target, &provider, &lambda, &x, n, cfg.samples, cfg.seed)
}

fn pin_p(provider: MomentProvider, p: &Rational) -> MomentProvider {
    let pins = BTreeMap::from([(Var::P, p.clone())]);
    match provider {
        MomentProvider::Bernoulli(q) => MomentProvider::Bernoulli(q.pin(&pins)),
        MomentProvider::IidSum(inner, m) => MomentProvider::IidSum(Box::new(pin_p(*inner, p)), m),
        MomentProvider::IndependentSum(a, b) => {
            MomentProvider::IndependentSum(Box::new(pin_p(*a, p)), Box::new(pin_p(*b, p)))
        }
        MomentProvider::Custom(ms) => {
            MomentProvider::Custom(ms.iter().map(|m| m.pin(&pins)).collect())
        }
        other => other,
    }
}

fn render_mc(identity: &str, cfg: &RunConfig, est: &McEstimate) -> String {
    let mut s = String::new();
    let n = cfg.n.unwrap_or(DEFAULT_MC_N);
    let status = if est.pass() { "PASS" } else { "FAIL" };
    match cfg.format {
        OutputFormat::Plain | OutputFormat::Latex => {
            writeln!(
                s,
                "{status} {identity} n={n} samples={} seed={}",
                est.samples, est.seed
            )
            .unwrap();
            writeln!(s, "exact     = {} ({:.12})", est.exact, est.exact_f64()).unwrap();
            writeln!(s, "estimate  = {:.12}", est.estimate).unwrap();
            writeln!(s, "std_error = {:.6e}", est.std_error).unwrap();
            writeln!(s, "z         = {:.4}", est.z).unwrap();
        }
        OutputFormat::Csv => {
            s.push_str("identity,n,samples,seed,exact,estimate,std_error,z,pass\n");
            writeln!(
                s,
                "{identity},{n},{},{},\"{}\",{:.12},{:.6e},{:.4},{}",
                est.samples,
                est.seed,
                est.exact,
                est.estimate,
                est.std_error,
                est.z,
                est.pass()
            )
            .unwrap();
        }
        OutputFormat::Json => {
            let finite = |v: f64| {
                if v.is_finite() {
                    json!(v)
                } else {
                    json!(v.to_string())
                }
            };
            let doc = json!({
                "version": JSON_VERSION,
                "identity": identity,
                "n": n,
                "samples": est.samples,
                "seed": est.seed,
                "exact": est.exact.to_string(),
                "estimate": finite(est.estimate),
                "std_error": finite(est.std_error),
                "z": finite(est.z),
                "pass": est.pass(),
            });
            s = serde_json::to_string_pretty(&doc).unwrap();
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["degsheffer"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_file_parsing() {
        let cfg = parse_config_file("# comment\n\nn = 4\nlambda=1/2\n").unwrap();
        assert_eq!(cfg["n"], "4");
        assert_eq!(cfg["lambda"], "1/2");
        assert!(parse_config_file("bogus=1").is_err());
        assert!(parse_config_file("noequals").is_err());
    }

    #[test]
    fn bernoulli_table_plain() {
        let (code, out, _) = run_args(&["table", "deg-bernoulli", "--n", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0 1\n1 1/2*λ - 1/2\n2 -1/6*λ^2 + 1/6\n");
    }

    #[test]
    fn euler_at_lambda_zero() {
        let (code, out, _) = run_args(&["table", "deg-euler", "--n", "5", "--lambda", "0"]);
        assert_eq!(code, 0);
        let vals: Vec<&str> = out.lines().map(|l| l.split_once(' ').unwrap().1).collect();
        assert_eq!(vals, ["1", "-1/2", "0", "1/4", "0", "-1/2"]);
    }

    #[test]
    fn stirling_single_row() {
        let (code, out, _) = run_args(&["table", "stirling1", "--n", "0", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,k,value\n0,0,\"1\"\n");
    }

    #[test]
    fn order_too_small_is_usage_error() {
        let (code, _, err) = run_args(&["table", "deg-bernoulli", "--n", "20", "--order", "16"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("bad parameters"), "{err}");
    }

    #[test]
    fn unknown_identity_is_nonzero() {
        let (code, _, err) = run_args(&["verify", "no-such-id"]);
        assert_ne!(code, 0);
        assert!(err.contains("unknown identity"));
    }

    #[test]
    fn latex_table() {
        let (code, out, _) = run_args(&["table", "deg-bernoulli", "--n", "1", "--format", "latex"]);
        assert_eq!(code, 0);
        assert!(
            out.starts_with("\\begin{align*}\n\\beta_{0,\\lambda} &= 1 \\\\\n"),
            "{out}"
        );
    }
}
