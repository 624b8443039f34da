//! Problem files, the check battery and the `qdb` command line.
//!
//! A problem file is JSON:
//!
//! ```json
//! {
//!   "rho": [0.75, 0.25],
//!   "channel": {"kind": "kraus", "data": [[[[0.89, 0], [0, 0]], ...], ...]},
//!   "theta": {"kind": "transpose"},
//!   "time_powers": [1, 2],
//!   "tol": {"eq_tol": 1e-9}
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. `rho` is either a list of eigenvalues (diagonal) or a full matrix.
//! A channel of kind `"matrix"` carries its `n²×n²` matrix in `data` and must
//! declare `"convention": "column-stacking"`. An optional `chain` object
//! (`p`, `gamma`) holds a classical Markov chain; when present, `rho`,
//! `channel` and `theta` may be omitted.
//!
//! A non-diagonal `rho` moves everything into its eigenbasis, where the
//! transpose `Θ` and the checks are defined.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::balance::{
    classical_detailed_balance, classical_phi_balance, run_report_with, BalanceReport, CheckOptions,
    CheckResult, ClassicalChain, PositivityMode,
};
use crate::duals::{make_reversing, ReversingOperation};
use crate::error::{Error, Result};
use crate::generators::{
    cycle_chain, gad_kraus, metropolis_chain, random_density, random_unital_kraus, schur_db2_channel, Seed,
};
use crate::linalg::{ComplexMatrix, Tolerance, C64};
use crate::states::{make_density, DensityMatrix};
use crate::superop::{from_kraus, is_hermitian_map, is_unital, KrausChannel, SuperOperator};

pub const CONVENTION: &str = "column-stacking";

pub const EXIT_OK: i32 = 0;
pub const EXIT_BALANCE_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

/// How the channel was given in the file.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSource {
    Kraus(KrausChannel),
    Matrix,
}

/// A parsed problem, already expressed in the working basis of `rho`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub rho: Option<DensityMatrix>,
    pub channel: Option<SuperOperator>,
    pub source: Option<ChannelSource>,
    pub theta: Option<ReversingOperation>,
    pub tol: Tolerance,
    pub powers: Vec<u32>,
    pub chain: Option<ClassicalChain>,
}

fn number(v: &Value, field: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::schema(field, "expected a number"))?;
    if !x.is_finite() {
        return Err(Error::schema(field, "non-finite number"));
    }
    Ok(x)
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(field, "expected an array"))
}

fn complex(v: &Value, field: &str) -> Result<C64> {
    let pair = array(v, field)?;
    if pair.len() != 2 {
        return Err(Error::schema(field, "complex numbers are [re, im] pairs"));
    }
    Ok(C64::new(
        number(&pair[0], &format!("{field}[0]"))?,
        number(&pair[1], &format!("{field}[1]"))?,
    ))
}

fn matrix(v: &Value, field: &str) -> Result<ComplexMatrix> {
    let rows = array(v, field)?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::schema(field, "empty matrix"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let entries = array(row, &format!("{field}[{i}]"))?;
        if entries.len() != n {
            return Err(Error::schema(
                format!("{field}[{i}]"),
                format!("expected {n} entries for a square matrix, found {}", entries.len()),
            ));
        }
        for (j, e) in entries.iter().enumerate() {
            data.push(complex(e, &format!("{field}[{i}][{j}]"))?);
        }
    }
    ComplexMatrix::new(n, data)
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn density_error(e: Error) -> Error {
    match e {
        Error::Schema { .. } => e,
        other => Error::schema("rho", other.to_string()),
    }
}

fn parse_rho(v: &Value, tol: &Tolerance) -> Result<DensityMatrix> {
    let items = array(v, "rho")?;
    match items.first() {
        Some(first) if first.is_number() => {
            let values = items
                .iter()
                .enumerate()
                .map(|(i, x)| number(x, &format!("rho[{i}]")))
                .collect::<Result<Vec<f64>>>()?;
            DensityMatrix::from_diagonal(&values, tol).map_err(density_error)
        }
        Some(_) => make_density(&matrix(v, "rho")?, tol).map_err(density_error),
        None => Err(Error::schema("rho", "empty")),
    }
}

fn parse_tol(v: Option<&Value>) -> Result<Tolerance> {
    let mut tol = Tolerance::default();
    let Some(v) = v else { return Ok(tol) };
    let obj = v.as_object().ok_or_else(|| Error::schema("tol", "expected an object"))?;
    for (key, value) in obj {
        let field = format!("tol.{key}");
        let x = number(value, &field)?;
        match key.as_str() {
            "eq_tol" => tol.eq_tol = x,
            "psd_tol" => tol.psd_tol = x,
            "inv_tol" => tol.inv_tol = x,
            _ => return Err(Error::schema(field, "unknown tolerance")),
        }
    }
    tol.validate().map_err(|e| Error::schema("tol", e.to_string()))?;
    Ok(tol)
}

fn parse_powers(v: Option<&Value>) -> Result<Vec<u32>> {
    let Some(v) = v else { return Ok(vec![1]) };
    let items = array(v, "time_powers")?;
    if items.is_empty() {
        return Err(Error::schema("time_powers", "empty list"));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64()
                .filter(|&k| k >= 1 && k <= u32::MAX as u64)
                .map(|k| k as u32)
                .ok_or_else(|| Error::schema(format!("time_powers[{i}]"), "expected an integer ≥ 1"))
        })
        .collect()
}

fn parse_channel(v: &Value, rho: &DensityMatrix, tol: &Tolerance) -> Result<(SuperOperator, ChannelSource)> {
    let obj = v.as_object().ok_or_else(|| Error::schema("channel", "expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::schema("channel.kind", "expected \"kraus\" or \"matrix\""))?;
    let data = obj
        .get("data")
        .ok_or_else(|| Error::schema("channel.data", "missing"))?;
    let n = rho.dim();
    let basis = rho.basis();
    let rotate = *basis != ComplexMatrix::identity(n);
    match kind {
        "kraus" => {
            let items = array(data, "channel.data")?;
            let mut ops = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let field = format!("channel.data[{i}]");
                let m = matrix(item, &field)?;
                if m.dim() != n {
                    return Err(Error::schema(field, format!("expected {n}×{n}, found {0}×{0}", m.dim())));
                }
                ops.push(if rotate { rho.to_working(&m) } else { m });
            }
            let kraus = KrausChannel::new(ops).map_err(|e| Error::schema("channel.data", e.to_string()))?;
            Ok((from_kraus(&kraus), ChannelSource::Kraus(kraus)))
        }
        "matrix" => {
            match obj.get("convention").and_then(Value::as_str) {
                Some(CONVENTION) => {}
                Some(other) => {
                    return Err(Error::schema(
                        "channel.convention",
                        format!("unsupported convention \"{other}\", expected \"{CONVENTION}\""),
                    ))
                }
                None => {
                    return Err(Error::schema(
                        "channel.convention",
                        format!("missing; matrix channels must declare \"{CONVENTION}\""),
                    ))
                }
            }
            let m = matrix(data, "channel.data")?;
            if m.dim() != n * n {
                return Err(Error::schema(
                    "channel.data",
                    format!("expected {0}×{0}, found {1}×{1}", n * n, m.dim()),
                ));
            }
            let s = SuperOperator::from_matrix(n, m)?;
            let s = if rotate { s.change_basis(basis)? } else { s };
            let herm = is_hermitian_map(&s, tol);
            if !herm.passed {
                return Err(Error::InputNotDynamics(format!(
                    "channel is not Hermiticity-preserving (residual {:e})",
                    herm.residual
                )));
            }
            let unital = is_unital(&s, tol);
            if !unital.passed {
                return Err(Error::InputNotDynamics(format!(
                    "channel is not unital (residual {:e})",
                    unital.residual
                )));
            }
            Ok((s, ChannelSource::Matrix))
        }
        other => Err(Error::schema("channel.kind", format!("unknown kind \"{other}\""))),
    }
}

fn parse_theta(v: Option<&Value>, rho: &DensityMatrix, tol: &Tolerance) -> Result<ReversingOperation> {
    let n = rho.dim();
    let Some(v) = v else {
        return Ok(ReversingOperation::transpose(n));
    };
    let obj = v.as_object().ok_or_else(|| Error::schema("theta", "expected an object"))?;
    match obj.get("kind").and_then(Value::as_str) {
        Some("transpose") => Ok(ReversingOperation::transpose(n)),
        Some("unitary") => {
            let u = matrix(
                obj.get("u").ok_or_else(|| Error::schema("theta.u", "missing"))?,
                "theta.u",
            )?;
            if u.dim() != n {
                return Err(Error::schema("theta.u", format!("expected {n}×{n}")));
            }
            let th = make_reversing(&u, tol)?;
            if *rho.basis() == ComplexMatrix::identity(n) {
                Ok(th)
            } else {
                th.in_basis(rho.basis(), tol)
            }
        }
        _ => Err(Error::schema("theta.kind", "expected \"transpose\" or \"unitary\"")),
    }
}

fn parse_chain(v: &Value) -> Result<ClassicalChain> {
    let obj = v.as_object().ok_or_else(|| Error::schema("chain", "expected an object"))?;
    let p = array(obj.get("p").ok_or_else(|| Error::schema("chain.p", "missing"))?, "chain.p")?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("chain.p[{i}]")))
        .collect::<Result<Vec<f64>>>()?;
    let rows = array(
        obj.get("gamma").ok_or_else(|| Error::schema("chain.gamma", "missing"))?,
        "chain.gamma",
    )?;
    let mut gamma = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        gamma.push(
            array(row, &format!("chain.gamma[{i}]"))?
                .iter()
                .enumerate()
                .map(|(j, x)| number(x, &format!("chain.gamma[{i}][{j}]")))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    ClassicalChain::new(p, gamma).map_err(|e| Error::schema("chain", e.to_string()))
}

const KNOWN_FIELDS: [&str; 7] = ["rho", "channel", "theta", "time_powers", "tol", "chain", "meta"];

pub fn parse_problem_str(text: &str) -> Result<Problem> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::schema("<root>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::schema("<root>", "expected an object"))?;
    if let Some(key) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
        return Err(Error::schema(key.clone(), "unknown field"));
    }
    let tol = parse_tol(obj.get("tol"))?;
    let powers = parse_powers(obj.get("time_powers"))?;
    let chain = obj.get("chain").map(parse_chain).transpose()?;

    let rho = obj.get("rho").map(|v| parse_rho(v, &tol)).transpose()?;
    let (channel, source, theta) = match &rho {
        Some(rho) => {
            let (channel, source) = match obj.get("channel") {
                Some(v) => {
                    let (c, s) = parse_channel(v, rho, &tol)?;
                    (Some(c), Some(s))
                }
                None => (None, None),
            };
            (channel, source, Some(parse_theta(obj.get("theta"), rho, &tol)?))
        }
        None => {
            for field in ["channel", "theta"] {
                if obj.contains_key(field) {
                    return Err(Error::schema("rho", format!("required when `{field}` is given")));
                }
            }
            (None, None, None)
        }
    };
    if channel.is_none() && chain.is_none() {
        return Err(Error::schema("channel", "missing; a file needs a channel or a chain"));
    }
    Ok(Problem {
        rho,
        channel,
        source,
        theta,
        tol,
        powers,
        chain,
    })
}

pub fn parse_problem(path: &Path) -> Result<Problem> {
    parse_problem_str(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    Db2,
    Sqdb,
    Classical,
    #[default]
    None,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunFlags {
    /// Overrides both `eq_tol` and `psd_tol`.
    pub tol: Option<f64>,
    pub positivity_only: bool,
    pub tfd: bool,
    pub assert: Assertion,
    /// Overrides the file's `time_powers`.
    pub powers: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerReport {
    pub power: u32,
    pub report: BalanceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub detailed_balance: CheckResult,
    pub phi_balance: CheckResult,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub reports: Vec<PowerReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalReport>,
    pub assertion: Assertion,
    /// Whether the requested assertion holds; `None` when nothing was asserted.
    pub assertion_holds: Option<bool>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.assertion_holds {
            Some(false) => EXIT_BALANCE_FAILURE,
            _ => EXIT_OK,
        }
    }
}

pub fn run_checks(problem: &Problem, flags: &RunFlags) -> Result<RunOutcome> {
    let mut tol = problem.tol;
    if let Some(t) = flags.tol {
        tol.eq_tol = t;
        tol.psd_tol = t;
        tol.validate()?;
    }
    let powers = flags.powers.clone().unwrap_or_else(|| problem.powers.clone());
    if powers.is_empty() || powers.contains(&0) {
        return Err(Error::InvalidParameter("powers must be integers ≥ 1".into()));
    }
    let opts = CheckOptions {
        positivity: if flags.positivity_only {
            PositivityMode::Plain
        } else {
            PositivityMode::Complete
        },
        tfd: flags.tfd,
    };

    let mut reports = Vec::new();
    if let (Some(tau), Some(rho), Some(th)) = (&problem.channel, &problem.rho, &problem.theta) {
        for &k in &powers {
            let report = run_report_with(&tau.power(k), rho, th, &tol, opts)?;
            reports.push(PowerReport { power: k, report });
        }
    }
    let classical = problem.chain.as_ref().map(|c| {
        let detailed_balance = classical_detailed_balance(c, &tol);
        let phi_balance = classical_phi_balance(c, &tol);
        let consistent = detailed_balance.passed == phi_balance.passed;
        ClassicalReport {
            detailed_balance,
            phi_balance,
            consistent,
        }
    });

    let assertion_holds = match flags.assert {
        Assertion::None => None,
        Assertion::Db2 | Assertion::Sqdb if reports.is_empty() => {
            return Err(Error::InvalidParameter("assertion needs a channel in the file".into()))
        }
        Assertion::Db2 => Some(reports.iter().all(|r| r.report.db2())),
        Assertion::Sqdb => Some(reports.iter().all(|r| r.report.sqdb())),
        Assertion::Classical => match &classical {
            Some(c) => Some(c.detailed_balance.passed),
            None => return Err(Error::InvalidParameter("assertion needs a chain in the file".into())),
        },
    };
    Ok(RunOutcome {
        reports,
        classical,
        assertion: flags.assert,
        assertion_holds,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn check_row(out: &mut String, c: &CheckResult) {
    let _ = writeln!(out, "  {:<22} {:<5} {:>12.3e}", c.name, yes_no(c.passed), c.residual);
    for s in &c.detail {
        let _ = writeln!(out, "    {:<20} {:<5} {:>12.3e}  (≤ {:.0e})", s.name, yes_no(s.passed), s.value, s.threshold);
    }
    if let Some(note) = &c.note {
        let _ = writeln!(out, "    note: {note}");
    }
}

pub fn render_text(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    for pr in &outcome.reports {
        let r = &pr.report;
        let _ = writeln!(
            out,
            "power {}  (n = {}, degenerate = {}, positivity = {:?})",
            pr.power, r.dim, r.degenerate, r.positivity
        );
        let _ = writeln!(out, "  {:<22} {:<5} {:>12}", "check", "", "residual");
        for c in r.checks() {
            check_row(&mut out, c);
        }
        let _ = writeln!(out, "  hat_minus_tau          {:>18.3e}", r.hat_minus_tau);
        let _ = writeln!(out, "  consistency            {}", r.consistency);
        if let Some(t) = &r.tfd {
            let _ = writeln!(out, "  tfd consistency        {}", t.consistent);
        }
        out.push('\n');
    }
    if let Some(c) = &outcome.classical {
        let _ = writeln!(out, "classical chain");
        check_row(&mut out, &c.detailed_balance);
        check_row(&mut out, &c.phi_balance);
        let _ = writeln!(out, "  consistency            {}\n", c.consistent);
    }
    match outcome.assertion_holds {
        Some(h) => {
            let _ = writeln!(out, "assert {:?}: {}", outcome.assertion, if h { "holds" } else { "violated" });
        }
        None => {
            let _ = writeln!(out, "assert: none");
        }
    }
    out
}

pub fn render_json(outcome: &RunOutcome) -> String {
    serde_json::to_string_pretty(outcome).expect("report serializes")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SchurDb2,
    GadSqdb,
    RandomUnital,
    Metropolis,
    Cycle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateParams {
    pub n: usize,
    pub seed: u64,
    pub p: f64,
    pub s: f64,
    pub k: usize,
    pub min_eig: f64,
}

impl Default for GenerateParams {
    fn default() -> Self {
        GenerateParams {
            n: 3,
            seed: 0,
            p: 0.75,
            s: 0.2,
            k: 2,
            min_eig: 0.05,
        }
    }
}

fn chain_json(c: &ClassicalChain) -> Value {
    json!({ "p": c.p(), "gamma": c.gamma() })
}

/// Builds the problem file for a family. The density matrix is written as its
/// spectrum and the channel in the working basis, so parsing reproduces the
/// in-memory objects exactly.
pub fn generate_value(family: Family, params: &GenerateParams) -> Result<Value> {
    let seed = Seed(params.seed);
    let mut root = Map::new();
    let meta = match family {
        Family::SchurDb2 => {
            let rho = random_density(params.n, params.min_eig, seed)?;
            let tau = schur_db2_channel(&rho, Seed(params.seed.wrapping_add(1)))?;
            root.insert("rho".into(), json!(rho.eigenvalues()));
            root.insert(
                "channel".into(),
                json!({"kind": "matrix", "convention": CONVENTION, "data": matrix_json(tau.matrix())}),
            );
            json!({"family": "schur-db2", "n": params.n, "seed": params.seed, "min_eig": params.min_eig})
        }
        Family::GadSqdb => {
            let kraus = gad_kraus(params.p, params.s)?;
            root.insert("rho".into(), json!([params.p, 1.0 - params.p]));
            root.insert(
                "channel".into(),
                json!({"kind": "kraus", "data": kraus.ops().iter().map(matrix_json).collect::<Vec<_>>()}),
            );
            json!({"family": "gad-sqdb", "p": params.p, "s": params.s})
        }
        Family::RandomUnital => {
            let rho = random_density(params.n, params.min_eig, seed)?;
            let kraus = random_unital_kraus(params.n, params.k, Seed(params.seed.wrapping_add(1)))?;
            root.insert("rho".into(), json!(rho.eigenvalues()));
            root.insert(
                "channel".into(),
                json!({"kind": "kraus", "data": kraus.ops().iter().map(matrix_json).collect::<Vec<_>>()}),
            );
            json!({"family": "random-unital", "n": params.n, "k": params.k, "seed": params.seed, "min_eig": params.min_eig})
        }
        Family::Metropolis => {
            root.insert("chain".into(), chain_json(&metropolis_chain(params.n, seed)?));
            json!({"family": "metropolis", "n": params.n, "seed": params.seed})
        }
        Family::Cycle => {
            root.insert("chain".into(), chain_json(&cycle_chain(params.n)?));
            json!({"family": "cycle", "n": params.n})
        }
    };
    if root.contains_key("channel") {
        root.insert("theta".into(), json!({"kind": "transpose"}));
    }
    root.insert("time_powers".into(), json!([1]));
    root.insert("meta".into(), meta);
    Ok(Value::Object(root))
}

pub fn generate(family: Family, params: &GenerateParams) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&generate_value(family, params)?)?;
    text.push('\n');
    Ok(text)
}

#[derive(Parser, Debug)]
#[command(name = "qdb", version, about = "Detailed balance checks for finite-dimensional quantum dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the check battery on a problem file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Equality and positivity tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Use positivity instead of complete positivity.
        #[arg(long)]
        positivity_only: bool,
        /// Add the thermofield reformulations.
        #[arg(long)]
        tfd: bool,
        /// Exit with status 1 unless this property holds for every power.
        #[arg(long, value_enum, default_value_t = Assertion::None)]
        assert: Assertion,
        /// Comma-separated powers of the channel to check.
        #[arg(long, value_delimiter = ',')]
        powers: Option<Vec<u32>>,
    },
    /// Write a problem file for a controlled family.
    Generate {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        s: f64,
        /// Number of Kraus operators.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        min_eig: f64,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command line, writing to the given streams. Returns the exit
/// status.
pub fn execute(cli: Cli, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32 {
    let result = match cli.command {
        Command::Check {
            file,
            format,
            tol,
            positivity_only,
            tfd,
            assert,
            powers,
        } => {
            let flags = RunFlags {
                tol,
                positivity_only,
                tfd,
                assert,
                powers,
            };
            parse_problem(&file)
                .and_then(|p| run_checks(&p, &flags))
                .map(|outcome| {
                    let text = match format {
                        Format::Text => render_text(&outcome),
                        Format::Json => render_json(&outcome) + "\n",
                    };
                    (text, outcome.exit_code())
                })
        }
        Command::Generate {
            family,
            n,
            seed,
            p,
            s,
            k,
            min_eig,
            out,
        } => {
            let params = GenerateParams {
                n,
                seed,
                p,
                s,
                k,
                min_eig,
            };
            generate(family, &params).and_then(|text| match out {
                Some(path) => {
                    std::fs::write(path, text)?;
                    Ok((String::new(), EXIT_OK))
                }
                None => Ok((text, EXIT_OK)),
            })
        }
    };
    match result {
        Ok((text, code)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

/// Entry point for the binary: parses `std::env::args` and returns the exit
/// status. Usage errors exit with status 2.
pub fn main_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    execute(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
