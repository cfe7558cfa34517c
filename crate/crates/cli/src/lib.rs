//! The `padic` command-line tool: argument handling, JSON and text
//! reports, exit codes, and the built-in acceptance suite.

pub mod acceptance;
pub mod input;
pub mod report;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_core::dynamics::{
    compute_rho, ergodicity_verdict, induced_cell_map, orbit, verify_isometry, DynamicsConfig, ErgodicityVerdict,
    IsometryCheck, OrbitError, RationalMap, RhoOutcome,
};
use padic_core::groups::{check_group_axioms, iso, BallGroup, CarrierGroup, Group, SphereGroup};
use padic_core::measure::{haar_clopen, normalized_measure};
use padic_core::padic::{render_rational, DEFAULT_PRECISION};
use padic_core::{ClopenSet, Error, PAdic, Prime, Region, Sphere};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const PRECISION_ENV: &str = "PADIC_PRECISION";

/// Smallest precision accepted outside `num`.
pub const MIN_PRECISION: u32 = 8;

pub mod exit {
    pub const OK: i32 = 0;
    pub const REFUTED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const PRECISION: i32 = 3;
}

#[derive(Parser, Debug)]
#[command(name = "padic", version, about = "Exact p-adic groups, Haar measure, and isometry dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Arithmetic in Q_p
    Num {
        #[command(subcommand)]
        op: NumOp,
    },
    /// Group operations on balls and spheres
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Haar measure of a union of balls inside a sphere
    Measure(MeasureArgs),
    /// Dynamics of a rational map on a sphere
    Dyn {
        #[command(subcommand)]
        op: DynOp,
    },
    /// Run the built-in acceptance suite
    Selftest {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// The prime p
    #[arg(long = "p")]
    pub p: u64,
    /// Working precision in digits
    #[arg(long, env = PRECISION_ENV)]
    pub prec: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct Binary {
    #[command(flatten)]
    pub common: Common,
    #[arg(allow_hyphen_values = true)]
    pub a: String,
    #[arg(allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Args, Debug)]
pub struct Unary {
    #[command(flatten)]
    pub common: Common,
    #[arg(allow_hyphen_values = true)]
    pub a: String,
}

#[derive(Subcommand, Debug)]
pub enum NumOp {
    Add(Binary),
    Sub(Binary),
    Mul(Binary),
    Div(Binary),
    Inv(Unary),
    Neg(Unary),
    /// |x|_p as p^e, or 0
    Norm(Unary),
    /// Expansion of a rational or literal
    From(Unary),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Ball,
    Sphere,
}

#[derive(Args, Debug, Clone)]
pub struct Carrier {
    #[command(flatten)]
    pub common: Common,
    /// Center a of the carrier
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub center: String,
    /// Radius exponent e, radius p^e
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub exp: i64,
}

#[derive(Args, Debug)]
pub struct GroupBinary {
    #[command(flatten)]
    pub carrier: Carrier,
    #[arg(allow_hyphen_values = true)]
    pub x: String,
    #[arg(allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Args, Debug)]
pub struct GroupUnary {
    #[command(flatten)]
    pub carrier: Carrier,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Args, Debug)]
pub struct IsoArgs {
    #[command(flatten)]
    pub carrier: Carrier,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub to_center: String,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub to_exp: i64,
    #[arg(allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub carrier: Carrier,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum GroupOp {
    /// x ⊕ y on the ball V(a)
    Oplus(GroupBinary),
    /// x ⊙ y on the sphere S(a)
    Odot(GroupBinary),
    Inv(GroupUnary),
    /// The isomorphism onto the group with --to-center/--to-exp
    Iso(IsoArgs),
    /// Randomized check of the group laws
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SphereArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "0", allow_hyphen_values = true, conflicts_with = "sphere")]
    pub sphere_center: String,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true, conflicts_with = "sphere")]
    pub sphere_exp: i64,
    /// The sphere as S[e](c), instead of --sphere-center/--sphere-exp
    #[arg(long)]
    pub sphere: Option<String>,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// Disjoint balls V[e](c), separated by spaces or commas
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug)]
pub struct DynArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// The map, e.g. "x+2" or "(x+2)/(2x+1)"
    #[arg(long)]
    pub map: String,
    /// Orbit start; defaults to the center of the first cell
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Deepest cell level examined
    #[arg(long, default_value_t = 8)]
    pub levels: u32,
    #[arg(long, default_value_t = 64)]
    pub trials: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum DynOp {
    /// Look for a violation of the isometry property
    Verify(DynArgs),
    /// The displacement |f(x) - x| on the sphere
    Rho(DynArgs),
    Orbit(DynArgs),
    /// Ergodicity verdict up to --levels
    Ergodic(DynArgs),
    /// Permutation induced on the cells of level --levels
    Perm(DynArgs),
}

/// Parsed settings shared by every command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub prime: Prime,
    pub precision: u32,
    pub seed: u64,
    pub json: bool,
}

impl RunConfig {
    fn new(common: &Common, seed: u64, min_precision: u32) -> Result<Self, Failure> {
        let prime = Prime::new(common.p)?;
        let precision = common.prec.unwrap_or(DEFAULT_PRECISION);
        if precision < min_precision {
            return Err(Failure::Usage(format!(
                "--prec must be at least {min_precision} for this command"
            )));
        }
        Ok(RunConfig {
            prime,
            precision,
            seed,
            json: common.json,
        })
    }
}

/// Why a command did not produce an answer.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    /// An orbit stopped partway; carries the iterate reached.
    Orbit(OrbitError),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => exit::INPUT,
            Failure::Core(e) => error_exit_code(e),
            Failure::Orbit(e) => error_exit_code(&e.error),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Orbit(e) => write!(f, "{e}"),
            Failure::Usage(s) => f.write_str(s),
        }
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted | Error::InsufficientPrecision | Error::ResourceLimit { .. } => exit::PRECISION,
        Error::NotPermutation { .. } | Error::InvarianceFailed => exit::REFUTED,
        _ => exit::INPUT,
    }
}

/// A finished command: the report and its exit code.
pub struct Outcome {
    pub report: Value,
    pub code: i32,
    pub json: bool,
}

fn answer<T: Serialize>(report: T, code: i32, cfg: &RunConfig) -> Result<Outcome, Failure> {
    Ok(Outcome {
        report: serde_json::to_value(report).expect("reports serialize"),
        code,
        json: cfg.json,
    })
}

/// Parses `argv` (program name first), runs the command, and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return exit::OK;
                }
                _ => exit::INPUT,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    if let Command::Selftest { json } = cli.command {
        return selftest(json, out);
    }
    match dispatch(cli.command) {
        Ok(outcome) => {
            let text = if outcome.json {
                let mut s = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
                s.push('\n');
                s
            } else {
                report::human(&outcome.report)
            };
            let _ = out.write_all(text.as_bytes());
            outcome.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn selftest(json: bool, out: &mut dyn Write) -> i32 {
    let results = acceptance::run_all();
    if json {
        let rows: Vec<Value> = results
            .iter()
            .map(|r| json!({"criterion": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
            .collect();
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializes"));
    } else {
        for r in &results {
            let _ = writeln!(out, "{r}");
        }
    }
    if results.iter().all(|r| r.passed) {
        exit::OK
    } else {
        exit::REFUTED
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Num { op } => num(op),
        Command::Group { op } => group(op),
        Command::Measure(args) => measure(args),
        Command::Dyn { op } => dynamics(op),
        Command::Selftest { .. } => unreachable!("handled by run"),
    }
}

fn num(op: NumOp) -> Result<Outcome, Failure> {
    let (name, common, a, b) = match &op {
        NumOp::Add(x) => ("add", &x.common, &x.a, Some(&x.b)),
        NumOp::Sub(x) => ("sub", &x.common, &x.a, Some(&x.b)),
        NumOp::Mul(x) => ("mul", &x.common, &x.a, Some(&x.b)),
        NumOp::Div(x) => ("div", &x.common, &x.a, Some(&x.b)),
        NumOp::Inv(x) => ("inv", &x.common, &x.a, None),
        NumOp::Neg(x) => ("neg", &x.common, &x.a, None),
        NumOp::Norm(x) => ("norm", &x.common, &x.a, None),
        NumOp::From(x) => ("from", &x.common, &x.a, None),
    };
    let cfg = RunConfig::new(common, DEFAULT_SEED, 1)?;
    let x = input::operand(a, cfg.prime, cfg.precision)?;
    let y = b.map(|b| input::operand(b, cfg.prime, cfg.precision)).transpose()?;
    let result = match (name, y) {
        ("add", Some(y)) => x.checked_add(&y)?.render(),
        ("sub", Some(y)) => x.checked_sub(&y)?.render(),
        ("mul", Some(y)) => x.checked_mul(&y)?.render(),
        ("div", Some(y)) => x.checked_div(&y)?.render(),
        ("inv", _) => x.inv()?.render(),
        ("neg", _) => x.negate().render(),
        ("norm", _) => match x.norm()? {
            Some(r) => report::radius(cfg.prime, r),
            None => "0".to_string(),
        },
        _ => x.render(),
    };
    answer(json!({ "result": result }), exit::OK, &cfg)
}

fn carrier_group(c: &Carrier, kind: Kind, cfg: &RunConfig) -> Result<Group, Failure> {
    let center = input::operand(&c.center, cfg.prime, cfg.precision)?;
    Ok(carrier_group_at(center, c.exp, kind, cfg)?)
}

fn carrier_group_at(center: PAdic, exp: i64, kind: Kind, cfg: &RunConfig) -> Result<Group, Error> {
    Ok(match kind {
        Kind::Ball => Group::Ball(BallGroup::new(center, exp)?),
        Kind::Sphere => Group::Sphere(SphereGroup::new(center, exp, cfg.precision)),
    })
}

fn group(op: GroupOp) -> Result<Outcome, Failure> {
    match op {
        GroupOp::Oplus(args) => group_binary(args, Kind::Ball),
        GroupOp::Odot(args) => group_binary(args, Kind::Sphere),
        GroupOp::Inv(args) => {
            let cfg = RunConfig::new(&args.carrier.common, DEFAULT_SEED, MIN_PRECISION)?;
            let g = carrier_group(&args.carrier, args.kind, &cfg)?;
            let x = input::operand(&args.x, cfg.prime, cfg.precision)?;
            answer(json!({ "result": g.inverse(&x)?.render() }), exit::OK, &cfg)
        }
        GroupOp::Iso(args) => {
            let cfg = RunConfig::new(&args.carrier.common, DEFAULT_SEED, MIN_PRECISION)?;
            let src = carrier_group(&args.carrier, args.kind, &cfg)?;
            let to = input::operand(&args.to_center, cfg.prime, cfg.precision)?;
            let dst = carrier_group_at(to, args.to_exp, args.kind, &cfg)?;
            let x = input::operand(&args.x, cfg.prime, cfg.precision)?;
            answer(json!({ "result": iso(&src, &dst, &x)?.render() }), exit::OK, &cfg)
        }
        GroupOp::Check(args) => {
            let cfg = RunConfig::new(&args.carrier.common, args.seed, MIN_PRECISION)?;
            let g = carrier_group(&args.carrier, args.kind, &cfg)?;
            let rep = check_group_axioms(&g, args.trials, cfg.seed, cfg.precision);
            let code = if rep.passed() { exit::OK } else { exit::REFUTED };
            answer(report::axioms(&rep), code, &cfg)
        }
    }
}

fn group_binary(args: GroupBinary, kind: Kind) -> Result<Outcome, Failure> {
    let cfg = RunConfig::new(&args.carrier.common, DEFAULT_SEED, MIN_PRECISION)?;
    let g = carrier_group(&args.carrier, kind, &cfg)?;
    let x = input::operand(&args.x, cfg.prime, cfg.precision)?;
    let y = input::operand(&args.y, cfg.prime, cfg.precision)?;
    let r = g.op(&x, &y)?;
    answer(json!({ "result": r.render(), "identity": g.identity().render() }), exit::OK, &cfg)
}

fn sphere_of(args: &SphereArgs, cfg: &RunConfig) -> Result<Sphere, Failure> {
    Ok(match &args.sphere {
        Some(text) => input::sphere(text, cfg.prime, cfg.precision)?,
        None => Sphere::new(input::operand(&args.sphere_center, cfg.prime, cfg.precision)?, args.sphere_exp),
    })
}

fn measure(args: MeasureArgs) -> Result<Outcome, Failure> {
    let cfg = RunConfig::new(&args.sphere.common, DEFAULT_SEED, MIN_PRECISION)?;
    let s = sphere_of(&args.sphere, &cfg)?;
    let balls = input::ball_list(&args.set, cfg.prime, cfg.precision)?;
    let set = ClopenSet::new(Region::Sphere(s.clone()), balls)?;
    let haar = haar_clopen(&set)?;
    let normalized = normalized_measure(&s, &set)?;
    answer(
        report::MeasureJson {
            haar: render_rational(&haar),
            normalized: render_rational(&normalized),
        },
        exit::OK,
        &cfg,
    )
}

fn dynamics(op: DynOp) -> Result<Outcome, Failure> {
    let (name, args) = match op {
        DynOp::Verify(a) => ("verify", a),
        DynOp::Rho(a) => ("rho", a),
        DynOp::Orbit(a) => ("orbit", a),
        DynOp::Ergodic(a) => ("ergodic", a),
        DynOp::Perm(a) => ("perm", a),
    };
    let cfg = RunConfig::new(&args.sphere.common, args.seed, MIN_PRECISION)?;
    let s = sphere_of(&args.sphere, &cfg)?;
    let f = RationalMap::parse(&args.map)?;
    let dcfg = DynamicsConfig::with_precision(cfg.precision);
    let p = cfg.prime;
    match name {
        "verify" => {
            let check = verify_isometry(&s, &f, args.trials, cfg.seed, &dcfg)?;
            let code = if matches!(check, IsometryCheck::Pass { .. }) { exit::OK } else { exit::REFUTED };
            answer(report::verify(&check), code, &cfg)
        }
        "rho" => {
            let outcome = compute_rho(&s, &f, args.trials, cfg.seed, &dcfg)?;
            let code = if matches!(outcome, RhoOutcome::Constant(_)) { exit::OK } else { exit::REFUTED };
            answer(report::rho(p, &outcome), code, &cfg)
        }
        "orbit" => {
            let start = match &args.start {
                Some(t) => input::operand(t, p, cfg.precision)?,
                None => s.cells(1, dcfg.cell_cap)?[0].point(-s.exp() + cfg.precision as i64),
            };
            if !s.contains(&start)? {
                return Err(Error::NotOnSphere.into());
            }
            let record = orbit(&f, &start, args.iters, &dcfg).map_err(Failure::Orbit)?;
            answer(report::orbit(p, &record), exit::OK, &cfg)
        }
        "perm" => {
            let perm = induced_cell_map(&s, &f, args.levels, &dcfg)?;
            answer(
                report::PermJson {
                    level: perm.level(),
                    image: perm.image().to_vec(),
                    cycles: perm.cycle_structure().lengths,
                },
                exit::OK,
                &cfg,
            )
        }
        _ => {
            let rep = ergodicity_verdict(&s, &f, args.levels, args.trials, cfg.seed, &dcfg)?;
            let code = match rep.verdict {
                ErgodicityVerdict::NotErgodic(_) | ErgodicityVerdict::ErgodicUpToLevel(_) => exit::OK,
                _ => exit::REFUTED,
            };
            answer(report::verdict(p, &rep), code, &cfg)
        }
    }
}
