use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tangle::eqcurves::{self, CurveQ};
use tangle::field::{parse_q, Q};
use tangle::json::{
    curve_from_json, curve_to_json, group_spec_from_json, group_to_json, poly_from_json, poly_to_json, q_to_json,
    ratfunc_to_json, EllipticCurveModel,
};
use tangle::modmat::{self, FiniteMatrixGroup, DEFAULT_BUDGET};
use tangle::poly::Poly;
use tangle::qpoly::{self, ExactPolynomial};
use tangle::{entangle, fixtures, frobsample, gaussperiod, stdgroups, Error, Result};

/// Entanglement calculus for mod-n images of elliptic curves.
///
/// Group, curve and polynomial arguments take inline JSON, a path to a JSON
/// file, or the name of an embedded fixture (see --list-fixtures).
#[derive(Parser, Debug)]
#[command(name = "tangle", version)]
struct Cli {
    /// Print the embedded fixtures and exit.
    #[arg(long, global = true)]
    list_fixtures: bool,
    /// Prime bound for Frobenius sweeps.
    #[arg(long, global = true, default_value_t = 10_000)]
    pbound: u64,
    /// Element budget for subgroup closures.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Pretty JSON output; `--json false` prints flattened `path = value` lines.
    #[arg(long, global = true, action = ArgAction::Set, default_value_t = true,
          num_args = 0..=1, default_missing_value = "true")]
    json: bool,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Entanglement reports, lattices and classification.
    #[command(subcommand)]
    Entangle(EntangleCmd),
    /// Subgroup constructions in GL(2, Z/n).
    #[command(subcommand)]
    Group(GroupCmd),
    /// Borel, Cartan and normalizer subgroups at a prime.
    Stdgroup {
        #[arg(long)]
        label: String,
        #[arg(long)]
        ell: u64,
    },
    /// CM Cartan subgroup (or its normalizer) at level n.
    Cartan {
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long, default_value_t = 1)]
        f: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        normalizer: bool,
    },
    /// Exact polynomial operations.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Elliptic curve invariants, twists and families.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Frobenius sampling.
    #[command(subcommand)]
    Frob(FrobCmd),
    /// Gauss period polynomials and their companion family.
    #[command(subcommand)]
    Gauss(GaussCmd),
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(long)]
    group: String,
    #[arg(long)]
    a: u32,
    #[arg(long)]
    b: u32,
}

#[derive(Subcommand, Debug)]
enum EntangleCmd {
    Report(Pair),
    Lattice {
        #[arg(long)]
        group: String,
    },
    Classify(Pair),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Close a generator list and report order and fingerprint.
    Closure {
        #[arg(long)]
        group: String,
    },
    /// Kernel of reduction to level e.
    Kernel {
        #[arg(long)]
        group: String,
        #[arg(long)]
        e: u32,
    },
    Join {
        #[arg(long)]
        group: String,
        #[arg(long)]
        other: String,
    },
    /// Fingerprint of G/N.
    Quotient {
        #[arg(long)]
        group: String,
        #[arg(long)]
        normal: String,
    },
    /// Prime-power projections.
    Crt {
        #[arg(long)]
        group: String,
    },
}

#[derive(Subcommand, Debug)]
enum PolyCmd {
    /// m-th division polynomial of a curve over Q or Q(t).
    Division {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        m: u32,
    },
    Disc {
        #[arg(long)]
        poly: String,
    },
    /// Rational factors of degree at most dmax.
    Factors {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 3)]
        dmax: usize,
    },
    Fingerprint {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
    },
    /// Compare splitting fields at all primes up to --pbound.
    Samefield {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
}

#[derive(Subcommand, Debug)]
enum CurveCmd {
    Invariants {
        #[arg(long)]
        curve: String,
    },
    Twist {
        #[arg(long)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    Serre {
        #[arg(long)]
        curve: String,
    },
    /// Fiber of a named family at t.
    Specialize {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Prime parameter for serre_p.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Rational point on the conic C_d with d = m² + n².
    Cdpoint {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Subcommand, Debug)]
enum FrobCmd {
    Count {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        p: u64,
    },
    Signature {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Test a candidate image against Frobenius classes for p ≤ --pbound.
    Verify {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        group: String,
    },
}

#[derive(Subcommand, Debug)]
enum GaussCmd {
    Period {
        #[arg(long)]
        ell: u64,
    },
    Family {
        #[arg(long)]
        ell: u64,
        /// Comma-separated rationals b_1..b_e.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        check_2torsion: bool,
    },
}

struct Ctx {
    pbound: u64,
    budget: usize,
}

/// Inline JSON, or the contents of an existing file. `None` means "try a fixture name".
fn load_json(arg: &str) -> Result<Option<Value>> {
    let s = arg.trim();
    let text = if s.starts_with('{') || s.starts_with('[') {
        s.to_string()
    } else if Path::new(s).is_file() {
        std::fs::read_to_string(s).map_err(|e| Error::invalid(format!("cannot read {s}: {e}")))?
    } else {
        return Ok(None);
    };
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Error::invalid(format!("invalid JSON in {s}: {e}")))
}

impl Ctx {
    fn group(&self, arg: &str) -> Result<FiniteMatrixGroup> {
        let spec = match load_json(arg)? {
            Some(v) => group_spec_from_json(&v)?,
            None => fixtures::group_spec(arg)?,
        };
        spec.build_with_budget(self.budget)
    }
}

fn curve_model(arg: &str) -> Result<EllipticCurveModel> {
    match load_json(arg)? {
        Some(v) => curve_from_json(&v),
        None if eqcurves::FAMILY_NAMES.contains(&arg) => Ok(EllipticCurveModel::Qt(eqcurves::family(arg, None)?)),
        None => Ok(EllipticCurveModel::Q(fixtures::curve(arg)?)),
    }
}

fn curve_q(arg: &str) -> Result<CurveQ> {
    match curve_model(arg)? {
        EllipticCurveModel::Q(e) => Ok(e),
        EllipticCurveModel::Qt(_) => Err(Error::invalid("this command needs a curve over Q")),
    }
}

fn poly_any(arg: &str) -> Result<ExactPolynomial> {
    let v = load_json(arg)?.ok_or_else(|| Error::invalid(format!("{arg:?} is neither JSON nor a readable file")))?;
    poly_from_json(&v)
}

fn poly_q(arg: &str) -> Result<Poly<Q>> {
    match poly_any(arg)? {
        ExactPolynomial::Q(f) => Ok(f),
        ExactPolynomial::Qt(_) => Err(Error::invalid("this command needs a polynomial over Q")),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run(cmd: Cmd, ctx: &Ctx) -> Result<Value> {
    Ok(match cmd {
        Cmd::Entangle(c) => match c {
            EntangleCmd::Report(p) => to_value(&entangle::entanglement_report(&ctx.group(&p.group)?, p.a, p.b)?),
            EntangleCmd::Lattice { group } => to_value(&entangle::entanglement_lattice(&ctx.group(&group)?)?),
            EntangleCmd::Classify(p) => to_value(&entangle::classify(&ctx.group(&p.group)?, p.a, p.b)?),
        },
        Cmd::Group(c) => match c {
            GroupCmd::Closure { group } => group_to_json(&ctx.group(&group)?),
            GroupCmd::Kernel { group, e } => group_to_json(&ctx.group(&group)?.kernel_of_reduction(e)?),
            GroupCmd::Join { group, other } => group_to_json(&modmat::join(&ctx.group(&group)?, &ctx.group(&other)?)?),
            GroupCmd::Quotient { group, normal } => {
                to_value(&modmat::quotient_fingerprint(&ctx.group(&group)?, &ctx.group(&normal)?)?)
            }
            GroupCmd::Crt { group } => {
                let (parts, full) = ctx.group(&group)?.crt_split()?;
                json!({
                    "projections": parts.iter().map(group_to_json).collect::<Vec<_>>(),
                    "full_fiber_product": full,
                })
            }
        },
        Cmd::Stdgroup { label, ell } => group_to_json(&stdgroups::standard_subgroup(&label, ell)?),
        Cmd::Cartan { dk, f, n, normalizer } => {
            let params = stdgroups::cartan_params(dk, f, n)?;
            let g = if normalizer {
                stdgroups::cartan_normalizer(&params)?
            } else {
                stdgroups::cartan_group(&params)?
            };
            let mut out = group_to_json(&g);
            out["params"] = to_value(&params);
            out
        }
        Cmd::Poly(c) => match c {
            PolyCmd::Division { curve, m } => match curve_model(&curve)? {
                EllipticCurveModel::Q(e) => poly_to_json(&ExactPolynomial::Q(qpoly::division_polynomial(&e, m)?)),
                EllipticCurveModel::Qt(e) => poly_to_json(&ExactPolynomial::Qt(qpoly::division_polynomial(&e, m)?)),
            },
            PolyCmd::Disc { poly } => match poly_any(&poly)? {
                ExactPolynomial::Q(f) => {
                    let (d, class) = qpoly::discriminant_with_class(&f)?;
                    json!({"discriminant": q_to_json(&d), "square_class": class.to_string()})
                }
                ExactPolynomial::Qt(f) => json!({"discriminant": ratfunc_to_json(&qpoly::poly_discriminant(&f)?)}),
            },
            PolyCmd::Factors { poly, dmax } => {
                let fs = qpoly::small_rational_factors(&poly_q(&poly)?, dmax)?;
                json!({"factors": fs.into_iter().map(|f| poly_to_json(&ExactPolynomial::Q(f))).collect::<Vec<_>>()})
            }
            PolyCmd::Fingerprint { poly, p } => to_value(&qpoly::factor_fingerprint_mod_p(&poly_q(&poly)?, p)?),
            PolyCmd::Samefield { f, g } => {
                to_value(&qpoly::same_splitting_field_mc(&poly_q(&f)?, &poly_q(&g)?, ctx.pbound)?)
            }
        },
        Cmd::Curve(c) => match c {
            CurveCmd::Invariants { curve } => match curve_model(&curve)? {
                EllipticCurveModel::Q(e) => to_value(&eqcurves::curve_invariants(&e)?),
                EllipticCurveModel::Qt(e) => json!({
                    "j": ratfunc_to_json(&e.j_invariant()),
                    "discriminant": ratfunc_to_json(&e.discriminant()),
                }),
            },
            CurveCmd::Twist { curve, d } => {
                let e = eqcurves::quadratic_twist(&curve_q(&curve)?, &d.into())?;
                curve_to_json(&EllipticCurveModel::Q(e))
            }
            CurveCmd::Serre { curve } => to_value(&eqcurves::serre_entanglement(&curve_q(&curve)?)?),
            CurveCmd::Specialize { family, t, p } => {
                let e = eqcurves::family_specialize(&family, &parse_q(&t)?, p)?;
                curve_to_json(&EllipticCurveModel::Q(e))
            }
            CurveCmd::Cdpoint { m, n } => {
                let (x, y) = eqcurves::c_d_point(m, n)?;
                json!({"d": (m * m + n * n).to_string(), "x": q_to_json(&x), "y": q_to_json(&y)})
            }
        },
        Cmd::Frob(c) => match c {
            FrobCmd::Count { curve, p } => {
                let count = frobsample::count_points(&curve_q(&curve)?, p)?;
                json!({"prime": p, "count": count, "a_p": p as i64 + 1 - count as i64})
            }
            FrobCmd::Signature { curve, p, n } => to_value(&frobsample::frob_signature(&curve_q(&curve)?, p, n)?),
            FrobCmd::Verify { curve, group } => {
                to_value(&frobsample::verify_image(&curve_q(&curve)?, &ctx.group(&group)?, ctx.pbound)?)
            }
        },
        Cmd::Gauss(c) => match c {
            GaussCmd::Period { ell } => {
                let pp = gaussperiod::period_polynomial(ell)?;
                let mut out = to_value(&pp);
                out["polynomial"] = poly_to_json(&ExactPolynomial::Q(pp.poly.clone()));
                out
            }
            GaussCmd::Family { ell, b, check_2torsion } => {
                let base = gaussperiod::period_polynomial(ell)?.poly;
                let b: Vec<Q> = b.split(',').map(parse_q).collect::<Result<_>>()?;
                let member = gaussperiod::companion_family(&base, &b)?;
                let mut out = to_value(&member);
                if check_2torsion {
                    out["two_torsion"] = if member.on_discriminant_locus {
                        Value::Null
                    } else {
                        to_value(&gaussperiod::two_torsion_match(&base, &member.member, ctx.pbound)?)
                    };
                }
                out
            }
        },
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out))
        }
        Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
        _ => out.push_str(&format!("{prefix} = {v}\n")),
    }
}

fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
    } else {
        let mut s = String::new();
        flatten("", v, &mut s);
        s
    }
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    let v = json!({"error": {"code": code, "kind": kind, "message": message.trim_end()}});
    eprintln!("{v}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::UnknownArgument
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => fail(2, "usage", &e.to_string()),
                _ => fail(3, "validation", &e.to_string()),
            };
        }
    };
    if cli.list_fixtures {
        print!("{}", render(&to_value(&fixtures::list()), cli.json));
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        return fail(2, "usage", "no subcommand given (try --help)");
    };
    let ctx = Ctx {
        pbound: cli.pbound,
        budget: cli.budget,
    };
    match run(cmd, &ctx) {
        Ok(v) => {
            print!("{}", render(&v, cli.json));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.code() as u8, e.kind(), &e.to_string()),
    }
}
