//! `dmf`: batch front end to the library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 precision, 3 domain or
//! unsupported, 4 resource cap, 64 usage.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use drinfeld_eis::arithmetic::{primitive_monic_reps, CongClass};
use drinfeld_eis::config::{parse_poly, parse_poly_vec, Format, Report, RunConfig};
use drinfeld_eis::drinfeld::{
    division_points, division_poly, drinfeld_coeffs, exp_coeffs, goss_poly, ExpMethod,
};
use drinfeld_eis::eisenstein::{
    eisenstein_full, eisenstein_partial, eisenstein_restricted, embed_jn, Method,
};
use drinfeld_eis::error::{Error, Result};
use drinfeld_eis::lattice::{smb_reduce, Builtin, LatticeFrame};
use drinfeld_eis::modspace::{cusp_count, invariants_csv, invariants_table, CountMethod};
use drinfeld_eis::series::{Series, SeriesJson, TowerRef};
use drinfeld_eis::verify::{run_suite, Ctx};

#[derive(Parser)]
#[command(
    name = "dmf",
    version,
    about = "Eisenstein series and Drinfeld modules over F_q[T]"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Size of the constant field (a prime power).
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,
    /// Residue field degree of the series field over F_q.
    #[arg(long = "ext-m", global = true, default_value_t = 1)]
    ext_m: u32,
    /// Ramification index: the series variable u satisfies u^e = 1/T.
    #[arg(long = "ram-e", global = true, default_value_t = 1)]
    ram_e: u32,
    /// Relative precision in u-digits.
    #[arg(long = "P", global = true, default_value_t = 48)]
    precision: i64,
    /// Largest deg N in enumerations and tables.
    #[arg(long = "deg-cap", global = true, default_value_t = 3)]
    deg_cap: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

#[derive(Args)]
struct FrameArgs {
    /// carlitz | rank2-sqrt | rank3-cbrt
    #[arg(long, conflicts_with = "frame")]
    builtin: Option<String>,
    /// JSON file holding a list of series.
    #[arg(long)]
    frame: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EisKind {
    Full,
    Partial,
    Restricted,
}

#[derive(Clone, Copy, ValueEnum)]
enum RestrictedMethod {
    Direct,
    Moebius,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrinfeldWhat {
    Phi,
    Exp,
    Division,
    Goss,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate E_k, E_{k,u} or F_{k,u}.
    Eis {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = EisKind::Full)]
        kind: EisKind,
        /// Level N as coefficients, constant term first: 0,1 is T.
        #[arg(long, default_value = "0,1")]
        level: String,
        /// Numerators of u separated by '/': 1/0 is (1/N, 0). Defaults to every representative.
        #[arg(long)]
        u: Option<String>,
        #[arg(long, value_enum, default_value_t = RestrictedMethod::Moebius)]
        method: RestrictedMethod,
    },
    /// Exponential coefficients, φ_T, φ_N with division values, or Goss polynomials.
    Drinfeld {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, value_enum, default_value_t = DrinfeldWhat::Phi)]
        what: DrinfeldWhat,
        /// Number of exponential coefficients, or the Goss index.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "0,1")]
        level: String,
        #[arg(long, value_enum, default_value_t = ExpRoute::Product)]
        route: ExpRoute,
    },
    /// Successive minimum basis of a frame.
    Smb {
        #[command(flatten)]
        frame: FrameArgs,
    },
    /// Genus, cusps and dimensions of the rank-two modular curves, or cusp counts in rank r.
    Invariants {
        #[arg(long = "deg-max", default_value_t = 2)]
        deg_max: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long = "k-max", default_value_t = 5)]
        k_max: u32,
    },
    /// The coordinate vector (E_u(ω)) over the representatives of level N.
    Embed {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, default_value = "0,1")]
        level: String,
    },
    /// Run the identity checks.
    Verify {
        /// all, list, or a comma-separated list of check names.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Perturb g_1 before the functional-equation residual (mutation test).
        #[arg(long = "corrupt-g1", hide = true)]
        corrupt_g1: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpRoute {
    Product,
    Eisenstein,
}

fn load_frame(cfg: &RunConfig, args: &FrameArgs) -> Result<(TowerRef, LatticeFrame, String)> {
    match (&args.builtin, &args.frame) {
        (Some(name), _) => {
            let b = Builtin::parse(name)?;
            let t = cfg.tower(b.min_e())?;
            Ok((t.clone(), b.frame(&t)?, b.name().to_string()))
        }
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            let js: Vec<SeriesJson> =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            let e = js
                .first()
                .ok_or_else(|| Error::Parse("empty frame".into()))?
                .e;
            if cfg.ram_e != 1 && cfg.ram_e != e {
                return Err(Error::SpecMismatch);
            }
            let cfg = RunConfig {
                ram_e: e,
                ..cfg.clone()
            };
            let t = cfg.tower(e)?;
            Ok((t.clone(), LatticeFrame::from_json(&t, &js)?, path.clone()))
        }
        (None, None) => Err(Error::Parse("give --builtin or --frame".into())),
    }
}

fn series_list(xs: &[Series]) -> Vec<SeriesJson> {
    xs.iter().map(Series::to_json).collect()
}

enum Output {
    Json(Value),
    Csv(String),
    Verify(Value, String, i32),
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Output> {
    let p = cfg.precision;
    let csv = cfg.format == Format::Csv;
    let no_csv = || {
        Err(Error::Unsupported(
            "csv output exists for invariants and verify only".into(),
        ))
    };
    match &cli.cmd {
        Cmd::Eis {
            frame,
            k,
            kind,
            level,
            u,
            method,
        } => {
            if csv {
                return no_csv();
            }
            let (t, f, name) = load_frame(cfg, frame)?;
            let fq = t.fq();
            if let EisKind::Full = kind {
                let v = eisenstein_full(&f, *k, p)?;
                return Ok(Output::Json(
                    json!({ "frame": name, "kind": "full", "value": v.to_json() }),
                ));
            }
            let n = parse_poly(level, fq)?;
            let us: Vec<CongClass> = match u {
                Some(s) => vec![CongClass::new(n.clone(), parse_poly_vec(s, fq)?, fq)?],
                None => primitive_monic_reps(&n, f.rank(), fq)?
                    .into_iter()
                    .map(|v| CongClass::new(n.clone(), v, fq))
                    .collect::<Result<_>>()?,
            };
            let mut rows = Vec::new();
            for cl in &us {
                let v = match kind {
                    EisKind::Partial => eisenstein_partial(&f, *k, cl, p)?,
                    _ => eisenstein_restricted(
                        &f,
                        *k,
                        cl,
                        p,
                        match method {
                            RestrictedMethod::Direct => Method::Direct,
                            RestrictedMethod::Moebius => Method::Moebius,
                        },
                    )?,
                };
                rows.push(json!({ "u": cl.numerators.iter().map(|a| a.to_ints(fq)).collect::<Vec<_>>(), "value": v.to_json() }));
            }
            let kind = if matches!(kind, EisKind::Partial) {
                "partial"
            } else {
                "restricted"
            };
            Ok(Output::Json(
                json!({ "frame": name, "kind": kind, "level": n.to_ints(fq), "values": rows }),
            ))
        }
        Cmd::Drinfeld {
            frame,
            what,
            n,
            level,
            route,
        } => {
            if csv {
                return no_csv();
            }
            let (t, f, name) = load_frame(cfg, frame)?;
            let fq = t.fq();
            let out = match what {
                DrinfeldWhat::Exp => {
                    let m = match route {
                        ExpRoute::Product => ExpMethod::Product,
                        ExpRoute::Eisenstein => ExpMethod::Eisenstein,
                    };
                    let x = exp_coeffs(&f, *n, m, p)?;
                    json!({ "method": x.method, "d_used": x.d_used, "alphas": series_list(&x.alphas) })
                }
                DrinfeldWhat::Phi => {
                    let m = drinfeld_coeffs(&f, p)?;
                    json!({ "rank": m.rank(), "phi_t": m.phi_t.to_json(), "d_used": m.exp.d_used })
                }
                DrinfeldWhat::Division => {
                    let nn = parse_poly(level, fq)?;
                    if !nn.is_monic() {
                        return Err(Error::Domain("give a monic level; φ_{cN} = c φ_N".into()));
                    }
                    let m = drinfeld_coeffs(&f, p)?;
                    let phi = division_poly(&m.phi_t, &nn)?;
                    let us = drinfeld_eis::arithmetic::nonzero_classes(&nn, f.rank(), fq)?;
                    let ds = division_points(&f, &us, p)?;
                    let pts: Vec<Value> = ds
                        .iter()
                        .map(|d| json!({ "u": d.class.numerators.iter().map(|a| a.to_ints(fq)).collect::<Vec<_>>(), "d_u": d.value.to_json(), "terms": d.terms }))
                        .collect();
                    json!({ "level": nn.to_ints(fq), "phi_n": phi.to_json(), "division_points": pts })
                }
                DrinfeldWhat::Goss => {
                    let g = goss_poly(&f, *n, p)?;
                    json!({ "k": g.k, "coeffs": g.to_json() })
                }
            };
            Ok(Output::Json(json!({ "frame": name, "result": out })))
        }
        Cmd::Smb { frame } => {
            if csv {
                return no_csv();
            }
            let (t, f, name) = load_frame(cfg, frame)?;
            let c = smb_reduce(&f)?;
            Ok(Output::Json(
                json!({ "frame": name, "smb": c.to_json(t.fq()) }),
            ))
        }
        Cmd::Invariants { deg_max, r, k_max } => {
            let t = cfg.tower(1)?;
            let fq = t.fq();
            if *deg_max > cfg.deg_cap {
                return Err(Error::Resource(format!(
                    "deg-max {deg_max} exceeds deg-cap {}",
                    cfg.deg_cap
                )));
            }
            if *r == 2 {
                let rows = invariants_table(*deg_max, *k_max, fq)?;
                if csv {
                    return Ok(Output::Csv(invariants_csv(&rows)));
                }
                return Ok(Output::Json(json!({ "r": 2, "rows": rows })));
            }
            if csv {
                return no_csv();
            }
            let mut rows = Vec::new();
            for d in 1..=*deg_max {
                for n in drinfeld_eis::arithmetic::monic_of_degree(d, fq) {
                    rows.push(json!({ "n": n.to_ints(fq), "cusps": cusp_count(&n, *r, CountMethod::Formula, fq)? }));
                }
            }
            Ok(Output::Json(json!({ "r": r, "rows": rows })))
        }
        Cmd::Embed { frame, level } => {
            if csv {
                return no_csv();
            }
            let (t, f, name) = load_frame(cfg, frame)?;
            let fq = t.fq();
            let n = parse_poly(level, fq)?;
            let v = embed_jn(&f, &n, p)?;
            let entries: Vec<Value> = v
                .reps
                .iter()
                .zip(&v.entries)
                .map(|(r, e)| json!({ "u": r.iter().map(|a| a.to_ints(fq)).collect::<Vec<_>>(), "value": e.to_json() }))
                .collect();
            Ok(Output::Json(
                json!({ "frame": name, "level": n.to_ints(fq), "entries": entries }),
            ))
        }
        Cmd::Verify { suite, corrupt_g1 } => {
            if suite == "list" {
                let checks: Vec<_> = drinfeld_eis::verify::registry()
                    .iter()
                    .map(|c| json!({ "name": c.name, "about": c.about, "min_precision": c.min_precision }))
                    .collect();
                return Ok(Output::Json(json!({ "checks": checks })));
            }
            let names: Vec<String> = if suite == "all" {
                Vec::new()
            } else {
                suite.split(',').map(|s| s.trim().to_string()).collect()
            };
            let ctx = Ctx {
                cfg: cfg.clone(),
                corrupt_g1: *corrupt_g1,
            };
            let rep = run_suite(&ctx, &names)?;
            let mut text = String::from("name,status,target_digits,digits,e\n");
            for c in &rep.checks {
                let opt = |x: Option<i64>| x.map_or(String::new(), |v| v.to_string());
                let status = serde_json::to_value(c.status).unwrap();
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name,
                    status.as_str().unwrap(),
                    opt(c.target_digits),
                    opt(c.digits),
                    c.e
                ));
            }
            let code = rep.exit_code();
            Ok(Output::Verify(
                serde_json::to_value(&rep).unwrap(),
                text,
                code,
            ))
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
    exit_code: i32,
}

fn emit(out: &Option<String>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = &cli.global;
    let command = match &cli.cmd {
        Cmd::Eis { .. } => "eis",
        Cmd::Drinfeld { .. } => "drinfeld",
        Cmd::Smb { .. } => "smb",
        Cmd::Invariants { .. } => "invariants",
        Cmd::Embed { .. } => "embed",
        Cmd::Verify { .. } => "verify",
    };
    let cfg = RunConfig::new(g.q, g.ram_e, g.ext_m, g.precision, g.deg_cap, g.seed).map(|mut c| {
        c.format = match g.format {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
        };
        c
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (text, code) = match run(&cli, &cfg) {
        Ok(Output::Json(v)) => (Report::new(command, &cfg, v).to_json() + "\n", 0),
        Ok(Output::Csv(s)) => (s, 0),
        Ok(Output::Verify(v, csv, code)) => {
            if cfg.format == Format::Csv {
                (csv, code)
            } else {
                (Report::new(command, &cfg, v).to_json() + "\n", code)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            let body = ErrorBody {
                error: e.to_string(),
                exit_code: e.exit_code(),
            };
            (
                Report::new(command, &cfg, body).to_json() + "\n",
                e.exit_code(),
            )
        }
    };
    if let Err(e) = emit(&g.out, &text) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(4);
    }
    ExitCode::from(code as u8)
}
