//! `dslice`: command-line front end for the d-invariant obstruction engine.

use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dslice::alexander::{alexander_of, is_lspace_form, m_invariant};
use dslice::dinvariants::{surgery_d, DTable, VSequence};
use dslice::obstruction::{
    cover::companion_steps, obstruct, obstruct_family, ObstructOptions, ObstructionReport, Sampling,
};
use dslice::oracle::oracle_v;
use dslice::rational::fmt_q;
use dslice::signatures::{independence_check, parse_relation, IndependenceCertificate};
use dslice::staircase::{double, lattice_points};
use dslice::{parse_knot, DoubledStaircase, Exec, KnotExpr, LaurentPoly, StepVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "dslice",
    version,
    about = "Exact d-invariant sliceness obstructions for cable families"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Recompute V_s with the truncated-complex oracle and fail on mismatch.
    #[arg(long, global = true)]
    oracle: bool,
    /// Largest n enumerated exactly.
    #[arg(long = "limit-n", global = true, default_value_t = 2)]
    limit_n: usize,
    /// Truncation window for the oracle.
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Run batch loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Alexander polynomial, L-space form, genus and m(K).
    Alexander { expr: String },
    /// Staircase of an L-space knot.
    Staircase {
        expr: String,
        /// Print the doubled staircase for K # K^r.
        #[arg(long)]
        double: bool,
    },
    /// V_0 .. V_{s_max}, for K # K^r unless --single.
    Vs {
        expr: String,
        #[arg(long = "s-max")]
        s_max: Option<i64>,
        #[arg(long)]
        single: bool,
    },
    /// d and relative d-bar of S^3_k(K # K^r); the unknot gives L(k, 1).
    Dtable {
        expr: String,
        k: i64,
        #[arg(long)]
        negate: bool,
    },
    /// Obstruction verdicts. With primes, EXPR is the companion K of the
    /// family; without, EXPR is the whole knot.
    Obstruct {
        expr: String,
        primes: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Past --limit-n, sample this many metabolizers instead of refusing.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Signature probes for a relation like "2*T(2,5) + 3*C(2,5;T(2,3))".
    Independence { relation: String },
}

fn knot(text: &str) -> Result<KnotExpr> {
    parse_knot(text).with_context(|| format!("cannot parse {text:?}"))
}

fn steps_of(expr: &KnotExpr) -> Result<StepVector> {
    Ok(companion_steps(expr)?)
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn check_v_against_oracle(steps: &StepVector, values: &[i64], window: Option<i64>, exec: Exec) -> Result<Vec<i64>> {
    let s_values: Vec<i64> = (0..values.len() as i64).collect();
    let oracle = exec.try_map(&s_values, |&s| oracle_v(steps, s, window))?;
    if let Some(s) = (0..values.len()).find(|&s| values[s] != oracle[s]) {
        bail!(
            "oracle mismatch at s = {s}: formula {} vs oracle {}",
            values[s],
            oracle[s]
        );
    }
    Ok(oracle)
}

#[derive(Serialize)]
struct AlexanderReport {
    knot: String,
    polynomial: LaurentPoly,
    genus: i64,
    m: i64,
    lspace: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponents: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refusal: Option<String>,
}

fn cmd_alexander(cli: &Cli, expr: &str) -> Result<String> {
    let k = knot(expr)?;
    let delta = alexander_of(&k)?;
    let form = is_lspace_form(&delta);
    let report = AlexanderReport {
        knot: k.render(),
        genus: delta.genus(),
        m: m_invariant(&delta),
        lspace: form.is_ok(),
        exponents: form.as_ref().ok().map(|f| f.exponents.clone()),
        refusal: form.as_ref().err().map(ToString::to_string),
        polynomial: delta,
    };
    Ok(match cli.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut out = String::from("exponent,coefficient\n");
            for (e, c) in report.polynomial.terms() {
                writeln!(out, "{e},{c}")?;
            }
            out
        }
        Format::Text => format!(
            "{}\nDelta = {}\ngenus {}, m = {}, L-space form: {}\n",
            report.knot,
            report.polynomial,
            report.genus,
            report.m,
            report
                .refusal
                .as_deref()
                .map_or("yes".to_string(), |r| format!("no ({r})"))
        ),
    })
}

fn cmd_staircase(cli: &Cli, expr: &str, doubled: bool) -> Result<String> {
    let steps = steps_of(&knot(expr)?)?;
    let (st, middle) = if doubled {
        let d = double(&steps)?;
        (d.staircase, Some(d.middle))
    } else {
        (lattice_points(&steps), None)
    };
    Ok(match cli.format {
        Format::Json => match middle {
            Some(middle) => json(&DoubledStaircase { staircase: st, middle })?,
            None => json(&st)?,
        },
        Format::Csv => {
            let mut out = String::from("x,y,type\n");
            for g in &st.generators {
                writeln!(out, "{},{},{:?}", g.x, g.y, g.kind)?;
            }
            out
        }
        Format::Text => {
            let mut out = format!("steps {:?}\n", st.steps.as_slice());
            for (i, g) in st.generators.iter().enumerate() {
                let mark = if Some(i) == middle { "  middle" } else { "" };
                writeln!(out, "{:?} ({}, {}){mark}", g.kind, g.x, g.y)?;
            }
            out
        }
    })
}

#[derive(Serialize)]
struct VsReport {
    knot: String,
    doubled: bool,
    steps: StepVector,
    values: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Vec<i64>>,
}

fn cmd_vs(cli: &Cli, exec: Exec, expr: &str, s_max: Option<i64>, single: bool) -> Result<String> {
    let k = knot(expr)?;
    let knot_steps = steps_of(&k)?;
    let steps = if single { knot_steps } else { knot_steps.doubled() };
    let top = s_max.unwrap_or(steps.genus());
    if top < 0 {
        bail!("--s-max must be nonnegative");
    }
    let values: Vec<i64> = (0..=top).map(|s| dslice::dinvariants::v_value(&steps, s)).collect();
    let oracle = if cli.oracle {
        Some(check_v_against_oracle(&steps, &values, cli.window, exec)?)
    } else {
        None
    };
    let report = VsReport {
        knot: k.render(),
        doubled: !single,
        steps,
        values,
        oracle,
    };
    Ok(match cli.format {
        Format::Json => json(&report)?,
        Format::Csv | Format::Text => {
            let sep = if cli.format == Format::Csv { "," } else { "\t" };
            let mut out = if report.oracle.is_some() {
                format!("s{sep}V{sep}oracle\n")
            } else {
                format!("s{sep}V\n")
            };
            for (s, v) in report.values.iter().enumerate() {
                match &report.oracle {
                    Some(o) => writeln!(out, "{s}{sep}{v}{sep}{}", o[s])?,
                    None => writeln!(out, "{s}{sep}{v}")?,
                }
            }
            out
        }
    })
}

fn cmd_dtable(cli: &Cli, exec: Exec, expr: &str, k: i64, negate: bool) -> Result<String> {
    let steps = steps_of(&knot(expr)?)?;
    let vseq = VSequence::for_double(&steps, k);
    if cli.oracle {
        check_v_against_oracle(&vseq.steps, &vseq.values, cli.window, exec)?;
    }
    let table = surgery_d(&vseq, k)?;
    let table = if negate { table.negated() } else { table };
    Ok(match cli.format {
        Format::Json => json(&table)?,
        Format::Csv => table.to_csv(),
        Format::Text => text_dtable(&table),
    })
}

fn text_dtable(t: &DTable) -> String {
    let mut out = format!("k = {}\n", t.k);
    for (i, (d, b)) in t.d.iter().zip(&t.dbar).enumerate() {
        let _ = writeln!(out, "{i:>3}  d = {:>8}  dbar = {:>8}", fmt_q(d), fmt_q(b));
    }
    out
}

fn obstruct_options(cli: &Cli, exec: Exec, sample: Option<usize>, seed: u64) -> ObstructOptions {
    ObstructOptions {
        limit_n: cli.limit_n,
        exec,
        sampling: sample.map(|count| Sampling { count, seed }),
    }
}

fn cmd_obstruct(
    cli: &Cli,
    exec: Exec,
    expr: &str,
    primes: &[i64],
    n: usize,
    sample: Option<usize>,
    seed: u64,
) -> Result<String> {
    let k = knot(expr)?;
    let opts = obstruct_options(cli, exec, sample, seed);
    if cli.oracle {
        let steps = if primes.is_empty() { None } else { Some(steps_of(&k)?) };
        if let Some(steps) = steps {
            let top = primes.iter().copied().max().unwrap_or(0);
            let vseq = VSequence::for_double(&steps, top);
            check_v_against_oracle(&vseq.steps, &vseq.values, cli.window, exec)?;
        }
    }
    let report = if primes.is_empty() {
        obstruct(&k, n, &opts)?
    } else {
        obstruct_family(&k, primes, n, &opts)?
    };
    Ok(match cli.format {
        Format::Json => json(&report)?,
        Format::Csv => csv_report(&report),
        Format::Text => text_report(&report),
    })
}

fn csv_report(r: &ObstructionReport) -> String {
    let mut out = String::from("prime,basis,element,dbar\n");
    for v in &r.verdicts {
        for c in &v.certificates {
            let basis = c.basis.iter().map(|b| fmt_vec(b)).collect::<Vec<_>>().join(";");
            let element = c.element.as_deref().map(fmt_vec).unwrap_or_default();
            let dbar = c.dbar.as_ref().map(fmt_q).unwrap_or_default();
            let _ = writeln!(out, "{},{basis},{element},{dbar}", v.prime);
        }
    }
    out
}

fn fmt_vec(v: &[i64]) -> String {
    format!("({})", v.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
}

fn text_report(r: &ObstructionReport) -> String {
    let mut out = format!("{} (n = {})\n", r.knot, r.copies);
    for v in &r.verdicts {
        let _ = writeln!(
            out,
            "k = {}: {} metabolizers, {}",
            v.prime,
            v.metabolizers,
            if v.obstructed { "obstructed" } else { "not obstructed" }
        );
        for c in &v.certificates {
            let basis = c.basis.iter().map(|b| fmt_vec(b)).collect::<Vec<_>>().join(" ");
            match (&c.element, &c.dbar) {
                (Some(e), Some(d)) => {
                    let _ = writeln!(out, "  <{basis}>: dbar{} = {}", fmt_vec(e), fmt_q(d));
                }
                _ => {
                    let _ = writeln!(out, "  <{basis}>: dbar vanishes");
                }
            }
        }
    }
    let _ = writeln!(out, "not slice: {}\n{}", r.not_slice, r.scope);
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn cmd_independence(cli: &Cli, exec: Exec, relation: &str) -> Result<String> {
    let terms = parse_relation(relation)?;
    let cert = independence_check(&terms, &obstruct_options(cli, exec, None, 0))?;
    Ok(match cli.format {
        Format::Json => json(&cert)?,
        Format::Csv => {
            let mut out = String::from("k,theta,total,n,m,forced\n");
            for p in &cert.probes {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.k,
                    fmt_q(&p.theta),
                    p.total,
                    p.n,
                    p.m,
                    p.forced
                )?;
            }
            out
        }
        Format::Text => text_independence(&cert),
    })
}

fn text_independence(c: &IndependenceCertificate) -> String {
    let mut out = String::new();
    for p in &c.probes {
        let _ = writeln!(
            out,
            "k = {}: total jump {} at {} (n = {}, m = {})",
            p.k,
            p.total,
            fmt_q(&p.theta),
            p.n,
            p.m
        );
    }
    if let Some(r) = &c.residual {
        let _ = writeln!(out, "residual {r}");
    }
    if let Some(o) = &c.obstruction {
        out.push_str(&text_report(o));
    }
    let _ = writeln!(out, "not slice: {}", c.not_slice);
    out
}

fn run(cli: &Cli) -> Result<String> {
    if cli.limit_n == 0 {
        bail!("--limit-n must be at least 1");
    }
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match &cli.command {
        Command::Alexander { expr } => cmd_alexander(cli, expr),
        Command::Staircase { expr, double } => cmd_staircase(cli, expr, *double),
        Command::Vs { expr, s_max, single } => cmd_vs(cli, exec, expr, *s_max, *single),
        Command::Dtable { expr, k, negate } => cmd_dtable(cli, exec, expr, *k, *negate),
        Command::Obstruct {
            expr,
            primes,
            n,
            sample,
            seed,
        } => cmd_obstruct(cli, exec, expr, primes, *n, *sample, *seed),
        Command::Independence { relation } => cmd_independence(cli, exec, relation),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
