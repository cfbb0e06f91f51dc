use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use torsion_quads::classifier::{classify, match_family_table, ConstantTag, FamilyTable};
use torsion_quads::curve_forms::{sweep, Sweep};
use torsion_quads::goodness::{good_quad, Goodness};
use torsion_quads::identities::{tate_check, theta_check};
use torsion_quads::modular_groups::{delta_s, DELTA_TERMS, DELTA_TOL};
use torsion_quads::numeric::mu_value;
use torsion_quads::qseries::{mu_series, verify_quad, Constancy, CONSTANCY_TOL, DEFAULT_TERMS};
use torsion_quads::sl2::{minimal_representative, orbit};
use torsion_quads::Quad;

/// Torsion-point quadruples with constant cross ratio.
#[derive(Parser)]
#[command(name = "tquad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

const DEFAULT_SEED: u64 = 20240601;
const RESIDUAL_TOL: f64 = 1e-8;
const WARN_ORDER: u32 = 16;

#[derive(Subcommand)]
enum Command {
    /// List the quadruples of common order <= N that are not good.
    Classify {
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(2..))]
        max_order: u32,
        /// Run the full residue scan on every orbit minimum.
        #[arg(long)]
        no_prune: bool,
    },
    /// Decide goodness and print a witness.
    Good(QuadArg),
    /// Expand the sextic invariant of the cross ratio and test constancy.
    Verify {
        #[command(flatten)]
        quad: QuadArg,
        /// Truncation depth in powers of q.
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: i64,
        #[arg(long, default_value_t = CONSTANCY_TOL)]
        tol: f64,
        /// Also evaluate the invariant by direct summation at K real values of q.
        #[arg(long, default_value_t = 0)]
        numeric_samples: usize,
    },
    /// Randomized theta-function identities.
    ThetaCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Tate-curve equation for every torsion point of the given order.
    TateCheck {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=24))]
        order: u64,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: i64,
    },
    /// Check the explicit curve-model configurations.
    CurveVerify {
        /// Case 1 to 11; all cases when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        case: Option<u8>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Stabilizer and invariance group of the sextic invariant.
    Delta {
        #[command(flatten)]
        quad: QuadArg,
        #[arg(long, default_value_t = DELTA_TERMS)]
        terms: i64,
        #[arg(long, default_value_t = DELTA_TOL)]
        tol: f64,
    },
    /// The SL2 orbit of a quadruple.
    Orbit(QuadArg),
    /// The least quadruple in the orbit and a matrix reaching it.
    Minrep(QuadArg),
}

#[derive(Args)]
struct QuadArg {
    /// Four points "r,theta" separated by ';', e.g. "0,1/3;1/3,0;1/3,1/3;1/3,2/3".
    #[arg(long, value_parser = parse_quad)]
    quad: Quad,
}

fn parse_quad(s: &str) -> Result<Quad, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// A finished command: what to print and whether it passed.
struct Report {
    json: serde_json::Value,
    text: String,
    pass: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String, pass: bool) -> anyhow::Result<Report> {
        Ok(Report { json: serde_json::to_value(value)?, text, pass })
    }
}

#[derive(Serialize)]
struct ClassifyEntry {
    quad: Quad,
    order: u64,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<ConstantTag>,
}

fn run_classify(max_order: u32, prune: bool) -> anyhow::Result<Report> {
    if max_order > WARN_ORDER {
        eprintln!(
            "warning: --max-order {max_order} > {WARN_ORDER}; the search grows roughly like n^10 and may take hours"
        );
    }
    let (found, stats) = classify(max_order, prune);
    let verified =
        found.par_iter().map(|c| verify_quad(&c.quad, DEFAULT_TERMS, CONSTANCY_TOL)).collect::<Result<Vec<_>, _>>()?;
    let mut entries = Vec::new();
    let mut constants_ok = true;
    for (c, v) in found.iter().zip(&verified) {
        let family = FamilyTable::lookup(&c.quad);
        if family.map(|m| m.constant) != v.tag {
            constants_ok = false;
        }
        let witness = match c.status {
            Goodness::Good { a, b } => Some((a, b)),
            Goodness::NotGood => None,
        };
        entries.push(ClassifyEntry {
            quad: c.quad,
            order: c.order,
            status: if c.status.is_good() { "good" } else { "not_good" },
            witness,
            family: family.map(|m| m.name()),
            constant: v.tag,
        });
    }
    let quads: Vec<Quad> = found.iter().map(|c| c.quad).collect();
    let m = match_family_table(&quads, max_order as u64);
    let mut text = String::new();
    for e in &entries {
        let constant = e.constant.map_or("?".to_string(), |t| t.to_string());
        let family = e.family.as_deref().unwrap_or("no family");
        text += &format!("{}  order {:>2}  {}  j6 = {}\n", e.quad, e.order, family, constant);
    }
    text += &format!(
        "{} not good among {} orbit minima ({} quick, {} pruned, {} scanned)\n",
        stats.not_good, stats.minimal_quads, stats.quick_good, stats.pruned, stats.full_scans
    );
    text += &format!("family table at order <= {max_order}: {}", if m.pass { "PASS" } else { "FAIL" });
    for q in &m.missing {
        text += &format!("\n  missing {q}");
    }
    for q in &m.extra {
        text += &format!("\n  extra {q}");
    }
    if !m.pass || !constants_ok {
        eprintln!("classification does not match the family table");
    }
    Report::new(&entries, text, m.pass && constants_ok)
}

#[derive(Serialize)]
struct GoodOutput {
    quad: Quad,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
}

fn run_good(s: &Quad) -> anyhow::Result<Report> {
    let (out, text) = match good_quad(s) {
        Goodness::Good { a, b } => (
            GoodOutput { quad: *s, status: "good", witness: Some((a, b)), family: None },
            format!("{s}: good, witness (a, b) = ({a}, {b})"),
        ),
        Goodness::NotGood => {
            let (rep, _) = minimal_representative(s);
            let family = FamilyTable::lookup(&rep).map(|m| m.name());
            let text = format!("{s}: not good ({})", family.as_deref().unwrap_or("no family"));
            (GoodOutput { quad: *s, status: "not_good", witness: None, family }, text)
        }
    };
    Report::new(&out, text, true)
}

#[derive(Serialize)]
struct NumericSample {
    q: f64,
    direct: (f64, f64),
    series: (f64, f64),
}

#[derive(Serialize)]
struct VerifyOutput {
    quad: Quad,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tag: Option<ConstantTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_nonconstant_exponent: Option<i64>,
    scale: u32,
    terms: i64,
    precision: i64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    numeric: Vec<NumericSample>,
}

fn run_verify(s: &Quad, terms: i64, tol: f64, samples: usize) -> anyhow::Result<Report> {
    if terms < 1 {
        bail!("--terms must be at least 1");
    }
    let v = verify_quad(s, terms, tol)?;
    let mut numeric = Vec::new();
    if samples > 0 {
        let mu = mu_series(s, terms)?;
        for k in 0..samples {
            let q = 0.02 + 0.18 * k as f64 / samples.max(2).saturating_sub(1) as f64;
            let qc = Complex64::new(q, 0.0);
            let d = mu_value(s, qc)?;
            let z = mu.eval_q(qc);
            numeric.push(NumericSample { q, direct: (d.re, d.im), series: (z.re, z.im) });
        }
    }
    let (out, mut text) = match v.constancy {
        Constancy::Constant { re, im } => {
            let text = match v.tag {
                Some(t) => format!("{s}: constant {t} ({re:.12}{im:+.1e}i)"),
                None => {
                    eprintln!("warning: constant {re} {im:+}i matches no tabulated value");
                    format!("{s}: constant {re:.12}{im:+.3e}i (no tabulated match)")
                }
            };
            let out = VerifyOutput {
                quad: *s,
                status: "constant",
                constant: Some(re),
                constant_im: Some(im),
                tag: v.tag,
                first_nonconstant_exponent: None,
                scale: v.scale,
                terms,
                precision: v.precision,
                numeric,
            };
            (out, text)
        }
        Constancy::Nonconstant { exponent, re, im } => {
            let text = format!(
                "{s}: nonconstant, first offending term q^({exponent}/{}) with coefficient {re:.6e}{im:+.6e}i",
                v.scale
            );
            let out = VerifyOutput {
                quad: *s,
                status: "nonconstant",
                constant: None,
                constant_im: None,
                tag: None,
                first_nonconstant_exponent: Some(exponent),
                scale: v.scale,
                terms,
                precision: v.precision,
                numeric,
            };
            (out, text)
        }
    };
    for n in &out.numeric {
        text += &format!(
            "\n  q = {:.4}: direct {:.10}{:+.3e}i, series {:.10}{:+.3e}i",
            n.q, n.direct.0, n.direct.1, n.series.0, n.series.1
        );
    }
    Report::new(&out, text, true)
}

fn run_theta(trials: usize, seed: u64) -> anyhow::Result<Report> {
    let r = theta_check(trials, seed)?;
    let text = format!(
        "functional equation, {} draws: {:.3e}\nseries functional equation: {:.3e}\nX-difference identity, {} pairs: {:.3e}\nproduct form, {} quads: spread {:.3e}\n{}",
        r.trials,
        r.functional_equation_max,
        r.series_functional_equation_max,
        r.x_difference_pairs,
        r.x_difference_max,
        r.product_quads,
        r.product_spread_max,
        if r.pass { "PASS" } else { "FAIL" }
    );
    Report::new(&r, text, r.pass)
}

fn run_tate(order: u64, terms: i64) -> anyhow::Result<Report> {
    if terms < 1 {
        bail!("--terms must be at least 1");
    }
    let r = tate_check(order, terms)?;
    let text = format!(
        "{} points of order dividing {}: {} exact zeros, float residual {:.3e} (relative {:.3e})\nseries vs direct at q = {}: {:.3e}\n{}",
        r.points,
        r.order,
        r.exact_zero,
        r.float_residual_max,
        r.float_relative_max,
        r.direct_q,
        r.series_vs_direct_max,
        if r.pass { "PASS" } else { "FAIL" }
    );
    Report::new(&r, text, r.pass)
}

#[derive(Serialize)]
struct CaseOutput {
    #[serde(flatten)]
    sweep: Sweep,
    series_constant: (f64, f64),
    series_gap: f64,
    pass: bool,
}

fn run_curves(case: Option<u8>, samples: usize, seed: u64) -> anyhow::Result<Report> {
    let cases: Vec<u8> = case.map_or((1..=11).collect(), |c| vec![c]);
    let table = FamilyTable::instantiate(12);
    let mut out = Vec::new();
    let mut text = String::new();
    for c in cases {
        let s = sweep(c, samples, seed.wrapping_add(c as u64))?;
        let member = table.iter().find(|m| m.case == c).context("case missing from the family table")?;
        let v = verify_quad(&member.quad, DEFAULT_TERMS, CONSTANCY_TOL)?;
        let (re, im) = match v.constancy {
            Constancy::Constant { re, im } => (re, im),
            Constancy::Nonconstant { .. } => bail!("case {c} is not constant as a q-series"),
        };
        let gap = (s.constant - Complex64::new(re, im)).norm();
        let pass =
            s.spread < 1e-9 && s.max_residual < RESIDUAL_TOL && gap < RESIDUAL_TOL && s.tag == Some(member.constant);
        text += &format!(
            "case {:>2}: j6 = {} over {} samples, spread {:.2e}, residual {:.2e}, q-series gap {:.2e}  {}\n",
            c,
            s.tag.map_or(format!("{:.10}", s.constant), |t| t.to_string()),
            s.samples,
            s.spread,
            s.max_residual,
            gap,
            if pass { "PASS" } else { "FAIL" }
        );
        out.push(CaseOutput { sweep: s, series_constant: (re, im), series_gap: gap, pass });
    }
    let pass = out.iter().all(|c| c.pass);
    Report::new(&out, text.trim_end().to_string(), pass)
}

fn run_delta(s: &Quad, terms: i64, tol: f64) -> anyhow::Result<Report> {
    if terms < 1 {
        bail!("--terms must be at least 1");
    }
    let r = delta_s(s, terms, tol)?;
    let text = format!(
        "{}: level {}, |Gamma_S/+-1| = {}, |Delta_S/+-1| = {} (to q^{}, tol {:e}, {:?} convention{})",
        r.quad,
        r.n,
        r.gamma_s_order_mod_pm,
        r.delta_s_order_mod_pm,
        r.terms,
        r.tol,
        r.convention,
        if r.both_conventions_consistent { ", both consistent" } else { "" }
    );
    Report::new(&r, text, true)
}

#[derive(Serialize)]
struct OrbitOutput {
    quad: Quad,
    size: usize,
    orbit: Vec<Quad>,
}

fn run_orbit(s: &Quad) -> anyhow::Result<Report> {
    let o: Vec<Quad> = orbit(s).into_iter().collect();
    let mut text = format!("orbit of {s}: {} quadruples", o.len());
    for q in &o {
        text += &format!("\n  {q}");
    }
    Report::new(&OrbitOutput { quad: *s, size: o.len(), orbit: o }, text, true)
}

#[derive(Serialize)]
struct MinrepOutput {
    quad: Quad,
    representative: Quad,
    matrix: String,
}

fn run_minrep(s: &Quad) -> anyhow::Result<Report> {
    let (rep, g) = minimal_representative(s);
    let text = format!("{rep}  via {g}");
    Report::new(&MinrepOutput { quad: *s, representative: rep, matrix: g.to_string() }, text, true)
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Classify { max_order, no_prune } => run_classify(*max_order, !no_prune),
        Command::Good(q) => run_good(&q.quad),
        Command::Verify { quad, terms, tol, numeric_samples } => run_verify(&quad.quad, *terms, *tol, *numeric_samples),
        Command::ThetaCheck { trials, seed } => run_theta(*trials, *seed),
        Command::TateCheck { order, terms } => run_tate(*order, *terms),
        Command::CurveVerify { case, samples, seed } => run_curves(*case, *samples, *seed),
        Command::Delta { quad, terms, tol } => run_delta(&quad.quad, *terms, *tol),
        Command::Orbit(q) => run_orbit(&q.quad),
        Command::Minrep(q) => run_minrep(&q.quad),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            let body =
                if cli.json { serde_json::to_string_pretty(&r.json).expect("JSON values serialize") } else { r.text };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if r.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
