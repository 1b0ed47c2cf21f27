//! Experiment driver behind the `ultradiff` binary.
//!
//! Every subcommand writes a JSON report (the machine artifact) and,
//! where a table is natural, a CSV next to it. Exit codes: 0 success and
//! no violations, 1 a property or verdict violation was found (witnesses
//! are in the report), 2 numeric or resource failure, 64 usage error.

use crate::analysis::{
    empirical_recursion_constant, iterate_norms, membership_report, npm_seminorm, BoxDomain,
    DeltaGrid, QuadratureGrid,
};
use crate::config::ExperimentConfig;
use crate::error::{Error, MetivierError, PdoError};
use crate::metivier::{
    counterexample_report, CounterexampleConfig, MetivierParams,
};
use crate::pdo::{ellipticity_check, format_operator, parse_operator, principal_symbol};
use crate::report::{fmt_f64, merge_reports, write_csv, Envelope};
use crate::symbolic::parse as parse_expr;
use crate::weights::{
    bound_shift, check_axioms, check_prop21, check_scaling_inequality,
    gevrey_conjugate_closed_form, SampleSpec, Weight, WeightKind,
};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "ultradiff",
    version,
    about = "Weight functions, Young conjugates, operator iterates and growth-class analysis"
)]
struct Cli {
    /// Flat key-value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for JSON/CSV artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Validate the configuration and inputs without computing.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weight-function checks and conjugates.
    Weights {
        #[command(subcommand)]
        cmd: WeightsCmd,
    },
    /// Operator algebra.
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Norms and growth analysis.
    Analyze {
        #[command(subcommand)]
        cmd: AnalyzeCmd,
    },
    /// The non-elliptic counterexample pipeline.
    Metivier {
        #[command(subcommand)]
        cmd: MetivierCmd,
    },
    /// Report utilities.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand, Debug)]
enum WeightsCmd {
    /// Axiom report with fitted constants.
    Check { spec: Option<String> },
    /// Young conjugate values on a y-grid.
    Conjugate {
        spec: Option<String>,
        /// Comma-separated y values.
        #[arg(long)]
        y: Option<String>,
    },
    /// The associated-sequence inequality suite.
    Prop21 {
        spec: Option<String>,
        #[arg(long)]
        jmax: Option<u32>,
        #[arg(long)]
        slack: Option<f64>,
        /// Dyadic ladder exponents, inclusive.
        #[arg(long)]
        lambda_exp_min: Option<i32>,
        #[arg(long)]
        lambda_exp_max: Option<i32>,
        /// ρ values for the shift bound.
        #[arg(long)]
        rho: Option<String>,
        /// Doubling constant L with ω(et) ≤ L(1+ω(t)).
        #[arg(long)]
        big_l: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct OpInput {
    /// Operator text, e.g. `1*D[2,0] + 1*D[0,2]`.
    text: String,
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum OpCmd {
    /// Parse and echo the canonical form.
    Parse(OpInput),
    /// Compose two operators.
    Compose {
        first: String,
        second: String,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// q-th iterate.
    Iterate {
        #[command(flatten)]
        op: OpInput,
        #[arg(long, default_value_t = 2)]
        q: u32,
    },
    /// Principal symbol value at (x, ξ).
    Symbol {
        #[command(flatten)]
        op: OpInput,
        #[arg(long)]
        x: String,
        #[arg(long)]
        xi: String,
    },
    /// Sampled ellipticity verdict on a box.
    Ellipticity {
        #[command(flatten)]
        op: OpInput,
        #[arg(long)]
        r#box: Option<String>,
        #[arg(long, default_value_t = 5)]
        x_samples: usize,
        #[arg(long, default_value_t = 64)]
        sphere_samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        threshold: f64,
    },
}

#[derive(Args, Debug)]
struct AnalyzeCommon {
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    r#box: Option<String>,
    /// Simpson nodes per axis (odd).
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    /// Iterate norm table `j ↦ ‖P^j u‖`.
    Norms {
        #[arg(long)]
        op: Option<String>,
        #[command(flatten)]
        common: AnalyzeCommon,
        #[arg(long)]
        jmax: Option<u32>,
    },
    /// Two-sided growth/membership report.
    Growth {
        #[arg(long)]
        op: Option<String>,
        #[command(flatten)]
        common: AnalyzeCommon,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        jmax: Option<u32>,
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long)]
        sup_samples: Option<usize>,
    },
    /// Shrinking-domain seminorm `N^{pm}`.
    Npm {
        #[command(flatten)]
        common: AnalyzeCommon,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        delta_min: Option<f64>,
        #[arg(long)]
        delta_count: Option<usize>,
    },
    /// Empirical recursion constants for an elliptic operator.
    Recursion {
        #[arg(long)]
        op: Option<String>,
        #[command(flatten)]
        common: AnalyzeCommon,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        pmax: Option<u32>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        delta_min: Option<f64>,
        #[arg(long)]
        delta_count: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum MetivierCmd {
    /// Build the counterexample function and report both growth sides.
    Run {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Operator order; the default operator is `D1^m` in 2 variables.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        alpha_max: Option<u32>,
        #[arg(long)]
        q_max: Option<u32>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        r#box: Option<String>,
        /// Also run the elliptic control (Laplacian) and report the
        /// exponent difference.
        #[arg(long)]
        control: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ReportCmd {
    /// Merge JSON reports into one file.
    Merge { files: Vec<PathBuf> },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return 0;
                }
                _ => 64,
            };
            eprint!("{e}");
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Config(_) | Error::Parse(_) => 64,
        Error::Weight(_) => 64,
        Error::Pdo(PdoError::Format(_)) | Error::Pdo(PdoError::DimensionMismatch(..)) => 64,
        Error::Analysis(crate::error::AnalysisError::Input(_)) => 64,
        Error::Metivier(MetivierError::Constraint(_)) => 64,
        _ => 2,
    }
}

struct Ctx {
    cfg: ExperimentConfig,
    out: PathBuf,
    seed: u64,
    dry_run: bool,
}

impl Ctx {
    fn resolve<T: std::str::FromStr + Clone>(
        &self,
        flag: &Option<T>,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, Error> {
        if let Some(v) = flag {
            return Ok(v.clone());
        }
        Ok(self.cfg.get_parsed::<T>(section, key)?.unwrap_or(default))
    }

    fn json_path(&self, name: &str) -> PathBuf {
        self.out.join(format!("{name}.json"))
    }

    fn csv_path(&self, name: &str) -> PathBuf {
        self.out.join(format!("{name}.csv"))
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.get("output", "dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.get_parsed::<u64>("output", "seed")?.unwrap_or(0),
    };
    let ctx = Ctx { cfg, out, seed, dry_run: cli.dry_run };
    match cli.cmd {
        Command::Weights { cmd } => weights_cmd(&ctx, cmd),
        Command::Op { cmd } => op_cmd(&ctx, cmd),
        Command::Analyze { cmd } => analyze_cmd(&ctx, cmd),
        Command::Metivier { cmd } => metivier_cmd(&ctx, cmd),
        Command::Report { cmd } => report_cmd(&ctx, cmd),
    }
}

fn weight_from(ctx: &Ctx, spec: &Option<String>) -> Result<Weight, Error> {
    let spec = match spec {
        Some(s) => s.clone(),
        None => ctx
            .cfg
            .get("weights", "spec")
            .ok_or_else(|| Error::Usage("missing weight spec".into()))?
            .to_string(),
    };
    Ok(Weight::parse(&spec)?)
}

fn weights_cmd(ctx: &Ctx, cmd: WeightsCmd) -> Result<i32, Error> {
    match cmd {
        WeightsCmd::Check { spec } => {
            let w = weight_from(ctx, &spec)?;
            if ctx.dry_run {
                println!("dry-run ok: weights check {}", w.label());
                return Ok(0);
            }
            let report = check_axioms(&w, &SampleSpec::default());
            println!(
                "{}: monotone={} alpha_L={:.4} beta={:?}",
                w.label(),
                report.monotone,
                report.alpha_l,
                report.beta_verdict
            );
            Envelope::new("weights check", ctx.seed, &report)
                .write_json(&ctx.json_path("weights_check"))?;
            Ok(0)
        }
        WeightsCmd::Conjugate { spec, y } => {
            let w = weight_from(ctx, &spec)?;
            let ys: Vec<f64> = match y.or_else(|| ctx.cfg.get("weights", "y").map(String::from)) {
                Some(list) => parse_f64_list(&list)?,
                None => vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
            };
            if ctx.dry_run {
                println!("dry-run ok: weights conjugate {} at {} points", w.label(), ys.len());
                return Ok(0);
            }
            let conj = w.conjugate();
            let mut rows = Vec::new();
            let mut body = Vec::new();
            for &yv in &ys {
                let v = conj.eval(yv).map_err(Error::Conjugate)?;
                let closed = match w.kind() {
                    WeightKind::Gevrey { s } => Some(gevrey_conjugate_closed_form(*s, yv)),
                    _ => None,
                };
                println!("phi*({yv}) = {v}");
                body.push(serde_json::json!({"y": yv, "phi_star": v, "closed_form": closed}));
                rows.push(vec![
                    fmt_f64(yv),
                    fmt_f64(v),
                    closed.map(fmt_f64).unwrap_or_default(),
                ]);
            }
            Envelope::new("weights conjugate", ctx.seed, &body)
                .write_json(&ctx.json_path("weights_conjugate"))?;
            write_csv(&ctx.csv_path("weights_conjugate"), &["y", "phi_star", "closed_form"], &rows)?;
            Ok(0)
        }
        WeightsCmd::Prop21 { spec, jmax, slack, lambda_exp_min, lambda_exp_max, rho, big_l } => {
            let w = weight_from(ctx, &spec)?;
            let jmax = ctx.resolve(&jmax, "weights", "jmax", 60)?;
            let slack = ctx.resolve(&slack, "weights", "slack", 1e-9)?;
            let lo = ctx.resolve(&lambda_exp_min, "weights", "lambda_exp_min", -2)?;
            let hi = ctx.resolve(&lambda_exp_max, "weights", "lambda_exp_max", 2)?;
            let big_l = ctx.resolve(&big_l, "weights", "big_l", 3.0)?;
            let rhos: Vec<f64> = match rho.or_else(|| ctx.cfg.get("weights", "rho").map(String::from)) {
                Some(list) => parse_f64_list(&list)?,
                None => vec![2.0, 10.0],
            };
            if lo > hi {
                return Err(Error::Usage("lambda-exp-min must be ≤ lambda-exp-max".into()));
            }
            let ladder: Vec<f64> = (lo..=hi).map(|k| 2f64.powi(k)).collect();
            if ctx.dry_run {
                println!(
                    "dry-run ok: prop21 {} jmax={jmax} ladder={ladder:?} slack={slack}",
                    w.label()
                );
                return Ok(0);
            }
            let conj = w.conjugate();
            let prop = check_prop21(&conj, jmax, &ladder, slack).map_err(Error::Conjugate)?;
            let scaling = check_scaling_inequality(&conj, 2 * jmax, &ladder, big_l, slack)
                .map_err(Error::Conjugate)?;
            let mut shifts = Vec::new();
            for &r in &rhos {
                for &lam in &ladder {
                    shifts.push(bound_shift(&conj, r, lam, big_l, jmax, slack)
                        .map_err(Error::Conjugate)?);
                }
            }
            let n_viol =
                prop.violations.len() + scaling.len() + shifts.iter().filter(|s| !s.verified).count();
            println!(
                "{}: {} checks, {} violations ({} prop, {} scaling, {} shift)",
                w.label(),
                prop.checks_run,
                n_viol,
                prop.violations.len(),
                scaling.len(),
                shifts.iter().filter(|s| !s.verified).count()
            );
            let body = serde_json::json!({
                "prop": prop,
                "scaling_violations": scaling,
                "shift_bounds": shifts,
            });
            Envelope::new("weights prop21", ctx.seed, &body)
                .write_json(&ctx.json_path("weights_prop21"))?;
            let rows: Vec<Vec<String>> = prop
                .violations
                .iter()
                .map(|v| {
                    vec![
                        v.property.clone(),
                        v.j.to_string(),
                        v.h.to_string(),
                        v.r.to_string(),
                        fmt_f64(v.lambda),
                        fmt_f64(v.excess),
                    ]
                })
                .collect();
            write_csv(
                &ctx.csv_path("weights_prop21_violations"),
                &["property", "j", "h", "r", "lambda", "excess"],
                &rows,
            )?;
            Ok(if n_viol == 0 { 0 } else { 1 })
        }
    }
}

fn op_dim(ctx: &Ctx, dim: &Option<usize>) -> Result<usize, Error> {
    ctx.resolve(dim, "operator", "dim", 2)
}

fn op_cmd(ctx: &Ctx, cmd: OpCmd) -> Result<i32, Error> {
    match cmd {
        OpCmd::Parse(inp) => {
            let dim = op_dim(ctx, &inp.dim)?;
            let op = parse_operator(&inp.text, dim)?;
            if ctx.dry_run {
                println!("dry-run ok: op parse");
                return Ok(0);
            }
            let canon = format_operator(&op);
            println!("{canon}  (order {}, dim {dim})", op.order());
            let body = serde_json::json!({
                "canonical": canon, "order": op.order(), "dim": dim,
            });
            Envelope::new("op parse", ctx.seed, &body).write_json(&ctx.json_path("op_parse"))?;
            Ok(0)
        }
        OpCmd::Compose { first, second, dim } => {
            let dim = op_dim(ctx, &dim)?;
            let a = parse_operator(&first, dim)?;
            let b = parse_operator(&second, dim)?;
            if ctx.dry_run {
                println!("dry-run ok: op compose");
                return Ok(0);
            }
            let c = a.compose(&b)?;
            let canon = format_operator(&c);
            println!("{canon}  (order {})", c.order());
            Envelope::new(
                "op compose",
                ctx.seed,
                serde_json::json!({"canonical": canon, "order": c.order()}),
            )
            .write_json(&ctx.json_path("op_compose"))?;
            Ok(0)
        }
        OpCmd::Iterate { op, q } => {
            let dim = op_dim(ctx, &op.dim)?;
            let p = parse_operator(&op.text, dim)?;
            if ctx.dry_run {
                println!("dry-run ok: op iterate q={q}");
                return Ok(0);
            }
            let it = p.iterate(q)?;
            let canon = format_operator(&it);
            println!("{canon}  (order {}, {} stored nodes)", it.order(), it.num_terms());
            Envelope::new(
                "op iterate",
                ctx.seed,
                serde_json::json!({"canonical": canon, "order": it.order(), "q": q}),
            )
            .write_json(&ctx.json_path("op_iterate"))?;
            Ok(0)
        }
        OpCmd::Symbol { op, x, xi } => {
            let dim = op_dim(ctx, &op.dim)?;
            let p = parse_operator(&op.text, dim)?;
            let xv = parse_f64_list(&x)?;
            let xiv = parse_f64_list(&xi)?;
            if xv.len() != dim || xiv.len() != dim {
                return Err(Error::Usage(format!("x and xi must have {dim} components")));
            }
            if ctx.dry_run {
                println!("dry-run ok: op symbol");
                return Ok(0);
            }
            let v = principal_symbol(&p, &xv, &xiv).map_err(Error::Eval)?;
            println!("P_m(x, xi) = {v}  |.| = {}", v.norm());
            Envelope::new(
                "op symbol",
                ctx.seed,
                serde_json::json!({"re": v.re, "im": v.im, "abs": v.norm()}),
            )
            .write_json(&ctx.json_path("op_symbol"))?;
            Ok(0)
        }
        OpCmd::Ellipticity { op, r#box, x_samples, sphere_samples, threshold } => {
            let dim = op_dim(ctx, &op.dim)?;
            let p = parse_operator(&op.text, dim)?;
            let box_text = r#box
                .or_else(|| ctx.cfg.get("domain", "box").map(String::from))
                .unwrap_or_else(|| vec!["-1,1"; dim].join(","));
            let domain = BoxDomain::parse(&box_text).map_err(Error::Analysis)?;
            if domain.dim() != dim {
                return Err(Error::Usage(format!("box must have {dim} axes")));
            }
            if ctx.dry_run {
                println!("dry-run ok: op ellipticity");
                return Ok(0);
            }
            let verdict = ellipticity_check(
                &p,
                domain.bounds(),
                x_samples,
                sphere_samples,
                threshold,
                ctx.seed,
            )?;
            match &verdict {
                crate::pdo::EllipticityVerdict::Elliptic { c_min, .. } => {
                    println!("elliptic (sampled), c_min = {c_min}")
                }
                crate::pdo::EllipticityVerdict::NonElliptic {
                    witness_x, witness_xi, symbol_abs, ..
                } => println!(
                    "non-elliptic (sampled): |P_m| = {symbol_abs:.3e} at x={witness_x:?}, xi={witness_xi:?}"
                ),
            }
            Envelope::new("op ellipticity", ctx.seed, &verdict)
                .write_json(&ctx.json_path("op_ellipticity"))?;
            Ok(0)
        }
    }
}

fn analyze_inputs(
    ctx: &Ctx,
    op_text: &Option<String>,
    common: &AnalyzeCommon,
    default_nodes: usize,
) -> Result<(Option<crate::pdo::LinearPDO>, crate::symbolic::Expr, BoxDomain, QuadratureGrid), Error>
{
    let box_text = common
        .r#box
        .clone()
        .or_else(|| ctx.cfg.get("domain", "box").map(String::from))
        .ok_or_else(|| Error::Usage("missing --box".into()))?;
    let domain = BoxDomain::parse(&box_text).map_err(Error::Analysis)?;
    let dim = domain.dim();
    let f_text = common
        .function
        .clone()
        .or_else(|| ctx.cfg.get("function", "text").map(String::from))
        .ok_or_else(|| Error::Usage("missing --fn".into()))?;
    let f = parse_expr(&f_text, dim)?;
    let op = match op_text
        .clone()
        .or_else(|| ctx.cfg.get("operator", "text").map(String::from))
    {
        Some(t) => Some(parse_operator(&t, dim)?),
        None => None,
    };
    let nodes = ctx.resolve(&common.nodes, "domain", "nodes", default_nodes)?;
    let grid = QuadratureGrid::uniform(dim, if nodes % 2 == 0 { nodes + 1 } else { nodes })
        .map_err(Error::Analysis)?;
    Ok((op, f, domain, grid))
}

fn analyze_cmd(ctx: &Ctx, cmd: AnalyzeCmd) -> Result<i32, Error> {
    match cmd {
        AnalyzeCmd::Norms { op, common, jmax } => {
            let (op, f, domain, grid) = analyze_inputs(ctx, &op, &common, 129)?;
            let op = op.ok_or_else(|| Error::Usage("missing --op".into()))?;
            let jmax = ctx.resolve(&jmax, "analysis", "jmax", 6)?;
            if ctx.dry_run {
                println!("dry-run ok: analyze norms jmax={jmax}");
                return Ok(0);
            }
            let table = iterate_norms(&op, &f, &domain, jmax, &grid).map_err(Error::Analysis)?;
            let rows: Vec<Vec<String>> = table
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| vec![j.to_string(), fmt_f64(*v)])
                .collect();
            for (j, v) in table.values.iter().enumerate() {
                println!("j={j}: {v:.9e}");
            }
            Envelope::new("analyze norms", ctx.seed, &table)
                .write_json(&ctx.json_path("analyze_norms"))?;
            write_csv(&ctx.csv_path("analyze_norms"), &["j", "norm"], &rows)?;
            Ok(0)
        }
        AnalyzeCmd::Growth { op, common, weight, jmax, nmax, sup_samples } => {
            let (op, f, domain, grid) = analyze_inputs(ctx, &op, &common, 129)?;
            let op = op.ok_or_else(|| Error::Usage("missing --op".into()))?;
            let w = weight_from(ctx, &weight)?;
            let jmax = ctx.resolve(&jmax, "analysis", "jmax", 8)?;
            let nmax = ctx.resolve(&nmax, "analysis", "nmax", 16)?;
            let sup_samples = ctx.resolve(&sup_samples, "domain", "sup_samples", 33)?;
            if ctx.dry_run {
                println!("dry-run ok: analyze growth jmax={jmax} nmax={nmax}");
                return Ok(0);
            }
            let conj = w.conjugate();
            let rep = membership_report(&f, &op, &domain, &conj, jmax, nmax, &grid, sup_samples)
                .map_err(Error::Analysis)?;
            println!(
                "iterate slope {:.4}, derivative slope {:.4}, rel diff {:.3}",
                rep.iterate.slope_k1, rep.derivative.slope_k1, rep.slope_rel_diff
            );
            let mut rows = Vec::new();
            for (j, v) in rep.iterate.norms.iter().enumerate() {
                rows.push(vec!["iterate".into(), j.to_string(), fmt_f64(*v)]);
            }
            for (q, v) in rep.derivative.norms.iter().enumerate() {
                rows.push(vec!["derivative".into(), q.to_string(), fmt_f64(*v)]);
            }
            Envelope::new("analyze growth", ctx.seed, &rep)
                .write_json(&ctx.json_path("analyze_growth"))?;
            write_csv(&ctx.csv_path("analyze_growth"), &["side", "index", "value"], &rows)?;
            Ok(0)
        }
        AnalyzeCmd::Npm { common, p, m, delta_min, delta_count } => {
            let (_, f, domain, grid) = analyze_inputs(ctx, &None, &common, 65)?;
            let p = ctx.resolve(&p, "analysis", "p", 1)?;
            let m = ctx.resolve(&m, "analysis", "m", 1)?;
            let dmin = ctx.resolve(&delta_min, "domain", "delta_min", 1e-3)?;
            let dcount = ctx.resolve(&delta_count, "domain", "delta_count", 32)?;
            if ctx.dry_run {
                println!("dry-run ok: analyze npm p={p} m={m}");
                return Ok(0);
            }
            let dg = DeltaGrid::geometric(dmin, dcount).map_err(Error::Analysis)?;
            let v = npm_seminorm(&f, p, m, &domain, &dg, &grid).map_err(Error::Analysis)?;
            println!("N^{{{}}} = {v:.9e}", p * m);
            Envelope::new(
                "analyze npm",
                ctx.seed,
                serde_json::json!({"p": p, "m": m, "value": v}),
            )
            .write_json(&ctx.json_path("analyze_npm"))?;
            Ok(0)
        }
        AnalyzeCmd::Recursion { op, common, weight, pmax, k, delta_min, delta_count } => {
            let (op, f, domain, grid) = analyze_inputs(ctx, &op, &common, 33)?;
            let op = op.ok_or_else(|| Error::Usage("missing --op".into()))?;
            let w = weight_from(ctx, &weight)?;
            let pmax = ctx.resolve(&pmax, "analysis", "pmax", 4)?;
            let k = ctx.resolve(&k, "analysis", "k", 1.0)?;
            let dmin = ctx.resolve(&delta_min, "domain", "delta_min", 1e-2)?;
            let dcount = ctx.resolve(&delta_count, "domain", "delta_count", 16)?;
            if ctx.dry_run {
                println!("dry-run ok: analyze recursion pmax={pmax}");
                return Ok(0);
            }
            let dg = DeltaGrid::geometric(dmin, dcount).map_err(Error::Analysis)?;
            let rows = empirical_recursion_constant(&f, &op, pmax, k, &w.conjugate(), &domain, &dg, &grid)
                .map_err(Error::Analysis)?;
            let mut csv_rows = Vec::new();
            for r in &rows {
                println!(
                    "p={}: C0 = {}",
                    r.p,
                    r.c0.map(|c| format!("{c:.6e}")).unwrap_or_else(|| "undefined".into())
                );
                csv_rows.push(vec![
                    r.p.to_string(),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs_bracket),
                    r.c0.map(fmt_f64).unwrap_or_default(),
                ]);
            }
            Envelope::new("analyze recursion", ctx.seed, &rows)
                .write_json(&ctx.json_path("analyze_recursion"))?;
            write_csv(&ctx.csv_path("analyze_recursion"), &["p", "lhs", "rhs", "c0"], &csv_rows)?;
            Ok(0)
        }
    }
}

fn metivier_cmd(ctx: &Ctx, cmd: MetivierCmd) -> Result<i32, Error> {
    let MetivierCmd::Run { s, sigma, eps, delta, m, alpha_max, q_max, tol, r#box, control } = cmd;
    let s = ctx.resolve(&s, "metivier", "s", 2.0)?;
    let sigma = ctx.resolve(&sigma, "metivier", "sigma", 1.5)?;
    let eps = ctx.resolve(&eps, "metivier", "eps", 0.1)?;
    let delta = ctx.resolve(&delta, "metivier", "delta", 0.5)?;
    let m = ctx.resolve(&m, "metivier", "m", 2)?;
    let alpha_max = ctx.resolve(&alpha_max, "metivier", "alpha_max", 10)?;
    let q_max = ctx.resolve(&q_max, "metivier", "q_max", 6)?;
    let tol = ctx.resolve(&tol, "metivier", "tol", 1e-8)?;

    let op = parse_operator(&format!("1*D[{m},0]"), 2)?;
    let params = MetivierParams::new(s, sigma, eps, delta, vec![0.0, 0.0], vec![0.0, 1.0], op)?;
    let mut cfg = CounterexampleConfig::default_for(&params);
    cfg.alpha_max = alpha_max;
    cfg.qmax = q_max;
    cfg.deriv_tol_rel = tol;
    if let Some(text) = r#box.or_else(|| ctx.cfg.get("metivier", "box").map(String::from)) {
        cfg.domain = BoxDomain::parse(&text).map_err(Error::Analysis)?;
    }
    if ctx.dry_run {
        println!(
            "dry-run ok: metivier run eta={} eps_bound={:.6}",
            params.eta,
            params.summary().eps_bound
        );
        return Ok(0);
    }
    let weight = Weight::gevrey(s)?;
    let conj = weight.conjugate();
    let sigma_target = 0.5 * (s + 1.0 / params.eta);
    let rep = counterexample_report(&params, &conj, sigma_target, &cfg)?;
    println!("{}", rep.verdict);
    let mut rows = Vec::new();
    for d in &rep.derivative_checks {
        rows.push(vec![
            "derivative_check".into(),
            d.alpha.to_string(),
            fmt_f64(d.quadrature_re),
            fmt_f64(d.closed_form),
        ]);
    }
    for (q, v) in rep.iterate.values.iter().enumerate() {
        rows.push(vec!["iterate_norm".into(), q.to_string(), fmt_f64(*v), String::new()]);
    }
    Envelope::new("metivier run", ctx.seed, &rep).write_json(&ctx.json_path("metivier_run"))?;
    write_csv(&ctx.csv_path("metivier_run"), &["kind", "index", "value", "oracle"], &rows)?;

    if control {
        let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2)?;
        let control_params = params.control_with(lap)?;
        let crep = counterexample_report(&control_params, &conj, sigma_target, &cfg)?;
        let diff = (rep.derivative.fit.exponent - crep.iterate.fit.exponent).abs();
        println!("control: {} (|difference| = {diff:.4})", crep.verdict);
        Envelope::new("metivier control", ctx.seed, &crep)
            .write_json(&ctx.json_path("metivier_control"))?;
    }
    Ok(0)
}

fn report_cmd(ctx: &Ctx, cmd: ReportCmd) -> Result<i32, Error> {
    let ReportCmd::Merge { files } = cmd;
    if files.is_empty() {
        return Err(Error::Usage("report merge needs at least one file".into()));
    }
    if ctx.dry_run {
        println!("dry-run ok: report merge of {} files", files.len());
        return Ok(0);
    }
    let out = ctx.json_path("merged");
    merge_reports(&files, &out)?;
    println!("merged {} reports into {}", files.len(), out.display());
    Ok(0)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad number `{s}`"))))
        .collect()
}
