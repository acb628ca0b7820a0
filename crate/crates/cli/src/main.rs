use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qmahg::config::Config;
use qmahg::heisenberg::{
    cq_inverse, fundamental_solution, is_degenerate, line_constants, GroupPoint, LineFrame, LinePoint,
};
use qmahg::measures::{
    cln_check, comparison_check, integrate_density, ma_convergence_check, minimum_principle_check, write_density_csv,
    BoxDomain,
};
use qmahg::poly::{parse_poly, parse_poly_vars, Poly};
use qmahg::qma::{psh_violation, qma_density, verify_delta_power_identity};
use qmahg::quaternion::Quaternion;
use qmahg::report::{CheckRecord, ReportDocument};
use qmahg::scalar::{factorial, Mode, Rational, Real};
use qmahg::suites::{SuiteContext, SuiteRegistry};
use qmahg::{Error, Result};

#[derive(Parser)]
#[command(name = "qmahg", version, about = "Quaternionic Monge-Ampère calculus on the Heisenberg group")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Quaternionic dimension of the group.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Arithmetic for the symbolic checks.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides every check's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of random trials per check.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Write the JSON report here; `-` prints it to stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// TOML file with the same keys as these flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Grid points per axis for volume integrals.
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    /// Grid refinement levels for volume integrals.
    #[arg(long, global = true)]
    grid_levels: Option<usize>,

    /// Grid rule for volume integrals: midpoint, trapezoid or gauss-legendre.
    #[arg(long, global = true)]
    grid_rule: Option<String>,

    /// Record `elapsed_ms` as 0 so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Args, Clone)]
struct Domain {
    /// Center as `x1,…,x4n,t`; the identity by default.
    #[arg(long)]
    center: Option<String>,

    #[arg(long, default_value_t = 1.0)]
    radius: f64,

    /// Restrict to the gauge ball instead of the Korányi box.
    #[arg(long)]
    gauge: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite, or `all`.
    Verify { suite: String },
    /// List the registered suites.
    Suites,
    /// Monge-Ampère density `det(Hess u)` at a point.
    Density {
        #[arg(long = "fn", allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Checks the Hessian of `u` is nonnegative on random samples of a box.
    Psh {
        #[arg(long = "fn", allow_hyphen_values = true)]
        u: String,
        #[command(flatten)]
        domain: Domain,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Constants of the fundamental solution on the line through the identity in direction `q`.
    Fundamental {
        /// Quaternions `a,b,c,d` separated by `;`.
        #[arg(long)]
        q: String,
        /// Quadrature refinement levels.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        /// Optional line point `l1,l2,l3,l4,t` at which to evaluate the solution.
        #[arg(long)]
        point: Option<String>,
    },
    /// `∫ (Δu)ⁿ` over a domain by grid quadrature.
    Integrate {
        #[arg(long = "fn", allow_hyphen_values = true)]
        u: String,
        #[command(flatten)]
        domain: Domain,
        /// Also write the density on the grid lattice as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Chern-Levine-Nirenberg ratio for `Δu_1∧…∧Δu_k` on nested boxes.
    Cln {
        #[arg(long = "fn", required = true, allow_hyphen_values = true)]
        us: Vec<String>,
        #[arg(long)]
        center: Option<String>,
        /// Radius of the outer box `K`.
        #[arg(long, default_value_t = 1.0)]
        outer: f64,
        /// Radius of the inner box `L`.
        #[arg(long, default_value_t = 0.5)]
        inner: f64,
    },
    /// Comparison of Monge-Ampère masses for `u ≥ v` with `u = v` on the boundary.
    Compare {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        domain: Domain,
    },
    /// Minimum principle for `(Δu)ⁿ ≤ (Δv)ⁿ`.
    Minprinciple {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        domain: Domain,
    },
    /// Masses along PSH sequences decreasing to `u`.
    Convergence {
        #[arg(long = "fn", allow_hyphen_values = true)]
        u: String,
        /// Test function; 1 by default.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        js: Vec<usize>,
        #[command(flatten)]
        domain: Domain,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_csv(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Validation(format!("bad number `{}`: {e}", v.trim()))))
        .collect()
}

fn parse_quaternions(s: &str) -> Result<Vec<Quaternion<f64>>> {
    s.split(';')
        .map(|part| {
            let c = parse_csv(part)?;
            let c: [f64; 4] =
                c.try_into().map_err(|_| Error::Validation(format!("quaternion `{part}` needs 4 components")))?;
            Ok(Quaternion::from_components(c))
        })
        .collect()
}

/// The suite context and report path, from the config file overridden by flags.
fn context(g: &Global) -> Result<(SuiteContext, Option<PathBuf>)> {
    let mut cfg = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.n = g.n.or(cfg.n);
    cfg.mode = g.mode.or(cfg.mode);
    cfg.seed = g.seed.or(cfg.seed);
    cfg.tol = g.tol.or(cfg.tol);
    cfg.trials = g.trials.or(cfg.trials);
    if g.grid_points.is_some() || g.grid_levels.is_some() || g.grid_rule.is_some() {
        let grid = cfg.grid.get_or_insert_with(Default::default);
        grid.points_per_axis = g.grid_points.or(grid.points_per_axis);
        grid.refinement_levels = g.grid_levels.or(grid.refinement_levels);
        grid.rule = g.grid_rule.clone().or(grid.rule.take());
    }
    let report = g.report.clone().or(cfg.report.clone());
    Ok((cfg.context()?, report))
}

fn domain(ctx: &SuiteContext, d: &Domain) -> Result<BoxDomain> {
    let center = match &d.center {
        Some(c) => GroupPoint::from_coords(&parse_csv(c)?)?,
        None => GroupPoint::identity(ctx.n),
    };
    if center.n() != ctx.n {
        return Err(Error::Dimension(format!("center has n = {} but --n is {}", center.n(), ctx.n)));
    }
    if d.gauge {
        BoxDomain::gauge_ball(center, d.radius)
    } else {
        BoxDomain::koranyi_box(center, d.radius)
    }
}

fn poly(ctx: &SuiteContext, src: &str) -> Result<Poly<f64>> {
    parse_poly(src, ctx.n)
}

fn density<R: Real>(ctx: &SuiteContext, src: &str, point: &str) -> Result<(String, CheckRecord)> {
    let u = parse_poly::<R>(src, ctx.n)?;
    let p = point
        .split(',')
        .map(|v| {
            let c = parse_poly_vars::<R>(v, 0)?;
            if !c.is_real() {
                return Err(Error::Validation(format!("point coordinate `{}` is not real", v.trim())));
            }
            Ok(c.constant_term().re)
        })
        .collect::<Result<Vec<R>>>()?;
    let value = qma_density(&u, &p)?;
    let id = verify_delta_power_identity(&u, &p)?;
    let via_power = id.lhs / factorial(ctx.n) as f64;
    let tol = match ctx.mode {
        Mode::Rational => ctx.tol.unwrap_or(0.0),
        Mode::Float => ctx.tol.unwrap_or(1e-8),
    };
    let residual = if id.exact_match { 0.0 } else { id.residual.max(f64::MIN_POSITIVE) };
    let inputs = format!("u = {u}; point = {point}");
    let rec = CheckRecord::with_residual(
        "density",
        "laplacian-power-identity",
        &inputs,
        value.to_f64(),
        via_power,
        residual,
        tol,
    );
    Ok((value.to_string(), rec))
}

fn run(cli: &Cli) -> Result<ReportDocument> {
    let (ctx, report) = context(&cli.global)?;
    let start = Instant::now();
    let mut lines = Vec::new();
    let (suite, checks) = match &cli.command {
        Command::Verify { suite } => {
            let doc = SuiteRegistry::default().run(suite, &ctx)?;
            (doc.suite, doc.checks)
        }
        Command::Suites => unreachable!("handled before context"),
        Command::Density { u, point } => {
            let (value, rec) = match ctx.mode {
                Mode::Rational => density::<Rational>(&ctx, u, point)?,
                Mode::Float => density::<f64>(&ctx, u, point)?,
            };
            lines.push(format!("density = {value}"));
            ("density".into(), vec![rec])
        }
        Command::Psh { u, domain: d, samples } => {
            let dom = domain(&ctx, d)?;
            let up = poly(&ctx, u)?;
            let mut pts = dom.interior_samples(*samples, ctx.seed);
            pts.extend(dom.boundary_samples(*samples / 4 + 1, ctx.seed ^ 1));
            let tol = ctx.tol_or(1e-9);
            let inputs = format!("u = {up}; samples = {samples}");
            let rec = match psh_violation(&up, &pts, tol)? {
                None => {
                    lines.push(format!("PSH on {} samples", pts.len()));
                    CheckRecord::flag("psh", "psh-hessian-nonnegative", &inputs, true)
                }
                Some((p, v)) => {
                    lines.push(format!("not PSH: Hessian eigenvalue {v:e} at {p:?}"));
                    CheckRecord::at_least("psh", "psh-hessian-nonnegative", &inputs, v, 0.0, tol)
                }
            };
            ("psh".into(), vec![rec])
        }
        Command::Fundamental { q, refine, point } => {
            let q = parse_quaternions(q)?;
            if q.len() != ctx.n {
                return Err(Error::Dimension(format!("got {} quaternions but --n is {}", q.len(), ctx.n)));
            }
            if is_degenerate(&q, 1e-12)? {
                return Err(Error::Validation("q lies on the degenerate locus".into()));
            }
            let frame = LineFrame::new(GroupPoint::identity(ctx.n), q)?;
            let mut quad = ctx.quadrature.clone();
            quad.refinement_levels = *refine;
            let inv = cq_inverse(frame.lambda(), &quad)?;
            let consts = line_constants(&frame, &quad)?;
            lines.push(format!("Lambda = {}", frame.lambda()));
            lines.push(format!("C_q = {}", consts.cq()));
            lines.push(format!("m_q = {}", consts.mq()));
            lines.push(format!("C_q^-1 by level = {:?}", inv.values));
            let inputs = format!("q = {:?}; refine = {refine}", frame.q);
            let change = inv.relative_change();
            let mut checks = vec![CheckRecord::with_residual(
                "cq-refinement-stable",
                "line-fundamental-constant",
                &inputs,
                inv.value(),
                inv.values.first().copied().unwrap_or(inv.value()),
                change,
                ctx.tol_or(1e-4),
            )];
            if let Some(p) = point {
                let c = parse_csv(p)?;
                if c.len() != 5 {
                    return Err(Error::Dimension("a line point has 5 coordinates".into()));
                }
                let lp = LinePoint::new(Quaternion::new(c[0], c[1], c[2], c[3]), c[4]);
                let g = fundamental_solution(&frame, &lp, consts.cq())?;
                lines.push(format!("Gamma_q({p}) = {g}"));
                checks.push(CheckRecord::flag(
                    "fundamental-finite",
                    "line-fundamental-solution",
                    &inputs,
                    g.is_finite(),
                ));
            }
            ("fundamental".into(), checks)
        }
        Command::Integrate { u, domain: d, csv } => {
            let dom = domain(&ctx, d)?;
            let up = poly(&ctx, u)?;
            let r = integrate_density(&up, &dom, &ctx.grid)?;
            lines.push(format!("integral = {}", r.value()));
            lines.push(format!("by level = {:?}", r.values));
            if let Some(path) = csv {
                write_density_csv(&up, &dom, ctx.grid.points_per_axis, std::fs::File::create(path)?)?;
                lines.push(format!("density grid written to {}", path.display()));
            }
            let inputs = format!("u = {up}; grid = {:?}", ctx.grid);
            let change = r.relative_change();
            let rec = CheckRecord::with_residual(
                "integral-refinement-stable",
                "density-integral",
                &inputs,
                r.value(),
                r.values[0],
                change,
                ctx.tol_or(1e-3),
            );
            ("integrate".into(), vec![rec])
        }
        Command::Cln { us, center, outer, inner } => {
            let c = match center {
                Some(c) => GroupPoint::from_coords(&parse_csv(c)?)?,
                None => GroupPoint::identity(ctx.n),
            };
            let k = BoxDomain::koranyi_box(c.clone(), *outer)?;
            let l = BoxDomain::koranyi_box(c, *inner)?;
            let ps = us.iter().map(|s| poly(&ctx, s)).collect::<Result<Vec<_>>>()?;
            let r = cln_check(&ps, &k, &l, &ctx.grid, ctx.tol_or(1e-9))?;
            lines.push(format!("mass = {}, bound = {}, ratio = {}", r.lhs, r.bound, r.ratio));
            let inputs = us.join("; ");
            let rec = CheckRecord::flag("cln-ratio-finite", "cln-estimate", &inputs, r.ratio.is_finite());
            ("cln".into(), vec![rec])
        }
        Command::Compare { u, v, domain: d } => {
            let dom = domain(&ctx, d)?;
            let (up, vp) = (poly(&ctx, u)?, poly(&ctx, v)?);
            let tol = ctx.tol_or(1e-6);
            let r = comparison_check(&up, &vp, &dom, &ctx.grid, tol)?;
            lines.push(format!("mass(u) = {}, mass(v) = {}", r.mass_u, r.mass_v));
            let inputs = format!("u = {up}; v = {vp}");
            let rec = CheckRecord::at_least("comparison", "comparison-principle", &inputs, r.mass_v, r.mass_u, tol);
            ("compare".into(), vec![rec])
        }
        Command::Minprinciple { u, v, domain: d } => {
            let dom = domain(&ctx, d)?;
            let (up, vp) = (poly(&ctx, u)?, poly(&ctx, v)?);
            let tol = ctx.tol_or(1e-6);
            let r = minimum_principle_check(&up, &vp, &dom, &ctx.grid, tol)?;
            lines.push(format!("min over closure = {}, min over boundary = {}", r.min_closure, r.min_boundary));
            let inputs = format!("u = {up}; v = {vp}");
            let rec = CheckRecord::at_least(
                "minimum-principle",
                "minimum-principle",
                &inputs,
                r.min_closure,
                r.min_boundary,
                tol,
            );
            ("minprinciple".into(), vec![rec])
        }
        Command::Convergence { u, chi, js, domain: d } => {
            let dom = domain(&ctx, d)?;
            let (up, cp) = (poly(&ctx, u)?, poly(&ctx, chi)?);
            let tol = ctx.tol_or(1e-6);
            let t = ma_convergence_check(&up, &cp, &dom, &ctx.grid, js, tol)?;
            for (k, j) in t.js.iter().enumerate() {
                lines.push(format!("j = {j}: {} {}", t.first[k], t.second[k]));
            }
            lines.push(format!("limits = {} {}, direct = {}", t.first_limit, t.second_limit, t.direct));
            let inputs = format!("u = {up}; chi = {cp}; js = {js:?}");
            let gap = (t.first_limit - t.second_limit).abs();
            let to_direct = (t.first_limit - t.direct).abs();
            (
                "convergence".into(),
                vec![
                    CheckRecord::with_residual(
                        "sequence-limits-agree",
                        "monge-ampere-continuity",
                        &inputs,
                        t.first_limit,
                        t.second_limit,
                        gap,
                        tol,
                    ),
                    CheckRecord::with_residual(
                        "limit-matches-direct",
                        "monge-ampere-continuity",
                        &inputs,
                        t.first_limit,
                        t.direct,
                        to_direct,
                        tol,
                    ),
                    CheckRecord::flag("cauchy", "monge-ampere-continuity", &inputs, t.cauchy),
                ],
            )
        }
    };
    let elapsed_ms = if cli.global.no_timings { 0 } else { start.elapsed().as_millis() as u64 };
    let doc = ReportDocument { suite, checks, seed: ctx.seed, n: ctx.n, mode: ctx.mode.as_str().into(), elapsed_ms };
    emit(&doc, &lines, report.as_deref())?;
    Ok(doc)
}

fn emit(doc: &ReportDocument, lines: &[String], report: Option<&std::path::Path>) -> Result<()> {
    let to_stdout = report.is_some_and(|p| p.as_os_str() == "-");
    let mut human = lines.to_vec();
    for c in &doc.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        human.push(format!("{verdict} {} [{}] residual {:e} tol {:e}", c.name, c.anchor, c.residual, c.tol));
    }
    let failed = doc.failures().count();
    human.push(format!("{}: {} checks, {failed} failed, {} ms", doc.suite, doc.checks.len(), doc.elapsed_ms));
    // a closed pipe is not an error worth reporting
    for l in &human {
        let _ = if to_stdout { writeln!(std::io::stderr(), "{l}") } else { writeln!(std::io::stdout(), "{l}") };
    }
    match report {
        Some(_) if to_stdout => {
            let _ = writeln!(std::io::stdout(), "{}", doc.to_json()?);
        }
        Some(p) => std::fs::write(p, doc.to_json()? + "\n")?,
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Suites = cli.command {
        let r = SuiteRegistry::default();
        for name in r.names() {
            let s = r.get(name).expect("registered");
            println!("{name:<12} {}", s.description());
        }
        return ExitCode::SUCCESS;
    }
    match run(&cli) {
        Ok(doc) if doc.all_pass() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
