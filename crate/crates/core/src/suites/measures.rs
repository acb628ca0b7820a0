use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Suite, SuiteContext, Worst};
use crate::calculus::Prime;
use crate::error::{Error, Result};
use crate::heisenberg::GroupPoint;
use crate::measures::{
    cln_check, comparison_check, ma_convergence_check, minimum_principle_check, stokes_check, superadditivity_integral,
    superadditivity_pointwise, BoxDomain, GridSpec,
};
use crate::poly::{group_nvars, norm_sq, Poly};
use crate::random::{random_group_poly, random_nonneg_hyperhermitian, random_poly_form, random_psh_quadratic};
use crate::report::CheckRecord;

/// Monge-Ampère measures: superadditivity, comparison, minimum principle, CLN, Stokes, convergence.
///
/// Always evaluated in floating point; the mode only labels the report.
pub struct Measures;

fn unit_box(n: usize) -> Result<BoxDomain> {
    BoxDomain::koranyi_box(GroupPoint::identity(n), 1.0)
}

/// Grid for the unit gauge ball: it must put nodes inside the ball.
fn ball_grid(ctx: &SuiteContext) -> GridSpec {
    if ctx.n >= 3 {
        GridSpec { points_per_axis: 3, rule: "midpoint".into(), refinement_levels: 0 }
    } else {
        ctx.grid.clone()
    }
}

/// A PSH quadratic plus `c|x|⁴`, which keeps it PSH.
fn psh_quartic(rng: &mut ChaCha8Rng, n: usize) -> Result<Poly<f64>> {
    let c = rng.gen_range(0.0..0.5);
    Ok(random_psh_quadratic(rng, n, 0.0)?.add(&norm_sq::<f64>(n).pow(2).scale_real(&c)))
}

fn superadditivity(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let mut point = Worst::default();
    for _ in 0..200 {
        let a = random_nonneg_hyperhermitian(rng, n);
        let b = random_nonneg_hyperhermitian(rng, n);
        let (l, r) = superadditivity_pointwise(&a, &b)?;
        point.record(l, r, (r - l).max(0.0) / l.abs().max(1.0), format!("A = {a:?}; B = {b:?}"));
    }
    let dom = unit_box(n)?;
    let mut integral = Worst::default();
    for _ in 0..20 {
        let (u, v) = (psh_quartic(rng, n)?, psh_quartic(rng, n)?);
        let (l, r) = superadditivity_integral(&u, &v, &dom, &ctx.grid)?;
        integral.record(l, r, (r - l).max(0.0) / l.abs().max(1.0), format!("u = {u}; v = {v}"));
    }
    Ok(vec![
        point.finish("superadditivity-pointwise", "determinant-superadditivity", ctx.tol_or(1e-10)),
        integral.finish("superadditivity-integral", "determinant-superadditivity", ctx.tol_or(1e-10)),
    ])
}

fn comparison(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let dom = BoxDomain::gauge_ball(GroupPoint::identity(n), 1.0)?;
    let grid = ball_grid(ctx);
    let v = dom.gauge_defining_poly()?;
    let mut family = Worst::default();
    let mut all_pass = true;
    for eps in [0.1, 0.2, 0.5] {
        let u = v.scale_real(&(1.0 - eps));
        let r = comparison_check(&u, &v, &dom, &grid, 1e-9)?;
        all_pass &= r.pass;
        let ratio = r.mass_u / r.mass_v;
        let expect = (1.0 - eps).powi(n as i32);
        family.record(ratio, expect, (ratio - expect).abs(), format!("eps = {eps}"));
    }
    let swapped = matches!(comparison_check(&v, &v.scale_real(&0.5), &dom, &grid, 1e-9), Err(Error::Hypothesis { .. }));
    Ok(vec![
        family.finish("comparison-scaling-ratio", "comparison-principle", ctx.tol_or(1e-3)),
        CheckRecord::flag("comparison-scaling-family", "comparison-principle", "eps in 0.1, 0.2, 0.5", all_pass),
        CheckRecord::flag("comparison-rejects-swapped", "comparison-principle", "u = v, v = v/2", swapped),
    ])
}

fn minimum_principle(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let dom = BoxDomain::gauge_ball(GroupPoint::identity(n), 1.0)?;
    let grid = ball_grid(ctx);
    let g = dom.gauge_defining_poly()?;
    let nv = group_nvars(n);
    let mut cases: Vec<(Poly<f64>, Poly<f64>)> = Vec::new();
    for alpha in [0.0, 0.25, 0.5, 0.75] {
        cases.push((g.scale_real(&alpha), g.clone()));
    }
    for c in [-1.0, 0.5, 2.0] {
        cases.push((g.add(&Poly::real_constant(nv, c)), g.clone()));
    }
    for _ in 0..ctx.trials_or(10) {
        let w = random_psh_quadratic(rng, n, 0.0)?;
        let (a, b, c) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0));
        let u = g.scale_real(&a).add(&w.scale_real(&b)).add(&Poly::real_constant(nv, c));
        cases.push((u, g.add(&w)));
    }
    let (mut accepted, mut passed, mut filtered) = (0usize, 0usize, 0usize);
    let mut inputs = String::new();
    for (u, v) in &cases {
        inputs.push_str(&format!("u = {u}; v = {v}\n"));
        match minimum_principle_check(u, v, &dom, &grid, 1e-9) {
            Ok(r) => {
                accepted += 1;
                passed += usize::from(r.pass);
            }
            Err(Error::Hypothesis { .. }) => filtered += 1,
            Err(e) => return Err(e),
        }
    }
    let rate = if accepted == 0 { 0.0 } else { passed as f64 / accepted as f64 };
    Ok(vec![
        CheckRecord::with_residual(
            "minimum-principle-pass-rate",
            "minimum-principle",
            &inputs,
            rate,
            1.0,
            1.0 - rate,
            0.0,
        ),
        CheckRecord::at_least(
            "minimum-principle-cases-accepted",
            "minimum-principle",
            &format!("filtered = {filtered}"),
            accepted as f64,
            7.0,
            0.0,
        ),
    ])
}

/// Gauss-Legendre, refined once, for `n = 1`; the requested grid otherwise.
fn cln_grid(ctx: &SuiteContext) -> GridSpec {
    match ctx.n {
        1 => GridSpec { points_per_axis: 2, rule: "gauss-legendre".into(), refinement_levels: 1 },
        _ => ctx.grid.clone(),
    }
}

fn cln(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let grid = cln_grid(ctx);
    let k = unit_box(n)?;
    let l = BoxDomain::koranyi_box(GroupPoint::identity(n), 0.5)?;
    let mut invariance = Worst::default();
    let mut bounded = true;
    let mut stable = Worst::default();
    for _ in 0..ctx.trials_or(5) {
        let count = rng.gen_range(1..=n);
        let us: Vec<_> = (0..count).map(|_| psh_quartic(rng, n)).collect::<Result<_>>()?;
        let text: Vec<String> = us.iter().map(ToString::to_string).collect();
        let r = cln_check(&us, &k, &l, &grid, 1e-9)?;
        bounded &= r.ratio.is_finite() && r.ratio >= 0.0;
        let mut scaled = us.clone();
        scaled[0] = scaled[0].scale_real(&3.0);
        let s = cln_check(&scaled, &k, &l, &grid, 1e-9)?;
        invariance.record(s.ratio, r.ratio, (s.ratio - r.ratio).abs() / r.ratio.abs().max(1e-300), text.join("; "));
        if r.refinement.values.len() > 1 {
            let change = r.refinement.relative_change();
            stable.record(r.lhs, change, change, text.join("; "));
        }
    }
    // one constant bounds the ratio across a family normalized to sup |u| = 1 on K
    let mut family_max: f64 = 0.0;
    let mut family = String::new();
    for _ in 0..20 {
        let u = random_psh_quadratic(rng, n, 0.0)?;
        let r = cln_check(std::slice::from_ref(&u), &k, &l, &ctx.grid, 1e-9)?;
        let normalized = u.scale_real(&(1.0 / r.bound.max(1e-300)));
        let r = cln_check(&[normalized], &k, &l, &ctx.grid, 1e-9)?;
        family_max = family_max.max(r.ratio);
        family.push_str(&format!("{u}\n"));
    }
    let finite = if family_max.is_finite() { 0.0 } else { f64::INFINITY };
    let mut out = vec![
        invariance.finish("cln-ratio-scale-invariant", "cln-estimate", ctx.tol_or(1e-10)),
        CheckRecord::flag("cln-ratio-finite", "cln-estimate", &format!("n = {n}"), bounded),
        CheckRecord::with_residual(
            "cln-family-max-ratio",
            "cln-estimate",
            &family,
            family_max,
            family_max,
            finite,
            0.0,
        ),
    ];
    if stable.count > 0 {
        out.push(stable.finish("cln-refinement-stable", "cln-estimate", ctx.tol_or(1e-3)));
    }
    Ok(out)
}

/// Stokes on the unit box with `h` vanishing on its faces; Gauss-Legendre is exact here.
/// Only run for `n = 1`: the face bump has `2^{4n+1}` terms.
fn stokes(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Option<CheckRecord>> {
    let n = ctx.n;
    if n > 1 {
        return Ok(None);
    }
    let dom = unit_box(n)?;
    let nv = group_nvars(n);
    let grid = GridSpec { points_per_axis: 2, rule: "gauss-legendre".into(), refinement_levels: 0 };
    let mut bump = Poly::one(nv);
    for v in 0..nv {
        bump = bump.mul(&Poly::one(nv).sub(&Poly::var(nv, v).pow(2)));
    }
    let mut worst = Worst::default();
    for _ in 0..ctx.trials_or(10) {
        let h = bump.mul(&random_group_poly::<f64, _>(rng, n, 2, 1));
        let t = random_poly_form::<f64, _>(rng, n, 2 * n - 1, 2);
        for alpha in [Prime::Zero, Prime::One] {
            let r = stokes_check(&h, &t, alpha, &dom, &grid)?;
            worst.record(r.volume_term.0, -r.boundary_term.0, r.residual / r.scale, format!("h = {h}; T = {t:?}"));
        }
    }
    Ok(Some(worst.finish("stokes-d-alpha", "integration-by-parts", ctx.tol_or(1e-9))))
}

fn convergence(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let dom = unit_box(n)?;
    let nv = group_nvars(n);
    let chi = Poly::one(nv).sub(&Poly::var(nv, 0).pow(2)).mul(&Poly::one(nv).sub(&Poly::var(nv, nv - 1).pow(2)));
    let mut agree = Worst::default();
    let mut cauchy = true;
    let mut inputs = String::new();
    for _ in 0..3 {
        let u = psh_quartic(rng, n)?;
        let table = ma_convergence_check(&u, &chi, &dom, &ctx.grid, &[1, 2, 4, 8], 1e-9)?;
        let scale = table.direct.abs().max(1.0);
        let gap = (table.first_limit - table.second_limit).abs().max((table.first_limit - table.direct).abs()) / scale;
        agree.record(table.first_limit, table.second_limit, gap, format!("u = {u}"));
        cauchy &= table.cauchy;
        inputs.push_str(&format!("{u}\n"));
    }
    Ok(vec![
        agree.finish("convergence-limits-agree", "monge-ampere-continuity", ctx.tol_or(1e-6)),
        CheckRecord::flag("convergence-table-cauchy", "monge-ampere-continuity", &inputs, cauchy),
    ])
}

impl Suite for Measures {
    fn name(&self) -> &'static str {
        "measures"
    }

    fn description(&self) -> &'static str {
        "superadditivity, comparison, minimum principle, CLN, Stokes and convergence of Monge-Ampere measures"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        let mut rng = ctx.rng(0x7a);
        let mut out = superadditivity(ctx, &mut rng)?;
        out.extend(comparison(ctx)?);
        out.extend(minimum_principle(ctx, &mut rng)?);
        out.extend(cln(ctx, &mut rng)?);
        out.extend(stokes(ctx, &mut rng)?);
        out.extend(convergence(ctx, &mut rng)?);
        Ok(out)
    }
}
