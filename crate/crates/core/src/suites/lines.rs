use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{exact_tol, Suite, SuiteContext, Worst};
use crate::error::Result;
use crate::heisenberg::{
    cq_inverse, fd_horizontal_hessian, fs_residual, is_degenerate, line_field, line_sublaplacian, mean_value_with,
    pullback_to_line, pushforward_field, rho_poly, GroupPoint, LineConstantCache, LineFrame, LinePoint, Mollifier,
};
use crate::poly::{group_nvars, norm_sq, Poly};
use crate::qma::{hessian_at, horizontal_hessian_direct, quadratic_form};
use crate::quaternion::{is_nonneg, Quaternion};
use crate::random::{
    random_group_poly, random_point, random_psh_quadratic, random_quaternion, random_quaternion_exact,
};
use crate::report::CheckRecord;
use crate::scalar::{Mode, Rational, Real};

/// Quaternionic Heisenberg lines: fundamental solution, intertwining, mean values, regularization.
pub struct Lines;

/// Random frame with `Λ ≥ 0.1`.
fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> Result<LineFrame<f64>> {
    loop {
        let q: Vec<_> = (0..n).map(|_| random_quaternion(rng)).collect();
        let eta = GroupPoint::from_coords(&random_point::<f64, _>(rng, n))?;
        let f = LineFrame::new(eta, q)?;
        if f.lambda() >= 0.1 {
            return Ok(f);
        }
    }
}

fn random_line_point(rng: &mut ChaCha8Rng) -> LinePoint<f64> {
    let mut c = || rng.gen_range(-1.0..1.0);
    LinePoint::new(Quaternion::new(c(), c(), c(), c()), c())
}

fn describe(f: &LineFrame<f64>) -> String {
    format!("eta = {:?}; q = {:?}", f.eta.coords(), f.q)
}

fn exact_checks<R: Real>(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let mut rng = ctx.rng(0x11);
    let tol = exact_tol(ctx, 1e-9);
    let mut inter = Worst::default();
    let mut quad = Worst::default();
    for _ in 0..ctx.trials_or(20) {
        let u = random_group_poly::<R, _>(&mut rng, n, 4, 3);
        let q: Vec<Quaternion<R>> = (0..n).map(|_| random_quaternion_exact(&mut rng)).collect();
        let eta = GroupPoint::from_coords(&random_point::<R, _>(&mut rng, n))?;
        let f = LineFrame::new(eta, q)?;
        let pulled = pullback_to_line(&f, &u)?;
        let inputs = format!("u = {u}; q = {:?}", f.q);
        let mut gap: f64 = 0.0;
        for j in 1..=4 {
            let lhs = line_field(&f, j, &pulled)?;
            let rhs = pullback_to_line(&f, &pushforward_field(&f, j, &u)?)?;
            gap = gap.max(lhs.sub(&rhs).norm_inf());
        }
        inter.record(gap, 0.0, gap, &inputs);

        let lhs = line_sublaplacian(&f, &pulled)?;
        let rhs = pullback_to_line(&f, &quadratic_form(&horizontal_hessian_direct(&u)?, &f.q)?)?;
        let gap = lhs.sub(&rhs).norm_inf() / rhs.norm_inf().max(1.0);
        quad.record(lhs.norm_inf(), rhs.norm_inf(), gap, &inputs);
    }
    Ok(vec![
        inter.finish("line-fields-intertwine", "line-pushforward", tol),
        quad.finish("line-laplacian-is-hessian-form", "line-laplacian-quadratic-form", tol),
    ])
}

fn fundamental_checks(ctx: &SuiteContext, frames: &[LineFrame<f64>], rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut smooth = Worst::default();
    let mut singular = Worst::default();
    let mut stable = Worst::default();
    let mut scaling = Worst::default();
    let base = cq_inverse(1.0, &ctx.quadrature)?.value();
    for f in frames {
        let rho = rho_poly(f);
        for _ in 0..20 {
            let p = random_line_point(rng);
            for eps in [1.0, 0.1] {
                let r = fs_residual(f, &p, eps)?;
                smooth.record(r, 0.0, r.abs(), format!("{}; p = {p:?}; eps = {eps}", describe(f)));
            }
            let mut far = p.clone();
            let rv = rho.eval(&p.coords()).re;
            if rv < 1.0 {
                let s = 1.01 * rv.max(1e-12).powf(-0.25);
                far = LinePoint::new(p.lambda.scale(&s), p.t * s * s);
            }
            let r = fs_residual(f, &far, 0.0)?;
            singular.record(r, 0.0, r.abs(), format!("{}; p = {far:?}", describe(f)));
        }
        let inv = cq_inverse(f.lambda(), &ctx.quadrature)?;
        let change = inv.relative_change();
        stable.record(inv.value(), change, change, describe(f));
        let scaled = inv.value() * f.lambda();
        scaling.record(scaled, base, (scaled - base).abs() / base, describe(f));
    }
    Ok(vec![
        smooth.finish("regularized-fundamental-residual", "line-fundamental-solution", ctx.tol_or(1e-9)),
        singular.finish("fundamental-residual-away-from-origin", "line-fundamental-solution", ctx.tol_or(1e-8)),
        stable.finish("cq-refinement-stable", "line-fundamental-constant", ctx.tol_or(1e-4)),
        scaling.finish("cq-lambda-scaling", "line-fundamental-constant", ctx.tol_or(1e-3)),
    ])
}

fn mean_value_checks(ctx: &SuiteContext, frames: &[LineFrame<f64>], rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let mut cache = LineConstantCache::default();
    let one = Poly::<f64>::one(group_nvars(n));
    let neg = norm_sq::<f64>(n).scale_real(&-1.0);
    let mut unit = Worst::default();
    let mut sub = Worst::default();
    let mut detected = true;
    let mut detected_inputs = String::new();
    let us: Vec<_> = (0..ctx.trials_or(20)).map(|_| random_psh_quadratic(rng, n, 0.0)).collect::<Result<_>>()?;
    for f in frames {
        let mq = cache.get(f, &ctx.quadrature)?.mq();
        let eta = f.eta.coords();
        for r in [0.1, 0.5, 1.0] {
            let m = mean_value_with(f, &one, r, &ctx.quadrature, mq)?;
            unit.record(m, 1.0, (m - 1.0).abs(), format!("{}; r = {r}", describe(f)));
        }
        for r in [0.1, 0.5] {
            for u in &us {
                let m = mean_value_with(f, u, r, &ctx.quadrature, mq)?;
                let at = u.eval(&eta).re;
                sub.record(m, at, (at - m).max(0.0), format!("u = {u}; {}; r = {r}", describe(f)));
            }
            let m = mean_value_with(f, &neg, r, &ctx.quadrature, mq)?;
            detected &= m < neg.eval(&eta).re - 1e-6;
            detected_inputs.push_str(&format!("{}; r = {r}\n", describe(f)));
        }
    }
    Ok(vec![
        unit.finish("mean-value-of-one", "line-mean-value-normalization", ctx.tol_or(1e-6)),
        sub.finish("psh-sub-mean-value", "line-sub-mean-value", ctx.tol_or(1e-4)),
        CheckRecord::flag("non-psh-mean-value-detected", "line-sub-mean-value", &detected_inputs, detected),
    ])
}

fn degenerate_checks(ctx: &SuiteContext, frames: &[LineFrame<f64>]) -> Result<CheckRecord> {
    let n = ctx.n;
    let mut ok = frames.iter().all(|f| !is_degenerate(&f.q, 1e-12).unwrap_or(true));
    if n >= 2 {
        let mut q = vec![Quaternion::zero(); n];
        q[0] = Quaternion::one();
        q[1] = Quaternion::unit_j();
        ok &= is_degenerate(&q, 1e-12)?;
        let f = LineFrame::new(GroupPoint::identity(n), q)?;
        ok &= fs_residual(&f, &LinePoint::new(Quaternion::one(), 0.0), 1.0).is_err();
    }
    Ok(CheckRecord::flag("degenerate-lines-rejected", "degenerate-locus", &format!("n = {n}"), ok))
}

fn mollifier_checks(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let moll = Mollifier::new(n, 0.5, 2)?;
    let mut consts = Worst::default();
    let mut hess = Worst::default();
    let mut psh = true;
    let mut inputs = String::new();
    for _ in 0..5 {
        let xi = GroupPoint::from_coords(&random_point::<f64, _>(rng, n))?;
        let c = moll.apply(|_| 3.0, &xi)?;
        consts.record(c, 3.0, (c - 3.0).abs() / 3.0, format!("{:?}", xi.coords()));
        let u = random_psh_quadratic(rng, n, 0.0)?;
        let compiled = u.compile();
        let h = fd_horizontal_hessian(|p| moll.apply(|g| compiled.eval_re(&g.coords()), p), &xi, 1e-2)?;
        let exact = hessian_at(&u, &xi.coords())?;
        let gap = h.matrix().sub(exact.matrix())?.norm_inf() / exact.matrix().norm_inf().max(1.0);
        hess.record(gap, 0.0, gap, format!("u = {u}; xi = {:?}", xi.coords()));
        psh &= is_nonneg(&h, 1e-6);
        inputs.push_str(&format!("{u}\n"));
    }
    Ok(vec![
        consts.finish("mollifier-reproduces-constants", "left-regularization", ctx.tol_or(1e-12)),
        hess.finish("mollifier-keeps-quadratic-hessian", "left-regularization", ctx.tol_or(1e-6)),
        CheckRecord::flag("mollifier-preserves-psh", "left-regularization", &inputs, psh),
    ])
}

impl Suite for Lines {
    fn name(&self) -> &'static str {
        "lines"
    }

    fn description(&self) -> &'static str {
        "fundamental solution, intertwining and mean values on quaternionic Heisenberg lines"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        let mut out = match ctx.mode {
            Mode::Rational => exact_checks::<Rational>(ctx)?,
            Mode::Float => exact_checks::<f64>(ctx)?,
        };
        let mut rng = ctx.rng(0x12);
        let frames: Vec<_> = (0..5).map(|_| random_frame(&mut rng, ctx.n)).collect::<Result<_>>()?;
        out.extend(fundamental_checks(ctx, &frames, &mut rng)?);
        let more: Vec<_> = (0..10).map(|_| random_frame(&mut rng, ctx.n)).collect::<Result<_>>()?;
        out.extend(mean_value_checks(ctx, &more, &mut rng)?);
        out.push(degenerate_checks(ctx, &frames)?);
        out.extend(mollifier_checks(ctx, &mut rng)?);
        Ok(out)
    }
}
