use super::{exact_tol, Suite, SuiteContext, Worst};
use crate::calculus::{d0, d1, eval_form, laplacian, scalar_form};
use crate::error::Result;
use crate::exterior::{
    positivity_certificate_2nform, strong_positivity_certificate, strong_positivity_test_2form, ConstForm,
};
use crate::poly::{group_nvars, norm_sq};
use crate::qma::hessian_at;
use crate::quaternion::{eigen_hyperhermitian, is_nonneg};
use crate::random::{random_group_poly, random_point, random_psh_quadratic};
use crate::report::CheckRecord;
use crate::scalar::{one_cx, Mode, Rational, Real};

/// Strong positivity of `d_0u∧d_1u`, nonnegativity of PSH Hessians, and `β_n`.
pub struct Positivity;

fn gradient_forms<R: Real>(ctx: &SuiteContext, tol: f64) -> Result<CheckRecord> {
    let n = ctx.n;
    let mut rng = ctx.rng(0x90);
    let mut worst = Worst::default();
    let trials = ctx.trials_or(50);
    let mut attempts = 0;
    while worst.count < trials && attempts < 20 * trials {
        attempts += 1;
        let u = random_group_poly::<R, _>(&mut rng, n, 4, 3);
        let p = random_point::<R, _>(&mut rng, n);
        let su = scalar_form(&u)?;
        let g0 = eval_form(&d0(&su)?, &p);
        if g0.norm_inf() == 0.0 {
            continue;
        }
        let f = g0.wedge(&eval_form(&d1(&su)?, &p))?;
        let sp = strong_positivity_test_2form(&f, tol)?;
        let lowest = sp.eigenvalues[0];
        let scale = sp.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        worst.record(lowest, 0.0, (-lowest).max(0.0) / scale, format!("u = {u}; point = {p:?}"));
    }
    Ok(worst.finish("d0u-wedge-d1u-strongly-positive", "gradient-wedge-positivity", tol))
}

fn run<R: Real>(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let tol = ctx.tol_or(1e-9);
    let mut out = vec![gradient_forms::<R>(ctx, tol)?];

    let mut rng = ctx.rng(0x91);
    let mut psh = Worst::default();
    let mut tops = Worst::default();
    let mut certified = true;
    let mut inputs = String::new();
    for _ in 0..ctx.trials_or(50) {
        let u = random_psh_quadratic(&mut rng, n, 0.0)?;
        let p: Vec<f64> = random_point::<f64, _>(&mut rng, n);
        let h = hessian_at(&u, &p)?;
        let lowest = eigen_hyperhermitian(&h, false).values[0];
        let ok = is_nonneg(&h, tol);
        psh.record(lowest, 0.0, if ok { 0.0 } else { -lowest }, format!("u = {u}"));
        let lap: ConstForm<f64> = eval_form(&laplacian(&u)?, &p);
        let top = lap.wedge_power(n, one_cx())?;
        let kappa = top.delta_n_coeff()?.map_or(0.0, |c| c.re);
        let ok_top = positivity_certificate_2nform(&top, tol)?;
        tops.record(kappa, 0.0, if ok_top { 0.0 } else { -kappa }, format!("u = {u}"));
        if n > 1 {
            let partial = lap.wedge_power(n - 1, one_cx())?;
            certified &= strong_positivity_certificate(&partial, 8, &mut rng, tol)?;
            inputs.push_str(&format!("{u}\n"));
        }
    }
    out.push(psh.finish("psh-quadratic-hessian-nonneg", "psh-hessian-nonnegative", tol));
    out.push(tops.finish("psh-top-power-positive", "laplacian-power-positive", tol));
    if n > 1 {
        out.push(CheckRecord::flag(
            "psh-partial-power-certified",
            "laplacian-power-strongly-positive",
            &inputs,
            certified,
        ));
    }

    let beta = ConstForm::<f64>::beta(n);
    let sp = strong_positivity_test_2form(&beta, tol)?;
    let spread = sp.eigenvalues.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
    out.push(CheckRecord::with_residual(
        "beta-eigenvalues-half",
        "beta-strongly-positive",
        "beta",
        sp.eigenvalues[0],
        0.5,
        spread,
        1e-12,
    ));
    let neg = strong_positivity_test_2form(&beta.neg(), tol)?;
    out.push(CheckRecord::flag("minus-beta-rejected", "beta-strongly-positive", "-beta", !neg.nonneg));

    let lap = eval_form(&laplacian(&norm_sq::<R>(n))?, &vec![R::zero(); group_nvars(n)]);
    let expect = ConstForm::<R>::beta(n).scale_real(R::from_i64(8));
    let diff = lap.sub(&expect)?.norm_inf();
    out.push(CheckRecord::with_residual(
        "laplacian-norm-sq-is-8-beta",
        "laplacian-of-norm-squared",
        "|x|^2",
        lap.norm_inf(),
        expect.norm_inf(),
        diff,
        exact_tol(ctx, 1e-12),
    ));
    Ok(out)
}

impl Suite for Positivity {
    fn name(&self) -> &'static str {
        "positivity"
    }

    fn description(&self) -> &'static str {
        "strong positivity of gradient wedges, PSH Hessians and the form beta"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        match ctx.mode {
            Mode::Rational => run::<Rational>(ctx),
            Mode::Float => run::<f64>(ctx),
        }
    }
}
