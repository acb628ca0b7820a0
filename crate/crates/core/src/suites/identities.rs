use rand::Rng;

use super::{exact_tol, form_residual, Suite, SuiteContext, Worst};
use crate::calculus::{d0, d1, d_alpha, scalar_form, Prime};
use crate::error::Result;
use crate::exterior::Form;
use crate::poly::group_nvars;
use crate::qma::laplacian_product_chain;
use crate::random::{random_group_poly, random_poly, random_poly_form};
use crate::report::CheckRecord;
use crate::scalar::{Mode, Rational, Real};

/// `d_0² = d_1² = 0`, `d_0d_1 = −d_1d_0`, the Leibniz rule and the Laplacian product chain.
pub struct Identities;

fn run<R: Real>(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let mut rng = ctx.rng(0x1d);
    let trials = ctx.trials_or(200);
    let tol = exact_tol(ctx, 1e-10);
    let mut sq0 = Worst::default();
    let mut sq1 = Worst::default();
    let mut anti = Worst::default();
    let mut leib = [Worst::default(), Worst::default()];
    let mut chain = Worst::default();
    for _ in 0..trials {
        let degree = rng.gen_range(0..=2 * n - 2);
        let f = random_poly_form::<R, _>(&mut rng, n, degree, 3);
        let u = random_poly::<R, _>(&mut rng, group_nvars(n), 4, 3, true);
        let inputs = format!("F = {f:?}; u = {u}");

        let zero = Form::zero(n, degree + 2);
        let df0 = d0(&f)?;
        let df1 = d1(&f)?;
        let dd0 = d0(&df0)?;
        let dd1 = d1(&df1)?;
        sq0.record(super::form_norm(&dd0), 0.0, form_residual(&dd0, &zero)?, &inputs);
        sq1.record(super::form_norm(&dd1), 0.0, form_residual(&dd1, &zero)?, &inputs);
        let a = d0(&df1)?;
        let b = d1(&df0)?.neg();
        anti.record(super::form_norm(&a), super::form_norm(&b), form_residual(&a, &b)?, &inputs);

        let uf = f.map(|c| c.mul(&u));
        let su = scalar_form(&u)?;
        for (k, alpha) in [Prime::Zero, Prime::One].into_iter().enumerate() {
            let lhs = d_alpha(&uf, alpha)?;
            let rhs = d_alpha(&su, alpha)?.wedge(&f)?.add(&d_alpha(&f, alpha)?.map(|c| c.mul(&u)))?;
            leib[k].record(super::form_norm(&lhs), super::form_norm(&rhs), form_residual(&lhs, &rhs)?, &inputs);
        }

        let k = rng.gen_range(1..=n);
        let us: Vec<_> = (0..k).map(|_| random_group_poly::<R, _>(&mut rng, n, 3, 3)).collect();
        let [p, v0, v1, vd] = laplacian_product_chain(&us)?;
        let text: Vec<String> = us.iter().map(ToString::to_string).collect();
        let r = form_residual(&v0, &p)?.max(form_residual(&v1, &p)?).max(form_residual(&vd, &p)?);
        chain.record(super::form_norm(&p), super::form_norm(&v0), r, text.join("; "));
    }
    let [l0, l1] = leib;
    Ok(vec![
        sq0.finish("d0-squared-vanishes", "d0-d0-zero", tol),
        sq1.finish("d1-squared-vanishes", "d1-d1-zero", tol),
        anti.finish("d0-d1-anticommute", "d0-d1-anticommutation", tol),
        l0.finish("leibniz-d0", "leibniz-rule", tol),
        l1.finish("leibniz-d1", "leibniz-rule", tol),
        chain.finish("laplacian-product-chain", "laplacian-wedge-chain", tol),
    ])
}

impl Suite for Identities {
    fn name(&self) -> &'static str {
        "identities"
    }

    fn description(&self) -> &'static str {
        "d0 and d1 square to zero, anticommute, satisfy Leibniz, and the Laplacian product chain"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        match ctx.mode {
            Mode::Rational => run::<Rational>(ctx),
            Mode::Float => run::<f64>(ctx),
        }
    }
}
