use super::{exact_tol, Suite, SuiteContext, Worst};
use crate::error::Result;
use crate::exterior::{two_form_from_matrix, ConstForm};
use crate::poly::{group_nvars, norm_sq};
use crate::qma::{
    horizontal_hessian, horizontal_hessian_direct, qma_density, verify_delta_power_identity, QuatPolyMatrix,
};
use crate::quaternion::{j_symplectic, mixed_discriminant, moore_det, HyperhermitianMatrix};
use crate::random::{
    random_complex_hermitian, random_group_poly, random_hyperhermitian, random_point, random_quat_matrix,
};
use crate::report::CheckRecord;
use crate::scalar::{factorial, one_cx, Mode, Rational, Real};

/// The Laplacian-power identity for the Monge-Ampère density, and Moore determinant facts.
pub struct Hessian;

fn matrix_gap<R: Real>(a: &QuatPolyMatrix<R>, b: &QuatPolyMatrix<R>) -> f64 {
    let mut gap: f64 = 0.0;
    for l in 0..a.n() {
        for m in 0..a.n() {
            let d = a.get(l, m).sub(b.get(l, m));
            gap = gap.max(d.a.norm_inf()).max(d.b.norm_inf());
        }
    }
    gap
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1e-300).max(lhs.abs())
}

fn identity_checks<R: Real>(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let mut rng = ctx.rng(0x4e);
    let tol = exact_tol(ctx, 1e-8);
    let mut power = Worst::default();
    let mut routes = Worst::default();
    for _ in 0..ctx.trials_or(50) {
        let u = random_group_poly::<R, _>(&mut rng, n, 5, 3);
        let p = random_point::<R, _>(&mut rng, n);
        let inputs = format!("u = {u}; point = {p:?}");
        let r = verify_delta_power_identity(&u, &p)?;
        let residual = if r.exact_match { 0.0 } else { r.residual.max(f64::MIN_POSITIVE) };
        power.record(r.lhs, r.rhs, residual, &inputs);
        let gap = matrix_gap(&horizontal_hessian(&u)?, &horizontal_hessian_direct(&u)?);
        routes.record(gap, 0.0, gap, &inputs);
    }
    let mut out = vec![
        power.finish("laplacian-power-equals-density", "laplacian-power-identity", tol),
        routes.finish("hessian-routes-agree", "hessian-via-laplacian", tol),
    ];

    let u = norm_sq::<R>(n);
    let p = vec![R::zero(); group_nvars(n)];
    let expect = 8f64.powi(n as i32);
    let direct = qma_density(&u, &p)?.to_f64();
    let via_power = verify_delta_power_identity(&u, &p)?.lhs / factorial(n) as f64;
    out.push(CheckRecord::compare("norm-sq-density-direct", "norm-squared-density", "|x|^2", direct, expect, tol));
    out.push(CheckRecord::compare(
        "norm-sq-density-laplacian",
        "norm-squared-density",
        "|x|^2",
        via_power,
        expect,
        tol,
    ));
    Ok(out)
}

fn moore_checks(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let mut rng = ctx.rng(0x3d);
    let mut classical = Worst::default();
    let mut product = Worst::default();
    let mut bridge = Worst::default();
    let n = ctx.n.max(1);
    for k in 0..100 {
        let size = 1 + k % 4;
        let m = random_complex_hermitian(&mut rng, size);
        let lhs = moore_det(&m);
        let rhs = m.matrix().complex_parts().0.to_nalgebra().determinant().re;
        classical.record(lhs, rhs, rel(lhs, rhs), format!("{m:?}"));
    }
    for _ in 0..ctx.trials_or(50) {
        let m = random_hyperhermitian(&mut rng, n);
        let c = random_quat_matrix(&mut rng, n, n);
        let lhs = moore_det(&m.congruence(&c)?);
        let rhs = moore_det(&m) * moore_det(&HyperhermitianMatrix::gram(&c)?);
        product.record(lhs, rhs, rel(lhs, rhs), format!("M = {m:?}; C = {c:?}"));
    }
    for size in 1..=4 {
        let ms: Vec<_> = (0..size).map(|_| random_hyperhermitian(&mut rng, size)).collect();
        let mut acc = ConstForm::<f64>::scalar(size, one_cx());
        for m in &ms {
            acc = acc.wedge(&two_form_from_matrix(&m.tau().mul(&j_symplectic(size))?)?)?;
        }
        let lhs = acc.delta_n_coeff()?.map_or(0.0, |c| c.re);
        let rhs = (1u64 << size) as f64 * factorial(size) as f64 * mixed_discriminant(&ms)?;
        bridge.record(lhs, rhs, rel(lhs, rhs), format!("{ms:?}"));
    }
    Ok(vec![
        classical.finish("moore-matches-complex-det", "moore-determinant-complex", ctx.tol_or(1e-10)),
        product.finish("moore-product-rule", "moore-determinant-congruence", ctx.tol_or(1e-8)),
        bridge.finish("mixed-discriminant-bridge", "mixed-discriminant-top-form", ctx.tol_or(1e-8)),
    ])
}

impl Suite for Hessian {
    fn name(&self) -> &'static str {
        "hessian"
    }

    fn description(&self) -> &'static str {
        "the Laplacian-power identity for the density, the two Hessian routes, and Moore determinant rules"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        let mut out = match ctx.mode {
            Mode::Rational => identity_checks::<Rational>(ctx)?,
            Mode::Float => identity_checks::<f64>(ctx)?,
        };
        out.extend(moore_checks(ctx)?);
        Ok(out)
    }
}
