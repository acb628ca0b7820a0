use super::{Suite, SuiteContext};
use crate::calculus::{bracket_table, FirstOrderOp, Prime, VectorFieldId};
use crate::error::Result;
use crate::report::CheckRecord;
use crate::scalar::{Cx, Mode, Rational, Real};

/// Commutators among `{X_a, ∂_t}` and `{Z_{AA′}}` against their predicted values.
pub struct Brackets;

fn run<R: Real>(ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
    let n = ctx.n;
    let table = bracket_table::<R>(n)?;
    let (mut real_bad, mut real_total, mut z_bad, mut z_total) = (0usize, 0usize, 0usize, 0usize);
    let mut listing = String::new();
    for b in &table {
        let is_z = matches!(b.left, VectorFieldId::Z(..));
        let ok = b.matches();
        listing.push_str(&format!("[{}, {}] {}\n", b.left, b.right, if ok { "ok" } else { "mismatch" }));
        if is_z {
            z_total += 1;
            z_bad += usize::from(!ok);
        } else {
            real_total += 1;
            real_bad += usize::from(!ok);
        }
    }
    let minus_8i_dt = FirstOrderOp::<R>::of_field(VectorFieldId::Dt, n)?.scale(&Cx::new(R::zero(), R::from_i64(-8)));
    let mut central_ok = true;
    for l in 0..n {
        let a = FirstOrderOp::<R>::of_field(VectorFieldId::Z(l, Prime::Zero), n)?;
        let b = FirstOrderOp::<R>::of_field(VectorFieldId::Z(n + l, Prime::One), n)?;
        central_ok &= a.commutator(&b) == minus_8i_dt;
    }
    let frac = |bad: usize, total: usize| bad as f64 / total.max(1) as f64;
    Ok(vec![
        CheckRecord::with_residual(
            "real-field-brackets",
            "x-dt-commutators",
            &listing,
            (real_total - real_bad) as f64,
            real_total as f64,
            frac(real_bad, real_total),
            0.0,
        ),
        CheckRecord::with_residual(
            "z-field-brackets",
            "z-commutators",
            &listing,
            (z_total - z_bad) as f64,
            z_total as f64,
            frac(z_bad, z_total),
            0.0,
        ),
        CheckRecord::flag("z-l0-z-nl1-is-minus-8i-dt", "z-central-commutator", &format!("n = {n}"), central_ok),
    ])
}

impl Suite for Brackets {
    fn name(&self) -> &'static str {
        "brackets"
    }

    fn description(&self) -> &'static str {
        "symbolic commutator tables of the left-invariant fields"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>> {
        match ctx.mode {
            Mode::Rational => run::<Rational>(ctx),
            Mode::Float => run::<f64>(ctx),
        }
    }
}
