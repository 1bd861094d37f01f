use ou_brunn_core::spd::{trace_inverse_convexity, SpdMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{settle, Context};
use crate::config::MatrixConfig;
use crate::report::CaseRecord;

const EXP: &str = "matrix-lemma";

/// Convexity of `tr(M⁻¹)` on random SPD pairs, grouped by dimension, plus the
/// equality case and a hand-computed pair.
pub fn run(ctx: &Context<'_>, cfg: &MatrixConfig) -> Vec<CaseRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut per_dim = vec![(0usize, f64::NEG_INFINITY, 0usize, None::<String>); cfg.max_dim];
    for i in 0..cfg.samples {
        let n = 1 + i % cfg.max_dim;
        let a = SpdMatrix::random(n, &mut rng);
        let b = SpdMatrix::random(n, &mut rng);
        let t: f64 = rng.random();
        let slot = &mut per_dim[n - 1];
        slot.0 += 1;
        match trace_inverse_convexity(&a, &b, t) {
            Ok((l, r)) => {
                slot.1 = slot.1.max(l - r);
                if (l - r).abs() <= 1e-9 * r {
                    slot.2 += 1;
                }
            }
            Err(e) => slot.3 = Some(e.to_string()),
        }
    }
    let mut cases: Vec<CaseRecord> = per_dim
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.0 > 0)
        .map(|(k, (count, worst, near, error))| {
            let c = CaseRecord::new(EXP, "matrix-random", format!("matrix-random/n={}", k + 1), "max (lhs − rhs) ≤ tol")
                .metric("n", (k + 1) as f64)
                .metric("samples", count as f64)
                .metric("near_equality", near as f64);
            match error {
                Some(e) => c.failed(e),
                None => c.check(worst, 0.0, cfg.tol),
            }
        })
        .collect();

    let equal = CaseRecord::new(EXP, "matrix-equal", "matrix-equal/dyadic".into(), "lhs = rhs exactly");
    cases.push(settle(equal, |c| {
        let d = SpdMatrix::diagonal(&[2.0, 0.5, 4.0]).map_err(|e| e.to_string())?;
        let (l, r) = trace_inverse_convexity(&d, &d, 0.3).map_err(|e| e.to_string())?;
        Ok(c.metric("lhs_value", l).metric("rhs_value", r).check((l - r).abs(), 0.0, 0.0))
    }));
    for n in 1..=cfg.max_dim {
        let c = CaseRecord::new(EXP, "matrix-equal", format!("matrix-equal/random/n={n}"), "|lhs − rhs| ≤ tol · rhs");
        let a = SpdMatrix::random(n, &mut rng);
        let t: f64 = rng.random();
        cases.push(settle(c, |c| {
            let (l, r) = trace_inverse_convexity(&a, &a, t).map_err(|e| e.to_string())?;
            Ok(c.metric("lhs_value", l).metric("rhs_value", r).check((l - r).abs(), 0.0, cfg.tol * r))
        }));
    }
    let hand = CaseRecord::new(EXP, "matrix-hand", "matrix-hand/I+diag(4,1)".into(), "lhs = 2.6, rhs = 3.5").t(0.5);
    cases.push(settle(hand, |c| {
        let b = SpdMatrix::diagonal(&[4.0, 1.0]).map_err(|e| e.to_string())?;
        let (l, r) = trace_inverse_convexity(&SpdMatrix::identity(2), &b, 0.5).map_err(|e| e.to_string())?;
        Ok(c.metric("lhs_value", l).metric("rhs_value", r).check((l - 2.6).abs().max((r - 3.5).abs()), 0.0, cfg.tol))
    }));
    cases
}
