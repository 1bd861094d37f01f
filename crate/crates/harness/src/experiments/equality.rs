use ou_brunn_core::geometry::hausdorff_distance;
use rayon::prelude::*;

use super::{settle, Context, Pair};
use crate::config::EqualityConfig;
use crate::report::CaseRecord;

const EXP: &str = "equality-probe";
const SAME: f64 = 1e-12;

/// Deficits near the equality case. Identical bodies must give a deficit
/// within the budget; distinct origin-symmetric bodies far enough apart must
/// show a clear gap. Translate pairs are recorded without a verdict.
pub fn run(ctx: &Context<'_>, cfg: &EqualityConfig) -> Vec<CaseRecord> {
    let t = cfg.t;
    let mut cases: Vec<CaseRecord> = cfg
        .pairs
        .par_iter()
        .map(|[a, b]| {
            let base = CaseRecord::new(EXP, "equality", format!("equality/{a}+{b}/t={t}"), "").bodies(&[a, b]).t(t);
            settle(base, |c| {
                let p = Pair::solve(ctx, a, b, t)?;
                let d = hausdorff_distance(&p.body0, &p.body1).map_err(|e| e.to_string())?;
                let c = p.annotate(c).metric("hausdorff", d);
                let symmetric = p.body0.is_origin_symmetric(SAME) && p.body1.is_origin_symmetric(SAME);
                Ok(if d < SAME {
                    CaseRecord { relation: "|deficit| ≤ Σε".into(), ..c }.check(p.deficit().abs(), 0.0, p.budget())
                } else if symmetric && d >= cfg.min_distance {
                    CaseRecord { relation: "gap · Σε < deficit".into(), ..c }
                        .strict()
                        .metric("gap_factor", cfg.gap_factor)
                        .check(cfg.gap_factor * p.budget(), p.deficit(), 0.0)
                } else {
                    CaseRecord { relation: "deficit recorded".into(), ..c }.diagnostic().check(0.0, p.deficit(), 0.0)
                })
            })
        })
        .collect();
    cases.par_extend(cfg.translates.par_iter().map(|tr| {
        let shift = tr.shift.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let name = &tr.body;
        let base = CaseRecord::new(EXP, "equality-translate", format!("equality-translate/{name}+({shift})/t={t}"), "deficit recorded")
            .bodies(&[name])
            .t(t)
            .diagnostic();
        settle(base, |c| {
            let body0 = ctx.body(name)?;
            let body1 = body0.translate(&tr.shift).map_err(|e| e.to_string())?;
            let p = Pair::from_bodies(ctx, body0, body1, t)?;
            let c = tr.shift.iter().enumerate().fold(p.annotate(c), |c, (k, s)| c.metric(&format!("shift_{k}"), *s));
            Ok(c.check(0.0, p.deficit(), 0.0))
        })
    }));
    cases
}
