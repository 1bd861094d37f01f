use rayon::prelude::*;

use super::{settle, Context, Pair};
use crate::config::PairsConfig;
use crate::report::CaseRecord;

pub fn run(ctx: &Context<'_>, cfg: &PairsConfig) -> Vec<CaseRecord> {
    let work: Vec<(&[String; 2], f64)> = cfg.pairs.iter().flat_map(|p| cfg.t.iter().map(move |t| (p, *t))).collect();
    work.par_iter()
        .map(|([a, b], t)| {
            let base = CaseRecord::new("bm-sweep", "bm", format!("bm/{a}+{b}/t={t}"), "λ_t ≤ (1−t)λ₀ + tλ₁ + Σε").bodies(&[a, b]).t(*t);
            settle(base, |c| {
                let p = Pair::solve(ctx, a, b, *t)?;
                Ok(p.annotate(c).check(p.st.lambda, p.mixed(), p.budget()))
            })
        })
        .collect()
}
