use std::sync::Arc;

use ou_brunn_core::eigen::solve_body;
use ou_brunn_core::geometry::minkowski_combine;
use ou_brunn_core::legendre::{sup_convolution, sup_convolution_direct};
use ou_brunn_core::{assemble, build_grid, rayleigh_quotient};
use rayon::prelude::*;

use super::{settle, Context, Pair};
use crate::config::SupconvConfig;
use crate::report::CaseRecord;

const EXP: &str = "supconv";

pub fn run(ctx: &Context<'_>, cfg: &SupconvConfig) -> Vec<CaseRecord> {
    let work: Vec<(&[String; 2], f64)> = cfg.pairs.iter().flat_map(|p| cfg.t.iter().map(move |t| (p, *t))).collect();
    let mut cases: Vec<CaseRecord> = work.par_iter().map(|([a, b], t)| chain(ctx, a, b, *t)).flatten().collect();

    let mut oracle_work = Vec::new();
    for [a, b] in &cfg.pairs {
        if ctx.body(a).is_ok_and(|body| body.dim() == 1) {
            oracle_work.extend(cfg.oracle_t.iter().map(|t| (a, b, *t)));
        }
    }
    cases.par_extend(oracle_work.par_iter().map(|(a, b, t)| fast_vs_direct(ctx, cfg, a, b, *t)));
    cases
}

/// The subsolution chain `λ_t ≤ R(u_t) ≤ (1−t)λ₀ + tλ₁` on the finest grid
/// of the combination.
fn chain(ctx: &Context<'_>, a: &str, b: &str, t: f64) -> Vec<CaseRecord> {
    let base = |check: &str, relation: &str| CaseRecord::new(EXP, check, format!("{check}/{a}+{b}/t={t}"), relation).bodies(&[a, b]).t(t);
    let upper = base("supconv-upper", "R(u_t) ≤ (1−t)λ₀ + tλ₁ + Σε");
    let lower = base("supconv-lower", "λ_t ≤ R(u_t) + ε_t");
    let computed = Pair::solve(ctx, a, b, t).and_then(|p| {
        let target = p.st.finest.eigenfunction.grid().clone();
        let ut = sup_convolution(&p.s0.finest.eigenfunction, &p.s1.finest.eigenfunction, t, &target).map_err(|e| e.to_string())?;
        let r = rayleigh_quotient(&assemble(target), &ut).map_err(|e| e.to_string())?;
        Ok((p, r))
    });
    match computed {
        Ok((p, r)) => vec![
            p.annotate(upper).metric("rayleigh", r).check(r, p.mixed(), p.budget()),
            p.annotate(lower).metric("rayleigh", r).check(p.st.lambda, r, p.st.budget.epsilon),
        ],
        Err(e) => vec![upper.failed(&e), lower.failed(e)],
    }
}

/// Fast conjugate path against the direct maximisation on coarse 1D grids,
/// evaluated on a target of half the spacing.
fn fast_vs_direct(ctx: &Context<'_>, cfg: &SupconvConfig, a: &str, b: &str, t: f64) -> CaseRecord {
    let base = CaseRecord::new(EXP, "fast-vs-direct", format!("fast-vs-direct/{a}+{b}/t={t}"), "‖fast − direct‖∞ / ‖direct‖∞ ≤ tol")
        .bodies(&[a, b])
        .t(t)
        .metric("h", cfg.oracle_h);
    settle(base, |c| {
        let err = |e: ou_brunn_core::Error| e.to_string();
        let (b0, b1) = (ctx.body(a)?, ctx.body(b)?);
        let u0 = solve_body(&b0, cfg.oracle_h, ctx.cfg.solver.tol).map_err(err)?.eigenfunction;
        let u1 = solve_body(&b1, cfg.oracle_h, ctx.cfg.solver.tol).map_err(err)?.eigenfunction;
        let bt = minkowski_combine(t, &b0, &b1).map_err(err)?;
        let target = Arc::new(build_grid(&bt, 0.5 * cfg.oracle_h).map_err(err)?);
        let direct = sup_convolution_direct(&u0, &u1, t, &target).map_err(err)?;
        let fast = sup_convolution(&u0, &u1, t, &target).map_err(err)?;
        let diff = direct.values().iter().zip(fast.values()).map(|(d, f)| (d - f).abs()).fold(0.0, f64::max);
        Ok(c.metric("nodes_0", u0.values().len() as f64)
            .metric("nodes_1", u1.values().len() as f64)
            .check(diff / direct.max(), 0.0, cfg.oracle_rel_tol))
    })
}
