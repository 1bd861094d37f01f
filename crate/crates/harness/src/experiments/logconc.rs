use std::sync::Arc;

use ou_brunn_core::concavity::{
    check_laplacian_sign, check_midpoint_logconcavity_with, check_starshaped_gradient, check_strong_logconcavity, LogField, MidpointOptions,
};
use ou_brunn_core::legendre::{hessian_conjugate_check, max_gradient, SlopeGrid};
use ou_brunn_core::{build_grid, ConvexBody, GridFunction};
use rayon::prelude::*;

use super::{settle, Context};
use crate::config::LogconcConfig;
use crate::report::CaseRecord;

const EXP: &str = "logconc";
/// Bound on the conjugate-Hessian deviation reported for reference.
const CONJUGATE_REFERENCE: f64 = 0.05;
const DETECTOR_H: f64 = 0.01;

pub fn run(ctx: &Context<'_>, cfg: &LogconcConfig) -> Vec<CaseRecord> {
    let mut cases: Vec<CaseRecord> = cfg.bodies.par_iter().map(|name| body_cases(ctx, cfg, name)).flatten().collect();
    cases.extend(detectors(ctx, cfg));
    cases
}

/// Origin-symmetric bodies with smooth boundary, where the Hessian bound
/// is expected; polygons have corners.
fn expects_strong(body: &ConvexBody) -> bool {
    !matches!(body, ConvexBody::Polygon(_)) && body.is_origin_symmetric(1e-12)
}

fn midpoint(ctx: &Context<'_>, cfg: &LogconcConfig, u: &GridFunction, c: CaseRecord) -> Result<CaseRecord, String> {
    let h = u.grid().h();
    let tol = cfg.midpoint_tol_factor * h * h;
    let opts = MidpointOptions { max_pairs: cfg.max_pairs, seed: ctx.seed };
    let r = check_midpoint_logconcavity_with(u, cfg.tau, tol, &opts).map_err(|e| e.to_string())?;
    Ok(c.metric("pairs_checked", r.pairs_checked as f64)
        .metric("sampled", f64::from(u8::from(r.sampled)))
        .metric("worst_margin", r.worst_margin)
        .metric("tolerance", tol)
        .metric("tau", cfg.tau)
        .check(r.violations as f64, 0.0, 0.0))
}

fn body_cases(ctx: &Context<'_>, cfg: &LogconcConfig, name: &str) -> Vec<CaseRecord> {
    let base = |check: &str, relation: &str| CaseRecord::new(EXP, check, format!("{check}/{name}"), relation).bodies(&[name]);
    let mid = base("midpoint", "midpoint violations = 0");
    let solved = ctx.body(name).and_then(|b| ctx.solve(&b).map(|s| (b, s)));
    let (body, sol) = match solved {
        Ok(v) => v,
        Err(e) => return vec![mid.failed(e)],
    };
    let u = &sol.finest.eigenfunction;
    let err = |e: ou_brunn_core::Error| e.to_string();
    let strong = expects_strong(&body);
    let assert_if = |c: CaseRecord| if strong { c } else { c.diagnostic() };

    let mut out = vec![settle(mid, |c| midpoint(ctx, cfg, u, c))];
    out.push(settle(assert_if(base("strong-logconc", "0 < min eig D²(−ln u)").strict()), |c| {
        let r = check_strong_logconcavity(u, cfg.hessian_tau).map_err(err)?;
        Ok(c.metric("tau", cfg.hessian_tau).metric("nodes", r.nodes_checked as f64).check(0.0, r.value, 0.0))
    }));
    out.push(settle(assert_if(base("laplacian", "max Δu < 0").strict()), |c| {
        let r = check_laplacian_sign(u, cfg.tau).map_err(err)?;
        Ok(c.metric("tau", cfg.tau).metric("nodes", r.nodes_checked as f64).check(r.value, 0.0, 0.0))
    }));
    out.push(settle(assert_if(base("starshaped", "max ⟨x, ∇u⟩ ≤ tol")), |c| {
        let r = check_starshaped_gradient(u, cfg.tau).map_err(err)?;
        Ok(c.metric("tau", cfg.tau).metric("nodes", r.nodes_checked as f64).check(r.value, 0.0, cfg.star_tol))
    }));
    out.push(settle(base("hessian-conjugate", "max |D²W · D²W*(∇W) − I| ≤ reference").diagnostic(), |c| {
        let w = LogField::new(u, cfg.conjugate_tau).map_err(err)?;
        let h = u.grid().h();
        let slopes = SlopeGrid::uniform(u.grid().dim(), (2.0 * max_gradient(&w)).max(4.0), 0.5 * h).map_err(err)?;
        let r = hessian_conjugate_check(&w, &slopes, 1).map_err(err)?;
        Ok(c.metric("tau", cfg.conjugate_tau)
            .metric("samples", r.samples as f64)
            .metric("skipped", r.skipped as f64)
            .check(r.max_deviation, CONJUGATE_REFERENCE, 0.0))
    }));
    out
}

/// Functions that violate the properties on purpose; each check has to
/// flag its counterexample.
fn detectors(ctx: &Context<'_>, cfg: &LogconcConfig) -> Vec<CaseRecord> {
    let err = |e: ou_brunn_core::Error| e.to_string();
    let bimodal = CaseRecord::new(EXP, "midpoint-detector", "midpoint-detector/bimodal".into(), "1 ≤ violations")
        .bodies(&["interval{-2,2}"]);
    let bimodal = settle(bimodal, |c| {
        let grid = Arc::new(build_grid(&ConvexBody::interval(-2.0, 2.0).map_err(err)?, DETECTOR_H).map_err(err)?);
        let u = GridFunction::from_fn(grid, |x| (4.0 - x[0] * x[0]) * (0.2 + x[0] * x[0])).map_err(err)?;
        let h = DETECTOR_H;
        let opts = MidpointOptions { max_pairs: cfg.max_pairs, seed: ctx.seed };
        let r = check_midpoint_logconcavity_with(&u, cfg.tau, cfg.midpoint_tol_factor * h * h, &opts).map_err(err)?;
        Ok(c.metric("worst_margin", r.worst_margin).check(1.0, r.violations as f64, 0.0))
    });
    let saddle = CaseRecord::new(EXP, "laplacian-detector", "laplacian-detector/dimple".into(), "0 < max Δu").bodies(&["ball{1}"]).strict();
    let saddle = settle(saddle, |c| {
        let grid = Arc::new(build_grid(&ConvexBody::ball(1.0, [0.0, 0.0]).map_err(err)?, 0.02).map_err(err)?);
        let u = GridFunction::from_fn(grid, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            (1.0 - r2) * (1.0 + 2.0 * r2)
        })
        .map_err(err)?;
        let r = check_laplacian_sign(&u, cfg.tau).map_err(err)?;
        Ok(c.check(0.0, r.value, 0.0))
    });
    vec![bimodal, saddle]
}
