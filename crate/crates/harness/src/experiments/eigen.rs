use ou_brunn_core::shooting::{solve_halfline, solve_interval, solve_radial};
use ou_brunn_core::ConvexBody;
use rayon::prelude::*;

use super::{settle, Context};
use crate::config::EigenConfig;
use crate::report::CaseRecord;

const EXP: &str = "eigen";
const ORACLE_TOL: f64 = 1e-12;

/// Independent eigenvalue for bodies with a one-dimensional reduction:
/// intervals, centred discs and axis-parallel rectangles (a sum of two
/// interval eigenvalues).
pub fn oracle(body: &ConvexBody) -> Option<Result<f64, String>> {
    let solve = |r: ou_brunn_core::Result<ou_brunn_core::shooting::OdeEigenResult>| r.map(|r| r.lambda).map_err(|e| e.to_string());
    match body {
        ConvexBody::Interval { a, b } => Some(solve(solve_interval(*a, *b, ORACLE_TOL))),
        ConvexBody::Ball { radius, center: [0.0, 0.0] } => Some(solve(solve_radial(2, *radius, ORACLE_TOL))),
        ConvexBody::Polygon(p) if p.normals().len() == 4 && p.normals().iter().all(|n| n[0] * n[1] == 0.0) => {
            let s = |d: [f64; 2]| body.support(&d);
            let x = solve(solve_interval(-s([-1.0, 0.0]), s([1.0, 0.0]), ORACLE_TOL));
            let y = solve(solve_interval(-s([0.0, -1.0]), s([0.0, 1.0]), ORACLE_TOL));
            Some(x.and_then(|x| y.map(|y| x + y)))
        }
        _ => None,
    }
}

pub fn run(ctx: &Context<'_>, cfg: &EigenConfig) -> Vec<CaseRecord> {
    let mut cases: Vec<CaseRecord> = cfg.bodies.par_iter().map(|name| body_cases(ctx, cfg, name)).flatten().collect();
    for a in &cfg.halfline {
        let base = CaseRecord::new(EXP, "halfline-anchor", format!("halfline/a={}/T={}", a.a, a.truncation), "|λ − expected| ≤ tol")
            .metric("a", a.a)
            .metric("truncation", a.truncation);
        cases.push(settle(base, |c| {
            let lambda = solve_halfline(a.a, a.truncation, 1e-10).map_err(|e| e.to_string())?.lambda;
            Ok(c.metric("lambda", lambda).metric("expected", a.expected).check((lambda - a.expected).abs(), 0.0, a.tol))
        }));
    }
    cases
}

fn body_cases(ctx: &Context<'_>, cfg: &EigenConfig, name: &str) -> Vec<CaseRecord> {
    let base = |check: &str, relation: &str| CaseRecord::new(EXP, check, format!("{check}/{name}"), relation).bodies(&[name]);
    let solved = ctx.body(name).and_then(|b| ctx.solve(&b).map(|s| (b, s)));
    let (body, sol) = match solved {
        Ok(v) => v,
        Err(e) => return vec![base("eigen-order", "order ≥ min order").failed(e)],
    };
    if cfg.dump {
        ctx.dump(name.to_string(), sol.finest.eigenfunction.clone());
    }
    let lambda = |mut c: CaseRecord| {
        c.lambda_0 = Some(sol.lambda);
        c.metric("epsilon", sol.budget.epsilon).metric("h", sol.finest.h)
    };
    let mut out = Vec::new();
    let one_d = body.dim() == 1;
    let order = if one_d {
        let [p, dev] = cfg.order_1d;
        lambda(base("eigen-order", "|order − p| ≤ dev")).metric("expected_order", p).check((sol.order - p).abs(), 0.0, dev)
    } else {
        lambda(base("eigen-order", "min order ≤ order")).check(ctx.cfg.solver.min_order, sol.order, 0.0)
    };
    out.push(order.metric("order", sol.order));

    match oracle(&body) {
        Some(Ok(o)) => {
            let rel_tol = if one_d { cfg.oracle_rel_tol_1d } else { cfg.oracle_rel_tol_2d };
            out.push(lambda(base("eigen-oracle", "|λ − λ_oracle| / λ_oracle ≤ tol")).metric("oracle", o).check((sol.lambda - o).abs() / o, 0.0, rel_tol));
            let errs: Vec<f64> = sol.levels.iter().map(|(_, l)| (l - o).abs()).collect();
            let ratio = errs.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
            let c = errs.iter().enumerate().fold(lambda(base("eigen-error-ratio", "min ratio ≤ e_k / e_{k+1}")), |c, (k, e)| c.metric(&format!("error_{k}"), *e));
            out.push(c.check(cfg.min_error_ratio, ratio, 0.0));
        }
        Some(Err(e)) => out.push(base("eigen-oracle", "|λ − λ_oracle| / λ_oracle ≤ tol").failed(e)),
        None => {}
    }
    out
}
