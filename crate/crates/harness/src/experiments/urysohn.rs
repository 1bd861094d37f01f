use std::f64::consts::TAU;

use ou_brunn_core::geometry::hausdorff_distance;
use ou_brunn_core::shooting::solve_radial;
use ou_brunn_core::{ConvexBody, DirectionGrid};
use rayon::prelude::*;

use super::{settle, Context};
use crate::config::UrysohnConfig;
use crate::report::CaseRecord;

const EXP: &str = "urysohn";

struct Level {
    m: usize,
    lambda: Result<(f64, f64), String>,
    distance: Result<f64, String>,
}

/// Ball comparison at equal mean width, and the rotation means
/// `(1/m) Σ_k ρ_{2πk/m} Ω` for the configured `m`: eigenvalues should not
/// increase and the means should approach the ball.
pub fn run(ctx: &Context<'_>, cfg: &UrysohnConfig) -> Vec<CaseRecord> {
    cfg.bodies.par_iter().map(|name| body_cases(ctx, cfg, name)).flatten().collect()
}

fn body_cases(ctx: &Context<'_>, cfg: &UrysohnConfig, name: &str) -> Vec<CaseRecord> {
    let base = |check: &str, id: String, relation: &str| CaseRecord::new(EXP, check, id, relation).bodies(&[name]);
    let ball_case = base("urysohn-ball", format!("urysohn-ball/{name}"), "λ(ball of equal mean width) ≤ λ(Ω) + ε");
    let body = match ctx.body(name) {
        Ok(b) => b,
        Err(e) => return vec![ball_case.failed(e)],
    };
    let err = |e: ou_brunn_core::Error| e.to_string();
    let mean_width = body.mean_width(&DirectionGrid::for_dim(2)).map_err(err);
    let ball = mean_width.clone().and_then(|w| ConvexBody::ball(0.5 * w, [0.0, 0.0]).map_err(err));

    let mut out = vec![settle(ball_case, |c| {
        let w = mean_width.clone()?;
        let sol = ctx.solve(&body)?;
        let lb = solve_radial(2, 0.5 * w, 1e-10).map_err(err)?.lambda;
        let mut c = c.metric("mean_width", w).metric("lambda_ball", lb).metric("epsilon", sol.budget.epsilon);
        c.lambda_0 = Some(sol.lambda);
        Ok(c.check(lb, sol.lambda, sol.budget.epsilon))
    })];

    let levels: Vec<Level> = cfg
        .m
        .par_iter()
        .map(|&m| {
            let angles: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
            let mean = body.rotation_mean(&angles).map_err(err);
            let lambda = mean.clone().and_then(|b| ctx.solve(&b)).map(|s| (s.lambda, s.budget.epsilon));
            let distance = mean.and_then(|b| hausdorff_distance(&b, ball.as_ref().map_err(Clone::clone)?).map_err(err));
            Level { m, lambda, distance }
        })
        .collect();

    for w in levels.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let c = base("urysohn-monotone", format!("urysohn-monotone/{name}/m={}->{}", p.m, q.m), "λ(Ω♯_m') ≤ λ(Ω♯_m) + Σε")
            .metric("m", p.m as f64)
            .metric("m_next", q.m as f64);
        out.push(settle(c, |c| {
            let (lp, ep) = p.lambda.clone()?;
            let (lq, eq) = q.lambda.clone()?;
            let mut c = c;
            c.lambda_0 = Some(lp);
            c.lambda_t = Some(lq);
            Ok(c.check(lq, lp, ep + eq))
        }));
    }

    if let (Some(first), Some(last)) = (levels.first(), levels.last()) {
        let c = base("urysohn-hausdorff", format!("urysohn-hausdorff/{name}"), "d(Ω♯_last, ball) ≤ ratio · d(Ω♯_first, ball)")
            .metric("m_first", first.m as f64)
            .metric("m_last", last.m as f64);
        out.push(settle(c, |c| {
            let d0 = first.distance.clone()?;
            let d1 = last.distance.clone()?;
            let c = c.metric("distance_first", d0).metric("distance_last", d1);
            // a body that already is the ball has nothing to converge
            let c = if d0 > 1e-9 { c } else { c.diagnostic() };
            Ok(c.check(d1, cfg.hausdorff_ratio * d0, 0.0))
        }));
    }
    out
}
