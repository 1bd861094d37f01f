use ou_brunn_core::gauss::{gaussian_measure, halfspace_offset_for_measure};
use ou_brunn_core::shooting::solve_halfline;
use rayon::prelude::*;

use super::{settle, Context};
use crate::config::FaberKrahnConfig;
use crate::report::CaseRecord;

/// Bisection and truncation tolerance of the half-line oracle, far below
/// the grid budgets it is compared against.
const HALFLINE_TOL: f64 = 1e-8;

/// A body against the half-space of equal Gaussian measure. The half-space
/// eigenvalue is that of the one-dimensional half-line in any dimension.
pub fn run(ctx: &Context<'_>, cfg: &FaberKrahnConfig) -> Vec<CaseRecord> {
    cfg.bodies
        .par_iter()
        .map(|name| {
            let base = CaseRecord::new("faber-krahn", "faber-krahn", format!("faber-krahn/{name}"), "λ(H) ≤ λ(Ω) + ε").bodies(&[name]);
            settle(base, |c| {
                let body = ctx.body(name)?;
                let sol = ctx.solve(&body)?;
                let mass = gaussian_measure(&body, cfg.resolution).map_err(|e| e.to_string())?;
                let a = halfspace_offset_for_measure(mass).map_err(|e| e.to_string())?;
                let half = solve_halfline(a, cfg.truncation, HALFLINE_TOL).map_err(|e| e.to_string())?.lambda;
                let mut c = c.metric("measure", mass).metric("offset", a).metric("lambda_halfspace", half).metric("epsilon", sol.budget.epsilon);
                c.lambda_0 = Some(sol.lambda);
                Ok(c.check(half, sol.lambda, sol.budget.epsilon))
            })
        })
        .collect()
}
