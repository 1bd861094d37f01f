//! Experiment runners. Each returns its case records in configuration
//! order; cases run on the current rayon pool.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use ou_brunn_core::eigen::{converged_eigenvalue_with, ConvergedEigenvalue, ConvergenceOptions};
use ou_brunn_core::geometry::minkowski_combine;
use ou_brunn_core::{ConvexBody, GridFunction};

use crate::config::{Config, ConfigError};
use crate::report::{CaseRecord, Report};

mod bm;
mod eigen;
mod equality;
mod faber_krahn;
mod logconc;
mod matrix;
mod supconv;
mod urysohn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Eigen,
    BmSweep,
    Supconv,
    FaberKrahn,
    Urysohn,
    Logconc,
    EqualityProbe,
    MatrixLemma,
}

impl Experiment {
    /// Suite order.
    pub const ALL: [Experiment; 8] = [
        Experiment::Eigen,
        Experiment::BmSweep,
        Experiment::Supconv,
        Experiment::FaberKrahn,
        Experiment::Urysohn,
        Experiment::Logconc,
        Experiment::EqualityProbe,
        Experiment::MatrixLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Eigen => "eigen",
            Experiment::BmSweep => "bm-sweep",
            Experiment::Supconv => "supconv",
            Experiment::FaberKrahn => "faber-krahn",
            Experiment::Urysohn => "urysohn",
            Experiment::Logconc => "logconc",
            Experiment::EqualityProbe => "equality-probe",
            Experiment::MatrixLemma => "matrix-lemma",
        }
    }

    fn configured(self, cfg: &Config) -> bool {
        match self {
            Experiment::Eigen => cfg.eigen.is_some(),
            Experiment::BmSweep => cfg.bm_sweep.is_some(),
            Experiment::Supconv => cfg.supconv.is_some(),
            Experiment::FaberKrahn => cfg.faber_krahn.is_some(),
            Experiment::Urysohn => cfg.urysohn.is_some(),
            Experiment::Logconc => cfg.logconc.is_some(),
            Experiment::EqualityProbe => cfg.equality_probe.is_some(),
            Experiment::MatrixLemma => cfg.matrix_lemma.is_some(),
        }
    }
}

type Solved = Result<Arc<ConvergedEigenvalue>, String>;

/// Shared state of one run: the configuration and a cache of converged
/// eigenvalues keyed by body, so every body is solved once per run.
pub struct Context<'a> {
    pub cfg: &'a Config,
    pub seed: u64,
    solves: Mutex<HashMap<String, Arc<OnceLock<Solved>>>>,
    dumps: Mutex<Vec<(String, GridFunction)>>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a Config, seed: u64) -> Self {
        Self { cfg, seed, solves: Mutex::new(HashMap::new()), dumps: Mutex::new(Vec::new()) }
    }

    pub fn body(&self, key: &str) -> Result<ConvexBody, String> {
        self.cfg.body(key).map_err(|e| e.to_string())
    }

    /// Converged eigenvalue on the configured refinement sequence for the
    /// body's dimension. Concurrent requests for one body wait for a single
    /// solve.
    pub fn solve(&self, body: &ConvexBody) -> Solved {
        let key = format!("{body:?}");
        let cell = self.solves.lock().expect("cache lock").entry(key).or_default().clone();
        cell.get_or_init(|| {
            let s = &self.cfg.solver;
            let opts = ConvergenceOptions { tol: s.tol, safety: s.safety, min_order: s.min_order };
            converged_eigenvalue_with(body, s.h_seq(body.dim()), &opts).map(Arc::new).map_err(|e| e.to_string())
        })
        .clone()
    }

    fn dump(&self, name: String, u: GridFunction) {
        self.dumps.lock().expect("dump lock").push((name, u));
    }

    /// Eigenfunction dumps collected so far, sorted by name.
    pub fn take_dumps(&self) -> Vec<(String, GridFunction)> {
        let mut d = std::mem::take(&mut *self.dumps.lock().expect("dump lock"));
        d.sort_by(|a, b| a.0.cmp(&b.0));
        d
    }
}

/// Turns a case computation into a record; an `Err` becomes an error record.
fn settle(base: CaseRecord, f: impl FnOnce(CaseRecord) -> Result<CaseRecord, String>) -> CaseRecord {
    let fallback = base.clone();
    f(base).unwrap_or_else(|e| fallback.failed(e))
}

/// Both bodies of a pair and the solves for them and their combination at `t`.
struct Pair {
    body0: ConvexBody,
    body1: ConvexBody,
    s0: Arc<ConvergedEigenvalue>,
    s1: Arc<ConvergedEigenvalue>,
    st: Arc<ConvergedEigenvalue>,
    t: f64,
}

impl Pair {
    fn solve(ctx: &Context<'_>, n0: &str, n1: &str, t: f64) -> Result<Self, String> {
        let body0 = ctx.body(n0)?;
        let body1 = ctx.body(n1)?;
        Self::from_bodies(ctx, body0, body1, t)
    }

    fn from_bodies(ctx: &Context<'_>, body0: ConvexBody, body1: ConvexBody, t: f64) -> Result<Self, String> {
        let body_t = minkowski_combine(t, &body0, &body1).map_err(|e| e.to_string())?;
        let s0 = ctx.solve(&body0)?;
        let s1 = ctx.solve(&body1)?;
        let st = ctx.solve(&body_t)?;
        Ok(Self { body0, body1, s0, s1, st, t })
    }

    fn mixed(&self) -> f64 {
        (1.0 - self.t) * self.s0.lambda + self.t * self.s1.lambda
    }

    fn deficit(&self) -> f64 {
        self.mixed() - self.st.lambda
    }

    fn budget(&self) -> f64 {
        self.s0.budget.epsilon + self.s1.budget.epsilon + self.st.budget.epsilon
    }

    /// Records the three eigenvalues, the deficit and the budgets.
    fn annotate(&self, mut c: CaseRecord) -> CaseRecord {
        c.lambda_0 = Some(self.s0.lambda);
        c.lambda_1 = Some(self.s1.lambda);
        c.lambda_t = Some(self.st.lambda);
        c.deficit = Some(self.deficit());
        c.metric("epsilon_0", self.s0.budget.epsilon)
            .metric("epsilon_1", self.s1.budget.epsilon)
            .metric("epsilon_t", self.st.budget.epsilon)
    }
}

pub fn run(ctx: &Context<'_>, exp: Experiment) -> Result<Vec<CaseRecord>, ConfigError> {
    let cfg = ctx.cfg;
    let missing = || ConfigError::MissingSection(exp.name());
    Ok(match exp {
        Experiment::Eigen => eigen::run(ctx, cfg.eigen.as_ref().ok_or_else(missing)?),
        Experiment::BmSweep => bm::run(ctx, cfg.bm_sweep.as_ref().ok_or_else(missing)?),
        Experiment::Supconv => supconv::run(ctx, cfg.supconv.as_ref().ok_or_else(missing)?),
        Experiment::FaberKrahn => faber_krahn::run(ctx, cfg.faber_krahn.as_ref().ok_or_else(missing)?),
        Experiment::Urysohn => urysohn::run(ctx, cfg.urysohn.as_ref().ok_or_else(missing)?),
        Experiment::Logconc => logconc::run(ctx, cfg.logconc.as_ref().ok_or_else(missing)?),
        Experiment::EqualityProbe => equality::run(ctx, cfg.equality_probe.as_ref().ok_or_else(missing)?),
        Experiment::MatrixLemma => matrix::run(ctx, cfg.matrix_lemma.as_ref().ok_or_else(missing)?),
    })
}

/// Outcome of a run: the report, eigenfunction dumps and wall time per
/// experiment (kept out of the report so that it stays reproducible).
pub struct Outcome {
    pub report: Report,
    pub dumps: Vec<(String, GridFunction)>,
    pub timings: Vec<(Experiment, Duration)>,
}

/// Runs one experiment, or every configured one in suite order when
/// `which` is `None`.
pub fn execute(cfg: &Config, which: Option<Experiment>, seed: u64) -> Result<Outcome, ConfigError> {
    let ctx = Context::new(cfg, seed);
    let list: Vec<Experiment> = match which {
        Some(e) => vec![e],
        None => Experiment::ALL.into_iter().filter(|e| e.configured(cfg)).collect(),
    };
    if list.is_empty() {
        return Err(ConfigError::Invalid("no experiment sections configured".into()));
    }
    let mut cases = Vec::new();
    let mut timings = Vec::new();
    for e in list {
        let start = Instant::now();
        cases.extend(run(&ctx, e)?);
        timings.push((e, start.elapsed()));
    }
    let name = which.map_or("suite", Experiment::name);
    Ok(Outcome { report: Report::new(name, seed, cases), dumps: ctx.take_dumps(), timings })
}
