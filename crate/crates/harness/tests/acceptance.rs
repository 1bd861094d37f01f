//! Acceptance suite: runs the full configuration once in-process and once
//! through the binary, then evaluates every criterion from the case
//! records. Prints one line per criterion.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Duration;

use ou_brunn::{execute, CaseRecord, Config, Experiment, Report};

const SUITE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/suite.toml");

struct Suite<'a> {
    cfg: &'a Config,
    report: &'a Report,
    timings: &'a [(Experiment, Duration)],
}

impl Suite<'_> {
    fn cases(&self, check: &str) -> Vec<&CaseRecord> {
        self.report.cases.iter().filter(|c| c.check == check).collect()
    }

    fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.report.cases.iter().find(|c| c.id == id)
    }

    fn seconds(&self, e: Experiment) -> f64 {
        self.timings.iter().find(|(x, _)| *x == e).map_or(f64::INFINITY, |(_, d)| d.as_secs_f64())
    }

    fn dim(&self, name: &str) -> usize {
        self.cfg.body(name).map_or(0, |b| b.dim())
    }
}

fn held(c: &CaseRecord) -> bool {
    c.asserted && c.pass && c.error.is_none()
}

fn all_held(cases: &[&CaseRecord]) -> Result<(), String> {
    if cases.is_empty() {
        return Err("no cases".into());
    }
    match cases.iter().find(|c| !held(c)) {
        Some(c) => Err(format!("{} failed (margin {:e}{})", c.id, c.margin, c.error.as_deref().map(|e| format!(", {e}")).unwrap_or_default())),
        None => Ok(()),
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn held_id(s: &Suite<'_>, id: &str) -> Result<(), String> {
    let c = s.case(id).ok_or_else(|| format!("missing case {id}"))?;
    all_held(&[c])
}

fn pair_key(c: &CaseRecord) -> (String, String) {
    (c.bodies[0].clone(), c.bodies[1].clone())
}

fn c1(s: &Suite<'_>) -> Result<String, String> {
    for id in ["eigen-oracle/disk", "eigen-order/disk", "eigen-error-ratio/disk", "eigen-oracle/iv", "eigen-order/iv"] {
        held_id(s, id)?;
    }
    let disk = s.case("eigen-oracle/disk").unwrap();
    let iv = s.case("eigen-oracle/iv").unwrap();
    require(disk.metrics["h"] == 0.02 && iv.metrics["h"] == 0.005, "finest spacings differ from 0.02 / 0.005")?;
    require(disk.slack == 1e-2 && iv.slack == 1e-3, "relative tolerances differ from 1% / 0.1%")?;
    let order_disk = s.case("eigen-order/disk").unwrap().metrics["order"];
    let order_iv = s.case("eigen-order/iv").unwrap().metrics["order"];
    let t = s.seconds(Experiment::Eigen);
    require(t <= 120.0, format!("eigen took {t:.1} s"))?;
    Ok(format!("disk rel err {:.2e} order {order_disk:.2}; interval rel err {:.2e} order {order_iv:.3}; {t:.1} s", disk.lhs, iv.lhs))
}

fn c2(s: &Suite<'_>) -> Result<String, String> {
    let c = s.case("halfline/a=0/T=8").ok_or("missing half-line anchor")?;
    all_held(&[c])?;
    require(c.slack <= 1e-6, "tolerance above 1e-6")?;
    Ok(format!("|λ − 1| = {:.1e}", c.lhs))
}

fn c3(s: &Suite<'_>) -> Result<String, String> {
    let cases = s.cases("bm");
    all_held(&cases)?;
    let pairs: BTreeSet<_> = cases.iter().map(|c| pair_key(c)).collect();
    let ts: BTreeSet<String> = cases.iter().map(|c| format!("{}", c.t.unwrap_or(f64::NAN))).collect();
    require(pairs.len() >= 20, format!("only {} pairs", pairs.len()))?;
    require(ts == ["0.25", "0.5", "0.75"].map(String::from).into(), format!("t-values {ts:?}"))?;
    require(cases.len() == pairs.len() * 3, "a pair misses a t-value")?;
    require(pairs.iter().any(|(a, _)| s.dim(a) == 1) && pairs.iter().any(|(a, _)| s.dim(a) == 2), "needs 1D and 2D pairs")?;
    let t = s.seconds(Experiment::BmSweep);
    require(t <= 600.0, format!("bm-sweep took {t:.1} s"))?;
    Ok(format!("{} pairs x 3 t-values, {} cases, {t:.1} s", pairs.len(), cases.len()))
}

fn c4(s: &Suite<'_>) -> Result<String, String> {
    let upper = s.cases("supconv-upper");
    let lower = s.cases("supconv-lower");
    all_held(&upper)?;
    all_held(&lower)?;
    let bm: BTreeSet<_> = s.cases("bm").iter().map(|c| (pair_key(c), format!("{:?}", c.t))).collect();
    let sc: BTreeSet<_> = upper.iter().map(|c| (pair_key(c), format!("{:?}", c.t))).collect();
    require(bm == sc, "sup-convolution cases differ from the Brunn-Minkowski cases")?;
    let oracle = s.cases("fast-vs-direct");
    all_held(&oracle)?;
    require(oracle.iter().all(|c| c.slack <= 1e-3), "oracle tolerance above 1e-3")?;
    let nodes = oracle.iter().map(|c| c.metrics["nodes_0"].max(c.metrics["nodes_1"])).fold(0.0, f64::max);
    require(nodes <= 81.0, format!("oracle grids with {nodes} nodes are not coarse"))?;
    let worst = oracle.iter().map(|c| c.lhs).fold(0.0, f64::max);
    Ok(format!("{} chain cases; fast vs direct worst {worst:.1e} over {} pairs", upper.len() + lower.len(), oracle.len()))
}

fn c5(s: &Suite<'_>) -> Result<String, String> {
    let mid = s.cases("midpoint");
    all_held(&mid)?;
    require(mid.iter().all(|c| c.metrics["tau"] == 0.01 && c.metrics["tolerance"] <= 10.0 * 0.02 * 0.02 + 1e-15), "core or tolerance differs")?;
    require(mid.iter().all(|c| c.lhs == 0.0), "violations recorded")?;
    all_held(&s.cases("midpoint-detector"))?;
    Ok(format!("{} bodies, zero violations; bimodal counterexample flagged", mid.len()))
}

fn c6(s: &Suite<'_>) -> Result<String, String> {
    let mut worst = f64::INFINITY;
    for name in ["iv", "disk", "ellipse", "rsquare"] {
        for check in ["strong-logconc", "laplacian", "starshaped"] {
            held_id(s, &format!("{check}/{name}"))?;
        }
        worst = worst.min(s.case(&format!("strong-logconc/{name}")).unwrap().rhs);
    }
    all_held(&s.cases("laplacian-detector"))?;
    Ok(format!("smallest Hessian eigenvalue {worst:.3}"))
}

fn c7(s: &Suite<'_>) -> Result<String, String> {
    let cases = s.cases("faber-krahn");
    all_held(&cases)?;
    let dims: BTreeSet<usize> = cases.iter().map(|c| s.dim(&c.bodies[0])).collect();
    require(dims == [1, 2].into(), "needs 1D and 2D bodies")?;
    Ok(format!("{} bodies", cases.len()))
}

fn c8(s: &Suite<'_>) -> Result<String, String> {
    let ball = s.cases("urysohn-ball");
    let mono = s.cases("urysohn-monotone");
    all_held(&ball)?;
    all_held(&mono)?;
    let ms: BTreeSet<u64> = mono.iter().flat_map(|c| [c.metrics["m"] as u64, c.metrics["m_next"] as u64]).collect();
    require(ms == [1, 2, 4, 8, 16].into(), format!("rotation counts {ms:?}"))?;
    held_id(s, "urysohn-hausdorff/square")?;
    let sq = s.case("urysohn-hausdorff/square").unwrap();
    require(sq.metrics["m_first"] == 1.0 && sq.metrics["m_last"] == 16.0, "square distances not at m = 1, 16")?;
    all_held(&s.cases("urysohn-hausdorff").into_iter().filter(|c| c.asserted).collect::<Vec<_>>())?;
    Ok(format!(
        "{} bodies; square distance {:.4} -> {:.4}",
        ball.len(),
        sq.metrics["distance_first"],
        sq.metrics["distance_last"]
    ))
}

fn c9(s: &Suite<'_>) -> Result<String, String> {
    let cases = s.cases("equality");
    all_held(&cases)?;
    let same = cases.iter().filter(|c| c.metrics["hausdorff"] < 1e-12).count();
    let gap = cases.iter().filter(|c| c.strict && c.metrics["hausdorff"] >= 0.1).count();
    require(same >= 1 && gap >= 1, "needs identical and distinct pairs")?;
    require(cases.iter().filter(|c| c.strict).all(|c| c.metrics["gap_factor"] >= 3.0), "gap factor below 3")?;
    let tr = s.cases("equality-translate");
    require(!tr.is_empty() && tr.iter().all(|c| !c.asserted && c.deficit.is_some() && c.error.is_none()), "translate deficits missing or asserted")?;
    let d: Vec<String> = tr.iter().map(|c| format!("{:.2e}", c.deficit.unwrap())).collect();
    Ok(format!("{same} identical, {gap} distinct; translate deficits [{}]", d.join(", ")))
}

fn c10(s: &Suite<'_>) -> Result<String, String> {
    let random = s.cases("matrix-random");
    all_held(&random)?;
    let samples: f64 = random.iter().map(|c| c.metrics["samples"]).sum();
    let max_n = random.iter().map(|c| c.metrics["n"]).fold(0.0, f64::max);
    require(samples >= 1000.0 && max_n <= 5.0, format!("{samples} samples up to n = {max_n}"))?;
    require(random.iter().all(|c| c.slack <= 1e-12), "tolerance above 1e-12")?;
    held_id(s, "matrix-equal/dyadic")?;
    require(s.case("matrix-equal/dyadic").unwrap().lhs == 0.0, "A = B not exact")?;
    let hand = s.case("matrix-hand/I+diag(4,1)").ok_or("missing hand case")?;
    all_held(&[hand])?;
    Ok(format!("{samples} pairs; hand case lhs {} rhs {}", hand.metrics["lhs_value"], hand.metrics["rhs_value"]))
}

fn c11(in_process: &str, dir: &Path, cfg: &Config) -> Result<String, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_ou-brunn"))
        .args(["suite", "--config", SUITE, "--jobs", "1", "--out"])
        .arg(dir)
        .status()
        .map_err(|e| e.to_string())?;
    require(status.code() == Some(0), format!("binary exited with {status}"))?;
    let written = std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    require(written == in_process, "report.json differs between runs")?;
    require(dir.join("cases.csv").exists(), "cases.csv missing")?;
    Ok(format!("{} bytes identical (seed {})", written.len(), cfg.seed))
}

fn main() -> ExitCode {
    let cfg = Config::load(Path::new(SUITE)).expect("suite config loads");
    let outcome = execute(&cfg, None, cfg.seed).expect("suite runs");
    let suite = Suite { cfg: &cfg, report: &outcome.report, timings: &outcome.timings };
    let dir = tempfile::tempdir().expect("temporary directory");

    let results: Vec<(&str, Result<String, String>)> = vec![
        ("eigenvalue oracles", c1(&suite)),
        ("half-line anchor", c2(&suite)),
        ("Brunn-Minkowski sweep", c3(&suite)),
        ("sup-convolution chain", c4(&suite)),
        ("midpoint log-concavity", c5(&suite)),
        ("strong log-concavity", c6(&suite)),
        ("Faber-Krahn comparison", c7(&suite)),
        ("Urysohn comparison", c8(&suite)),
        ("equality probes", c9(&suite)),
        ("matrix lemma", c10(&suite)),
        ("determinism", c11(&outcome.report.to_json(), dir.path(), &cfg)),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", k + 1);
            }
        }
    }
    for (e, d) in &outcome.timings {
        println!("  {:<16} {:>7.2} s", e.name(), d.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
