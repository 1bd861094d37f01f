use ou_brunn_core::concavity::{
    check_laplacian_sign, check_midpoint_logconcavity, check_starshaped_gradient, check_strong_logconcavity, LogField,
};
use ou_brunn_core::eigen::solve_body;
use ou_brunn_core::legendre::{hessian_conjugate_check, max_gradient, SlopeGrid};
use ou_brunn_core::shooting::solve_interval;
use ou_brunn_core::{ConvexBody, GridFunction};

fn eigenfunction(body: &ConvexBody, h: f64) -> GridFunction {
    solve_body(body, h, 1e-10).unwrap().eigenfunction
}

fn disk() -> ConvexBody {
    ConvexBody::ball(1.0, [0.0, 0.0]).unwrap()
}

#[test]
fn disk_hessian_matches_conjugate_hessian() {
    let u = eigenfunction(&disk(), 0.02);
    let w = LogField::new(&u, 0.5).unwrap();
    let slopes = SlopeGrid::uniform(2, (2.0 * max_gradient(&w)).max(4.0), 0.01).unwrap();
    let r = hessian_conjugate_check(&w, &slopes, 1).unwrap();
    assert!(r.samples > 1000);
    assert_eq!(r.skipped, 0);
    assert!(r.max_deviation < 0.05, "{r:?}");
}

#[test]
fn symmetric_bodies_are_strongly_log_concave() {
    let bodies = [
        (ConvexBody::interval(-1.0, 1.0).unwrap(), 0.005),
        (disk(), 0.02),
        (ConvexBody::smooth(vec![1.0, 0.0, 0.25], vec![]).unwrap(), 0.02),
        (ConvexBody::smooth(vec![1.0, 0.0, 0.0, 0.0, 0.05], vec![]).unwrap(), 0.02),
    ];
    for (body, h) in &bodies {
        let u = eigenfunction(body, *h);
        assert!(check_strong_logconcavity(&u, 0.1).unwrap().value > 0.0, "{body:?}");
        assert!(check_laplacian_sign(&u, 0.01).unwrap().value < 0.0, "{body:?}");
        assert!(check_starshaped_gradient(&u, 0.01).unwrap().value <= 1e-9, "{body:?}");
    }
}

#[test]
fn strong_implies_midpoint() {
    let u = eigenfunction(&disk(), 0.04);
    let tau = 0.1;
    assert!(check_strong_logconcavity(&u, tau).unwrap().value > 0.0);
    let w = LogField::new(&u, tau).unwrap();
    let wmax = w.core_nodes().iter().map(|k| w.values()[*k].abs()).fold(0.0, f64::max);
    let r = check_midpoint_logconcavity(&u, tau, 0.04 * 0.04 * wmax).unwrap();
    assert_eq!(r.violations, 0);
}

#[test]
fn margins_are_stable_in_the_core_fraction() {
    let u = eigenfunction(&disk(), 0.02);
    let lap: Vec<f64> = [0.005, 0.01, 0.02].iter().map(|t| check_laplacian_sign(&u, *t).unwrap().value).collect();
    let mid: Vec<f64> = [0.005, 0.01, 0.02]
        .iter()
        .map(|t| check_midpoint_logconcavity(&u, *t, 10.0 * 0.02 * 0.02).unwrap().worst_margin)
        .collect();
    for v in [lap, mid] {
        let base = v[1];
        for x in &v {
            assert!(((x - base) / base).abs() < 0.2, "{v:?}");
        }
    }
}

#[test]
fn translated_interval_is_not_starshaped() {
    let u = eigenfunction(&ConvexBody::interval(-0.5, 1.5).unwrap(), 0.01);
    assert!(check_starshaped_gradient(&u, 0.01).unwrap().value > 0.0);
    assert_eq!(check_midpoint_logconcavity(&u, 0.01, 1e-3).unwrap().violations, 0);
}

#[test]
fn grid_and_shooting_profiles_agree() {
    let h = 0.01;
    let u = eigenfunction(&ConvexBody::interval(-1.0, 1.0).unwrap(), h);
    let ode = solve_interval(-1.0, 1.0, 1e-10).unwrap();
    for k in (0..u.grid().len()).step_by(10) {
        let x = u.grid().point(k)[0];
        let i = ode.nodes.partition_point(|s| *s < x).min(ode.nodes.len() - 1);
        assert!((u.values()[k] - ode.values[i]).abs() < 5e-3, "x = {x}");
    }
}
