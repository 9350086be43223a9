use tempint::fit::{bisect_fit, FitGrid, FitProblem, Weighting};
use tempint::grid::GridSpec;
use tempint::oracle::OracleConfig;

fn default_grid() -> FitGrid {
    FitGrid::new(GridSpec::paper_eval(), OracleConfig::default()).unwrap()
}

#[test]
fn cubic_level_above_published_is_feasible() {
    let problem = FitProblem::new(3, default_grid()).unwrap();
    assert!(problem.test_level(2e-6).unwrap().is_feasible());
}

#[test]
fn quadratic_fit_holds_between_grid_points() {
    let fit = bisect_fit(&FitProblem::new(2, default_grid()).unwrap()).unwrap();
    assert!(fit.converged);
    assert!(fit.pole_warning.is_none());
    assert!(fit.u_plus <= 1.1 * 6.26e-5, "{}", fit.u_plus);
    assert!(fit.achieved_dev_fine < 1.2 * fit.achieved_dev, "{} {}", fit.achieved_dev_fine, fit.achieved_dev);
}

#[test]
fn linear_absolute_fit_matches_published_level() {
    let problem = FitProblem::new(1, default_grid()).unwrap().with_weighting(Weighting::Absolute);
    let fit = bisect_fit(&problem).unwrap();
    assert!((fit.achieved_rel_dev / 1.12e-2 - 1.0).abs() < 0.1, "{}", fit.achieved_rel_dev);
}
