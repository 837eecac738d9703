use gfista::solver::{gfista_backtracking, gfista_fixed, update_t, update_t_residual};
use gfista::{
    CompositeProblem, Error, Gfista, Point, Reference, SeparableQuadratic, SolverConfig, StepMode, Trace,
};
use proptest::prelude::*;

fn quadratic() -> impl Strategy<Value = (SeparableQuadratic, Vec<f64>)> {
    (2usize..6)
        .prop_flat_map(|dim| {
            (
                prop::collection::vec(0.05f64..4.0, dim),
                prop::collection::vec(-3.0f64..3.0, dim),
                0.0f64..1.0,
                0.0f64..0.5,
                prop::collection::vec(-5.0f64..5.0, dim),
            )
        })
        .prop_map(|(a, c, ridge, l1, x0)| (SeparableQuadratic::new(a, c, ridge, l1), x0))
}

fn exact_reference(problem: &SeparableQuadratic) -> Reference<Vec<f64>> {
    let point = problem.minimizer();
    Reference {
        objective: problem.objective(&point),
        point,
    }
}

fn slack(reference: &Reference<Vec<f64>>) -> f64 {
    1e-10 * (1.0 + reference.objective.abs())
}

fn run(problem: &SeparableQuadratic, config: SolverConfig, x0: &[f64]) -> Trace<Vec<f64>> {
    let reference = exact_reference(problem);
    Gfista::new(problem, config)
        .with_reference(&reference)
        .run(&x0.to_vec())
        .expect("solver run")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_step_gap_stays_below_certificate((problem, x0) in quadratic(), t0 in 0.0f64..1.0) {
        let tau = 1.0 / problem.lipschitz_f().unwrap();
        let trace = run(&problem, SolverConfig::fixed(tau, 80).with_t0(t0), &x0);
        prop_assert!(trace.certificate_applies);
        prop_assert!(trace.certificate_violation(slack(&exact_reference(&problem))).is_none());
    }

    #[test]
    fn backtracking_gap_stays_below_certificate(
        (problem, x0) in quadratic(),
        scale in 0.2f64..4.0,
        full in any::<bool>(),
        rho in 0.5f64..0.95,
    ) {
        let mode = if full { StepMode::FullBacktracking } else { StepMode::ClassicBacktracking };
        let l0 = (problem.lipschitz_f().unwrap() * scale).max(1.05 * problem.mu_f());
        let config = SolverConfig::backtracking(mode, l0, 80).with_rho(rho).with_c_bt(rho);
        let trace = run(&problem, config, &x0);
        prop_assert!(trace.certificate_violation(slack(&exact_reference(&problem))).is_none());
        let bound = (problem.lipschitz_f().unwrap() / rho).max(l0);
        for estimate in trace.lipschitz_estimates() {
            prop_assert!(estimate <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn monotone_objective_never_increases((problem, x0) in quadratic(), scale in 0.2f64..4.0) {
        let l0 = (problem.lipschitz_f().unwrap() * scale).max(1.05 * problem.mu_f());
        let config = SolverConfig::backtracking(StepMode::FullBacktracking, l0, 80).with_monotone(true);
        let trace = run(&problem, config, &x0);
        for w in trace.records.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective);
        }
    }

    #[test]
    fn t_update_solves_its_quadratic(
        t_prev in 0.0f64..1e4,
        q in 0.0f64..0.9,
        ratio in 0.1f64..10.0,
    ) {
        let t = update_t(t_prev, q, ratio).unwrap();
        prop_assert!(t >= 1.0 - 1e-12);
        let omega = (1.0 - q * t) / (1.0 - q);
        prop_assert!(omega > 0.0 && omega <= 1.0 + 1e-12);
        // With tau'_{k+1} = 1, tau'_k = ratio.
        let residual = update_t_residual(ratio, 1.0, t_prev, t, omega);
        prop_assert!(residual.abs() <= 1e-10 * (ratio * t_prev * t_prev).max(1.0));
    }
}

#[test]
fn long_fixed_run_reaches_closed_form_minimizer() {
    let problem = SeparableQuadratic::new(vec![0.5, 1.0, 3.0, 0.2], vec![2.0, -1.0, 0.3, 4.0], 0.3, 0.2);
    let tau = 1.0 / problem.lipschitz_f().unwrap();
    let trace = gfista_fixed(&problem, &SolverConfig::fixed(tau, 5000), &vec![0.0; 4]).unwrap();
    let exact = problem.minimizer();
    assert!(trace.solution.dist_sq(&exact).sqrt() < 1e-10);
}

#[test]
fn identical_configs_give_identical_traces() {
    let problem = SeparableQuadratic::new(vec![0.5, 3.0], vec![1.0, -2.0], 0.1, 0.1);
    let config = SolverConfig::backtracking(StepMode::FullBacktracking, 10.0, 50);
    let a = gfista_backtracking(&problem, &config, &vec![3.0, 3.0]).unwrap();
    let b = gfista_backtracking(&problem, &config, &vec![3.0, 3.0]).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.solution, b.solution);
}

#[test]
fn fixed_trace_has_no_backtracks_and_constant_step() {
    let problem = SeparableQuadratic::new(vec![1.0, 2.0], vec![1.0, 1.0], 0.0, 0.0);
    let trace = gfista_fixed(&problem, &SolverConfig::fixed(0.5, 30), &vec![0.0, 0.0]).unwrap();
    assert_eq!(trace.records.len(), 31);
    assert!(trace.records.iter().all(|r| r.n_backtracks == 0 && r.tau == 0.5));
}

#[test]
fn lagged_extrapolation_disables_the_certificate() {
    let problem = SeparableQuadratic::new(vec![1.0, 2.0], vec![1.0, 1.0], 0.1, 0.0);
    let config = SolverConfig::backtracking(StepMode::FullBacktracking, 4.0, 30).with_recompute_y(false);
    let reference = exact_reference(&problem);
    let trace = Gfista::new(&problem, config).with_reference(&reference).run(&vec![0.0, 0.0]).unwrap();
    assert!(!trace.certificate_applies);
    assert!(trace.certificate_violation(0.0).is_none());
}

#[test]
fn invalid_configurations_are_rejected() {
    let problem = SeparableQuadratic::new(vec![1.0, 4.0], vec![1.0, 1.0], 0.0, 0.0);
    let x0 = vec![0.0, 0.0];
    let too_long = gfista_fixed(&problem, &SolverConfig::fixed(0.5, 10), &x0);
    assert!(matches!(too_long, Err(Error::Config(_))));

    // q0 = 1/4 * 1 / 1 = 0.25, so t0 may be at most 2.
    let large_t0 = gfista_fixed(&problem, &SolverConfig::fixed(0.25, 10).with_t0(2.5), &x0);
    assert!(matches!(large_t0, Err(Error::Config(_))));

    let wrong_mode = gfista_backtracking(&problem, &SolverConfig::fixed(0.25, 10), &x0);
    assert!(matches!(wrong_mode, Err(Error::Config(_))));
}

#[test]
fn full_backtracking_grows_a_conservative_step() {
    let problem = SeparableQuadratic::new(vec![1.0, 1.0], vec![5.0, -5.0], 0.0, 0.0);
    let config = SolverConfig::backtracking(StepMode::FullBacktracking, 100.0, 40);
    let trace = gfista_backtracking(&problem, &config, &vec![0.0, 0.0]).unwrap();
    let classic = gfista_backtracking(
        &problem,
        &SolverConfig { mode: StepMode::ClassicBacktracking, ..config },
        &vec![0.0, 0.0],
    )
    .unwrap();
    assert!(trace.last().lipschitz_estimate < 10.0);
    assert!(classic.lipschitz_estimates().all(|l| l == 100.0));
}
