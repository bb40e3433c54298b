use ubiloc_bench::solver_instances;
use ubiloc_core::{linear_init, solve_fix};

#[test]
fn instances_are_reproducible_and_solvable() {
    let a = solver_instances(20, 4, 0.05, 9);
    assert_eq!(a, solver_instances(20, 4, 0.05, 9));
    assert_ne!(a, solver_instances(20, 4, 0.05, 10));
    for (obs, truth) in &a {
        assert_eq!(obs.len(), 4);
        let pairs: Vec<_> = obs.iter().map(|o| (o.position, o.range_m)).collect();
        let fix = solve_fix(obs, linear_init(&pairs).unwrap()).unwrap();
        assert!((fix.position - *truth).norm() < 1.0);
    }
}
