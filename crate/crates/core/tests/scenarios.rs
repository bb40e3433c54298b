use std::path::PathBuf;

use ubiloc_core::eval::SweepConfig;
use ubiloc_core::sim::builtin;
use ubiloc_core::{run_trajectory, sweep, FixMethod, NoiseModel, Scenario, SelectionKind, SelectionPolicy, SweepValue};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

#[test]
fn shipped_files_match_builtins() {
    for s in [builtin::campus(), builtin::apartment()] {
        let text = std::fs::read_to_string(shipped(&s.name)).unwrap();
        assert_eq!(text.trim_end(), s.to_json(), "{} is stale", s.name);
        let loaded = Scenario::load(&shipped(&s.name)).unwrap();
        assert_eq!(loaded.walls, s.walls);
        assert_eq!(loaded.anchors, s.anchors);
        assert_eq!(loaded.waypoints, s.waypoints);
        assert_eq!(loaded.seed, s.seed);
        assert_eq!(loaded.indoor_interval, s.indoor_interval);
        assert!(loaded.validate().unwrap().is_empty());
    }
}

#[test]
fn noiseless_runs_are_exact_wherever_three_anchors_are_used() {
    for mut s in [builtin::campus(), builtin::apartment()] {
        s.noise = NoiseModel::noiseless();
        for kind in [SelectionKind::Nearest, SelectionKind::All, SelectionKind::Farthest] {
            let run = run_trajectory(&s, SelectionPolicy::new(kind, 4).unwrap()).unwrap();
            let multi: Vec<_> = run
                .points
                .iter()
                .filter(|p| p.fix.method == FixMethod::Multilateration)
                .collect();
            assert!(multi.len() * 2 > run.points.len(), "{} {kind}", s.name);
            for p in multi {
                assert!(
                    (p.fix.position - p.truth.position).norm() < 1e-6,
                    "{} {kind} at t={}",
                    s.name,
                    p.truth.timestamp
                );
            }
        }
    }
}

#[test]
fn median_error_grows_with_ranging_noise() {
    let values = [0.0, 0.05, 0.1, 0.2].map(SweepValue::Sigma);
    let config = SweepConfig {
        replications: 5,
        ..SweepConfig::default()
    };
    for s in [builtin::campus(), builtin::apartment()] {
        let rows = sweep(&s, &values, &config).unwrap();
        let medians: Vec<f64> = rows.iter().map(|r| r.median_m).collect();
        assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{}: {medians:?}", s.name);
    }
}

#[test]
fn seeds_change_results_and_repeat_exactly() {
    let mut s = builtin::apartment();
    let a = run_trajectory(&s, SelectionPolicy::default()).unwrap();
    assert_eq!(a, run_trajectory(&s, SelectionPolicy::default()).unwrap());
    s.seed += 1;
    assert_ne!(a, run_trajectory(&s, SelectionPolicy::default()).unwrap());
}
