use gaitmatrix::planner::{optimal_cycle, optimal_mean_cycle, sequence_reward, ControlSequence, Sense};
use gaitmatrix::quasistatic::{build_reward_matrix, calibrate_all, BodyDocument};
use gaitmatrix::statecore::{validate, RewardMatrix, RewardMatrixDocument};

fn text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

fn matrix(name: &str) -> RewardMatrix {
    let doc: RewardMatrixDocument = serde_json::from_str(&text(name)).unwrap();
    RewardMatrix::from_document(doc).unwrap()
}

fn seq(states: &[usize]) -> ControlSequence {
    ControlSequence::new(states.to_vec()).unwrap()
}

#[test]
fn published_matrices_are_valid() {
    for name in ["r1.json", "r2.json", "r3.json", "limb_loss.json"] {
        assert!(validate(&matrix(name)).is_empty(), "{}", name);
    }
    assert_eq!(matrix("r2.json").rows(), matrix("r1.json").negated().rows());
}

#[test]
fn published_gait_rewards() {
    let ct1 = seq(&[0, 2, 1, 0]);
    let ct2 = seq(&[0, 1, 2, 0]);
    assert_eq!(sequence_reward(&ct1, &matrix("r1.json")).unwrap(), 2);
    assert_eq!(sequence_reward(&ct2, &matrix("r2.json")).unwrap(), 2);
    let r3 = matrix("r3.json");
    assert_eq!(sequence_reward(&ct1, &r3).unwrap(), 1);
    assert_eq!(sequence_reward(&ct2, &r3).unwrap(), -2);
}

#[test]
fn r1_optimum_by_budget() {
    let r1 = matrix("r1.json");
    let p3 = optimal_cycle(&r1, 3, Sense::Maximize).unwrap();
    assert_eq!(p3.best_reward, 2);
    assert_eq!(p3.canonical(), Some(&seq(&[0, 2, 1, 0])));
    let p4 = optimal_cycle(&r1, 4, Sense::Maximize).unwrap();
    assert_eq!(p4.best_reward, 3);
    assert_eq!(p4.canonical(), Some(&seq(&[0, 2, 3, 1, 0])));
    let back = optimal_cycle(&r1, 3, Sense::Minimize).unwrap();
    assert_eq!(back.best_reward, -2);
    assert_eq!(back.canonical(), Some(&seq(&[0, 1, 2, 0])));
    let mean = optimal_mean_cycle(&r1).unwrap();
    assert_eq!((*mean.mean.numer(), *mean.mean.denom()), (3, 4));
}

#[test]
fn r2_retrograde_optimum() {
    let p = optimal_cycle(&matrix("r2.json"), 3, Sense::Maximize).unwrap();
    assert_eq!(p.best_reward, 2);
    assert!(p.cycles.contains(&seq(&[0, 1, 2, 0])));
}

#[test]
fn limb_loss_optimum() {
    let m = matrix("limb_loss.json");
    let p = optimal_cycle(&m, 5, Sense::Maximize).unwrap();
    assert_eq!(p.best_reward, 1);
    assert!(p.cycles.contains(&seq(&[0, 2, 3, 2, 0])));
    assert!(p.cycles.contains(&seq(&[2, 3, 2])));
    for c in &p.cycles {
        assert!(c.states().iter().all(|&s| s != 1));
    }
}

fn simulated(name: &str) -> RewardMatrix {
    let doc: BodyDocument<f64> = serde_json::from_str(&text(name)).unwrap();
    build_reward_matrix(&doc.body, &doc.sim).unwrap()
}

#[test]
fn simulated_r1_matches_published_signs() {
    let sim = simulated("r1_body.json");
    let published = matrix("r1.json");
    let mut compared = 0;
    for i in 0..4 {
        for j in 0..4 {
            let r = published.reward(i, j);
            if r != 0 {
                assert_eq!(sim.get(i, j), Some(r), "({}, {})", i, j);
                compared += 1;
            }
        }
    }
    assert_eq!(compared, 6);
    assert_eq!(sequence_reward(&seq(&[0, 2, 1, 0]), &sim).unwrap(), 2);
}

#[test]
fn simulated_r3_asymmetry() {
    let sim = simulated("r3_body.json");
    assert_eq!(sim.get(0, 3), Some(1));
    assert!(sim.get(3, 0).unwrap() <= 0);
}

#[test]
fn limb_loss_body_cannot_reach_01() {
    let doc: BodyDocument<f64> = serde_json::from_str(&text("limb_loss_body.json")).unwrap();
    let cal = calibrate_all(&doc.body, &doc.sim).unwrap();
    assert!(!cal.is_realizable(1));
    assert!(cal.is_realizable(0) && cal.is_realizable(2) && cal.is_realizable(3));
    let sim = build_reward_matrix(&doc.body, &doc.sim).unwrap();
    assert!((0..4).all(|k| !sim.is_allowed(1, k) && !sim.is_allowed(k, 1)));
}

#[test]
fn matrix_document_roundtrip() {
    for name in ["r1.json", "r3.json", "limb_loss.json"] {
        let m = matrix(name);
        let json = serde_json::to_string(&m.to_document()).unwrap();
        let back = RewardMatrix::from_document(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
