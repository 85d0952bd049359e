use gaitmatrix::gaitcontrol::{
    gait_rate, replay_open_loop, run_closed_loop, schedule_open_loop, ActuationWaveform, Pulse, SessionConfig,
};
use gaitmatrix::planner::ControlSequence;
use gaitmatrix::quasistatic::{calibrate_all, BodyDocument};
use gaitmatrix::statecore::{RewardMatrix, RewardMatrixDocument};

fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

fn body(name: &str) -> BodyDocument<f64> {
    serde_json::from_str(&fixture_text(name)).unwrap()
}

fn matrix(name: &str) -> RewardMatrix {
    let doc: RewardMatrixDocument = serde_json::from_str(&fixture_text(name)).unwrap();
    RewardMatrix::from_document(doc).unwrap()
}

fn ct1() -> ControlSequence {
    ControlSequence::new(vec![0, 2, 1, 0]).unwrap()
}

#[test]
fn closed_loop_ct1_on_r1_body() {
    let doc = body("r1_body.json");
    let session = run_closed_loop(&doc.body, &ct1(), &doc.sim, &SessionConfig::default()).unwrap();
    assert_eq!(session.cycles_completed, 3);
    assert_eq!(session.cumulative_reward(), 6);
    assert_eq!(session.visited(), vec![0, 2, 1, 0, 2, 1, 0, 2, 1, 0]);
    assert!(session.net_displacement() > 0.0);
    // Staircase: the centre of mass never moves backward.
    assert!(session.rows.windows(2).all(|w| w[1].com >= w[0].com - 1e-12));
    assert!(session.rows.windows(2).all(|w| w[1].t_ms > w[0].t_ms));
}

#[test]
fn open_loop_replay_visits_closed_loop_states() {
    let doc = body("r1_body.json");
    let cal = calibrate_all(&doc.body, &doc.sim).unwrap();
    let waveform = ActuationWaveform::new(
        Pulse::new(cal.activation(2).unwrap()[0], 300.0, 900.0),
        Pulse::new(cal.activation(1).unwrap()[1], 300.0, 900.0),
        300.0,
    );
    let timeline = schedule_open_loop(&waveform, 3).unwrap();
    let open = replay_open_loop(&doc.body, &timeline).unwrap();
    let session = run_closed_loop(&doc.body, &ct1(), &doc.sim, &SessionConfig::default()).unwrap();
    assert_eq!(open, session.visited());
}

#[test]
fn backward_gait_reverses_staircase() {
    let doc = body("r1_body.json");
    let ct2 = ControlSequence::new(vec![0, 1, 2, 0]).unwrap();
    let session = run_closed_loop(&doc.body, &ct2, &doc.sim, &SessionConfig::default()).unwrap();
    assert_eq!(session.cumulative_reward(), -6);
    assert!(session.net_displacement() < 0.0);
}

#[test]
fn gait_rates_from_published_matrices() {
    let r1 = matrix("r1.json");
    let rate: f64 = gait_rate(&ct1(), &r1, &[1000.0; 3]).unwrap();
    assert!((rate - 2.0 / 3.0).abs() < 1e-12);
    let cl2 = ControlSequence::new(vec![2, 3, 2]).unwrap();
    let rate: f64 = gait_rate(&cl2, &matrix("limb_loss.json"), &[500.0; 2]).unwrap();
    assert!((rate - 1.0).abs() < 1e-12);
}
