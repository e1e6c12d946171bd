use ztnd_core::problem::{constant_problem, example1};
use ztnd_core::{
    simulate, summarize, track, AoAScenario, Classification, IntegratorConfig, ModelKind, ModelSpec, NoiseModel,
    Termination, Vector,
};

fn cfg(horizon: f64) -> IntegratorConfig {
    IntegratorConfig {
        horizon,
        ..Default::default()
    }
}

#[test]
fn trace_lists_line_up() {
    let tr = simulate(
        &ModelSpec::new(ModelKind::Aztnd),
        &example1(),
        &NoiseModel::constant(Vector::from([1.0, 1.0])),
        &Vector::from([0.5, 0.5]),
        &cfg(2.0),
    )
    .unwrap();
    let n = tr.len();
    assert_eq!(tr.states.len(), n);
    assert_eq!(tr.integrals.len(), n);
    assert_eq!(tr.residual_norms.len(), n);
    assert_eq!(tr.solution_errors.as_ref().unwrap().len(), n);
    assert_eq!(tr.coefficients.as_ref().unwrap().len(), n);
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(tr.times[0], 0.0);
    assert!((tr.final_time().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(tr.terminated, Termination::Completed);
}

#[test]
fn adaptive_model_rejects_constant_noise_in_higher_dimension() {
    let p = constant_problem(3);
    let tr = simulate(
        &ModelSpec::new(ModelKind::Aztnd),
        &p,
        &NoiseModel::constant(Vector::filled(3, 5.0)),
        &Vector::from([1.0, -2.0, 0.5]),
        &cfg(10.0),
    )
    .unwrap();
    let s = summarize(&tr, 1e-4, 0.2).unwrap();
    assert_eq!(s.classification, Classification::Negligible);
}

#[test]
fn random_noise_is_reproducible_per_seed() {
    let run = |seed| {
        simulate(
            &ModelSpec::new(ModelKind::Aztnd),
            &example1(),
            &NoiseModel::bounded_random(0.5, 3.0, seed).unwrap(),
            &Vector::from([1.0, -1.0]),
            &cfg(1.0),
        )
        .unwrap()
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7).residual_norms, run(8).residual_norms);
}

#[test]
fn wrong_initial_dimension_is_an_error() {
    let r = simulate(
        &ModelSpec::new(ModelKind::Oznn),
        &example1(),
        &NoiseModel::None,
        &Vector::from([1.0, 2.0, 3.0]),
        &cfg(1.0),
    );
    assert!(r.is_err());
}

#[test]
fn tracker_with_integral_term_beats_plain_zeroing_under_bias() {
    let sc = AoAScenario::default_scenario(10.0).unwrap();
    let noise = NoiseModel::constant(Vector::from([20.0, 20.0]));
    let err = |kind| {
        let tr = track(&ModelSpec::new(kind), &sc, &noise, (1.0, 1.0), &cfg(10.0)).unwrap();
        *tr.solution_errors.unwrap().last().unwrap()
    };
    let (adaptive, plain) = (err(ModelKind::Aztnd), err(ModelKind::Oznn));
    assert!(adaptive < 1e-3, "adaptive {adaptive}");
    assert!(plain > 100.0 * adaptive, "plain {plain}");
}

#[test]
fn tracker_refuses_baselines() {
    let sc = AoAScenario::default_scenario(1.0).unwrap();
    let r = track(
        &ModelSpec::new(ModelKind::Gnn),
        &sc,
        &NoiseModel::None,
        (1.0, 1.0),
        &cfg(1.0),
    );
    assert!(r.is_err());
}
