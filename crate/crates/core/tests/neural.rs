mod common;

use common::*;
use lsmds::ose_neural::{
    default_hidden, forward, init_model, predict_batch, predict_point, train, TrainOptions,
    MODEL_FORMAT_VERSION,
};
use lsmds::{Error, Matrix, MlpModel, TrainingSet};
use rand::Rng;

/// Points in the plane with their exact distances to 16 random landmarks.
fn consistency_task(seed: u64, m: usize) -> TrainingSet {
    let mut r = rng(seed);
    let landmarks = uniform(&mut r, 16, 2, -1.0, 1.0);
    let points = uniform(&mut r, m, 2, -1.0, 1.0);
    let mut inputs = Matrix::zeros(m, 16);
    for i in 0..m {
        for (j, l) in landmarks.row_iter().enumerate() {
            inputs.set(i, j, dist(points.row(i), l));
        }
    }
    TrainingSet::new(inputs, points).unwrap()
}

// Final/initial loss on the pinned-seed run, recorded from the reference trace.
const RECORDED_FINAL_RATIO: f64 = 0.007041;

#[test]
fn learns_the_euclidean_consistency_task() {
    let data = consistency_task(11, 500);
    let model = init_model(16, 2, &default_hidden(16), 3).unwrap();
    let opts = TrainOptions {
        seed: 5,
        ..TrainOptions::default()
    };
    let result = train(model, &data, &opts).unwrap();
    let trace = &result.loss_trace;
    assert_eq!(trace.len(), opts.epochs + 1);
    let ratio = trace[opts.epochs] / trace[0];
    assert!(ratio < 0.2, "final loss is {ratio:.3} of the initial loss");
    assert!(
        ratio <= RECORDED_FINAL_RATIO * 1.05,
        "regressed from the recorded {RECORDED_FINAL_RATIO}: {ratio}"
    );
}

/// Layer-by-layer recomputation with explicit loops.
#[allow(clippy::needless_range_loop)]
fn forward_oracle(model: &MlpModel, x: &[f64]) -> Vec<f64> {
    let mut act = x.to_vec();
    let last = model.layers().len() - 1;
    for (li, layer) in model.layers().iter().enumerate() {
        let mut next = vec![0.0; layer.biases.len()];
        for o in 0..next.len() {
            let mut z = layer.biases[o];
            for i in 0..act.len() {
                z += layer.weights.get(o, i) * act[i];
            }
            next[o] = if li < last && z < 0.0 { 0.0 } else { z };
        }
        act = next;
    }
    act
}

#[test]
fn forward_matches_straight_line_oracle() {
    for seed in 0..10 {
        let mut r = rng(seed);
        let l = r.gen_range(1..30);
        let model = init_model(l, 3, &default_hidden(l), seed).unwrap();
        let x: Vec<f64> = (0..l).map(|_| r.gen_range(0.0..10.0)).collect();
        let got = forward(&model, &x).unwrap();
        let want = forward_oracle(&model, &x);
        for (a, b) in got.iter().zip(&want) {
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + b.abs()),
                "{got:?} vs {want:?}"
            );
        }
    }
}

#[test]
fn save_load_gives_bit_identical_predictions() {
    let data = consistency_task(2, 64);
    let opts = TrainOptions {
        epochs: 5,
        scale_inputs: true,
        ..TrainOptions::default()
    };
    let model = train(init_model(16, 2, &[12, 8, 4], 9).unwrap(), &data, &opts)
        .unwrap()
        .model;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let loaded = MlpModel::load(&path).unwrap();
    assert_eq!(loaded, model);

    let mut r = rng(77);
    let queries = uniform(&mut r, 100, 16, 0.0, 3.0);
    let a = predict_batch(&model, &queries).unwrap();
    let b = predict_batch(&loaded, &queries).unwrap();
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for q in queries.row_iter() {
        assert_eq!(
            predict_point(&model, q).unwrap(),
            predict_point(&loaded, q).unwrap()
        );
    }
}

#[test]
fn damaged_model_files_are_rejected() {
    let model = init_model(4, 2, &[3, 3, 3], 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();

    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(matches!(
        MlpModel::load(&path),
        Err(Error::CorruptFile { .. })
    ));

    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["version"] = serde_json::json!(MODEL_FORMAT_VERSION + 1);
    std::fs::write(&path, value.to_string()).unwrap();
    assert!(matches!(MlpModel::load(&path), Err(Error::Version { .. })));

    assert!(matches!(
        MlpModel::load(&dir.path().join("absent.json")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn training_is_a_pure_function_of_its_seeds() {
    let data = consistency_task(4, 80);
    let opts = TrainOptions {
        epochs: 10,
        ..TrainOptions::default()
    };
    let run = |seed| train(init_model(16, 2, &[8, 8, 8], seed).unwrap(), &data, &opts).unwrap();
    let (a, b) = (run(1), run(1));
    assert_eq!(a.model, b.model);
    assert_eq!(a.loss_trace, b.loss_trace);
    assert_ne!(run(2).model, a.model);
}
