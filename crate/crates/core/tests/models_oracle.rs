//! Oracle checks for the multinomial closed forms against exact enumeration
//! (moments computed directly from the finite support, independent of the
//! tensor code paths), plus the load-error taxonomy on crafted files.

mod common;

use chi2corr::models::{load_model, ModelFileError};
use chi2corr::corrections::ModelError;
use chi2corr::spectral::SpectralError;
use chi2corr::{multinomial_model, MultinomialSpec};
use common::enumerate_standardized;

#[test]
fn enumeration_confirms_mean_and_covariance() {
    let probs = vec![0.2, 0.5, 0.3];
    let n = 5u64;
    let lat = enumerate_standardized(&probs, n);
    let m = probs.len();
    let model = multinomial_model(&MultinomialSpec::new(probs, n).unwrap());

    let total: f64 = lat.weights.iter().sum();
    assert!((total - 1.0).abs() < 1e-14);

    for i in 0..m {
        let mean: f64 = lat
            .points
            .iter()
            .zip(&lat.weights)
            .map(|(x, &w)| w * x[i])
            .sum();
        assert!(mean.abs() < 1e-12, "mean[{i}] = {mean}");
        for j in 0..m {
            let cov: f64 = lat
                .points
                .iter()
                .zip(&lat.weights)
                .map(|(x, &w)| w * x[i] * x[j])
                .sum();
            assert!(
                (cov - model.v0().get(i, j)).abs() < 1e-12,
                "cov[{i},{j}] = {cov} vs {}",
                model.v0().get(i, j)
            );
        }
    }
}

#[test]
fn enumeration_confirms_third_and_fourth_cumulants() {
    // Mean is exactly zero, so the third cumulant is the third moment and
    // the fourth is the fourth moment minus its three covariance pairings.
    let probs = vec![0.2, 0.5, 0.3];
    let n = 5u64;
    let lat = enumerate_standardized(&probs, n);
    let m = probs.len();
    let model = multinomial_model(&MultinomialSpec::new(probs, n).unwrap());
    let nf = n as f64;

    let moment = |idx: &[usize]| -> f64 {
        lat.points
            .iter()
            .zip(&lat.weights)
            .map(|(x, &w)| w * idx.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    };

    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let exact = moment(&[i, j, l]);
                let claimed = model.k3().get(i, j, l) / nf.sqrt();
                assert!(
                    (exact - claimed).abs() < 1e-12,
                    "k3[{i},{j},{l}]: {exact} vs {claimed}"
                );
                for r in 0..m {
                    let v = |a: usize, b: usize| model.v0().get(a, b);
                    let exact = moment(&[i, j, l, r])
                        - v(i, j) * v(l, r)
                        - v(i, l) * v(j, r)
                        - v(i, r) * v(j, l);
                    let claimed = model.k4().get(i, j, l, r) / nf;
                    assert!(
                        (exact - claimed).abs() < 1e-12,
                        "k4[{i},{j},{l},{r}]: {exact} vs {claimed}"
                    );
                }
            }
        }
    }
}

fn write_fixture(name: &str, body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    (dir, path)
}

const ZERO2: &str = "[[0.0,0.0],[0.0,0.0]]";

fn k3_zeros() -> String {
    format!("[{ZERO2},{ZERO2}]")
}

fn k4_zeros() -> String {
    format!("[[{ZERO2},{ZERO2}],[{ZERO2},{ZERO2}]]")
}

#[test]
fn load_rejects_missing_field_as_parse_error() {
    let (_d, path) = write_fixture(
        "missing.json",
        r#"{"n": 4, "p": 2, "mu1": [0.0, 0.0]}"#,
    );
    assert!(matches!(
        load_model(&path),
        Err(ModelFileError::Parse(_))
    ));
}

#[test]
fn load_rejects_wrong_dimensions_naming_the_field() {
    let body = format!(
        r#"{{"n":4,"p":2,"mu1":[0.0,0.0],"v0":[[1.0,0.0]],"v1":{ZERO2},"k3":{},"k4":{}}}"#,
        k3_zeros(),
        k4_zeros()
    );
    let (_d, path) = write_fixture("shape.json", &body);
    match load_model(&path) {
        Err(ModelFileError::Schema { field: "v0", expected: 2, got: 1 }) => {}
        other => panic!("expected schema violation on v0, got {other:?}"),
    }
}

#[test]
fn load_rejects_asymmetric_v0_naming_indices() {
    let body = format!(
        r#"{{"n":4,"p":2,"mu1":[0.0,0.0],"v0":[[1.0,0.25],[0.0,0.0]],"v1":{ZERO2},"k3":{},"k4":{}}}"#,
        k3_zeros(),
        k4_zeros()
    );
    let (_d, path) = write_fixture("asym.json", &body);
    match load_model(&path) {
        Err(ModelFileError::Model(ModelError::AsymmetricInput { field: "v0", worst, .. })) => {
            assert_eq!(worst, Some((vec![0, 1], vec![1, 0])));
        }
        other => panic!("expected asymmetric v0, got {other:?}"),
    }
}

#[test]
fn load_rejects_non_idempotent_v0() {
    let body = format!(
        r#"{{"n":4,"p":2,"mu1":[0.0,0.0],"v0":[[1.0,0.0],[0.0,0.5]],"v1":{ZERO2},"k3":{},"k4":{}}}"#,
        k3_zeros(),
        k4_zeros()
    );
    let (_d, path) = write_fixture("idem.json", &body);
    match load_model(&path) {
        Err(ModelFileError::Model(ModelError::Spectral(
            SpectralError::IdempotencyViolation { residual },
        ))) => {
            assert!((residual - 0.25).abs() < 1e-12);
        }
        other => panic!("expected idempotency violation, got {other:?}"),
    }
}

#[test]
fn load_rejects_wrong_mu1_length() {
    let body = format!(
        r#"{{"n":4,"p":2,"mu1":[0.0],"v0":[[1.0,0.0],[0.0,0.0]],"v1":{ZERO2},"k3":{},"k4":{}}}"#,
        k3_zeros(),
        k4_zeros()
    );
    let (_d, path) = write_fixture("mu.json", &body);
    match load_model(&path) {
        Err(ModelFileError::Schema { field: "mu1", expected: 2, got: 1 }) => {}
        other => panic!("expected schema violation on mu1, got {other:?}"),
    }
}

#[test]
fn load_reports_io_error_with_path() {
    let err = load_model("/nonexistent/chi2corr/model.json").unwrap_err();
    match err {
        ModelFileError::Io { ref path, .. } => assert!(path.contains("model.json")),
        other => panic!("expected io error, got {other:?}"),
    }
}

#[test]
fn load_rejects_ragged_k4() {
    let body = format!(
        r#"{{"n":4,"p":2,"mu1":[0.0,0.0],"v0":[[1.0,0.0],[0.0,0.0]],"v1":{ZERO2},"k3":{},"k4":[[{ZERO2},{ZERO2}]]}}"#,
        k3_zeros()
    );
    let (_d, path) = write_fixture("ragged.json", &body);
    match load_model(&path) {
        Err(ModelFileError::Schema { field: "k4", expected: 2, got: 1 }) => {}
        other => panic!("expected schema violation on k4, got {other:?}"),
    }
}
