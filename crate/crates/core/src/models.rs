//! Model sources: the closed-form multinomial (Pearson goodness-of-fit)
//! family and a JSON load/save pair for user-specified models.
//!
//! For standardized multinomial counts X_i = (N_i - n p_i) / sqrt(n p_i) the
//! mean and covariance are exact at every n (mu1 = 0, v1 = 0), the limiting
//! covariance is the projector I - sqrt(p) sqrt(p)', and the raw cumulants
//! are linear in n, so the third/fourth coefficients are n-free and the
//! expansion terminates. The closed forms below are validated against an
//! exact-enumeration log-MGF oracle in the test suite before anything else
//! trusts them.

use crate::corrections::{CumulantModel, ModelError};
use crate::tensors::{SymMatrix, SymTensor3, SymTensor4};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultinomialError {
    #[error("probs: need at least 2 cells, got {got}")]
    TooFewCells { got: usize },
    #[error("probs[{index}] must be a finite positive probability, got {value}")]
    BadProbability { index: usize, value: f64 },
    #[error("probs must sum to 1 within 1e-12, got {sum}")]
    SumNotOne { sum: f64 },
    #[error("n must be a positive sample size")]
    ZeroSampleSize,
}

/// Cell probabilities and sample size of a multinomial experiment.
#[derive(Debug, Clone)]
pub struct MultinomialSpec {
    probs: Vec<f64>,
    n: u64,
}

impl MultinomialSpec {
    pub fn new(probs: Vec<f64>, n: u64) -> Result<Self, MultinomialError> {
        if probs.len() < 2 {
            return Err(MultinomialError::TooFewCells { got: probs.len() });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0 && value <= 1.0) {
                return Err(MultinomialError::BadProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MultinomialError::SumNotOne { sum });
        }
        if n == 0 {
            return Err(MultinomialError::ZeroSampleSize);
        }
        Ok(MultinomialSpec { probs, n })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.probs.len()
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Third cumulant of a single multinomial trial (indicator vector).
fn trial_k3(p: &[f64], i: usize, j: usize, l: usize) -> f64 {
    delta(i, j) * delta(j, l) * p[i] - delta(i, j) * p[i] * p[l] - delta(i, l) * p[i] * p[j]
        - delta(j, l) * p[j] * p[i]
        + 2.0 * p[i] * p[j] * p[l]
}

/// Fourth cumulant of a single multinomial trial.
fn trial_k4(p: &[f64], i: usize, j: usize, l: usize, m: usize) -> f64 {
    let d = delta;
    d(i, j) * d(j, l) * d(l, m) * p[i]
        - (d(i, j) * d(j, l) * p[i] * p[m]
            + d(i, j) * d(j, m) * p[i] * p[l]
            + d(i, l) * d(l, m) * p[i] * p[j]
            + d(j, l) * d(l, m) * p[j] * p[i])
        - (d(i, j) * d(l, m) * p[i] * p[l]
            + d(i, l) * d(j, m) * p[i] * p[j]
            + d(i, m) * d(j, l) * p[i] * p[j])
        + 2.0
            * (d(i, j) * p[i] * p[l] * p[m]
                + d(i, l) * p[i] * p[j] * p[m]
                + d(i, m) * p[i] * p[j] * p[l]
                + d(j, l) * p[j] * p[i] * p[m]
                + d(j, m) * p[j] * p[i] * p[l]
                + d(l, m) * p[l] * p[i] * p[j])
        - 6.0 * p[i] * p[j] * p[l] * p[m]
}

/// Exact cumulant model of the standardized Pearson statistic inputs.
pub fn multinomial_model(spec: &MultinomialSpec) -> CumulantModel {
    let p = spec.probs();
    let m = p.len();
    let sq: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
    let v0 = SymMatrix::from_fn(m, |i, j| delta(i, j) - sq[i] * sq[j]);
    // Evaluate at the sorted index tuple so the rounding pattern is shared
    // across an orbit and the tensors come out bitwise symmetric.
    let k3 = SymTensor3::from_fn(m, |i, j, l| {
        let mut c = [i, j, l];
        c.sort_unstable();
        trial_k3(p, c[0], c[1], c[2]) / (sq[c[0]] * sq[c[1]] * sq[c[2]])
    });
    let k4 = SymTensor4::from_fn(m, |i, j, l, r| {
        let mut c = [i, j, l, r];
        c.sort_unstable();
        trial_k4(p, c[0], c[1], c[2], c[3]) / (sq[c[0]] * sq[c[1]] * sq[c[2]] * sq[c[3]])
    });
    CumulantModel::new(
        spec.n(),
        vec![0.0; m],
        v0,
        SymMatrix::zeros(m),
        k3,
        k4,
    )
    .expect("closed-form multinomial model satisfies all invariants")
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation in {field}: expected {expected} entries, got {got}")]
    Schema {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// On-disk schema: plain nested row-major arrays, human-inspectable.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    n: u64,
    p: usize,
    mu1: Vec<f64>,
    v0: Vec<Vec<f64>>,
    v1: Vec<Vec<f64>>,
    k3: Vec<Vec<Vec<f64>>>,
    k4: Vec<Vec<Vec<Vec<f64>>>>,
}

fn flatten2(field: &'static str, p: usize, rows: &[Vec<f64>]) -> Result<Vec<f64>, ModelFileError> {
    if rows.len() != p {
        return Err(ModelFileError::Schema {
            field,
            expected: p,
            got: rows.len(),
        });
    }
    let mut out = Vec::with_capacity(p * p);
    for row in rows {
        if row.len() != p {
            return Err(ModelFileError::Schema {
                field,
                expected: p,
                got: row.len(),
            });
        }
        out.extend_from_slice(row);
    }
    Ok(out)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CumulantModel, ModelFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: ModelFile = serde_json::from_str(&text)?;
    let p = file.p;

    if file.mu1.len() != p {
        return Err(ModelFileError::Schema {
            field: "mu1",
            expected: p,
            got: file.mu1.len(),
        });
    }
    let v0 = SymMatrix::new(p, flatten2("v0", p, &file.v0)?).map_err(ModelError::from)?;
    let v1 = SymMatrix::new(p, flatten2("v1", p, &file.v1)?).map_err(ModelError::from)?;

    let mut k3_flat = Vec::with_capacity(p * p * p);
    if file.k3.len() != p {
        return Err(ModelFileError::Schema {
            field: "k3",
            expected: p,
            got: file.k3.len(),
        });
    }
    for plane in &file.k3 {
        k3_flat.extend(flatten2("k3", p, plane)?);
    }
    let k3 = SymTensor3::new(p, k3_flat).map_err(ModelError::from)?;

    let mut k4_flat = Vec::with_capacity(p * p * p * p);
    if file.k4.len() != p {
        return Err(ModelFileError::Schema {
            field: "k4",
            expected: p,
            got: file.k4.len(),
        });
    }
    for cube in &file.k4 {
        if cube.len() != p {
            return Err(ModelFileError::Schema {
                field: "k4",
                expected: p,
                got: cube.len(),
            });
        }
        for plane in cube {
            k4_flat.extend(flatten2("k4", p, plane)?);
        }
    }
    let k4 = SymTensor4::new(p, k4_flat).map_err(ModelError::from)?;

    Ok(CumulantModel::new(file.n, file.mu1, v0, v1, k3, k4)?)
}

pub fn save_model(model: &CumulantModel, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
    let p = model.p();
    let nest2 = |m: &SymMatrix| -> Vec<Vec<f64>> {
        (0..p)
            .map(|i| (0..p).map(|j| m.get(i, j)).collect())
            .collect()
    };
    let file = ModelFile {
        n: model.n(),
        p,
        mu1: model.mu1().to_vec(),
        v0: nest2(model.v0()),
        v1: nest2(model.v1()),
        k3: (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| (0..p).map(|l| model.k3().get(i, j, l)).collect())
                    .collect()
            })
            .collect(),
        k4: (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        (0..p)
                            .map(|l| (0..p).map(|m| model.k4().get(i, j, l, m)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    };
    // serde_json emits shortest-round-trip decimals: reloading reproduces
    // every f64 bit for bit.
    let text = serde_json::to_string_pretty(&file)?;
    let path = path.as_ref();
    std::fs::write(path, text + "\n").map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
