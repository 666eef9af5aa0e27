//! The four correction constants (a, b, c, d) of the 1/n-corrected
//! chi-squared approximation.
//!
//! a and d are sums over the rotated frame (ones block and zeros block of
//! the diagonalized limiting covariance); b and c are full contractions of
//! the third/fourth cumulant coefficients in the original frame, which is
//! legitimate because those contractions are rotationally invariant.

use crate::spectral::{split_idempotent, SpectralError, SpectralSplit, IDEMPOTENCY_GATE};
use crate::tensors::{
    rotate2, rotate3, rotate4, rotate_vector, SymMatrix, SymTensor3, SymTensor4, TensorError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch in {field}: expected {expected}, got {got}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{field} failed symmetry validation: max deviation {max_deviation:.3e} at {worst:?}")]
    AsymmetricInput {
        field: &'static str,
        max_deviation: f64,
        worst: Option<(Vec<usize>, Vec<usize>)>,
    },
    #[error("non-finite value in {field}")]
    NonFinite { field: &'static str },
    #[error("n must be a positive sample size")]
    ZeroSampleSize,
    #[error("{name} must be finite, got {value}")]
    InvalidConstant { name: &'static str, value: f64 },
    #[error("k must be at least 1")]
    ZeroDegrees,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Cumulant expansion coefficients of a standardized statistic: the 1/sqrt(n)
/// mean coefficient, the limiting covariance (idempotent) with its 1/n
/// correction, and the leading third/fourth cumulant coefficients.
#[derive(Debug, Clone)]
pub struct CumulantModel {
    n: u64,
    p: usize,
    mu1: Vec<f64>,
    v0: SymMatrix,
    v1: SymMatrix,
    k3: SymTensor3,
    k4: SymTensor4,
}

impl CumulantModel {
    pub fn new(
        n: u64,
        mu1: Vec<f64>,
        v0: SymMatrix,
        v1: SymMatrix,
        k3: SymTensor3,
        k4: SymTensor4,
    ) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroSampleSize);
        }
        let p = v0.dim();
        let dims: [(&'static str, usize); 4] = [
            ("mu1", mu1.len()),
            ("v1", v1.dim()),
            ("k3", k3.dim()),
            ("k4", k4.dim()),
        ];
        for (field, got) in dims {
            if got != p {
                return Err(ModelError::DimensionMismatch {
                    field,
                    expected: p,
                    got,
                });
            }
        }
        if mu1.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite { field: "mu1" });
        }
        let symmetry: [(&'static str, crate::tensors::SymmetryReport); 4] = [
            ("v0", v0.validate_symmetry()),
            ("v1", v1.validate_symmetry()),
            ("k3", k3.validate_symmetry()),
            ("k4", k4.validate_symmetry()),
        ];
        for (field, report) in symmetry {
            if !report.pass {
                return Err(ModelError::AsymmetricInput {
                    field,
                    max_deviation: report.max_deviation,
                    worst: report.worst,
                });
            }
        }
        let residual = idempotency_residual(&v0);
        if residual >= IDEMPOTENCY_GATE {
            return Err(ModelError::Spectral(SpectralError::IdempotencyViolation {
                residual,
            }));
        }
        Ok(CumulantModel {
            n,
            p,
            mu1,
            v0,
            v1,
            k3,
            k4,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn mu1(&self) -> &[f64] {
        &self.mu1
    }

    pub fn v0(&self) -> &SymMatrix {
        &self.v0
    }

    pub fn v1(&self) -> &SymMatrix {
        &self.v1
    }

    pub fn k3(&self) -> &SymTensor3 {
        &self.k3
    }

    pub fn k4(&self) -> &SymTensor4 {
        &self.k4
    }

    /// Same cumulant coefficients at a different sample size.
    pub fn with_n(&self, n: u64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroSampleSize);
        }
        let mut m = self.clone();
        m.n = n;
        Ok(m)
    }
}

fn idempotency_residual(v: &SymMatrix) -> f64 {
    let p = v.dim();
    let mut worst = 0.0f64;
    for i in 0..p {
        for j in 0..p {
            let vv: f64 = (0..p).map(|l| v.get(i, l) * v.get(l, j)).sum();
            worst = worst.max((vv - v.get(i, j)).abs());
        }
    }
    worst
}

/// The scalar correction constants, all O(1/n), plus the degrees of freedom
/// k and the sample size n they were computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: u32,
    pub n: u64,
}

impl CorrectionConstants {
    pub fn new(a: f64, b: f64, c: f64, d: f64, k: u32, n: u64) -> Result<Self, ModelError> {
        for (name, value) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !value.is_finite() {
                return Err(ModelError::InvalidConstant { name, value });
            }
        }
        if k == 0 {
            return Err(ModelError::ZeroDegrees);
        }
        if n == 0 {
            return Err(ModelError::ZeroSampleSize);
        }
        Ok(CorrectionConstants { a, b, c, d, k, n })
    }

    pub fn zero(k: u32, n: u64) -> Self {
        CorrectionConstants {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            k,
            n,
        }
    }
}

fn check_split(model: &CumulantModel, split: &SpectralSplit) -> Result<(), ModelError> {
    if split.r.dim() != model.p {
        return Err(ModelError::DimensionMismatch {
            field: "split",
            expected: model.p,
            got: split.r.dim(),
        });
    }
    Ok(())
}

/// a = sum over the ones block of (V1~_ii + (mu1~_i)^2) / (2n).
pub fn compute_a(model: &CumulantModel, split: &SpectralSplit) -> Result<f64, ModelError> {
    check_split(model, split)?;
    let v1r = rotate2(&model.v1, &split.r)?;
    let mur = rotate_vector(&model.mu1, &split.r)?;
    let sum: f64 = (0..split.k)
        .map(|i| v1r.get(i, i) + mur[i] * mur[i])
        .sum();
    Ok(sum / (2.0 * model.n as f64))
}

/// d = sum over the zeros block of (V1~_ii + (mu1~_i)^2) / n.
/// The divisor is n, not 2n: these components enter T quadratically with no
/// cross term against a fluctuating coordinate.
pub fn compute_d(model: &CumulantModel, split: &SpectralSplit) -> Result<f64, ModelError> {
    check_split(model, split)?;
    let v1r = rotate2(&model.v1, &split.r)?;
    let mur = rotate_vector(&model.mu1, &split.r)?;
    let sum: f64 = (split.k..model.p)
        .map(|i| v1r.get(i, i) + mur[i] * mur[i])
        .sum();
    Ok(sum / (model.n as f64))
}

/// b = sum_{i,j} (k4_{iijj} + 4 mu1_i k3_{ijj}) / (8n), in the original
/// frame; the double trace is rotationally invariant.
pub fn compute_b(model: &CumulantModel) -> f64 {
    let p = model.p;
    let mut sum = 0.0;
    for i in 0..p {
        for j in 0..p {
            sum += model.k4.get(i, i, j, j) + 4.0 * model.mu1[i] * model.k3.get(i, j, j);
        }
    }
    sum / (8.0 * model.n as f64)
}

/// c = sum (k3_{ijl})^2 / (12n) + sum_i (sum_j k3_{ijj})^2 / (8n), original
/// frame. The second term uses the factored O(p^2) form.
pub fn compute_c(model: &CumulantModel) -> f64 {
    let p = model.p;
    let mut frob = 0.0;
    for i in 0..p {
        for j in 0..p {
            for l in 0..p {
                let v = model.k3.get(i, j, l);
                frob += v * v;
            }
        }
    }
    let mut traced = 0.0;
    for i in 0..p {
        let w: f64 = (0..p).map(|j| model.k3.get(i, j, j)).sum();
        traced += w * w;
    }
    let n = model.n as f64;
    frob / (12.0 * n) + traced / (8.0 * n)
}

pub fn compute_constants(model: &CumulantModel) -> Result<CorrectionConstants, ModelError> {
    let split = split_idempotent(&model.v0)?;
    let a = compute_a(model, &split)?;
    let d = compute_d(model, &split)?;
    let b = compute_b(model);
    let c = compute_c(model);
    CorrectionConstants::new(a, b, c, d, split.k as u32, model.n)
}

/// Diagnostic for inconsistent inputs: the corrected formulas assume the
/// rotated third/fourth cumulant coefficients vanish whenever any index
/// falls in the zeros block. Returns the max such rotated entry.
pub fn null_space_residual(
    model: &CumulantModel,
    split: &SpectralSplit,
) -> Result<f64, ModelError> {
    check_split(model, split)?;
    let k3r = rotate3(&model.k3, &split.r)?;
    let k4r = rotate4(&model.k4, &split.r)?;
    let p = model.p;
    let k = split.k;
    let mut worst = 0.0f64;
    for i in 0..p {
        for j in 0..p {
            for l in 0..p {
                if i >= k || j >= k || l >= k {
                    worst = worst.max(k3r.get(i, j, l).abs());
                }
                for m in 0..p {
                    if i >= k || j >= k || l >= k || m >= k {
                        worst = worst.max(k4r.get(i, j, l, m).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}
