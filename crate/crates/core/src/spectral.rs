//! Idempotency checks and the orthonormal split R V R' = diag(1,..,1,0,..,0).
//!
//! Eigenvalues of a projector are exactly 0 or 1, so no clustering logic is
//! needed: each computed eigenvalue must land in a narrow band around 0 or 1
//! and rows of R are ordered ones-block first with a deterministic tie-break
//! inside each eigenspace.

use crate::tensors::{Rotation, SymMatrix};
use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Gate on max |V*V - V| before attempting the split.
pub const IDEMPOTENCY_GATE: f64 = 1e-8;

/// The trace of a projector must be this close to an integer.
pub const TRACE_TOL: f64 = 1e-6;

/// Half-width of the accepted bands around the eigenvalues 0 and 1.
pub const EIGEN_BAND: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric: max deviation {max_deviation:.3e}")]
    NonSymmetric { max_deviation: f64 },
    #[error("idempotency violation: max |V*V - V| = {residual:.3e} exceeds gate {IDEMPOTENCY_GATE:.0e}")]
    IdempotencyViolation { residual: f64 },
    #[error("trace {trace} is not within {TRACE_TOL:.0e} of an integer rank")]
    NonIntegerTrace { trace: f64 },
    #[error("rank k = 0: the corrected formulas divide by k, a zero projector is not admissible")]
    ZeroRank,
    #[error("eigenvalue {value} is outside both bands 0 +/- {EIGEN_BAND:.0e} and 1 +/- {EIGEN_BAND:.0e}")]
    EigenvalueNotNearProjector { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClass {
    One,
    Zero,
}

pub fn classify_eigenvalue(lambda: f64) -> Result<EigenClass, SpectralError> {
    if (lambda - 1.0).abs() >= EIGEN_BAND && lambda.abs() >= EIGEN_BAND {
        return Err(SpectralError::EigenvalueNotNearProjector { value: lambda });
    }
    Ok(if lambda > 0.5 {
        EigenClass::One
    } else {
        EigenClass::Zero
    })
}

/// Result of diagonalizing an idempotent V: rows of `r` are eigenvectors,
/// eigenvalue-1 rows first, so that r * V * r' = diag(1,..,1,0,..,0).
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub r: Rotation,
    pub k: usize,
    pub idempotency_residual: f64,
    pub eigen_residual: f64,
}

impl SpectralSplit {
    /// max |r V r' - H|, the diagonalization residual against the ideal H.
    pub fn h_residual(&self, v0: &SymMatrix) -> f64 {
        let p = v0.dim();
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for s in 0..p {
                    for t in 0..p {
                        acc += self.r.get(i, s) * v0.get(s, t) * self.r.get(j, t);
                    }
                }
                let target = if i == j && i < self.k { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
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

/// Sign convention: the first component of largest magnitude is made
/// positive. Returns that component's index for use as the ordering key.
fn normalize_sign(v: &mut [f64]) -> usize {
    let mut arg = 0;
    let mut best = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            arg = i;
        }
    }
    if v[arg] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    arg
}

pub fn split_idempotent(v0: &SymMatrix) -> Result<SpectralSplit, SpectralError> {
    let sym = v0.validate_symmetry();
    if !sym.pass {
        return Err(SpectralError::NonSymmetric {
            max_deviation: sym.max_deviation,
        });
    }
    let residual = idempotency_residual(v0);
    if residual >= IDEMPOTENCY_GATE {
        return Err(SpectralError::IdempotencyViolation { residual });
    }

    let p = v0.dim();
    // Exact symmetrization guards the eigensolver against the 1e-12 slack
    // the validation tolerance allows.
    let m = DMatrix::from_fn(p, p, |i, j| 0.5 * (v0.get(i, j) + v0.get(j, i)));
    let eigen = SymmetricEigen::new(m);

    let mut eigen_residual = 0.0f64;
    let mut ones: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut zeros: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let class = classify_eigenvalue(lambda)?;
        eigen_residual = eigen_residual.max(lambda.abs().min((lambda - 1.0).abs()));
        let mut vec: Vec<f64> = eigen.eigenvectors.column(idx).iter().copied().collect();
        let key = normalize_sign(&mut vec);
        match class {
            EigenClass::One => ones.push((key, vec)),
            EigenClass::Zero => zeros.push((key, vec)),
        }
    }

    let k = ones.len();
    let trace = v0.trace();
    if (trace - k as f64).abs() >= TRACE_TOL {
        return Err(SpectralError::NonIntegerTrace { trace });
    }
    if k == 0 {
        return Err(SpectralError::ZeroRank);
    }

    let order = |a: &(usize, Vec<f64>), b: &(usize, Vec<f64>)| {
        a.0.cmp(&b.0).then_with(|| {
            for (x, y) in a.1.iter().zip(&b.1) {
                let c = x.total_cmp(y);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    };
    ones.sort_by(order);
    zeros.sort_by(order);

    let mut entries = Vec::with_capacity(p * p);
    for (_, v) in ones.iter().chain(zeros.iter()) {
        entries.extend_from_slice(v);
    }
    let r = Rotation::new(p, entries).map_err(|_| {
        // The eigenvector basis is orthonormal to machine precision; a
        // failure here means the input was far from a projector after all.
        SpectralError::IdempotencyViolation { residual }
    })?;

    Ok(SpectralSplit {
        r,
        k,
        idempotency_residual: residual,
        eigen_residual,
    })
}
