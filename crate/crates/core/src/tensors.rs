//! Dense symmetric cumulant tensors (rank 2/3/4) and their orthogonal rotation.
//!
//! Dimensions here are small (tens at most), so everything is stored dense
//! row-major and contraction code stays auditable. Rotation is applied one
//! mode at a time, O(p^{rank+1}) instead of the naive O(p^{2 rank}).

use thiserror::Error;

/// Relative tolerance for symmetry validation: a pair of entries related by
/// an index permutation must agree within `SYMMETRY_TOL * (1 + min |entry|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Max-norm tolerance on R'R - I for accepting a rotation matrix.
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("entry count {got} does not match dim {dim} rank {rank} (expected {expected})")]
    BadShape {
        dim: usize,
        rank: u32,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },
    #[error("matrix is not orthonormal: max |R'R - I| = {residual:.3e} exceeds {ORTHO_TOL:.0e}")]
    NotOrthonormal { residual: f64 },
    #[error("dimension mismatch: rotation is {rotation}, operand is {operand}")]
    DimMismatch { rotation: usize, operand: usize },
}

/// Outcome of a symmetry scan. `worst` pairs the canonical (sorted) index
/// tuple with the permuted tuple deviating most from it.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub max_deviation: f64,
    pub pass: bool,
    pub worst: Option<(Vec<usize>, Vec<usize>)>,
}

impl SymmetryReport {
    fn perfect() -> Self {
        SymmetryReport {
            max_deviation: 0.0,
            pass: true,
            worst: None,
        }
    }
}

fn check_entries(dim: usize, rank: u32, entries: &[f64]) -> Result<(), TensorError> {
    let expected = dim.pow(rank);
    if entries.len() != expected {
        return Err(TensorError::BadShape {
            dim,
            rank,
            expected,
            got: entries.len(),
        });
    }
    if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
        return Err(TensorError::NonFinite { index });
    }
    Ok(())
}

/// Deviation bound for one orbit pair; the smaller entry sets the scale so
/// the check is symmetric in its arguments.
fn within_tol(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYMMETRY_TOL * (1.0 + a.abs().min(b.abs()))
}

macro_rules! common_tensor_impl {
    ($ty:ident, $rank:expr) => {
        impl $ty {
            pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, TensorError> {
                check_entries(dim, $rank, &entries)?;
                Ok($ty { dim, entries })
            }

            pub fn zeros(dim: usize) -> Self {
                $ty {
                    dim,
                    entries: vec![0.0; dim.pow($rank)],
                }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn entries(&self) -> &[f64] {
                &self.entries
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

common_tensor_impl!(SymMatrix, 2);

impl SymMatrix {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SymMatrix { dim, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn validate_symmetry(&self) -> SymmetryReport {
        let mut report = SymmetryReport::perfect();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let (a, b) = (self.get(i, j), self.get(j, i));
                let dev = (a - b).abs();
                if dev > report.max_deviation {
                    report.max_deviation = dev;
                    report.worst = Some((vec![i, j], vec![j, i]));
                }
                if !within_tol(a, b) {
                    report.pass = false;
                }
            }
        }
        report
    }

    pub fn symmetrized(&self) -> SymMatrix {
        SymMatrix::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    dim: usize,
    entries: Vec<f64>,
}

common_tensor_impl!(SymTensor3, 3);

impl SymTensor3 {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim.pow(3));
        for i in 0..dim {
            for j in 0..dim {
                for l in 0..dim {
                    entries.push(f(i, j, l));
                }
            }
        }
        SymTensor3 { dim, entries }
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.entries[(i * self.dim + j) * self.dim + l]
    }

    pub fn validate_symmetry(&self) -> SymmetryReport {
        let mut report = SymmetryReport::perfect();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for l in 0..self.dim {
                    let mut c = [i, j, l];
                    c.sort_unstable();
                    if c == [i, j, l] {
                        continue;
                    }
                    let canon = self.get(c[0], c[1], c[2]);
                    let v = self.get(i, j, l);
                    let dev = (v - canon).abs();
                    if dev > report.max_deviation {
                        report.max_deviation = dev;
                        report.worst = Some((c.to_vec(), vec![i, j, l]));
                    }
                    if !within_tol(v, canon) {
                        report.pass = false;
                    }
                }
            }
        }
        report
    }

    pub fn symmetrized(&self) -> SymTensor3 {
        SymTensor3::from_fn(self.dim, |i, j, l| {
            (self.get(i, j, l)
                + self.get(i, l, j)
                + self.get(j, i, l)
                + self.get(j, l, i)
                + self.get(l, i, j)
                + self.get(l, j, i))
                / 6.0
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor4 {
    dim: usize,
    entries: Vec<f64>,
}

common_tensor_impl!(SymTensor4, 4);

impl SymTensor4 {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for l in 0..dim {
                    for m in 0..dim {
                        entries.push(f(i, j, l, m));
                    }
                }
            }
        }
        SymTensor4 { dim, entries }
    }

    pub fn get(&self, i: usize, j: usize, l: usize, m: usize) -> f64 {
        self.entries[((i * self.dim + j) * self.dim + l) * self.dim + m]
    }

    pub fn validate_symmetry(&self) -> SymmetryReport {
        let mut report = SymmetryReport::perfect();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for l in 0..self.dim {
                    for m in 0..self.dim {
                        let mut c = [i, j, l, m];
                        c.sort_unstable();
                        if c == [i, j, l, m] {
                            continue;
                        }
                        let canon = self.get(c[0], c[1], c[2], c[3]);
                        let v = self.get(i, j, l, m);
                        let dev = (v - canon).abs();
                        if dev > report.max_deviation {
                            report.max_deviation = dev;
                            report.worst = Some((c.to_vec(), vec![i, j, l, m]));
                        }
                        if !within_tol(v, canon) {
                            report.pass = false;
                        }
                    }
                }
            }
        }
        report
    }

    pub fn symmetrized(&self) -> SymTensor4 {
        // Average over all 24 permutations of the four indices.
        const PERMS: [[usize; 4]; 24] = [
            [0, 1, 2, 3],
            [0, 1, 3, 2],
            [0, 2, 1, 3],
            [0, 2, 3, 1],
            [0, 3, 1, 2],
            [0, 3, 2, 1],
            [1, 0, 2, 3],
            [1, 0, 3, 2],
            [1, 2, 0, 3],
            [1, 2, 3, 0],
            [1, 3, 0, 2],
            [1, 3, 2, 0],
            [2, 0, 1, 3],
            [2, 0, 3, 1],
            [2, 1, 0, 3],
            [2, 1, 3, 0],
            [2, 3, 0, 1],
            [2, 3, 1, 0],
            [3, 0, 1, 2],
            [3, 0, 2, 1],
            [3, 1, 0, 2],
            [3, 1, 2, 0],
            [3, 2, 0, 1],
            [3, 2, 1, 0],
        ];
        SymTensor4::from_fn(self.dim, |i, j, l, m| {
            let idx = [i, j, l, m];
            PERMS
                .iter()
                .map(|p| self.get(idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]))
                .sum::<f64>()
                / 24.0
        })
    }
}

/// An orthonormal p x p matrix, validated at construction (R'R = I within
/// `ORTHO_TOL` in max norm).
#[derive(Debug, Clone)]
pub struct Rotation {
    dim: usize,
    entries: Vec<f64>,
}

impl Rotation {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, TensorError> {
        check_entries(dim, 2, &entries)?;
        let r = Rotation { dim, entries };
        let residual = r.orthonormality_residual();
        if residual > ORTHO_TOL {
            return Err(TensorError::NotOrthonormal { residual });
        }
        Ok(r)
    }

    pub fn identity(dim: usize) -> Self {
        Rotation {
            dim,
            entries: SymMatrix::identity(dim).entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// max |R'R - I|
    pub fn orthonormality_residual(&self) -> f64 {
        let p = self.dim;
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in 0..p {
                let dot: f64 = (0..p).map(|l| self.get(l, i) * self.get(l, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Transpose is exactly the inverse for an orthonormal matrix; no
    /// revalidation needed since the residual is unchanged up to rounding.
    pub fn transpose(&self) -> Rotation {
        let p = self.dim;
        let mut entries = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                entries[j * p + i] = self.get(i, j);
            }
        }
        Rotation { dim: p, entries }
    }
}

/// Contracts one mode of a dense rank-`rank` tensor with the rotation:
/// out[.., i, ..] = sum_l R[i,l] src[.., l, ..].
fn rotate_mode(src: &[f64], p: usize, rank: u32, mode: u32, r: &Rotation) -> Vec<f64> {
    let stride = p.pow(rank - 1 - mode);
    let block = stride * p;
    let mut out = vec![0.0; src.len()];
    let mut base = 0;
    while base < src.len() {
        for off in 0..stride {
            for i in 0..p {
                let mut acc = 0.0;
                for l in 0..p {
                    acc += r.get(i, l) * src[base + l * stride + off];
                }
                out[base + i * stride + off] = acc;
            }
        }
        base += block;
    }
    out
}

fn check_dims(r: &Rotation, operand: usize) -> Result<(), TensorError> {
    if r.dim != operand {
        return Err(TensorError::DimMismatch {
            rotation: r.dim,
            operand,
        });
    }
    Ok(())
}

/// R M R'
pub fn rotate2(m: &SymMatrix, r: &Rotation) -> Result<SymMatrix, TensorError> {
    check_dims(r, m.dim)?;
    let step1 = rotate_mode(&m.entries, m.dim, 2, 0, r);
    let entries = rotate_mode(&step1, m.dim, 2, 1, r);
    Ok(SymMatrix {
        dim: m.dim,
        entries,
    })
}

pub fn rotate3(t: &SymTensor3, r: &Rotation) -> Result<SymTensor3, TensorError> {
    check_dims(r, t.dim)?;
    let mut entries = t.entries.clone();
    for mode in 0..3 {
        entries = rotate_mode(&entries, t.dim, 3, mode, r);
    }
    Ok(SymTensor3 {
        dim: t.dim,
        entries,
    })
}

pub fn rotate4(t: &SymTensor4, r: &Rotation) -> Result<SymTensor4, TensorError> {
    check_dims(r, t.dim)?;
    let mut entries = t.entries.clone();
    for mode in 0..4 {
        entries = rotate_mode(&entries, t.dim, 4, mode, r);
    }
    Ok(SymTensor4 {
        dim: t.dim,
        entries,
    })
}

pub fn rotate_vector(v: &[f64], r: &Rotation) -> Result<Vec<f64>, TensorError> {
    check_dims(r, v.len())?;
    let p = r.dim;
    let mut out = vec![0.0; p];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (0..p).map(|l| r.get(i, l) * v[l]).sum();
    }
    Ok(out)
}
