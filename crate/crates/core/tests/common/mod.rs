//! Shared oracle machinery for the integration suite: quadrature rules that
//! do not touch the library's analytic formulas, an exact-enumeration
//! cumulant oracle for small multinomials, and seeded random rotations.
#![allow(dead_code)]

use chi2corr::tensors::{Rotation, SymTensor3, SymTensor4};
use rand::Rng;

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature

/// Nodes (ascending) and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let pj = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = pj;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integral of f over the solid ball |z| <= r in k dimensions, k <= 3.
/// Each nested level substitutes z = h sin(phi) so the sqrt(r^2 - |z|^2)
/// boundary is reached with a vanishing Jacobian and plain Gauss-Legendre
/// converges spectrally.
pub fn ball_integral<F: Fn(&[f64]) -> f64>(k: usize, r: f64, n: usize, f: F) -> f64 {
    let (x, w) = gauss_legendre(n);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let s: Vec<f64> = x.iter().map(|&x| (half_pi * x).sin()).collect();
    let c: Vec<f64> = x
        .iter()
        .zip(&w)
        .map(|(&x, &w)| half_pi * w * (half_pi * x).cos())
        .collect();
    match k {
        1 => (0..n).map(|i| r * c[i] * f(&[r * s[i]])).sum(),
        2 => {
            let mut acc = 0.0;
            for i in 0..n {
                let z1 = r * s[i];
                let h2 = (r * r - z1 * z1).max(0.0).sqrt();
                for j in 0..n {
                    acc += r * c[i] * h2 * c[j] * f(&[z1, h2 * s[j]]);
                }
            }
            acc
        }
        3 => {
            let mut acc = 0.0;
            for i in 0..n {
                let z1 = r * s[i];
                let r2 = (r * r - z1 * z1).max(0.0);
                let h2 = r2.sqrt();
                for j in 0..n {
                    let z2 = h2 * s[j];
                    let h3 = (r2 - z2 * z2).max(0.0).sqrt();
                    let w12 = r * c[i] * h2 * c[j];
                    for l in 0..n {
                        acc += w12 * h3 * c[l] * f(&[z1, z2, h3 * s[l]]);
                    }
                }
            }
            acc
        }
        _ => panic!("ball_integral supports k <= 3"),
    }
}

/// Integral of f over [d, infinity) for chi-squared-type integrands. The
/// substitution u = d + t^2 absorbs the (u - d)^(-1/2) edge singularity of
/// the k = 1 density; the tail beyond u - d = 200 is below 1e-40.
pub fn integrate_tail<F: Fn(f64) -> f64>(d: f64, panels: usize, nodes: usize, f: F) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    let t_max = 200f64.sqrt();
    let mut acc = 0.0;
    for p in 0..panels {
        let a = t_max * p as f64 / panels as f64;
        let b = t_max * (p + 1) as f64 / panels as f64;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&xi, &wi) in x.iter().zip(&w) {
            let t = mid + half * xi;
            acc += half * wi * f(d + t * t) * 2.0 * t;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Probabilists' Hermite polynomials and the standard Gaussian density

pub fn he2(x: f64) -> f64 {
    x * x - 1.0
}

pub fn he4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 - 6.0 * x2 + 3.0
}

pub fn he6(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 * x2 - 15.0 * x2 * x2 + 45.0 * x2 - 15.0
}

pub fn gauss_density(z: &[f64]) -> f64 {
    let norm = (2.0 * std::f64::consts::PI).powf(-0.5 * z.len() as f64);
    norm * (-0.5 * z.iter().map(|v| v * v).sum::<f64>()).exp()
}

// ---------------------------------------------------------------------------
// Exact enumeration of small multinomials and a log-MGF cumulant oracle

/// Full support of the standardized multinomial: one row per composition of
/// n into m cells, with its exact probability.
pub struct Lattice {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn enumerate_standardized(probs: &[f64], n: u64) -> Lattice {
    fn factorial(n: u64) -> f64 {
        (1..=n).map(|v| v as f64).product()
    }
    let m = probs.len();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut counts = vec![0u64; m];
    fn rec(
        probs: &[f64],
        n: u64,
        cell: usize,
        left: u64,
        counts: &mut Vec<u64>,
        points: &mut Vec<Vec<f64>>,
        weights: &mut Vec<f64>,
    ) {
        let m = probs.len();
        if cell + 1 == m {
            counts[cell] = left;
            let mut w = factorial(n);
            for (&c, &p) in counts.iter().zip(probs) {
                w = w / factorial(c) * p.powi(c as i32);
            }
            let nf = n as f64;
            points.push(
                counts
                    .iter()
                    .zip(probs)
                    .map(|(&c, &p)| (c as f64 - nf * p) / (nf * p).sqrt())
                    .collect(),
            );
            weights.push(w);
            return;
        }
        for c in 0..=left {
            counts[cell] = c;
            rec(probs, n, cell + 1, left - c, counts, points, weights);
        }
    }
    rec(probs, n, 0, n, &mut counts, &mut points, &mut weights);
    Lattice { points, weights }
}

pub fn log_mgf(lat: &Lattice, t: &[f64]) -> f64 {
    lat.points
        .iter()
        .zip(&lat.weights)
        .map(|(x, &w)| {
            w * x
                .iter()
                .zip(t)
                .map(|(&xi, &ti)| xi * ti)
                .sum::<f64>()
                .exp()
        })
        .sum::<f64>()
        .ln()
}

/// Mixed partial of the log-MGF at 0 by composed central differences,
/// error series in powers of h^2.
pub fn fd_cumulant(lat: &Lattice, indices: &[usize], h: f64) -> f64 {
    fn rec(lat: &Lattice, t: &mut Vec<f64>, rest: &[usize], h: f64) -> f64 {
        match rest.split_first() {
            None => log_mgf(lat, t),
            Some((&i, rest)) => {
                t[i] += h;
                let plus = rec(lat, t, rest, h);
                t[i] -= 2.0 * h;
                let minus = rec(lat, t, rest, h);
                t[i] += h;
                (plus - minus) / (2.0 * h)
            }
        }
    }
    let dim = lat.points[0].len();
    rec(lat, &mut vec![0.0; dim], indices, h)
}

/// Two Richardson levels over h = 0.1, 0.05, 0.025 cancel the h^2 and h^4
/// error terms, leaving O(h^6).
pub fn exact_cumulant(lat: &Lattice, indices: &[usize]) -> f64 {
    let a1 = fd_cumulant(lat, indices, 0.1);
    let a2 = fd_cumulant(lat, indices, 0.05);
    let a3 = fd_cumulant(lat, indices, 0.025);
    let b1 = (4.0 * a2 - a1) / 3.0;
    let b2 = (4.0 * a3 - a2) / 3.0;
    (16.0 * b2 - b1) / 15.0
}

// ---------------------------------------------------------------------------
// Seeded random structures

/// Product of Givens rotations with uniform angles, two sweeps over all
/// coordinate pairs. Orthonormal to machine precision.
pub fn random_orthonormal(p: usize, rng: &mut impl Rng) -> Rotation {
    let mut m = vec![0.0; p * p];
    for i in 0..p {
        m[i * p + i] = 1.0;
    }
    for _ in 0..2 {
        for i in 0..p {
            for j in (i + 1)..p {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                let (sin, cos) = theta.sin_cos();
                for col in 0..p {
                    let a = m[i * p + col];
                    let b = m[j * p + col];
                    m[i * p + col] = cos * a - sin * b;
                    m[j * p + col] = sin * a + cos * b;
                }
            }
        }
    }
    Rotation::new(p, m).expect("Givens product is orthonormal")
}

/// Symmetric rank-3 tensor with random entries, nonzero only when every
/// index lies in `support`. Orbits share one value, so symmetry is bitwise.
pub fn random_supported_sym3(p: usize, support: &[usize], rng: &mut impl Rng) -> SymTensor3 {
    let mut entries = vec![0.0; p * p * p];
    for ai in 0..support.len() {
        for aj in ai..support.len() {
            for al in aj..support.len() {
                let v: f64 = rng.random_range(-1.0..1.0);
                let (i, j, l) = (support[ai], support[aj], support[al]);
                let mut assign = |a: usize, b: usize, c: usize| {
                    entries[(a * p + b) * p + c] = v;
                };
                assign(i, j, l);
                assign(i, l, j);
                assign(j, i, l);
                assign(j, l, i);
                assign(l, i, j);
                assign(l, j, i);
            }
        }
    }
    SymTensor3::new(p, entries).expect("constructed with matching dims")
}

/// Rank-4 analogue of random_supported_sym3.
pub fn random_supported_sym4(p: usize, support: &[usize], rng: &mut impl Rng) -> SymTensor4 {
    let mut entries = vec![0.0; p * p * p * p];
    for ai in 0..support.len() {
        for aj in ai..support.len() {
            for al in aj..support.len() {
                for am in al..support.len() {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    let idx = [support[ai], support[aj], support[al], support[am]];
                    let mut perm = idx;
                    perm.sort_unstable();
                    // walk all 24 permutations of the canonical tuple
                    loop {
                        let [a, b, c, d] = perm;
                        entries[((a * p + b) * p + c) * p + d] = v;
                        if !next_permutation(&mut perm) {
                            break;
                        }
                    }
                }
            }
        }
    }
    SymTensor4::new(p, entries).expect("constructed with matching dims")
}

/// Lexicographic next permutation; false once wrapped around.
fn next_permutation(a: &mut [usize; 4]) -> bool {
    let mut i = 3;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = 3;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
