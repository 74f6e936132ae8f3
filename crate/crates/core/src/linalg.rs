//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Inner products are linear in the first argument:
//! `<f, g> = sum_j f_j * conj(g_j)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type Rng = ChaCha8Rng;

/// Identifier recorded in reports so randomized inputs can be regenerated.
pub const RNG_ALGORITHM: &str = "chacha8(seed_from_u64)+standard-normal(re,im)+l2-normalize";

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{2 pi i m / n}`, exact at multiples of a quarter turn.
pub fn root_of_unity(m: i64, n: usize) -> Complex64 {
    let n = n as i64;
    let m = m.rem_euclid(n);
    if (4 * m) % n == 0 {
        return match (4 * m) / n {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
    c(theta.cos(), theta.sin())
}

pub fn inner(f: &CVector, g: &CVector) -> Complex64 {
    f.iter().zip(g.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(f: &CVector) -> f64 {
    f.iter().map(|z| z.norm_sqr()).sum()
}

/// Vector with independent standard normal real and imaginary parts.
pub fn random_vector(rng: &mut Rng, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| {
        c(
            StandardNormal.sample(&mut *rng),
            StandardNormal.sample(&mut *rng),
        )
    })
}

pub fn random_unit_vector(rng: &mut Rng, dim: usize) -> CVector {
    let v = random_vector(rng, dim);
    let n = norm_sq(&v).sqrt();
    v.map(|z| z / n)
}

pub fn random_hermitian(rng: &mut Rng, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        c(
            StandardNormal.sample(&mut *rng),
            StandardNormal.sample(&mut *rng),
        )
    });
    (&a + a.adjoint()).map(|z| z * 0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, ordered like `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "Hermitian eigensolve needs a square matrix");
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let sym = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(D) V*` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let e = HermitianEigen::new(m);
    e.min().abs().max(e.max().abs())
}

/// Spectral norm of an arbitrary matrix via the Gram matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    HermitianEigen::new(&gram).max().max(0.0).sqrt()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |A_ij - B_ij|` for equally sized matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// `max |M M* - I|` entrywise.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m * m.adjoint()), &CMatrix::identity(n, n))
}
