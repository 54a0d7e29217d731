//! Dense complex matrix helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn vec_max_abs_diff(a: &Vector, b: &Vector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b` with `a` as the slow index.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

/// `|a⟩⟨b|`
pub fn outer(a: &Vector, b: &Vector) -> Matrix {
    a * b.adjoint()
}

/// Partial trace of a multipartite operator.
///
/// `dims` lists the subsystem dimensions (first entry slowest), `traced`
/// the indices of the subsystems to remove. The remaining subsystems keep
/// their relative order.
pub fn partial_trace(m: &Matrix, dims: &[usize], traced: &[usize]) -> Result<Matrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: m.nrows(),
        });
    }
    if let Some(&bad) = traced.iter().find(|&&t| t >= dims.len()) {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            actual: bad + 1,
        });
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|i| !traced.contains(i)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Compose a full multi-index from (kept index, traced index).
    let full_index = |kept_idx: usize, env_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rem = kept_idx;
        for (pos, &sub) in kept.iter().enumerate().rev() {
            digits[sub] = rem % kept_dims[pos];
            rem /= kept_dims[pos];
        }
        let mut rem = env_idx;
        for (pos, &sub) in traced.iter().enumerate().rev() {
            digits[sub] = rem % traced_dims[pos];
            rem /= traced_dims[pos];
        }
        digits
            .iter()
            .zip(dims)
            .fold(0usize, |acc, (&d, &n)| acc * n + d)
    };

    let mut out = Matrix::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += m[(full_index(i, e), full_index(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations: ascending eigenvalues and orthonormal eigenvectors as columns.
///
/// nalgebra's symmetric QR solver loses eigenvector orthogonality (~1e−5)
/// on the large degenerate clusters of the repeater Hamiltonians; Jacobi
/// keeps it at machine precision and skips the exactly-zero couplings that
/// dominate these matrices.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let mut a = (m + m.adjoint()) * c(0.5);
    let mut v = Matrix::identity(n, n);
    let scale = a.norm();
    if scale > 0.0 {
        for _sweep in 0..64 {
            let mut off = 0.0;
            for j in 0..n {
                for i in 0..n {
                    if i != j {
                        off += a[(i, j)].norm_sqr();
                    }
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Annihilate `a[p, q]` with `J = [[c, s e^{iθ}], [−s e^{−iθ}, c]]`,
/// `a ← J† a J`, `v ← v J`.
fn jacobi_rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let s_fwd = phase * sn; // s e^{iθ}
    let s_bwd = phase.conj() * sn; // s e^{−iθ}
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs - akq * s_bwd;
        a[(k, q)] = akp * s_fwd + akq * cs;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs - aqk * s_fwd;
        a[(q, k)] = apk * s_bwd + aqk * cs;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * s_bwd;
        v[(k, q)] = vkp * s_fwd + vkq * cs;
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `f(H)` for Hermitian `H` via its spectral decomposition.
pub fn hermitian_function(m: &Matrix, f: impl Fn(f64) -> C64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (j, &x) in values.iter().enumerate() {
        let fx = f(x);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fx);
    }
    scaled * vectors.adjoint()
}

/// Maximum deviation of `m` from Hermiticity.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Operator stored as its non-zero entries, for channels whose Kraus
/// operators are mostly zeros (loss operators shift occupations).
#[derive(Debug, Clone)]
pub struct SparseOp {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &Matrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `out += A x A†` for a square `x` of matching dimension.
    pub fn conjugate_add(&self, x: &Matrix, out: &mut Matrix) {
        debug_assert_eq!(x.nrows(), self.cols);
        debug_assert_eq!(out.nrows(), self.rows);
        for &(r, c, v) in &self.entries {
            for &(r2, c2, v2) in &self.entries {
                let xv = x[(c, c2)];
                if xv != ZERO {
                    out[(r, r2)] += v * xv * v2.conj();
                }
            }
        }
    }

    /// `A x` for a square `x`.
    pub fn left_mul(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, x.ncols());
        for &(r, c, v) in &self.entries {
            for j in 0..x.ncols() {
                out[(r, j)] += v * x[(c, j)];
            }
        }
        out
    }

    /// `x A†`
    pub fn right_mul_adjoint(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.nrows(), self.rows);
        for &(r, c, v) in &self.entries {
            let vc = v.conj();
            for i in 0..x.nrows() {
                out[(i, r)] += x[(i, c)] * vc;
            }
        }
        out
    }
}

/// Complex Gaussian vector normalised to unit length.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    let v = Vector::from_iterator(
        dim,
        (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    );
    let n = v.norm();
    v / c(n)
}

/// Random full-rank density matrix `G G† / Tr(G G†)` from a Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let t = trace(&rho);
    rho / t
}
