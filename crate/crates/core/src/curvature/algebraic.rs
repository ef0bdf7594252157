//! Algebraic curvature operators on `Λ²R^N` and complex sectional curvature.
//!
//! Convention: `riem(x, y, z, w) = ⟨R(x ∧ y), w ∧ z⟩`, so that
//! `sec(u, v) = riem(u, v, v, u)` for orthonormal `u, v` and `R = κ·id` has
//! constant curvature `κ`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::Scalar;

pub const MAX_RANDOM_DIM: usize = 6;

/// Symmetric operator on `Λ²R^N` satisfying the first Bianchi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicCurvatureOperator<T> {
    dim: usize,
    /// Row-major `m × m`, `m = N(N-1)/2`, wedge basis `e_i ∧ e_j` (`i < j`, lexicographic).
    matrix: Vec<T>,
}

pub(crate) fn wedge_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of `e_i ∧ e_j` (`i < j`) in the lexicographic wedge basis.
pub(crate) fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Components of `u ∧ v` in the wedge basis.
pub(crate) fn wedge<S>(u: &[S], v: &[S]) -> Vec<S>
where
    S: Copy + std::ops::Mul<Output = S> + std::ops::Sub<Output = S>,
{
    let n = u.len();
    let mut out = Vec::with_capacity(wedge_dim(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push(u[i] * v[j] - u[j] * v[i]);
        }
    }
    out
}

impl<T: Scalar> AlgebraicCurvatureOperator<T> {
    /// Validates symmetry and the first Bianchi identity.
    pub fn new(dim: usize, matrix: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionOutOfRange { dim, min: 2, max: usize::MAX });
        }
        let m = wedge_dim(dim);
        if matrix.len() != m * m {
            return Err(Error::InvalidConfig(format!(
                "operator needs {} entries for N = {dim}, got {}",
                m * m,
                matrix.len()
            )));
        }
        let op = Self { dim, matrix };
        let scale = op.max_abs_entry().max(T::one());
        let tol = T::lit(1e-12) * scale;
        for i in 0..m {
            for j in 0..i {
                if (op.matrix[i * m + j] - op.matrix[j * m + i]).abs() > tol {
                    return Err(Error::InvalidConfig("operator is not symmetric".into()));
                }
            }
        }
        if op.bianchi_residual() > tol {
            return Err(Error::InvalidConfig("operator violates the first Bianchi identity".into()));
        }
        Ok(op)
    }

    /// `κ · id`: constant sectional curvature `κ`.
    pub fn constant(dim: usize, kappa: T) -> Self {
        Self::diagonal(dim, &vec![kappa; wedge_dim(dim)]).expect("diagonal of matching length")
    }

    /// Diagonal on coordinate wedges (always satisfies Bianchi).
    pub fn diagonal(dim: usize, diag: &[T]) -> Result<Self> {
        let m = wedge_dim(dim);
        if diag.len() != m {
            return Err(Error::InvalidConfig(format!("diagonal needs {m} entries, got {}", diag.len())));
        }
        let mut matrix = vec![T::zero(); m * m];
        for (i, &d) in diag.iter().enumerate() {
            matrix[i * m + i] = d;
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn wedge_dim(&self) -> usize {
        wedge_dim(self.dim)
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.wedge_dim() + j]
    }

    fn max_abs_entry(&self) -> T {
        self.matrix.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub(crate) fn scaled(&self, factor: T) -> Self {
        Self { dim: self.dim, matrix: self.matrix.iter().map(|&v| v * factor).collect() }
    }

    /// Component `R_abcd = riem(e_a, e_b, e_c, e_d)`.
    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        if a == b || c == d {
            return T::zero();
        }
        let (i, s1) =
            if a < b { (wedge_index(self.dim, a, b), T::one()) } else { (wedge_index(self.dim, b, a), -T::one()) };
        let (j, s2) =
            if d < c { (wedge_index(self.dim, d, c), T::one()) } else { (wedge_index(self.dim, c, d), -T::one()) };
        s1 * s2 * self.entry(i, j)
    }

    /// Full 4-tensor, index `((a N + b) N + c) N + d`.
    pub fn tensor(&self) -> Vec<T> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        out.push(self.component(a, b, c, d));
                    }
                }
            }
        }
        out
    }

    fn from_tensor(dim: usize, tensor: &[T]) -> Self {
        let n = dim;
        let m = wedge_dim(n);
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let mut matrix = vec![T::zero(); m * m];
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    for d in c + 1..n {
                        matrix[wedge_index(n, a, b) * m + wedge_index(n, c, d)] = tensor[idx(a, b, d, c)];
                    }
                }
            }
        }
        Self { dim, matrix }
    }

    /// Largest absolute cyclic sum `R_abcd + R_bcad + R_cabd`.
    pub fn bianchi_residual(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = self.component(a, b, c, d) + self.component(b, c, a, d) + self.component(c, a, b, d);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Removes the totally antisymmetric part, landing in the kernel of the Bianchi map.
    pub fn bianchi_projection(&self) -> Self {
        let n = self.dim;
        let t = self.tensor();
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let third = T::one() / T::lit(3.0);
        let mut out = t.clone();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let cyc = t[idx(a, b, c, d)] + t[idx(b, c, a, d)] + t[idx(c, a, b, d)];
                        out[idx(a, b, c, d)] -= cyc * third;
                    }
                }
            }
        }
        Self::from_tensor(n, &out)
    }

    /// `riem(x, y, z, w)` for real vectors.
    pub fn riem(&self, x: &[T], y: &[T], z: &[T], w: &[T]) -> T {
        let xy = wedge(x, y);
        let wz = wedge(w, z);
        self.bilinear(&xy, &wz)
    }

    fn bilinear(&self, p: &[T], q: &[T]) -> T {
        let m = self.wedge_dim();
        let mut sum = T::zero();
        for i in 0..m {
            if p[i] == T::zero() {
                continue;
            }
            let row = &self.matrix[i * m..(i + 1) * m];
            let inner = row.iter().zip(q).fold(T::zero(), |acc, (&r, &v)| acc + r * v);
            sum += p[i] * inner;
        }
        sum
    }

    /// Sectional curvature of the real plane spanned by `u, v`.
    pub fn sectional(&self, u: &[T], v: &[T]) -> Result<T> {
        let w = wedge(u, v);
        let norm2 = w.iter().fold(T::zero(), |acc, &c| acc + c * c);
        let scale = dot(u, u) * dot(v, v);
        if !(norm2 > T::lit(1e-24) * scale) {
            return Err(Error::DegeneratePlane);
        }
        Ok(self.bilinear(&w, &w) / norm2)
    }

    /// `scal = 2 Σ_{i<j} sec(e_i, e_j) = 2 tr R`.
    pub fn scal(&self) -> T {
        let m = self.wedge_dim();
        (0..m).fold(T::zero(), |acc, i| acc + self.entry(i, i)) * T::lit(2.0)
    }
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Orthonormal real 2-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPlane<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> RealPlane<T> {
    /// Gram–Schmidt orthonormalization of `u, v`.
    pub fn new(u: Vec<T>, v: Vec<T>) -> Result<Self> {
        let nu = dot(&u, &u).sqrt();
        if !(nu > T::zero()) || u.len() != v.len() {
            return Err(Error::DegeneratePlane);
        }
        let u: Vec<T> = u.iter().map(|&c| c / nu).collect();
        let nv0 = dot(&v, &v).sqrt();
        let proj = dot(&v, &u);
        let w: Vec<T> = v.iter().zip(&u).map(|(&c, &e)| c - proj * e).collect();
        let nw = dot(&w, &w).sqrt();
        if !(nw > T::lit(1e-10) * nv0) {
            return Err(Error::DegeneratePlane);
        }
        Ok(Self { u, v: w.iter().map(|&c| c / nw).collect() })
    }

    pub fn complexify(&self) -> ComplexPlane<T> {
        let lift = |x: &[T]| x.iter().map(|&c| Complex::new(c, T::zero())).collect();
        ComplexPlane { u: lift(&self.u), v: lift(&self.v) }
    }
}

/// Unitary-orthonormal pair spanning a complex 2-plane of `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane<T> {
    pub u: Vec<Complex<T>>,
    pub v: Vec<Complex<T>>,
}

/// Hermitian product `g(x, ȳ) = Σ x_i conj(y_i)`.
fn herm<T: Scalar>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj())
}

impl<T: Scalar> ComplexPlane<T> {
    /// Hermitian Gram–Schmidt of `u, v`.
    pub fn new(u: Vec<Complex<T>>, v: Vec<Complex<T>>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DegeneratePlane);
        }
        let nu = herm(&u, &u).re.sqrt();
        if !(nu > T::zero()) {
            return Err(Error::DegeneratePlane);
        }
        let u: Vec<Complex<T>> = u.iter().map(|c| c / nu).collect();
        let nv0 = herm(&v, &v).re.sqrt();
        let proj = herm(&v, &u);
        let w: Vec<Complex<T>> = v.iter().zip(&u).map(|(c, e)| c - proj * e).collect();
        let nw = herm(&w, &w).re.sqrt();
        if !(nw > T::lit(1e-10) * nv0) {
            return Err(Error::DegeneratePlane);
        }
        Ok(Self { u, v: w.iter().map(|c| c / nw).collect() })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Largest deviation from `g(u,ū) = g(v,v̄) = 1`, `g(u,v̄) = 0`.
    pub fn gram_error(&self) -> T {
        let one = T::one();
        (herm(&self.u, &self.u).re - one)
            .abs()
            .max((herm(&self.v, &self.v).re - one).abs())
            .max(herm(&self.u, &self.v).norm())
    }
}

/// `sec^c(σ) = riem(u, v, v̄, ū) = g(R(u ∧ v), conj(u ∧ v))`.
pub fn sec_complex<T: Scalar>(op: &AlgebraicCurvatureOperator<T>, plane: &ComplexPlane<T>) -> Result<T> {
    if plane.dim() != op.dim() {
        return Err(Error::DimensionOutOfRange { dim: plane.dim(), min: op.dim(), max: op.dim() });
    }
    let w = wedge(&plane.u, &plane.v);
    let norm2 = w.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    if !(norm2 > T::lit(1e-20)) {
        return Err(Error::DegeneratePlane);
    }
    let m = op.wedge_dim();
    let mut value = Complex::new(T::zero(), T::zero());
    for i in 0..m {
        let mut inner = Complex::new(T::zero(), T::zero());
        for j in 0..m {
            inner += w[j].conj() * op.entry(i, j);
        }
        value += w[i] * inner;
    }
    let scale = op.max_abs_entry().max(T::one());
    debug_assert!(
        value.im.abs() <= T::lit(1e-10) * scale || T::epsilon() > T::lit(1e-10),
        "complex sectional curvature has imaginary part {}",
        value.im
    );
    Ok(value.re)
}

/// Seeded random algebraic curvature operator on `Λ²R^N`, `2 ≤ N ≤ 6`.
pub fn random_bianchi_tensor<T: Scalar>(seed: u64, dim: usize) -> Result<AlgebraicCurvatureOperator<T>> {
    if !(2..=MAX_RANDOM_DIM).contains(&dim) {
        return Err(Error::DimensionOutOfRange { dim, min: 2, max: MAX_RANDOM_DIM });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = wedge_dim(dim);
    let mut matrix = vec![T::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let z: f64 = StandardNormal.sample(&mut rng);
            matrix[i * m + j] = T::lit(z);
            matrix[j * m + i] = T::lit(z);
        }
    }
    Ok(AlgebraicCurvatureOperator { dim, matrix }.bianchi_projection())
}

/// Upper bound on every sectional curvature given `sec ≥ c` and `scal ≤ C`:
/// `C/2 - (N(N-1)/2 - 1) c`.
pub fn pinching_upper_bound<T: Scalar>(sec_lower: T, scal_upper: T, dim: usize) -> Result<T> {
    if dim < 2 {
        return Err(Error::DimensionOutOfRange { dim, min: 2, max: usize::MAX });
    }
    let planes = T::count(wedge_dim(dim));
    Ok(scal_upper / T::lit(2.0) - (planes - T::one()) * sec_lower)
}
