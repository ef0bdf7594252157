//! Finite-difference weights on arbitrary node sets.

use crate::Scalar;

/// Fornberg's recursion: weights `w[d][j]` such that
/// `f^(d)(z) ≈ Σ_j w[d][j] f(x_j)` for `d = 0..=max_order`.
pub fn fornberg_weights<T: Scalar>(z: T, xs: &[T], max_order: usize) -> Vec<Vec<T>> {
    let n = xs.len();
    let mut c = vec![vec![T::zero(); n]; max_order + 1];
    c[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = xs[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (T::count(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - T::count(k) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Applies weights to samples.
pub fn apply<T: Scalar>(weights: &[T], values: &[T]) -> T {
    weights.iter().zip(values).fold(T::zero(), |acc, (&w, &v)| acc + w * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_five_point_weights() {
        let xs = [-2.0f64, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &xs, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_on_polynomials_nonuniform() {
        let xs = [0.0, 0.13, 0.31, 0.52, 0.8];
        let z = 0.29;
        let w = fornberg_weights(z, &xs, 3);
        let f: Vec<f64> = xs.iter().map(|x| x * x * x - 2.0 * x).collect();
        assert!((apply(&w[0], &f) - (z * z * z - 2.0 * z)).abs() < 1e-12);
        assert!((apply(&w[1], &f) - (3.0 * z * z - 2.0)).abs() < 1e-11);
        assert!((apply(&w[2], &f) - 6.0 * z).abs() < 1e-9);
        assert!((apply(&w[3], &f) - 6.0).abs() < 1e-8);
    }
}
