//! Reference computations for the test suites.
//!
//! Nothing here shares code with `migrasim-core`: the matrix exponential comes
//! from nalgebra (Padé scaling and squaring), and characteristic polynomial
//! roots are found with Faddeev-LeVerrier plus Durand-Kerner iteration.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Row-major `n x n` slice to nalgebra.
pub fn to_dmatrix(n: usize, row_major: &[f64]) -> DMatrix<f64> {
    assert_eq!(row_major.len(), n * n);
    DMatrix::from_row_slice(n, n, row_major)
}

/// Exact solution at time `t` of `dx/dt = A x + c`, `x(0) = x0`, computed as
/// the exponential of the augmented matrix `[[A, c], [0, 0]]`.
pub fn lti_solution(n: usize, a_row_major: &[f64], c: &[f64], x0: &[f64], t: f64) -> Vec<f64> {
    assert_eq!(c.len(), n);
    assert_eq!(x0.len(), n);
    let a = to_dmatrix(n, a_row_major);
    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&a);
    for i in 0..n {
        m[(i, n)] = c[i];
    }
    let e = (m * t).exp();
    let mut z = nalgebra::DVector::<f64>::zeros(n + 1);
    for i in 0..n {
        z[i] = x0[i];
    }
    z[n] = 1.0;
    let out = e * z;
    out.iter().take(n).copied().collect()
}

/// `A = a I - f L` for a row-major Laplacian.
pub fn system_matrix(n: usize, laplacian: &[f64], a: f64, f: f64) -> Vec<f64> {
    let mut m: Vec<f64> = laplacian.iter().map(|l| -f * l).collect();
    for i in 0..n {
        m[i * n + i] += a;
    }
    m
}

/// Characteristic polynomial coefficients of `A`, highest degree first,
/// monic: `det(lambda I - A) = lambda^n + c[1] lambda^(n-1) + ... + c[n]`.
pub fn char_poly(n: usize, a_row_major: &[f64]) -> Vec<f64> {
    let a = to_dmatrix(n, a_row_major);
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        m = &a * &m + &id * c_prev;
        let am = &a * &m;
        let c_k = -am.trace() / k as f64;
        coeffs.push(c_k);
        c_prev = c_k;
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// All complex roots of a monic polynomial (highest degree first) by
/// simultaneous Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32) * (radius / seed.norm().powi(k as i32)).min(radius))
        .collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = horner(coeffs, zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    roots
}

/// Eigenvalues via the characteristic polynomial; only sensible for small n.
pub fn eigenvalues_by_char_poly(n: usize, a_row_major: &[f64]) -> Vec<Complex64> {
    poly_roots(&char_poly(n, a_row_major))
}

/// Greedy matching distance between two eigenvalue multisets: the largest
/// distance from an element of `a` to its nearest unused partner in `b`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Mean and standard deviation of a binomial count.
pub fn binomial_moments(trials: usize, p: f64) -> (f64, f64) {
    let n = trials as f64;
    (n * p, (n * p * (1.0 - p)).sqrt())
}

/// Natural log of `spread(x(T)) / spread(x(0))` for `dx/dt = A x`, integrated
/// with a dense classical RK4 at step `dt`. The state is rescaled whenever its
/// magnitude leaves `[1e-100, 1e100]`, which is exact for a linear system.
pub fn log_spread_ratio(n: usize, a_row_major: &[f64], x0: &[f64], t_end: f64, dt: f64) -> f64 {
    let spread = |x: &[f64]| {
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let matvec = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| a_row_major[i * n + j] * x[j]).sum())
            .collect()
    };
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    let steps = (t_end / dt).round() as usize;
    let mut x = x0.to_vec();
    let mut log_scale = 0.0;
    for _ in 0..steps {
        let k1 = matvec(&x);
        let k2 = matvec(&axpy(&x, &k1, dt / 2.0));
        let k3 = matvec(&axpy(&x, &k2, dt / 2.0));
        let k4 = matvec(&axpy(&x, &k3, dt));
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let mag = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            for v in &mut x {
                *v /= mag;
            }
            log_scale += mag.ln();
        }
    }
    spread(&x).ln() + log_scale - spread(x0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential() {
        let x = lti_solution(1, &[0.1], &[0.0], &[1.0], 1.0);
        assert!((x[0] - 0.1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn forced_integrator() {
        // dx/dt = c: x(t) = x0 + c t.
        let x = lti_solution(2, &[0.0; 4], &[2.0, -1.0], &[1.0, 1.0], 3.0);
        assert!((x[0] - 7.0).abs() < 1e-12 && (x[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_roots() {
        let mut r = poly_roots(&[1.0, -6.0, 11.0, -6.0]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, w) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - Complex64::new(w, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn char_poly_of_two_by_two() {
        // [[1, -1], [-1, 1]]: lambda^2 - 2 lambda.
        let c = char_poly(2, &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(c, vec![1.0, -2.0, 0.0]);
    }
}
