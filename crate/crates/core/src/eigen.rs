//! Eigenvalues of a dense real nonsymmetric matrix.
//!
//! Balancing, reduction to upper Hessenberg form by stabilized elementary
//! similarity transforms, then the Francis double-shift QR iteration. Only
//! eigenvalues are produced.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};
use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EigenError {
    #[error("QR iteration did not converge after {iterations} iterations on row {row}")]
    NoConvergence { row: usize, iterations: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

const MAX_ITERATIONS: usize = 60;

/// 1-based square work array, matching the textbook index arithmetic of the
/// QR sweep.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    fn new(m: &Matrix) -> Self {
        let n = m.order();
        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                a[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.n + 1) + j]
    }

    fn swap(&mut self, (i1, j1): (usize, usize), (i2, j2): (usize, usize)) {
        let s = self.n + 1;
        self.a.swap(i1 * s + j1, i2 * s + j2);
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        fabs(a)
    } else {
        -fabs(a)
    }
}

/// Parlett-Reinsch balancing with radix 2 (exact in binary floating point).
fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = w.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += fabs(w.at(j, i));
                    r += fabs(w.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 1..=n {
                    *w.at_mut(i, j) *= g;
                }
                for j in 1..=n {
                    *w.at_mut(j, i) *= f;
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by elimination with partial pivoting.
fn hessenberg(w: &mut Work) {
    let n = w.n;
    for m in 2..n {
        let mut x = 0.0;
        let mut piv = m;
        for j in m..=n {
            if fabs(w.at(j, m - 1)) > fabs(x) {
                x = w.at(j, m - 1);
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..=n {
                w.swap((piv, j), (m, j));
            }
            for j in 1..=n {
                w.swap((j, piv), (j, m));
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = w.at(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    *w.at_mut(i, m - 1) = 0.0;
                    for j in m..=n {
                        let v = w.at(m, j);
                        *w.at_mut(i, j) -= y * v;
                    }
                    for j in 1..=n {
                        let v = w.at(j, i);
                        *w.at_mut(j, m) += y * v;
                    }
                }
            }
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg work array.
fn hessenberg_qr(w: &mut Work) -> Result<Vec<Complex64>, EigenError> {
    let n = w.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += fabs(w.at(i, j));
        }
    }

    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = fabs(w.at(l - 1, l - 1)) + fabs(w.at(l, l));
                if s == 0.0 {
                    s = anorm;
                }
                if fabs(w.at(l, l - 1)) + s == s {
                    *w.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let l = l.max(1);
            x = w.at(nn, nn);
            if l == nn {
                // One root found.
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = w.at(nn - 1, nn - 1);
            let ww = w.at(nn, nn - 1) * w.at(nn - 1, nn);
            if l == nn - 1 {
                // Two roots found.
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = sqrt(fabs(q));
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - ww / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == MAX_ITERATIONS {
                return Err(EigenError::NoConvergence {
                    row: nn - 1,
                    iterations: its,
                });
            }
            let mut ww = ww;
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for i in 1..=nn {
                    *w.at_mut(i, i) -= x;
                }
                let s = fabs(w.at(nn, nn - 1)) + fabs(w.at(nn - 1, nn - 2));
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;

            // Form the shift and look for two consecutive small subdiagonals.
            let mut m = nn - 2;
            loop {
                z = w.at(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - ww) / w.at(m + 1, m) + w.at(m, m + 1);
                q = w.at(m + 1, m + 1) - z - rr - ss;
                r = w.at(m + 2, m + 1);
                let s = fabs(p) + fabs(q) + fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = fabs(w.at(m, m - 1)) * (fabs(q) + fabs(r));
                let v = fabs(p) * (fabs(w.at(m - 1, m - 1)) + fabs(z) + fabs(w.at(m + 1, m + 1)));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                *w.at_mut(i, i - 2) = 0.0;
                if i != m + 2 {
                    *w.at_mut(i, i - 3) = 0.0;
                }
            }

            // Double QR step on rows l..nn and columns m..nn.
            for k in m..nn {
                if k != m {
                    p = w.at(k, k - 1);
                    q = w.at(k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = w.at(k + 2, k - 1);
                    }
                    x = fabs(p) + fabs(q) + fabs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        *w.at_mut(k, k - 1) = -w.at(k, k - 1);
                    }
                } else {
                    *w.at_mut(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    p = w.at(k, j) + q * w.at(k + 1, j);
                    if k != nn - 1 {
                        p += r * w.at(k + 2, j);
                        *w.at_mut(k + 2, j) -= p * z;
                    }
                    *w.at_mut(k + 1, j) -= p * y;
                    *w.at_mut(k, j) -= p * x;
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    p = x * w.at(i, k) + y * w.at(i, k + 1);
                    if k != nn - 1 {
                        p += z * w.at(i, k + 2);
                        *w.at_mut(i, k + 2) -= p * r;
                    }
                    *w.at_mut(i, k + 1) -= p * q;
                    *w.at_mut(i, k) -= p;
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }

    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of `m`, unordered. Complex pairs appear adjacent, the
/// member with negative imaginary part first.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>, EigenError> {
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let n = m.order();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]),
        _ => {}
    }
    let mut w = Work::new(m);
    balance(&mut w);
    hessenberg(&mut w);
    hessenberg_qr(&mut w)
}
