//! Polynomial roots from companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// All complex roots of `c[0] + c[1] x + ... + c[n] x^n` (`c[n] != 0`).
///
/// The companion matrix is balanced by powers of two before the dense
/// eigen-solve; roots are returned in ascending order of real part.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = DMatrix::zeros(n, n);
    for i in 0..n {
        comp[(0, i)] = -c[n - 1 - i] / lead;
    }
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    balance(&mut comp);
    let mut roots: Vec<Complex64> = comp.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Diagonal similarity by powers of two that roughly equalizes row and
/// column norms.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut row = 0.0;
            let mut col = 0.0;
            for k in 0..n {
                if k != i {
                    col += a[(k, i)].abs();
                    row += a[(i, k)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let sum = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * sum {
                done = false;
                for k in 0..n {
                    a[(i, k)] /= f;
                    a[(k, i)] *= f;
                }
            }
        }
    }
}
