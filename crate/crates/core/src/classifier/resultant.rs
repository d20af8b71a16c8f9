use num_complex::Complex64;

use super::invariants::ComplexPoly;
use super::ClassifierError;

/// Sylvester resultant of two polynomials with non-vanishing leading
/// coefficients (coefficients in ascending degree order).
pub fn resultant(f: &ComplexPoly, g: &ComplexPoly) -> Result<Complex64, ClassifierError> {
    let (m, n) = (f.0.len() - 1, g.0.len() - 1);
    if f.0[m].norm() == 0.0 || g.0[n].norm() == 0.0 {
        return Err(ClassifierError::DegenerateLeadingCoefficient);
    }
    let size = m + n;
    let mut a = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    // n shifted rows of f, m shifted rows of g, descending powers
    for row in 0..n {
        for (k, &c) in f.0.iter().rev().enumerate() {
            a[row][row + k] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in g.0.iter().rev().enumerate() {
            a[n + row][row + k] = c;
        }
    }
    Ok(determinant(a))
}

/// `|Res(f, g)| / (‖f‖ⁿ ‖g‖ᵐ)` with max-coefficient norms: invariant under
/// scaling either polynomial.
pub fn normalized_resultant(f: &ComplexPoly, g: &ComplexPoly) -> Result<f64, ClassifierError> {
    let r = resultant(f, g)?;
    let (m, n) = (f.0.len() - 1, g.0.len() - 1);
    Ok(r.norm() / (f.max_norm().powi(n as i32) * g.max_norm().powi(m as i32)))
}

/// LU with partial pivoting.
fn determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
        }
    }
    det
}
