//! Small dense linear algebra for d ≤ 5 (or so) matrices.
//!
//! Matrices are stored as `Vec<Vec<f64>>` in row-major order. Nothing here is
//! meant for large systems.

/// Determinant by fraction-free (Bareiss) elimination with partial pivoting.
///
/// Returns 0 for an empty pivot column, which is exact for singular inputs
/// with repeated columns.
pub fn determinant(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    debug_assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut sign = 1.0;
    let mut prev = 1.0;
    for k in 0..n - 1 {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("nonempty range");
        if a[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0.0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Determinant of the matrix whose columns are `cols`.
pub fn determinant_of_columns(cols: &[Vec<f64>]) -> f64 {
    determinant(&transpose(cols))
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if m.is_empty() {
        return Vec::new();
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j]).collect()).collect()
}

/// Inverse by Gauss–Jordan elimination with partial pivoting. `None` when singular.
pub fn inverse(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() <= scale * 1e-15 {
            return None;
        }
        a.swap(pivot, k);
        inv.swap(pivot, k);
        let p = a[k][k];
        for j in 0..n {
            a[k][j] /= p;
            inv[k][j] /= p;
        }
        for i in 0..n {
            if i != k {
                let f = a[i][k];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[k][j];
                        inv[i][j] -= f * inv[k][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
