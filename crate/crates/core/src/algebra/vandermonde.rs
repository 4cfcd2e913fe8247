//! Vandermonde matrices and the Cauchy-like determinant.

use itertools::Itertools;

use super::{AlgebraError, FieldElement, Matrix, PrimeField};

/// The square Vandermonde matrix with one row per evaluation point and one
/// column per power: `V[i][k] = x_i^k`.
pub fn vandermonde(field: PrimeField, points: &[FieldElement]) -> Matrix {
    let n = points.len();
    Matrix::from_fn(field, n, n, |i, k| points[i].pow(k as u64))
}

fn check_distinct(points: &[FieldElement]) -> bool {
    points.iter().map(FieldElement::value).all_unique()
}

/// Closed-form inverse coefficients `1 / prod_{m != j} (x_j - x_m)`.
///
/// With `V` the point-by-power matrix from [`vandermonde`], these are the
/// entries of the last row of `V^{-1}`, which is the last column of the
/// inverse of the power-by-point matrix `V^T`. The latter is the orientation
/// a Reed-Solomon generator uses, so this is exactly the vector that maps a
/// codeword restricted to `points` onto its leading message coefficient.
pub fn vandermonde_last_column_of_inverse(
    points: &[FieldElement],
) -> Result<Vec<FieldElement>, AlgebraError> {
    let Some(first) = points.first() else {
        return Err(AlgebraError::Dimension(
            "need at least one evaluation point".into(),
        ));
    };
    if !check_distinct(points) {
        return Err(AlgebraError::SingularMatrix);
    }
    let field = first.field();
    points
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let denom = points
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(field.one(), |acc, (_, &xm)| acc * (xj - xm));
            denom.inv()
        })
        .collect()
}

/// The `(k+1) x (k+1)` matrix with entries `1 / (zeta_j - delta_i)` in its
/// first `k` columns and ones in the last column.
pub fn cauchy_like_matrix(
    field: PrimeField,
    zetas: &[FieldElement],
    deltas: &[FieldElement],
) -> Result<Matrix, AlgebraError> {
    let k = zetas.len();
    if deltas.len() != k + 1 {
        return Err(AlgebraError::Dimension(format!(
            "expected {} deltas for {} zetas, got {}",
            k + 1,
            k,
            deltas.len()
        )));
    }
    let all: Vec<_> = zetas.iter().chain(deltas).copied().collect();
    if !check_distinct(&all) {
        return Err(AlgebraError::DegenerateInput);
    }
    Ok(Matrix::from_fn(field, k + 1, k + 1, |i, j| {
        if j == k {
            field.one()
        } else {
            (zetas[j] - deltas[i])
                .inv()
                .expect("distinct elements have nonzero difference")
        }
    }))
}

/// Determinant of [`cauchy_like_matrix`], computed directly by elimination.
/// Nonzero whenever all `2k+1` inputs are distinct.
pub fn cauchy_like_det(
    field: PrimeField,
    zetas: &[FieldElement],
    deltas: &[FieldElement],
) -> Result<FieldElement, AlgebraError> {
    cauchy_like_matrix(field, zetas, deltas)?.determinant()
}
