use serde::{Deserialize, Serialize};

use super::{AlgebraError, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveKind {
    Unique,
    Underdetermined,
    Inconsistent,
}

/// Result of solving `coeffs * X = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolveOutcome {
    pub kind: SolveKind,
    /// The unique solution, or one particular solution (free variables set to
    /// zero) when underdetermined. `None` when inconsistent.
    pub solution: Option<Matrix>,
    /// Whether the echelon form of `(coeffs | rhs)` has a pivot in the
    /// right-hand-side block. Holds exactly when the system is inconsistent.
    pub pivot_in_augmented_last_column: bool,
}

impl LinearSolveOutcome {
    pub fn is_consistent(&self) -> bool {
        self.kind != SolveKind::Inconsistent
    }
}

/// Gaussian elimination on the augmented matrix `(coeffs | rhs)`.
///
/// `rhs` may have several columns; the system is inconsistent as soon as one
/// of them is.
pub fn solve_linear(coeffs: &Matrix, rhs: &Matrix) -> Result<LinearSolveOutcome, AlgebraError> {
    if coeffs.rows() != rhs.rows() {
        return Err(AlgebraError::Dimension(format!(
            "coefficient matrix has {} rows but right-hand side has {}",
            coeffs.rows(),
            rhs.rows()
        )));
    }
    let unknowns = coeffs.cols();
    let mut aug = coeffs.hconcat(rhs)?;
    let pivots = aug.rref_in_place();

    if pivots.iter().any(|&c| c >= unknowns) {
        return Ok(LinearSolveOutcome {
            kind: SolveKind::Inconsistent,
            solution: None,
            pivot_in_augmented_last_column: true,
        });
    }

    let mut solution = Matrix::zeros(coeffs.field(), unknowns, rhs.cols());
    for (row, &col) in pivots.iter().enumerate() {
        for k in 0..rhs.cols() {
            solution[(col, k)] = aug[(row, unknowns + k)];
        }
    }
    let kind = if pivots.len() == unknowns {
        SolveKind::Unique
    } else {
        SolveKind::Underdetermined
    };
    Ok(LinearSolveOutcome {
        kind,
        solution: Some(solution),
        pivot_in_augmented_last_column: false,
    })
}

/// True iff the single row `target_row` is a linear combination of the rows of `mat`.
pub fn row_span_contains(mat: &Matrix, target_row: &Matrix) -> Result<bool, AlgebraError> {
    if target_row.rows() != 1 || target_row.cols() != mat.cols() {
        return Err(AlgebraError::Dimension(format!(
            "target must be 1x{}, got {}x{}",
            mat.cols(),
            target_row.rows(),
            target_row.cols()
        )));
    }
    let stacked = mat.vconcat(target_row)?;
    Ok(stacked.rank() == mat.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn col(f: PrimeField, v: &[u64]) -> Matrix {
        Matrix::from_u64_rows(f, &v.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_system() {
        let f = f7();
        let out = solve_linear(&Matrix::identity(f, 2), &col(f, &[3, 4])).unwrap();
        assert_eq!(out.kind, SolveKind::Unique);
        assert_eq!(out.solution.unwrap(), col(f, &[3, 4]));
        assert!(!out.pivot_in_augmented_last_column);
    }

    #[test]
    fn rank_deficient_incompatible_rhs() {
        let f = f7();
        let a = Matrix::from_u64_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
        let out = solve_linear(&a, &col(f, &[1, 3])).unwrap();
        assert_eq!(out.kind, SolveKind::Inconsistent);
        assert!(out.pivot_in_augmented_last_column);
        assert!(out.solution.is_none());
    }

    #[test]
    fn underdetermined_returns_particular_solution() {
        let f = f7();
        let a = Matrix::from_u64_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
        let b = col(f, &[1, 2]);
        let out = solve_linear(&a, &b).unwrap();
        assert_eq!(out.kind, SolveKind::Underdetermined);
        assert_eq!(a.mul(&out.solution.unwrap()).unwrap(), b);
    }

    #[test]
    fn dimension_mismatch() {
        let f = f7();
        assert!(matches!(
            solve_linear(&Matrix::identity(f, 2), &col(f, &[1, 2, 3])),
            Err(AlgebraError::Dimension(_))
        ));
        assert!(row_span_contains(&Matrix::identity(f, 2), &col(f, &[1, 2])).is_err());
    }

    #[test]
    fn span_membership() {
        let f = f7();
        let id = Matrix::identity(f, 2);
        let row = |v: &[u64]| Matrix::from_u64_rows(f, &[v.to_vec()]).unwrap();
        assert!(row_span_contains(&id, &row(&[5, 6])).unwrap());
        let line = row(&[1, 2]);
        assert!(row_span_contains(&line, &row(&[2, 4])).unwrap());
        assert!(!row_span_contains(&line, &row(&[1, 0])).unwrap());
    }

    #[test]
    fn pivot_flag_matches_independent_rank_test() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let rows = 1 + (rand::Rng::gen_range(&mut rng, 0..4));
            let cols = 1 + (rand::Rng::gen_range(&mut rng, 0..4));
            // Sparse-ish entries so that rank deficiency is common.
            let a = Matrix::from_fn(f, rows, cols, |_, _| {
                if rand::Rng::gen_bool(&mut rng, 0.5) {
                    f.zero()
                } else {
                    f.random(&mut rng)
                }
            });
            let b = Matrix::from_fn(f, rows, 1, |_, _| f.random(&mut rng));
            let out = solve_linear(&a, &b).unwrap();
            let rank_a = a.rank();
            let rank_ab = a.hconcat(&b).unwrap().rank();
            assert_eq!(out.kind == SolveKind::Inconsistent, rank_a < rank_ab);
            assert_eq!(
                out.pivot_in_augmented_last_column,
                out.kind == SolveKind::Inconsistent
            );
            if let Some(x) = out.solution {
                assert_eq!(a.mul(&x).unwrap(), b);
                assert_eq!(out.kind == SolveKind::Unique, rank_a == cols);
            }
        }
    }
}
