//! Encoding and decoding matrices of the gradient code.
//!
//! Worker `j` is associated with the evaluation point `omega_j` of an
//! `(n, r+1)` Reed-Solomon code with generator `F` (row `k` holds
//! `omega_j^k`). For a query vector `a` the encoding matrix is
//! `W = (Q | a) F`, where row `i` of `Q` is chosen so that the degree-`r`
//! polynomial with coefficients `(q_i | a_i)` vanishes on the `r` workers that
//! do not hold sample `i`. Any `r+1` workers can then recover `G a` by
//! interpolating and reading off the leading coefficient.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{
    solve_linear, vandermonde_last_column_of_inverse, AlgebraError, FieldElement, Matrix,
    PrimeField, SolveKind,
};
use crate::assignment::AssignmentMatrix;
use crate::protocol::Group;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("sample {sample} is missing from {found} workers, expected exactly {expected}")]
    AssignmentMismatch {
        sample: usize,
        expected: usize,
        found: usize,
    },
    #[error("no response from worker {0}")]
    MissingResponse(usize),
    #[error("responses are not consistent with any codeword within the error budget")]
    DecodeFailure,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Code parameters shared by every encoding and decoding matrix of one simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeContext {
    field: PrimeField,
    n: usize,
    s: usize,
    u: usize,
    r: usize,
    points: Vec<FieldElement>,
    generator: Matrix,
}

/// Builds the context with evaluation points `omega_j = j` (1-based).
pub fn build_code_context(n: usize, s: usize, u: usize, q: u64) -> Result<CodeContext, CodingError> {
    CodeContext::new(n, s, u, q)
}

impl CodeContext {
    pub fn new(n: usize, s: usize, u: usize, q: u64) -> Result<Self, CodingError> {
        let field = PrimeField::new(q)?;
        if q <= n as u64 {
            return Err(CodingError::InvalidParams(format!(
                "field size {q} must exceed the worker count {n}"
            )));
        }
        let points = (1..=n as u64).map(|w| field.elem(w)).collect();
        Self::with_points(field, s, u, points)
    }

    /// Builds the context on caller-chosen evaluation points (one per worker).
    pub fn with_points(
        field: PrimeField,
        s: usize,
        u: usize,
        points: Vec<FieldElement>,
    ) -> Result<Self, CodingError> {
        let n = points.len();
        if u < 1 || u > s + 1 {
            return Err(CodingError::InvalidParams(format!(
                "u={u} must satisfy 1 <= u <= s+1 = {}",
                s + 1
            )));
        }
        if n < s + u {
            return Err(CodingError::InvalidParams(format!(
                "n={n} workers cannot support replication s+u={}",
                s + u
            )));
        }
        if points.iter().any(FieldElement::is_zero) || !points.iter().map(|x| x.value()).all_unique()
        {
            return Err(CodingError::InvalidParams(
                "evaluation points must be distinct and nonzero".into(),
            ));
        }
        let r = n - (s + u);
        let generator = Matrix::from_fn(field, r + 1, n, |k, j| points[j].pow(k as u64));
        Ok(Self {
            field,
            n,
            s,
            u,
            r,
            points,
            generator,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn workers(&self) -> usize {
        self.n
    }

    pub fn byzantine_budget(&self) -> usize {
        self.s
    }

    pub fn extra_redundancy(&self) -> usize {
        self.u
    }

    /// `r = n - (s + u)`; groups have `r + 1` members.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn replication(&self) -> usize {
        self.s + self.u
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// The `(r+1) x n` Vandermonde generator `F`.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
}

/// `W^(a)` together with the query `a` it was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingMatrix {
    pub query: Vec<FieldElement>,
    /// `p x n`; column `j` is worker `j`'s coefficient vector.
    pub w: Matrix,
}

impl EncodingMatrix {
    #[inline]
    pub fn coefficient(&self, sample: usize, worker: usize) -> FieldElement {
        self.w[(sample, worker)]
    }

    pub fn samples(&self) -> usize {
        self.w.rows()
    }
}

/// Solves `(q_i | a_i) F_{., I_i} = 0` for every sample and returns `(Q | a) F`.
pub fn build_encoding_matrix(
    ctx: &CodeContext,
    assignment: &AssignmentMatrix,
    query: &[FieldElement],
) -> Result<EncodingMatrix, CodingError> {
    let (n, r, field) = (ctx.n, ctx.r, ctx.field);
    let p = assignment.samples();
    if assignment.workers() != n {
        return Err(CodingError::InvalidParams(format!(
            "assignment has {} workers, code has {n}",
            assignment.workers()
        )));
    }
    if query.len() != p {
        return Err(CodingError::InvalidParams(format!(
            "query has length {}, expected {p}",
            query.len()
        )));
    }

    let f = &ctx.generator;
    let top_rows: Vec<usize> = (0..r).collect();
    let mut w = Matrix::zeros(field, p, n);
    for (i, &a_i) in query.iter().enumerate() {
        let missing = assignment.non_holders(i);
        if missing.len() != r {
            return Err(CodingError::AssignmentMismatch {
                sample: i + 1,
                expected: r,
                found: missing.len(),
            });
        }
        let mut coeffs = Vec::with_capacity(r + 1);
        if r > 0 && !a_i.is_zero() {
            // q^T F_top = -a_i F_last on the missing workers, transposed.
            let f_missing = f.select_columns(&missing);
            let system = f_missing.select_rows(&top_rows).transpose();
            let rhs = Matrix::from_fn(field, r, 1, |k, _| -(a_i * f_missing[(r, k)]));
            let out = solve_linear(&system, &rhs)?;
            assert_eq!(
                out.kind,
                SolveKind::Unique,
                "MDS generator gave a singular subsystem for sample {}",
                i + 1
            );
            coeffs.extend(out.solution.expect("unique solution").column(0));
        } else {
            coeffs.resize(r, field.zero());
        }
        coeffs.push(a_i);
        for j in 0..n {
            w[(i, j)] = (0..=r).fold(field.zero(), |acc, k| acc + coeffs[k] * f[(k, j)]);
        }
    }
    Ok(EncodingMatrix {
        query: query.to_vec(),
        w,
    })
}

/// The all-one encoding used for the initial responses.
pub fn build_full_encoding(
    ctx: &CodeContext,
    assignment: &AssignmentMatrix,
) -> Result<EncodingMatrix, CodingError> {
    let ones = vec![ctx.field.one(); assignment.samples()];
    build_encoding_matrix(ctx, assignment, &ones)
}

/// Encoding for a 0/1 query obtained by zeroing the rows of the all-one
/// encoding outside `mask`. Workers never re-solve the coefficient system.
///
/// Panics if `full` was not built for the all-one query.
pub fn restrict_encoding(full: &EncodingMatrix, mask: &[bool]) -> EncodingMatrix {
    let field = full.w.field();
    assert!(
        full.query.iter().all(|x| *x == field.one()),
        "restriction needs the all-one encoding"
    );
    assert_eq!(mask.len(), full.samples(), "mask length");
    let mut w = full.w.clone();
    for (i, &keep) in mask.iter().enumerate() {
        if !keep {
            for j in 0..w.cols() {
                w[(i, j)] = field.zero();
            }
        }
    }
    EncodingMatrix {
        query: mask
            .iter()
            .map(|&b| if b { field.one() } else { field.zero() })
            .collect(),
        w,
    }
}

/// 0/1 mask for the contiguous 0-based sample range `lo..=hi`.
pub fn interval_mask(p: usize, lo: usize, hi: usize) -> Vec<bool> {
    (0..p).map(|i| lo <= i && i <= hi).collect()
}

/// `b` with `F_{., group} b_group = (0, ..., 0, 1)^T`, zero outside the group.
pub fn combining_vector(ctx: &CodeContext, group: &Group) -> Vec<FieldElement> {
    assert_eq!(group.len(), ctx.r + 1, "group size must be r+1");
    let points: Vec<_> = group.members().iter().map(|&j| ctx.points[j]).collect();
    let coeffs = vandermonde_last_column_of_inverse(&points)
        .expect("group members have distinct evaluation points");
    let mut b = vec![ctx.field.zero(); ctx.n];
    for (&j, c) in group.members().iter().zip(coeffs) {
        b[j] = c;
    }
    b
}

/// Combining vectors of a round's groups, one column per group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingMatrix {
    pub groups: Vec<Group>,
    /// `n x m`.
    pub b: Matrix,
}

impl DecodingMatrix {
    pub fn column(&self, k: usize) -> Vec<FieldElement> {
        self.b.column(k)
    }
}

pub fn build_decoding_matrix(ctx: &CodeContext, groups: &[Group]) -> DecodingMatrix {
    let mut b = Matrix::zeros(ctx.field, ctx.n, groups.len());
    for (k, g) in groups.iter().enumerate() {
        b.set_column(k, &combining_vector(ctx, g));
    }
    DecodingMatrix {
        groups: groups.to_vec(),
        b,
    }
}

/// Honest response `G W_{., j}` of worker `j`.
pub fn worker_response(
    gradients: &Matrix,
    encoding: &EncodingMatrix,
    worker: usize,
) -> Vec<FieldElement> {
    let field = gradients.field();
    (0..gradients.rows())
        .map(|c| {
            (0..encoding.samples()).fold(field.zero(), |acc, i| {
                acc + gradients[(c, i)] * encoding.coefficient(i, worker)
            })
        })
        .collect()
}

/// Received responses for one query, one column per worker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseMatrix {
    /// `d x n`.
    pub z: Matrix,
    pub query: Vec<FieldElement>,
    pub present: Vec<bool>,
}

impl ResponseMatrix {
    /// Error-free responses `G W`.
    pub fn honest(gradients: &Matrix, encoding: &EncodingMatrix) -> Self {
        let z = gradients
            .mul(&encoding.w)
            .expect("gradient and encoding dimensions agree");
        let n = z.cols();
        Self {
            z,
            query: encoding.query.clone(),
            present: vec![true; n],
        }
    }

    /// Adds an error matrix `E` (`d x n`).
    pub fn with_errors(mut self, errors: &Matrix) -> Self {
        assert_eq!((errors.rows(), errors.cols()), (self.z.rows(), self.z.cols()));
        for c in 0..self.z.rows() {
            for j in 0..self.z.cols() {
                let e = errors[(c, j)];
                self.z[(c, j)] += e;
            }
        }
        self
    }

    pub fn worker(&self, j: usize) -> Vec<FieldElement> {
        self.z.column(j)
    }
}

/// `Z b`: the value of `G a` claimed by the group with combining vector `b`.
pub fn group_response(responses: &ResponseMatrix, b: &[FieldElement]) -> Vec<FieldElement> {
    debug_assert!(b
        .iter()
        .zip(&responses.present)
        .all(|(x, &here)| here || x.is_zero()));
    responses
        .z
        .mul_vec(b)
        .expect("combining vector has one entry per worker")
}

/// Errors-and-erasures decoding of the full gradient from the all-one responses.
///
/// Identified workers are erased. Among the rest, every support `T` of at
/// most `u - 1` suspected errors is tried in order of increasing size; the
/// first `T` for which the remaining responses form a codeword of the
/// punctured code yields the gradient. When no more than
/// `s - |identified|` (at most `u - 1`) responses are wrong, the punctured
/// code has enough distance that any consistent completion is the true one.
pub fn ecc_decode(
    ctx: &CodeContext,
    responses: &ResponseMatrix,
    identified: &BTreeSet<usize>,
) -> Result<Vec<FieldElement>, CodingError> {
    let survivors: Vec<usize> = (0..ctx.n).filter(|j| !identified.contains(j)).collect();
    if let Some(&j) = survivors.iter().find(|&&j| !responses.present[j]) {
        return Err(CodingError::MissingResponse(j + 1));
    }
    let k = ctx.r + 1;
    if survivors.len() < k {
        return Err(CodingError::DecodeFailure);
    }
    let max_errors = (ctx.u - 1).min(survivors.len() - k);
    for t in 0..=max_errors {
        for suspects in survivors.iter().copied().combinations(t) {
            let kept: Vec<usize> = survivors
                .iter()
                .copied()
                .filter(|j| !suspects.contains(j))
                .collect();
            if let Some(g) = decode_if_codeword(ctx, responses, &kept)? {
                return Ok(g);
            }
        }
    }
    Err(CodingError::DecodeFailure)
}

/// Interpolates on the first `r+1` of `kept` and checks the rest agree.
fn decode_if_codeword(
    ctx: &CodeContext,
    responses: &ResponseMatrix,
    kept: &[usize],
) -> Result<Option<Vec<FieldElement>>, CodingError> {
    let k = ctx.r + 1;
    let basis = &kept[..k];
    let f_basis_inv = ctx.generator.select_columns(basis).inverse()?;
    let message = responses.z.select_columns(basis).mul(&f_basis_inv)?;
    let predicted = message.mul(&ctx.generator.select_columns(&kept[k..]))?;
    if predicted != responses.z.select_columns(&kept[k..]) {
        return Ok(None);
    }
    Ok(Some(message.column(k - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sum_in;
    use crate::assignment::{make_cyclic, make_random_regular};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig1_ctx() -> CodeContext {
        build_code_context(3, 1, 1, 7).unwrap()
    }

    // W_{i,j} = a_i * prod_{l not holding i} (omega_j - omega_l): the unique
    // monic-times-a_i polynomial of degree r vanishing on the non-holders.
    fn closed_form_encoding(
        ctx: &CodeContext,
        a: &AssignmentMatrix,
        query: &[FieldElement],
    ) -> Matrix {
        let f = ctx.field();
        Matrix::from_fn(f, a.samples(), ctx.workers(), |i, j| {
            a.non_holders(i)
                .iter()
                .fold(query[i], |acc, &l| acc * (ctx.points()[j] - ctx.points()[l]))
        })
    }

    // b by Gaussian elimination on F_{., U} b = e_last.
    fn solved_combining_vector(ctx: &CodeContext, group: &Group) -> Vec<FieldElement> {
        let f = ctx.field();
        let fu = ctx.generator().select_columns(group.members());
        let mut e = Matrix::zeros(f, ctx.r() + 1, 1);
        e[(ctx.r(), 0)] = f.one();
        let out = solve_linear(&fu, &e).unwrap();
        assert_eq!(out.kind, SolveKind::Unique);
        let sol = out.solution.unwrap();
        let mut b = vec![f.zero(); ctx.workers()];
        for (k, &j) in group.members().iter().enumerate() {
            b[j] = sol[(k, 0)];
        }
        b
    }

    #[test]
    fn context_examples() {
        let ctx = fig1_ctx();
        assert_eq!(ctx.r(), 1);
        let f = ctx.field();
        assert_eq!(
            ctx.generator(),
            &Matrix::from_u64_rows(f, &[vec![1, 1, 1], vec![1, 2, 3]]).unwrap()
        );
        assert_eq!(build_code_context(5, 2, 2, 7).unwrap().r(), 1);
        assert!(matches!(
            build_code_context(7, 2, 1, 7),
            Err(CodingError::InvalidParams(_))
        ));
        assert!(build_code_context(3, 1, 3, 7).is_err());
        assert!(build_code_context(3, 2, 2, 7).is_err());
        assert!(build_code_context(3, 1, 1, 8).is_err());
    }

    #[test]
    fn every_square_generator_submatrix_is_invertible() {
        for (s, r) in [(1usize, 0usize), (1, 1), (2, 1), (2, 2), (3, 1)] {
            let u = s + 1;
            let n = 2 * s + 1 + r;
            if n > 8 {
                continue;
            }
            let ctx = build_code_context(n, s, u, 101).unwrap();
            for cols in (0..n).combinations(r + 1) {
                assert!(ctx.generator().select_columns(&cols).inverse().is_ok());
            }
        }
    }

    #[test]
    fn fig1_encoding_decodes_from_any_two_workers() {
        let ctx = fig1_ctx();
        let f = ctx.field();
        let a = make_cyclic(3, 3, 2).unwrap();
        let w = build_full_encoding(&ctx, &a).unwrap();
        let g = Matrix::from_u64_rows(f, &[vec![2, 3, 4]]).unwrap();
        let z = ResponseMatrix::honest(&g, &w);
        let total = sum_in(f, g.row(0).iter().copied());
        for pair in (0..3).combinations(2) {
            let group = Group::new(pair);
            let b = combining_vector(&ctx, &group);
            assert_eq!(group_response(&z, &b), vec![total]);
        }
    }

    #[test]
    fn zero_query_gives_zero_matrix() {
        let ctx = fig1_ctx();
        let a = make_cyclic(3, 3, 2).unwrap();
        let w = build_encoding_matrix(&ctx, &a, &[ctx.field().zero(); 3]).unwrap();
        assert!(w.w.is_zero());
    }

    #[test]
    fn wrong_replication_is_rejected() {
        let ctx = fig1_ctx();
        let a = make_cyclic(3, 3, 3).unwrap();
        assert_eq!(
            build_full_encoding(&ctx, &a),
            Err(CodingError::AssignmentMismatch {
                sample: 1,
                expected: 1,
                found: 0
            })
        );
    }

    #[test]
    fn encoding_matches_closed_form_zero_pattern_and_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            for s in 1..n {
                for u in 1..=(s + 1).min(n - s) {
                    let ctx = build_code_context(n, s, u, 101).unwrap();
                    let p = rng.gen_range(n..=n + 4);
                    let a = make_random_regular(n, p, s + u, rng.gen()).unwrap();
                    let query: Vec<_> = (0..p).map(|_| ctx.field().random(&mut rng)).collect();
                    let w = build_encoding_matrix(&ctx, &a, &query).unwrap();
                    assert_eq!(w.w, closed_form_encoding(&ctx, &a, &query));
                    for i in 0..p {
                        for j in 0..n {
                            if !a.holds(j, i) {
                                assert!(w.coefficient(i, j).is_zero());
                            }
                        }
                    }
                    for members in (0..n).combinations(ctx.r() + 1) {
                        let b = combining_vector(&ctx, &Group::new(members));
                        assert_eq!(w.w.mul_vec(&b).unwrap(), query);
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_edge_cases() {
        let ctx = build_code_context(5, 2, 1, 101).unwrap();
        let a = make_cyclic(5, 7, 3).unwrap();
        let full = build_full_encoding(&ctx, &a).unwrap();
        assert_eq!(restrict_encoding(&full, &[true; 7]), full);
        assert!(restrict_encoding(&full, &[false; 7]).w.is_zero());
        let half = interval_mask(7, 0, 3);
        let from_scratch = build_encoding_matrix(
            &ctx,
            &a,
            &half
                .iter()
                .map(|&b| ctx.field().elem(b as u64))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(restrict_encoding(&full, &half), from_scratch);
    }

    #[test]
    fn combining_vector_examples() {
        let ctx = fig1_ctx();
        let f = ctx.field();
        let b = combining_vector(&ctx, &Group::new(vec![0, 2]));
        assert_eq!(b, vec![f.elem(3), f.zero(), f.elem(4)]);
        let fu = ctx.generator().select_columns(&[0, 2]);
        assert_eq!(
            fu.mul_vec(&[b[0], b[2]]).unwrap(),
            vec![f.zero(), f.one()]
        );

        let degenerate = build_code_context(3, 1, 2, 7).unwrap();
        assert_eq!(degenerate.r(), 0);
        assert_eq!(
            combining_vector(&degenerate, &Group::new(vec![1])),
            vec![f.zero(), f.one(), f.zero()]
        );
    }

    #[test]
    fn closed_form_combining_vectors_match_solver() {
        for n in 1..=7 {
            for s in 0..n {
                for u in 1..=(s + 1).min(n - s) {
                    let ctx = build_code_context(n, s, u, 101).unwrap();
                    for members in (0..n).combinations(ctx.r() + 1) {
                        let g = Group::new(members);
                        assert_eq!(combining_vector(&ctx, &g), solved_combining_vector(&ctx, &g));
                    }
                }
            }
        }
    }

    #[test]
    fn decoding_matrix_reproduces_query() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctx = fig1_ctx();
        let a = make_cyclic(3, 3, 2).unwrap();
        let groups = vec![Group::new(vec![0, 2]), Group::new(vec![1, 2])];
        let dec = build_decoding_matrix(&ctx, &groups);
        assert_eq!((dec.b.rows(), dec.b.cols()), (3, 2));
        let w = build_full_encoding(&ctx, &a).unwrap();
        let wb = w.w.mul(&dec.b).unwrap();
        assert!(wb.entries().iter().all(|x| *x == ctx.field().one()));

        for n in 3..=7 {
            let (s, u) = (1, 1);
            let ctx = build_code_context(n, s, u, 101).unwrap();
            let a = make_random_regular(n, n + 2, s + u, rng.gen()).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
            let groups: Vec<Group> = (0..3)
                .map(|k| Group::new(order.iter().cycle().skip(k).take(ctx.r() + 1).copied().collect()))
                .collect();
            let dec = build_decoding_matrix(&ctx, &groups);
            for _ in 0..10 {
                let query: Vec<_> = (0..n + 2).map(|_| ctx.field().random(&mut rng)).collect();
                let w = build_encoding_matrix(&ctx, &a, &query).unwrap();
                let wb = w.w.mul(&dec.b).unwrap();
                for k in 0..groups.len() {
                    assert_eq!(wb.column(k), query);
                }
            }
        }
    }

    #[test]
    fn worker_responses_match_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ctx = build_code_context(6, 2, 1, 101).unwrap();
        let f = ctx.field();
        let a = make_random_regular(6, 9, 3, 3).unwrap();
        let w = build_full_encoding(&ctx, &a).unwrap();
        let g = Matrix::from_fn(f, 3, 9, |_, _| f.random(&mut rng));
        let z = ResponseMatrix::honest(&g, &w);
        for j in 0..6 {
            assert_eq!(worker_response(&g, &w, j), z.worker(j));
        }
        let zero = restrict_encoding(&w, &[false; 9]);
        assert!(worker_response(&g, &zero, 0).iter().all(FieldElement::is_zero));
    }

    #[test]
    fn ecc_decodes_after_identification() {
        // u = 1: erase all malicious workers, no residual errors.
        let ctx = build_code_context(5, 2, 1, 101).unwrap();
        let f = ctx.field();
        let a = make_cyclic(5, 5, 3).unwrap();
        let w = build_full_encoding(&ctx, &a).unwrap();
        let g = Matrix::from_u64_rows(f, &[vec![1, 2, 3, 4, 5]]).unwrap();
        let mut e = Matrix::zeros(f, 1, 5);
        e[(0, 1)] = f.elem(9);
        e[(0, 3)] = f.elem(4);
        let z = ResponseMatrix::honest(&g, &w).with_errors(&e);
        let known: BTreeSet<usize> = [1, 3].into();
        assert_eq!(ecc_decode(&ctx, &z, &known).unwrap(), vec![f.elem(15)]);
        assert_eq!(
            ecc_decode(&ctx, &z, &BTreeSet::new()),
            Err(CodingError::DecodeFailure)
        );
    }

    #[test]
    fn ecc_reports_missing_responses() {
        let ctx = fig1_ctx();
        let a = make_cyclic(3, 3, 2).unwrap();
        let w = build_full_encoding(&ctx, &a).unwrap();
        let g = Matrix::from_u64_rows(ctx.field(), &[vec![1, 1, 1]]).unwrap();
        let mut z = ResponseMatrix::honest(&g, &w);
        z.present[0] = false;
        assert_eq!(
            ecc_decode(&ctx, &z, &BTreeSet::new()),
            Err(CodingError::MissingResponse(1))
        );
    }
}
