//! Regular data assignments: which worker holds which sample.
//!
//! Workers and samples are stored 0-indexed. Everything user-facing (the text
//! format, transcripts, CLI output) is 1-indexed.

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("invalid assignment parameters: {0}")]
    InvalidParams(String),
    #[error("could not generate a regular assignment for n={n}, p={p}, rho={rho}")]
    GenerationFailed { n: usize, p: usize, rho: usize },
    #[error("malformed assignment text: {0}")]
    Parse(String),
}

/// Binary `n x p` allocation matrix; `holds(j, i)` iff worker `j` was given sample `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AssignmentMatrix {
    n: usize,
    p: usize,
    bits: Vec<bool>,
}

/// The assignment families the generators produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentKind {
    Cyclic,
    Fractional,
    Random,
}

impl fmt::Display for AssignmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssignmentKind::Cyclic => "cyclic",
            AssignmentKind::Fractional => "fractional",
            AssignmentKind::Random => "random",
        })
    }
}

impl std::str::FromStr for AssignmentKind {
    type Err = AssignmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cyclic" => Ok(Self::Cyclic),
            "fractional" => Ok(Self::Fractional),
            "random" | "random-regular" | "random_regular" => Ok(Self::Random),
            other => Err(AssignmentError::InvalidParams(format!(
                "unknown assignment kind `{other}`"
            ))),
        }
    }
}

impl AssignmentKind {
    pub fn generate(
        self,
        n: usize,
        p: usize,
        rho: usize,
        seed: u64,
    ) -> Result<AssignmentMatrix, AssignmentError> {
        match self {
            Self::Cyclic => make_cyclic(n, p, rho),
            Self::Fractional => make_fractional(n, p, rho),
            Self::Random => make_random_regular(n, p, rho, seed),
        }
    }
}

impl AssignmentMatrix {
    pub fn from_fn(n: usize, p: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(n * p);
        for j in 0..n {
            for i in 0..p {
                bits.push(f(j, i));
            }
        }
        Self { n, p, bits }
    }

    pub fn workers(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn holds(&self, worker: usize, sample: usize) -> bool {
        self.bits[worker * self.p + sample]
    }

    fn set(&mut self, worker: usize, sample: usize, value: bool) {
        self.bits[worker * self.p + sample] = value;
    }

    pub fn column_sum(&self, sample: usize) -> usize {
        (0..self.n).filter(|&j| self.holds(j, sample)).count()
    }

    pub fn row_sum(&self, worker: usize) -> usize {
        (0..self.p).filter(|&i| self.holds(worker, i)).count()
    }

    /// Workers holding `sample`, ascending.
    pub fn holders(&self, sample: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.holds(j, sample)).collect()
    }

    /// Workers *not* holding `sample`, ascending. The coding layer needs
    /// exactly `n - rho` of these per sample.
    pub fn non_holders(&self, sample: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| !self.holds(j, sample)).collect()
    }

    /// Common column sum, if every column has the same one.
    pub fn replication(&self) -> Option<usize> {
        let first = self.column_sum(0);
        (1..self.p)
            .all(|i| self.column_sum(i) == first)
            .then_some(first)
    }

    /// Serializes as `n p rho` followed by `n` lines of `p` characters `0`/`1`.
    pub fn to_text(&self) -> Result<String, AssignmentError> {
        let rho = self
            .replication()
            .filter(|&rho| validate_regular(self, rho))
            .ok_or_else(|| {
                AssignmentError::InvalidParams("only regular assignments can be serialized".into())
            })?;
        let mut out = format!("{} {} {}\n", self.n, self.p, rho);
        for line in self.row_strings() {
            out.push_str(&line);
            out.push('\n');
        }
        Ok(out)
    }

    /// One `0`/`1` string per worker.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|j| {
                (0..self.p)
                    .map(|i| if self.holds(j, i) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    pub fn from_row_strings(rows: &[String]) -> Result<Self, AssignmentError> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.len());
        let mut bits = Vec::with_capacity(n * p);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(AssignmentError::Parse(format!(
                    "row {} has {} entries, expected {p}",
                    j + 1,
                    row.len()
                )));
            }
            for c in row.chars() {
                bits.push(match c {
                    '0' => false,
                    '1' => true,
                    other => {
                        return Err(AssignmentError::Parse(format!(
                            "unexpected character `{other}` in row {}",
                            j + 1
                        )))
                    }
                });
            }
        }
        if n == 0 || p == 0 {
            return Err(AssignmentError::Parse("empty assignment".into()));
        }
        Ok(Self { n, p, bits })
    }

    /// Parses the text format and checks the header against the matrix.
    pub fn from_text(text: &str) -> Result<(Self, usize), AssignmentError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| AssignmentError::Parse("missing header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| AssignmentError::Parse(format!("bad header token `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        let [n, p, rho] = nums[..] else {
            return Err(AssignmentError::Parse(
                "header must be `n p rho`".into(),
            ));
        };
        let rows: Vec<String> = lines.map(str::to_string).collect();
        if rows.len() != n {
            return Err(AssignmentError::Parse(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        let a = Self::from_row_strings(&rows)?;
        if a.p != p {
            return Err(AssignmentError::Parse(format!(
                "expected {p} columns, found {}",
                a.p
            )));
        }
        if !validate_regular(&a, rho) {
            return Err(AssignmentError::Parse(format!(
                "matrix is not regular with replication {rho}"
            )));
        }
        Ok((a, rho))
    }
}

impl fmt::Debug for AssignmentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AssignmentMatrix {}x{}", self.n, self.p)?;
        for line in self.row_strings() {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Membership in the regular family: every column sums to `rho` and every
/// worker holds at least one sample.
pub fn validate_regular(a: &AssignmentMatrix, rho: usize) -> bool {
    a.n > 0
        && a.p > 0
        && (0..a.p).all(|i| a.column_sum(i) == rho)
        && (0..a.n).all(|j| a.row_sum(j) >= 1)
}

fn check_basic(n: usize, p: usize, rho: usize) -> Result<(), AssignmentError> {
    if n == 0 || p == 0 || rho == 0 {
        return Err(AssignmentError::InvalidParams(format!(
            "n={n}, p={p}, rho={rho} must all be positive"
        )));
    }
    if rho > n {
        return Err(AssignmentError::InvalidParams(format!(
            "replication {rho} exceeds worker count {n}"
        )));
    }
    Ok(())
}

fn finish(a: AssignmentMatrix, rho: usize) -> Result<AssignmentMatrix, AssignmentError> {
    if validate_regular(&a, rho) {
        Ok(a)
    } else {
        Err(AssignmentError::InvalidParams(format!(
            "layout leaves a worker without samples (n={}, p={}, rho={rho})",
            a.n, a.p
        )))
    }
}

/// Cyclic repetition: sample `i` goes to workers `i, i-1, ..., i-rho+1 (mod n)`,
/// so that with `n = p` worker `j` holds samples `j, ..., j+rho-1`.
pub fn make_cyclic(n: usize, p: usize, rho: usize) -> Result<AssignmentMatrix, AssignmentError> {
    check_basic(n, p, rho)?;
    let mut a = AssignmentMatrix::from_fn(n, p, |_, _| false);
    for i in 0..p {
        for k in 0..rho {
            let j = (i % n + n - k) % n;
            a.set(j, i, true);
        }
    }
    finish(a, rho)
}

/// Fractional repetition: workers form `n / rho` groups of `rho`, and each
/// group holds one contiguous slice of the samples. When the slices cannot be
/// equal the first groups take one extra sample each.
pub fn make_fractional(
    n: usize,
    p: usize,
    rho: usize,
) -> Result<AssignmentMatrix, AssignmentError> {
    check_basic(n, p, rho)?;
    if n % rho != 0 {
        return Err(AssignmentError::InvalidParams(format!(
            "replication {rho} does not divide worker count {n}"
        )));
    }
    let groups = n / rho;
    if p < groups {
        return Err(AssignmentError::InvalidParams(format!(
            "{p} samples cannot cover {groups} worker groups"
        )));
    }
    let (base, extra) = (p / groups, p % groups);
    let mut slice_of = Vec::with_capacity(p);
    for g in 0..groups {
        let len = base + usize::from(g < extra);
        slice_of.extend(std::iter::repeat(g).take(len));
    }
    let a = AssignmentMatrix::from_fn(n, p, |j, i| j / rho == slice_of[i]);
    finish(a, rho)
}

const REPAIR_PASSES: usize = 1000;

/// Seeded random regular assignment: each sample picks `rho` distinct
/// workers uniformly, then empty workers are repaired by moving a sample over
/// from a worker holding more than one.
pub fn make_random_regular(
    n: usize,
    p: usize,
    rho: usize,
    seed: u64,
) -> Result<AssignmentMatrix, AssignmentError> {
    check_basic(n, p, rho)?;
    let failed = AssignmentError::GenerationFailed { n, p, rho };
    if p * rho < n {
        return Err(failed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = AssignmentMatrix::from_fn(n, p, |_, _| false);
    for i in 0..p {
        for j in sample(&mut rng, n, rho) {
            a.set(j, i, true);
        }
    }

    for _ in 0..REPAIR_PASSES {
        let Some(empty) = (0..n).find(|&j| a.row_sum(j) == 0) else {
            return Ok(a);
        };
        // (sample, donor) pairs that can hand a sample to `empty`.
        let moves: Vec<(usize, usize)> = (0..p)
            .flat_map(|i| a.holders(i).into_iter().map(move |j| (i, j)))
            .filter(|&(_, j)| a.row_sum(j) > 1)
            .collect();
        if moves.is_empty() {
            break;
        }
        let (i, donor) = moves[rng.gen_range(0..moves.len())];
        a.set(donor, i, false);
        a.set(empty, i, true);
    }
    if validate_regular(&a, rho) {
        Ok(a)
    } else {
        Err(failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> AssignmentMatrix {
        AssignmentMatrix::from_row_strings(&["110".into(), "011".into(), "101".into()]).unwrap()
    }

    #[test]
    fn cyclic_reproduces_three_worker_layout() {
        let a = make_cyclic(3, 3, 2).unwrap();
        // W1 <- {x1,x2}, W2 <- {x2,x3}, W3 <- {x1,x3}
        assert_eq!(a, fig1());
        assert!(validate_regular(&a, 2));
        assert!(!validate_regular(&a, 3));
    }

    #[test]
    fn cyclic_with_unit_replication_is_a_permutation() {
        let a = make_cyclic(4, 4, 1).unwrap();
        for k in 0..4 {
            assert_eq!(a.row_sum(k), 1);
            assert_eq!(a.column_sum(k), 1);
        }
    }

    #[test]
    fn cyclic_full_replication_is_all_ones() {
        let a = make_cyclic(4, 4, 4).unwrap();
        assert!((0..4).all(|j| (0..4).all(|i| a.holds(j, i))));
    }

    #[test]
    fn cyclic_rectangular() {
        let a = make_cyclic(5, 7, 3).unwrap();
        assert!((0..7).all(|i| a.column_sum(i) == 3));
        assert!((0..5).all(|j| a.row_sum(j) >= 1));
    }

    #[test]
    fn cyclic_errors() {
        assert!(matches!(
            make_cyclic(3, 3, 4),
            Err(AssignmentError::InvalidParams(_))
        ));
        // Two samples with replication 2 cannot reach five workers.
        assert!(make_cyclic(5, 2, 2).is_err());
    }

    #[test]
    fn fractional_layouts() {
        let a = make_fractional(4, 4, 2).unwrap();
        assert_eq!(
            a.row_strings(),
            vec!["1100", "1100", "0011", "0011"]
        );
        let b = make_fractional(2, 6, 2).unwrap();
        assert!((0..2).all(|j| b.row_sum(j) == 6));
        let c = make_fractional(6, 9, 3).unwrap();
        assert!((0..9).all(|i| c.column_sum(i) == 3));
        let sizes: Vec<_> = [0, 3].iter().map(|&j| c.row_sum(j)).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(c.row_sum(0), 5);
        assert!(make_fractional(5, 5, 2).is_err());
    }

    #[test]
    fn random_regular_examples() {
        let a = make_random_regular(5, 10, 3, 1).unwrap();
        assert!(validate_regular(&a, 3));
        let forced = make_random_regular(3, 1, 3, 42).unwrap();
        assert_eq!(forced.row_strings(), vec!["1", "1", "1"]);
        assert_eq!(
            make_random_regular(5, 10, 3, 7).unwrap(),
            make_random_regular(5, 10, 3, 7).unwrap()
        );
        assert_eq!(
            make_random_regular(5, 1, 2, 0),
            Err(AssignmentError::GenerationFailed { n: 5, p: 1, rho: 2 })
        );
    }

    #[test]
    fn empty_row_is_not_regular() {
        let a =
            AssignmentMatrix::from_row_strings(&["11".into(), "11".into(), "00".into()]).unwrap();
        assert!(!validate_regular(&a, 2));
    }

    #[test]
    fn text_format() {
        let a = fig1();
        let text = a.to_text().unwrap();
        assert_eq!(text, "3 3 2\n110\n011\n101\n");
        assert_eq!(AssignmentMatrix::from_text(&text).unwrap(), (a, 2));
        assert!(AssignmentMatrix::from_text("3 3 3\n110\n011\n101\n").is_err());
        assert!(AssignmentMatrix::from_text("3 3 2\n110\n011\n").is_err());
        assert!(AssignmentMatrix::from_text("3 3 2\n110\n0x1\n101\n").is_err());
    }

    proptest! {
        #[test]
        fn generators_are_regular(n in 1usize..9, p in 1usize..20, rho_off in 0usize..8, seed: u64) {
            let rho = 1 + rho_off % n;
            for kind in [AssignmentKind::Cyclic, AssignmentKind::Fractional, AssignmentKind::Random] {
                if let Ok(a) = kind.generate(n, p, rho, seed) {
                    prop_assert!(validate_regular(&a, rho));
                    let text = a.to_text().unwrap();
                    prop_assert_eq!(AssignmentMatrix::from_text(&text).unwrap(), (a, rho));
                }
            }
            if p * rho >= n {
                prop_assert!(make_random_regular(n, p, rho, seed).is_ok());
            }
        }
    }
}
