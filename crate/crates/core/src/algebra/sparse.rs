//! Incremental exact row reduction for sparse rational vectors.
//!
//! Used both for boundary-matrix ranks and for ranks in the face ring, where
//! vectors are indexed by chain monomials.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::Rational;

/// Sparse vector: column index to nonzero value.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Keeps a set of echelon rows keyed by their leading column and reduces new
/// rows against them.
#[derive(Default, Debug, Clone)]
pub struct RowReducer {
    pivots: BTreeMap<usize, SparseRow>,
}

impl RowReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` fully against the current pivots.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        // Eliminate every column that has a pivot, smallest first. Pivot rows
        // only touch columns >= their leading column, so a single ascending
        // sweep suffices.
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.pivots.contains_key(c));
            let Some(col) = next else { break };
            let pivot = &self.pivots[&col];
            let factor = row[&col].clone() / &pivot[&col];
            for (&c, v) in pivot {
                let entry = row.entry(c).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
            cursor = col + 1;
        }
        row
    }

    /// Eliminates only the leading entry, repeatedly, until it is zero or sits
    /// in a column without a pivot. Enough to decide rank and membership, and
    /// far cheaper than a full reduction.
    fn reduce_head(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        while let Some((&col, lead)) = row.iter().next() {
            let Some(pivot) = self.pivots.get(&col) else { break };
            let factor = lead.clone() / &pivot[&col];
            for (&c, v) in pivot {
                let entry = row.entry(c).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
        }
        row
    }

    /// Adds `row` to the span; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let reduced = self.reduce_head(row);
        match reduced.keys().next().copied() {
            Some(lead) => {
                self.pivots.insert(lead, reduced);
                true
            }
            None => false,
        }
    }

    /// `true` if `row` lies in the current span.
    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce_head(row).is_empty()
    }

    /// Leading columns of the stored echelon rows.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }
}

/// Rank of a list of sparse rows.
pub fn sparse_rank<I: IntoIterator<Item = SparseRow>>(rows: I) -> usize {
    let mut reducer = RowReducer::new();
    for row in rows {
        reducer.insert(row);
    }
    reducer.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, rat(v))).collect()
    }

    #[test]
    fn dependent_rows_do_not_add_rank() {
        let mut r = RowReducer::new();
        assert!(r.insert(row(&[(0, 1), (2, 1)])));
        assert!(r.insert(row(&[(1, 1), (2, -1)])));
        assert!(!r.insert(row(&[(0, 2), (1, 2)])));
        assert!(r.contains(row(&[(0, 1), (1, 1)])));
        assert!(!r.contains(row(&[(2, 1)])));
        assert_eq!(r.rank(), 2);
    }

    #[test]
    fn agrees_with_dense_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rows: Vec<Vec<i64>> = (0..6)
                .map(|_| {
                    (0..7)
                        .map(|_| if rng.gen_bool(0.6) { 0 } else { rng.gen_range(-2..=2) })
                        .collect()
                })
                .collect();
            let dense = Matrix::from_i64(&rows).rank();
            let sparse = sparse_rank(rows.iter().map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c, rat(v)))
                    .collect::<SparseRow>()
            }));
            assert_eq!(dense, sparse);
        }
    }
}
