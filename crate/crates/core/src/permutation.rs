use std::ops::Index;

use crate::error::{Error, Result};

/// A bijection on `0..len`, stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankPermutation(Vec<usize>);

impl RankPermutation {
    /// Validates that `indices` hits every value in `0..indices.len()` once.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for (pos, &v) in indices.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} at position {pos} out of range 0..{n}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} repeated at position {pos}"
                )));
            }
        }
        Ok(RankPermutation(indices))
    }

    pub fn identity(n: usize) -> Self {
        RankPermutation((0..n).collect())
    }

    /// Descending rank order of `values`: `values[p[0]] >= values[p[1]] >= ...`.
    /// Equal values keep their original index order.
    pub fn by_descending<T: PartialOrd>(values: &[T]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        // stable sort, so ties stay in index order
        idx.sort_by(|&a, &b| {
            values[b]
                .partial_cmp(&values[a])
                .expect("rank input contains no NaN")
        });
        RankPermutation(idx)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        RankPermutation(inv)
    }
}

impl Index<usize> for RankPermutation {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}
