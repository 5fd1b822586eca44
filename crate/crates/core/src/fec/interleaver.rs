use crate::error::{config_err, Result};

/// Rectangular block interleaver: written column by column into `depth` rows,
/// read row by row. Lengths that do not fill the last column are pruned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockInterleaver {
    /// `perm[j]` is the input index emitted at output position `j`.
    perm: Vec<usize>,
}

impl BlockInterleaver {
    pub fn new(len: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return config_err("interleaver depth must be at least 1");
        }
        let cols = len.div_ceil(depth);
        let mut perm = Vec::with_capacity(len);
        for r in 0..depth {
            for c in 0..cols {
                let i = c * depth + r;
                if i < len {
                    perm.push(i);
                }
            }
        }
        Ok(BlockInterleaver { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.perm.len());
        self.perm.iter().map(|&i| x[i]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.perm.len());
        let mut out = vec![T::default(); y.len()];
        for (j, &i) in self.perm.iter().enumerate() {
            out[i] = y[j];
        }
        out
    }
}
