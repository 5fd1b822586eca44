//! Dense GF(2) matrices packed 64 columns per word.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    #[cfg(test)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let s = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// non-zero row (their count is the rank).
    #[cfg(test)]
    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_in_order(&order)
    }

    /// Reduced row echelon form with pivot columns searched in `order`; returns
    /// the pivot column of each non-zero row.
    pub fn rref_in_order(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// `self * v` over GF(2) for a packed vector `v`.
    pub fn mul_packed(&self, v: &[u64]) -> Vec<u8> {
        (0..self.rows)
            .map(|r| {
                let ones: u32 = self.row(r).iter().zip(v).map(|(a, b)| (a & b).count_ones()).sum();
                (ones & 1) as u8
            })
            .collect()
    }
}

pub(crate) fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 64] |= ((b & 1) as u64) << (i % 64);
    }
    out
}
