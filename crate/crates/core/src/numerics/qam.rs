use super::C64;
use crate::error::{config_err, Result};

/// Square Gray-labelled QAM alphabet with unit average energy.
///
/// Labels are integers whose bit `i` is the `i`-th bit of the symbol in
/// stream order. The first half of the bits drive the in-phase axis and the
/// second half the quadrature axis, each through a Gray-coded PAM ladder where
/// a zero bit selects the positive half. For QPSK this gives
/// `00 -> (+1+j)`, `01 -> (-1+j)`, `11 -> (-1-j)`, `10 -> (+1-j)` (all over
/// sqrt 2), where the label is written as a binary number.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<C64>,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
            return config_err(format!(
                "QAM order must be a square power of two (4, 16, 64, ...), got {order}"
            ));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let axis_bits = bits_per_symbol / 2;
        let levels = 1usize << axis_bits;
        let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        let axis = |bits: usize| -> f64 {
            // stream bit 0 of the axis is the most significant Gray bit
            let mut gray = 0usize;
            for i in 0..axis_bits {
                gray |= ((bits >> i) & 1) << (axis_bits - 1 - i);
            }
            let mut idx = gray;
            let mut shift = gray >> 1;
            while shift != 0 {
                idx ^= shift;
                shift >>= 1;
            }
            (levels as f64 - 1.0) - 2.0 * idx as f64
        };
        let mask = levels - 1;
        let points = (0..order)
            .map(|label| {
                let i_bits = label & mask;
                let q_bits = (label >> axis_bits) & mask;
                C64::new(axis(i_bits), axis(q_bits)) / scale
            })
            .collect();
        Ok(QamConstellation {
            order,
            bits_per_symbol,
            points,
        })
    }

    pub fn qpsk() -> Self {
        Self::new(4).expect("QPSK is a valid order")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> C64 {
        self.points[label]
    }

    pub fn label_of(bits: &[u8]) -> usize {
        bits.iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (((b & 1) as usize) << i))
    }

    pub fn bit(label: usize, i: usize) -> u8 {
        ((label >> i) & 1) as u8
    }

    /// Label of the nearest point.
    pub fn nearest(&self, y: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }
}

/// Maps a bit vector onto constellation points, `log2 M` bits per symbol.
pub fn qam_map(bits: &[u8], constellation: &QamConstellation) -> Result<Vec<C64>> {
    let q = constellation.bits_per_symbol();
    if !bits.len().is_multiple_of(q) {
        return config_err(format!(
            "bit count {} is not a multiple of {q} bits per symbol",
            bits.len()
        ));
    }
    Ok(bits
        .chunks(q)
        .map(|c| constellation.point(QamConstellation::label_of(c)))
        .collect())
}

/// Hard minimum-distance demapping.
pub fn qam_demap(symbols: &[C64], constellation: &QamConstellation) -> Vec<u8> {
    let q = constellation.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * q);
    for &y in symbols {
        let label = constellation.nearest(y);
        out.extend((0..q).map(|i| QamConstellation::bit(label, i)));
    }
    out
}
