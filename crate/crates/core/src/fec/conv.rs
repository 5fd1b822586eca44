use super::interleaver::BlockInterleaver;
use crate::error::{config_err, Result};

/// Rate-1/2 feedforward convolutional code with optional block interleaving
/// of the coded stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    pub constraint_length: usize,
    /// Generator polynomials; bit `K-1` taps the current input.
    pub generators: [u32; 2],
    /// Rows of the block interleaver applied to the coded bits; `None`
    /// disables interleaving.
    pub interleaver_depth: Option<usize>,
}

impl Default for ConvCode {
    /// K = 7, generators 171/133 (octal), no interleaving.
    fn default() -> Self {
        ConvCode {
            constraint_length: 7,
            generators: [0o171, 0o133],
            interleaver_depth: None,
        }
    }
}

impl ConvCode {
    pub fn with_interleaver(mut self, depth: usize) -> Self {
        self.interleaver_depth = Some(depth);
        self
    }

    fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    /// Coded length for `info_len` information bits (tail included).
    pub fn coded_len(&self, info_len: usize) -> usize {
        2 * (info_len + self.memory())
    }

    /// Largest information length whose coded length fits in `coded_bits`.
    pub fn info_len_for(&self, coded_bits: usize) -> usize {
        (coded_bits / 2).saturating_sub(self.memory())
    }

    fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.constraint_length) {
            return config_err(format!("constraint length {} outside 2..=16", self.constraint_length));
        }
        let limit = 1u32 << self.constraint_length;
        if self.generators.iter().any(|&g| g == 0 || g >= limit) {
            return config_err("generator polynomial does not fit the constraint length");
        }
        Ok(())
    }

    fn interleaver(&self, len: usize) -> Result<Option<BlockInterleaver>> {
        self.interleaver_depth
            .map(|d| BlockInterleaver::new(len, d))
            .transpose()
    }

    fn outputs(&self, reg: u32) -> (u8, u8) {
        (
            ((reg & self.generators[0]).count_ones() & 1) as u8,
            ((reg & self.generators[1]).count_ones() & 1) as u8,
        )
    }
}

/// Encodes `bits`, appends `K-1` zero tail bits, then interleaves.
pub fn conv_encode(bits: &[u8], code: &ConvCode) -> Result<Vec<u8>> {
    code.validate()?;
    let mem = code.memory();
    let mut state = 0u32;
    let mut out = Vec::with_capacity(code.coded_len(bits.len()));
    for &b in bits.iter().chain(std::iter::repeat_n(&0u8, mem)) {
        let reg = ((b as u32 & 1) << mem) | state;
        let (o0, o1) = code.outputs(reg);
        out.push(o0);
        out.push(o1);
        state = reg >> 1;
    }
    Ok(match code.interleaver(out.len())? {
        Some(il) => il.interleave(&out),
        None => out,
    })
}

/// Soft-input Viterbi decoding of a tail-terminated block. `llrs` are in
/// transmitted (interleaved) order, positive favouring bit 0. Returns the
/// information bits without the tail.
pub fn viterbi_decode(llrs: &[f64], code: &ConvCode) -> Result<Vec<u8>> {
    code.validate()?;
    let mem = code.memory();
    if !llrs.len().is_multiple_of(2) || llrs.len() < 2 * mem {
        return config_err(format!("coded length {} is not a valid block", llrs.len()));
    }
    let llrs = match code.interleaver(llrs.len())? {
        Some(il) => il.deinterleave(llrs),
        None => llrs.to_vec(),
    };
    let states = 1usize << mem;
    let steps = llrs.len() / 2;
    // branch outputs for each (next state, predecessor choice)
    let mut branch = vec![(0u8, 0u8); states * 2];
    for ns in 0..states {
        for x in 0..2 {
            let reg = ((ns as u32) << 1) | x as u32;
            branch[ns * 2 + x] = code.outputs(reg);
        }
    }
    let mut metric = vec![f64::NEG_INFINITY; states];
    metric[0] = 0.0;
    let mut next = vec![0.0; states];
    let words = states.div_ceil(64);
    let mut decisions = vec![0u64; steps * words];
    for t in 0..steps {
        let (l0, l1) = (llrs[2 * t], llrs[2 * t + 1]);
        for ns in 0..states {
            let base = (ns & (states / 2 - 1)) << 1;
            let mut best = f64::NEG_INFINITY;
            let mut choice = 0;
            for x in 0..2 {
                let prev = base | x;
                let (o0, o1) = branch[ns * 2 + x];
                let m = metric[prev] + if o0 == 0 { l0 } else { -l0 } + if o1 == 0 { l1 } else { -l1 };
                if m > best {
                    best = m;
                    choice = x;
                }
            }
            next[ns] = best;
            if choice == 1 {
                decisions[t * words + ns / 64] |= 1 << (ns % 64);
            }
        }
        std::mem::swap(&mut metric, &mut next);
    }
    let mut bits = vec![0u8; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (state >> (mem - 1)) as u8;
        let x = ((decisions[t * words + state / 64] >> (state % 64)) & 1) as usize;
        state = ((state & (states / 2 - 1)) << 1) | x;
    }
    bits.truncate(steps - mem);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;

    fn to_llr(bits: &[u8]) -> Vec<f64> {
        bits.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
    }

    #[test]
    fn impulse_response_matches_generators() {
        let code = ConvCode::default();
        let out = conv_encode(&[1], &code).unwrap();
        let g0: Vec<u8> = (0..7).map(|i| ((0o171 >> (6 - i)) & 1) as u8).collect();
        let g1: Vec<u8> = (0..7).map(|i| ((0o133 >> (6 - i)) & 1) as u8).collect();
        for i in 0..7 {
            assert_eq!(out[2 * i], g0[i]);
            assert_eq!(out[2 * i + 1], g1[i]);
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let mut rng = SimRng::new(1);
        for code in [ConvCode::default(), ConvCode::default().with_interleaver(16)] {
            for _ in 0..1000 {
                let len = 1 + (rng.uniform() * 200.0) as usize;
                let bits = rng.bits(len);
                let coded = conv_encode(&bits, &code).unwrap();
                assert_eq!(coded.len(), code.coded_len(len));
                assert_eq!(viterbi_decode(&to_llr(&coded), &code).unwrap(), bits);
            }
        }
    }

    #[test]
    fn corrects_scattered_errors() {
        let code = ConvCode::default();
        let mut rng = SimRng::new(2);
        let bits = rng.bits(300);
        let mut llr = to_llr(&conv_encode(&bits, &code).unwrap());
        for pos in (10..llr.len()).step_by(40) {
            llr[pos] = -llr[pos];
        }
        assert_eq!(viterbi_decode(&llr, &code).unwrap(), bits);
    }

    #[test]
    fn interleaver_spreads_a_burst() {
        let code = ConvCode::default().with_interleaver(16);
        let plain = ConvCode::default();
        let mut rng = SimRng::new(3);
        let bits = rng.bits(500);
        // 8 QPSK symbols = 16 consecutive coded bits erased
        let mut llr = to_llr(&conv_encode(&bits, &code).unwrap());
        llr[400..416].iter_mut().for_each(|l| *l = 0.0);
        assert_eq!(viterbi_decode(&llr, &code).unwrap(), bits);
        // the same burst wrongly signed defeats the code without interleaving
        let mut raw = to_llr(&conv_encode(&bits, &plain).unwrap());
        raw[400..416].iter_mut().for_each(|l| *l = -*l);
        assert_ne!(viterbi_decode(&raw, &plain).unwrap(), bits);
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(viterbi_decode(&[0.0; 3], &ConvCode::default()).is_err());
        let bad = ConvCode {
            generators: [0o400, 0o133],
            ..ConvCode::default()
        };
        assert!(conv_encode(&[1, 0], &bad).is_err());
    }
}
