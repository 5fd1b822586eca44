use super::LdpcCode;

/// Clip applied to channel LLRs and to posterior sums.
pub const LLR_CLIP: f64 = 30.0;
/// Check-node output scaling of the normalized min-sum rule.
pub const MIN_SUM_SCALE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct SoftDecoderOutput {
    /// A-posteriori LLRs per codeword bit; positive favours 0.
    pub app_llrs: Vec<f64>,
    pub hard_bits: Vec<u8>,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Flooding normalized min-sum decoding with early exit once every parity
/// check is satisfied.
pub fn ldpc_decode(channel_llrs: &[f64], code: &LdpcCode, max_iter: usize) -> SoftDecoderOutput {
    let n = code.n();
    assert_eq!(channel_llrs.len(), n, "LLR count must equal the code length");
    let ch: Vec<f64> = channel_llrs
        .iter()
        .map(|&l| if l.is_nan() { 0.0 } else { l.clamp(-LLR_CLIP, LLR_CLIP) })
        .collect();

    // edges numbered in check order
    let checks = code.check_adjacency();
    let mut edge_var = Vec::with_capacity(code.edge_count());
    let mut check_start = Vec::with_capacity(checks.len() + 1);
    for cols in checks {
        check_start.push(edge_var.len());
        edge_var.extend_from_slice(cols);
    }
    check_start.push(edge_var.len());
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &v) in edge_var.iter().enumerate() {
        var_edges[v].push(e);
    }

    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| ch[v]).collect();
    let mut c2v = vec![0.0; edge_var.len()];
    let mut app = ch.clone();
    let mut hard: Vec<u8> = app.iter().map(|&l| (l < 0.0) as u8).collect();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        for c in 0..checks.len() {
            let (lo, hi) = (check_start[c], check_start[c + 1]);
            let mut min1 = f64::INFINITY;
            let mut min2 = f64::INFINITY;
            let mut arg = lo;
            let mut sign = 1.0;
            for (e, &m) in v2c.iter().enumerate().take(hi).skip(lo) {
                let a = m.abs();
                if m < 0.0 {
                    sign = -sign;
                }
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = e;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for e in lo..hi {
                let mag = if e == arg { min2 } else { min1 };
                let s = if v2c[e] < 0.0 { -sign } else { sign };
                c2v[e] = MIN_SUM_SCALE * s * mag;
            }
        }
        for v in 0..n {
            let total = ch[v] + var_edges[v].iter().map(|&e| c2v[e]).sum::<f64>();
            app[v] = total;
            hard[v] = (total < 0.0) as u8;
            for &e in &var_edges[v] {
                v2c[e] = (total - c2v[e]).clamp(-LLR_CLIP, LLR_CLIP);
            }
        }
        if code.syndrome(&hard).iter().all(|&s| s == 0) {
            converged = true;
            break;
        }
    }
    SoftDecoderOutput {
        app_llrs: app,
        hard_bits: hard,
        converged,
        iterations_used: iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::ldpc::ldpc_encode;
    use crate::numerics::{qam_map, QamConstellation, SimRng};

    fn bpsk_llrs(word: &[u8], mag: f64) -> Vec<f64> {
        word.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn clean_input_converges_in_one_iteration() {
        let code = LdpcCode::standard();
        let mut rng = SimRng::new(2);
        for _ in 0..1000 {
            let info = rng.bits(128);
            let word = ldpc_encode(&info, code).unwrap();
            let out = ldpc_decode(&bpsk_llrs(&word, 30.0), code, 25);
            assert!(out.converged);
            assert_eq!(out.iterations_used, 1);
            assert_eq!(out.hard_bits, word);
            assert_eq!(code.extract_info(&out.hard_bits), info);
        }
    }

    #[test]
    fn single_flip_corrected() {
        let code = LdpcCode::standard();
        let mut rng = SimRng::new(3);
        let word = ldpc_encode(&rng.bits(128), code).unwrap();
        for pos in 0..256 {
            let mut llr = bpsk_llrs(&word, 10.0);
            llr[pos] = -llr[pos];
            let out = ldpc_decode(&llr, code, 25);
            assert!(out.converged, "position {pos}");
            assert_eq!(out.hard_bits, word, "position {pos}");
        }
    }

    #[test]
    fn hard_bits_match_app_signs() {
        let code = LdpcCode::standard();
        let mut rng = SimRng::new(4);
        let llr: Vec<f64> = (0..256).map(|_| rng.gaussian() * 2.0).collect();
        let out = ldpc_decode(&llr, code, 25);
        for (l, b) in out.app_llrs.iter().zip(&out.hard_bits) {
            assert_eq!(*b, (*l < 0.0) as u8);
        }
        if out.converged {
            assert!(code.is_codeword(&out.hard_bits));
        }
    }

    #[test]
    fn positive_scaling_keeps_decisions() {
        let code = LdpcCode::standard();
        let mut rng = SimRng::new(6);
        let word = ldpc_encode(&rng.bits(128), code).unwrap();
        let base = bpsk_llrs(&word, 1.0);
        let reference = ldpc_decode(&base, code, 25).hard_bits;
        for scale in [0.01, 0.5, 3.0, 25.0] {
            let scaled: Vec<f64> = base.iter().map(|l| l * scale).collect();
            assert_eq!(ldpc_decode(&scaled, code, 25).hard_bits, reference);
        }
    }

    #[test]
    fn qpsk_awgn_6db_block_error_rate() {
        let code = LdpcCode::standard();
        let c = QamConstellation::qpsk();
        let ebn0 = 10f64.powf(0.6);
        // Es = 1, 2 coded bits per symbol at rate 1/2 => Eb = 1
        let n0 = 1.0 / ebn0;
        let root = SimRng::new(77);
        let blocks = 10_000;
        let mut errors = 0;
        for b in 0..blocks {
            let mut rng = root.substream(b);
            let info = rng.bits(128);
            let word = ldpc_encode(&info, code).unwrap();
            let syms = qam_map(&word, &c).unwrap();
            let mut llr = Vec::with_capacity(256);
            for s in syms {
                let y = s + rng.complex_gaussian(n0);
                let k = 2.0 * std::f64::consts::SQRT_2 / n0;
                llr.push(k * y.re);
                llr.push(k * y.im);
            }
            let out = ldpc_decode(&llr, code, 25);
            if code.extract_info(&out.hard_bits) != info {
                errors += 1;
            }
        }
        let bler = errors as f64 / blocks as f64;
        assert!(bler < 1e-2, "BLER {bler}");
    }
}
