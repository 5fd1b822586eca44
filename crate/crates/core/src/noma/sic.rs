//! Two-stage successive interference cancellation with LDPC-aided soft
//! reconstruction.

use super::config::{NomaConfig, Reconstruction, Scheme, User};
use super::detect::{augmented_alphabet, im_llrs, symbol_llrs};
use crate::error::{config_err, Result};
use crate::fec::{ldpc_decode, ldpc_encode, sigmoid, soft_symbols_with_variance, LdpcCode};
use crate::numerics::{add_awgn, qam_map, QamConstellation, SimRng, C64};
use crate::waveforms::{im_map, ImParams};

/// Decoder iterations used by the SIC receiver.
pub const SIC_MAX_ITER: usize = 25;

/// How coded bits of one user fill one OFDM symbol: whole codewords first,
/// the remainder padded with random filler bits that carry no information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub codewords: usize,
    pub codeword_len: usize,
    pub info_len: usize,
    /// Coded bits carried per frame, codewords plus filler.
    pub frame_bits: usize,
}

impl FrameLayout {
    pub fn new(frame_bits: usize, code: &LdpcCode) -> Result<Self> {
        let codewords = frame_bits / code.n();
        if codewords == 0 {
            return config_err(format!(
                "a {frame_bits}-bit frame cannot hold a {}-bit codeword",
                code.n()
            ));
        }
        Ok(FrameLayout {
            codewords,
            codeword_len: code.n(),
            info_len: code.k(),
            frame_bits,
        })
    }

    pub fn filler_bits(&self) -> usize {
        self.frame_bits - self.codewords * self.codeword_len
    }

    pub fn info_bits(&self) -> usize {
        self.codewords * self.info_len
    }
}

/// Modulation used by a user.
#[derive(Debug, Clone, PartialEq)]
pub enum UserWaveform {
    Qam(QamConstellation),
    Im(ImParams),
}

impl UserWaveform {
    pub fn for_user(cfg: &NomaConfig, user: User) -> Self {
        match (cfg.scheme, user) {
            (Scheme::ImOfdm, User::One) => UserWaveform::Im(cfg.im.clone()),
            _ => UserWaveform::Qam(cfg.im.constellation().clone()),
        }
    }

    fn map(&self, bits: &[u8]) -> Result<Vec<C64>> {
        match self {
            UserWaveform::Qam(c) => qam_map(bits, c),
            UserWaveform::Im(im) => Ok(im_map(bits, im)?.0),
        }
    }
}

/// One user's transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct UserTx {
    pub info: Vec<u8>,
    pub coded: Vec<u8>,
    /// Unit-scale subcarrier values (zeros on inactive IM positions).
    pub symbols: Vec<C64>,
}

/// Draws information and filler bits, encodes and maps them.
pub fn encode_user(rng: &mut SimRng, code: &LdpcCode, layout: &FrameLayout, waveform: &UserWaveform) -> Result<UserTx> {
    let info = rng.bits(layout.info_bits());
    let mut coded = Vec::with_capacity(layout.frame_bits);
    for block in info.chunks_exact(layout.info_len) {
        coded.extend(ldpc_encode(block, code)?);
    }
    coded.extend(rng.bits(layout.filler_bits()));
    let symbols = waveform.map(&coded)?;
    Ok(UserTx { info, coded, symbols })
}

/// Frequency-domain superposition seen by both receivers:
/// `r_i = h_i (a1 u1 + a2 u2) + w_i` with independent noise per receiver.
pub fn superimpose(
    u1: &[C64],
    u2: &[C64],
    cfg: &NomaConfig,
    h1: &[C64],
    h2: &[C64],
    rng: &mut SimRng,
) -> Result<(Vec<C64>, Vec<C64>)> {
    cfg.validate()?;
    let n = u1.len();
    if u2.len() != n || h1.len() != n || h2.len() != n {
        return config_err("users and channels must cover the same subcarriers");
    }
    let (a1, a2) = cfg.amplitudes();
    let tx: Vec<C64> = u1.iter().zip(u2).map(|(x, y)| x * a1 + y * a2).collect();
    let mut r1: Vec<C64> = tx.iter().zip(h1).map(|(x, h)| h * x).collect();
    let mut r2: Vec<C64> = tx.iter().zip(h2).map(|(x, h)| h * x).collect();
    add_awgn(&mut r1, cfg.noise_var, rng);
    add_awgn(&mut r2, cfg.noise_var, rng);
    Ok((r1, r2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicDiagnostics {
    pub first_user: User,
    /// Per-codeword convergence flags, indexed by user.
    pub converged: [Vec<bool>; 2],
    /// Decoder iterations summed over codewords, indexed by user.
    pub iterations: [usize; 2],
}

impl SicDiagnostics {
    pub fn all_converged(&self, user: User) -> bool {
        self.converged[user.index()].iter().all(|&c| c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicOutput {
    /// Decoded information bits, indexed by user.
    pub bits: [Vec<u8>; 2],
    pub diagnostics: SicDiagnostics,
}

struct Decoded {
    info: Vec<u8>,
    app: Vec<f64>,
    converged: Vec<bool>,
    iterations: usize,
}

fn decode_frame(llrs: &[f64], code: &LdpcCode, layout: &FrameLayout) -> Decoded {
    let mut info = Vec::with_capacity(layout.info_bits());
    let mut app = Vec::with_capacity(layout.frame_bits);
    let mut converged = Vec::with_capacity(layout.codewords);
    let mut iterations = 0;
    for block in llrs.chunks_exact(layout.codeword_len).take(layout.codewords) {
        let out = ldpc_decode(block, code, SIC_MAX_ITER);
        info.extend(code.extract_info(&out.hard_bits));
        app.extend_from_slice(&out.app_llrs);
        converged.push(out.converged);
        iterations += out.iterations_used;
    }
    // filler bits have no code constraint; their posterior is the channel LLR
    app.extend_from_slice(&llrs[layout.codewords * layout.codeword_len..layout.frame_bits]);
    Decoded {
        info,
        app,
        converged,
        iterations,
    }
}

/// Posterior mean and variance of every subcarrier value of an IM user.
fn im_soft(app: &[f64], im: &ImParams) -> (Vec<C64>, Vec<f64>) {
    let n = im.subcarriers();
    let q1 = im.index_bits();
    let mut mean = vec![C64::new(0.0, 0.0); n];
    let mut second = vec![0.0; n];
    for (beta, bits) in app.chunks_exact(im.bits_per_subblock()).enumerate().take(im.groups()) {
        let p0: Vec<f64> = bits[..q1].iter().map(|&l| sigmoid(l)).collect();
        let (slot_mean, slot_var) = soft_symbols_with_variance(&bits[q1..], im.constellation());
        for (pidx, pattern) in im.patterns().iter().enumerate() {
            let prob: f64 = im
                .pattern_bits(pidx)
                .iter()
                .zip(&p0)
                .map(|(&b, &p)| if b == 0 { p } else { 1.0 - p })
                .product();
            for (j, &pos) in pattern.iter().enumerate() {
                let s = im.subcarrier(beta, pos);
                mean[s] += slot_mean[j] * prob;
                second[s] += prob * (slot_var[j] + slot_mean[j].norm_sqr());
            }
        }
    }
    let var = mean
        .iter()
        .zip(&second)
        .map(|(m, s)| (s - m.norm_sqr()).max(0.0))
        .collect();
    (mean, var)
}

fn reconstruct(
    decoded: &Decoded,
    waveform: &UserWaveform,
    mode: Reconstruction,
    truth: Option<&[C64]>,
) -> Result<(Vec<C64>, Vec<f64>)> {
    match mode {
        Reconstruction::Genie => {
            let Some(t) = truth else {
                return config_err("genie reconstruction needs the transmitted symbols");
            };
            Ok((t.to_vec(), vec![0.0; t.len()]))
        }
        Reconstruction::Hard => {
            let bits: Vec<u8> = decoded.app.iter().map(|&l| (l < 0.0) as u8).collect();
            let s = waveform.map(&bits)?;
            let n = s.len();
            Ok((s, vec![0.0; n]))
        }
        Reconstruction::Soft => Ok(match waveform {
            UserWaveform::Qam(c) => soft_symbols_with_variance(&decoded.app, c),
            UserWaveform::Im(im) => im_soft(&decoded.app, im),
        }),
    }
}

/// Detects, decodes and cancels the first user, then detects and decodes
/// the second from the residual.
///
/// `truth` holds the transmitted unit-scale symbols of (user 1, user 2) and
/// is only consulted in [`Reconstruction::Genie`] mode.
pub fn sic_receive(
    r: &[C64],
    h: &[C64],
    cfg: &NomaConfig,
    code: &LdpcCode,
    layout: &FrameLayout,
    truth: Option<[&[C64]; 2]>,
) -> Result<SicOutput> {
    cfg.validate()?;
    if r.len() != h.len() {
        return config_err("received vector and channel differ in length");
    }
    let first = cfg.first_user();
    let second = first.other();
    let (a1, a2) = cfg.amplitudes();
    let amp = |u: User| if u == User::One { a1 } else { a2 };
    let c = cfg.im.constellation();
    let noise = vec![cfg.noise_var; r.len()];
    let wf_first = UserWaveform::for_user(cfg, first);
    let wf_second = UserWaveform::for_user(cfg, second);

    let llr1 = match (&wf_first, &wf_second) {
        (UserWaveform::Im(im), _) => im_llrs(r, h, &noise, im, amp(first), c.points(), amp(second)),
        (UserWaveform::Qam(_), UserWaveform::Im(_)) => {
            symbol_llrs(r, h, &noise, c, amp(first), &augmented_alphabet(c), amp(second))
        }
        (UserWaveform::Qam(_), UserWaveform::Qam(_)) => {
            symbol_llrs(r, h, &noise, c, amp(first), c.points(), amp(second))
        }
    };
    if llr1.len() < layout.frame_bits {
        return config_err(format!(
            "{} subcarriers carry {} bits, layout needs {}",
            r.len(),
            llr1.len(),
            layout.frame_bits
        ));
    }
    let dec1 = decode_frame(&llr1, code, layout);
    let (mean, var) = reconstruct(&dec1, &wf_first, cfg.reconstruction, truth.map(|t| t[first.index()]))?;
    let af = amp(first);
    let residual: Vec<C64> = r.iter().zip(h).zip(&mean).map(|((y, g), m)| y - g * m * af).collect();
    let noise2: Vec<f64> = h
        .iter()
        .zip(&var)
        .map(|(g, v)| cfg.noise_var + g.norm_sqr() * af * af * v)
        .collect();
    let zero = [C64::new(0.0, 0.0)];
    let llr2 = match &wf_second {
        UserWaveform::Im(im) => im_llrs(&residual, h, &noise2, im, amp(second), &zero, 0.0),
        UserWaveform::Qam(c2) => symbol_llrs(&residual, h, &noise2, c2, amp(second), &zero, 0.0),
    };
    let dec2 = decode_frame(&llr2, code, layout);

    let mut bits: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
    let mut converged: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
    let mut iterations = [0; 2];
    for (u, d) in [(first, dec1), (second, dec2)] {
        bits[u.index()] = d.info;
        converged[u.index()] = d.converged;
        iterations[u.index()] = d.iterations;
    }
    for (u, conv) in converged.iter().enumerate() {
        if conv.iter().any(|&c| !c) {
            log::trace!(
                "user {} left {} codewords unconverged",
                u + 1,
                conv.iter().filter(|&&c| !c).count()
            );
        }
    }
    Ok(SicOutput {
        bits,
        diagnostics: SicDiagnostics {
            first_user: first,
            converged,
            iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noma::config::Scheme;

    fn flat(n: usize) -> Vec<C64> {
        vec![C64::new(1.0, 0.0); n]
    }

    #[test]
    fn desk_layout_packs_three_codewords() {
        let layout = FrameLayout::new(832, LdpcCode::standard()).unwrap();
        assert_eq!(layout.codewords, 3);
        assert_eq!(layout.filler_bits(), 64);
        assert_eq!(layout.info_bits(), 384);
        assert!(FrameLayout::new(100, LdpcCode::standard()).is_err());
    }

    #[test]
    fn superposition_without_second_user_or_noise() {
        let cfg = NomaConfig::new(Scheme::OfdmOfdm, 2.0, 0.0, 0.0);
        let mut rng = SimRng::new(1);
        let u1: Vec<C64> = (0..8).map(|_| rng.uniform_phase()).collect();
        let u2: Vec<C64> = (0..8).map(|_| rng.uniform_phase()).collect();
        let (r1, _) = superimpose(&u1, &u2, &cfg, &flat(8), &flat(8), &mut rng).unwrap();
        for (r, u) in r1.iter().zip(&u1) {
            assert!((r - u * 2f64.sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn noiseless_sic_decodes_both_users() {
        let code = LdpcCode::standard();
        let layout = FrameLayout::new(832, code).unwrap();
        let mut rng = SimRng::new(2);
        for (scheme, p1, p2) in [
            (Scheme::OfdmOfdm, 4.0, 1.0),
            (Scheme::OfdmOfdm, 1.0, 4.0),
            (Scheme::ImOfdm, 1.0, 1.0),
            (Scheme::ImOfdm, 1.0, 2.0),
        ] {
            let cfg = NomaConfig::new(scheme, p1, p2, 1e-9);
            let t1 = encode_user(&mut rng, code, &layout, &UserWaveform::for_user(&cfg, User::One)).unwrap();
            let t2 = encode_user(&mut rng, code, &layout, &UserWaveform::for_user(&cfg, User::Two)).unwrap();
            let h: Vec<C64> = (0..416).map(|_| rng.complex_gaussian(1.0) + 0.5).collect();
            let (r1, _) = superimpose(&t1.symbols, &t2.symbols, &cfg, &h, &h, &mut rng).unwrap();
            let out = sic_receive(&r1, &h, &cfg, code, &layout, None).unwrap();
            assert_eq!(out.bits[0], t1.info, "{scheme:?} {p1} {p2}");
            assert_eq!(out.bits[1], t2.info, "{scheme:?} {p1} {p2}");
        }
    }

    #[test]
    fn im_soft_matches_hard_when_saturated() {
        let im = ImParams::desk();
        let mut rng = SimRng::new(3);
        let bits = rng.bits(im.bits_per_symbol());
        let app: Vec<f64> = bits.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
        let (mean, var) = im_soft(&app, &im);
        let (hard, _) = im_map(&bits, &im).unwrap();
        for ((m, v), x) in mean.iter().zip(&var).zip(&hard) {
            assert!((m - x).norm() < 1e-12);
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn im_soft_uniform_posterior() {
        let im = ImParams::desk();
        let (mean, var) = im_soft(&vec![0.0; im.bits_per_symbol()], &im);
        for (m, v) in mean.iter().zip(&var) {
            assert!(m.norm() < 1e-12);
            // each position is active in 3 of 4 equiprobable patterns
            assert!((v - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn genie_requires_truth() {
        let code = LdpcCode::standard();
        let layout = FrameLayout::new(832, code).unwrap();
        let mut cfg = NomaConfig::new(Scheme::OfdmOfdm, 2.0, 1.0, 0.1);
        cfg.reconstruction = Reconstruction::Genie;
        let r = vec![C64::new(0.0, 0.0); 416];
        assert!(sic_receive(&r, &flat(416), &cfg, code, &layout, None).is_err());
    }
}
