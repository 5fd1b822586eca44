use wdnoma::noma::exhaustive::{im_llrs_exhaustive, symbol_llrs_exhaustive};
use wdnoma::noma::{augmented_alphabet, llr_im_first, llr_ofdm_first, llr_ofdm_ofdm, NomaConfig, Scheme, User};
use wdnoma::numerics::{SimRng, C64};
use wdnoma::waveforms::ImParams;

fn random_inputs(rng: &mut SimRng, n: usize) -> (Vec<C64>, Vec<C64>) {
    let r = (0..n).map(|_| rng.complex_gaussian(2.0)).collect();
    let h = (0..n).map(|_| rng.complex_gaussian(1.0)).collect();
    (r, h)
}

fn random_powers(rng: &mut SimRng) -> (f64, f64, f64) {
    (
        0.1 + 3.0 * rng.uniform(),
        0.1 + 3.0 * rng.uniform(),
        0.05 + rng.uniform(),
    )
}

#[test]
fn ofdm_ofdm_matches_sixteen_hypotheses() {
    let mut rng = SimRng::new(101);
    for _ in 0..1000 {
        let (p1, p2, nv) = random_powers(&mut rng);
        let cfg = NomaConfig::new(Scheme::OfdmOfdm, p1, p2, nv);
        let (r, h) = random_inputs(&mut rng, 4);
        let c = cfg.im.constellation();
        for target in [User::One, User::Two] {
            let got = llr_ofdm_ofdm(&r, &h, &cfg, target).unwrap().llrs;
            let (a_t, a_i) = match target {
                User::One => (p1.sqrt(), p2.sqrt()),
                User::Two => (p2.sqrt(), p1.sqrt()),
            };
            let want: Vec<f64> = r
                .iter()
                .zip(&h)
                .flat_map(|(&y, &g)| symbol_llrs_exhaustive(y, g, nv, c, a_t, c.points(), a_i))
                .collect();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn ofdm_first_matches_twenty_hypotheses() {
    let mut rng = SimRng::new(102);
    for _ in 0..1000 {
        let (p1, p2, nv) = random_powers(&mut rng);
        let cfg = NomaConfig::new(Scheme::ImOfdm, p1, p2, nv);
        let (r, h) = random_inputs(&mut rng, 4);
        let c = cfg.im.constellation();
        let (a1, a2) = cfg.amplitudes();
        let got = llr_ofdm_first(&r, &h, &cfg).unwrap().llrs;
        let alphabet = augmented_alphabet(c);
        assert_eq!(alphabet.len(), 5);
        let want: Vec<f64> = r
            .iter()
            .zip(&h)
            .flat_map(|(&y, &g)| symbol_llrs_exhaustive(y, g, nv, c, a2, &alphabet, a1))
            .collect();
        assert_eq!(got, want);
    }
}

#[test]
fn im_first_matches_full_enumeration() {
    let mut rng = SimRng::new(103);
    let im = ImParams::new(4, 3, 1, 4).unwrap();
    for _ in 0..1000 {
        let (p1, p2, nv) = random_powers(&mut rng);
        let mut cfg = NomaConfig::new(Scheme::ImOfdm, p1, p2, nv);
        cfg.im = im.clone();
        let (r, h) = random_inputs(&mut rng, 4);
        let (a1, a2) = cfg.amplitudes();
        let got = llr_im_first(&r, &h, &cfg).unwrap().llrs;
        let want = im_llrs_exhaustive(&r, &h, nv, &im, a1, im.constellation().points(), a2);
        assert_eq!(got, want);
    }
}

#[test]
fn ofdm_first_inactive_subcarrier_tends_to_single_user() {
    let mut rng = SimRng::new(104);
    let c = wdnoma::numerics::QamConstellation::qpsk();
    let mut prev = f64::INFINITY;
    for p1 in [8.0, 32.0, 128.0, 1000.0] {
        let cfg = NomaConfig::new(Scheme::ImOfdm, p1, 1.0, 0.5);
        let h = vec![C64::new(0.8, -0.3); 64];
        // the IM user is silent on every subcarrier
        let r: Vec<C64> = (0..64)
            .map(|i| h[i] * c.point(i % 4) + rng.complex_gaussian(0.5))
            .collect();
        let single = llr_ofdm_first(&r, &h, &NomaConfig::new(Scheme::ImOfdm, 0.0, 1.0, 0.5)).unwrap();
        let got = llr_ofdm_first(&r, &h, &cfg).unwrap();
        let gap = got
            .llrs
            .iter()
            .zip(&single.llrs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= prev + 1e-12, "{p1}: {gap} > {prev}");
        prev = gap;
    }
    assert!(prev < 1e-9, "{prev}");
}
