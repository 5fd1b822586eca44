use crate::numerics::{QamConstellation, C64};

/// Posterior mean and variance of each symbol given per-bit LLRs.
///
/// Bits are treated as independent with `P(bit = 0) = sigmoid(LLR)`. The
/// LLR count must be a multiple of `log2 M`; trailing LLRs that do not fill a
/// symbol are ignored.
pub fn soft_symbols_with_variance(app_llrs: &[f64], constellation: &QamConstellation) -> (Vec<C64>, Vec<f64>) {
    let q = constellation.bits_per_symbol();
    let mut means = Vec::with_capacity(app_llrs.len() / q);
    let mut vars = Vec::with_capacity(app_llrs.len() / q);
    let mut p0 = vec![0.0; q];
    for chunk in app_llrs.chunks_exact(q) {
        for (p, &l) in p0.iter_mut().zip(chunk) {
            *p = sigmoid(l);
        }
        let mut mean = C64::new(0.0, 0.0);
        let mut second = 0.0;
        for (label, &point) in constellation.points().iter().enumerate() {
            let prob: f64 = (0..q)
                .map(|i| {
                    if QamConstellation::bit(label, i) == 0 {
                        p0[i]
                    } else {
                        1.0 - p0[i]
                    }
                })
                .product();
            mean += point * prob;
            second += prob * point.norm_sqr();
        }
        means.push(mean);
        vars.push((second - mean.norm_sqr()).max(0.0));
    }
    (means, vars)
}

/// Posterior mean `E[s]` of each symbol; see [`soft_symbols_with_variance`].
pub fn soft_symbols(app_llrs: &[f64], constellation: &QamConstellation) -> Vec<C64> {
    soft_symbols_with_variance(app_llrs, constellation).0
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{qam_map, SimRng};

    #[test]
    fn saturated_llrs_give_the_all_zero_point() {
        for m in [4, 16] {
            let c = QamConstellation::new(m).unwrap();
            let q = c.bits_per_symbol();
            let s = soft_symbols(&vec![30.0; q], &c)[0];
            assert!((s - c.point(0)).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_llrs_give_zero_mean() {
        for m in [4, 16, 64] {
            let c = QamConstellation::new(m).unwrap();
            let q = c.bits_per_symbol();
            let (mean, var) = soft_symbols_with_variance(&vec![0.0; q], &c);
            assert!(mean[0].norm() < 1e-12);
            assert!((var[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qpsk_closed_form() {
        let c = QamConstellation::qpsk();
        let mut rng = SimRng::new(8);
        for _ in 0..200 {
            let l1 = rng.gaussian() * 4.0;
            let l2 = rng.gaussian() * 4.0;
            let s = soft_symbols(&[l1, l2], &c)[0];
            let expected = C64::new((l1 / 2.0).tanh(), (l2 / 2.0).tanh()) * std::f64::consts::FRAC_1_SQRT_2;
            assert!((s - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn saturated_llrs_match_hard_mapping() {
        let c = QamConstellation::new(16).unwrap();
        let mut rng = SimRng::new(9);
        let bits = rng.bits(400);
        let llrs: Vec<f64> = bits.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
        let soft = soft_symbols(&llrs, &c);
        let hard = qam_map(&bits, &c).unwrap();
        for (a, b) in soft.iter().zip(&hard) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
