use proptest::prelude::*;
use wdnoma_harness::stats::{required_snr, wilson, ErrorPoint, Flag, Z95};

proptest! {
    #[test]
    fn wilson_interval_is_valid(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let events = ((trials as f64) * frac).round() as u64;
        let (lo, hi) = wilson(events, trials, Z95);
        let p = events as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12);
        prop_assert!(p - 1e-12 <= hi && hi <= 1.0);
    }

    // the half-width scales as 1/sqrt(n): four times the trials halves it
    #[test]
    fn quadrupled_trials_halve_half_width(trials in 200u64..20_000, p in 0.05f64..0.95) {
        let half = |n: u64| {
            let (lo, hi) = wilson((n as f64 * p).round() as u64, n, Z95);
            (hi - lo) / 2.0
        };
        let ratio = half(4 * trials) / half(trials);
        prop_assert!((ratio - 0.5).abs() <= 0.1 * 0.5, "ratio {}", ratio);
        let ratio2 = half(2 * trials) / half(trials);
        prop_assert!((ratio2 - std::f64::consts::FRAC_1_SQRT_2).abs() <= 0.2 * std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn required_snr_lies_in_crossing_bracket(
        rates in proptest::collection::vec(0.0f64..1.0, 2..12),
        target in 1e-3f64..0.5,
    ) {
        let mut sorted = rates.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let trials = 10_000u64;
        let pts: Vec<ErrorPoint> = sorted
            .iter()
            .enumerate()
            .map(|(i, &r)| ErrorPoint { snr_db: 2.0 * i as f64, errors: (r * trials as f64) as u64, trials })
            .collect();
        let req = required_snr(&pts, target).unwrap();
        prop_assert!(req.low <= req.value && req.value <= req.high);
        let rate = |p: &ErrorPoint| (p.errors as f64 / trials as f64).max(0.5 / trials as f64);
        match req.flag {
            Flag::CensoredHigh => prop_assert!(pts.iter().all(|p| rate(p) > target)),
            Flag::CensoredLow => prop_assert!(rate(&pts[0]) <= target),
            Flag::Ok => {
                let i = pts.iter().position(|p| rate(p) <= target).unwrap();
                prop_assert!(pts[i - 1].snr_db <= req.value && req.value <= pts[i].snr_db);
            }
        }
    }
}
