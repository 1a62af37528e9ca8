use proptest::prelude::*;

use wavefuse::features::{band_statistics, hu_moments};
use wavefuse::fusion::fuse_unclamped;
use wavefuse::imgio::{merge_channels, register_pair, split_channels};
use wavefuse::metrics::{
    entropy, full_report, mutual_information, psnr, quality_index, rmse, row_column_frequency,
    spatial_frequency,
};
use wavefuse::optimizer::TerminationReason;
use wavefuse::wavelet::{forward_transform, inverse_transform};
use wavefuse::{
    dwt_forward, fitness_mse, fuse, fuse_bands_max, fuse_bands_weighted, optimize_weights,
    udwt_forward, BandKind, FusionMethod, GaConfig, ImageBuffer, Subband, TransformKind,
    WeightPair,
};

fn image(w: std::ops::Range<usize>, h: std::ops::Range<usize>) -> impl Strategy<Value = ImageBuffer> {
    (w, h).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..=255.0, w * h)
            .prop_map(move |s| ImageBuffer::gray(w, h, s).unwrap())
    })
}

fn integer_image(w: usize, h: usize) -> impl Strategy<Value = ImageBuffer> {
    prop::collection::vec(0u8..=255, w * h).prop_map(move |s| {
        ImageBuffer::gray(w, h, s.into_iter().map(f64::from).collect()).unwrap()
    })
}

fn features() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..=10.0, 40)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Brute-force statistics: median by sorting a copy, variance two-pass.
fn stats_oracle(v: &[f64]) -> (f64, f64, f64) {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    let median = if n.is_multiple_of(2) { (s[n / 2 - 1] + s[n / 2]) / 2.0 } else { s[n / 2] };
    let mean: f64 = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    (median, var.sqrt(), var)
}

/// Hu invariants from raw moments, following the textbook expansion of the
/// central moments in terms of raw ones.
fn hu_oracle(w: usize, h: usize, c: &[f64]) -> [f64; 7] {
    let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw = |p: i32, q: i32| {
        let mut m = 0.0;
        for y in 0..h {
            for x in 0..w {
                m += (x as f64).powi(p) * (y as f64).powi(q) * (c[y * w + x] - min);
            }
        }
        m
    };
    let m00 = raw(0, 0);
    if m00 <= 0.0 {
        return [0.0; 7];
    }
    let (xb, yb) = (raw(1, 0) / m00, raw(0, 1) / m00);
    let mu20 = raw(2, 0) - xb * raw(1, 0);
    let mu02 = raw(0, 2) - yb * raw(0, 1);
    let mu11 = raw(1, 1) - xb * raw(0, 1);
    let mu30 = raw(3, 0) - 3.0 * xb * raw(2, 0) + 2.0 * xb * xb * raw(1, 0);
    let mu03 = raw(0, 3) - 3.0 * yb * raw(0, 2) + 2.0 * yb * yb * raw(0, 1);
    let mu21 = raw(2, 1) - 2.0 * xb * raw(1, 1) - yb * raw(2, 0) + 2.0 * xb * xb * raw(0, 1);
    let mu12 = raw(1, 2) - 2.0 * yb * raw(1, 1) - xb * raw(0, 2) + 2.0 * yb * yb * raw(1, 0);
    let e2 = m00 * m00;
    let e3 = m00.powf(2.5);
    let (n20, n02, n11) = (mu20 / e2, mu02 / e2, mu11 / e2);
    let (n30, n03, n21, n12) = (mu30 / e3, mu03 / e3, mu21 / e3, mu12 / e3);
    [
        n20 + n02,
        (n20 - n02).powi(2) + 4.0 * n11.powi(2),
        (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2),
        (n30 + n12).powi(2) + (n21 + n03).powi(2),
        (n30 - 3.0 * n12) * (n30 + n12) * ((n30 + n12).powi(2) - 3.0 * (n21 + n03).powi(2))
            + (3.0 * n21 - n03) * (n21 + n03) * (3.0 * (n30 + n12).powi(2) - (n21 + n03).powi(2)),
        (n20 - n02) * ((n30 + n12).powi(2) - (n21 + n03).powi(2))
            + 4.0 * n11 * (n30 + n12) * (n21 + n03),
        (3.0 * n21 - n03) * (n30 + n12) * ((n30 + n12).powi(2) - 3.0 * (n21 + n03).powi(2))
            - (n30 - 3.0 * n12) * (n21 + n03) * (3.0 * (n30 + n12).powi(2) - (n21 + n03).powi(2)),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_reconstruct(x in image(4..21, 4..21)) {
        for t in [TransformKind::Decimated, TransformKind::Undecimated] {
            let back = inverse_transform(&forward_transform(&x, t).unwrap()).unwrap();
            prop_assert!(max_abs_diff(back.samples(), x.samples()) < 1e-9);
        }
    }

    #[test]
    fn transforms_are_linear(x in image(8..9, 12..13), y in image(8..9, 12..13), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let combo = ImageBuffer::unclamped(8, 12, 1,
            x.samples().iter().zip(y.samples()).map(|(p, q)| a * p + b * q).collect()).unwrap();
        for t in [TransformKind::Decimated, TransformKind::Undecimated] {
            let (dx, dy, dc) = (forward_transform(&x, t).unwrap(), forward_transform(&y, t).unwrap(), forward_transform(&combo, t).unwrap());
            for ((bx, by), bc) in dx.bands().iter().zip(dy.bands()).zip(dc.bands()) {
                for ((p, q), c) in bx.coeffs.iter().zip(&by.coeffs).zip(&bc.coeffs) {
                    prop_assert!((a * p + b * q - c).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn udwt_is_exactly_shift_covariant(x in image(4..17, 4..17), dy in 0isize..5, dx in 0isize..5) {
        let d = udwt_forward(&x).unwrap();
        let ds = udwt_forward(&x.circular_shift(dy, dx)).unwrap();
        for (b, bs) in d.bands().iter().zip(ds.bands()) {
            let img = ImageBuffer::unclamped(b.width, b.height, 1, b.coeffs.clone()).unwrap();
            let shifted = img.circular_shift(dy, dx);
            prop_assert!(max_abs_diff(shifted.samples(), &bs.coeffs) <= 1e-12);
        }
    }

    #[test]
    fn band_statistics_match_oracle(w in 1usize..9, h in 1usize..9, seed in prop::collection::vec(-50.0f64..50.0, 64)) {
        let coeffs: Vec<f64> = seed[..w * h].to_vec();
        let band = Subband::new(BandKind::LH, 2, w, h, coeffs.clone()).unwrap();
        let s = band_statistics(&band).unwrap();
        let (median, sd, var) = stats_oracle(&coeffs);
        prop_assert!((s[0] - median).abs() < 1e-9);
        prop_assert!((s[1] - sd).abs() < 1e-9);
        prop_assert!((s[2] - var).abs() < 1e-9);
        prop_assert!((s[2] - s[1] * s[1]).abs() < 1e-9);
        prop_assert!(s.iter().all(|v| v.is_finite()));
        let hu = hu_oracle(w, h, &coeffs);
        for (a, b) in s[3..].iter().zip(&hu) {
            prop_assert!(close(*a, *b, 1e-7), "{a} vs {b}");
        }
    }

    #[test]
    fn hu_transpose_symmetry(w in 2usize..8, h in 2usize..8, seed in prop::collection::vec(0.0f64..100.0, 64)) {
        let band = Subband::new(BandKind::HH, 1, w, h, seed[..w * h].to_vec()).unwrap();
        let a = hu_moments(&band);
        let b = hu_moments(&band.transposed());
        for i in 0..6 {
            prop_assert!(close(a[i], b[i], 1e-9), "hu{} {} vs {}", i + 1, a[i], b[i]);
        }
        prop_assert!(close(a[6], -b[6], 1e-9), "hu7 {} vs {}", a[6], b[6]);
    }

    #[test]
    fn features_always_finite(x in image(4..13, 4..13)) {
        for d in [dwt_forward(&x).unwrap(), udwt_forward(&x).unwrap()] {
            let f = wavefuse::extract_features(&d).unwrap();
            prop_assert_eq!(f.as_slice().len(), 40);
            prop_assert!(f.as_slice().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn optimizer_invariants(f1 in features(), f2 in features()) {
        let cfg = GaConfig::default();
        let (w, trace) = optimize_weights(&f1, &f2, &cfg).unwrap();
        prop_assert!((w.wv + w.wt - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&w.wv));
        prop_assert!(trace.generations_run <= cfg.max_generations);
        prop_assert_eq!(trace.generations_run, trace.generations.len());
        for (g, gen) in trace.generations.iter().enumerate() {
            prop_assert_eq!(gen.diff, cfg.initial_diff / 10f64.powi(g as i32));
            prop_assert_eq!(gen.trial_wv.len(), cfg.trials_per_generation);
            for (&wv, &mse) in gen.trial_wv.iter().zip(&gen.trial_mse) {
                let p = WeightPair::from_wv(wv);
                prop_assert!((p.wv + p.wt - 1.0).abs() <= 1e-12);
                prop_assert!(mse >= 0.0 && mse.is_finite());
            }
        }
        let last = trace.generations.last().unwrap();
        let mut sorted = last.trial_mse.clone();
        sorted.sort_by(f64::total_cmp);
        let converged = sorted[1] - sorted[0] < cfg.termination_epsilon;
        match trace.termination_reason {
            TerminationReason::Epsilon => prop_assert!(converged),
            TerminationReason::MaxGenerations => {
                prop_assert!(!converged);
                prop_assert_eq!(trace.generations_run, cfg.max_generations);
            }
        }
        // refinement never regresses past the first coarse grid
        let best = fitness_mse(&f1, &f2, w).unwrap();
        let first_min = trace.generations[0].trial_mse.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(best <= first_min);
        let global_min = trace.generations.iter().flat_map(|g| g.trial_mse.iter().cloned()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(best, global_min);
    }

    #[test]
    fn fitness_zero_iff_exact(f in features(), wv in 0.0f64..=1.0) {
        let w = WeightPair::from_wv(wv);
        let mse = fitness_mse(&f, &f, w).unwrap();
        prop_assert!(mse >= 0.0);
        let exact = f.iter().all(|&a| {
            let (m1, m2) = (w.wv * a, w.wt * a);
            let pick = if m1.abs() >= m2.abs() { m1 } else { m2 };
            pick == a
        });
        prop_assert_eq!(mse == 0.0, exact);
    }

    #[test]
    fn split_merge_round_trip(w in 4usize..10, h in 4usize..10, seed in prop::collection::vec(0.0f64..=255.0, 300)) {
        let img = ImageBuffer::new(w, h, 3, seed[..3 * w * h].to_vec()).unwrap();
        prop_assert_eq!(merge_channels(&split_channels(&img)).unwrap(), img);
    }

    #[test]
    fn save_load_round_trip(x in integer_image(7, 5)) {
        let dir = tempfile::tempdir().unwrap();
        for name in ["x.png", "x.pgm"] {
            let p = dir.path().join(name);
            wavefuse::save_image(&x, &p).unwrap();
            prop_assert_eq!(&wavefuse::load_image(&p).unwrap(), &x);
        }
    }

    #[test]
    fn registration_is_idempotent(a in image(4..12, 4..12), b in image(4..12, 4..12), c in 0.0f64..=255.0) {
        let (ra, rb) = register_pair(&a, &b).unwrap();
        let (ra2, rb2) = register_pair(&ra, &rb).unwrap();
        prop_assert_eq!(&ra, &ra2);
        prop_assert_eq!(&rb, &rb2);
        let flat = ImageBuffer::filled(b.width(), b.height(), 1, c).unwrap();
        let (_, rf) = register_pair(&a, &flat).unwrap();
        prop_assert!(rf.samples().iter().all(|s| (s - c).abs() <= 1e-9));
    }

    #[test]
    fn max_rule_symmetric_except_ties(x in image(8..9, 8..9), y in image(8..9, 8..9)) {
        for t in [TransformKind::Decimated, TransformKind::Undecimated] {
            let (da, db) = (forward_transform(&x, t).unwrap(), forward_transform(&y, t).unwrap());
            let ab = fuse_bands_max(&da, &db).unwrap();
            let ba = fuse_bands_max(&db, &da).unwrap();
            for (((fab, fba), a), b) in ab.bands().iter().zip(ba.bands()).zip(da.bands()).zip(db.bands()) {
                for (i, (p, q)) in fab.coeffs.iter().zip(&fba.coeffs).enumerate() {
                    if fab.kind == BandKind::LL {
                        prop_assert!((p - q).abs() < 1e-12);
                    } else if a.coeffs[i].abs() != b.coeffs[i].abs() {
                        prop_assert_eq!(p, q);
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_rule_swaps(x in image(8..9, 8..9), y in image(8..9, 8..9), wv in 0.0f64..=1.0) {
        let w = WeightPair::from_wv(wv);
        let (da, db) = (udwt_forward(&x).unwrap(), udwt_forward(&y).unwrap());
        let ab = fuse_bands_weighted(&da, &db, w).unwrap();
        let ba = fuse_bands_weighted(&db, &da, w.swapped()).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn fused_output_in_range(x in image(8..17, 8..9), y in image(8..17, 8..9)) {
        prop_assume!(x.same_shape(&y));
        for m in FusionMethod::ALL {
            let r = fuse(&x, &y, m, &GaConfig::default()).unwrap();
            prop_assert!(r.fused.is_in_range());
            prop_assert_eq!(r.fused.shape(), x.shape());
            prop_assert_eq!(r.weights.is_some(), m.rule() == wavefuse::FusionRule::GaWeighted);
        }
    }

    #[test]
    fn entropy_bounds(x in image(4..20, 4..20)) {
        let e = entropy(&x).unwrap();
        prop_assert!((0.0..=8.0).contains(&e));
    }

    #[test]
    fn metric_nonnegativity_and_rmse_zero(v in integer_image(8, 8), t in integer_image(8, 8), f in integer_image(8, 8)) {
        prop_assert!(mutual_information(&v, &t, &f).unwrap() >= 0.0);
        prop_assert!(rmse(&v, &t, &f).unwrap() >= 0.0);
        prop_assert!(spatial_frequency(&f).unwrap() >= 0.0);
        prop_assert_eq!(rmse(&v, &t, &f).unwrap() == 0.0, v == f && t == f);
        prop_assert_eq!(rmse(&f, &f, &f).unwrap(), 0.0);
    }

    #[test]
    fn sf_offset_and_gain(x in image(6..10, 6..10), c in 0.0f64..50.0, a in 0.1f64..4.0) {
        let sf = spatial_frequency(&x).unwrap();
        let offset = spatial_frequency(&x.map(|s| s + c).unwrap()).unwrap();
        let gain = spatial_frequency(&x.map(|s| a * s).unwrap()).unwrap();
        prop_assert!((offset - sf).abs() <= 1e-9 * (1.0 + sf));
        prop_assert!((gain - a * sf).abs() <= 1e-9 * (1.0 + sf));
    }

    #[test]
    fn transposition_invariance(v in image(6..7, 9..10), t in image(6..7, 9..10), f in image(6..7, 9..10)) {
        let (vt, tt, ft) = (v.transposed(), t.transposed(), f.transposed());
        // sums run in a different order after transposition
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        let (rf, cf) = row_column_frequency(&f).unwrap();
        let (rft, cft) = row_column_frequency(&ft).unwrap();
        prop_assert!(same(rf, cft));
        prop_assert!(same(cf, rft));
        prop_assert_eq!(entropy(&f).unwrap(), entropy(&ft).unwrap());
        prop_assert!(same(spatial_frequency(&f).unwrap(), spatial_frequency(&ft).unwrap()));
        prop_assert!(same(mutual_information(&v, &t, &f).unwrap(), mutual_information(&vt, &tt, &ft).unwrap()));
        prop_assert!(same(rmse(&v, &t, &f).unwrap(), rmse(&vt, &tt, &ft).unwrap()));
        prop_assert!(same(psnr(&v, &t, &f).unwrap(), psnr(&vt, &tt, &ft).unwrap()));
        match (quality_index(&v, &t, &f), quality_index(&vt, &tt, &ft)) {
            (Ok(a), Ok(b)) => prop_assert!(same(a, b)),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn qi_self_is_one(x in image(4..12, 4..12)) {
        prop_assert!((quality_index(&x, &x, &x).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn psnr_decreases_with_noise() {
    let v = wavefuse::synthetic::textured(32, 32, 5);
    let noise = |amp: f64| {
        let samples: Vec<f64> = v
            .samples()
            .iter()
            .enumerate()
            .map(|(i, s)| s + amp * if (i * 7919) % 3 == 0 { 1.0 } else { -1.0 })
            .collect();
        ImageBuffer::unclamped(32, 32, 1, samples).unwrap()
    };
    let values: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&a| psnr(&v, &v, &noise(a)).unwrap())
        .collect();
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
}

#[test]
fn report_is_reproducible_and_swap_stable() {
    let x = wavefuse::synthetic::textured(32, 32, 1);
    let y = wavefuse::synthetic::high_contrast(32, 32, 2);
    let f = fuse(&x, &y, FusionMethod::DwtGa, &GaConfig::default()).unwrap().fused;
    let r1 = full_report(&x, &y, &f).unwrap();
    let f2 = fuse(&x, &y, FusionMethod::DwtGa, &GaConfig::default()).unwrap().fused;
    let r2 = full_report(&x, &y, &f2).unwrap();
    assert_eq!(r1.to_json(), r2.to_json());
    let swapped = full_report(&y, &x, &f).unwrap();
    assert_eq!(r1.mi, swapped.mi);
    assert_eq!(r1.rmse, swapped.rmse);
    assert_eq!(r1.psnr, swapped.psnr);
}

#[test]
fn self_fusion_small_odd_images() {
    let x = wavefuse::synthetic::textured(13, 9, 3);
    for m in FusionMethod::ALL {
        let f = fuse_unclamped(&x, &x, m, &GaConfig::default()).unwrap().fused;
        assert!(max_abs_diff(f.samples(), x.samples()) < 1e-6, "{m}");
    }
}

#[test]
fn constant_pair_dwt_fuses_to_mean() {
    let a = ImageBuffer::filled(16, 16, 1, 30.0).unwrap();
    let b = ImageBuffer::filled(16, 16, 1, 90.0).unwrap();
    let f = fuse(&a, &b, FusionMethod::Dwt, &GaConfig::default()).unwrap().fused;
    assert!(f.samples().iter().all(|s| (s - 60.0).abs() < 1e-9));
}

#[test]
fn rgb_pipeline_matches_per_channel_gray() {
    let planes: Vec<ImageBuffer> = (0..3).map(|i| wavefuse::synthetic::textured(16, 16, i)).collect();
    let others: Vec<ImageBuffer> = (0..3).map(|i| wavefuse::synthetic::high_contrast(16, 16, i)).collect();
    let a = merge_channels(&planes).unwrap();
    let b = merge_channels(&others).unwrap();
    let rgb = fuse(&a, &b, FusionMethod::UdwtGa, &GaConfig::default()).unwrap();
    let weights = rgb.weights.unwrap();
    for ch in 0..3 {
        let gray = fuse(&planes[ch], &others[ch], FusionMethod::UdwtGa, &GaConfig::default()).unwrap();
        assert_eq!(rgb.fused.plane(ch), gray.fused.samples());
        assert_eq!(weights.per_channel[ch], gray.weights.unwrap().mean);
    }
}
