use eyescore_core::pupil::{default_neighborhood, radial_profile};
use eyescore_core::synth::{synth_eye, Highlight, Preset, SynthEyeSpec};
use eyescore_core::{detect_pupil, Channel, Frame, IrisEstimate, PupilEstimate, Side};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iris_at(ex: u32, ey: u32, er: u32) -> IrisEstimate {
    IrisEstimate { ex, ey, er, l: 1.0, s: 0.0, h: 0.0, c: 1.0, side: Side::Left }
}

fn rounded_distance(dx: i64, dy: i64) -> i64 {
    ((dx * dx + dy * dy) as f64).sqrt().round() as i64
}

/// Mean luma of the pixels at rounded distance `k`, found by scanning a generous box.
fn ring_mean(f: &Frame, cx: i64, cy: i64, k: i64) -> f64 {
    let (mut s, mut n) = (0.0, 0.0);
    for y in cy - k - 2..=cy + k + 2 {
        for x in cx - k - 2..=cx + k + 2 {
            if rounded_distance(x - cx, y - cy) == k {
                s += f.luma.get(x as u32, y as u32) as f64;
                n += 1.0;
            }
        }
    }
    s / n
}

fn brute_force(f: &Frame, iris: &IrisEstimate, nb: i64) -> Option<PupilEstimate> {
    let mut best: Option<PupilEstimate> = None;
    for dy in -nb..=nb {
        for dx in -nb..=nb {
            let (px, py) = (iris.ex as i64 + dx, iris.ey as i64 + dy);
            let off = ((dx * dx + dy * dy) as f64).sqrt();
            let mut k = 1;
            while k as f64 + 2.5 + off <= iris.er as f64 {
                let g = ring_mean(f, px, py, k + 1) - ring_mean(f, px, py, k);
                let better = match &best {
                    None => true,
                    Some(b) => g > b.g || (g == b.g && (k as u32, py as u32, px as u32) < (b.pr, b.py, b.px)),
                };
                if better {
                    best = Some(PupilEstimate { px: px as u32, py: py as u32, pr: k as u32, g, side: iris.side });
                }
                k += 1;
            }
        }
    }
    best.filter(|b| b.g > 0.0)
}

fn random_eye(seed: u64, preset: Preset) -> (Frame, IrisEstimate, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = SynthEyeSpec::random(&mut rng, 96, 64, (5, 14), preset);
    let (img, t) = synth_eye(&spec, seed).unwrap();
    (img.frame, iris_at(t.iris_x, t.iris_y, t.iris_r), t.pupil_r)
}

#[test]
fn detector_equals_brute_force_on_100_synthetic_eyes() {
    for seed in 0..100 {
        let preset = if seed % 2 == 0 { Preset::Clean } else { Preset::Noisy };
        let (f, iris, _) = random_eye(seed, preset);
        let nb = default_neighborhood(iris.er);
        let got = detect_pupil(&f, &iris, nb).ok();
        let want = brute_force(&f, &iris, nb as i64);
        match (got, want) {
            (Some(a), Some(b)) => {
                assert_eq!((a.px, a.py, a.pr), (b.px, b.py, b.pr), "seed {seed}");
                assert!((a.g - b.g).abs() < 1e-9);
            }
            (a, b) => assert_eq!(a.is_some(), b.is_some(), "seed {seed}"),
        }
    }
}

#[test]
fn documented_pupil_with_and_without_highlight() {
    let mut spec = SynthEyeSpec {
        width: 80,
        height: 40,
        skin: eyescore_core::synth::Tone { luma: 150, satv: 150 },
        sclera: eyescore_core::synth::Tone { luma: 230, satv: 128 },
        sclera_axes: (19.0, 9.0),
        iris_center: (40, 20),
        iris_radius: 9,
        iris: eyescore_core::synth::Tone { luma: 60, satv: 140 },
        pupil_radius: 4,
        pupil_luma: 15,
        highlights: vec![],
        preset: Preset::Clean,
    };
    let iris = iris_at(40, 20, 9);
    let (img, _) = synth_eye(&spec, 0).unwrap();
    let p = detect_pupil(&img.frame, &iris, default_neighborhood(9)).unwrap();
    assert!(p.px.abs_diff(40) <= 1 && p.py.abs_diff(20) <= 1);
    assert_eq!(p.pr, 4);
    spec.highlights.push(Highlight { x: 41, y: 19, radius: 0, intensity: 255 });
    let (img, _) = synth_eye(&spec, 0).unwrap();
    assert_eq!(img.frame.luma.get(41, 19), 255);
    let p = detect_pupil(&img.frame, &iris, default_neighborhood(9)).unwrap();
    assert_eq!(p.pr, 4);
}

#[test]
fn estimates_stay_strictly_inside_the_iris() {
    for seed in 100..300 {
        let (f, iris, _) = random_eye(seed, Preset::Noisy);
        if let Ok(p) = detect_pupil(&f, &iris, default_neighborhood(iris.er)) {
            assert!(p.pr >= 1 && p.pr < iris.er - 1);
            assert!(p.g > 0.0);
            assert!(p.px.abs_diff(iris.ex) <= default_neighborhood(iris.er));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_is_complete_and_matches_per_pixel_binning(seed in any::<u64>(), k_max in 0u32..14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Frame::from_gray(Channel::from_fn(40, 40, |_, _| rng.random()));
        let p = radial_profile(&f, 20, 20, k_max).unwrap();
        let mut disk = 0u32;
        let mut sums = vec![0u64; k_max as usize + 1];
        for y in 0..40i64 {
            for x in 0..40i64 {
                let k = rounded_distance(x - 20, y - 20);
                if k <= k_max as i64 {
                    disk += 1;
                    sums[k as usize] += f.luma.get(x as u32, y as u32) as u64;
                }
            }
        }
        prop_assert_eq!(p.ring_count.iter().sum::<u32>(), disk);
        prop_assert_eq!(p.ring_count[0], 1);
        prop_assert_eq!(p.ring_sum, sums);
    }

    #[test]
    fn increasing_affine_maps_keep_the_argmax(seed in 0u64..10_000, a in 1u8..=2, b in 0u8..=40) {
        let (f, iris, _) = random_eye(seed, Preset::Noisy);
        let base = Frame::from_gray(Channel::from_fn(f.width(), f.height(), |x, y| f.luma.get(x, y) / 3));
        let mapped = Frame::from_gray(Channel::from_fn(f.width(), f.height(), |x, y| a * base.luma.get(x, y) + b));
        let nb = default_neighborhood(iris.er);
        let p = detect_pupil(&base, &iris, nb);
        let q = detect_pupil(&mapped, &iris, nb);
        match (p, q) {
            (Ok(p), Ok(q)) => {
                prop_assert_eq!((p.px, p.py, p.pr), (q.px, q.py, q.pr));
                prop_assert!((q.g - a as f64 * p.g).abs() < 1e-9);
            }
            (p, q) => prop_assert_eq!(p.is_ok(), q.is_ok()),
        }
    }
}
