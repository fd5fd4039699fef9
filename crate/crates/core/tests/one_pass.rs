//! The single-pass scorer against a naive oracle that walks the footprint once
//! per criterion and classifies every cell from scratch.

use eyescore_core::iris::{accumulate, accumulate_probed, region_totals, scores, scores_from_totals, scores_probed, CountingProbe, NoProbe};
use eyescore_core::{build_mask, classify_cell, CellLabel, Channel, EyeRegion, Frame, IrisDetector, ScanEngine, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_frame(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Frame {
    let luma = Channel::from_fn(w, h, |_, _| rng.random());
    let satv = Channel::from_fn(w, h, |_, _| rng.random());
    Frame::new(luma, satv, 0).unwrap()
}

struct Naive {
    l: f64,
    s: f64,
    h: f64,
}

fn naive_scores(f: &Frame, cx: u32, cy: u32, r: u32) -> Naive {
    let hw = 2 * r as i32 + 3;
    let hh = r as i32 - 1;
    let cells = || (-hh..=hh).flat_map(move |dy| (-hw..=hw).map(move |dx| (dx, dy)));
    let at = |ch: &Channel, dx: i32, dy: i32| ch.get((cx as i32 + dx) as u32, (cy as i32 + dy) as u32) as f64;

    let (mut n_iris, mut n_sclera, mut n_skin) = (0.0, 0.0, 0.0);
    for (dx, dy) in cells() {
        match classify_cell(dx, dy, r) {
            CellLabel::IrisRing(_) => n_iris += 1.0,
            CellLabel::Sclera => n_sclera += 1.0,
            CellLabel::Skin => n_skin += 1.0,
        }
    }

    let mut l = 0.0;
    for (dx, dy) in cells() {
        l += match classify_cell(dx, dy, r) {
            CellLabel::IrisRing(_) => -1.0 / n_iris,
            CellLabel::Sclera => 1.0 / n_sclera,
            CellLabel::Skin => 0.0,
        } * at(&f.luma, dx, dy);
    }
    let mut s = 0.0;
    for (dx, dy) in cells() {
        s += match classify_cell(dx, dy, r) {
            CellLabel::Sclera => -1.0 / n_sclera,
            _ => 1.0 / (n_iris + n_skin),
        } * at(&f.satv, dx, dy);
    }
    let mut h = 0.0;
    for (dx, dy) in cells() {
        if classify_cell(dx, dy, r) == CellLabel::Skin {
            continue;
        }
        let d = (at(&f.luma, dx, dy) - at(&f.luma, -dx, dy)).abs() + (at(&f.satv, dx, dy) - at(&f.satv, -dx, dy)).abs();
        h += -1.0 / (n_iris + n_sclera) * d;
    }
    Naive { l, s, h }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn single_pass_matches_naive_oracle_on_200_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for i in 0..200 {
        let r = rng.random_range(2..=12u32);
        let (hw, hh) = (2 * r + 3, r - 1);
        let w = 2 * hw + 1 + rng.random_range(0..20);
        let h = 2 * hh + 1 + rng.random_range(0..20);
        let f = random_frame(&mut rng, w, h);
        let cx = rng.random_range(hw..w - hw);
        let cy = rng.random_range(hh..h - hh);
        let m = build_mask(r).unwrap();
        let sc = scores(&accumulate(&f, cx, cy, &m).unwrap(), &m);
        let nv = naive_scores(&f, cx, cy, r);
        assert!(close(sc.l, nv.l), "triple {i}: l {} vs {}", sc.l, nv.l);
        assert!(close(sc.s, nv.s), "triple {i}: s {} vs {}", sc.s, nv.s);
        assert!(close(sc.h, nv.h), "triple {i}: h {} vs {}", sc.h, nv.h);
        assert_eq!(sc.c, sc.l + sc.s + sc.h);

        let fast = scores_from_totals(&region_totals(&f, cx, cy, &m).unwrap(), &m, &mut NoProbe);
        assert_eq!(fast, sc, "span pass differs from cell pass at triple {i}");
    }
}

#[test]
fn accumulator_fields_match_per_criterion_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let f = random_frame(&mut rng, 64, 64);
    let (cx, cy, r) = (32u32, 32u32, 8u32);
    let acc = accumulate(&f, cx, cy, &build_mask(r).unwrap()).unwrap();
    let px = |ch: &Channel, dx: i32, dy: i32| ch.get((cx as i32 + dx) as u32, (cy as i32 + dy) as u32) as u64;

    let mut ring_sum = vec![0u64; r as usize];
    let mut ring_count = vec![0u32; r as usize];
    let (mut lum_sclera, mut sat_iris, mut sat_skin, mut sat_sclera, mut sym) = (0, 0, 0, 0, 0);
    for dy in -7..=7 {
        for dx in -19..=19 {
            if let CellLabel::IrisRing(k) = classify_cell(dx, dy, r) {
                ring_sum[k as usize - 1] += px(&f.luma, dx, dy);
                ring_count[k as usize - 1] += 1;
            }
        }
    }
    for dy in -7..=7 {
        for dx in -19..=19 {
            if classify_cell(dx, dy, r) == CellLabel::Sclera {
                lum_sclera += px(&f.luma, dx, dy);
            }
        }
    }
    for dy in -7..=7 {
        for dx in -19..=19 {
            let s = px(&f.satv, dx, dy);
            match classify_cell(dx, dy, r) {
                CellLabel::IrisRing(_) => sat_iris += s,
                CellLabel::Sclera => sat_sclera += s,
                CellLabel::Skin => sat_skin += s,
            }
        }
    }
    for dy in -7..=7 {
        for dx in -19..=19 {
            if classify_cell(dx, dy, r) != CellLabel::Skin {
                sym += px(&f.luma, dx, dy).abs_diff(px(&f.luma, -dx, dy));
                sym += px(&f.satv, dx, dy).abs_diff(px(&f.satv, -dx, dy));
            }
        }
    }
    assert_eq!(acc.lum_ring_sum, ring_sum);
    assert_eq!(acc.lum_ring_count, ring_count);
    assert_eq!(acc.lum_sclera_sum, lum_sclera);
    assert_eq!(acc.sat_iris_sum, sat_iris);
    assert_eq!(acc.sat_skin_sum, sat_skin);
    assert_eq!(acc.sat_sclera_sum, sat_sclera);
    assert_eq!(acc.sym_sum, sym);
}

#[test]
fn instrumented_pass_visits_each_cell_once_with_constant_multiplications() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_frame(&mut rng, 200, 80);
    let mut mults = Vec::new();
    for r in 2..=18u32 {
        let m = build_mask(r).unwrap();
        let mut probe = CountingProbe::default();
        let acc = accumulate_probed(&f, 100, 40, &m, &mut probe).unwrap();
        assert_eq!(probe.visits, ((2 * r - 1) * (4 * r + 7)) as u64, "r={r}");
        scores_probed(&acc, &m, &mut probe);
        mults.push(probe.multiplications);
    }
    assert!(mults.iter().all(|&n| n == mults[0]), "{mults:?}");
}

#[test]
fn table_engine_equals_one_pass_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..25 {
        let (w, h) = (rng.random_range(40..90u32), rng.random_range(20..60u32));
        let f = random_frame(&mut rng, w, h);
        let r_min = rng.random_range(2..6u32);
        let r_max = r_min + rng.random_range(0..6u32);
        let rw = rng.random_range(15..=w);
        let rh = rng.random_range(15..=h);
        let roi = EyeRegion {
            x: rng.random_range(0..=w - rw),
            y: rng.random_range(0..=h - rh),
            w: rw,
            h: rh,
            side: Side::Left,
        };
        let stride = rng.random_range(1..=2u32);
        let a = IrisDetector::new(r_min, r_max).unwrap().with_stride(stride).with_engine(ScanEngine::OnePass);
        let b = a.clone().with_engine(ScanEngine::ColumnTables);
        assert_eq!(a.detect(&f, &roi), b.detect(&f, &roi));
        #[cfg(feature = "rayon")]
        {
            assert_eq!(b.detect_par(&f, &roi), b.detect(&f, &roi));
            assert_eq!(a.detect_par(&f, &roi), a.detect(&f, &roi));
        }
    }
}
