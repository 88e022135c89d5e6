//! Partition, labeling and adjacency properties of the cell decomposition on
//! random rectilinear workspaces.

use cosafe_core::geometry::{Rect, Vec2};
use cosafe_core::{decompose, PropId, Workspace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rect(rng: &mut ChaCha8Rng, b: &Rect, max_side: f64) -> Rect {
    let w = rng.random_range(0.1..max_side.min(b.width()));
    let h = rng.random_range(0.1..max_side.min(b.height()));
    let x = rng.random_range(b.min.x..b.max.x - w);
    let y = rng.random_range(b.min.y..b.max.y - h);
    Rect::new(x, y, x + w, y + h)
}

/// Fixed bodies may overlap each other; regions avoid fixed bodies and each
/// other.
fn random_workspace(seed: u64) -> (Workspace, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = Rect::new(
        0.0,
        0.0,
        rng.random_range(2.0..12.0),
        rng.random_range(2.0..12.0),
    );
    let fixed: Vec<Rect> = (0..rng.random_range(0..10))
        .map(|_| random_rect(&mut rng, &bounds, 4.0))
        .collect();
    let mut regions: Vec<(PropId, Rect)> = Vec::new();
    for _ in 0..40 {
        if regions.len() == 4 {
            break;
        }
        let r = random_rect(&mut rng, &bounds, 2.0);
        let clear = fixed.iter().all(|f| f.overlap_area(&r) == 0.0)
            && regions.iter().all(|(_, q)| q.overlap_area(&r) == 0.0);
        if clear {
            regions.push((PropId(regions.len() as u16 + 1), r));
        }
    }
    let short = bounds.width().min(bounds.height());
    let res = rng.random_range(short / 30.0..short / 4.0);
    (
        Workspace {
            bounds,
            regions,
            fixed,
        },
        res,
    )
}

/// Area of the union of `rects` by coordinate compression over their own
/// edges.
fn union_area(rects: &[Rect]) -> f64 {
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.min.x, r.max.x]).collect();
    let mut ys: Vec<f64> = rects.iter().flat_map(|r| [r.min.y, r.max.y]).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            let c = Vec2::new(0.5 * (wx[0] + wx[1]), 0.5 * (wy[0] + wy[1]));
            if rects.iter().any(|r| r.contains_strict(c)) {
                area += (wx[1] - wx[0]) * (wy[1] - wy[0]);
            }
        }
    }
    area
}

fn shared_edge(a: &Rect, b: &Rect) -> f64 {
    let ox = a.max.x.min(b.max.x) - a.min.x.max(b.min.x);
    let oy = a.max.y.min(b.max.y) - a.min.y.max(b.min.y);
    let touch_x = (a.max.x - b.min.x).abs() < 1e-12 || (b.max.x - a.min.x).abs() < 1e-12;
    let touch_y = (a.max.y - b.min.y).abs() < 1e-12 || (b.max.y - a.min.y).abs() < 1e-12;
    if touch_x && oy > 0.0 {
        oy
    } else if touch_y && ox > 0.0 {
        ox
    } else {
        0.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cells_partition_the_free_workspace(seed in any::<u64>()) {
        let (w, res) = random_workspace(seed);
        let d = decompose(&w, res).unwrap();
        let free = w.bounds.area() - union_area(&w.fixed);
        let err = (d.total_area() - free).abs() / free;
        prop_assert!(err <= 1e-6, "relative area error {err}");

        let cells = d.cells();
        for (i, a) in cells.iter().enumerate() {
            prop_assert!(w.fixed.iter().all(|f| f.overlap_area(&a.rect) <= 1e-12));
            for b in &cells[i + 1..] {
                prop_assert!(a.rect.overlap_area(&b.rect) <= 1e-12);
            }
        }
    }

    #[test]
    fn labels_match_regions_and_locate(seed in any::<u64>()) {
        let (w, res) = random_workspace(seed);
        let d = decompose(&w, res).unwrap();
        for (id, c) in d.cells().iter().enumerate() {
            let p = c.rect.center();
            let expected = w.regions.iter().find(|(_, r)| r.contains(p)).map_or(PropId(0), |(q, _)| *q);
            prop_assert_eq!(c.label, expected);
            prop_assert_eq!(d.locate(p), Ok((id, c.label)));
        }
    }

    #[test]
    fn adjacency_is_symmetric_along_shared_edges(seed in any::<u64>()) {
        let (w, res) = random_workspace(seed);
        let d = decompose(&w, res).unwrap();
        for id in 0..d.len() {
            for &n in d.neighbors(id) {
                prop_assert!(d.neighbors(n).contains(&id));
                prop_assert!(shared_edge(&d.cell(id).rect, &d.cell(n).rect) > 0.0);
            }
        }
    }

    #[test]
    fn removing_a_fixed_body_never_shrinks_reachability(seed in any::<u64>()) {
        let (w, res) = random_workspace(seed);
        prop_assume!(!w.fixed.is_empty());
        let d = decompose(&w, res).unwrap();
        prop_assume!(!d.is_empty());
        let start = d.cell(0).rect.center();
        let mut fewer = w.clone();
        fewer.fixed.remove(seed as usize % w.fixed.len());
        let d2 = decompose(&fewer, res).unwrap();
        let seen = d.reachable_from(0);
        let (s2, _) = d2.locate(start).unwrap();
        let seen2 = d2.reachable_from(s2);
        for (id, c) in d.cells().iter().enumerate().filter(|(i, _)| seen[*i]) {
            let (j, _) = d2.locate(c.rect.center()).unwrap();
            prop_assert!(seen2[j], "cell {id} lost");
        }
    }
}
