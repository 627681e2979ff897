use hallplane::collineations::{canonicalize_pair, canonicalize_pair_by_search, PairCase};
use hallplane::{Error, HallSystem, PlaneTables, Point, PointId, PrimePowerField};

fn plane(p: u32, k: u32) -> PlaneTables {
    PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, k).unwrap())).unwrap()
}

fn marked_choices(pl: &PlaneTables, a: hallplane::LineId, b: hallplane::LineId) -> Vec<Option<PointId>> {
    let meet = pl.meet(a, b).unwrap();
    let mut out = vec![None];
    out.extend(
        pl.points_on(a)
            .iter()
            .map(|&p| PointId(p))
            .filter(|&p| p != meet && matches!(pl.point(p), Point::Affine { .. }))
            .map(Some),
    );
    out
}

#[test]
fn every_ordered_pair_at_order_nine() {
    let pl = plane(3, 1);
    let h = pl.hall_system().unwrap();
    let mut checked = 0;
    for a in pl.lines() {
        for b in pl.lines().filter(|&b| b != a) {
            if PairCase::classify(&pl, a, b) == PairCase::InvolvesInfinity {
                assert!(matches!(canonicalize_pair(&pl, a, b, None), Err(Error::InfinityLineUnsupported)));
                continue;
            }
            for marked in marked_choices(&pl, a, b) {
                let (g, form) = canonicalize_pair(&pl, a, b, marked).unwrap();
                assert!(!form.fallback_used, "{a:?} {b:?} {marked:?}");
                assert_eq!(g.apply_line(h, pl.line(a)), form.l1);
                assert_eq!(g.apply_line(h, pl.line(b)), form.l2);
                if let Some(p) = marked {
                    assert_eq!(Some(g.apply_point(h, pl.point(p))), form.marked);
                }
                // Idempotent: the canonical image maps to itself.
                let (a2, b2) = (pl.line_id(form.l1), pl.line_id(form.l2));
                let m2 = form.marked.map(|p| pl.point_id(p));
                let (_, again) = canonicalize_pair(&pl, a2, b2, m2).unwrap();
                assert_eq!((again.l1, again.l2, again.marked), (form.l1, form.l2, form.marked));
                checked += 1;
            }
        }
    }
    assert!(checked > 90 * 89);
}

#[test]
fn search_route_matches_constructive_images() {
    let pl = plane(3, 1);
    for a in pl.affine_lines().step_by(3) {
        for b in pl.affine_lines().step_by(4).filter(|&b| b != a) {
            for marked in marked_choices(&pl, a, b).into_iter().take(3) {
                let (_, c) = canonicalize_pair(&pl, a, b, marked).unwrap();
                let (_, s) = canonicalize_pair_by_search(&pl, a, b, marked).unwrap();
                assert_eq!(c.case, s.case);
                assert_eq!(c.l2, s.l2);
                assert_eq!((c.mu.is_some(), c.kappa.is_some()), (s.mu.is_some(), s.kappa.is_some()));
                if c.case == PairCase::BfBfIntersecting {
                    assert_eq!(c.mu, s.mu);
                }
            }
        }
    }
}

#[test]
fn order_sixteen_pairs_with_marked_points() {
    let pl = plane(2, 2);
    let h = pl.hall_system().unwrap();
    for a in pl.affine_lines().step_by(7) {
        for b in pl.affine_lines().step_by(5).filter(|&b| b != a) {
            for marked in marked_choices(&pl, a, b) {
                let (g, form) = canonicalize_pair(&pl, a, b, marked).unwrap();
                assert!(!form.fallback_used);
                assert_eq!(g.apply_line(h, pl.line(b)), form.l2);
            }
        }
    }
}
