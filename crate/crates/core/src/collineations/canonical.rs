//! Moving ordered pairs of affine lines, with an optional marked point on the
//! first line, to one of six canonical shapes.
//!
//! | case           | first line          | second line   | marked point image        |
//! |----------------|---------------------|---------------|---------------------------|
//! | BF/BF meet     | `y = x mu`, mu in F | `x = 0`       | `((0,1), (0,1) mu)`       |
//! | BF/BF parallel | `y = kappa`         | `y = 0`       | `((0,1), kappa)`          |
//! | NBF/NBF meet   | `y = x (mu,psi)`    | `y = x (0,1)` | x-coordinate `(0,1)`      |
//! | NBF/NBF par.   | `y = x(0,1) + kappa`| `y = x (0,1)` | x-coordinate `(0,1)`      |
//! | NBF/BF         | `y = x (0,1)`       | `x = 0`       | `((0,1), (s,r))`          |
//! | BF/NBF         | `x = 0`             | `y = x (0,1)` | `((0,0), (0,1))`          |

use serde::Serialize;

use super::{linear_map_between, matrix_mapping, stabilizer_matrix, Collineation, Mat2};
use crate::coordsys::{HallElement, HallSystem};
use crate::error::{Error, Result};
use crate::plane::{Line, LineClass, LineId, PlaneTables, Point, PointId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PairCase {
    BfBfIntersecting,
    BfBfParallel,
    NbfNbfIntersecting,
    NbfNbfParallel,
    NbfBf,
    BfNbf,
    InvolvesInfinity,
}

impl PairCase {
    pub const AFFINE: [PairCase; 6] = [
        PairCase::BfBfIntersecting,
        PairCase::BfBfParallel,
        PairCase::NbfNbfIntersecting,
        PairCase::NbfNbfParallel,
        PairCase::NbfBf,
        PairCase::BfNbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairCase::BfBfIntersecting => "bf-bf-intersecting",
            PairCase::BfBfParallel => "bf-bf-parallel",
            PairCase::NbfNbfIntersecting => "nbf-nbf-intersecting",
            PairCase::NbfNbfParallel => "nbf-nbf-parallel",
            PairCase::NbfBf => "nbf-bf",
            PairCase::BfNbf => "bf-nbf",
            PairCase::InvolvesInfinity => "involves-infinity",
        }
    }

    /// Case of an ordered pair of distinct lines, by line classes and parallelism.
    pub fn classify(plane: &PlaneTables, l1: LineId, l2: LineId) -> PairCase {
        let (c1, c2) = (plane.class(l1), plane.class(l2));
        let parallel = plane.direction(l1) == plane.direction(l2);
        match (c1, c2) {
            (LineClass::Infinity, _) | (_, LineClass::Infinity) => PairCase::InvolvesInfinity,
            (LineClass::Bf, LineClass::Bf) if parallel => PairCase::BfBfParallel,
            (LineClass::Bf, LineClass::Bf) => PairCase::BfBfIntersecting,
            (LineClass::Nbf, LineClass::Nbf) if parallel => PairCase::NbfNbfParallel,
            (LineClass::Nbf, LineClass::Nbf) => PairCase::NbfNbfIntersecting,
            (LineClass::Nbf, LineClass::Bf) => PairCase::NbfBf,
            (LineClass::Bf, LineClass::Nbf) => PairCase::BfNbf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalPairForm {
    pub case: PairCase,
    pub l1: Line,
    pub l2: Line,
    /// Slope of the first line in the intersecting BF/BF and NBF/NBF cases.
    pub mu: Option<HallElement>,
    /// Intercept of the first line in the parallel cases.
    pub kappa: Option<HallElement>,
    pub marked: Option<Point>,
    /// The constructive route failed its shape check and a search was used.
    pub fallback_used: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRepresentative {
    pub l1: LineId,
    pub l2: LineId,
    pub case: PairCase,
}

fn slope_01(h: &HallSystem) -> u16 {
    h.index(HallElement::new(0, 1))
}

/// Shape check; returns `(mu, kappa)` on success.
fn check_shape(
    h: &HallSystem,
    case: PairCase,
    l1: Line,
    l2: Line,
    marked: Option<Point>,
) -> Option<(Option<HallElement>, Option<HallElement>)> {
    let c01 = slope_01(h);
    let x01 = c01;
    let marked_x_is = |want_x: u16| match marked {
        None => true,
        Some(Point::Affine { x, .. }) => x == want_x,
        Some(_) => false,
    };
    let marked_is = |want: Point| marked.is_none_or(|m| m == want);
    match (case, l1, l2) {
        (PairCase::BfBfIntersecting, Line::Slanted { m, k: 0 }, Line::Vertical(0)) if h.is_base(m) => {
            marked_is(Point::Affine { x: x01, y: h.mul(x01, m) }).then_some((Some(h.element(m)), None))
        }
        (PairCase::BfBfParallel, Line::Slanted { m: 0, k }, Line::Slanted { m: 0, k: 0 }) if k != 0 => {
            marked_is(Point::Affine { x: x01, y: k }).then_some((None, Some(h.element(k))))
        }
        (PairCase::NbfNbfIntersecting, Line::Slanted { m, k: 0 }, Line::Slanted { m: m2, k: 0 })
            if m2 == c01 && !h.is_base(m) && m != c01 =>
        {
            marked_x_is(x01).then_some((Some(h.element(m)), None))
        }
        (PairCase::NbfNbfParallel, Line::Slanted { m, k }, Line::Slanted { m: m2, k: 0 })
            if m == c01 && m2 == c01 && k != 0 =>
        {
            marked_x_is(x01).then_some((None, Some(h.element(k))))
        }
        (PairCase::NbfBf, Line::Slanted { m, k: 0 }, Line::Vertical(0)) if m == c01 => {
            marked_is(Point::Affine { x: x01, y: h.mul(x01, c01) }).then_some((None, None))
        }
        (PairCase::BfNbf, Line::Vertical(0), Line::Slanted { m, k: 0 }) if m == c01 => {
            marked_is(Point::Affine { x: 0, y: x01 }).then_some((None, None))
        }
        _ => None,
    }
}

/// LNR element taking a BF line through the origin to `x = 0`.
fn bf_to_vertical(h: &HallSystem, l: Line) -> Option<Collineation> {
    match l {
        Line::Vertical(0) => None,
        Line::Slanted { m, .. } => {
            let f = h.basefield();
            // a = 1 with m1 = r - b/a
            Some(Collineation::Linear { a: 1, b: f.sub(h.r(), h.element(m).a1) })
        }
        _ => unreachable!("BF line through the origin"),
    }
}

/// LNR element taking a BF line through the origin to `y = 0`.
fn bf_to_horizontal(h: &HallSystem, l: Line) -> Option<Collineation> {
    let f = h.basefield();
    match l {
        Line::Slanted { m: 0, .. } => None,
        Line::Vertical(_) => Some(Collineation::Linear { a: 1, b: 0 }),
        Line::Slanted { m, .. } => {
            // a s + m1 b = 0 with a = 1
            let m1 = h.element(m).a1;
            Some(Collineation::Linear { a: 1, b: f.neg(f.div(h.s(), m1).unwrap()) })
        }
        Line::Infinity => unreachable!("affine line expected"),
    }
}

/// Autotopism taking the NBF slope `m` to `(0,1)`.
fn nbf_slope_to_canonical(h: &HallSystem, m: u16) -> Option<Collineation> {
    if m == slope_01(h) {
        return None;
    }
    let b = Mat2::from_rows(HallElement::ONE, h.element(m));
    Some(Collineation::Autotopism(b.inverse(h.basefield()).expect("m outside the basefield")))
}

fn non_identity_autotopism(s: Mat2) -> Option<Collineation> {
    (s != Mat2::IDENTITY).then_some(Collineation::Autotopism(s))
}

fn translation(a: u16, b: u16) -> Option<Collineation> {
    (a != 0 || b != 0).then_some(Collineation::Translation { a, b })
}

struct State<'a> {
    h: &'a HallSystem,
    steps: Vec<Collineation>,
    l1: Line,
    l2: Line,
    marked: Option<Point>,
}

impl<'a> State<'a> {
    fn push(&mut self, g: Option<Collineation>) {
        if let Some(g) = g {
            self.l1 = g.apply_line(self.h, self.l1);
            self.l2 = g.apply_line(self.h, self.l2);
            self.marked = self.marked.map(|p| g.apply_point(self.h, p));
            self.steps.push(g);
        }
    }

    fn slope(l: Line) -> u16 {
        match l {
            Line::Slanted { m, .. } => m,
            _ => unreachable!("slanted line expected"),
        }
    }

    fn marked_x(&self) -> Option<u16> {
        match self.marked {
            Some(Point::Affine { x, .. }) => Some(x),
            _ => None,
        }
    }

    fn marked_y(&self) -> Option<u16> {
        match self.marked {
            Some(Point::Affine { y, .. }) => Some(y),
            _ => None,
        }
    }
}

fn validate(plane: &PlaneTables, l1: LineId, l2: LineId, marked: Option<PointId>) -> Result<PairCase> {
    if l1 == l2 {
        return Err(Error::CoincidentLines);
    }
    let case = PairCase::classify(plane, l1, l2);
    if case == PairCase::InvolvesInfinity {
        return Err(Error::InfinityLineUnsupported);
    }
    if let Some(p) = marked {
        let meet = plane.meet(l1, l2)?;
        if !plane.incident(p, l1) || p == meet || !matches!(plane.point(p), Point::Affine { .. }) {
            return Err(Error::NotIncident("marked point must be an affine point of the first line off the second".into()));
        }
    }
    Ok(case)
}

/// Constructively maps `(l1, l2)` and the marked point to canonical shape.
///
/// Falls back to [`canonicalize_pair_by_search`] if the constructed image does
/// not have the expected shape.
pub fn canonicalize_pair(
    plane: &PlaneTables,
    l1: LineId,
    l2: LineId,
    marked: Option<PointId>,
) -> Result<(Collineation, CanonicalPairForm)> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let case = validate(plane, l1, l2, marked)?;
    let f = h.basefield();
    let one01 = h.index(HallElement::new(0, 1));
    let mut st = State { h, steps: Vec::new(), l1: plane.line(l1), l2: plane.line(l2), marked: marked.map(|p| plane.point(p)) };

    match plane.point(plane.meet(l1, l2)?) {
        Point::Affine { x, y } => {
            st.push(translation(h.neg(x), h.neg(y)));
            match case {
                PairCase::BfBfIntersecting => {
                    st.push(bf_to_vertical(h, st.l2));
                    if let Some(v) = st.marked_x() {
                        st.push(non_identity_autotopism(matrix_mapping(f, h.element(v), h.element(one01))));
                    }
                }
                PairCase::NbfNbfIntersecting => {
                    st.push(nbf_slope_to_canonical(h, State::slope(st.l2)));
                    if let Some(v) = st.marked_x() {
                        if v != one01 {
                            st.push(Some(linear_map_between(h, State::slope(st.l1), v, one01)?));
                        }
                    }
                }
                PairCase::NbfBf => {
                    st.push(bf_to_vertical(h, st.l2));
                    st.push(nbf_slope_to_canonical(h, State::slope(st.l1)));
                    if let Some(v) = st.marked_x() {
                        st.push(non_identity_autotopism(stabilizer_matrix(h, h.element(v), h.element(one01))?));
                    }
                }
                PairCase::BfNbf => {
                    st.push(bf_to_vertical(h, st.l1));
                    st.push(nbf_slope_to_canonical(h, State::slope(st.l2)));
                    if let Some(v) = st.marked_y() {
                        st.push(non_identity_autotopism(stabilizer_matrix(h, h.element(v), h.element(one01))?));
                    }
                }
                _ => unreachable!("parallel cases do not meet in an affine point"),
            }
        }
        _ => {
            // Put the second line through the origin.
            match st.l2 {
                Line::Vertical(c) => st.push(translation(h.neg(c), 0)),
                Line::Slanted { k, .. } => st.push(translation(0, h.neg(k))),
                Line::Infinity => unreachable!(),
            }
            match case {
                PairCase::BfBfParallel => {
                    st.push(bf_to_horizontal(h, st.l2));
                    if let Some(v) = st.marked_x() {
                        st.push(translation(h.sub(one01, v), 0));
                    }
                }
                PairCase::NbfNbfParallel => {
                    st.push(nbf_slope_to_canonical(h, State::slope(st.l2)));
                    if let Some(v) = st.marked_x() {
                        let a = h.sub(one01, v);
                        st.push(translation(a, h.mul(a, one01)));
                    }
                }
                _ => unreachable!("only BF/BF and NBF/NBF pairs can be parallel"),
            }
        }
    }

    match check_shape(h, case, st.l1, st.l2, st.marked) {
        Some((mu, kappa)) => Ok((
            Collineation::Composite(st.steps),
            CanonicalPairForm { case, l1: st.l1, l2: st.l2, mu, kappa, marked: st.marked, fallback_used: false },
        )),
        None => canonicalize_pair_by_search(plane, l1, l2, marked),
    }
}

/// Canonicalizes by searching words `translation, linear map, autotopism`
/// followed by the marked-point step, independent of the case-specific choices
/// made by [`canonicalize_pair`].
pub fn canonicalize_pair_by_search(
    plane: &PlaneTables,
    l1: LineId,
    l2: LineId,
    marked: Option<PointId>,
) -> Result<(Collineation, CanonicalPairForm)> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let case = validate(plane, l1, l2, marked)?;
    let f = h.basefield();
    let one01 = h.index(HallElement::new(0, 1));
    let (line1, line2) = (plane.line(l1), plane.line(l2));
    let anchor = match plane.point(plane.meet(l1, l2)?) {
        Point::Affine { x, y } => Collineation::Translation { a: h.neg(x), b: h.neg(y) },
        _ => match line2 {
            Line::Vertical(c) => Collineation::Translation { a: h.neg(c), b: 0 },
            Line::Slanted { k, .. } => Collineation::Translation { a: 0, b: h.neg(k) },
            Line::Infinity => unreachable!(),
        },
    };
    let mut lnr: Vec<Collineation> = vec![Collineation::identity()];
    lnr.extend(
        f.elements()
            .flat_map(|a| f.elements().map(move |b| (a, b)))
            .filter(|&ab| ab != (0, 0))
            .map(|(a, b)| Collineation::Linear { a, b }),
    );
    let atp = Mat2::general_linear(f);
    for g1 in &lnr {
        for s in &atp {
            let word = anchor.clone().then(g1.clone()).then(Collineation::Autotopism(*s));
            let (m1, m2) = (word.apply_line(h, line1), word.apply_line(h, line2));
            if check_shape(h, case, m1, m2, None).is_none() {
                continue;
            }
            let image = marked.map(|p| word.apply_point(h, plane.point(p)));
            // Stabilizers of the canonical pair that move the marked point.
            let fix = match (case, image) {
                (_, None) => None,
                (PairCase::BfBfIntersecting, Some(Point::Affine { x, .. })) => {
                    Some(Collineation::Autotopism(matrix_mapping(f, h.element(x), h.element(one01))))
                }
                (PairCase::BfBfParallel, Some(Point::Affine { x, .. })) => {
                    Some(Collineation::Translation { a: h.sub(one01, x), b: 0 })
                }
                (PairCase::NbfNbfIntersecting, Some(Point::Affine { x, .. })) => {
                    let Line::Slanted { m, .. } = m1 else { unreachable!() };
                    Some(linear_map_between(h, m, x, one01)?)
                }
                (PairCase::NbfNbfParallel, Some(Point::Affine { x, .. })) => {
                    let a = h.sub(one01, x);
                    Some(Collineation::Translation { a, b: h.mul(a, one01) })
                }
                (PairCase::NbfBf, Some(Point::Affine { x, .. })) => {
                    Some(Collineation::Autotopism(stabilizer_matrix(h, h.element(x), h.element(one01))?))
                }
                (PairCase::BfNbf, Some(Point::Affine { y, .. })) => {
                    Some(Collineation::Autotopism(stabilizer_matrix(h, h.element(y), h.element(one01))?))
                }
                _ => unreachable!(),
            };
            let word = match fix {
                Some(g) => word.then(g),
                None => word,
            };
            let (m1, m2) = (word.apply_line(h, line1), word.apply_line(h, line2));
            let image = marked.map(|p| word.apply_point(h, plane.point(p)));
            if let Some((mu, kappa)) = check_shape(h, case, m1, m2, image) {
                return Ok((
                    word,
                    CanonicalPairForm { case, l1: m1, l2: m2, mu, kappa, marked: image, fallback_used: true },
                ));
            }
        }
    }
    Err(Error::NotFound)
}

/// One ordered pair per canonical shape and residual parameter value, then the
/// four pairs with the line at infinity (paired with `x = 0` and `y = x(0,1)`).
pub fn canonical_pair_representatives(plane: &PlaneTables) -> Result<Vec<PairRepresentative>> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let f = h.basefield();
    let c01 = slope_01(h);
    let id = |l: Line| plane.line_id(l);
    let x0 = id(Line::Vertical(0));
    let nbf0 = id(Line::Slanted { m: c01, k: 0 });
    let mut out = Vec::new();
    let mut push = |l1: LineId, l2: LineId, case| out.push(PairRepresentative { l1, l2, case });

    for mu in f.elements() {
        push(id(Line::Slanted { m: h.from_base(mu), k: 0 }), x0, PairCase::BfBfIntersecting);
    }
    for kappa in h.elements().filter(|&k| k != 0) {
        push(id(Line::Slanted { m: 0, k: kappa }), id(Line::Slanted { m: 0, k: 0 }), PairCase::BfBfParallel);
    }
    for mu in f.elements() {
        for psi in f.elements().filter(|&p| p != 0) {
            let m = h.index(HallElement::new(mu, psi));
            if m != c01 {
                push(id(Line::Slanted { m, k: 0 }), nbf0, PairCase::NbfNbfIntersecting);
            }
        }
    }
    for kappa in h.elements().filter(|&k| k != 0) {
        push(id(Line::Slanted { m: c01, k: kappa }), nbf0, PairCase::NbfNbfParallel);
    }
    push(nbf0, x0, PairCase::NbfBf);
    push(x0, nbf0, PairCase::BfNbf);
    let inf = plane.infinity_line();
    for l in [x0, nbf0] {
        push(inf, l, PairCase::InvolvesInfinity);
        push(l, inf, PairCase::InvolvesInfinity);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimePowerField;

    fn plane(p: u32, k: u32) -> PlaneTables {
        PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, k).unwrap())).unwrap()
    }

    #[test]
    fn intersecting_bf_example() {
        let pl = plane(3, 1);
        let h = pl.hall_system().unwrap();
        // y = x (1,0) + (2,1) and x = (1,1)
        let l1 = pl.line_id(Line::Slanted { m: h.from_base(1), k: h.index(HallElement::new(2, 1)) });
        let l2 = pl.line_id(Line::Vertical(h.index(HallElement::new(1, 1))));
        let (g, form) = canonicalize_pair(&pl, l1, l2, None).unwrap();
        assert_eq!(form.case, PairCase::BfBfIntersecting);
        assert_eq!(form.l2, Line::Vertical(0));
        assert!(matches!(form.l1, Line::Slanted { m, k: 0 } if h.is_base(m)));
        assert_eq!(g.apply_line(h, pl.line(l1)), form.l1);
        assert!(!form.fallback_used);
    }

    #[test]
    fn parallel_nbf_example() {
        let pl = plane(3, 1);
        let h = pl.hall_system().unwrap();
        let m = h.index(HallElement::new(2, 2));
        let l1 = pl.line_id(Line::Slanted { m, k: 4 });
        let l2 = pl.line_id(Line::Slanted { m, k: 7 });
        let (_, form) = canonicalize_pair(&pl, l1, l2, None).unwrap();
        assert_eq!(form.case, PairCase::NbfNbfParallel);
        assert_eq!(form.l2, Line::Slanted { m: slope_01(h), k: 0 });
        assert!(matches!(form.l1, Line::Slanted { m, k } if m == slope_01(h) && k != 0));
    }

    #[test]
    fn canonical_pairs_map_by_identity() {
        let pl = plane(3, 1);
        for rep in canonical_pair_representatives(&pl).unwrap() {
            if rep.case == PairCase::InvolvesInfinity {
                assert!(matches!(canonicalize_pair(&pl, rep.l1, rep.l2, None), Err(Error::InfinityLineUnsupported)));
                continue;
            }
            let (g, form) = canonicalize_pair(&pl, rep.l1, rep.l2, None).unwrap();
            assert_eq!(g, Collineation::identity(), "{rep:?}");
            assert_eq!(form.case, rep.case);
            assert_eq!((pl.line_id(form.l1), pl.line_id(form.l2)), (rep.l1, rep.l2));
        }
    }

    #[test]
    fn representative_counts() {
        let pl = plane(3, 1);
        let reps = canonical_pair_representatives(&pl).unwrap();
        let count = |c| reps.iter().filter(|r| r.case == c).count();
        assert_eq!(count(PairCase::BfBfIntersecting), 3);
        assert_eq!(count(PairCase::BfBfParallel), 8);
        assert_eq!(count(PairCase::NbfNbfIntersecting), 5);
        assert_eq!(count(PairCase::NbfNbfParallel), 8);
        assert_eq!(count(PairCase::NbfBf), 1);
        assert_eq!(count(PairCase::BfNbf), 1);
        assert_eq!(count(PairCase::InvolvesInfinity), 4);
        let cases: std::collections::BTreeSet<_> =
            reps.iter().map(|r| r.case).filter(|&c| c != PairCase::InvolvesInfinity).collect();
        assert_eq!(cases.len(), 6);
    }

    #[test]
    fn search_route_agrees_on_case() {
        let pl = plane(3, 1);
        let lines: Vec<LineId> = pl.affine_lines().step_by(7).collect();
        for &a in &lines {
            for &b in lines.iter().filter(|&&b| b != a) {
                let marked = pl.points_on(a).iter().map(|&p| PointId(p)).find(|&p| {
                    matches!(pl.point(p), Point::Affine { .. }) && p != pl.meet(a, b).unwrap()
                });
                let (g, form) = canonicalize_pair_by_search(&pl, a, b, marked).unwrap();
                let h = pl.hall_system().unwrap();
                assert!(form.fallback_used);
                assert_eq!(form.case, PairCase::classify(&pl, a, b));
                assert_eq!(g.apply_line(h, pl.line(a)), form.l1);
                assert_eq!(g.apply_line(h, pl.line(b)), form.l2);
            }
        }
    }

    #[test]
    fn marked_point_errors() {
        let pl = plane(3, 1);
        let l1 = pl.line_id(Line::Vertical(0));
        let l2 = pl.line_id(Line::Slanted { m: 0, k: 0 });
        assert!(matches!(canonicalize_pair(&pl, l1, l2, Some(pl.origin())), Err(Error::NotIncident(_))));
        assert!(matches!(canonicalize_pair(&pl, l1, l1, None), Err(Error::CoincidentLines)));
    }

    #[test]
    fn f4_pairs_canonicalize() {
        let pl = plane(2, 2);
        for a in pl.affine_lines().step_by(5) {
            for b in pl.affine_lines().step_by(3).filter(|&b| b != a) {
                let (_, form) = canonicalize_pair(&pl, a, b, None).unwrap();
                assert!(!form.fallback_used);
            }
        }
    }
}
