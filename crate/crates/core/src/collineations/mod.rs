//! Translations, autotopisms and linear maps of the Hall plane.
//!
//! Each family acts on points by an explicit coordinate formula and on lines
//! by its own closed form; composites are applied generator by generator.
//! Infinite points follow the action on parallel classes.

mod canonical;
mod groups;

use serde::Serialize;

use crate::coordsys::{HallElement, HallSystem};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimePowerField};
use crate::plane::{Line, LineId, PlaneTables, Point, PointId};

pub use canonical::{
    canonical_pair_representatives, canonicalize_pair, canonicalize_pair_by_search, CanonicalPairForm,
    PairCase, PairRepresentative,
};
pub use groups::{
    atp_elements, lnr_elements, orbit, tr_elements, verify_group_propositions, GroupReport,
};

/// A 2x2 matrix over the basefield acting on row vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2(pub [[Fe; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn det(&self, f: &PrimePowerField) -> Fe {
        let [[a, b], [c, d]] = self.0;
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    pub fn inverse(&self, f: &PrimePowerField) -> Option<Mat2> {
        let di = f.inv(self.det(f))?;
        let [[a, b], [c, d]] = self.0;
        Some(Mat2([[f.mul(d, di), f.mul(f.neg(b), di)], [f.mul(f.neg(c), di), f.mul(a, di)]]))
    }

    /// `self * other`
    pub fn mul(&self, f: &PrimePowerField, other: &Mat2) -> Mat2 {
        let (a, b) = (self.0, other.0);
        let e = |i: usize, j: usize| f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Row vector times matrix.
    pub fn apply(&self, f: &PrimePowerField, x: HallElement) -> HallElement {
        let [[a, b], [c, d]] = self.0;
        HallElement::new(
            f.add(f.mul(x.a1, a), f.mul(x.a2, c)),
            f.add(f.mul(x.a1, b), f.mul(x.a2, d)),
        )
    }

    /// Matrix with the given rows.
    pub fn from_rows(r0: HallElement, r1: HallElement) -> Mat2 {
        Mat2([[r0.a1, r0.a2], [r1.a1, r1.a2]])
    }

    /// Every invertible matrix, in lexicographic entry order.
    pub fn general_linear(f: &PrimePowerField) -> Vec<Mat2> {
        let q = f.order() as u16;
        let mut out = Vec::new();
        for code in 0..(q as u32).pow(4) {
            let mut c = code;
            let mut e = [0 as Fe; 4];
            for slot in e.iter_mut().rev() {
                *slot = (c % q as u32) as Fe;
                c /= q as u32;
            }
            let m = Mat2([[e[0], e[1]], [e[2], e[3]]]);
            if m.det(f) != 0 {
                out.push(m);
            }
        }
        out
    }
}

/// Some invertible `S` with `y S = z`, for nonzero `y`, `z`.
pub fn matrix_mapping(f: &PrimePowerField, y: HallElement, z: HallElement) -> Mat2 {
    let completion = |v: HallElement| {
        if v.a1 != 0 {
            HallElement::new(0, 1)
        } else {
            HallElement::new(1, 0)
        }
    };
    let by = Mat2::from_rows(y, completion(y));
    let bz = Mat2::from_rows(z, completion(z));
    by.inverse(f).expect("completed basis").mul(f, &bz)
}

/// Closed-form matrix `S` with `y S = z` that also preserves the slope `(0,1)`,
/// so the autotopism fixes both `x = 0` and `y = x(0,1)`.
pub fn stabilizer_matrix(h: &HallSystem, y: HallElement, z: HallElement) -> Result<Mat2> {
    let f = h.basefield();
    let (r, s) = (h.r(), h.s());
    let (y1, y2, z1, z2) = (y.a1, y.a2, z.a1, z.a2);
    // y1^2 + r y1 y2 - s y2^2
    let denom = f.sub(f.add(f.mul(y1, y1), f.mul(r, f.mul(y1, y2))), f.mul(s, f.mul(y2, y2)));
    let d_inv = f.inv(denom).ok_or(Error::SingularMatrix)?;
    // y1 z1 + r y2 z1 - s y2 z2
    let e00 = f.sub(f.add(f.mul(y1, z1), f.mul(r, f.mul(y2, z1))), f.mul(s, f.mul(y2, z2)));
    // -y2 z1 + y1 z2
    let e01 = f.sub(f.mul(y1, z2), f.mul(y2, z1));
    let e10 = f.mul(s, e01);
    // y1 z1 + r y1 z2 - s y2 z2
    let e11 = f.sub(f.add(f.mul(y1, z1), f.mul(r, f.mul(y1, z2))), f.mul(s, f.mul(y2, z2)));
    let m = Mat2([[f.mul(e00, d_inv), f.mul(e01, d_inv)], [f.mul(e10, d_inv), f.mul(e11, d_inv)]]);
    if m.det(f) == 0 {
        return Err(Error::SingularMatrix);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Collineation {
    /// `(x, y) -> (x + a, y + b)`
    Translation { a: u16, b: u16 },
    /// `(x, y) -> (x S, y S)`
    Autotopism(Mat2),
    /// `(x, y) -> ((-a r + b) x + a y, a s x + b y)` for basefield `a`, `b`.
    Linear { a: Fe, b: Fe },
    /// Applied first to last.
    Composite(Vec<Collineation>),
}

impl Collineation {
    pub fn identity() -> Self {
        Collineation::Composite(Vec::new())
    }

    pub fn autotopism(f: &PrimePowerField, s: Mat2) -> Result<Self> {
        if s.det(f) == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(Collineation::Autotopism(s))
    }

    pub fn linear(a: Fe, b: Fe) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(Collineation::Linear { a, b })
    }

    /// Flattened list of generators in application order.
    pub fn generators(&self) -> Vec<&Collineation> {
        match self {
            Collineation::Composite(parts) => parts.iter().flat_map(|c| c.generators()).collect(),
            other => vec![other],
        }
    }

    pub fn then(self, next: Collineation) -> Collineation {
        let mut parts = match self {
            Collineation::Composite(v) => v,
            other => vec![other],
        };
        match next {
            Collineation::Composite(v) => parts.extend(v),
            other => parts.push(other),
        }
        Collineation::Composite(parts)
    }

    pub fn apply_point(&self, h: &HallSystem, p: Point) -> Point {
        let f = h.basefield();
        match self {
            Collineation::Translation { a, b } => match p {
                Point::Affine { x, y } => Point::Affine { x: h.add(x, *a), y: h.add(y, *b) },
                other => other,
            },
            Collineation::Autotopism(s) => {
                let map = |v: u16| h.index(s.apply(f, h.element(v)));
                match p {
                    Point::Affine { x, y } => Point::Affine { x: map(x), y: map(y) },
                    Point::Slope(m) => Point::Slope(autotopism_slope(h, s, m)),
                    Point::VerticalInfinity => Point::VerticalInfinity,
                }
            }
            &Collineation::Linear { a, b } => {
                let (r, s) = (h.r(), h.s());
                match p {
                    Point::Affine { x, y } => {
                        let c = f.add(f.neg(f.mul(a, r)), b);
                        Point::Affine {
                            x: h.add(h.scale(c, x), h.scale(a, y)),
                            y: h.add(h.scale(f.mul(a, s), x), h.scale(b, y)),
                        }
                    }
                    Point::Slope(m) => match self.apply_line(h, Line::Slanted { m, k: 0 }) {
                        Line::Slanted { m, .. } => Point::Slope(m),
                        Line::Vertical(_) => Point::VerticalInfinity,
                        Line::Infinity => unreachable!(),
                    },
                    Point::VerticalInfinity => match self.apply_line(h, Line::Vertical(0)) {
                        Line::Slanted { m, .. } => Point::Slope(m),
                        Line::Vertical(_) => Point::VerticalInfinity,
                        Line::Infinity => unreachable!(),
                    },
                }
            }
            Collineation::Composite(parts) => parts.iter().fold(p, |acc, c| c.apply_point(h, acc)),
        }
    }

    pub fn apply_line(&self, h: &HallSystem, l: Line) -> Line {
        let f = h.basefield();
        match (self, l) {
            (_, Line::Infinity) => Line::Infinity,
            (Collineation::Translation { a, .. }, Line::Vertical(c)) => Line::Vertical(h.add(c, *a)),
            (Collineation::Translation { a, b }, Line::Slanted { m, k }) => {
                Line::Slanted { m, k: h.add(h.sub(k, h.mul(*a, m)), *b) }
            }
            (Collineation::Autotopism(s), Line::Vertical(c)) => Line::Vertical(h.index(s.apply(f, h.element(c)))),
            (Collineation::Autotopism(s), Line::Slanted { m, k }) => Line::Slanted {
                m: autotopism_slope(h, s, m),
                k: h.index(s.apply(f, h.element(k))),
            },
            (&Collineation::Linear { a, b }, Line::Vertical(c)) => {
                if a == 0 {
                    Line::Vertical(h.scale(b, c))
                } else {
                    let ai = f.inv(a).unwrap();
                    let slope = h.from_base(f.mul(b, ai));
                    let factor = f.neg(f.mul(lnr_norm(h, a, b), ai));
                    Line::Slanted { m: slope, k: h.scale(factor, c) }
                }
            }
            (&Collineation::Linear { a, b }, Line::Slanted { m, k }) => {
                let (r, s) = (h.r(), h.s());
                if !h.is_base(m) {
                    // [m, -a k m + b k]
                    let akm = h.mul(h.scale(a, k), m);
                    return Line::Slanted { m, k: h.sub(h.scale(b, k), akm) };
                }
                if a == 0 {
                    return Line::Slanted { m, k: h.scale(b, k) };
                }
                let m1 = h.element(m).a1;
                // a m1 - a r + b
                let denom = f.add(f.sub(f.mul(a, m1), f.mul(a, r)), b);
                if denom == 0 {
                    Line::Vertical(h.scale(a, k))
                } else {
                    let di = f.inv(denom).unwrap();
                    let slope = f.mul(f.add(f.mul(a, s), f.mul(m1, b)), di);
                    let factor = f.mul(lnr_norm(h, a, b), di);
                    Line::Slanted { m: h.from_base(slope), k: h.scale(factor, k) }
                }
            }
            (Collineation::Composite(parts), l) => parts.iter().fold(l, |acc, c| c.apply_line(h, acc)),
        }
    }

    pub fn apply_point_id(&self, plane: &PlaneTables, p: PointId) -> Result<PointId> {
        let h = plane.hall_system().ok_or(Error::NotHall)?;
        Ok(plane.point_id(self.apply_point(h, plane.point(p))))
    }

    pub fn apply_line_id(&self, plane: &PlaneTables, l: LineId) -> Result<LineId> {
        let h = plane.hall_system().ok_or(Error::NotHall)?;
        Ok(plane.line_id(self.apply_line(h, plane.line(l))))
    }

    /// Image of every point id, indexed by point id.
    pub fn point_permutation(&self, plane: &PlaneTables) -> Result<Vec<u16>> {
        plane.points().map(|p| self.apply_point_id(plane, p).map(|q| q.0)).collect()
    }

    /// Image of every line id under the closed-form line action.
    pub fn line_permutation(&self, plane: &PlaneTables) -> Result<Vec<u16>> {
        plane.lines().map(|l| self.apply_line_id(plane, l).map(|m| m.0)).collect()
    }

    /// True when, for every line, the pointwise image equals the closed-form image.
    pub fn preserves_collinearity(&self, plane: &PlaneTables) -> Result<bool> {
        let pts = self.point_permutation(plane)?;
        let lines = self.line_permutation(plane)?;
        let mut seen = vec![false; pts.len()];
        for &p in &pts {
            if std::mem::replace(&mut seen[p as usize], true) {
                return Ok(false);
            }
        }
        Ok(plane.lines().all(|l| {
            plane.points_on(l).iter().all(|&p| plane.incident_raw(pts[p as usize], lines[l.index()]))
        }))
    }
}

/// `b^2 - a b r - a^2 s`
fn lnr_norm(h: &HallSystem, a: Fe, b: Fe) -> Fe {
    let f = h.basefield();
    let (r, s) = (h.r(), h.s());
    f.sub(f.sub(f.mul(b, b), f.mul(f.mul(a, b), r)), f.mul(f.mul(a, a), s))
}

/// `(a m) S` with `a = 1 S^{-1}`.
fn autotopism_slope(h: &HallSystem, s: &Mat2, m: u16) -> u16 {
    let f = h.basefield();
    let s_inv = s.inverse(f).expect("autotopism matrix is invertible");
    let a = h.index(s_inv.apply(f, HallElement::ONE));
    h.index(s.apply(f, h.element(h.mul(a, m))))
}

/// The linear map sending `(v, v m)` to `(w, w m)` on the line `y = x m`,
/// `m` outside the basefield. Solves `(-a r + b) v + a (v m) = w`.
pub fn linear_map_between(h: &HallSystem, m: u16, v: u16, w: u16) -> Result<Collineation> {
    let f = h.basefield();
    let ve = h.element(v);
    let ue = h.element(h.mul(v, m));
    let we = h.element(w);
    let det = f.sub(f.mul(ve.a1, ue.a2), f.mul(ve.a2, ue.a1));
    let di = f.inv(det).ok_or(Error::SingularMatrix)?;
    let c1 = f.mul(f.sub(f.mul(we.a1, ue.a2), f.mul(we.a2, ue.a1)), di);
    let c2 = f.mul(f.sub(f.mul(ve.a1, we.a2), f.mul(ve.a2, we.a1)), di);
    Collineation::linear(c2, f.add(c1, f.mul(c2, h.r())))
}

/// A collineation fixing the origin and the line `l` through it, taking `p` to `q`.
pub fn transitive_stabilizer_witness(plane: &PlaneTables, l: Line, p: Point, q: Point) -> Result<Collineation> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let f = h.basefield();
    let origin = Point::Affine { x: 0, y: 0 };
    if !plane.incident_by_equation(origin, l) {
        return Err(Error::NotIncident("line misses the origin".into()));
    }
    for pt in [p, q] {
        if pt == origin || !plane.incident_by_equation(pt, l) || !matches!(pt, Point::Affine { .. }) {
            return Err(Error::NotIncident(format!("{pt:?} is not a non-origin affine point of {l:?}")));
        }
    }
    if p == q {
        return Ok(Collineation::identity());
    }
    let (Point::Affine { x: px, y: py }, Point::Affine { x: qx, y: qy }) = (p, q) else { unreachable!() };
    match l {
        Line::Vertical(_) => Ok(Collineation::Autotopism(matrix_mapping(f, h.element(py), h.element(qy)))),
        Line::Slanted { m, .. } if h.is_base(m) => {
            Ok(Collineation::Autotopism(matrix_mapping(f, h.element(px), h.element(qx))))
        }
        Line::Slanted { m, .. } => linear_map_between(h, m, px, qx),
        Line::Infinity => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::PlaneTables;

    fn plane(p: u32) -> PlaneTables {
        PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, 1).unwrap())).unwrap()
    }

    #[test]
    fn translation_line_example() {
        let pl = plane(3);
        let h = pl.hall_system().unwrap();
        let e = |a1, a2| h.index(HallElement::new(a1, a2));
        let tau = Collineation::Translation { a: e(1, 0), b: 0 };
        assert_eq!(
            tau.apply_line(h, Line::Slanted { m: e(2, 0), k: 0 }),
            Line::Slanted { m: e(2, 0), k: e(1, 0) }
        );
    }

    #[test]
    fn identity_fixes_everything() {
        let pl = plane(3);
        let h = pl.hall_system().unwrap();
        let id = Collineation::Translation { a: 0, b: 0 };
        for p in pl.points() {
            assert_eq!(id.apply_point(h, pl.point(p)), pl.point(p));
        }
        for l in pl.lines() {
            assert_eq!(id.apply_line(h, pl.line(l)), pl.line(l));
        }
    }

    #[test]
    fn linear_maps_fix_nbf_slopes() {
        let pl = plane(5);
        let h = pl.hall_system().unwrap();
        for (a, b) in (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).filter(|&ab| ab != (0, 0)) {
            let lam = Collineation::linear(a, b).unwrap();
            for l in pl.affine_lines() {
                if let Line::Slanted { m, .. } = pl.line(l) {
                    if !h.is_base(m) {
                        assert!(matches!(lam.apply_line(h, pl.line(l)), Line::Slanted { m: m2, .. } if m2 == m));
                    }
                }
            }
        }
    }

    #[test]
    fn singular_generators_rejected() {
        let f = PrimePowerField::new(3, 1).unwrap();
        assert!(matches!(Collineation::linear(0, 0), Err(Error::SingularMatrix)));
        assert!(matches!(Collineation::autotopism(&f, Mat2([[1, 2], [2, 1]])), Err(Error::SingularMatrix)));
    }

    #[test]
    fn stabilizer_matrix_identity_case() {
        let h = HallSystem::new(PrimePowerField::new(5, 1).unwrap());
        let y = HallElement::new(3, 4);
        assert_eq!(stabilizer_matrix(&h, y, y).unwrap(), Mat2::IDENTITY);
    }

    #[test]
    fn stabilizer_witness_cases() {
        let pl = plane(3);
        let h = pl.hall_system().unwrap();
        let origin = pl.point_id(Point::Affine { x: 0, y: 0 });
        for l in pl.lines().filter(|&l| pl.incident(origin, l) && l != pl.infinity_line()) {
            let pts: Vec<Point> = pl
                .points_on(l)
                .iter()
                .map(|&p| pl.point(PointId(p)))
                .filter(|p| matches!(p, Point::Affine { .. }) && p.ne(&Point::Affine { x: 0, y: 0 }))
                .collect();
            for &p in &pts {
                for &q in &pts {
                    let g = transitive_stabilizer_witness(&pl, pl.line(l), p, q).unwrap();
                    assert_eq!(g.apply_point(h, p), q);
                    assert_eq!(g.apply_line(h, pl.line(l)), pl.line(l));
                    assert_eq!(g.apply_point(h, Point::Affine { x: 0, y: 0 }), Point::Affine { x: 0, y: 0 });
                    let kind_ok = match (pl.line(l), g.generators().first()) {
                        (_, None) => p == q,
                        (Line::Slanted { m, .. }, Some(Collineation::Linear { .. })) => !h.is_base(m),
                        (_, Some(Collineation::Autotopism(_))) => true,
                        _ => false,
                    };
                    assert!(kind_ok);
                }
            }
        }
    }
}
