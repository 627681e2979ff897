//! Projective completion of the affine plane coordinatized by a Hall system
//! (or, for comparison, by the field `F_{q^2}`), with dense join/meet tables.
//!
//! Point ids: affine `(x, y)` is `x * n + y`, then the slope points `n^2 + m`,
//! then the vertical point at infinity `n^2 + n`. Line ids: verticals `[c]` are
//! `c`, slanted `[m, k]` are `n + m * n + k`, the line at infinity is `n^2 + n`.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::coordsys::HallSystem;
use crate::error::{Error, Result};
use crate::field::PrimePowerField;

/// Largest plane order for which dense tables are built.
pub const MAX_PLANE_ORDER: usize = 64;

const NONE: u16 = u16::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointId(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LineId(pub u16);

impl PointId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LineId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Point {
    Affine { x: u16, y: u16 },
    Slope(u16),
    VerticalInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Line {
    Vertical(u16),
    Slanted { m: u16, k: u16 },
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineClass {
    /// Vertical, or slanted with slope in the basefield.
    Bf,
    /// Slanted with slope outside the basefield.
    Nbf,
    Infinity,
}

/// Parallel class of an affine line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Vertical,
    Slope(u16),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlaneKind {
    Hall,
    Field,
}

/// Coordinate ring of the plane.
#[derive(Clone, Debug)]
pub enum Coordinates {
    Hall(HallSystem),
    /// `F_{q^2}`, with `F_q` playing the role of the basefield.
    Field { field: PrimePowerField, base_order: usize },
}

impl Coordinates {
    pub fn hall(h: HallSystem) -> Self {
        Coordinates::Hall(h)
    }

    /// The field `F_{q^2}` where `q = p^k`.
    pub fn field_oracle(p: u32, k: u32) -> Result<Self> {
        let field = PrimePowerField::with_max_order(p, 2 * k, MAX_PLANE_ORDER)?;
        Ok(Coordinates::Field { base_order: (p as usize).pow(k), field })
    }

    pub fn kind(&self) -> PlaneKind {
        match self {
            Coordinates::Hall(_) => PlaneKind::Hall,
            Coordinates::Field { .. } => PlaneKind::Field,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Coordinates::Hall(h) => h.order(),
            Coordinates::Field { field, .. } => field.order(),
        }
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        match self {
            Coordinates::Hall(h) => h.add(a, b),
            Coordinates::Field { field, .. } => field.add(a as u8, b as u8) as u16,
        }
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        match self {
            Coordinates::Hall(h) => h.sub(a, b),
            Coordinates::Field { field, .. } => field.sub(a as u8, b as u8) as u16,
        }
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        match self {
            Coordinates::Hall(h) => h.mul(a, b),
            Coordinates::Field { field, .. } => field.mul(a as u8, b as u8) as u16,
        }
    }

    pub fn in_basefield(&self, a: u16) -> bool {
        match self {
            Coordinates::Hall(h) => h.is_base(a),
            Coordinates::Field { field, base_order } => field.pow(a as u8, *base_order as u64) == a as u8,
        }
    }

    /// The unique `m` with `a m = b`.
    pub fn solve_right_factor(&self, a: u16, b: u16) -> Result<u16> {
        match self {
            Coordinates::Hall(h) => h.solve_right_factor(a, b),
            Coordinates::Field { field, .. } => {
                field.div(b as u8, a as u8).map(u16::from).ok_or(Error::ZeroDivisor)
            }
        }
    }
}

pub struct PlaneTables {
    coords: Coordinates,
    n: usize,
    num_points: usize,
    num_lines: usize,
    line_points: Vec<u16>,
    point_lines: Vec<u16>,
    join: Vec<u16>,
    meet: Vec<u16>,
    incidence: Vec<bool>,
}

impl std::fmt::Debug for PlaneTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaneTables")
            .field("kind", &self.kind())
            .field("order", &self.n)
            .finish_non_exhaustive()
    }
}

/// Builds the projective plane over `coords`.
pub fn build_plane(coords: Coordinates) -> Result<PlaneTables> {
    PlaneTables::build(coords)
}

impl PlaneTables {
    pub fn hall(h: HallSystem) -> Result<Self> {
        Self::build(Coordinates::Hall(h))
    }

    /// The classical plane of order `(p^k)^2`.
    pub fn field_oracle(p: u32, k: u32) -> Result<Self> {
        Self::build(Coordinates::field_oracle(p, k)?)
    }

    pub fn build(coords: Coordinates) -> Result<Self> {
        let n = coords.order();
        if n > MAX_PLANE_ORDER {
            return Err(Error::PlaneTooLarge(n));
        }
        let num_points = n * n + n + 1;
        let num_lines = num_points;
        let per_line = n + 1;

        let mut line_points = Vec::with_capacity(num_lines * per_line);
        for c in 0..n {
            line_points.extend((0..n).map(|y| (c * n + y) as u16));
            line_points.push((n * n + n) as u16);
        }
        for m in 0..n {
            for k in 0..n {
                line_points.extend((0..n).map(|x| {
                    let y = coords.add(coords.mul(x as u16, m as u16), k as u16) as usize;
                    (x * n + y) as u16
                }));
                line_points.push((n * n + m) as u16);
            }
        }
        line_points.extend((n * n..num_points).map(|p| p as u16));

        let mut incidence = vec![false; num_lines * num_points];
        let mut point_lines = vec![Vec::with_capacity(per_line); num_points];
        for l in 0..num_lines {
            for &p in &line_points[l * per_line..(l + 1) * per_line] {
                if std::mem::replace(&mut incidence[l * num_points + p as usize], true) {
                    return Err(Error::NotAPlane(format!("line {l} repeats point {p}")));
                }
                point_lines[p as usize].push(l as u16);
            }
        }
        if let Some((p, ls)) = point_lines.iter().enumerate().find(|(_, ls)| ls.len() != per_line) {
            return Err(Error::NotAPlane(format!("point {p} is on {} lines", ls.len())));
        }
        let point_lines: Vec<u16> = point_lines.into_iter().flatten().collect();

        let mut join = vec![NONE; num_points * num_points];
        for l in 0..num_lines {
            let pts = &line_points[l * per_line..(l + 1) * per_line];
            for &a in pts {
                for &b in pts {
                    if a != b {
                        let slot = &mut join[a as usize * num_points + b as usize];
                        if *slot != NONE {
                            return Err(Error::NotAPlane(format!("points {a},{b} on two lines")));
                        }
                        *slot = l as u16;
                    }
                }
            }
        }
        let mut meet = vec![NONE; num_lines * num_lines];
        for p in 0..num_points {
            let ls = &point_lines[p * per_line..(p + 1) * per_line];
            for &a in ls {
                for &b in ls {
                    if a != b {
                        let slot = &mut meet[a as usize * num_lines + b as usize];
                        if *slot != NONE {
                            return Err(Error::NotAPlane(format!("lines {a},{b} meet twice")));
                        }
                        *slot = p as u16;
                    }
                }
            }
        }

        Ok(Self { coords, n, num_points, num_lines, line_points, point_lines, join, meet, incidence })
    }

    pub fn coords(&self) -> &Coordinates {
        &self.coords
    }

    pub fn hall_system(&self) -> Option<&HallSystem> {
        match &self.coords {
            Coordinates::Hall(h) => Some(h),
            Coordinates::Field { .. } => None,
        }
    }

    pub fn kind(&self) -> PlaneKind {
        self.coords.kind()
    }

    /// Plane order `n` (`q^2` for a Hall plane).
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.num_points).map(|p| PointId(p as u16))
    }

    pub fn lines(&self) -> impl Iterator<Item = LineId> {
        (0..self.num_lines).map(|l| LineId(l as u16))
    }

    pub fn affine_lines(&self) -> impl Iterator<Item = LineId> {
        (0..self.num_lines - 1).map(|l| LineId(l as u16))
    }

    pub fn infinity_line(&self) -> LineId {
        LineId((self.num_lines - 1) as u16)
    }

    pub fn origin(&self) -> PointId {
        PointId(0)
    }

    pub fn point(&self, id: PointId) -> Point {
        let (n, i) = (self.n, id.index());
        if i < n * n {
            Point::Affine { x: (i / n) as u16, y: (i % n) as u16 }
        } else if i < n * n + n {
            Point::Slope((i - n * n) as u16)
        } else {
            Point::VerticalInfinity
        }
    }

    pub fn point_id(&self, p: Point) -> PointId {
        let n = self.n;
        PointId(match p {
            Point::Affine { x, y } => x as usize * n + y as usize,
            Point::Slope(m) => n * n + m as usize,
            Point::VerticalInfinity => n * n + n,
        } as u16)
    }

    pub fn line(&self, id: LineId) -> Line {
        let (n, i) = (self.n, id.index());
        if i < n {
            Line::Vertical(i as u16)
        } else if i < n + n * n {
            let j = i - n;
            Line::Slanted { m: (j / n) as u16, k: (j % n) as u16 }
        } else {
            Line::Infinity
        }
    }

    pub fn line_id(&self, l: Line) -> LineId {
        let n = self.n;
        LineId(match l {
            Line::Vertical(c) => c as usize,
            Line::Slanted { m, k } => n + m as usize * n + k as usize,
            Line::Infinity => n + n * n,
        } as u16)
    }

    pub fn class(&self, l: LineId) -> LineClass {
        match self.line(l) {
            Line::Vertical(_) => LineClass::Bf,
            Line::Slanted { m, .. } if self.coords.in_basefield(m) => LineClass::Bf,
            Line::Slanted { .. } => LineClass::Nbf,
            Line::Infinity => LineClass::Infinity,
        }
    }

    pub fn direction(&self, l: LineId) -> Option<Direction> {
        match self.line(l) {
            Line::Vertical(_) => Some(Direction::Vertical),
            Line::Slanted { m, .. } => Some(Direction::Slope(m)),
            Line::Infinity => None,
        }
    }

    /// Points of `l` in ascending id order.
    #[inline]
    pub fn points_on(&self, l: LineId) -> &[u16] {
        let per = self.n + 1;
        &self.line_points[l.index() * per..(l.index() + 1) * per]
    }

    #[inline]
    pub fn lines_through(&self, p: PointId) -> &[u16] {
        let per = self.n + 1;
        &self.point_lines[p.index() * per..(p.index() + 1) * per]
    }

    #[inline]
    pub fn incident(&self, p: PointId, l: LineId) -> bool {
        self.incidence[l.index() * self.num_points + p.index()]
    }

    /// Incidence evaluated from the line equations rather than the tables.
    pub fn incident_by_equation(&self, p: Point, l: Line) -> bool {
        match (p, l) {
            (Point::Affine { x, .. }, Line::Vertical(c)) => x == c,
            (Point::Affine { x, y }, Line::Slanted { m, k }) => {
                y == self.coords.add(self.coords.mul(x, m), k)
            }
            (Point::Affine { .. }, Line::Infinity) => false,
            (Point::Slope(a), Line::Slanted { m, .. }) => a == m,
            (Point::Slope(_), Line::Vertical(_)) => false,
            (Point::VerticalInfinity, Line::Vertical(_)) => true,
            (Point::VerticalInfinity, Line::Slanted { .. }) => false,
            (_, Line::Infinity) => true,
        }
    }

    pub fn join(&self, p: PointId, q: PointId) -> Result<LineId> {
        if p == q {
            return Err(Error::CoincidentPoints);
        }
        Ok(LineId(self.join_raw(p.0, q.0)))
    }

    pub fn meet(&self, l: LineId, m: LineId) -> Result<PointId> {
        if l == m {
            return Err(Error::CoincidentLines);
        }
        Ok(PointId(self.meet_raw(l.0, m.0)))
    }

    /// Table lookup without the distinctness check; returns `u16::MAX` on the diagonal.
    #[inline]
    pub fn join_raw(&self, p: u16, q: u16) -> u16 {
        self.join[p as usize * self.num_points + q as usize]
    }

    #[inline]
    pub fn meet_raw(&self, l: u16, m: u16) -> u16 {
        self.meet[l as usize * self.num_lines + m as usize]
    }

    #[inline]
    pub fn incident_raw(&self, p: u16, l: u16) -> bool {
        self.incidence[l as usize * self.num_points + p as usize]
    }

    /// Join computed from coordinates: one quasifield division for two affine
    /// points with different abscissae.
    pub fn join_by_equation(&self, p: Point, q: Point) -> Result<Line> {
        let c = &self.coords;
        match (p, q) {
            _ if p == q => Err(Error::CoincidentPoints),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => {
                if x1 == x2 {
                    Ok(Line::Vertical(x1))
                } else {
                    // x1 m + k = y1 and x2 m + k = y2 give (x1 - x2) m = y1 - y2
                    let m = c.solve_right_factor(c.sub(x1, x2), c.sub(y1, y2))?;
                    Ok(Line::Slanted { m, k: c.sub(y1, c.mul(x1, m)) })
                }
            }
            (Point::Affine { x, y }, Point::Slope(m)) | (Point::Slope(m), Point::Affine { x, y }) => {
                Ok(Line::Slanted { m, k: c.sub(y, c.mul(x, m)) })
            }
            (Point::Affine { x, .. }, Point::VerticalInfinity)
            | (Point::VerticalInfinity, Point::Affine { x, .. }) => Ok(Line::Vertical(x)),
            _ => Ok(Line::Infinity),
        }
    }

    /// Meet computed from equations; two slanted lines of different slopes are
    /// intersected by scanning every abscissa.
    pub fn meet_by_equation(&self, l: Line, m: Line) -> Result<Point> {
        let c = &self.coords;
        match (l, m) {
            _ if l == m => Err(Error::CoincidentLines),
            (Line::Vertical(_), Line::Vertical(_)) => Ok(Point::VerticalInfinity),
            (Line::Vertical(x), Line::Slanted { m, k }) | (Line::Slanted { m, k }, Line::Vertical(x)) => {
                Ok(Point::Affine { x, y: c.add(c.mul(x, m), k) })
            }
            (Line::Slanted { m: m1, k: k1 }, Line::Slanted { m: m2, k: k2 }) => {
                if m1 == m2 {
                    return Ok(Point::Slope(m1));
                }
                let mut hits = (0..self.n as u16).filter(|&x| {
                    c.add(c.mul(x, m1), k1) == c.add(c.mul(x, m2), k2)
                });
                match (hits.next(), hits.next()) {
                    (Some(x), None) => Ok(Point::Affine { x, y: c.add(c.mul(x, m1), k1) }),
                    _ => Err(Error::NotAPlane(format!("{l:?} and {m:?} do not meet once"))),
                }
            }
            (Line::Infinity, Line::Vertical(_)) | (Line::Vertical(_), Line::Infinity) => {
                Ok(Point::VerticalInfinity)
            }
            (Line::Infinity, Line::Slanted { m, .. }) | (Line::Slanted { m, .. }, Line::Infinity) => {
                Ok(Point::Slope(m))
            }
            (Line::Infinity, Line::Infinity) => unreachable!(),
        }
    }

    /// Exhaustively checks the projective-plane axioms and the parallel structure.
    pub fn verify_axioms(&self) -> Result<()> {
        let np = self.num_points;
        if np != self.n * self.n + self.n + 1 || self.num_lines != np {
            return Err(Error::NotAPlane("wrong point or line count".into()));
        }
        for p in 0..np {
            for q in 0..np {
                if p == q {
                    continue;
                }
                let through_both = self
                    .lines()
                    .filter(|&l| self.incident(PointId(p as u16), l) && self.incident(PointId(q as u16), l))
                    .count();
                if through_both != 1 {
                    return Err(Error::NotAPlane(format!("points {p},{q} share {through_both} lines")));
                }
            }
        }
        for l in self.lines() {
            if self.points_on(l).len() != self.n + 1 {
                return Err(Error::NotAPlane(format!("line {} has wrong size", l.0)));
            }
            for m in self.lines().filter(|&m| m != l) {
                let common = self.points_on(l).iter().filter(|&&p| self.incident_raw(p, m.0)).count();
                if common != 1 {
                    return Err(Error::NotAPlane(format!("lines {},{} share {common} points", l.0, m.0)));
                }
            }
        }
        for l in self.affine_lines() {
            for m in self.affine_lines().filter(|&m| m != l) {
                let parallel = !matches!(self.point(PointId(self.meet_raw(l.0, m.0))), Point::Affine { .. });
                if parallel != (self.direction(l) == self.direction(m)) {
                    return Err(Error::NotAPlane(format!("parallelism wrong for {},{}", l.0, m.0)));
                }
            }
        }
        Ok(())
    }

    /// Affine lines grouped by direction: the vertical class first, then slopes by index.
    pub fn parallel_classes(&self) -> Vec<(Direction, Vec<LineId>)> {
        let mut classes: Vec<(Direction, Vec<LineId>)> = vec![(Direction::Vertical, Vec::new())];
        classes.extend((0..self.n as u16).map(|m| (Direction::Slope(m), Vec::new())));
        for l in self.affine_lines() {
            let slot = match self.direction(l).unwrap() {
                Direction::Vertical => 0,
                Direction::Slope(m) => 1 + m as usize,
            };
            classes[slot].1.push(l);
        }
        classes
    }

    pub fn count_class(&self, class: LineClass) -> usize {
        self.lines().filter(|&l| self.class(l) == class).count()
    }

    /// Writes `"<points> <lines>"` then one row of ascending point ids per line.
    pub fn export_incidence<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "{} {}", self.num_points, self.num_lines)?;
        let mut row = String::new();
        for l in self.lines() {
            row.clear();
            for (i, p) in self.points_on(l).iter().enumerate() {
                if i > 0 {
                    row.push(' ');
                }
                row.push_str(&p.to_string());
            }
            writeln!(sink, "{row}")?;
        }
        sink.flush()?;
        Ok(())
    }
}

/// Parsed incidence export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub num_points: usize,
    pub lines: Vec<Vec<usize>>,
}

impl Incidence {
    pub fn contains(&self, point: usize, line: usize) -> bool {
        self.lines[line].binary_search(&point).is_ok()
    }
}

pub fn parse_incidence<R: BufRead>(source: R) -> Result<Incidence> {
    let mut rows = source.lines();
    let header = rows.next().ok_or_else(|| Error::Parse("empty input".into()))??;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let [num_points, num_lines] = nums[..] else {
        return Err(Error::Parse(format!("bad header {header:?}")));
    };
    let mut lines = Vec::with_capacity(num_lines);
    for row in rows {
        let row = row?;
        let pts: Vec<usize> = row
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad row {row:?}"))))
            .collect::<Result<_>>()?;
        if pts.windows(2).any(|w| w[0] >= w[1]) || pts.iter().any(|&p| p >= num_points) {
            return Err(Error::Parse(format!("row not ascending or out of range: {row:?}")));
        }
        lines.push(pts);
    }
    if lines.len() != num_lines {
        return Err(Error::Parse(format!("expected {num_lines} rows, got {}", lines.len())));
    }
    Ok(Incidence { num_points, lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordsys::HallElement;

    fn hall(p: u32, k: u32) -> PlaneTables {
        PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, k).unwrap())).unwrap()
    }

    #[test]
    fn q3_counts() {
        let pl = hall(3, 1);
        assert_eq!(pl.num_points(), 91);
        assert_eq!(pl.num_lines(), 91);
        assert_eq!(pl.affine_lines().count(), 90);
        assert_eq!(pl.count_class(LineClass::Bf), 36);
        assert_eq!(pl.count_class(LineClass::Nbf), 54);
        assert_eq!(pl.count_class(LineClass::Infinity), 1);
    }

    #[test]
    fn incidence_examples() {
        let pl = hall(3, 1);
        let h = pl.hall_system().unwrap();
        let origin = Point::Affine { x: 0, y: 0 };
        for m in 0..9 {
            assert!(pl.incident_by_equation(origin, Line::Slanted { m, k: 0 }));
        }
        let p = Point::Affine { x: h.index(HallElement::new(1, 0)), y: h.index(HallElement::new(2, 0)) };
        let l = Line::Slanted { m: h.index(HallElement::new(2, 0)), k: 0 };
        assert!(pl.incident_by_equation(p, l));
        assert!(pl.incident(pl.point_id(p), pl.line_id(l)));
        assert!(!pl.incident_by_equation(Point::Slope(3), Line::Vertical(4)));
    }

    #[test]
    fn join_examples() {
        let pl = hall(3, 1);
        let h = pl.hall_system().unwrap();
        let two = h.index(HallElement::new(2, 0));
        let p = Point::Affine { x: 0, y: 0 };
        let q = Point::Affine { x: h.index(HallElement::new(1, 0)), y: two };
        assert_eq!(pl.join_by_equation(p, q).unwrap(), Line::Slanted { m: two, k: 0 });
        assert_eq!(pl.line(pl.join(pl.point_id(p), pl.point_id(q)).unwrap()), Line::Slanted { m: two, k: 0 });
        assert_eq!(
            pl.join_by_equation(Point::Affine { x: 4, y: 1 }, Point::Affine { x: 4, y: 7 }).unwrap(),
            Line::Vertical(4)
        );
        assert_eq!(pl.join_by_equation(Point::Slope(1), Point::Slope(5)).unwrap(), Line::Infinity);
        assert!(matches!(pl.join(PointId(3), PointId(3)), Err(Error::CoincidentPoints)));
    }

    #[test]
    fn meet_examples() {
        let pl = hall(3, 1);
        let c = &pl.coords;
        let (x, m, k) = (5, 7, 2);
        assert_eq!(
            pl.meet_by_equation(Line::Vertical(x), Line::Slanted { m, k }).unwrap(),
            Point::Affine { x, y: c.add(c.mul(x, m), k) }
        );
        assert_eq!(
            pl.meet_by_equation(Line::Slanted { m, k: 1 }, Line::Slanted { m, k: 3 }).unwrap(),
            Point::Slope(m)
        );
        assert!(matches!(pl.meet(LineId(2), LineId(2)), Err(Error::CoincidentLines)));
    }

    #[test]
    fn equations_agree_with_tables_q3() {
        let pl = hall(3, 1);
        for a in pl.points() {
            for b in pl.points().filter(|&b| b != a) {
                let l = pl.join_by_equation(pl.point(a), pl.point(b)).unwrap();
                assert_eq!(pl.line_id(l), pl.join(a, b).unwrap());
            }
        }
        for l in pl.lines() {
            for m in pl.lines().filter(|&m| m != l) {
                let p = pl.meet_by_equation(pl.line(l), pl.line(m)).unwrap();
                assert_eq!(pl.point_id(p), pl.meet(l, m).unwrap());
            }
            for p in pl.points() {
                assert_eq!(pl.incident(p, l), pl.incident_by_equation(pl.point(p), pl.line(l)));
            }
        }
    }

    #[test]
    fn id_round_trips() {
        let pl = hall(2, 1);
        for p in pl.points() {
            assert_eq!(pl.point_id(pl.point(p)), p);
        }
        for l in pl.lines() {
            assert_eq!(pl.line_id(pl.line(l)), l);
        }
        assert_eq!(pl.line(pl.infinity_line()), Line::Infinity);
    }

    #[test]
    fn parallel_partition() {
        let pl = hall(3, 1);
        let classes = pl.parallel_classes();
        assert_eq!(classes.len(), 10);
        assert!(classes.iter().all(|(_, ls)| ls.len() == 9));
    }

    #[test]
    fn export_shape_and_round_trip() {
        let pl = hall(3, 1);
        let mut buf = Vec::new();
        pl.export_incidence(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut rows = text.lines();
        assert_eq!(rows.next(), Some("91 91"));
        assert_eq!(rows.clone().count(), 91);
        assert!(rows.all(|r| r.split(' ').count() == 10));
        let inc = parse_incidence(&buf[..]).unwrap();
        for l in pl.lines() {
            for p in pl.points() {
                assert_eq!(inc.contains(p.index(), l.index()), pl.incident(p, l));
            }
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_incidence(&b""[..]).is_err());
        assert!(parse_incidence(&b"3 1\n2 1\n"[..]).is_err());
        assert!(parse_incidence(&b"3 2\n0 1\n"[..]).is_err());
        assert!(parse_incidence(&b"x y\n"[..]).is_err());
    }

    #[test]
    fn oracle_plane_counts() {
        let pl = PlaneTables::field_oracle(3, 1).unwrap();
        assert_eq!(pl.kind(), PlaneKind::Field);
        assert_eq!(pl.num_points(), 91);
        // subfield F_3 of F_9 plays the basefield
        assert_eq!(pl.count_class(LineClass::Bf), 36);
        pl.verify_axioms().unwrap();
    }

    #[test]
    fn too_large_rejected() {
        let h = HallSystem::new(PrimePowerField::new(3, 2).unwrap());
        assert!(matches!(PlaneTables::hall(h), Err(Error::PlaneTooLarge(81))));
    }
}
