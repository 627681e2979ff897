//! Pappus configurations on a pair of lines, the `k+m` question solvers, and
//! Desargues and non-Pappus witnesses.
//!
//! A sextuple is nondegenerate when its six points are distinct and none is
//! the meet of the two lines. Under that convention the cross points are
//! automatically distinct and off both lines, so a nondegenerate sextuple is a
//! Pappus configuration exactly when its cross points are collinear.
//! [`Mode::Relaxed`] also admits the meet point and counts collinear cross
//! points as Pappus even when some of them coincide.

mod desargues;
mod questions;

use serde::{Deserialize, Serialize};

use crate::collineations::{canonical_pair_representatives, canonicalize_pair, PairCase};
use crate::error::{Error, Result};
use crate::plane::{LineId, PlaneKind, PlaneTables, PointId};

pub use desargues::{exists_desargues, verify_desargues, DesarguesWitness};
pub use questions::{
    check_monotonicity, count_pappus, find_non_pappus_witness, question_2p0, question_3p0, question_3p1,
    question_3p2, question_3p3, replay_witness, run_question, Question, QuestionVerdict, SearchOptions, Witness,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Nondegenerate,
    Relaxed,
}

/// Which points of a line may be chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointScope {
    /// Points off the line at infinity. Pairs involving that line fall back
    /// to [`PointScope::Projective`], since it has no affine points.
    #[default]
    Affine,
    Projective,
}

impl PointScope {
    /// Scope actually used on `pair`.
    pub fn effective(self, plane: &PlaneTables, pair: &LinePair) -> PointScope {
        let inf = plane.infinity_line();
        if pair.l1 == inf || pair.l2 == inf {
            PointScope::Projective
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Sextuple {
    pub l1: LineId,
    pub l2: LineId,
    pub a1: PointId,
    pub b1: PointId,
    pub c1: PointId,
    pub a2: PointId,
    pub b2: PointId,
    pub c2: PointId,
}

impl Sextuple {
    /// Points in the order `A1 B1 C1 A2 B2 C2`.
    pub fn from_raw(l1: LineId, l2: LineId, p: [u16; 6]) -> Self {
        Self {
            l1,
            l2,
            a1: PointId(p[0]),
            b1: PointId(p[1]),
            c1: PointId(p[2]),
            a2: PointId(p[3]),
            b2: PointId(p[4]),
            c2: PointId(p[5]),
        }
    }

    pub fn raw(&self) -> [u16; 6] {
        [self.a1.0, self.b1.0, self.c1.0, self.a2.0, self.b2.0, self.c2.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PappusOutcome {
    pub a3: PointId,
    pub b3: PointId,
    pub c3: PointId,
    /// Line through the cross points, when they are collinear and not all equal.
    pub pappus_line: Option<LineId>,
    pub is_pappus: bool,
    pub is_ninety_three: bool,
    /// Cross points collinear, coincidences allowed.
    pub collinear: bool,
}

/// An ordered pair of distinct lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinePair {
    pub l1: LineId,
    pub l2: LineId,
    pub case: Option<PairCase>,
}

impl LinePair {
    pub fn new(plane: &PlaneTables, l1: LineId, l2: LineId) -> Self {
        let case = (plane.kind() == PlaneKind::Hall).then(|| PairCase::classify(plane, l1, l2));
        Self { l1, l2, case }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSet {
    /// One pair per canonical shape, plus the four pairs with the line at infinity.
    Canonical,
    All,
    Infinity,
}

pub fn pair_set(plane: &PlaneTables, set: PairSet) -> Result<Vec<LinePair>> {
    let all = || {
        plane
            .lines()
            .flat_map(move |a| plane.lines().filter(move |&b| b != a).map(move |b| LinePair::new(plane, a, b)))
    };
    Ok(match set {
        PairSet::Canonical => canonical_pair_representatives(plane)?
            .into_iter()
            .map(|r| LinePair { l1: r.l1, l2: r.l2, case: Some(r.case) })
            .collect(),
        PairSet::All => all().collect(),
        PairSet::Infinity => {
            let inf = plane.infinity_line();
            all().filter(|p| p.l1 == inf || p.l2 == inf).collect()
        }
    })
}

/// The canonical pair in the orbit of `(l1, l2)`, for affine pairs.
pub fn canonical_image(plane: &PlaneTables, l1: LineId, l2: LineId) -> Result<LinePair> {
    let (_, form) = canonicalize_pair(plane, l1, l2, None)?;
    Ok(LinePair { l1: plane.line_id(form.l1), l2: plane.line_id(form.l2), case: Some(form.case) })
}

/// Points of `l` usable in a sextuple on `pair` under `mode` and `scope`, ascending.
pub fn candidates(plane: &PlaneTables, pair: &LinePair, on_first: bool, mode: Mode, scope: PointScope) -> Vec<u16> {
    let l = if on_first { pair.l1 } else { pair.l2 };
    let o = plane.meet_raw(pair.l1.0, pair.l2.0);
    let inf = plane.infinity_line().0;
    let affine_only = scope.effective(plane, pair) == PointScope::Affine;
    plane
        .points_on(l)
        .iter()
        .copied()
        .filter(|&p| mode == Mode::Relaxed || p != o)
        .filter(|&p| !affine_only || !plane.incident_raw(p, inf))
        .collect()
}

fn cross_points(plane: &PlaneTables, p: [u16; 6]) -> Option<[u16; 3]> {
    let [a1, b1, c1, a2, b2, c2] = p;
    let meet = |u: u16, v: u16, w: u16, x: u16| {
        let (l, m) = (plane.join_raw(u, v), plane.join_raw(w, x));
        (l != m).then(|| plane.meet_raw(l, m))
    };
    Some([meet(b1, c2, b2, c1)?, meet(a1, c2, a2, c1)?, meet(a1, b2, a2, b1)?])
}

/// Collinearity of the cross points of a sextuple that is nondegenerate by construction.
#[inline]
pub(crate) fn is_pappus_fast(plane: &PlaneTables, p: [u16; 6]) -> bool {
    let [a1, b1, c1, a2, b2, c2] = p;
    let a3 = plane.meet_raw(plane.join_raw(b1, c2), plane.join_raw(b2, c1));
    let b3 = plane.meet_raw(plane.join_raw(a1, c2), plane.join_raw(a2, c1));
    let c3 = plane.meet_raw(plane.join_raw(a1, b2), plane.join_raw(a2, b1));
    plane.incident_raw(c3, plane.join_raw(a3, b3))
}

/// Relaxed verdict; `None` when the points are not six distinct points or a
/// pair of cross lines coincides.
pub(crate) fn is_pappus_relaxed(plane: &PlaneTables, p: [u16; 6]) -> Option<bool> {
    for i in 0..6 {
        if p[i + 1..].contains(&p[i]) {
            return None;
        }
    }
    let [a3, b3, c3] = cross_points(plane, p)?;
    Some(a3 == b3 || a3 == c3 || b3 == c3 || plane.incident_raw(c3, plane.join_raw(a3, b3)))
}

/// Verdict of a sextuple under `mode`, with the same skip convention as
/// [`is_pappus_relaxed`].
#[inline]
pub(crate) fn holds(plane: &PlaneTables, mode: Mode, p: [u16; 6]) -> Option<bool> {
    match mode {
        Mode::Nondegenerate => Some(is_pappus_fast(plane, p)),
        Mode::Relaxed => is_pappus_relaxed(plane, p),
    }
}

fn validate(plane: &PlaneTables, s: &Sextuple, mode: Mode) -> Result<()> {
    if s.l1 == s.l2 {
        return Err(Error::DegenerateSextuple("the two lines coincide".into()));
    }
    let o = plane.meet(s.l1, s.l2)?;
    let p = s.raw();
    for i in 0..6 {
        if p[i + 1..].contains(&p[i]) {
            return Err(Error::DegenerateSextuple(format!("point {} repeated", p[i])));
        }
        let own = if i < 3 { s.l1 } else { s.l2 };
        if !plane.incident(PointId(p[i]), own) {
            return Err(Error::DegenerateSextuple(format!("point {} is off its line", p[i])));
        }
        if mode == Mode::Nondegenerate && p[i] == o.0 {
            return Err(Error::DegenerateSextuple(format!("point {} is the meet of the lines", p[i])));
        }
    }
    Ok(())
}

/// Full evaluation of a nondegenerate sextuple, including the 9_3 incidence check.
pub fn pappus_check(plane: &PlaneTables, s: &Sextuple) -> Result<PappusOutcome> {
    validate(plane, s, Mode::Nondegenerate)?;
    Ok(evaluate(plane, s))
}

/// As [`pappus_check`], but the meet point may be one of the six.
pub fn pappus_check_relaxed(plane: &PlaneTables, s: &Sextuple) -> Result<PappusOutcome> {
    validate(plane, s, Mode::Relaxed)?;
    cross_points(plane, s.raw()).ok_or_else(|| Error::DegenerateSextuple("two cross lines coincide".into()))?;
    Ok(evaluate(plane, s))
}

/// Checks a sextuple under `mode` and returns the verdict used by the questions.
pub fn pappus_check_mode(plane: &PlaneTables, s: &Sextuple, mode: Mode) -> Result<bool> {
    Ok(match mode {
        Mode::Nondegenerate => pappus_check(plane, s)?.is_pappus,
        Mode::Relaxed => pappus_check_relaxed(plane, s)?.collinear,
    })
}

fn evaluate(plane: &PlaneTables, s: &Sextuple) -> PappusOutcome {
    let p = s.raw();
    let [a3, b3, c3] = cross_points(plane, p).expect("validated");
    let distinct = a3 != b3 && a3 != c3 && b3 != c3;
    let pappus_line = if a3 != b3 {
        Some(plane.join_raw(a3, b3))
    } else if a3 != c3 {
        Some(plane.join_raw(a3, c3))
    } else {
        None
    };
    let collinear = !distinct || pappus_line.is_some_and(|l| plane.incident_raw(c3, l));
    let pappus_line = pappus_line.filter(|&l| plane.incident_raw(a3, l) && plane.incident_raw(b3, l) && plane.incident_raw(c3, l));

    let is_ninety_three = distinct && collinear && {
        let [a1, b1, c1, a2, b2, c2] = p;
        let points = [a1, b1, c1, a2, b2, c2, a3, b3, c3];
        let lines = [
            s.l1.0,
            s.l2.0,
            plane.join_raw(b1, c2),
            plane.join_raw(b2, c1),
            plane.join_raw(a1, c2),
            plane.join_raw(a2, c1),
            plane.join_raw(a1, b2),
            plane.join_raw(a2, b1),
            pappus_line.expect("collinear distinct points"),
        ];
        let all_distinct = |xs: &[u16]| (0..xs.len()).all(|i| !xs[i + 1..].contains(&xs[i]));
        all_distinct(&points)
            && all_distinct(&lines)
            && lines.iter().all(|&l| points.iter().filter(|&&q| plane.incident_raw(q, l)).count() == 3)
            && points.iter().all(|&q| lines.iter().filter(|&&l| plane.incident_raw(q, l)).count() == 3)
    };
    PappusOutcome {
        a3: PointId(a3),
        b3: PointId(b3),
        c3: PointId(c3),
        pappus_line: pappus_line.map(LineId),
        is_pappus: is_ninety_three,
        is_ninety_three,
        collinear,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordsys::HallSystem;
    use crate::field::PrimePowerField;

    fn hall(p: u32) -> PlaneTables {
        PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, 1).unwrap())).unwrap()
    }

    fn first_sextuple(plane: &PlaneTables, pair: &LinePair) -> Sextuple {
        let c1 = candidates(plane, pair, true, Mode::Nondegenerate, PointScope::Projective);
        let c2 = candidates(plane, pair, false, Mode::Nondegenerate, PointScope::Projective);
        Sextuple::from_raw(pair.l1, pair.l2, [c1[0], c1[1], c1[2], c2[0], c2[1], c2[2]])
    }

    #[test]
    fn repeated_point_rejected() {
        let pl = hall(3);
        let pair = pair_set(&pl, PairSet::Canonical).unwrap()[0];
        let mut s = first_sextuple(&pl, &pair);
        s.b1 = s.a1;
        assert!(matches!(pappus_check(&pl, &s), Err(Error::DegenerateSextuple(_))));
    }

    #[test]
    fn meet_point_rejected_only_in_strict_mode() {
        let pl = hall(3);
        let pair = pair_set(&pl, PairSet::Canonical).unwrap()[0];
        let mut s = first_sextuple(&pl, &pair);
        s.a1 = pl.meet(pair.l1, pair.l2).unwrap();
        assert!(matches!(pappus_check(&pl, &s), Err(Error::DegenerateSextuple(_))));
        let out = pappus_check_relaxed(&pl, &s).unwrap();
        assert!(!out.is_ninety_three);
    }

    #[test]
    fn fast_path_matches_full_check() {
        let pl = hall(3);
        for pair in pair_set(&pl, PairSet::Canonical).unwrap() {
            let c1 = candidates(&pl, &pair, true, Mode::Nondegenerate, PointScope::Projective);
            let c2 = candidates(&pl, &pair, false, Mode::Nondegenerate, PointScope::Projective);
            for (i, &x) in c2.iter().enumerate().take(4) {
                for &y in c2.iter().skip(i + 1).take(3) {
                    for &z in c2.iter().filter(|&&z| z != x && z != y).take(4) {
                        let p = [c1[0], c1[2], c1[5], x, y, z];
                        let full = pappus_check(&pl, &Sextuple::from_raw(pair.l1, pair.l2, p)).unwrap();
                        assert_eq!(full.is_pappus, is_pappus_fast(&pl, p));
                        assert_eq!(full.is_pappus, full.collinear);
                        assert_eq!(full.is_pappus, full.pappus_line.is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_pair_set_shape() {
        let pl = hall(3);
        let set = pair_set(&pl, PairSet::Canonical).unwrap();
        assert_eq!(set.len(), 26 + 4);
        assert_eq!(pair_set(&pl, PairSet::Infinity).unwrap().len(), 2 * 90);
        assert!(matches!(pair_set(&PlaneTables::field_oracle(3, 1).unwrap(), PairSet::Canonical), Err(Error::NotHall)));
    }
}
