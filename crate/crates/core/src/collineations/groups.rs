//! Explicit orbit computations for the translation, autotopism and linear
//! subgroups and the groups they generate.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::{Collineation, Mat2};
use crate::error::{Error, Result};
use crate::plane::{Direction, Line, LineClass, LineId, PlaneTables, Point};

pub fn tr_elements(plane: &PlaneTables) -> Result<Vec<Collineation>> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    Ok(h.elements()
        .flat_map(|a| h.elements().map(move |b| Collineation::Translation { a, b }))
        .collect())
}

pub fn atp_elements(plane: &PlaneTables) -> Result<Vec<Collineation>> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    Ok(Mat2::general_linear(h.basefield()).into_iter().map(Collineation::Autotopism).collect())
}

pub fn lnr_elements(plane: &PlaneTables) -> Result<Vec<Collineation>> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let f = h.basefield();
    Ok(f.elements()
        .flat_map(|a| f.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0))
        .map(|(a, b)| Collineation::Linear { a, b })
        .collect())
}

/// Orbit of `start` under the group generated by permutations `gens`, sorted.
pub fn orbit(start: u16, gens: &[Vec<u16>]) -> Vec<u16> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g[x as usize];
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// All orbits of the permutation group on `domain`, each sorted, ordered by least element.
fn orbits(domain: impl Iterator<Item = u16>, gens: &[Vec<u16>]) -> Vec<Vec<u16>> {
    let mut assigned = HashSet::new();
    let mut out = Vec::new();
    for x in domain {
        if assigned.contains(&x) {
            continue;
        }
        let o = orbit(x, gens);
        assigned.extend(o.iter().copied());
        out.push(o);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub q: usize,
    /// Distinct point maps in each family.
    pub tr_size: usize,
    pub atp_size: usize,
    pub lnr_size: usize,
    pub generators_preserve_collinearity: bool,
    pub tr_sharply_transitive: bool,
    pub tr_fixes_parallel_classes: bool,
    pub tr_transitive_within_classes: bool,
    pub tr_composition_adds_parameters: bool,
    pub atp_fixes_type1_classes: bool,
    pub atp_transitive_on_type2_classes: bool,
    /// Orbit sizes of ATP on vertical lines.
    pub atp_vertical_orbits: Vec<usize>,
    pub lnr_fixes_nbf_classes: bool,
    pub lnr_transitive_on_bf_classes: bool,
    pub lnr_closed_under_composition: bool,
    pub lnr_orders_divide: bool,
    /// Orbit of the line `y = x(0,1)` under TR and ATP.
    pub tr_atp_type2_orbit: usize,
    /// Orbit of the line `x = 0` under TR and ATP.
    pub tr_atp_vertical_orbit: usize,
    /// True if TR and ATP are transitive on type-2 lines and vertical lines taken together.
    pub tr_atp_transitive_on_union: bool,
    /// Orbit of `x = 0` under TR and LNR.
    pub tr_lnr_bf_orbit: usize,
    /// Orbit sizes of the group generated by all three families on affine lines.
    pub full_group_line_orbits: Vec<usize>,
    /// The two orbits are exactly the BF and NBF lines.
    pub orbits_are_bf_and_nbf: bool,
}

impl GroupReport {
    /// True when every propositional check holds with the expected sizes.
    pub fn all_hold(&self) -> bool {
        let q = self.q;
        let q2 = q * q;
        let mut line_orbits = vec![q2 * q + q2, q2 * q2 - q2 * q];
        line_orbits.sort_unstable();
        self.tr_size == q2 * q2
            && self.atp_size == (q2 - 1) * (q2 - q)
            && self.lnr_size == q2 - 1
            && self.generators_preserve_collinearity
            && self.tr_sharply_transitive
            && self.tr_fixes_parallel_classes
            && self.tr_transitive_within_classes
            && self.tr_composition_adds_parameters
            && self.atp_fixes_type1_classes
            && self.atp_transitive_on_type2_classes
            && self.atp_vertical_orbits == vec![1, q2 - 1]
            && self.lnr_fixes_nbf_classes
            && self.lnr_transitive_on_bf_classes
            && self.lnr_closed_under_composition
            && self.lnr_orders_divide
            && self.tr_atp_type2_orbit == q2 * q2 - q2 * q
            && self.tr_atp_vertical_orbit == q2
            && self.tr_lnr_bf_orbit == q2 * q + q2
            && self.full_group_line_orbits == line_orbits
            && self.orbits_are_bf_and_nbf
    }
}

fn distinct(perms: &[Vec<u16>]) -> usize {
    perms.iter().collect::<HashSet<_>>().len()
}

fn compose(first: &[u16], second: &[u16]) -> Vec<u16> {
    first.iter().map(|&x| second[x as usize]).collect()
}

/// Checks the transitivity and orbit statements for TR, ATP and LNR by explicit enumeration.
pub fn verify_group_propositions(plane: &PlaneTables) -> Result<GroupReport> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let (q, n) = (h.q(), h.order());
    let tr = tr_elements(plane)?;
    let atp = atp_elements(plane)?;
    let lnr = lnr_elements(plane)?;

    let point_perms = |gs: &[Collineation]| -> Result<Vec<Vec<u16>>> {
        gs.iter().map(|g| g.point_permutation(plane)).collect()
    };
    let line_perms = |gs: &[Collineation]| -> Result<Vec<Vec<u16>>> {
        gs.iter().map(|g| g.line_permutation(plane)).collect()
    };
    let tr_pts = point_perms(&tr)?;
    let atp_pts = point_perms(&atp)?;
    let lnr_pts = point_perms(&lnr)?;
    let tr_lines = line_perms(&tr)?;
    let atp_lines = line_perms(&atp)?;
    let lnr_lines = line_perms(&lnr)?;

    let mut preserve = true;
    for g in tr.iter().chain(&atp).chain(&lnr) {
        preserve &= g.preserves_collinearity(plane)?;
    }

    // Each affine point is the image of the origin under exactly one translation.
    let origin = plane.origin().index();
    let mut hits = vec![0usize; plane.num_points()];
    for p in &tr_pts {
        hits[p[origin] as usize] += 1;
    }
    let tr_sharply_transitive = hits[..n * n].iter().all(|&c| c == 1) && hits[n * n..].iter().all(|&c| c == 0);

    let dir = |l: u16| plane.direction(LineId(l));
    let affine: Vec<u16> = plane.affine_lines().map(|l| l.0).collect();
    let tr_fixes_parallel_classes = tr_lines.iter().all(|g| affine.iter().all(|&l| dir(g[l as usize]) == dir(l)));
    let tr_transitive_within_classes = plane
        .parallel_classes()
        .iter()
        .all(|(_, ls)| orbit(ls[0].0, &tr_lines).len() == ls.len());

    let tr_composition_adds_parameters = {
        let pick = [(1u16, 0u16), (0, 1), (n as u16 - 1, 2 % n as u16)];
        pick.iter().all(|&(a1, b1)| {
            pick.iter().all(|&(a2, b2)| {
                let lhs = compose(&tr_pts[a1 as usize * n + b1 as usize], &tr_pts[a2 as usize * n + b2 as usize]);
                let (a, b) = (h.add(a1, a2), h.add(b1, b2));
                lhs == tr_pts[a as usize * n + b as usize]
            })
        })
    };

    // Parallel classes are indexed by slope points on the line at infinity.
    let slope_point = |d: Direction| match d {
        Direction::Vertical => plane.point_id(Point::VerticalInfinity).0,
        Direction::Slope(m) => plane.point_id(Point::Slope(m)).0,
    };
    let type1: Vec<u16> = (0..n as u16).filter(|&m| h.is_base(m)).map(|m| slope_point(Direction::Slope(m))).collect();
    let type2: Vec<u16> = (0..n as u16).filter(|&m| !h.is_base(m)).map(|m| slope_point(Direction::Slope(m))).collect();
    let mut bf_classes = type1.clone();
    bf_classes.push(slope_point(Direction::Vertical));

    let atp_fixes_type1_classes = atp_pts.iter().all(|g| type1.iter().all(|&p| g[p as usize] == p));
    let atp_transitive_on_type2_classes = orbit(type2[0], &atp_pts) == type2;
    let verticals: Vec<u16> = (0..n as u16).map(|c| plane.line_id(Line::Vertical(c)).0).collect();
    let mut atp_vertical_orbits: Vec<usize> =
        orbits(verticals.iter().copied(), &atp_lines).iter().map(|o| o.len()).collect();
    atp_vertical_orbits.sort_unstable();

    let lnr_fixes_nbf_classes = lnr_pts.iter().all(|g| type2.iter().all(|&p| g[p as usize] == p));
    let mut sorted_bf = bf_classes.clone();
    sorted_bf.sort_unstable();
    let lnr_transitive_on_bf_classes = orbit(bf_classes[0], &lnr_pts) == sorted_bf;
    let lnr_set: HashSet<&Vec<u16>> = lnr_pts.iter().collect();
    let lnr_closed_under_composition =
        lnr_pts.iter().all(|g1| lnr_pts.iter().all(|g2| lnr_set.contains(&compose(g1, g2))));
    let identity: Vec<u16> = (0..plane.num_points() as u16).collect();
    let lnr_orders_divide = lnr_pts.iter().all(|g| {
        let mut acc = g.clone();
        let mut order = 1;
        while acc != identity {
            acc = compose(&acc, g);
            order += 1;
        }
        (n - 1) % order == 0
    });

    let tr_atp: Vec<Vec<u16>> = tr_lines.iter().chain(&atp_lines).cloned().collect();
    let tr_lnr: Vec<Vec<u16>> = tr_lines.iter().chain(&lnr_lines).cloned().collect();
    let all: Vec<Vec<u16>> = tr_lines.iter().chain(&atp_lines).chain(&lnr_lines).cloned().collect();
    let nbf_line = plane.line_id(Line::Slanted { m: h.index(crate::coordsys::HallElement::new(0, 1)), k: 0 }).0;
    let vertical0 = plane.line_id(Line::Vertical(0)).0;
    let tr_atp_type2 = orbit(nbf_line, &tr_atp);
    let tr_atp_vert = orbit(vertical0, &tr_atp);
    let tr_atp_transitive_on_union = tr_atp_type2.contains(&vertical0);

    let full = orbits(affine.iter().copied(), &all);
    let mut full_group_line_orbits: Vec<usize> = full.iter().map(|o| o.len()).collect();
    full_group_line_orbits.sort_unstable();
    let orbits_are_bf_and_nbf = full.len() == 2
        && full.iter().all(|o| {
            let c = plane.class(LineId(o[0]));
            o.iter().all(|&l| plane.class(LineId(l)) == c)
                && o.len() == affine.iter().filter(|&&l| plane.class(LineId(l)) == c).count()
        })
        && full.iter().all(|o| plane.class(LineId(o[0])) != LineClass::Infinity);

    Ok(GroupReport {
        q,
        tr_size: distinct(&tr_pts),
        atp_size: distinct(&atp_pts),
        lnr_size: distinct(&lnr_pts),
        generators_preserve_collinearity: preserve,
        tr_sharply_transitive,
        tr_fixes_parallel_classes,
        tr_transitive_within_classes,
        tr_composition_adds_parameters,
        atp_fixes_type1_classes,
        atp_transitive_on_type2_classes,
        atp_vertical_orbits,
        lnr_fixes_nbf_classes,
        lnr_transitive_on_bf_classes,
        lnr_closed_under_composition,
        lnr_orders_divide,
        tr_atp_type2_orbit: tr_atp_type2.len(),
        tr_atp_vertical_orbit: tr_atp_vert.len(),
        tr_atp_transitive_on_union,
        tr_lnr_bf_orbit: orbit(vertical0, &tr_lnr).len(),
        full_group_line_orbits,
        orbits_are_bf_and_nbf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordsys::HallSystem;
    use crate::field::PrimePowerField;

    #[test]
    fn orbit_of_cycle() {
        let g = vec![vec![1, 2, 0, 3]];
        assert_eq!(orbit(0, &g), vec![0, 1, 2]);
        assert_eq!(orbit(3, &g), vec![3]);
    }

    #[test]
    fn q3_report() {
        let pl = PlaneTables::hall(HallSystem::new(PrimePowerField::new(3, 1).unwrap())).unwrap();
        let rep = verify_group_propositions(&pl).unwrap();
        assert_eq!(rep.tr_size, 81);
        assert_eq!(rep.atp_size, 48);
        assert_eq!(rep.lnr_size, 8);
        assert_eq!(rep.tr_lnr_bf_orbit, 36);
        assert_eq!(rep.tr_atp_type2_orbit, 54);
        assert_eq!(rep.full_group_line_orbits, vec![36, 54]);
        assert!(!rep.tr_atp_transitive_on_union);
        assert!(rep.all_hold(), "{rep:#?}");
    }

    #[test]
    fn field_plane_rejected() {
        let pl = PlaneTables::field_oracle(3, 1).unwrap();
        assert!(matches!(verify_group_propositions(&pl), Err(Error::NotHall)));
    }
}
