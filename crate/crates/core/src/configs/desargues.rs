//! Desargues configurations found by the pigeonhole argument: fix a center,
//! three lines through it, an axis and two points `R`, `S` on the axis. Each
//! point `X1` on the first line gives a triangle with two sides through `R`
//! and `S`; two triangles whose third sides hit the axis in the same point
//! are in perspective from the center and from the axis.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::plane::{LineId, PlaneTables, PointId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DesarguesWitness {
    pub center: PointId,
    /// Lines through the center carrying corresponding vertices.
    pub rays: [LineId; 3],
    pub x: [PointId; 3],
    pub y: [PointId; 3],
    pub axis: LineId,
    /// Meets of corresponding sides `X1X2/Y1Y2`, `X1X3/Y1Y3`, `X2X3/Y2Y3`.
    pub axis_points: [PointId; 3],
}

impl DesarguesWitness {
    pub fn points(&self) -> [u16; 10] {
        let [x1, x2, x3] = self.x.map(|p| p.0);
        let [y1, y2, y3] = self.y.map(|p| p.0);
        let [r, s, t] = self.axis_points.map(|p| p.0);
        [self.center.0, x1, x2, x3, y1, y2, y3, r, s, t]
    }
}

/// Checks the ten points and ten lines of the configuration, with every line
/// through exactly three of the points and every point on exactly three lines.
pub fn verify_desargues(plane: &PlaneTables, w: &DesarguesWitness) -> std::result::Result<(), String> {
    let pts = w.points();
    if (0..10).any(|i| pts[i + 1..].contains(&pts[i])) {
        return Err("points are not distinct".into());
    }
    let [x1, x2, x3] = w.x.map(|p| p.0);
    let [y1, y2, y3] = w.y.map(|p| p.0);
    let lines = [
        w.rays[0].0,
        w.rays[1].0,
        w.rays[2].0,
        plane.join_raw(x1, x2),
        plane.join_raw(x1, x3),
        plane.join_raw(x2, x3),
        plane.join_raw(y1, y2),
        plane.join_raw(y1, y3),
        plane.join_raw(y2, y3),
        w.axis.0,
    ];
    if (0..10).any(|i| lines[i + 1..].contains(&lines[i])) {
        return Err("lines are not distinct".into());
    }
    let on = |p: u16, l: u16| plane.incident_raw(p, l);
    let required = [
        (w.rays[0].0, [w.center.0, x1, y1]),
        (w.rays[1].0, [w.center.0, x2, y2]),
        (w.rays[2].0, [w.center.0, x3, y3]),
        (lines[3], [x1, x2, w.axis_points[0].0]),
        (lines[4], [x1, x3, w.axis_points[1].0]),
        (lines[5], [x2, x3, w.axis_points[2].0]),
        (lines[6], [y1, y2, w.axis_points[0].0]),
        (lines[7], [y1, y3, w.axis_points[1].0]),
        (lines[8], [y2, y3, w.axis_points[2].0]),
        (w.axis.0, w.axis_points.map(|p| p.0)),
    ];
    for (l, ps) in required {
        if !ps.iter().all(|&p| on(p, l)) {
            return Err(format!("line {l} misses one of {ps:?}"));
        }
    }
    if !lines.iter().all(|&l| pts.iter().filter(|&&p| on(p, l)).count() == 3) {
        return Err("a line carries more than three configuration points".into());
    }
    if !pts.iter().all(|&p| lines.iter().filter(|&&l| on(p, l)).count() == 3) {
        return Err("a point lies on more than three configuration lines".into());
    }
    Ok(())
}

/// First verified Desargues configuration in a deterministic search centred
/// at the origin, then at the remaining points.
pub fn exists_desargues(plane: &PlaneTables) -> Result<DesarguesWitness> {
    let origin = plane.origin();
    let centers = std::iter::once(origin).chain(plane.points().filter(|&p| p != origin));
    for center in centers {
        let through = plane.lines_through(center);
        for i in 0..through.len() {
            for j in i + 1..through.len() {
                for k in j + 1..through.len() {
                    let rays = [through[i], through[j], through[k]];
                    if let Some(w) = search_rays(plane, center.0, rays) {
                        return Ok(w);
                    }
                }
            }
        }
    }
    Err(Error::NotFound)
}

fn search_rays(plane: &PlaneTables, center: u16, rays: [u16; 3]) -> Option<DesarguesWitness> {
    let on_ray = |p: u16| rays.iter().any(|&l| plane.incident_raw(p, l));
    for axis in plane.lines().map(|l| l.0).filter(|&l| !plane.incident_raw(center, l)) {
        let free: Vec<u16> = plane.points_on(LineId(axis)).iter().copied().filter(|&p| !on_ray(p)).collect();
        for (a, &r) in free.iter().enumerate() {
            for &s in &free[a + 1..] {
                let mut seen: HashMap<u16, [u16; 3]> = HashMap::new();
                for &x1 in plane.points_on(LineId(rays[0])) {
                    if x1 == center || plane.incident_raw(x1, axis) {
                        continue;
                    }
                    let x2 = plane.meet_raw(plane.join_raw(x1, r), rays[1]);
                    let x3 = plane.meet_raw(plane.join_raw(x1, s), rays[2]);
                    if plane.incident_raw(x2, axis) || plane.incident_raw(x3, axis) {
                        continue;
                    }
                    let t = plane.meet_raw(plane.join_raw(x2, x3), axis);
                    if let Some(&x) = seen.get(&t) {
                        let w = DesarguesWitness {
                            center: PointId(center),
                            rays: rays.map(LineId),
                            x: x.map(PointId),
                            y: [x1, x2, x3].map(PointId),
                            axis: LineId(axis),
                            axis_points: [r, s, t].map(PointId),
                        };
                        if verify_desargues(plane, &w).is_ok() {
                            return Some(w);
                        }
                    } else {
                        seen.insert(t, [x1, x2, x3]);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordsys::HallSystem;
    use crate::field::PrimePowerField;

    #[test]
    fn hall9_witness_verifies() {
        let pl = PlaneTables::hall(HallSystem::new(PrimePowerField::new(3, 1).unwrap())).unwrap();
        let w = exists_desargues(&pl).unwrap();
        assert_eq!(verify_desargues(&pl, &w), Ok(()));
        let mut broken = w.clone();
        broken.axis_points[2] = broken.axis_points[0];
        assert!(verify_desargues(&pl, &broken).is_err());
    }

    #[test]
    fn field_plane_witness_verifies() {
        let pl = PlaneTables::field_oracle(3, 1).unwrap();
        let w = exists_desargues(&pl).unwrap();
        assert_eq!(verify_desargues(&pl, &w), Ok(()));
    }
}
