//! The Hall system: `F_q^2` with componentwise addition and the two-branch
//! Hall multiplication defined by an irreducible quadratic `x^2 - r x - s`.
//!
//! Elements are addressed by a `u16` index `a1 * q + a2`, so the basefield
//! copy `{(c, 0)}` sits at the multiples of `q`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimePowerField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HallElement {
    pub a1: Fe,
    pub a2: Fe,
}

impl HallElement {
    pub const ZERO: Self = Self { a1: 0, a2: 0 };
    pub const ONE: Self = Self { a1: 1, a2: 0 };

    pub fn new(a1: Fe, a2: Fe) -> Self {
        Self { a1, a2 }
    }

    pub fn in_basefield(self) -> bool {
        self.a2 == 0
    }
}

impl std::fmt::Display for HallElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

/// Returns the lexicographically least `(r, s)` for which `x^2 - r x - s`
/// has no root in `field`.
pub fn find_defining_quadratic(field: &PrimePowerField) -> (Fe, Fe) {
    field
        .elements()
        .flat_map(|r| field.elements().map(move |s| (r, s)))
        .find(|&(r, s)| is_rootless(field, r, s))
        .expect("every finite field has an irreducible quadratic")
}

/// `x^2 - r x - s` evaluated at `x`.
pub fn defining_poly(field: &PrimePowerField, r: Fe, s: Fe, x: Fe) -> Fe {
    field.sub(field.sub(field.mul(x, x), field.mul(r, x)), s)
}

pub fn is_rootless(field: &PrimePowerField, r: Fe, s: Fe) -> bool {
    field.elements().all(|t| defining_poly(field, r, s, t) != 0)
}

#[derive(Clone, Debug)]
pub struct HallSystem {
    field: PrimePowerField,
    r: Fe,
    s: Fe,
    q: usize,
    n: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl HallSystem {
    /// Hall system over `field` with the default defining quadratic.
    pub fn new(field: PrimePowerField) -> Self {
        let (r, s) = find_defining_quadratic(&field);
        Self::with_quadratic(field, r, s).expect("default quadratic is irreducible")
    }

    pub fn with_quadratic(field: PrimePowerField, r: Fe, s: Fe) -> Result<Self> {
        let q = field.order();
        if r as usize >= q || s as usize >= q || !is_rootless(&field, r, s) {
            return Err(Error::ReducibleQuadratic { r, s });
        }
        let n = q * q;
        let mut sys = Self { field, r, s, q, n, add: vec![0; n * n], mul: vec![0; n * n], neg: vec![0; n] };
        for a in 0..n {
            let ea = sys.element(a as u16);
            sys.neg[a] = sys.index(HallElement::new(sys.field.neg(ea.a1), sys.field.neg(ea.a2)));
            for b in 0..n {
                let eb = sys.element(b as u16);
                sys.add[a * n + b] = sys.index(sys.add_elements(ea, eb));
                sys.mul[a * n + b] = sys.index(sys.mul_elements(ea, eb));
            }
        }
        Ok(sys)
    }

    pub fn basefield(&self) -> &PrimePowerField {
        &self.field
    }

    pub fn r(&self) -> Fe {
        self.r
    }

    pub fn s(&self) -> Fe {
        self.s
    }

    /// `q`, the basefield order.
    pub fn q(&self) -> usize {
        self.q
    }

    /// `q^2`, the number of Hall elements.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn f(&self, x: Fe) -> Fe {
        defining_poly(&self.field, self.r, self.s, x)
    }

    #[inline]
    pub fn element(&self, idx: u16) -> HallElement {
        let i = idx as usize;
        HallElement::new((i / self.q) as Fe, (i % self.q) as Fe)
    }

    #[inline]
    pub fn index(&self, e: HallElement) -> u16 {
        (e.a1 as usize * self.q + e.a2 as usize) as u16
    }

    /// Index of the basefield element `c` embedded as `(c, 0)`.
    #[inline]
    pub fn from_base(&self, c: Fe) -> u16 {
        (c as usize * self.q) as u16
    }

    #[inline]
    pub fn is_base(&self, idx: u16) -> bool {
        idx as usize % self.q == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        (0..self.n).map(|i| i as u16)
    }

    pub fn add_elements(&self, a: HallElement, b: HallElement) -> HallElement {
        let f = &self.field;
        HallElement::new(f.add(a.a1, b.a1), f.add(a.a2, b.a2))
    }

    /// Hall multiplication on explicit pairs.
    pub fn mul_elements(&self, a: HallElement, b: HallElement) -> HallElement {
        let f = &self.field;
        if b.a2 == 0 {
            HallElement::new(f.mul(a.a1, b.a1), f.mul(a.a2, b.a1))
        } else {
            let b2_inv = f.inv(b.a2).expect("b2 != 0 on this branch");
            let c1 = f.sub(f.mul(a.a1, b.a1), f.mul(f.mul(a.a2, b2_inv), self.f(b.a1)));
            let c2 = f.add(f.sub(f.mul(a.a1, b.a2), f.mul(a.a2, b.a1)), f.mul(a.a2, self.r));
            HallElement::new(c1, c2)
        }
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.n + b as usize]
    }

    /// Basefield scalar times a Hall element, componentwise.
    pub fn scale(&self, c: Fe, x: u16) -> u16 {
        let e = self.element(x);
        self.index(HallElement::new(self.field.mul(c, e.a1), self.field.mul(c, e.a2)))
    }

    /// The unique `m` with `a * m = b`, found by scanning the row of `a`.
    pub fn solve_right_factor(&self, a: u16, b: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::ZeroDivisor);
        }
        let row = &self.mul[a as usize * self.n..(a as usize + 1) * self.n];
        row.iter()
            .position(|&v| v == b)
            .map(|m| m as u16)
            .ok_or(Error::ZeroDivisor)
    }

    fn triples(&self) -> impl Iterator<Item = (u16, u16, u16)> + '_ {
        self.elements()
            .flat_map(move |a| self.elements().flat_map(move |b| self.elements().map(move |c| (a, b, c))))
    }

    /// A triple violating `(a + b) c = a c + b c`, if any.
    pub fn right_distributivity_violation(&self) -> Option<(u16, u16, u16)> {
        self.triples()
            .find(|&(a, b, c)| self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)))
    }

    /// A triple violating `a (b + c) = a b + a c`, if any.
    pub fn left_distributivity_violation(&self) -> Option<(u16, u16, u16)> {
        self.triples()
            .find(|&(a, b, c)| self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)))
    }

    pub fn associativity_violation(&self) -> Option<(u16, u16, u16)> {
        self.triples()
            .find(|&(a, b, c)| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)))
    }

    pub fn commutativity_violation(&self) -> Option<(u16, u16)> {
        self.elements()
            .flat_map(|a| self.elements().map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }

    /// True when `(1,0)` is a two-sided identity.
    pub fn has_identity(&self) -> bool {
        let one = self.index(HallElement::ONE);
        self.elements().all(|a| self.mul(a, one) == a && self.mul(one, a) == a)
    }

    /// True when `m -> a m` is a bijection for every nonzero `a`.
    pub fn rows_are_bijective(&self) -> bool {
        (1..self.n).all(|a| {
            let mut seen = vec![false; self.n];
            self.mul[a * self.n..(a + 1) * self.n]
                .iter()
                .all(|&v| !std::mem::replace(&mut seen[v as usize], true))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> HallSystem {
        HallSystem::new(PrimePowerField::new(3, 1).unwrap())
    }

    fn el(h: &HallSystem, a1: Fe, a2: Fe) -> u16 {
        h.index(HallElement::new(a1, a2))
    }

    #[test]
    fn default_quadratics() {
        assert_eq!(find_defining_quadratic(&PrimePowerField::new(3, 1).unwrap()), (0, 2));
        assert_eq!(find_defining_quadratic(&PrimePowerField::new(5, 1).unwrap()), (0, 2));
        // x^2 - x - 1 = x^2 + x + 1 over F_2
        assert_eq!(find_defining_quadratic(&PrimePowerField::new(2, 1).unwrap()), (1, 1));
    }

    #[test]
    fn f3_quadratic_is_rootless() {
        let f = PrimePowerField::new(3, 1).unwrap();
        assert_eq!(defining_poly(&f, 0, 2, 0), 1);
        assert_eq!(defining_poly(&f, 0, 2, 1), 2);
        assert_eq!(defining_poly(&f, 0, 2, 2), 2);
    }

    #[test]
    fn reducible_quadratic_rejected() {
        let f = PrimePowerField::new(3, 1).unwrap();
        // x^2 - 1 has roots 1 and 2
        assert!(matches!(HallSystem::with_quadratic(f, 0, 1), Err(Error::ReducibleQuadratic { .. })));
    }

    #[test]
    fn hall_add_examples() {
        let h = h3();
        assert_eq!(h.add(el(&h, 1, 2), el(&h, 2, 2)), el(&h, 0, 1));
        for a in h.elements() {
            assert_eq!(h.add(a, 0), a);
            assert_eq!(h.add(a, h.neg(a)), 0);
        }
    }

    #[test]
    fn hall_mul_examples() {
        let h = h3();
        assert_eq!(h.mul(el(&h, 1, 2), el(&h, 2, 0)), el(&h, 2, 1));
        assert_eq!(h.mul(el(&h, 0, 1), el(&h, 0, 1)), el(&h, 2, 0));
        let one = el(&h, 1, 0);
        for a in h.elements() {
            assert_eq!(h.mul(a, one), a);
        }
    }

    #[test]
    fn solve_right_factor_examples() {
        let h = h3();
        let a = el(&h, 0, 1);
        assert_eq!(h.solve_right_factor(a, el(&h, 2, 0)).unwrap(), el(&h, 0, 1));
        assert_eq!(h.solve_right_factor(a, 0).unwrap(), 0);
        assert_eq!(h.solve_right_factor(a, a).unwrap(), el(&h, 1, 0));
        assert!(matches!(h.solve_right_factor(0, a), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn basefield_predicate() {
        let h = h3();
        for x in h.elements() {
            assert_eq!(h.is_base(x), h.element(x).in_basefield());
        }
    }

    #[test]
    fn q3_structure_report() {
        let h = h3();
        assert!(h.has_identity());
        assert!(h.rows_are_bijective());
        assert_eq!(h.right_distributivity_violation(), None);
    }
}
