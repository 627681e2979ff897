//! Table-driven arithmetic for small finite fields `F_q`, `q = p^k`.
//!
//! Elements are `u8` indices `0..q`. An index encodes the coefficient vector
//! of a polynomial over `F_p` in base `p`, lowest degree first, so `0` and `1`
//! are the additive and multiplicative identities and for `k = 1` the index is
//! the residue itself.

use crate::error::FieldError;

/// Default upper bound on `q` accepted by [`PrimePowerField::new`].
pub const DEFAULT_MAX_ORDER: usize = 16;

/// Hard ceiling imposed by the `u8` element representation.
pub const ABSOLUTE_MAX_ORDER: usize = 256;

pub type Fe = u8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePowerField {
    p: u8,
    k: u8,
    q: usize,
    /// Coefficients `c_0..c_{k-1}` of the monic modulus `x^k + c_{k-1}x^{k-1} + ... + c_0`.
    modulus: Vec<u8>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut x: usize, p: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for c in out.iter_mut() {
        *c = x % p;
        x /= p;
    }
    out
}

fn undigits(cs: &[usize], p: usize) -> usize {
    cs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiplies two residues modulo the monic polynomial with low coefficients `modulus`.
fn poly_mulmod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let k = modulus.len();
    let mut prod = vec![0usize; 2 * k];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // x^k = -(c_{k-1}x^{k-1} + ... + c_0)
    for deg in (k..2 * k).rev() {
        let lead = prod[deg];
        if lead == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &c) in modulus.iter().enumerate() {
            let idx = deg - k + i;
            prod[idx] = (prod[idx] + (p - c) * lead) % p;
        }
    }
    prod.truncate(k);
    prod
}

fn mul_table(p: usize, k: usize, modulus: &[usize]) -> Vec<Fe> {
    let q = p.pow(k as u32);
    let mut table = vec![0; q * q];
    for a in 0..q {
        let da = digits(a, p, k);
        for b in a..q {
            let db = digits(b, p, k);
            let c = undigits(&poly_mulmod(&da, &db, modulus, p), p) as Fe;
            table[a * q + b] = c;
            table[b * q + a] = c;
        }
    }
    table
}

/// A quotient ring `F_p[x]/(m)` is a field iff it has no zero divisors.
fn has_zero_divisors(q: usize, mul: &[Fe]) -> bool {
    (1..q).any(|a| (1..q).any(|b| mul[a * q + b] == 0))
}

impl PrimePowerField {
    /// Builds `F_{p^k}` with the default size bound.
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::with_max_order(p, k, DEFAULT_MAX_ORDER)
    }

    /// Builds `F_{p^k}`, rejecting fields with more than `max_order` elements.
    ///
    /// For `k > 1` the modulus is the monic irreducible polynomial of degree `k`
    /// whose low coefficient vector, read as a base-`p` integer, is smallest.
    pub fn with_max_order(p: u32, k: u32, max_order: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if k == 0 {
            return Err(FieldError::UnsupportedSize { p, k });
        }
        let q = (p as usize)
            .checked_pow(k)
            .filter(|&q| q <= max_order.min(ABSOLUTE_MAX_ORDER))
            .ok_or(FieldError::UnsupportedSize { p, k })?;
        let (p_us, k_us) = (p as usize, k as usize);

        let (modulus, mul) = if k == 1 {
            let mul = (0..q * q).map(|i| ((i / q) * (i % q) % q) as Fe).collect();
            (vec![0usize], mul)
        } else {
            (0..q)
                .map(|code| digits(code, p_us, k_us))
                .find_map(|m| {
                    let table = mul_table(p_us, k_us, &m);
                    (!has_zero_divisors(q, &table)).then_some((m, table))
                })
                .expect("an irreducible polynomial exists in every degree")
        };

        let mut add = vec![0; q * q];
        for a in 0..q {
            let da = digits(a, p_us, k_us);
            for b in 0..q {
                let db = digits(b, p_us, k_us);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p_us).collect();
                add[a * q + b] = undigits(&s, p_us) as Fe;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Fe)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as Fe
                }
            })
            .collect();

        Ok(Self {
            p: p as u8,
            k: k as u8,
            q,
            modulus: if k == 1 { Vec::new() } else { modulus.iter().map(|&c| c as u8).collect() },
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p as u32
    }

    pub fn degree(&self) -> u32 {
        self.k as u32
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Low coefficients of the monic modulus (empty for prime fields).
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(|e| e as Fe)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (a != 0).then(|| self.inv[a as usize])
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as Fe
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Fe) -> Option<usize> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        Some(n)
    }

    /// Smallest-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        self.elements()
            .find(|&a| self.multiplicative_order(a) == Some(self.q - 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    /// Checks every field axiom by exhaustive enumeration.
    pub fn check_axioms(&self) -> Result<(), String> {
        let q = self.q as Fe as usize;
        let els: Vec<Fe> = self.elements().collect();
        for &a in &els {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return Err(format!("identity fails at {a}"));
            }
            if self.add(a, self.neg(a)) != 0 {
                return Err(format!("additive inverse fails at {a}"));
            }
            if a != 0 && self.mul(a, self.inv(a).unwrap()) != 1 {
                return Err(format!("multiplicative inverse fails at {a}"));
            }
            for &b in &els {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(format!("commutativity fails at ({a},{b})"));
                }
                for &c in &els {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return Err(format!("additive associativity fails at ({a},{b},{c})"));
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(format!("multiplicative associativity fails at ({a},{b},{c})"));
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return Err(format!("distributivity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        if q > 1 && self.multiplicative_order(self.primitive_element()) != Some(q - 1) {
            return Err("multiplicative group is not cyclic".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f3_arithmetic() {
        let f = PrimePowerField::new(3, 1).unwrap();
        assert_eq!(f.add(1, 2), 0);
        assert_eq!(f.mul(2, 2), 1);
        assert_eq!(f.neg(1), 2);
        assert_eq!(f.inv(2), Some(2));
        assert!(f.modulus().is_empty());
    }

    #[test]
    fn f4_uses_x2_x_1() {
        let f = PrimePowerField::new(2, 2).unwrap();
        // x^2 + x + 1, low coefficients first
        assert_eq!(f.modulus(), &[1, 1]);
        // x = index 2, x + 1 = index 3
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 1), 3);
        assert_eq!(f.add(3, 3), 0);
    }

    #[test]
    fn least_moduli_for_larger_fields() {
        // x^2 + 1 over F_3, x^4 + x + 1 over F_2, x^2 + 2 over F_5
        assert_eq!(PrimePowerField::with_max_order(3, 2, 64).unwrap().modulus(), &[1, 0]);
        assert_eq!(PrimePowerField::new(2, 4).unwrap().modulus(), &[1, 1, 0, 0]);
        assert_eq!(PrimePowerField::with_max_order(5, 2, 64).unwrap().modulus(), &[2, 0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(PrimePowerField::new(4, 1), Err(FieldError::NonPrime(4)));
        assert_eq!(PrimePowerField::new(1, 1), Err(FieldError::NonPrime(1)));
        assert_eq!(
            PrimePowerField::new(5, 2),
            Err(FieldError::UnsupportedSize { p: 5, k: 2 })
        );
        assert_eq!(
            PrimePowerField::new(3, 0),
            Err(FieldError::UnsupportedSize { p: 3, k: 0 })
        );
    }

    #[test]
    fn axioms_hold_for_small_fields() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (13, 1)] {
            let f = PrimePowerField::new(p, k).unwrap();
            f.check_axioms().unwrap_or_else(|e| panic!("F_{}^{}: {e}", p, k));
        }
    }

    #[test]
    fn from_int_reduces_mod_p() {
        let f = PrimePowerField::new(2, 2).unwrap();
        assert_eq!(f.from_int(2), 0);
        assert_eq!(f.from_int(-1), 1);
        let g = PrimePowerField::new(5, 1).unwrap();
        assert_eq!(g.from_int(-2), 3);
    }
}
