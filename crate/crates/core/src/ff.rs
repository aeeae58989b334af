//! Arithmetic in odd-characteristic finite fields `F_q`, `q = p^m`.
//!
//! Elements are identified with their base-`p` index: the element
//! `c_0 + c_1 t + ... + c_{m-1} t^{m-1}` (with `t` a root of the field modulus)
//! has index `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. All external formats use
//! these indices.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FfError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("{p}^{m} does not fit in 32 bits")]
    Overflow { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("index {index} is outside F_{q}")]
    IndexOutOfRange { index: u64, q: u32 },
    #[error("modulus {0:?} is not a monic irreducible polynomial of the stated degree")]
    BadModulus(Vec<u32>),
}

/// Parameters identifying a concrete model of `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Monic modulus, low-to-high, length `m + 1`. For `m = 1` this is `x`.
    pub modulus: Vec<u32>,
    #[serde(skip_serializing)]
    pub q: u32,
}

#[derive(Deserialize)]
struct RawSpec {
    p: u32,
    m: u32,
    modulus: Vec<u32>,
}

impl TryFrom<RawSpec> for FieldSpec {
    type Error = FfError;

    fn try_from(raw: RawSpec) -> Result<Self, FfError> {
        check_characteristic(raw.p as u64)?;
        let q = checked_q(raw.p as u64, raw.m)?;
        let valid = raw.modulus.len() == raw.m as usize + 1
            && raw.modulus.last() == Some(&1)
            && raw.modulus.iter().all(|&c| c < raw.p)
            && (raw.m == 1 || is_irreducible_mod_p(&raw.modulus, raw.p as u64));
        if !valid {
            return Err(FfError::BadModulus(raw.modulus));
        }
        Ok(FieldSpec {
            p: raw.p,
            m: raw.m,
            modulus: raw.modulus,
            q,
        })
    }
}

/// An element of `F_q`, stored as its canonical index in `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps an index without range checking; see [`Field::element`].
    #[inline]
    pub(crate) fn from_raw(i: u32) -> Self {
        FieldElement(i)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Quadratic character values and the square indicator (zero counts as square).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    pub chi: Vec<i8>,
    pub is_square: BitSet,
}

impl CharTable {
    #[inline]
    pub fn chi(&self, a: FieldElement) -> i8 {
        self.chi[a.0 as usize]
    }

    #[inline]
    pub fn is_square(&self, a: FieldElement) -> bool {
        self.is_square.contains(a.0 as usize)
    }
}

/// Largest `q` for which extension-field add/mul are served from tables.
const TABLE_LIMIT: u32 = 1024;

/// An arithmetic context for `F_q` together with its quadratic character.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    pow_p: Vec<u32>,
    add_table: Option<Arc<[u16]>>,
    mul_table: Option<Arc<[u16]>>,
    chars: CharTable,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

fn check_characteristic(p: u64) -> Result<(), FfError> {
    if p == 2 {
        return Err(FfError::EvenCharacteristic);
    }
    if !is_prime(p) {
        return Err(FfError::NonPrime(p));
    }
    Ok(())
}

fn checked_q(p: u64, m: u32) -> Result<u32, FfError> {
    if m == 0 {
        return Err(FfError::ZeroDegree);
    }
    p.checked_pow(m)
        .filter(|&q| q <= u32::MAX as u64)
        .map(|q| q as u32)
        .ok_or(FfError::Overflow { p, m })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds the field `F_{p^m}` with the lexicographically smallest monic
/// irreducible modulus (constant coefficient varies fastest).
pub fn make_field(p: u64, m: u32) -> Result<FieldSpec, FfError> {
    check_characteristic(p)?;
    let q = checked_q(p, m)?;
    let p32 = p as u32;
    if m == 1 {
        return Ok(FieldSpec {
            p: p32,
            m,
            modulus: vec![0, 1],
            q,
        });
    }
    for k in 0..q as u64 {
        let mut modulus = digits(k, p, m);
        modulus.push(1);
        if is_irreducible_mod_p(&modulus, p) {
            return Ok(FieldSpec {
                p: p32,
                m,
                modulus,
                q,
            });
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn digits(mut k: u64, p: u64, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = (k % p) as u32;
            k /= p;
            d
        })
        .collect()
}

// Dense F_p[x] helpers for the irreducibility test. Coefficients low-to-high,
// trimmed; the zero polynomial is empty.
mod fp {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1u64;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % p;
            }
            a = a * a % p;
            e >>= 1;
        }
        r
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lc_inv = inv(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] * lc_inv % p;
            for (i, &bi) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - c * bi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// Ben-Or style test: `f` of degree `m` is irreducible iff
/// `gcd(x^{p^k} - x, f) = 1` for every `1 <= k <= m/2`.
pub(crate) fn is_irreducible_mod_p(modulus: &[u32], p: u64) -> bool {
    let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let mut h = vec![0u64, 1];
    for _ in 1..=m / 2 {
        h = fp::powmod(&h, p, &f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp::gcd(&f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl Field {
    /// `F_{p^m}` with the default modulus.
    pub fn new(p: u64, m: u32) -> Result<Field, FfError> {
        Ok(Field::from_spec(make_field(p, m)?))
    }

    pub fn prime(p: u64) -> Result<Field, FfError> {
        Field::new(p, 1)
    }

    /// Smallest field of order exactly `q`, if `q` is an odd prime power.
    pub fn of_order(q: u64) -> Result<Field, FfError> {
        let (p, m) = prime_power(q).ok_or(FfError::NonPrime(q))?;
        Field::new(p, m)
    }

    pub fn from_spec(spec: FieldSpec) -> Field {
        let pow_p = (0..spec.m).map(|i| spec.p.pow(i)).collect();
        let mut field = Field {
            spec,
            pow_p,
            add_table: None,
            mul_table: None,
            chars: CharTable {
                chi: Vec::new(),
                is_square: BitSet::new(0),
            },
        };
        if field.spec.m > 1 && field.spec.q <= TABLE_LIMIT {
            let q = field.spec.q;
            let mut add = Vec::with_capacity((q * q) as usize);
            let mut mul = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(field.add_slow(a, b) as u16);
                    mul.push(field.mul_slow(a, b) as u16);
                }
            }
            field.add_table = Some(add.into());
            field.mul_table = Some(mul.into());
        }
        field.chars = quadratic_character(&field);
        field
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.spec.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.spec.q
    }

    pub fn chars(&self) -> &CharTable {
        &self.chars
    }

    #[inline]
    pub fn chi(&self, a: FieldElement) -> i8 {
        self.chars.chi(a)
    }

    #[inline]
    pub fn is_square(&self, a: FieldElement) -> bool {
        self.chars.is_square(a)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement, FfError> {
        if index < self.spec.q as u64 {
            Ok(FieldElement(index as u32))
        } else {
            Err(FfError::IndexOutOfRange {
                index,
                q: self.spec.q,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.spec.q).map(FieldElement)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.spec.p as i64) as u32)
    }

    /// The adjoined root `t` of the modulus; `None` in a prime field.
    pub fn generator(&self) -> Option<FieldElement> {
        (self.spec.m > 1).then_some(FieldElement(self.spec.p))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0 as u64, self.spec.p as u64, self.spec.m)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElement {
        let p = self.spec.p as u64;
        let mut idx = 0u64;
        for (i, &c) in coeffs.iter().enumerate().take(self.spec.m as usize) {
            idx += (c as u64 % p) * self.pow_p[i] as u64;
        }
        FieldElement(idx as u32)
    }

    /// Whether `a` lies in the prime subfield `F_p`.
    pub fn in_prime_field(&self, a: FieldElement) -> bool {
        a.0 < self.spec.p
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        for &w in &self.pow_p {
            let s = (a % p + b % p) % p;
            out += s * w;
            a /= p;
            b /= p;
        }
        out
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let p = self.spec.p;
        let mut a = a;
        let mut out = 0u32;
        for &w in &self.pow_p {
            let d = a % p;
            out += ((p - d) % p) * w;
            a /= p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p as u64;
        let m = self.spec.m as usize;
        let da = digits(a as u64, p, m as u32);
        let db = digits(b as u64, p, m as u32);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // Reduce with t^m = -(c_0 + ... + c_{m-1} t^{m-1}).
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mi) in self.spec.modulus[..m].iter().enumerate() {
                let idx = k - m + i;
                prod[idx] = (prod[idx] + (p - c) * mi as u64) % p;
            }
        }
        let mut out = 0u64;
        for i in 0..m {
            out += prod[i] * self.pow_p[i] as u64;
        }
        out as u32
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.spec.m == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= self.spec.p { s - self.spec.p } else { s })
        } else if let Some(t) = &self.add_table {
            FieldElement(t[(a.0 * self.spec.q + b.0) as usize] as u32)
        } else {
            FieldElement(self.add_slow(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.spec.m == 1 {
            FieldElement(if a.0 == 0 { 0 } else { self.spec.p - a.0 })
        } else {
            FieldElement(self.neg_slow(a.0))
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.spec.m == 1 {
            FieldElement((a.0 as u64 * b.0 as u64 % self.spec.p as u64) as u32)
        } else if let Some(t) = &self.mul_table {
            FieldElement(t[(a.0 * self.spec.q + b.0) as usize] as u32)
        } else {
            FieldElement(self.mul_slow(a.0, b.0))
        }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FfError> {
        if a.is_zero() {
            return Err(FfError::DivisionByZero);
        }
        Ok(self.pow(a, self.spec.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The unique `b` with `b^p = a` (Frobenius is a bijection on `F_q`).
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        let e = (self.spec.p as u64).pow(self.spec.m - 1);
        self.pow(a, e)
    }

    /// Smallest-index non-square.
    pub fn least_non_square(&self) -> FieldElement {
        self.elements()
            .find(|&a| self.chi(a) == -1)
            .expect("odd q has non-squares")
    }

    /// Elements of the subfield of order `sqrt(q)` when `m` is even.
    pub fn half_subfield(&self) -> Option<Vec<FieldElement>> {
        if !self.spec.m.is_multiple_of(2) {
            return None;
        }
        let r = (self.spec.p as u64).pow(self.spec.m / 2);
        let sub: Vec<_> = self.elements().filter(|&a| self.pow(a, r) == a).collect();
        debug_assert_eq!(sub.len() as u64, r);
        Some(sub)
    }
}

/// Splits `q = p^m` with `p` an odd prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 3 || q.is_multiple_of(2) {
        return None;
    }
    let mut p = 3u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 2;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut m = 0u32;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Tabulates `chi(a) = a^{(q-1)/2}` read as `-1, 0, +1`.
pub fn quadratic_character(field: &Field) -> CharTable {
    let q = field.q();
    let e = (q as u64 - 1) / 2;
    let mut chi = vec![0i8; q as usize];
    let mut is_square = BitSet::new(q as usize);
    is_square.insert(0);
    for a in 1..q {
        let v = field.pow(FieldElement(a), e);
        if v == FieldElement::ONE {
            chi[a as usize] = 1;
            is_square.insert(a as usize);
        } else {
            debug_assert_eq!(v, field.neg(FieldElement::ONE));
            chi[a as usize] = -1;
        }
    }
    CharTable { chi, is_square }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_examples() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!((f5.q, f5.modulus.clone()), (5, vec![0, 1]));
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.modulus, vec![1, 0, 1]);
        assert_eq!(f9.q, 9);
        assert_eq!(make_field(4, 1), Err(FfError::NonPrime(4)));
        assert_eq!(make_field(2, 3), Err(FfError::EvenCharacteristic));
        assert!(matches!(make_field(3, 40), Err(FfError::Overflow { .. })));
    }

    #[test]
    fn irreducible_scan_matches_brute_force_f3() {
        // A monic quadratic over F_3 is irreducible iff it has no root.
        for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                let has_root = (0..3u32).any(|x| (x * x + c1 * x + c0) % 3 == 0);
                assert_eq!(is_irreducible_mod_p(&[c0, c1, 1], 3), !has_root);
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.add(f5.from_int(3), f5.from_int(4)).index(), 2);
        let f9 = Field::new(3, 2).unwrap();
        let t = f9.generator().unwrap();
        assert_eq!(f9.mul(t, t), f9.from_int(2));
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.inv(f7.from_int(3)).unwrap().index(), 5);
        assert_eq!(f7.inv(FieldElement::ZERO), Err(FfError::DivisionByZero));
    }

    #[test]
    fn inverse_everywhere() {
        for (p, m) in [(3, 3), (5, 2), (7, 1), (3, 4)] {
            let f = Field::new(p, m).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn character_examples() {
        let f5 = Field::prime(5).unwrap();
        let sq: Vec<_> = f5.chars().is_square.to_vec();
        assert_eq!(sq, vec![0, 1, 4]);
        assert_eq!(f5.chi(f5.from_int(2)), -1);
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.chars().is_square.to_vec(), vec![0, 1, 2, 4]);
        for f in [f5, f7, Field::new(3, 2).unwrap()] {
            assert_eq!(f.chi(FieldElement::ONE), 1);
            assert_eq!(f.chi(FieldElement::ZERO), 0);
        }
    }

    #[test]
    fn character_is_multiplicative_and_balanced() {
        for q in [3u64, 5, 7, 9, 11, 13, 25, 27, 49, 81, 121] {
            let f = Field::of_order(q).unwrap();
            let sum: i64 = f.elements().map(|a| f.chi(a) as i64).sum();
            assert_eq!(sum, 0);
            assert_eq!(f.chars().is_square.count() as u64, q.div_ceil(2));
            for a in f.elements().skip(1) {
                for b in f.elements().skip(1) {
                    assert_eq!(f.chi(f.mul(a, b)), f.chi(a) * f.chi(b), "q={q}");
                }
            }
            let minus_one = f.neg(FieldElement::ONE);
            assert_eq!(f.chi(minus_one) == 1, q % 4 == 1);
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for q in [9u64, 25, 27, 49, 81] {
            let f = Field::of_order(q).unwrap();
            let p = f.p() as u64;
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.pow(f.add(a, b), p);
                    let rhs = f.add(f.pow(a, p), f.pow(b, p));
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(f.pow(f.pth_root(a), p), a);
            }
        }
    }

    #[test]
    fn tables_agree_with_slow_path() {
        let f = Field::new(3, 5).unwrap();
        for a in (0..f.q()).step_by(7) {
            for b in (0..f.q()).step_by(5) {
                let (ea, eb) = (FieldElement(a), FieldElement(b));
                assert_eq!(f.mul(ea, eb).0, f.mul_slow(a, b));
                assert_eq!(f.add(ea, eb).0, f.add_slow(a, b));
            }
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec = make_field(3, 2).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"p":3,"m":2,"modulus":[1,0,1]}"#);
        let back: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"p":3,"m":2,"modulus":[2,0,1]}"#).is_err());
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(243), Some((3, 5)));
        assert_eq!(prime_power(169), Some((13, 2)));
        assert_eq!(prime_power(101), Some((101, 1)));
        assert_eq!(prime_power(15), None);
        assert_eq!(prime_power(8), None);
    }

    #[test]
    fn subfield_of_f9() {
        let f = Field::new(3, 2).unwrap();
        let sub = f.half_subfield().unwrap();
        assert_eq!(sub.iter().map(|a| a.index()).collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}
