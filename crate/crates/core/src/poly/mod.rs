//! Univariate and bivariate polynomials over `F_q`.
//!
//! Polynomials do not carry their field; every operation that touches
//! coefficients takes the [`Field`] explicitly.

mod kernel;
mod parse;
mod random;
mod squarefree;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ff::{Field, FieldElement};

pub use kernel::{
    check_admissible, compose, count_degenerate_pairs, count_degenerate_rows,
    is_const_times_square_biv, primitive_kernel, undirected_witness, AdmissibilityReport,
    ComposeVariant, KernelDecomposition,
};
pub use parse::parse_poly;
pub use random::{random_admissible, random_symmetric, AdmissibleDraw, MAX_ATTEMPTS};
pub use squarefree::{is_const_times_square_uni, uni_squarefree_decomposition, SquarefreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("'t' at offset {position} is only available in extension fields")]
    GeneratorInPrimeField { position: usize },
    #[error("exponent at offset {position} exceeds {max}")]
    ExponentTooLarge { position: usize, max: u64 },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("square test needs q > d^2 + d (q = {q}, d = {d})")]
    FieldTooSmall { q: u32, d: u32 },
    #[error("inner polynomial g must be nonconstant")]
    ConstantG,
    #[error("no admissible polynomial found in {attempts} attempts")]
    NoAdmissibleDraw { attempts: u32 },
}

/// Dense univariate polynomial, coefficients low-to-high with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> UniPoly {
        UniPoly::new(vec![c])
    }

    pub fn one() -> UniPoly {
        UniPoly::constant(FieldElement::ONE)
    }

    /// The monomial `x`.
    pub fn x() -> UniPoly {
        UniPoly::new(vec![FieldElement::ZERO, FieldElement::ONE])
    }

    /// Parses a polynomial in `x` alone (no `y` allowed).
    pub fn parse(expr: &str, field: &Field) -> Result<UniPoly, PolyError> {
        let f = parse_poly(expr, field)?;
        if f.deg_y() > 0 {
            return Err(PolyError::Syntax {
                position: expr.find('y').unwrap_or(0),
                message: "univariate polynomial may not mention y".into(),
            });
        }
        Ok(f.specialize_y(field, FieldElement::ZERO))
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(field: &Field, roots: &[FieldElement]) -> UniPoly {
        roots.iter().fold(UniPoly::one(), |acc, &r| {
            acc.mul(field, &UniPoly::new(vec![field.neg(r), FieldElement::ONE]))
        })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True for nonzero constants and for zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == FieldElement::ONE
    }

    #[inline]
    pub fn eval(&self, field: &Field, a: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, a), c))
    }

    pub fn add(&self, field: &Field, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|k| field.add(self.coeff(k), other.coeff(k)))
                .collect(),
        )
    }

    pub fn neg(&self, field: &Field) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub(&self, field: &Field, other: &UniPoly) -> UniPoly {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &Field, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        UniPoly::new(out)
    }

    pub fn pow(&self, field: &Field, mut e: u64) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn divrem(&self, field: &Field, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = field.inv(divisor.lc()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = field.mul(rem[k], lc_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = field.sub(rem[idx], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Quotient of a division known to be exact.
    pub fn exact_div(&self, field: &Field, divisor: &UniPoly) -> UniPoly {
        let (q, r) = self.divrem(field, divisor);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Splits off the leading coefficient: `self = unit * monic`.
    pub fn monic(&self, field: &Field) -> (FieldElement, UniPoly) {
        let lc = self.lc();
        if lc.is_zero() {
            return (FieldElement::ZERO, UniPoly::zero());
        }
        let inv = field.inv(lc).expect("nonzero");
        (lc, self.scale(field, inv))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, field: &Field, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(field, &b);
            a = b;
            b = r;
        }
        a.monic(field).1
    }

    pub fn derivative(&self, field: &Field) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| field.mul(field.from_int(k as i64), c))
                .collect(),
        )
    }

    /// `sum a_k x^k -> sum a_k x^{pk}`'s inverse: for a polynomial in `x^p`,
    /// returns its exact `p`-th root.
    pub(crate) fn pth_root(&self, field: &Field) -> UniPoly {
        let p = field.p() as usize;
        debug_assert!(self
            .coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| k % p == 0 || c.is_zero()));
        UniPoly::new(
            self.coeffs
                .iter()
                .step_by(p)
                .map(|&c| field.pth_root(c))
                .collect(),
        )
    }

    pub fn render(&self, field: &Field) -> String {
        BivarPoly::from_uni_x(self).render(field)
    }
}

/// Sparse bivariate polynomial: `(i, j) -> coefficient of x^i y^j`, zeros never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), FieldElement>,
}

impl BivarPoly {
    pub fn zero() -> BivarPoly {
        BivarPoly::default()
    }

    pub fn constant(c: FieldElement) -> BivarPoly {
        BivarPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: FieldElement, i: u32, j: u32) -> BivarPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivarPoly { terms }
    }

    pub fn x() -> BivarPoly {
        BivarPoly::monomial(FieldElement::ONE, 1, 0)
    }

    pub fn y() -> BivarPoly {
        BivarPoly::monomial(FieldElement::ONE, 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), FieldElement)>>(
        field: &Field,
        it: I,
    ) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (k, c) in it {
            out.add_term(field, k, c);
        }
        out
    }

    /// Embeds `g(x)`.
    pub fn from_uni_x(g: &UniPoly) -> BivarPoly {
        BivarPoly {
            terms: g
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, &c)| ((k as u32, 0), c))
                .collect(),
        }
    }

    /// Embeds `g(y)`.
    pub fn from_uni_y(g: &UniPoly) -> BivarPoly {
        BivarPoly::from_uni_x(g).swap_xy()
    }

    fn add_term(&mut self, field: &Field, key: (u32, u32), c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert(FieldElement::ZERO);
        *entry = field.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), FieldElement> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> FieldElement {
        self.terms.get(&(i, j)).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `max(i + j)`; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// `Some(d)` when every monomial has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|&(i, j)| i + j);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Whether every coefficient lies in the subfield of the given elements.
    pub fn coefficients_in(&self, subfield: &[FieldElement]) -> bool {
        self.terms.values().all(|c| subfield.contains(c))
    }

    pub fn swap_xy(&self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&(i, j), &c)| ((j, i), c)).collect(),
        }
    }

    pub fn add(&self, field: &Field, other: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.add_term(field, k, c);
        }
        out
    }

    pub fn neg(&self, field: &Field) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&k, &c)| (k, field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &BivarPoly) -> BivarPoly {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> BivarPoly {
        if c.is_zero() {
            return BivarPoly::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(&k, &a)| (k, field.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, field: &Field, other: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i1, j1), &a) in &self.terms {
            for (&(i2, j2), &b) in &other.terms {
                out.add_term(field, (i1 + i2, j1 + j2), field.mul(a, b));
            }
        }
        out
    }

    pub fn pow(&self, field: &Field, mut e: u64) -> BivarPoly {
        let mut base = self.clone();
        let mut acc = BivarPoly::constant(FieldElement::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    pub fn eval(&self, field: &Field, a: FieldElement, b: FieldElement) -> FieldElement {
        self.specialize_x(field, a).eval(field, b)
    }

    /// `f(x, u)` as a polynomial in `x`.
    pub fn specialize_y(&self, field: &Field, u: FieldElement) -> UniPoly {
        let mut coeffs = vec![FieldElement::ZERO; self.deg_x() as usize + 1];
        for (&(i, j), &c) in &self.terms {
            let v = field.mul(c, field.pow(u, j as u64));
            coeffs[i as usize] = field.add(coeffs[i as usize], v);
        }
        UniPoly::new(coeffs)
    }

    /// `f(u, y)` as a polynomial in `y`.
    pub fn specialize_x(&self, field: &Field, u: FieldElement) -> UniPoly {
        let mut coeffs = vec![FieldElement::ZERO; self.deg_y() as usize + 1];
        for (&(i, j), &c) in &self.terms {
            let v = field.mul(c, field.pow(u, i as u64));
            coeffs[j as usize] = field.add(coeffs[j as usize], v);
        }
        UniPoly::new(coeffs)
    }

    /// Coefficients in `(F_q[x])[y]`: entry `j` is the polynomial in `x`
    /// multiplying `y^j`.
    pub fn coeffs_in_y(&self) -> Vec<UniPoly> {
        let mut cols = vec![Vec::new(); self.deg_y() as usize + 1];
        for (&(i, j), &c) in &self.terms {
            let col = &mut cols[j as usize];
            if col.len() <= i as usize {
                col.resize(i as usize + 1, FieldElement::ZERO);
            }
            col[i as usize] = c;
        }
        cols.into_iter().map(UniPoly::new).collect()
    }

    /// Coefficients in `(F_q[y])[x]`: entry `i` is the polynomial in `y`
    /// multiplying `x^i`.
    pub fn coeffs_in_x(&self) -> Vec<UniPoly> {
        self.swap_xy().coeffs_in_y()
    }

    /// Inverse of [`coeffs_in_y`](Self::coeffs_in_y).
    fn from_coeffs_in_y(cols: &[UniPoly]) -> BivarPoly {
        let mut terms = BTreeMap::new();
        for (j, col) in cols.iter().enumerate() {
            for (i, &c) in col.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    terms.insert((i as u32, j as u32), c);
                }
            }
        }
        BivarPoly { terms }
    }

    /// Leading coefficient under the canonical order, greatest `(i + j, i)`.
    pub fn leading_coeff(&self) -> FieldElement {
        self.canonical_terms()
            .first()
            .map(|&(_, c)| c)
            .unwrap_or(FieldElement::ZERO)
    }

    fn canonical_terms(&self) -> Vec<((u32, u32), FieldElement)> {
        let mut v: Vec<_> = self.terms.iter().map(|(&k, &c)| (k, c)).collect();
        v.sort_by(|a, b| {
            let ka = (a.0 .0 + a.0 .1, a.0 .0);
            let kb = (b.0 .0 + b.0 .1, b.0 .0);
            kb.cmp(&ka)
        });
        v
    }

    /// Canonical text form. Monomials are ordered by `(i + j, i)` descending.
    /// Prime-field coefficients print as their index; extension-field
    /// coefficients print as a parenthesized polynomial in `t`, so the output
    /// always parses back to the same polynomial.
    pub fn render(&self, field: &Field) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((i, j), c) in self.canonical_terms() {
            let mut s = String::new();
            let mono = render_monomial(i, j);
            if mono.is_empty() {
                s.push_str(&render_coeff(field, c));
            } else {
                if c != FieldElement::ONE {
                    s.push_str(&render_coeff(field, c));
                    s.push('*');
                }
                s.push_str(&mono);
            }
            parts.push(s);
        }
        parts.join("+")
    }
}

fn render_monomial(i: u32, j: u32) -> String {
    let pow = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    let (a, b) = (pow("x", i), pow("y", j));
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b,
        (_, true) => a,
        _ => format!("{a}*{b}"),
    }
}

fn render_coeff(field: &Field, c: FieldElement) -> String {
    if field.m() == 1 || field.in_prime_field(c) {
        return c.index().to_string();
    }
    let digits = field.coeffs(c);
    let parts: Vec<String> = digits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .rev()
        .map(|(k, &d)| {
            let t = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            match (k, d) {
                (0, _) => d.to_string(),
                (_, 1) => t,
                _ => format!("{d}*{t}"),
            }
        })
        .collect();
    format!("({})", parts.join("+"))
}
