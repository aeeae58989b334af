//! Primitive-kernel decomposition, square-multiple tests and the
//! admissibility decision.

use rayon::prelude::*;
use serde::Serialize;

use super::squarefree::is_const_times_square_uni;
use super::{BivarPoly, PolyError, UniPoly};
use crate::ff::{Field, FieldElement};

/// `f = unit * fx(x) * gy(y) * h(x, y)` with `h` primitive in both variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDecomposition {
    pub fx: UniPoly,
    pub gy: UniPoly,
    pub h: BivarPoly,
    pub unit: FieldElement,
}

impl KernelDecomposition {
    pub fn expand(&self, field: &Field) -> BivarPoly {
        BivarPoly::from_uni_x(&self.fx)
            .mul(field, &BivarPoly::from_uni_y(&self.gy))
            .mul(field, &self.h)
            .scale(field, self.unit)
    }
}

fn content(parts: &[UniPoly], field: &Field) -> UniPoly {
    parts
        .iter()
        .filter(|c| !c.is_zero())
        .fold(UniPoly::zero(), |g, c| g.gcd(field, c))
}

pub fn primitive_kernel(f: &BivarPoly, field: &Field) -> Result<KernelDecomposition, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let cols = f.coeffs_in_y();
    let fx = content(&cols, field);
    let cols: Vec<UniPoly> = cols.iter().map(|c| c.exact_div(field, &fx)).collect();
    let rest = BivarPoly::from_coeffs_in_y(&cols);

    let rows = rest.coeffs_in_x();
    let gy = content(&rows, field);
    let rows: Vec<UniPoly> = rows.iter().map(|c| c.exact_div(field, &gy)).collect();
    let h0 = BivarPoly::from_coeffs_in_y(&rows).swap_xy();

    let unit = h0.leading_coeff();
    let h = h0.scale(field, field.inv(unit).expect("nonzero leading coefficient"));
    Ok(KernelDecomposition { fx, gy, h, unit })
}

/// Decides whether `h` is a constant multiple of a square by testing
/// specializations `h(x, u)`. Requires `h` primitive in both variables (as
/// returned by [`primitive_kernel`]): a primitive non-square has at most
/// `d^2 + d` square specializations, so `d^2 + d + 1` passing values prove
/// squareness. A single failing value disproves it for any `q`; only a
/// positive verdict needs `q > d^2 + d`.
pub fn is_const_times_square_biv(h: &BivarPoly, field: &Field) -> Result<bool, PolyError> {
    Ok(square_specializations(h, field)?.0)
}

/// Returns (verdict, number of tested specializations that were square, tested).
fn square_specializations(h: &BivarPoly, field: &Field) -> Result<(bool, usize, usize), PolyError> {
    if h.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let d = h.degree();
    let needed = d as u64 * d as u64 + d as u64;
    if h.deg_x() == 0 {
        let g = h.specialize_x(field, FieldElement::ZERO);
        let sq = is_const_times_square_uni(&g, field)?;
        return Ok((sq, sq as usize, 1));
    }
    let mut squares = 0;
    let mut tested = 0;
    for u in field.elements().take(needed as usize + 1) {
        tested += 1;
        let s = h.specialize_y(field, u);
        if s.is_zero() || is_const_times_square_uni(&s, field)? {
            squares += 1;
        } else {
            return Ok((false, squares, tested));
        }
    }
    if field.q() as u64 <= needed {
        return Err(PolyError::FieldTooSmall { q: field.q(), d });
    }
    Ok((true, squares, tested))
}

/// First pair `(u, v)`, `u < v` in index order, on which `f(u, v)` and
/// `f(v, u)` disagree on being square, oriented so `f(u, v)` is the square.
pub fn undirected_witness(f: &BivarPoly, field: &Field) -> Option<(FieldElement, FieldElement)> {
    let elems: Vec<FieldElement> = field.elements().collect();
    elems.par_iter().find_map_first(|&u| {
        let row = f.specialize_x(field, u); // f(u, y)
        let col = f.specialize_y(field, u); // f(x, u)
        elems[u.index() as usize + 1..].iter().find_map(|&v| {
            let a = field.is_square(row.eval(field, v));
            let b = field.is_square(col.eval(field, v));
            match (a, b) {
                (true, false) => Some((u, v)),
                (false, true) => Some((v, u)),
                _ => None,
            }
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub undirected: bool,
    pub kernel_square: bool,
    pub admissible: bool,
    /// `(u, v)` with `f(u, v)` square and `f(v, u)` not.
    pub witness: Option<(u32, u32)>,
    /// Canonical form of the primitive kernel.
    pub kernel: String,
    /// Specializations of the kernel examined by the square test.
    pub tested_specializations: usize,
    /// How many of those were constant times a square.
    pub square_specializations: usize,
}

pub fn check_admissible(f: &BivarPoly, field: &Field) -> Result<AdmissibilityReport, PolyError> {
    let kernel = primitive_kernel(f, field)?;
    let (kernel_square, squares, tested) = square_specializations(&kernel.h, field)?;
    let witness = undirected_witness(f, field);
    let undirected = witness.is_none();
    Ok(AdmissibilityReport {
        undirected,
        kernel_square,
        admissible: undirected && !kernel_square,
        witness: witness.map(|(u, v)| (u.index(), v.index())),
        kernel: kernel.h.render(field),
        tested_specializations: tested,
        square_specializations: squares,
    })
}

fn degenerate(g: &UniPoly, field: &Field) -> bool {
    g.is_zero() || is_const_times_square_uni(g, field).expect("nonzero")
}

/// Number of `u` with `f(x, u)` zero or a constant times a square.
pub fn count_degenerate_rows(f: &BivarPoly, field: &Field) -> usize {
    let elems: Vec<FieldElement> = field.elements().collect();
    elems
        .par_iter()
        .filter(|&&u| degenerate(&f.specialize_y(field, u), field))
        .count()
}

/// Number of ordered `(u, v)` in `set x set` with `f(x, u) f(x, v)` zero or a
/// constant times a square.
pub fn count_degenerate_pairs(f: &BivarPoly, set: &[FieldElement], field: &Field) -> usize {
    let rows: Vec<UniPoly> = set.iter().map(|&u| f.specialize_y(field, u)).collect();
    rows.par_iter()
        .map(|a| {
            rows.iter()
                .filter(|b| degenerate(&a.mul(field, b), field))
                .count()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComposeVariant {
    /// `f(g(x), g(y))`
    Plain,
    /// `g(x) g(y) f(g(x), g(y))`
    Tilde,
}

pub fn compose(
    f: &BivarPoly,
    g: &UniPoly,
    variant: ComposeVariant,
    field: &Field,
) -> Result<BivarPoly, PolyError> {
    if g.degree().unwrap_or(0) == 0 {
        return Err(PolyError::ConstantG);
    }
    let gx = BivarPoly::from_uni_x(g);
    let gy = BivarPoly::from_uni_y(g);
    let max_i = f.deg_x() as usize;
    let max_j = f.deg_y() as usize;
    let mut pow_x = vec![BivarPoly::constant(FieldElement::ONE)];
    for k in 0..max_i {
        pow_x.push(pow_x[k].mul(field, &gx));
    }
    let mut pow_y = vec![BivarPoly::constant(FieldElement::ONE)];
    for k in 0..max_j {
        pow_y.push(pow_y[k].mul(field, &gy));
    }
    let mut out = BivarPoly::zero();
    for (&(i, j), &c) in f.terms() {
        let term = pow_x[i as usize].mul(field, &pow_y[j as usize]).scale(field, c);
        out = out.add(field, &term);
    }
    if variant == ComposeVariant::Tilde {
        out = out.mul(field, &gx).mul(field, &gy);
    }
    Ok(out)
}
