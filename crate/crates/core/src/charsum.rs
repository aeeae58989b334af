//! Quadratic character sums: complete one-variable sums against the Weil
//! bound, and incomplete two-variable sums over a vertex set.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ff::{Field, FieldElement};
use crate::poly::{
    is_const_times_square_biv, is_const_times_square_uni, primitive_kernel, uni_squarefree_decomposition,
    BivarPoly, PolyError, UniPoly,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CharSumError {
    #[error("g is a square of a polynomial")]
    SquareHypothesisViolated,
    #[error("g must be monic and nonconstant")]
    NotMonicNonconstant,
    #[error("the scalar a must be nonzero")]
    ZeroScalar,
    #[error("the primitive kernel of f is a constant times a square")]
    KernelSquare,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumReport {
    pub value: i64,
    pub bound: f64,
    /// `|value| / bound`, zero when both vanish.
    pub ratio: f64,
}

fn report(value: i64, bound: f64) -> CharSumReport {
    let ratio = if value == 0 { 0.0 } else { value.unsigned_abs() as f64 / bound };
    CharSumReport { value, bound, ratio }
}

/// `sum_x chi(a g(x))` with the bound `(n - 1) sqrt(q)`, `n` the number of
/// distinct roots of `g` in its splitting field.
pub fn weil_sum(g: &UniPoly, a: FieldElement, field: &Field) -> Result<CharSumReport, CharSumError> {
    if g.is_constant() || !g.is_monic() {
        return Err(CharSumError::NotMonicNonconstant);
    }
    if a.is_zero() {
        return Err(CharSumError::ZeroScalar);
    }
    if is_const_times_square_uni(g, field)? {
        return Err(CharSumError::SquareHypothesisViolated);
    }
    let n = uni_squarefree_decomposition(g, field)?.distinct_roots();
    let value: i64 = field
        .elements()
        .map(|x| field.chi(field.mul(a, g.eval(field, x))) as i64)
        .sum();
    let bound = (n as f64 - 1.0) * (field.q() as f64).sqrt();
    Ok(report(value, bound))
}

/// `sum_{a, b in C} chi(f(a, b))` with the reference scale
/// `|C|^{3/2} q^{1/4} + |C| q^{1/2}`.
pub fn incomplete_2d_sum(f: &BivarPoly, set: &[FieldElement], field: &Field) -> Result<CharSumReport, CharSumError> {
    let kernel = primitive_kernel(f, field)?;
    if is_const_times_square_biv(&kernel.h, field)? {
        return Err(CharSumError::KernelSquare);
    }
    let value: i64 = set
        .par_iter()
        .map(|&a| {
            let row = f.specialize_x(field, a);
            set.iter().map(|&b| field.chi(row.eval(field, b)) as i64).sum::<i64>()
        })
        .sum();
    let c = set.len() as f64;
    let q = field.q() as f64;
    Ok(report(value, c.powf(1.5) * q.powf(0.25) + c * q.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::poly::parse_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn weil_examples() {
        let f7 = field(7);
        let g = UniPoly::parse("x^2+1", &f7).unwrap();
        let r = weil_sum(&g, FieldElement::ONE, &f7).unwrap();
        assert_eq!(r.value, -1);
        assert!((r.bound - 7f64.sqrt()).abs() < 1e-12);
        for q in [5u64, 9, 13, 27] {
            let fq = field(q);
            let r = weil_sum(&UniPoly::x(), FieldElement::ONE, &fq).unwrap();
            assert_eq!((r.value, r.ratio), (0, 0.0));
        }
        let sq = UniPoly::parse("(x+1)^2", &f7).unwrap();
        assert_eq!(weil_sum(&sq, FieldElement::ONE, &f7), Err(CharSumError::SquareHypothesisViolated));
        assert_eq!(
            weil_sum(&UniPoly::parse("2*x", &f7).unwrap(), FieldElement::ONE, &f7),
            Err(CharSumError::NotMonicNonconstant)
        );
        assert_eq!(weil_sum(&g, FieldElement::ZERO, &f7), Err(CharSumError::ZeroScalar));
    }

    #[test]
    fn square_scalar_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fq = field(49);
        for _ in 0..50 {
            let deg = rng.gen_range(1..6);
            let mut c: Vec<FieldElement> = (0..deg).map(|_| fq.element(rng.gen_range(0..49)).unwrap()).collect();
            c.push(FieldElement::ONE);
            let g = UniPoly::new(c);
            let a = fq.element(rng.gen_range(1..49)).unwrap();
            let s = fq.element(rng.gen_range(1..49)).unwrap();
            match (weil_sum(&g, a, &fq), weil_sum(&g, fq.mul(a, fq.mul(s, s)), &fq)) {
                (Ok(x), Ok(y)) => assert_eq!(x.value, y.value),
                (Err(x), Err(y)) => assert_eq!(x, y),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn two_dimensional_examples() {
        let f13 = field(13);
        let f = parse_poly("x*y+1", &f13).unwrap();
        let all: Vec<FieldElement> = f13.elements().collect();
        let r = incomplete_2d_sum(&f, &all, &f13).unwrap();
        assert!(r.ratio <= 3.0);
        let empty = incomplete_2d_sum(&f, &[], &f13).unwrap();
        assert_eq!((empty.value, empty.bound, empty.ratio), (0, 0.0, 0.0));
        let sq = parse_poly("(x-y)^2", &f13).unwrap();
        assert_eq!(incomplete_2d_sum(&sq, &all, &f13), Err(CharSumError::KernelSquare));

        // x + y on the nonzero squares of F_13: a clique check from below.
        let g = parse_poly("x+y", &f13).unwrap();
        let squares: Vec<FieldElement> = f13.elements().filter(|&a| !a.is_zero() && f13.is_square(a)).collect();
        let r = incomplete_2d_sum(&g, &squares, &f13).unwrap();
        let brute: i64 = squares
            .iter()
            .flat_map(|&a| squares.iter().map(move |&b| (a, b)))
            .map(|(a, b)| f13.chi(f13.add(a, b)) as i64)
            .sum();
        assert_eq!(r.value, brute);
    }

    #[test]
    fn full_sum_matches_graph() {
        for q in [13u64, 25, 27, 49] {
            let fq = field(q);
            for src in ["x*y+1", "x+y", "x*y+x+y+3"] {
                let f = parse_poly(src, &fq).unwrap();
                let g = build_graph(&f, &fq).unwrap();
                let all: Vec<FieldElement> = fq.elements().collect();
                let total = incomplete_2d_sum(&f, &all, &fq).unwrap().value;
                let diag: i64 = all.iter().map(|&a| fq.chi(f.eval(&fq, a, a)) as i64).sum();
                let pairs = (q * (q - 1) / 2) as i64;
                let e = g.edge_count() as i64;
                let z = g.zero_pairs() as i64;
                assert_eq!(total - diag, 2 * ((e - z) - (pairs - e)), "q={q} {src}");
            }
        }
    }
}
