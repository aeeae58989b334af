//! Squarefree decomposition over `F_q` (Yun's algorithm with the
//! characteristic-`p` correction for polynomials with vanishing derivative).

use super::{PolyError, UniPoly};
use crate::ff::{Field, FieldElement};

/// `g = unit * prod factor^multiplicity`, factors monic, squarefree and
/// pairwise coprime, one factor per multiplicity, sorted by multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: FieldElement,
    pub factors: Vec<(UniPoly, u32)>,
}

impl SquarefreeDecomposition {
    /// Product of the distinct factors.
    pub fn radical(&self, field: &Field) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::one(), |acc, (f, _)| acc.mul(field, f))
    }

    /// Number of distinct roots in a splitting field.
    pub fn distinct_roots(&self) -> usize {
        self.factors
            .iter()
            .map(|(f, _)| f.degree().unwrap_or(0))
            .sum()
    }

    pub fn expand(&self, field: &Field) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.unit), |acc, (f, k)| {
                acc.mul(field, &f.pow(field, *k as u64))
            })
    }
}

pub fn uni_squarefree_decomposition(
    g: &UniPoly,
    field: &Field,
) -> Result<SquarefreeDecomposition, PolyError> {
    if g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (unit, monic) = g.monic(field);
    let mut factors = Vec::new();
    squarefree_monic(&monic, field, 1, &mut factors);
    factors.sort_by_key(|&(_, k)| k);
    Ok(SquarefreeDecomposition { unit, factors })
}

fn squarefree_monic(f: &UniPoly, field: &Field, scale: u32, out: &mut Vec<(UniPoly, u32)>) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let df = f.derivative(field);
    let mut c = f.gcd(field, &df);
    let mut w = f.exact_div(field, &c);
    let mut i = 1u32;
    // Factors of multiplicity not divisible by p leave through `w`; the rest
    // stay in `c`, which is then a p-th power.
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(field, &c);
        let fac = w.exact_div(field, &y);
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac, i * scale));
        }
        w = y;
        c = c.exact_div(field, &w);
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        let root = c.pth_root(field);
        squarefree_monic(&root, field, scale * field.p(), out);
    }
}

/// True iff `g` is a nonzero constant times the square of a polynomial.
pub fn is_const_times_square_uni(g: &UniPoly, field: &Field) -> Result<bool, PolyError> {
    let d = uni_squarefree_decomposition(g, field)?;
    Ok(d.factors.iter().all(|&(_, k)| k % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lin(field: &Field, r: i64) -> UniPoly {
        UniPoly::new(vec![field.from_int(r), FieldElement::ONE])
    }

    #[test]
    fn example_mixed_multiplicities() {
        let f = Field::prime(7).unwrap();
        let g = lin(&f, 1).pow(&f, 2).mul(&f, &lin(&f, 2));
        let d = uni_squarefree_decomposition(&g, &f).unwrap();
        assert_eq!(d.unit, FieldElement::ONE);
        assert_eq!(d.factors, vec![(lin(&f, 2), 1), (lin(&f, 1), 2)]);
    }

    #[test]
    fn pth_power_branch() {
        let f = Field::prime(3).unwrap();
        let g = UniPoly::x().pow(&f, 3);
        let d = uni_squarefree_decomposition(&g, &f).unwrap();
        assert_eq!(d.factors, vec![(UniPoly::x(), 3)]);
        // x^7 (x+1)^3 over F_3: multiplicity 7 = 2*3 + 1 splits across levels.
        let g = UniPoly::x().pow(&f, 7).mul(&f, &lin(&f, 1).pow(&f, 3));
        let d = uni_squarefree_decomposition(&g, &f).unwrap();
        assert_eq!(d.factors, vec![(lin(&f, 1), 3), (UniPoly::x(), 7)]);
        assert_eq!(d.expand(&f), g);
    }

    #[test]
    fn constants() {
        let f = Field::prime(7).unwrap();
        let d = uni_squarefree_decomposition(&UniPoly::constant(f.from_int(4)), &f).unwrap();
        assert_eq!(d.unit.index(), 4);
        assert!(d.factors.is_empty());
        assert_eq!(
            uni_squarefree_decomposition(&UniPoly::zero(), &f),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn square_test_examples() {
        let f = Field::prime(7).unwrap();
        let sq = lin(&f, 1).pow(&f, 2).scale(&f, f.from_int(3));
        assert!(is_const_times_square_uni(&sq, &f).unwrap());
        let not = UniPoly::x().mul(&f, &lin(&f, 1).pow(&f, 2));
        assert!(!is_const_times_square_uni(&not, &f).unwrap());
        assert!(is_const_times_square_uni(&UniPoly::constant(f.from_int(5)), &f).unwrap());
    }

    #[test]
    fn extension_field_pth_root() {
        let f = Field::new(3, 2).unwrap();
        let t = f.generator().unwrap();
        // (x + t)^3 (x^2 + 1 + t)^2
        let a = UniPoly::new(vec![t, FieldElement::ONE]).pow(&f, 3);
        let b = UniPoly::new(vec![f.add(t, FieldElement::ONE), FieldElement::ZERO, FieldElement::ONE])
            .pow(&f, 2);
        let g = a.mul(&f, &b).scale(&f, t);
        let d = uni_squarefree_decomposition(&g, &f).unwrap();
        assert_eq!(d.expand(&f), g);
        assert!(d.factors.iter().any(|&(_, k)| k == 3));
    }

    fn random_poly(rng: &mut ChaCha8Rng, field: &Field, deg: usize) -> UniPoly {
        let mut c: Vec<_> = (0..deg).map(|_| field.element(rng.gen_range(0..field.q() as u64)).unwrap()).collect();
        c.push(FieldElement::ONE);
        UniPoly::new(c)
    }

    fn random_nonzero(rng: &mut ChaCha8Rng, field: &Field) -> FieldElement {
        field.element(rng.gen_range(1..field.q() as u64)).unwrap()
    }

    #[test]
    fn square_soundness_random() {
        for q in [13u64, 27, 49] {
            let field = Field::of_order(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for _ in 0..500 {
                let deg = rng.gen_range(0..5);
                let g = random_poly(&mut rng, &field, deg);
                let c = random_nonzero(&mut rng, &field);
                let sq = g.pow(&field, 2).scale(&field, c);
                assert!(is_const_times_square_uni(&sq, &field).unwrap());
                // A linear factor coprime to g breaks squareness.
                let l = loop {
                    let r = field.element(rng.gen_range(0..q)).unwrap();
                    let l = UniPoly::new(vec![r, FieldElement::ONE]);
                    if g.gcd(&field, &l).is_constant() {
                        break l;
                    }
                };
                assert!(!is_const_times_square_uni(&sq.mul(&field, &l), &field).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs(seed in any::<u64>(), deg in 1usize..9) {
            let field = Field::of_order(if seed % 2 == 0 { 5 } else { 9 }).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Build products with forced repeats so high multiplicities occur.
            let a = random_poly(&mut rng, &field, deg.min(3));
            let b = random_poly(&mut rng, &field, 1);
            let g = a.pow(&field, 2).mul(&field, &b.pow(&field, deg as u64));
            let d = uni_squarefree_decomposition(&g, &field).unwrap();
            prop_assert_eq!(d.expand(&field), g);
            for (i, (fi, _)) in d.factors.iter().enumerate() {
                prop_assert!(fi.is_monic());
                let df = fi.derivative(&field);
                prop_assert!(fi.gcd(&field, &df).is_constant());
                for (fj, _) in &d.factors[i + 1..] {
                    prop_assert!(fi.gcd(&field, fj).is_constant());
                }
            }
        }
    }
}
