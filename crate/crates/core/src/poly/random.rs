//! Seeded random polynomials.

use rand::Rng;

use super::{check_admissible, BivarPoly, PolyError};
use crate::ff::{Field, FieldElement};

/// Maximum rejection attempts per admissible draw.
pub const MAX_ATTEMPTS: u32 = 1000;

fn random_element<R: Rng>(rng: &mut R, field: &Field, nonzero: bool) -> FieldElement {
    let lo = u64::from(nonzero);
    field.element(rng.gen_range(lo..field.q() as u64)).expect("in range")
}

/// Symmetric `f` (`c_ij = c_ji`) of exact total degree `d`, uniform over
/// coefficients with a nonzero `x^d` (and `y^d`) term.
pub fn random_symmetric<R: Rng>(d: u32, field: &Field, rng: &mut R) -> BivarPoly {
    let mut terms = Vec::new();
    for total in 0..=d {
        for i in 0..=total / 2 {
            let j = total - i;
            let c = random_element(rng, field, total == d && i == 0);
            terms.push(((i, j), c));
            if i != j {
                terms.push(((j, i), c));
            }
        }
    }
    BivarPoly::from_terms(field, terms)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleDraw {
    pub poly: BivarPoly,
    /// Draws taken, including the accepted one.
    pub attempts: u32,
}

/// Rejection-samples [`random_symmetric`] until the draw is admissible.
pub fn random_admissible<R: Rng>(d: u32, field: &Field, rng: &mut R) -> Result<AdmissibleDraw, PolyError> {
    for attempts in 1..=MAX_ATTEMPTS {
        let poly = random_symmetric(d, field, rng);
        if check_admissible(&poly, field)?.admissible {
            return Ok(AdmissibleDraw { poly, attempts });
        }
    }
    Err(PolyError::NoAdmissibleDraw { attempts: MAX_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_symmetric_and_admissible() {
        let field = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=4 {
            let draw = random_admissible(d, &field, &mut rng).unwrap();
            assert_eq!(draw.poly.degree(), d);
            assert_eq!(draw.poly.swap_xy(), draw.poly);
            assert!(check_admissible(&draw.poly, &field).unwrap().admissible);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let field = Field::new(3, 3).unwrap();
        let a = random_admissible(3, &field, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_admissible(3, &field, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
