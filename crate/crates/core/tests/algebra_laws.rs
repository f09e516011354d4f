use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use koszul_perturb::verify::random_s_linear_derivation;
use koszul_perturb::{GradedElement, ModelConfig, Monomial, Rational};

const D: usize = 2;
const E: usize = 2;

fn config() -> ModelConfig {
    ModelConfig::new(D, E, 4).unwrap()
}

fn monomial(with_vectors: bool) -> impl Strategy<Value = Monomial> {
    let b_max = if with_vectors { 1u8 << D } else { 1 };
    (0u16..1 << E, 0u8..3, 0u8..3, 0u8..1 << D, 0u8..b_max).prop_map(|(w, s0, s1, a, b)| {
        Monomial::from_masks(w, [s0, s1, 0, 0], a, b)
    })
}

fn element(with_vectors: bool) -> impl Strategy<Value = GradedElement> {
    prop::collection::vec((monomial(with_vectors), -5i64..=5, 1i64..=3), 0..4).prop_map(|terms| {
        let mut x = GradedElement::zero(config());
        for (m, n, den) in terms {
            x.add_term(m, Rational::new(n, den));
        }
        x
    })
}

/// A single-parity element: every term is forced to parity `p` by toggling `w_1`.
fn homogeneous(p: usize) -> impl Strategy<Value = GradedElement> {
    prop::collection::vec((monomial(true), -5i64..=5), 0..4).prop_map(move |terms| {
        let mut x = GradedElement::zero(config());
        for (mut m, n) in terms {
            if m.parity() % 2 != p {
                m.w ^= 1;
            }
            x.add_term(m, Rational::from_int(n));
        }
        x
    })
}

fn homogeneous_pair() -> impl Strategy<Value = (usize, usize, GradedElement, GradedElement)> {
    (0usize..2, 0usize..2).prop_flat_map(|(p, q)| (Just(p), Just(q), homogeneous(p), homogeneous(q)))
}

proptest! {
    #[test]
    fn product_is_associative(x in element(true), y in element(true), z in element(true)) {
        let left = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let right = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(left.clear_overflow(), right.clear_overflow());
    }

    #[test]
    fn product_is_graded_commutative((p, q, x, y) in homogeneous_pair()) {
        let xy = x.multiply(&y).unwrap();
        let yx = y.multiply(&x).unwrap().scale(&Rational::sign(p * q));
        prop_assert_eq!(xy.clear_overflow(), yx.clear_overflow());
    }

    #[test]
    fn odd_derivation_satisfies_leibniz(x in element(false), y in element(false), seed in any::<u64>()) {
        let c = config();
        let der = random_s_linear_derivation(c, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let lhs = der.apply(&x.multiply(&y).unwrap()).unwrap();
        // D(xy) = D(x) y + (−1)^{|x|} x D(y), expanded over the terms of x
        let mut rhs = der.apply(&x).unwrap().multiply(&y).unwrap();
        for (m, coeff) in x.terms() {
            let xm = GradedElement::monomial(c, *m, coeff.clone());
            let part = xm.multiply(&der.apply(&y).unwrap()).unwrap().scale(&Rational::sign(m.parity()));
            rhs.add_assign(&part);
        }
        prop_assert_eq!(lhs.clear_overflow(), rhs.clear_overflow());
    }
}
