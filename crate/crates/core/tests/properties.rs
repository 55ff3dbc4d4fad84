use std::sync::Arc;

use nonat_core::cocycle::{check_cocycle_identity, flip, phi, skew_step, CocycleContext, ExtensionPoint};
use nonat_core::group::{add, translate, GroupConfig, GroupElement, Mode, TruncatedPoint};
use nonat_core::names::{hamming, FunnyWord};
use nonat_core::sbh::sbh_quadratic_form;
use nonat_core::spectral::fourier_coeff_direct;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const PRIMES: [u64; 3] = [5, 7, 11];

fn cfg() -> GroupConfig {
    GroupConfig::new(&PRIMES, Mode::Experimental).unwrap()
}

fn residues() -> impl Strategy<Value = Vec<u64>> {
    (0..5u64, 0..7u64, 0..11u64).prop_map(|(a, b, c)| vec![a, b, c])
}

fn element() -> impl Strategy<Value = GroupElement> {
    residues().prop_map(|r| GroupElement::from_dense(&r, &cfg()).unwrap())
}

fn point() -> impl Strategy<Value = TruncatedPoint> {
    residues().prop_map(|r| TruncatedPoint::new(r, &cfg()).unwrap())
}

proptest! {
    #[test]
    fn addition_is_an_abelian_group(g in element(), h in element(), k in element()) {
        let c = cfg();
        let gh = add(&g, &h, &c).unwrap();
        prop_assert_eq!(&gh, &add(&h, &g, &c).unwrap());
        prop_assert_eq!(add(&gh, &k, &c).unwrap(), add(&g, &add(&h, &k, &c).unwrap(), &c).unwrap());
        prop_assert_eq!(add(&g, &GroupElement::zero(), &c).unwrap(), g.clone());
        prop_assert!(add(&g, &g.neg(&c).unwrap(), &c).unwrap().is_zero());
    }

    #[test]
    fn translation_is_an_action(x in point(), g in element(), h in element()) {
        let c = cfg();
        let lhs = translate(&translate(&x, &h, &c).unwrap(), &g, &c).unwrap();
        prop_assert_eq!(lhs, translate(&x, &add(&g, &h, &c).unwrap(), &c).unwrap());
    }

    #[test]
    fn phi_depends_only_on_support(x in point(), y in point(), g in element()) {
        let ctx = CocycleContext::legendre(&cfg()).unwrap();
        let mut mixed = y.coords().to_vec();
        for &(n, _) in g.support() {
            mixed[n] = x.coord(n);
        }
        let mixed = TruncatedPoint::new(mixed, &cfg()).unwrap();
        prop_assert_eq!(phi(&x, &g, &ctx).unwrap(), phi(&mixed, &g, &ctx).unwrap());
    }

    #[test]
    fn skew_product_commutes_with_flip(x in point(), g in element(), up in any::<bool>()) {
        let ctx = CocycleContext::legendre(&cfg()).unwrap();
        let p = ExtensionPoint::new(x, if up { 1 } else { -1 }).unwrap();
        prop_assert_eq!(skew_step(&flip(&p), &g, &ctx).unwrap(), flip(&skew_step(&p, &g, &ctx).unwrap()));
    }

    #[test]
    fn hamming_is_a_metric(a in prop::collection::vec(0u8..2, 12), b in prop::collection::vec(0u8..2, 12), c in prop::collection::vec(0u8..2, 12)) {
        let cf = GroupConfig::new(&[13], Mode::Experimental).unwrap();
        let dom: Arc<[GroupElement]> = (0..12).map(|i| GroupElement::from_dense(&[i], &cf).unwrap()).collect::<Vec<_>>().into();
        let w = |bits: Vec<u8>| FunnyWord::new(dom.clone(), bits).unwrap();
        let (a, b, c) = (w(a), w(b), w(c));
        let ab = hamming(&a, &b).unwrap();
        prop_assert_eq!(ab, hamming(&b, &a).unwrap());
        prop_assert!(hamming(&a, &c).unwrap() <= ab + hamming(&b, &c).unwrap());
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert_eq!(hamming(&a, &a.complement()).unwrap(), Ratio::one());
    }

    #[test]
    fn quadratic_form_is_nonnegative(
        raw in prop::collection::btree_set(0usize..385, 1..7),
        signs in prop::collection::vec(any::<bool>(), 7),
    ) {
        let c = cfg();
        let ctx = CocycleContext::legendre(&c).unwrap();
        let theta: Vec<_> = raw
            .iter()
            .map(|&i| nonat_core::group::element_at_level_index(i, 3, &c).unwrap())
            .collect();
        let signs: Vec<i8> = signs[..theta.len()].iter().map(|&s| if s { 1 } else { -1 }).collect();
        let q = sbh_quadratic_form(&theta, &signs, &ctx).unwrap();
        prop_assert!(!q.is_negative());
    }

    #[test]
    fn coefficients_bounded_and_even(g in element()) {
        let ctx = CocycleContext::legendre(&cfg()).unwrap();
        let v = fourier_coeff_direct(&g, &ctx).unwrap().value;
        prop_assert!(v.abs() <= BigRational::one());
        prop_assert_eq!(v, fourier_coeff_direct(&g.neg(&cfg()).unwrap(), &ctx).unwrap().value);
    }
}

#[test]
fn cocycle_identity_on_random_triples() {
    use rand::{Rng, SeedableRng};
    let c = cfg();
    let ctx = CocycleContext::legendre(&c).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let draw =
        |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u64> { PRIMES.iter().map(|&p| rng.random_range(0..p)).collect() };
    for _ in 0..10_000 {
        let x = TruncatedPoint::new(draw(&mut rng), &c).unwrap();
        let g = GroupElement::from_dense(&draw(&mut rng), &c).unwrap();
        let g2 = GroupElement::from_dense(&draw(&mut rng), &c).unwrap();
        assert!(check_cocycle_identity(&x, &g, &g2, &ctx).unwrap());
    }
}
