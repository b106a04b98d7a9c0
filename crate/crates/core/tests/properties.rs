use adelic_core::arith::mod_inverse;
use adelic_core::global_galois::{primitive_element, Character, CyclicSubgroup, GlobalAutomorphism};
use adelic_core::harrison::{classify, kummer_inverse, kummer_map, ExtensionClass, ValuationClass};
use adelic_core::local_algebra::{kummer_pair, oracle_pair};
use adelic_core::p1_ingest::{divisor, germ_idele, RationalFunction};
use adelic_core::{sample, FieldCtx, FieldElem, LocalField, Point, ValuationVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ELL: u64 = 7;

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5)]
}

fn ctx_with_roots(p: u64) -> FieldCtx {
    let ctx = FieldCtx::new(ELL, p).unwrap();
    ctx.zeta();
    ctx
}

fn top_elem(ctx: &FieldCtx, raw: &[u64]) -> FieldElem {
    let lv = ctx.top_level();
    let d = ctx.abs_degree(lv);
    ctx.elem(lv, &raw[..d.min(raw.len())]).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..ELL, 4)
}

fn vector(p: u64) -> impl Strategy<Value = ValuationVector> {
    prop::collection::btree_map(0u64..12, 0..p as i64, 0..5)
        .prop_map(move |m| ValuationVector::new(p, m.into_iter().map(|(x, v)| (Point::label(x.to_string()), v))))
}

proptest! {
    #[test]
    fn field_axioms(p in prime(), a in coords(), b in coords(), c in coords()) {
        let ctx = ctx_with_roots(p);
        let (a, b, c) = (top_elem(&ctx, &a), top_elem(&ctx, &b), top_elem(&ctx, &c));
        prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        prop_assert_eq!(ctx.mul(&a, &b), ctx.mul(&b, &a));
        prop_assert!(ctx.sub(&ctx.add(&a, &b), &b) == a);
        if !a.is_zero() {
            prop_assert!(ctx.mul(&a, &ctx.inv(&a).unwrap()).is_one());
        }
    }

    #[test]
    fn pth_roots_in_the_tower(p in prime(), a in coords()) {
        let ctx = ctx_with_roots(p);
        let a = top_elem(&ctx, &a);
        prop_assume!(!a.is_zero());
        let ap = ctx.pow(&a, p as i64).unwrap();
        let r = ctx.pth_root(&ap).unwrap();
        prop_assert_eq!(ctx.pow(&r, p as i64).unwrap(), ap);
    }

    #[test]
    fn discrete_log_is_a_homomorphism(p in prime(), i in 0i64..50, j in 0i64..50) {
        let ctx = ctx_with_roots(p);
        let w = ctx.mul(&ctx.zeta_pow(i), &ctx.zeta_pow(j));
        prop_assert_eq!(ctx.log_zeta(&w).unwrap(), ((i + j) % p as i64) as u64);
    }

    #[test]
    fn series_valuation_and_inverse(p in prime(), seed: u64, v1 in -5i64..5, v2 in -5i64..5) {
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (sample::series(&k, &mut rng, v1), sample::series(&k, &mut rng, v2));
        prop_assert_eq!(k.mul(&a, &b).valuation().unwrap(), v1 + v2);
        let inv = k.inv(&a).unwrap();
        prop_assert_eq!(inv.valuation().unwrap(), -v1);
        prop_assert!(k.mul(&a, &inv).agrees(&k.one()));
    }

    #[test]
    fn hensel_lifting(p in prime(), seed: u64, v in -3i64..3) {
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.pow(&sample::series(&k, &mut rng, v), p as i64).unwrap();
        let r = k.pth_root(&a).unwrap();
        prop_assert!(k.pow(&r, p as i64).unwrap().agrees(&a));
        let unit = k.random_unit(0, &mut rng);
        let r = k.hensel_pth_root(&unit).unwrap();
        prop_assert!(k.pow(&r, p as i64).unwrap().agrees(&unit));
    }

    #[test]
    fn pairing_bilinear_and_perfect(p in prime(), a1 in 0u64..10, a2 in 0u64..10, l1 in -8i64..8, l2 in -8i64..8, t in 1i64..20) {
        prop_assume!(t % p as i64 != 0);
        let ctx = ctx_with_roots(p);
        let pr = |a: u64, l: i64| kummer_pair(&ctx, a, l, t).unwrap();
        prop_assert_eq!(pr(a1 + a2, l1), ctx.mul(&pr(a1, l1), &pr(a2, l1)));
        prop_assert_eq!(pr(a1, l1 + l2), ctx.mul(&pr(a1, l1), &pr(a1, l2)));
        if a1 % p != 0 {
            let values: std::collections::BTreeSet<_> = (0..p as i64).map(|l| pr(a1, l)).collect();
            prop_assert_eq!(values.len(), p as usize);
        }
    }

    #[test]
    fn harrison_group_law((p, a, b, c) in prime().prop_flat_map(|p| (Just(p), vector(p), vector(p), vector(p)))) {
        let (a, b, c) = (ExtensionClass::from_vector(a), ExtensionClass::from_vector(b), ExtensionClass::from_vector(c));
        prop_assert_eq!(a.product(&b).unwrap().product(&c).unwrap(), a.product(&b.product(&c).unwrap()).unwrap());
        prop_assert_eq!(a.product(&b).unwrap(), b.product(&a).unwrap());
        prop_assert!(a.product(&a.inverse()).unwrap().is_trivial());
        prop_assert_eq!(a.product(&ExtensionClass::trivial(p)).unwrap(), a);
    }

    #[test]
    fn valuation_class_canonical((p, v) in prime().prop_flat_map(|p| (Just(p), vector(p))), b in 1i64..5) {
        prop_assume!(b % p as i64 != 0);
        let c = ValuationClass::of(&v);
        prop_assert_eq!(ValuationClass::of(&v.scale(b)), c.clone());
        prop_assert_eq!(ValuationClass::of(&c.canon), c.clone());
        if let Some(first) = c.canon.support().values().next() {
            prop_assert_eq!(*first, 1);
        }
    }

    #[test]
    fn kummer_round_trip((p, v) in prime().prop_flat_map(|p| (Just(p), vector(p)))) {
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 8);
        let c = ExtensionClass::from_vector(v);
        prop_assert_eq!(kummer_map(&kummer_inverse(&k, &c), p), c);
    }

    #[test]
    fn germ_divisor_additive(seed: u64) {
        let ctx = FieldCtx::new(ELL, 3).unwrap();
        let k = LocalField::new(&ctx, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_f = |rng: &mut ChaCha8Rng| {
            use rand::Rng;
            let n = rng.gen_range(0..4);
            let roots = sample::points(rng, n, ELL);
            let f: Vec<(i64, i64)> = roots
                .iter()
                .map(|x| (x.to_string().parse().unwrap(), [-2, -1, 1, 2, 3][rng.gen_range(0..5)]))
                .collect();
            RationalFunction::from_int_roots(&ctx, &f).unwrap()
        };
        let (f, g) = (random_f(&mut rng), random_f(&mut rng));
        let fg = f.mul(&ctx, &g);
        let (tf, tg, tfg) = (germ_idele(&k, &f).unwrap(), germ_idele(&k, &g).unwrap(), germ_idele(&k, &fg).unwrap());
        for x in tf.points().union(&tg.points()).chain(tfg.points().iter()) {
            prop_assert_eq!(tfg.valuation_at(x), tf.valuation_at(x) + tg.valuation_at(x));
        }
        for (x, v) in divisor(&fg) {
            prop_assert_eq!(tfg.valuation_at(&x), v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classify_twists_by_inverse_exponent(p in prime(), seed: u64, b in 1i64..5) {
        prop_assume!(b % p as i64 != 0);
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::ramified_idele(&k, &mut rng, 2, 1);
        let g = CyclicSubgroup::new(&sample::transitive_generator(&t, p, &mut rng), &t, p).unwrap();
        let base = classify(&k, &t, &g, Character::new(1, p).unwrap()).unwrap();
        let twisted = classify(&k, &t, &g, Character::new(b, p).unwrap()).unwrap();
        prop_assert_eq!(twisted.vec, base.vec.scale(b));
        // the same extension seen through the generator gᶜ with c = b⁻¹
        let c = mod_inverse(b, p).unwrap();
        let h = g.regenerated(c).unwrap();
        let via_h = classify(&k, &t, &h, Character::new(1, p).unwrap()).unwrap();
        prop_assert_eq!(via_h.vec, base.vec.scale(b));
    }

    #[test]
    fn primitive_elements_verify(p in prime(), seed: u64, s in 1i64..5) {
        prop_assume!(s % p as i64 != 0);
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::ramified_idele(&k, &mut rng, 2, 2);
        let g = CyclicSubgroup::new(&sample::transitive_generator(&t, p, &mut rng), &t, p).unwrap();
        let alpha = primitive_element(&k, &t, &g, Character::new(s, p).unwrap()).unwrap();
        prop_assert!(alpha.verify(&k, &t, &g).unwrap());
        prop_assert_eq!(alpha.alpha_p.ram_profile(p), t.ram_profile(p));
    }

    #[test]
    fn generator_group_structure(p in prime(), seed: u64) {
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::ramified_idele(&k, &mut rng, 2, 2);
        let g: GlobalAutomorphism = sample::transitive_generator(&t, p, &mut rng).normalized(&t, p).unwrap();
        prop_assert!(g.pow(p, p).is_identity());
        prop_assert!(g.compose(&g.inverse(p), p).unwrap().is_identity());
        prop_assert_eq!(CyclicSubgroup::new(&g, &t, p).unwrap().elements().len(), p as usize);
    }

    #[test]
    fn pairing_oracle_agrees(p in prime(), seed: u64, a in 0u64..5, lv in -5i64..5, tv in -5i64..5) {
        prop_assume!(tv % p as i64 != 0);
        let ctx = FieldCtx::new(ELL, p).unwrap();
        let k = LocalField::new(&ctx, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lambda, t) = (sample::series(&k, &mut rng, lv), sample::series(&k, &mut rng, tv));
        prop_assert_eq!(kummer_pair(&ctx, a, lv, tv).unwrap(), oracle_pair(&k, a, &lambda, &t).unwrap());
    }
}
