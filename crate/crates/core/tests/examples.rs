use adelic_core::harrison::{conjugate, ExtensionClass};
use adelic_core::p1_ingest::{
    classify_superelliptic, classify_superelliptic_unchecked, divisor, germ_idele, RationalFunction,
};
use adelic_core::{Error, FieldCtx, LocalField, Point, ValuationVector};

fn setup() -> FieldCtx {
    FieldCtx::new(7, 3).unwrap()
}

#[test]
fn cubic_cover_and_its_square_are_conjugate() {
    let ctx = setup();
    let k = LocalField::new(&ctx, 16);
    let f = RationalFunction::from_int_roots(&ctx, &[(2, 1), (3, 1), (4, 1)]).unwrap();
    let f2 = RationalFunction::from_int_roots(&ctx, &[(2, 2), (3, 2), (4, 2)]).unwrap();
    let c = classify_superelliptic(&k, &f).unwrap();
    let want = ValuationVector::new(3, [("2", 1), ("3", 1), ("4", 1)].map(|(x, v)| (Point::label(x), v)));
    assert_eq!(c.vec, want);
    let c2 = classify_superelliptic(&k, &f2).unwrap();
    assert_eq!(c.class, c2.class);
    let b = conjugate(&ExtensionClass::from_vector(c2.vec), &ExtensionClass::from_vector(c.vec)).unwrap();
    assert_eq!(b, Some(2));
}

#[test]
fn pth_power_is_trivial() {
    let ctx = setup();
    let k = LocalField::new(&ctx, 8);
    let f = RationalFunction::from_int_roots(&ctx, &[(0, 3)]).unwrap();
    assert_eq!(classify_superelliptic(&k, &f), Err(Error::PthPower));
}

#[test]
fn infinity_enters_without_the_sum_condition() {
    let ctx = setup();
    let k = LocalField::new(&ctx, 8);
    let f = RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 1)]).unwrap();
    assert!(matches!(classify_superelliptic(&k, &f), Err(Error::NotAdmissible(_))));
    let c = classify_superelliptic_unchecked(&k, &f).unwrap();
    assert!(!c.admissible);
    assert_eq!(c.vec.get(&Point::Infinity), 1);
    assert!(c.ram.contains(&Point::Infinity));
}

#[test]
fn germ_valuations_match_divisor() {
    let ctx = setup();
    let k = LocalField::new(&ctx, 8);
    let f = RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 2), (5, -4)]).unwrap();
    let t = germ_idele(&k, &f).unwrap();
    let d = divisor(&f);
    assert_eq!(d.values().sum::<i64>(), 0);
    for (x, v) in &d {
        assert_eq!(t.valuation_at(x), *v);
    }
    assert_eq!(t.points(), d.keys().cloned().collect());
}
