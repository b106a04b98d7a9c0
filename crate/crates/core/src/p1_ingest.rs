//! Rational functions on `P¹` in factored form, their divisors and germ ideles, and the
//! classifier for superelliptic covers `y^p = f(x)`.
//!
//! Local uniformizers are `z = x − a` at a finite point `a` and `z = 1/x` at `∞`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::adeles::{Idele, Point, ValuationVector};
use crate::coeff_field::{FieldCtx, FieldElem};
use crate::error::{Error, Result};
use crate::global_galois::{Character, CyclicSubgroup};
use crate::harrison::{classify, ValuationClass};
use crate::laurent::{LaurentSeries, LocalField};

/// `c · ∏ᵢ (x − xᵢ)^{vᵢ}` with distinct roots and nonzero exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    constant: FieldElem,
    factors: BTreeMap<FieldElem, i64>,
}

/// JSON form: `{"constant":"L0:[1]","factors":[{"root":"L0:[0]","exp":1}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunctionRepr {
    #[serde(default = "default_constant")]
    pub constant: String,
    #[serde(default)]
    pub factors: Vec<FactorRepr>,
}

fn default_constant() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRepr {
    pub root: String,
    pub exp: i64,
}

impl RationalFunction {
    pub fn new(constant: FieldElem, factors: impl IntoIterator<Item = (FieldElem, i64)>) -> Result<Self> {
        if constant.is_zero() {
            return Err(Error::Parse("the constant of a rational function must be nonzero".into()));
        }
        let mut map = BTreeMap::new();
        for (root, exp) in factors {
            if exp == 0 {
                return Err(Error::Parse(format!("factor at {root} has exponent 0")));
            }
            if map.insert(root.clone(), exp).is_some() {
                return Err(Error::Parse(format!("root {root} is listed twice")));
            }
        }
        Ok(RationalFunction { constant, factors: map })
    }

    /// `∏ (x − root)^exp` over small integer roots, constant `1`.
    pub fn from_int_roots(ctx: &FieldCtx, factors: &[(i64, i64)]) -> Result<Self> {
        Self::new(ctx.one(), factors.iter().map(|&(r, e)| (ctx.from_int(r), e)))
    }

    pub fn constant(&self) -> &FieldElem {
        &self.constant
    }

    pub fn factors(&self) -> &BTreeMap<FieldElem, i64> {
        &self.factors
    }

    pub fn degree(&self) -> i64 {
        self.factors.values().sum()
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (r, e) in &other.factors {
            *factors.entry(r.clone()).or_insert(0) += e;
        }
        factors.retain(|_, e| *e != 0);
        RationalFunction { constant: ctx.mul(&self.constant, &other.constant), factors }
    }

    pub fn from_repr(ctx: &FieldCtx, r: &RationalFunctionRepr) -> Result<Self> {
        let constant = ctx.parse_elem(&r.constant)?;
        let factors = r.factors.iter().map(|f| Ok((ctx.parse_elem(&f.root)?, f.exp))).collect::<Result<Vec<_>>>()?;
        Self::new(constant, factors)
    }

    pub fn to_repr(&self) -> RationalFunctionRepr {
        RationalFunctionRepr {
            constant: self.constant.to_string(),
            factors: self.factors.iter().map(|(r, e)| FactorRepr { root: r.to_string(), exp: *e }).collect(),
        }
    }
}

/// The point `x = a`: labelled by the integer when `a` lies in the prime field.
pub fn point_of(a: &FieldElem) -> Point {
    match a.as_prime_field() {
        Some(n) => Point::label(n.to_string()),
        None => Point::label(a.to_string()),
    }
}

/// `υ_x(f)` at the roots and at `∞`; zero entries are omitted.
pub fn divisor(f: &RationalFunction) -> BTreeMap<Point, i64> {
    let mut d: BTreeMap<Point, i64> = f.factors.iter().map(|(r, e)| (point_of(r), *e)).collect();
    if f.degree() != 0 {
        d.insert(Point::Infinity, -f.degree());
    }
    d
}

/// Laurent expansion of `f` at the finite point `a`: `c·∏ⱼ (a − xⱼ + z)^{vⱼ}`.
pub fn germ_at_finite(k: &LocalField, f: &RationalFunction, a: &FieldElem) -> Result<LaurentSeries> {
    let ctx = k.ctx();
    let mut acc = k.constant(&f.constant);
    for (r, e) in &f.factors {
        let base = k.from_poly(0, &[ctx.sub(a, r), ctx.one()]);
        acc = k.mul(&acc, &k.pow(&base, *e)?);
    }
    Ok(acc)
}

/// Laurent expansion at `∞` in `z = 1/x`: `c·z^{−Σv}·∏ⱼ (1 − xⱼz)^{vⱼ}`.
pub fn germ_at_infinity(k: &LocalField, f: &RationalFunction) -> Result<LaurentSeries> {
    let ctx = k.ctx();
    let mut acc = k.monomial(&f.constant, -f.degree());
    for (r, e) in &f.factors {
        let base = k.from_poly(0, &[ctx.one(), ctx.neg(r)]);
        acc = k.mul(&acc, &k.pow(&base, *e)?);
    }
    Ok(acc)
}

/// The germ of `f` at a labelled point.
pub fn germ_at(k: &LocalField, f: &RationalFunction, x: &Point) -> Result<LaurentSeries> {
    match x {
        Point::Infinity => germ_at_infinity(k, f),
        Point::Label(s) => germ_at_finite(k, f, &k.ctx().parse_elem(s)?),
    }
}

/// `(f_x)_x` with true germs at the divisor support. Every other point carries the unit
/// placeholder `1` as default; its actual germ is available from [`germ_at`].
pub fn germ_idele(k: &LocalField, f: &RationalFunction) -> Result<Idele> {
    let mut ex = Vec::new();
    for r in f.factors.keys() {
        ex.push((point_of(r), germ_at_finite(k, f, r)?));
    }
    if f.degree() != 0 {
        ex.push((Point::Infinity, germ_at_infinity(k, f)?));
    }
    Idele::from_components(k, ex)
}

/// Result of classifying `y^p = f(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperellipticClass {
    pub vec: ValuationVector,
    pub ram: BTreeSet<Point>,
    pub class: ValuationClass,
    pub admissible: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// The admissibility conditions in order; `Ok` carries the warnings.
pub fn admissibility(f: &RationalFunction, p: u64) -> Result<Vec<String>> {
    let p = p as i64;
    if f.factors.values().all(|v| v % p == 0) {
        return Err(Error::PthPower);
    }
    for (r, v) in &f.factors {
        if !(0 < *v && *v < p) {
            return Err(Error::NotAdmissible(format!("exponent {v} at {} is not in (0, {p})", point_of(r))));
        }
    }
    if f.degree() % p != 0 {
        return Err(Error::NotAdmissible(format!("exponent sum {} is not divisible by {p}", f.degree())));
    }
    let g = f.factors.values().fold(0i64, |acc, v| acc.gcd(v));
    let mut warnings = Vec::new();
    if g != 1 {
        warnings.push(format!("gcd of the exponents is {g}: the cover is reducible"));
    }
    Ok(warnings)
}

/// Classifies the cover `y^p = f(x)` through the germ idele and the Kummer action, then
/// cross-checks against the divisor reduced mod `p`.
pub fn classify_superelliptic(k: &LocalField, f: &RationalFunction) -> Result<SuperellipticClass> {
    let warnings = admissibility(f, k.p())?;
    classify_inner(k, f, true, warnings)
}

/// As [`classify_superelliptic`] but only the `p`-th power condition is enforced, so `∞`
/// may enter the ramification locus.
pub fn classify_superelliptic_unchecked(k: &LocalField, f: &RationalFunction) -> Result<SuperellipticClass> {
    match admissibility(f, k.p()) {
        Ok(w) => classify_inner(k, f, true, w),
        Err(Error::NotAdmissible(why)) => classify_inner(k, f, false, vec![why]),
        Err(e) => Err(e),
    }
}

fn classify_inner(
    k: &LocalField,
    f: &RationalFunction,
    admissible: bool,
    warnings: Vec<String>,
) -> Result<SuperellipticClass> {
    let p = k.p();
    let t = germ_idele(k, f)?;
    let g = CyclicSubgroup::kummer(&t, p, 1)?;
    let c = classify(k, &t, &g, Character::new(1, p)?)?;
    let direct = ValuationVector::new(p, divisor(f));
    if c.vec != direct {
        return Err(Error::Inconsistent("germ valuations disagree with the divisor".into()));
    }
    Ok(SuperellipticClass { ram: c.vec.points(), class: ValuationClass::of(&c.vec), vec: c.vec, admissible, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn divisors() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let f = RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 2)]).unwrap();
        let d = divisor(&f);
        assert_eq!(d, BTreeMap::from([(pt("0"), 1), (pt("1"), 2), (Point::Infinity, -3)]));
        let c = RationalFunction::new(ctx.from_int(3), []).unwrap();
        assert!(divisor(&c).is_empty());
        let g = RationalFunction::from_int_roots(&ctx, &[(2, 1), (3, 1), (4, 1)]).unwrap();
        assert_eq!(divisor(&g).values().sum::<i64>(), 0);
        assert_eq!(divisor(&g)[&Point::Infinity], -3);
        assert!(RationalFunction::from_int_roots(&ctx, &[(2, 1), (2, 1)]).is_err());
        assert!(RationalFunction::from_int_roots(&ctx, &[(2, 0)]).is_err());
    }

    #[test]
    fn germs() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let k = LocalField::new(&ctx, 6);
        let x = RationalFunction::from_int_roots(&ctx, &[(0, 1)]).unwrap();
        assert_eq!(germ_at(&k, &x, &pt("0")).unwrap(), k.z());
        assert_eq!(germ_at(&k, &x, &Point::Infinity).unwrap(), k.monomial(&ctx.one(), -1));
        let f = RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 2)]).unwrap();
        // x(x−1)² at x = 1 + z: z²(1 + z)
        let g = germ_at(&k, &f, &pt("1")).unwrap();
        assert_eq!(g, k.from_ints(2, &[1, 1]));
        // at ∞: z⁻³(1 − z)²
        assert_eq!(germ_at(&k, &f, &Point::Infinity).unwrap(), k.from_ints(-3, &[1, -2, 1]));
        // away from the support the germ is a unit: f(2) = 2
        assert_eq!(germ_at(&k, &f, &pt("2")).unwrap().leading(), Some(&ctx.from_int(2)));
        let t = germ_idele(&k, &f).unwrap();
        let vals: BTreeMap<Point, i64> = t.points().into_iter().map(|x| (x.clone(), t.valuation_at(&x))).collect();
        assert_eq!(vals, divisor(&f));
    }

    #[test]
    fn superelliptic_example() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let k = LocalField::new(&ctx, 8);
        let f = RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 2)]).unwrap();
        let c = classify_superelliptic(&k, &f).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"vec":{"0":1,"1":2},"ram":["0","1"],"class":{"0":1,"1":2},"admissible":true}"#
        );
        assert!(!c.ram.contains(&Point::Infinity));
    }

    #[test]
    fn superelliptic_rejections() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let k = LocalField::new(&ctx, 8);
        let cube = RationalFunction::from_int_roots(&ctx, &[(0, 3)]).unwrap();
        assert_eq!(classify_superelliptic(&k, &cube), Err(Error::PthPower));
        let big = RationalFunction::from_int_roots(&ctx, &[(0, 4), (1, 2)]).unwrap();
        assert!(matches!(classify_superelliptic(&k, &big), Err(Error::NotAdmissible(_))));
        let x = RationalFunction::from_int_roots(&ctx, &[(0, 1)]).unwrap();
        assert!(matches!(classify_superelliptic(&k, &x), Err(Error::NotAdmissible(_))));
        let loose = classify_superelliptic_unchecked(&k, &x).unwrap();
        assert!(!loose.admissible);
        assert_eq!(loose.vec.get(&Point::Infinity), 2);
    }

    #[test]
    fn conjugate_covers() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let k = LocalField::new(&ctx, 8);
        let f = RationalFunction::from_int_roots(&ctx, &[(2, 1), (3, 1), (4, 1)]).unwrap();
        let g = RationalFunction::from_int_roots(&ctx, &[(2, 2), (3, 2), (4, 2)]).unwrap();
        let (cf, cg) = (classify_superelliptic(&k, &f).unwrap(), classify_superelliptic(&k, &g).unwrap());
        assert_eq!(cf.vec, ValuationVector::new(3, [(pt("2"), 1), (pt("3"), 1), (pt("4"), 1)]));
        assert_eq!(cg.vec, cf.vec.scale(2));
        assert_eq!(cf.class, cg.class);
        assert!(cg.warnings.len() == 1);
    }

    #[test]
    fn json_input() {
        let ctx = FieldCtx::new(7, 3).unwrap();
        let r: RationalFunctionRepr = serde_json::from_str(
            r#"{"constant":"L0:[1]","factors":[{"root":"L0:[0]","exp":1},{"root":"L0:[1]","exp":2}]}"#,
        )
        .unwrap();
        let f = RationalFunction::from_repr(&ctx, &r).unwrap();
        assert_eq!(f, RationalFunction::from_int_roots(&ctx, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(RationalFunction::from_repr(&ctx, &f.to_repr()).unwrap(), f);
    }
}
