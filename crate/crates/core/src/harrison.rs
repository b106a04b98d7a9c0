//! Harrison-group arithmetic of `p`-cyclic extensions of `𝔸_X`.
//!
//! Classes are handled through the Kummer map `𝕀_X/𝕀_Xᵖ ≅ H(𝔸_X, C_p)` followed by the
//! valuation vector, so products and inverses are vector operations in `⊕ₓ Z/(p)`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::adeles::{Idele, Point, ValuationVector};
use crate::arith::mod_inverse;
use crate::error::{Error, Result};
use crate::global_galois::{is_pointwise_transitive, primitive_element, Character, CyclicSubgroup};
use crate::laurent::LocalField;

/// The triple an extension class was computed from.
#[derive(Clone, Debug)]
pub struct Witness {
    pub t: Idele,
    pub group: CyclicSubgroup,
    pub chi: Character,
}

/// An element of `H(𝔸_X, C_p)`, identified by its valuation vector.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionClass {
    pub vec: ValuationVector,
    #[serde(skip)]
    pub witness: Option<Witness>,
}

impl PartialEq for ExtensionClass {
    fn eq(&self, other: &Self) -> bool {
        self.vec == other.vec
    }
}

impl Eq for ExtensionClass {}

impl ExtensionClass {
    pub fn from_vector(vec: ValuationVector) -> Self {
        ExtensionClass { vec, witness: None }
    }

    pub fn p(&self) -> u64 {
        self.vec.p()
    }

    /// The class of the trivial extension `𝔸_X^{(G)}`.
    pub fn trivial(p: u64) -> Self {
        Self::from_vector(ValuationVector::zero(p))
    }

    pub fn is_trivial(&self) -> bool {
        self.vec.is_zero()
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_vector(self.vec.add(&other.vec)?))
    }

    pub fn inverse(&self) -> Self {
        Self::from_vector(self.vec.neg())
    }
}

/// `υ(S, G, χ) = υ(αᵖ)` for a `(G, χ)`-primitive element `α`.
pub fn classify(k: &LocalField, t: &Idele, g: &CyclicSubgroup, chi: Character) -> Result<ExtensionClass> {
    if !is_pointwise_transitive(g) {
        return Err(Error::NotGalois("subgroup is not pointwise transitive".into()));
    }
    let alpha = primitive_element(k, t, g, chi)?;
    Ok(ExtensionClass {
        vec: alpha.alpha_p.valuation_vector(g.p),
        witness: Some(Witness { t: t.clone(), group: g.clone(), chi }),
    })
}

/// The class of `𝔸_X{t}` with `g(T) = ζT`.
pub fn kummer_map(t: &Idele, p: u64) -> ExtensionClass {
    ExtensionClass::from_vector(t.valuation_vector(p))
}

/// The canonical witness: `z_xᵛ` at each support point, `1` elsewhere.
pub fn kummer_inverse(k: &LocalField, c: &ExtensionClass) -> Idele {
    let ctx = k.ctx();
    Idele::from_components(k, c.vec.support().iter().map(|(x, v)| (x.clone(), k.monomial(&ctx.one(), *v as i64))))
        .expect("monomials are nonzero")
}

pub fn equivariant_isomorphic(c1: &ExtensionClass, c2: &ExtensionClass) -> Result<bool> {
    if c1.p() != c2.p() {
        return Err(Error::PrimeMismatch(c1.p(), c2.p()));
    }
    Ok(c1.vec == c2.vec)
}

/// A `(Z/(p))*`-orbit of valuation vectors, kept as the representative whose first nonzero
/// entry (in point order) is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ValuationClass {
    pub canon: ValuationVector,
}

impl ValuationClass {
    pub fn of(v: &ValuationVector) -> Self {
        let canon = match v.support().values().next() {
            Some(&first) => v.scale(mod_inverse(first as i64, v.p()).expect("nonzero residue mod a prime") as i64),
            None => v.clone(),
        };
        ValuationClass { canon }
    }

    pub fn is_trivial(&self) -> bool {
        self.canon.is_zero()
    }
}

pub fn valuation_class(c: &ExtensionClass) -> ValuationClass {
    ValuationClass::of(&c.vec)
}

/// The `b ∈ (Z/(p))*` with `c₁ = b·c₂` when the classes are conjugate.
pub fn conjugate(c1: &ExtensionClass, c2: &ExtensionClass) -> Result<Option<u64>> {
    let p = c1.p();
    if p != c2.p() {
        return Err(Error::PrimeMismatch(p, c2.p()));
    }
    if valuation_class(c1) != valuation_class(c2) {
        return Ok(None);
    }
    Ok((1..p).find(|&b| c2.vec.scale(b as i64) == c1.vec))
}

/// `𝔸_X{t₁} ≅ 𝔸_X{t₂}` as algebras iff the ramification profiles agree.
pub fn algebra_isomorphic(t1: &Idele, t2: &Idele, n: u64) -> bool {
    t1.ram_profile(n) == t2.ram_profile(n)
}

/// All conjugacy classes of extensions ramified only inside `support`, by enumerating
/// `(Z/(p))^support` and canonicalizing.
pub fn stratification(support: &[Point], p: u64) -> BTreeSet<ValuationClass> {
    let n = support.len() as u32;
    (0..p.pow(n))
        .map(|mut code| {
            let entries = support.iter().map(|x| {
                let v = code % p;
                code /= p;
                (x.clone(), v as i64)
            });
            ValuationClass::of(&ValuationVector::new(p, entries.collect::<Vec<_>>()))
        })
        .collect()
}
