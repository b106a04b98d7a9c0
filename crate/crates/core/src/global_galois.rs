//! The automorphism group `𝔾(t) = ∏ₓ 𝔾ₓ(t)` of `𝔸_X{t}` and its `p`-cyclic subgroups.
//!
//! A global automorphism is finitely described: explicit components at finitely many
//! points and one default permutation of the split factors at every other point. All
//! per-point work happens at the listed points plus one representative "default site"
//! whose parameter is the idele's default component.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adeles::{Idele, Point, ValuationVector};
use crate::arith::{mod_inverse, modulo};
use crate::coeff_field::FieldCtx;
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, LocalField};
use crate::local_algebra::{kummer_pair, LocalAlgebra, LocalAutomorphism, LocalElem};
use crate::perm::{cyclic_orbit, Permutation};

/// A point of `X`, or the representative of all unlisted points.
pub type Site = Option<Point>;

/// The ramification locus of `t` for prime rank `p`.
pub fn ram_locus(t: &Idele, p: u64) -> BTreeSet<Point> {
    t.valuation_vector(p).points()
}

fn t_at<'t>(t: &'t Idele, x: &Site) -> &'t LaurentSeries {
    match x {
        Some(x) => t.component(x),
        None => t.default_component(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalAutomorphism {
    pub default_sigma: Permutation,
    #[serde(default)]
    pub exceptions: BTreeMap<Point, LocalAutomorphism>,
}

impl GlobalAutomorphism {
    pub fn new(default_sigma: Permutation, exceptions: impl IntoIterator<Item = (Point, LocalAutomorphism)>) -> Self {
        GlobalAutomorphism { default_sigma, exceptions: exceptions.into_iter().collect() }
    }

    pub fn identity(t: &Idele, p: u64) -> Self {
        Self::kummer(t, p, 0)
    }

    /// The Kummer action `T ↦ ζᵃT` at every point.
    pub fn kummer(t: &Idele, p: u64, a: u64) -> Self {
        let ex = ram_locus(t, p).into_iter().map(|x| (x, LocalAutomorphism::ram(a as i64, p)));
        Self::new(Permutation::shift(p as usize, a % p), ex)
    }

    /// The component at a site.
    pub fn at(&self, x: &Site) -> LocalAutomorphism {
        x.as_ref()
            .and_then(|x| self.exceptions.get(x).cloned())
            .unwrap_or_else(|| LocalAutomorphism::unram(self.default_sigma.clone()))
    }

    pub fn component(&self, x: &Point) -> LocalAutomorphism {
        self.at(&Some(x.clone()))
    }

    /// Validates against `t` and brings the description to canonical form: ramified points
    /// carry `Ram` components, a `Ram` at an unramified point becomes the matching shift of
    /// the split factors, and components equal to the default are dropped.
    pub fn normalized(&self, t: &Idele, p: u64) -> Result<Self> {
        if self.default_sigma.len() != p as usize {
            return Err(Error::InvalidAutomorphism(format!(
                "default permutation acts on {} points, expected {p}",
                self.default_sigma.len()
            )));
        }
        let ram = ram_locus(t, p);
        let mut ex = BTreeMap::new();
        for x in &ram {
            match self.exceptions.get(x) {
                Some(g @ LocalAutomorphism::Ram { .. }) => {
                    g.validate(p)?;
                    ex.insert(x.clone(), g.clone());
                }
                Some(LocalAutomorphism::Unram { .. }) => {
                    return Err(Error::InvalidAutomorphism(format!("split-factor permutation at ramified point {x}")))
                }
                None => return Err(Error::InvalidAutomorphism(format!("no component at ramified point {x}"))),
            }
        }
        for (x, g) in &self.exceptions {
            if ram.contains(x) {
                continue;
            }
            g.validate(p)?;
            let sigma = g.as_permutation(p);
            if sigma != self.default_sigma {
                ex.insert(x.clone(), LocalAutomorphism::unram(sigma));
            }
        }
        Ok(GlobalAutomorphism { default_sigma: self.default_sigma.clone(), exceptions: ex })
    }

    fn pruned(mut self) -> Self {
        let d = LocalAutomorphism::unram(self.default_sigma.clone());
        self.exceptions.retain(|_, g| *g != d);
        self
    }

    /// `self ∘ other`, pointwise. Both sides must be normalized against the same `t`.
    pub fn compose(&self, other: &Self, p: u64) -> Result<Self> {
        let pts: BTreeSet<&Point> = self.exceptions.keys().chain(other.exceptions.keys()).collect();
        let mut ex = BTreeMap::new();
        for x in pts {
            let x = Some(x.clone());
            ex.insert(x.clone().unwrap(), self.at(&x).compose(&other.at(&x), p)?);
        }
        let default_sigma = other.default_sigma.compose(&self.default_sigma);
        Ok(GlobalAutomorphism { default_sigma, exceptions: ex }.pruned())
    }

    pub fn inverse(&self, p: u64) -> Self {
        GlobalAutomorphism {
            default_sigma: self.default_sigma.inverse(),
            exceptions: self.exceptions.iter().map(|(x, g)| (x.clone(), g.inverse(p))).collect(),
        }
    }

    pub fn pow(&self, k: u64, p: u64) -> Self {
        GlobalAutomorphism {
            default_sigma: self.default_sigma.pow(k),
            exceptions: self.exceptions.iter().map(|(x, g)| (x.clone(), g.pow(k, p))).collect(),
        }
        .pruned()
    }

    pub fn is_identity(&self) -> bool {
        self.default_sigma.is_identity() && self.exceptions.values().all(|g| g.is_identity())
    }

    /// `π_Ram`: the exponents `aₓ` of the components at the ramified points.
    pub fn ram_projection(&self, t: &Idele, p: u64) -> BTreeMap<Point, u64> {
        ram_locus(t, p)
            .into_iter()
            .map(|x| {
                let a = match self.component(&x) {
                    LocalAutomorphism::Ram { a } => a,
                    LocalAutomorphism::Unram { .. } => unreachable!("normalized automorphisms are ramified here"),
                };
                (x, a)
            })
            .collect()
    }

    /// Applies the component at `x` to an element of `K_x{t_x}`.
    pub fn apply_at(&self, alg: &LocalAlgebra, x: &Site, e: &LocalElem) -> Result<LocalElem> {
        alg.apply(&self.at(x), e)
    }
}

/// Order-`p` criterion: every component has order `p`. For a prime number of split factors
/// this is the same as being a `p`-cycle.
pub fn generates_pointwise_transitive(g: &GlobalAutomorphism, p: u64) -> bool {
    g.default_sigma.order() == p && g.exceptions.values().all(|c| c.order(p) == p)
}

/// The same property decided by enumerating the cyclic group each component generates and
/// counting the orbit of one split factor.
pub fn generates_transitive_by_orbits(g: &GlobalAutomorphism, p: u64) -> bool {
    let transitive = |sigma: &Permutation| cyclic_orbit(sigma, 0).len() == p as usize;
    transitive(&g.default_sigma) && g.exceptions.values().all(|c| transitive(&c.as_permutation(p)))
}

/// A `p`-cyclic subgroup of `𝔾(t)` with a designated generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicSubgroup {
    pub generator: GlobalAutomorphism,
    pub p: u64,
}

impl CyclicSubgroup {
    pub fn new(generator: &GlobalAutomorphism, t: &Idele, p: u64) -> Result<Self> {
        let g = generator.normalized(t, p)?;
        if g.is_identity() {
            return Err(Error::InvalidAutomorphism("generator is the identity".into()));
        }
        if !g.pow(p, p).is_identity() {
            return Err(Error::InvalidAutomorphism(format!("generator does not have order {p}")));
        }
        Ok(CyclicSubgroup { generator: g, p })
    }

    /// The group of the `(C_p, χ)`-Kummer action with `g(T) = ζᵃT`.
    pub fn kummer(t: &Idele, p: u64, a: u64) -> Result<Self> {
        Self::new(&GlobalAutomorphism::kummer(t, p, a), t, p)
    }

    /// `generatorᵏ`, for `k` a unit mod `p`, as the designated generator.
    pub fn regenerated(&self, k: u64) -> Result<Self> {
        if k % self.p == 0 {
            return Err(Error::InvalidAutomorphism("exponent is divisible by p".into()));
        }
        Ok(CyclicSubgroup { generator: self.generator.pow(k, self.p), p: self.p })
    }

    pub fn elements(&self) -> Vec<GlobalAutomorphism> {
        (0..self.p).map(|k| self.generator.pow(k, self.p)).collect()
    }
}

/// A nontrivial character `χ(generator) = ζˢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub s: u64,
}

impl Character {
    pub fn new(s: i64, p: u64) -> Result<Self> {
        let s = modulo(s, p);
        if s == 0 {
            return Err(Error::TrivialCharacter);
        }
        Ok(Character { s })
    }
}

pub fn is_pointwise_transitive(g: &CyclicSubgroup) -> bool {
    generates_pointwise_transitive(&g.generator, g.p)
}

/// `𝔸_X{t}` is `G`-Galois iff `G` is pointwise transitive.
pub fn is_galois(t: &Idele, g: &GlobalAutomorphism, p: u64) -> bool {
    g.normalized(t, p).is_ok_and(|g| generates_pointwise_transitive(&g, p))
}

/// Strong distinctness of two automorphisms of `K_x{t_x}`: for every primitive idempotent `e`
/// some `s` has `g(s)e ≠ h(s)e`. At a split point the idempotents are the coordinate vectors
/// and the search runs over coordinate vectors; at a ramified point the algebra is a field.
pub fn strongly_distinct_at(alg: &LocalAlgebra, g: &LocalAutomorphism, h: &LocalAutomorphism) -> Result<bool> {
    let k = alg.field();
    if alg.is_ramified() {
        let t = alg.gen();
        return Ok(!alg.agrees(&alg.apply(g, &t)?, &alg.apply(h, &t)?));
    }
    let p = k.p() as usize;
    let (sg, sh) = (g.as_permutation(p as u64), h.as_permutation(p as u64));
    let unit = |i: usize| -> Vec<LaurentSeries> {
        (0..p).map(|j| if i == j { k.one() } else { LaurentSeries::zero() }).collect()
    };
    let act = |sigma: &Permutation, y: &[LaurentSeries]| -> Vec<LaurentSeries> {
        (0..p).map(|j| y[sigma.apply(j)].clone()).collect()
    };
    for j in 0..p {
        let differs = (0..p).any(|i| {
            let s = unit(i);
            let (a, b) = (&act(&sg, &s)[j], &act(&sh, &s)[j]);
            !a.agrees(b)
        });
        if !differs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distinct elements of `G` are strongly distinct at every listed point and at the default
/// site.
pub fn is_strongly_distinct(k: &LocalField, t: &Idele, g: &CyclicSubgroup) -> Result<bool> {
    let elems = g.elements();
    for x in sites(t, &[&g.generator]) {
        let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                if !strongly_distinct_at(&alg, &elems[i].at(&x), &elems[j].at(&x))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Listed points of `t` and of the automorphisms, followed by the default site.
pub fn sites(t: &Idele, gs: &[&GlobalAutomorphism]) -> Vec<Site> {
    let mut pts: BTreeSet<Point> = t.points();
    for g in gs {
        pts.extend(g.exceptions.keys().cloned());
    }
    pts.into_iter().map(Some).chain(std::iter::once(None)).collect()
}

/// Local part of a primitive element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocalEigen {
    /// `α_x = T^b`.
    Ramified { b: u64 },
    /// Split coordinates `α_x = (ζ^{c_j})_j`.
    Split { exps: Vec<u64> },
}

impl LocalEigen {
    /// Solves `c_{σ(j)} = c_j + s`, `c_1 = 0` along the cycle of `σ`.
    pub fn split(sigma: &Permutation, s: u64, p: u64) -> Self {
        let mut exps = vec![0u64; p as usize];
        let mut j = 0;
        for k in 0..p {
            exps[j] = (k * s) % p;
            j = sigma.apply(j);
        }
        LocalEigen::Split { exps }
    }

    pub fn to_elem(&self, alg: &LocalAlgebra) -> Result<LocalElem> {
        match self {
            LocalEigen::Ramified { b } => alg.pow(&alg.gen(), *b),
            LocalEigen::Split { exps } => {
                let k = alg.field();
                let ys: Vec<LaurentSeries> = exps.iter().map(|&c| k.constant(&k.ctx().zeta_pow(c as i64))).collect();
                alg.from_split(&ys)
            }
        }
    }
}

/// A `(G, χ)`-primitive element with its `p`-th power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveElement {
    pub parts: BTreeMap<Point, LocalEigen>,
    pub default: LocalEigen,
    pub alpha_p: Idele,
    pub s: u64,
}

impl PrimitiveElement {
    pub fn at(&self, x: &Site) -> &LocalEigen {
        x.as_ref().and_then(|x| self.parts.get(x)).unwrap_or(&self.default)
    }

    pub fn local(&self, alg: &LocalAlgebra, x: &Site) -> Result<LocalElem> {
        self.at(x).to_elem(alg)
    }

    /// Checks `g(α) = χ(g)α` and `α^p = αᵖ` at every listed point and the default site.
    pub fn verify(&self, k: &LocalField, t: &Idele, g: &CyclicSubgroup) -> Result<bool> {
        let zs = k.ctx().zeta_pow(self.s as i64);
        let mut all = sites(t, &[&g.generator]);
        all.extend(self.parts.keys().cloned().map(Some));
        for x in all {
            let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
            let a = self.local(&alg, &x)?;
            let moved = g.generator.apply_at(&alg, &x, &a)?;
            if !alg.agrees(&moved, &alg.scale(&a, &zs)) {
                return Ok(false);
            }
            let ap = alg.pow(&a, k.p())?;
            let expected = match &x {
                Some(x) => self.alpha_p.component(x),
                None => self.alpha_p.default_component(),
            };
            if !alg.as_constant(&ap).is_some_and(|c| c.agrees(expected)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds `α` with `g(α) = ζˢα`: `T^b` with `a·b ≡ s` at ramified points and the
/// eigenvector of the split-factor permutation elsewhere.
pub fn primitive_element(k: &LocalField, t: &Idele, g: &CyclicSubgroup, chi: Character) -> Result<PrimitiveElement> {
    let p = g.p;
    if !is_pointwise_transitive(g) {
        return Err(Error::NotGalois("subgroup is not pointwise transitive".into()));
    }
    let ram = ram_locus(t, p);
    let mut parts = BTreeMap::new();
    let mut alpha_p = Vec::new();
    for (x, comp) in &g.generator.exceptions {
        match comp {
            LocalAutomorphism::Ram { a } if ram.contains(x) => {
                let b = (chi.s * mod_inverse(*a as i64, p).expect("order-p component")) % p;
                parts.insert(x.clone(), LocalEigen::Ramified { b });
                alpha_p.push((x.clone(), k.pow(t.component(x), b as i64)?));
            }
            LocalAutomorphism::Unram { sigma } => {
                parts.insert(x.clone(), LocalEigen::split(sigma, chi.s, p));
            }
            LocalAutomorphism::Ram { .. } => {
                return Err(Error::InvalidAutomorphism(format!("ramified component at unramified point {x}")))
            }
        }
    }
    let default = LocalEigen::split(&g.generator.default_sigma, chi.s, p);
    let alpha_p = Idele::from_components(k, alpha_p)?;
    Ok(PrimitiveElement { parts, default, alpha_p, s: chi.s })
}

/// `x ↦ log_ζ⟨gₓ, zₓ⟩ₓ` on `Ram(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamTuple {
    pub p: u64,
    pub entries: BTreeMap<Point, u64>,
}

impl Serialize for RamTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl RamTuple {
    pub fn scale(&self, b: u64) -> Self {
        RamTuple { p: self.p, entries: self.entries.iter().map(|(x, v)| (x.clone(), (v * b) % self.p)).collect() }
    }

    /// The `b ∈ (Z/(p))*` with `self = b·other`, if any.
    pub fn orbit_witness(&self, other: &Self) -> Option<u64> {
        if self.entries.keys().ne(other.entries.keys()) {
            return None;
        }
        (1..self.p).find(|&b| other.scale(b) == *self)
    }
}

pub fn ram_tuple(ctx: &FieldCtx, g: &CyclicSubgroup, t: &Idele) -> Result<RamTuple> {
    if !is_pointwise_transitive(g) {
        return Err(Error::NotTransitive("generator has a component of order below p".into()));
    }
    let entries = g
        .generator
        .ram_projection(t, g.p)
        .into_iter()
        .map(|(x, a)| Ok((x.clone(), ctx.log_zeta(&kummer_pair(ctx, a, 1, t.valuation_at(&x))?)?)))
        .collect::<Result<_>>()?;
    Ok(RamTuple { p: g.p, entries })
}

/// The `j` with `π_Ram(g₂ʲ) = π_Ram(g₁)`, which exists iff the ramified projections generate
/// the same subgroup. With empty ramification locus any `j` works and `1` is returned.
pub fn equivalence_exponent(g1: &CyclicSubgroup, g2: &CyclicSubgroup, t: &Idele) -> Result<Option<u64>> {
    for g in [g1, g2] {
        if !is_pointwise_transitive(g) {
            return Err(Error::NotTransitive("generator has a component of order below p".into()));
        }
    }
    let p = g1.p;
    let pi1 = g1.generator.ram_projection(t, p);
    let pi2 = g2.generator.ram_projection(t, p);
    Ok((1..p).find(|&j| pi2.iter().all(|(x, a)| (a * j) % p == pi1[x])))
}

pub fn galois_equivalent(g1: &CyclicSubgroup, g2: &CyclicSubgroup, t: &Idele) -> Result<bool> {
    Ok(equivalence_exponent(g1, g2, t)?.is_some())
}

/// A conjugating pair: `φ` as an automorphism of `𝔸_X{t}` and `τ(g₁) = g₂^tau_exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugation {
    pub phi: GlobalAutomorphism,
    pub tau_exp: u64,
    /// `φ(α₁) = u·α₂`.
    pub u: Idele,
    pub s: u64,
}

/// Builds `(φ, τ)` with `φ∘g = τ(g)∘φ`. `φ` is the identity at ramified points and matches
/// the eigenvectors of the two split-factor permutations elsewhere.
pub fn construct_conjugation(
    k: &LocalField,
    g1: &CyclicSubgroup,
    g2: &CyclicSubgroup,
    t: &Idele,
    chi: Character,
) -> Result<Conjugation> {
    let p = g1.p;
    let j = equivalence_exponent(g1, g2, t)?.ok_or(Error::NotEquivalent)?;
    let h = g2.regenerated(j)?;
    let a1 = primitive_element(k, t, g1, chi)?;
    let a2 = primitive_element(k, t, &h, chi)?;
    let matching = |e1: &LocalEigen, e2: &LocalEigen| -> Result<LocalAutomorphism> {
        match (e1, e2) {
            (LocalEigen::Split { exps: c1 }, LocalEigen::Split { exps: c2 }) => {
                let images = c2
                    .iter()
                    .map(|c| c1.iter().position(|d| d == c).ok_or(Error::NotEquivalent))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LocalAutomorphism::unram(Permutation::from_images(images)?))
            }
            (LocalEigen::Ramified { b: b1 }, LocalEigen::Ramified { b: b2 }) if b1 == b2 => {
                Ok(LocalAutomorphism::Ram { a: 0 })
            }
            _ => Err(Error::NotEquivalent),
        }
    };
    let pts: BTreeSet<Point> = a1.parts.keys().chain(a2.parts.keys()).cloned().collect();
    let mut ex = BTreeMap::new();
    for x in pts {
        let site = Some(x.clone());
        ex.insert(x, matching(a1.at(&site), a2.at(&site))?);
    }
    let default_sigma = match matching(&a1.default, &a2.default)? {
        LocalAutomorphism::Unram { sigma } => sigma,
        LocalAutomorphism::Ram { .. } => unreachable!("default sites are unramified"),
    };
    let phi = GlobalAutomorphism { default_sigma, exceptions: ex }.normalized(t, p)?;

    let mut u = Vec::new();
    let mut u_default = k.one();
    for x in sites(t, &[&phi, &g1.generator, &h.generator]) {
        let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
        let img = phi.apply_at(&alg, &x, &a1.local(&alg, &x)?)?;
        let q = alg.mul(&img, &alg.inv(&a2.local(&alg, &x)?)?)?;
        let c = alg.as_constant(&q).ok_or_else(|| Error::Inconsistent("φ(α₁)/α₂ is not a scalar".into()))?;
        match x {
            Some(x) => u.push((x, c)),
            None => u_default = c,
        }
    }
    let u = Idele::new(u_default, u)?;
    Ok(Conjugation { phi, tau_exp: j, u, s: chi.s })
}

impl Conjugation {
    /// Checks the conjugation identity on generators, pointwise on `samples` random elements
    /// per site, and multiplicativity `φ(α₁ᵇ) = uᵇα₂ᵇ` on the primitive-element basis.
    pub fn verify<R: Rng + ?Sized>(
        &self,
        k: &LocalField,
        g1: &CyclicSubgroup,
        g2: &CyclicSubgroup,
        t: &Idele,
        samples: usize,
        rng: &mut R,
    ) -> Result<bool> {
        let p = g1.p;
        let h = g2.regenerated(self.tau_exp)?;
        let lhs = self.phi.compose(&g1.generator, p)?;
        let rhs = h.generator.compose(&self.phi, p)?;
        if lhs != rhs {
            return Ok(false);
        }
        let chi = Character::new(self.s as i64, p)?;
        let a1 = primitive_element(k, t, g1, chi)?;
        let a2 = primitive_element(k, t, &h, chi)?;
        for x in sites(t, &[&self.phi, &g1.generator, &h.generator]) {
            let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
            let (f, g, hh) = (self.phi.at(&x), g1.generator.at(&x), h.generator.at(&x));
            for _ in 0..samples {
                let e = alg.random_elem(rng, 0, -2..3);
                let left = alg.apply(&f, &alg.apply(&g, &e)?)?;
                let right = alg.apply(&hh, &alg.apply(&f, &e)?)?;
                if !alg.agrees(&left, &right) {
                    return Ok(false);
                }
            }
            let ux = match &x {
                Some(x) => self.u.component(x).clone(),
                None => self.u.default_component().clone(),
            };
            let (e1, e2) = (a1.local(&alg, &x)?, a2.local(&alg, &x)?);
            for b in 0..p {
                let left = alg.apply(&f, &alg.pow(&e1, b)?)?;
                let right = alg.scale_series(&alg.pow(&e2, b)?, &k.pow(&ux, b as i64)?);
                if !alg.agrees(&left, &right) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// An element of `𝔸_X{t}` with explicit components at finitely many points and a default
/// pattern at the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub parts: BTreeMap<Point, LocalElem>,
    pub default: LocalElem,
}

impl AlgebraElement {
    pub fn at(&self, x: &Site) -> &LocalElem {
        x.as_ref().and_then(|x| self.parts.get(x)).unwrap_or(&self.default)
    }

    pub fn one(k: &LocalField) -> Self {
        let mut c = vec![LaurentSeries::zero(); k.p() as usize];
        c[0] = k.one();
        AlgebraElement { parts: BTreeMap::new(), default: LocalElem(c) }
    }

    fn sites(&self, t: &Idele, g: &GlobalAutomorphism) -> Vec<Site> {
        let mut out = sites(t, &[g]);
        out.extend(self.parts.keys().cloned().map(Some));
        out.sort_by(|a, b| match (a, b) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Greater,
            (_, None) => std::cmp::Ordering::Less,
            (Some(a), Some(b)) => a.cmp(b),
        });
        out.dedup();
        out
    }

    /// `g(x) = ζˢx` everywhere it is described.
    pub fn is_eigen(&self, k: &LocalField, t: &Idele, g: &CyclicSubgroup, chi: Character) -> Result<bool> {
        let zs = k.ctx().zeta_pow(chi.s as i64);
        for x in self.sites(t, &g.generator) {
            let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
            let e = self.at(&x);
            if !alg.agrees(&g.generator.apply_at(&alg, &x, e)?, &alg.scale(e, &zs)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn agrees(&self, other: &Self, k: &LocalField, t: &Idele) -> Result<bool> {
        let pts: BTreeSet<&Point> = self.parts.keys().chain(other.parts.keys()).collect();
        let alg = LocalAlgebra::new(*k, t.default_component())?;
        Ok(pts.into_iter().all(|x| {
            let x = Some(x.clone());
            alg.agrees(self.at(&x), other.at(&x))
        }) && alg.agrees(&self.default, &other.default))
    }
}

/// `e_χ·sample = (1/p) Σₖ ζ^{-sk} gᵏ(sample)`. At split sites the sum is taken in split
/// coordinates, at ramified sites on the `T`-coefficients.
pub fn eigenproject(
    k: &LocalField,
    sample: &AlgebraElement,
    g: &CyclicSubgroup,
    chi: Character,
    t: &Idele,
) -> Result<AlgebraElement> {
    if !is_pointwise_transitive(g) {
        return Err(Error::NotGalois("subgroup is not pointwise transitive".into()));
    }
    let ctx = k.ctx();
    let p = g.p;
    let inv_p = ctx.inv(&ctx.from_int(p as i64))?;
    let mut parts = BTreeMap::new();
    let mut default = None;
    for x in sample.sites(t, &g.generator) {
        let alg = LocalAlgebra::new(*k, t_at(t, &x))?;
        let e = sample.at(&x);
        let out = match g.generator.at(&x) {
            LocalAutomorphism::Ram { a } => {
                let c =
                    e.0.iter()
                        .enumerate()
                        .map(|(j, c)| if (a * j as u64) % p == chi.s { c.clone() } else { LaurentSeries::zero() })
                        .collect();
                LocalElem(c)
            }
            LocalAutomorphism::Unram { sigma } => {
                let ys = alg.to_split(e)?;
                let mut acc = vec![LaurentSeries::zero(); p as usize];
                let mut power = Permutation::identity(p as usize);
                for step in 0..p {
                    let w = ctx.zeta_pow(-((chi.s * step) as i64));
                    for (j, slot) in acc.iter_mut().enumerate() {
                        *slot = k.add(slot, &k.scale(&ys[power.apply(j)], &w))?;
                    }
                    power = power.compose(&sigma);
                }
                let acc: Vec<LaurentSeries> = acc.iter().map(|y| k.scale(y, &inv_p)).collect();
                alg.from_split(&acc)?
            }
        };
        match x {
            Some(x) => {
                parts.insert(x, out);
            }
            None => default = Some(out),
        }
    }
    Ok(AlgebraElement { parts, default: default.expect("default site is always visited") })
}

/// `υ(αᵖ)` for a primitive element.
pub fn primitive_valuation_vector(alpha: &PrimitiveElement, p: u64) -> ValuationVector {
    alpha.alpha_p.valuation_vector(p)
}
