//! Finite-support adeles and ideles over an abstract set of closed points.
//!
//! An idele is a finite map of exceptional components plus one default component of
//! valuation zero that stands for every unlisted point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{gcd, modulo};
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, LocalField, SeriesRepr};

/// A closed point, identified by an opaque label. `∞` sorts after every finite label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Label(String),
    Infinity,
}

impl Point {
    pub fn label(s: impl Into<String>) -> Self {
        Point::Label(s.into())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Label(s) => f.write_str(s),
            Point::Infinity => f.write_str("∞"),
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "" => Err(Error::Parse("empty point label".into())),
            "∞" | "inf" | "infinity" => Ok(Point::Infinity),
            _ => Ok(Point::Label(s.to_string())),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of `⊕ₓ Z/(p)`: unlisted points carry 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValuationVector {
    p: u64,
    support: BTreeMap<Point, u64>,
}

impl ValuationVector {
    pub fn zero(p: u64) -> Self {
        ValuationVector { p, support: BTreeMap::new() }
    }

    pub fn new(p: u64, entries: impl IntoIterator<Item = (Point, i64)>) -> Self {
        let mut support = BTreeMap::new();
        for (x, v) in entries {
            let e = support.entry(x).or_insert(0u64);
            *e = (*e + modulo(v, p)) % p;
        }
        support.retain(|_, v| *v != 0);
        ValuationVector { p, support }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn support(&self) -> &BTreeMap<Point, u64> {
        &self.support
    }

    pub fn get(&self, x: &Point) -> u64 {
        self.support.get(x).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn points(&self) -> BTreeSet<Point> {
        self.support.keys().cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        let entries = self.support.iter().chain(&other.support).map(|(x, v)| (x.clone(), *v as i64));
        Ok(Self::new(self.p, entries))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, b: i64) -> Self {
        Self::new(self.p, self.support.iter().map(|(x, v)| (x.clone(), *v as i64 * b)))
    }
}

impl Serialize for ValuationVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.support.serialize(s)
    }
}

impl ValuationVector {
    /// Reads the JSON map form `{"0": 1, "1": 2}`.
    pub fn from_map(p: u64, map: &BTreeMap<String, i64>) -> Result<Self> {
        let entries = map.iter().map(|(k, v)| Ok((k.parse::<Point>()?, *v))).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(p, entries))
    }
}

/// Ramification indices `e_x = n / gcd(n, υ_x(t_x))` at the points where `e_x > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamProfile {
    pub n: u64,
    pub entries: BTreeMap<Point, u64>,
}

impl RamProfile {
    /// The ramification locus.
    pub fn locus(&self) -> BTreeSet<Point> {
        self.entries.keys().cloned().collect()
    }

    pub fn index(&self, x: &Point) -> u64 {
        self.entries.get(x).copied().unwrap_or(1)
    }
}

/// Ramification index at a point of valuation `v` for rank `n`.
pub fn ramification_index(n: u64, v: i64) -> u64 {
    n / gcd(n as i64, v)
}

/// An idele: every component invertible, valuation 0 away from the exceptional points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idele {
    exceptions: BTreeMap<Point, LaurentSeries>,
    default: LaurentSeries,
}

impl Idele {
    pub fn one(k: &LocalField) -> Self {
        Idele { exceptions: BTreeMap::new(), default: k.one() }
    }

    pub fn new(default: LaurentSeries, exceptions: impl IntoIterator<Item = (Point, LaurentSeries)>) -> Result<Self> {
        let dv = default.valuation().map_err(|_| Error::ZeroComponent("default".into()))?;
        if dv != 0 {
            return Err(Error::NotAUnit(dv));
        }
        let mut map = BTreeMap::new();
        for (x, s) in exceptions {
            if s.is_zero() {
                return Err(Error::ZeroComponent(x.to_string()));
            }
            if s != default {
                map.insert(x, s);
            }
        }
        Ok(Idele { exceptions: map, default })
    }

    /// Idele with default component `1`.
    pub fn from_components(
        k: &LocalField,
        exceptions: impl IntoIterator<Item = (Point, LaurentSeries)>,
    ) -> Result<Self> {
        Self::new(k.one(), exceptions)
    }

    pub fn default_component(&self) -> &LaurentSeries {
        &self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<Point, LaurentSeries> {
        &self.exceptions
    }

    pub fn component(&self, x: &Point) -> &LaurentSeries {
        self.exceptions.get(x).unwrap_or(&self.default)
    }

    pub fn points(&self) -> BTreeSet<Point> {
        self.exceptions.keys().cloned().collect()
    }

    pub fn valuation_at(&self, x: &Point) -> i64 {
        self.component(x).valuation().expect("idele components are nonzero")
    }

    fn combine(
        &self,
        other: &Self,
        f: impl Fn(&LaurentSeries, &LaurentSeries) -> Result<LaurentSeries>,
    ) -> Result<Self> {
        let default = f(&self.default, &other.default)?;
        let pts: BTreeSet<&Point> = self.exceptions.keys().chain(other.exceptions.keys()).collect();
        let mut out = Vec::with_capacity(pts.len());
        for x in pts {
            out.push((x.clone(), f(self.component(x), other.component(x))?));
        }
        Idele::new(default, out)
    }

    pub fn mul(&self, k: &LocalField, other: &Self) -> Self {
        self.combine(other, |a, b| Ok(k.mul(a, b))).expect("products of units are units")
    }

    pub fn div(&self, k: &LocalField, other: &Self) -> Self {
        self.combine(other, |a, b| k.div(a, b)).expect("idele components are invertible")
    }

    pub fn pow(&self, k: &LocalField, e: i64) -> Self {
        let f = |s: &LaurentSeries| k.pow(s, e).expect("idele components are invertible");
        Idele::new(f(&self.default), self.exceptions.iter().map(|(x, s)| (x.clone(), f(s))))
            .expect("powers of units are units")
    }

    pub fn inv(&self, k: &LocalField) -> Self {
        self.pow(k, -1)
    }

    /// `(υ_x(t_x) mod p)ₓ`.
    pub fn valuation_vector(&self, p: u64) -> ValuationVector {
        ValuationVector::new(p, self.exceptions.iter().map(|(x, s)| (x.clone(), s.valuation().unwrap())))
    }

    /// Membership in `𝕀ᵖ`, decided by the kernel of the valuation vector.
    pub fn is_pth_power(&self, p: u64) -> bool {
        self.valuation_vector(p).is_zero()
    }

    /// A witness `u` with `uᵖ = t`, by componentwise root extraction.
    pub fn pth_root(&self, k: &LocalField, p: u64) -> Result<Self> {
        let root = |s: &LaurentSeries| k.nth_root(s, p);
        let default = root(&self.default)?;
        let ex = self.exceptions.iter().map(|(x, s)| Ok((x.clone(), root(s)?))).collect::<Result<Vec<_>>>()?;
        Idele::new(default, ex)
    }

    /// Componentwise agreement on the known windows.
    pub fn agrees(&self, other: &Self) -> bool {
        self.default.agrees(&other.default)
            && self
                .exceptions
                .keys()
                .chain(other.exceptions.keys())
                .all(|x| self.component(x).agrees(other.component(x)))
    }

    pub fn as_adele(&self) -> Adele {
        Adele { exceptions: self.exceptions.clone(), default: self.default.clone() }
    }

    pub fn ram_profile(&self, n: u64) -> RamProfile {
        self.as_adele().ram_profile(n).expect("ideles have nonzero components")
    }

    pub fn to_repr(&self, k: &LocalField, p: u64) -> IdeleRepr {
        IdeleRepr {
            p: Some(p),
            default: Some(SeriesRepr::Text(k.format(&self.default))),
            points: self.exceptions.iter().map(|(x, s)| (x.to_string(), SeriesRepr::Text(k.format(s)))).collect(),
        }
    }

    pub fn from_repr(k: &LocalField, r: &IdeleRepr) -> Result<Self> {
        let default = match &r.default {
            Some(d) => k.from_repr(d)?,
            None => k.one(),
        };
        let ex =
            r.points.iter().map(|(x, s)| Ok((x.parse::<Point>()?, k.from_repr(s)?))).collect::<Result<Vec<_>>>()?;
        Idele::new(default, ex)
    }
}

/// JSON form: `{"p": 3, "default": "1", "points": {"0": "z^1*(1)"}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdeleRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<SeriesRepr>,
    #[serde(default)]
    pub points: BTreeMap<String, SeriesRepr>,
}

/// An adele: integral away from finitely many points. Components may vanish; such
/// parameter vectors are only meaningful for [`Adele::ram_profile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adele {
    exceptions: BTreeMap<Point, LaurentSeries>,
    default: LaurentSeries,
}

impl Adele {
    pub fn new(default: LaurentSeries, exceptions: impl IntoIterator<Item = (Point, LaurentSeries)>) -> Result<Self> {
        if let Ok(v) = default.valuation() {
            if v < 0 {
                return Err(Error::Parse(format!("default component has negative valuation {v}")));
            }
        }
        Ok(Adele { exceptions: exceptions.into_iter().collect(), default })
    }

    pub fn component(&self, x: &Point) -> &LaurentSeries {
        self.exceptions.get(x).unwrap_or(&self.default)
    }

    /// The ramification profile of the parameter vector for rank `n`.
    pub fn ram_profile(&self, n: u64) -> Result<RamProfile> {
        let dv = self.default.valuation().map_err(|_| Error::ZeroComponent("default".into()))?;
        if dv.rem_euclid(n as i64) != 0 {
            return Err(Error::NonFiniteLocus(dv));
        }
        let mut entries = BTreeMap::new();
        for (x, s) in &self.exceptions {
            let v = s.valuation().map_err(|_| Error::ZeroComponent(x.to_string()))?;
            let e = ramification_index(n, v);
            if e > 1 {
                entries.insert(x.clone(), e);
            }
        }
        Ok(RamProfile { n, entries })
    }
}
