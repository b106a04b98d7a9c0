//! A lazily extended tower of finite fields `F_ℓ ⊂ F_{ℓ^{m₁}} ⊂ …`.
//!
//! The tower stands in for an algebraically closed constant field: it is extended exactly
//! when a root of unity or a root of an element is requested that the current top level
//! does not contain. Each step is a monic irreducible polynomial over the previous level.
//!
//! Elements are coordinate vectors over `F_ℓ`. An element of level `i` with relative step
//! degree `m` is a polynomial `c₀ + c₁y + … + c_{m-1}y^{m-1}` in the step generator `y`,
//! whose coefficients are level `i-1` elements laid out block after block. Embedding an
//! element one level up therefore only pads its coordinates with zeros, so an element of a
//! lower level is literally a prefix of its image higher up.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{distinct_prime_factors, factorize, is_prime};
use crate::error::{Error, Result};

const DEFAULT_SEED: u64 = 0x6164_656c_6963;

type Raw = Vec<u64>;
type RawPoly = Vec<Raw>;

/// An element of some level of the tower.
#[derive(Clone, Debug)]
pub struct FieldElem {
    level: usize,
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Coordinates over `F_ℓ`, lowest first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    fn trimmed(&self) -> &[u64] {
        let end = self.coeffs.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        &self.coeffs[..end]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The value as an integer in `[0, ℓ)` when it lies in the prime field.
    pub fn as_prime_field(&self) -> Option<u64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }
}

// Equality ignores the level tag: embedding pads with zeros, so two representations of the
// same element agree after padding.
impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Enumeration order: lexicographic on the coordinate vectors padded to a common length.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.coeffs.len().max(other.coeffs.len());
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:[", self.level)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
struct Level {
    rel_degree: usize,
    abs_degree: usize,
    /// Monic step polynomial over the previous level, lowest degree first.
    modulus: RawPoly,
    order: BigUint,
}

/// Serialized form of a [`FieldCtx`]: `{ell, p, tower}` with each step polynomial given
/// as the text form of its coefficients over the previous level, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCtxRepr {
    pub ell: u64,
    pub p: u64,
    pub tower: Vec<Vec<String>>,
}

/// The coefficient field context.
///
/// Reads take a snapshot of the tower; extensions are serialized through an internal
/// writer lock, so a `FieldCtx` can be shared between threads.
pub struct FieldCtx {
    ell: u64,
    p: u64,
    tower: RwLock<Arc<Vec<Level>>>,
    zeta_powers: OnceLock<Vec<FieldElem>>,
    writer: Mutex<()>,
    rng: Mutex<ChaCha8Rng>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("ell", &self.ell)
            .field("p", &self.p)
            .field("degrees", &self.snapshot().iter().map(|l| l.rel_degree).collect::<Vec<_>>())
            .finish()
    }
}

impl FieldCtx {
    pub fn new(ell: u64, p: u64) -> Result<Self> {
        Self::with_seed(ell, p, DEFAULT_SEED)
    }

    /// Like [`FieldCtx::new`] with an explicit seed for the irreducible-polynomial search.
    pub fn with_seed(ell: u64, p: u64, seed: u64) -> Result<Self> {
        if !is_prime(ell) || ell >= 1 << 31 {
            return Err(Error::InvalidField(format!("characteristic {ell} must be a prime below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("rank {p} must be prime")));
        }
        if ell == p {
            return Err(Error::InvalidField(format!("characteristic {ell} equals the rank")));
        }
        let base = Level { rel_degree: 1, abs_degree: 1, modulus: Vec::new(), order: BigUint::from(ell) };
        Ok(FieldCtx {
            ell,
            p,
            tower: RwLock::new(Arc::new(vec![base])),
            zeta_powers: OnceLock::new(),
            writer: Mutex::new(()),
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn snapshot(&self) -> Arc<Vec<Level>> {
        self.tower.read().expect("tower lock poisoned").clone()
    }

    pub fn num_levels(&self) -> usize {
        self.snapshot().len()
    }

    pub fn top_level(&self) -> usize {
        self.num_levels() - 1
    }

    /// Degree of `level` over `F_ℓ`.
    pub fn abs_degree(&self, level: usize) -> usize {
        self.snapshot()[level].abs_degree
    }

    /// Degree of `level` over the level below it.
    pub fn rel_degree(&self, level: usize) -> usize {
        self.snapshot()[level].rel_degree
    }

    pub fn order(&self, level: usize) -> BigUint {
        self.snapshot()[level].order.clone()
    }

    // ---- construction -------------------------------------------------------------

    pub fn zero(&self) -> FieldElem {
        FieldElem { level: 0, coeffs: vec![0] }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { level: 0, coeffs: vec![1] }
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem { level: 0, coeffs: vec![n.rem_euclid(self.ell as i64) as u64] }
    }

    /// Element of `level` with the given coordinates (padded with zeros, reduced mod ℓ).
    pub fn elem(&self, level: usize, coeffs: &[u64]) -> Result<FieldElem> {
        let tower = self.snapshot();
        let lv = tower.get(level).ok_or_else(|| Error::Parse(format!("level {level} does not exist in the tower")))?;
        if coeffs.len() > lv.abs_degree {
            return Err(Error::Parse(format!(
                "level {level} has degree {}, got {} coordinates",
                lv.abs_degree,
                coeffs.len()
            )));
        }
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.ell).collect();
        c.resize(lv.abs_degree, 0);
        Ok(FieldElem { level, coeffs: c })
    }

    /// The generator `y` of the step polynomial defining `level`.
    pub fn generator(&self, level: usize) -> Result<FieldElem> {
        let tower = self.snapshot();
        if level == 0 || level >= tower.len() {
            return Err(Error::Parse(format!("level {level} has no step generator")));
        }
        let below = tower[level - 1].abs_degree;
        let mut c = vec![0; tower[level].abs_degree];
        if tower[level].rel_degree > 1 {
            c[below] = 1;
        }
        Ok(FieldElem { level, coeffs: c })
    }

    /// Parses `L1:[3,0,5]` or a bare integer (prime field).
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('L') {
            let (lvl, body) =
                rest.split_once(':').ok_or_else(|| Error::Parse(format!("malformed field element `{s}`")))?;
            let level: usize = lvl.trim().parse().map_err(|_| Error::Parse(format!("bad level in `{s}`")))?;
            let body = body.trim();
            let inner = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("malformed coordinate list in `{s}`")))?;
            let coeffs = inner
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<i64>().map(|v| v.rem_euclid(self.ell as i64) as u64))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("bad coordinate in `{s}`")))?;
            let tower = self.snapshot();
            match tower.get(level) {
                Some(lv) if lv.abs_degree == coeffs.len() => Ok(FieldElem { level, coeffs }),
                Some(lv) => Err(Error::Parse(format!(
                    "level {level} expects {} coordinates, got {}",
                    lv.abs_degree,
                    coeffs.len()
                ))),
                None => Err(Error::Parse(format!("level {level} does not exist in the tower"))),
            }
        } else {
            let v: i64 = s.parse().map_err(|_| Error::Parse(format!("malformed field element `{s}`")))?;
            Ok(self.from_int(v))
        }
    }

    /// Uniformly random element of `level`.
    pub fn random<R: Rng + ?Sized>(&self, level: usize, rng: &mut R) -> FieldElem {
        let d = self.abs_degree(level);
        FieldElem { level, coeffs: (0..d).map(|_| rng.gen_range(0..self.ell)).collect() }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, level: usize, rng: &mut R) -> FieldElem {
        loop {
            let x = self.random(level, rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    // ---- level bookkeeping -------------------------------------------------------

    /// Embeds `a` into `level` (which must not be below the level of `a`).
    pub fn embed(&self, a: &FieldElem, level: usize) -> FieldElem {
        assert!(level >= a.level, "cannot embed level {} into level {}", a.level, level);
        let mut c = a.coeffs.clone();
        c.resize(self.abs_degree(level), 0);
        FieldElem { level, coeffs: c }
    }

    /// Re-expresses `a` at the lowest level containing it.
    pub fn lower(&self, a: &FieldElem) -> FieldElem {
        let tower = self.snapshot();
        let used = a.trimmed().len();
        let level = (0..=a.level).find(|&l| tower[l].abs_degree >= used).unwrap_or(a.level);
        let mut c = a.coeffs.clone();
        c.truncate(tower[level].abs_degree);
        FieldElem { level, coeffs: c }
    }

    fn lift2(&self, a: &FieldElem, b: &FieldElem) -> (usize, Raw, Raw) {
        let level = a.level.max(b.level);
        let d = self.abs_degree(level);
        let mut x = a.coeffs.clone();
        let mut y = b.coeffs.clone();
        x.resize(d, 0);
        y.resize(d, 0);
        (level, x, y)
    }

    // ---- arithmetic -----------------------------------------------------------------

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if a.level == 0 && b.level == 0 {
            return FieldElem { level: 0, coeffs: vec![(a.coeffs[0] + b.coeffs[0]) % self.ell] };
        }
        let (level, x, y) = self.lift2(a, b);
        let coeffs = x.iter().zip(&y).map(|(u, v)| (u + v) % self.ell).collect();
        FieldElem { level, coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if a.level == 0 && b.level == 0 {
            return FieldElem { level: 0, coeffs: vec![(a.coeffs[0] + self.ell - b.coeffs[0]) % self.ell] };
        }
        let (level, x, y) = self.lift2(a, b);
        let coeffs = x.iter().zip(&y).map(|(u, v)| (u + self.ell - v) % self.ell).collect();
        FieldElem { level, coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a.coeffs.iter().map(|&u| (self.ell - u) % self.ell).collect();
        FieldElem { level: a.level, coeffs }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if a.level == 0 && b.level == 0 {
            return FieldElem { level: 0, coeffs: vec![a.coeffs[0] * b.coeffs[0] % self.ell] };
        }
        let tower = self.snapshot();
        if a.level == b.level {
            let ar = Arith { ell: self.ell, levels: &tower };
            return FieldElem { level: a.level, coeffs: ar.mul(a.level, &a.coeffs, &b.coeffs) };
        }
        let (level, x, y) = self.lift2(a, b);
        let ar = Arith { ell: self.ell, levels: &tower };
        FieldElem { level, coeffs: ar.mul(level, &x, &y) }
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if a.level == 0 {
            let r = crate::arith::mod_inverse(a.coeffs[0] as i64, self.ell).ok_or(Error::ZeroInverse)?;
            return Ok(FieldElem { level: 0, coeffs: vec![r] });
        }
        let tower = self.snapshot();
        let ar = Arith { ell: self.ell, levels: &tower };
        Ok(FieldElem { level: a.level, coeffs: ar.inv(a.level, &a.coeffs).ok_or(Error::ZeroInverse)? })
    }

    /// The first `n` coefficients of the product of two coefficient sequences, computed in
    /// raw coordinates at the highest level involved.
    pub fn convolve(&self, a: &[FieldElem], b: &[FieldElem], n: usize) -> Vec<FieldElem> {
        let level = a.iter().chain(b).map(|c| c.level).max().unwrap_or(0);
        if level == 0 {
            let mut out = vec![0u64; n];
            for (i, x) in a.iter().take(n).enumerate() {
                let x = x.coeffs[0];
                if x == 0 {
                    continue;
                }
                for (j, y) in b.iter().take(n - i).enumerate() {
                    out[i + j] = (out[i + j] + x * y.coeffs[0]) % self.ell;
                }
            }
            return out.into_iter().map(|c| FieldElem { level: 0, coeffs: vec![c] }).collect();
        }
        let tower = self.snapshot();
        let ar = Arith { ell: self.ell, levels: &tower };
        let d = tower[level].abs_degree;
        let lift = |c: &FieldElem| -> Raw {
            let mut v = c.coeffs.clone();
            v.resize(d, 0);
            v
        };
        let xa: Vec<Raw> = a.iter().take(n).map(lift).collect();
        let xb: Vec<Raw> = b.iter().take(n).map(lift).collect();
        let mut out = vec![vec![0u64; d]; n];
        for (i, x) in xa.iter().enumerate() {
            if Arith::is_zero(x) {
                continue;
            }
            for (j, y) in xb.iter().take(n - i).enumerate() {
                if Arith::is_zero(y) {
                    continue;
                }
                let t = ar.mul(level, x, y);
                for (o, v) in out[i + j].iter_mut().zip(&t) {
                    *o = (*o + v) % self.ell;
                }
            }
        }
        out.into_iter().map(|coeffs| FieldElem { level, coeffs }).collect()
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e` for any integer `e` (negative exponents invert; `0^0 = 1`).
    pub fn pow(&self, a: &FieldElem, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        Ok(self.pow_big(&base, &BigUint::from(e.unsigned_abs())))
    }

    pub fn pow_big(&self, a: &FieldElem, e: &BigUint) -> FieldElem {
        let tower = self.snapshot();
        let ar = Arith { ell: self.ell, levels: &tower };
        FieldElem { level: a.level, coeffs: ar.pow(a.level, &a.coeffs, e) }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: &FieldElem) -> Result<BigUint> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        let a = self.lower(a);
        let group = self.order(a.level) - 1u32;
        let mut ord = group.clone();
        for q in big_prime_factors(&group) {
            while (&ord % &q).is_zero() {
                let cand = &ord / &q;
                if self.pow_big(&a, &cand).is_one() {
                    ord = cand;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    // ---- roots of unity ------------------------------------------------------------

    /// The distinguished primitive `p`-th root of unity `ζ`, extending the tower if needed.
    ///
    /// Canonical choice: the smallest element of exact order `p` in enumeration order at the
    /// lowest level containing `μ_p`. Cached for the lifetime of the context.
    pub fn zeta(&self) -> FieldElem {
        self.zeta_powers()[1].clone()
    }

    fn zeta_powers(&self) -> &[FieldElem] {
        self.zeta_powers.get_or_init(|| {
            let z = self.root_of_unity(self.p);
            let mut out = vec![self.one()];
            for _ in 1..self.p {
                out.push(self.mul(out.last().unwrap(), &z));
            }
            out
        })
    }

    /// `ζ^c`.
    pub fn zeta_pow(&self, c: i64) -> FieldElem {
        self.zeta_powers()[c.rem_euclid(self.p as i64) as usize].clone()
    }

    /// Discrete logarithm on `μ_p`: the residue `c` with `ζ^c = w`.
    pub fn log_zeta(&self, w: &FieldElem) -> Result<u64> {
        if !self.pow(w, self.p as i64)?.is_one() {
            return Err(Error::NotARootOfUnity);
        }
        let z = self.zeta();
        let mut acc = self.one();
        for c in 0..self.p {
            if acc == *w {
                return Ok(c);
            }
            acc = self.mul(&acc, &z);
        }
        Err(Error::NotARootOfUnity)
    }

    /// Canonical primitive `m`-th root of unity (`gcd(m, ℓ) = 1`).
    pub fn root_of_unity(&self, m: u64) -> FieldElem {
        assert!(m > 0 && m % self.ell != 0, "no primitive {m}-th roots of unity in characteristic {}", self.ell);
        if m == 1 {
            return self.one();
        }
        let level = self.ensure_roots_of_unity(m);
        let group = self.order(level) - 1u32;
        let cof = &group / m;
        let primes = distinct_prime_factors(m);
        let w = loop {
            let x = self.random_nonzero(level, &mut *self.rng.lock().expect("rng lock poisoned"));
            let w = self.pow_big(&x, &cof);
            if primes.iter().all(|&q| !self.pow_big(&w, &BigUint::from(m / q)).is_one()) {
                break w;
            }
        };
        let mut best = w.clone();
        let mut acc = w.clone();
        for j in 2..m {
            acc = self.mul(&acc, &w);
            if num_integer::gcd(j, m) == 1 && acc < best {
                best = acc.clone();
            }
        }
        best
    }

    /// Lowest level containing the `m`-th roots of unity; extends the tower by one step of
    /// degree `ord_m(|top|)` when no level does.
    pub fn ensure_roots_of_unity(&self, m: u64) -> usize {
        let mb = BigUint::from(m);
        let found = |tower: &Vec<Level>| tower.iter().position(|lv| ((&lv.order - 1u32) % &mb).is_zero());
        if let Some(l) = found(&self.snapshot()) {
            return l;
        }
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let tower = self.snapshot();
        if let Some(l) = found(&tower) {
            return l;
        }
        let q = (&tower.last().unwrap().order % &mb).to_u64().unwrap();
        let mut d = 1usize;
        let mut acc = q % m;
        while acc != 1 {
            acc = acc * q % m;
            d += 1;
        }
        self.push_level_locked(d);
        self.top_level()
    }

    // ---- roots ---------------------------------------------------------------------

    /// The canonical `p`-th root of a nonzero element (may extend the tower by degree `p`).
    pub fn pth_root(&self, a: &FieldElem) -> Result<FieldElem> {
        self.prime_root(a, self.p)
    }

    /// Canonical `q`-th root for a prime `q ≠ ℓ`: the smallest root in enumeration order at
    /// the lowest level containing one. When no level does, the top is extended by degree `q`.
    pub fn prime_root(&self, a: &FieldElem, q: u64) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        assert!(is_prime(q) && q != self.ell, "root order {q} must be a prime different from ℓ");
        loop {
            let tower = self.snapshot();
            for level in a.level..tower.len() {
                if let Some(r) = self.root_at(&tower, &self.embed(a, level), q) {
                    return Ok(r);
                }
            }
            let _guard = self.writer.lock().expect("writer lock poisoned");
            if self.snapshot().len() == tower.len() {
                self.push_level_locked(q as usize);
            }
        }
    }

    /// An `n`-th root for any `n` coprime to ℓ, by successive prime roots.
    pub fn nth_root(&self, a: &FieldElem, n: u64) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut r = a.clone();
        for q in factorize(n) {
            r = self.prime_root(&r, q)?;
        }
        Ok(r)
    }

    fn root_at(&self, tower: &[Level], a: &FieldElem, q: u64) -> Option<FieldElem> {
        let level = a.level;
        let ar = Arith { ell: self.ell, levels: tower };
        let group = &tower[level].order - 1u32;
        let qb = BigUint::from(q);
        if !(&group % &qb).is_zero() {
            let d = BigUint::from(q).modinv(&group).expect("q coprime to the group order");
            let r = ar.pow(level, &a.coeffs, &d);
            return Some(FieldElem { level, coeffs: r });
        }
        let one = ar.one(level);
        if ar.pow(level, &a.coeffs, &(&group / &qb)) != one {
            return None;
        }
        let mut s = 0u32;
        let mut odd = group.clone();
        while (&odd % &qb).is_zero() {
            odd /= &qb;
            s += 1;
        }
        let d = if odd.is_one() { BigUint::zero() } else { (&qb % &odd).modinv(&odd).expect("coprime") };
        let x = ar.pow(level, &a.coeffs, &d);
        let nonresidue = loop {
            let n = self.random_nonzero(level, &mut *self.rng.lock().expect("rng lock poisoned"));
            if ar.pow(level, &n.coeffs, &(&group / &qb)) != one {
                break n.coeffs;
            }
        };
        let c = ar.pow(level, &nonresidue, &odd);
        let c_inv = ar.inv(level, &c).expect("nonzero");
        let gamma = ar.pow(level, &c, &qb.pow(s - 1));
        let a_inv = ar.inv(level, &a.coeffs).expect("nonzero");
        let err = ar.mul(level, &ar.pow(level, &x, &qb), &a_inv);
        // discrete log of err in the cyclic q-Sylow subgroup generated by c
        let mut e = BigUint::zero();
        for i in 0..s {
            let h = ar.pow(level, &ar.mul(level, &err, &ar.pow(level, &c_inv, &e)), &qb.pow(s - 1 - i));
            let mut acc = one.clone();
            let mut digit = None;
            for dgt in 0..q {
                if acc == h {
                    digit = Some(dgt);
                    break;
                }
                acc = ar.mul(level, &acc, &gamma);
            }
            e += BigUint::from(digit.expect("discrete log digit exists")) * qb.pow(i);
        }
        debug_assert!((&e % &qb).is_zero());
        let y = ar.pow(level, &c_inv, &(&e / &qb));
        let root = ar.mul(level, &x, &y);
        debug_assert_eq!(ar.pow(level, &root, &qb), a.coeffs);
        let mut best = root.clone();
        let mut acc = root;
        for _ in 1..q {
            acc = ar.mul(level, &acc, &gamma);
            if acc < best {
                best = acc.clone();
            }
        }
        Some(FieldElem { level, coeffs: best })
    }

    // ---- tower extension ------------------------------------------------------------

    /// Appends a level of relative degree `d` over the current top. Caller holds the writer lock.
    fn push_level_locked(&self, d: usize) {
        let tower = self.snapshot();
        let base = tower.len() - 1;
        let modulus = {
            let ar = Arith { ell: self.ell, levels: &tower };
            let mut rng = self.rng.lock().expect("rng lock poisoned");
            loop {
                let mut f: RawPoly =
                    (0..d).map(|_| (0..tower[base].abs_degree).map(|_| rng.gen_range(0..self.ell)).collect()).collect();
                f.push(ar.one(base));
                if ar.is_irreducible(base, &f) {
                    break f;
                }
            }
        };
        self.install_level(modulus);
    }

    fn install_level(&self, modulus: RawPoly) {
        let mut guard = self.tower.write().expect("tower lock poisoned");
        let mut levels: Vec<Level> = (**guard).clone();
        let base = levels.last().unwrap();
        let rel = modulus.len() - 1;
        let abs = base.abs_degree * rel;
        let order = BigUint::from(self.ell).pow(abs as u32);
        levels.push(Level { rel_degree: rel, abs_degree: abs, modulus, order });
        *guard = Arc::new(levels);
    }

    /// Re-checks every step polynomial with the Frobenius (Rabin) irreducibility test.
    pub fn verify_tower(&self) -> bool {
        let tower = self.snapshot();
        let ar = Arith { ell: self.ell, levels: &tower };
        (1..tower.len()).all(|l| ar.is_irreducible(l - 1, &tower[l].modulus))
    }

    /// The step polynomial defining `level`, lowest degree first, as elements of `level - 1`.
    pub fn step_polynomial(&self, level: usize) -> Vec<FieldElem> {
        let tower = self.snapshot();
        tower[level].modulus.iter().map(|c| FieldElem { level: level - 1, coeffs: c.clone() }).collect()
    }

    pub fn to_repr(&self) -> FieldCtxRepr {
        let tower = self.snapshot();
        FieldCtxRepr {
            ell: self.ell,
            p: self.p,
            tower: (1..tower.len()).map(|l| self.step_polynomial(l).iter().map(|c| c.to_string()).collect()).collect(),
        }
    }

    /// Rebuilds a context from its serialized form, validating each step polynomial.
    pub fn from_repr(repr: &FieldCtxRepr) -> Result<Self> {
        let ctx = FieldCtx::new(repr.ell, repr.p)?;
        for (i, step) in repr.tower.iter().enumerate() {
            let base = i;
            let coeffs = step
                .iter()
                .map(|s| ctx.parse_elem(s).map(|e| ctx.embed(&ctx.lower(&e), base)))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() < 2 || !coeffs.last().unwrap().is_one() {
                return Err(Error::Parse(format!("step {} is not monic of positive degree", i + 1)));
            }
            let poly: RawPoly = coeffs.into_iter().map(|c| c.coeffs).collect();
            let tower = ctx.snapshot();
            let ar = Arith { ell: ctx.ell, levels: &tower };
            if !ar.is_irreducible(base, &poly) {
                return Err(Error::InvalidField(format!("step {} is reducible", i + 1)));
            }
            ctx.install_level(poly);
        }
        Ok(ctx)
    }
}

fn big_prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut d = BigUint::from(2u32);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1u32;
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

/// Raw coordinate arithmetic over a fixed tower snapshot.
struct Arith<'a> {
    ell: u64,
    levels: &'a [Level],
}

impl Arith<'_> {
    fn zero(&self, level: usize) -> Raw {
        vec![0; self.levels[level].abs_degree]
    }

    fn one(&self, level: usize) -> Raw {
        let mut r = self.zero(level);
        r[0] = 1;
        r
    }

    fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Raw {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.ell).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Raw {
        a.iter().zip(b).map(|(x, y)| (x + self.ell - y) % self.ell).collect()
    }

    fn mul(&self, level: usize, a: &[u64], b: &[u64]) -> Raw {
        if level == 0 {
            return vec![a[0] * b[0] % self.ell];
        }
        let lv = &self.levels[level];
        let m = lv.rel_degree;
        let d = self.levels[level - 1].abs_degree;
        if d == 1 {
            return self.mul_over_prime(lv, a, b);
        }
        let ab: Vec<&[u64]> = a.chunks(d).collect();
        let bb: Vec<&[u64]> = b.chunks(d).collect();
        let mut prod: RawPoly = vec![self.zero(level - 1); 2 * m - 1];
        for (i, x) in ab.iter().enumerate() {
            if Self::is_zero(x) {
                continue;
            }
            for (j, y) in bb.iter().enumerate() {
                if Self::is_zero(y) {
                    continue;
                }
                let t = self.mul(level - 1, x, y);
                prod[i + j] = self.add(&prod[i + j], &t);
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = std::mem::replace(&mut prod[k], self.zero(level - 1));
            if Self::is_zero(&c) {
                continue;
            }
            for i in 0..m {
                let t = self.mul(level - 1, &c, &lv.modulus[i]);
                prod[k - m + i] = self.sub(&prod[k - m + i], &t);
            }
        }
        prod.truncate(m);
        prod.concat()
    }

    /// Schoolbook product and reduction by the monic modulus, for a level directly over `F_ℓ`.
    fn mul_over_prime(&self, lv: &Level, a: &[u64], b: &[u64]) -> Raw {
        let m = lv.rel_degree;
        let ell = self.ell;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % ell;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..m {
                let t = c * lv.modulus[i][0] % ell;
                prod[k - m + i] = (prod[k - m + i] + ell - t) % ell;
            }
        }
        prod.truncate(m);
        prod
    }

    fn pow(&self, level: usize, a: &[u64], e: &BigUint) -> Raw {
        let mut result = self.one(level);
        let mut base = a.to_vec();
        for i in 0..e.bits() {
            if e.bit(i) {
                result = self.mul(level, &result, &base);
            }
            if i + 1 < e.bits() {
                base = self.mul(level, &base, &base);
            }
        }
        result
    }

    fn inv(&self, level: usize, a: &[u64]) -> Option<Raw> {
        if Self::is_zero(a) {
            return None;
        }
        if level == 0 {
            return Some(self.pow(0, a, &BigUint::from(self.ell - 2)));
        }
        let base = level - 1;
        let d = self.levels[base].abs_degree;
        let m = self.levels[level].rel_degree;
        let f = self.levels[level].modulus.clone();
        let g = self.poly_trim(a.chunks(d).map(|c| c.to_vec()).collect());
        // extended Euclid: s * g ≡ r (mod f)
        let (mut r0, mut r1) = (f.clone(), g);
        let (mut s0, mut s1): (RawPoly, RawPoly) = (Vec::new(), vec![self.one(base)]);
        while !r1.is_empty() {
            let (q, r) = self.poly_divrem(base, &r0, &r1);
            let s2 = self.poly_sub(&s0, &self.poly_mul(base, &q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = self.inv(base, &r0[0])?;
        let (_, mut s) = self.poly_divrem(base, &s0, &f);
        s = s.iter().map(|x| self.mul(base, x, &c)).collect();
        s.resize(m, self.zero(base));
        Some(s.concat())
    }

    // ---- polynomials over a level (lowest degree first, trimmed) ---------------------

    fn poly_trim(&self, mut a: RawPoly) -> RawPoly {
        while a.last().is_some_and(|c| Self::is_zero(c)) {
            a.pop();
        }
        a
    }

    fn poly_sub(&self, a: &RawPoly, b: &RawPoly) -> RawPoly {
        let n = a.len().max(b.len());
        let width = a.first().or(b.first()).map_or(1, |c| c.len());
        let z = vec![0; width];
        let out = (0..n).map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.poly_trim(out)
    }

    fn poly_mul(&self, level: usize, a: &RawPoly, b: &RawPoly) -> RawPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(level); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if Self::is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.mul(level, x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        self.poly_trim(out)
    }

    fn poly_divrem(&self, level: usize, a: &RawPoly, b: &RawPoly) -> (RawPoly, RawPoly) {
        let b = self.poly_trim(b.clone());
        assert!(!b.is_empty(), "polynomial division by zero");
        let mut r = self.poly_trim(a.clone());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let lead_inv = self.inv(level, b.last().unwrap()).expect("nonzero leading coefficient");
        let mut q = vec![self.zero(level); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = self.mul(level, r.last().unwrap(), &lead_inv);
            for (i, bi) in b.iter().enumerate() {
                let t = self.mul(level, &c, bi);
                r[shift + i] = self.sub(&r[shift + i], &t);
            }
            q[shift] = c;
            r = self.poly_trim(r);
        }
        (self.poly_trim(q), r)
    }

    fn poly_mulmod(&self, level: usize, a: &RawPoly, b: &RawPoly, f: &RawPoly) -> RawPoly {
        self.poly_divrem(level, &self.poly_mul(level, a, b), f).1
    }

    fn poly_powmod(&self, level: usize, a: &RawPoly, e: &BigUint, f: &RawPoly) -> RawPoly {
        let mut result = self.poly_divrem(level, &vec![self.one(level)], f).1;
        let mut base = self.poly_divrem(level, a, f).1;
        for i in 0..e.bits() {
            if e.bit(i) {
                result = self.poly_mulmod(level, &result, &base, f);
            }
            if i + 1 < e.bits() {
                base = self.poly_mulmod(level, &base, &base, f);
            }
        }
        result
    }

    fn poly_gcd(&self, level: usize, a: &RawPoly, b: &RawPoly) -> RawPoly {
        let (mut x, mut y) = (self.poly_trim(a.clone()), self.poly_trim(b.clone()));
        while !y.is_empty() {
            let r = self.poly_divrem(level, &x, &y).1;
            x = std::mem::replace(&mut y, r);
        }
        x
    }

    /// Rabin's test: a monic `f` of degree `m` over a field with `q` elements is irreducible
    /// iff `X^{q^m} ≡ X (mod f)` and `gcd(X^{q^{m/r}} - X, f) = 1` for every prime `r | m`.
    fn is_irreducible(&self, level: usize, f: &RawPoly) -> bool {
        let m = f.len() - 1;
        if m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        let q = &self.levels[level].order;
        let x: RawPoly = vec![self.zero(level), self.one(level)];
        let x_mod = self.poly_divrem(level, &x, f).1;
        let mut frob = Vec::with_capacity(m);
        let mut h = x_mod.clone();
        for _ in 0..m {
            h = self.poly_powmod(level, &h, q, f);
            frob.push(h.clone());
        }
        if frob[m - 1] != x_mod {
            return false;
        }
        distinct_prime_factors(m as u64).into_iter().all(|r| {
            let hr = &frob[m / r as usize - 1];
            let g = self.poly_gcd(level, &self.poly_sub(hr, &x_mod), f);
            g.len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldCtx {
        FieldCtx::new(7, 3).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldCtx::new(7, 7), Err(Error::InvalidField(_))));
        assert!(matches!(FieldCtx::new(8, 3), Err(Error::InvalidField(_))));
        assert!(matches!(FieldCtx::new(7, 4), Err(Error::InvalidField(_))));
    }

    #[test]
    fn zeta_in_prime_field() {
        let ctx = f7();
        // elements of order 3 in F_7^* are {2, 4}
        let orders: Vec<u64> = (1..7).filter(|&x| (x * x * x) % 7 == 1 && x != 1).collect();
        assert_eq!(orders, vec![2, 4]);
        assert_eq!(ctx.zeta(), ctx.from_int(2));
        assert_eq!(ctx.num_levels(), 1);
        assert!(ctx.pow(&ctx.zeta(), 3).unwrap().is_one());
    }

    #[test]
    fn zeta_needs_quadratic_extension_over_f2() {
        let ctx = FieldCtx::new(2, 3).unwrap();
        let z = ctx.zeta();
        assert_eq!(z.level(), 1);
        assert_eq!(ctx.abs_degree(1), 2);
        // the only irreducible quadratic over F_2 is y^2 + y + 1
        let step = ctx.step_polynomial(1);
        assert_eq!(step, vec![ctx.one(), ctx.one(), ctx.one()]);
        assert_eq!(z, ctx.generator(1).unwrap());
        let z2 = ctx.mul(&z, &z);
        assert!(ctx.add(&ctx.add(&z2, &z), &ctx.one()).is_zero());
    }

    #[test]
    fn log_zeta_examples() {
        let ctx = f7();
        assert_eq!(ctx.log_zeta(&ctx.from_int(4)).unwrap(), 2);
        assert_eq!(ctx.log_zeta(&ctx.one()).unwrap(), 0);
        assert_eq!(ctx.log_zeta(&ctx.from_int(2)).unwrap(), 1);
        assert_eq!(ctx.log_zeta(&ctx.from_int(3)), Err(Error::NotARootOfUnity));
    }

    #[test]
    fn cube_roots_in_f7() {
        let ctx = f7();
        assert_eq!(ctx.pth_root(&ctx.from_int(6)).unwrap(), ctx.from_int(3));
        assert_eq!(ctx.pth_root(&ctx.from_int(1)).unwrap(), ctx.from_int(1));
        assert_eq!(ctx.pth_root(&ctx.zero()), Err(Error::ZeroInput));
        assert_eq!(ctx.num_levels(), 1);
    }

    #[test]
    fn cube_root_of_two_extends_by_degree_three() {
        let ctx = f7();
        let two = ctx.from_int(2);
        let r = ctx.pth_root(&two).unwrap();
        assert_eq!(r.level(), 1);
        assert_eq!(ctx.rel_degree(1), 3);
        assert_eq!(ctx.pow(&r, 3).unwrap(), two);
        assert!(ctx.verify_tower());
        // a second request reuses the level
        let r3 = ctx.pth_root(&ctx.from_int(3)).unwrap();
        assert_eq!(ctx.num_levels(), 2);
        assert_eq!(ctx.pow(&r3, 3).unwrap(), ctx.from_int(3));
    }

    #[test]
    fn canonical_root_is_smallest() {
        let ctx = f7();
        let two = ctx.from_int(2);
        let r = ctx.pth_root(&two).unwrap();
        let z = ctx.zeta();
        let others = [ctx.mul(&r, &z), ctx.mul(&r, &ctx.mul(&z, &z))];
        assert!(others.iter().all(|o| r < *o));
    }

    #[test]
    fn text_round_trip() {
        let ctx = f7();
        let _ = ctx.pth_root(&ctx.from_int(2)).unwrap();
        let e = ctx.elem(1, &[3, 0, 5]).unwrap();
        assert_eq!(e.to_string(), "L1:[3,0,5]");
        assert_eq!(ctx.parse_elem("L1:[3,0,5]").unwrap(), e);
        assert_eq!(ctx.parse_elem("5").unwrap(), ctx.from_int(5));
        assert!(ctx.parse_elem("L3:[1]").is_err());
        assert!(ctx.parse_elem("L1:[1,2]").is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let ctx = f7();
        let _ = ctx.pth_root(&ctx.from_int(2)).unwrap();
        let a = ctx.from_int(5);
        let up = ctx.embed(&a, 1);
        assert_eq!(up.level(), 1);
        assert_eq!(ctx.lower(&up).level(), 0);
        assert_eq!(ctx.lower(&up), a);
    }

    #[test]
    fn repr_round_trip() {
        let ctx = f7();
        let r = ctx.pth_root(&ctx.from_int(2)).unwrap();
        let repr = ctx.to_repr();
        let back = FieldCtx::from_repr(&repr).unwrap();
        assert_eq!(back.to_repr(), repr);
        let r2 = back.parse_elem(&r.to_string()).unwrap();
        assert_eq!(back.pow(&r2, 3).unwrap(), back.from_int(2));
    }

    #[test]
    fn reducible_step_is_rejected() {
        let repr = FieldCtxRepr { ell: 7, p: 3, tower: vec![vec!["6".into(), "0".into(), "1".into()]] };
        // y^2 - 1 = (y - 1)(y + 1)
        assert!(matches!(FieldCtx::from_repr(&repr), Err(Error::InvalidField(_))));
    }

    #[test]
    fn multiplicative_order() {
        let ctx = f7();
        assert_eq!(ctx.mult_order(&ctx.from_int(3)).unwrap(), BigUint::from(6u32));
        assert_eq!(ctx.mult_order(&ctx.from_int(2)).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn fifth_roots_of_unity_over_f7() {
        let ctx = FieldCtx::new(7, 5).unwrap();
        let z = ctx.zeta();
        // ord_5(7) = 4
        assert_eq!(ctx.abs_degree(z.level()), 4);
        assert_eq!(ctx.mult_order(&z).unwrap(), BigUint::from(5u32));
        for c in 0..5 {
            assert_eq!(ctx.log_zeta(&ctx.zeta_pow(c)).unwrap(), c as u64);
        }
    }
}
