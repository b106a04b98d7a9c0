//! Truncated Laurent series `k((z))` over the coefficient tower.
//!
//! A nonzero series is stored as its valuation and a window of `prec` coefficients starting
//! at the (nonzero) leading one; it is known modulo `z^{val + prec}`. The exact zero is a
//! distinct value with an empty window.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime};
use crate::coeff_field::{FieldCtx, FieldElem};
use crate::error::{Error, Result};

pub const DEFAULT_PREC: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    val: i64,
    coeffs: Vec<FieldElem>,
}

impl LaurentSeries {
    /// The exact zero.
    pub fn zero() -> Self {
        LaurentSeries { val: 0, coeffs: Vec::new() }
    }

    /// Normalizes a window: leading zeros are consumed (shrinking the precision). A window
    /// that is entirely zero is rejected rather than turned into a fabricated valuation.
    pub fn new(val: i64, coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.is_empty() {
            return Ok(Self::zero());
        }
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Ok(LaurentSeries { val: val + i as i64, coeffs: coeffs[i..].to_vec() }),
            None => Err(Error::PrecisionExhausted),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Result<i64> {
        if self.is_zero() {
            Err(Error::ZeroValuation)
        } else {
            Ok(self.val)
        }
    }

    /// Number of known coefficients (0 for the exact zero).
    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    /// The exponent up to which the series is known, or `None` for the exact zero.
    pub fn abs_prec(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.val + self.coeffs.len() as i64)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&FieldElem> {
        self.coeffs.first()
    }

    /// Coefficient of `z^exp`, or `None` when it lies beyond the known window.
    pub fn coeff(&self, exp: i64, ctx: &FieldCtx) -> Option<FieldElem> {
        if self.is_zero() || exp < self.val {
            return Some(ctx.zero());
        }
        self.coeffs.get((exp - self.val) as usize).cloned()
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(prec.max(1).min(s.coeffs.len()));
        s
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentSeries { val: self.val + k, coeffs: self.coeffs.clone() }
    }

    /// Equality on the common known window (exact zeros only agree with each other).
    pub fn agrees(&self, other: &Self) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                let n = self.prec().min(other.prec());
                self.val == other.val && self.coeffs[..n] == other.coeffs[..n]
            }
            _ => false,
        }
    }

    /// The constant term when the series is a constant within its window.
    pub fn as_constant(&self, ctx: &FieldCtx) -> Option<FieldElem> {
        if self.is_zero() {
            return Some(ctx.zero());
        }
        (self.val == 0 && self.coeffs[1..].iter().all(|c| c.is_zero())).then(|| self.coeffs[0].clone())
    }
}

/// The local field `K_x ≅ k((z))` at a fixed working precision.
#[derive(Clone, Copy, Debug)]
pub struct LocalField<'a> {
    ctx: &'a FieldCtx,
    prec: usize,
}

impl<'a> LocalField<'a> {
    pub fn new(ctx: &'a FieldCtx, prec: usize) -> Self {
        assert!(prec > 0, "precision must be positive");
        LocalField { ctx, prec }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn zero(&self) -> LaurentSeries {
        LaurentSeries::zero()
    }

    pub fn constant(&self, c: &FieldElem) -> LaurentSeries {
        self.monomial(c, 0)
    }

    pub fn one(&self) -> LaurentSeries {
        self.constant(&self.ctx.one())
    }

    /// `c·z^k`, padded to the working precision.
    pub fn monomial(&self, c: &FieldElem, k: i64) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::zero();
        }
        let mut coeffs = vec![self.ctx.zero(); self.prec];
        coeffs[0] = c.clone();
        LaurentSeries { val: k, coeffs }
    }

    /// The uniformizer `z`.
    pub fn z(&self) -> LaurentSeries {
        self.monomial(&self.ctx.one(), 1)
    }

    /// Exact polynomial `z^val · (c₀ + c₁z + …)`, padded to the working precision.
    pub fn from_poly(&self, val: i64, coeffs: &[FieldElem]) -> LaurentSeries {
        let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
            return LaurentSeries::zero();
        };
        let mut window: Vec<FieldElem> = coeffs[first..].to_vec();
        window.resize(self.prec.max(window.len()), self.ctx.zero());
        LaurentSeries { val: val + first as i64, coeffs: window }
    }

    pub fn from_ints(&self, val: i64, coeffs: &[i64]) -> LaurentSeries {
        let c: Vec<FieldElem> = coeffs.iter().map(|&x| self.ctx.from_int(x)).collect();
        self.from_poly(val, &c)
    }

    pub fn valuation(&self, s: &LaurentSeries) -> Result<i64> {
        s.valuation()
    }

    pub fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        LaurentSeries { val: a.val, coeffs: a.coeffs.iter().map(|c| self.ctx.neg(c)).collect() }
    }

    /// Sum on the common known window. Cancellation consumes precision; a window that
    /// cancels completely is the exact zero only when the operands are exact negatives
    /// (same valuation and precision), otherwise [`Error::PrecisionExhausted`].
    pub fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        if a.is_zero() {
            return Ok(b.clone());
        }
        if b.is_zero() {
            return Ok(a.clone());
        }
        let end = a.abs_prec().unwrap().min(b.abs_prec().unwrap());
        let start = a.val.min(b.val);
        let coeffs: Vec<FieldElem> = (start..end)
            .map(|k| {
                let x = a.coeff(k, self.ctx).expect("inside window");
                let y = b.coeff(k, self.ctx).expect("inside window");
                self.ctx.add(&x, &y)
            })
            .collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            return if a.val == b.val && a.prec() == b.prec() {
                Ok(LaurentSeries::zero())
            } else {
                Err(Error::PrecisionExhausted)
            };
        }
        LaurentSeries::new(start, coeffs)
    }

    pub fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        if a.is_zero() || b.is_zero() {
            return LaurentSeries::zero();
        }
        let n = a.prec().min(b.prec());
        LaurentSeries { val: a.val + b.val, coeffs: self.ctx.convolve(&a.coeffs, &b.coeffs, n) }
    }

    pub fn scale(&self, a: &LaurentSeries, c: &FieldElem) -> LaurentSeries {
        if c.is_zero() || a.is_zero() {
            return LaurentSeries::zero();
        }
        LaurentSeries { val: a.val, coeffs: a.coeffs.iter().map(|x| self.ctx.mul(x, c)).collect() }
    }

    pub fn inv(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n = a.prec();
        let b0 = self.ctx.inv(&a.coeffs[0])?;
        let mut b: Vec<FieldElem> = Vec::with_capacity(n);
        b.push(b0.clone());
        for k in 1..n {
            let mut acc = self.ctx.zero();
            for i in 1..=k {
                if a.coeffs[i].is_zero() {
                    continue;
                }
                acc = self.ctx.add(&acc, &self.ctx.mul(&a.coeffs[i], &b[k - i]));
            }
            b.push(self.ctx.neg(&self.ctx.mul(&b0, &acc)));
        }
        Ok(LaurentSeries { val: -a.val, coeffs: b })
    }

    pub fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e`; negative exponents invert. `a^0` is `1` at the precision of `a`.
    pub fn pow(&self, a: &LaurentSeries, e: i64) -> Result<LaurentSeries> {
        if e == 0 {
            let prec = if a.is_zero() { self.prec } else { a.prec() };
            return Ok(LocalField::new(self.ctx, prec).one());
        }
        if a.is_zero() {
            return if e > 0 { Ok(LaurentSeries::zero()) } else { Err(Error::ZeroInverse) };
        }
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut k = e.unsigned_abs();
        let mut acc: Option<LaurentSeries> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(x) => self.mul(&x, &base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc.expect("positive exponent"))
    }

    /// Root of a unit for a prime order `q ≠ ℓ`: the leading coefficient takes the canonical
    /// tower root, the principal unit part is lifted by Newton iteration with doubling precision.
    pub fn unit_root(&self, u: &LaurentSeries, q: u64) -> Result<LaurentSeries> {
        let val = u.valuation()?;
        if val != 0 {
            return Err(Error::NotAUnit(val));
        }
        assert!(is_prime(q) && q != self.ctx.ell(), "root order must be a prime different from ℓ");
        let n = u.prec();
        let c0 = self.ctx.prime_root(&u.coeffs[0], q)?;
        let w = self.scale(u, &self.ctx.inv(&u.coeffs[0])?);
        let inv_q = self.ctx.inv(&self.ctx.from_int(q as i64))?;
        let q_minus_1 = self.ctx.from_int(q as i64 - 1);
        let mut r = LocalField::new(self.ctx, 1).one();
        let mut cur = 1usize;
        while cur < n {
            cur = (2 * cur).min(n);
            let mut rc = r.coeffs.clone();
            rc.resize(cur, self.ctx.zero());
            let r_cur = LaurentSeries { val: 0, coeffs: rc };
            let w_cur = w.truncate(cur);
            // r ← ((q-1)·r + w·r^{1-q}) / q
            let t = self.mul(&w_cur, &self.pow(&r_cur, 1 - q as i64)?);
            let s = self.add(&self.scale(&r_cur, &q_minus_1), &t)?;
            r = self.scale(&s, &inv_q);
        }
        Ok(self.scale(&r, &c0))
    }

    /// `p`-th root of a unit with the context's fixed prime `p`.
    pub fn hensel_pth_root(&self, u: &LaurentSeries) -> Result<LaurentSeries> {
        self.unit_root(u, self.ctx.p())
    }

    /// An `n`-th root of a series whose valuation is divisible by `n` (`ℓ ∤ n`).
    pub fn nth_root(&self, a: &LaurentSeries, n: u64) -> Result<LaurentSeries> {
        let val = a.valuation()?;
        if val.rem_euclid(n as i64) != 0 {
            return Err(Error::NotAPower { root: n, val });
        }
        let mut r = a.shift(-val);
        for q in factorize(n) {
            r = self.unit_root(&r, q)?;
        }
        Ok(r.shift(val / n as i64))
    }

    /// `p`-th root of any series with valuation divisible by `p`.
    pub fn pth_root(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        self.nth_root(a, self.ctx.p())
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, level: usize, rng: &mut R) -> LaurentSeries {
        let mut coeffs = vec![self.ctx.random_nonzero(level, rng)];
        coeffs.extend((1..self.prec).map(|_| self.ctx.random(level, rng)));
        LaurentSeries { val: 0, coeffs }
    }

    pub fn random_series<R: rand::Rng + ?Sized>(&self, val: i64, level: usize, rng: &mut R) -> LaurentSeries {
        self.random_unit(level, rng).shift(val)
    }

    // ---- text and JSON forms -------------------------------------------------------

    /// Parses the text sugar `z^-2*(3 + 1*z)`; terms are `c`, `c*z^k`, `z^k` joined by `+`.
    pub fn parse(&self, s: &str) -> Result<LaurentSeries> {
        let s = s.trim();
        let (shift, body) = match s.find("*(") {
            Some(i) if s.ends_with(')') => {
                let head = s[..i].trim();
                let k = parse_z_power(head).ok_or_else(|| Error::Parse(format!("bad prefix `{head}`")))?;
                (k, &s[i + 2..s.len() - 1])
            }
            _ => match s.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
                Some(b) => (0, b),
                None => (0, s),
            },
        };
        let mut terms: BTreeMap<i64, FieldElem> = BTreeMap::new();
        for term in split_terms(body) {
            let (c, k) = self.parse_term(term.trim())?;
            let e = terms.entry(k + shift).or_insert_with(|| self.ctx.zero());
            *e = self.ctx.add(e, &c);
        }
        terms.retain(|_, c| !c.is_zero());
        let Some((&lo, _)) = terms.iter().next() else {
            return Ok(LaurentSeries::zero());
        };
        let hi = *terms.keys().next_back().unwrap();
        let coeffs: Vec<FieldElem> =
            (lo..=hi).map(|k| terms.get(&k).cloned().unwrap_or_else(|| self.ctx.zero())).collect();
        Ok(self.from_poly(lo, &coeffs))
    }

    fn parse_term(&self, t: &str) -> Result<(FieldElem, i64)> {
        if t.is_empty() {
            return Err(Error::Parse("empty term".into()));
        }
        let (coef, zpart) = match t.rfind('z') {
            Some(i) if i == 0 || t[..i].trim_end().ends_with('*') => {
                let c = t[..i].trim_end().trim_end_matches('*').trim();
                (c, Some(&t[i..]))
            }
            _ => (t, None),
        };
        let c = if coef.is_empty() {
            self.ctx.one()
        } else if coef == "-" {
            self.ctx.from_int(-1)
        } else {
            self.ctx.parse_elem(coef)?
        };
        let k = match zpart {
            None => 0,
            Some(z) => parse_z_power(z).ok_or_else(|| Error::Parse(format!("bad power `{z}`")))?,
        };
        Ok((c, k))
    }

    pub fn format(&self, s: &LaurentSeries) -> String {
        if s.is_zero() {
            return "0".to_string();
        }
        let terms: Vec<String> = s
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let cs = match c.as_prime_field() {
                    Some(v) => v.to_string(),
                    None => c.to_string(),
                };
                match i {
                    0 => cs,
                    1 => format!("{cs}*z"),
                    _ => format!("{cs}*z^{i}"),
                }
            })
            .collect();
        format!("z^{}*({})", s.val, terms.join(" + "))
    }

    pub fn to_repr(&self, s: &LaurentSeries) -> SeriesRepr {
        let end = s.coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        SeriesRepr::Object {
            val: s.val,
            coeffs: s.coeffs[..end].iter().map(|c| c.to_string()).collect(),
            prec: Some(s.prec()),
        }
    }

    pub fn from_repr(&self, r: &SeriesRepr) -> Result<LaurentSeries> {
        match r {
            SeriesRepr::Text(t) => self.parse(t),
            SeriesRepr::Object { val, coeffs, prec } => {
                let mut c = coeffs.iter().map(|x| self.ctx.parse_elem(x)).collect::<Result<Vec<_>>>()?;
                if c.is_empty() {
                    return Ok(LaurentSeries::zero());
                }
                if c[0].is_zero() {
                    return Err(Error::Parse("leading coefficient must be nonzero".into()));
                }
                let n = prec.unwrap_or(self.prec);
                if n < c.len() {
                    c.truncate(n.max(1));
                } else {
                    c.resize(n, self.ctx.zero());
                }
                LaurentSeries::new(*val, c)
            }
        }
    }
}

/// JSON form of a series: the text sugar or `{"val", "coeffs", "prec"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesRepr {
    Text(String),
    Object {
        val: i64,
        coeffs: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prec: Option<usize>,
    },
}

impl fmt::Display for SeriesRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesRepr::Text(t) => write!(f, "{t}"),
            SeriesRepr::Object { val, coeffs, prec } => {
                write!(f, "{{val: {val}, coeffs: {coeffs:?}, prec: {prec:?}}}")
            }
        }
    }
}

fn parse_z_power(s: &str) -> Option<i64> {
    let s = s.trim();
    let rest = s.strip_prefix('z')?.trim();
    if rest.is_empty() {
        return Some(1);
    }
    let e = rest.strip_prefix('^')?.trim();
    let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
    e.parse().ok()
}

/// Splits on top-level `+`, leaving `L1:[..]` brackets intact.
fn split_terms(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldCtx {
        FieldCtx::new(7, 3).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 8);
        let s = k.from_ints(-2, &[3, 1]);
        assert_eq!(s.valuation().unwrap(), -2);
        let a = k.from_ints(1, &[2, 5]);
        let b = k.from_ints(-4, &[1, 1, 1]);
        assert_eq!(k.mul(&a, &b).valuation().unwrap(), -3);
        assert_eq!(k.one().valuation().unwrap(), 0);
        assert_eq!(LaurentSeries::zero().valuation(), Err(Error::ZeroValuation));
    }

    #[test]
    fn geometric_inverse() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 4);
        let s = k.from_ints(0, &[1, 1]);
        let inv = k.inv(&s).unwrap();
        assert_eq!(inv, k.from_ints(0, &[1, 6, 1, 6]));
        assert!(k.mul(&inv, &s).agrees(&k.one()));
        assert_eq!(k.inv(&LaurentSeries::zero()), Err(Error::ZeroInverse));
    }

    #[test]
    fn cancellation_rules() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 4);
        let s = k.from_ints(-1, &[2, 3, 4]);
        assert!(k.add(&s, &k.neg(&s)).unwrap().is_zero());
        // a window agreeing only up to the shorter precision is not an exact negative
        let short = s.truncate(2);
        assert_eq!(k.add(&short, &k.neg(&s)), Err(Error::PrecisionExhausted));
        // partial cancellation consumes precision
        let t = k.from_ints(-1, &[5, 0, 1]);
        let sum = k.add(&s, &t).unwrap();
        assert_eq!(sum.valuation().unwrap(), 0);
        assert_eq!(sum.prec(), 3);
        assert_eq!(k.mul(&k.z(), &k.inv(&k.z()).unwrap()), k.one());
    }

    #[test]
    fn valuation_of_sum() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 6);
        let a = k.from_ints(1, &[3, 1]);
        let b = k.from_ints(3, &[2]);
        assert_eq!(k.add(&a, &b).unwrap().valuation().unwrap(), 1);
    }

    #[test]
    fn hensel_cube_root_of_one_plus_z() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 3);
        let u = k.from_ints(0, &[1, 1]);
        // undetermined coefficients: (1 + a z + b z^2)^3 = 1 + 3a z + (3b + 3a^2) z^2
        let mut sols = Vec::new();
        for a in 0..7i64 {
            for b in 0..7i64 {
                if (3 * a) % 7 == 1 && (3 * b + 3 * a * a) % 7 == 0 {
                    sols.push((a, b));
                }
            }
        }
        assert_eq!(sols, vec![(5, 3)]);
        let r = k.hensel_pth_root(&u).unwrap();
        assert_eq!(r, k.from_ints(0, &[1, 5, 3]));
        assert!(k.pow(&r, 3).unwrap().agrees(&u));
        assert_eq!(k.hensel_pth_root(&k.one()).unwrap(), k.one());
    }

    #[test]
    fn hensel_root_extends_tower() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 6);
        let u = k.from_ints(0, &[2, 1]);
        let r = k.hensel_pth_root(&u).unwrap();
        assert_eq!(r.leading().unwrap().level(), 1);
        assert_eq!(ctx.rel_degree(1), 3);
        assert!(k.pow(&r, 3).unwrap().agrees(&u));
    }

    #[test]
    fn hensel_rejects_non_units() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 4);
        assert_eq!(k.hensel_pth_root(&k.z()), Err(Error::NotAUnit(1)));
        assert_eq!(k.pth_root(&k.z()), Err(Error::NotAPower { root: 3, val: 1 }));
        let cube = k.pow(&k.from_ints(1, &[2, 1]), 3).unwrap();
        let r = k.pth_root(&cube).unwrap();
        assert_eq!(r.valuation().unwrap(), 1);
        assert!(k.pow(&r, 3).unwrap().agrees(&cube));
    }

    #[test]
    fn text_sugar() {
        let ctx = f7();
        let k = LocalField::new(&ctx, 2);
        let s = k.parse("z^-2*(3 + 1*z)").unwrap();
        assert_eq!(s, k.from_ints(-2, &[3, 1]));
        assert_eq!(k.format(&s), "z^-2*(3 + 1*z)");
        assert_eq!(k.parse("z^2*(1 + 1*z)").unwrap(), k.from_ints(2, &[1, 1]));
        assert_eq!(k.parse("1").unwrap(), k.one());
        assert_eq!(k.parse("z").unwrap(), k.z());
        assert!(k.parse("0").unwrap().is_zero());
        let json = r#"{"val": -2, "coeffs": ["L0:[3]", "L0:[1]"], "prec": 2}"#;
        let repr: SeriesRepr = serde_json::from_str(json).unwrap();
        assert_eq!(k.from_repr(&repr).unwrap(), s);
        assert_eq!(k.from_repr(&k.to_repr(&s)).unwrap(), s);
    }
}
