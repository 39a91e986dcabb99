//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] is a sparse map from exponent to nonzero coefficient together
//! with a precision `P`: the series is known modulo `O(q^P)`. Every stored
//! exponent is strictly below `P`. Operations propagate precision so that no
//! coefficient is ever reported beyond what the inputs determine.
//!
//! Multiplication and inversion run on dense integer numerators over a common
//! denominator; the rational normal form is restored once per output
//! coefficient.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact coefficient. `BigRational` keeps lowest terms with a positive denominator.
pub type Coeff = BigRational;

pub fn coeff_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn coeff_frac(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn exp_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("q-exponent overflow")
}

fn exp_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("q-exponent overflow")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: BTreeMap<i64, Coeff>,
    prec: i64,
}

impl QSeries {
    pub fn zero(prec: i64) -> Self {
        QSeries {
            coeffs: BTreeMap::new(),
            prec,
        }
    }

    pub fn one(prec: i64) -> Self {
        Self::monomial(0, Coeff::one(), prec)
    }

    pub fn monomial(exp: i64, c: Coeff, prec: i64) -> Self {
        Self::from_terms([(exp, c)], prec)
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents
    /// are summed, zeros and exponents at or beyond `prec` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (i64, Coeff)>>(terms: I, prec: i64) -> Self {
        let mut coeffs: BTreeMap<i64, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            if e >= prec || c.is_zero() {
                continue;
            }
            let slot = coeffs.entry(e).or_insert_with(Coeff::zero);
            *slot += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        QSeries { coeffs, prec }
    }

    pub fn from_int_terms(terms: &[(i64, i64)], prec: i64) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, coeff_int(c))), prec)
    }

    /// Dense integer numerators starting at `start`, all over `denom`.
    fn from_dense(start: i64, nums: Vec<BigInt>, denom: &BigInt, prec: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, n) in nums.into_iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let e = exp_add(start, i as i64);
            if e >= prec {
                break;
            }
            coeffs.insert(e, BigRational::new(n, denom.clone()));
        }
        QSeries { coeffs, prec }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when no coefficient below the precision is nonzero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn valuation(&self) -> Result<i64> {
        self.valuation_opt().ok_or(Error::EmptyValuation)
    }

    pub fn valuation_opt(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Coefficient of `q^n`; an error when `n` is at or beyond the precision.
    pub fn coeff(&self, n: i64) -> Result<Coeff> {
        if n >= self.prec {
            return Err(Error::NotDetermined {
                exponent: n,
                prec: self.prec,
            });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(Coeff::zero))
    }

    /// Stored coefficient without the precision guard.
    pub fn get(&self, n: i64) -> Option<&Coeff> {
        self.coeffs.get(&n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Coeff)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// Terms with exponent `< bound`.
    pub fn terms_below(&self, bound: i64) -> impl Iterator<Item = (i64, &Coeff)> + '_ {
        self.coeffs.range(..bound).map(|(&e, c)| (e, c))
    }

    pub fn truncate(&self, prec: i64) -> QSeries {
        let prec = prec.min(self.prec);
        QSeries {
            coeffs: self
                .coeffs
                .range(..prec)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            prec,
        }
    }

    pub fn scale(&self, c: &Coeff) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.prec);
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect(),
            prec: self.prec,
        }
    }

    pub fn scale_int(&self, c: i64) -> QSeries {
        self.scale(&coeff_int(c))
    }

    /// Multiplication by `q^shift`.
    pub fn shift(&self, shift: i64) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (exp_add(e, shift), c.clone()))
                .collect(),
            prec: exp_add(self.prec, shift),
        }
    }

    /// Substitution `q -> q^d` for `d >= 1`.
    pub fn rescale(&self, d: i64) -> QSeries {
        assert!(d >= 1, "rescale factor must be positive");
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (exp_mul(e, d), c.clone()))
                .collect(),
            prec: exp_mul(self.prec, d),
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let prec = self.prec.min(other.prec);
        let mut coeffs: BTreeMap<i64, Coeff> = self
            .coeffs
            .range(..prec)
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        for (&e, c) in other.coeffs.range(..prec) {
            let slot = coeffs.entry(e).or_insert_with(Coeff::zero);
            *slot += c;
            if slot.is_zero() {
                coeffs.remove(&e);
            }
        }
        QSeries { coeffs, prec }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
            prec: self.prec,
        }
    }

    /// `self + c * other`, the row operation used by every elimination.
    pub fn add_scaled(&self, c: &Coeff, other: &QSeries) -> QSeries {
        if c.is_zero() {
            return self.truncate(other.prec);
        }
        let prec = self.prec.min(other.prec);
        let mut coeffs: BTreeMap<i64, Coeff> = self
            .coeffs
            .range(..prec)
            .map(|(&e, x)| (e, x.clone()))
            .collect();
        for (&e, x) in other.coeffs.range(..prec) {
            let slot = coeffs.entry(e).or_insert_with(Coeff::zero);
            *slot += c * x;
            if slot.is_zero() {
                coeffs.remove(&e);
            }
        }
        QSeries { coeffs, prec }
    }

    /// Common denominator and integer numerators for exponents `start..start+len`
    /// (clipped to the precision).
    fn integer_window(&self, start: i64, len: usize) -> (Vec<BigInt>, BigInt) {
        let end = exp_add(start, len as i64).min(self.prec);
        let mut denom = BigInt::one();
        for c in self.coeffs.range(start..end).map(|(_, c)| c) {
            if !c.denom().is_one() {
                denom = denom.lcm(c.denom());
            }
        }
        let n = (end - start).max(0) as usize;
        let mut nums = vec![BigInt::zero(); n];
        for (&e, c) in self.coeffs.range(start..end) {
            let scaled = if denom.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&denom / c.denom())
            };
            nums[(e - start) as usize] = scaled;
        }
        (nums, denom)
    }

    /// Cauchy product. Result precision is `min(a.prec + val(b), b.prec + val(a))`,
    /// with the precision standing in for the valuation of an empty series.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let va = self.valuation_opt().unwrap_or(self.prec);
        let vb = other.valuation_opt().unwrap_or(other.prec);
        let prec = exp_add(self.prec, vb).min(exp_add(other.prec, va));
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(prec);
        }
        let lo = exp_add(va, vb);
        if prec <= lo {
            return QSeries::zero(prec);
        }
        let len = (prec - lo) as usize;
        let (an, ad) = self.integer_window(va, len);
        let (bn, bd) = other.integer_window(vb, len);
        let mut acc = vec![BigInt::zero(); len];
        for (i, x) in an.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bn.iter().enumerate().take(len - i) {
                if y.is_zero() {
                    continue;
                }
                acc[i + j] += x * y;
            }
        }
        QSeries::from_dense(lo, acc, &(ad * bd), prec)
    }

    /// Formal inverse. The result has valuation `-val(self)` and precision
    /// `min(prec, self.prec - 2 val(self))`.
    pub fn invert(&self, prec: i64) -> Result<QSeries> {
        let v = self.valuation_opt().ok_or(Error::InvertZero)?;
        let out_prec = prec.min(exp_add(self.prec, -2 * v));
        let start = -v;
        if out_prec <= start {
            return Ok(QSeries::zero(out_prec));
        }
        let n = (out_prec - start) as usize;
        let (u, d) = self.integer_window(v, n);
        let u0 = u[0].clone();
        // Integer recurrence: b_k = B_k / u0^(k+1), B_k = -sum_{i=1..k} u_i B_{k-i} u0^(i-1).
        let mut u0_pows = Vec::with_capacity(n + 1);
        u0_pows.push(BigInt::one());
        for i in 1..=n {
            let next = &u0_pows[i - 1] * &u0;
            u0_pows.push(next);
        }
        let mut big_b: Vec<BigInt> = Vec::with_capacity(n);
        big_b.push(BigInt::one());
        for k in 1..n {
            let mut acc = BigInt::zero();
            for i in 1..=k.min(u.len() - 1) {
                if u[i].is_zero() {
                    continue;
                }
                acc += &u[i] * &big_b[k - i] * &u0_pows[i - 1];
            }
            big_b.push(-acc);
        }
        let coeffs = big_b
            .into_iter()
            .enumerate()
            .filter(|(_, b)| !b.is_zero())
            .map(|(k, b)| {
                let e = start + k as i64;
                (e, BigRational::new(b * &d, u0_pows[k + 1].clone()))
            })
            .collect();
        Ok(QSeries {
            coeffs,
            prec: out_prec,
        })
    }

    /// Integer power; negative exponents go through [`QSeries::invert`].
    pub fn pow(&self, n: i64) -> Result<QSeries> {
        if n == 0 {
            let rel = match self.valuation_opt() {
                Some(v) => self.prec - v,
                None => self.prec,
            };
            return Ok(QSeries::one(rel));
        }
        let base = if n < 0 {
            let v = self.valuation_opt().ok_or(Error::InvertZero)?;
            self.invert(exp_add(self.prec, -2 * v))?
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut result: Option<QSeries> = None;
        let mut square = base;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => square.clone(),
                    Some(r) => r.mul(&square),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            square = square.mul(&square);
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// `D = q d/dq`.
    pub fn derive(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&e, _)| e != 0)
                .map(|(&e, c)| (e, c * coeff_int(e)))
                .collect(),
            prec: self.prec,
        }
    }

    /// Compares all coefficients below the smaller precision; returns the verdict
    /// and the precision used.
    pub fn eq_to_prec(&self, other: &QSeries) -> (bool, i64) {
        let p = self.prec.min(other.prec);
        let a = self.coeffs.range(..p);
        let b = other.coeffs.range(..p);
        (a.eq(b), p)
    }

    /// Evaluates a polynomial `sum c_i x^i` (ascending coefficients) at this series.
    pub fn eval_poly(&self, poly: &[i64], prec: i64) -> QSeries {
        let mut acc = QSeries::zero(prec);
        for &c in poly.iter().rev() {
            acc = acc.mul(self).add(&QSeries::monomial(0, coeff_int(c), prec));
        }
        if poly.is_empty() {
            return QSeries::zero(prec);
        }
        acc.truncate(prec)
    }

    /// Parses the text form; without an `O(q^P)` term the precision is one past
    /// the largest printed exponent.
    pub fn parse(text: &str) -> Result<QSeries> {
        text.parse()
    }
}

/// Runs `compute` at increasing working precision until its result is known
/// to `target`, then truncates to `target`.
pub fn eval_to_prec<F>(target: i64, extra: i64, mut compute: F) -> Result<QSeries>
where
    F: FnMut(i64) -> Result<QSeries>,
{
    let mut wp = target + extra.max(0);
    for _ in 0..8 {
        let s = compute(wp)?;
        if s.prec() >= target {
            return Ok(s.truncate(target));
        }
        wp += (target - s.prec()) + 8;
    }
    Err(Error::Internal(format!(
        "working precision {wp} still short of {target}"
    )))
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

fn fmt_coeff(c: &Coeff) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&e, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match e {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{}", fmt_coeff(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_coeff(&mag))?;
            }
        }
        if first {
            write!(f, "O(q^{})", self.prec)
        } else {
            write!(f, " + O(q^{})", self.prec)
        }
    }
}

fn parse_coeff(s: &str) -> Result<Coeff> {
    let bad = || Error::Parse(format!("bad coefficient '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl FromStr for QSeries {
    type Err = Error;

    fn from_str(text: &str) -> Result<QSeries> {
        let cleaned: String = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
            .collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        // Split into signed terms, keeping a '-' that follows '^' inside the exponent.
        let bytes: Vec<char> = cleaned.chars().collect();
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut depth = 0;
        for (i, &ch) in bytes.iter().enumerate() {
            let prev = if i > 0 { Some(bytes[i - 1]) } else { None };
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 && prev != Some('^') => {
                    if !cur.is_empty() {
                        pieces.push((neg, std::mem::take(&mut cur)));
                    } else if i > 0 {
                        return Err(Error::Parse(format!("dangling sign in '{text}'")));
                    }
                    neg = ch == '-';
                }
                _ => cur.push(ch),
            }
        }
        if cur.is_empty() {
            return Err(Error::Parse(format!("trailing sign in '{text}'")));
        }
        pieces.push((neg, cur));

        let mut terms = Vec::new();
        let mut prec: Option<i64> = None;
        for (neg, body) in pieces {
            if let Some(inner) = body.strip_prefix("O(").and_then(|b| b.strip_suffix(')')) {
                let p = match inner.strip_prefix("q^") {
                    Some(p) => p
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad precision '{body}'")))?,
                    None if inner == "q" => 1,
                    None => return Err(Error::Parse(format!("bad precision '{body}'"))),
                };
                prec = Some(p);
                continue;
            }
            let (coeff_part, exp) = match body.find('q') {
                None => (body.as_str(), 0),
                Some(pos) => {
                    let (c, rest) = body.split_at(pos);
                    let rest = &rest[1..];
                    let exp = if rest.is_empty() {
                        1
                    } else if let Some(x) = rest.strip_prefix('^') {
                        x.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad exponent in '{body}'")))?
                    } else {
                        return Err(Error::Parse(format!("bad term '{body}'")));
                    };
                    (c.strip_suffix('*').unwrap_or(c), exp)
                }
            };
            let mut c = if coeff_part.is_empty() {
                Coeff::one()
            } else {
                parse_coeff(coeff_part)?
            };
            if neg {
                c = -c;
            }
            terms.push((exp, c));
        }
        let prec = match prec {
            Some(p) => p,
            None => terms
                .iter()
                .map(|(e, _)| e + 1)
                .max()
                .ok_or_else(|| Error::Parse("no terms".into()))?,
        };
        if let Some((e, _)) = terms.iter().find(|(e, _)| *e >= prec) {
            return Err(Error::Parse(format!(
                "term q^{e} at or beyond precision O(q^{prec})"
            )));
        }
        Ok(QSeries::from_terms(terms, prec))
    }
}

/// Wire form: `{"prec": P, "coeffs": [[e, "num/den"], ...]}` with ascending exponents.
#[derive(Serialize, Deserialize)]
struct SeriesWire {
    prec: i64,
    coeffs: Vec<(i64, String)>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesWire {
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, fmt_coeff(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = SeriesWire::deserialize(d)?;
        let mut terms = Vec::with_capacity(wire.coeffs.len());
        for (e, c) in wire.coeffs {
            if e >= wire.prec {
                return Err(serde::de::Error::custom(format!(
                    "exponent {e} at or beyond precision {}",
                    wire.prec
                )));
            }
            terms.push((e, parse_coeff(&c).map_err(serde::de::Error::custom)?));
        }
        Ok(QSeries::from_terms(terms, wire.prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> QSeries {
        text.parse().unwrap()
    }

    /// Independent oracle: dense `i64` convolution over `[lo, prec)`.
    fn dense_mul(a: &[(i64, i64)], pa: i64, b: &[(i64, i64)], pb: i64) -> QSeries {
        let va = a.iter().filter(|t| t.1 != 0).map(|t| t.0).min().unwrap_or(pa);
        let vb = b.iter().filter(|t| t.1 != 0).map(|t| t.0).min().unwrap_or(pb);
        let prec = (pa + vb).min(pb + va);
        let mut out = std::collections::HashMap::new();
        for &(ea, ca) in a {
            for &(eb, cb) in b {
                if ea + eb < prec {
                    *out.entry(ea + eb).or_insert(0i64) += ca * cb;
                }
            }
        }
        let terms: Vec<(i64, i64)> = out.into_iter().collect();
        QSeries::from_int_terms(&terms, prec)
    }

    #[test]
    fn add_identity_and_precision() {
        let a = s("q^-1 + 2*q + O(q^10)");
        assert_eq!(a.add(&QSeries::zero(10)), a);
        let b = s("1 + q + O(q^5)").add(&s("-1 + q + O(q^3)"));
        assert_eq!(b, s("2*q + O(q^3)"));
        let c = s("q^-2 + 3 + O(q^4)").add(&s("q^-2 - 3 + O(q^4)"));
        assert_eq!(c, s("2*q^-2 + O(q^4)"));
        assert_eq!(
            c,
            dense_mul(&[(-2, 1), (0, 3)], 4, &[(0, 1)], 100).add(&dense_mul(
                &[(-2, 1), (0, -3)],
                4,
                &[(0, 1)],
                100
            ))
        );
    }

    #[test]
    fn mul_examples() {
        let f = s("q^-1 + 7 + 2*q^3 + O(q^8)");
        assert_eq!(f.mul(&QSeries::one(20)), f);
        let p = s("q^-1 + 2 + O(q^10)").mul(&s("q + 3 + O(q^10)"));
        let oracle = dense_mul(&[(-1, 1), (0, 2)], 10, &[(1, 1), (0, 3)], 10);
        assert_eq!(p, oracle);
        assert_eq!(p.truncate(2), s("3*q^-1 + 7 + 2*q + O(q^2)"));
        let geo = QSeries::from_int_terms(&(0..10).map(|n| (n, 1)).collect::<Vec<_>>(), 10);
        assert_eq!(s("1 - q + O(q^20)").mul(&geo), QSeries::one(10));
    }

    #[test]
    fn mul_precision_rule() {
        let a = s("q^-2 + 1 + O(q^5)");
        let b = s("q^3 + O(q^9)");
        // min(5 + 3, 9 - 2) = 7
        assert_eq!(a.mul(&b).prec(), 7);
        assert_eq!(QSeries::zero(4).mul(&b).prec(), 7);
    }

    #[test]
    fn invert_examples() {
        let inv = s("1 - q + O(q^50)").invert(5).unwrap();
        assert_eq!(inv, s("1 + q + q^2 + q^3 + q^4 + O(q^5)"));
        assert_eq!(s("q + O(q^50)").invert(5).unwrap(), s("q^-1 + O(q^5)"));
        let f4 = s("q + 8*q^2 + 28*q^3 + 64*q^4 + O(q^5)");
        let inv = f4.invert(100).unwrap();
        assert_eq!(inv.valuation().unwrap(), -1);
        let prod = inv.mul(&f4);
        assert_eq!(prod.prec(), 4);
        assert_eq!(prod, QSeries::one(4));
        assert_eq!(QSeries::zero(5).invert(5), Err(Error::InvertZero));
    }

    #[test]
    fn invert_rational_leading() {
        let a = s("3*q^2 + 1/2*q^3 - 5*q^4 + O(q^12)");
        let inv = a.invert(40).unwrap();
        let (eq, p) = a.mul(&inv).eq_to_prec(&QSeries::one(100));
        assert!(eq);
        assert_eq!(p, 12 - 2);
    }

    #[test]
    fn pow_examples() {
        assert_eq!(s("1 + q + O(q^6)").pow(0).unwrap(), QSeries::one(6));
        assert_eq!(s("q^-1 + O(q^6)").pow(3).unwrap().truncate(0), s("q^-3 + O(q^0)"));
        assert_eq!(
            s("1 + q + O(q^3)").pow(2).unwrap(),
            s("1 + 2*q + q^2 + O(q^3)")
        );
        assert_eq!(
            s("1 - q + O(q^8)").pow(-1).unwrap(),
            s("1 + q + q^2 + q^3 + q^4 + q^5 + q^6 + q^7 + O(q^8)")
        );
        assert_eq!(QSeries::zero(5).pow(-2), Err(Error::InvertZero));
    }

    #[test]
    fn derive_examples() {
        assert!(s("7 + O(q^5)").derive().is_zero());
        assert_eq!(
            s("q^-1 + 5 + 7*q^3 + O(q^6)").derive(),
            s("-q^-1 + 21*q^3 + O(q^6)")
        );
        assert_eq!(s("q^2 + O(q^6)").derive().derive(), s("4*q^2 + O(q^6)"));
    }

    #[test]
    fn coeff_guard() {
        let f = s("q^-1 + 196884*q + O(q^2)");
        assert_eq!(f.coeff(1).unwrap(), coeff_int(196884));
        assert!(matches!(f.coeff(2), Err(Error::NotDetermined { .. })));
        assert_eq!(s("q^-1 + O(q^4)").coeff(0).unwrap(), coeff_int(0));
    }

    #[test]
    fn accessors() {
        assert_eq!(s("q^-3 + q + O(q^4)").valuation().unwrap(), -3);
        assert_eq!(QSeries::zero(3).valuation(), Err(Error::EmptyValuation));
        assert_eq!(s("1 + q + q^5 + O(q^9)").truncate(3), s("1 + q + O(q^3)"));
        let (eq, p) = s("q^-1 + O(q^7)")
            .scale_int(-1)
            .eq_to_prec(&s("-q^-1 + O(q^9)"));
        assert!(eq);
        assert_eq!(p, 7);
    }

    #[test]
    fn text_round_trip() {
        let f = s("q^-2 + 8*q^-1 - 224 + 2144*q + O(q^60)");
        assert_eq!(f.to_string(), "q^-2 + 8*q^-1 - 224 + 2144*q + O(q^60)");
        let g = s("-1/3 + 168*q - 5/2*q^4 + O(q^5)");
        assert_eq!(g.to_string().parse::<QSeries>().unwrap(), g);
        assert_eq!(s("196884q + q^{-1}").prec(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = s("q^-1 - 7/2 + 196884*q + O(q^10)");
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"prec":10,"coeffs":[[-1,"1"],[0,"-7/2"],[1,"196884"]]}"#);
        let back: QSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rescale_and_shift() {
        let f = s("1 + 2*q + O(q^3)");
        assert_eq!(f.rescale(4), s("1 + 2*q^4 + O(q^12)"));
        assert_eq!(f.shift(-2), s("q^-2 + 2*q^-1 + O(q^1)"));
    }
}
