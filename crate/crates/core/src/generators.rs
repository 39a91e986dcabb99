//! Classical building blocks: eta quotients, Eisenstein series, the weight-2
//! combinations `phi_N`, level-one forms and the Serre derivative.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qseries::{coeff_frac, Coeff, QSeries};

/// Memo of series keyed by `K`; a stored entry serves any request at or below
/// its precision.
pub(crate) struct SeriesCache<K> {
    map: RwLock<HashMap<K, QSeries>>,
}

impl<K: Eq + Hash + Clone> SeriesCache<K> {
    pub(crate) fn new() -> Self {
        SeriesCache {
            map: RwLock::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_try<F>(&self, key: &K, prec: i64, compute: F) -> Result<QSeries>
    where
        F: FnOnce(i64) -> Result<QSeries>,
    {
        if let Some(s) = self.map.read().expect("cache poisoned").get(key) {
            if s.prec() >= prec {
                return Ok(s.truncate(prec));
            }
        }
        let fresh = compute(prec)?;
        let mut w = self.map.write().expect("cache poisoned");
        let keep = match w.get(key) {
            Some(old) => old.prec() < fresh.prec(),
            None => true,
        };
        if keep {
            w.insert(key.clone(), fresh.clone());
        }
        Ok(fresh.truncate(prec))
    }
}

/// `sum_{d | n} d^r`.
pub fn sigma(r: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma needs n >= 1");
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    total
}

/// `prod_{n >= 1} (1 - q^n)` by the pentagonal number theorem.
fn euler_product(prec: i64) -> QSeries {
    let mut terms = vec![(0i64, 1i64)];
    let mut k = 1i64;
    loop {
        let a = k * (3 * k - 1) / 2;
        if a >= prec {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        terms.push((a, sign));
        let b = k * (3 * k + 1) / 2;
        if b < prec {
            terms.push((b, sign));
        }
        k += 1;
    }
    QSeries::from_int_terms(&terms, prec)
}

fn euler_power(r: i64, prec: i64) -> Result<QSeries> {
    static CACHE: OnceLock<SeriesCache<i64>> = OnceLock::new();
    CACHE
        .get_or_init(SeriesCache::new)
        .get_or_try(&r, prec, |p| euler_product(p).pow(r))
}

/// `prod_d eta(d z)^{r_d}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    exps: BTreeMap<u32, i64>,
}

impl EtaQuotient {
    pub fn new(parts: &[(u32, i64)]) -> Self {
        let mut exps = BTreeMap::new();
        for &(d, r) in parts {
            assert!(d >= 1, "eta argument scale must be positive");
            *exps.entry(d).or_insert(0) += r;
        }
        exps.retain(|_, r| *r != 0);
        EtaQuotient { exps }
    }

    pub fn exps(&self) -> &BTreeMap<u32, i64> {
        &self.exps
    }

    /// Twice the weight, `sum r_d`.
    pub fn twice_weight(&self) -> i64 {
        self.exps.values().sum()
    }

    /// `sum d r_d`, i.e. 24 times the leading exponent.
    pub fn order_numerator(&self) -> i64 {
        self.exps.iter().map(|(&d, &r)| d as i64 * r).sum()
    }

    pub fn leading_exponent(&self) -> Result<i64> {
        let n = self.order_numerator();
        if n % 24 != 0 {
            return Err(Error::FractionalLeadingExponent {
                quotient: self.to_string(),
                numerator: n,
            });
        }
        Ok(n / 24)
    }

    pub fn expand(&self, prec: i64) -> Result<QSeries> {
        let lead = self.leading_exponent()?;
        let rel = prec - lead;
        if rel <= 0 {
            return Ok(QSeries::zero(prec));
        }
        let mut acc = QSeries::one(rel);
        for (&d, &r) in &self.exps {
            let d = d as i64;
            let base = (rel + d - 1) / d;
            acc = acc.mul(&euler_power(r, base)?.rescale(d));
        }
        Ok(acc.truncate(rel).shift(lead))
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(d, r)| format!("eta({d})^{r}"))
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(EtaQuotient::new(&[]));
        }
        let mut parts = Vec::new();
        for piece in s.split('*') {
            let piece: String = piece.chars().filter(|c| !c.is_whitespace()).collect();
            let bad = || Error::Parse(format!("bad eta factor '{piece}'"));
            let rest = piece.strip_prefix("eta(").ok_or_else(bad)?;
            let (d, rest) = rest.split_once(')').ok_or_else(bad)?;
            let d: u32 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            let r: i64 = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?
            };
            parts.push((d, r));
        }
        Ok(EtaQuotient::new(&parts))
    }
}

impl Serialize for EtaQuotient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EtaQuotient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// `-2w / B_w` for the supported weights.
fn eisenstein_constant(weight: i64) -> Result<i64> {
    Ok(match weight {
        2 => -24,
        4 => 240,
        6 => -504,
        8 => 480,
        10 => -264,
        14 => -24,
        _ => return Err(Error::UnsupportedWeight(weight)),
    })
}

fn eisenstein_level_one(weight: i64, prec: i64) -> Result<QSeries> {
    static CACHE: OnceLock<SeriesCache<i64>> = OnceLock::new();
    let c = eisenstein_constant(weight)?;
    CACHE.get_or_init(SeriesCache::new).get_or_try(&weight, prec, |p| {
        let r = (weight - 1) as u32;
        let mut terms = vec![(0, Coeff::one())];
        for n in 1..p.max(1) {
            terms.push((n, BigRational::from_integer(sigma(r, n as u64) * c)));
        }
        Ok(QSeries::from_terms(terms, p))
    })
}

/// `E_w(d z)` normalized with constant term 1.
pub fn eisenstein(weight: i64, d: i64, prec: i64) -> Result<QSeries> {
    if d < 1 {
        return Err(Error::Invalid(format!("Eisenstein scaling {d} must be positive")));
    }
    let base = (prec + d - 1) / d;
    Ok(eisenstein_level_one(weight, base)?.rescale(d).truncate(prec))
}

/// `(N E_2(N z) - E_2(z)) / (N - 1)`.
pub fn phi(n: i64, prec: i64) -> Result<QSeries> {
    if n < 2 {
        return Err(Error::Invalid(format!("phi needs N >= 2, got {n}")));
    }
    let e2 = eisenstein(2, 1, prec)?;
    let e2n = eisenstein(2, n, prec)?;
    Ok(e2n
        .scale_int(n)
        .sub(&e2)
        .scale(&coeff_frac(1, n - 1)))
}

/// `(E_4^3 - E_6^2) / 1728`.
pub fn delta(prec: i64) -> Result<QSeries> {
    let e4 = eisenstein(4, 1, prec)?;
    let e6 = eisenstein(6, 1, prec)?;
    let num = e4.pow(3)?.sub(&e6.mul(&e6));
    Ok(num.scale(&coeff_frac(1, 1728)))
}

/// `E_4^3 / Delta`.
pub fn j_function(prec: i64) -> Result<QSeries> {
    let d = delta(prec + 2)?;
    let e4 = eisenstein(4, 1, prec + 1)?;
    Ok(e4.pow(3)?.mul(&d.invert(prec)?).truncate(prec))
}

/// Level-one holomorphic form of weight `kp` with constant term 1:
/// `E_0 = 1`, `E_8 = E_4^2`, `E_10 = E_4 E_6`, `E_14 = E_4^2 E_6`.
pub fn level_one_form(kp: i64, prec: i64) -> Result<QSeries> {
    let e4 = || eisenstein(4, 1, prec);
    let e6 = || eisenstein(6, 1, prec);
    match kp {
        0 => Ok(QSeries::one(prec)),
        4 => e4(),
        6 => e6(),
        8 => Ok(e4()?.pow(2)?),
        10 => Ok(e4()?.mul(&e6()?)),
        14 => Ok(e4()?.pow(2)?.mul(&e6()?)),
        _ => Err(Error::UnsupportedWeight(kp)),
    }
}

/// `theta_k f = D f - (k/12) E_2 f`, truncated to `min(prec, f.prec)`.
pub fn serre_derivative(f: &QSeries, k: i64, prec: i64) -> Result<QSeries> {
    let df = f.derive();
    if k == 0 || f.is_zero() {
        return Ok(df.truncate(prec));
    }
    let v = f.valuation()?;
    let e2 = eisenstein(2, 1, f.prec() - v)?;
    let corr = e2.mul(f).scale(&coeff_frac(k, 12));
    Ok(df.sub(&corr).truncate(prec))
}

/// Integer coefficient convenience for tests and data tables.
pub fn int_coeff(c: &Coeff) -> Option<i64> {
    if c.is_integer() {
        c.numer().try_into().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> QSeries {
        t.parse().unwrap()
    }

    fn brute_sigma(r: u32, n: u64) -> BigInt {
        (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(r)).sum()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 1), BigInt::from(1));
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        for n in 1..200 {
            assert_eq!(sigma(5, n), brute_sigma(5, n));
        }
    }

    #[test]
    fn eisenstein_prefixes() {
        assert_eq!(eisenstein(2, 1, 4).unwrap(), s("1 - 24*q - 72*q^2 - 96*q^3 + O(q^4)"));
        let f4 = eisenstein(4, 1, 5)
            .unwrap()
            .sub(&eisenstein(4, 2, 5).unwrap())
            .scale(&coeff_frac(1, 240));
        assert_eq!(f4, s("q + 8*q^2 + 28*q^3 + 64*q^4 + O(q^5)"));
        let f2 = phi(3, 5).unwrap();
        let f4 = eisenstein(4, 1, 5)
            .unwrap()
            .sub(&f2.mul(&f2))
            .scale(&coeff_frac(1, 216));
        assert_eq!(f4, s("q + 9*q^2 + 27*q^3 + 73*q^4 + O(q^5)"));
        assert!(eisenstein(12, 1, 5).is_err());
    }

    #[test]
    fn eisenstein_coefficients_are_divisor_sums() {
        for (w, c) in [(4i64, 240i64), (6, -504), (10, -264)] {
            let e = eisenstein(w, 1, 51).unwrap();
            for n in 1..=50 {
                assert_eq!(
                    e.coeff(n).unwrap(),
                    BigRational::from_integer(brute_sigma((w - 1) as u32, n as u64) * c)
                );
            }
        }
    }

    #[test]
    fn phi_prefixes() {
        assert_eq!(phi(5, 5).unwrap(), s("1 + 6*q + 18*q^2 + 24*q^3 + 42*q^4 + O(q^5)"));
        assert_eq!(phi(2, 5).unwrap(), s("1 + 24*q + 24*q^2 + 96*q^3 + 24*q^4 + O(q^5)"));
        assert_eq!(phi(13, 5).unwrap(), s("1 + 2*q + 6*q^2 + 8*q^3 + 14*q^4 + O(q^5)"));
    }

    #[test]
    fn eta_quotient_prefixes() {
        let q2: EtaQuotient = "eta(1)^24 * eta(2)^-24".parse().unwrap();
        assert_eq!(q2.expand(3).unwrap(), s("q^-1 - 24 + 276*q - 2048*q^2 + O(q^3)"));
        let f4 = EtaQuotient::new(&[(5, 10), (1, -2)]);
        assert_eq!(f4.leading_exponent().unwrap(), 2);
        assert_eq!(
            f4.expand(7).unwrap(),
            s("q^2 + 2*q^3 + 5*q^4 + 10*q^5 + 20*q^6 + O(q^7)")
        );
        let f16 = EtaQuotient::new(&[(16, 8), (8, -4)]);
        assert_eq!(f16.expand(21).unwrap(), s("q^4 + 4*q^12 + 6*q^20 + O(q^21)"));
        let bad = EtaQuotient::new(&[(1, 1)]);
        assert!(matches!(bad.expand(5), Err(Error::FractionalLeadingExponent { .. })));
    }

    #[test]
    fn eta_text_round_trip() {
        let e: EtaQuotient = "eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8".parse().unwrap();
        assert_eq!(e.to_string(), "eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8");
        assert_eq!(e.twice_weight(), 0);
        assert_eq!(e.leading_exponent().unwrap(), -1);
    }

    #[test]
    fn delta_matches_eta_power() {
        let via_eta = EtaQuotient::new(&[(1, 24)]).expand(40).unwrap();
        assert_eq!(delta(40).unwrap(), via_eta);
        assert_eq!(delta(4).unwrap(), s("q - 24*q^2 + 252*q^3 + O(q^4)"));
    }

    #[test]
    fn j_prefix() {
        assert_eq!(
            j_function(3).unwrap(),
            s("q^-1 + 744 + 196884*q + 21493760*q^2 + O(q^3)")
        );
    }

    #[test]
    fn e8_is_e4_squared() {
        let e8 = eisenstein(8, 1, 30).unwrap();
        assert_eq!(level_one_form(8, 30).unwrap(), e8);
        assert_eq!(
            level_one_form(8, 4).unwrap(),
            s("1 + 480*q + 61920*q^2 + 1050240*q^3 + O(q^4)")
        );
        assert_eq!(level_one_form(10, 30).unwrap(), eisenstein(10, 1, 30).unwrap());
        assert_eq!(level_one_form(14, 30).unwrap(), eisenstein(14, 1, 30).unwrap());
    }

    #[test]
    fn serre_derivative_identities() {
        assert!(serre_derivative(&QSeries::one(10), 0, 10).unwrap().is_zero());
        let t = serre_derivative(&eisenstein(4, 1, 20).unwrap(), 4, 20).unwrap();
        assert_eq!(t, eisenstein(6, 1, 20).unwrap().scale(&coeff_frac(-1, 3)));
        assert!(serre_derivative(&delta(20).unwrap(), 12, 20).unwrap().is_zero());
    }
}
