//! First basis elements without a closed form, found by exact elimination over
//! a family of forms known to lie in `M_k^(inf)(N)`.
//!
//! The family is built from `phi_d(e z)`, `E_4(d z)`, `E_6(d z)`, lower-weight
//! registry seeds, Serre derivatives and `D psi`, each multiplied by powers of
//! the Hauptmodul. Every member is holomorphic away from infinity, so a
//! combination vanishing to order above `v_k(N)` must be identically zero; the
//! elimination checks this to full precision.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{self, SeriesCache};
use crate::leveldata::{self, LevelData};
use crate::qseries::QSeries;

pub const DEFAULT_POLE_BOUND: i64 = 10;
pub const MAX_POLE_BOUND: i64 = 20;

#[derive(Clone, Debug)]
pub struct SpanningFamily {
    pub level: u32,
    pub weight: i64,
    pub pole_bound: i64,
    pub members: Vec<(String, QSeries)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberAudit {
    pub label: String,
    pub valuation: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub level: u32,
    pub weight: i64,
    pub pole_bound: i64,
    pub seed: QSeries,
    pub rank: usize,
    pub family: Vec<MemberAudit>,
}

/// Weight-`w` holomorphic generators at level `n`, excluding the seed of
/// weight `exclude`.
fn pool(level: &LevelData, w: i64, exclude: i64, prec: i64) -> Result<Vec<(String, QSeries)>> {
    let n = level.level as i64;
    let divisors: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut out: Vec<(String, QSeries)> = Vec::new();
    match w {
        0 => out.push(("1".into(), QSeries::one(prec))),
        2 => {
            for &d in divisors.iter().filter(|&&d| d > 1) {
                for &e in divisors.iter().filter(|&&e| n % (d * e) == 0) {
                    let base = (prec + e - 1) / e;
                    let s = generators::phi(d, base)?.rescale(e).truncate(prec);
                    let label = if e == 1 {
                        format!("phi{d}")
                    } else {
                        format!("phi{d}({e}z)")
                    };
                    out.push((label, s));
                }
            }
        }
        4 | 6 => {
            for &d in &divisors {
                let s = generators::eisenstein(w, d, prec)?;
                out.push((format!("E{w}({d}z)"), s));
            }
            let lower = pool(level, w - 2, exclude, prec)?;
            let twos = pool(level, 2, exclude, prec)?;
            for (la, a) in &twos {
                for (lb, b) in &lower {
                    if w == 4 && la > lb {
                        continue;
                    }
                    out.push((format!("{la}*{lb}"), a.mul(b).truncate(prec)));
                }
            }
        }
        _ => {
            return Err(Error::EmptyPool {
                level: level.level,
                weight: w,
                attempted: "pools exist for weights 0, 2, 4, 6".into(),
            })
        }
    }
    for (sw, _) in &level.seeds {
        if *sw == w && *sw != exclude && w > 0 {
            out.push((format!("F{sw}"), level.seed(*sw, prec)?));
        }
    }
    Ok(out)
}

/// Family members for `M_k^(inf)(N)` with pole order at most `j_max + 1`.
pub fn build_family(n: u32, k: i64, j_max: i64, prec: i64) -> Result<SpanningFamily> {
    let level = leveldata::get_level(n)?;
    if k % 2 != 0 {
        return Err(Error::OddWeight(k));
    }
    if j_max < 0 {
        return Err(Error::Invalid("pole bound must be nonnegative".into()));
    }
    let extra = 2 * j_max + 4;
    let wp = prec + extra;
    let main = pool(level, k, k, wp)?;
    let lower = if k >= 2 {
        pool(level, k - 2, k, wp)?
    } else {
        Vec::new()
    };
    if main.is_empty() && lower.is_empty() {
        return Err(Error::EmptyPool {
            level: n,
            weight: k,
            attempted: format!("weight-{k} and weight-{} generators", k - 2),
        });
    }
    let psi = level.hauptmodul_series(wp + 2)?;
    let dpsi = psi.derive();
    let mut members = Vec::new();
    let mut psi_pow = QSeries::one(wp + 2);
    for j in 0..=j_max {
        let tag = |base: &str| {
            if j == 0 {
                base.to_string()
            } else {
                format!("{base}*psi^{j}")
            }
        };
        for (l, h) in &main {
            members.push((tag(l), h.mul(&psi_pow)));
        }
        for (l, h) in &lower {
            let hp = h.mul(&psi_pow);
            let t = generators::serre_derivative(&hp, k - 2, hp.prec())?;
            members.push((format!("theta({})", tag(l)), t));
            members.push((format!("Dpsi*{}", tag(l)), dpsi.mul(&hp)));
        }
        psi_pow = psi_pow.mul(&psi);
    }
    let members = members
        .into_iter()
        .map(|(l, s)| (l, s.truncate(prec)))
        .collect();
    Ok(SpanningFamily {
        level: n,
        weight: k,
        pole_bound: j_max,
        members,
    })
}

/// Echelon reduction on the exponent window `(.., v]`. Returns the pivot rows
/// in insertion order, keyed by pivot exponent.
fn eliminate(family: &SpanningFamily, v: i64) -> Result<Vec<(i64, QSeries)>> {
    let mut pivots: Vec<(i64, QSeries)> = Vec::new();
    for (_, member) in &family.members {
        let mut row = member.clone();
        loop {
            let lead = row.terms_below(v + 1).next().map(|(e, c)| (e, c.clone()));
            match lead {
                None => {
                    if let Some(val) = row.valuation_opt() {
                        return Err(Error::FamilyInconsistent {
                            level: family.level,
                            weight: family.weight,
                            valuation: val,
                            bound: v,
                        });
                    }
                    break;
                }
                Some((e, c)) => match pivots.iter().find(|(pe, _)| *pe == e) {
                    Some((_, p)) => row = row.add_scaled(&-c, p),
                    None => {
                        let monic = row.scale(&c.recip());
                        pivots.push((e, monic));
                        break;
                    }
                },
            }
        }
    }
    Ok(pivots)
}

/// The monic member `q^v + O(q^(v+1))` of the family's span, if any.
pub fn reduce_to_valuation(family: &SpanningFamily, v: i64) -> Result<Option<QSeries>> {
    Ok(eliminate(family, v)?
        .into_iter()
        .find(|(e, _)| *e == v)
        .map(|(_, s)| s))
}

fn synthesize_at(
    level: &LevelData,
    k: i64,
    j_max: i64,
    prec: i64,
) -> Result<(SpanningFamily, usize, QSeries)> {
    let v = level.v(k)?;
    let mut wp = prec + 8;
    loop {
        let family = build_family(level.level, k, j_max, wp)?;
        let pivots = eliminate(&family, v)?;
        let achieved = pivots.iter().map(|(e, _)| *e).max();
        let seed = match pivots.iter().find(|(e, _)| *e == v) {
            Some((_, s)) => s.clone(),
            None => {
                return Err(Error::FamilyDeficient {
                    level: level.level,
                    weight: k,
                    achieved: achieved.unwrap_or(i64::MIN),
                    required: v,
                })
            }
        };
        if seed.prec() >= prec {
            return Ok((family, pivots.len(), seed.truncate(prec)));
        }
        wp += (prec - seed.prec()) + 16;
    }
}

/// Compares against the printed prefix for `(N, k)` when one exists.
fn check_printed(level: &LevelData, k: i64, seed: &QSeries) -> Result<()> {
    for p in level.printed.iter().filter(|p| p.weight == Some(k) && !p.typo) {
        let reference = level.printed_series(p);
        for e in reference.valuation_opt().unwrap_or(0).min(0)..reference.prec() {
            if e >= seed.prec() {
                break;
            }
            if seed.coeff(e)? != reference.coeff(e)? {
                return Err(Error::SeedMismatch {
                    level: level.level,
                    weight: k,
                    exponent: e,
                });
            }
        }
    }
    Ok(())
}

/// Full synthesis with family audit, checked against the printed prefix.
pub fn synthesize_report(n: u32, k: i64, prec: i64) -> Result<SynthesisReport> {
    let report = synthesize_unchecked(n, k, prec)?;
    check_printed(leveldata::get_level(n)?, k, &report.seed)?;
    Ok(report)
}

/// Synthesis without the printed-prefix comparison, escalating the pole bound
/// on deficiency.
pub fn synthesize_unchecked(n: u32, k: i64, prec: i64) -> Result<SynthesisReport> {
    let level = leveldata::get_level(n)?;
    let mut j_max = DEFAULT_POLE_BOUND;
    let (family, rank, seed) = loop {
        match synthesize_at(level, k, j_max, prec) {
            Ok(r) => break r,
            Err(Error::FamilyDeficient { .. }) if j_max < MAX_POLE_BOUND => {
                j_max = MAX_POLE_BOUND;
            }
            Err(e) => return Err(e),
        }
    };
    Ok(SynthesisReport {
        level: n,
        weight: k,
        pole_bound: family.pole_bound,
        rank,
        family: family
            .members
            .iter()
            .map(|(l, s)| MemberAudit {
                label: l.clone(),
                valuation: s.valuation_opt(),
            })
            .collect(),
        seed,
    })
}

/// The monic form `q^v + O(q^(v+1))` of `M_k^(inf)(N)` at precision `prec`, cached.
pub fn synthesize_seed(n: u32, k: i64, prec: i64) -> Result<QSeries> {
    static CACHE: OnceLock<SeriesCache<(u32, i64)>> = OnceLock::new();
    CACHE
        .get_or_init(SeriesCache::new)
        .get_or_try(&(n, k), prec, |p| Ok(synthesize_unchecked(n, k, p)?.seed))
}
