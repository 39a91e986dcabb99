//! The trace `tr^N_M` on canonical basis elements, computed by matching
//! principal parts against the level-`M` basis, together with the duality
//! classifier, the obstruction products and truncated generating-function
//! identities.

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::basis::{build_basis, required_prec, CanonicalBasis};
use crate::error::{Error, Result};
use crate::leveldata::{self, Space};
use crate::qseries::{Coeff, QSeries};

/// `M_k(M) = 0`.
pub fn mk_trivial(m: u32, k: i64) -> bool {
    if m == 1 {
        k == 2 || k < 0
    } else {
        k < 0
    }
}

/// `S_k(M) = 0`.
pub fn sk_trivial(m: u32, k: i64) -> bool {
    match m {
        1 => k == 14 || k < 12,
        2 => k < 8,
        3 => k < 6,
        _ => k < 4,
    }
}

fn check_divides(n: u32, m: u32) -> Result<()> {
    leveldata::get_level(n)?;
    leveldata::get_level(m)?;
    if m == 0 || n % m != 0 {
        return Err(Error::NotDivisor { from: n, to: m });
    }
    Ok(())
}

/// `None` when the principal part (plus constant where relevant) determines the
/// trace, otherwise the reason it does not.
pub fn applicability(n: u32, m: u32, k: i64, space: Space) -> Option<String> {
    if n == m {
        return None;
    }
    match space {
        // weight 0: constants are the only holomorphic forms, fixed by the constant term
        Space::Inf if mk_trivial(m, k) || k == 0 => None,
        Space::Inf => Some(format!(
            "trace not determined by principal part: M_{k}({m}) != 0"
        )),
        Space::Hat if sk_trivial(m, k) => None,
        Space::Hat => Some(format!(
            "trace not determined by principal part: S_{k}({m}) != 0"
        )),
    }
}

fn ser_coeff_pairs<S: Serializer>(v: &[(i64, Coeff)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (i, c) in v {
        seq.serialize_element(&(i, c.to_string()))?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub from: u32,
    pub to: u32,
    pub weight: i64,
    pub space: Space,
    pub index: i64,
    pub applicable: bool,
    pub reason: Option<String>,
    pub expansion: Option<QSeries>,
    /// Level-`M` basis indices with their coefficients.
    #[serde(serialize_with = "ser_coeff_pairs")]
    pub combination: Vec<(i64, Coeff)>,
}

/// Level-`n` basis covering indices up to `max_index`, with at least `prec`
/// precision. `None` if `max_index` lies below the first index.
fn basis_upto(n: u32, k: i64, space: Space, max_index: i64, prec: i64) -> Result<Option<CanonicalBasis>> {
    let bound = leveldata::get_level(n)?.bound(k, space)?;
    let count = max_index + bound + 1;
    if count < 1 {
        return Ok(None);
    }
    let count = count as usize;
    let p = prec.max(required_prec(n, k, space, count)?);
    Ok(Some(build_basis(n, k, space, count, p)?))
}

/// Exponents whose coefficients select the level-`M` combination.
fn window(m: u32, k: i64, space: Space) -> Result<i64> {
    let level = leveldata::get_level(m)?;
    Ok(match space {
        Space::Inf => level.v(k)?,
        Space::Hat => level.u(k)?.min(0),
    })
}

/// Exponents the trace must reproduce exactly.
fn checked_up_to(k: i64, space: Space) -> i64 {
    match space {
        Space::Hat => 0,
        Space::Inf if k == 0 => 0,
        Space::Inf => -1,
    }
}

/// Principal-part trace of one series already known to lie in the level-`n` space.
fn trace_series(
    elem: &QSeries,
    target: Option<&CanonicalBasis>,
    m: u32,
    k: i64,
    space: Space,
    prec: i64,
) -> Result<(QSeries, Vec<(i64, Coeff)>)> {
    let w = window(m, k, space)?;
    let mut out = QSeries::zero(prec);
    let mut combination = Vec::new();
    for (e, c) in elem.terms_below(w + 1) {
        let basis = target.ok_or_else(|| {
            Error::Internal(format!("no level-{m} element for q^{e}"))
        })?;
        let f = basis.element(-e)?;
        out = out.add_scaled(c, f);
        combination.push((-e, c.clone()));
    }
    combination.sort_by_key(|(i, _)| std::cmp::Reverse(*i));
    let out = out.truncate(prec);
    let top = checked_up_to(k, space);
    let lo = elem.valuation_opt().unwrap_or(0).min(out.valuation_opt().unwrap_or(0));
    for e in lo..=top {
        if e >= out.prec() || e >= elem.prec() {
            break;
        }
        if out.coeff(e)? != elem.coeff(e)? {
            return Err(Error::Internal(format!(
                "trace to level {m} changed the coefficient of q^{e}"
            )));
        }
    }
    Ok((out, combination))
}

/// `tr^N_M` of the level-`n` basis element with the given index.
pub fn trace(n: u32, m: u32, k: i64, space: Space, index: i64, prec: i64) -> Result<TraceReport> {
    check_divides(n, m)?;
    let mut reports = trace_range(n, m, k, space, index, index, prec)?;
    Ok(reports.pop().expect("one index requested"))
}

/// Traces of the level-`n` elements with indices `lo..=hi`.
pub fn trace_range(
    n: u32,
    m: u32,
    k: i64,
    space: Space,
    lo: i64,
    hi: i64,
    prec: i64,
) -> Result<Vec<TraceReport>> {
    check_divides(n, m)?;
    let source = basis_upto(n, k, space, hi, prec)?.ok_or_else(|| {
        Error::OutOfRange(format!("index {hi} precedes the level-{n} basis"))
    })?;
    let mut out = Vec::new();
    let reason = applicability(n, m, k, space);
    let target = if n == m || reason.is_some() {
        None
    } else {
        basis_upto(m, k, space, hi, prec)?
    };
    for i in lo..=hi {
        let elem = source.element(i)?.truncate(prec);
        let mut report = TraceReport {
            from: n,
            to: m,
            weight: k,
            space,
            index: i,
            applicable: reason.is_none(),
            reason: reason.clone(),
            expansion: None,
            combination: Vec::new(),
        };
        if n == m {
            report.expansion = Some(elem);
            report.combination = vec![(i, Coeff::one())];
        } else if reason.is_none() {
            let (s, comb) = trace_series(&elem, target.as_ref(), m, k, space, prec)?;
            report.expansion = Some(s);
            report.combination = comb;
        }
        out.push(report);
    }
    Ok(out)
}

/// Trace of an arbitrary series assumed to lie in the level-`n` space.
pub fn trace_of(n: u32, m: u32, k: i64, space: Space, f: &QSeries, prec: i64) -> Result<QSeries> {
    check_divides(n, m)?;
    if n == m {
        return Ok(f.truncate(prec));
    }
    if let Some(reason) = applicability(n, m, k, space) {
        return Err(Error::Invalid(reason));
    }
    let top = f.valuation_opt().map_or(0, |v| -v);
    let target = basis_upto(m, k, space, top, prec)?;
    Ok(trace_series(f, target.as_ref(), m, k, space, prec)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionSide {
    /// `v_k(N) < v_k(M)`: the weight-`k` traces pick up extra level-`M` terms.
    FSide,
    /// `u_{2-k}(N) < u_{2-k}(M)`: the same on the weight `2 - k` side.
    GSide,
    /// The vanishing orders differ without either inequality holding.
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "cases")]
pub enum Classification {
    Preserved,
    NotPreserved(Vec<ObstructionSide>),
}

impl Classification {
    pub fn is_preserved(&self) -> bool {
        matches!(self, Classification::Preserved)
    }
}

/// Whether `tr^N_M` carries the level-`N` grid in weights `k, 2 - k` to a
/// grid satisfying duality.
pub fn classify(n: u32, m: u32, k: i64) -> Result<Classification> {
    check_divides(n, m)?;
    if n == m {
        return Ok(Classification::Preserved);
    }
    let (ln, lm) = (leveldata::get_level(n)?, leveldata::get_level(m)?);
    let (vn, vm) = (ln.v(k)?, lm.v(k)?);
    let (un, um) = (ln.u(2 - k)?, lm.u(2 - k)?);
    if vn == vm && un == um {
        return Ok(Classification::Preserved);
    }
    let mut cases = Vec::new();
    if vn < vm {
        cases.push(ObstructionSide::FSide);
    }
    if un < um {
        cases.push(ObstructionSide::GSide);
    }
    if cases.is_empty() {
        cases.push(ObstructionSide::Other);
    }
    Ok(Classification::NotPreserved(cases))
}

/// Preservation according to the explicit theorem statement.
pub fn theorem_list(n: u32, m: u32, k: i64) -> bool {
    n == m || k == 0 || (k == -2 && matches!(n, 2..=4)) || (k == -4 && n == 2 && m == 1)
}

/// `(level, weight, space, index)` naming one basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BasisRef {
    pub level: u32,
    pub weight: i64,
    pub space: Space,
    pub index: i64,
}

/// `sign * f(z) * g(tau)` added to the level-`M` generating function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionPair {
    pub side: ObstructionSide,
    pub sign: i64,
    pub f: BasisRef,
    pub g: BasisRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionList {
    pub from: u32,
    pub to: u32,
    pub weight: i64,
    pub pairs: Vec<ObstructionPair>,
}

/// Products separating the traced generating function from the level-`M` one.
pub fn obstructions(n: u32, m: u32, k: i64) -> Result<ObstructionList> {
    check_divides(n, m)?;
    let mut pairs = Vec::new();
    if n != m {
        let (ln, lm) = (leveldata::get_level(n)?, leveldata::get_level(m)?);
        let (vn, vm) = (ln.v(k)?, lm.v(k)?);
        for x in 1..=(vm - vn) {
            pairs.push(ObstructionPair {
                side: ObstructionSide::FSide,
                sign: -1,
                f: BasisRef { level: m, weight: k, space: Space::Inf, index: -(vn + x) },
                g: BasisRef { level: n, weight: 2 - k, space: Space::Hat, index: vn + x },
            });
        }
        let (un, um) = (ln.u(2 - k)?, lm.u(2 - k)?);
        for x in 1..=(um - un) {
            pairs.push(ObstructionPair {
                side: ObstructionSide::GSide,
                sign: 1,
                f: BasisRef { level: n, weight: k, space: Space::Inf, index: un + x },
                g: BasisRef { level: m, weight: 2 - k, space: Space::Hat, index: -(un + x) },
            });
        }
    }
    Ok(ObstructionList {
        from: n,
        to: m,
        weight: k,
        pairs,
    })
}

/// Which variable of the generating function the trace acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenfunSide {
    /// Weight `k`, variable `z`; compared coefficientwise in `p`.
    WeightK,
    /// Weight `2 - k`, variable `tau`; compared coefficientwise in `q`.
    WeightDual,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenfunReport {
    pub side: GenfunSide,
    pub holds: bool,
    /// Outer exponents compared, each as a series to `O(q^P)`.
    pub outer: (i64, i64),
    pub prec: i64,
    /// First outer exponent where the two sides differ.
    pub witness: Option<i64>,
}

fn fetch(n: u32, k: i64, space: Space, idx: i64, prec: i64) -> Result<Option<QSeries>> {
    Ok(match basis_upto(n, k, space, idx, prec)? {
        Some(b) => Some(b.element(idx)?.truncate(prec)),
        None => None,
    })
}

/// Checks `tr(H_{k,N}) = H_{k,M} + sum sign * f * g` on the side `side`, over that
/// side's obstruction pairs, for the
/// first `p` outer exponents and inner exponents below `p`.
pub fn genfun_check(n: u32, m: u32, k: i64, p: i64, side: GenfunSide) -> Result<GenfunReport> {
    check_divides(n, m)?;
    if p < 1 {
        return Err(Error::Invalid("truncation P must be positive".into()));
    }
    let (ln, lm) = (leveldata::get_level(n)?, leveldata::get_level(m)?);
    let obs = obstructions(n, m, k)?;
    // outer variable runs over basis indices of the traced side
    let (space, wt, start_n, start_m) = match side {
        GenfunSide::WeightK => (Space::Inf, k, -ln.v(k)?, -lm.v(k)?),
        GenfunSide::WeightDual => (Space::Hat, 2 - k, -ln.u(2 - k)?, -lm.u(2 - k)?),
    };
    if let Some(reason) = applicability(n, m, wt, space) {
        return Err(Error::Invalid(reason));
    }
    let lo = start_n.min(start_m);
    let hi = lo + p - 1;
    let wp = p + (hi - lo).abs() + 4;
    let traces = if hi >= start_n {
        trace_range(n, m, wt, space, start_n, hi, wp)?
    } else {
        Vec::new()
    };
    let target = basis_upto(m, wt, space, hi, wp)?;
    // (other-variable element, product element, sign) per obstruction of this side
    let own = match side {
        GenfunSide::WeightK => ObstructionSide::FSide,
        GenfunSide::WeightDual => ObstructionSide::GSide,
    };
    let mut products = Vec::new();
    for pair in obs.pairs.iter().filter(|pair| pair.side == own) {
        let (outer_ref, inner_ref) = match side {
            GenfunSide::WeightK => (pair.g, pair.f),
            GenfunSide::WeightDual => (pair.f, pair.g),
        };
        let outer = fetch(outer_ref.level, outer_ref.weight, outer_ref.space, outer_ref.index, wp)?
            .ok_or_else(|| Error::Internal("obstruction index outside basis".into()))?;
        let inner = fetch(inner_ref.level, inner_ref.weight, inner_ref.space, inner_ref.index, wp)?
            .ok_or_else(|| Error::Internal("obstruction index outside basis".into()))?;
        products.push((outer, inner, pair.sign));
    }
    // the dual-side generating function is minus the sum of g's
    let outer_sign = match side {
        GenfunSide::WeightK => Coeff::one(),
        GenfunSide::WeightDual => -Coeff::one(),
    };
    let mut witness = None;
    for j in lo..=hi {
        let mut lhs = QSeries::zero(p);
        if j >= start_n {
            let r = &traces[(j - start_n) as usize];
            let e = r.expansion.as_ref().expect("applicable trace has an expansion");
            lhs = e.scale(&outer_sign);
        }
        let mut rhs = QSeries::zero(p);
        if j >= start_m {
            let t = target.as_ref().expect("level-M basis covers j");
            rhs = rhs.add_scaled(&outer_sign, t.element(j)?);
        }
        for (outer, inner, sign) in &products {
            let c = outer.coeff(j)?;
            if !c.is_zero() {
                rhs = rhs.add_scaled(&(c * Coeff::from_integer((*sign).into())), inner);
            }
        }
        let (lhs, rhs) = (lhs.truncate(p), rhs.truncate(p));
        if lhs.prec() < p || rhs.prec() < p {
            return Err(Error::InsufficientPrecision {
                required: p,
                available: lhs.prec().min(rhs.prec()),
            });
        }
        if lhs != rhs {
            witness = Some(j);
            break;
        }
    }
    Ok(GenfunReport {
        side,
        holds: witness.is_none(),
        outer: (lo, hi),
        prec: p,
        witness,
    })
}

/// Checks `(f_{0,1}(tau) - f_{0,1}(z)) H_k(z, tau) = f_{k,-l}(z) g_{2-k,l+1}(tau)`
/// at level 4 in both expansions of `H_k`, for `P` outer exponents.
pub fn genfun_level4_closed_form(k: i64, p: i64) -> Result<bool> {
    if k % 2 != 0 {
        return Err(Error::OddWeight(k));
    }
    if p < 1 {
        return Err(Error::Invalid("truncation P must be positive".into()));
    }
    let l = k / 2;
    let wp = 2 * p + l.abs() + 8;
    let count = (p + 2) as usize;
    let hauptmodul = build_basis(4, 0, Space::Inf, 2, wp.max(required_prec(4, 0, Space::Inf, 2)?))?
        .element(1)?
        .clone();
    let fb = build_basis(4, k, Space::Inf, count, wp.max(required_prec(4, k, Space::Inf, count)?))?;
    let gb = build_basis(4, 2 - k, Space::Hat, count, wp.max(required_prec(4, 2 - k, Space::Hat, count)?))?;
    let first_f = fb.element(-l)?;
    let first_g = gb.element(l + 1)?;

    // z-expansion: coefficient of p^j, j from -l-1
    for j in (-l - 1)..(-l - 1 + p) {
        let mut lhs = QSeries::zero(wp);
        if j + 1 >= fb.start {
            lhs = lhs.add(fb.element(j + 1)?);
        }
        for (t, c) in hauptmodul.terms().filter(|(t, _)| *t >= 0) {
            if j - t >= fb.start {
                lhs = lhs.add_scaled(c, fb.element(j - t)?);
            }
        }
        if j >= fb.start {
            lhs = lhs.sub(&hauptmodul.mul(fb.element(j)?));
        }
        let rhs = first_f.scale(&first_g.coeff(j)?);
        if !same_to(&lhs, &rhs, p)? {
            return Ok(false);
        }
    }
    // tau-expansion: coefficient of q^n, n from l
    for n in l..(l + p) {
        let mut lhs = QSeries::zero(wp);
        if n >= gb.start {
            lhs = lhs.sub(&hauptmodul.mul(gb.element(n)?));
        }
        if n + 1 >= gb.start {
            lhs = lhs.add(gb.element(n + 1)?);
        }
        for (t, c) in hauptmodul.terms().filter(|(t, _)| *t >= 0) {
            if n - t >= gb.start {
                lhs = lhs.add_scaled(c, gb.element(n - t)?);
            }
        }
        let rhs = first_g.scale(&first_f.coeff(n)?);
        if !same_to(&lhs, &rhs, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_to(a: &QSeries, b: &QSeries, p: i64) -> Result<bool> {
    let (a, b) = (a.truncate(p), b.truncate(p));
    if a.prec() < p || b.prec() < p {
        return Err(Error::InsufficientPrecision {
            required: p,
            available: a.prec().min(b.prec()),
        });
    }
    Ok(a == b)
}

/// Duality of the traced grid on a `box_size x box_size` box, or `None` when
/// one side's trace is outside the principal-part method.
pub fn traced_grid_preserves(n: u32, m: u32, k: i64, box_size: usize, prec: i64) -> Result<Option<bool>> {
    check_divides(n, m)?;
    if applicability(n, m, k, Space::Inf).is_some() || applicability(n, m, 2 - k, Space::Hat).is_some() {
        return Ok(None);
    }
    let ln = leveldata::get_level(n)?;
    let fs = -ln.v(k)?;
    let gs = -ln.u(2 - k)?;
    let b = box_size as i64;
    let wp = prec.max(fs.abs() + gs.abs() + 2 * b + 2);
    let ft = trace_range(n, m, k, Space::Inf, fs, fs + b - 1, wp)?;
    let gt = trace_range(n, m, 2 - k, Space::Hat, gs, gs + b - 1, wp)?;
    for (i, f) in ft.iter().enumerate() {
        let f = f.expansion.as_ref().expect("applicable");
        for (j, g) in gt.iter().enumerate() {
            let g = g.expansion.as_ref().expect("applicable");
            let (mi, nj) = (fs + i as i64, gs + j as i64);
            if f.coeff(nj)? + g.coeff(mi)? != Coeff::zero() {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}
