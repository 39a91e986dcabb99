//! Row-reduced canonical bases of `M_k^(inf)(N)` and its cusp-vanishing
//! subspace, and the paired grids in weights `k` and `2 - k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::leveldata::{self, cusp_killer, Space};
use crate::qseries::{eval_to_prec, Coeff, QSeries};

/// `f_{k,m}` (or `g_{k,m}`) for `m = start, start + 1, ...`.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalBasis {
    pub level: u32,
    pub weight: i64,
    pub space: Space,
    /// Maximal vanishing order `B`; every element is `q^-m + O(q^(B+1))`.
    pub bound: i64,
    pub start: i64,
    pub prec: i64,
    pub elements: Vec<QSeries>,
}

impl CanonicalBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.elements.len() as i64
    }

    pub fn indices(&self) -> std::ops::Range<i64> {
        self.start..self.end()
    }

    pub fn element(&self, m: i64) -> Result<&QSeries> {
        if m < self.start || m >= self.end() {
            return Err(Error::OutOfRange(format!(
                "index {m} outside built range {}..{} (level {}, weight {}, {})",
                self.start,
                self.end(),
                self.level,
                self.weight,
                self.space
            )));
        }
        Ok(&self.elements[(m - self.start) as usize])
    }

    /// Coefficient of `q^n` in element `m`.
    pub fn coeff(&self, m: i64, n: i64) -> Result<Coeff> {
        self.element(m)?.coeff(n)
    }

    fn restrict(&self, count: usize, prec: i64) -> CanonicalBasis {
        CanonicalBasis {
            elements: self.elements[..count]
                .iter()
                .map(|e| e.truncate(prec))
                .collect(),
            prec,
            ..self.clone()
        }
    }
}

/// Weight `k` forms paired with weight `2 - k` cusp-vanishing forms.
#[derive(Clone, Debug, Serialize)]
pub struct ModularGrid {
    pub level: u32,
    pub fside: CanonicalBasis,
    pub gside: CanonicalBasis,
}

/// `q^B + O(q^(B+1))`, the element of index `-B`, to precision `prec`.
pub fn first_element(n: u32, k: i64, space: Space, prec: i64) -> Result<QSeries> {
    let level = leveldata::get_level(n)?;
    let v = level.v(k)?;
    let (base_weight, l, factor_weight) = level.first_element_shape(k)?;
    let inf = |wp: i64| -> Result<QSeries> {
        let factor = if factor_weight == 0 {
            QSeries::one(wp)
        } else {
            level.seed(factor_weight, wp)?
        };
        if l == 0 {
            return Ok(factor);
        }
        let base = level.seed(base_weight, wp)?;
        Ok(base.pow(l)?.mul(&factor))
    };
    let seed_inf = |target: i64| eval_to_prec(target, (v.abs() + 2) * 2, inf);
    match space {
        Space::Inf => seed_inf(prec),
        Space::Hat => {
            let c = level.cusp_count as i64 - 1;
            if c == 0 {
                return seed_inf(prec);
            }
            eval_to_prec(prec, 2 * c, |wp| {
                let killer = cusp_killer(n, wp - v + c)?;
                Ok(seed_inf(wp + c)?.mul(&killer))
            })
        }
    }
}

/// Appends element `start + len` to a basis under construction.
pub fn next_element(elements: &[QSeries], start: i64, bound: i64, psi: &QSeries) -> Result<QSeries> {
    let last = elements
        .last()
        .ok_or_else(|| Error::Internal("next_element needs a nonempty basis".into()))?;
    let m = start + elements.len() as i64;
    let mut p = psi.mul(last);
    for s in (1 - m)..=bound {
        let c = p.coeff(s)?;
        if c.is_zero() {
            continue;
        }
        let idx = -s - start;
        if idx < 0 || idx as usize >= elements.len() {
            return Err(Error::Internal(format!(
                "element {} needed to clear q^{s} is missing",
                -s
            )));
        }
        p = p.add_scaled(&-c, &elements[idx as usize]);
    }
    Ok(p)
}

fn build_uncached(n: u32, k: i64, space: Space, count: usize, prec: i64) -> Result<CanonicalBasis> {
    let level = leveldata::get_level(n)?;
    let bound = level.bound(k, space)?;
    let start = -bound;
    // each step multiplies by psi, costing one term of precision
    let wp = prec + count as i64 + 1;
    let first = first_element(n, k, space, wp)?;
    let psi = level.hauptmodul_series(wp + count as i64 + 2 + bound.abs())?;
    let mut elements = vec![first];
    while elements.len() < count {
        let e = next_element(&elements, start, bound, &psi)?;
        elements.push(e);
    }
    let available = elements.iter().map(|e| e.prec()).min().unwrap_or(wp);
    if available < prec {
        return Err(Error::Internal(format!(
            "basis precision {available} fell below requested {prec}"
        )));
    }
    Ok(CanonicalBasis {
        level: n,
        weight: k,
        space,
        bound,
        start,
        prec,
        elements: elements.into_iter().map(|e| e.truncate(prec)).collect(),
    })
}

type BasisKey = (u32, i64, Space);

fn basis_cache() -> &'static RwLock<HashMap<BasisKey, Arc<CanonicalBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<BasisKey, Arc<CanonicalBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Minimum precision for `count` elements with `count` tail coefficients each.
pub fn required_prec(n: u32, k: i64, space: Space, count: usize) -> Result<i64> {
    let bound = leveldata::get_level(n)?.bound(k, space)?;
    Ok(bound + 1 + count as i64)
}

/// Elements `-B, ..., -B + count - 1` to precision `prec`, cached per
/// `(N, k, space)`.
pub fn build_basis(n: u32, k: i64, space: Space, count: usize, prec: i64) -> Result<CanonicalBasis> {
    if count == 0 {
        return Err(Error::Invalid("basis count must be at least 1".into()));
    }
    let required = required_prec(n, k, space, count)?;
    if prec < required {
        return Err(Error::InsufficientPrecision {
            required,
            available: prec,
        });
    }
    let key = (n, k, space);
    if let Some(b) = basis_cache().read().expect("cache poisoned").get(&key) {
        if b.len() >= count && b.prec >= prec {
            return Ok(b.restrict(count, prec));
        }
    }
    let (count_b, prec_b) = match basis_cache().read().expect("cache poisoned").get(&key) {
        Some(b) => (b.len().max(count), b.prec.max(prec)),
        None => (count, prec),
    };
    let built = Arc::new(build_uncached(n, k, space, count_b, prec_b)?);
    basis_cache()
        .write()
        .expect("cache poisoned")
        .insert(key, built.clone());
    Ok(built.restrict(count, prec))
}

/// Grid with `count` elements on each side, built so every coefficient in a
/// `count x count` duality box is determined.
pub fn build_grid(n: u32, k: i64, count: usize, prec: i64) -> Result<ModularGrid> {
    let level = leveldata::get_level(n)?;
    let v = level.v(k)?;
    // f-side coefficients run over g-indices v+1.., g-side over f-indices -v..
    let need = (v + count as i64 + 1).max(count as i64 - v);
    let prec = prec.max(need);
    Ok(ModularGrid {
        level: n,
        fside: build_basis(n, k, Space::Inf, count, prec)?,
        gside: build_basis(n, 2 - k, Space::Hat, count, prec)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityResidual {
    pub residual: Coeff,
    /// `(m, n)` of the largest violation when nonzero.
    pub witness: Option<(i64, i64)>,
}

/// `max |a_k(m, n) + b_{2-k}(n, m)|` over the first `m_max` f-indices and
/// `n_max` g-indices.
pub fn duality_residual(grid: &ModularGrid, m_max: usize, n_max: usize) -> Result<DualityResidual> {
    let f = &grid.fside;
    let g = &grid.gside;
    if m_max > f.len() || n_max > g.len() {
        return Err(Error::OutOfRange(format!(
            "box {m_max}x{n_max} exceeds built grid {}x{}",
            f.len(),
            g.len()
        )));
    }
    let mut best = DualityResidual {
        residual: Coeff::zero(),
        witness: None,
    };
    for m in f.start..f.start + m_max as i64 {
        for n in g.start..g.start + n_max as i64 {
            let r = (f.coeff(m, n)? + g.coeff(n, m)?).abs();
            if r > best.residual {
                best = DualityResidual {
                    residual: r,
                    witness: Some((m, n)),
                };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> QSeries {
        t.parse().unwrap()
    }

    #[test]
    fn first_elements() {
        assert_eq!(first_element(5, 0, Space::Inf, 10).unwrap(), QSeries::one(10));
        assert_eq!(
            first_element(5, 2, Space::Hat, 4).unwrap(),
            s("q^-1 - 9*q - 20*q^2 + 90*q^3 + O(q^4)")
        );
        assert_eq!(
            first_element(13, 12, Space::Inf, 19).unwrap(),
            s("q^14 + 2*q^15 + 5*q^16 + 10*q^17 + 20*q^18 + O(q^19)")
        );
        assert_eq!(first_element(2, -6, Space::Inf, 10).unwrap().valuation().unwrap(), -2);
    }

    #[test]
    fn level_five_weight_zero() {
        let b = build_basis(5, 0, Space::Inf, 4, 10).unwrap();
        assert_eq!(b.start, 0);
        let e = |m| b.element(m).unwrap().truncate(3);
        assert_eq!(e(1), s("q^-1 + 9*q + 10*q^2 + O(q^3)"));
        assert_eq!(e(2), s("q^-2 + 20*q + 21*q^2 + O(q^3)"));
        assert_eq!(e(3), s("q^-3 - 90*q + 288*q^2 + O(q^3)"));
    }

    #[test]
    fn level_one_weight_zero() {
        let b = build_basis(1, 0, Space::Inf, 3, 8).unwrap();
        assert_eq!(b.element(0).unwrap(), &QSeries::one(8));
        assert_eq!(
            b.element(2).unwrap().truncate(3),
            s("q^-2 + 42987520*q + 40491909396*q^2 + O(q^3)")
        );
    }

    #[test]
    fn precision_audit() {
        assert!(matches!(
            build_basis(5, 0, Space::Inf, 10, 5),
            Err(Error::InsufficientPrecision { required: 11, available: 5 })
        ));
    }

    #[test]
    fn small_duality_boxes() {
        let g = build_grid(5, 0, 3, 10).unwrap();
        assert_eq!(g.fside.coeff(2, 1).unwrap(), Coeff::from_integer(20.into()));
        assert_eq!(g.gside.coeff(1, 2).unwrap(), Coeff::from_integer((-20).into()));
        assert!(duality_residual(&g, 3, 3).unwrap().residual.is_zero());
        assert!(duality_residual(&g, 0, 0).unwrap().witness.is_none());
        let g = build_grid(1, 0, 3, 10).unwrap();
        assert!(duality_residual(&g, 3, 3).unwrap().residual.is_zero());
    }
}
