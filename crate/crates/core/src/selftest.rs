//! Acceptance checks, one per numbered criterion, shared by the `selftest`
//! command and the acceptance test target. Every comparison is exact.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Zero;
use serde::Serialize;

use crate::basis::{build_basis, build_grid, duality_residual};
use crate::error::Result;
use crate::leveldata::{self, Space, LEVELS};
use crate::qseries::QSeries;
use crate::seedsynth::synthesize_report;
use crate::traceops::{
    classify, genfun_check, genfun_level4_closed_form, obstructions, theorem_list, trace,
    traced_grid_preserves, GenfunSide,
};

pub const CRITERIA: [(u8, &str, Duration); 9] = [
    (1, "level-1 grid coefficients", Duration::from_secs(1)),
    (2, "printed generator and Hauptmodul prefixes", Duration::from_secs(5)),
    (3, "duality on 20x20 boxes, every level, even k in [-10,10]", Duration::from_secs(180)),
    (4, "u/v alignment and divisor monotonicity", Duration::from_secs(1)),
    (5, "printed trace expansions at levels 4 and 2", Duration::from_secs(60)),
    (6, "classifier vs theorem list and traced grids", Duration::from_secs(300)),
    (7, "synthesized seeds: printed prefixes and duality", Duration::from_secs(180)),
    (8, "generating-function identities", Duration::from_secs(60)),
    (9, "level-25 weight-2 basis, 50 elements to q^120", Duration::from_secs(30)),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {}: {} ({}; {} ms of {} ms) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_ms,
            self.budget_ms,
            self.detail
        )
    }
}

/// Mismatches found by a check; empty means the check passed.
type Findings = Vec<String>;

fn same_prefix(got: &QSeries, printed: &QSeries) -> bool {
    let p = printed.prec();
    got.prec() >= p && got.truncate(p) == *printed
}

fn expect(findings: &mut Findings, what: String, got: &QSeries, printed: &str) -> Result<()> {
    let printed: QSeries = printed.parse()?;
    if !same_prefix(got, &printed) {
        findings.push(format!("{what}: got {}, printed {printed}", got.truncate(printed.prec())));
    }
    Ok(())
}

fn level_one_grid() -> Result<Findings> {
    let mut out = Vec::new();
    let f = build_basis(1, 0, Space::Inf, 4, 8)?;
    let g = build_basis(1, 2, Space::Hat, 3, 8)?;
    let fs = [
        "1 + O(q^4)",
        "q^-1 + 196884*q + 21493760*q^2 + 864299970*q^3",
        "q^-2 + 42987520*q + 40491909396*q^2 + 8504046600192*q^3",
        "q^-3 + 2592899910*q + 12756069900288*q^2 + 9529320689550144*q^3",
    ];
    let gs = [
        "q^-1 - 196884*q - 42987520*q^2 - 2592899910*q^3",
        "q^-2 - 21493760*q - 40491909396*q^2 - 12756069900288*q^3",
        "q^-3 - 864299970*q - 8504046600192*q^2 - 9529320689550144*q^3",
    ];
    for (i, p) in fs.iter().enumerate() {
        expect(&mut out, format!("f_{i}"), f.element(i as i64)?, p)?;
    }
    for (i, p) in gs.iter().enumerate() {
        let n = i as i64 + 1;
        expect(&mut out, format!("g_{n}"), g.element(n)?, p)?;
    }
    Ok(out)
}

fn appendix_conformance() -> Result<Findings> {
    let mut out = Vec::new();
    for level in leveldata::all_levels() {
        for p in &level.printed {
            let printed = level.printed_series(p);
            let prec = printed.prec();
            let got = match p.weight {
                Some(w) => level.seed(w, prec)?,
                None => level.hauptmodul_series(prec)?,
            };
            let ok = same_prefix(&got, &printed);
            // the level-9 Hauptmodul line is the one sanctioned printed exception
            let sanctioned = p.typo && level.level == 9 && p.weight.is_none();
            if ok == sanctioned {
                let note = if p.typo { " (flagged paper_typo)" } else { "" };
                out.push(format!(
                    "level {} {}{note}: computed {}, printed {}",
                    level.level,
                    p.label,
                    got.truncate(prec),
                    printed
                ));
            }
        }
    }
    for n in [6, 9] {
        let level = leveldata::get_level(n)?;
        if !level.flags.iter().any(|f| f.kind == "paper_typo") {
            out.push(format!("level {n} lacks its paper_typo flag"));
        }
    }
    Ok(out)
}

fn duality_at(levels: &[u32]) -> Result<Findings> {
    let mut out = Vec::new();
    for &n in levels {
        for k in (-10..=10).step_by(2) {
            let grid = build_grid(n, k, 20, 60)?;
            let r = duality_residual(&grid, 20, 20)?;
            if !r.residual.is_zero() {
                out.push(format!("level {n} k={k}: residual {} at {:?}", r.residual, r.witness));
            }
        }
    }
    Ok(out)
}

fn divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).filter(move |m| n % m == 0)
}

fn alignment() -> Result<Findings> {
    let mut out = Vec::new();
    for level in leveldata::all_levels() {
        let n = level.level;
        for k in (-10..=10).step_by(2) {
            let (v, u) = (level.v(k)?, level.u(2 - k)?);
            if u != -v - 1 {
                out.push(format!("level {n} k={k}: u(2-k)={u}, v(k)={v}"));
            }
            for m in divisors(n).filter(|&m| m != n) {
                let lm = leveldata::get_level(m)?;
                let (vm, um) = (lm.v(k)?, lm.u(k)?);
                let un = level.u(k)?;
                if v.abs() < vm.abs() || un.abs() < um.abs() {
                    out.push(format!(
                        "{n}|{m} k={k}: |v| {} vs {}, |u| {} vs {}",
                        v.abs(),
                        vm.abs(),
                        un.abs(),
                        um.abs()
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn printed_traces() -> Result<Findings> {
    let mut out = Vec::new();
    let cases: [(u32, u32, i64, Space, i64, &str); 13] = [
        (4, 1, 0, Space::Inf, 0, "1 + O(q^4)"),
        (4, 1, 0, Space::Inf, 1, "q^-1 + 196884*q + 21493760*q^2 + 864299970*q^3"),
        (4, 1, 0, Space::Inf, 2, "q^-2 + 42987520*q + 40491909396*q^2 + 8504046600192*q^3"),
        (4, 1, 0, Space::Inf, 3, "q^-3 + 2592899910*q + 12756069900288*q^2 + 9529320689550144*q^3"),
        (4, 1, 2, Space::Hat, 1, "q^-1 - 196884*q - 42987520*q^2 - 2592899910*q^3"),
        (4, 1, 2, Space::Hat, 2, "q^-2 - 21493760*q - 40491909396*q^2 - 12756069900288*q^3"),
        (4, 1, 2, Space::Hat, 3, "q^-3 - 864299970*q - 8504046600192*q^2 - 9529320689550144*q^3"),
        (2, 1, -6, Space::Inf, 2, "q^-2 + 8*q^-1 - 65760 - 87553952*q"),
        (2, 1, -6, Space::Inf, 3, "q^-3 - 12*q^-1 - 1044480 - 22875832242*q"),
        (2, 1, -6, Space::Inf, 4, "q^-4 - 64*q^-1 - 7895520 - 1969010000640*q"),
        (2, 1, 8, Space::Hat, -1, "O(q^4)"),
        (2, 1, 8, Space::Hat, 0, "1 + 480*q + 61920*q^2 + 1050240*q^3"),
        (2, 1, 8, Space::Hat, 1, "q^-1 + 28240*q + 87326720*q^2 + 22876173090*q^3"),
    ];
    for (n, m, k, space, i, printed) in cases {
        let r = trace(n, m, k, space, i, 8)?;
        match r.expansion {
            Some(e) => expect(&mut out, format!("tr {n}->{m} k={k} {space} index {i}"), &e, printed)?,
            None => out.push(format!("tr {n}->{m} k={k} {space} index {i}: {:?}", r.reason)),
        }
    }
    Ok(out)
}

fn classification() -> Result<Findings> {
    let mut out = Vec::new();
    for &n in LEVELS.iter().filter(|&&n| n > 1) {
        for m in divisors(n) {
            for k in (-10..=10).step_by(2) {
                let c = classify(n, m, k)?;
                if c.is_preserved() != theorem_list(n, m, k) {
                    out.push(format!("{n}->{m} k={k}: classifier {c:?} disagrees with theorem"));
                }
                if obstructions(n, m, k)?.pairs.is_empty() != c.is_preserved() {
                    out.push(format!("{n}->{m} k={k}: obstruction list inconsistent"));
                }
                if let Some(emp) = traced_grid_preserves(n, m, k, 12, 30)? {
                    if emp != c.is_preserved() {
                        out.push(format!("{n}->{m} k={k}: traced grid says {emp}, classifier {c:?}"));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn synthesized_seeds() -> Result<Findings> {
    let mut out = Vec::new();
    for (n, k) in [(7, 4), (10, 2), (10, 4), (13, 4), (13, 6), (25, 2)] {
        if let Err(e) = synthesize_report(n, k, 40) {
            out.push(format!("level {n} weight {k}: {e}"));
        }
    }
    out.extend(duality_at(&[7, 10, 13, 25])?);
    Ok(out)
}

fn generating_functions() -> Result<Findings> {
    let mut out = Vec::new();
    for side in [GenfunSide::WeightK, GenfunSide::WeightDual] {
        let r = genfun_check(2, 1, -6, 15, side)?;
        if !r.holds {
            out.push(format!("2->1 k=-6 {side:?} differs at outer exponent {:?}", r.witness));
        }
    }
    for k in [0, 2, 4] {
        if !genfun_level4_closed_form(k, 12)? {
            out.push(format!("level-4 closed form fails at k={k}"));
        }
    }
    Ok(out)
}

fn large_basis() -> Result<Findings> {
    let b = build_basis(25, 2, Space::Inf, 50, 120)?;
    let mut out = Vec::new();
    if b.len() != 50 || b.prec != 120 {
        out.push(format!("built {} elements to q^{}", b.len(), b.prec));
    }
    Ok(out)
}

/// Runs criterion `id` (1 to 9).
pub fn run_criterion(id: u8) -> CriterionResult {
    let (_, name, budget) = CRITERIA[(id as usize).clamp(1, 9) - 1];
    let start = Instant::now();
    let findings = match id {
        1 => level_one_grid(),
        2 => appendix_conformance(),
        3 => duality_at(&LEVELS),
        4 => alignment(),
        5 => printed_traces(),
        6 => classification(),
        7 => synthesized_seeds(),
        8 => generating_functions(),
        9 => large_basis(),
        _ => Ok(vec![format!("no criterion {id}")]),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match findings {
        Ok(f) if f.is_empty() => (true, String::new()),
        Ok(f) => (false, f.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > budget {
        passed = false;
        detail = format!("over time budget. {detail}");
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: budget.as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _, _)| run_criterion(*id)).collect()
}
