//! Static registry of the genus-zero levels: cusp counts, Hauptmoduln,
//! maximal vanishing orders, first-basis-element recipes and the polynomials
//! whose roots are the Hauptmodul values at the cusps away from infinity.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{self, EtaQuotient};
use crate::qseries::{coeff_frac, QSeries};
use crate::seedsynth;

/// Levels `N` for which `Gamma0(N)` has genus zero, together with level 1.
pub const LEVELS: [u32; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Inf,
    Hat,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Inf => "inf",
            Space::Hat => "hat",
        })
    }
}

impl std::str::FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" => Ok(Space::Inf),
            "hat" => Ok(Space::Hat),
            _ => Err(Error::Parse(format!("space must be inf or hat, got '{s}'"))),
        }
    }
}

/// How a seed series is produced.
#[derive(Clone, Debug)]
pub enum SeedExpr {
    One,
    /// `E_w(d z)`.
    Eis { weight: i64, scale: i64 },
    Phi(i64),
    Eta(EtaQuotient),
    Delta,
    LevelOne(i64),
    /// Seed of another weight at the same level.
    Ref(i64),
    /// Rational linear combination `sum (num/den) * expr`.
    Lin(Vec<(i64, i64, SeedExpr)>),
    Prod(Vec<SeedExpr>),
    /// No closed form; built by exact elimination over a spanning family.
    Synthesized,
}

impl SeedExpr {
    fn eta(parts: &[(u32, i64)]) -> SeedExpr {
        SeedExpr::Eta(EtaQuotient::new(parts))
    }

    pub fn describe(&self) -> String {
        match self {
            SeedExpr::One => "1".into(),
            SeedExpr::Eis { weight, scale } => {
                if *scale == 1 {
                    format!("E{weight}(z)")
                } else {
                    format!("E{weight}({scale}z)")
                }
            }
            SeedExpr::Phi(n) => format!("({n}*E2({n}z) - E2(z))/{}", n - 1),
            SeedExpr::Eta(e) => e.to_string(),
            SeedExpr::Delta => "Delta".into(),
            SeedExpr::LevelOne(k) => format!("E{k}"),
            SeedExpr::Ref(w) => format!("F{w}"),
            SeedExpr::Lin(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(n, d, e)| {
                        let c = if *d == 1 { format!("{n}") } else { format!("{n}/{d}") };
                        format!("{c}*[{}]", e.describe())
                    })
                    .collect();
                parts.join(" + ")
            }
            SeedExpr::Prod(fs) => fs
                .iter()
                .map(|e| e.describe())
                .collect::<Vec<_>>()
                .join(" * "),
            SeedExpr::Synthesized => "synthesized".into(),
        }
    }

    fn eval(&self, level: &LevelData, weight: i64, prec: i64) -> Result<QSeries> {
        match self {
            SeedExpr::One => Ok(QSeries::one(prec)),
            SeedExpr::Eis { weight, scale } => generators::eisenstein(*weight, *scale, prec),
            SeedExpr::Phi(n) => generators::phi(*n, prec),
            SeedExpr::Eta(e) => e.expand(prec),
            SeedExpr::Delta => generators::delta(prec),
            SeedExpr::LevelOne(k) => generators::level_one_form(*k, prec),
            SeedExpr::Ref(w) => level.seed(*w, prec),
            SeedExpr::Lin(terms) => {
                let mut acc = QSeries::zero(prec);
                for (n, d, e) in terms {
                    acc = acc.add(&e.eval(level, weight, prec)?.scale(&coeff_frac(*n, *d)));
                }
                Ok(acc)
            }
            SeedExpr::Prod(fs) => {
                let mut acc = QSeries::one(prec);
                for e in fs {
                    acc = acc.mul(&e.eval(level, weight, prec)?);
                }
                Ok(acc.truncate(prec))
            }
            SeedExpr::Synthesized => seedsynth::synthesize_seed(level.level, weight, prec),
        }
    }
}

/// Shape of the first basis element of `M_k^(inf)(N)`.
#[derive(Clone, Debug)]
pub enum VRule {
    /// `k = period*l + k'` with `k'` among `parts`; first element `F_period^l F_k'`
    /// vanishing to order `slope*l + offset(k')`.
    Periodic {
        period: i64,
        slope: i64,
        parts: Vec<(i64, i64)>,
    },
    /// First element `G^(k/2)` for a weight-2 form `G` vanishing to order `order`.
    Linear { order: i64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Flag {
    pub kind: &'static str,
    pub detail: &'static str,
}

/// Literal expansion prefix as printed in the reference tables.
#[derive(Clone, Debug)]
pub struct PrintedPrefix {
    pub label: &'static str,
    /// Seed weight, or `None` for the Hauptmodul.
    pub weight: Option<i64>,
    pub text: &'static str,
    /// Known-wrong printed line, kept only for auditing.
    pub typo: bool,
}

#[derive(Clone, Debug)]
pub enum Hauptmodul {
    J,
    Eta(EtaQuotient),
}

impl Hauptmodul {
    pub fn describe(&self) -> String {
        match self {
            Hauptmodul::J => "j".into(),
            Hauptmodul::Eta(e) => e.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: u32,
    pub cusp_count: u32,
    pub hauptmodul: Hauptmodul,
    pub v_rule: VRule,
    /// Seed recipes keyed by weight.
    pub seeds: Vec<(i64, SeedExpr)>,
    /// Monic cusp polynomial, ascending coefficients.
    pub cusp_poly: Vec<i64>,
    pub flags: Vec<Flag>,
    pub printed: Vec<PrintedPrefix>,
}

fn pp(label: &'static str, weight: Option<i64>, text: &'static str) -> PrintedPrefix {
    PrintedPrefix {
        label,
        weight,
        text,
        typo: false,
    }
}

fn eta(parts: &[(u32, i64)]) -> EtaQuotient {
    EtaQuotient::new(parts)
}

fn periodic(period: i64, slope: i64, parts: &[(i64, i64)]) -> VRule {
    VRule::Periodic {
        period,
        slope,
        parts: parts.to_vec(),
    }
}

fn build_registry() -> Vec<LevelData> {
    use SeedExpr as S;
    let mut out = Vec::new();

    out.push(LevelData {
        level: 1,
        cusp_count: 1,
        hauptmodul: Hauptmodul::J,
        v_rule: periodic(12, 1, &[(0, 0), (4, 0), (6, 0), (8, 0), (10, 0), (14, 0)]),
        seeds: vec![
            (0, S::One),
            (4, S::LevelOne(4)),
            (6, S::LevelOne(6)),
            (8, S::LevelOne(8)),
            (10, S::LevelOne(10)),
            (12, S::Delta),
            (14, S::LevelOne(14)),
        ],
        cusp_poly: vec![1],
        flags: vec![],
        printed: vec![pp(
            "j",
            None,
            "q^-1 + 744 + 196884*q + 21493760*q^2 + 864299970*q^3",
        )],
    });

    out.push(LevelData {
        level: 2,
        cusp_count: 2,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 24), (2, -24)])),
        v_rule: periodic(4, 1, &[(0, 0), (2, 0)]),
        seeds: vec![
            (0, S::One),
            (2, S::Phi(2)),
            (
                4,
                S::Lin(vec![
                    (1, 240, S::Eis { weight: 4, scale: 1 }),
                    (-1, 240, S::Eis { weight: 4, scale: 2 }),
                ]),
            ),
        ],
        cusp_poly: vec![0, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "1 + 24*q + 24*q^2 + 96*q^3 + 24*q^4"),
            pp("F4", Some(4), "q + 8*q^2 + 28*q^3 + 64*q^4"),
            pp("psi", None, "q^-1 - 24 + 276*q - 2048*q^2"),
        ],
    });

    out.push(LevelData {
        level: 3,
        cusp_count: 2,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 12), (3, -12)])),
        v_rule: periodic(6, 2, &[(0, 0), (2, 0), (4, 1)]),
        seeds: vec![
            (0, S::One),
            (2, S::Phi(3)),
            (
                4,
                S::Lin(vec![
                    (1, 216, S::Eis { weight: 4, scale: 1 }),
                    (-1, 216, S::Prod(vec![S::Ref(2), S::Ref(2)])),
                ]),
            ),
            (6, S::eta(&[(3, 18), (1, -6)])),
        ],
        cusp_poly: vec![0, 1],
        flags: vec![Flag {
            kind: "note",
            detail: "weight-6 seed line omits the equals sign between the eta quotient and its expansion; read as equality",
        }],
        printed: vec![
            pp("F2", Some(2), "1 + 12*q + 36*q^2 + 12*q^3 + 84*q^4"),
            pp("F4", Some(4), "q + 9*q^2 + 27*q^3 + 73*q^4 + 126*q^5"),
            pp("F6", Some(6), "q^2 + 6*q^3 + 27*q^4 + 80*q^5 + 207*q^6"),
            pp("psi", None, "q^-1 - 12 + 54*q - 76*q^2"),
        ],
    });

    out.push(LevelData {
        level: 4,
        cusp_count: 3,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 8), (4, -8)])),
        v_rule: VRule::Linear { order: 1 },
        seeds: vec![(
            2,
            S::Lin(vec![
                (3, 24, S::Eis { weight: 2, scale: 2 }),
                (-1, 24, S::Eis { weight: 2, scale: 1 }),
                (-2, 24, S::Eis { weight: 2, scale: 4 }),
            ]),
        )],
        cusp_poly: vec![0, 16, 1],
        flags: vec![Flag {
            kind: "paper_typo",
            detail: "weight-2 seed printed as 3E2(2z)-E2(z)-2E2(4z), which begins 24q; the printed expansion q+4q^3+... is that combination divided by 24",
        }, Flag {
            kind: "paper_typo",
            detail: "Hauptmodul expansion printed with -62q^2; the quotient gives q^-1-8+20q-62q^3 (the weight-0 basis table agrees)",
        }],
        printed: vec![
            pp("F2", Some(2), "q + 4*q^3 + 6*q^5 + 8*q^7 + 13*q^9"),
            PrintedPrefix {
                label: "psi",
                weight: None,
                text: "q^-1 - 8 + 20*q - 62*q^2",
                typo: true,
            },
        ],
    });

    out.push(LevelData {
        level: 5,
        cusp_count: 2,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 6), (5, -6)])),
        v_rule: periodic(4, 2, &[(0, 0), (2, 0)]),
        seeds: vec![
            (0, S::One),
            (2, S::Phi(5)),
            (4, S::eta(&[(5, 10), (1, -2)])),
        ],
        cusp_poly: vec![0, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "1 + 6*q + 18*q^2 + 24*q^3 + 42*q^4"),
            pp("F4", Some(4), "q^2 + 2*q^3 + 5*q^4 + 10*q^5 + 20*q^6"),
            pp("psi", None, "q^-1 - 6 + 9*q + 10*q^2 - 30*q^3"),
        ],
    });

    out.push(LevelData {
        level: 6,
        cusp_count: 4,
        hauptmodul: Hauptmodul::Eta(eta(&[(2, 8), (3, 4), (1, -4), (6, -8)])),
        v_rule: VRule::Linear { order: 2 },
        seeds: vec![(2, S::eta(&[(1, 2), (6, 12), (2, -4), (3, -6)]))],
        cusp_poly: vec![0, 9, -10, 1],
        flags: vec![Flag {
            kind: "paper_typo",
            detail: "cusp polynomial printed as x^3-10x+9x; stored x^3-10x^2+9x, derived from numeric cusp values and confirmed by duality",
        }],
        printed: vec![
            pp("F2", Some(2), "q^2 - 2*q^3 + 3*q^4 - q^6 + 7*q^8"),
            pp("psi", None, "q^-1 + 4 + 6*q + 4*q^2 - 3*q^3"),
        ],
    });

    out.push(LevelData {
        level: 7,
        cusp_count: 2,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 4), (7, -4)])),
        v_rule: periodic(6, 4, &[(0, 0), (2, 0), (4, 2)]),
        seeds: vec![
            (0, S::One),
            (2, S::Phi(7)),
            (4, S::Synthesized),
            (6, S::eta(&[(7, 14), (1, -2)])),
        ],
        cusp_poly: vec![0, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "1 + 4*q + 12*q^2 + 16*q^3 + 28*q^4"),
            pp("F4", Some(4), "q^2 + 3*q^3 + 8*q^4 + 11*q^5"),
            pp("F6", Some(6), "q^4 + 2*q^5 + 5*q^6 + 10*q^7 + 20*q^8"),
            pp("psi", None, "q^-1 - 4 + 2*q + 8*q^2 - 5*q^3"),
        ],
    });

    out.push(LevelData {
        level: 8,
        cusp_count: 4,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 4), (4, 2), (2, -2), (8, -4)])),
        v_rule: VRule::Linear { order: 2 },
        seeds: vec![(2, S::eta(&[(8, 8), (4, -4)]))],
        cusp_poly: vec![0, 32, 12, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "q^2 + 4*q^6 + 6*q^10 + 8*q^14 + 13*q^18"),
            pp("psi", None, "q^-1 - 4 + 4*q + 2*q^3 - 8*q^5"),
        ],
    });

    out.push(LevelData {
        level: 9,
        cusp_count: 4,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 3), (9, -3)])),
        v_rule: VRule::Linear { order: 2 },
        seeds: vec![(2, S::eta(&[(9, 6), (3, -2)]))],
        cusp_poly: vec![0, 27, 9, 1],
        flags: vec![Flag {
            kind: "paper_typo",
            detail: "Hauptmodul line duplicates the level-8 quotient and expansion; stored eta(1)^3 * eta(9)^-3",
        }],
        printed: vec![
            pp("F2", Some(2), "q^2 + 2*q^5 + 5*q^8 + 4*q^11 + 8*q^14"),
            PrintedPrefix {
                label: "psi",
                weight: None,
                text: "q^-1 - 4 + 4*q + 2*q^3 - 8*q^5",
                typo: true,
            },
        ],
    });

    out.push(LevelData {
        level: 10,
        cusp_count: 4,
        hauptmodul: Hauptmodul::Eta(eta(&[(2, 1), (5, 5), (1, -1), (10, -5)])),
        v_rule: periodic(4, 6, &[(0, 0), (2, 2)]),
        seeds: vec![(0, S::One), (2, S::Synthesized), (4, S::Synthesized)],
        cusp_poly: vec![0, -4, -3, 1],
        flags: vec![Flag {
            kind: "note",
            detail: "weight-2 and weight-4 seeds differ from an earlier published table for this level; only the printed prefixes here are trusted",
        }],
        printed: vec![
            pp("F2", Some(2), "q^2 + 3*q^4 - 4*q^5 + 4*q^6 + 7*q^8"),
            pp("F4", Some(4), "q^6 - 2*q^7 + 3*q^8 - 6*q^9 + 11*q^10"),
            pp("psi", None, "q^-1 + 1 + q + 2*q^2 + 2*q^3"),
        ],
    });

    out.push(LevelData {
        level: 12,
        cusp_count: 6,
        hauptmodul: Hauptmodul::Eta(eta(&[(4, 4), (6, 2), (2, -2), (12, -4)])),
        v_rule: VRule::Linear { order: 4 },
        seeds: vec![(
            2,
            S::Lin(vec![
                (1, 27, S::eta(&[(1, 10), (4, 1), (6, 9), (2, -7), (3, -6), (12, -3)])),
                (11, 72, S::eta(&[(1, 7), (4, 4), (6, 9), (2, -7), (3, -5), (12, -4)])),
                (-1, 12, S::eta(&[(1, 4), (4, 7), (6, 9), (2, -7), (3, -4), (12, -5)])),
                (1, 54, S::eta(&[(1, 1), (4, 10), (6, 9), (2, -7), (3, -3), (12, -6)])),
                (-1, 8, S::eta(&[(1, 9), (4, 3), (6, 2), (2, -6), (3, -3), (12, -1)])),
            ]),
        )],
        cusp_poly: vec![0, 9, 0, -10, 0, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "q^4 - 2*q^6 + 3*q^8 - q^12 + 7*q^16"),
            pp("psi", None, "q^-1 + 2*q + q^3 - 2*q^7"),
        ],
    });

    out.push(LevelData {
        level: 13,
        cusp_count: 2,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 2), (13, -2)])),
        v_rule: periodic(
            12,
            14,
            &[(0, 0), (2, 0), (4, 4), (6, 6), (8, 8), (10, 10)],
        ),
        seeds: vec![
            (0, S::One),
            (2, S::Phi(13)),
            (4, S::Synthesized),
            (6, S::Synthesized),
            (8, S::Prod(vec![S::Ref(4), S::Ref(4)])),
            (10, S::Prod(vec![S::Ref(4), S::Ref(6)])),
            (12, S::eta(&[(13, 26), (1, -2)])),
        ],
        cusp_poly: vec![0, 1],
        flags: vec![Flag {
            kind: "paper_conflict",
            detail: "printed F4, F6 (and F8=F4^2, F10=F4*F6) are not modular on Gamma0(13); bases use the synthesized seeds q^4+q^5+3q^6+... and q^6+2q^7+4q^8+...",
        }],
        printed: vec![
            pp("F2", Some(2), "1 + 2*q + 6*q^2 + 8*q^3 + 14*q^4"),
            pp("F4", Some(4), "q^4 + q^5 + q^6 - q^7 - 3*q^9"),
            pp("F6", Some(6), "q^6 + q^7 + q^8 + 3*q^9 + 2*q^11"),
            pp("F8", Some(8), "q^8 + 2*q^9 + 3*q^10 - q^12 - 8*q^13"),
            pp("F10", Some(10), "q^10 + 2*q^11 + 3*q^12 + 4*q^13 + 3*q^14"),
            pp("F12", Some(12), "q^14 + 2*q^15 + 5*q^16 + 10*q^17 + 20*q^18"),
            pp("psi", None, "q^-1 - 2 - q + 2*q^2 + q^3"),
        ],
    });

    out.push(LevelData {
        level: 16,
        cusp_count: 6,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 2), (8, 1), (2, -1), (16, -2)])),
        v_rule: VRule::Linear { order: 4 },
        seeds: vec![(2, S::eta(&[(16, 8), (8, -4)]))],
        cusp_poly: vec![0, 64, 80, 40, 10, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "q^4 + 4*q^12 + 6*q^20 + 8*q^28 + 13*q^36"),
            pp("psi", None, "q^-1 - 2 + 2*q^3 - q^7"),
        ],
    });

    out.push(LevelData {
        level: 18,
        cusp_count: 8,
        hauptmodul: Hauptmodul::Eta(eta(&[(6, 1), (9, 3), (3, -1), (18, -3)])),
        v_rule: VRule::Linear { order: 6 },
        seeds: vec![(
            2,
            S::Lin(vec![
                (25, 216, S::eta(&[(1, 8), (6, 2), (9, 4), (2, -4), (3, -4), (18, -2)])),
                (-11, 144, S::eta(&[(1, 3), (6, 8), (9, 7), (2, -3), (3, -6), (18, -5)])),
                (-121, 972, S::eta(&[(1, 6), (6, 7), (9, 1), (2, -3), (3, -5), (18, -2)])),
                (-41, 144, S::eta(&[(1, 6), (6, 2), (9, 6), (2, -3), (3, -4), (18, -3)])),
                (67, 144, S::eta(&[(1, 4), (6, 7), (9, 3), (2, -2), (3, -5), (18, -3)])),
                (1, 972, S::eta(&[(2, 9), (3, 8), (18, 1), (1, -6), (6, -6), (9, -2)])),
                (-125, 1296, S::eta(&[(1, 1), (2, 4), (9, 2), (3, -1), (6, -1), (18, -1)])),
            ]),
        )],
        cusp_poly: vec![0, -8, 0, 0, -7, 0, 0, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "q^6 - 2*q^9 + 3*q^12 - q^18 + 7*q^24"),
            pp("psi", None, "q^-1 + q^2 + q^5 - q^8"),
        ],
    });

    out.push(LevelData {
        level: 25,
        cusp_count: 6,
        hauptmodul: Hauptmodul::Eta(eta(&[(1, 1), (25, -1)])),
        v_rule: periodic(4, 10, &[(0, 0), (2, 4)]),
        seeds: vec![
            (0, S::One),
            (2, S::Synthesized),
            (4, S::eta(&[(25, 10), (5, -2)])),
        ],
        cusp_poly: vec![0, 25, 25, 15, 5, 1],
        flags: vec![],
        printed: vec![
            pp("F2", Some(2), "q^4 + q^6 + 2*q^9 + 3*q^14 + 2*q^16"),
            pp("F4", Some(4), "q^10 + 2*q^15 + 5*q^20 + 10*q^25 + 20*q^30"),
            pp("psi", None, "q^-1 - 1 - q + q^4 + q^6"),
        ],
    });

    out
}

/// Registry-wide annotation on how basis tails are indexed.
pub const GLOBAL_FLAGS: [Flag; 1] = [Flag {
    kind: "paper_typo",
    detail: "displayed basis expansion starts its tail at -v+1; every printed example starts it at v+1, which is the convention used",
}];

fn registry() -> &'static [LevelData] {
    static REG: std::sync::OnceLock<Vec<LevelData>> = std::sync::OnceLock::new();
    REG.get_or_init(build_registry)
}

pub fn all_levels() -> &'static [LevelData] {
    registry()
}

pub fn get_level(n: u32) -> Result<&'static LevelData> {
    registry()
        .iter()
        .find(|l| l.level == n)
        .ok_or(Error::NotGenusZero(n))
}

pub fn is_registered(n: u32) -> bool {
    LEVELS.contains(&n)
}

fn check_even(k: i64) -> Result<()> {
    if k % 2 != 0 {
        Err(Error::OddWeight(k))
    } else {
        Ok(())
    }
}

/// Splits `k = period*l + k'` with `k'` a listed part; returns `(l, k', offset)`.
fn decompose(period: i64, parts: &[(i64, i64)], k: i64) -> (i64, i64, i64) {
    for &(kp, off) in parts {
        if (k - kp).rem_euclid(period) == 0 {
            return ((k - kp).div_euclid(period), kp, off);
        }
    }
    unreachable!("registry parts cover every even residue")
}

impl LevelData {
    pub fn v(&self, k: i64) -> Result<i64> {
        check_even(k)?;
        Ok(match &self.v_rule {
            VRule::Periodic {
                period,
                slope,
                parts,
            } => {
                let (l, _, off) = decompose(*period, parts, k);
                slope * l + off
            }
            VRule::Linear { order } => (k / 2) * order,
        })
    }

    pub fn u(&self, k: i64) -> Result<i64> {
        Ok(self.v(k)? - (self.cusp_count as i64 - 1))
    }

    pub fn bound(&self, k: i64, space: Space) -> Result<i64> {
        match space {
            Space::Inf => self.v(k),
            Space::Hat => self.u(k),
        }
    }

    pub fn recipe(&self, weight: i64) -> Option<&SeedExpr> {
        self.seeds.iter().find(|(w, _)| *w == weight).map(|(_, e)| e)
    }

    /// Seed `F_weight` of this level to absolute precision `prec`.
    pub fn seed(&self, weight: i64, prec: i64) -> Result<QSeries> {
        let expr = self.recipe(weight).ok_or_else(|| {
            Error::Invalid(format!("level {} has no seed of weight {weight}", self.level))
        })?;
        expr.eval(self, weight, prec)
    }

    /// Hauptmodul to absolute precision `prec`.
    pub fn hauptmodul_series(&self, prec: i64) -> Result<QSeries> {
        match &self.hauptmodul {
            Hauptmodul::J => generators::j_function(prec),
            Hauptmodul::Eta(e) => e.expand(prec),
        }
    }

    /// Expresses the first element of weight `k` as `base^l * factor`, returning
    /// `(base weight, l, factor weight)`; `base weight` 0 means no power.
    pub fn first_element_shape(&self, k: i64) -> Result<(i64, i64, i64)> {
        check_even(k)?;
        Ok(match &self.v_rule {
            VRule::Periodic { period, parts, .. } => {
                let (l, kp, _) = decompose(*period, parts, k);
                (*period, l, kp)
            }
            VRule::Linear { .. } => (2, k / 2, 0),
        })
    }

    pub fn cusp_poly_string(&self) -> String {
        poly_string(&self.cusp_poly)
    }

    pub fn printed_series(&self, p: &PrintedPrefix) -> QSeries {
        p.text.parse().expect("registry prefix parses")
    }

    /// JSON description used by the registry dump.
    pub fn to_json(&self) -> Value {
        let samples: Vec<Value> = (-4..=12)
            .step_by(2)
            .map(|k| json!({"k": k, "v": self.v(k).unwrap(), "u": self.u(k).unwrap()}))
            .collect();
        let seeds: Vec<Value> = self
            .seeds
            .iter()
            .map(|(w, e)| json!({"weight": w, "recipe": e.describe()}))
            .collect();
        json!({
            "N": self.level,
            "cusps": self.cusp_count,
            "hauptmodul": self.hauptmodul.describe(),
            "u_minus_v": -(self.cusp_count as i64 - 1),
            "v_u_samples": samples,
            "seeds": seeds,
            "cusp_poly": self.cusp_poly_string(),
            "flags": self.flags,
        })
    }
}

pub fn poly_string(asc: &[i64]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in asc.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        let mag = c.abs();
        let body = if mono.is_empty() {
            mag.to_string()
        } else if mag == 1 {
            mono
        } else {
            format!("{mag}{mono}")
        };
        let sign = if c < 0 { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if c < 0 { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{sign}{body}"));
        }
    }
    parts.concat()
}

/// Full registry as a JSON document.
pub fn registry_json() -> Value {
    json!({
        "levels": registry().iter().map(|l| l.to_json()).collect::<Vec<_>>(),
        "global_flags": GLOBAL_FLAGS,
    })
}

/// `P(psi)` for the level's cusp polynomial: vanishes at every cusp except infinity.
pub fn cusp_killer(n: u32, prec: i64) -> Result<QSeries> {
    let level = get_level(n)?;
    let deg = level.cusp_poly.len() as i64 - 1;
    if deg == 0 {
        return Ok(QSeries::one(prec));
    }
    // psi^deg has valuation -deg; each factor needs deg extra terms
    let psi = level.hauptmodul_series(prec + deg * 2)?;
    let out = psi.eval_poly(&level.cusp_poly, prec + deg * 2);
    if out.prec() < prec {
        return Err(Error::Internal(format!(
            "cusp polynomial for level {n} lost precision ({} < {prec})",
            out.prec()
        )));
    }
    Ok(out.truncate(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(get_level(6).unwrap().cusp_count, 4);
        assert_eq!(get_level(11).unwrap_err(), Error::NotGenusZero(11));
        assert_eq!(all_levels().len(), 15);
    }

    #[test]
    fn vanishing_orders() {
        let l18 = get_level(18).unwrap();
        for k in (-10..=10).step_by(2) {
            assert_eq!(l18.u(k).unwrap(), 3 * k - 7);
        }
        assert_eq!(get_level(13).unwrap().v(4).unwrap(), 4);
        assert_eq!(get_level(13).unwrap().v(14).unwrap(), 14);
        assert_eq!(get_level(2).unwrap().v(-6).unwrap(), -2);
        assert_eq!(get_level(2).unwrap().u(8).unwrap(), 1);
        assert_eq!(get_level(1).unwrap().v(2).unwrap(), -1);
        assert_eq!(get_level(3).unwrap().v(4).unwrap(), 1);
        assert_eq!(get_level(25).unwrap().v(2).unwrap(), 4);
        assert_eq!(get_level(10).unwrap().v(-2).unwrap(), -4);
        assert!(matches!(get_level(2).unwrap().v(3), Err(Error::OddWeight(3))));
    }

    #[test]
    fn poly_strings() {
        assert_eq!(get_level(6).unwrap().cusp_poly_string(), "x^3-10x^2+9x");
        assert_eq!(get_level(18).unwrap().cusp_poly_string(), "x^7-7x^4-8x");
        assert_eq!(get_level(1).unwrap().cusp_poly_string(), "1");
    }

    #[test]
    fn killer_level_five() {
        let g = cusp_killer(5, 4)
            .unwrap()
            .mul(&get_level(5).unwrap().seed(2, 10).unwrap());
        assert_eq!(g.truncate(3), "q^-1 - 9*q - 20*q^2 + O(q^3)".parse().unwrap());
    }
}
