use gridforge_core::leveldata::get_level;
use gridforge_core::seedsynth::{synthesize_report, synthesize_seed, synthesize_unchecked};
use gridforge_core::{Error, QSeries};

fn s(t: &str) -> QSeries {
    t.parse().unwrap()
}

#[test]
fn synthesized_seeds_match_printed_prefixes() {
    let cases = [
        (7, 4, "q^2 + 3*q^3 + 8*q^4 + 11*q^5"),
        (10, 2, "q^2 + 3*q^4 - 4*q^5 + 4*q^6 + 7*q^8"),
        (10, 4, "q^6 - 2*q^7 + 3*q^8 - 6*q^9 + 11*q^10"),
        (25, 2, "q^4 + q^6 + 2*q^9 + 3*q^14 + 2*q^16"),
    ];
    for (n, k, text) in cases {
        let want = s(text);
        let got = synthesize_seed(n, k, 40).unwrap();
        assert_eq!(got.truncate(want.prec()), want, "level {n} weight {k}");
        assert_eq!(got.prec(), 40);
        assert!(synthesize_report(n, k, 20).is_ok());
    }
}

/// `F^e / F12` must be a polynomial in the Hauptmodul when `F` is a genuine
/// holomorphic form of weight `12/e` on `Gamma0(13)`: `F12` is an eta quotient
/// without zeros away from infinity. Returns the precision to which the
/// remainder vanishes, or the first exponent where it does not.
fn psi_polynomial_remainder(f: &QSeries, e: i64, prec: i64) -> Result<i64, i64> {
    let l = get_level(13).unwrap();
    let f12 = l.seed(12, prec + 14).unwrap();
    let psi = l.hauptmodul_series(prec + 4).unwrap();
    let mut rem = f.pow(e).unwrap().mul(&f12.invert(prec).unwrap());
    while let Some(v) = rem.valuation_opt() {
        if v > 0 {
            return Err(v);
        }
        let c = rem.coeff(v).unwrap();
        let term = if v == 0 {
            QSeries::monomial(0, c, prec)
        } else {
            psi.pow(-v).unwrap().scale(&c)
        };
        rem = rem.sub(&term);
    }
    Ok(rem.prec())
}

#[test]
fn level_thirteen_seeds_are_modular() {
    let f4 = synthesize_seed(13, 4, 60).unwrap();
    let f6 = synthesize_seed(13, 6, 60).unwrap();
    assert_eq!(
        f4.truncate(10),
        s("q^4 + q^5 + 3*q^6 + 3*q^7 + 4*q^8 + 6*q^9 + O(q^10)")
    );
    assert_eq!(
        f6.truncate(12),
        s("q^6 + 2*q^7 + 4*q^8 + 6*q^9 + 13*q^10 + 16*q^11 + O(q^12)")
    );
    assert!(psi_polynomial_remainder(&f4, 3, 40).unwrap() >= 30);
    assert!(psi_polynomial_remainder(&f6, 2, 40).unwrap() >= 30);
}

#[test]
fn level_thirteen_printed_prefixes_fail_modularity() {
    let printed4 = s("q^4 + q^5 + q^6 - q^7 + 0*q^8 - 3*q^9 + O(q^10)");
    let printed6 = s("q^6 + q^7 + q^8 + 3*q^9 + 0*q^10 + 2*q^11 + O(q^12)");
    assert_eq!(psi_polynomial_remainder(&printed4, 3, 40), Err(1));
    assert_eq!(psi_polynomial_remainder(&printed6, 2, 40), Err(1));
    assert!(matches!(
        synthesize_report(13, 4, 20),
        Err(Error::SeedMismatch { level: 13, weight: 4, exponent: 6 })
    ));
}

#[test]
fn synthesis_report_is_auditable() {
    let r = synthesize_unchecked(25, 2, 30).unwrap();
    assert_eq!(r.seed.valuation().unwrap(), 4);
    assert!(r.rank > 0);
    assert!(r.family.iter().any(|m| m.label == "phi5(5z)"));
}
