use gridforge_core::basis::build_grid;
use gridforge_core::leveldata::{self, registry_json};
use gridforge_core::QSeries;

fn s(t: &str) -> QSeries {
    t.parse().unwrap()
}

/// Printed lines the engine does not reproduce, with the reason recorded in the registry.
const KNOWN_BAD: [(u32, &str); 6] = [
    (4, "psi"),
    (9, "psi"),
    (13, "F4"),
    (13, "F6"),
    (13, "F8"),
    (13, "F10"),
];

#[test]
fn printed_prefixes_reproduced() {
    let mut checked = 0;
    for level in leveldata::all_levels() {
        for p in &level.printed {
            let printed = level.printed_series(p);
            let got = match p.weight {
                Some(w) => level.seed(w, printed.prec()).unwrap(),
                None => level.hauptmodul_series(printed.prec()).unwrap(),
            };
            let bad = KNOWN_BAD.contains(&(level.level, p.label));
            assert_eq!(got == printed, !bad, "level {} {}: got {got}", level.level, p.label);
            checked += 1;
        }
    }
    assert!(checked >= 40, "only {checked} printed lines");
}

#[test]
fn known_bad_lines_are_flagged() {
    for (n, label) in KNOWN_BAD {
        let level = leveldata::get_level(n).unwrap();
        let p = level.printed.iter().find(|p| p.label == label).unwrap();
        let flagged = p.typo || level.flags.iter().any(|f| f.kind == "paper_conflict");
        assert!(flagged, "level {n} {label}");
    }
    let level6 = leveldata::get_level(6).unwrap();
    assert!(level6.flags.iter().any(|f| f.kind == "paper_typo"));
    assert_eq!(level6.cusp_poly_string(), "x^3-10x^2+9x");
}

#[test]
fn registry_dump_shape() {
    let dump = registry_json();
    let levels = dump["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 15);
    let two = levels.iter().find(|l| l["N"] == 2).unwrap();
    assert_eq!(two["u_minus_v"], -1);
    let nine = levels.iter().find(|l| l["N"] == 9).unwrap();
    assert!(nine["flags"].to_string().contains("paper_typo"));
}

#[test]
fn small_grids() {
    let g = build_grid(4, 0, 4, 8).unwrap();
    assert_eq!(g.fside.element(1).unwrap().truncate(4), s("q^-1 + 20*q + 0*q^2 - 62*q^3 + O(q^4)"));
    assert_eq!(g.gside.element(3).unwrap().truncate(4), s("q^-3 + 62*q - 4928*q^3 + O(q^4)"));
    assert_eq!(g.gside.element(1).unwrap().truncate(6), s("q^-1 - 20*q + 186*q^3 - 1080*q^5 + O(q^6)"));
    let g = build_grid(2, -6, 3, 8).unwrap();
    assert_eq!(g.fside.start, 2);
    assert_eq!(g.fside.element(2).unwrap().truncate(2), s("q^-2 + 8*q^-1 - 224 + 2144*q + O(q^2)"));
    assert_eq!(g.gside.element(-1).unwrap().truncate(5), s("q - 8*q^2 + 12*q^3 + 64*q^4 + O(q^5)"));
    // printed as -181756q^4; duality with the printed f_{-6,4} (+1817856q) fixes the digit
    assert_eq!(
        g.gside.element(1).unwrap().truncate(5),
        s("q^-1 - 2144*q^2 + 98226*q^3 - 1817856*q^4 + O(q^5)")
    );
    let g = build_grid(1, 0, 3, 8).unwrap();
    assert_eq!(g.fside.start, 0);
    assert_eq!(g.fside.element(0).unwrap(), &QSeries::one(g.fside.prec));
}
