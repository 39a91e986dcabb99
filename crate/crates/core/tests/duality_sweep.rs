use std::time::Instant;

use gridforge_core::basis::{build_grid, duality_residual};
use gridforge_core::leveldata::LEVELS;
use num_traits::Zero;

#[test]
fn duality_holds_on_every_level_and_weight() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for &n in LEVELS.iter() {
        for k in (-10..=10).step_by(2) {
            let grid = match build_grid(n, k, 20, 60) {
                Ok(g) => g,
                Err(e) => {
                    failures.push(format!("N={n} k={k}: {e}"));
                    continue;
                }
            };
            let r = duality_residual(&grid, 20, 20).unwrap();
            if !r.residual.is_zero() {
                failures.push(format!("N={n} k={k}: residual {} at {:?}", r.residual, r.witness));
            }
            // b_{2-k}(n, m) = 0 whenever m < -n
            for gi in grid.gside.indices() {
                for (e, _) in grid.gside.element(gi).unwrap().terms() {
                    if e < -gi {
                        failures.push(format!("N={n} k={k}: g_{gi} has q^{e}"));
                    }
                }
            }
        }
    }
    eprintln!("sweep took {:?}", t.elapsed());
    assert!(failures.is_empty(), "{failures:#?}");
}
