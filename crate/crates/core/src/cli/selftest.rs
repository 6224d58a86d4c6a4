//! Fast checks of the basic identities, run by the `selftest` subcommand.

use crate::error::Result;
use crate::extrapolate::richardson;
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::report::table_csv;
use crate::harness::{self, ConvergenceTable, Settings, Verdict};
use crate::immersion::{clifford_baseline, gate, structural_residual};
use crate::random::{random_form, seeded_rng};

fn checks() -> Vec<(&'static str, fn() -> Result<bool>)> {
    vec![
        ("d of a constant form vanishes", || {
            let g = TorusGrid::unit(&[16, 16])?;
            Ok(Form::constant(&g, 1, &[1.0, -2.0])?.exterior_derivative()?.max_abs() == 0.0)
        }),
        ("d∘d vanishes on a random 1-form", || {
            let g = TorusGrid::unit(&[16, 16, 16])?;
            let w = random_form(&g, 1, 4, &mut seeded_rng(1))?;
            Ok(w.exterior_derivative()?.exterior_derivative()?.max_abs() <= 1e-9 * w.max_abs().max(1.0))
        }),
        ("⋆⋆ = −1 on 1-forms of T²", || {
            let g = TorusGrid::unit(&[16, 16])?;
            let w = random_form(&g, 1, 4, &mut seeded_rng(2))?;
            Ok(w.hodge_star().hodge_star().add(&w)?.max_abs() == 0.0)
        }),
        ("dx₁ ∧ dx₂ = −dx₂ ∧ dx₁", || {
            let g = TorusGrid::unit(&[8, 8])?;
            let a = Form::constant(&g, 1, &[1.0, 0.0])?;
            let b = Form::constant(&g, 1, &[0.0, 1.0])?;
            Ok(a.wedge(&b)?.add(&b.wedge(&a)?)?.max_abs() == 0.0 && a.wedge(&b)?.means() == vec![1.0])
        }),
        ("Richardson is exact on c + d/n", || {
            let e = richardson(&[4, 8, 16], &[2.25, 2.125, 2.0625]);
            Ok((e.value - 2.0).abs() < 1e-12)
        }),
        ("empty table gives a header-only CSV", || {
            Ok(table_csv(&ConvergenceTable::empty("t")) == "n,test_id,value,residual\n")
        }),
        ("the immersion gate refuses p = 1.2", || Ok(gate(1.2, 2, false).is_err() && gate(1.5, 2, false).is_ok())),
        ("Clifford torus solves the structural equations", || {
            let (_, omega) = clifford_baseline(&TorusGrid::unit(&[32, 32])?)?;
            Ok(structural_residual(&omega, 2.0)? <= 1e-10)
        }),
        ("default decomposition passes", || {
            let s = harness::settings_for("decompose", &Settings::default())?;
            Ok(harness::run("decompose", &s)?.verdict == Verdict::Pass)
        }),
    ]
}

pub fn run() -> i32 {
    let mut failed = 0;
    for (name, check) in checks() {
        let ok = matches!(check(), Ok(true));
        println!("[{}] {name}", if ok { "pass" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        Verdict::Pass.exit_code()
    } else {
        Verdict::Fail.exit_code()
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        assert_eq!(super::run(), 0);
    }
}
