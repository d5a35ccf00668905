//! Development probe: reconcile generated tables against fixture files.
use pvakit_core::catalog::NormalForm;
use pvakit_core::defo::first_order_jacobi_conditions;
use pvakit_core::diff::Dims;
use pvakit_core::fixtures;
use pvakit_core::verify::{compare_tables, Verdict};

#[test]
fn compare_appendix_tables() {
    for (which, fixname) in [
        (NormalForm::P1, "appendix-p1"),
        (NormalForm::P2, "appendix-p2"),
        (NormalForm::LiePoisson, "appendix-lp"),
    ] {
        let out = first_order_jacobi_conditions(which, Dims::new(2, 2).unwrap()).unwrap();
        let fix = fixtures::load(fixname).unwrap();
        let rep = compare_tables(
            &out.elimination.solved,
            fix.assign(fixname),
            &out.elimination.residual,
            2,
            3,
            0..3,
        )
        .unwrap();
        println!("==== {} (missing from fixture: {:?})", fixname, rep.missing);
        for e in &rep.entries {
            if e.verdict != Verdict::Exact || e.used_alt {
                println!(
                    "  {}: {:?} used_alt={} flagged={}",
                    e.name, e.verdict, e.used_alt, e.flagged
                );
            }
        }
        println!(
            "  exact: {}/{} localized: {}",
            rep.exact_count(),
            rep.entries.len(),
            rep.localized_to_flags()
        );
    }
}
