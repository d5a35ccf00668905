use pvakit_core::catalog::NormalForm;
use pvakit_core::defo::first_order_jacobi_conditions;
use pvakit_core::diff::Dims;
use pvakit_core::print::{scalar_text, Names};

#[test]
fn dump_tables() {
    let names = Names::from_list(&["p", "q"]);
    for which in [NormalForm::P2, NormalForm::LiePoisson] {
        let out = first_order_jacobi_conditions(which, Dims::new(2, 2).unwrap()).unwrap();
        println!("==== {:?} (residual {} eqs)", which, out.elimination.residual.len());
        let mut solved: Vec<_> = out.elimination.solved.clone();
        solved.sort_by(|a, b| a.0.cmp(&b.0));
        for (n, v) in &solved {
            println!("{} = {}", n, scalar_text(v, &names));
        }
        for e in out.elimination.residual.eqs.iter().take(12) {
            println!("RES: {}", scalar_text(e, &names));
        }
    }
}
