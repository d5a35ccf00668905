//! Regenerates the index-instantiated fixture files when run with
//! PVAKIT_REGEN_FIXTURES=1 (development helper; the guard test in the
//! fixtures module keeps the shipped files in sync).
use pvakit_core::fixtures;
use std::fs;
use std::path::Path;

#[test]
fn regen_generated_fixtures() {
    if std::env::var_os("PVAKIT_REGEN_FIXTURES").is_none() {
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mok = fixtures::render_system(
        "mokhov",
        "Compatibility conditions on generic hydrodynamic data (d = n = 2): metric symmetry, connection compatibility, and the Jacobi-derived families, instantiated over all index values.",
        &fixtures::mokhov_transcription(),
    );
    fs::write(dir.join("mokhov_d2n2.txt"), mok).unwrap();
    let symp1 = fixtures::render_system(
        "symmetry-p1",
        "First-order symmetry conditions of the first constant normal form (d = n = 2), instantiated over all index values.",
        &fixtures::symmetry_p1_transcription(),
    );
    fs::write(dir.join("symmetry_p1.txt"), symp1).unwrap();
}
