//! Keeps the JSON fixtures shipped in `fixtures/` byte-identical to the
//! code that generates them.
//!
//! `shipped_fixtures_match_their_generators` is the everyday guard. After
//! changing a generator on purpose, refresh the files with
//! `cargo test -p cpmap --test fixtures -- --ignored`.

use cpmap::jsonio::{channel_to_json, filter_bank_to_json, matrix_to_json, superoperator_to_json};
use cpmap::presets;
use cpmap::{C64, CMatrix};
use std::fs;
use std::path::PathBuf;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn generated_fixtures() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for k in 2..=6usize {
        out.push((
            format!("arveson_k{k}.json"),
            superoperator_to_json(&presets::arveson_superoperator(k).unwrap()),
        ));
    }
    out.push((
        "wavelet_compression_9x9.json".into(),
        superoperator_to_json(&presets::wavelet_compression_superoperator().unwrap()),
    ));
    out.push((
        "wavelet_compression_published_variant.json".into(),
        superoperator_to_json(&presets::wavelet_compression_published_variant().unwrap()),
    ));
    out.push((
        "compression_filter_bank.json".into(),
        filter_bank_to_json(&presets::wavelet_compression_filter_bank()),
    ));
    out.push((
        "haar_filter_bank.json".into(),
        filter_bank_to_json(&presets::haar_filter_bank()),
    ));
    out.push((
        "identity_channel_d2.json".into(),
        channel_to_json(&presets::identity_channel(2).unwrap()),
    ));
    out.push((
        "pauli_mixing_channel.json".into(),
        channel_to_json(&presets::pauli_mixing_channel()),
    ));
    out.push((
        "phase_damping.json".into(),
        channel_to_json(&presets::phase_damping(0.75).unwrap()),
    ));
    out.push((
        "amplitude_damping.json".into(),
        channel_to_json(&presets::amplitude_damping(0.3).unwrap()),
    ));
    out.push((
        "transpose_superoperator_d2.json".into(),
        superoperator_to_json(&presets::transpose_superoperator(2).unwrap()),
    ));
    let mut first_unit = CMatrix::zeros(3, 3);
    first_unit[(0, 0)] = C64::new(1.0, 0.0);
    out.push((
        "projection_first_unit_d3.json".into(),
        matrix_to_json(&first_unit),
    ));
    for (_, content) in &mut out {
        content.push('\n');
    }
    out
}

#[test]
fn shipped_fixtures_match_their_generators() {
    for (name, expected) in generated_fixtures() {
        let path = fixture_dir().join(&name);
        let actual = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("reading fixture {name}: {e}"));
        assert_eq!(
            actual, expected,
            "fixture {name} is stale; rerun the ignored regenerate_fixtures test"
        );
    }
}

#[test]
#[ignore = "rewrites the fixture files from their generators"]
fn regenerate_fixtures() {
    let dir = fixture_dir();
    fs::create_dir_all(&dir).expect("creating the fixtures directory");
    for (name, content) in generated_fixtures() {
        fs::write(dir.join(&name), content)
            .unwrap_or_else(|e| panic!("writing fixture {name}: {e}"));
    }
}
